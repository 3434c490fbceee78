//! Exact-arithmetic engine for asymptotic invariants of base loci on three
//! classes of finitely presented models: surfaces given by intersection data,
//! smooth complete toric varieties given by fans, and multigraded monomial
//! systems. Everything is computed over the rationals; no floating point
//! enters any decision.

pub mod error;
pub mod rational;
pub mod surd;

pub mod linalg;
pub mod lp;
pub mod monomial;
pub mod cone;
pub mod catalog;
pub mod convex;
pub mod fan;
pub mod graded;
pub mod io;
pub mod polyhedron;
pub mod surface;
pub mod toric;
pub mod sampling;
pub mod verification;

pub use error::{Error, Result};
pub use rational::{Int, Rat};
