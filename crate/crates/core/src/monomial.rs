//! Monomial ideals, Newton polyhedra, integral closure, and the Arnold and
//! Samuel multiplicities computed from them.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    dot_int_rat, kernel_basis, primitive_from_rational, IVec, QMatrix, QVector,
};
use crate::polyhedron::{combinations, HalfSpace, Polyhedron};
use crate::rational::{Int, Rat};

/// A monomial ideal given by its minimal generators (an antichain of
/// exponent vectors under componentwise order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    vars: usize,
    generators: Vec<Vec<u64>>,
}

impl MonomialIdeal {
    pub fn new(vars: usize, generators: Vec<Vec<u64>>) -> Self {
        for g in &generators {
            assert_eq!(g.len(), vars, "exponent dimension mismatch");
        }
        let mut set: BTreeSet<Vec<u64>> = generators.into_iter().collect();
        // Antichain reduction: drop any generator dominating another.
        let reduced: Vec<Vec<u64>> = set
            .iter()
            .filter(|g| {
                !set.iter()
                    .any(|h| *h != **g && h.iter().zip(g.iter()).all(|(a, b)| a <= b))
            })
            .cloned()
            .collect();
        set = reduced.into_iter().collect();
        MonomialIdeal {
            vars,
            generators: set.into_iter().collect(),
        }
    }

    pub fn zero(vars: usize) -> Self {
        MonomialIdeal {
            vars,
            generators: Vec::new(),
        }
    }

    pub fn unit(vars: usize) -> Self {
        MonomialIdeal::new(vars, vec![vec![0; vars]])
    }

    /// The power ideal (x_1, ..., x_n)^c.
    pub fn maximal_power(vars: usize, c: u64) -> Self {
        let mut gens = Vec::new();
        let mut stack = vec![(Vec::<u64>::new(), c)];
        while let Some((prefix, rest)) = stack.pop() {
            if prefix.len() == vars - 1 {
                let mut g = prefix;
                g.push(rest);
                gens.push(g);
                continue;
            }
            for v in 0..=rest {
                let mut p = prefix.clone();
                p.push(v);
                stack.push((p, rest - v));
            }
        }
        MonomialIdeal::new(vars, gens)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.iter().all(|&e| e == 0))
    }

    /// Plain ideal membership of a monomial.
    pub fn contains(&self, exponent: &[u64]) -> bool {
        self.generators
            .iter()
            .any(|g| g.iter().zip(exponent).all(|(a, b)| a <= b))
    }

    pub fn product(&self, other: &MonomialIdeal) -> MonomialIdeal {
        assert_eq!(self.vars, other.vars, "variable count mismatch");
        let mut gens = Vec::new();
        for a in &self.generators {
            for b in &other.generators {
                gens.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        MonomialIdeal::new(self.vars, gens)
    }

    pub fn pow(&self, e: u64) -> MonomialIdeal {
        if e == 0 {
            return MonomialIdeal::unit(self.vars);
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.product(self);
        }
        acc
    }

    fn points(&self) -> Vec<QVector> {
        self.generators
            .iter()
            .map(|g| {
                QVector(
                    g.iter()
                        .map(|&e| Rat::from_integer(Int::from(e)))
                        .collect(),
                )
            })
            .collect()
    }

    /// Facet description of the Newton polyhedron conv(gens) + R^n_+.
    pub fn newton_facets(&self) -> Vec<NewtonFacet> {
        newton_polyhedron_facets(&self.points(), self.vars)
    }

    pub fn newton_contains(&self, point: &QVector) -> bool {
        if self.is_zero() {
            return false;
        }
        self.newton_facets()
            .iter()
            .all(|f| dot_int_rat(&f.normal, point) >= f.offset)
    }

    /// Integral closure: the ideal generated by the minimal lattice points
    /// of the Newton polyhedron.
    pub fn newton_closure(&self) -> MonomialIdeal {
        if self.is_zero() {
            return self.clone();
        }
        let facets = self.newton_facets();
        let m = self
            .generators
            .iter()
            .flat_map(|g| g.iter())
            .max()
            .copied()
            .unwrap_or(0);
        let mut members = Vec::new();
        let mut point = vec![0u64; self.vars];
        scan_exponents(m, 0, &mut point, &mut |p: &Vec<u64>| {
            let q = QVector(
                p.iter()
                    .map(|&e| Rat::from_integer(Int::from(e)))
                    .collect(),
            );
            if facets.iter().all(|f| dot_int_rat(&f.normal, &q) >= f.offset) {
                members.push(p.clone());
            }
        });
        // Minimal members only; MonomialIdeal::new reduces to the antichain.
        MonomialIdeal::new(self.vars, members)
    }

    /// Arnold multiplicity, the reciprocal of the log canonical threshold:
    /// the smallest s with s*(1,...,1) in the Newton polyhedron.
    pub fn arnold(&self) -> Result<Rat> {
        if self.is_zero() {
            return Err(Error::OutOfRange {
                reason: "Arnold multiplicity of the zero ideal".into(),
            });
        }
        Ok(arnold_from_facets(&self.newton_facets()))
    }

    /// Samuel multiplicity n! * covolume of the Newton polyhedron; requires
    /// finite colength.
    pub fn samuel(&self) -> Result<Rat> {
        for i in 0..self.vars {
            let has_pure_power = self
                .generators
                .iter()
                .any(|g| g.iter().enumerate().all(|(j, &e)| j == i || e == 0));
            if !has_pure_power {
                return Err(Error::InfiniteColength);
            }
        }
        let covol = covolume_from_facets(&self.newton_facets(), self.vars)?;
        Ok(covol * factorial(self.vars))
    }
}

fn scan_exponents(max: u64, depth: usize, point: &mut Vec<u64>, f: &mut impl FnMut(&Vec<u64>)) {
    if depth == point.len() {
        f(point);
        return;
    }
    for v in 0..=max {
        point[depth] = v;
        scan_exponents(max, depth + 1, point, f);
    }
}

#[derive(Clone, Debug)]
pub struct NewtonFacet {
    /// Inward integer normal, componentwise nonnegative.
    pub normal: IVec,
    /// The polyhedron satisfies `<normal, u> >= offset`.
    pub offset: Rat,
}

/// Valid inequalities cutting out conv(points) + R^n_+ exactly, possibly
/// with redundant members. Points must be componentwise nonnegative.
pub fn newton_polyhedron_facets(points: &[QVector], n: usize) -> Vec<NewtonFacet> {
    assert!(!points.is_empty(), "Newton polyhedron of no points");
    let mut out: Vec<NewtonFacet> = Vec::new();
    let mut seen: BTreeSet<IVec> = BTreeSet::new();
    // Coordinate bounds hold because the recession cone is the orthant.
    for i in 0..n {
        let mut e = vec![Int::zero(); n];
        e[i] = Int::one();
        let offset = points.iter().map(|p| p[i].clone()).min().unwrap();
        seen.insert(e.clone());
        out.push(NewtonFacet { normal: e, offset });
    }
    // Hyperplanes through k points and n-k coordinate directions.
    for k in 1..=n.min(points.len()) {
        for pts in combinations(points.len(), k) {
            for dirs in combinations(n, n - k) {
                let mut rows: Vec<QVector> = Vec::new();
                for j in 1..k {
                    rows.push(points[pts[j]].sub(&points[pts[0]]));
                }
                for &d in &dirs {
                    rows.push(QVector::unit(n, d));
                }
                if rows.is_empty() {
                    continue;
                }
                let kernel = kernel_basis(&QMatrix::from_rows(rows));
                if kernel.len() != 1 {
                    continue;
                }
                let mut w = primitive_from_rational(&kernel[0]);
                if w.iter().all(|e| !e.is_positive()) {
                    w = w.iter().map(|e| -e.clone()).collect();
                }
                // Inward normals of a polyhedron with orthant recession
                // cone are nonnegative.
                if w.iter().any(|e| e.is_negative()) {
                    continue;
                }
                let base = dot_int_rat(&w, &points[pts[0]]);
                if points.iter().any(|p| dot_int_rat(&w, p) < base) {
                    continue;
                }
                if seen.insert(w.clone()) {
                    out.push(NewtonFacet {
                        normal: w,
                        offset: base,
                    });
                }
            }
        }
    }
    out
}

pub fn arnold_from_facets(facets: &[NewtonFacet]) -> Rat {
    let mut best = Rat::zero();
    for f in facets {
        let weight: Int = f.normal.iter().cloned().sum();
        if weight.is_zero() || !f.offset.is_positive() {
            continue;
        }
        let s = &f.offset / Rat::from_integer(weight);
        if s > best {
            best = s;
        }
    }
    best
}

/// Volume of the region of the nonnegative orthant outside the Newton
/// polyhedron. Errors when that region is unbounded.
pub fn covolume_from_facets(facets: &[NewtonFacet], n: usize) -> Result<Rat> {
    // The complement is bounded iff far multiples of every axis direction
    // land inside the polyhedron.
    let mut reach = Rat::zero();
    for i in 0..n {
        for f in facets {
            if f.normal[i].is_positive() {
                let t = &f.offset / Rat::from_integer(f.normal[i].clone());
                if t > reach {
                    reach = t;
                }
            } else if f.offset.is_positive() {
                return Err(Error::InfiniteColength);
            }
        }
    }
    if n > 3 {
        return Err(Error::DimensionCap { cap: 3, got: n });
    }
    // Box [0, M]^n with M beyond every axis intercept.
    let m: Rat = reach + Rat::one();
    let mut hs: Vec<HalfSpace> = Vec::new();
    for f in facets {
        hs.push(HalfSpace::new(f.normal.clone(), f.offset.clone()));
    }
    for i in 0..n {
        let mut pos = vec![Int::zero(); n];
        pos[i] = Int::one();
        let mut neg = vec![Int::zero(); n];
        neg[i] = -Int::one();
        hs.push(HalfSpace::new(pos, Rat::zero()));
        hs.push(HalfSpace::new(neg, -m.clone()));
    }
    let inside = Polyhedron::new(n, hs).volume()?;
    let mut box_volume = Rat::one();
    for _ in 0..n {
        box_volume *= &m;
    }
    Ok(box_volume - inside)
}

fn factorial(n: usize) -> Rat {
    let mut f = Int::one();
    for k in 2..=n {
        f *= Int::from(k);
    }
    Rat::from_integer(f)
}

/// Exact k-th root of a rational number when it exists.
pub fn exact_nth_root(r: &Rat, k: u32) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().nth_root(k);
    let den = r.denom().nth_root(k);
    let candidate = Rat::new(num, den);
    let mut power = Rat::one();
    for _ in 0..k {
        power *= &candidate;
    }
    (power == *r).then_some(candidate)
}
