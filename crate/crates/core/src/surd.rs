//! Exact arithmetic in real quadratic fields: values (a + b*sqrt(n))/c kept
//! in a canonical normal form, with exact comparisons against rationals.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{Int, Rat};

/// (a + b*sqrt(n))/c with c > 0, gcd(a, b, c) = 1, n squarefree, and n = 0
/// exactly when the value is rational (b = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    a: Int,
    b: Int,
    c: Int,
    n: u64,
}

impl QuadraticSurd {
    pub fn from_rational(r: &Rat) -> Self {
        QuadraticSurd {
            a: r.numer().clone(),
            b: Int::zero(),
            c: r.denom().clone(),
            n: 0,
        }
        .normalized()
    }

    /// rational + coeff * sqrt(radicand), radicand a nonnegative rational.
    pub fn new(rational: &Rat, coeff: &Rat, radicand: &Rat) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::OutOfRange {
                reason: "negative radicand".into(),
            });
        }
        // sqrt(p/q) = sqrt(p*q)/q; split p*q = s^2 * n with n squarefree.
        let pq = radicand.numer() * radicand.denom();
        let (s, n) = square_part(&pq);
        let coeff_scaled = coeff * Rat::new(s, radicand.denom().clone());
        // Combine over a common denominator.
        let denom = rational.denom().lcm(coeff_scaled.denom());
        let a = rational.numer() * (&denom / rational.denom());
        let b = coeff_scaled.numer() * (&denom / coeff_scaled.denom());
        Ok(QuadraticSurd { a, b, c: denom, n }.normalized())
    }

    fn normalized(mut self) -> Self {
        if self.b.is_zero() {
            self.n = 0;
        }
        if self.n <= 1 {
            // sqrt(0) = 0 and sqrt(1) = 1 fold into the rational part.
            if self.n == 1 {
                self.a += &self.b;
            }
            self.b = Int::zero();
            self.n = 0;
        }
        if self.c.is_negative() {
            self.a = -self.a;
            self.b = -self.b;
            self.c = -self.c.clone();
        }
        let g = self.a.gcd(&self.b).gcd(&self.c);
        if !g.is_zero() && !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
        }
        self
    }

    pub fn radicand(&self) -> u64 {
        self.n
    }

    pub fn is_rational(&self) -> bool {
        self.n == 0
    }

    pub fn as_rational(&self) -> Option<Rat> {
        self.is_rational()
            .then(|| Rat::new(self.a.clone(), self.c.clone()))
    }

    pub fn add_rational(&self, r: &Rat) -> Self {
        let a = Rat::new(self.a.clone(), self.c.clone()) + r;
        let denom = a.denom().lcm(&self.c);
        QuadraticSurd {
            a: a.numer() * (&denom / a.denom()),
            b: &self.b * (&denom / &self.c),
            c: denom,
            n: self.n,
        }
        .normalized()
    }

    pub fn mul_rational(&self, r: &Rat) -> Self {
        QuadraticSurd {
            a: &self.a * r.numer(),
            b: &self.b * r.numer(),
            c: &self.c * r.denom(),
            n: self.n,
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        QuadraticSurd {
            a: -self.a.clone(),
            b: -self.b.clone(),
            c: self.c.clone(),
            n: self.n,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.merge_radicand(other)?;
        let c = self.c.lcm(&other.c);
        Ok(QuadraticSurd {
            a: &self.a * (&c / &self.c) + &other.a * (&c / &other.c),
            b: &self.b * (&c / &self.c) + &other.b * (&c / &other.c),
            c,
            n,
        }
        .normalized())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n = self.merge_radicand(other)?;
        let nn = Int::from(n);
        Ok(QuadraticSurd {
            a: &self.a * &other.a + &self.b * &other.b * &nn,
            b: &self.a * &other.b + &self.b * &other.a,
            c: &self.c * &other.c,
            n,
        }
        .normalized())
    }

    pub fn inverse(&self) -> Result<Self> {
        // c / (a + b sqrt(n)) = c (a - b sqrt(n)) / (a^2 - b^2 n).
        let nn = Int::from(self.n);
        let denom = &self.a * &self.a - &self.b * &self.b * &nn;
        if denom.is_zero() {
            return Err(Error::OutOfRange {
                reason: "inverse of zero".into(),
            });
        }
        Ok(QuadraticSurd {
            a: &self.c * &self.a,
            b: -(&self.c * &self.b),
            c: denom,
            n: self.n,
        }
        .normalized())
    }

    fn merge_radicand(&self, other: &Self) -> Result<u64> {
        match (self.n, other.n) {
            (0, m) => Ok(m),
            (m, 0) => Ok(m),
            (m, k) if m == k => Ok(m),
            (m, k) => Err(Error::RadicandMismatch(m, k)),
        }
    }

    /// Exact sign of (a + b sqrt(n)) / c.
    pub fn sign(&self) -> Ordering {
        debug_assert!(self.c.is_positive());
        if self.b.is_zero() {
            return rat_sign(&self.a);
        }
        if self.a.is_zero() {
            return rat_sign(&self.b);
        }
        let nn = Int::from(self.n);
        let a2 = &self.a * &self.a;
        let b2n = &self.b * &self.b * &nn;
        match (self.a.is_positive(), self.b.is_positive()) {
            (true, true) => Ordering::Greater,
            (false, false) => Ordering::Less,
            // a > 0, b < 0: positive iff a^2 > b^2 n.
            (true, false) => a2.cmp(&b2n),
            // a < 0, b > 0: positive iff b^2 n > a^2.
            (false, true) => b2n.cmp(&a2),
        }
    }

    pub fn cmp_rational(&self, r: &Rat) -> Ordering {
        self.sub(&QuadraticSurd::from_rational(r))
            .expect("rational subtraction preserves the radicand")
            .sign()
    }

    pub fn cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(self.sub(other)?.sign())
    }

    /// Rational approximation within 10^-digits.
    pub fn approximate(&self, digits: u32) -> Rat {
        let guard = digits + 4;
        let scale = Int::from(10u32).pow(guard);
        let sqrt_scaled = (Int::from(self.n) * &scale * &scale).sqrt();
        let approx_root = Rat::new(sqrt_scaled, scale);
        (Rat::from_integer(self.a.clone()) + Rat::from_integer(self.b.clone()) * approx_root)
            / Rat::from_integer(self.c.clone())
    }

    pub fn to_decimal(&self, places: usize) -> String {
        // Round half up at the final place; the guard digits make the
        // approximation error negligible against the rounding step.
        let approx = self.approximate(places as u32 + 4);
        let half_ulp = Rat::new(Int::one(), Int::from(2) * Int::from(10u32).pow(places as u32));
        crate::rational::rat_to_decimal(&(approx + half_ulp), places)
    }

    /// Renders "(a + b*sqrt(n))/c" exactly, or "a/c" for rational values.
    pub fn to_exact_string(&self) -> String {
        if self.is_rational() {
            return crate::rational::format_rat(&Rat::new(self.a.clone(), self.c.clone()));
        }
        let b_part = if self.b.is_one() {
            format!("sqrt({})", self.n)
        } else if self.b == -Int::one() {
            format!("-sqrt({})", self.n)
        } else {
            format!("{}*sqrt({})", self.b, self.n)
        };
        let core = if self.a.is_zero() {
            b_part
        } else if self.b.is_negative() {
            format!("{} - {}", self.a, b_part.trim_start_matches('-'))
        } else {
            format!("{} + {}", self.a, b_part)
        };
        if self.c.is_one() {
            core
        } else {
            format!("({})/{}", core, self.c)
        }
    }

    /// Evaluates q2 x^2 + q1 x + q0 at this value; the result is returned as
    /// (rational part, coefficient of sqrt(n)).
    pub fn quadratic_residual(&self, q2: &Rat, q1: &Rat, q0: &Rat) -> (Rat, Rat) {
        let a = Rat::new(self.a.clone(), self.c.clone());
        let b = Rat::new(self.b.clone(), self.c.clone());
        let n = Rat::from_integer(Int::from(self.n));
        // x = a + b sqrt(n); x^2 = a^2 + b^2 n + 2ab sqrt(n).
        let rational = q2 * (&a * &a + &b * &b * &n) + q1 * &a + q0;
        let coeff = q2 * crate::rational::rat_int(2) * &a * &b + q1 * &b;
        (rational, coeff)
    }

    /// The smaller real root of q2 x^2 + q1 x + q0 (q2 != 0), exact.
    pub fn smaller_root(q2: &Rat, q1: &Rat, q0: &Rat) -> Result<Self> {
        if q2.is_zero() {
            return Err(Error::OutOfRange {
                reason: "leading coefficient is zero".into(),
            });
        }
        let four = crate::rational::rat_int(4);
        let disc = q1 * q1 - four * q2 * q0;
        if disc.is_negative() {
            return Err(Error::OutOfRange {
                reason: "negative discriminant".into(),
            });
        }
        let two_a = crate::rational::rat_int(2) * q2;
        let base = -q1 / &two_a;
        let half = Rat::one() / &two_a;
        let plus = QuadraticSurd::new(&base, &half, &disc)?;
        let minus = QuadraticSurd::new(&base, &(-half), &disc)?;
        Ok(match plus.cmp(&minus)? {
            Ordering::Less => plus,
            _ => minus,
        })
    }
}

fn rat_sign(x: &Int) -> Ordering {
    if x.is_positive() {
        Ordering::Greater
    } else if x.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Splits m >= 0 as s^2 * n with n squarefree; returns (s, n).
fn square_part(m: &Int) -> (Int, u64) {
    if m.is_zero() {
        return (Int::zero(), 0);
    }
    let mut rest = m.clone();
    let mut square = Int::one();
    let mut d = Int::from(2);
    while &d * &d <= rest {
        let d2 = &d * &d;
        while (&rest % &d2).is_zero() {
            rest /= &d2;
            square *= &d;
        }
        d += 1;
    }
    let n: u64 = rest.to_string().parse().expect("squarefree part fits in u64");
    (square, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn canonical_forms() {
        // (9 - sqrt(45)) / 18 = (3 - sqrt(5)) / 6.
        let s = QuadraticSurd::new(&rat(9, 18), &rat(-1, 18), &rat_int(45)).unwrap();
        assert_eq!(s.radicand(), 5);
        assert_eq!(s.to_exact_string(), "(3 - sqrt(5))/6");
        // Perfect squares collapse to rationals.
        let r = QuadraticSurd::new(&rat_int(0), &rat_int(1), &rat(5329, 100)).unwrap();
        assert_eq!(r.as_rational(), Some(rat(73, 10)));
    }

    #[test]
    fn arithmetic_and_inverse() {
        let phi = QuadraticSurd::new(&rat(1, 2), &rat(1, 2), &rat_int(5)).unwrap();
        // phi^2 = phi + 1.
        let sq = phi.mul(&phi).unwrap();
        let rhs = phi.add_rational(&rat_int(1));
        assert_eq!(sq, rhs);
        // phi * (1/phi) = 1.
        let inv = phi.inverse().unwrap();
        let one = phi.mul(&inv).unwrap();
        assert_eq!(one.as_rational(), Some(rat_int(1)));
    }

    #[test]
    fn exact_comparisons() {
        let root2 = QuadraticSurd::new(&rat_int(0), &rat_int(1), &rat_int(2)).unwrap();
        assert_eq!(root2.cmp_rational(&rat(141, 100)), Ordering::Greater);
        assert_eq!(root2.cmp_rational(&rat(142, 100)), Ordering::Less);
        assert_eq!(root2.cmp_rational(&rat_int(2)), Ordering::Less);
        let minus = root2.neg();
        assert_eq!(minus.cmp_rational(&rat(-3, 2)), Ordering::Greater);
    }

    #[test]
    fn smaller_root_of_quadratics() {
        // 9x^2 - 9x + 1: smaller root (3 - sqrt(5))/6.
        let r = QuadraticSurd::smaller_root(&rat_int(9), &rat_int(-9), &rat_int(1)).unwrap();
        assert_eq!(r.to_exact_string(), "(3 - sqrt(5))/6");
        let (res_rat, res_coeff) = r.quadratic_residual(&rat_int(9), &rat_int(-9), &rat_int(1));
        assert!(res_rat.is_zero() && res_coeff.is_zero());
        // x^2 - 4: roots -2 < 2.
        let r = QuadraticSurd::smaller_root(&rat_int(1), &rat_int(0), &rat_int(-4)).unwrap();
        assert_eq!(r.as_rational(), Some(rat_int(-2)));
    }

    #[test]
    fn decimal_rendering() {
        let s = QuadraticSurd::new(&rat(27, 38), &rat(3, 38), &rat_int(5)).unwrap();
        assert_eq!(s.to_decimal(6), "0.887058");
        assert_eq!(s.to_decimal(4), "0.8871");
        assert_eq!(s.to_exact_string(), "(27 + 3*sqrt(5))/38");
    }

    #[test]
    fn mismatched_radicands_error() {
        let a = QuadraticSurd::new(&rat_int(0), &rat_int(1), &rat_int(2)).unwrap();
        let b = QuadraticSurd::new(&rat_int(0), &rat_int(1), &rat_int(3)).unwrap();
        assert!(a.add(&b).is_err());
        assert!(a.add(&QuadraticSurd::from_rational(&rat(1, 2))).is_ok());
    }
}
