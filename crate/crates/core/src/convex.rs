//! Continuity machinery for nonnegative functions on open convex cones:
//! sampled homogeneity and subadditivity checks, the explicit Lipschitz
//! constant on a cube with margin, and certified evaluation at points given
//! by rational approximation streams.

use num_traits::{Signed, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, QMatrix, QVector};
use crate::rational::Rat;

/// A nonnegative function on the rational points of an open full-dimensional
/// cone, together with a basis of points where it vanishes.
pub struct ConeFunction<'a> {
    domain: Cone,
    ample_basis: Vec<QVector>,
    basis_columns: QMatrix,
    eval: Box<dyn Fn(&QVector) -> Result<Rat> + 'a>,
}

impl<'a> ConeFunction<'a> {
    pub fn new(
        domain: Cone,
        ample_basis: Vec<QVector>,
        eval: impl Fn(&QVector) -> Result<Rat> + 'a,
    ) -> Result<Self> {
        let dim = domain.dim();
        if !domain.is_full_dimensional() {
            return Err(Error::ModelInvariant {
                reason: "domain cone must be full-dimensional".into(),
            });
        }
        if ample_basis.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: ample_basis.len(),
            });
        }
        let basis_columns = QMatrix::from_rows(ample_basis.clone()).transpose();
        if basis_columns.determinant().is_zero() {
            return Err(Error::ModelInvariant {
                reason: "ample basis is linearly dependent".into(),
            });
        }
        let f = ConeFunction {
            domain,
            ample_basis,
            basis_columns,
            eval: Box::new(eval),
        };
        for a in &f.ample_basis {
            if !f.domain.contains_in_interior(a) {
                return Err(Error::OutOfDomain);
            }
            if !f.evaluate(a)?.is_zero() {
                return Err(Error::ModelInvariant {
                    reason: "function does not vanish on the ample basis".into(),
                });
            }
        }
        Ok(f)
    }

    pub fn domain(&self) -> &Cone {
        &self.domain
    }

    pub fn ample_basis(&self) -> &[QVector] {
        &self.ample_basis
    }

    pub fn evaluate(&self, x: &QVector) -> Result<Rat> {
        if !self.domain.contains_in_interior(x) {
            return Err(Error::OutOfDomain);
        }
        (self.eval)(x)
    }

    /// Coordinates of a point with respect to the ample basis.
    pub fn basis_coordinates(&self, x: &QVector) -> QVector {
        solve_linear(&self.basis_columns, x)
            .expect("basis matrix is square")
            .expect("basis matrix is invertible")
    }

    /// The point with the given ample-basis coordinates.
    pub fn from_basis_coordinates(&self, coords: &QVector) -> QVector {
        self.basis_columns.mul_vec(coords)
    }

    /// Max-norm with respect to the ample basis; this is the norm used in
    /// every Lipschitz statement of this module.
    pub fn basis_norm(&self, x: &QVector) -> Rat {
        self.basis_coordinates(x).max_norm()
    }

    /// Exact check of f(q x) = q f(x) on the given samples.
    pub fn check_homogeneous(&self, samples: &[(QVector, Rat)]) -> Result<bool> {
        for (x, q) in samples {
            if !q.is_positive() {
                return Err(Error::OutOfRange {
                    reason: "scaling factor must be positive".into(),
                });
            }
            let fx = self.evaluate(x)?;
            let fqx = self.evaluate(&x.scale(q))?;
            if fqx != fx * q {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact check of f(x + y) <= f(x) + f(y) on the given samples.
    pub fn check_subadditive(&self, samples: &[(QVector, QVector)]) -> Result<bool> {
        for (x, y) in samples {
            let fx = self.evaluate(x)?;
            let fy = self.evaluate(y)?;
            let fxy = self.evaluate(&x.add(y))?;
            if fxy > fx + fy {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The Lipschitz constant f(sum_i (c_i - delta) a_i) / delta valid on
    /// the cube in the max-norm of the ample basis.
    pub fn lipschitz_bound(&self, cube: &CubeRegion) -> Result<Rat> {
        cube.validate(self)?;
        let corner = QVector(
            cube.lo
                .iter()
                .map(|c| c - &cube.delta)
                .collect::<Vec<Rat>>(),
        );
        let point = self.from_basis_coordinates(&corner);
        let value = self.evaluate(&point)?;
        Ok(value / &cube.delta)
    }

    /// Certified evaluation at a (possibly irrational) point presented by a
    /// stream of rational approximations with error bounds in the ample
    /// basis max-norm. Returns an interval of width <= eps containing the
    /// value of the unique continuous extension, provided the point and the
    /// used approximants lie in the cube.
    pub fn extend_continuously(
        &self,
        stream: &mut dyn Iterator<Item = (QVector, Rat)>,
        cube: &CubeRegion,
        eps: &Rat,
        max_pulls: usize,
    ) -> Result<(Rat, Rat)> {
        if !eps.is_positive() {
            return Err(Error::OutOfRange {
                reason: "eps must be positive".into(),
            });
        }
        let m = self.lipschitz_bound(cube)?;
        let target = eps / crate::rational::rat_int(2);
        for _ in 0..max_pulls {
            let Some((point, err)) = stream.next() else {
                return Err(Error::StreamStalled);
            };
            if err.is_negative() {
                return Err(Error::OutOfRange {
                    reason: "negative error bound".into(),
                });
            }
            let slack = &m * &err;
            if slack <= target {
                // Only the approximant actually used must lie in the cube;
                // coarse early stream items may fall outside it.
                if !cube.contains_coords(&self.basis_coordinates(&point)) {
                    return Err(Error::OutOfDomain);
                }
                let value = self.evaluate(&point)?;
                return Ok((&value - &slack, &value + &slack));
            }
        }
        Err(Error::StreamStalled)
    }
}

/// A coordinate cube with respect to the ample basis, with margin delta:
/// every point x of the cube keeps x - sum_i delta a_i inside the domain,
/// and every side is shorter than delta.
#[derive(Clone, Debug)]
pub struct CubeRegion {
    pub lo: Vec<Rat>,
    pub hi: Vec<Rat>,
    pub delta: Rat,
}

impl CubeRegion {
    pub fn new(lo: Vec<Rat>, hi: Vec<Rat>, delta: Rat) -> Self {
        CubeRegion { lo, hi, delta }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains_coords(&self, coords: &QVector) -> bool {
        coords.dim() == self.dim()
            && (0..self.dim()).all(|i| self.lo[i] <= coords[i] && coords[i] <= self.hi[i])
    }

    pub fn validate(&self, f: &ConeFunction) -> Result<()> {
        let n = self.dim();
        if n != f.domain().dim() || self.hi.len() != n {
            return Err(Error::InvalidCube {
                reason: "dimension mismatch".into(),
            });
        }
        if !self.delta.is_positive() {
            return Err(Error::InvalidCube {
                reason: "margin must be positive".into(),
            });
        }
        for i in 0..n {
            if self.lo[i] > self.hi[i] {
                return Err(Error::InvalidCube {
                    reason: format!("empty side {i}"),
                });
            }
            if &self.hi[i] - &self.lo[i] >= self.delta {
                return Err(Error::InvalidCube {
                    reason: format!("side {i} is not shorter than the margin"),
                });
            }
        }
        // Convexity reduces the two containment conditions to the corners.
        for corner in self.corners() {
            let point = f.from_basis_coordinates(&corner);
            if !f.domain().contains_in_interior(&point) {
                return Err(Error::InvalidCube {
                    reason: "cube leaves the open domain".into(),
                });
            }
            let shifted = QVector(corner.iter().map(|c| c - &self.delta).collect::<Vec<_>>());
            let shifted_point = f.from_basis_coordinates(&shifted);
            if !f.domain().contains_in_interior(&shifted_point) {
                return Err(Error::InvalidCube {
                    reason: "margin-shifted cube leaves the open domain".into(),
                });
            }
        }
        Ok(())
    }

    fn corners(&self) -> Vec<QVector> {
        let n = self.dim();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1u32 << n) {
            out.push(QVector(
                (0..n)
                    .map(|i| {
                        if mask & (1 << i) != 0 {
                            self.hi[i].clone()
                        } else {
                            self.lo[i].clone()
                        }
                    })
                    .collect(),
            ));
        }
        out
    }

    /// Splits a cube whose sides are too long for the margin into subcubes
    /// that satisfy the side < delta invariant.
    pub fn split_to_margin(&self) -> Vec<CubeRegion> {
        let n = self.dim();
        let mut pieces_per_axis: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            let len = &self.hi[i] - &self.lo[i];
            let mut k = 1usize;
            loop {
                let side = &len / crate::rational::rat_int(k as i64);
                if side < self.delta {
                    break;
                }
                k += 1;
            }
            pieces_per_axis.push(k);
        }
        let mut cubes = vec![(self.lo.clone(), self.hi.clone())];
        for i in 0..n {
            let k = pieces_per_axis[i];
            if k == 1 {
                continue;
            }
            let mut next = Vec::new();
            for (lo, hi) in &cubes {
                let step = (&hi[i] - &lo[i]) / crate::rational::rat_int(k as i64);
                for piece in 0..k {
                    let mut nlo = lo.clone();
                    let mut nhi = hi.clone();
                    nlo[i] = &lo[i] + &step * crate::rational::rat_int(piece as i64);
                    nhi[i] = &lo[i] + &step * crate::rational::rat_int(piece as i64 + 1);
                    next.push((nlo, nhi));
                }
            }
            cubes = next;
        }
        cubes
            .into_iter()
            .map(|(lo, hi)| CubeRegion::new(lo, hi, self.delta.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    /// max(0, y - x) on the open first quadrant, vanishing on the interior
    /// basis (2, 1), (1, 1): positively homogeneous and subadditive.
    fn sample_function() -> ConeFunction<'static> {
        let domain = Cone::from_i64(2, &[vec![1, 0], vec![0, 1]]);
        let basis = vec![QVector::from_ints(&[2, 1]), QVector::from_ints(&[1, 1])];
        ConeFunction::new(domain, basis, |x: &QVector| {
            let diff = &x[1] - &x[0];
            Ok(if diff.is_positive() { diff } else { Rat::zero() })
        })
        .unwrap()
    }

    #[test]
    fn homogeneity_checks() {
        let f = sample_function();
        let samples = vec![
            (QVector::from_ints(&[2, 3]), rat_int(2)),
            (QVector::from_ints(&[3, 1]), rat(1, 2)),
            (QVector(vec![rat(1, 2), rat(5, 2)]), rat(7, 3)),
        ];
        assert!(f.check_homogeneous(&samples).unwrap());

        // A quadratically growing function fails homogeneity.
        let domain = Cone::from_i64(2, &[vec![1, 0], vec![0, 1]]);
        let basis = vec![QVector::from_ints(&[2, 1]), QVector::from_ints(&[1, 1])];
        let g = ConeFunction::new(domain, basis, |x: &QVector| {
            let diff = &x[1] - &x[0];
            Ok(if diff.is_positive() { &diff * &diff } else { Rat::zero() })
        })
        .unwrap();
        let bad = vec![(QVector::from_ints(&[1, 3]), rat_int(2))];
        assert!(!g.check_homogeneous(&bad).unwrap());
    }

    #[test]
    fn subadditivity_checks() {
        let f = sample_function();
        let mut pairs = Vec::new();
        for i in 1..6i64 {
            for j in 1..6i64 {
                pairs.push((
                    QVector::from_ints(&[i, j]),
                    QVector::from_ints(&[j, i + 1]),
                ));
            }
        }
        assert!(f.check_subadditive(&pairs).unwrap());

        // A non-convex step function fails on an explicit witness pair.
        let domain = Cone::from_i64(2, &[vec![1, 0], vec![0, 1]]);
        let basis = vec![QVector::from_ints(&[2, 1]), QVector::from_ints(&[1, 1])];
        let g = ConeFunction::new(domain, basis, |x: &QVector| {
            Ok(if x[0] >= x[1] {
                Rat::zero()
            } else if &x[1] > &(rat_int(2) * &x[0]) {
                &x[1] - &x[0]
            } else {
                rat(1, 10)
            })
        })
        .unwrap();
        // g(3,4) = 1/10, g(1,5) = 4, g(4,9) = 5 > 41/10.
        let witness = vec![(QVector::from_ints(&[3, 4]), QVector::from_ints(&[1, 5]))];
        assert!(!g.check_subadditive(&witness).unwrap());
    }

    #[test]
    fn out_of_domain_sample_errors() {
        let f = sample_function();
        let outside = vec![(QVector::from_ints(&[-1, 1]), rat_int(2))];
        assert!(matches!(
            f.check_homogeneous(&outside),
            Err(Error::OutOfDomain)
        ));
    }

    #[test]
    fn lipschitz_bound_values() {
        let f = sample_function();
        // Cube [2, 17/8] x [1, 9/8] in basis coordinates, margin 1/4.
        let cube = CubeRegion::new(
            vec![rat_int(2), rat_int(1)],
            vec![rat(17, 8), rat(9, 8)],
            rat(1, 4),
        );
        let m = f.lipschitz_bound(&cube).unwrap();
        // Corner point: (2 - 1/4)a1 + (1 - 1/4)a2 = (5/2, 3/4): f = 0.
        assert_eq!(m, rat_int(0));

        // A cube where the corner value is positive.
        let g = sample_function();
        // Coordinates (u, v) map to the point (2u + v, u + v), where the
        // function value is max(0, -u).
        let cube = CubeRegion::new(
            vec![rat(-1, 2), rat_int(4)],
            vec![rat(-3, 8), rat(33, 8)],
            rat(1, 4),
        );
        let m = g.lipschitz_bound(&cube).unwrap();
        // f at coords (-1/2 - 1/4, 4 - 1/4) = 3/4; over delta = 3.
        assert_eq!(m, rat_int(3));

        // Scaling cube and margin together leaves the constant fixed.
        let scaled = CubeRegion::new(
            vec![rat(-1, 1), rat_int(8)],
            vec![rat(-3, 4), rat(33, 4)],
            rat(1, 2),
        );
        assert_eq!(g.lipschitz_bound(&scaled).unwrap(), rat_int(3));
    }

    #[test]
    fn lipschitz_property_on_sampled_pairs() {
        let f = sample_function();
        let cube = CubeRegion::new(
            vec![rat(-1, 2), rat_int(4)],
            vec![rat(-3, 8), rat(33, 8)],
            rat(1, 4),
        );
        let m = f.lipschitz_bound(&cube).unwrap();
        let steps = 4i64;
        let mut points = Vec::new();
        for i in 0..=steps {
            for j in 0..=steps {
                let u = rat(-1, 2) + rat(i, 32);
                let v = rat_int(4) + rat(j, 32);
                points.push(QVector(vec![u, v]));
            }
        }
        for a in &points {
            for b in &points {
                let pa = f.from_basis_coordinates(a);
                let pb = f.from_basis_coordinates(b);
                let lhs = (f.evaluate(&pa).unwrap() - f.evaluate(&pb).unwrap()).abs();
                let dist = a.sub(b).max_norm();
                assert!(lhs <= &m * &dist, "Lipschitz violated at {a:?}, {b:?}");
            }
        }
    }

    #[test]
    fn invalid_cubes_rejected() {
        let f = sample_function();
        // Side length equals the margin.
        let too_long = CubeRegion::new(vec![rat_int(2), rat_int(1)], vec![rat(9, 4), rat(9, 8)], rat(1, 4));
        assert!(f.lipschitz_bound(&too_long).is_err());
        let split = too_long.split_to_margin();
        assert!(split.len() >= 2);
        for piece in &split {
            piece.validate(&f).unwrap();
        }
        // Cube whose margin shift exits the domain.
        let outside = CubeRegion::new(
            vec![rat(1, 8), rat(1, 8)],
            vec![rat(3, 16), rat(3, 16)],
            rat(1, 4),
        );
        assert!(f.lipschitz_bound(&outside).is_err());
    }

    #[test]
    fn extension_at_rational_point_is_degenerate() {
        let f = sample_function();
        let cube = CubeRegion::new(
            vec![rat(-1, 2), rat_int(4)],
            vec![rat(-3, 8), rat(33, 8)],
            rat(1, 4),
        );
        let x = f.from_basis_coordinates(&QVector(vec![rat(-7, 16), rat(65, 16)]));
        let fx = f.evaluate(&x).unwrap();
        let mut stream = std::iter::once((x.clone(), Rat::zero()));
        let (lo, hi) = f
            .extend_continuously(&mut stream, &cube, &rat(1, 100), 10)
            .unwrap();
        assert_eq!(lo, fx);
        assert_eq!(hi, fx);
    }

    #[test]
    fn extension_with_two_streams_overlaps() {
        let f = sample_function();
        let cube = CubeRegion::new(
            vec![rat(-1, 2), rat_int(4)],
            vec![rat(-3, 8), rat(33, 8)],
            rat(1, 4),
        );
        // Target coordinates approximated from two sides.
        let target = QVector(vec![rat(-7, 16), rat(65, 16)]);
        let eps = rat(1, 50);
        let approx_from = |offset_num: i64| {
            let mut steps = Vec::new();
            for k in 1..=12u32 {
                let err = rat(1, 1i64 << k);
                let coords = QVector(vec![
                    &target[0] + rat(offset_num, 1) * &err,
                    target[1].clone(),
                ]);
                steps.push((f.from_basis_coordinates(&coords), err));
            }
            steps.into_iter()
        };
        let (lo1, hi1) = f
            .extend_continuously(&mut approx_from(1), &cube, &eps, 20)
            .unwrap();
        let (lo2, hi2) = f
            .extend_continuously(&mut approx_from(-1), &cube, &eps, 20)
            .unwrap();
        assert!(&hi1 - &lo1 <= eps);
        assert!(&hi2 - &lo2 <= eps);
        // Both intervals contain the true value, hence overlap.
        assert!(lo1.max(lo2) <= hi1.min(hi2));
    }

    #[test]
    fn stalled_stream_errors() {
        let f = sample_function();
        let cube = CubeRegion::new(
            vec![rat(-1, 2), rat_int(4)],
            vec![rat(-3, 8), rat(33, 8)],
            rat(1, 4),
        );
        let point = f.from_basis_coordinates(&QVector(vec![rat(-7, 16), rat(65, 16)]));
        let mut stalled = std::iter::repeat((point, rat(1, 2)));
        assert!(matches!(
            f.extend_continuously(&mut stalled, &cube, &rat(1, 100), 5),
            Err(Error::StreamStalled)
        ));
    }
}
