//! Closed-form oracles for the worked examples (the five-chamber two-point
//! blow-up family and the irrational invariant on the ruled threefold over
//! a product of elliptic curves), together with the named model fixtures
//! shipped with the crate.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::graded::{GradedMonomialSystem, Presentation, ReesGenerator};
use crate::linalg::{ivec, QMatrix, QVector};
use crate::rational::{rat, rat_int, Rat};
use crate::surd::QuadraticSurd;
use crate::surface::{CurveEntry, SurfaceModel};
use crate::toric::{ToricDivisor, ToricModel};

/// A class alpha*H - beta1*E1 - beta2*E2 on the blow-up of projective
/// n-space at two points.
#[derive(Clone, Debug)]
pub struct BlowupClass {
    pub n: u32,
    pub alpha: Rat,
    pub beta1: Rat,
    pub beta2: Rat,
}

impl BlowupClass {
    pub fn new(n: u32, alpha: Rat, beta1: Rat, beta2: Rat) -> Self {
        BlowupClass {
            n,
            alpha,
            beta1,
            beta2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupChamber {
    NotBig,
    /// beta1 < 0 < beta2 < alpha: locus E1.
    Chamber1,
    /// beta2 < 0 < beta1 < alpha: locus E2.
    Chamber2,
    /// beta1, beta2 < 0: locus E1 and E2.
    Chamber3,
    /// 0 < beta1, beta2 and alpha > beta1 + beta2: ample.
    Chamber4,
    /// 0 < beta1, beta2 and alpha < beta1 + beta2: locus the line through
    /// the two points.
    Chamber5,
    Wall,
}

pub fn blowup_chamber(c: &BlowupClass) -> BlowupChamber {
    let zero = Rat::zero();
    let big = c.alpha > c.beta1.clone().max(c.beta2.clone()).max(zero.clone());
    if !big {
        return BlowupChamber::NotBig;
    }
    let b1 = &c.beta1;
    let b2 = &c.beta2;
    if b1.is_zero() || b2.is_zero() {
        return BlowupChamber::Wall;
    }
    match (b1.is_negative(), b2.is_negative()) {
        (true, true) => BlowupChamber::Chamber3,
        (true, false) => BlowupChamber::Chamber1,
        (false, true) => BlowupChamber::Chamber2,
        (false, false) => {
            let sum = b1 + b2;
            if c.alpha > sum {
                BlowupChamber::Chamber4
            } else if c.alpha < sum {
                BlowupChamber::Chamber5
            } else {
                BlowupChamber::Wall
            }
        }
    }
}

/// One base locus component with its closed-form asymptotic invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantRow {
    pub locus: String,
    pub ord: Rat,
    pub arnold: Rat,
    pub samuel_root: Rat,
}

/// Closed-form invariant table per chamber: on the exceptional divisors all
/// three invariants equal -beta_i; on the line through the two points the
/// order is beta1+beta2-alpha, the Arnold multiplicity divides it by n-1,
/// and the normalized Samuel multiplicity equals it again.
pub fn blowup_invariants(c: &BlowupClass) -> Result<Vec<InvariantRow>> {
    let row = |locus: &str, v: Rat, codim: i64| InvariantRow {
        locus: locus.into(),
        ord: v.clone(),
        arnold: &v / rat_int(codim),
        samuel_root: v,
    };
    match blowup_chamber(c) {
        BlowupChamber::NotBig => Err(Error::NotBig),
        BlowupChamber::Wall => Err(Error::WallClass),
        BlowupChamber::Chamber1 => Ok(vec![row("E1", -c.beta1.clone(), 1)]),
        BlowupChamber::Chamber2 => Ok(vec![row("E2", -c.beta2.clone(), 1)]),
        BlowupChamber::Chamber3 => Ok(vec![
            row("E1", -c.beta1.clone(), 1),
            row("E2", -c.beta2.clone(), 1),
        ]),
        BlowupChamber::Chamber4 => Ok(vec![]),
        BlowupChamber::Chamber5 => {
            let v = &c.beta1 + &c.beta2 - &c.alpha;
            Ok(vec![row("l", v, (c.n - 1) as i64)])
        }
    }
}

/// The quadratic (9-6t) x^2 - (9+5t) x + (1+t) whose smaller root is the
/// effectivity threshold sigma(t); derived from the vanishing of the
/// self-intersection of i*D - j*H + kt*F1 on the product lattice.
pub fn cutkosky_quadratic(t: &Rat) -> (Rat, Rat, Rat) {
    (
        rat_int(9) - rat_int(6) * t,
        -(rat_int(9) + rat_int(5) * t),
        Rat::one() + t,
    )
}

fn check_t_range(t: &Rat) -> Result<()> {
    if t.is_negative() || *t >= rat(3, 2) {
        return Err(Error::OutOfRange {
            reason: "parameter must satisfy 0 <= t < 3/2".into(),
        });
    }
    Ok(())
}

/// The effectivity threshold sigma(t) = (9+5t - sqrt(49t^2+78t+45))/(18-12t),
/// cross-checked as the smaller root of its defining quadratic.
pub fn cutkosky_sigma(t: &Rat) -> Result<QuadraticSurd> {
    check_t_range(t)?;
    let denom = rat_int(18) - rat_int(12) * t;
    let rational = (rat_int(9) + rat_int(5) * t) / &denom;
    let coeff = -Rat::one() / &denom;
    let radicand = rat_int(49) * t * t + rat_int(78) * t + rat_int(45);
    let formula = QuadraticSurd::new(&rational, &coeff, &radicand)?;
    let (a2, a1, a0) = cutkosky_quadratic(t);
    let root = QuadraticSurd::smaller_root(&a2, &a1, &a0)?;
    if formula != root {
        return Err(Error::ModelInvariant {
            reason: "threshold formula disagrees with the quadratic root".into(),
        });
    }
    Ok(formula)
}

/// Asymptotic order along the negative section: 1/(1 + sigma(t)).
pub fn cutkosky_ord_asym(t: &Rat) -> Result<QuadraticSurd> {
    let sigma = cutkosky_sigma(t)?;
    sigma.add_rational(&Rat::one()).inverse()
}

/// Effectivity of the class i*D - j*H + kt*F1 with the boundary j/i equal
/// to the threshold resolved as non-effective.
pub fn cutkosky_is_effective(i: u64, j: u64, t: &Rat) -> Result<bool> {
    let sigma = cutkosky_sigma(t)?;
    if i == 0 {
        return Ok(j == 0);
    }
    let ratio = rat(j as i64, i as i64);
    Ok(sigma.cmp_rational(&ratio) == std::cmp::Ordering::Greater)
}

/// Finite-level order of vanishing: the least p such that the summand
/// p*D - (k-p)*H + kt*F1 of the decomposition of the k-th power passes the
/// effectivity threshold.
pub fn cutkosky_ord_bruteforce(k: u64, t: &Rat) -> Result<u64> {
    check_t_range(t)?;
    let kt = t * rat_int(k as i64);
    if !kt.denom().is_one() {
        return Err(Error::OutOfRange {
            reason: "k*t must be integral for the finite-level scan".into(),
        });
    }
    let sigma = cutkosky_sigma(t)?;
    for p in 0..=k {
        if p == 0 {
            continue;
        }
        let ratio = rat((k - p) as i64, p as i64);
        if sigma.cmp_rational(&ratio) == std::cmp::Ordering::Greater {
            return Ok(p);
        }
    }
    Err(Error::NotEffective)
}

/// A certified interval around the asymptotic order from one finite level:
/// the scan value is within 1 of the rounded asymptotic prediction, which
/// pins the limit into a window of width 3/k.
pub fn cutkosky_ord_interval(k: u64, t: &Rat) -> Result<(Rat, Rat)> {
    let b = cutkosky_ord_bruteforce(k, t)? as i64;
    let k = k as i64;
    Ok((rat(b - 2, k), rat(b + 1, k)))
}

/// Bigness of i*D - j*H + s*F1 through the intersection lattice of the
/// product of elliptic curves; the independent route to the threshold.
pub fn cutkosky_class_is_big(i: i64, j: i64, s: &Rat) -> bool {
    let m = surface_fixture("cutkosky-lattice").expect("fixture exists");
    // D = F1 + F2, H = 3 F2 + 3 Delta.
    let class = QVector(vec![
        rat_int(i) + s,
        rat_int(i) - rat_int(3 * j),
        rat_int(-3 * j),
    ]);
    m.is_big(&class)
}

/// Names of the shipped surface fixtures.
pub fn surface_fixture_names() -> Vec<&'static str> {
    vec![
        "blowup1",
        "blowup2",
        "blowup3",
        "hirzebruch2",
        "cutkosky-lattice",
    ]
}

pub fn surface_fixture(name: &str) -> Result<SurfaceModel> {
    match name {
        "blowup1" => SurfaceModel::new(
            vec!["H".into(), "E".into()],
            QMatrix::from_int_rows(&[vec![1, 0], vec![0, -1]]),
            vec![CurveEntry {
                name: "E".into(),
                class: ivec(&[0, 1]),
            }],
            QVector::from_ints(&[2, -1]),
            Some(Cone::from_i64(2, &[vec![0, 1], vec![1, -1]])),
        ),
        "blowup2" => SurfaceModel::new(
            vec!["H".into(), "E1".into(), "E2".into()],
            QMatrix::from_int_rows(&[vec![1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]]),
            vec![
                CurveEntry {
                    name: "E1".into(),
                    class: ivec(&[0, 1, 0]),
                },
                CurveEntry {
                    name: "E2".into(),
                    class: ivec(&[0, 0, 1]),
                },
                CurveEntry {
                    name: "l".into(),
                    class: ivec(&[1, -1, -1]),
                },
            ],
            QVector::from_ints(&[3, -1, -1]),
            Some(Cone::from_i64(
                3,
                &[vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, -1]],
            )),
        ),
        "blowup3" => SurfaceModel::new(
            vec!["H".into(), "E1".into(), "E2".into(), "E3".into()],
            QMatrix::from_int_rows(&[
                vec![1, 0, 0, 0],
                vec![0, -1, 0, 0],
                vec![0, 0, -1, 0],
                vec![0, 0, 0, -1],
            ]),
            vec![
                CurveEntry {
                    name: "E1".into(),
                    class: ivec(&[0, 1, 0, 0]),
                },
                CurveEntry {
                    name: "E2".into(),
                    class: ivec(&[0, 0, 1, 0]),
                },
                CurveEntry {
                    name: "E3".into(),
                    class: ivec(&[0, 0, 0, 1]),
                },
                CurveEntry {
                    name: "l12".into(),
                    class: ivec(&[1, -1, -1, 0]),
                },
                CurveEntry {
                    name: "l13".into(),
                    class: ivec(&[1, -1, 0, -1]),
                },
                CurveEntry {
                    name: "l23".into(),
                    class: ivec(&[1, 0, -1, -1]),
                },
            ],
            QVector::from_ints(&[3, -1, -1, -1]),
            None,
        ),
        "hirzebruch2" => SurfaceModel::new(
            vec!["f".into(), "s".into()],
            QMatrix::from_int_rows(&[vec![0, 1], vec![1, -2]]),
            vec![CurveEntry {
                name: "s".into(),
                class: ivec(&[0, 1]),
            }],
            QVector::from_ints(&[3, 1]),
            Some(Cone::from_i64(2, &[vec![1, 0], vec![0, 1]])),
        ),
        "cutkosky-lattice" => SurfaceModel::new(
            vec!["F1".into(), "F2".into(), "Delta".into()],
            QMatrix::from_int_rows(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]),
            vec![],
            QVector::from_ints(&[1, 1, 1]),
            None,
        ),
        _ => Err(Error::Parse(format!("unknown surface fixture `{name}`"))),
    }
}

pub fn toric_fixture_names() -> Vec<&'static str> {
    vec!["p2", "blowup1", "blowup2", "blowup2-3d"]
}

pub fn toric_fixture(name: &str) -> Result<ToricModel> {
    match name {
        "p2" => ToricModel::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])],
            vec!["Dx".into(), "Dy".into(), "Dz".into()],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            BTreeMap::new(),
            vec![("H".into(), QVector::from_ints(&[0, 0, 1]))],
        ),
        "blowup1" => ToricModel::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1]), ivec(&[1, 1])],
            vec!["Dx".into(), "Dy".into(), "Dz".into(), "E".into()],
            vec![vec![0, 3], vec![3, 1], vec![1, 2], vec![2, 0]],
            BTreeMap::new(),
            vec![
                ("H".into(), QVector::from_ints(&[0, 0, 1, 0])),
                ("E".into(), QVector::from_ints(&[0, 0, 0, 1])),
            ],
        ),
        "blowup2" => {
            let mut labels = BTreeMap::new();
            labels.insert(vec![1usize], "l".to_string());
            ToricModel::new(
                2,
                vec![
                    ivec(&[1, 0]),
                    ivec(&[0, 1]),
                    ivec(&[-1, -1]),
                    ivec(&[1, 1]),
                    ivec(&[-1, 0]),
                ],
                vec![
                    "Dx".into(),
                    "l".into(),
                    "Dz".into(),
                    "E1".into(),
                    "E2".into(),
                ],
                vec![vec![0, 3], vec![3, 1], vec![1, 4], vec![4, 2], vec![2, 0]],
                labels,
                vec![
                    ("H".into(), QVector::from_ints(&[0, 0, 1, 0, 1])),
                    ("E1".into(), QVector::from_ints(&[0, 0, 0, 1, 0])),
                    ("E2".into(), QVector::from_ints(&[0, 0, 0, 0, 1])),
                ],
            )
        }
        "blowup2-3d" => {
            let mut labels = BTreeMap::new();
            labels.insert(vec![1usize, 2], "l".to_string());
            ToricModel::new(
                3,
                vec![
                    ivec(&[1, 0, 0]),
                    ivec(&[0, 1, 0]),
                    ivec(&[0, 0, 1]),
                    ivec(&[-1, -1, -1]),
                    ivec(&[1, 1, 1]),
                    ivec(&[-1, 0, 0]),
                ],
                vec![
                    "Dx1".into(),
                    "Dx2".into(),
                    "Dx3".into(),
                    "Dz".into(),
                    "E1".into(),
                    "E2".into(),
                ],
                vec![
                    vec![4, 0, 1],
                    vec![4, 0, 2],
                    vec![4, 1, 2],
                    vec![5, 1, 2],
                    vec![5, 1, 3],
                    vec![5, 2, 3],
                    vec![0, 1, 3],
                    vec![0, 2, 3],
                ],
                labels,
                vec![
                    ("H".into(), QVector::from_ints(&[0, 0, 0, 1, 0, 1])),
                    ("E1".into(), QVector::from_ints(&[0, 0, 0, 0, 1, 0])),
                    ("E2".into(), QVector::from_ints(&[0, 0, 0, 0, 0, 1])),
                ],
            )
        }
        _ => Err(Error::Parse(format!("unknown toric fixture `{name}`"))),
    }
}

/// Divisor with class alpha*H - beta1*E1 - beta2*E2 on a blow-up fixture.
pub fn blowup_divisor(model: &ToricModel, c: &BlowupClass) -> Result<ToricDivisor> {
    model.divisor_from_class(&QVector(vec![
        c.alpha.clone(),
        -c.beta1.clone(),
        -c.beta2.clone(),
    ]))
}

pub fn graded_fixture_names() -> Vec<&'static str> {
    vec!["degree-powers", "gap-powers", "blowup-wall"]
}

pub fn graded_fixture(name: &str) -> Result<GradedMonomialSystem> {
    match name {
        // a_k = (x, y)^{2k}: every ideal is the 2k-th power of the maximal
        // ideal, generated in degree one.
        "degree-powers" => GradedMonomialSystem::new(
            1,
            2,
            Cone::from_i64(1, &[vec![1]]),
            Presentation::Rees(vec![
                ReesGenerator {
                    degree: ivec(&[1]),
                    exponent: vec![2, 0],
                },
                ReesGenerator {
                    degree: ivec(&[1]),
                    exponent: vec![1, 1],
                },
                ReesGenerator {
                    degree: ivec(&[1]),
                    exponent: vec![0, 2],
                },
            ]),
        ),
        // Principal powers on the numerical semigroup generated by 2 and 3.
        "gap-powers" => GradedMonomialSystem::new(
            1,
            1,
            Cone::from_i64(1, &[vec![1]]),
            Presentation::Rees(vec![
                ReesGenerator {
                    degree: ivec(&[2]),
                    exponent: vec![2],
                },
                ReesGenerator {
                    degree: ivec(&[3]),
                    exponent: vec![3],
                },
            ]),
        ),
        // The base-order system of the one-point blow-up in class
        // coordinates (t1, t2) -> t1*H + t2*E: the local ideal at the
        // exceptional curve is generated by z^max(0, t2), and the order
        // switches linear form across the wall t2 = 0.
        "blowup-wall" => GradedMonomialSystem::new(
            2,
            1,
            Cone::from_i64(2, &[vec![0, 1], vec![1, -1]]),
            Presentation::Rees(vec![
                ReesGenerator {
                    degree: ivec(&[1, 0]),
                    exponent: vec![0],
                },
                ReesGenerator {
                    degree: ivec(&[1, -1]),
                    exponent: vec![0],
                },
                ReesGenerator {
                    degree: ivec(&[0, 1]),
                    exponent: vec![1],
                },
            ]),
        ),
        _ => Err(Error::Parse(format!("unknown graded fixture `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn chamber_classification() {
        let c = |a: i64, b1: i64, b2: i64| {
            blowup_chamber(&BlowupClass::new(2, rat_int(a), rat_int(b1), rat_int(b2)))
        };
        assert_eq!(c(3, 1, 1), BlowupChamber::Chamber4);
        assert_eq!(c(3, 2, 2), BlowupChamber::Chamber5);
        assert_eq!(c(2, -1, 1), BlowupChamber::Chamber1);
        assert_eq!(c(2, 1, -1), BlowupChamber::Chamber2);
        assert_eq!(c(2, -1, -1), BlowupChamber::Chamber3);
        assert_eq!(c(4, 2, 2), BlowupChamber::Wall);
        assert_eq!(c(2, 0, 1), BlowupChamber::Wall);
        assert_eq!(c(1, 2, 0), BlowupChamber::NotBig);
        assert_eq!(c(0, -1, -1), BlowupChamber::NotBig);
    }

    #[test]
    fn invariant_tables() {
        // (3,2,2) in the plane: locus l with all three invariants 1.
        let rows =
            blowup_invariants(&BlowupClass::new(2, rat_int(3), rat_int(2), rat_int(2))).unwrap();
        assert_eq!(
            rows,
            vec![InvariantRow {
                locus: "l".into(),
                ord: rat_int(1),
                arnold: rat_int(1),
                samuel_root: rat_int(1),
            }]
        );
        // (4,3,3) in three-space: ord 2, Arnold 1, Samuel root 2.
        let rows =
            blowup_invariants(&BlowupClass::new(3, rat_int(4), rat_int(3), rat_int(3))).unwrap();
        assert_eq!(
            rows,
            vec![InvariantRow {
                locus: "l".into(),
                ord: rat_int(2),
                arnold: rat_int(1),
                samuel_root: rat_int(2),
            }]
        );
        // Ample: empty table.
        assert!(
            blowup_invariants(&BlowupClass::new(2, rat_int(3), rat_int(1), rat_int(1)))
                .unwrap()
                .is_empty()
        );
        assert!(matches!(
            blowup_invariants(&BlowupClass::new(2, rat_int(4), rat_int(2), rat_int(2))),
            Err(Error::WallClass)
        ));
    }

    #[test]
    fn sigma_at_zero() {
        let s = cutkosky_sigma(&Rat::zero()).unwrap();
        assert_eq!(s.to_exact_string(), "(3 - sqrt(5))/6");
        // 0.12732 to five places.
        assert_eq!(s.to_decimal(5), "0.12732");
        let (r, c) = s.quadratic_residual(&rat_int(9), &rat_int(-9), &rat_int(1));
        assert!(r.is_zero() && c.is_zero());
    }

    #[test]
    fn sigma_rational_points_exist() {
        // t = 1/10 has discriminant (73/10)^2, so sigma is rational.
        let s = cutkosky_sigma(&rat(1, 10)).unwrap();
        let v = s.as_rational().expect("rational threshold");
        let (a2, a1, a0) = cutkosky_quadratic(&rat(1, 10));
        assert!((a2 * &v * &v + a1 * &v + a0).is_zero());
        assert!(cutkosky_sigma(&rat(3, 2)).is_err());
        assert!(cutkosky_sigma(&rat(-1, 10)).is_err());
    }

    #[test]
    fn asymptotic_order_surd() {
        let v = cutkosky_ord_asym(&Rat::zero()).unwrap();
        assert_eq!(v.to_exact_string(), "(27 + 3*sqrt(5))/38");
        // Irrational, as claimed.
        assert!(v.as_rational().is_none());
    }

    #[test]
    fn brute_force_respects_bound() {
        let asym = cutkosky_ord_asym(&Rat::zero()).unwrap();
        for k in [38u64, 76, 100, 190, 380] {
            let b = cutkosky_ord_bruteforce(k, &Rat::zero()).unwrap();
            // |b/k - asym| <= 2/k.
            let low = rat(b as i64 - 2, k as i64);
            let high = rat(b as i64 + 2, k as i64);
            assert_eq!(asym.cmp_rational(&low), Ordering::Greater, "k={k}");
            assert_eq!(asym.cmp_rational(&high), Ordering::Less, "k={k}");
            let (lo, hi) = cutkosky_ord_interval(k, &Rat::zero()).unwrap();
            assert_eq!(asym.cmp_rational(&lo), Ordering::Greater);
            assert!(asym.cmp_rational(&hi) != Ordering::Greater);
        }
        // k = 100: the scan lands within 1 of 89.
        let b = cutkosky_ord_bruteforce(100, &Rat::zero()).unwrap();
        assert!((88..=90).contains(&b));
    }

    #[test]
    fn effectivity_routes_agree() {
        // The sigma comparison against the intersection-lattice bigness
        // test, on integral classes i*D - j*H (t = 0).
        for i in 1..=12i64 {
            for j in 0..=6i64 {
                let by_sigma = cutkosky_is_effective(i as u64, j as u64, &Rat::zero()).unwrap();
                let by_lattice = cutkosky_class_is_big(i, j, &Rat::zero());
                assert_eq!(by_sigma, by_lattice, "class {i}D - {j}H");
            }
        }
    }

    #[test]
    fn all_fixtures_load() {
        for name in surface_fixture_names() {
            surface_fixture(name).unwrap();
        }
        for name in toric_fixture_names() {
            toric_fixture(name).unwrap();
        }
        for name in graded_fixture_names() {
            graded_fixture(name).unwrap();
        }
        assert!(surface_fixture("nope").is_err());
    }

    #[test]
    fn toric_3d_model_agrees_with_closed_forms() {
        let m = toric_fixture("blowup2-3d").unwrap();
        let class = BlowupClass::new(3, rat_int(4), rat_int(3), rat_int(3));
        let d = blowup_divisor(&m, &class).unwrap();
        let rows = blowup_invariants(&class).unwrap();
        assert_eq!(rows.len(), 1);
        let l_indices = vec![1usize, 2];
        assert_eq!(m.orbit_label(&l_indices), "l");
        assert_eq!(m.asym_order_along(&d, &l_indices).unwrap(), rows[0].ord);
        assert_eq!(m.arnold_asym(&d, &l_indices).unwrap(), rows[0].arnold);
        let (_, root) = m.samuel_asym(&d, &l_indices).unwrap();
        assert_eq!(root, Some(rows[0].samuel_root.clone()));
        assert_eq!(m.stable_base_locus(&d).unwrap(), vec!["l".to_string()]);
    }

    #[test]
    fn non_polynomiality_via_rational_nodes() {
        // Rational parameter values where the radicand is a perfect square;
        // six of them pin a quartic which the seventh value must violate.
        let mut nodes: Vec<(Rat, Rat)> = Vec::new();
        'outer: for q in 1..=60i64 {
            for p in 0..(3 * q) / 2 {
                let t = rat(p, q);
                let s = cutkosky_sigma(&t).unwrap();
                if s.as_rational().is_some() {
                    let v = cutkosky_ord_asym(&t).unwrap();
                    let vr = v.as_rational().expect("rational sigma gives rational order");
                    if nodes.iter().all(|(t0, _)| *t0 != t) {
                        nodes.push((t, vr));
                    }
                    if nodes.len() >= 6 {
                        break 'outer;
                    }
                }
            }
        }
        assert!(nodes.len() >= 6, "not enough rational nodes found");
        // Exact quartic through the first five nodes.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (t, v) in nodes.iter().take(5) {
            let mut pow = Rat::one();
            let mut row = Vec::new();
            for _ in 0..5 {
                row.push(pow.clone());
                pow *= t;
            }
            rows.push(QVector(row));
            rhs.push(v.clone());
        }
        let coeffs = crate::linalg::solve_linear(
            &QMatrix::from_rows(rows),
            &QVector(rhs),
        )
        .unwrap()
        .expect("distinct nodes give an invertible Vandermonde system");
        // Evaluate at the sixth node: exact mismatch certifies that the
        // order is not polynomial of degree <= 4 on this parameter range.
        let (t6, v6) = &nodes[5];
        let mut value = Rat::zero();
        let mut pow = Rat::one();
        for k in 0..5 {
            value += &coeffs[k] * &pow;
            pow *= t6;
        }
        assert_ne!(value, *v6);
    }
}
