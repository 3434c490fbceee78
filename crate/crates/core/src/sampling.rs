//! Deterministic samplers used by the verification suite and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{blowup_chamber, BlowupChamber, BlowupClass};
use crate::linalg::{ivec_to_qvec, QVector};
use crate::rational::{rat, Rat};
use crate::surface::SurfaceModel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick_denominator(r: &mut ChaCha8Rng) -> i64 {
    [1i64, 2, 4][r.gen_range(0..3)]
}

/// A class inside the requested chamber of the two-point blow-up family.
pub fn blowup_class_in_chamber(
    chamber: BlowupChamber,
    n: u32,
    r: &mut ChaCha8Rng,
) -> BlowupClass {
    loop {
        let q = pick_denominator(r);
        let candidate = match chamber {
            BlowupChamber::Chamber1 => {
                let b1 = -r.gen_range(1..=6);
                let b2 = r.gen_range(1..=6);
                let a = b2 + r.gen_range(1..=4);
                BlowupClass::new(n, rat(a, q), rat(b1, q), rat(b2, q))
            }
            BlowupChamber::Chamber2 => {
                let b2 = -r.gen_range(1..=6);
                let b1 = r.gen_range(1..=6);
                let a = b1 + r.gen_range(1..=4);
                BlowupClass::new(n, rat(a, q), rat(b1, q), rat(b2, q))
            }
            BlowupChamber::Chamber3 => {
                let b1 = -r.gen_range(1..=6);
                let b2 = -r.gen_range(1..=6);
                let a = r.gen_range(1..=6);
                BlowupClass::new(n, rat(a, q), rat(b1, q), rat(b2, q))
            }
            BlowupChamber::Chamber4 => {
                let b1 = r.gen_range(1..=5);
                let b2 = r.gen_range(1..=5);
                let a = b1 + b2 + r.gen_range(1..=4);
                BlowupClass::new(n, rat(a, q), rat(b1, q), rat(b2, q))
            }
            BlowupChamber::Chamber5 => {
                let b1 = r.gen_range(2..=6);
                let b2 = r.gen_range(2..=6);
                let max = b1.max(b2);
                if max + 1 > b1 + b2 - 1 {
                    continue;
                }
                let a = r.gen_range(max + 1..=(b1 + b2 - 1));
                BlowupClass::new(n, rat(a, q), rat(b1, q), rat(b2, q))
            }
            _ => panic!("sampler only covers the five open chambers"),
        };
        if blowup_chamber(&candidate) == chamber {
            return candidate;
        }
    }
}

pub fn open_chambers() -> [BlowupChamber; 5] {
    [
        BlowupChamber::Chamber1,
        BlowupChamber::Chamber2,
        BlowupChamber::Chamber3,
        BlowupChamber::Chamber4,
        BlowupChamber::Chamber5,
    ]
}

/// Big classes on a surface model: combinations of the effective cone
/// generators when the model carries one, otherwise integer boxes.
pub fn surface_big_classes(model: &SurfaceModel, count: usize, seed: u64) -> Vec<QVector> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count && attempts < 10_000 {
        attempts += 1;
        let candidate = match model.effective_cone() {
            Some(cone) => {
                let q = pick_denominator(&mut r);
                let mut x = QVector::zero(model.rank());
                for g in cone.generators() {
                    let c = rat(r.gen_range(0..=6), q);
                    x = x.add(&ivec_to_qvec(g).scale(&c));
                }
                x
            }
            None => {
                let q = pick_denominator(&mut r);
                QVector(
                    (0..model.rank())
                        .map(|_| rat(r.gen_range(-4..=4), q))
                        .collect(),
                )
            }
        };
        if model.is_big(&candidate) {
            out.push(candidate);
        }
    }
    out
}

/// A positive rational scaling factor with small numerator and denominator.
pub fn positive_scalar(r: &mut ChaCha8Rng) -> Rat {
    rat(r.gen_range(1..=9), [1i64, 2, 3, 4][r.gen_range(0..4)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::surface_fixture;

    #[test]
    fn chamber_sampler_is_deterministic_and_correct() {
        let mut r1 = rng(7);
        let mut r2 = rng(7);
        for chamber in open_chambers() {
            for _ in 0..20 {
                let a = blowup_class_in_chamber(chamber, 2, &mut r1);
                let b = blowup_class_in_chamber(chamber, 2, &mut r2);
                assert_eq!(blowup_chamber(&a), chamber);
                assert_eq!(a.alpha, b.alpha);
                assert_eq!(a.beta1, b.beta1);
            }
        }
    }

    #[test]
    fn surface_sampler_yields_big_classes() {
        for name in crate::catalog::surface_fixture_names() {
            let model = surface_fixture(name).unwrap();
            let classes = surface_big_classes(&model, 10, 11);
            assert_eq!(classes.len(), 10, "not enough big classes on {name}");
            for c in &classes {
                assert!(model.is_big(c));
            }
        }
    }
}
