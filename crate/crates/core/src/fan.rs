//! Fans of rational polyhedral cones, smooth refinement, and piecewise
//! linear functions supported on a fan.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::{dot_int_rat, ivec_to_qvec, primitive, IVec, QMatrix, QVector};
use crate::rational::{Int, Rat};

/// A fan stored through its maximal cones.
#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    cones: Vec<Cone>,
}

impl Fan {
    pub fn new(dim: usize, cones: Vec<Cone>) -> Self {
        for c in &cones {
            assert_eq!(c.dim(), dim, "cone dimension mismatch");
        }
        Fan { dim, cones }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maximal_cones(&self) -> &[Cone] {
        &self.cones
    }

    /// All rays of the maximal cones, deduplicated and sorted.
    pub fn rays(&self) -> Vec<IVec> {
        let mut set: BTreeSet<IVec> = BTreeSet::new();
        for c in &self.cones {
            for g in c.generators() {
                set.insert(g.clone());
            }
        }
        set.into_iter().collect()
    }

    /// First maximal cone containing the point, in stored order.
    pub fn cone_containing(&self, x: &QVector) -> Option<usize> {
        self.cones.iter().position(|c| c.contains(x))
    }

    pub fn supports(&self, x: &QVector) -> bool {
        self.cone_containing(x).is_some()
    }

    /// Checks that every pair of maximal cones meets in a common face.
    /// Exact for the simplicial cones this crate builds (ambient <= 3).
    pub fn validate(&self) -> Result<()> {
        if self.dim > 3 {
            return Err(Error::DimensionCap {
                cap: 3,
                got: self.dim,
            });
        }
        for (i, a) in self.cones.iter().enumerate() {
            for b in self.cones.iter().skip(i + 1) {
                let common: Vec<IVec> = a
                    .generators()
                    .iter()
                    .filter(|g| b.generators().contains(g))
                    .cloned()
                    .collect();
                let face = Cone::new(self.dim, common);
                // The intersection must equal the cone on the shared rays.
                let mut normals = a.facets();
                normals.extend(b.facets());
                let (eq_a, _) = a.halfspace_description();
                let (eq_b, _) = b.halfspace_description();
                for e in eq_a.into_iter().chain(eq_b) {
                    normals.push(e.iter().map(|x| -x.clone()).collect());
                    normals.push(e);
                }
                let rays = crate::cone::rays_from_halfspaces(self.dim, &normals)?;
                for r in rays {
                    if !face.contains_int(&r) {
                        return Err(Error::ModelInvariant {
                            reason: format!(
                                "cones {:?} and {:?} do not meet in a common face",
                                a.generators(),
                                b.generators()
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Completeness of a fan with full-dimensional simplicial cones: every
    /// wall must be shared by exactly two maximal cones.
    pub fn is_complete(&self) -> bool {
        if self.cones.is_empty() {
            return false;
        }
        let mut wall_count: BTreeMap<Vec<IVec>, usize> = BTreeMap::new();
        for c in &self.cones {
            let gens = c.generators();
            if gens.len() != self.dim || !c.is_full_dimensional() {
                return false;
            }
            for skip in 0..gens.len() {
                let mut wall: Vec<IVec> = gens
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, g)| g.clone())
                    .collect();
                wall.sort();
                *wall_count.entry(wall).or_insert(0) += 1;
            }
        }
        wall_count.values().all(|&c| c == 2)
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(Cone::is_unimodular)
    }

    /// Refines every maximal cone into unimodular cones without changing the
    /// support. Ambient dimension is capped at 3.
    pub fn smooth_refine(&self) -> Result<Fan> {
        if self.dim > 3 {
            return Err(Error::DimensionCap {
                cap: 3,
                got: self.dim,
            });
        }
        match self.dim {
            0 | 1 => Ok(self.clone()),
            2 => {
                let mut out = Vec::new();
                for c in &self.cones {
                    if c.generators().len() < 2 {
                        out.push(c.clone());
                        continue;
                    }
                    out.extend(refine_plane_cone(c)?);
                }
                Ok(Fan::new(2, out))
            }
            _ => self.smooth_refine_3d(),
        }
    }

    /// Stellar subdivision at a ray: every maximal cone containing the ray
    /// is replaced by the cones over its facets missing the ray.
    pub fn stellar_subdivide(&self, ray: &IVec) -> Fan {
        let xi = primitive(ray);
        let mut next = Vec::new();
        for c in &self.cones {
            if !c.contains_int(&xi) || c.generators().contains(&xi) {
                next.push(c.clone());
                continue;
            }
            let gens = c.generators();
            let mut replaced = false;
            for skip in 0..gens.len() {
                let facet: Vec<IVec> = gens
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, g)| g.clone())
                    .collect();
                if Cone::new(self.dim, facet.clone()).contains_int(&xi) {
                    continue;
                }
                let mut new_gens = facet;
                new_gens.push(xi.clone());
                let nc = Cone::new(self.dim, new_gens);
                if nc.rank() == c.rank() {
                    next.push(nc);
                    replaced = true;
                }
            }
            if !replaced {
                next.push(c.clone());
            }
        }
        Fan::new(self.dim, next)
    }

    fn smooth_refine_3d(&self) -> Result<Fan> {
        // Triangulate, then stellarly subdivide until unimodular.
        let mut cones: Vec<Cone> = Vec::new();
        for c in &self.cones {
            if c.generators().len() <= 3 {
                cones.push(c.clone());
            } else {
                cones.extend(triangulate_3d(c)?);
            }
        }
        let mut rounds = 0usize;
        loop {
            rounds += 1;
            if rounds > 1000 {
                return Err(Error::StabilizationLimit { limit: 1000 });
            }
            let target = cones.iter().position(|c| {
                c.generators().len() == 3 && c.rank() == 3 && !c.is_unimodular()
            });
            let Some(idx) = target else {
                return Ok(Fan::new(3, cones));
            };
            let xi = subdivision_point(&cones[idx])?;
            let mut next = Vec::new();
            for c in &cones {
                if !c.contains_int(&xi) {
                    next.push(c.clone());
                    continue;
                }
                // Stellar subdivision: cone over the facets missing xi.
                let gens = c.generators();
                let mut replaced = false;
                for skip in 0..gens.len() {
                    let facet: Vec<IVec> = gens
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, g)| g.clone())
                        .collect();
                    let fc = Cone::new(3, facet.clone());
                    if fc.contains_int(&xi) {
                        continue;
                    }
                    let mut new_gens = facet;
                    new_gens.push(xi.clone());
                    let nc = Cone::new(3, new_gens);
                    if nc.rank() == 3 {
                        next.push(nc);
                        replaced = true;
                    }
                }
                if !replaced {
                    // xi spans a ray of c itself; keep the cone.
                    next.push(c.clone());
                }
            }
            cones = next;
        }
    }
}

/// Smooth subdivision of a strongly convex plane cone: consecutive Hilbert
/// basis elements in angular order span the unimodular subcones.
fn refine_plane_cone(c: &Cone) -> Result<Vec<Cone>> {
    if c.generators().len() == 2 && c.is_unimodular() {
        return Ok(vec![c.clone()]);
    }
    let mut hb = c.hilbert_basis()?;
    hb.sort_by(|a, b| cross_sign(a, b));
    let cones: Vec<Cone> = hb
        .windows(2)
        .map(|w| Cone::new(2, vec![w[0].clone(), w[1].clone()]))
        .collect();
    for sub in &cones {
        debug_assert!(sub.is_unimodular(), "subcone {sub:?} is not unimodular");
    }
    Ok(cones)
}

/// Counterclockwise order inside a strongly convex plane cone.
fn cross_sign(a: &[Int], b: &[Int]) -> Ordering {
    let cross = &a[0] * &b[1] - &a[1] * &b[0];
    if cross.is_positive() {
        Ordering::Less
    } else if cross.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// Splits a (possibly non-simplicial) full-dimensional 3d cone into
/// simplicial cones by coning over the facets missing a chosen ray.
fn triangulate_3d(c: &Cone) -> Result<Vec<Cone>> {
    let apex = c.generators()[0].clone();
    let mut out = Vec::new();
    for normal in c.facets() {
        let tight: Vec<IVec> = c
            .generators()
            .iter()
            .filter(|g| crate::linalg::dot_int(&normal, g).is_zero())
            .cloned()
            .collect();
        if tight.iter().any(|g| *g == apex) {
            continue;
        }
        // A facet of a 3d cone is a plane cone with exactly two extreme
        // rays; intermediate generators are dropped by taking extremes.
        let fc = Cone::new(3, tight);
        let extreme = extreme_rays_in_plane(&fc);
        if extreme.len() != 2 {
            return Err(Error::ModelInvariant {
                reason: "facet of a 3d cone without two extreme rays".into(),
            });
        }
        out.push(Cone::new(
            3,
            vec![apex.clone(), extreme[0].clone(), extreme[1].clone()],
        ));
    }
    Ok(out)
}

/// Extreme rays of a rank-2 cone embedded in 3-space.
fn extreme_rays_in_plane(c: &Cone) -> Vec<IVec> {
    let gens = c.generators();
    if gens.len() <= 2 {
        return gens.to_vec();
    }
    let mut extreme = Vec::new();
    for g in gens {
        let others: Vec<IVec> = gens.iter().filter(|h| *h != g).cloned().collect();
        if !Cone::new(c.dim(), others).contains_int(g) {
            extreme.push(g.clone());
        }
    }
    extreme
}

/// A nonzero lattice point of the half-open fundamental parallelepiped of a
/// simplicial non-unimodular cone, made primitive.
fn subdivision_point(c: &Cone) -> Result<IVec> {
    let gens = c.generators();
    let mat = QMatrix::from_rows(gens.iter().map(|g| ivec_to_qvec(g)).collect()).transpose();
    let n = c.dim();
    // Bounding box of the parallelepiped.
    let mut lo = vec![Int::zero(); n];
    let mut hi = vec![Int::zero(); n];
    for i in 0..n {
        for g in gens {
            if g[i].is_negative() {
                lo[i] += &g[i];
            } else {
                hi[i] += &g[i];
            }
        }
    }
    let mut best: Option<IVec> = None;
    let mut point = vec![Int::zero(); n];
    scan_box(&lo, &hi, 0, &mut point, &mut |p: &IVec| {
        if p.iter().all(|e| e.is_zero()) {
            return;
        }
        let rhs = ivec_to_qvec(p);
        let t = crate::linalg::solve_linear(&mat, &rhs)
            .expect("dimensions agree")
            .expect("simplicial generators are independent");
        let inside = t
            .iter()
            .all(|ti| !ti.is_negative() && *ti < Rat::from_integer(Int::from(1)));
        if !inside {
            return;
        }
        let prim = primitive(p);
        if gens.contains(&prim) {
            return;
        }
        let cand = prim;
        match &best {
            None => best = Some(cand),
            Some(b) => {
                if cand < *b {
                    best = Some(cand);
                }
            }
        }
    });
    best.ok_or_else(|| Error::ModelInvariant {
        reason: "non-unimodular cone without interior parallelepiped point".into(),
    })
}

fn scan_box(lo: &[Int], hi: &[Int], depth: usize, point: &mut IVec, f: &mut impl FnMut(&IVec)) {
    if depth == lo.len() {
        f(point);
        return;
    }
    let mut v = lo[depth].clone();
    while v <= hi[depth] {
        if point.len() == depth {
            point.push(v.clone());
        } else {
            point[depth] = v.clone();
        }
        point.truncate(depth + 1);
        scan_box(lo, hi, depth + 1, point, f);
        v += 1;
    }
}

/// A rational linear functional per maximal cone, agreeing on shared faces.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    fan: Fan,
    functionals: Vec<QVector>,
}

impl PiecewiseLinear {
    pub fn new(fan: Fan, functionals: Vec<QVector>) -> Result<Self> {
        if fan.maximal_cones().len() != functionals.len() {
            return Err(Error::DimensionMismatch {
                expected: fan.maximal_cones().len(),
                got: functionals.len(),
            });
        }
        let pl = PiecewiseLinear { fan, functionals };
        pl.check_continuity()?;
        Ok(pl)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn functionals(&self) -> &[QVector] {
        &self.functionals
    }

    pub fn evaluate(&self, x: &QVector) -> Result<Rat> {
        let idx = self.fan.cone_containing(x).ok_or(Error::OutOfDomain)?;
        Ok(self.functionals[idx].dot(x))
    }

    /// Functionals of adjacent cones must agree on every shared generator.
    fn check_continuity(&self) -> Result<()> {
        let cones = self.fan.maximal_cones();
        for i in 0..cones.len() {
            for j in (i + 1)..cones.len() {
                for g in cones[i].generators() {
                    if cones[j].generators().contains(g) {
                        let a = dot_int_rat(g, &self.functionals[i]);
                        let b = dot_int_rat(g, &self.functionals[j]);
                        if a != b {
                            return Err(Error::ModelInvariant {
                                reason: format!(
                                    "piecewise-linear data disagrees on shared ray {g:?}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ivec;
    use crate::rational::rat_int;

    #[test]
    fn refine_quadratic_cone() {
        let fan = Fan::new(2, vec![Cone::from_i64(2, &[vec![1, 0], vec![1, 2]])]);
        let refined = fan.smooth_refine().unwrap();
        assert_eq!(refined.maximal_cones().len(), 2);
        assert!(refined.is_smooth());
        assert!(refined.rays().contains(&ivec(&[1, 1])));
    }

    #[test]
    fn refine_smooth_fan_is_identity() {
        let fan = Fan::new(2, vec![Cone::from_i64(2, &[vec![1, 0], vec![0, 1]])]);
        let refined = fan.smooth_refine().unwrap();
        assert_eq!(refined.maximal_cones().len(), 1);
        assert!(refined.is_smooth());
    }

    #[test]
    fn refine_cone_2_3() {
        let fan = Fan::new(2, vec![Cone::from_i64(2, &[vec![1, 0], vec![2, 3]])]);
        let refined = fan.smooth_refine().unwrap();
        assert!(refined.is_smooth());
        // Support unchanged: sample rational points.
        let original = &fan.maximal_cones()[0];
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                let p = QVector::from_ints(&[x, y]);
                assert_eq!(original.contains(&p), refined.supports(&p));
            }
        }
    }

    #[test]
    fn refine_3d_singular_cone() {
        // cone over (1,0,0),(0,1,0),(1,1,2): multiplicity 2.
        let fan = Fan::new(
            3,
            vec![Cone::from_i64(
                3,
                &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 2]],
            )],
        );
        let refined = fan.smooth_refine().unwrap();
        assert!(refined.is_smooth());
        let original = &fan.maximal_cones()[0];
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                for z in -2i64..=2 {
                    let p = QVector::from_ints(&[x, y, z]);
                    assert_eq!(original.contains(&p), refined.supports(&p), "at {p:?}");
                }
            }
        }
    }

    #[test]
    fn complete_fan_detection() {
        // Fan of the projective plane.
        let p2 = Fan::new(
            2,
            vec![
                Cone::from_i64(2, &[vec![1, 0], vec![0, 1]]),
                Cone::from_i64(2, &[vec![0, 1], vec![-1, -1]]),
                Cone::from_i64(2, &[vec![-1, -1], vec![1, 0]]),
            ],
        );
        assert!(p2.is_complete());
        assert!(p2.is_smooth());
        p2.validate().unwrap();

        let partial = Fan::new(
            2,
            vec![
                Cone::from_i64(2, &[vec![1, 0], vec![0, 1]]),
                Cone::from_i64(2, &[vec![0, 1], vec![-1, -1]]),
            ],
        );
        assert!(!partial.is_complete());
    }

    #[test]
    fn invalid_fan_rejected() {
        // Two cones overlapping in a full-dimensional region.
        let bad = Fan::new(
            2,
            vec![
                Cone::from_i64(2, &[vec![1, 0], vec![0, 1]]),
                Cone::from_i64(2, &[vec![1, 1], vec![-1, 1]]),
            ],
        );
        assert!(bad.validate().is_err());
    }

    #[test]
    fn piecewise_linear_evaluation() {
        let fan = Fan::new(
            2,
            vec![
                Cone::from_i64(2, &[vec![1, 0], vec![1, 1]]),
                Cone::from_i64(2, &[vec![1, 1], vec![0, 1]]),
            ],
        );
        // max(0, y - x)-style function: 0 on the lower cone, y - x above.
        let pl = PiecewiseLinear::new(
            fan,
            vec![
                QVector::from_ints(&[0, 0]),
                QVector::from_ints(&[-1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(pl.evaluate(&QVector::from_ints(&[3, 1])).unwrap(), rat_int(0));
        assert_eq!(pl.evaluate(&QVector::from_ints(&[1, 3])).unwrap(), rat_int(2));
        assert_eq!(pl.evaluate(&QVector::from_ints(&[2, 2])).unwrap(), rat_int(0));

        // Discontinuous data must be rejected.
        let fan2 = Fan::new(
            2,
            vec![
                Cone::from_i64(2, &[vec![1, 0], vec![1, 1]]),
                Cone::from_i64(2, &[vec![1, 1], vec![0, 1]]),
            ],
        );
        assert!(PiecewiseLinear::new(
            fan2,
            vec![QVector::from_ints(&[0, 0]), QVector::from_ints(&[1, 1])],
        )
        .is_err());
    }
}
