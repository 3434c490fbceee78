//! Complete smooth toric models: section polytopes, base orders along
//! torus-invariant valuations, exact asymptotic orders, stable, augmented
//! and restricted base loci, volumes, asymptotic Arnold and Samuel
//! multiplicities, and the chamber fan on which every ray valuation's
//! asymptotic order is linear.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::cone::{rays_from_halfspaces, Cone};
use crate::error::{Error, Result};
use crate::fan::{Fan, PiecewiseLinear};
use crate::linalg::{
    dot_int_rat, ivec_to_qvec, primitive, primitive_from_rational, solve_linear, IVec, QMatrix,
    QVector,
};
use crate::lp::{self, Constraint, LpOutcome};
use crate::monomial::{
    arnold_from_facets, covolume_from_facets, exact_nth_root, newton_polyhedron_facets,
    MonomialIdeal,
};
use crate::polyhedron::{HalfSpace, Polyhedron};
use crate::rational::{denominator_lcm, Int, Rat};

/// Coefficients of a torus-invariant divisor, one per ray.
pub type ToricDivisor = QVector;

#[derive(Clone, Debug)]
pub struct ToricModel {
    dim: usize,
    rays: Vec<IVec>,
    ray_labels: Vec<String>,
    max_cones: Vec<Vec<usize>>,
    cone_labels: BTreeMap<Vec<usize>, String>,
    /// Optional named class basis, each given by a divisor representative.
    class_basis: Vec<(String, QVector)>,
    fan: Fan,
}

impl ToricModel {
    pub fn new(
        dim: usize,
        rays: Vec<IVec>,
        ray_labels: Vec<String>,
        max_cones: Vec<Vec<usize>>,
        cone_labels: BTreeMap<Vec<usize>, String>,
        class_basis: Vec<(String, QVector)>,
    ) -> Result<Self> {
        if rays.len() != ray_labels.len() {
            return Err(Error::ModelInvariant {
                reason: "ray label count differs from ray count".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for r in &rays {
            if r.len() != dim {
                return Err(Error::ModelInvariant {
                    reason: "ray dimension mismatch".into(),
                });
            }
            if primitive(r) != *r || r.iter().all(Zero::is_zero) {
                return Err(Error::ModelInvariant {
                    reason: format!("ray {r:?} is not primitive"),
                });
            }
            if !seen.insert(r.clone()) {
                return Err(Error::ModelInvariant {
                    reason: format!("duplicate ray {r:?}"),
                });
            }
        }
        let mut cones = Vec::new();
        let mut sorted_cones = Vec::new();
        for c in &max_cones {
            let mut idx = c.clone();
            idx.sort_unstable();
            idx.dedup();
            if idx.len() != dim || idx.iter().any(|&i| i >= rays.len()) {
                return Err(Error::ModelInvariant {
                    reason: format!("maximal cone {c:?} is not a simplicial index set"),
                });
            }
            let cone = Cone::new(dim, idx.iter().map(|&i| rays[i].clone()).collect());
            if !cone.is_unimodular() {
                return Err(Error::ModelInvariant {
                    reason: format!("maximal cone {c:?} is not unimodular"),
                });
            }
            cones.push(cone);
            sorted_cones.push(idx);
        }
        let fan = Fan::new(dim, cones);
        fan.validate()?;
        if !fan.is_complete() {
            return Err(Error::ModelInvariant {
                reason: "fan is not complete".into(),
            });
        }
        for (_, rep) in &class_basis {
            if rep.dim() != rays.len() {
                return Err(Error::ModelInvariant {
                    reason: "class basis representative has wrong length".into(),
                });
            }
        }
        Ok(ToricModel {
            dim,
            rays,
            ray_labels,
            max_cones: sorted_cones,
            cone_labels,
            class_basis,
            fan,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IVec] {
        &self.rays
    }

    pub fn ray_labels(&self) -> &[String] {
        &self.ray_labels
    }

    pub fn ray_index(&self, label: &str) -> Option<usize> {
        self.ray_labels.iter().position(|l| l == label)
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn class_basis(&self) -> &[(String, QVector)] {
        &self.class_basis
    }

    /// Divisor representative of a class given in the model's class basis.
    pub fn divisor_from_class(&self, class: &QVector) -> Result<ToricDivisor> {
        if self.class_basis.is_empty() {
            return Err(Error::ModelInvariant {
                reason: "model has no class basis".into(),
            });
        }
        if class.dim() != self.class_basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.class_basis.len(),
                got: class.dim(),
            });
        }
        let mut d = QVector::zero(self.rays.len());
        for (i, (_, rep)) in self.class_basis.iter().enumerate() {
            d = d.add(&rep.scale(&class[i]));
        }
        Ok(d)
    }

    /// Label of the orbit closure of the cone on the given ray indices.
    pub fn orbit_label(&self, indices: &[usize]) -> String {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        if let Some(l) = self.cone_labels.get(&idx) {
            return l.clone();
        }
        if idx.len() == 1 {
            return self.ray_labels[idx[0]].clone();
        }
        let names: Vec<&str> = idx.iter().map(|&i| self.ray_labels[i].as_str()).collect();
        format!("V({})", names.join(","))
    }

    /// All nonzero faces of the maximal cones, as sorted ray index sets.
    pub fn all_cone_index_sets(&self) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.max_cones {
            for mask in 1u32..(1 << c.len()) {
                let subset: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                out.insert(subset);
            }
        }
        out.into_iter().collect()
    }

    pub fn section_polytope(&self, d: &ToricDivisor) -> Polyhedron {
        assert_eq!(d.dim(), self.rays.len(), "divisor length mismatch");
        let halfspaces = self
            .rays
            .iter()
            .enumerate()
            .map(|(i, v)| HalfSpace::new(v.clone(), -d[i].clone()))
            .collect();
        Polyhedron::new(self.dim, halfspaces)
    }

    /// Value of the support function of d at w: the linear extension from
    /// the maximal cone containing w, normalized by phi(v_rho) = -a_rho.
    pub fn support_value(&self, d: &ToricDivisor, w: &IVec) -> Result<Rat> {
        let wq = ivec_to_qvec(w);
        let cone_idx = self
            .fan
            .cone_containing(&wq)
            .ok_or(Error::OutOfDomain)?;
        let indices = &self.max_cones[cone_idx];
        let mat =
            QMatrix::from_rows(indices.iter().map(|&i| ivec_to_qvec(&self.rays[i])).collect())
                .transpose();
        let coords = solve_linear(&mat, &wq)?.expect("unimodular cone basis");
        let mut value = Rat::zero();
        for (k, &i) in indices.iter().enumerate() {
            value -= &coords[k] * &d[i];
        }
        Ok(value)
    }

    /// Bigness: the section polytope is full-dimensional.
    pub fn is_big(&self, d: &ToricDivisor) -> bool {
        self.section_polytope(d).is_full_dimensional()
    }

    pub fn is_effective(&self, d: &ToricDivisor) -> bool {
        !self.section_polytope(d).is_empty()
    }

    /// Per-cone vertex candidates u_sigma with <u_sigma, v_i> = -a_i.
    fn cone_vertices(&self, d: &ToricDivisor) -> Vec<QVector> {
        self.max_cones
            .iter()
            .map(|indices| {
                let mat = QMatrix::from_rows(
                    indices.iter().map(|&i| ivec_to_qvec(&self.rays[i])).collect(),
                );
                let rhs = QVector(indices.iter().map(|&i| -d[i].clone()).collect());
                solve_linear(&mat, &rhs)
                    .expect("dimensions agree")
                    .expect("unimodular cone matrix")
            })
            .collect()
    }

    pub fn is_nef(&self, d: &ToricDivisor) -> bool {
        self.cone_vertices(d).iter().all(|u| {
            self.rays
                .iter()
                .enumerate()
                .all(|(i, v)| dot_int_rat(v, u) >= -&d[i])
        })
    }

    /// Ampleness: the support function is strictly convex, i.e. each cone
    /// vertex strictly satisfies the inequalities of all other rays.
    pub fn is_ample(&self, d: &ToricDivisor) -> bool {
        self.cone_vertices(d)
            .iter()
            .zip(&self.max_cones)
            .all(|(u, indices)| {
                self.rays.iter().enumerate().all(|(i, v)| {
                    let val = dot_int_rat(v, u);
                    if indices.contains(&i) {
                        val == -&d[i]
                    } else {
                        val > -&d[i]
                    }
                })
            })
    }

    /// Order of vanishing of the finite linear system on the orbit closure
    /// of the cone with the given ray indices: the minimum over lattice
    /// points of the section polytope. None encodes an empty system.
    pub fn base_order_along(&self, d: &ToricDivisor, indices: &[usize]) -> Result<Option<Rat>> {
        let pts = self.section_polytope(d).lattice_points()?;
        if pts.is_empty() {
            return Ok(None);
        }
        let mut best: Option<Rat> = None;
        for u in &pts {
            let mut total = Rat::zero();
            for &i in indices {
                total += Rat::from_integer(crate::linalg::dot_int(&self.rays[i], u)) + &d[i];
            }
            best = Some(match best {
                None => total,
                Some(b) => b.min(total),
            });
        }
        Ok(best)
    }

    /// Exact asymptotic order of vanishing along the monomial valuation at
    /// the lattice point w (the sum of the rays of a cone for its orbit
    /// closure): min over the section polytope minus the support function.
    pub fn asym_order(&self, d: &ToricDivisor, w: &IVec) -> Result<Rat> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let (min, _) = self.section_polytope(d).minimize(w)?;
        Ok(min - self.support_value(d, w)?)
    }

    /// Asymptotic order along the orbit closure of a cone.
    pub fn asym_order_along(&self, d: &ToricDivisor, indices: &[usize]) -> Result<Rat> {
        let w = self.cone_weight(indices);
        self.asym_order(d, &w)
    }

    fn cone_weight(&self, indices: &[usize]) -> IVec {
        let mut w = vec![Int::zero(); self.dim];
        for &i in indices {
            for (k, c) in self.rays[i].iter().enumerate() {
                w[k] += c;
            }
        }
        w
    }

    /// Independent route to the asymptotic order along a ray: the least
    /// coefficient b_rho over the effective torus-invariant divisors
    /// numerically equivalent to d, by exact linear programming.
    pub fn asym_order_via_effective_lp(&self, d: &ToricDivisor, ray: usize) -> Result<Rat> {
        let m = self.rays.len();
        let n = self.dim;
        // Variables (b_1..b_m, u_1..u_n): b = d + div(u), b >= 0.
        let total = m + n;
        let mut cons = Vec::new();
        for (i, v) in self.rays.iter().enumerate() {
            let mut row = QVector::zero(total);
            row[i] = Rat::one();
            for (k, c) in v.iter().enumerate() {
                row[m + k] = -Rat::from_integer(c.clone());
            }
            cons.push(Constraint::eq(row, d[i].clone()));
        }
        for i in 0..m {
            cons.push(Constraint::ge(QVector::unit(total, i), Rat::zero()));
        }
        let mut obj = QVector::zero(total);
        obj[ray] = Rat::one();
        match lp::minimize(&obj, &cons) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Err(Error::NotEffective),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    /// A third route, through the graded system of base orders: evaluates
    /// the finite base order at a denominator-clearing level p where the
    /// limit is attained, verifying agreement at 2p. The computation runs
    /// over lattice points only and is independent of the LP route.
    pub fn asym_order_via_graded_limit(
        &self,
        d: &ToricDivisor,
        indices: &[usize],
    ) -> Result<Rat> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let w = self.cone_weight(indices);
        let (_, point) = self.section_polytope(d).minimize(&w)?;
        let mut p = denominator_lcm(point.iter());
        p = num_integer::lcm(p, denominator_lcm(d.iter()));
        let p1 = Rat::from_integer(p.clone());
        let p2 = Rat::from_integer(2 * &p);
        let v1 = self
            .base_order_along(&d.scale(&p1), indices)?
            .ok_or(Error::NotEffective)?;
        let v2 = self
            .base_order_along(&d.scale(&p2), indices)?
            .ok_or(Error::NotEffective)?;
        let r1 = v1 / &p1;
        let r2 = v2 / &p2;
        if r1 != r2 {
            return Err(Error::StabilizationLimit { limit: 2 });
        }
        Ok(r1)
    }

    /// Base locus of the finite linear system |d| (d with integral
    /// coefficients after scaling): the minimal cones whose orbit closures
    /// are contained in it. None when the system is empty.
    fn finite_base_locus(&self, d: &ToricDivisor) -> Result<Option<BTreeSet<Vec<usize>>>> {
        let pts = self.section_polytope(d).lattice_points()?;
        if pts.is_empty() {
            return Ok(None);
        }
        let mut flagged: BTreeSet<Vec<usize>> = BTreeSet::new();
        for indices in self.all_cone_index_sets() {
            // sigma is flagged when no section is tangency-free on it.
            let has_free_section = pts.iter().any(|u| {
                indices.iter().all(|&i| {
                    Rat::from_integer(crate::linalg::dot_int(&self.rays[i], u)) == -&d[i]
                })
            });
            if !has_free_section {
                flagged.insert(indices);
            }
        }
        Ok(Some(minimal_sets(flagged)))
    }

    /// Stable base locus of a rational class, by doubling the level until
    /// two successive finite base loci agree.
    pub fn stable_base_locus(&self, d: &ToricDivisor) -> Result<Vec<String>> {
        Ok(self
            .stable_base_locus_sets(d)?
            .iter()
            .map(|s| self.orbit_label(s))
            .collect())
    }

    pub fn stable_base_locus_sets(&self, d: &ToricDivisor) -> Result<BTreeSet<Vec<usize>>> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let polytope = self.section_polytope(d);
        let mut scale = denominator_lcm(d.iter());
        for v in polytope.vertices() {
            scale = num_integer::lcm(scale, denominator_lcm(v.iter()));
        }
        let mut p = Rat::from_integer(scale);
        let mut previous: Option<BTreeSet<Vec<usize>>> = None;
        for _ in 0..12 {
            let current = self
                .finite_base_locus(&d.scale(&p))?
                .expect("scaled big system has integral vertices");
            if let Some(prev) = &previous {
                if *prev == current {
                    return Ok(current);
                }
            }
            previous = Some(current);
            p *= crate::rational::rat_int(2);
        }
        Err(Error::StabilizationLimit { limit: 12 })
    }

    /// The all-ones toric divisor used for perturbations; on the Fano
    /// models shipped with this crate it is ample, which the perturbation
    /// loops require.
    pub fn canonical_ample(&self) -> Result<ToricDivisor> {
        let a = QVector(vec![Rat::one(); self.rays.len()]);
        if !self.is_ample(&a) {
            return Err(Error::ModelInvariant {
                reason: "sum of ray divisors is not ample on this model".into(),
            });
        }
        Ok(a)
    }

    /// Augmented base locus: stable base locus of d - eps*A for the fixed
    /// toric ample A, with eps halved until two successive answers agree.
    pub fn augmented_base_locus(&self, d: &ToricDivisor) -> Result<Vec<String>> {
        Ok(self
            .augmented_base_locus_sets(d)?
            .iter()
            .map(|s| self.orbit_label(s))
            .collect())
    }

    pub fn augmented_base_locus_sets(&self, d: &ToricDivisor) -> Result<BTreeSet<Vec<usize>>> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let ample = self.canonical_ample()?;
        let mut eps = crate::rational::rat(1, 2);
        let mut previous: Option<BTreeSet<Vec<usize>>> = None;
        for _ in 0..24 {
            let perturbed = d.sub(&ample.scale(&eps));
            if self.is_big(&perturbed) {
                let locus = self.stable_base_locus_sets(&perturbed)?;
                if let Some(prev) = &previous {
                    if *prev == locus {
                        return Ok(locus);
                    }
                }
                previous = Some(locus);
            }
            eps /= crate::rational::rat_int(2);
        }
        Err(Error::StabilizationLimit { limit: 24 })
    }

    /// Restricted base locus through positivity of asymptotic orders: the
    /// minimal cones whose monomial valuation has positive order.
    pub fn restricted_base_locus(&self, d: &ToricDivisor) -> Result<Vec<String>> {
        Ok(self
            .restricted_base_locus_sets(d)?
            .iter()
            .map(|s| self.orbit_label(s))
            .collect())
    }

    pub fn restricted_base_locus_sets(&self, d: &ToricDivisor) -> Result<BTreeSet<Vec<usize>>> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let mut flagged: BTreeSet<Vec<usize>> = BTreeSet::new();
        for indices in self.all_cone_index_sets() {
            if self.asym_order_along(d, &indices)?.is_positive() {
                flagged.insert(indices);
            }
        }
        Ok(minimal_sets(flagged))
    }

    /// Restricted base locus directly from the definition: the union of the
    /// stable base loci of d + eps*A, stabilized as eps is halved. This is
    /// the independent cross-check for the order-positivity route.
    pub fn restricted_base_locus_by_perturbation(
        &self,
        d: &ToricDivisor,
    ) -> Result<BTreeSet<Vec<usize>>> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let ample = self.canonical_ample()?;
        let mut eps = crate::rational::rat(1, 2);
        let mut previous: Option<BTreeSet<Vec<usize>>> = None;
        for _ in 0..24 {
            let locus = self.stable_base_locus_sets(&d.add(&ample.scale(&eps)))?;
            if let Some(prev) = &previous {
                if *prev == locus {
                    return Ok(locus);
                }
            }
            previous = Some(locus);
            eps /= crate::rational::rat_int(2);
        }
        Err(Error::StabilizationLimit { limit: 24 })
    }

    /// B_-(d), B(d), B_+(d) for a rational big class, with the inclusion
    /// chain asserted exactly.
    pub fn base_loci(&self, d: &ToricDivisor) -> Result<BaseLociReport> {
        let minus = self.restricted_base_locus_sets(d)?;
        let stable = self.stable_base_locus_sets(d)?;
        let plus = self.augmented_base_locus_sets(d)?;
        if !locus_contained(&minus, &stable) || !locus_contained(&stable, &plus) {
            return Err(Error::ModelInvariant {
                reason: "base locus chain inclusion violated".into(),
            });
        }
        Ok(BaseLociReport {
            restricted: minus.iter().map(|s| self.orbit_label(s)).collect(),
            stable: stable.iter().map(|s| self.orbit_label(s)).collect(),
            augmented: plus.iter().map(|s| self.orbit_label(s)).collect(),
            restricted_sets: minus,
            stable_sets: stable,
            augmented_sets: plus,
        })
    }

    /// Exact volume: n! times the euclidean volume of the section polytope.
    pub fn volume(&self, d: &ToricDivisor) -> Result<Rat> {
        let mut factorial = Rat::one();
        for k in 2..=self.dim {
            factorial *= crate::rational::rat_int(k as i64);
        }
        Ok(self.section_polytope(d).volume()? * factorial)
    }

    /// Vertices of the exponent polytope of the local base monomials at the
    /// orbit closure of a cone: the images of the section polytope vertices
    /// under u -> (<u, v_i> + a_i) over the cone's rays.
    fn exponent_vertices(&self, d: &ToricDivisor, indices: &[usize]) -> Vec<QVector> {
        self.section_polytope(d)
            .vertices()
            .iter()
            .map(|u| {
                QVector(
                    indices
                        .iter()
                        .map(|&i| dot_int_rat(&self.rays[i], u) + &d[i])
                        .collect(),
                )
            })
            .collect()
    }

    /// Asymptotic Arnold multiplicity along the orbit closure of a cone.
    pub fn arnold_asym(&self, d: &ToricDivisor, indices: &[usize]) -> Result<Rat> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let pts = self.exponent_vertices(d, indices);
        Ok(arnold_from_facets(&newton_polyhedron_facets(
            &pts,
            indices.len(),
        )))
    }

    /// Asymptotic Samuel data along the orbit closure of a cone: the limit
    /// of e(a_p)/p^k (k the codimension), and its exact k-th root when that
    /// root is rational.
    pub fn samuel_asym(&self, d: &ToricDivisor, indices: &[usize]) -> Result<(Rat, Option<Rat>)> {
        if !self.is_big(d) {
            return Err(Error::NotBig);
        }
        let k = indices.len();
        let pts = self.exponent_vertices(d, indices);
        let covol = covolume_from_facets(&newton_polyhedron_facets(&pts, k), k)?;
        let mut factorial = Rat::one();
        for j in 2..=k {
            factorial *= crate::rational::rat_int(j as i64);
        }
        let e = covol * factorial;
        let root = exact_nth_root(&e, k as u32);
        Ok((e, root))
    }

    /// Local base ideal of |d| at the orbit closure of a cone, for an
    /// integral divisor: exponents of the generating monomials.
    pub fn base_ideal_along(&self, d: &ToricDivisor, indices: &[usize]) -> Result<MonomialIdeal> {
        let pts = self.section_polytope(d).lattice_points()?;
        let mut gens = Vec::new();
        for u in &pts {
            let mut e = Vec::with_capacity(indices.len());
            for &i in indices {
                let v = Rat::from_integer(crate::linalg::dot_int(&self.rays[i], u)) + &d[i];
                if !v.denom().is_one() || v.is_negative() {
                    return Err(Error::ModelInvariant {
                        reason: "base ideal requires integral divisor coefficients".into(),
                    });
                }
                let int = v.to_integer();
                e.push(u64::try_from(int.clone()).map_err(|_| Error::OutOfRange {
                    reason: format!("exponent {int} out of range"),
                })?);
            }
            gens.push(e);
        }
        Ok(MonomialIdeal::new(indices.len(), gens))
    }

    /// The chamber fan of the classes spanned by the given basis divisors:
    /// a fan supported on the pulled-back effective cone such that the
    /// asymptotic order of every ray valuation is linear on each cone.
    pub fn chamber_fan(&self, basis: &[ToricDivisor]) -> Result<ChamberFan> {
        let r = basis.len();
        if r > 3 {
            return Err(Error::DimensionCap { cap: 3, got: r });
        }
        for b in basis {
            assert_eq!(b.dim(), self.rays.len(), "divisor length mismatch");
        }
        // Pull back the effective cone: it is spanned by the classes of the
        // ray divisors, so express each [D_rho] in the basis classes.
        let mut eff_generators: Vec<IVec> = Vec::new();
        for rho in 0..self.rays.len() {
            let t = self.class_coordinates_of_ray_divisor(basis, rho)?;
            eff_generators.push(primitive_from_rational(&t));
        }
        let support = Cone::new(r, eff_generators);
        if !support.is_full_dimensional() {
            return Err(Error::ModelInvariant {
                reason: "basis classes do not span".into(),
            });
        }
        let (_, support_facets) = support.halfspace_description();

        // Dual vertices per ray: basic solutions of {y >= 0, sum y_t v_t = w}.
        // Each yields a linear functional of the class coordinates t.
        let mut functionals_per_ray: Vec<Vec<QVector>> = Vec::new();
        for rho in 0..self.rays.len() {
            let mut fns: BTreeSet<QVector> = BTreeSet::new();
            let w = &self.rays[rho];
            for subset in crate::polyhedron::combinations(self.rays.len(), self.dim) {
                let mat = QMatrix::from_rows(
                    subset.iter().map(|&i| ivec_to_qvec(&self.rays[i])).collect(),
                )
                .transpose();
                if mat.determinant().is_zero() {
                    continue;
                }
                let y = solve_linear(&mat, &ivec_to_qvec(w))?.expect("nonsingular");
                if y.iter().any(Signed::is_negative) {
                    continue;
                }
                // l_y(t) = -sum_tau y_tau a_tau(t) + a_rho(t).
                let mut f = QVector::zero(r);
                for (i, b) in basis.iter().enumerate() {
                    let mut v = b[rho].clone();
                    for (k, &tau) in subset.iter().enumerate() {
                        v -= &y[k] * &b[tau];
                    }
                    f[i] = v;
                }
                fns.insert(f);
            }
            functionals_per_ray.push(fns.into_iter().collect());
        }

        // Hyperplane arrangement: slice the support cone along every
        // pairwise difference of candidate functionals.
        let mut cells: Vec<Vec<IVec>> = vec![support_facets.clone()];
        for fns in &functionals_per_ray {
            for i in 0..fns.len() {
                for j in (i + 1)..fns.len() {
                    let diff = fns[i].sub(&fns[j]);
                    if diff.is_zero() {
                        continue;
                    }
                    let h = primitive_from_rational(&diff);
                    let neg: IVec = h.iter().map(|x| -x.clone()).collect();
                    let mut next = Vec::new();
                    for cell in &cells {
                        for side in [&h, &neg] {
                            let mut refined = cell.clone();
                            refined.push(side.clone());
                            if cell_has_interior(r, &refined) {
                                next.push(refined);
                            }
                        }
                    }
                    cells = next;
                }
            }
        }

        // Identify the active functional per cell and per ray.
        let mut chambers = Vec::new();
        for cell in &cells {
            let interior = cell_interior_point(r, cell)?;
            let divisor = self.divisor_from_coordinates(basis, &interior);
            if !self.is_big(&divisor) {
                // Cells on the boundary of the big cone (measure-zero
                // slivers) are skipped; the support equals Eff up to them.
                continue;
            }
            let mut per_ray = Vec::new();
            for (rho, fns) in functionals_per_ray.iter().enumerate() {
                let mut best: Option<(&QVector, Rat)> = None;
                for f in fns {
                    let v = f.dot(&interior);
                    match &best {
                        None => best = Some((f, v)),
                        Some((_, bv)) => {
                            if v > *bv {
                                best = Some((f, v));
                            }
                        }
                    }
                }
                let (f, value) = best.expect("at least one dual vertex");
                // Cross-check against the exact order at the sample point.
                let exact = self.asym_order(&divisor, &self.rays[rho])?;
                if exact != value {
                    return Err(Error::ModelInvariant {
                        reason: format!("chamber functional mismatch on ray {rho}"),
                    });
                }
                per_ray.push(f.clone());
            }
            let rays = rays_from_halfspaces(r, cell)?;
            chambers.push(ChamberCell {
                cone: Cone::new(r, rays),
                halfspaces: cell.clone(),
                ord_functionals: per_ray,
            });
        }
        // Merge adjacent sectors with identical data in the plane case.
        let chambers = if r == 2 {
            merge_plane_cells(chambers)
        } else {
            chambers
        };

        let fan = Fan::new(
            r,
            chambers.iter().map(|c| c.cone.clone()).collect(),
        );
        // Package one piecewise-linear function per ray; construction
        // re-checks continuity across shared rays.
        let mut per_ray_fns = Vec::new();
        for rho in 0..self.rays.len() {
            let pl = PiecewiseLinear::new(
                fan.clone(),
                chambers
                    .iter()
                    .map(|c| c.ord_functionals[rho].clone())
                    .collect(),
            )?;
            per_ray_fns.push((self.ray_labels[rho].clone(), pl));
        }
        Ok(ChamberFan {
            support,
            chambers,
            order_functions: per_ray_fns,
        })
    }

    /// Class coordinates of a ray divisor in the given basis.
    fn class_coordinates_of_ray_divisor(
        &self,
        basis: &[ToricDivisor],
        rho: usize,
    ) -> Result<QVector> {
        let r = basis.len();
        let m = self.rays.len();
        let n = self.dim;
        // Solve sum_i t_i basis_i[tau] - <u, v_tau> = delta_{tau, rho}.
        let mut rows = Vec::new();
        let mut rhs = QVector::zero(m);
        for tau in 0..m {
            let mut row = QVector::zero(r + n);
            for (i, b) in basis.iter().enumerate() {
                row[i] = b[tau].clone();
            }
            for k in 0..n {
                row[r + k] = -Rat::from_integer(self.rays[tau][k].clone());
            }
            rows.push(row);
            rhs[tau] = if tau == rho { Rat::one() } else { Rat::zero() };
        }
        let solution = solve_linear(&QMatrix::from_rows(rows), &rhs)?.ok_or_else(|| {
            Error::ModelInvariant {
                reason: "basis classes do not span the class lattice".into(),
            }
        })?;
        Ok(QVector(solution.0[..r].to_vec()))
    }

    pub fn divisor_from_coordinates(&self, basis: &[ToricDivisor], t: &QVector) -> ToricDivisor {
        let mut d = QVector::zero(self.rays.len());
        for (i, b) in basis.iter().enumerate() {
            d = d.add(&b.scale(&t[i]));
        }
        d
    }
}

fn cell_has_interior(dim: usize, halfspaces: &[IVec]) -> bool {
    let cons: Vec<Constraint> = halfspaces
        .iter()
        .map(|n| Constraint::ge(ivec_to_qvec(n), Rat::one()))
        .collect();
    lp::is_feasible(dim, &cons)
}

fn cell_interior_point(dim: usize, halfspaces: &[IVec]) -> Result<QVector> {
    let cons: Vec<Constraint> = halfspaces
        .iter()
        .map(|n| Constraint::ge(ivec_to_qvec(n), Rat::one()))
        .collect();
    match lp::minimize(&QVector::zero(dim), &cons) {
        LpOutcome::Optimal { point, .. } => Ok(point),
        _ => Err(Error::EmptyPolyhedron),
    }
}

/// Merges adjacent plane sectors carrying identical functional tuples.
fn merge_plane_cells(cells: Vec<ChamberCell>) -> Vec<ChamberCell> {
    let mut cells = cells;
    loop {
        let mut merged = false;
        'outer: for i in 0..cells.len() {
            for j in (i + 1)..cells.len() {
                if cells[i].ord_functionals != cells[j].ord_functionals {
                    continue;
                }
                // Adjacent sectors share an extreme ray.
                let shared: Vec<IVec> = cells[i]
                    .cone
                    .generators()
                    .iter()
                    .filter(|g| cells[j].cone.generators().contains(g))
                    .cloned()
                    .collect();
                if shared.is_empty() {
                    continue;
                }
                let mut gens = cells[i].cone.generators().to_vec();
                gens.extend(cells[j].cone.generators().iter().cloned());
                let union = Cone::new(2, gens);
                if !union.is_strongly_convex() {
                    continue;
                }
                // The union of two adjacent sectors is the cone on the
                // outer rays; rebuild its halfspace list.
                let (_, facets) = union.halfspace_description();
                let extremes = rays_from_halfspaces(2, &facets).unwrap_or_default();
                let funcs = cells[i].ord_functionals.clone();
                let replacement = ChamberCell {
                    cone: Cone::new(2, extremes),
                    halfspaces: facets,
                    ord_functionals: funcs,
                };
                let keep_j = j;
                cells.swap_remove(keep_j);
                cells[i] = replacement;
                merged = true;
                break 'outer;
            }
        }
        if !merged {
            let mut out = cells;
            out.sort_by(|a, b| a.cone.generators().cmp(b.cone.generators()));
            return out;
        }
    }
}

/// The three base loci of a class with the inclusion chain already checked.
#[derive(Clone, Debug)]
pub struct BaseLociReport {
    pub restricted: Vec<String>,
    pub stable: Vec<String>,
    pub augmented: Vec<String>,
    pub restricted_sets: BTreeSet<Vec<usize>>,
    pub stable_sets: BTreeSet<Vec<usize>>,
    pub augmented_sets: BTreeSet<Vec<usize>>,
}

/// One maximal cone of a chamber fan with the active order functionals.
#[derive(Clone, Debug)]
pub struct ChamberCell {
    pub cone: Cone,
    pub halfspaces: Vec<IVec>,
    /// Linear functional of the class coordinates, one per model ray.
    pub ord_functionals: Vec<QVector>,
}

#[derive(Clone, Debug)]
pub struct ChamberFan {
    pub support: Cone,
    pub chambers: Vec<ChamberCell>,
    /// Piecewise-linear asymptotic order per ray label.
    pub order_functions: Vec<(String, PiecewiseLinear)>,
}

/// Keeps the minimal sets of an upward-closed family.
fn minimal_sets(flagged: BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    flagged
        .iter()
        .filter(|s| {
            !flagged.iter().any(|t| {
                *t != **s && t.iter().all(|i| s.contains(i))
            })
        })
        .cloned()
        .collect()
}

/// Containment of the unions of orbit closures: every component of `inner`
/// must contain some component cone of `outer` as a subset of rays.
fn locus_contained(inner: &BTreeSet<Vec<usize>>, outer: &BTreeSet<Vec<usize>>) -> bool {
    inner.iter().all(|sigma| {
        outer
            .iter()
            .any(|tau| tau.iter().all(|i| sigma.contains(i)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    /// The projective plane: rays (1,0), (0,1), (-1,-1).
    pub fn plane() -> ToricModel {
        ToricModel::new(
            2,
            vec![
                crate::linalg::ivec(&[1, 0]),
                crate::linalg::ivec(&[0, 1]),
                crate::linalg::ivec(&[-1, -1]),
            ],
            vec!["Dx".into(), "Dy".into(), "Dz".into()],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            BTreeMap::new(),
            vec![("H".into(), QVector::from_ints(&[0, 0, 1]))],
        )
        .unwrap()
    }

    /// Blow-up of the plane at the two torus-fixed points on the line Dy:
    /// rays Dx=(1,0), l=(0,1), Dz=(-1,-1), E1=(1,1), E2=(-1,0).
    pub fn blowup2() -> ToricModel {
        let mut cone_labels = BTreeMap::new();
        cone_labels.insert(vec![1usize], "l".to_string());
        ToricModel::new(
            2,
            vec![
                crate::linalg::ivec(&[1, 0]),
                crate::linalg::ivec(&[0, 1]),
                crate::linalg::ivec(&[-1, -1]),
                crate::linalg::ivec(&[1, 1]),
                crate::linalg::ivec(&[-1, 0]),
            ],
            vec!["Dx".into(), "l".into(), "Dz".into(), "E1".into(), "E2".into()],
            vec![
                vec![0, 3],
                vec![3, 1],
                vec![1, 4],
                vec![4, 2],
                vec![2, 0],
            ],
            cone_labels,
            // Classes H, E1, E2 as ray-coefficient representatives:
            // H = [D_z + D_{E2}]... a representative with a_z = 1, else  0
            // realizes H - E2 + E2 = H; we use H = D_z + D_{E2}? No:
            // [D_z] = H - E2, so H = [D_z] + [D_{E2}].
            vec![
                ("H".into(), QVector::from_ints(&[0, 0, 1, 0, 1])),
                ("E1".into(), QVector::from_ints(&[0, 0, 0, 1, 0])),
                ("E2".into(), QVector::from_ints(&[0, 0, 0, 0, 1])),
            ],
        )
        .unwrap()
    }

    /// Divisor with class alpha*H - beta1*E1 - beta2*E2.
    pub fn blowup2_divisor(m: &ToricModel, a: i64, b1: i64, b2: i64) -> ToricDivisor {
        m.divisor_from_class(&QVector::from_ints(&[a, -b1, -b2]))
            .unwrap()
    }

    #[test]
    fn plane_section_polytopes() {
        let m = plane();
        let d = m
            .divisor_from_class(&QVector::from_ints(&[2]))
            .unwrap();
        let p = m.section_polytope(&d);
        assert_eq!(p.lattice_points().unwrap().len(), 6);
        assert_eq!(m.volume(&d).unwrap(), rat_int(4));
        // Zero divisor: the origin only.
        let zero = QVector::zero(3);
        let pz = m.section_polytope(&zero);
        assert_eq!(pz.lattice_points().unwrap(), vec![crate::linalg::ivec(&[0, 0])]);
    }

    #[test]
    fn plane_orders_vanish() {
        let m = plane();
        let d = m.divisor_from_class(&QVector::from_ints(&[2])).unwrap();
        for rho in 0..3 {
            assert_eq!(
                m.base_order_along(&d, &[rho]).unwrap(),
                Some(rat_int(0))
            );
            assert_eq!(m.asym_order(&d, &m.rays()[rho].clone()).unwrap(), rat_int(0));
        }
        assert!(m.is_ample(&d));
        assert_eq!(m.volume(&QVector::from_ints(&[0, 0, 3])).unwrap(), rat_int(9));
    }

    #[test]
    fn empty_system_reports_infinity() {
        let m = plane();
        // -H has no sections.
        let d = m.divisor_from_class(&QVector::from_ints(&[-1])).unwrap();
        assert_eq!(m.base_order_along(&d, &[0]).unwrap(), None);
    }

    #[test]
    fn blowup2_chamber5_orders() {
        let m = blowup2();
        let l = blowup2_divisor(&m, 3, 2, 2);
        // Along the strict transform l of the line through the two points.
        let lray = m.ray_index("l").unwrap();
        assert_eq!(
            m.base_order_along(&l, &[lray]).unwrap(),
            Some(rat_int(1))
        );
        assert_eq!(m.asym_order_along(&l, &[lray]).unwrap(), rat_int(1));
        assert_eq!(
            m.asym_order_via_effective_lp(&l, lray).unwrap(),
            rat_int(1)
        );
        assert_eq!(
            m.asym_order_via_graded_limit(&l, &[lray]).unwrap(),
            rat_int(1)
        );
        assert_eq!(m.stable_base_locus(&l).unwrap(), vec!["l".to_string()]);
        // Arnold and Samuel data: codimension 1, both equal the order.
        assert_eq!(m.arnold_asym(&l, &[lray]).unwrap(), rat_int(1));
        let (e, root) = m.samuel_asym(&l, &[lray]).unwrap();
        assert_eq!(e, rat_int(1));
        assert_eq!(root, Some(rat_int(1)));
    }

    #[test]
    fn blowup2_chamber1_orders() {
        let m = blowup2();
        // alpha=2, beta1=-1, beta2=1: B = E1, ord_{E1} = 1.
        let l = blowup2_divisor(&m, 2, -1, 1);
        let e1 = m.ray_index("E1").unwrap();
        assert_eq!(m.asym_order_along(&l, &[e1]).unwrap(), rat_int(1));
        assert_eq!(m.stable_base_locus(&l).unwrap(), vec!["E1".to_string()]);
        assert_eq!(m.asym_order_via_effective_lp(&l, e1).unwrap(), rat_int(1));
    }

    #[test]
    fn ample_classes_have_empty_loci() {
        let m = blowup2();
        let ample = blowup2_divisor(&m, 3, 1, 1);
        assert!(m.is_ample(&ample));
        let report = m.base_loci(&ample).unwrap();
        assert!(report.restricted.is_empty());
        assert!(report.stable.is_empty());
        assert!(report.augmented.is_empty());
        // Volume 9 - 1 - 1 = 7.
        assert_eq!(m.volume(&ample).unwrap(), rat_int(7));
    }

    #[test]
    fn unstable_boundary_class() {
        let m = blowup2();
        // alpha = beta1 + beta2: nef boundary between chambers 4 and 5.
        let l = blowup2_divisor(&m, 4, 2, 2);
        let report = m.base_loci(&l).unwrap();
        assert!(report.restricted.is_empty());
        assert_eq!(report.augmented, vec!["l".to_string()]);
    }

    #[test]
    fn perturbation_and_order_routes_agree() {
        let m = blowup2();
        for (a, b1, b2) in [(3, 2, 2), (2, -1, 1), (3, 1, 1), (5, 2, 2), (4, 3, 2)] {
            let l = blowup2_divisor(&m, a, b1, b2);
            if !m.is_big(&l) {
                continue;
            }
            let by_orders = m.restricted_base_locus_sets(&l).unwrap();
            let by_perturbation = m.restricted_base_locus_by_perturbation(&l).unwrap();
            assert_eq!(by_orders, by_perturbation, "class ({a},{b1},{b2})");
        }
    }

    #[test]
    fn volume_in_chamber5_matches_zariski_square() {
        let m = blowup2();
        let l = blowup2_divisor(&m, 3, 2, 2);
        // P = (2a-b1-b2) H - (a-b2) E1 - (a-b1) E2 = 2H - E1 - E2 at (3,2,2);
        // P^2 = 4 - 1 - 1 = 2.
        assert_eq!(m.volume(&l).unwrap(), rat_int(2));
        // Non-big classes have volume zero.
        let notbig = blowup2_divisor(&m, 1, 2, 0);
        assert_eq!(m.volume(&notbig).unwrap(), rat_int(0));
        assert!(!m.is_big(&notbig));
    }

    #[test]
    fn fractional_classes_work() {
        let m = blowup2();
        let t = QVector(vec![rat(5, 2), rat(-3, 2), rat(-1, 2)]);
        let l = m.divisor_from_class(&t).unwrap();
        assert!(m.is_big(&l));
        let lray = m.ray_index("l").unwrap();
        // beta1 + beta2 - alpha = 3/2 + 1/2 - 5/2 < 0: l not in the locus.
        assert_eq!(m.asym_order_along(&l, &[lray]).unwrap(), rat_int(0));
        let report = m.base_loci(&l).unwrap();
        assert!(report.stable.is_empty());
        assert!(m.is_nef(&l));
    }

    #[test]
    fn subadditivity_of_finite_orders() {
        let m = blowup2();
        let l = blowup2_divisor(&m, 3, 2, 2);
        let lray = m.ray_index("l").unwrap();
        let order = |p: i64| {
            m.base_order_along(&l.scale(&rat_int(p)), &[lray])
                .unwrap()
                .unwrap()
        };
        let mut values = Vec::new();
        for p in 1..=20i64 {
            values.push(order(p));
        }
        for p in 1..=19usize {
            for q in 1..=(20 - p) {
                assert!(
                    values[p + q - 1] <= &values[p - 1] + &values[q - 1],
                    "subadditivity fails at ({p},{q})"
                );
            }
        }
        // Limit-infimum: p * asym <= finite order at level p.
        let asym = m.asym_order_along(&l, &[lray]).unwrap();
        for p in 1..=20i64 {
            assert!(rat_int(p) * &asym <= values[p as usize - 1]);
        }
    }

    #[test]
    fn chamber_fan_of_blowup2_plane() {
        let m = blowup2();
        let basis: Vec<ToricDivisor> = (0..3)
            .map(|i| {
                let mut t = QVector::zero(3);
                t[i] = Rat::one();
                m.divisor_from_class(&t).unwrap()
            })
            .collect();
        let cf = m.chamber_fan(&basis).unwrap();
        assert!(!cf.chambers.is_empty());
        // Linearity: sampled interior points match the functional exactly.
        for cell in &cf.chambers {
            let mut sample = QVector::zero(3);
            for g in cell.cone.generators() {
                sample = sample.add(&ivec_to_qvec(g));
            }
            let d = m.divisor_from_coordinates(&basis, &sample);
            if !m.is_big(&d) {
                continue;
            }
            for (rho, f) in cell.ord_functionals.iter().enumerate() {
                let expected = m.asym_order(&d, &m.rays()[rho].clone()).unwrap();
                assert_eq!(f.dot(&sample), expected, "ray {rho} at {sample:?}");
            }
        }
    }

    #[test]
    fn base_ideal_extraction() {
        let m = blowup2();
        let l = blowup2_divisor(&m, 3, 2, 2);
        let lray = m.ray_index("l").unwrap();
        let ideal = m.base_ideal_along(&l, &[lray]).unwrap();
        assert_eq!(ideal.generators(), &[vec![1]]);
        let e1 = m.ray_index("E1").unwrap();
        let pair = m.base_ideal_along(&l, &[lray, e1]).unwrap();
        assert!(!pair.is_zero());
    }

    #[test]
    fn model_validation_rejects_bad_fans() {
        // Missing cone: not complete.
        assert!(ToricModel::new(
            2,
            vec![
                crate::linalg::ivec(&[1, 0]),
                crate::linalg::ivec(&[0, 1]),
                crate::linalg::ivec(&[-1, -1]),
            ],
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![1, 2]],
            BTreeMap::new(),
            vec![],
        )
        .is_err());
        // Non-unimodular cone.
        assert!(ToricModel::new(
            2,
            vec![crate::linalg::ivec(&[1, 0]), crate::linalg::ivec(&[1, 2]),
                 crate::linalg::ivec(&[-1, -1])],
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            BTreeMap::new(),
            vec![],
        )
        .is_err());
    }
}
