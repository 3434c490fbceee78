//! Semigroup-graded systems of monomial ideals: finite-generation
//! bookkeeping, the products-of-powers identity up to integral closure, and
//! the search for a smooth fan and a level d on which degree-d snapshots
//! generate everything in bounded degree.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::cone::{rays_from_halfspaces, Cone};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{dot_int, primitive, IVec, QVector};
use crate::lp::{self, Constraint, LpOutcome};
use crate::monomial::MonomialIdeal;
use crate::rational::{Int, Rat};

#[derive(Clone, Debug)]
pub struct ReesGenerator {
    pub degree: IVec,
    pub exponent: Vec<u64>,
}

#[derive(Clone, Debug)]
pub enum Presentation {
    /// Generators of the Rees algebra: the ideal in degree m is generated
    /// by all products of generators whose degrees sum to m.
    Rees(Vec<ReesGenerator>),
    /// Explicit degree -> generator table, used by test fixtures.
    Table(BTreeMap<IVec, Vec<Vec<u64>>>),
}

#[derive(Clone, Debug)]
pub struct GradedMonomialSystem {
    rank: usize,
    vars: usize,
    semigroup: Cone,
    presentation: Presentation,
}

impl GradedMonomialSystem {
    pub fn new(
        rank: usize,
        vars: usize,
        semigroup: Cone,
        presentation: Presentation,
    ) -> Result<Self> {
        if semigroup.dim() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                got: semigroup.dim(),
            });
        }
        if !semigroup.is_strongly_convex() {
            return Err(Error::NotStronglyConvex);
        }
        if let Presentation::Rees(gens) = &presentation {
            for g in gens {
                if g.degree.len() != rank || g.exponent.len() != vars {
                    return Err(Error::ModelInvariant {
                        reason: "Rees generator dimension mismatch".into(),
                    });
                }
                if !semigroup.contains_int(&g.degree) {
                    return Err(Error::ModelInvariant {
                        reason: format!("Rees degree {:?} outside the semigroup", g.degree),
                    });
                }
                if g.degree.iter().all(Zero::is_zero) {
                    return Err(Error::ModelInvariant {
                        reason: "Rees generator in degree zero".into(),
                    });
                }
            }
        }
        Ok(GradedMonomialSystem {
            rank,
            vars,
            semigroup,
            presentation,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn semigroup(&self) -> &Cone {
        &self.semigroup
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// The ideal in a given degree. Degree zero is the unit ideal; degrees
    /// in the semigroup without any generating combination give the zero
    /// ideal; degrees missing from a table presentation are an error.
    pub fn ideal_at(&self, degree: &IVec) -> Result<MonomialIdeal> {
        if degree.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: degree.len(),
            });
        }
        if degree.iter().all(Zero::is_zero) {
            return Ok(MonomialIdeal::unit(self.vars));
        }
        if !self.semigroup.contains_int(degree) {
            return Err(Error::MissingDegree {
                degree: degree.iter().map(small).collect(),
            });
        }
        match &self.presentation {
            Presentation::Table(table) => table
                .get(degree)
                .map(|gens| MonomialIdeal::new(self.vars, gens.clone()))
                .ok_or_else(|| Error::MissingDegree {
                    degree: degree.iter().map(small).collect(),
                }),
            Presentation::Rees(gens) => {
                let degrees: Vec<IVec> = gens.iter().map(|g| g.degree.clone()).collect();
                let mut exponents = Vec::new();
                for combo in nat_combinations(&degrees, degree)? {
                    let mut e = vec![0u64; self.vars];
                    for (count, g) in combo.iter().zip(gens) {
                        for (k, &x) in g.exponent.iter().enumerate() {
                            e[k] += count * x;
                        }
                    }
                    exponents.push(e);
                }
                Ok(if exponents.is_empty() {
                    MonomialIdeal::zero(self.vars)
                } else {
                    MonomialIdeal::new(self.vars, exponents)
                })
            }
        }
    }

    /// Checks the graded-system containment on sample degree pairs; returns
    /// the first violating pair.
    pub fn check_graded(&self, samples: &[(IVec, IVec)]) -> Result<Option<(IVec, IVec)>> {
        for (m1, m2) in samples {
            let a = self.ideal_at(m1)?;
            let b = self.ideal_at(m2)?;
            let sum: IVec = m1.iter().zip(m2).map(|(x, y)| x + y).collect();
            let target = self.ideal_at(&sum)?;
            let product = a.product(&b);
            if product
                .generators()
                .iter()
                .any(|g| !target.contains(g))
            {
                return Ok(Some((m1.clone(), m2.clone())));
            }
        }
        Ok(None)
    }

    /// Bounded-degree verification of the products-of-powers identity on a
    /// cone: for all weights p with 1 <= |p| <= bound, the ideal in degree
    /// d * sum p_i e_i must contain the product of the d*e_i-th ideals (the
    /// graded inclusion) and agree with it up to integral closure.
    pub fn verify_product_identity(
        &self,
        d: u64,
        sigma: &Cone,
        bound: u64,
    ) -> Result<IdentityCheck> {
        let basis = sigma.hilbert_basis()?;
        if basis.is_empty() {
            return Ok(IdentityCheck::default());
        }
        let dd = Int::from(d);
        let snapshots: Vec<MonomialIdeal> = basis
            .iter()
            .map(|e| {
                let deg: IVec = e.iter().map(|x| x * &dd).collect();
                self.ideal_at(&deg)
            })
            .collect::<Result<_>>()?;
        let mut check = IdentityCheck::default();
        for p in weight_vectors(basis.len(), bound) {
            let mut degree = vec![Int::zero(); self.rank];
            for (k, e) in basis.iter().enumerate() {
                for (i, x) in e.iter().enumerate() {
                    degree[i] += x * &dd * Int::from(p[k]);
                }
            }
            let target = self.ideal_at(&degree)?;
            let mut product = MonomialIdeal::unit(self.vars);
            for (k, snap) in snapshots.iter().enumerate() {
                if p[k] > 0 {
                    product = product.product(&snap.pow(p[k]));
                }
            }
            let small_degree: Vec<i64> = degree.iter().map(small).collect();
            if check.inclusion_witness.is_none()
                && product
                    .generators()
                    .iter()
                    .any(|g| !target.contains(g))
            {
                check.inclusion_witness = Some(small_degree.clone());
            }
            if check.equality_witness.is_none()
                && target.newton_closure() != product.newton_closure()
            {
                check.equality_witness = Some(small_degree);
            }
            if check.inclusion_witness.is_some() && check.equality_witness.is_some() {
                break;
            }
        }
        Ok(check)
    }

    /// Constructs a smooth fan supported on the semigroup cone that has
    /// every Rees-generator degree on a ray, then searches for the least
    /// level d (trying divisors of the structural lcm first) making the
    /// closure identity hold on every maximal cone up to the degree bound.
    pub fn find_refinement_and_d(&self, degree_bound: u64) -> Result<RefinementOutcome> {
        if self.rank > 3 {
            return Err(Error::DimensionCap {
                cap: 3,
                got: self.rank,
            });
        }
        let fan = self.build_fan()?.smooth_refine()?;
        let candidates = self.level_candidates(&fan)?;
        let mut last_witness = None;
        for d in candidates {
            let mut all_hold = true;
            for cone in fan.maximal_cones() {
                let check = self.verify_product_identity(d, cone, degree_bound)?;
                if let Some(w) = check.inclusion_witness.clone() {
                    return Err(Error::VerificationBound { witness: w });
                }
                if let Some(w) = check.equality_witness {
                    last_witness = Some(w);
                    all_hold = false;
                    break;
                }
            }
            if all_hold {
                return Ok(RefinementOutcome {
                    fan,
                    level: d,
                    degree_bound,
                });
            }
        }
        Err(Error::VerificationBound {
            witness: last_witness.unwrap_or_default(),
        })
    }

    /// Fan on the semigroup cone whose rays include every Rees degree.
    fn build_fan(&self) -> Result<Fan> {
        let forced: Vec<IVec> = match &self.presentation {
            Presentation::Rees(gens) => gens.iter().map(|g| primitive(&g.degree)).collect(),
            Presentation::Table(table) => table
                .keys()
                .filter(|k| k.iter().any(|x| !x.is_zero()))
                .map(|k| primitive(k))
                .collect(),
        };
        match self.rank {
            0 => Ok(Fan::new(0, vec![])),
            1 => Ok(Fan::new(1, vec![self.semigroup.clone()])),
            2 => {
                let (_, facets) = self.semigroup.halfspace_description();
                let boundary = rays_from_halfspaces(2, &facets)?;
                let mut rays: Vec<IVec> = boundary;
                for f in forced {
                    if !rays.contains(&f) {
                        rays.push(f);
                    }
                }
                if rays.len() == 1 {
                    return Ok(Fan::new(2, vec![Cone::new(2, rays)]));
                }
                // Counterclockwise order; total inside a strongly convex
                // plane cone because every angular gap is below a half turn.
                rays.sort_by(|a, b| {
                    let cross = &a[0] * &b[1] - &a[1] * &b[0];
                    if cross.is_positive() {
                        Ordering::Less
                    } else if cross.is_negative() {
                        Ordering::Greater
                    } else {
                        Ordering::Equal
                    }
                });
                let cones = rays
                    .windows(2)
                    .map(|w| Cone::new(2, vec![w[0].clone(), w[1].clone()]))
                    .collect();
                Ok(Fan::new(2, cones))
            }
            _ => {
                let mut fan = Fan::new(3, vec![self.semigroup.clone()]).smooth_refine()?;
                for f in forced {
                    fan = fan.stellar_subdivide(&f);
                }
                Ok(fan)
            }
        }
    }

    /// Candidate levels: divisors of the lcm of the one-dimensional periods
    /// along the fan's boundary rays and of the subsemigroup multiple bound,
    /// then multiples of that lcm.
    fn level_candidates(&self, fan: &Fan) -> Result<Vec<u64>> {
        let mut l: u64 = multiple_in_subsemigroup_bound(&self.semigroup)?;
        if let Presentation::Rees(gens) = &self.presentation {
            for ray in fan.rays() {
                // Degrees on the ray give an N-graded subsystem.
                let mut on_ray = Vec::new();
                for g in gens {
                    if let Some(k) = ray_multiple(&ray, &g.degree) {
                        on_ray.push(k);
                    }
                }
                if !on_ray.is_empty() {
                    let period = dim_one_period(&on_ray, 64)?;
                    l = num_integer::lcm(l, period);
                }
            }
        }
        let mut out: Vec<u64> = (1..=l).filter(|d| l % d == 0).collect();
        for k in 2..=8u64 {
            out.push(l * k);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default)]
pub struct IdentityCheck {
    pub inclusion_witness: Option<Vec<i64>>,
    pub equality_witness: Option<Vec<i64>>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.inclusion_witness.is_none() && self.equality_witness.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct RefinementOutcome {
    pub fan: Fan,
    pub level: u64,
    /// The identity is certified for weights up to this bound only.
    pub degree_bound: u64,
}

/// The least d such that d*m lies in the semigroup generated by the extreme
/// ray generators, simultaneously for every Hilbert basis element m.
pub fn multiple_in_subsemigroup_bound(cone: &Cone) -> Result<u64> {
    if cone.dim() > 3 {
        return Err(Error::DimensionCap {
            cap: 3,
            got: cone.dim(),
        });
    }
    let (_, facets) = cone.halfspace_description();
    let mut rays = rays_from_halfspaces(cone.dim(), &facets)?;
    if cone.rank() == 1 {
        rays = cone.generators().to_vec();
    }
    let basis = cone.hilbert_basis()?;
    let mut individual = Vec::new();
    for m in &basis {
        let mut found = None;
        for d in 1..=512u64 {
            let target: IVec = m.iter().map(|x| x * Int::from(d)).collect();
            if nat_combination_exists(&rays, &target)? {
                found = Some(d);
                break;
            }
        }
        individual.push(found.ok_or(Error::StabilizationLimit { limit: 512 })?);
    }
    let cap = individual.iter().fold(1u64, |acc, &d| num_integer::lcm(acc, d));
    'outer: for d in 1..=cap {
        for m in &basis {
            let target: IVec = m.iter().map(|x| x * Int::from(d)).collect();
            if !nat_combination_exists(&rays, &target)? {
                continue 'outer;
            }
        }
        return Ok(d);
    }
    Ok(cap)
}

/// The least d such that every multiset of generator degrees summing to d*m
/// splits into sub-multisets each summing to d, for all m with d*m bounded.
/// This is the free-algebra form of the one-dimensional period.
pub fn dim_one_period(degrees: &[u64], cap: u64) -> Result<u64> {
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::OutOfRange {
            reason: "degrees must be positive".into(),
        });
    }
    let lcm = degrees
        .iter()
        .fold(1u64, |acc, &d| num_integer::lcm(acc, d));
    for d in 1..=lcm.min(cap) {
        if period_works(degrees, d, lcm) {
            return Ok(d);
        }
    }
    if lcm <= cap && period_works(degrees, lcm, lcm) {
        return Ok(lcm);
    }
    Err(Error::VerificationBound {
        witness: vec![lcm as i64],
    })
}

fn period_works(degrees: &[u64], d: u64, lcm: u64) -> bool {
    // Count vectors of multisets summing to d: the admissible blocks.
    let blocks = multisets_with_sum(degrees, d);
    if blocks.is_empty() {
        return false;
    }
    // Check every multiset summing to d*m for m up to a bound that covers
    // at least two lcm periods.
    let max_sum = 2 * num_integer::lcm(d, lcm);
    let mut m = 1u64;
    while d * m <= max_sum {
        for multiset in multisets_with_sum(degrees, d * m) {
            if !decomposes_into_blocks(&multiset, &blocks) {
                return false;
            }
        }
        m += 1;
    }
    true
}

/// All count vectors c with sum_i c_i * degrees_i = total.
fn multisets_with_sum(degrees: &[u64], total: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut counts = vec![0u64; degrees.len()];
    fn rec(degrees: &[u64], idx: usize, remaining: u64, counts: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if idx == degrees.len() {
            if remaining == 0 {
                out.push(counts.clone());
            }
            return;
        }
        if idx + 1 == degrees.len() {
            if remaining % degrees[idx] == 0 {
                counts[idx] = remaining / degrees[idx];
                out.push(counts.clone());
                counts[idx] = 0;
            }
            return;
        }
        let mut c = 0u64;
        while c * degrees[idx] <= remaining {
            counts[idx] = c;
            rec(degrees, idx + 1, remaining - c * degrees[idx], counts, out);
            c += 1;
        }
        counts[idx] = 0;
    }
    rec(degrees, 0, total, &mut counts, &mut out);
    out
}

fn decomposes_into_blocks(multiset: &[u64], blocks: &[Vec<u64>]) -> bool {
    if multiset.iter().all(|&c| c == 0) {
        return true;
    }
    for b in blocks {
        if b.iter().zip(multiset).all(|(x, y)| x <= y) {
            let rest: Vec<u64> = multiset.iter().zip(b).map(|(y, x)| y - x).collect();
            if decomposes_into_blocks(&rest, blocks) {
                return true;
            }
        }
    }
    false
}

/// All weight vectors p in N^s with 1 <= |p| <= bound, lexicographic.
fn weight_vectors(s: usize, bound: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current = vec![0u64; s];
    fn rec(idx: usize, remaining: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if idx == current.len() {
            if current.iter().any(|&c| c > 0) {
                out.push(current.clone());
            }
            return;
        }
        for c in 0..=remaining {
            current[idx] = c;
            rec(idx + 1, remaining - c, current, out);
        }
        current[idx] = 0;
    }
    rec(0, bound, &mut current, &mut out);
    out
}

/// k with target = k * ray, if the degree lies on the ray.
fn ray_multiple(ray: &IVec, degree: &IVec) -> Option<u64> {
    let mut k: Option<Int> = None;
    for (r, d) in ray.iter().zip(degree) {
        if r.is_zero() {
            if !d.is_zero() {
                return None;
            }
            continue;
        }
        if (d % r).is_zero() {
            let q = d / r;
            if q.is_negative() {
                return None;
            }
            match &k {
                None => k = Some(q),
                Some(prev) if *prev == q => {}
                _ => return None,
            }
        } else {
            return None;
        }
    }
    k.and_then(|k| u64::try_from(k).ok()).filter(|&k| k > 0)
}

/// Whether target is a nonnegative integer combination of the generators.
pub fn nat_combination_exists(gens: &[IVec], target: &IVec) -> Result<bool> {
    Ok(!nat_combinations_impl(gens, target, true)?.is_empty())
}

/// All nonnegative integer combinations of the generators equal to target.
pub fn nat_combinations(gens: &[IVec], target: &IVec) -> Result<Vec<Vec<u64>>> {
    nat_combinations_impl(gens, target, false)
}

fn nat_combinations_impl(
    gens: &[IVec],
    target: &IVec,
    first_only: bool,
) -> Result<Vec<Vec<u64>>> {
    if gens.is_empty() {
        return Ok(if target.iter().all(Zero::is_zero) {
            vec![Vec::new()]
        } else {
            Vec::new()
        });
    }
    let dim = target.len();
    // A functional positive on all generators bounds the search.
    let cons: Vec<Constraint> = gens
        .iter()
        .map(|g| Constraint::ge(crate::linalg::ivec_to_qvec(g), Rat::one()))
        .collect();
    let grading: IVec = match lp::minimize(&QVector::zero(dim), &cons) {
        LpOutcome::Optimal { point, .. } => {
            let scale = crate::rational::denominator_lcm(point.iter());
            point.iter().map(|e| (e * &scale).to_integer()).collect()
        }
        _ => return Err(Error::NotStronglyConvex),
    };
    let mut out = Vec::new();
    let mut counts = vec![0u64; gens.len()];
    let weights: Vec<Int> = gens.iter().map(|g| dot_int(&grading, g)).collect();
    rec_combinations(
        gens,
        &weights,
        &grading,
        0,
        &mut target.clone(),
        &mut counts,
        &mut out,
        first_only,
    );
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn rec_combinations(
    gens: &[IVec],
    weights: &[Int],
    grading: &IVec,
    idx: usize,
    remaining: &mut IVec,
    counts: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
    first_only: bool,
) {
    if first_only && !out.is_empty() {
        return;
    }
    let budget = dot_int(grading, remaining);
    if budget.is_negative() {
        return;
    }
    if idx == gens.len() {
        if remaining.iter().all(Zero::is_zero) {
            out.push(counts.clone());
        }
        return;
    }
    let max_count = (&budget / &weights[idx]).max(Int::zero());
    let max_count = u64::try_from(max_count).unwrap_or(0);
    for c in 0..=max_count {
        if c > 0 {
            for (k, g) in gens[idx].iter().enumerate() {
                remaining[k] -= g;
            }
        }
        rec_combinations(gens, weights, grading, idx + 1, remaining, counts, out, first_only);
        counts[idx] = c + 1;
    }
    counts[idx] = 0;
    let total = Int::from(max_count);
    for (k, g) in gens[idx].iter().enumerate() {
        remaining[k] += g * &total;
    }
}

fn small(x: &Int) -> i64 {
    i64::try_from(x).unwrap_or(i64::MAX)
}
