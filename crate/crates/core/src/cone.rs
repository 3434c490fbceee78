//! Rational polyhedral cones given by primitive integer generators.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    dot_int, dot_int_rat, ivec_to_qvec, kernel_basis, primitive, primitive_from_rational, IVec,
    QMatrix, QVector,
};
use crate::lp::{self, Constraint, LpOutcome};
use crate::polyhedron::{combinations, HalfSpace, Polyhedron};
use crate::rational::{Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    generators: Vec<IVec>,
}

impl Cone {
    /// Builds a cone from integer generators. Generators are reduced to
    /// primitive vectors, deduplicated and sorted, so equal cones have
    /// equal representations.
    pub fn new(dim: usize, generators: Vec<IVec>) -> Self {
        let mut set: BTreeSet<IVec> = BTreeSet::new();
        for g in generators {
            assert_eq!(g.len(), dim, "generator dimension mismatch");
            let p = primitive(&g);
            if p.iter().any(|e| !e.is_zero()) {
                set.insert(p);
            }
        }
        Cone {
            dim,
            generators: set.into_iter().collect(),
        }
    }

    pub fn from_i64(dim: usize, generators: &[Vec<i64>]) -> Self {
        Self::new(
            dim,
            generators
                .iter()
                .map(|g| g.iter().map(|&e| Int::from(e)).collect())
                .collect(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        Cone {
            dim,
            generators: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[IVec] {
        &self.generators
    }

    /// Dimension of the linear span of the generators.
    pub fn rank(&self) -> usize {
        if self.generators.is_empty() {
            return 0;
        }
        QMatrix::from_rows(self.generators.iter().map(|g| ivec_to_qvec(g)).collect()).rank()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.rank() == self.dim
    }

    /// Exact membership test: x is a nonnegative combination of generators.
    pub fn contains(&self, x: &QVector) -> bool {
        assert_eq!(x.dim(), self.dim, "membership dimension mismatch");
        if x.is_zero() {
            return true;
        }
        if self.generators.is_empty() {
            return false;
        }
        let k = self.generators.len();
        let mut cons = Vec::with_capacity(self.dim + k);
        for row in 0..self.dim {
            let coeffs = QVector(
                self.generators
                    .iter()
                    .map(|g| Rat::from_integer(g[row].clone()))
                    .collect(),
            );
            cons.push(Constraint::eq(coeffs, x[row].clone()));
        }
        for i in 0..k {
            cons.push(Constraint::ge(QVector::unit(k, i), Rat::zero()));
        }
        lp::is_feasible(k, &cons)
    }

    pub fn contains_int(&self, x: &[Int]) -> bool {
        self.contains(&ivec_to_qvec(x))
    }

    /// Strict membership for full-dimensional cones: every facet inequality
    /// holds strictly.
    pub fn contains_in_interior(&self, x: &QVector) -> bool {
        if !self.is_full_dimensional() {
            return false;
        }
        self.contains(x)
            && self
                .facets()
                .iter()
                .all(|w| dot_int_rat(w, x).is_positive())
    }

    /// No nonzero v has both v and -v in the cone.
    pub fn is_strongly_convex(&self) -> bool {
        if self.generators.is_empty() {
            return true;
        }
        // max sum(lambda) s.t. sum lambda_i g_i = 0, 0 <= lambda <= 1;
        // a positive optimum exhibits a linear dependence with nonnegative
        // coefficients, i.e. a line through the cone.
        let k = self.generators.len();
        let mut cons = Vec::new();
        for row in 0..self.dim {
            let coeffs = QVector(
                self.generators
                    .iter()
                    .map(|g| Rat::from_integer(g[row].clone()))
                    .collect(),
            );
            cons.push(Constraint::eq(coeffs, Rat::zero()));
        }
        for i in 0..k {
            cons.push(Constraint::ge(QVector::unit(k, i), Rat::zero()));
            cons.push(Constraint::le(QVector::unit(k, i), Rat::one()));
        }
        let obj = QVector(vec![-Rat::one(); k]);
        match lp::minimize(&obj, &cons) {
            LpOutcome::Optimal { value, .. } => value.is_zero(),
            _ => false,
        }
    }

    /// Inward facet normals of a full-dimensional cone, primitive and sorted.
    pub fn facets(&self) -> Vec<IVec> {
        let (_, facets) = self.halfspace_description();
        facets
    }

    /// Writes the cone as `{ x : E x = 0, F x >= 0 }`; the first component
    /// holds the equality normals (a basis of the orthogonal complement of
    /// the span), the second the inward facet normals inside the span.
    pub fn halfspace_description(&self) -> (Vec<IVec>, Vec<IVec>) {
        if self.generators.is_empty() {
            // The zero cone: x = 0.
            let eqs = (0..self.dim)
                .map(|i| {
                    let mut e = vec![Int::zero(); self.dim];
                    e[i] = Int::one();
                    e
                })
                .collect();
            return (eqs, Vec::new());
        }
        let gen_matrix =
            QMatrix::from_rows(self.generators.iter().map(|g| ivec_to_qvec(g)).collect());
        let equalities: Vec<IVec> = kernel_basis(&gen_matrix)
            .iter()
            .map(primitive_from_rational)
            .collect();
        let r = self.dim - equalities.len();

        // Facet normals live in the span and vanish on rank r-1 subsets.
        let mut span_rows: Vec<QVector> = Vec::new();
        let mut facet_set: BTreeSet<IVec> = BTreeSet::new();
        let span_basis: Vec<QVector> = {
            // Independent subset of generators spanning the cone.
            let mut rows: Vec<QVector> = Vec::new();
            for g in &self.generators {
                let mut trial = rows.clone();
                trial.push(ivec_to_qvec(g));
                if QMatrix::from_rows(trial.clone()).rank() > rows.len() {
                    rows = trial;
                }
            }
            rows
        };
        span_rows.extend(span_basis.iter().cloned());
        if r == 0 {
            return (equalities, Vec::new());
        }
        if r == 1 {
            // Single ray: the inequality <g, x> >= 0 cuts the ray out of
            // its span.
            let g = &self.generators[0];
            facet_set.insert(primitive(g));
            return (equalities, facet_set.into_iter().collect());
        }
        for subset in combinations(self.generators.len(), r - 1) {
            // Solve for w in span with <w, g_j> = 0 on the subset.
            // Parameterize w = sum t_i b_i over the span basis.
            let rows: Vec<QVector> = subset
                .iter()
                .map(|&j| {
                    QVector(
                        span_rows
                            .iter()
                            .map(|b| dot_int_rat(&self.generators[j], b))
                            .collect(),
                    )
                })
                .collect();
            let mat = QMatrix::from_rows(rows);
            let kernel = kernel_basis(&mat);
            if kernel.len() != 1 {
                continue;
            }
            let t = &kernel[0];
            let mut w = QVector::zero(self.dim);
            for (i, b) in span_rows.iter().enumerate() {
                w = w.add(&b.scale(&t[i]));
            }
            let wp = primitive_from_rational(&w);
            let mut pos = false;
            let mut neg = false;
            for g in &self.generators {
                let d = dot_int(&wp, g);
                if d.is_positive() {
                    pos = true;
                } else if d.is_negative() {
                    neg = true;
                }
            }
            if pos && !neg {
                facet_set.insert(wp);
            } else if neg && !pos {
                facet_set.insert(wp.iter().map(|e| -e.clone()).collect());
            }
        }
        (equalities, facet_set.into_iter().collect())
    }

    /// The cone as a homogeneous polyhedron (offsets zero).
    pub fn to_polyhedron(&self) -> Polyhedron {
        let (eqs, facets) = self.halfspace_description();
        let mut hs = Vec::new();
        for e in eqs {
            hs.push(HalfSpace::new(e.iter().map(|x| -x.clone()).collect(), Rat::zero()));
            hs.push(HalfSpace::new(e, Rat::zero()));
        }
        for f in facets {
            hs.push(HalfSpace::new(f, Rat::zero()));
        }
        Polyhedron::new(self.dim, hs)
    }

    /// The unique minimal generating set of the semigroup `cone ∩ Z^n`,
    /// in lexicographic order.
    pub fn hilbert_basis(&self) -> Result<Vec<IVec>> {
        if self.dim > 4 {
            return Err(Error::DimensionCap {
                cap: 4,
                got: self.dim,
            });
        }
        if !self.is_strongly_convex() {
            return Err(Error::NotStronglyConvex);
        }
        if self.generators.is_empty() {
            return Ok(Vec::new());
        }
        // A grading that is positive on every generator.
        let grading = self.positive_grading()?;
        let budget: Int = self
            .generators
            .iter()
            .map(|g| dot_int(&grading, g))
            .sum();
        // Every element of the fundamental zonotope sum t_i g_i, t in [0,1],
        // has grading at most `budget`, and those lattice points generate.
        let (eqs, facets) = self.halfspace_description();
        let mut hs = Vec::new();
        for e in &eqs {
            hs.push(HalfSpace::new(e.iter().map(|x| -x.clone()).collect(), Rat::zero()));
            hs.push(HalfSpace::new(e.clone(), Rat::zero()));
        }
        for f in &facets {
            hs.push(HalfSpace::new(f.clone(), Rat::zero()));
        }
        hs.push(HalfSpace::new(
            grading.iter().map(|x| -x.clone()).collect(),
            Rat::from_integer(-budget.clone()),
        ));
        let candidates = Polyhedron::new(self.dim, hs).lattice_points()?;
        let nonzero: Vec<IVec> = candidates
            .into_iter()
            .filter(|p| p.iter().any(|e| !e.is_zero()))
            .collect();
        let lookup: BTreeSet<IVec> = nonzero.iter().cloned().collect();
        let mut basis: Vec<IVec> = Vec::new();
        for x in &nonzero {
            let deg_x = dot_int(&grading, x);
            let reducible = nonzero.iter().any(|a| {
                if dot_int(&grading, a) >= deg_x {
                    return false;
                }
                let rest: IVec = x.iter().zip(a).map(|(xi, ai)| xi - ai).collect();
                lookup.contains(&rest)
            });
            if !reducible {
                basis.push(x.clone());
            }
        }
        basis.sort();
        Ok(basis)
    }

    /// An integer functional with value >= 1 on every generator.
    fn positive_grading(&self) -> Result<IVec> {
        let cons: Vec<Constraint> = self
            .generators
            .iter()
            .map(|g| Constraint::ge(ivec_to_qvec(g), Rat::one()))
            .collect();
        match lp::minimize(&QVector::zero(self.dim), &cons) {
            LpOutcome::Optimal { point, .. } => {
                let scale = crate::rational::denominator_lcm(point.iter());
                Ok(point
                    .iter()
                    .map(|e| (e * &scale).to_integer())
                    .collect())
            }
            _ => Err(Error::NotStronglyConvex),
        }
    }

    /// Determinant test for full-dimensional simplicial cones; general cones
    /// are unimodular when some subset of generators is and the rest are
    /// redundant, which does not occur in this crate's fans.
    pub fn is_unimodular(&self) -> bool {
        if self.generators.len() != self.dim {
            return false;
        }
        let m = QMatrix::from_rows(self.generators.iter().map(|g| ivec_to_qvec(g)).collect());
        let det = m.determinant();
        det == Rat::one() || det == -Rat::one()
    }
}

/// Extreme rays of the pointed cone `{ x : <x, n_i> >= 0 }` in dimension <= 3.
pub fn rays_from_halfspaces(dim: usize, normals: &[IVec]) -> Result<Vec<IVec>> {
    if dim > 3 {
        return Err(Error::DimensionCap { cap: 3, got: dim });
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut rays: BTreeSet<IVec> = BTreeSet::new();
    if dim == 1 {
        for cand in [vec![Int::one()], vec![-Int::one()]] {
            if normals
                .iter()
                .all(|n| !dot_int(n, &cand).is_negative())
            {
                rays.insert(cand);
            }
        }
        return Ok(rays.into_iter().collect());
    }
    for subset in combinations(normals.len(), dim - 1) {
        let mat = QMatrix::from_rows(
            subset
                .iter()
                .map(|&i| ivec_to_qvec(&normals[i]))
                .collect(),
        );
        let kernel = kernel_basis(&mat);
        if kernel.len() != 1 {
            continue;
        }
        let d = primitive_from_rational(&kernel[0]);
        for cand in [d.clone(), d.iter().map(|e| -e.clone()).collect::<IVec>()] {
            if normals
                .iter()
                .all(|n| !dot_int(n, &cand).is_negative())
            {
                rays.insert(cand);
            }
        }
    }
    Ok(rays.into_iter().collect())
}
