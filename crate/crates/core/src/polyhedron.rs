//! Rational polyhedra in half-space form with lazy vertex enumeration.
//!
//! Vertices are found by exhaustive search over constraint subsets, which is
//! exact and entirely sufficient at the constraint counts this crate uses.

use std::cell::OnceCell;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot_int, ivec_to_qvec, IVec, QMatrix, QVector};
use crate::lp::{self, Constraint, LpOutcome};
use crate::rational::{ceil_int, floor_int, Int, Rat};

/// The half-space `{ u : <u, normal> >= offset }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub normal: IVec,
    pub offset: Rat,
}

impl HalfSpace {
    pub fn new(normal: IVec, offset: Rat) -> Self {
        HalfSpace { normal, offset }
    }

    pub fn contains(&self, point: &QVector) -> bool {
        crate::linalg::dot_int_rat(&self.normal, point) >= self.offset
    }
}

#[derive(Clone, Debug)]
pub struct Polyhedron {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    vertex_cache: OnceCell<Vec<QVector>>,
}

impl Polyhedron {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Self {
        for h in &halfspaces {
            assert_eq!(h.normal.len(), dim, "half-space dimension mismatch");
        }
        Polyhedron {
            dim,
            halfspaces,
            vertex_cache: OnceCell::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    /// The polyhedron `{ u : <u, v_i> >= c_i }` scaled by `factor > 0`,
    /// i.e. the same normals with offsets multiplied by the factor.
    pub fn scaled(&self, factor: &Rat) -> Polyhedron {
        assert!(factor.is_positive(), "scale factor must be positive");
        Polyhedron::new(
            self.dim,
            self.halfspaces
                .iter()
                .map(|h| HalfSpace::new(h.normal.clone(), &h.offset * factor))
                .collect(),
        )
    }

    pub fn contains(&self, point: &QVector) -> bool {
        self.halfspaces.iter().all(|h| h.contains(point))
    }

    pub fn contains_int(&self, point: &[Int]) -> bool {
        self.halfspaces
            .iter()
            .all(|h| Rat::from_integer(dot_int(&h.normal, point)) >= h.offset)
    }

    pub fn to_constraints(&self) -> Vec<Constraint> {
        self.halfspaces
            .iter()
            .map(|h| Constraint::ge(ivec_to_qvec(&h.normal), h.offset.clone()))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        !lp::is_feasible(self.dim, &self.to_constraints())
    }

    /// True when some point satisfies every inequality strictly.
    pub fn is_full_dimensional(&self) -> bool {
        // Maximize s <= 1 subject to <u, v_i> - s >= c_i in variables (u, s).
        let n = self.dim;
        let mut cons: Vec<Constraint> = Vec::new();
        for h in &self.halfspaces {
            let mut row = ivec_to_qvec(&h.normal).0;
            row.push(-Rat::one());
            cons.push(Constraint::ge(QVector(row), h.offset.clone()));
        }
        let mut cap = QVector::zero(n + 1);
        cap[n] = -Rat::one();
        cons.push(Constraint::ge(cap, -Rat::one()));
        let mut obj = QVector::zero(n + 1);
        obj[n] = -Rat::one();
        match lp::minimize(&obj, &cons) {
            LpOutcome::Optimal { value, .. } => value.is_negative(),
            _ => false,
        }
    }

    /// Exact minimum of `<u, w>` over the polyhedron.
    pub fn minimize(&self, w: &[Int]) -> Result<(Rat, QVector)> {
        assert_eq!(w.len(), self.dim, "objective dimension mismatch");
        match lp::minimize(&ivec_to_qvec(w), &self.to_constraints()) {
            LpOutcome::Optimal { value, point } => Ok((value, point)),
            LpOutcome::Infeasible => Err(Error::EmptyPolyhedron),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    pub fn maximize(&self, w: &[Int]) -> Result<(Rat, QVector)> {
        let neg: IVec = w.iter().map(|x| -x.clone()).collect();
        let (v, p) = self.minimize(&neg)?;
        Ok((-v, p))
    }

    /// True when the recession cone is trivial.
    pub fn is_bounded(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        // Unbounded iff some direction d != 0 has <d, v_i> >= 0 for all i.
        // Any such d has a coordinate of absolute value 1 after scaling.
        let recession: Vec<Constraint> = self
            .halfspaces
            .iter()
            .map(|h| Constraint::ge(ivec_to_qvec(&h.normal), Rat::zero()))
            .collect();
        for i in 0..self.dim {
            for sign in [1i64, -1] {
                let mut cons = recession.clone();
                cons.push(Constraint::eq(
                    QVector::unit(self.dim, i),
                    crate::rational::rat_int(sign),
                ));
                if lp::is_feasible(self.dim, &cons) {
                    return false;
                }
            }
        }
        true
    }

    /// All points where `dim` linearly independent constraints are tight and
    /// the rest hold weakly, in lexicographic order.
    pub fn vertices(&self) -> &[QVector] {
        self.vertex_cache.get_or_init(|| {
            let n = self.dim;
            let m = self.halfspaces.len();
            let mut found: BTreeSet<QVector> = BTreeSet::new();
            if n == 0 || m < n {
                return Vec::new();
            }
            for subset in combinations(m, n) {
                let mat = QMatrix::from_rows(
                    subset
                        .iter()
                        .map(|&i| ivec_to_qvec(&self.halfspaces[i].normal))
                        .collect(),
                );
                if mat.determinant().is_zero() {
                    continue;
                }
                let rhs = QVector(
                    subset
                        .iter()
                        .map(|&i| self.halfspaces[i].offset.clone())
                        .collect(),
                );
                let point = crate::linalg::solve_linear(&mat, &rhs)
                    .expect("square system dimensions agree")
                    .expect("nonsingular system has a solution");
                if self.contains(&point) {
                    found.insert(point);
                }
            }
            found.into_iter().collect()
        })
    }

    /// Integer points of a bounded polyhedron in lexicographic order.
    pub fn lattice_points(&self) -> Result<Vec<IVec>> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        if !self.is_bounded() {
            return Err(Error::UnboundedPolyhedron);
        }
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut e = vec![Int::zero(); self.dim];
            e[i] = Int::one();
            let (min, _) = self.minimize(&e)?;
            let (max, _) = self.maximize(&e)?;
            lo.push(ceil_int(&min));
            hi.push(floor_int(&max));
            if lo[i] > hi[i] {
                return Ok(Vec::new());
            }
        }
        // Suffix bounds for pruning: extreme values of sum_{j>=k} n_j u_j.
        let m = self.halfspaces.len();
        let mut suffix_min = vec![vec![Rat::zero(); self.dim + 1]; m];
        let mut suffix_max = vec![vec![Rat::zero(); self.dim + 1]; m];
        for (h, hs) in self.halfspaces.iter().enumerate() {
            for k in (0..self.dim).rev() {
                let c = &hs.normal[k];
                let (a, b) = if c.is_negative() {
                    (c * &hi[k], c * &lo[k])
                } else {
                    (c * &lo[k], c * &hi[k])
                };
                suffix_min[h][k] = &suffix_min[h][k + 1] + Rat::from_integer(a);
                suffix_max[h][k] = &suffix_max[h][k + 1] + Rat::from_integer(b);
            }
        }
        let mut out = Vec::new();
        let mut current = vec![Int::zero(); self.dim];
        let mut partial = vec![Rat::zero(); m];
        self.scan(0, &lo, &hi, &mut current, &mut partial, &suffix_max, &mut out);
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn scan(
        &self,
        depth: usize,
        lo: &[Int],
        hi: &[Int],
        current: &mut Vec<Int>,
        partial: &mut Vec<Rat>,
        suffix_max: &[Vec<Rat>],
        out: &mut Vec<IVec>,
    ) {
        if depth == self.dim {
            out.push(current.clone());
            return;
        }
        let mut v = lo[depth].clone();
        while v <= hi[depth] {
            current[depth] = v.clone();
            let mut feasible = true;
            let saved = partial.clone();
            for (h, hs) in self.halfspaces.iter().enumerate() {
                partial[h] = &partial[h] + Rat::from_integer(&hs.normal[depth] * &v);
                // Even the best completion cannot reach the offset: prune.
                if &partial[h] + &suffix_max[h][depth + 1] < hs.offset {
                    feasible = false;
                }
            }
            if feasible {
                self.scan(depth + 1, lo, hi, current, partial, suffix_max, out);
            }
            *partial = saved;
            v += 1;
        }
    }

    /// Exact euclidean volume of the polytope (ambient dimension <= 3).
    /// Lower-dimensional input has volume zero.
    pub fn volume(&self) -> Result<Rat> {
        if self.dim > 3 {
            return Err(Error::DimensionCap {
                cap: 3,
                got: self.dim,
            });
        }
        if self.is_empty() {
            return Ok(Rat::zero());
        }
        if !self.is_bounded() {
            return Err(Error::UnboundedPolyhedron);
        }
        let verts = self.vertices();
        if verts.len() < self.dim + 1 {
            return Ok(Rat::zero());
        }
        match self.dim {
            0 => Ok(Rat::zero()),
            1 => {
                let mut min = verts[0][0].clone();
                let mut max = verts[0][0].clone();
                for v in verts {
                    min = min.min(v[0].clone());
                    max = max.max(v[0].clone());
                }
                Ok(max - min)
            }
            2 => Ok(polygon_area(verts)),
            _ => Ok(self.volume_3d(verts)),
        }
    }

    fn volume_3d(&self, verts: &[QVector]) -> Rat {
        let count = crate::rational::rat_int(verts.len() as i64);
        let mut centroid = QVector::zero(3);
        for v in verts {
            centroid = centroid.add(v);
        }
        centroid = QVector(centroid.0.into_iter().map(|c| c / &count).collect());

        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut total = Rat::zero();
        for h in &self.halfspaces {
            let tight: Vec<usize> = (0..verts.len())
                .filter(|&i| {
                    crate::linalg::dot_int_rat(&h.normal, &verts[i]) == h.offset
                })
                .collect();
            if tight.len() < 3 || !seen.insert(tight.clone()) {
                continue;
            }
            let facet: Vec<&QVector> = tight.iter().map(|&i| &verts[i]).collect();
            // Project out the coordinate where the facet normal is largest.
            let drop = (0..3)
                .max_by_key(|&i| h.normal[i].abs())
                .expect("three coordinates");
            let keep: Vec<usize> = (0..3).filter(|&i| i != drop).collect();
            let plane: Vec<(Rat, Rat)> = facet
                .iter()
                .map(|v| (v[keep[0]].clone(), v[keep[1]].clone()))
                .collect();
            let order = cyclic_order(&plane);
            if order.len() < 3 {
                continue;
            }
            let base = facet[order[0]];
            for w in 1..order.len() - 1 {
                let b = facet[order[w]];
                let c = facet[order[w + 1]];
                let det = det3(
                    &base.sub(&centroid),
                    &b.sub(&centroid),
                    &c.sub(&centroid),
                );
                total += det.abs();
            }
        }
        total / crate::rational::rat_int(6)
    }
}

/// Area of the convex hull of the given points.
fn polygon_area(points: &[QVector]) -> Rat {
    let hull = convex_hull_2d(points);
    if hull.len() < 3 {
        return Rat::zero();
    }
    let mut twice = Rat::zero();
    for i in 0..hull.len() {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        twice += &a[0] * &b[1] - &a[1] * &b[0];
    }
    twice.abs() / crate::rational::rat_int(2)
}

/// Monotone-chain convex hull, counterclockwise, no repeated endpoint.
pub fn convex_hull_2d(points: &[QVector]) -> Vec<QVector> {
    let mut pts: Vec<QVector> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: &QVector, a: &QVector, b: &QVector| -> Rat {
        (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
    };
    let mut lower: Vec<QVector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<QVector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Indices of the points sorted counterclockwise around their centroid.
/// The points must be pairwise distinct.
fn cyclic_order(points: &[(Rat, Rat)]) -> Vec<usize> {
    let count = crate::rational::rat_int(points.len() as i64);
    let cx: Rat = points.iter().map(|p| p.0.clone()).sum::<Rat>() / &count;
    let cy: Rat = points.iter().map(|p| p.1.clone()).sum::<Rat>() / &count;
    let half = |p: &(Rat, Rat)| -> u8 {
        let dx = &p.0 - &cx;
        let dy = &p.1 - &cy;
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    };
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        let (hi, hj) = (half(&points[i]), half(&points[j]));
        if hi != hj {
            return hi.cmp(&hj);
        }
        let cross = (&points[i].0 - &cx) * (&points[j].1 - &cy)
            - (&points[i].1 - &cy) * (&points[j].0 - &cx);
        // Positive cross: i is counterclockwise-before j.
        if cross.is_positive() {
            std::cmp::Ordering::Less
        } else if cross.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    idx
}

fn det3(a: &QVector, b: &QVector, c: &QVector) -> Rat {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// All k-element subsets of 0..m in lexicographic order.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ivec;
    use crate::rational::{rat, rat_int};

    fn triangle() -> Polyhedron {
        // (0,0), (2,0), (0,2)
        Polyhedron::new(
            2,
            vec![
                HalfSpace::new(ivec(&[1, 0]), rat_int(0)),
                HalfSpace::new(ivec(&[0, 1]), rat_int(0)),
                HalfSpace::new(ivec(&[-1, -1]), rat_int(-2)),
            ],
        )
    }

    #[test]
    fn triangle_vertices_and_minimum() {
        let t = triangle();
        let vs = t.vertices();
        assert_eq!(vs.len(), 3);
        assert_eq!(t.minimize(&ivec(&[1, 0])).unwrap().0, rat_int(0));
        assert_eq!(t.minimize(&ivec(&[-1, -1])).unwrap().0, rat_int(-2));
    }

    #[test]
    fn segment_minimum() {
        // [(1,1),(3,1)]
        let seg = Polyhedron::new(
            2,
            vec![
                HalfSpace::new(ivec(&[1, 0]), rat_int(1)),
                HalfSpace::new(ivec(&[-1, 0]), rat_int(-3)),
                HalfSpace::new(ivec(&[0, 1]), rat_int(1)),
                HalfSpace::new(ivec(&[0, -1]), rat_int(-1)),
            ],
        );
        assert_eq!(seg.minimize(&ivec(&[1, 0])).unwrap().0, rat_int(1));
        assert_eq!(seg.volume().unwrap(), rat_int(0));
        assert_eq!(seg.lattice_points().unwrap().len(), 3);
    }

    #[test]
    fn triangle_lattice_points_match_brute_force() {
        let t = triangle();
        let pts = t.lattice_points().unwrap();
        assert_eq!(pts.len(), 6);
        // Independent scan.
        let mut brute = Vec::new();
        for x in 0..=2i64 {
            for y in 0..=2i64 {
                if x + y <= 2 {
                    brute.push(ivec(&[x, y]));
                }
            }
        }
        brute.sort();
        assert_eq!(pts, brute);
    }

    #[test]
    fn empty_and_point_polyhedra() {
        let empty = Polyhedron::new(
            1,
            vec![
                HalfSpace::new(ivec(&[1]), rat_int(1)),
                HalfSpace::new(ivec(&[-1]), rat_int(0)),
            ],
        );
        assert!(empty.is_empty());
        assert!(empty.lattice_points().unwrap().is_empty());
        assert_eq!(empty.volume().unwrap(), rat_int(0));

        let point = Polyhedron::new(
            2,
            vec![
                HalfSpace::new(ivec(&[1, 0]), rat_int(1)),
                HalfSpace::new(ivec(&[-1, 0]), rat_int(-1)),
                HalfSpace::new(ivec(&[0, 1]), rat_int(1)),
                HalfSpace::new(ivec(&[0, -1]), rat_int(-1)),
            ],
        );
        assert_eq!(point.lattice_points().unwrap(), vec![ivec(&[1, 1])]);
        assert!(!point.is_full_dimensional());
    }

    #[test]
    fn volumes() {
        assert_eq!(triangle().volume().unwrap(), rat_int(2));
        let square = Polyhedron::new(
            2,
            vec![
                HalfSpace::new(ivec(&[1, 0]), rat_int(0)),
                HalfSpace::new(ivec(&[-1, 0]), rat_int(-1)),
                HalfSpace::new(ivec(&[0, 1]), rat_int(0)),
                HalfSpace::new(ivec(&[0, -1]), rat_int(-1)),
            ],
        );
        assert_eq!(square.volume().unwrap(), rat_int(1));
    }

    #[test]
    fn cube_and_simplex_volume_3d() {
        let mut hs = Vec::new();
        for i in 0..3 {
            let mut pos = vec![0i64; 3];
            pos[i] = 1;
            let mut neg = vec![0i64; 3];
            neg[i] = -1;
            hs.push(HalfSpace::new(ivec(&pos), rat_int(0)));
            hs.push(HalfSpace::new(ivec(&neg), rat_int(-2)));
        }
        let cube = Polyhedron::new(3, hs);
        assert_eq!(cube.volume().unwrap(), rat_int(8));
        assert_eq!(cube.lattice_points().unwrap().len(), 27);

        let simplex = Polyhedron::new(
            3,
            vec![
                HalfSpace::new(ivec(&[1, 0, 0]), rat_int(0)),
                HalfSpace::new(ivec(&[0, 1, 0]), rat_int(0)),
                HalfSpace::new(ivec(&[0, 0, 1]), rat_int(0)),
                HalfSpace::new(ivec(&[-1, -1, -1]), rat_int(-1)),
            ],
        );
        assert_eq!(simplex.volume().unwrap(), rat(1, 6));
    }

    #[test]
    fn unbounded_detection() {
        let quadrant = Polyhedron::new(
            2,
            vec![
                HalfSpace::new(ivec(&[1, 0]), rat_int(0)),
                HalfSpace::new(ivec(&[0, 1]), rat_int(0)),
            ],
        );
        assert!(!quadrant.is_bounded());
        assert!(quadrant.lattice_points().is_err());
        assert!(matches!(
            quadrant.minimize(&ivec(&[-1, 0])),
            Err(Error::Unbounded)
        ));
        assert_eq!(quadrant.minimize(&ivec(&[1, 1])).unwrap().0, rat_int(0));
    }

    #[test]
    fn fractional_triangle_scaling() {
        let t = triangle().scaled(&rat(1, 2));
        // Now the triangle (0,0), (1,0), (0,1).
        assert_eq!(t.volume().unwrap(), rat(1, 2));
        assert_eq!(t.lattice_points().unwrap().len(), 3);
    }

    #[test]
    fn combinations_enumeration() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(2, 3).len(), 0);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
