//! Exact rational vectors, matrices and linear solving.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{Int, Rat};

/// Integer vector helpers. Integer vectors are plain `Vec<Int>` throughout
/// the crate; the functions below keep them primitive and exact.
pub type IVec = Vec<Int>;

pub fn ivec(entries: &[i64]) -> IVec {
    entries.iter().map(|&e| Int::from(e)).collect()
}

pub fn ivec_to_qvec(v: &[Int]) -> QVector {
    QVector(v.iter().map(|e| Rat::from_integer(e.clone())).collect())
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    assert_eq!(a.len(), b.len(), "integer dot dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int_rat(a: &[Int], b: &QVector) -> Rat {
    assert_eq!(a.len(), b.dim(), "dot dimension mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| Rat::from_integer(x.clone()) * y)
        .sum()
}

/// Divides out the gcd of the entries; the zero vector stays zero.
pub fn primitive(v: &[Int]) -> IVec {
    let mut g = Int::zero();
    for e in v {
        g = g.gcd(e);
    }
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|e| e / &g).collect()
}

/// Primitive integer vector on the ray spanned by a rational vector.
pub fn primitive_from_rational(v: &QVector) -> IVec {
    let scale = crate::rational::denominator_lcm(v.iter());
    let ints: IVec = v.iter().map(|e| (e * &scale).to_integer()).collect();
    primitive(&ints)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct QVector(pub Vec<Rat>);

impl QVector {
    pub fn zero(dim: usize) -> Self {
        QVector(vec![Rat::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = Rat::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        QVector(entries.iter().map(|&e| crate::rational::rat_int(e)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &QVector) -> QVector {
        assert_eq!(self.dim(), other.dim(), "vector add dimension mismatch");
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        assert_eq!(self.dim(), other.dim(), "vector sub dimension mismatch");
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rat) -> QVector {
        QVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn dot(&self, other: &QVector) -> Rat {
        assert_eq!(self.dim(), other.dim(), "dot dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Max-norm of the coordinate vector.
    pub fn max_norm(&self) -> Rat {
        self.0
            .iter()
            .map(|e| e.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

impl std::ops::Index<usize> for QVector {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for QVector {
    fn index_mut(&mut self, i: usize) -> &mut Rat {
        &mut self.0[i]
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<QVector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, QVector::dim);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.dim(), c, "ragged matrix rows");
            data.extend(row.0);
        }
        QMatrix { rows: r, cols: c, data }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| QVector::from_ints(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> QVector {
        QVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> QVector {
        QVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &QVector) -> QVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        QVector(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| &self[(i, j)] * &v[j])
                        .sum::<Rat>()
                })
                .collect(),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    /// Row-reduces a copy and returns the rank.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    pub fn determinant(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[(r, col)].is_zero());
            let Some(p) = pivot else {
                return Rat::zero();
            };
            if p != col {
                for j in 0..n {
                    let a = m[(p, j)].clone();
                    let b = m[(col, j)].clone();
                    m[(p, j)] = b;
                    m[(col, j)] = a;
                }
                det = -det;
            }
            let pv = m[(col, col)].clone();
            det *= &pv;
            for r in (col + 1)..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] / &pv;
                for j in col..n {
                    let sub = &factor * &m[(col, j)];
                    m[(r, j)] = &m[(r, j)] - &sub;
                }
            }
        }
        det
    }

    /// In-place reduction to row echelon form; returns the pivot columns.
    fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let pivot = (row..self.rows).find(|&r| !self[(r, col)].is_zero());
            let Some(p) = pivot else { continue };
            self.swap_rows(p, row);
            let pv = self[(row, col)].clone();
            for j in col..self.cols {
                self[(row, j)] = &self[(row, j)] / &pv;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for j in col..self.cols {
                        let sub = &factor * &self[(row, j)];
                        self[(r, j)] = &self[(r, j)] - &sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Leading principal minor of size k.
    pub fn leading_minor(&self, k: usize) -> Rat {
        let mut sub = QMatrix::zero(k, k);
        for i in 0..k {
            for j in 0..k {
                sub[(i, j)] = self[(i, j)].clone();
            }
        }
        sub.determinant()
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// One exact solution of A x = b if the system is consistent.
/// Free variables are set to zero, so the answer is deterministic.
pub fn solve_linear(a: &QMatrix, b: &QVector) -> Result<Option<QVector>> {
    if a.rows() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: b.dim(),
        });
    }
    let mut aug = QMatrix::zero(a.rows(), a.cols() + 1);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols())] = b[i].clone();
    }
    let pivots = aug.row_reduce();
    // Inconsistent when a pivot lands in the augmented column.
    if pivots.contains(&a.cols()) {
        return Ok(None);
    }
    let mut x = QVector::zero(a.cols());
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = aug[(row, a.cols())].clone();
    }
    Ok(Some(x))
}

/// Basis of the right kernel of A, deterministic order.
pub fn kernel_basis(a: &QMatrix) -> Vec<QVector> {
    let mut m = a.clone();
    let pivots = m.row_reduce();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..a.cols() {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = QVector::zero(a.cols());
        v[free] = Rat::one();
        for (row, &col) in pivots.iter().enumerate() {
            v[col] = -m[(row, free)].clone();
        }
        basis.push(v);
    }
    basis
}

/// Sylvester-style test: all leading principal minors alternate in sign,
/// starting negative. The empty matrix passes vacuously.
pub fn is_negative_definite(m: &QMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::NonSymmetric);
    }
    for k in 1..=m.rows() {
        let minor = m.leading_minor(k);
        let expect_positive = k % 2 == 0;
        let ok = if expect_positive {
            minor.is_positive()
        } else {
            minor.is_negative()
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Signature (positive, negative, zero inertia) of a symmetric matrix,
/// via congruence diagonalization.
pub fn signature(m: &QMatrix) -> Result<(usize, usize, usize)> {
    if !m.is_symmetric() {
        return Err(Error::NonSymmetric);
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut done = 0usize;
    let mut pos = 0usize;
    let mut neg = 0usize;
    while done < n {
        // Find a nonzero diagonal pivot at or after `done`.
        let diag = (done..n).find(|&i| !a[(i, i)].is_zero());
        let pivot = match diag {
            Some(i) => i,
            None => {
                // All remaining diagonal entries vanish; fix one up from an
                // off-diagonal entry via the congruence row_i += row_j.
                let mut found = None;
                'search: for i in done..n {
                    for j in (i + 1)..n {
                        if !a[(i, j)].is_zero() {
                            found = Some((i, j));
                            break 'search;
                        }
                    }
                }
                let Some((i, j)) = found else {
                    // Remaining block is zero.
                    break;
                };
                for k in 0..n {
                    let add = a[(j, k)].clone();
                    a[(i, k)] = &a[(i, k)] + &add;
                }
                for k in 0..n {
                    let add = a[(k, j)].clone();
                    a[(k, i)] = &a[(k, i)] + &add;
                }
                i
            }
        };
        // Move pivot to position `done` by a symmetric swap.
        if pivot != done {
            for k in 0..n {
                let x = a[(pivot, k)].clone();
                let y = a[(done, k)].clone();
                a[(pivot, k)] = y;
                a[(done, k)] = x;
            }
            for k in 0..n {
                let x = a[(k, pivot)].clone();
                let y = a[(k, done)].clone();
                a[(k, pivot)] = y;
                a[(k, done)] = x;
            }
        }
        let d = a[(done, done)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in (done + 1)..n {
            if a[(i, done)].is_zero() {
                continue;
            }
            let factor = &a[(i, done)] / &d;
            for k in 0..n {
                let sub = &factor * &a[(done, k)];
                a[(i, k)] = &a[(i, k)] - &sub;
            }
            for k in 0..n {
                let sub = &factor * &a[(k, done)];
                a[(k, i)] = &a[(k, i)] - &sub;
            }
        }
        done += 1;
    }
    Ok((pos, neg, n - pos - neg))
}
