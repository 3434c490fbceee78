//! Exact rational linear programming.
//!
//! Two-phase dense simplex with Bland's rule, so every pivot is exact and
//! termination is guaranteed. Problem sizes in this crate are tiny (at most
//! a few dozen variables), which makes the dense tableau the right trade.

use num_traits::{One, Signed, Zero};

use crate::linalg::QVector;
use crate::rational::Rat;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConstraintKind {
    /// coeffs . u >= rhs
    Ge,
    /// coeffs . u == rhs
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: QVector,
    pub rhs: Rat,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn ge(coeffs: QVector, rhs: Rat) -> Self {
        Constraint {
            coeffs,
            rhs,
            kind: ConstraintKind::Ge,
        }
    }

    pub fn eq(coeffs: QVector, rhs: Rat) -> Self {
        Constraint {
            coeffs,
            rhs,
            kind: ConstraintKind::Eq,
        }
    }

    /// coeffs . u <= rhs, stored as the negated Ge row.
    pub fn le(coeffs: QVector, rhs: Rat) -> Self {
        Constraint {
            coeffs: coeffs.scale(&-Rat::one()),
            rhs: -rhs,
            kind: ConstraintKind::Ge,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: QVector },
    Infeasible,
    Unbounded,
}

/// Minimizes `objective . u` over free variables u subject to `constraints`.
pub fn minimize(objective: &QVector, constraints: &[Constraint]) -> LpOutcome {
    let n = objective.dim();
    for c in constraints {
        assert_eq!(c.coeffs.dim(), n, "constraint dimension mismatch");
    }
    if constraints.is_empty() {
        return if objective.is_zero() {
            LpOutcome::Optimal {
                value: Rat::zero(),
                point: QVector::zero(n),
            }
        } else {
            LpOutcome::Unbounded
        };
    }

    // Standard form: u = xp - xm with xp, xm >= 0, slack s >= 0 per Ge row.
    let m = constraints.len();
    let slacks = constraints
        .iter()
        .filter(|c| c.kind == ConstraintKind::Ge)
        .count();
    let cols = 2 * n + slacks;

    let mut a = vec![vec![Rat::zero(); cols]; m];
    let mut b = vec![Rat::zero(); m];
    let mut slack_idx = 0;
    for (i, c) in constraints.iter().enumerate() {
        for j in 0..n {
            a[i][j] = c.coeffs[j].clone();
            a[i][n + j] = -c.coeffs[j].clone();
        }
        if c.kind == ConstraintKind::Ge {
            a[i][2 * n + slack_idx] = -Rat::one();
            slack_idx += 1;
        }
        b[i] = c.rhs.clone();
    }

    let mut tab = Tableau::new(a, b);
    if !tab.phase_one() {
        return LpOutcome::Infeasible;
    }

    let mut cost = vec![Rat::zero(); cols];
    for j in 0..n {
        cost[j] = objective[j].clone();
        cost[n + j] = -objective[j].clone();
    }
    match tab.phase_two(&cost) {
        None => LpOutcome::Unbounded,
        Some(value) => {
            let x = tab.primal_solution(cols);
            let mut u = QVector::zero(n);
            for j in 0..n {
                u[j] = &x[j] - &x[n + j];
            }
            LpOutcome::Optimal { value, point: u }
        }
    }
}

pub fn is_feasible(dim: usize, constraints: &[Constraint]) -> bool {
    matches!(
        minimize(&QVector::zero(dim), constraints),
        LpOutcome::Optimal { .. }
    )
}

struct Tableau {
    /// Rows of the current dictionary, `cols + artificials` wide plus rhs.
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
    artificial_base: usize,
}

impl Tableau {
    fn new(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Self {
        let m = a.len();
        let cols = a[0].len();
        // Make rhs nonnegative so artificials give a feasible start.
        for i in 0..m {
            if b[i].is_negative() {
                for v in a[i].iter_mut() {
                    *v = -v.clone();
                }
                b[i] = -b[i].clone();
            }
        }
        // Append one artificial column per row.
        for (i, row) in a.iter_mut().enumerate() {
            for k in 0..m {
                row.push(if k == i { Rat::one() } else { Rat::zero() });
            }
        }
        let basis = (cols..cols + m).collect();
        Tableau {
            rows: a,
            rhs: b,
            basis,
            cols,
            artificial_base: cols,
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pv = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &pv;
        }
        self.rhs[row] = &self.rhs[row] / &pv;
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for j in 0..self.rows[r].len() {
                let sub = &factor * &self.rows[row][j];
                self.rows[r][j] = &self.rows[r][j] - &sub;
            }
            let sub = &factor * &self.rhs[row];
            self.rhs[r] = &self.rhs[r] - &sub;
        }
        self.basis[row] = col;
    }

    /// Runs simplex on the given cost row restricted to columns < limit.
    /// Returns None when unbounded, otherwise the optimal value.
    fn run(&mut self, cost: &[Rat], limit: usize) -> Option<Rat> {
        // Reduced-cost row: z_j = c_j - c_B . (column j of dictionary).
        loop {
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut red = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() && !self.rows[i][j].is_zero() {
                        let sub = &cost[bi] * &self.rows[i][j];
                        red = red - sub;
                    }
                }
                if red.is_negative() {
                    entering = Some(j);
                    break; // Bland: first improving index.
                }
            }
            let Some(col) = entering else {
                let mut value = Rat::zero();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() {
                        value = value + &cost[bi] * &self.rhs[i];
                    }
                }
                return Some(value);
            };

            let mut leaving: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    let better = match &leaving {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return None;
            };
            self.pivot(row, col);
        }
    }

    /// Phase 1: true when a feasible basis was found.
    fn phase_one(&mut self) -> bool {
        let total = self.rows.first().map_or(0, Vec::len);
        let mut cost = vec![Rat::zero(); total];
        for j in self.artificial_base..total {
            cost[j] = Rat::one();
        }
        let value = self
            .run(&cost, total)
            .expect("phase one is bounded below by zero");
        if !value.is_zero() {
            return false;
        }
        // Drive any artificial still in the basis out of it.
        for i in 0..self.basis.len() {
            if self.basis[i] < self.artificial_base {
                continue;
            }
            let col = (0..self.artificial_base).find(|&j| !self.rows[i][j].is_zero());
            match col {
                Some(j) => self.pivot(i, j),
                None => {
                    // Redundant row: basic artificial at value zero with no
                    // structural entry. Harmless; it stays pinned at zero.
                }
            }
        }
        true
    }

    fn phase_two(&mut self, cost: &[Rat]) -> Option<Rat> {
        let total = self.rows.first().map_or(0, Vec::len);
        let mut full = cost.to_vec();
        full.resize(total, Rat::zero());
        // Artificial columns must never re-enter; restricting the entering
        // search to structural columns enforces that.
        self.run(&full, self.cols)
    }

    fn primal_solution(&self, cols: usize) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); cols];
        for (i, &bi) in self.basis.iter().enumerate() {
            if bi < cols {
                x[bi] = self.rhs[i].clone();
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn qv(v: &[i64]) -> QVector {
        QVector::from_ints(v)
    }

    #[test]
    fn minimize_over_triangle() {
        // Triangle (0,0), (2,0), (0,2): u1 >= 0, u2 >= 0, -u1 - u2 >= -2.
        let cons = vec![
            Constraint::ge(qv(&[1, 0]), rat_int(0)),
            Constraint::ge(qv(&[0, 1]), rat_int(0)),
            Constraint::ge(qv(&[-1, -1]), rat_int(-2)),
        ];
        match minimize(&qv(&[1, 0]), &cons) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat_int(0)),
            other => panic!("unexpected outcome {other:?}"),
        }
        match minimize(&qv(&[-1, -1]), &cons) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat_int(-2));
                assert_eq!(point.dot(&qv(&[1, 1])), rat_int(2));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = vec![
            Constraint::ge(qv(&[1]), rat_int(1)),
            Constraint::ge(qv(&[-1]), rat_int(0)),
        ];
        assert_eq!(minimize(&qv(&[1]), &cons), LpOutcome::Infeasible);

        let cons = vec![Constraint::ge(qv(&[1]), rat_int(0))];
        assert_eq!(minimize(&qv(&[-1]), &cons), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_constraints() {
        // min u1 + u2 with u1 + 2 u2 = 4, u >= 0.
        let cons = vec![
            Constraint::eq(qv(&[1, 2]), rat_int(4)),
            Constraint::ge(qv(&[1, 0]), rat_int(0)),
            Constraint::ge(qv(&[0, 1]), rat_int(0)),
        ];
        match minimize(&qv(&[1, 1]), &cons) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat_int(2));
                assert_eq!(point, QVector(vec![rat_int(0), rat_int(2)]));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn fractional_optimum() {
        // min -u over 3u <= 1  =>  u = 1/3.
        let cons = vec![Constraint::le(qv(&[3]), rat_int(1))];
        match minimize(&qv(&[-1]), &cons) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(-1, 3));
                assert_eq!(point[0], rat(1, 3));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example (terminates under Bland's rule).
        // min -3/4 x4 + 150 x5 - 1/50 x6 + 6 x7
        // s.t. x1 + 1/4 x4 - 60 x5 - 1/25 x6 + 9 x7 = 0
        //      x2 + 1/2 x4 - 90 x5 - 1/50 x6 + 3 x7 = 0
        //      x3 + x6 = 1,  all xi >= 0.
        let n = 7;
        let mut cons = Vec::new();
        let row = |v: Vec<Rat>| QVector(v);
        cons.push(Constraint::eq(
            row(vec![
                rat_int(1),
                rat_int(0),
                rat_int(0),
                rat(1, 4),
                rat_int(-60),
                rat(-1, 25),
                rat_int(9),
            ]),
            rat_int(0),
        ));
        cons.push(Constraint::eq(
            row(vec![
                rat_int(0),
                rat_int(1),
                rat_int(0),
                rat(1, 2),
                rat_int(-90),
                rat(-1, 50),
                rat_int(3),
            ]),
            rat_int(0),
        ));
        cons.push(Constraint::eq(
            row(vec![
                rat_int(0),
                rat_int(0),
                rat_int(1),
                rat_int(0),
                rat_int(0),
                rat_int(1),
                rat_int(0),
            ]),
            rat_int(1),
        ));
        for i in 0..n {
            cons.push(Constraint::ge(QVector::unit(n, i), rat_int(0)));
        }
        let obj = row(vec![
            rat_int(0),
            rat_int(0),
            rat_int(0),
            rat(-3, 4),
            rat_int(150),
            rat(-1, 50),
            rat_int(6),
        ]);
        match minimize(&obj, &cons) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(-1, 20)),
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
