//! Exact two-phase tableau simplex over rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! leaving basic variable on ratio ties), so the method terminates and is
//! deterministic for a fixed input.

use crate::error::Error;
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rat)>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// `minimize objective·x` subject to the constraints and variable kinds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub kinds: Vec<VarKind>,
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: Rat,
    pub values: Vec<Rat>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("pivot limit {0} reached")]
    PivotLimit(usize),
}

impl From<LpError> for Error {
    fn from(e: LpError) -> Self {
        match e {
            LpError::PivotLimit(_) => Error::BudgetExceeded(e.to_string()),
            _ => Error::SolverIntegrity(e.to_string()),
        }
    }
}

impl LinearProgram {
    pub fn new(kinds: Vec<VarKind>) -> Self {
        let n = kinds.len();
        LinearProgram {
            kinds,
            objective: vec![Rat::zero(); n],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rat)>, relation: Relation, rhs: Rat) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.solve_with_limit(usize::MAX)
    }

    pub fn solve_with_limit(&self, max_pivots: usize) -> Result<LpSolution, LpError> {
        Tableau::build(self).run(self, max_pivots)
    }
}

/// Column bookkeeping: each LP variable maps to one column, or two for a free
/// variable split as `x = x⁺ − x⁻`.
struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    /// Number of structural + slack columns; artificials follow.
    n_real: usize,
    n_cols: usize,
    var_cols: Vec<(usize, Option<usize>)>,
    artificial_rows: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut next = 0;
        let var_cols: Vec<(usize, Option<usize>)> = lp
            .kinds
            .iter()
            .map(|k| {
                let plus = next;
                next += 1;
                let minus = match k {
                    VarKind::NonNegative => None,
                    VarKind::Free => {
                        next += 1;
                        Some(next - 1)
                    }
                };
                (plus, minus)
            })
            .collect();

        // Normalize to rhs >= 0 and decide which rows need a slack or an artificial.
        struct Row {
            coeffs: Vec<(usize, Rat)>,
            rhs: Rat,
            slack: Option<Rat>,
            artificial: bool,
        }
        let mut prepared = Vec::with_capacity(lp.constraints.len());
        for c in &lp.constraints {
            let mut coeffs = Vec::with_capacity(c.coeffs.len() * 2);
            for (v, a) in &c.coeffs {
                let (p, m) = var_cols[*v];
                coeffs.push((p, a.clone()));
                if let Some(m) = m {
                    coeffs.push((m, -a));
                }
            }
            let mut rhs = c.rhs.clone();
            let mut rel = c.relation;
            if rhs.is_negative() {
                for (_, a) in coeffs.iter_mut() {
                    *a = -&*a;
                }
                rhs = -rhs;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            let (slack, artificial) = match rel {
                Relation::Le => (Some(Rat::one()), false),
                Relation::Ge => (Some(-Rat::one()), true),
                Relation::Eq => (None, true),
            };
            prepared.push(Row {
                coeffs,
                rhs,
                slack,
                artificial,
            });
        }
        let n_slack = prepared.iter().filter(|r| r.slack.is_some()).count();
        let n_art = prepared.iter().filter(|r| r.artificial).count();
        let n_real = next + n_slack;
        let n_cols = n_real + n_art;

        let mut rows = Vec::with_capacity(prepared.len());
        let mut basis = Vec::with_capacity(prepared.len());
        let mut artificial_rows = Vec::new();
        let mut slack_col = next;
        let mut art_col = n_real;
        for (i, r) in prepared.into_iter().enumerate() {
            let mut row = vec![Rat::zero(); n_cols + 1];
            for (c, a) in r.coeffs {
                row[c] += a;
            }
            let mut basic = None;
            if let Some(s) = r.slack {
                let positive = s.is_positive();
                row[slack_col] = s;
                if positive {
                    basic = Some(slack_col);
                }
                slack_col += 1;
            }
            if r.artificial {
                row[art_col] = Rat::one();
                basic = Some(art_col);
                artificial_rows.push(i);
                art_col += 1;
            }
            row[n_cols] = r.rhs;
            rows.push(row);
            basis.push(basic.expect("every row has a basic column"));
        }
        Tableau {
            rows,
            basis,
            n_real,
            n_cols,
            var_cols,
            artificial_rows,
        }
    }

    fn run(mut self, lp: &LinearProgram, max_pivots: usize) -> Result<LpSolution, LpError> {
        let mut pivots = 0;

        if !self.artificial_rows.is_empty() {
            // Phase 1: minimize the sum of artificials.
            let mut cost = vec![Rat::zero(); self.n_cols + 1];
            for c in &mut cost[self.n_real..self.n_cols] {
                *c = Rat::one();
            }
            let mut obj = self.reduce_costs(cost);
            self.optimize(&mut obj, self.n_cols, &mut pivots, max_pivots)?;
            if !obj[self.n_cols].is_zero() {
                return Err(LpError::Infeasible);
            }
            self.drive_out_artificials();
        }

        let mut cost = vec![Rat::zero(); self.n_cols + 1];
        for (v, c) in lp.objective.iter().enumerate() {
            let (p, m) = self.var_cols[v];
            cost[p] = c.clone();
            if let Some(m) = m {
                cost[m] = -c;
            }
        }
        let mut obj = self.reduce_costs(cost);
        self.optimize(&mut obj, self.n_real, &mut pivots, max_pivots)?;

        let mut col_values = vec![Rat::zero(); self.n_cols];
        for (r, &b) in self.basis.iter().enumerate() {
            col_values[b] = self.rows[r][self.n_cols].clone();
        }
        let values = self
            .var_cols
            .iter()
            .map(|&(p, m)| match m {
                Some(m) => &col_values[p] - &col_values[m],
                None => col_values[p].clone(),
            })
            .collect();
        Ok(LpSolution {
            objective: -&obj[self.n_cols],
            values,
            pivots,
        })
    }

    /// Turns raw costs into reduced costs for the current basis; the last
    /// entry then holds minus the objective value.
    fn reduce_costs(&self, mut cost: Vec<Rat>) -> Vec<Rat> {
        for (r, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let f = cost[b].clone();
            for (c, a) in cost.iter_mut().zip(&self.rows[r]) {
                if !a.is_zero() {
                    *c -= &(&f * a);
                }
            }
        }
        cost
    }

    /// Bland's-rule simplex iterations over columns `< allowed`.
    fn optimize(
        &mut self,
        obj: &mut [Rat],
        allowed: usize,
        pivots: &mut usize,
        max_pivots: usize,
    ) -> Result<(), LpError> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rat)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.n_cols] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((leave_row, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            if *pivots >= max_pivots {
                return Err(LpError::PivotLimit(max_pivots));
            }
            self.pivot(leave_row, enter, Some(obj));
            *pivots += 1;
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: Option<&mut [Rat]>) {
        let inv = self.rows[r][c].recip().expect("pivot element is nonzero");
        let nz: Vec<usize> = (0..=self.n_cols)
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        for &j in &nz {
            let v = &self.rows[r][j] * &inv;
            self.rows[r][j] = v;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let update = |row: &mut [Rat]| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &j in &nz {
                let d = &f * &pivot_row[j];
                row[j] -= &d;
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                update(row);
            }
        }
        if let Some(obj) = obj {
            update(obj);
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// After a feasible phase 1, pivot every artificial still basic (at level
    /// zero) onto a real column, dropping rows that are linearly redundant.
    fn drive_out_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.n_real {
                match (0..self.n_real).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => self.pivot(r, j, None),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        // Artificial columns are never re-entered: phase 2 only scans `< n_real`.
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rat {
        Rat::frac(p, d)
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  => 36 at (2, 6)
        let mut lp = LinearProgram::new(vec![VarKind::NonNegative; 2]);
        lp.objective = vec![q(-3, 1), q(-5, 1)];
        lp.add(vec![(0, q(1, 1))], Relation::Le, q(4, 1));
        lp.add(vec![(1, q(2, 1))], Relation::Le, q(12, 1));
        lp.add(vec![(0, q(3, 1)), (1, q(2, 1))], Relation::Le, q(18, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, q(-36, 1));
        assert_eq!(s.values, vec![q(2, 1), q(6, 1)]);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |x| via t >= x, t >= -x, with x + y = 1/3, y = 1  => x = -2/3, t = 2/3
        let mut lp = LinearProgram::new(vec![VarKind::Free, VarKind::Free, VarKind::NonNegative]);
        lp.objective = vec![q(0, 1), q(0, 1), q(1, 1)];
        lp.add(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Eq, q(1, 3));
        lp.add(vec![(1, q(1, 1))], Relation::Eq, q(1, 1));
        lp.add(vec![(0, q(1, 1)), (2, q(-1, 1))], Relation::Le, q(0, 1));
        lp.add(vec![(0, q(-1, 1)), (2, q(-1, 1))], Relation::Le, q(0, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, q(2, 3));
        assert_eq!(s.values[0], q(-2, 3));
    }

    #[test]
    fn ge_constraints_and_redundant_rows() {
        // min x + y s.t. x + y >= 2, 2x + 2y = 4, x - y = 0 => 2
        let mut lp = LinearProgram::new(vec![VarKind::NonNegative; 2]);
        lp.objective = vec![q(1, 1), q(1, 1)];
        lp.add(vec![(0, q(1, 1)), (1, q(1, 1))], Relation::Ge, q(2, 1));
        lp.add(vec![(0, q(2, 1)), (1, q(2, 1))], Relation::Eq, q(4, 1));
        lp.add(vec![(0, q(1, 1)), (1, q(-1, 1))], Relation::Eq, q(0, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, q(2, 1));
        assert_eq!(s.values, vec![q(1, 1), q(1, 1)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![VarKind::NonNegative]);
        lp.objective = vec![q(1, 1)];
        lp.add(vec![(0, q(1, 1))], Relation::Le, q(-1, 1));
        assert_eq!(lp.solve().unwrap_err(), LpError::Infeasible);

        let mut lp = LinearProgram::new(vec![VarKind::Free]);
        lp.objective = vec![q(1, 1)];
        assert_eq!(lp.solve().unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's classic cycling example; Bland's rule must terminate.
        let mut lp = LinearProgram::new(vec![VarKind::NonNegative; 4]);
        lp.objective = vec![q(-3, 4), q(150, 1), q(-1, 50), q(6, 1)];
        lp.add(
            vec![(0, q(1, 4)), (1, q(-60, 1)), (2, q(-1, 25)), (3, q(9, 1))],
            Relation::Le,
            q(0, 1),
        );
        lp.add(
            vec![(0, q(1, 2)), (1, q(-90, 1)), (2, q(-1, 50)), (3, q(3, 1))],
            Relation::Le,
            q(0, 1),
        );
        lp.add(vec![(2, q(1, 1))], Relation::Le, q(1, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, q(-1, 20));
    }
}
