//! Relative projection constants `λ(E, ℓ∞ⁿ)` by exact linear programming.
//!
//! A projection onto `E = span(rows of B)` is written `P = BᵀC` with
//! `C·Bᵀ = I_k`; every such `P` is idempotent with range `E`, and every
//! projection onto `E` arises this way. Minimizing the largest absolute row
//! sum of `P` over this affine set is a linear program once each `|P_ij|` is
//! majorized by a variable `M_ij`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Subspace};
use crate::rat::Rat;
use crate::simplex::{LinearProgram, Relation, VarKind};

/// The minimal-projection LP for one subspace.
///
/// Variable layout: `C[a][j]` at `a·n + j` (free), `M[i][j]` at
/// `k·n + i·n + j` (non-negative), then the bound `t`.
#[derive(Debug, Clone)]
pub struct ProjectionLP {
    subspace: Subspace,
    program: LinearProgram,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionConstantResult {
    pub lambda: Rat,
    #[serde(skip)]
    pub minimizer_c: Mat,
    pub projection: Mat,
    pub witness: Vec<i8>,
    pub attained: bool,
}

impl ProjectionLP {
    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn program(&self) -> &LinearProgram {
        &self.program
    }

    pub fn c_index(&self, a: usize, j: usize) -> usize {
        a * self.subspace.ambient_dim() + j
    }

    pub fn m_index(&self, i: usize, j: usize) -> usize {
        let (k, n) = (self.subspace.dim(), self.subspace.ambient_dim());
        k * n + i * n + j
    }

    pub fn t_index(&self) -> usize {
        let (k, n) = (self.subspace.dim(), self.subspace.ambient_dim());
        k * n + n * n
    }

    /// Reads the `k×n` coefficient matrix out of an assignment.
    pub fn coefficients(&self, values: &[Rat]) -> Mat {
        let (k, n) = (self.subspace.dim(), self.subspace.ambient_dim());
        Mat::from_fn(k, n, |a, j| values[self.c_index(a, j)].clone())
    }
}

pub fn build_projection_lp(subspace: &Subspace) -> ProjectionLP {
    let b = subspace.basis();
    let (k, n) = (subspace.dim(), subspace.ambient_dim());
    let mut kinds = vec![VarKind::Free; k * n];
    kinds.extend(std::iter::repeat_n(VarKind::NonNegative, n * n + 1));
    let mut program = LinearProgram::new(kinds);
    let lp_shell = ProjectionLP {
        subspace: subspace.clone(),
        program: LinearProgram::new(Vec::new()),
    };
    let t = lp_shell.t_index();
    program.objective[t] = Rat::one();

    // C·Bᵀ = I_k
    for a in 0..k {
        for bb in 0..k {
            let coeffs = (0..n)
                .filter(|&j| !b[(bb, j)].is_zero())
                .map(|j| (lp_shell.c_index(a, j), b[(bb, j)].clone()))
                .collect();
            let rhs = if a == bb { Rat::one() } else { Rat::zero() };
            program.add(coeffs, Relation::Eq, rhs);
        }
    }
    // ±(BᵀC)[i][j] − M[i][j] ≤ 0
    for i in 0..n {
        for j in 0..n {
            for sign in [Rat::one(), -Rat::one()] {
                let mut coeffs: Vec<(usize, Rat)> = (0..k)
                    .filter(|&a| !b[(a, i)].is_zero())
                    .map(|a| (lp_shell.c_index(a, j), &sign * &b[(a, i)]))
                    .collect();
                coeffs.push((lp_shell.m_index(i, j), -Rat::one()));
                program.add(coeffs, Relation::Le, Rat::zero());
            }
        }
    }
    // Σ_j M[i][j] − t ≤ 0
    for i in 0..n {
        let mut coeffs: Vec<(usize, Rat)> = (0..n)
            .map(|j| (lp_shell.m_index(i, j), Rat::one()))
            .collect();
        coeffs.push((t, -Rat::one()));
        program.add(coeffs, Relation::Le, Rat::zero());
    }
    ProjectionLP {
        subspace: subspace.clone(),
        program,
    }
}

/// Optimal objective and an optimal vertex of the projection LP.
pub fn solve_lp_exact(lp: &ProjectionLP) -> Result<(Rat, Vec<Rat>)> {
    let sol = lp.program.solve()?;
    Ok((sol.objective, sol.values))
}

/// `P = BᵀC`.
pub fn projection_from_coefficients(subspace: &Subspace, c: &Mat) -> Result<Mat> {
    subspace.basis().transpose().compose(c)
}

/// Exact `λ(E, ℓ∞ⁿ)` with a minimal projection and a norm witness. The
/// returned projection is checked for idempotence, for fixing `E` and for
/// having range in `E`.
pub fn projection_constant(subspace: &Subspace) -> Result<ProjectionConstantResult> {
    let (k, n) = (subspace.dim(), subspace.ambient_dim());
    let (lambda, c) = if k == n {
        let c =
            subspace.basis().transpose().inverse().ok_or_else(|| {
                Error::SolverIntegrity("full-rank basis is not invertible".into())
            })?;
        (Rat::one(), c)
    } else {
        let lp = build_projection_lp(subspace);
        let (obj, values) = solve_lp_exact(&lp)?;
        (obj, lp.coefficients(&values))
    };
    let projection = projection_from_coefficients(subspace, &c)?;
    check_projection_onto(subspace, &projection)?;
    let norm = projection.inf_op_norm();
    if norm.value != lambda {
        return Err(Error::SolverIntegrity(format!(
            "LP optimum {lambda} differs from the norm {} of its projection",
            norm.value
        )));
    }
    if lambda < 1 {
        return Err(Error::SolverIntegrity(format!(
            "projection constant {lambda} < 1"
        )));
    }
    Ok(ProjectionConstantResult {
        lambda,
        minimizer_c: c,
        projection,
        witness: norm.witness,
        attained: true,
    })
}

/// Verifies that `p` is a projection of `ℓ∞ⁿ` onto `subspace`.
pub fn check_projection_onto(subspace: &Subspace, p: &Mat) -> Result<()> {
    let n = subspace.ambient_dim();
    if p.rows() != n || p.cols() != n {
        return Err(Error::Dimension(format!("projection must be {n}x{n}")));
    }
    if !p.is_idempotent() {
        return Err(Error::SolverIntegrity(
            "projection is not idempotent".into(),
        ));
    }
    for v in subspace.basis().to_rows() {
        if p.apply(&v)? != v {
            return Err(Error::SolverIntegrity(
                "projection does not fix the subspace".into(),
            ));
        }
    }
    for j in 0..n {
        if !subspace.contains(&p.column(j)) {
            return Err(Error::SolverIntegrity(format!(
                "column {j} leaves the subspace"
            )));
        }
    }
    Ok(())
}

/// Size limits for exact LP solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpBudget {
    pub max_ambient_dim: usize,
    pub max_subspace_dim: usize,
}

impl Default for LpBudget {
    fn default() -> Self {
        LpBudget {
            max_ambient_dim: 12,
            max_subspace_dim: 6,
        }
    }
}

impl LpBudget {
    pub fn check(&self, subspace: &Subspace) -> Result<()> {
        if subspace.ambient_dim() > self.max_ambient_dim || subspace.dim() > self.max_subspace_dim {
            return Err(Error::BudgetExceeded(format!(
                "subspace of dimension {} in ambient dimension {} exceeds the budget ({} / {})",
                subspace.dim(),
                subspace.ambient_dim(),
                self.max_subspace_dim,
                self.max_ambient_dim
            )));
        }
        Ok(())
    }
}

/// [`projection_constant`] guarded by a size budget.
pub fn projection_constant_within(
    subspace: &Subspace,
    budget: &LpBudget,
) -> Result<ProjectionConstantResult> {
    budget.check(subspace)?;
    projection_constant(subspace)
}

/// A random projection onto `subspace`: `P = Bᵀ(G·Bᵀ)⁻¹G` for a random
/// integer matrix `G` with entries in `[-range, range]`.
pub fn random_projection<R: rand::Rng>(subspace: &Subspace, range: i64, rng: &mut R) -> Mat {
    let b = subspace.basis();
    let (k, n) = (subspace.dim(), subspace.ambient_dim());
    loop {
        let g = Mat::from_fn(k, n, |_, _| Rat::int(rng.gen_range(-range..=range)));
        let gbt = g.compose(&b.transpose()).expect("shapes agree");
        if let Some(inv) = gbt.inverse() {
            let c = inv.compose(&g).expect("shapes agree");
            return projection_from_coefficients(subspace, &c).expect("shapes agree");
        }
    }
}
