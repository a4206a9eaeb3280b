//! Parameter selection for amplifying a base projection constant `α ∈ (1, 2]`
//! to a target `λ` by iterating the zero-sum construction `m` times with `N`
//! copies, so that `μ_N^m · α = λ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::minproj::{projection_constant_within, LpBudget};
use crate::rat::Rat;
use crate::zero_sum::{mu, sigma_subspace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleEntry {
    pub k: u32,
    pub lambda_k: Rat,
    pub ambient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmplificationPlan {
    #[serde(rename = "lambda")]
    pub lambda_target: Rat,
    pub m: u32,
    #[serde(rename = "N")]
    pub copies: Option<usize>,
    #[serde(rename = "mu_N")]
    pub mu_n: Option<Rat>,
    pub alpha: Rat,
    pub schedule: Vec<ScheduleEntry>,
}

impl AmplificationPlan {
    /// A plan with explicitly chosen `N` and `m` for base constant `alpha`;
    /// the target becomes `μ_N^m · α`. No inequalities are imposed.
    pub fn with_copies(alpha: Rat, copies: usize, m: u32) -> Result<Self> {
        if copies < 2 {
            return Err(Error::InvalidArgument("plan needs N >= 2".into()));
        }
        let mu_n = mu(copies);
        let lambda = &mu_n.pow(m) * &alpha;
        Ok(AmplificationPlan {
            schedule: schedule(&alpha, Some((copies, &mu_n)), m),
            lambda_target: lambda,
            m,
            copies: Some(copies),
            mu_n: Some(mu_n),
            alpha,
        })
    }
}

fn schedule(alpha: &Rat, step: Option<(usize, &Rat)>, m: u32) -> Vec<ScheduleEntry> {
    (0..=m)
        .map(|k| match step {
            Some((copies, mu_n)) => ScheduleEntry {
                k,
                lambda_k: &mu_n.pow(k) * alpha,
                ambient: format!("(ℓ∞)^({copies}^{k})"),
            },
            None => ScheduleEntry {
                k,
                lambda_k: alpha.clone(),
                ambient: "ℓ∞".into(),
            },
        })
        .collect()
}

/// For `λ > 2`: the `m` with `2^m ≤ λ < 2^{m+1}`, the smallest `N ≥ 3` with
/// `μ_N^m > λ/2`, and `α = λ/μ_N^m`. For `λ ∈ (1, 2]`: `m = 0`, `α = λ`.
pub fn plan_parameters(lambda: &Rat) -> Result<AmplificationPlan> {
    if *lambda <= 1 {
        return Err(Error::InvalidArgument(format!(
            "target constant must exceed 1, got {lambda}"
        )));
    }
    if *lambda <= 2 {
        return Ok(AmplificationPlan {
            lambda_target: lambda.clone(),
            m: 0,
            copies: None,
            mu_n: None,
            alpha: lambda.clone(),
            schedule: schedule(lambda, None, 0),
        });
    }
    let two = Rat::int(2);
    let mut m = 1u32;
    while two.pow(m + 1) <= *lambda {
        m += 1;
    }
    let half = lambda / &two;
    let mut copies = 3usize;
    while mu(copies).pow(m) <= half {
        copies += 1;
    }
    let mu_n = mu(copies);
    let alpha = lambda / &mu_n.pow(m);
    let plan = AmplificationPlan {
        schedule: schedule(&alpha, Some((copies, &mu_n)), m),
        lambda_target: lambda.clone(),
        m,
        copies: Some(copies),
        mu_n: Some(mu_n),
        alpha,
    };
    check_plan(&plan)?;
    Ok(plan)
}

/// Every inequality the plan must satisfy, as exact comparisons.
pub fn check_plan(plan: &AmplificationPlan) -> Result<()> {
    let fail = |what: &str| Err(Error::Integrity(format!("plan violates {what}")));
    let lambda = &plan.lambda_target;
    if plan.schedule.len() != plan.m as usize + 1
        || plan.schedule[0].lambda_k != plan.alpha
        || &plan.schedule[plan.m as usize].lambda_k != lambda
    {
        return fail("schedule endpoints");
    }
    if plan.m == 0 {
        if !(*lambda > 1 && *lambda <= 2 && &plan.alpha == lambda) {
            return fail("m = 0 range");
        }
        return Ok(());
    }
    let (Some(copies), Some(mu_n)) = (plan.copies, plan.mu_n.as_ref()) else {
        return fail("presence of N");
    };
    let two = Rat::int(2);
    let mum = mu_n.pow(plan.m);
    let half = lambda / &two;
    let checks = [
        (two.pow(plan.m) <= *lambda, "2^m <= λ"),
        (*lambda < two.pow(plan.m + 1), "λ < 2^(m+1)"),
        (copies >= 3, "N >= 3"),
        (mum > half, "μ_N^m > λ/2"),
        (&mum < lambda, "μ_N^m < λ"),
        (plan.alpha > 1 && plan.alpha <= 2, "α ∈ (1, 2]"),
        (&(&mum * &plan.alpha) == lambda, "μ_N^m·α = λ"),
        (
            copies == 3 || mu(copies - 1).pow(plan.m) <= half,
            "minimality of N",
        ),
    ];
    for (ok, what) in checks {
        if !ok {
            return fail(what);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifiedStep {
    pub k: u32,
    pub expected: Rat,
    pub certified: Rat,
    pub equal: bool,
    pub ambient_dim: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    pub base_lambda: Rat,
    pub steps: Vec<CertifiedStep>,
    /// Set when the next step would exceed the LP budget.
    pub truncated: bool,
}

impl ScheduleReport {
    pub fn all_equal(&self) -> bool {
        self.steps.iter().all(|s| s.equal)
    }
}

/// Builds `Y_k = Σ_N(Y_{k−1})` from `Y_0 = base` and certifies
/// `λ(Y_k) = μ_N^k · α` by exact LP for `k = 1..=max_steps`.
pub fn demonstrate_schedule(
    base: &Subspace,
    plan: &AmplificationPlan,
    max_steps: u32,
    budget: &LpBudget,
) -> Result<ScheduleReport> {
    if max_steps > plan.m {
        return Err(Error::InvalidArgument(format!(
            "max_steps {max_steps} exceeds the plan length {}",
            plan.m
        )));
    }
    let base_lambda = projection_constant_within(base, budget)?.lambda;
    if base_lambda != plan.alpha {
        return Err(Error::BaseConstantMismatch {
            expected: plan.alpha.to_string(),
            found: base_lambda.to_string(),
        });
    }
    let mut steps = Vec::new();
    let mut truncated = false;
    if let (Some(copies), Some(mu_n)) = (plan.copies, plan.mu_n.as_ref()) {
        let mut current = base.clone();
        for k in 1..=max_steps {
            let next = sigma_subspace(&current, copies)?.space;
            let certified = match projection_constant_within(&next, budget) {
                Ok(r) => r.lambda,
                Err(Error::BudgetExceeded(_)) => {
                    truncated = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            let expected = &mu_n.pow(k) * &plan.alpha;
            steps.push(CertifiedStep {
                k,
                equal: certified == expected,
                expected,
                certified,
                ambient_dim: next.ambient_dim(),
                dim: next.dim(),
            });
            current = next;
        }
    }
    Ok(ScheduleReport {
        base_lambda,
        steps,
        truncated,
    })
}

/// Residue-class interleaving of `K` sequences into one: entry `i` of block
/// `j` goes to index `j + K·i`. Restricted to indices below `index_bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleaveTable {
    blocks: usize,
    index_bound: usize,
}

pub fn interleave_isometry(blocks: usize, index_bound: usize) -> Result<InterleaveTable> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("interleaving needs K >= 1".into()));
    }
    if index_bound < blocks {
        return Err(Error::InvalidArgument(format!(
            "index bound {index_bound} is below K = {blocks}"
        )));
    }
    Ok(InterleaveTable {
        blocks,
        index_bound,
    })
}

impl InterleaveTable {
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// `φ_j(i) = j + K·i`.
    pub fn forward(&self, block: usize, index: usize) -> usize {
        block + self.blocks * index
    }

    pub fn inverse(&self, target: usize) -> (usize, usize) {
        (target % self.blocks, target / self.blocks)
    }

    /// The targets of block `j` below the bound.
    pub fn block_indices(&self, block: usize) -> Vec<usize> {
        (block..self.index_bound).step_by(self.blocks).collect()
    }

    /// Interleaves `K` finitely supported sequences into one.
    pub fn interleave(&self, seqs: &[Vec<Rat>]) -> Result<Vec<Rat>> {
        if seqs.len() != self.blocks {
            return Err(Error::Dimension(format!(
                "expected {} sequences, got {}",
                self.blocks,
                seqs.len()
            )));
        }
        let len = seqs.iter().map(Vec::len).max().unwrap_or(0) * self.blocks;
        let mut out = vec![Rat::zero(); len];
        for (j, s) in seqs.iter().enumerate() {
            for (i, v) in s.iter().enumerate() {
                out[self.forward(j, i)] = v.clone();
            }
        }
        Ok(out)
    }

    pub fn deinterleave(&self, seq: &[Rat]) -> Vec<Vec<Rat>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (t, v) in seq.iter().enumerate() {
            let (j, i) = self.inverse(t);
            if out[j].len() <= i {
                out[j].resize(i + 1, Rat::zero());
            }
            out[j][i] = v.clone();
        }
        out
    }
}
