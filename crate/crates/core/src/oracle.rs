//! Floating-point cross-check for projection constants.
//!
//! Writes every projection onto `E` as `P = Bᵀ(C₀ + Z·Nᵀ)` where
//! `C₀ = (BBᵀ)⁻¹B` and the columns of `N` are an orthonormal basis of
//! `ker B`, then minimizes the convex piecewise-linear `Z ↦ ‖P‖∞→∞` with the
//! central-cut ellipsoid method. Only function values and subgradients are
//! used. Each step also yields the lower bound `f(x) − √(gᵀHg)`, so a restart
//! stops once its upper and lower bounds are within tolerance.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Subspace;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Iteration cap per restart; `None` scales with the parameter count.
    pub max_iter: Option<usize>,
}

impl OracleConfig {
    pub fn with_tol(tol: f64) -> Self {
        OracleConfig {
            tol,
            restarts: 3,
            seed: 0,
            max_iter: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleEstimate {
    /// Best objective value found (an upper bound up to rounding).
    pub value: f64,
    /// Best certified lower bound from the converged restarts.
    pub lower: f64,
    pub iterations: usize,
}

struct Problem {
    /// Bᵀ as n×k.
    bt: DMatrix<f64>,
    /// BᵀC₀, the base projection.
    p0: DMatrix<f64>,
    /// Orthonormal basis of ker B, n×(n−k).
    null: DMatrix<f64>,
    k: usize,
    n: usize,
}

impl Problem {
    fn new(subspace: &Subspace) -> Result<Self> {
        let (k, n) = (subspace.dim(), subspace.ambient_dim());
        let basis = subspace.basis();
        let b = DMatrix::from_fn(k, n, |i, j| basis[(i, j)].to_f64());
        let gram = &b * b.transpose();
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| Error::OracleInconclusive("Gram matrix is singular".into()))?;
        let c0 = gram_inv * &b;
        let bt = b.transpose();
        let p0 = &bt * &c0;
        let null = null_space(&b);
        Ok(Problem { bt, p0, null, k, n })
    }

    fn dim(&self) -> usize {
        self.k * (self.n - self.k)
    }

    fn projection(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let m = self.n - self.k;
        if m == 0 {
            return self.p0.clone();
        }
        let zm = DMatrix::from_column_slice(self.k, m, z.as_slice());
        &self.p0 + &self.bt * zm * self.null.transpose()
    }

    /// Objective and one subgradient.
    fn eval(&self, z: &DVector<f64>) -> (f64, DVector<f64>) {
        let p = self.projection(z);
        let (mut best, mut row) = (f64::NEG_INFINITY, 0);
        for i in 0..self.n {
            let s: f64 = p.row(i).iter().map(|x| x.abs()).sum();
            if s > best {
                best = s;
                row = i;
            }
        }
        let m = self.n - self.k;
        let signs = DVector::from_fn(self.n, |j, _| if p[(row, j)] < 0.0 { -1.0 } else { 1.0 });
        // ∂f/∂Z[a][l] = B[a][row] · (signsᵀ N)_l
        let sn = self.null.transpose() * signs;
        let mut g = DVector::zeros(self.k * m);
        for l in 0..m {
            for a in 0..self.k {
                g[l * self.k + a] = self.bt[(row, a)] * sn[l];
            }
        }
        (best, g)
    }

    /// Radius of a ball around `Z = 0` containing every minimizer.
    fn radius(&self, f0: f64) -> f64 {
        let gram_inv_b = self
            .bt
            .clone()
            .pseudo_inverse(1e-12)
            .map(|m| m.norm())
            .unwrap_or(1.0);
        (gram_inv_b * (self.n as f64).sqrt() * f0).max(1.0) * 1.01
    }
}

fn null_space(b: &DMatrix<f64>) -> DMatrix<f64> {
    let (k, n) = b.shape();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut row_space: Vec<DVector<f64>> = Vec::new();
    let reduce = |v: &mut DVector<f64>, against: &[DVector<f64>]| {
        for _ in 0..2 {
            for u in against {
                let c = u.dot(v);
                *v -= u * c;
            }
        }
    };
    for i in 0..k {
        let mut v = b.row(i).transpose();
        reduce(&mut v, &row_space);
        let nv = v.norm();
        if nv > 1e-12 {
            row_space.push(v / nv);
        }
    }
    for j in 0..n {
        if row_space.len() + basis.len() == n {
            break;
        }
        let mut v = DVector::zeros(n);
        v[j] = 1.0;
        reduce(&mut v, &row_space);
        reduce(&mut v, &basis);
        let nv = v.norm();
        if nv > 1e-8 {
            basis.push(v / nv);
        }
    }
    if basis.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&basis)
}

/// Estimate of `λ(E, ℓ∞ⁿ)` to within `tol`.
pub fn float_oracle(subspace: &Subspace, tol: f64) -> Result<f64> {
    Ok(float_oracle_with(subspace, &OracleConfig::with_tol(tol))?.value)
}

pub fn float_oracle_with(subspace: &Subspace, config: &OracleConfig) -> Result<OracleEstimate> {
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "oracle tolerance must be positive".into(),
        ));
    }
    let problem = Problem::new(subspace)?;
    let d = problem.dim();
    if d == 0 {
        let (v, _) = problem.eval(&DVector::zeros(0));
        return Ok(OracleEstimate {
            value: v,
            lower: v,
            iterations: 0,
        });
    }
    let (f0, _) = problem.eval(&DVector::zeros(d));
    let radius = problem.radius(f0);
    let max_iter = config.max_iter.unwrap_or(20_000 + 600 * d * d);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut best: Option<OracleEstimate> = None;
    let mut total_iter = 0;
    for _ in 0..config.restarts.max(1) {
        let mut dir = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        let dn = dir.norm();
        if dn > 0.0 {
            dir /= dn;
        }
        let center = dir * (rng.gen_range(0.0..0.5) * radius);
        let run = ellipsoid(&problem, center, 1.5 * radius, config.tol, max_iter);
        total_iter += run.iterations;
        if run.value - run.lower <= config.tol {
            best = Some(match best {
                Some(b) if b.value <= run.value => b,
                _ => run,
            });
        }
    }
    match best {
        Some(mut b) => {
            b.iterations = total_iter;
            Ok(b)
        }
        None => Err(Error::OracleInconclusive(format!(
            "no restart reached tolerance {} within {max_iter} iterations",
            config.tol
        ))),
    }
}

/// Ellipsoid `{x + A·u : ‖u‖ ≤ 1}` kept in factored form so the shape
/// matrix `AAᵀ` stays positive semidefinite under rounding.
fn ellipsoid(
    problem: &Problem,
    mut x: DVector<f64>,
    radius: f64,
    tol: f64,
    max_iter: usize,
) -> OracleEstimate {
    let n = x.len();
    let d = n as f64;
    let mut a = DMatrix::<f64>::identity(n, n) * radius;
    let (mut upper, mut lower) = (f64::INFINITY, f64::NEG_INFINITY);
    let shrink = if n > 1 {
        1.0 - ((d - 1.0) / (d + 1.0)).sqrt()
    } else {
        0.5
    };
    let scale = if n > 1 { d / (d * d - 1.0).sqrt() } else { 1.0 };
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let (f, g) = problem.eval(&x);
        upper = upper.min(f);
        let atg = a.tr_mul(&g);
        let width = atg.norm();
        if width == 0.0 {
            // zero subgradient: x is a minimizer
            lower = lower.max(f);
            break;
        }
        if !width.is_finite() {
            break;
        }
        lower = lower.max(f - width);
        if upper - lower <= tol * 0.25 {
            break;
        }
        let p = atg / width;
        let ap = &a * &p;
        x -= &ap / (d + 1.0);
        // A ← scale · A (I − shrink · p pᵀ)
        a -= &ap * p.transpose() * shrink;
        a *= scale;
    }
    OracleEstimate {
        value: upper,
        lower,
        iterations: it,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_sum_in_three() {
        let v = float_oracle(&Subspace::kernel_of_sum(3).unwrap(), 1e-6).unwrap();
        assert!((v - 4.0 / 3.0).abs() <= 1e-6, "{v}");
    }

    #[test]
    fn full_space() {
        let v = float_oracle(&Subspace::full(2).unwrap(), 1e-6).unwrap();
        assert!((v - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn diagonal_line() {
        let v = float_oracle(&Subspace::constants(2).unwrap(), 1e-6).unwrap();
        assert!((v - 1.0).abs() <= 1e-6, "{v}");
    }

    #[test]
    fn bounds_bracket_the_estimate() {
        let est = float_oracle_with(
            &Subspace::kernel_of_sum(5).unwrap(),
            &OracleConfig::with_tol(1e-7),
        )
        .unwrap();
        assert!(est.lower <= est.value);
        assert!(est.value - est.lower <= 1e-7);
        assert!((est.value - 1.6).abs() <= 1e-7);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let cfg = OracleConfig {
            tol: 1e-9,
            restarts: 1,
            seed: 0,
            max_iter: Some(3),
        };
        assert!(matches!(
            float_oracle_with(&Subspace::kernel_of_sum(4).unwrap(), &cfg),
            Err(Error::OracleInconclusive(_))
        ));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(float_oracle(&Subspace::full(2).unwrap(), 0.0).is_err());
    }
}
