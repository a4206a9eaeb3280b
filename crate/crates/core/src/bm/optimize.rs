//! Minimizing `g(a)` over `a > 0`.
//!
//! `g'(a) = 0` reduces to `a³ − 6a − 4 = (a + 2)(a² − 2a − 2) = 0`, whose only
//! positive root is `1 + √3`, giving `g = 9 + 6√3`. The numeric route below
//! uses golden-section search with exact rational comparisons of `g`, so it
//! does not depend on the closed form and is not limited by float noise near
//! the flat minimum.

use serde::Serialize;

use crate::bm::params::{bound_g, bound_g_exact};
use crate::error::{Error, Result};
use crate::rat::Rat;

/// `1/φ = (√5 − 1)/2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormOptimum {
    pub a_star: f64,
    pub g_star: f64,
    pub cubic_residual: f64,
}

pub fn cubic(a: f64) -> f64 {
    a * a * a - 6.0 * a - 4.0
}

pub fn optimize_closed_form() -> ClosedFormOptimum {
    let a_star = 1.0 + 3f64.sqrt();
    ClosedFormOptimum {
        a_star,
        g_star: 9.0 + 6.0 * 3f64.sqrt(),
        cubic_residual: cubic(a_star).abs(),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NumericOptimum {
    pub a_hat: f64,
    pub g_hat: f64,
    pub iterations: usize,
}

/// Golden-section search for the minimizer of `g` on `[lo, hi]`, run for the
/// fixed number of steps that shrinks the bracket below `tol`.
pub fn optimize_numeric(lo: f64, hi: f64, tol: f64) -> Result<NumericOptimum> {
    if !(lo > 0.0 && lo < hi && hi.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid bracket [{lo}, {hi}] with tolerance {tol}"
        )));
    }
    let g_exact = |a: f64| bound_g_exact(&Rat::from_f64(a).expect("finite")).expect("a > 0");
    let (a_hat, iterations) = golden_section(lo, hi, tol, g_exact);
    Ok(NumericOptimum {
        a_hat,
        g_hat: bound_g(a_hat)?,
        iterations,
    })
}

/// Minimizes a unimodal `f` on `[lo, hi]`; `f` may return any ordered type.
pub fn golden_section<T: PartialOrd>(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    f: impl Fn(f64) -> T,
) -> (f64, usize) {
    let steps = ((tol / (hi - lo)).ln() / INV_PHI.ln()).ceil().max(0.0) as usize;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..steps {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    (0.5 * (lo + hi), steps)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundComparison {
    pub ours: f64,
    pub prior: f64,
    pub improvement: f64,
    pub strict: bool,
}

/// `9 + 6√3` against the earlier bound `(3 + √2)² = 11 + 6√2`.
pub fn compare_with_prior_bound() -> BoundComparison {
    let ours = 9.0 + 6.0 * 3f64.sqrt();
    let prior = 11.0 + 6.0 * 2f64.sqrt();
    BoundComparison {
        ours,
        prior,
        improvement: prior - ours,
        strict: ours < prior,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A_STAR: f64 = 2.732_050_807_568_877;
    const G_STAR: f64 = 19.392_304_845_413_264;

    #[test]
    fn closed_form() {
        let c = optimize_closed_form();
        assert!((c.a_star - A_STAR).abs() < 1e-12);
        assert!((c.g_star - G_STAR).abs() < 1e-12);
        assert!(c.cubic_residual <= 1e-10);
        // (1 + √3)³ = 10 + 6√3
        let s3 = 3f64.sqrt();
        assert!(((1.0 + s3).powi(3) - (10.0 + 6.0 * s3)).abs() < 1e-12);
        assert!((bound_g(c.a_star).unwrap() - c.g_star).abs() < 1e-12);
    }

    #[test]
    fn numeric_matches() {
        let n = optimize_numeric(0.1, 10.0, 1e-8).unwrap();
        assert!((n.a_hat - A_STAR).abs() <= 1e-8, "{}", n.a_hat);
        assert!(n.g_hat >= G_STAR - 1e-9);
        let n = optimize_numeric(1.0, 3.0, 1e-12).unwrap();
        assert!((n.a_hat - A_STAR).abs() <= 1e-11, "{}", n.a_hat);
    }

    #[test]
    fn grid_values() {
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&a| bound_g(a).unwrap())
            .collect();
        assert!(vals.iter().all(|&v| v >= G_STAR));
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        // g(2) = 4 + 9 + 6 + 1
        assert_eq!(min, 20.0);
        assert_eq!(bound_g(4.0).unwrap(), 20.25);
    }

    #[test]
    fn bad_brackets() {
        assert!(optimize_numeric(3.0, 3.0, 1e-8).is_err());
        assert!(optimize_numeric(5.0, 1.0, 1e-8).is_err());
        assert!(optimize_numeric(0.0, 1.0, 1e-8).is_err());
        assert!(optimize_numeric(0.1, 10.0, 0.0).is_err());
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, _) = golden_section(-3.0, 5.0, 1e-9, |x| (x - 1.25) * (x - 1.25));
        assert!((x - 1.25).abs() < 1e-8);
    }

    #[test]
    fn prior_bound() {
        let c = compare_with_prior_bound();
        assert!(c.strict);
        assert!((c.prior - 19.49).abs() < 5e-3);
        assert!((c.ours - 19.39).abs() < 5e-3);
        assert!((c.improvement - 0.093).abs() < 1e-3);
    }
}
