//! The one-parameter family `μ = 1/a`, `ν = √(2a+1)/a`, `b = a/√(2a+1)` and
//! the resulting bound `K(a) = 2ν + √(2a+1)`, `g(a) = K(a)²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Exact parameters, available when `2a + 1` is the square of a rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactParams {
    pub a: Rat,
    pub mu: Rat,
    pub nu: Rat,
    pub b: Rat,
    pub root: Rat,
    #[serde(rename = "K")]
    pub k: Rat,
    pub g: Rat,
}

#[derive(Debug, Clone, Serialize)]
pub struct BMParameterSet {
    pub a: f64,
    pub mu: f64,
    pub nu: f64,
    pub b: f64,
    pub root: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactParams>,
}

impl BMParameterSet {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Largest deviation among the four matching identities
    /// `bν = 1`, `aν = √(2a+1)`, `b(μ+2) = √(2a+1)`, `(μ+2)/ν = √(2a+1)`.
    pub fn identity_residual(&self) -> f64 {
        [
            self.b * self.nu - 1.0,
            self.a * self.nu - self.root,
            self.b * (self.mu + 2.0) - self.root,
            (self.mu + 2.0) / self.nu - self.root,
            self.k * self.k - self.g,
        ]
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
    }
}

impl ExactParams {
    pub fn identities_hold(&self) -> bool {
        let two = Rat::int(2);
        let mu2 = &self.mu + &two;
        &self.b * &self.nu == Rat::one()
            && &self.a * &self.nu == self.root
            && &self.b * &mu2 == self.root
            && mu2.checked_div(&self.nu).ok().as_ref() == Some(&self.root)
            && &self.k * &self.k == self.g
            && &(&self.a * &self.a) * &self.g
                == &(&(&self.a + &two) * &(&self.a + &two)) * &(&two * &self.a + Rat::one())
    }
}

fn check_positive(a: f64) -> Result<()> {
    if a.is_nan() || a <= 0.0 || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "parameter a must be positive, got {a}"
        )));
    }
    Ok(())
}

pub fn bm_params(a: f64) -> Result<BMParameterSet> {
    check_positive(a)?;
    match Rat::from_f64(a) {
        Some(r) if exact_params(&r).is_ok() => bm_params_rat(&r),
        _ => Ok(float_params(a, None)),
    }
}

pub fn bm_params_rat(a: &Rat) -> Result<BMParameterSet> {
    if !a.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "parameter a must be positive, got {a}"
        )));
    }
    let exact = exact_params(a).ok();
    Ok(float_params(a.to_f64(), exact))
}

fn float_params(a: f64, exact: Option<ExactParams>) -> BMParameterSet {
    if let Some(e) = exact {
        return BMParameterSet {
            a: e.a.to_f64(),
            mu: e.mu.to_f64(),
            nu: e.nu.to_f64(),
            b: e.b.to_f64(),
            root: e.root.to_f64(),
            k: e.k.to_f64(),
            g: e.g.to_f64(),
            exact: Some(e),
        };
    }
    let root = (2.0 * a + 1.0).sqrt();
    let nu = root / a;
    let k = 2.0 * nu + root;
    BMParameterSet {
        a,
        mu: 1.0 / a,
        nu,
        b: a / root,
        root,
        k,
        g: bound_g(a).unwrap_or(f64::NAN),
        exact: None,
    }
}

/// Exact parameters; fails with [`Error::NotExact`] unless `2a + 1` is a
/// rational square.
pub fn exact_params(a: &Rat) -> Result<ExactParams> {
    if !a.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "parameter a must be positive, got {a}"
        )));
    }
    let root = (Rat::int(2) * a + Rat::one())
        .sqrt_exact()
        .ok_or_else(|| Error::NotExact(format!("2a+1 is not a rational square for a = {a}")))?;
    let nu = root.checked_div(a)?;
    let b = a.checked_div(&root)?;
    let k = Rat::int(2) * &nu + &root;
    Ok(ExactParams {
        mu: a.recip()?,
        g: bound_g_exact(a)?,
        a: a.clone(),
        nu,
        b,
        root,
        k,
    })
}

/// `g(a) = 2a + 9 + 12/a + 4/a²`.
pub fn bound_g(a: f64) -> Result<f64> {
    check_positive(a)?;
    Ok(2.0 * a + 9.0 + 12.0 / a + 4.0 / (a * a))
}

pub fn bound_g_exact(a: &Rat) -> Result<Rat> {
    if !a.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "parameter a must be positive, got {a}"
        )));
    }
    let inv = a.recip()?;
    Ok(Rat::int(2) * a + Rat::int(9) + Rat::int(12) * &inv + Rat::int(4) * &inv * &inv)
}

/// Positive rationals with `2a + 1` a rational square: `a = (p² − q²)/(2q²)`.
pub fn exact_parameter(p: i64, q: i64) -> Result<Rat> {
    Rat::new(p * p - q * q, 2 * q * q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rat {
        Rat::frac(p, d)
    }

    #[test]
    fn a_equals_four() {
        let p = exact_params(&Rat::int(4)).unwrap();
        assert_eq!(p.mu, q(1, 4));
        assert_eq!(p.nu, q(3, 4));
        assert_eq!(p.b, q(4, 3));
        assert_eq!(p.root, Rat::int(3));
        assert_eq!(p.k, q(9, 2));
        assert_eq!(p.g, q(81, 4));
        assert!(p.identities_hold());
        assert!(bm_params(4.0).unwrap().is_exact());
    }

    #[test]
    fn a_equals_three_halves() {
        let p = exact_params(&q(3, 2)).unwrap();
        assert_eq!(p.root, Rat::int(2));
        assert_eq!(p.nu, q(4, 3));
        assert_eq!(p.k, q(14, 3));
        assert_eq!(p.g, q(196, 9));
        assert_eq!(bound_g_exact(&q(3, 2)).unwrap(), q(196, 9));
    }

    #[test]
    fn optimum_parameter() {
        let a = 1.0 + 3f64.sqrt();
        let p = bm_params(a).unwrap();
        assert!(!p.is_exact());
        assert!((p.g - (9.0 + 6.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!(p.identity_residual() < 1e-12);
    }

    #[test]
    fn non_exact_and_invalid() {
        assert!(matches!(exact_params(&Rat::one()), Err(Error::NotExact(_))));
        assert!(!bm_params_rat(&Rat::one()).unwrap().is_exact());
        assert!(bm_params(0.0).is_err());
        assert!(bm_params(-1.0).is_err());
        assert!(bound_g(0.0).is_err());
        assert!(bound_g_exact(&Rat::zero()).is_err());
    }

    #[test]
    fn exact_family() {
        assert_eq!(exact_parameter(3, 1).unwrap(), Rat::int(4));
        assert_eq!(exact_parameter(2, 1).unwrap(), q(3, 2));
        assert_eq!(exact_parameter(5, 1).unwrap(), Rat::int(12));
        for (p, d) in [(2, 1), (3, 1), (5, 1), (7, 3), (11, 4), (9, 7)] {
            let a = exact_parameter(p, d).unwrap();
            let e = exact_params(&a).unwrap();
            assert!(e.identities_hold(), "a = {a}");
            assert_eq!(e.k, (&a + Rat::int(2)) / &a * &e.root);
        }
        assert_eq!(exact_params(&Rat::int(12)).unwrap().k, q(35, 6));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn polynomial_identity(num in 1i64..=10_000, den in 1i64..=100) {
                let a = q(num, den);
                prop_assume!(a <= 100);
                let g = bound_g_exact(&a).unwrap();
                let two = Rat::int(2);
                let lhs = &(&a * &a) * &g;
                let rhs = &(&(&a + &two) * &(&a + &two)) * &(&two * &a + Rat::one());
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn float_identities(a in 1e-3f64..100.0) {
                let p = bm_params(a).unwrap();
                prop_assert!(p.identity_residual() <= 1e-12 * p.g.max(1.0));
            }
        }
    }
}
