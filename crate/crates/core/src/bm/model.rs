//! A concrete instance of the isomorphism `W_a = U_a ∘ S ∘ T_a` on finitely
//! supported sequences with the sup norm.
//!
//! Both `X` and `Y` are sequence spaces. `φ`, `ψ` split a sequence into its
//! even and odd coordinates, `θ`, `η` embed onto the even coordinates, and
//! `P`, `R` zero the odd coordinates, so `E = ker P` and `F = ker R` are the
//! odd-supported sequences. A `K`-fold sum `A₀ ⊕ ⋯ ⊕ A_{K−1}` is stored as a
//! single sequence with component `s` at indices `K·t + s`, which is again
//! sup-norm isometric.

use serde::Serialize;

use crate::bm::params::{exact_params, ExactParams};
use crate::bm::seq::{operator_norm_window, verify_inverse, SeqOperator};
use crate::error::Result;
use crate::rat::Rat;

/// The isometries, embeddings and norm-one projections of the model.
#[derive(Debug, Clone)]
pub struct SquareSystem {
    pub phi1: SeqOperator,
    pub phi2: SeqOperator,
    pub phi_inv: SeqOperator,
    pub psi1: SeqOperator,
    pub psi2: SeqOperator,
    pub psi_inv: SeqOperator,
    pub theta: SeqOperator,
    pub theta_inv: SeqOperator,
    pub eta: SeqOperator,
    pub eta_inv: SeqOperator,
    pub p: SeqOperator,
    pub r: SeqOperator,
}

/// Component `slot` of a `k`-fold sum, as an operator from the sum.
pub fn component(k: usize, slot: usize) -> SeqOperator {
    SeqOperator::select(1, 0, k, slot, format!("π{slot}"))
}

/// Embedding of a sequence as component `slot` of a `k`-fold sum.
pub fn inject(k: usize, slot: usize) -> SeqOperator {
    SeqOperator::select(k, slot, 1, 0, format!("ι{slot}"))
}

fn split_pair(name: &str) -> (SeqOperator, SeqOperator, SeqOperator) {
    let first = SeqOperator::select(1, 0, 2, 0, format!("{name}₁"));
    let second = SeqOperator::select(1, 0, 2, 1, format!("{name}₂"));
    // (u, v) ↦ u at even indices, v at odd indices
    let inv = SeqOperator::sum(vec![
        SeqOperator::select(2, 0, 1, 0, "even").after(&component(2, 0)),
        SeqOperator::select(2, 1, 1, 0, "odd").after(&component(2, 1)),
    ])
    .with_descriptor(format!("{name}⁻¹"));
    (first, second, inv)
}

impl SquareSystem {
    pub fn canonical() -> Self {
        let (phi1, phi2, phi_inv) = split_pair("φ");
        let (psi1, psi2, psi_inv) = split_pair("ψ");
        let embed = |n: &str| SeqOperator::select(2, 0, 1, 0, n);
        let read_even = |n: &str| SeqOperator::select(1, 0, 2, 0, n);
        SquareSystem {
            phi1,
            phi2,
            phi_inv,
            psi1,
            psi2,
            psi_inv,
            theta: embed("θ"),
            theta_inv: read_even("θ⁻¹"),
            eta: embed("η"),
            eta_inv: read_even("η⁻¹"),
            p: SeqOperator::select(2, 0, 2, 0, "P"),
            r: SeqOperator::select(2, 0, 2, 0, "R"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub params: ExactParams,
    pub system: SquareSystem,
    pub t: SeqOperator,
    pub s: SeqOperator,
    pub u: SeqOperator,
    pub t_inv: SeqOperator,
    pub s_inv: SeqOperator,
    pub u_inv: SeqOperator,
    pub w: SeqOperator,
    pub w_inv: SeqOperator,
    /// `K(a) = 2ν + √(2a+1)`.
    pub bound: Rat,
}

/// Assembles `T_a`, `S`, `U_a`, their inverses and `W_a`, `W_a⁻¹` from the
/// coordinate formulas. Requires `2a + 1` to be a rational square.
pub fn build_model(a: &Rat) -> Result<Model> {
    let params = exact_params(a)?;
    let sys = SquareSystem::canonical();
    let id = SeqOperator::identity();
    let (mu, nu, b) = (params.mu.clone(), params.nu.clone(), params.b.clone());
    let inv_nu = nu.recip()?;

    // T_a x = (ν ψ₁η⁻¹Px, μ ψ₂η⁻¹Px, x − Px)
    let eta_inv_p = sys.eta_inv.after(&sys.p);
    let t = SeqOperator::sum(vec![
        inject(3, 0).after(&sys.psi1.after(&eta_inv_p).scale(nu.clone())),
        inject(3, 1).after(&sys.psi2.after(&eta_inv_p).scale(mu.clone())),
        inject(3, 2).after(&id.minus(&sys.p)),
    ])
    .with_descriptor("T_a");

    // S(y₁, y₂, e) = (θ⁻¹Ry₁, ηy₂ + e, y₁ − Ry₁)
    let s = SeqOperator::sum(vec![
        inject(3, 0).after(&sys.theta_inv.after(&sys.r).after(&component(3, 0))),
        inject(3, 1).after(&sys.eta.after(&component(3, 1)).plus(&component(3, 2))),
        inject(3, 2).after(&id.minus(&sys.r).after(&component(3, 0))),
    ])
    .with_descriptor("S");

    // U_a(x₁, x₂, f) = θφ⁻¹(ax₁, bx₂) + f
    let scaled_pair = SeqOperator::sum(vec![
        inject(2, 0).after(&component(3, 0).scale(a.clone())),
        inject(2, 1).after(&component(3, 1).scale(b.clone())),
    ]);
    let u = sys
        .theta
        .after(&sys.phi_inv)
        .after(&scaled_pair)
        .plus(&component(3, 2))
        .with_descriptor("U_a");

    // T_a⁻¹(y₁, y₂, e) = ηψ⁻¹(y₁/ν, ay₂) + e
    let inv_pair = SeqOperator::sum(vec![
        inject(2, 0).after(&component(3, 0).scale(inv_nu)),
        inject(2, 1).after(&component(3, 1).scale(a.clone())),
    ]);
    let t_inv = sys
        .eta
        .after(&sys.psi_inv)
        .after(&inv_pair)
        .plus(&component(3, 2))
        .with_descriptor("T_a⁻¹");

    // S⁻¹(x₁, x₂, f) = (θx₁ + f, η⁻¹Px₂, x₂ − Px₂)
    let s_inv = SeqOperator::sum(vec![
        inject(3, 0).after(&sys.theta.after(&component(3, 0)).plus(&component(3, 2))),
        inject(3, 1).after(&eta_inv_p.after(&component(3, 1))),
        inject(3, 2).after(&id.minus(&sys.p).after(&component(3, 1))),
    ])
    .with_descriptor("S⁻¹");

    // U_a⁻¹y = (φ₁θ⁻¹Ry / a, ν φ₂θ⁻¹Ry, y − Ry)
    let theta_inv_r = sys.theta_inv.after(&sys.r);
    let u_inv = SeqOperator::sum(vec![
        inject(3, 0).after(&sys.phi1.after(&theta_inv_r).scale(mu.clone())),
        inject(3, 1).after(&sys.phi2.after(&theta_inv_r).scale(nu.clone())),
        inject(3, 2).after(&id.minus(&sys.r)),
    ])
    .with_descriptor("U_a⁻¹");

    let w = u.after(&s).after(&t).with_descriptor("U_a∘S∘T_a");
    let w_inv = t_inv
        .after(&s_inv)
        .after(&u_inv)
        .with_descriptor("T_a⁻¹∘S⁻¹∘U_a⁻¹");

    Ok(Model {
        bound: params.k.clone(),
        params,
        system: sys,
        t,
        s,
        u,
        t_inv,
        s_inv,
        u_inv,
        w,
        w_inv,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelCheck {
    pub a: Rat,
    #[serde(rename = "K")]
    pub k: Rat,
    pub inverse_ok: bool,
    #[serde(rename = "W_norm_lower")]
    pub w_norm_lower: Rat,
    #[serde(rename = "Winv_norm_lower")]
    pub w_inv_norm_lower: Rat,
    pub stabilized: bool,
    /// `W_norm_lower ≤ K` and `Winv_norm_lower ≤ K`.
    pub within_bound: bool,
}

/// Inverse identities on `basis_count` unit vectors plus windowed row-sum
/// bounds for `W_a` and `W_a⁻¹`.
pub fn check_model(a: &Rat, basis_count: usize, window: usize) -> Result<ModelCheck> {
    let model = build_model(a)?;
    let inverse_ok = verify_inverse(&model.w, &model.w_inv, basis_count);
    let wn = operator_norm_window(&model.w, window);
    let wi = operator_norm_window(&model.w_inv, window);
    Ok(ModelCheck {
        a: a.clone(),
        within_bound: wn.lower <= model.bound && wi.lower <= model.bound,
        k: model.bound,
        inverse_ok,
        w_norm_lower: wn.lower,
        w_inv_norm_lower: wi.lower,
        stabilized: wn.row_patterns_stabilized && wi.row_patterns_stabilized,
    })
}
