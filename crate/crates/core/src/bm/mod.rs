//! Parameter algebra, optimization and an exact sequence-space model for the
//! decomposition bound `d_BM(X, Y) ≤ K(a)²`, minimized at `a = 1 + √3`.

pub mod model;
pub mod optimize;
pub mod params;
pub mod seq;

pub use model::{build_model, check_model, Model, ModelCheck, SquareSystem};
pub use optimize::{
    compare_with_prior_bound, optimize_closed_form, optimize_numeric, BoundComparison,
    ClosedFormOptimum, NumericOptimum,
};
pub use params::{
    bm_params, bm_params_rat, bound_g, bound_g_exact, exact_parameter, exact_params,
    BMParameterSet, ExactParams,
};
pub use seq::{operator_norm_window, verify_inverse, FinSeq, NormWindow, SeqOperator};
