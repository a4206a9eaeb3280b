//! Floating-point estimates of projection constants next to the exact values.

use projconst::minproj::projection_constant;
use projconst::oracle::{float_oracle_with, OracleConfig};
use projconst::zero_sum::sigma_subspace;
use projconst::{Result, Subspace};

fn main() -> Result<()> {
    let cases = [
        ("ker sum in l_inf^5", Subspace::kernel_of_sum(5)?),
        (
            "span(1,2,0,-1),(0,1,1,3)",
            Subspace::from_i64(&[&[1, 2, 0, -1], &[0, 1, 1, 3]])?,
        ),
        (
            "Sigma_3(ker sum in l_inf^3)",
            sigma_subspace(&Subspace::kernel_of_sum(3)?, 3)?.space,
        ),
    ];
    let config = OracleConfig::with_tol(1e-7);
    for (name, s) in &cases {
        let exact = projection_constant(s)?.lambda;
        let est = float_oracle_with(s, &config)?;
        println!(
            "{name:<30} exact {exact:>6} = {:.9}  oracle [{:.9}, {:.9}]",
            exact.to_f64(),
            est.lower,
            est.value
        );
    }
    Ok(())
}
