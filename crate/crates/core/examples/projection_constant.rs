//! Exact projection constants of a few subspaces of ℓ∞ⁿ.
//!
//! Run with `cargo run --example projection_constant`.

use projconst::minproj::projection_constant;
use projconst::{Result, Subspace};

fn main() -> Result<()> {
    for n in 2..=5 {
        let r = projection_constant(&Subspace::kernel_of_sum(n)?)?;
        println!("ker(x1+...+x{n}) in l_inf^{n}: lambda = {}", r.lambda);
    }

    let s = Subspace::from_i64(&[&[1, 2, 0, -1], &[0, 1, 1, 3]])?;
    let r = projection_constant(&s)?;
    println!("\nspan{{(1,2,0,-1), (0,1,1,3)}}: lambda = {}", r.lambda);
    println!("minimal projection:");
    for row in r.projection.to_rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>6}")).collect();
        println!("  [{}]", cells.join(" "));
    }
    println!("norming sign vector: {:?}", r.witness);
    Ok(())
}
