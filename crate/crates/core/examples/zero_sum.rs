//! The zero-sum construction: the centring projection, symmetrization of a
//! random projection, and the multiplication law λ(Σ_N(E)) = μ_N·λ(E).

use projconst::minproj::{random_projection, LpBudget};
use projconst::zero_sum::{
    centring_projection, centring_witness, extract_r, mu, sigma_subspace, symmetrize,
    verify_multiplication_law,
};
use projconst::{Result, Subspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    for n in 2..=6 {
        let s = centring_projection(1, n)?;
        println!(
            "N = {n}: ||S_N|| = {} (mu_N = {})",
            s.inf_op_norm().value,
            mu(n)
        );
    }
    let (x, image) = centring_witness(1, 3)?;
    println!("S_3 {x:?} = {image:?}\n");

    let base = Subspace::constants(2)?;
    let zs = sigma_subspace(&base, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = random_projection(&zs.space, 3, &mut rng);
    let pt = symmetrize(&p, 2, 3)?;
    let dec = extract_r(&pt, &base, 3)?;
    println!(
        "random P onto Sigma_3(span(1,1)): ||P|| = {}",
        p.inf_op_norm().value
    );
    println!(
        "symmetrized:  ||P~|| = {} = mu_3 * ||R|| = {} * {}",
        dec.p_tilde_norm,
        mu(3),
        dec.r_norm
    );

    let budget = LpBudget::default();
    for (base, n) in [
        (Subspace::full(1)?, 3),
        (Subspace::constants(3)?, 3),
        (Subspace::kernel_of_sum(3)?, 2),
    ] {
        let rep = verify_multiplication_law(&base, n, &budget)?;
        println!(
            "N = {n}, ambient {}: lambda(Sigma) = {:?}, mu_N * lambda(E) = {} * {} (equal: {})",
            rep.ambient_dim, rep.sigma_lambda, rep.mu_n, rep.base_lambda, rep.equal
        );
    }
    Ok(())
}
