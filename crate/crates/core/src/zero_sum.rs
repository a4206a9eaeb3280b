//! The zero-sum construction on `ℓ∞`-sums of copies of `ℓ∞^d`.
//!
//! For `E ⊂ ℓ∞^d` and `N ≥ 2` copies, `Σ_N(E) ⊂ ℓ∞^{dN}` holds the block
//! vectors with every block in `E` and blocks summing to zero. The centring
//! projection `S_N` has norm `μ_N = 2 − 2/N`, and the constants satisfy
//! `λ(Σ_N(E)) = μ_N · λ(E)`. Any projection onto `Σ_N(E)` can be averaged over
//! block permutations into the form `R̂ ∘ S_N` with `R` a projection onto `E`,
//! without increasing its norm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{block_permutation, Mat, Permutation, Subspace};
use crate::minproj::{projection_constant_within, LpBudget};
use crate::rat::Rat;

/// Largest number of copies accepted by [`symmetrize`] (720 permutations).
pub const MAX_SYMMETRIZE_COPIES: usize = 6;

#[derive(Debug, Clone)]
pub struct ZeroSumSpace {
    pub base: Subspace,
    pub copies: usize,
    pub space: Subspace,
    pub mu: Rat,
}

impl ZeroSumSpace {
    pub fn block_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }
}

/// `μ_N = 2 − 2/N`.
pub fn mu(copies: usize) -> Rat {
    Rat::int(2) - Rat::frac(2, copies as i64)
}

fn check_copies(copies: usize) -> Result<()> {
    if copies < 2 {
        return Err(Error::InvalidArgument(format!(
            "number of copies must be at least 2, got {copies}"
        )));
    }
    Ok(())
}

/// Basis `{(b, 0, …, −b, …, 0)}`: each basis row `b` of `E` in block 1 and its
/// negative in block `j`, for `j = 2..N`.
pub fn sigma_subspace(base: &Subspace, copies: usize) -> Result<ZeroSumSpace> {
    check_copies(copies)?;
    let d = base.ambient_dim();
    let mut rows = Vec::with_capacity(base.dim() * (copies - 1));
    for b in base.basis().to_rows() {
        for j in 1..copies {
            let mut v = vec![Rat::zero(); d * copies];
            for (r, x) in b.iter().enumerate() {
                v[r] = x.clone();
                v[j * d + r] = -x;
            }
            rows.push(v);
        }
    }
    Ok(ZeroSumSpace {
        base: base.clone(),
        copies,
        space: Subspace::from_rows(rows)?,
        mu: mu(copies),
    })
}

/// `S_N`: subtracts the block average from every block.
pub fn centring_projection(block_dim: usize, copies: usize) -> Result<Mat> {
    check_copies(copies)?;
    if block_dim == 0 {
        return Err(Error::InvalidArgument(
            "block dimension must be positive".into(),
        ));
    }
    let inv = Rat::frac(1, copies as i64);
    Ok(Mat::from_fn(
        block_dim * copies,
        block_dim * copies,
        |i, j| {
            if i % block_dim != j % block_dim {
                Rat::zero()
            } else if i == j {
                Rat::one() - &inv
            } else {
                -&inv
            }
        },
    ))
}

/// The vector `x = (u, −u, …, −u)` with `u` the first unit vector, and its
/// image `S_N x = (μ_N u, −(2/N) u, …, −(2/N) u)`.
pub fn centring_witness(block_dim: usize, copies: usize) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let mut u = vec![Rat::zero(); block_dim];
    if let Some(first) = u.first_mut() {
        *first = Rat::one();
    }
    let s = centring_projection(block_dim, copies)?;
    let x = alternating_blocks(&u, copies);
    let image = s.apply(&x)?;
    Ok((x, image))
}

/// `(u, −u, …, −u)` with `copies` blocks.
pub fn alternating_blocks(u: &[Rat], copies: usize) -> Vec<Rat> {
    let mut x = u.to_vec();
    for _ in 1..copies {
        x.extend(u.iter().map(|v| -v));
    }
    x
}

/// `Q̂`: block-diagonal with `copies` copies of `q`.
pub fn coordinatewise_lift(q: &Mat, copies: usize) -> Result<Mat> {
    if !q.is_square() {
        return Err(Error::Dimension(format!(
            "lift needs a square operator, got {}x{}",
            q.rows(),
            q.cols()
        )));
    }
    let d = q.rows();
    Ok(Mat::from_fn(d * copies, d * copies, |i, j| {
        if i / d == j / d {
            q[(i % d, j % d)].clone()
        } else {
            Rat::zero()
        }
    }))
}

fn check_zero_sum_projection(p: &Mat, block_dim: usize, copies: usize) -> Result<()> {
    let n = block_dim * copies;
    if p.rows() != n || p.cols() != n {
        return Err(Error::Dimension(format!(
            "expected a {n}x{n} operator, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    if !p.is_idempotent() {
        return Err(Error::NotZeroSumProjection(
            "operator is not idempotent".into(),
        ));
    }
    for j in 0..n {
        for r in 0..block_dim {
            let s: Rat = (0..copies).map(|b| &p[(b * block_dim + r, j)]).sum();
            if !s.is_zero() {
                return Err(Error::NotZeroSumProjection(format!(
                    "column {j} has nonzero block sum"
                )));
            }
        }
    }
    Ok(())
}

/// `P̃ = (1/N!) Σ_σ U_σ⁻¹ P U_σ` over every block permutation.
pub fn symmetrize(p: &Mat, block_dim: usize, copies: usize) -> Result<Mat> {
    check_copies(copies)?;
    if copies > MAX_SYMMETRIZE_COPIES {
        return Err(Error::InvalidArgument(format!(
            "symmetrization is capped at {MAX_SYMMETRIZE_COPIES} copies"
        )));
    }
    check_zero_sum_projection(p, block_dim, copies)?;
    let perms = Permutation::all(copies);
    let count = Rat::int(perms.len() as i64);
    let n = block_dim * copies;
    let mut acc = Mat::zeros(n, n);
    for sigma in &perms {
        // (U_σ⁻¹ P U_σ)[a, b] = P[σ(a), σ(b)] blockwise
        let term = Mat::from_fn(n, n, |a, b| {
            let (ba, ra) = (a / block_dim, a % block_dim);
            let (bb, rb) = (b / block_dim, b % block_dim);
            p[(
                sigma.apply(ba) * block_dim + ra,
                sigma.apply(bb) * block_dim + rb,
            )]
                .clone()
        });
        acc = acc.add(&term)?;
    }
    Ok(acc.scale(&count.recip()?))
}

/// The literal matrix form of one averaging term, `U_σ⁻¹ P U_σ`.
pub fn conjugate_by(p: &Mat, block_dim: usize, sigma: &Permutation) -> Result<Mat> {
    let u = block_permutation(block_dim, sigma);
    let u_inv = block_permutation(block_dim, &sigma.inverse());
    u_inv.compose(p)?.compose(&u)
}

pub fn commutes_with_block_permutations(p: &Mat, block_dim: usize, copies: usize) -> bool {
    Permutation::adjacent_transpositions(copies)
        .iter()
        .all(|s| {
            let u = block_permutation(block_dim, s);
            u.compose(p).ok() == p.compose(&u).ok()
        })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrizationDecomposition {
    pub p_tilde: Mat,
    pub a: Mat,
    pub b: Mat,
    pub r: Mat,
    pub p_tilde_norm: Rat,
    pub r_norm: Rat,
    /// `‖P̃ x‖∞` for `x = (u, −u, …, −u)` with `u` a norm-attaining sign pattern of `R`.
    pub witness_value: Rat,
}

/// Reads `A` and `B` off `P̃(e₁(z)) = (Az, Bz, …, Bz)`, sets `R = A − B` and
/// checks every identity of the decomposition exactly.
pub fn extract_r(
    p_tilde: &Mat,
    base: &Subspace,
    copies: usize,
) -> Result<SymmetrizationDecomposition> {
    check_copies(copies)?;
    let d = base.ambient_dim();
    let n = d * copies;
    if p_tilde.rows() != n || p_tilde.cols() != n {
        return Err(Error::Dimension(format!("expected a {n}x{n} operator")));
    }
    if !commutes_with_block_permutations(p_tilde, d, copies) {
        return Err(Error::NotSymmetrized(
            "operator does not commute with block permutations".into(),
        ));
    }
    let a = p_tilde.block(0, 0, d, d);
    let b = p_tilde.block(d, 0, d, d);
    for blk in 2..copies {
        if p_tilde.block(blk * d, 0, d, d) != b {
            return Err(Error::NotSymmetrized(format!(
                "block {} of P̃(e₁(z)) differs from block 2",
                blk + 1
            )));
        }
    }
    let nm1 = Rat::int(copies as i64 - 1);
    if !a.add(&b.scale(&nm1))?.is_zero() {
        return Err(Error::Integrity("A + (N−1)B ≠ 0".into()));
    }
    let r = a.sub(&b)?;
    let inv_n = Rat::frac(1, copies as i64);
    if a != r.scale(&(&nm1 * &inv_n)) || b != r.scale(&-&inv_n) {
        return Err(Error::Integrity("A, B are not the multiples of R".into()));
    }
    if !r.is_idempotent() {
        return Err(Error::Integrity("R is not idempotent".into()));
    }
    for v in base.basis().to_rows() {
        if r.apply(&v)? != v {
            return Err(Error::Integrity("R does not fix the base subspace".into()));
        }
    }
    for j in 0..d {
        if !base.contains(&r.column(j)) {
            return Err(Error::Integrity("R maps outside the base subspace".into()));
        }
    }
    let factored = coordinatewise_lift(&r, copies)?.compose(&centring_projection(d, copies)?)?;
    if &factored != p_tilde {
        return Err(Error::Integrity("P̃ ≠ R̂ ∘ S_N".into()));
    }
    let p_norm = p_tilde.inf_op_norm().value;
    let r_norm_full = r.inf_op_norm();
    let u: Vec<Rat> = r_norm_full
        .witness
        .iter()
        .map(|&s| Rat::int(s as i64))
        .collect();
    let witness_value = crate::linalg::sup_norm(&p_tilde.apply(&alternating_blocks(&u, copies))?);
    let expected = &mu(copies) * &r_norm_full.value;
    if witness_value != expected || p_norm != expected {
        return Err(Error::Integrity(format!(
            "‖P̃‖ = {p_norm}, witness gives {witness_value}, μ_N‖R‖ = {expected}"
        )));
    }
    Ok(SymmetrizationDecomposition {
        p_tilde: p_tilde.clone(),
        a,
        b,
        r,
        p_tilde_norm: p_norm,
        r_norm: r_norm_full.value,
        witness_value,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicationLawReport {
    pub base_lambda: Rat,
    #[serde(rename = "mu_N")]
    pub mu_n: Rat,
    pub sigma_lambda: Option<Rat>,
    pub product: Rat,
    pub equal: bool,
    #[serde(rename = "N")]
    pub copies: usize,
    pub ambient_dim: usize,
    pub inconclusive: bool,
}

/// Computes `λ(Σ_N(E))` and `μ_N·λ(E)` by exact LP and compares them. A
/// zero-sum space over the budget yields an inconclusive report.
pub fn verify_multiplication_law(
    base: &Subspace,
    copies: usize,
    budget: &LpBudget,
) -> Result<MultiplicationLawReport> {
    let zs = sigma_subspace(base, copies)?;
    let base_lambda = projection_constant_within(base, budget)?.lambda;
    let product = &zs.mu * &base_lambda;
    let sigma_lambda = match projection_constant_within(&zs.space, budget) {
        Ok(r) => Some(r.lambda),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MultiplicationLawReport {
        equal: sigma_lambda.as_ref() == Some(&product),
        inconclusive: sigma_lambda.is_none(),
        base_lambda,
        mu_n: zs.mu.clone(),
        sigma_lambda,
        product,
        copies,
        ambient_dim: zs.ambient_dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sup_norm;
    use crate::minproj::random_projection;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::int(x)).collect()
    }

    fn q(p: i64, d: i64) -> Rat {
        Rat::frac(p, d)
    }

    #[test]
    fn sigma_of_scalars() {
        let k = Subspace::full(1).unwrap();
        let z = sigma_subspace(&k, 2).unwrap();
        assert_eq!(z.space.basis().to_rows(), vec![r(&[1, -1])]);
        assert_eq!(z.mu, Rat::one());

        let z = sigma_subspace(&k, 3).unwrap();
        assert_eq!(
            z.space.basis().to_rows(),
            vec![r(&[1, -1, 0]), r(&[1, 0, -1])]
        );
        // same space as the kernel of x₁ + x₂ + x₃
        let ker = Subspace::kernel_of_sum(3).unwrap();
        for v in ker.basis().to_rows() {
            assert!(z.space.contains(&v));
        }
        assert_eq!(z.space.dim(), ker.dim());
    }

    #[test]
    fn sigma_of_diagonal() {
        let e = Subspace::constants(2).unwrap();
        let z = sigma_subspace(&e, 2).unwrap();
        assert_eq!(z.space.dim(), 1);
        assert_eq!(z.ambient_dim(), 4);
        let v = &z.space.basis().to_rows()[0];
        assert_eq!(v, &r(&[1, 1, -1, -1]));
        assert!(e.contains(&v[0..2]) && e.contains(&v[2..4]));
    }

    #[test]
    fn sigma_invariants() {
        let e = Subspace::from_i64(&[&[1, 2, 0], &[0, 1, -1]]).unwrap();
        for copies in 2..=4 {
            let z = sigma_subspace(&e, copies).unwrap();
            assert_eq!(z.space.dim(), (copies - 1) * 2);
            for v in z.space.basis().to_rows() {
                let mut total = vec![Rat::zero(); 3];
                for blk in v.chunks(3) {
                    assert!(e.contains(blk));
                    for (t, x) in total.iter_mut().zip(blk) {
                        *t += x;
                    }
                }
                assert!(total.iter().all(Rat::is_zero));
            }
        }
        assert!(sigma_subspace(&e, 1).is_err());
    }

    #[test]
    fn centring_examples() {
        let s2 = centring_projection(1, 2).unwrap();
        assert_eq!(
            s2,
            Mat::from_rows(vec![vec![q(1, 2), q(-1, 2)], vec![q(-1, 2), q(1, 2)]]).unwrap()
        );
        assert_eq!(s2.inf_op_norm().value, Rat::one());

        let s3 = centring_projection(1, 3).unwrap();
        assert_eq!(s3.row(0), &[q(2, 3), q(-1, 3), q(-1, 3)]);
        assert_eq!(s3.inf_op_norm().value, q(4, 3));
        assert_eq!(s3.compose(&s3).unwrap(), s3);

        // d = 2, N = 2 as an explicit 4x4 matrix
        let explicit = Mat::from_rows(vec![
            vec![q(1, 2), q(0, 1), q(-1, 2), q(0, 1)],
            vec![q(0, 1), q(1, 2), q(0, 1), q(-1, 2)],
            vec![q(-1, 2), q(0, 1), q(1, 2), q(0, 1)],
            vec![q(0, 1), q(-1, 2), q(0, 1), q(1, 2)],
        ])
        .unwrap();
        assert_eq!(centring_projection(2, 2).unwrap(), explicit);
        assert_eq!(explicit.inf_op_norm().value, Rat::one());
        assert!(centring_projection(0, 2).is_err());
        assert!(centring_projection(1, 1).is_err());
    }

    #[test]
    fn centring_norm_and_idempotence_sweep() {
        for d in 1..=3 {
            for copies in 2..=8 {
                let s = centring_projection(d, copies).unwrap();
                assert_eq!(s.inf_op_norm().value, mu(copies));
                if copies <= 6 {
                    assert!(s.is_idempotent());
                }
            }
        }
    }

    #[test]
    fn centring_range_is_zero_sum() {
        let s = centring_projection(2, 3).unwrap();
        let z = sigma_subspace(&Subspace::full(2).unwrap(), 3).unwrap();
        for j in 0..6 {
            assert!(z.space.contains(&s.column(j)));
        }
        assert_eq!(s.rank(), z.space.dim());
    }

    #[test]
    fn witness_examples() {
        let (x, img) = centring_witness(1, 3).unwrap();
        assert_eq!(x, r(&[1, -1, -1]));
        assert_eq!(img, vec![q(4, 3), q(-2, 3), q(-2, 3)]);
        assert_eq!(sup_norm(&img), q(4, 3));

        let (x, img) = centring_witness(1, 2).unwrap();
        assert_eq!(x, r(&[1, -1]));
        assert_eq!(img, x);

        let (x, img) = centring_witness(2, 4).unwrap();
        assert_eq!(sup_norm(&x), Rat::one());
        assert_eq!(sup_norm(&img), q(3, 2));
        assert_eq!(img[0], q(3, 2));
        assert_eq!(img[2], q(-1, 2));
    }

    #[test]
    fn lift_examples() {
        assert_eq!(
            coordinatewise_lift(&Mat::identity(2), 3).unwrap(),
            Mat::identity(6)
        );
        let two = coordinatewise_lift(&Mat::from_i64(&[&[2]]), 3).unwrap();
        assert_eq!(two, Mat::from_i64(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]));
        assert_eq!(two.inf_op_norm().value, Rat::int(2));
        let q = Mat::from_rows(vec![vec![q(1, 3), q(-5, 2)], vec![q(7, 4), q(0, 1)]]).unwrap();
        assert_eq!(
            coordinatewise_lift(&q, 3).unwrap().inf_op_norm().value,
            q.inf_op_norm().value
        );
        assert!(coordinatewise_lift(&Mat::zeros(1, 2), 2).is_err());
    }

    #[test]
    fn symmetrize_hand_example() {
        let swap = Mat::from_i64(&[&[0, 1], &[1, 0]]);
        // both are projections onto span{(1, −1)}
        for (p, norm) in [
            (Mat::from_i64(&[&[1, 0], &[-1, 0]]), 1),
            (Mat::from_i64(&[&[2, 1], &[-2, -1]]), 3),
        ] {
            let pt = symmetrize(&p, 1, 2).unwrap();
            let by_hand = p
                .add(&swap.compose(&p).unwrap().compose(&swap).unwrap())
                .unwrap()
                .scale(&q(1, 2));
            assert_eq!(pt, by_hand);
            assert_eq!(pt, centring_projection(1, 2).unwrap());
            assert_eq!(pt.inf_op_norm().value, Rat::one());
            assert_eq!(p.inf_op_norm().value, Rat::int(norm));
        }
        // [[1, −1], [0, 0]] projects onto span{(1, 0)}, which is not zero-sum
        assert!(symmetrize(&Mat::from_i64(&[&[1, -1], &[0, 0]]), 1, 2).is_err());
    }

    #[test]
    fn symmetrize_fixed_point() {
        let r_mat = Mat::from_rows(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(1, 2)]]).unwrap();
        let p = coordinatewise_lift(&r_mat, 3)
            .unwrap()
            .compose(&centring_projection(2, 3).unwrap())
            .unwrap();
        assert_eq!(symmetrize(&p, 2, 3).unwrap(), p);
    }

    #[test]
    fn symmetrize_matches_literal_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = sigma_subspace(&Subspace::full(1).unwrap(), 3).unwrap();
        let p = random_projection(&z.space, 3, &mut rng);
        let mut acc = Mat::zeros(3, 3);
        for s in Permutation::all(3) {
            acc = acc.add(&conjugate_by(&p, 1, &s).unwrap()).unwrap();
        }
        let pt = symmetrize(&p, 1, 3).unwrap();
        assert_eq!(acc.scale(&q(1, 6)), pt);
        for s in Permutation::all(3) {
            let u = block_permutation(1, &s);
            assert_eq!(u.compose(&pt).unwrap(), pt.compose(&u).unwrap());
        }
    }

    #[test]
    fn symmetrize_rejects_non_projections() {
        let not_idem = Mat::from_i64(&[&[1, -1], &[-1, 1]]);
        assert!(matches!(
            symmetrize(&not_idem, 1, 2),
            Err(Error::NotZeroSumProjection(_))
        ));
        assert!(matches!(
            symmetrize(&Mat::identity(2), 1, 2),
            Err(Error::NotZeroSumProjection(_))
        ));
    }

    #[test]
    fn extract_from_centring() {
        for (d, copies) in [(1, 2), (2, 3), (1, 5)] {
            let s = centring_projection(d, copies).unwrap();
            let dec = extract_r(&s, &Subspace::full(d).unwrap(), copies).unwrap();
            let nn = copies as i64;
            assert_eq!(dec.r, Mat::identity(d));
            assert_eq!(dec.a, Mat::identity(d).scale(&q(nn - 1, nn)));
            assert_eq!(dec.b, Mat::identity(d).scale(&q(-1, nn)));
        }
        let dec = extract_r(
            &centring_projection(1, 2).unwrap(),
            &Subspace::full(1).unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(dec.a[(0, 0)], q(1, 2));
        assert_eq!(dec.b[(0, 0)], q(-1, 2));
        assert_eq!(dec.r[(0, 0)], Rat::one());
    }

    #[test]
    fn extract_rejects_unsymmetrized() {
        let p = Mat::from_i64(&[&[1, -1], &[0, 0]]);
        assert!(matches!(
            extract_r(&p, &Subspace::full(1).unwrap(), 2),
            Err(Error::NotSymmetrized(_))
        ));
    }

    #[test]
    fn norm_chain_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = Subspace::constants(2).unwrap();
        let z = sigma_subspace(&e, 3).unwrap();
        for _ in 0..5 {
            let p = random_projection(&z.space, 2, &mut rng);
            let pt = symmetrize(&p, 2, 3).unwrap();
            let dec = extract_r(&pt, &e, 3).unwrap();
            assert!(pt.inf_op_norm().value <= p.inf_op_norm().value);
            assert_eq!(dec.p_tilde_norm, &mu(3) * &dec.r_norm);
            // ‖R‖ ≥ λ(E) = 1
            assert!(dec.r_norm >= 1);
        }
    }

    #[test]
    fn multiplication_law_examples() {
        let budget = LpBudget::default();
        let rep = verify_multiplication_law(&Subspace::full(1).unwrap(), 3, &budget).unwrap();
        assert!(rep.equal);
        assert_eq!(rep.sigma_lambda, Some(q(4, 3)));

        let rep =
            verify_multiplication_law(&Subspace::kernel_of_sum(3).unwrap(), 2, &budget).unwrap();
        assert!(rep.equal);
        assert_eq!(rep.product, q(4, 3));
    }

    #[test]
    fn multiplication_law_over_budget_is_inconclusive() {
        let budget = LpBudget {
            max_ambient_dim: 4,
            max_subspace_dim: 6,
        };
        let rep = verify_multiplication_law(&Subspace::full(1).unwrap(), 5, &budget).unwrap();
        assert!(rep.inconclusive);
        assert!(!rep.equal);
        assert_eq!(rep.sigma_lambda, None);
    }
}
