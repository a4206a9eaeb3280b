//! Dense exact matrices acting between sup-normed coordinate spaces.
//!
//! A [`Mat`] is an operator `ℓ∞^cols → ℓ∞^rows`. Its operator norm is the
//! largest absolute row sum, attained at a sign vector, and [`Mat::inf_op_norm`]
//! returns that sign vector alongside the value.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

/// Value of the ∞→∞ operator norm together with a sign vector attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpNorm {
    pub value: Rat,
    /// Entries are ±1; `‖M·witness‖∞ = value`.
    pub witness: Vec<i8>,
    /// Row on which the maximum is attained.
    pub row: usize,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry constructor for literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rat::int(v)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &Rat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Mat) -> Result<Mat> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect())
    }

    /// Exact ∞→∞ operator norm: the maximal absolute row sum, with the sign
    /// pattern of the maximizing row as witness. An empty matrix has norm 0.
    pub fn inf_op_norm(&self) -> OpNorm {
        let mut best = Rat::zero();
        let mut best_row = 0;
        for i in 0..self.rows {
            let s: Rat = self.row(i).iter().map(Rat::abs).sum();
            if s > best {
                best = s;
                best_row = i;
            }
        }
        let witness = if self.rows == 0 {
            vec![1; self.cols]
        } else {
            self.row(best_row)
                .iter()
                .map(|x| if x.is_negative() { -1 } else { 1 })
                .collect()
        };
        OpNorm {
            value: best,
            witness,
            row: best_row,
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.is_square() && self.compose(self).map(|m| &m == self).unwrap_or(false)
    }

    /// Sub-block `[r0, r0+nr) × [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Mat {
        Mat::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn rank(&self) -> usize {
        row_echelon(self.clone()).1.len()
    }

    /// Exact inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (red, pivots) = reduced_row_echelon(aug);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(red.block(0, n, n, n))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Rat::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

/// Gaussian elimination to row echelon form; returns pivot columns.
fn row_echelon(mut m: Mat) -> (Mat, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        swap_rows(&mut m, r, p);
        for i in r + 1..m.rows {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = &m[(i, c)] / &m[(r, c)];
            eliminate(&mut m, i, r, &f, c);
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

fn reduced_row_echelon(m: Mat) -> (Mat, Vec<usize>) {
    let (mut m, pivots) = row_echelon(m);
    for (r, &c) in pivots.iter().enumerate().rev() {
        let inv = m[(r, c)].recip().expect("pivot is nonzero");
        for j in c..m.cols {
            let v = &m[(r, j)] * &inv;
            m[(r, j)] = v;
        }
        for i in 0..r {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            eliminate(&mut m, i, r, &f, c);
        }
    }
    (m, pivots)
}

fn swap_rows(m: &mut Mat, a: usize, b: usize) {
    if a != b {
        for j in 0..m.cols {
            m.data.swap(a * m.cols + j, b * m.cols + j);
        }
    }
}

/// row[target] -= f · row[source], starting at column `from`.
fn eliminate(m: &mut Mat, target: usize, source: usize, f: &Rat, from: usize) {
    for j in from..m.cols {
        let s = &m[(source, j)];
        if !s.is_zero() {
            let d = f * s;
            m[(target, j)] -= &d;
        }
    }
}

/// Sup norm of a coordinate vector.
pub fn sup_norm(v: &[Rat]) -> Rat {
    v.iter().map(Rat::abs).fold(Rat::zero(), Rat::max)
}

/// Concatenates `N` blocks of equal length `d` into one vector of `ℓ∞^{dN}`,
/// whose sup norm is the maximum of the block norms.
pub fn flatten_blocks(blocks: &[Vec<Rat>]) -> Result<Vec<Rat>> {
    let d = blocks.first().map_or(0, Vec::len);
    if blocks.iter().any(|b| b.len() != d) {
        return Err(Error::Dimension("ragged blocks".into()));
    }
    Ok(blocks.iter().flatten().cloned().collect())
}

/// A permutation of `{0, …, N-1}` stored as its image table, `map[j] = σ(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{map:?} is not a bijection"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (j, &s) in self.0.iter().enumerate() {
            inv[s] = j;
        }
        Permutation(inv)
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn then_after(&self, other: &Permutation) -> Self {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Every permutation of `{0, …, n-1}` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(current.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    /// Adjacent transpositions `(i, i+1)`, which generate the symmetric group.
    pub fn adjacent_transpositions(n: usize) -> Vec<Permutation> {
        (0..n.saturating_sub(1))
            .map(|i| {
                let mut m: Vec<usize> = (0..n).collect();
                m.swap(i, i + 1);
                Permutation(m)
            })
            .collect()
    }
}

/// The block permutation `U_σ` on `(ℓ∞^d)^N`: block `j` of the input becomes
/// block `σ(j)` of the output, so `U_σ(z)_i = z_{σ⁻¹(i)}`.
pub fn block_permutation(block_dim: usize, sigma: &Permutation) -> Mat {
    let n = sigma.len();
    let mut m = Mat::zeros(block_dim * n, block_dim * n);
    for j in 0..n {
        let target = sigma.apply(j);
        for r in 0..block_dim {
            m[(target * block_dim + r, j * block_dim + r)] = Rat::one();
        }
    }
    m
}

/// A subspace `E ⊂ ℓ∞^n` given by a full-rank basis, one basis vector per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: Mat,
}

impl Subspace {
    pub fn new(basis: Mat) -> Result<Self> {
        let (k, n) = (basis.rows(), basis.cols());
        if n == 0 || k == 0 {
            return Err(Error::Dimension(
                "subspace needs 1 <= dim <= ambient_dim".into(),
            ));
        }
        if k > n {
            return Err(Error::RankDeficient {
                expected: k,
                found: basis.rank(),
            });
        }
        let rank = basis.rank();
        if rank != k {
            return Err(Error::RankDeficient {
                expected: k,
                found: rank,
            });
        }
        Ok(Subspace { basis })
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        Subspace::new(Mat::from_rows(rows)?)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Subspace::new(Mat::from_i64(rows))
    }

    /// The whole space `ℓ∞^n`.
    pub fn full(n: usize) -> Result<Self> {
        Subspace::new(Mat::identity(n))
    }

    /// `span{(1, …, 1)} ⊂ ℓ∞^n`.
    pub fn constants(n: usize) -> Result<Self> {
        Subspace::new(Mat::from_fn(1, n, |_, _| Rat::one()))
    }

    /// `ker(x₁ + ⋯ + x_n) ⊂ ℓ∞^n`, spanned by `e₁ − e_j`.
    pub fn kernel_of_sum(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "kernel of the sum needs n >= 2".into(),
            ));
        }
        Subspace::new(Mat::from_fn(n - 1, n, |i, j| {
            if j == 0 {
                Rat::one()
            } else if j == i + 1 {
                -Rat::one()
            } else {
                Rat::zero()
            }
        }))
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    /// Whether `v` is an exact rational combination of the basis rows.
    pub fn contains(&self, v: &[Rat]) -> bool {
        if v.len() != self.ambient_dim() {
            return false;
        }
        if v.iter().all(Rat::is_zero) {
            return true;
        }
        let mut rows = self.basis.to_rows();
        rows.push(v.to_vec());
        Mat::from_rows(rows).expect("rectangular").rank() == self.dim()
    }
}
