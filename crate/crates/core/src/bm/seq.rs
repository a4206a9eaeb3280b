//! Row- and column-finite operators on finitely supported sequences.
//!
//! Operators are expression trees over coordinate selections, so both the
//! row rule (which inputs feed output `i`) and the column rule (which outputs
//! input `j` reaches) can be evaluated exactly and lazily.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::rat::Rat;

/// A finitely supported sequence; zero entries are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FinSeq(BTreeMap<usize, Rat>);

impl FinSeq {
    pub fn zero() -> Self {
        FinSeq::default()
    }

    pub fn unit(j: usize) -> Self {
        let mut s = FinSeq::zero();
        s.0.insert(j, Rat::one());
        s
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Rat)>) -> Self {
        let mut s = FinSeq::zero();
        for (i, v) in entries {
            s.add_at(i, &v);
        }
        s
    }

    pub fn from_dense(values: &[Rat]) -> Self {
        FinSeq::from_entries(values.iter().cloned().enumerate())
    }

    pub fn get(&self, i: usize) -> Rat {
        self.0.get(&i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_at(&mut self, i: usize, v: &Rat) {
        if v.is_zero() {
            return;
        }
        let entry = self.0.entry(i).or_insert_with(Rat::zero);
        *entry += v;
        if entry.is_zero() {
            self.0.remove(&i);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.0.iter().map(|(i, v)| (*i, v))
    }

    pub fn sup_norm(&self) -> Rat {
        self.0.values().map(Rat::abs).fold(Rat::zero(), Rat::max)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for FinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

#[derive(Debug)]
enum Expr {
    Identity,
    /// Input `in_stride·t + in_offset` goes to output `out_stride·t + out_offset`.
    Select {
        out_stride: usize,
        out_offset: usize,
        in_stride: usize,
        in_offset: usize,
    },
    Scale(Rat, SeqOperator),
    Sum(Vec<SeqOperator>),
    /// `outer ∘ inner`
    Compose(SeqOperator, SeqOperator),
}

#[derive(Clone)]
pub struct SeqOperator {
    expr: Arc<Expr>,
    descriptor: String,
}

impl fmt::Debug for SeqOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeqOperator({})", self.descriptor)
    }
}

fn merge(entries: Vec<(usize, Rat)>) -> Vec<(usize, Rat)> {
    let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
    for (i, v) in entries {
        *acc.entry(i).or_insert_with(Rat::zero) += v;
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

impl SeqOperator {
    fn new(expr: Expr, descriptor: impl Into<String>) -> Self {
        SeqOperator {
            expr: Arc::new(expr),
            descriptor: descriptor.into(),
        }
    }

    pub fn identity() -> Self {
        SeqOperator::new(Expr::Identity, "I")
    }

    pub fn select(
        out_stride: usize,
        out_offset: usize,
        in_stride: usize,
        in_offset: usize,
        descriptor: impl Into<String>,
    ) -> Self {
        assert!(out_stride > 0 && in_stride > 0, "strides must be positive");
        SeqOperator::new(
            Expr::Select {
                out_stride,
                out_offset,
                in_stride,
                in_offset,
            },
            descriptor,
        )
    }

    pub fn scale(&self, s: Rat) -> Self {
        let d = format!("{s}·{}", self.descriptor);
        SeqOperator::new(Expr::Scale(s, self.clone()), d)
    }

    pub fn sum(ops: Vec<SeqOperator>) -> Self {
        let d = ops
            .iter()
            .map(|o| o.descriptor.as_str())
            .collect::<Vec<_>>()
            .join(" + ");
        SeqOperator::new(Expr::Sum(ops), format!("({d})"))
    }

    pub fn plus(&self, other: &SeqOperator) -> Self {
        SeqOperator::sum(vec![self.clone(), other.clone()])
    }

    pub fn minus(&self, other: &SeqOperator) -> Self {
        SeqOperator::sum(vec![self.clone(), other.scale(-Rat::one())])
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &SeqOperator) -> Self {
        let d = format!("{}∘{}", self.descriptor, inner.descriptor);
        SeqOperator::new(Expr::Compose(self.clone(), inner.clone()), d)
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.descriptor = descriptor.into();
        self
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Nonzero `(input index, coefficient)` pairs of output row `i`.
    pub fn row(&self, i: usize) -> Vec<(usize, Rat)> {
        match &*self.expr {
            Expr::Identity => vec![(i, Rat::one())],
            Expr::Select {
                out_stride,
                out_offset,
                in_stride,
                in_offset,
            } => {
                if i < *out_offset || !(i - out_offset).is_multiple_of(*out_stride) {
                    return Vec::new();
                }
                let t = (i - out_offset) / out_stride;
                vec![(in_stride * t + in_offset, Rat::one())]
            }
            Expr::Scale(s, op) => op.row(i).into_iter().map(|(j, v)| (j, &v * s)).collect(),
            Expr::Sum(ops) => merge(ops.iter().flat_map(|o| o.row(i)).collect()),
            Expr::Compose(outer, inner) => merge(
                outer
                    .row(i)
                    .into_iter()
                    .flat_map(|(k, c)| inner.row(k).into_iter().map(move |(j, d)| (j, &c * &d)))
                    .collect(),
            ),
        }
    }

    /// Nonzero `(output index, coefficient)` pairs reached from input `j`.
    pub fn column(&self, j: usize) -> Vec<(usize, Rat)> {
        match &*self.expr {
            Expr::Identity => vec![(j, Rat::one())],
            Expr::Select {
                out_stride,
                out_offset,
                in_stride,
                in_offset,
            } => {
                if j < *in_offset || !(j - in_offset).is_multiple_of(*in_stride) {
                    return Vec::new();
                }
                let t = (j - in_offset) / in_stride;
                vec![(out_stride * t + out_offset, Rat::one())]
            }
            Expr::Scale(s, op) => op.column(j).into_iter().map(|(i, v)| (i, &v * s)).collect(),
            Expr::Sum(ops) => merge(ops.iter().flat_map(|o| o.column(j)).collect()),
            Expr::Compose(outer, inner) => merge(
                inner
                    .column(j)
                    .into_iter()
                    .flat_map(|(k, c)| outer.column(k).into_iter().map(move |(i, d)| (i, &c * &d)))
                    .collect(),
            ),
        }
    }

    /// Exact evaluation on a finitely supported sequence.
    pub fn apply(&self, v: &FinSeq) -> FinSeq {
        let mut out = FinSeq::zero();
        for (j, x) in v.iter() {
            for (i, c) in self.column(j) {
                out.add_at(i, &(&c * x));
            }
        }
        out
    }
}

/// `W⁻¹(W(e_j)) = e_j` and `W(W⁻¹(e_j)) = e_j` for `j < basis_count`.
pub fn verify_inverse(w: &SeqOperator, w_inv: &SeqOperator, basis_count: usize) -> bool {
    (0..basis_count).all(|j| {
        let e = FinSeq::unit(j);
        w_inv.apply(&w.apply(&e)) == e && w.apply(&w_inv.apply(&e)) == e
    })
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct NormWindow {
    pub lower: Rat,
    pub row_patterns_stabilized: bool,
    pub distinct_patterns: usize,
}

/// Maximal absolute row sum over output rows `< window`, and whether the set
/// of row coefficient multisets in `[0, window)` already appears in
/// `[0, window/2)`.
pub fn operator_norm_window(op: &SeqOperator, window: usize) -> NormWindow {
    let window = window.max(2);
    let mut lower = Rat::zero();
    let mut first_half: BTreeSet<Vec<Rat>> = BTreeSet::new();
    let mut all: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for i in 0..window {
        let row = op.row(i);
        let s: Rat = row.iter().map(|(_, c)| c.abs()).sum();
        lower = lower.max(s);
        let mut pattern: Vec<Rat> = row.into_iter().map(|(_, c)| c).collect();
        pattern.sort();
        if i < window / 2 {
            first_half.insert(pattern.clone());
        }
        all.insert(pattern);
    }
    NormWindow {
        lower,
        row_patterns_stabilized: first_half == all,
        distinct_patterns: all.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rat {
        Rat::frac(p, d)
    }

    #[test]
    fn identity_apply_and_norm() {
        let id = SeqOperator::identity();
        let v = FinSeq::from_entries([(0, q(1, 2)), (7, q(-3, 1))]);
        assert_eq!(id.apply(&v), v);
        let w = operator_norm_window(&id, 64);
        assert_eq!(w.lower, Rat::one());
        assert!(w.row_patterns_stabilized);
    }

    #[test]
    fn select_rows_and_columns_agree() {
        let op = SeqOperator::select(3, 1, 2, 1, "s")
            .scale(q(5, 2))
            .plus(&SeqOperator::identity());
        for i in 0..40 {
            for (j, c) in op.row(i) {
                assert!(op.column(j).contains(&(i, c)));
            }
        }
    }

    #[test]
    fn composition_is_literal() {
        // even-keeping projection, its complement, and an interleave
        let p = SeqOperator::select(2, 0, 2, 0, "P");
        let i_minus_p = SeqOperator::identity().minus(&p);
        assert_eq!(p.after(&p).apply(&FinSeq::unit(4)), FinSeq::unit(4));
        assert!(p.after(&i_minus_p).apply(&FinSeq::unit(4)).is_zero());
        assert_eq!(i_minus_p.row(2), vec![]);
        assert_eq!(i_minus_p.row(3), vec![(3, Rat::one())]);
        assert_eq!(p.after(&i_minus_p).descriptor(), "P∘(I + -1·P)");
    }

    #[test]
    fn mismatched_inverse() {
        let double = SeqOperator::identity().scale(Rat::int(2));
        let half = SeqOperator::identity().scale(q(1, 2));
        assert!(verify_inverse(&double, &half, 16));
        assert!(!verify_inverse(&double, &double, 16));
    }

    #[test]
    fn window_detects_unstable_rows() {
        // row i has coefficient i + 1 for i < 100: patterns keep changing
        let op = SeqOperator::sum(
            (0..100)
                .map(|i| SeqOperator::select(1000, i, 1000, i, "e").scale(Rat::int(i as i64 + 1)))
                .collect(),
        );
        let w = operator_norm_window(&op, 64);
        assert!(!w.row_patterns_stabilized);
        assert_eq!(w.lower, Rat::int(64));
    }
}
