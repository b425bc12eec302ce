//! Boolean-indexed matrices over a semiring: the backend where sequential
//! composition is matrix multiplication and parallel composition is the
//! Kronecker product. Hosts the stochastic, propositional, unreliability
//! and minimal-attack interpretations.
//!
//! Index convention: a bit tuple read left to right maps to its binary
//! integer value, so the leftmost wire is the most significant bit, and
//! entry 1 of a two-element vector is its second component.

use std::collections::BTreeMap;

use crate::channel::{evaluate, ChannelBackend, EvalError, Interpretation};
use crate::graph::{Arity, TermGraph};
use crate::oracle;
use crate::semiring::{Antichain, AntichainSemiring, MetricSemiring, Semiring};
use crate::signature::Symbol;

/// Hard default for the number of wires a matrix channel may span; a matrix
/// over `w` wires has `2^w` rows or columns.
pub const DEFAULT_WIDTH_CAP: usize = 20;

/// A dense `2^out_wires x 2^in_wires` matrix over some semiring's elements,
/// stored row-major in binary-integer order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoolMatrix<E> {
    in_wires: usize,
    out_wires: usize,
    entries: Vec<E>,
}

impl<E: Clone> BoolMatrix<E> {
    pub fn from_rows(
        in_wires: usize,
        out_wires: usize,
        rows: Vec<Vec<E>>,
    ) -> Result<Self, EvalError> {
        let want_rows = 1usize << out_wires;
        let want_cols = 1usize << in_wires;
        if rows.len() != want_rows || rows.iter().any(|r| r.len() != want_cols) {
            return Err(EvalError::ShapeMismatch(format!(
                "matrix for {in_wires} -> {out_wires} wires needs {want_rows} rows of {want_cols}"
            )));
        }
        Ok(BoolMatrix {
            in_wires,
            out_wires,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(in_wires: usize, out_wires: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let rows = 1usize << out_wires;
        let cols = 1usize << in_wires;
        let mut entries = Vec::with_capacity(rows * cols);
        for row in 0..rows {
            for col in 0..cols {
                entries.push(f(row, col));
            }
        }
        BoolMatrix {
            in_wires,
            out_wires,
            entries,
        }
    }

    pub fn in_wires(&self) -> usize {
        self.in_wires
    }

    pub fn out_wires(&self) -> usize {
        self.out_wires
    }

    pub fn arity(&self) -> Arity {
        Arity::new(self.in_wires, self.out_wires)
    }

    pub fn rows(&self) -> usize {
        1 << self.out_wires
    }

    pub fn cols(&self) -> usize {
        1 << self.in_wires
    }

    pub fn get(&self, row: usize, col: usize) -> &E {
        &self.entries[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[E] {
        let cols = self.cols();
        &self.entries[row * cols..(row + 1) * cols]
    }

    /// Column `col` as a vector, top to bottom.
    pub fn column(&self, col: usize) -> Vec<E> {
        (0..self.rows()).map(|r| self.get(r, col).clone()).collect()
    }
}

/// True iff every column sums to the semiring's one.
pub fn is_stochastic<S: Semiring>(matrix: &BoolMatrix<S::Element>, semiring: &S) -> bool {
    (0..matrix.cols()).all(|col| {
        let sum = (0..matrix.rows()).fold(semiring.zero(), |acc, row| {
            semiring.plus(&acc, matrix.get(row, col))
        });
        semiring.eq_elements(&sum, &semiring.one())
    })
}

/// Matrix channels over a semiring, guarded by a wire-width cap.
#[derive(Debug, Clone)]
pub struct BoolStochBackend<S: Semiring> {
    semiring: S,
    width_cap: usize,
}

impl<S: Semiring> BoolStochBackend<S> {
    pub fn new(semiring: S) -> Self {
        BoolStochBackend {
            semiring,
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }

    pub fn with_width_cap(semiring: S, width_cap: usize) -> Self {
        BoolStochBackend { semiring, width_cap }
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn width_cap(&self) -> usize {
        self.width_cap
    }

    fn check_width(&self, wires: usize) -> Result<(), EvalError> {
        if wires > self.width_cap {
            return Err(EvalError::WidthCapExceeded {
                wires,
                cap: self.width_cap,
            });
        }
        Ok(())
    }
}

pub fn boolstoch_backend<S: Semiring>(semiring: S) -> BoolStochBackend<S> {
    BoolStochBackend::new(semiring)
}

impl<S: Semiring> ChannelBackend for BoolStochBackend<S> {
    type Channel = BoolMatrix<S::Element>;

    /// Semiring matrix product of `then` with `first`.
    fn compose(
        &self,
        first: &Self::Channel,
        then: &Self::Channel,
    ) -> Result<Self::Channel, EvalError> {
        if first.out_wires != then.in_wires {
            return Err(EvalError::ShapeMismatch(format!(
                "compose: {} output wires against {} input wires",
                first.out_wires, then.in_wires
            )));
        }
        let mid = first.rows();
        Ok(BoolMatrix::from_fn(
            first.in_wires,
            then.out_wires,
            |row, col| {
                let mut acc = self.semiring.zero();
                for m in 0..mid {
                    let term = self.semiring.times(then.get(row, m), first.get(m, col));
                    acc = self.semiring.plus(&acc, &term);
                }
                acc
            },
        ))
    }

    /// Kronecker product with `left` as the high-order (leftmost-wire)
    /// factor.
    fn tensor(
        &self,
        left: &Self::Channel,
        right: &Self::Channel,
    ) -> Result<Self::Channel, EvalError> {
        let in_wires = left.in_wires + right.in_wires;
        let out_wires = left.out_wires + right.out_wires;
        self.check_width(in_wires)?;
        self.check_width(out_wires)?;
        Ok(BoolMatrix::from_fn(in_wires, out_wires, |row, col| {
            let row_hi = row >> right.out_wires;
            let row_lo = row & (right.rows() - 1);
            let col_hi = col >> right.in_wires;
            let col_lo = col & (right.cols() - 1);
            self.semiring
                .times(left.get(row_hi, col_hi), right.get(row_lo, col_lo))
        }))
    }

    fn ident(&self, wires: usize) -> Result<Self::Channel, EvalError> {
        self.check_width(wires)?;
        Ok(BoolMatrix::from_fn(wires, wires, |row, col| {
            if row == col {
                self.semiring.one()
            } else {
                self.semiring.zero()
            }
        }))
    }

    /// Permutation matrix moving the first block of wires after the second.
    fn swap_ch(&self, first: usize, second: usize) -> Result<Self::Channel, EvalError> {
        let wires = first + second;
        self.check_width(wires)?;
        Ok(BoolMatrix::from_fn(wires, wires, |row, col| {
            let hi = col >> second;
            let lo = col & ((1 << second) - 1);
            let swapped = (lo << first) | hi;
            if row == swapped {
                self.semiring.one()
            } else {
                self.semiring.zero()
            }
        }))
    }

    fn copy_ch(&self) -> Result<Self::Channel, EvalError> {
        let one = self.semiring.one();
        let zero = self.semiring.zero();
        BoolMatrix::from_rows(
            1,
            2,
            vec![
                vec![one.clone(), zero.clone()],
                vec![zero.clone(), zero.clone()],
                vec![zero.clone(), zero.clone()],
                vec![zero, one],
            ],
        )
    }

    fn del_ch(&self) -> Result<Self::Channel, EvalError> {
        BoolMatrix::from_rows(1, 0, vec![vec![self.semiring.one(), self.semiring.one()]])
    }

    fn channel_arity(&self, channel: &Self::Channel) -> Arity {
        channel.arity()
    }

    fn channels_eq(&self, a: &Self::Channel, b: &Self::Channel) -> bool {
        a.arity() == b.arity()
            && a.entries
                .iter()
                .zip(b.entries.iter())
                .all(|(x, y)| self.semiring.eq_elements(x, y))
    }
}

/// A pair of weight maps `(alpha0, alpha1)` with `alpha0 + alpha1 = one`
/// per label.
#[derive(Debug, Clone)]
pub struct BasWeights<E> {
    pub alpha0: BTreeMap<String, E>,
    pub alpha1: BTreeMap<String, E>,
}

impl<E> BasWeights<E> {
    pub fn new(alpha0: BTreeMap<String, E>, alpha1: BTreeMap<String, E>) -> Self {
        BasWeights { alpha0, alpha1 }
    }
}

/// The stochastic matrix interpretation: gates become the 2 x 2^i matrices
/// selecting conjunction or disjunction, labels the weight column
/// `(alpha0, alpha1)`.
#[derive(Debug, Clone)]
pub struct StochInterpretation<S: Semiring> {
    backend: BoolStochBackend<S>,
    weights: BasWeights<S::Element>,
}

pub fn stoch_interpretation<S: Semiring>(
    semiring: S,
    weights: BasWeights<S::Element>,
) -> Result<StochInterpretation<S>, EvalError> {
    for (label, a0) in &weights.alpha0 {
        let a1 = weights
            .alpha1
            .get(label)
            .ok_or_else(|| EvalError::MissingLabel(label.clone()))?;
        let sum = semiring.plus(a0, a1);
        if !semiring.eq_elements(&sum, &semiring.one()) {
            return Err(EvalError::WeightNotStochastic(label.clone()));
        }
    }
    for label in weights.alpha1.keys() {
        if !weights.alpha0.contains_key(label) {
            return Err(EvalError::MissingLabel(label.clone()));
        }
    }
    Ok(StochInterpretation {
        backend: BoolStochBackend::new(semiring),
        weights,
    })
}

impl<S: Semiring> StochInterpretation<S> {
    pub fn with_width_cap(mut self, cap: usize) -> Self {
        self.backend = BoolStochBackend::with_width_cap(self.backend.semiring.clone(), cap);
        self
    }

    pub fn semiring(&self) -> &S {
        self.backend.semiring()
    }

    pub fn weights(&self) -> &BasWeights<S::Element> {
        &self.weights
    }
}

impl<S: Semiring> Interpretation for StochInterpretation<S> {
    type Backend = BoolStochBackend<S>;

    fn backend(&self) -> &Self::Backend {
        &self.backend
    }

    fn assign(&self, symbol: &Symbol) -> Result<BoolMatrix<S::Element>, EvalError> {
        let semiring = &self.backend.semiring;
        match symbol {
            Symbol::And(n) => {
                self.backend.check_width(*n)?;
                let last = (1usize << n) - 1;
                Ok(BoolMatrix::from_fn(*n, 1, |row, col| {
                    let hit = (col == last) == (row == 1);
                    if hit {
                        semiring.one()
                    } else {
                        semiring.zero()
                    }
                }))
            }
            Symbol::Or(n) => {
                self.backend.check_width(*n)?;
                Ok(BoolMatrix::from_fn(*n, 1, |row, col| {
                    let hit = (col != 0) == (row == 1);
                    if hit {
                        semiring.one()
                    } else {
                        semiring.zero()
                    }
                }))
            }
            Symbol::Label(b) => {
                let a0 = self
                    .weights
                    .alpha0
                    .get(b)
                    .ok_or_else(|| EvalError::MissingLabel(b.clone()))?;
                let a1 = self
                    .weights
                    .alpha1
                    .get(b)
                    .ok_or_else(|| EvalError::MissingLabel(b.clone()))?;
                BoolMatrix::from_rows(0, 1, vec![vec![a0.clone()], vec![a1.clone()]])
            }
        }
    }
}

/// Second component of a closed single-output evaluation: the metric value.
pub fn metric_value<E: Clone>(vector: &BoolMatrix<E>) -> Result<E, EvalError> {
    if vector.arity() != Arity::new(0, 1) {
        return Err(EvalError::ShapeMismatch(format!(
            "metric value needs a 0 -> 1 result, got {}",
            vector.arity()
        )));
    }
    Ok(vector.get(1, 0).clone())
}

/// The propositional interpretation: performing a step costs its attributed
/// weight, not performing it costs one. Meaningful for absorbing semirings;
/// `not_absorbing_warning` reports when the flag is off.
#[derive(Debug, Clone)]
pub struct PropositionalInterpretation<S: Semiring> {
    inner: StochInterpretation<S>,
    absorbing: bool,
}

pub fn propositional_interpretation<S: Semiring>(
    semiring: S,
    attribution: &BTreeMap<String, S::Element>,
) -> Result<PropositionalInterpretation<S>, EvalError> {
    let alpha0 = attribution
        .keys()
        .map(|b| (b.clone(), semiring.one()))
        .collect();
    let alpha1 = attribution.clone();
    let absorbing = semiring.is_absorbing();
    Ok(PropositionalInterpretation {
        inner: stoch_interpretation(semiring, BasWeights::new(alpha0, alpha1))?,
        absorbing,
    })
}

impl<S: Semiring> PropositionalInterpretation<S> {
    pub fn with_width_cap(mut self, cap: usize) -> Self {
        self.inner = self.inner.with_width_cap(cap);
        self
    }

    pub fn not_absorbing_warning(&self) -> Option<String> {
        if self.absorbing {
            None
        } else {
            Some("semiring is not absorbing; the minimal-attack reading does not apply".to_string())
        }
    }
}

impl<S: Semiring> Interpretation for PropositionalInterpretation<S> {
    type Backend = BoolStochBackend<S>;

    fn backend(&self) -> &Self::Backend {
        self.inner.backend()
    }

    fn assign(&self, symbol: &Symbol) -> Result<BoolMatrix<S::Element>, EvalError> {
        self.inner.assign(symbol)
    }
}

/// The unreliability interpretation over the plain reals: each basic event
/// fails with its probability, independently.
pub fn unreliability_interpretation(
    probabilities: &BTreeMap<String, f64>,
) -> Result<StochInterpretation<MetricSemiring>, EvalError> {
    use crate::semiring::ExtReal;
    let mut alpha0 = BTreeMap::new();
    let mut alpha1 = BTreeMap::new();
    for (label, &p) in probabilities {
        if !(0.0..=1.0).contains(&p) {
            return Err(EvalError::ProbabilityOutOfRange {
                label: label.clone(),
                value: p,
            });
        }
        alpha0.insert(label.clone(), ExtReal::finite(1.0 - p));
        alpha1.insert(label.clone(), ExtReal::finite(p));
    }
    stoch_interpretation(
        MetricSemiring::Unreliability,
        BasWeights::new(alpha0, alpha1),
    )
}

/// Minimal successful attacks, computed compositionally: evaluate under the
/// propositional interpretation over the antichain semiring with every label
/// attributed its singleton antichain, then read off the second component.
/// Requires basic-step labels to be node-unique.
pub fn minsuc_semantics(graph: &TermGraph) -> Result<Antichain, EvalError> {
    if graph.arity() != Arity::new(0, 1) {
        return Err(EvalError::NotAnAttackTree(graph.arity()));
    }
    let bas = oracle::bas_nodes(graph);
    let mut labels = Vec::new();
    for &node in &bas {
        let label = graph
            .label(node)
            .and_then(Symbol::as_label)
            .expect("basic step nodes carry labels")
            .to_string();
        if labels.contains(&label) {
            return Err(EvalError::DuplicateBasLabel(label));
        }
        labels.push(label);
    }
    let semiring = AntichainSemiring::new(labels.iter().cloned());
    let attribution: BTreeMap<String, Antichain> = labels
        .iter()
        .map(|b| (b.clone(), Antichain::singleton(b.clone())))
        .collect();
    let interp = propositional_interpretation(semiring, &attribution)?;
    let vector = evaluate(graph, &interp)?;
    metric_value(&vector)
}
