//! The functions backend: channels are total maps between tuples over a
//! carrier. Hosts the Boolean truth-value semantics and the bottom-up
//! semiring metrics, including the fast recursive evaluator for closed
//! single-output trees.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelBackend, EvalError, Interpretation};
use crate::graph::{Arity, NodeId, TermGraph};
use crate::semiring::{MultisetOfSets, MultisetSemiring, Semiring};
use crate::signature::Symbol;

/// The value domain a functions backend works over. Finite carriers can be
/// enumerated for extensional channel equality; infinite ones are compared
/// on sampled points.
pub trait Carrier: Clone + Send + Sync + 'static {
    type Value: Clone + fmt::Debug + Send + Sync + 'static;

    /// All values, if the carrier is finite and small enough to list.
    fn enumerate(&self) -> Option<Vec<Self::Value>>;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Value;
    fn value_eq(&self, a: &Self::Value, b: &Self::Value) -> bool;
}

/// The two-point carrier `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoolCarrier;

impl Carrier for BoolCarrier {
    type Value = bool;

    fn enumerate(&self) -> Option<Vec<bool>> {
        Some(vec![false, true])
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> bool {
        use rand::Rng;
        rng.gen()
    }

    fn value_eq(&self, a: &bool, b: &bool) -> bool {
        a == b
    }
}

/// A semiring's elements as a carrier; infinite, compared with the
/// semiring's own equality.
#[derive(Debug, Clone)]
pub struct SemiringCarrier<S: Semiring> {
    semiring: S,
}

impl<S: Semiring> SemiringCarrier<S> {
    pub fn new(semiring: S) -> Self {
        SemiringCarrier { semiring }
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }
}

impl<S: Semiring> Carrier for SemiringCarrier<S> {
    type Value = S::Element;

    fn enumerate(&self) -> Option<Vec<S::Element>> {
        None
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> S::Element {
        self.semiring.sample_element(rng)
    }

    fn value_eq(&self, a: &S::Element, b: &S::Element) -> bool {
        self.semiring.eq_elements(a, b)
    }
}

/// A total map from `inputs`-tuples to `outputs`-tuples over a carrier.
#[derive(Clone)]
pub struct FuncChannel<V> {
    inputs: usize,
    outputs: usize,
    map: Arc<dyn Fn(&[V]) -> Vec<V> + Send + Sync>,
}

impl<V: 'static> FuncChannel<V> {
    pub fn new(
        inputs: usize,
        outputs: usize,
        map: impl Fn(&[V]) -> Vec<V> + Send + Sync + 'static,
    ) -> Self {
        FuncChannel {
            inputs,
            outputs,
            map: Arc::new(map),
        }
    }

    pub fn constant(values: Vec<V>) -> Self
    where
        V: Clone + Send + Sync,
    {
        let outputs = values.len();
        FuncChannel::new(0, outputs, move |_| values.clone())
    }

    pub fn arity(&self) -> Arity {
        Arity::new(self.inputs, self.outputs)
    }

    pub fn apply(&self, args: &[V]) -> Vec<V> {
        assert_eq!(args.len(), self.inputs, "argument tuple has wrong length");
        let out = (self.map)(args);
        assert_eq!(out.len(), self.outputs, "channel produced wrong tuple length");
        out
    }
}

impl<V> fmt::Debug for FuncChannel<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FuncChannel({} -> {})", self.inputs, self.outputs)
    }
}

/// Channels are functions, composition is function composition, tensor is
/// the cartesian product of maps.
#[derive(Debug, Clone)]
pub struct FunctionsBackend<C: Carrier> {
    carrier: C,
    /// Enumerate all input tuples for equality while `|X|^i` stays below
    /// this bound; fall back to sampled points beyond it.
    enumeration_limit: u64,
    sample_points: usize,
    sample_seed: u64,
}

impl<C: Carrier> FunctionsBackend<C> {
    pub fn new(carrier: C) -> Self {
        FunctionsBackend {
            carrier,
            enumeration_limit: 1 << 16,
            sample_points: 1000,
            sample_seed: 0x5eed,
        }
    }

    pub fn carrier(&self) -> &C {
        &self.carrier
    }

    fn tuples_eq(&self, a: &[C::Value], b: &[C::Value]) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b.iter())
                .all(|(x, y)| self.carrier.value_eq(x, y))
    }
}

pub fn functions_backend<C: Carrier>(carrier: C) -> FunctionsBackend<C> {
    FunctionsBackend::new(carrier)
}

impl<C: Carrier> ChannelBackend for FunctionsBackend<C> {
    type Channel = FuncChannel<C::Value>;

    fn compose(
        &self,
        first: &Self::Channel,
        then: &Self::Channel,
    ) -> Result<Self::Channel, EvalError> {
        if first.outputs != then.inputs {
            return Err(EvalError::ShapeMismatch(format!(
                "compose: {} outputs against {} inputs",
                first.outputs, then.inputs
            )));
        }
        let f = first.map.clone();
        let g = then.map.clone();
        Ok(FuncChannel::new(first.inputs, then.outputs, move |x| {
            g(&f(x))
        }))
    }

    fn tensor(
        &self,
        left: &Self::Channel,
        right: &Self::Channel,
    ) -> Result<Self::Channel, EvalError> {
        let split = left.inputs;
        let f = left.map.clone();
        let g = right.map.clone();
        Ok(FuncChannel::new(
            left.inputs + right.inputs,
            left.outputs + right.outputs,
            move |x| {
                let mut out = f(&x[..split]);
                out.extend(g(&x[split..]));
                out
            },
        ))
    }

    fn ident(&self, wires: usize) -> Result<Self::Channel, EvalError> {
        Ok(FuncChannel::new(wires, wires, |x| x.to_vec()))
    }

    fn swap_ch(&self, first: usize, second: usize) -> Result<Self::Channel, EvalError> {
        Ok(FuncChannel::new(
            first + second,
            first + second,
            move |x| {
                let mut out = x[first..].to_vec();
                out.extend_from_slice(&x[..first]);
                out
            },
        ))
    }

    fn copy_ch(&self) -> Result<Self::Channel, EvalError> {
        Ok(FuncChannel::new(1, 2, |x: &[C::Value]| {
            vec![x[0].clone(), x[0].clone()]
        }))
    }

    fn del_ch(&self) -> Result<Self::Channel, EvalError> {
        Ok(FuncChannel::new(1, 0, |_| Vec::new()))
    }

    fn channel_arity(&self, channel: &Self::Channel) -> Arity {
        channel.arity()
    }

    /// Extensional equality: exhaustive over all input tuples when the
    /// carrier is finite and the domain small, sampled otherwise.
    fn channels_eq(&self, a: &Self::Channel, b: &Self::Channel) -> bool {
        if a.arity() != b.arity() {
            return false;
        }
        if let Some(values) = self.carrier.enumerate() {
            let domain = (values.len() as u64).checked_pow(a.inputs as u32);
            if domain.is_some_and(|d| d <= self.enumeration_limit) {
                let mut tuple: Vec<C::Value> = Vec::with_capacity(a.inputs);
                return all_tuples(&values, a.inputs, &mut tuple, &mut |args| {
                    self.tuples_eq(&a.apply(args), &b.apply(args))
                });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.sample_seed);
        for _ in 0..self.sample_points {
            let args: Vec<C::Value> = (0..a.inputs).map(|_| self.carrier.sample(&mut rng)).collect();
            if !self.tuples_eq(&a.apply(&args), &b.apply(&args)) {
                return false;
            }
        }
        true
    }
}

fn all_tuples<V: Clone>(
    values: &[V],
    len: usize,
    tuple: &mut Vec<V>,
    check: &mut impl FnMut(&[V]) -> bool,
) -> bool {
    if tuple.len() == len {
        return check(tuple);
    }
    for v in values {
        tuple.push(v.clone());
        if !all_tuples(values, len, tuple, check) {
            return false;
        }
        tuple.pop();
    }
    true
}

/// Truth-value semantics: labels become the assigned constants, gates the
/// corresponding Boolean connectives.
#[derive(Debug, Clone)]
pub struct BooleanInterpretation {
    backend: FunctionsBackend<BoolCarrier>,
    assignment: BTreeMap<String, bool>,
}

pub fn boolean_interpretation(assignment: BTreeMap<String, bool>) -> BooleanInterpretation {
    BooleanInterpretation {
        backend: FunctionsBackend::new(BoolCarrier),
        assignment,
    }
}

impl Interpretation for BooleanInterpretation {
    type Backend = FunctionsBackend<BoolCarrier>;

    fn backend(&self) -> &Self::Backend {
        &self.backend
    }

    fn assign(&self, symbol: &Symbol) -> Result<FuncChannel<bool>, EvalError> {
        Ok(match symbol {
            Symbol::And(n) => FuncChannel::new(*n, 1, |x| vec![x.iter().all(|&b| b)]),
            Symbol::Or(n) => FuncChannel::new(*n, 1, |x| vec![x.iter().any(|&b| b)]),
            Symbol::Label(b) => {
                let value = *self
                    .assignment
                    .get(b)
                    .ok_or_else(|| EvalError::MissingLabel(b.clone()))?;
                FuncChannel::constant(vec![value])
            }
        })
    }
}

/// Bottom-up semiring semantics: AND is the semiring product of its
/// children, OR the sum, labels the attributed constants.
#[derive(Debug, Clone)]
pub struct BottomUpInterpretation<S: Semiring> {
    backend: FunctionsBackend<SemiringCarrier<S>>,
    semiring: S,
    attribution: BTreeMap<String, S::Element>,
}

pub fn bottom_up_interpretation<S: Semiring>(
    semiring: S,
    attribution: BTreeMap<String, S::Element>,
) -> BottomUpInterpretation<S> {
    BottomUpInterpretation {
        backend: FunctionsBackend::new(SemiringCarrier::new(semiring.clone())),
        semiring,
        attribution,
    }
}

impl<S: Semiring> Interpretation for BottomUpInterpretation<S> {
    type Backend = FunctionsBackend<SemiringCarrier<S>>;

    fn backend(&self) -> &Self::Backend {
        &self.backend
    }

    fn assign(&self, symbol: &Symbol) -> Result<FuncChannel<S::Element>, EvalError> {
        // gates have at least one child, so fold from the first value; this
        // keeps instances with degenerate units (max challenge) meaningful
        Ok(match symbol {
            Symbol::And(n) => {
                let semiring = self.semiring.clone();
                FuncChannel::new(*n, 1, move |x: &[S::Element]| {
                    let (first, rest) = x.split_first().expect("gate arity is at least one");
                    vec![rest
                        .iter()
                        .fold(first.clone(), |acc, v| semiring.times(&acc, v))]
                })
            }
            Symbol::Or(n) => {
                let semiring = self.semiring.clone();
                FuncChannel::new(*n, 1, move |x: &[S::Element]| {
                    let (first, rest) = x.split_first().expect("gate arity is at least one");
                    vec![rest
                        .iter()
                        .fold(first.clone(), |acc, v| semiring.plus(&acc, v))]
                })
            }
            Symbol::Label(b) => {
                let value = self
                    .attribution
                    .get(b)
                    .ok_or_else(|| EvalError::MissingLabel(b.clone()))?
                    .clone();
                FuncChannel::constant(vec![value])
            }
        })
    }
}

/// Direct recursion over a closed single-output tree, memoized per node.
/// Agrees with the functorial evaluation under the bottom-up interpretation;
/// memoization is sound because every symbol image is deterministic.
pub fn eval_bottom_up_recursive<S: Semiring>(
    graph: &TermGraph,
    semiring: &S,
    attribution: &BTreeMap<String, S::Element>,
) -> Result<S::Element, EvalError> {
    if graph.arity() != Arity::new(0, 1) {
        return Err(EvalError::NotAnAttackTree(graph.arity()));
    }
    let mut memo: BTreeMap<NodeId, S::Element> = BTreeMap::new();
    node_value(graph, graph.outputs()[0], semiring, attribution, &mut memo)
}

fn node_value<S: Semiring>(
    graph: &TermGraph,
    node: NodeId,
    semiring: &S,
    attribution: &BTreeMap<String, S::Element>,
    memo: &mut BTreeMap<NodeId, S::Element>,
) -> Result<S::Element, EvalError> {
    if let Some(value) = memo.get(&node) {
        return Ok(value.clone());
    }
    let symbol = graph
        .label(node)
        .ok_or_else(|| EvalError::ShapeMismatch(format!("node {node} has no label")))?;
    let value = match symbol {
        Symbol::Label(b) => attribution
            .get(b)
            .ok_or_else(|| EvalError::MissingLabel(b.clone()))?
            .clone(),
        gate @ (Symbol::And(_) | Symbol::Or(_)) => {
            let is_and = matches!(gate, Symbol::And(_));
            let mut acc: Option<S::Element> = None;
            for &child in graph.children(node) {
                let v = node_value(graph, child, semiring, attribution, memo)?;
                acc = Some(match acc {
                    None => v,
                    Some(done) if is_and => semiring.times(&done, &v),
                    Some(done) => semiring.plus(&done, &v),
                });
            }
            acc.expect("gate arity is at least one")
        }
    };
    memo.insert(node, value.clone());
    Ok(value)
}

/// The multiset-of-attacks semantics: bottom-up over the multiset semiring
/// with every label attributed its singleton multiset. Insensitive to
/// sharing.
pub fn multiset_semantics(graph: &TermGraph) -> Result<MultisetOfSets, EvalError> {
    let labels: Vec<String> = graph.signature().labels().map(str::to_string).collect();
    let semiring = MultisetSemiring::new(labels.iter().cloned());
    let attribution: BTreeMap<String, MultisetOfSets> = labels
        .into_iter()
        .map(|b| {
            let value = MultisetOfSets::singleton(b.clone());
            (b, value)
        })
        .collect();
    eval_bottom_up_recursive(graph, &semiring, &attribution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{check_axioms, evaluate};
    use crate::semiring::{ExtReal, MetricSemiring};
    use crate::signature::Signature;
    use rand::Rng;

    fn sig() -> Signature {
        Signature::attack_tree(["D", "F", "S"])
    }

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn office_tree() -> TermGraph {
        let mut labels = BTreeMap::new();
        labels.insert(n(0), Symbol::label("D"));
        labels.insert(n(1), Symbol::label("F"));
        labels.insert(n(2), Symbol::label("S"));
        labels.insert(n(3), Symbol::Or(2));
        labels.insert(n(4), Symbol::Or(2));
        labels.insert(n(5), Symbol::And(2));
        let mut children = BTreeMap::new();
        children.insert(n(3), vec![n(0), n(1)]);
        children.insert(n(4), vec![n(1), n(2)]);
        children.insert(n(5), vec![n(3), n(4)]);
        TermGraph::new(sig(), (0..=5).map(n), vec![], vec![n(5)], labels, children).unwrap()
    }

    /// Same shape but with the middle step duplicated instead of shared.
    fn duplicated_tree() -> TermGraph {
        let mut labels = BTreeMap::new();
        labels.insert(n(0), Symbol::label("D"));
        labels.insert(n(1), Symbol::label("F"));
        labels.insert(n(2), Symbol::label("F"));
        labels.insert(n(3), Symbol::label("S"));
        labels.insert(n(4), Symbol::Or(2));
        labels.insert(n(5), Symbol::Or(2));
        labels.insert(n(6), Symbol::And(2));
        let mut children = BTreeMap::new();
        children.insert(n(4), vec![n(0), n(1)]);
        children.insert(n(5), vec![n(2), n(3)]);
        children.insert(n(6), vec![n(4), n(5)]);
        TermGraph::new(sig(), (0..=6).map(n), vec![], vec![n(6)], labels, children).unwrap()
    }

    fn costs() -> BTreeMap<String, ExtReal> {
        [
            ("D".to_string(), ExtReal::finite(30.0)),
            ("F".to_string(), ExtReal::finite(100.0)),
            ("S".to_string(), ExtReal::finite(80.0)),
        ]
        .into()
    }

    #[test]
    fn copy_duplicates_values() {
        let backend = FunctionsBackend::new(SemiringCarrier::new(MetricSemiring::MinCost));
        let copy = backend.copy_ch().unwrap();
        let out = copy.apply(&[ExtReal::finite(5.0)]);
        assert_eq!(out, vec![ExtReal::finite(5.0), ExtReal::finite(5.0)]);
    }

    #[test]
    fn tensor_is_cartesian_product() {
        let backend = FunctionsBackend::new(BoolCarrier);
        let not = FuncChannel::new(1, 1, |x: &[bool]| vec![!x[0]]);
        let id = backend.ident(1).unwrap();
        let pair = backend.tensor(&not, &id).unwrap();
        assert_eq!(pair.apply(&[true, true]), vec![false, true]);
        assert_eq!(pair.apply(&[false, true]), vec![true, true]);
    }

    #[test]
    fn axioms_hold_over_booleans() {
        let backend = FunctionsBackend::new(BoolCarrier);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut sampler = |i: usize, j: usize| {
            let table: Vec<Vec<bool>> = (0..(1usize << i))
                .map(|_| (0..j).map(|_| rng.gen()).collect())
                .collect();
            FuncChannel::new(i, j, move |x: &[bool]| {
                let mut index = 0usize;
                for &bit in x {
                    index = (index << 1) | bit as usize;
                }
                table[index].clone()
            })
        };
        let report = check_axioms(&backend, &mut sampler, 100);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn boolean_semantics_of_office_tree() {
        let assignment: BTreeMap<String, bool> =
            [("D".into(), true), ("F".into(), false), ("S".into(), true)].into();
        let interp = boolean_interpretation(assignment);
        let channel = evaluate(&office_tree(), &interp).unwrap();
        assert_eq!(channel.apply(&[]), vec![true]);

        let all_zero: BTreeMap<String, bool> =
            [("D".into(), false), ("F".into(), false), ("S".into(), false)].into();
        let interp = boolean_interpretation(all_zero);
        let channel = evaluate(&office_tree(), &interp).unwrap();
        assert_eq!(channel.apply(&[]), vec![false]);
    }

    #[test]
    fn missing_label_is_reported() {
        let interp = boolean_interpretation(BTreeMap::new());
        let err = evaluate(&office_tree(), &interp).unwrap_err();
        assert!(matches!(err, EvalError::MissingLabel(_)));
    }

    #[test]
    fn bottom_up_office_tree_costs() {
        let interp = bottom_up_interpretation(MetricSemiring::MinCost, costs());
        let channel = evaluate(&office_tree(), &interp).unwrap();
        assert_eq!(channel.apply(&[]), vec![ExtReal::finite(110.0)]);
        // sharing is invisible to the bottom-up reading
        let channel = evaluate(&duplicated_tree(), &interp).unwrap();
        assert_eq!(channel.apply(&[]), vec![ExtReal::finite(110.0)]);
    }

    #[test]
    fn recursive_matches_functorial() {
        let value =
            eval_bottom_up_recursive(&office_tree(), &MetricSemiring::MinCost, &costs()).unwrap();
        assert_eq!(value, ExtReal::finite(110.0));
    }

    #[test]
    fn single_step_and_unary_or() {
        let s = sig();
        let leaf = TermGraph::atomic(&crate::graph::AtomicKind::Symbol(Symbol::label("D")), &s)
            .unwrap();
        let attribution: BTreeMap<String, ExtReal> = [("D".to_string(), ExtReal::finite(7.0))].into();
        assert_eq!(
            eval_bottom_up_recursive(&leaf, &MetricSemiring::MinCost, &attribution).unwrap(),
            ExtReal::finite(7.0)
        );

        let or1 = leaf
            .seq_compose(&TermGraph::atomic(&crate::graph::AtomicKind::Symbol(Symbol::Or(1)), &s).unwrap())
            .unwrap();
        assert_eq!(
            eval_bottom_up_recursive(&or1, &MetricSemiring::MinCost, &attribution).unwrap(),
            ExtReal::finite(7.0)
        );
    }

    #[test]
    fn not_a_tree_is_rejected() {
        let id1 = TermGraph::identity(1, &sig());
        let err = eval_bottom_up_recursive(&id1, &MetricSemiring::MinCost, &costs()).unwrap_err();
        assert!(matches!(err, EvalError::NotAnAttackTree(_)));
    }

    #[test]
    fn multiset_semantics_of_office_tree() {
        use crate::semiring::AttackSet;
        let expected = MultisetOfSets::from_counts([
            (AttackSet::from(["D".into(), "F".into()]), 1),
            (AttackSet::from(["D".into(), "S".into()]), 1),
            (AttackSet::from(["F".into()]), 1),
            (AttackSet::from(["F".into(), "S".into()]), 1),
        ]);
        assert_eq!(multiset_semantics(&office_tree()).unwrap(), expected);
        // duplicating the shared step leaves the multisets unchanged
        assert_eq!(multiset_semantics(&duplicated_tree()).unwrap(), expected);
    }

    #[test]
    fn multiset_singleton_and_shared_conjunction() {
        use crate::graph::AtomicKind;
        use crate::semiring::AttackSet;
        let s = sig();
        let leaf = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        assert_eq!(
            multiset_semantics(&leaf).unwrap(),
            MultisetOfSets::singleton("D")
        );

        // AND over the same node twice: {D} ∪ {D} = {D}
        let mut labels = BTreeMap::new();
        labels.insert(n(0), Symbol::label("D"));
        labels.insert(n(1), Symbol::And(2));
        let mut children = BTreeMap::new();
        children.insert(n(1), vec![n(0), n(0)]);
        let shared =
            TermGraph::new(s, [n(0), n(1)], vec![], vec![n(1)], labels, children).unwrap();
        assert_eq!(
            multiset_semantics(&shared).unwrap(),
            MultisetOfSets::from_counts([(AttackSet::from(["D".into()]), 1)])
        );
    }

    #[test]
    fn determinism_law_for_symbol_images() {
        // copy after f agrees with (f ⊗ f) after duplicating f's inputs
        let assignment: BTreeMap<String, bool> =
            [("D".into(), true), ("F".into(), false), ("S".into(), true)].into();
        let interp = boolean_interpretation(assignment);
        let backend = interp.backend();
        for symbol in [Symbol::And(2), Symbol::Or(2), Symbol::label("D")] {
            let f = interp.assign(&symbol).unwrap();
            let copied = backend.compose(&f, &backend.copy_ch().unwrap()).unwrap();
            let arity = f.arity().inputs;
            let paired = backend.tensor(&f, &f).unwrap();
            let mut values = vec![false; arity];
            loop {
                let mut doubled = values.clone();
                doubled.extend(values.iter().copied());
                assert_eq!(copied.apply(&values), paired.apply(&doubled));
                // advance the bit odometer
                let mut done = true;
                for bit in values.iter_mut() {
                    if !*bit {
                        *bit = true;
                        done = false;
                        break;
                    }
                    *bit = false;
                }
                if done {
                    break;
                }
            }
        }
    }
}
