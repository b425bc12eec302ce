//! Brute-force reference implementations: the structure function, attack
//! enumeration, successful and minimal successful attacks, the explicit
//! matrix formula and enumeration-based metrics. Deliberately naive; this
//! module is the ground truth the compositional evaluators are tested
//! against.

use std::collections::BTreeMap;

use crate::channel::EvalError;
use crate::graph::{Arity, NodeId, TermGraph};
use crate::matrix::{BasWeights, BoolMatrix};
use crate::semiring::{Antichain, AttackSet, Semiring};
use crate::signature::Symbol;

/// Enumeration stops once a component has more basic steps than this;
/// `*_with_cap` variants override it.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Which basic steps an attacker performs, totally defined on the
/// component's basic-step nodes.
pub type Attack = BTreeMap<NodeId, bool>;

/// Non-input nodes labelled by a basic-step label, in node order.
pub fn bas_nodes(graph: &TermGraph) -> Vec<NodeId> {
    graph
        .nodes()
        .filter(|&n| !graph.is_input(n) && graph.label(n).is_some_and(Symbol::is_label))
        .collect()
}

/// Recursive evaluation of a component's outputs: inputs read from `inputs`,
/// basic steps from the attack, gates fold their children. Duplicated output
/// positions repeat the same bit.
pub fn structure_function(
    graph: &TermGraph,
    attack: &Attack,
    inputs: &[bool],
) -> Result<Vec<bool>, EvalError> {
    let bas = bas_nodes(graph);
    for &node in &bas {
        if !attack.contains_key(&node) {
            return Err(EvalError::ShapeMismatch(format!(
                "attack does not cover basic step node {node}"
            )));
        }
    }
    if inputs.len() != graph.arity().inputs {
        return Err(EvalError::ShapeMismatch(format!(
            "expected {} input bits, got {}",
            graph.arity().inputs,
            inputs.len()
        )));
    }
    let lookup = |node: NodeId| attack[&node];
    Ok(eval_outputs(graph, &lookup, inputs))
}

fn eval_outputs(graph: &TermGraph, bas_value: &dyn Fn(NodeId) -> bool, inputs: &[bool]) -> Vec<bool> {
    let input_pos: BTreeMap<NodeId, usize> = graph
        .inputs()
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, i))
        .collect();
    let mut memo: BTreeMap<NodeId, bool> = BTreeMap::new();
    graph
        .outputs()
        .iter()
        .map(|&o| eval_node(graph, o, bas_value, inputs, &input_pos, &mut memo))
        .collect()
}

fn eval_node(
    graph: &TermGraph,
    node: NodeId,
    bas_value: &dyn Fn(NodeId) -> bool,
    inputs: &[bool],
    input_pos: &BTreeMap<NodeId, usize>,
    memo: &mut BTreeMap<NodeId, bool>,
) -> bool {
    if let Some(&v) = memo.get(&node) {
        return v;
    }
    let value = if let Some(&pos) = input_pos.get(&node) {
        inputs[pos]
    } else {
        match graph.label(node).expect("non-input nodes are labelled") {
            Symbol::Label(_) => bas_value(node),
            Symbol::And(_) => {
                let mut acc = true;
                for &c in graph.children(node) {
                    acc &= eval_node(graph, c, bas_value, inputs, input_pos, memo);
                }
                acc
            }
            Symbol::Or(_) => {
                let mut acc = false;
                for &c in graph.children(node) {
                    acc |= eval_node(graph, c, bas_value, inputs, input_pos, memo);
                }
                acc
            }
        }
    };
    memo.insert(node, value);
    value
}

fn check_cap(bas_count: usize, cap: usize) -> Result<(), EvalError> {
    if bas_count > cap {
        return Err(EvalError::EnumerationCapExceeded {
            bas: bas_count,
            cap,
        });
    }
    Ok(())
}

/// Bit `k - 1 - position` of the counter selects the step at `position`, so
/// the first basic step is the most significant bit and attacks come out in
/// binary-counter order.
fn mask_bit(mask: usize, position: usize, count: usize) -> bool {
    (mask >> (count - 1 - position)) & 1 == 1
}

fn attack_from_mask(bas: &[NodeId], mask: usize) -> Attack {
    bas.iter()
        .enumerate()
        .map(|(i, &n)| (n, mask_bit(mask, i, bas.len())))
        .collect()
}

fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn index_to_bits(index: usize, len: usize) -> Vec<bool> {
    (0..len).map(|i| (index >> (len - 1 - i)) & 1 == 1).collect()
}

fn successful_masks(graph: &TermGraph, cap: usize) -> Result<(Vec<NodeId>, Vec<usize>), EvalError> {
    if graph.arity() != Arity::new(0, 1) {
        return Err(EvalError::NotAnAttackTree(graph.arity()));
    }
    let bas = bas_nodes(graph);
    check_cap(bas.len(), cap)?;
    let count = bas.len();
    let index: BTreeMap<NodeId, usize> =
        bas.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut masks = Vec::new();
    for mask in 0..(1usize << count) {
        let lookup = |node: NodeId| mask_bit(mask, index[&node], count);
        if eval_outputs(graph, &lookup, &[]) == [true] {
            masks.push(mask);
        }
    }
    Ok((bas, masks))
}

/// All successful attacks of a closed single-output tree, in counter order.
pub fn suc(graph: &TermGraph) -> Result<Vec<Attack>, EvalError> {
    suc_with_cap(graph, DEFAULT_ENUMERATION_CAP)
}

pub fn suc_with_cap(graph: &TermGraph, cap: usize) -> Result<Vec<Attack>, EvalError> {
    let (bas, masks) = successful_masks(graph, cap)?;
    Ok(masks
        .into_iter()
        .map(|mask| attack_from_mask(&bas, mask))
        .collect())
}

/// Minimal successful attacks as label sets. Requires basic-step labels to
/// be node-unique so attacks can be identified with label sets.
pub fn minsuc(graph: &TermGraph) -> Result<Antichain, EvalError> {
    minsuc_with_cap(graph, DEFAULT_ENUMERATION_CAP)
}

pub fn minsuc_with_cap(graph: &TermGraph, cap: usize) -> Result<Antichain, EvalError> {
    let (bas, masks) = successful_masks(graph, cap)?;
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
    Ok(minimal_masks(&masks)
        .into_iter()
        .map(|mask| {
            labels
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask_bit(mask, i, bas.len()))
                .map(|(_, l)| l.clone())
                .collect::<AttackSet>()
        })
        .collect())
}

fn minimal_masks(masks: &[usize]) -> Vec<usize> {
    masks
        .iter()
        .copied()
        .filter(|&m| !masks.iter().any(|&m2| m2 != m && m2 & m == m2))
        .collect()
}

/// The explicit matrix of a component: entry `(y, x)` sums, over the attacks
/// that steer inputs `x` to outputs `y`, the product of `alpha1` over
/// performed steps and `alpha0` over omitted ones.
pub fn matrix_by_formula<S: Semiring>(
    graph: &TermGraph,
    semiring: &S,
    weights: &BasWeights<S::Element>,
) -> Result<BoolMatrix<S::Element>, EvalError> {
    matrix_by_formula_with_cap(graph, semiring, weights, DEFAULT_ENUMERATION_CAP)
}

pub fn matrix_by_formula_with_cap<S: Semiring>(
    graph: &TermGraph,
    semiring: &S,
    weights: &BasWeights<S::Element>,
    cap: usize,
) -> Result<BoolMatrix<S::Element>, EvalError> {
    let Arity { inputs, outputs } = graph.arity();
    let bas = bas_nodes(graph);
    check_cap(bas.len(), cap)?;
    let count = bas.len();
    let index: BTreeMap<NodeId, usize> =
        bas.iter().enumerate().map(|(i, &n)| (n, i)).collect();

    let mut alpha = Vec::with_capacity(count);
    for &node in &bas {
        let label = graph
            .label(node)
            .and_then(Symbol::as_label)
            .expect("basic step nodes carry labels");
        let a0 = weights
            .alpha0
            .get(label)
            .ok_or_else(|| EvalError::MissingLabel(label.to_string()))?;
        let a1 = weights
            .alpha1
            .get(label)
            .ok_or_else(|| EvalError::MissingLabel(label.to_string()))?;
        alpha.push((a0.clone(), a1.clone()));
    }

    let mut cells =
        vec![vec![semiring.zero(); 1 << inputs]; 1 << outputs];
    for x in 0..(1usize << inputs) {
        let input_bits = index_to_bits(x, inputs);
        for mask in 0..(1usize << count) {
            let lookup = |node: NodeId| mask_bit(mask, index[&node], count);
            let y = bits_to_index(&eval_outputs(graph, &lookup, &input_bits));
            let mut term = semiring.one();
            for (i, (a0, a1)) in alpha.iter().enumerate() {
                let factor = if mask_bit(mask, i, count) { a1 } else { a0 };
                term = semiring.times(&term, factor);
            }
            cells[y][x] = semiring.plus(&cells[y][x], &term);
        }
    }
    BoolMatrix::from_rows(inputs, outputs, cells)
}

/// Sum over minimal successful attacks of the product of the attribution
/// over performed steps. Matches the matrix route when the semiring is
/// absorbing.
pub fn prop_metric_by_formula<S: Semiring>(
    graph: &TermGraph,
    semiring: &S,
    attribution: &BTreeMap<String, S::Element>,
) -> Result<S::Element, EvalError> {
    prop_metric_by_formula_with_cap(graph, semiring, attribution, DEFAULT_ENUMERATION_CAP)
}

pub fn prop_metric_by_formula_with_cap<S: Semiring>(
    graph: &TermGraph,
    semiring: &S,
    attribution: &BTreeMap<String, S::Element>,
    cap: usize,
) -> Result<S::Element, EvalError> {
    let (bas, masks) = successful_masks(graph, cap)?;
    let count = bas.len();
    let mut total = semiring.zero();
    for mask in minimal_masks(&masks) {
        let mut term = semiring.one();
        for (i, &node) in bas.iter().enumerate() {
            if !mask_bit(mask, i, count) {
                continue;
            }
            let label = graph
                .label(node)
                .and_then(Symbol::as_label)
                .expect("basic step nodes carry labels");
            let value = attribution
                .get(label)
                .ok_or_else(|| EvalError::MissingLabel(label.to_string()))?;
            term = semiring.times(&term, value);
        }
        total = semiring.plus(&total, &term);
    }
    Ok(total)
}

/// Total probability of the successful attacks under independent Bernoulli
/// steps.
pub fn unreliability_by_enumeration(
    graph: &TermGraph,
    probabilities: &BTreeMap<String, f64>,
) -> Result<f64, EvalError> {
    unreliability_by_enumeration_with_cap(graph, probabilities, DEFAULT_ENUMERATION_CAP)
}

pub fn unreliability_by_enumeration_with_cap(
    graph: &TermGraph,
    probabilities: &BTreeMap<String, f64>,
    cap: usize,
) -> Result<f64, EvalError> {
    let (bas, masks) = successful_masks(graph, cap)?;
    let count = bas.len();
    let mut p = Vec::with_capacity(count);
    for &node in &bas {
        let label = graph
            .label(node)
            .and_then(Symbol::as_label)
            .expect("basic step nodes carry labels");
        let value = probabilities
            .get(label)
            .ok_or_else(|| EvalError::MissingLabel(label.to_string()))?;
        if !(0.0..=1.0).contains(value) {
            return Err(EvalError::ProbabilityOutOfRange {
                label: label.to_string(),
                value: *value,
            });
        }
        p.push(*value);
    }
    let mut total = 0.0;
    for mask in masks {
        let mut term = 1.0;
        for (i, &pv) in p.iter().enumerate() {
            term *= if mask_bit(mask, i, count) { pv } else { 1.0 - pv };
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AtomicKind;
    use crate::semiring::{ExtReal, MetricSemiring};
    use crate::signature::Signature;

    fn sig() -> Signature {
        Signature::attack_tree(["D", "F", "S"])
    }

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn ext(v: f64) -> ExtReal {
        ExtReal::finite(v)
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

    fn costs() -> BTreeMap<String, ExtReal> {
        [
            ("D".to_string(), ext(30.0)),
            ("F".to_string(), ext(100.0)),
            ("S".to_string(), ext(80.0)),
        ]
        .into()
    }

    #[test]
    fn bas_node_listing() {
        assert_eq!(bas_nodes(&office_tree()), vec![n(0), n(1), n(2)]);
        assert!(bas_nodes(&TermGraph::identity(2, &sig())).is_empty());

        // a discarded basic step still counts
        let s = sig();
        let leaf = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        let discarded = leaf
            .seq_compose(&TermGraph::atomic(&AtomicKind::Del, &s).unwrap())
            .unwrap();
        assert_eq!(bas_nodes(&discarded).len(), 1);
    }

    #[test]
    fn structure_function_of_office_tree() {
        let tree = office_tree();
        let attack: Attack = [(n(0), true), (n(1), false), (n(2), true)].into();
        assert_eq!(structure_function(&tree, &attack, &[]).unwrap(), vec![true]);

        // (x_D or x_F) and (x_F or x_S), all eight attacks
        for mask in 0..8usize {
            let d = mask & 4 != 0;
            let f = mask & 2 != 0;
            let s = mask & 1 != 0;
            let attack: Attack = [(n(0), d), (n(1), f), (n(2), s)].into();
            let expected = (d || f) && (f || s);
            assert_eq!(
                structure_function(&tree, &attack, &[]).unwrap(),
                vec![expected]
            );
        }
    }

    #[test]
    fn structure_function_duplicates_outputs() {
        let copy = TermGraph::atomic(&AtomicKind::Copy, &sig()).unwrap();
        let out = structure_function(&copy, &Attack::new(), &[true]).unwrap();
        assert_eq!(out, vec![true, true]);
    }

    #[test]
    fn successful_and_minimal_attacks() {
        let tree = office_tree();
        let successes = suc(&tree).unwrap();
        assert_eq!(successes.len(), 5);
        let minimal = minsuc(&tree).unwrap();
        let expected: Antichain = [
            AttackSet::from(["F".to_string()]),
            AttackSet::from(["D".to_string(), "S".to_string()]),
        ]
        .into_iter()
        .collect();
        assert_eq!(minimal, expected);
    }

    #[test]
    fn gate_over_single_step() {
        let s = sig();
        let leaf = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        let and1 = leaf
            .seq_compose(&TermGraph::atomic(&AtomicKind::Symbol(Symbol::And(1)), &s).unwrap())
            .unwrap();
        assert_eq!(suc(&and1).unwrap().len(), 1);
        assert_eq!(minsuc(&and1).unwrap(), Antichain::singleton("D"));

        let d = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        let f = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("F")), &s).unwrap();
        let or2 = d
            .par_compose(&f)
            .unwrap()
            .seq_compose(&TermGraph::atomic(&AtomicKind::Symbol(Symbol::Or(2)), &s).unwrap())
            .unwrap();
        assert_eq!(suc(&or2).unwrap().len(), 3);
        let expected: Antichain = [
            AttackSet::from(["D".to_string()]),
            AttackSet::from(["F".to_string()]),
        ]
        .into_iter()
        .collect();
        assert_eq!(minsuc(&or2).unwrap(), expected);
    }

    #[test]
    fn formula_on_single_step_and_wiring() {
        let s = sig();
        let mincost = MetricSemiring::MinCost;
        let weights = BasWeights::new(
            [("D".to_string(), ext(0.0))].into(),
            [("D".to_string(), ext(30.0))].into(),
        );
        let leaf = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        let column = matrix_by_formula(&leaf, &mincost, &weights).unwrap();
        assert_eq!(column.column(0), vec![ext(0.0), ext(30.0)]);

        // components without basic steps reduce to their structure function
        let copy = TermGraph::atomic(&AtomicKind::Copy, &s).unwrap();
        let m = matrix_by_formula(&copy, &mincost, &weights).unwrap();
        use crate::channel::ChannelBackend;
        let backend = crate::matrix::BoolStochBackend::new(mincost);
        assert!(backend.channels_eq(&m, &backend.copy_ch().unwrap()));
    }

    #[test]
    fn formula_on_office_tree() {
        let mincost = MetricSemiring::MinCost;
        let weights = BasWeights::new(
            costs().keys().map(|k| (k.clone(), ext(0.0))).collect(),
            costs(),
        );
        let m = matrix_by_formula(&office_tree(), &mincost, &weights).unwrap();
        assert_eq!(m.column(0), vec![ext(0.0), ext(100.0)]);
    }

    #[test]
    fn prop_metric_values() {
        let mincost = MetricSemiring::MinCost;
        assert_eq!(
            prop_metric_by_formula(&office_tree(), &mincost, &costs()).unwrap(),
            ext(100.0)
        );
        let s = sig();
        let leaf = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        assert_eq!(
            prop_metric_by_formula(&leaf, &mincost, &costs()).unwrap(),
            ext(30.0)
        );
    }

    #[test]
    fn unreliability_enumeration() {
        let s = sig();
        let d = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        let f = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("F")), &s).unwrap();
        let and2 = d
            .par_compose(&f)
            .unwrap()
            .seq_compose(&TermGraph::atomic(&AtomicKind::Symbol(Symbol::And(2)), &s).unwrap())
            .unwrap();
        let p: BTreeMap<String, f64> = [("D".to_string(), 0.5), ("F".to_string(), 0.5)].into();
        assert_eq!(unreliability_by_enumeration(&and2, &p).unwrap(), 0.25);

        let leaf = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s).unwrap();
        let zero: BTreeMap<String, f64> = [("D".to_string(), 0.0)].into();
        assert_eq!(unreliability_by_enumeration(&leaf, &zero).unwrap(), 0.0);

        let probs: BTreeMap<String, f64> = [
            ("D".to_string(), 0.2),
            ("F".to_string(), 0.5),
            ("S".to_string(), 0.4),
        ]
        .into();
        // five successful attacks: .04 + .06 + .04 + .16 + .24
        let total = unreliability_by_enumeration(&office_tree(), &probs).unwrap();
        assert!((total - 0.54).abs() < 1e-12);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let err = suc_with_cap(&office_tree(), 2).unwrap_err();
        assert!(matches!(
            err,
            EvalError::EnumerationCapExceeded { bas: 3, cap: 2 }
        ));
    }
}
