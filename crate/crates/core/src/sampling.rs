//! Deterministic random generators for term graphs, stochastic matrices and
//! weight assignments. Used by the law checkers and the test suites; seed
//! the generator yourself for reproducible runs.

use std::collections::BTreeMap;

use rand::Rng;

use crate::graph::{NodeId, TermGraph};
use crate::matrix::{BasWeights, BoolMatrix};
use crate::semiring::{ExtReal, MetricSemiring, Semiring};
use crate::signature::{Signature, Symbol};

/// Shape parameters for random components. All graphs drawn from one config
/// share the signature over `label_pool`, so they can be composed.
#[derive(Debug, Clone)]
pub struct ComponentCfg {
    pub inputs: usize,
    pub outputs: usize,
    pub max_bas: usize,
    pub max_gates: usize,
    pub label_pool: Vec<String>,
    /// Give every basic-step node a distinct label from the pool.
    pub unique_labels: bool,
}

impl ComponentCfg {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        ComponentCfg {
            inputs,
            outputs,
            max_bas: 4,
            max_gates: 4,
            label_pool: (0..8).map(|i| format!("b{i}")).collect(),
            unique_labels: false,
        }
    }

    pub fn with_arity(mut self, inputs: usize, outputs: usize) -> Self {
        self.inputs = inputs;
        self.outputs = outputs;
        self
    }

    pub fn signature(&self) -> Signature {
        Signature::attack_tree(self.label_pool.iter().cloned())
    }
}

/// Draws a valid component: children always point at earlier nodes, so the
/// result is acyclic by construction; outputs may repeat nodes and may leave
/// some nodes discarded.
pub fn random_component(rng: &mut impl Rng, cfg: &ComponentCfg) -> TermGraph {
    let signature = cfg.signature();
    let mut nodes: Vec<NodeId> = (0..cfg.inputs as u32).map(NodeId).collect();
    let inputs = nodes.clone();
    let mut labels = BTreeMap::new();
    let mut children = BTreeMap::new();

    let mut bas_budget = rng.gen_range(0..=cfg.max_bas.min(cfg.label_pool.len()));
    let mut gate_budget = rng.gen_range(0..=cfg.max_gates);
    if cfg.outputs > 0 && cfg.inputs == 0 && bas_budget == 0 {
        bas_budget = 1;
    }
    let mut next_label = 0usize;
    let mut next_id = cfg.inputs as u32;

    while bas_budget + gate_budget > 0 {
        let make_bas = if nodes.is_empty() {
            if bas_budget == 0 {
                break;
            }
            true
        } else if bas_budget == 0 {
            false
        } else if gate_budget == 0 {
            true
        } else {
            rng.gen_bool(0.5)
        };
        let id = NodeId(next_id);
        next_id += 1;
        if make_bas {
            bas_budget -= 1;
            let label = if cfg.unique_labels {
                let l = cfg.label_pool[next_label].clone();
                next_label += 1;
                l
            } else {
                cfg.label_pool[rng.gen_range(0..cfg.label_pool.len())].clone()
            };
            labels.insert(id, Symbol::Label(label));
            children.insert(id, vec![]);
        } else {
            gate_budget -= 1;
            let arity = rng.gen_range(1..=3usize);
            let kids: Vec<NodeId> = (0..arity)
                .map(|_| nodes[rng.gen_range(0..nodes.len())])
                .collect();
            let symbol = if rng.gen_bool(0.5) {
                Symbol::And(arity)
            } else {
                Symbol::Or(arity)
            };
            labels.insert(id, symbol);
            children.insert(id, kids);
        }
        nodes.push(id);
    }

    if cfg.outputs > 0 && nodes.is_empty() {
        let id = NodeId(next_id);
        labels.insert(id, Symbol::Label(cfg.label_pool[0].clone()));
        children.insert(id, vec![]);
        nodes.push(id);
    }

    let outputs: Vec<NodeId> = (0..cfg.outputs)
        .map(|_| nodes[rng.gen_range(0..nodes.len())])
        .collect();

    TermGraph::new(signature, nodes, inputs, outputs, labels, children)
        .expect("generated components are valid by construction")
}

/// A closed single-output tree whose root is the last generated node.
pub fn random_attack_tree(rng: &mut impl Rng, cfg: &ComponentCfg) -> TermGraph {
    let mut cfg = cfg.clone().with_arity(0, 1);
    if cfg.max_gates == 0 {
        cfg.max_gates = 1;
    }
    loop {
        let signature = cfg.signature();
        let probe = random_component(rng, &cfg);
        // retarget the output at the deepest node to get a tree-like root
        let root = probe.nodes().last().expect("closed trees have nodes");
        let nodes: Vec<NodeId> = probe.nodes().collect();
        let labels: BTreeMap<NodeId, Symbol> = nodes
            .iter()
            .filter_map(|&n| probe.label(n).map(|s| (n, s.clone())))
            .collect();
        let children: BTreeMap<NodeId, Vec<NodeId>> = nodes
            .iter()
            .filter(|&&n| !probe.is_input(n))
            .map(|&n| (n, probe.children(n).to_vec()))
            .collect();
        let tree = TermGraph::new(signature, nodes, vec![], vec![root], labels, children)
            .expect("retargeted tree is valid");
        if !crate::oracle::bas_nodes(&tree).is_empty() {
            return tree;
        }
    }
}

/// A stochastic matrix over the named semiring: each column is forced to
/// sum to one (a zero-cost entry for the min semirings, an infinity for max
/// challenge, a unit for max probability, an exact dyadic split for the
/// reliability reals).
pub fn random_stochastic_matrix(
    rng: &mut impl Rng,
    semiring: MetricSemiring,
    in_wires: usize,
    out_wires: usize,
) -> BoolMatrix<ExtReal> {
    let rows = 1usize << out_wires;
    let cols = 1usize << in_wires;
    let mut columns: Vec<Vec<ExtReal>> = Vec::with_capacity(cols);
    for _ in 0..cols {
        columns.push(random_stochastic_column(rng, semiring, rows));
    }
    BoolMatrix::from_fn(in_wires, out_wires, |row, col| columns[col][row])
}

fn random_stochastic_column(
    rng: &mut impl Rng,
    semiring: MetricSemiring,
    rows: usize,
) -> Vec<ExtReal> {
    use MetricSemiring::*;
    match semiring {
        MinCost | MinTimePar | MinTimeSeq | MaxChallenge | MaxProb => {
            let mut column: Vec<ExtReal> = (0..rows)
                .map(|_| semiring.sample_element(rng))
                .collect();
            column[rng.gen_range(0..rows)] = semiring.one();
            column
        }
        Unreliability => {
            // distribute 64 sixty-fourths over the rows: exact dyadic sum
            let mut counts = vec![0u32; rows];
            for _ in 0..64 {
                counts[rng.gen_range(0..rows)] += 1;
            }
            counts
                .into_iter()
                .map(|c| ExtReal::finite(c as f64 / 64.0))
                .collect()
        }
    }
}

/// Weight pairs satisfying `alpha0 + alpha1 = one` for every label.
pub fn random_stochastic_weights(
    rng: &mut impl Rng,
    semiring: MetricSemiring,
    labels: &[String],
) -> BasWeights<ExtReal> {
    use crate::semiring::Semiring;
    use MetricSemiring::*;
    let mut alpha0 = BTreeMap::new();
    let mut alpha1 = BTreeMap::new();
    for label in labels {
        let (a0, a1) = match semiring {
            Unreliability => {
                let k = rng.gen_range(0..=64u32);
                (
                    ExtReal::finite((64 - k) as f64 / 64.0),
                    ExtReal::finite(k as f64 / 64.0),
                )
            }
            _ => {
                let free = semiring.sample_element(rng);
                if rng.gen_bool(0.5) {
                    (semiring.one(), free)
                } else {
                    (free, semiring.one())
                }
            }
        };
        alpha0.insert(label.clone(), a0);
        alpha1.insert(label.clone(), a1);
    }
    BasWeights::new(alpha0, alpha1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{is_stochastic, stoch_interpretation};
    use crate::oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn components_hit_requested_arities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for inputs in 0..=3 {
            for outputs in 0..=3 {
                let cfg = ComponentCfg::new(inputs, outputs);
                let graph = random_component(&mut rng, &cfg);
                assert_eq!(graph.arity().inputs, inputs);
                assert_eq!(graph.arity().outputs, outputs);
            }
        }
    }

    #[test]
    fn attack_trees_are_closed_single_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let tree = random_attack_tree(&mut rng, &ComponentCfg::new(0, 1));
            assert_eq!(tree.arity().inputs, 0);
            assert_eq!(tree.arity().outputs, 1);
            assert!(!oracle::bas_nodes(&tree).is_empty());
        }
    }

    #[test]
    fn sampled_matrices_are_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for semiring in MetricSemiring::ALL {
            for _ in 0..20 {
                let m = random_stochastic_matrix(&mut rng, semiring, 2, 1);
                assert!(is_stochastic(&m, &semiring), "{}", semiring.name());
            }
        }
    }

    #[test]
    fn sampled_weights_are_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let labels: Vec<String> = vec!["a".into(), "b".into()];
        for semiring in MetricSemiring::ALL {
            for _ in 0..20 {
                let weights = random_stochastic_weights(&mut rng, semiring, &labels);
                assert!(stoch_interpretation(semiring, weights).is_ok());
            }
        }
    }
}
