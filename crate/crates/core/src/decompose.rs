//! Rewriting a term graph into a sequential composite of parallel composites
//! of atomic graphs, and folding such layer lists back into a graph.
//!
//! Decompositions are not unique; this module produces one particular
//! stratified form. Correctness is judged by the round trip: recomposing the
//! layers yields a graph isomorphic to the original.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{AtomicKind, GraphError, NodeId, TermGraph};
use crate::signature::Signature;

/// A layer list, bottom to top: each layer is a parallel row of atomic
/// pieces, and consecutive layers are glued sequentially.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layers {
    layers: Vec<Vec<AtomicKind>>,
}

impl Layers {
    pub fn new(layers: Vec<Vec<AtomicKind>>) -> Self {
        Layers { layers }
    }

    pub fn layers(&self) -> &[Vec<AtomicKind>] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// One-line rendering: `L1: D ⊗ F ⊗ S ; L2: id1 ⊗ copy ⊗ id1 ; …`
    pub fn to_text(&self) -> String {
        self.layers
            .iter()
            .enumerate()
            .map(|(i, layer)| {
                let row = layer
                    .iter()
                    .map(AtomicKind::to_string)
                    .collect::<Vec<_>>()
                    .join(" ⊗ ");
                format!("L{}: {}", i + 1, row)
            })
            .collect::<Vec<_>>()
            .join(" ; ")
    }
}

/// Largest number of wires entering any layer.
pub fn decomposition_width(layers: &Layers) -> usize {
    layers
        .layers
        .iter()
        .map(|layer| layer.iter().map(AtomicKind::wires_in).sum())
        .max()
        .unwrap_or(0)
}

/// Splits `graph` into layers of atomic pieces.
///
/// Non-input nodes are stratified by depth (inputs at 0, a node one past its
/// deepest child). Between symbol layers, copy trees and deletions adjust
/// wire multiplicities and bubble-sorted swap rows reorder them; wires that
/// are needed later ride along as identities.
pub fn decompose(graph: &TermGraph) -> Layers {
    let mut depth: BTreeMap<NodeId, usize> = BTreeMap::new();
    for n in graph.nodes() {
        node_depth(graph, n, &mut depth);
    }
    let max_depth = depth.values().copied().max().unwrap_or(0);

    let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); max_depth + 1];
    for n in graph.nodes() {
        if !graph.is_input(n) {
            levels[depth[&n]].push(n);
        }
    }

    // last level at which each node is consumed as a child
    let mut last_consumer: BTreeMap<NodeId, usize> = BTreeMap::new();
    for n in graph.nodes() {
        if graph.is_input(n) {
            continue;
        }
        let level = depth[&n];
        for &c in graph.children(n) {
            let entry = last_consumer.entry(c).or_insert(level);
            *entry = (*entry).max(level);
        }
    }
    let in_outputs: BTreeSet<NodeId> = graph.outputs().iter().copied().collect();

    let mut layers: Vec<Vec<AtomicKind>> = Vec::new();
    let mut wires: Vec<NodeId> = graph.inputs().to_vec();

    for (level, symbols) in levels.iter().enumerate().skip(1) {
        let needed: Vec<NodeId> = symbols
            .iter()
            .flat_map(|&s| graph.children(s))
            .copied()
            .collect();
        let mut uses_now: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &c in &needed {
            *uses_now.entry(c).or_insert(0) += 1;
        }
        let survives = |n: NodeId| -> bool {
            last_consumer.get(&n).is_some_and(|&l| l > level) || in_outputs.contains(&n)
        };
        let needs: Vec<usize> = wires
            .iter()
            .map(|&w| uses_now.get(&w).copied().unwrap_or(0) + survives(w) as usize)
            .collect();
        fan_out(&mut layers, &mut wires, needs);

        let mut passthrough: Vec<NodeId> = Vec::new();
        let mut seen = BTreeSet::new();
        for &w in &wires {
            if survives(w) && seen.insert(w) {
                passthrough.push(w);
            }
        }
        let mut target = needed;
        target.extend_from_slice(&passthrough);
        permute(&mut layers, &mut wires, &target);

        let mut row = Vec::new();
        let mut produced = Vec::new();
        for &s in symbols {
            row.push(AtomicKind::Symbol(
                graph.label(s).expect("non-input node is labelled").clone(),
            ));
            produced.push(s);
        }
        for &p in &passthrough {
            row.push(AtomicKind::Id1);
            produced.push(p);
        }
        layers.push(row);
        wires = produced;
    }

    // route whatever is on the boundary into the output list
    let mut multiplicity: BTreeMap<NodeId, usize> = BTreeMap::new();
    for &o in graph.outputs() {
        *multiplicity.entry(o).or_insert(0) += 1;
    }
    let needs: Vec<usize> = wires
        .iter()
        .map(|&w| multiplicity.get(&w).copied().unwrap_or(0))
        .collect();
    fan_out(&mut layers, &mut wires, needs);
    permute(&mut layers, &mut wires, graph.outputs());

    if layers.is_empty() {
        layers.push(if wires.is_empty() {
            vec![AtomicKind::Id0]
        } else {
            vec![AtomicKind::Id1; wires.len()]
        });
    }
    Layers { layers }
}

fn node_depth(graph: &TermGraph, node: NodeId, memo: &mut BTreeMap<NodeId, usize>) -> usize {
    if let Some(&d) = memo.get(&node) {
        return d;
    }
    let d = if graph.is_input(node) {
        0
    } else {
        1 + graph
            .children(node)
            .iter()
            .map(|&c| node_depth(graph, c, memo))
            .max()
            .unwrap_or(0)
    };
    memo.insert(node, d);
    d
}

/// Emits copy/del rows until each wire token carries need exactly one.
/// Rows that would be all identities are skipped.
fn fan_out(layers: &mut Vec<Vec<AtomicKind>>, wires: &mut Vec<NodeId>, mut needs: Vec<usize>) {
    loop {
        let mut row = Vec::new();
        let mut next_wires = Vec::new();
        let mut next_needs = Vec::new();
        let mut changed = false;
        for (&w, &need) in wires.iter().zip(needs.iter()) {
            match need {
                0 => {
                    row.push(AtomicKind::Del);
                    changed = true;
                }
                1 => {
                    row.push(AtomicKind::Id1);
                    next_wires.push(w);
                    next_needs.push(1);
                }
                m => {
                    row.push(AtomicKind::Copy);
                    changed = true;
                    next_wires.push(w);
                    next_needs.push(m.div_ceil(2));
                    next_wires.push(w);
                    next_needs.push(m / 2);
                }
            }
        }
        if !changed {
            return;
        }
        layers.push(row);
        *wires = next_wires;
        needs = next_needs;
    }
}

/// Reorders `wires` into `target` (equal as multisets) with rows of
/// adjacent swaps, one bubble pass per row.
fn permute(layers: &mut Vec<Vec<AtomicKind>>, wires: &mut Vec<NodeId>, target: &[NodeId]) {
    debug_assert_eq!(wires.len(), target.len());
    let mut slots: BTreeMap<NodeId, VecDeque<usize>> = BTreeMap::new();
    for (i, &t) in target.iter().enumerate() {
        slots.entry(t).or_default().push_back(i);
    }
    let mut pos: Vec<usize> = wires
        .iter()
        .map(|w| {
            slots
                .get_mut(w)
                .and_then(VecDeque::pop_front)
                .expect("wire multiset matches target")
        })
        .collect();

    loop {
        let mut row = Vec::new();
        let mut swapped = false;
        let mut i = 0;
        while i < pos.len() {
            if i + 1 < pos.len() && pos[i] > pos[i + 1] {
                pos.swap(i, i + 1);
                wires.swap(i, i + 1);
                row.push(AtomicKind::Swap);
                swapped = true;
                i += 2;
            } else {
                row.push(AtomicKind::Id1);
                i += 1;
            }
        }
        if !swapped {
            return;
        }
        layers.push(row);
    }
}

/// Folds each layer with parallel composition and the layers with
/// sequential composition. An empty layer list yields the empty graph.
pub fn recompose(layers: &Layers, signature: &Signature) -> Result<TermGraph, GraphError> {
    let mut acc: Option<TermGraph> = None;
    for layer in &layers.layers {
        let mut row = TermGraph::atomic(&AtomicKind::Id0, signature)?;
        for entry in layer {
            row = row.par_compose(&TermGraph::atomic(entry, signature)?)?;
        }
        acc = Some(match acc {
            None => row,
            Some(done) => done.seq_compose(&row)?,
        });
    }
    match acc {
        Some(graph) => Ok(graph),
        None => TermGraph::atomic(&AtomicKind::Id0, signature),
    }
}
