//! Term graphs: finite DAGs with ordered input/output lists, labelled
//! non-input nodes and ordered child lists. Attack trees are term graphs
//! with no inputs and one output; general term graphs are the composable
//! components they are built from.
//!
//! Values are immutable once constructed; every operation returns a fresh,
//! fully validated graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::signature::{Signature, Symbol};

/// Identifier of a node inside one term graph. Stable for a given value;
/// compositions renumber deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Wire counts of a term graph or channel: `inputs -> outputs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arity {
    pub inputs: usize,
    pub outputs: usize,
}

impl Arity {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        Arity { inputs, outputs }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.inputs, self.outputs)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("input list repeats node {0}")]
    DuplicateInput(NodeId),
    #[error("arity mismatch{}: expected {expected}, found {found}", at_node(.node))]
    ArityMismatch {
        node: Option<NodeId>,
        expected: usize,
        found: usize,
    },
    #[error("cycle through node {0}")]
    CycleDetected(NodeId),
    #[error("reference to node {0} which is not in the node set")]
    DanglingReference(NodeId),
    #[error("input node {0} carries a label or children")]
    LabelOnInput(NodeId),
    #[error("non-input node {0} has no label")]
    UnlabelledNode(NodeId),
    #[error("symbol {0} is not in the signature")]
    UnknownSymbol(String),
    #[error("operands are over different signatures")]
    SignatureMismatch,
}

fn at_node(node: &Option<NodeId>) -> String {
    match node {
        Some(n) => format!(" at node {n}"),
        None => String::new(),
    }
}

/// The atomic term graphs: identities, the three wiring graphs, and one
/// graph per function symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomicKind {
    Id0,
    Id1,
    Copy,
    Del,
    Swap,
    Symbol(Symbol),
}

impl AtomicKind {
    pub fn wires_in(&self) -> usize {
        match self {
            AtomicKind::Id0 => 0,
            AtomicKind::Id1 | AtomicKind::Copy | AtomicKind::Del => 1,
            AtomicKind::Swap => 2,
            AtomicKind::Symbol(sym) => sym.arity(),
        }
    }

    pub fn wires_out(&self) -> usize {
        match self {
            AtomicKind::Id0 | AtomicKind::Del => 0,
            AtomicKind::Id1 | AtomicKind::Symbol(_) => 1,
            AtomicKind::Copy | AtomicKind::Swap => 2,
        }
    }
}

impl fmt::Display for AtomicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicKind::Id0 => write!(f, "id0"),
            AtomicKind::Id1 => write!(f, "id1"),
            AtomicKind::Copy => write!(f, "copy"),
            AtomicKind::Del => write!(f, "del"),
            AtomicKind::Swap => write!(f, "swap"),
            AtomicKind::Symbol(sym) => write!(f, "{sym}"),
        }
    }
}

/// A term graph over an attack-tree signature.
///
/// Input nodes are unlabelled and pairwise distinct; the output list may
/// repeat nodes. Nodes that are neither inputs nor reachable from an output
/// ("discarded" nodes) are legitimate and preserved by all operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermGraph {
    signature: Signature,
    nodes: BTreeSet<NodeId>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    labels: BTreeMap<NodeId, Symbol>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
}

impl TermGraph {
    /// Builds and validates a term graph from raw parts.
    ///
    /// `labels` must cover exactly the non-input nodes; `children` entries
    /// for unlisted nodes default to the empty list.
    pub fn new(
        signature: Signature,
        nodes: impl IntoIterator<Item = NodeId>,
        inputs: Vec<NodeId>,
        outputs: Vec<NodeId>,
        labels: BTreeMap<NodeId, Symbol>,
        children: BTreeMap<NodeId, Vec<NodeId>>,
    ) -> Result<TermGraph, GraphError> {
        let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();

        let mut seen = BTreeSet::new();
        for &n in &inputs {
            if !nodes.contains(&n) {
                return Err(GraphError::DanglingReference(n));
            }
            if !seen.insert(n) {
                return Err(GraphError::DuplicateInput(n));
            }
        }
        for &n in &outputs {
            if !nodes.contains(&n) {
                return Err(GraphError::DanglingReference(n));
            }
        }

        let input_set: BTreeSet<NodeId> = inputs.iter().copied().collect();
        for &n in labels.keys().chain(children.keys()) {
            if !nodes.contains(&n) {
                return Err(GraphError::DanglingReference(n));
            }
            if input_set.contains(&n) {
                return Err(GraphError::LabelOnInput(n));
            }
        }

        let mut full_children = BTreeMap::new();
        for &n in &nodes {
            if input_set.contains(&n) {
                continue;
            }
            let symbol = labels.get(&n).ok_or(GraphError::UnlabelledNode(n))?;
            if !signature.contains(symbol) {
                return Err(GraphError::UnknownSymbol(symbol.to_string()));
            }
            let kids = children.get(&n).cloned().unwrap_or_default();
            if symbol.arity() != kids.len() {
                return Err(GraphError::ArityMismatch {
                    node: Some(n),
                    expected: symbol.arity(),
                    found: kids.len(),
                });
            }
            for &c in &kids {
                if !nodes.contains(&c) {
                    return Err(GraphError::DanglingReference(c));
                }
            }
            full_children.insert(n, kids);
        }

        let graph = TermGraph {
            signature,
            nodes,
            inputs,
            outputs,
            labels,
            children: full_children,
        };
        graph.check_acyclic()?;
        Ok(graph)
    }

    fn check_acyclic(&self) -> Result<(), GraphError> {
        // Iterative DFS with tri-state marks; reports a node on the cycle.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut marks: BTreeMap<NodeId, Mark> =
            self.nodes.iter().map(|&n| (n, Mark::New)).collect();
        for &start in &self.nodes {
            if marks[&start] != Mark::New {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            marks.insert(start, Mark::Open);
            while let Some(&(n, idx)) = stack.last() {
                let kids = self.children.get(&n).map(Vec::as_slice).unwrap_or(&[]);
                if idx < kids.len() {
                    stack.last_mut().unwrap().1 += 1;
                    let child = kids[idx];
                    match marks[&child] {
                        Mark::Open => return Err(GraphError::CycleDetected(child)),
                        Mark::New => {
                            marks.insert(child, Mark::Open);
                            stack.push((child, 0));
                        }
                        Mark::Done => {}
                    }
                } else {
                    marks.insert(n, Mark::Done);
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn arity(&self) -> Arity {
        Arity::new(self.inputs.len(), self.outputs.len())
    }

    pub fn is_input(&self, node: NodeId) -> bool {
        self.inputs.contains(&node)
    }

    /// Symbol of a non-input node.
    pub fn label(&self, node: NodeId) -> Option<&Symbol> {
        self.labels.get(&node)
    }

    /// Ordered children of a non-input node.
    pub fn children(&self, node: NodeId) -> &[NodeId] {
        self.children.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The canonical atomic graphs. Node ids start at 0.
    pub fn atomic(kind: &AtomicKind, signature: &Signature) -> Result<TermGraph, GraphError> {
        let n = |i: u32| NodeId(i);
        match kind {
            AtomicKind::Id0 => TermGraph::new(
                signature.clone(),
                [],
                vec![],
                vec![],
                BTreeMap::new(),
                BTreeMap::new(),
            ),
            AtomicKind::Id1 => TermGraph::new(
                signature.clone(),
                [n(0)],
                vec![n(0)],
                vec![n(0)],
                BTreeMap::new(),
                BTreeMap::new(),
            ),
            AtomicKind::Copy => TermGraph::new(
                signature.clone(),
                [n(0)],
                vec![n(0)],
                vec![n(0), n(0)],
                BTreeMap::new(),
                BTreeMap::new(),
            ),
            AtomicKind::Del => TermGraph::new(
                signature.clone(),
                [n(0)],
                vec![n(0)],
                vec![],
                BTreeMap::new(),
                BTreeMap::new(),
            ),
            AtomicKind::Swap => TermGraph::new(
                signature.clone(),
                [n(0), n(1)],
                vec![n(0), n(1)],
                vec![n(1), n(0)],
                BTreeMap::new(),
                BTreeMap::new(),
            ),
            AtomicKind::Symbol(sym) => {
                if !signature.contains(sym) {
                    return Err(GraphError::UnknownSymbol(sym.to_string()));
                }
                let k = sym.arity() as u32;
                let inputs: Vec<NodeId> = (0..k).map(n).collect();
                let top = n(k);
                let mut labels = BTreeMap::new();
                labels.insert(top, sym.clone());
                let mut children = BTreeMap::new();
                children.insert(top, inputs.clone());
                TermGraph::new(
                    signature.clone(),
                    (0..=k).map(n),
                    inputs,
                    vec![top],
                    labels,
                    children,
                )
            }
        }
    }

    /// `n` parallel wires.
    pub fn identity(n: usize, signature: &Signature) -> TermGraph {
        let ids: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
        TermGraph::new(
            signature.clone(),
            ids.clone(),
            ids.clone(),
            ids,
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .expect("identity graph is always valid")
    }

    /// Moves the first `i` wires after the last `j`: inputs `[A, B]` come
    /// out as `[B, A]`.
    pub fn swap_block(i: usize, j: usize, signature: &Signature) -> TermGraph {
        let ids: Vec<NodeId> = (0..(i + j) as u32).map(NodeId).collect();
        let mut outputs: Vec<NodeId> = ids[i..].to_vec();
        outputs.extend_from_slice(&ids[..i]);
        TermGraph::new(
            signature.clone(),
            ids.clone(),
            ids,
            outputs,
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .expect("swap graph is always valid")
    }

    /// Sequential composition: `self` applied first, then `other`; the l-th
    /// output of `self` is glued to the l-th input of `other`. A repeated
    /// output merges the corresponding inputs of `other`.
    pub fn seq_compose(&self, other: &TermGraph) -> Result<TermGraph, GraphError> {
        if self.signature != other.signature {
            return Err(GraphError::SignatureMismatch);
        }
        if self.outputs.len() != other.inputs.len() {
            return Err(GraphError::ArityMismatch {
                node: None,
                expected: self.outputs.len(),
                found: other.inputs.len(),
            });
        }

        // Work in a combined id space: self's nodes first, then other's.
        let first_index: BTreeMap<NodeId, usize> =
            self.nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let offset = self.nodes.len();
        let second_index: BTreeMap<NodeId, usize> = other
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, i + offset))
            .collect();

        // Union-find over combined indices; the representative is the
        // smallest member, so glued classes are represented by self's node.
        let total = offset + other.nodes.len();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (out, inp) in self.outputs.iter().zip(other.inputs.iter()) {
            let a = find(&mut parent, first_index[out]);
            let b = find(&mut parent, second_index[inp]);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }

        // Renumber representatives to a contiguous range.
        let mut rep_ids = BTreeSet::new();
        for x in 0..total {
            rep_ids.insert(find(&mut parent, x));
        }
        let rep_to_new: BTreeMap<usize, NodeId> = rep_ids
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, NodeId(i as u32)))
            .collect();
        let map_first =
            |n: NodeId, parent: &mut Vec<usize>| rep_to_new[&find(parent, first_index[&n])];
        let map_second =
            |n: NodeId, parent: &mut Vec<usize>| rep_to_new[&find(parent, second_index[&n])];

        let nodes: Vec<NodeId> = rep_to_new.values().copied().collect();
        let inputs: Vec<NodeId> = self
            .inputs
            .iter()
            .map(|&n| map_first(n, &mut parent))
            .collect();
        let outputs: Vec<NodeId> = other
            .outputs
            .iter()
            .map(|&n| map_second(n, &mut parent))
            .collect();

        let mut labels = BTreeMap::new();
        let mut children = BTreeMap::new();
        for (&n, sym) in &self.labels {
            labels.insert(map_first(n, &mut parent), sym.clone());
        }
        for (&n, kids) in &self.children {
            children.insert(
                map_first(n, &mut parent),
                kids.iter().map(|&c| map_first(c, &mut parent)).collect(),
            );
        }
        for (&n, sym) in &other.labels {
            labels.insert(map_second(n, &mut parent), sym.clone());
        }
        for (&n, kids) in &other.children {
            children.insert(
                map_second(n, &mut parent),
                kids.iter().map(|&c| map_second(c, &mut parent)).collect(),
            );
        }

        TermGraph::new(
            self.signature.clone(),
            nodes,
            inputs,
            outputs,
            labels,
            children,
        )
    }

    /// Parallel composition: `self`'s wires occupy the first positions of
    /// the combined input and output lists, `other`'s follow.
    pub fn par_compose(&self, other: &TermGraph) -> Result<TermGraph, GraphError> {
        if self.signature != other.signature {
            return Err(GraphError::SignatureMismatch);
        }
        let first_index: BTreeMap<NodeId, NodeId> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, NodeId(i as u32)))
            .collect();
        let offset = self.nodes.len() as u32;
        let second_index: BTreeMap<NodeId, NodeId> = other
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, NodeId(i as u32 + offset)))
            .collect();

        let nodes = first_index.values().chain(second_index.values()).copied();
        let inputs: Vec<NodeId> = self
            .inputs
            .iter()
            .map(|n| first_index[n])
            .chain(other.inputs.iter().map(|n| second_index[n]))
            .collect();
        let outputs: Vec<NodeId> = self
            .outputs
            .iter()
            .map(|n| first_index[n])
            .chain(other.outputs.iter().map(|n| second_index[n]))
            .collect();

        let mut labels = BTreeMap::new();
        let mut children = BTreeMap::new();
        for (&n, sym) in &self.labels {
            labels.insert(first_index[&n], sym.clone());
        }
        for (&n, kids) in &self.children {
            children.insert(first_index[&n], kids.iter().map(|c| first_index[c]).collect());
        }
        for (&n, sym) in &other.labels {
            labels.insert(second_index[&n], sym.clone());
        }
        for (&n, kids) in &other.children {
            children.insert(second_index[&n], kids.iter().map(|c| second_index[c]).collect());
        }

        TermGraph::new(
            self.signature.clone(),
            nodes,
            inputs,
            outputs,
            labels,
            children,
        )
    }

    /// Structural equality up to a renaming of node ids that preserves the
    /// input list, the output list (with order), labels and ordered child
    /// lists.
    pub fn iso_equal(&self, other: &TermGraph) -> bool {
        if self.signature != other.signature
            || self.nodes.len() != other.nodes.len()
            || self.inputs.len() != other.inputs.len()
            || self.outputs.len() != other.outputs.len()
        {
            return false;
        }

        let mut fwd: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut bwd: BTreeMap<NodeId, NodeId> = BTreeMap::new();

        // Input and output positions anchor the bijection; labels and child
        // lists then force it on everything reachable from the anchors.
        let anchors: Vec<(NodeId, NodeId)> = self
            .inputs
            .iter()
            .zip(other.inputs.iter())
            .chain(self.outputs.iter().zip(other.outputs.iter()))
            .map(|(&a, &b)| (a, b))
            .collect();
        for (a, b) in anchors {
            if !self.force_pair(other, a, b, &mut fwd, &mut bwd) {
                return false;
            }
        }

        // Whatever is left is disconnected from the interface; search for a
        // bijection among the remaining nodes.
        let rest: Vec<NodeId> = self
            .nodes
            .iter()
            .copied()
            .filter(|n| !fwd.contains_key(n))
            .collect();
        self.match_rest(other, &rest, 0, &mut fwd, &mut bwd)
    }

    /// Records `a -> b` and propagates the consequences. Returns false on
    /// any conflict; the maps may then hold partial garbage, callers must
    /// treat the whole attempt as failed or work on clones.
    fn force_pair(
        &self,
        other: &TermGraph,
        a: NodeId,
        b: NodeId,
        fwd: &mut BTreeMap<NodeId, NodeId>,
        bwd: &mut BTreeMap<NodeId, NodeId>,
    ) -> bool {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            match (fwd.get(&a), bwd.get(&b)) {
                (Some(&b2), _) if b2 != b => return false,
                (_, Some(&a2)) if a2 != a => return false,
                (Some(_), Some(_)) => continue,
                _ => {}
            }
            if self.is_input(a) != other.is_input(b) {
                return false;
            }
            fwd.insert(a, b);
            bwd.insert(b, a);
            if !self.is_input(a) {
                if self.labels.get(&a) != other.labels.get(&b) {
                    return false;
                }
                let ka = self.children(a);
                let kb = other.children(b);
                if ka.len() != kb.len() {
                    return false;
                }
                queue.extend(ka.iter().copied().zip(kb.iter().copied()));
            }
        }
        true
    }

    fn match_rest(
        &self,
        other: &TermGraph,
        rest: &[NodeId],
        from: usize,
        fwd: &mut BTreeMap<NodeId, NodeId>,
        bwd: &mut BTreeMap<NodeId, NodeId>,
    ) -> bool {
        let next = rest[from..].iter().find(|n| !fwd.contains_key(n));
        let a = match next {
            None => return fwd.len() == self.nodes.len(),
            Some(&a) => a,
        };
        let candidates: Vec<NodeId> = other
            .nodes
            .iter()
            .copied()
            .filter(|b| !bwd.contains_key(b) && other.labels.get(b) == self.labels.get(&a))
            .collect();
        for b in candidates {
            let mut fwd2 = fwd.clone();
            let mut bwd2 = bwd.clone();
            if self.force_pair(other, a, b, &mut fwd2, &mut bwd2)
                && self.match_rest(other, rest, from, &mut fwd2, &mut bwd2)
            {
                *fwd = fwd2;
                *bwd = bwd2;
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::attack_tree(["D", "F", "S"])
    }

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    /// The worked 1 -> 3 component: input 1, a discarded-free F node, an
    /// AND over both, outputs [3, 2, 3].
    fn and_component() -> TermGraph {
        let mut labels = BTreeMap::new();
        labels.insert(n(2), Symbol::label("F"));
        labels.insert(n(3), Symbol::And(2));
        let mut children = BTreeMap::new();
        children.insert(n(2), vec![]);
        children.insert(n(3), vec![n(1), n(2)]);
        TermGraph::new(
            sig(),
            [n(1), n(2), n(3)],
            vec![n(1)],
            vec![n(3), n(2), n(3)],
            labels,
            children,
        )
        .unwrap()
    }

    #[test]
    fn builds_component_with_repeated_outputs() {
        let g = and_component();
        assert_eq!(g.arity(), Arity::new(1, 3));
        assert_eq!(g.outputs(), &[n(3), n(2), n(3)]);
        assert_eq!(g.label(n(3)), Some(&Symbol::And(2)));
    }

    #[test]
    fn rejects_duplicate_inputs() {
        let err = TermGraph::new(
            sig(),
            [n(1)],
            vec![n(1), n(1)],
            vec![],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateInput(n(1)));
    }

    #[test]
    fn rejects_self_loop() {
        let mut labels = BTreeMap::new();
        labels.insert(n(3), Symbol::Or(1));
        let mut children = BTreeMap::new();
        children.insert(n(3), vec![n(3)]);
        let err = TermGraph::new(sig(), [n(3)], vec![], vec![n(3)], labels, children).unwrap_err();
        assert_eq!(err, GraphError::CycleDetected(n(3)));
    }

    #[test]
    fn rejects_longer_cycle() {
        let mut labels = BTreeMap::new();
        labels.insert(n(0), Symbol::Or(1));
        labels.insert(n(1), Symbol::Or(1));
        let mut children = BTreeMap::new();
        children.insert(n(0), vec![n(1)]);
        children.insert(n(1), vec![n(0)]);
        let err =
            TermGraph::new(sig(), [n(0), n(1)], vec![], vec![n(0)], labels, children).unwrap_err();
        assert!(matches!(err, GraphError::CycleDetected(_)));
    }

    #[test]
    fn rejects_arity_mismatch() {
        let mut labels = BTreeMap::new();
        labels.insert(n(0), Symbol::And(2));
        let mut children = BTreeMap::new();
        children.insert(n(0), vec![]);
        let err = TermGraph::new(sig(), [n(0)], vec![], vec![n(0)], labels, children).unwrap_err();
        assert_eq!(
            err,
            GraphError::ArityMismatch {
                node: Some(n(0)),
                expected: 2,
                found: 0
            }
        );
    }

    #[test]
    fn rejects_dangling_and_label_on_input() {
        let mut labels = BTreeMap::new();
        labels.insert(n(0), Symbol::label("D"));
        let err = TermGraph::new(
            sig(),
            [n(0)],
            vec![n(0)],
            vec![n(0)],
            labels,
            BTreeMap::new(),
        )
        .unwrap_err();
        assert_eq!(err, GraphError::LabelOnInput(n(0)));

        let err = TermGraph::new(
            sig(),
            [n(0)],
            vec![],
            vec![n(5)],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DanglingReference(n(5)));
    }

    #[test]
    fn atomic_shapes() {
        let s = sig();
        let id0 = TermGraph::atomic(&AtomicKind::Id0, &s).unwrap();
        assert_eq!(id0.arity(), Arity::new(0, 0));
        assert_eq!(id0.node_count(), 0);

        let copy = TermGraph::atomic(&AtomicKind::Copy, &s).unwrap();
        assert_eq!(copy.arity(), Arity::new(1, 2));
        assert_eq!(copy.outputs()[0], copy.outputs()[1]);

        let and2 = TermGraph::atomic(&AtomicKind::Symbol(Symbol::And(2)), &s).unwrap();
        assert_eq!(and2.arity(), Arity::new(2, 1));
        assert_eq!(and2.node_count(), 3);

        let err = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("X")), &s).unwrap_err();
        assert_eq!(err, GraphError::UnknownSymbol("X".into()));
    }

    #[test]
    fn identity_and_swap_block() {
        let s = sig();
        assert!(TermGraph::identity(0, &s)
            .iso_equal(&TermGraph::atomic(&AtomicKind::Id0, &s).unwrap()));
        assert!(TermGraph::swap_block(1, 1, &s)
            .iso_equal(&TermGraph::atomic(&AtomicKind::Swap, &s).unwrap()));

        // routing three distinct basic steps through swap_block(2, 1)
        // permutes the output labels [D, F, S] -> [S, D, F]
        let base = TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("D")), &s)
            .unwrap()
            .par_compose(&TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("F")), &s).unwrap())
            .unwrap()
            .par_compose(&TermGraph::atomic(&AtomicKind::Symbol(Symbol::label("S")), &s).unwrap())
            .unwrap();
        let routed = base.seq_compose(&TermGraph::swap_block(2, 1, &s)).unwrap();
        let out_labels: Vec<String> = routed
            .outputs()
            .iter()
            .map(|&o| routed.label(o).unwrap().to_string())
            .collect();
        assert_eq!(out_labels, ["S", "D", "F"]);
    }

    #[test]
    fn seq_identity_is_unit() {
        let g = and_component();
        let id3 = TermGraph::identity(3, &sig());
        let id1 = TermGraph::identity(1, &sig());
        assert!(g.seq_compose(&id3).unwrap().iso_equal(&g));
        assert!(id1.seq_compose(&g).unwrap().iso_equal(&g));
    }

    #[test]
    fn seq_arity_mismatch() {
        let g = and_component();
        let id1 = TermGraph::identity(1, &sig());
        let err = g.seq_compose(&id1).unwrap_err();
        assert_eq!(
            err,
            GraphError::ArityMismatch {
                node: None,
                expected: 3,
                found: 1
            }
        );
    }

    #[test]
    fn copy_into_swap_is_copy() {
        let s = sig();
        let copy = TermGraph::atomic(&AtomicKind::Copy, &s).unwrap();
        let swap = TermGraph::atomic(&AtomicKind::Swap, &s).unwrap();
        let glued = copy.seq_compose(&swap).unwrap();
        assert_eq!(glued.arity(), Arity::new(1, 2));
        assert_eq!(glued.node_count(), 1);
        assert!(glued.iso_equal(&copy));
    }

    #[test]
    fn par_of_identities() {
        let s = sig();
        let id1 = TermGraph::identity(1, &s);
        assert!(id1
            .par_compose(&id1)
            .unwrap()
            .iso_equal(&TermGraph::identity(2, &s)));
    }

    #[test]
    fn par_copy_del_wiring() {
        let s = sig();
        let copy = TermGraph::atomic(&AtomicKind::Copy, &s).unwrap();
        let del = TermGraph::atomic(&AtomicKind::Del, &s).unwrap();
        let g = copy.par_compose(&del).unwrap();
        assert_eq!(g.arity(), Arity::new(2, 2));
        assert_eq!(g.node_count(), 2);
        // both outputs are the first input; the second input is discarded
        assert_eq!(g.outputs()[0], g.inputs()[0]);
        assert_eq!(g.outputs()[1], g.inputs()[0]);
    }

    #[test]
    fn iso_ignores_renaming() {
        let g = and_component();
        let mut labels = BTreeMap::new();
        labels.insert(n(102), Symbol::label("F"));
        labels.insert(n(103), Symbol::And(2));
        let mut children = BTreeMap::new();
        children.insert(n(103), vec![n(101), n(102)]);
        let shifted = TermGraph::new(
            sig(),
            [n(101), n(102), n(103)],
            vec![n(101)],
            vec![n(103), n(102), n(103)],
            labels,
            children,
        )
        .unwrap();
        assert!(g.iso_equal(&shifted));
    }

    #[test]
    fn iso_respects_output_order() {
        let s = sig();
        let copyish = TermGraph::atomic(&AtomicKind::Copy, &s).unwrap();
        let two_headed = TermGraph::new(
            s,
            [n(0), n(1)],
            vec![n(0), n(1)],
            vec![n(0), n(1)],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        assert!(!copyish.iso_equal(&two_headed));
    }

    #[test]
    fn iso_matches_discarded_nodes() {
        let s = sig();
        // one discarded D node next to a live F output, two different ids
        let build = |garbage: u32, live: u32| {
            let mut labels = BTreeMap::new();
            labels.insert(n(garbage), Symbol::label("D"));
            labels.insert(n(live), Symbol::label("F"));
            TermGraph::new(
                s.clone(),
                [n(garbage), n(live)],
                vec![],
                vec![n(live)],
                labels,
                BTreeMap::new(),
            )
            .unwrap()
        };
        assert!(build(0, 1).iso_equal(&build(7, 3)));

        // a discarded D is not a discarded S
        let mut labels = BTreeMap::new();
        labels.insert(n(0), Symbol::label("S"));
        labels.insert(n(1), Symbol::label("F"));
        let other = TermGraph::new(
            s.clone(),
            [n(0), n(1)],
            vec![],
            vec![n(1)],
            labels,
            BTreeMap::new(),
        )
        .unwrap();
        assert!(!build(0, 1).iso_equal(&other));
    }
}
