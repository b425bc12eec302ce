//! Compositional attack-tree metric engine.
//!
//! Attack trees and their components are represented as term graphs: DAGs
//! with ordered input/output wire lists that compose sequentially (gluing
//! outputs to inputs) and in parallel (side by side). Every component
//! decomposes into layers of atomic pieces, and a metric is a structure-
//! preserving assignment of a "channel" to each piece in some backend:
//! plain functions over a carrier, or Boolean-indexed matrices over a
//! semiring. A brute-force oracle provides independent ground truth for
//! all of the compositional evaluators.

pub mod channel;
pub mod decompose;
pub mod functions;
pub mod graph;
pub mod matrix;
pub mod oracle;
pub mod sampling;
pub mod semiring;
pub mod signature;

pub use channel::{check_axioms, check_functor_laws, evaluate, ChannelBackend, EvalError, Interpretation, LawReport};
pub use decompose::{decompose, decomposition_width, recompose, Layers};
pub use graph::{Arity, AtomicKind, GraphError, NodeId, TermGraph};
pub use semiring::{
    antichain_normalize, table1_semiring, Antichain, AntichainSemiring, AttackSet, ExtReal,
    MetricSemiring, MultisetOfSets, MultisetSemiring, Semiring, SemiringError,
};
pub use signature::{Signature, Symbol};
