//! The channel abstraction: backends provide sequential and parallel
//! composition plus the identity/swap/copy/delete wiring channels, an
//! interpretation assigns a single-output channel to every symbol, and the
//! evaluator folds a graph's decomposition through the backend. Law checkers
//! verify the backend axioms and the structure preservation of evaluation
//! on sampled inputs.

use std::fmt;

use thiserror::Error;

use crate::decompose::{decompose, Layers};
use crate::graph::{Arity, AtomicKind, GraphError, TermGraph};
use crate::signature::Symbol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("width cap exceeded: {wires} wires with cap {cap}")]
    WidthCapExceeded { wires: usize, cap: usize },
    #[error("no channel assigned to symbol {0}")]
    MissingSymbol(String),
    #[error("no attribution value for label {0}")]
    MissingLabel(String),
    #[error("channel shapes do not fit: {0}")]
    ShapeMismatch(String),
    #[error("component has arity {0}, expected an attack tree (0 -> 1)")]
    NotAnAttackTree(Arity),
    #[error("weights for label {0} do not sum to one")]
    WeightNotStochastic(String),
    #[error("probability for label {label} is {value}, outside [0, 1]")]
    ProbabilityOutOfRange { label: String, value: f64 },
    #[error("basic step label {0} appears on more than one node")]
    DuplicateBasLabel(String),
    #[error("enumeration cap exceeded: {bas} basic steps with cap {cap}")]
    EnumerationCapExceeded { bas: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Composition structure on a family of channels indexed by wire counts.
///
/// `compose(f, g)` applies `f` first; `tensor(f, g)` puts `f`'s wires before
/// `g`'s. `swap_ch(i, j)` moves the first `i` wires after the last `j`.
/// Equality of channels is backend-defined.
pub trait ChannelBackend {
    type Channel: Clone;

    fn compose(
        &self,
        first: &Self::Channel,
        then: &Self::Channel,
    ) -> Result<Self::Channel, EvalError>;
    fn tensor(
        &self,
        left: &Self::Channel,
        right: &Self::Channel,
    ) -> Result<Self::Channel, EvalError>;
    fn ident(&self, wires: usize) -> Result<Self::Channel, EvalError>;
    fn swap_ch(&self, first: usize, second: usize) -> Result<Self::Channel, EvalError>;
    fn copy_ch(&self) -> Result<Self::Channel, EvalError>;
    fn del_ch(&self) -> Result<Self::Channel, EvalError>;
    fn channel_arity(&self, channel: &Self::Channel) -> Arity;
    fn channels_eq(&self, a: &Self::Channel, b: &Self::Channel) -> bool;
}

/// Assignment of a channel with one output to each signature symbol,
/// together with the backend the channels live in.
pub trait Interpretation {
    type Backend: ChannelBackend;

    fn backend(&self) -> &Self::Backend;
    fn assign(
        &self,
        symbol: &Symbol,
    ) -> Result<<Self::Backend as ChannelBackend>::Channel, EvalError>;
}

/// Evaluates a term graph under an interpretation by decomposing it into
/// layers and folding the layers through the backend. Any decomposition of
/// the same graph yields the same channel.
pub fn evaluate<I: Interpretation>(
    graph: &TermGraph,
    interp: &I,
) -> Result<<I::Backend as ChannelBackend>::Channel, EvalError> {
    eval_layers(&decompose(graph), interp)
}

/// Folds an explicit layer list: per layer, tensor the atomic images left to
/// right; then compose the layers bottom to top.
pub fn eval_layers<I: Interpretation>(
    layers: &Layers,
    interp: &I,
) -> Result<<I::Backend as ChannelBackend>::Channel, EvalError> {
    let backend = interp.backend();
    let mut acc: Option<<I::Backend as ChannelBackend>::Channel> = None;
    for layer in layers.layers() {
        let mut row: Option<<I::Backend as ChannelBackend>::Channel> = None;
        for entry in layer {
            let image = match entry {
                AtomicKind::Id0 => backend.ident(0)?,
                AtomicKind::Id1 => backend.ident(1)?,
                AtomicKind::Copy => backend.copy_ch()?,
                AtomicKind::Del => backend.del_ch()?,
                AtomicKind::Swap => backend.swap_ch(1, 1)?,
                AtomicKind::Symbol(symbol) => {
                    let image = interp.assign(symbol)?;
                    let arity = backend.channel_arity(&image);
                    if arity != Arity::new(symbol.arity(), 1) {
                        return Err(EvalError::ShapeMismatch(format!(
                            "interpretation of {symbol} has arity {arity}, expected {} -> 1",
                            symbol.arity()
                        )));
                    }
                    image
                }
            };
            row = Some(match row {
                None => image,
                Some(done) => backend.tensor(&done, &image)?,
            });
        }
        let row = match row {
            Some(row) => row,
            None => backend.ident(0)?,
        };
        acc = Some(match acc {
            None => row,
            Some(done) => backend.compose(&done, &row)?,
        });
    }
    match acc {
        Some(channel) => Ok(channel),
        None => backend.ident(0),
    }
}

/// Outcome of a sampled law check: per law, how many instances ran and a
/// description of each counterexample found.
#[derive(Debug, Clone, Default)]
pub struct LawReport {
    pub entries: Vec<LawCheck>,
}

#[derive(Debug, Clone)]
pub struct LawCheck {
    pub law: String,
    pub samples: usize,
    pub failures: Vec<String>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.failures.is_empty())
    }

    pub fn failed_laws(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| !e.failures.is_empty())
            .map(|e| e.law.as_str())
            .collect()
    }

    fn check(&mut self, law: &str, samples: usize, failures: Vec<String>) {
        self.entries.push(LawCheck {
            law: law.to_string(),
            samples,
            failures,
        });
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for entry in &self.entries {
            if entry.failures.is_empty() {
                writeln!(f, "{}: ok ({} samples)", entry.law, entry.samples)?;
            } else {
                writeln!(
                    f,
                    "{}: {} counterexamples in {} samples",
                    entry.law,
                    entry.failures.len(),
                    entry.samples
                )?;
                for failure in &entry.failures {
                    writeln!(f, "  {failure}")?;
                }
            }
        }
        Ok(())
    }
}

fn err_to_failure(label: &str, err: EvalError) -> String {
    format!("{label}: {err}")
}

/// Checks the four channel-category axiom groups on sampled channels. The
/// sampler produces a channel of the requested arity; wire counts cycle
/// through small sizes so every shape combination is exercised.
pub fn check_axioms<B: ChannelBackend>(
    backend: &B,
    sampler: &mut dyn FnMut(usize, usize) -> B::Channel,
    n_samples: usize,
) -> LawReport {
    let mut report = LawReport::default();
    let sizes = [0usize, 1, 2];
    let pick = |round: usize, slot: usize| sizes[(round + slot) % sizes.len()];

    let run = |law: &str, mut body: Box<dyn FnMut(usize) -> Result<bool, EvalError> + '_>| {
        let mut failures = Vec::new();
        for round in 0..n_samples {
            match body(round) {
                Ok(true) => {}
                Ok(false) => failures.push(format!("counterexample in round {round}")),
                Err(err) => failures.push(err_to_failure(&format!("round {round}"), err)),
            }
        }
        (law.to_string(), failures)
    };

    // 1. associativity and unitality of sequential composition
    let (law, failures) = run(
        "compose associativity",
        Box::new(|round| {
            let (i, j, k, l) = (pick(round, 0), pick(round, 1), pick(round, 2), pick(round, 3));
            let f = sampler(i, j);
            let g = sampler(j, k);
            let h = sampler(k, l);
            let lhs = backend.compose(&backend.compose(&f, &g)?, &h)?;
            let rhs = backend.compose(&f, &backend.compose(&g, &h)?)?;
            Ok(backend.channels_eq(&lhs, &rhs))
        }),
    );
    report.check(&law, n_samples, failures);

    let (law, failures) = run(
        "compose identity",
        Box::new(|round| {
            let (i, j) = (pick(round, 0), pick(round, 1));
            let f = sampler(i, j);
            let left = backend.compose(&backend.ident(i)?, &f)?;
            let right = backend.compose(&f, &backend.ident(j)?)?;
            Ok(backend.channels_eq(&left, &f) && backend.channels_eq(&right, &f))
        }),
    );
    report.check(&law, n_samples, failures);

    // 2. associativity and unitality of parallel composition
    let (law, failures) = run(
        "tensor associativity",
        Box::new(|round| {
            let f = sampler(pick(round, 0), pick(round, 1));
            let g = sampler(pick(round, 2), pick(round, 3));
            let h = sampler(pick(round, 4), pick(round, 5));
            let lhs = backend.tensor(&backend.tensor(&f, &g)?, &h)?;
            let rhs = backend.tensor(&f, &backend.tensor(&g, &h)?)?;
            Ok(backend.channels_eq(&lhs, &rhs))
        }),
    );
    report.check(&law, n_samples, failures);

    let (law, failures) = run(
        "tensor unit",
        Box::new(|round| {
            let f = sampler(pick(round, 0), pick(round, 1));
            let id0 = backend.ident(0)?;
            Ok(backend.channels_eq(&backend.tensor(&f, &id0)?, &f)
                && backend.channels_eq(&backend.tensor(&id0, &f)?, &f))
        }),
    );
    report.check(&law, n_samples, failures);

    // 3. symmetry and interchange
    let (law, failures) = run(
        "swap naturality",
        Box::new(|round| {
            let (i, j) = (pick(round, 0), pick(round, 1));
            let (k, l) = (pick(round, 2), pick(round, 3));
            let f = sampler(i, j);
            let g = sampler(k, l);
            let lhs = backend.compose(&backend.tensor(&f, &g)?, &backend.swap_ch(j, l)?)?;
            let rhs = backend.compose(&backend.swap_ch(i, k)?, &backend.tensor(&g, &f)?)?;
            Ok(backend.channels_eq(&lhs, &rhs))
        }),
    );
    report.check(&law, n_samples, failures);

    let (law, failures) = run(
        "swap involution",
        Box::new(|round| {
            let (i, j) = (pick(round, 0), pick(round, 1));
            let both = backend.compose(&backend.swap_ch(i, j)?, &backend.swap_ch(j, i)?)?;
            Ok(backend.channels_eq(&both, &backend.ident(i + j)?))
        }),
    );
    report.check(&law, n_samples, failures);

    let (law, failures) = run(
        "interchange",
        Box::new(|round| {
            let (i, j, m) = (pick(round, 0), pick(round, 1), pick(round, 2));
            let (k, l, n) = (pick(round, 3), pick(round, 4), pick(round, 5));
            let f1 = sampler(i, j);
            let g1 = sampler(j, m);
            let f2 = sampler(k, l);
            let g2 = sampler(l, n);
            let lhs = backend.compose(&backend.tensor(&f1, &f2)?, &backend.tensor(&g1, &g2)?)?;
            let rhs = backend.tensor(&backend.compose(&f1, &g1)?, &backend.compose(&f2, &g2)?)?;
            Ok(backend.channels_eq(&lhs, &rhs))
        }),
    );
    report.check(&law, n_samples, failures);

    // 4. commutative comonoid laws for copy and delete; these involve only
    // distinguished channels, so one check each suffices
    let comonoid = (|| -> Result<Vec<String>, EvalError> {
        let mut failures = Vec::new();
        let copy = backend.copy_ch()?;
        let del = backend.del_ch()?;
        let id1 = backend.ident(1)?;

        let lhs = backend.compose(&copy, &backend.tensor(&copy, &id1)?)?;
        let rhs = backend.compose(&copy, &backend.tensor(&id1, &copy)?)?;
        if !backend.channels_eq(&lhs, &rhs) {
            failures.push("copy is not coassociative".to_string());
        }

        let left_unit = backend.compose(&copy, &backend.tensor(&del, &id1)?)?;
        let right_unit = backend.compose(&copy, &backend.tensor(&id1, &del)?)?;
        if !backend.channels_eq(&left_unit, &id1) || !backend.channels_eq(&right_unit, &id1) {
            failures.push("delete is not a counit for copy".to_string());
        }

        let swapped = backend.compose(&copy, &backend.swap_ch(1, 1)?)?;
        if !backend.channels_eq(&swapped, &copy) {
            failures.push("copy is not commutative".to_string());
        }
        Ok(failures)
    })();
    match comonoid {
        Ok(failures) => report.check("comonoid laws", 1, failures),
        Err(err) => report.check("comonoid laws", 1, vec![err_to_failure("setup", err)]),
    }

    report
}

/// Checks that evaluation under `interp` preserves both compositions and
/// the wiring channels, on graphs drawn from the sampler.
pub fn check_functor_laws<I: Interpretation>(
    interp: &I,
    graph_sampler: &mut dyn FnMut(usize, usize) -> TermGraph,
    n_samples: usize,
) -> LawReport {
    let mut report = LawReport::default();
    let backend = interp.backend();
    let sizes = [0usize, 1, 2];
    let pick = |round: usize, slot: usize| sizes[(round + slot) % sizes.len()];

    let mut seq_failures = Vec::new();
    let mut par_failures = Vec::new();
    for round in 0..n_samples {
        let (i, j, k) = (pick(round, 0), pick(round, 1), pick(round, 2));
        let first = graph_sampler(i, j);
        let second = graph_sampler(j, k);
        let result = (|| -> Result<bool, EvalError> {
            let composite = first.seq_compose(&second)?;
            let lhs = evaluate(&composite, interp)?;
            let rhs = backend.compose(&evaluate(&first, interp)?, &evaluate(&second, interp)?)?;
            Ok(backend.channels_eq(&lhs, &rhs))
        })();
        match result {
            Ok(true) => {}
            Ok(false) => seq_failures.push(format!("round {round}: arities {i}->{j}->{k}")),
            Err(err) => seq_failures.push(err_to_failure(&format!("round {round}"), err)),
        }

        let (k2, l2) = (pick(round, 3), pick(round, 4));
        let left = graph_sampler(i, j);
        let right = graph_sampler(k2, l2);
        let result = (|| -> Result<bool, EvalError> {
            let composite = left.par_compose(&right)?;
            let lhs = evaluate(&composite, interp)?;
            let rhs = backend.tensor(&evaluate(&left, interp)?, &evaluate(&right, interp)?)?;
            Ok(backend.channels_eq(&lhs, &rhs))
        })();
        match result {
            Ok(true) => {}
            Ok(false) => par_failures.push(format!("round {round}: arities {i}->{j}, {k2}->{l2}")),
            Err(err) => par_failures.push(err_to_failure(&format!("round {round}"), err)),
        }
    }
    report.check("evaluation preserves sequential composition", n_samples, seq_failures);
    report.check("evaluation preserves parallel composition", n_samples, par_failures);

    // preservation of the distinguished channels
    let signature = graph_sampler(0, 1).signature().clone();
    let wiring = (|| -> Result<Vec<String>, EvalError> {
        let mut failures = Vec::new();
        for n in 0..=2 {
            let graph = TermGraph::identity(n, &signature);
            if !backend.channels_eq(&evaluate(&graph, interp)?, &backend.ident(n)?) {
                failures.push(format!("identity({n}) is not preserved"));
            }
        }
        for (i, j) in [(1, 1), (1, 2), (2, 1)] {
            let graph = TermGraph::swap_block(i, j, &signature);
            if !backend.channels_eq(&evaluate(&graph, interp)?, &backend.swap_ch(i, j)?) {
                failures.push(format!("swap_block({i}, {j}) is not preserved"));
            }
        }
        let copy = TermGraph::atomic(&AtomicKind::Copy, &signature)?;
        if !backend.channels_eq(&evaluate(&copy, interp)?, &backend.copy_ch()?) {
            failures.push("copy is not preserved".to_string());
        }
        let del = TermGraph::atomic(&AtomicKind::Del, &signature)?;
        if !backend.channels_eq(&evaluate(&del, interp)?, &backend.del_ch()?) {
            failures.push("del is not preserved".to_string());
        }
        Ok(failures)
    })();
    match wiring {
        Ok(failures) => report.check("wiring channels preserved", 1, failures),
        Err(err) => report.check("wiring channels preserved", 1, vec![err_to_failure("setup", err)]),
    }

    report
}
