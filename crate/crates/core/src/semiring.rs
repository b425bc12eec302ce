//! Semirings and the concrete instances used by the metrics: the six named
//! extended-real semirings, the antichain semiring over attack sets, and the
//! multiset-of-sets semiring.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiringError {
    #[error("unknown semiring {0:?}")]
    UnknownSemiring(String),
}

/// A commutative semiring, dispatched by value so instances over the same
/// carrier but different operations can be selected at runtime.
///
/// `eq_elements` is the instance's notion of element equality: exact for
/// symbolic and tropical carriers, absolute tolerance 1e-9 where real
/// products are involved. `sample_element` feeds the sampled law tests and
/// the sampled equality of function channels.
pub trait Semiring: Clone + Send + Sync + 'static {
    type Element: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static;

    fn zero(&self) -> Self::Element;
    fn one(&self) -> Self::Element;
    fn plus(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn times(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn eq_elements(&self, a: &Self::Element, b: &Self::Element) -> bool;

    /// Whether `r + r*s = r` is claimed to hold for all elements.
    fn is_absorbing(&self) -> bool;
    fn is_idempotent_plus(&self) -> bool;

    fn sample_element(&self, rng: &mut dyn RngCore) -> Self::Element;
}

/// A non-negative extended real: a finite value or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn finite(value: f64) -> ExtReal {
        debug_assert!(value.is_finite() && value >= 0.0, "carrier is [0, inf]");
        ExtReal::Finite(value)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => *v,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    pub fn add(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinity,
        }
    }

    pub fn mul(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a * b),
            // 0 * inf = 0, following the measure-theoretic convention
            (ExtReal::Finite(a), ExtReal::Infinity) | (ExtReal::Infinity, ExtReal::Finite(a))
                if *a == 0.0 =>
            {
                ExtReal::Finite(0.0)
            }
            _ => ExtReal::Infinity,
        }
    }

    pub fn min(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a.min(*b)),
            (ExtReal::Finite(a), ExtReal::Infinity) => ExtReal::Finite(*a),
            (ExtReal::Infinity, other) => *other,
        }
    }

    pub fn max(&self, other: &ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a.max(*b)),
            _ => ExtReal::Infinity,
        }
    }

    pub fn approx_eq(&self, other: &ExtReal, tolerance: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= tolerance,
            (ExtReal::Infinity, ExtReal::Infinity) => true,
            _ => false,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(value: f64) -> Self {
        if value.is_infinite() {
            ExtReal::Infinity
        } else {
            ExtReal::finite(value)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

/// The named metric semirings over the extended reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSemiring {
    /// `([0, inf], min, +, inf, 0)`
    MinCost,
    /// `([0, inf], min, max, inf, 0)`
    MinTimePar,
    /// `([0, inf], min, +, inf, 0)` — same structure as min cost
    MinTimeSeq,
    /// `([0, inf], max, max, inf, inf)`
    MaxChallenge,
    /// `([0, 1], max, *, 0, 1)`
    MaxProb,
    /// `([0, inf), +, *, 0, 1)`
    Unreliability,
}

impl MetricSemiring {
    pub const ALL: [MetricSemiring; 6] = [
        MetricSemiring::MinCost,
        MetricSemiring::MinTimePar,
        MetricSemiring::MinTimeSeq,
        MetricSemiring::MaxChallenge,
        MetricSemiring::MaxProb,
        MetricSemiring::Unreliability,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetricSemiring::MinCost => "mincost",
            MetricSemiring::MinTimePar => "mintime-par",
            MetricSemiring::MinTimeSeq => "mintime-seq",
            MetricSemiring::MaxChallenge => "maxchallenge",
            MetricSemiring::MaxProb => "maxprob",
            MetricSemiring::Unreliability => "unrel",
        }
    }

    /// Real products accumulate rounding error; tropical min/max/+ folds of
    /// the same inputs do not.
    fn compares_with_tolerance(&self) -> bool {
        matches!(
            self,
            MetricSemiring::MaxProb | MetricSemiring::Unreliability
        )
    }
}

/// Looks up one of the named instances: `mincost`, `mintime-par`,
/// `mintime-seq`, `maxchallenge`, `maxprob`, `unrel`.
pub fn table1_semiring(name: &str) -> Result<MetricSemiring, SemiringError> {
    MetricSemiring::ALL
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| SemiringError::UnknownSemiring(name.to_string()))
}

pub const REAL_TOLERANCE: f64 = 1e-9;

impl Semiring for MetricSemiring {
    type Element = ExtReal;

    fn zero(&self) -> ExtReal {
        match self {
            MetricSemiring::MinCost | MetricSemiring::MinTimePar | MetricSemiring::MinTimeSeq => {
                ExtReal::Infinity
            }
            MetricSemiring::MaxChallenge => ExtReal::Infinity,
            MetricSemiring::MaxProb | MetricSemiring::Unreliability => ExtReal::finite(0.0),
        }
    }

    fn one(&self) -> ExtReal {
        match self {
            MetricSemiring::MinCost | MetricSemiring::MinTimePar | MetricSemiring::MinTimeSeq => {
                ExtReal::finite(0.0)
            }
            MetricSemiring::MaxChallenge => ExtReal::Infinity,
            MetricSemiring::MaxProb | MetricSemiring::Unreliability => ExtReal::finite(1.0),
        }
    }

    fn plus(&self, a: &ExtReal, b: &ExtReal) -> ExtReal {
        match self {
            MetricSemiring::MinCost | MetricSemiring::MinTimePar | MetricSemiring::MinTimeSeq => {
                a.min(b)
            }
            MetricSemiring::MaxChallenge | MetricSemiring::MaxProb => a.max(b),
            MetricSemiring::Unreliability => a.add(b),
        }
    }

    fn times(&self, a: &ExtReal, b: &ExtReal) -> ExtReal {
        match self {
            MetricSemiring::MinCost | MetricSemiring::MinTimeSeq => a.add(b),
            MetricSemiring::MinTimePar | MetricSemiring::MaxChallenge => a.max(b),
            MetricSemiring::MaxProb | MetricSemiring::Unreliability => a.mul(b),
        }
    }

    fn eq_elements(&self, a: &ExtReal, b: &ExtReal) -> bool {
        if self.compares_with_tolerance() {
            a.approx_eq(b, REAL_TOLERANCE)
        } else {
            a == b
        }
    }

    fn is_absorbing(&self) -> bool {
        !matches!(
            self,
            MetricSemiring::MaxChallenge | MetricSemiring::Unreliability
        )
    }

    fn is_idempotent_plus(&self) -> bool {
        !matches!(self, MetricSemiring::Unreliability)
    }

    fn sample_element(&self, rng: &mut dyn RngCore) -> ExtReal {
        use rand::Rng;
        match self {
            MetricSemiring::MaxProb => ExtReal::finite((rng.gen_range(0..=64) as f64) / 64.0),
            MetricSemiring::Unreliability => ExtReal::finite((rng.gen_range(0..=256) as f64) / 64.0),
            // integer values keep tropical folds exact under reassociation
            _ => {
                if rng.gen_ratio(1, 8) {
                    ExtReal::Infinity
                } else {
                    ExtReal::finite(rng.gen_range(0..=100) as f64)
                }
            }
        }
    }
}

/// A set of basic-step labels, ordered for canonical printing and hashing.
pub type AttackSet = BTreeSet<String>;

fn format_attack_set(set: &AttackSet) -> String {
    let mut s = String::from("{");
    for (i, item) in set.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(item);
    }
    s.push('}');
    s
}

/// A set of attack sets that are pairwise incomparable under inclusion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Antichain(BTreeSet<AttackSet>);

impl Antichain {
    pub fn empty() -> Antichain {
        Antichain(BTreeSet::new())
    }

    /// `{{}}` — the antichain holding just the empty attack.
    pub fn unit() -> Antichain {
        Antichain(BTreeSet::from([AttackSet::new()]))
    }

    /// `{{b}}` for one label.
    pub fn singleton(label: impl Into<String>) -> Antichain {
        Antichain(BTreeSet::from([AttackSet::from([label.into()])]))
    }

    pub fn attacks(&self) -> impl Iterator<Item = &AttackSet> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, attack: &AttackSet) -> bool {
        self.0.contains(attack)
    }

    /// Checks the defining property: no member strictly contains another.
    pub fn is_valid(&self) -> bool {
        self.0
            .iter()
            .all(|a| !self.0.iter().any(|b| b != a && b.is_subset(a)))
    }
}

impl FromIterator<AttackSet> for Antichain {
    fn from_iter<I: IntoIterator<Item = AttackSet>>(iter: I) -> Self {
        antichain_normalize(iter.into_iter().collect())
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, set) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_attack_set(set))?;
        }
        write!(f, "}}")
    }
}

/// Keeps the inclusion-minimal elements of a set of attack sets.
pub fn antichain_normalize(sets: BTreeSet<AttackSet>) -> Antichain {
    let minimal: BTreeSet<AttackSet> = sets
        .iter()
        .filter(|a| !sets.iter().any(|b| b != *a && b.is_subset(a)))
        .cloned()
        .collect();
    Antichain(minimal)
}

/// The antichain semiring: sum is normalized union, product is normalized
/// pairwise union, with the empty antichain and `{{}}` as units.
#[derive(Debug, Clone)]
pub struct AntichainSemiring {
    universe: BTreeSet<String>,
}

impl AntichainSemiring {
    pub fn new<I, S>(universe: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AntichainSemiring {
            universe: universe.into_iter().map(Into::into).collect(),
        }
    }

    pub fn universe(&self) -> &BTreeSet<String> {
        &self.universe
    }
}

impl Semiring for AntichainSemiring {
    type Element = Antichain;

    fn zero(&self) -> Antichain {
        Antichain::empty()
    }

    fn one(&self) -> Antichain {
        Antichain::unit()
    }

    fn plus(&self, a: &Antichain, b: &Antichain) -> Antichain {
        antichain_normalize(a.0.union(&b.0).cloned().collect())
    }

    fn times(&self, a: &Antichain, b: &Antichain) -> Antichain {
        let mut pairwise = BTreeSet::new();
        for x in &a.0 {
            for y in &b.0 {
                pairwise.insert(x.union(y).cloned().collect());
            }
        }
        antichain_normalize(pairwise)
    }

    fn eq_elements(&self, a: &Antichain, b: &Antichain) -> bool {
        a == b
    }

    fn is_absorbing(&self) -> bool {
        true
    }

    fn is_idempotent_plus(&self) -> bool {
        true
    }

    fn sample_element(&self, rng: &mut dyn RngCore) -> Antichain {
        use rand::Rng;
        let labels: Vec<&String> = self.universe.iter().collect();
        let attacks = rng.gen_range(0..=3);
        let mut sets = BTreeSet::new();
        for _ in 0..attacks {
            let mut set = AttackSet::new();
            for label in &labels {
                if rng.gen_bool(0.4) {
                    set.insert((*label).clone());
                }
            }
            sets.insert(set);
        }
        antichain_normalize(sets)
    }
}

/// A multiset of attack sets: each set mapped to a positive multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultisetOfSets(BTreeMap<AttackSet, u64>);

impl MultisetOfSets {
    pub fn empty() -> MultisetOfSets {
        MultisetOfSets(BTreeMap::new())
    }

    /// `{{}: 1}`.
    pub fn unit() -> MultisetOfSets {
        MultisetOfSets(BTreeMap::from([(AttackSet::new(), 1)]))
    }

    /// `{{b}: 1}` for one label.
    pub fn singleton(label: impl Into<String>) -> MultisetOfSets {
        MultisetOfSets(BTreeMap::from([(AttackSet::from([label.into()]), 1)]))
    }

    pub fn from_counts<I>(counts: I) -> MultisetOfSets
    where
        I: IntoIterator<Item = (AttackSet, u64)>,
    {
        let mut map = BTreeMap::new();
        for (set, count) in counts {
            if count > 0 {
                *map.entry(set).or_insert(0) += count;
            }
        }
        MultisetOfSets(map)
    }

    pub fn multiplicity(&self, set: &AttackSet) -> u64 {
        self.0.get(set).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&AttackSet, u64)> {
        self.0.iter().map(|(set, &count)| (set, count))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for MultisetOfSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (set, count)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", format_attack_set(set), count)?;
        }
        write!(f, "}}")
    }
}

/// The multiset semiring: sum adds multiplicities, product takes pairwise
/// unions with multiplied multiplicities.
#[derive(Debug, Clone)]
pub struct MultisetSemiring {
    universe: BTreeSet<String>,
}

impl MultisetSemiring {
    pub fn new<I, S>(universe: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MultisetSemiring {
            universe: universe.into_iter().map(Into::into).collect(),
        }
    }
}

impl Semiring for MultisetSemiring {
    type Element = MultisetOfSets;

    fn zero(&self) -> MultisetOfSets {
        MultisetOfSets::empty()
    }

    fn one(&self) -> MultisetOfSets {
        MultisetOfSets::unit()
    }

    fn plus(&self, a: &MultisetOfSets, b: &MultisetOfSets) -> MultisetOfSets {
        let mut out = a.0.clone();
        for (set, &count) in &b.0 {
            *out.entry(set.clone()).or_insert(0) += count;
        }
        MultisetOfSets(out)
    }

    fn times(&self, a: &MultisetOfSets, b: &MultisetOfSets) -> MultisetOfSets {
        let mut out: BTreeMap<AttackSet, u64> = BTreeMap::new();
        for (x, &m) in &a.0 {
            for (y, &n) in &b.0 {
                let union: AttackSet = x.union(y).cloned().collect();
                *out.entry(union).or_insert(0) += m * n;
            }
        }
        MultisetOfSets(out)
    }

    fn eq_elements(&self, a: &MultisetOfSets, b: &MultisetOfSets) -> bool {
        a == b
    }

    fn is_absorbing(&self) -> bool {
        false
    }

    fn is_idempotent_plus(&self) -> bool {
        false
    }

    fn sample_element(&self, rng: &mut dyn RngCore) -> MultisetOfSets {
        use rand::Rng;
        let labels: Vec<&String> = self.universe.iter().collect();
        let entries = rng.gen_range(0..=3);
        let mut out = BTreeMap::new();
        for _ in 0..entries {
            let mut set = AttackSet::new();
            for label in &labels {
                if rng.gen_bool(0.4) {
                    set.insert((*label).clone());
                }
            }
            *out.entry(set).or_insert(0) += rng.gen_range(1..=3);
        }
        MultisetOfSets(out)
    }
}
