//! Robot decision functions.
//!
//! A robot sees a [`Snapshot`] expressed in its own frame: offsets are
//! clockwise distances from the observer, so the observer always sits at
//! offset zero. An [`Algorithm`] maps a snapshot to a [`Decision`], i.e. a
//! destination offset inside the visible arc.

mod full_visibility;
mod gathering;
mod simple;
mod view;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::configuration::Configuration;
use crate::geometry::{cw, Angle, Visibility};

pub use full_visibility::{full_visibility_decision, FullVisibility};
pub use gathering::{gathering_decision, listing1_rules, Listing1};
pub use simple::{Midpoint, Nearest, Stay};
pub use view::{ghost_head, visible_head, LocalView};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error("algorithm requires theta = pi (1/2 turn), got {0}")]
    RequiresHalfCircle(String),
    #[error("algorithm requires full visibility, got theta = {0}")]
    RequiresFullVisibility(String),
    #[error("leader undefined: visible and ghost configurations are both symmetric")]
    LeaderUndefined,
    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),
}

/// Weak multiplicity detection: one robot or more than one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    One,
    Many,
}

impl Multiplicity {
    pub fn of_count(count: usize) -> Self {
        if count > 1 {
            Multiplicity::Many
        } else {
            Multiplicity::One
        }
    }
}

/// What an activated robot sees, in its own coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Snapshot {
    visibility: Visibility,
    own: Multiplicity,
    visible: Vec<(Angle, Multiplicity)>,
}

impl Snapshot {
    /// Validates the offsets: strictly increasing, nonzero, inside the arc.
    pub fn new(
        visibility: Visibility,
        own: Multiplicity,
        visible: Vec<(Angle, Multiplicity)>,
    ) -> Result<Self, AlgorithmError> {
        for (i, (offset, _)) in visible.iter().enumerate() {
            if offset.is_zero() {
                return Err(AlgorithmError::InvalidSnapshot("offset 0 is the observer".into()));
            }
            if !visibility.sees_offset(offset) {
                return Err(AlgorithmError::InvalidSnapshot(format!("offset {offset} is not visible")));
            }
            if i > 0 && visible[i - 1].0 >= *offset {
                return Err(AlgorithmError::InvalidSnapshot("offsets must be strictly increasing".into()));
            }
        }
        Ok(Snapshot { visibility, own, visible })
    }

    /// The snapshot taken by a robot located at `observer` in `config`.
    pub fn observe(config: &Configuration, observer: &Angle, visibility: &Visibility) -> Self {
        let own = Multiplicity::of_count(config.count(observer));
        let mut visible: Vec<(Angle, Multiplicity)> = config
            .iter()
            .filter(|(p, _)| *p != observer)
            .map(|(p, c)| (cw(observer, p), Multiplicity::of_count(c)))
            .filter(|(offset, _)| visibility.sees_offset(offset))
            .collect();
        visible.sort_by(|a, b| a.0.cmp(&b.0));
        Snapshot { visibility: visibility.clone(), own, visible }
    }

    pub fn visibility(&self) -> &Visibility {
        &self.visibility
    }

    pub fn own(&self) -> Multiplicity {
        self.own
    }

    pub fn visible(&self) -> &[(Angle, Multiplicity)] {
        &self.visible
    }

    /// Offsets of every visible multiplicity point, own location first.
    pub fn multiplicity_offsets(&self) -> Vec<Angle> {
        let mut out = Vec::new();
        if self.own == Multiplicity::Many {
            out.push(Angle::zero());
        }
        out.extend(self.visible.iter().filter(|(_, m)| *m == Multiplicity::Many).map(|(o, _)| o.clone()));
        out
    }

    /// Smallest visible offset on the clockwise half of the view.
    pub fn nearest_clockwise(&self) -> Option<&Angle> {
        self.visible.iter().map(|(o, _)| o).find(|o| **o < Angle::half())
    }
}

/// Which branch of a decision function produced a move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    R1a,
    R1b,
    R2,
    R3,
    R4a,
    R4b,
    R4c,
    R5,
    /// Full-visibility leader steps onto its clockwise neighbor.
    Advance,
    /// Full-visibility follower joins the multiplicity point.
    Join,
    Stay,
    Move,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::R1a => "1a",
            Rule::R1b => "1b",
            Rule::R2 => "2",
            Rule::R3 => "3",
            Rule::R4a => "4a",
            Rule::R4b => "4b",
            Rule::R4c => "4c",
            Rule::R5 => "5",
            Rule::Advance => "advance",
            Rule::Join => "join",
            Rule::Stay => "stay",
            Rule::Move => "move",
        }
    }

    pub fn is_rule4(&self) -> bool {
        matches!(self, Rule::R4a | Rule::R4b | Rule::R4c)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "1a" => Rule::R1a,
            "1b" => Rule::R1b,
            "2" => Rule::R2,
            "3" => Rule::R3,
            "4a" => Rule::R4a,
            "4b" => Rule::R4b,
            "4c" => Rule::R4c,
            "5" => Rule::R5,
            "advance" => Rule::Advance,
            "join" => Rule::Join,
            "stay" => Rule::Stay,
            "move" => Rule::Move,
            other => return Err(format!("unknown rule {other:?}")),
        })
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Rule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Destination in the observer's frame (zero means stay) plus the rule that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decision {
    pub destination: Angle,
    pub rule: Rule,
    /// Set when the function had to pick a behavior for a situation its
    /// correctness argument rules out.
    pub violation: Option<String>,
}

impl Decision {
    pub fn new(destination: Angle, rule: Rule) -> Self {
        Decision { destination, rule, violation: None }
    }

    pub fn stay(rule: Rule) -> Self {
        Self::new(Angle::zero(), rule)
    }

    pub fn flagged(rule: Rule, why: impl Into<String>) -> Self {
        Decision { destination: Angle::zero(), rule, violation: Some(why.into()) }
    }

    pub fn is_null(&self) -> bool {
        self.destination.is_zero()
    }
}

/// A deterministic map from snapshots to destinations.
pub trait Algorithm: Send + Sync {
    fn name(&self) -> &str;
    fn decide(&self, snapshot: &Snapshot) -> Result<Decision, AlgorithmError>;
}

/// Adapter turning a plain function into a named [`Algorithm`].
pub struct FnAlgorithm<F> {
    name: String,
    f: F,
}

impl<F> FnAlgorithm<F>
where
    F: Fn(&Snapshot) -> Decision + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnAlgorithm { name: name.into(), f }
    }
}

impl<F> Algorithm for FnAlgorithm<F>
where
    F: Fn(&Snapshot) -> Decision + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&self, snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
        Ok((self.f)(snapshot))
    }
}

/// Algorithms keyed by name.
#[derive(Clone, Default)]
pub struct Registry {
    algorithms: BTreeMap<String, Arc<dyn Algorithm>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `listing1`, `fullvis`, `stay`, `midpoint` and `nearest`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Listing1::new()));
        r.register(Arc::new(FullVisibility));
        r.register(Arc::new(Stay));
        r.register(Arc::new(Midpoint));
        r.register(Arc::new(Nearest));
        r
    }

    /// Same names, but `listing1` evaluates its rules at any visibility
    /// range instead of rejecting snapshots whose range is not half a turn.
    /// Used when the algorithm is a target of the impossibility forge.
    pub fn any_visibility() -> Self {
        let mut r = Self::with_builtins();
        r.register(Arc::new(Listing1::any_visibility()));
        r
    }

    pub fn register(&mut self, algorithm: Arc<dyn Algorithm>) {
        self.algorithms.insert(algorithm.name().to_string(), algorithm);
    }

    pub fn register_fn<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&Snapshot) -> Decision + Send + Sync + 'static,
    {
        self.register(Arc::new(FnAlgorithm::new(name, f)));
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Algorithm>> {
        self.algorithms.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.algorithms.keys().map(|k| k.as_str())
    }
}
