use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchedulerError {
    #[error("bad scheduler spec {0:?}")]
    BadSpec(String),
    #[error("activation probability must be in (0,1], got {0}")]
    BadProbability(String),
    #[error("script never activates robot {0}")]
    Unfair(usize),
    #[error("script activates robot {index} but there are only {n}")]
    BadIndex { index: usize, n: usize },
    #[error("script is empty")]
    EmptyScript,
}

/// Default forced-inclusion threshold for the random scheduler.
pub const DEFAULT_MAX_IDLE: usize = 32;

/// How activation sets are chosen at each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchedulerSpec {
    Full,
    RoundRobin,
    /// Each robot is activated independently with probability `num/den`;
    /// a robot idle for `max_idle` consecutive steps is activated anyway.
    Random { num: u32, den: u32, seed: u64, max_idle: usize },
    /// Activation sets replayed cyclically.
    Script(Vec<Vec<usize>>),
}

impl SchedulerSpec {
    pub fn random(num: u32, den: u32, seed: u64) -> Result<Self, SchedulerError> {
        if num == 0 || den == 0 || num > den {
            return Err(SchedulerError::BadProbability(format!("{num}/{den}")));
        }
        Ok(SchedulerSpec::Random { num, den, seed, max_idle: DEFAULT_MAX_IDLE })
    }

    /// Parses `full`, `round-robin`, `random:P[:F]` or `script:0,1;2;;1`.
    /// Random schedulers take their seed from `seed`.
    pub fn parse(text: &str, seed: u64) -> Result<Self, SchedulerError> {
        let bad = || SchedulerError::BadSpec(text.to_string());
        let (kind, rest) = match text.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (text, None),
        };
        match (kind, rest) {
            ("full", None) => Ok(SchedulerSpec::Full),
            ("round-robin" | "rr", None) => Ok(SchedulerSpec::RoundRobin),
            ("random", None) => Self::random(1, 2, seed),
            ("random", Some(rest)) => {
                let (p, idle) = match rest.split_once(':') {
                    Some((p, f)) => (p, Some(f.parse::<usize>().map_err(|_| bad())?)),
                    None => (rest, None),
                };
                let (num, den) = match p.split_once('/') {
                    Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
                    None => (p.trim().parse().map_err(|_| bad())?, 1),
                };
                let mut spec = Self::random(num, den, seed)?;
                if let (SchedulerSpec::Random { max_idle, .. }, Some(f)) = (&mut spec, idle) {
                    if f == 0 {
                        return Err(bad());
                    }
                    *max_idle = f;
                }
                Ok(spec)
            }
            ("script", Some(rest)) => {
                let mut sets = Vec::new();
                for group in rest.split(';') {
                    let mut set = Vec::new();
                    for item in group.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        set.push(item.parse().map_err(|_| bad())?);
                    }
                    sets.push(set);
                }
                Ok(SchedulerSpec::Script(sets))
            }
            _ => Err(bad()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SchedulerSpec::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Checks the fairness contract for a swarm of `n` robots and returns a
    /// stateful scheduler.
    pub fn build(&self, n: usize) -> Result<Scheduler, SchedulerError> {
        if let SchedulerSpec::Script(sets) = self {
            if sets.is_empty() {
                return Err(SchedulerError::EmptyScript);
            }
            let mut covered = vec![false; n];
            for &index in sets.iter().flatten() {
                if index >= n {
                    return Err(SchedulerError::BadIndex { index, n });
                }
                covered[index] = true;
            }
            if let Some(missing) = covered.iter().position(|c| !c) {
                return Err(SchedulerError::Unfair(missing));
            }
        }
        let rng = ChaCha8Rng::seed_from_u64(self.seed().unwrap_or(0));
        Ok(Scheduler { spec: self.clone(), n, tick: 0, idle: vec![0; n], rng })
    }
}

impl fmt::Display for SchedulerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchedulerSpec::Full => f.write_str("full"),
            SchedulerSpec::RoundRobin => f.write_str("round-robin"),
            SchedulerSpec::Random { num, den, max_idle, .. } => write!(f, "random:{num}/{den}:{max_idle}"),
            SchedulerSpec::Script(sets) => {
                let groups: Vec<String> = sets
                    .iter()
                    .map(|s| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "script:{}", groups.join(";"))
            }
        }
    }
}

impl FromStr for SchedulerSpec {
    type Err = SchedulerError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s, 0)
    }
}

/// Produces one activation set per step.
#[derive(Clone, Debug)]
pub struct Scheduler {
    spec: SchedulerSpec,
    n: usize,
    tick: usize,
    idle: Vec<usize>,
    rng: ChaCha8Rng,
}

impl Scheduler {
    pub fn spec(&self) -> &SchedulerSpec {
        &self.spec
    }

    pub fn next_activation(&mut self) -> BTreeSet<usize> {
        let n = self.n;
        let set: BTreeSet<usize> = match &self.spec {
            SchedulerSpec::Full => (0..n).collect(),
            SchedulerSpec::RoundRobin => std::iter::once(self.tick % n).collect(),
            SchedulerSpec::Random { num, den, max_idle, .. } => {
                let (num, den, max_idle) = (*num, *den, *max_idle);
                (0..n)
                    .filter(|&i| {
                        let coin = self.rng.gen_ratio(num, den);
                        coin || self.idle[i] + 1 >= max_idle
                    })
                    .collect()
            }
            SchedulerSpec::Script(sets) => sets[self.tick % sets.len()].iter().copied().collect(),
        };
        for (i, idle) in self.idle.iter_mut().enumerate() {
            *idle = if set.contains(&i) { 0 } else { *idle + 1 };
        }
        self.tick += 1;
        set
    }
}
