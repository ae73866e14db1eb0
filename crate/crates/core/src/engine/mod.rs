//! Semi-synchronous simulation.
//!
//! Robots keep an internal index so that schedulers and traces can refer to
//! them; decision functions never see it. Every activated robot computes its
//! decision from the same configuration, then all moves land at once.

mod monitor;
mod scheduler;
mod trace;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algorithm::{Algorithm, AlgorithmError, Decision, Rule, Snapshot};
use crate::configuration::Configuration;
use crate::geometry::{Angle, Visibility};

pub use monitor::{applies as monitor_applies, monitor_invariants, Violation};
pub use scheduler::{Scheduler, SchedulerError, SchedulerSpec, DEFAULT_MAX_IDLE};
pub use trace::{read_trace, write_trace, RobotMove, TraceError, TraceHeader, TraceRecord, TraceWriter};

pub const DEFAULT_STEP_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("algorithm returned invisible destination {destination} for robot at {from}")]
    InvisibleDestination { from: Angle, destination: Angle },
    #[error("activated robot {index} does not exist (n = {n})")]
    BadIndex { index: usize, n: usize },
    #[error("step cap must be at least 1")]
    ZeroStepCap,
    #[error("no robots")]
    Empty,
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
}

/// Decision at every occupied location; co-located robots see the same
/// snapshot and therefore decide alike.
pub fn hypothetical_decisions(
    config: &Configuration,
    algorithm: &dyn Algorithm,
    visibility: &Visibility,
) -> Result<BTreeMap<Angle, Decision>, AlgorithmError> {
    config
        .locations()
        .map(|p| Ok((p.clone(), algorithm.decide(&Snapshot::observe(config, p, visibility))?)))
        .collect()
}

fn configuration_of(positions: &[Angle]) -> Result<Configuration, EngineError> {
    Configuration::from_points(positions.iter().cloned()).map_err(|_| EngineError::Empty)
}

fn apply(
    positions: &[Angle],
    activated: &BTreeSet<usize>,
    decisions: &BTreeMap<Angle, Decision>,
    visibility: &Visibility,
    step: u64,
) -> Result<TraceRecord, EngineError> {
    let n = positions.len();
    let mut next = positions.to_vec();
    let mut moves = Vec::with_capacity(activated.len());
    for &robot in activated {
        let from = positions.get(robot).ok_or(EngineError::BadIndex { index: robot, n })?;
        let d = &decisions[from];
        if !d.is_null() && !visibility.sees_offset(&d.destination) {
            return Err(EngineError::InvisibleDestination { from: from.clone(), destination: d.destination.clone() });
        }
        next[robot] = from + &d.destination;
        moves.push(RobotMove { robot, from: from.clone(), rule: d.rule, destination_offset: d.destination.clone() });
    }
    let configuration = configuration_of(&next)?;
    Ok(TraceRecord { step, activated: activated.iter().copied().collect(), moves, positions: next, configuration })
}

/// One step from `positions` (indexed by robot) with the given activation
/// set. The record is numbered `step`.
pub fn step(
    positions: &[Angle],
    activated: &BTreeSet<usize>,
    algorithm: &dyn Algorithm,
    visibility: &Visibility,
    step: u64,
) -> Result<TraceRecord, EngineError> {
    let config = configuration_of(positions)?;
    let decisions = hypothetical_decisions(&config, algorithm, visibility)?;
    apply(positions, activated, &decisions, visibility, step)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Every robot sits on `point` and none would move; `step` steps were
    /// executed.
    Gathered { point: Angle, step: u64 },
    StepCapExceeded,
    ContractViolation { description: String, step: u64 },
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    pub steps: u64,
    pub final_positions: Vec<Angle>,
    pub final_configuration: Configuration,
    /// How often each rule fired among activated robots.
    pub rule_counts: BTreeMap<Rule, u64>,
    /// Empty unless requested.
    pub trace: Vec<TraceRecord>,
}

#[derive(Clone, Copy)]
pub struct RunOptions<'a> {
    pub algorithm: &'a dyn Algorithm,
    pub visibility: &'a Visibility,
    pub step_cap: u64,
    /// Check the structural invariants every step and stop at the first
    /// violation; flagged decisions of activated robots also stop the run.
    pub monitor: bool,
    pub record_trace: bool,
}

impl<'a> RunOptions<'a> {
    pub fn new(algorithm: &'a dyn Algorithm, visibility: &'a Visibility) -> Self {
        RunOptions { algorithm, visibility, step_cap: DEFAULT_STEP_CAP, monitor: false, record_trace: false }
    }
}

/// Steps until the swarm is gathered for good, the cap is hit, or a contract
/// violation is detected.
pub fn run(initial: &[Angle], scheduler: &mut Scheduler, options: &RunOptions<'_>) -> Result<RunResult, EngineError> {
    if options.step_cap == 0 {
        return Err(EngineError::ZeroStepCap);
    }
    let mut positions = initial.to_vec();
    let mut config = configuration_of(&positions)?;
    let mut rule_counts = BTreeMap::new();
    let mut trace = Vec::new();
    let mut steps = 0;
    let outcome = loop {
        let decisions = hypothetical_decisions(&config, options.algorithm, options.visibility)?;
        if let Some(point) = config.gathered_point() {
            if decisions.values().all(Decision::is_null) {
                break Outcome::Gathered { point: point.clone(), step: steps };
            }
        }
        if steps >= options.step_cap {
            break Outcome::StepCapExceeded;
        }
        let activated = scheduler.next_activation();
        let record = match apply(&positions, &activated, &decisions, options.visibility, steps + 1) {
            Ok(r) => r,
            Err(e @ EngineError::InvisibleDestination { .. }) => {
                break Outcome::ContractViolation { description: e.to_string(), step: steps + 1 };
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        for m in &record.moves {
            *rule_counts.entry(m.rule).or_insert(0) += 1;
        }
        if options.monitor {
            let flagged = activated.iter().find_map(|&i| decisions[&positions[i]].violation.as_ref());
            let movers: Vec<Angle> = record
                .moves
                .iter()
                .filter(|m| !m.destination_offset.is_zero())
                .map(|m| m.from.clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let violations = monitor_invariants(&config, &decisions, &movers, &record.configuration, options.visibility);
            let description = flagged.cloned().or_else(|| violations.first().map(Violation::to_string));
            if let Some(description) = description {
                positions = record.positions.clone();
                config = record.configuration.clone();
                if options.record_trace {
                    trace.push(record);
                }
                break Outcome::ContractViolation { description, step: steps };
            }
        }
        positions = record.positions.clone();
        config = record.configuration.clone();
        if options.record_trace {
            trace.push(record);
        }
    };
    Ok(RunResult { outcome, steps, final_positions: positions, final_configuration: config, rule_counts, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::Registry;

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    fn listing1() -> std::sync::Arc<dyn Algorithm> {
        Registry::with_builtins().get("listing1").unwrap()
    }

    fn all(n: usize) -> BTreeSet<usize> {
        (0..n).collect()
    }

    #[test]
    fn two_step_gathering_by_hand() {
        let alg = listing1();
        let vis = Visibility::half_circle();
        let s0 = cfg("0/1, 1/10, 2/5").expanded();
        let r1 = step(&s0, &all(3), alg.as_ref(), &vis, 1).unwrap();
        assert_eq!(r1.configuration, cfg("1/10 x2, 2/5"));
        let rules: Vec<Rule> = r1.moves.iter().map(|m| m.rule).collect();
        assert_eq!(rules, vec![Rule::R3, Rule::R5, Rule::R5]);
        let r2 = step(&r1.positions, &all(3), alg.as_ref(), &vis, 2).unwrap();
        assert_eq!(r2.configuration, cfg("1/10 x3"));
    }

    #[test]
    fn hypothetical_decision_examples() {
        let alg = listing1();
        let vis = Visibility::half_circle();
        let d = hypothetical_decisions(&cfg("0/1, 1/10, 2/5"), alg.as_ref(), &vis).unwrap();
        let rules: Vec<Rule> = d.values().map(|d| d.rule).collect();
        assert_eq!(rules, vec![Rule::R3, Rule::R5, Rule::R5]);
        let d = hypothetical_decisions(&cfg("1/3 x4"), alg.as_ref(), &vis).unwrap();
        assert!(d.values().all(|d| d.rule == Rule::R1a && d.is_null()));
        let d = hypothetical_decisions(&Configuration::regular(4), alg.as_ref(), &vis).unwrap();
        assert!(d.values().all(|d| d.rule == Rule::R5 && d.is_null()));
    }

    #[test]
    fn run_gathers_at_step_two() {
        let alg = listing1();
        let vis = Visibility::half_circle();
        let mut opts = RunOptions::new(alg.as_ref(), &vis);
        opts.monitor = true;
        opts.record_trace = true;
        let mut sched = SchedulerSpec::Full.build(3).unwrap();
        let res = run(&cfg("0/1, 1/10, 2/5").expanded(), &mut sched, &opts).unwrap();
        assert_eq!(res.outcome, Outcome::Gathered { point: Angle::new(1, 10), step: 2 });
        assert_eq!(res.trace.len(), 2);
        assert_eq!(res.rule_counts[&Rule::R3], 1);
    }

    #[test]
    fn square_is_a_trap() {
        let alg = listing1();
        let vis = Visibility::half_circle();
        let mut opts = RunOptions::new(alg.as_ref(), &vis);
        opts.step_cap = 100;
        opts.monitor = true;
        let square = Configuration::regular(4);
        let mut sched = SchedulerSpec::Full.build(4).unwrap();
        let res = run(&square.expanded(), &mut sched, &opts).unwrap();
        assert_eq!(res.outcome, Outcome::StepCapExceeded);
        assert_eq!(res.final_configuration, square);
    }

    #[test]
    fn midpoint_trips_the_monitor() {
        let alg = Registry::with_builtins().get("midpoint").unwrap();
        let vis = Visibility::half_circle();
        // Every robot has a clockwise neighbor less than half a turn away.
        let before = cfg("0/1, 1/5, 3/5");
        let decisions = hypothetical_decisions(&before, alg.as_ref(), &vis).unwrap();
        let movers: Vec<Angle> = before.locations().cloned().collect();
        let rec = step(&before.expanded(), &all(3), alg.as_ref(), &vis, 1).unwrap();
        let v = monitor_invariants(&before, &decisions, &movers, &rec.configuration, &vis);
        assert!(v.iter().any(|v| v.check == 'a'));
    }

    #[test]
    fn monitor_skips_gathered_configurations() {
        let alg = listing1();
        let vis = Visibility::half_circle();
        let c = cfg("1/2 x3");
        let d = hypothetical_decisions(&c, alg.as_ref(), &vis).unwrap();
        assert!(monitor_invariants(&c, &d, &[], &c, &vis).is_empty());
    }

    #[test]
    fn invisible_destination_is_rejected() {
        let mut reg = Registry::empty();
        reg.register_fn("jump", |_| Decision::new(Angle::half(), Rule::Move));
        let alg = reg.get("jump").unwrap();
        let vis = Visibility::half_circle();
        let err = step(&cfg("0/1, 1/10").expanded(), &all(2), alg.as_ref(), &vis, 1).unwrap_err();
        assert!(err.to_string().contains("algorithm returned invisible destination"));
        let mut sched = SchedulerSpec::Full.build(2).unwrap();
        let res = run(&cfg("0/1, 1/10").expanded(), &mut sched, &RunOptions::new(alg.as_ref(), &vis)).unwrap();
        assert!(matches!(res.outcome, Outcome::ContractViolation { step: 1, .. }));
    }

    #[test]
    fn step_rejects_bad_index() {
        let alg = listing1();
        let vis = Visibility::half_circle();
        let act: BTreeSet<usize> = [5].into();
        assert!(matches!(
            step(&cfg("0/1, 1/10").expanded(), &act, alg.as_ref(), &vis, 1),
            Err(EngineError::BadIndex { index: 5, n: 2 })
        ));
    }
}
