//! Runtime checks of the structural guarantees the gathering rules provide
//! on asymmetric configurations without multiplicity points.

use std::collections::BTreeMap;
use std::fmt;

use crate::algorithm::{Decision, LocalView, Rule, Snapshot};
use crate::configuration::Configuration;
use crate::geometry::{antipodal, cw, Angle, Visibility};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub check: char,
    pub description: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check ({}): {}", self.check, self.description)
    }
}

/// Whether the checks apply to `before`.
pub fn applies(before: &Configuration) -> bool {
    before.len() >= 2 && before.is_set() && !before.is_rotationally_symmetric()
}

/// Checks one step. `decisions` holds the hypothetical decision at every
/// occupied location of `before`; `movers` are the activated robots (by
/// location) with non-null decisions. Returns nothing when `before` is out
/// of scope.
pub fn monitor_invariants(
    before: &Configuration,
    decisions: &BTreeMap<Angle, Decision>,
    movers: &[Angle],
    after: &Configuration,
    visibility: &Visibility,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if !applies(before) {
        return out;
    }
    let mut fail = |check: char, description: String| out.push(Violation { check, description });
    let leader = before.head().expect("asymmetric");
    let able: Vec<&Angle> = decisions.iter().filter(|(_, d)| !d.is_null()).map(|(p, _)| p).collect();

    if able.len() > 2 {
        fail('a', format!("{} robots are able to move in {before}", able.len()));
    }
    if decisions.get(&leader).is_none_or(Decision::is_null) {
        fail('b', format!("true leader {leader} is unable to move in {before}"));
    }
    let rule3: Vec<&Angle> = decisions.iter().filter(|(_, d)| d.rule == Rule::R3).map(|(p, _)| p).collect();
    if rule3.len() > 1 || rule3.iter().any(|p| **p != leader) {
        fail('c', format!("rule 3 applicable at {rule3:?}, leader is {leader}"));
    }
    for (r, d) in decisions.iter().filter(|(_, d)| d.rule.is_rule4()) {
        if *r != leader {
            let to_leader = cw(r, &leader);
            if !(to_leader > Angle::quarter() && to_leader <= Angle::half()) || !before.contains(&antipodal(r)) {
                fail('d', format!("non-leader {r} applies rule {} with cw to leader {to_leader}", d.rule));
            }
        }
        let view = LocalView::from_snapshot(&Snapshot::observe(before, r, visibility));
        if view.extended().contains(&d.destination) || d.destination >= Angle::half() {
            fail('g', format!("rule {} destination offset {} from {r} is in V' or too far", d.rule, d.destination));
        }
    }
    let mover_rules: Vec<Rule> = movers.iter().map(|p| decisions[p].rule).collect();
    if !movers.is_empty() && mover_rules.iter().all(|r| matches!(r, Rule::R4b | Rule::R4c)) {
        if !after.is_set() || after.is_rotationally_symmetric() {
            fail('e', format!("rule 4b/4c moves from {before} produced {after}"));
        }
        if let [p, q] = movers {
            let dp = p + &decisions[p].destination;
            let dq = q + &decisions[q].destination;
            if antipodal(p) == *q || antipodal(&dp) == dq {
                fail('h', format!("antipodal rule 4b/4c movers {p} and {q}"));
            }
        }
    }
    for p in movers.iter().filter(|p| decisions[*p].rule == Rule::R3) {
        let target = p + &decisions[p].destination;
        if able.iter().any(|q| *q != p && **q == target && !movers.contains(q)) {
            fail('f', format!("rule 3 mover {p} lands on inactive robot {target} that is able to move"));
        }
    }
    out
}
