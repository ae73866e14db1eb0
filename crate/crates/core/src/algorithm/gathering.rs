//! Gathering for visibility range half a turn.
//!
//! The robot elects a leader among the configuration it sees (`V`) and the
//! one it would see if its antipodal point were occupied (`G`). A robot that
//! heads both is certain to be the leader and creates a multiplicity point by
//! stepping onto its clockwise neighbor; a robot that heads only `V` closes
//! in on its neighbor without reaching it. Once a multiplicity point exists,
//! everyone walks to it.

use num_rational::BigRational;

use super::view::{ghost_head, visible_head, LocalView};
use super::{Algorithm, AlgorithmError, Decision, Rule, Snapshot};
use crate::geometry::{antipodal, cw, ratio, Angle, Visibility};

pub struct Listing1 {
    any_visibility: bool,
}

impl Listing1 {
    pub fn new() -> Self {
        Listing1 { any_visibility: false }
    }

    /// Evaluates the rules on snapshots of any visibility range.
    pub fn any_visibility() -> Self {
        Listing1 { any_visibility: true }
    }
}

impl Default for Listing1 {
    fn default() -> Self {
        Self::new()
    }
}

impl Algorithm for Listing1 {
    fn name(&self) -> &str {
        "listing1"
    }

    fn decide(&self, snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
        if self.any_visibility {
            Ok(listing1_rules(snapshot))
        } else {
            gathering_decision(snapshot)
        }
    }
}

/// The gathering rules, rejecting snapshots whose range is not half a turn.
pub fn gathering_decision(snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
    if *snapshot.visibility() != Visibility::half_circle() {
        return Err(AlgorithmError::RequiresHalfCircle(snapshot.visibility().to_string()));
    }
    Ok(listing1_rules(snapshot))
}

/// The gathering rules in precedence order, without the visibility check.
pub fn listing1_rules(snapshot: &Snapshot) -> Decision {
    let multiplicities = snapshot.multiplicity_offsets();
    match multiplicities.as_slice() {
        [] => {}
        [only] => return Decision::new(only.clone(), Rule::R1a),
        [a, b] => {
            let ab = cw(a, b);
            let ba = cw(b, a);
            return if ab > ba {
                Decision::new(a.clone(), Rule::R1b)
            } else if ba > ab {
                Decision::new(b.clone(), Rule::R1b)
            } else {
                Decision::flagged(Rule::R5, "two antipodal multiplicity points")
            };
        }
        _ => return Decision::flagged(Rule::R5, "three or more multiplicity points"),
    }

    if snapshot.visible().is_empty() {
        return Decision::new(Angle::quarter(), Rule::R2);
    }

    let view = LocalView::from_snapshot(snapshot);
    let (leader, ghost_leader) = match (visible_head(&view), ghost_head(&view)) {
        (Ok(v), Ok(g)) => (v, g),
        _ => return Decision::flagged(Rule::R5, AlgorithmError::LeaderUndefined.to_string()),
    };
    let next = view.next().expect("some robot is visible").clone();

    if ghost_leader.is_zero() {
        return Decision::new(next, Rule::R3);
    }
    if leader.is_zero() {
        let delta = view.delta().expect("extended view has at least two points");
        if ghost_leader == Angle::half() && view.visible().contains(&antipodal(&next)) {
            return Decision::new(next.advance(&(delta * ratio(1, 3))), Rule::R4a);
        }
        let midpoint = Angle::from_turns(next.turns() / BigRational::from_integer(2.into()));
        if view.extended().contains(&midpoint) {
            return Decision::new(midpoint.advance(&(delta * ratio(1, 7))), Rule::R4b);
        }
        return Decision::new(midpoint, Rule::R4c);
    }
    Decision::stay(Rule::R5)
}
