use super::{Algorithm, AlgorithmError, Decision, Rule, Snapshot};
use crate::geometry::ratio;

/// Never moves.
pub struct Stay;

impl Algorithm for Stay {
    fn name(&self) -> &str {
        "stay"
    }

    fn decide(&self, _snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
        Ok(Decision::stay(Rule::Stay))
    }
}

/// Moves halfway to the nearest robot on the clockwise side.
pub struct Midpoint;

impl Algorithm for Midpoint {
    fn name(&self) -> &str {
        "midpoint"
    }

    fn decide(&self, snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
        Ok(match snapshot.nearest_clockwise() {
            Some(s) => Decision::new(s.scale(&ratio(1, 2)), Rule::Move),
            None => Decision::stay(Rule::Stay),
        })
    }
}

/// Moves onto the nearest robot on the clockwise side.
pub struct Nearest;

impl Algorithm for Nearest {
    fn name(&self) -> &str {
        "nearest"
    }

    fn decide(&self, snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
        Ok(match snapshot.nearest_clockwise() {
            Some(s) => Decision::new(s.clone(), Rule::Move),
            None => Decision::stay(Rule::Stay),
        })
    }
}
