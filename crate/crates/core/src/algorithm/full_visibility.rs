use super::{Algorithm, AlgorithmError, Decision, Multiplicity, Rule, Snapshot};
use crate::configuration::Configuration;
use crate::geometry::{Angle, Visibility};

/// Leader election with full visibility: the head steps onto its clockwise
/// neighbor, then robots join the multiplicity point one at a time, closest
/// clockwise first.
pub struct FullVisibility;

impl Algorithm for FullVisibility {
    fn name(&self) -> &str {
        "fullvis"
    }

    fn decide(&self, snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
        full_visibility_decision(snapshot)
    }
}

pub fn full_visibility_decision(snapshot: &Snapshot) -> Result<Decision, AlgorithmError> {
    if *snapshot.visibility() != Visibility::Full {
        return Err(AlgorithmError::RequiresFullVisibility(snapshot.visibility().to_string()));
    }
    let multiplicities = snapshot.multiplicity_offsets();
    match multiplicities.as_slice() {
        [] => {}
        [m] if m.is_zero() => return Ok(Decision::stay(Rule::Stay)),
        [m] => {
            let blocked = snapshot.visible().iter().any(|(o, _)| o > m);
            return Ok(if blocked || snapshot.own() == Multiplicity::Many {
                Decision::stay(Rule::Stay)
            } else {
                Decision::new(m.clone(), Rule::Join)
            });
        }
        _ => return Ok(Decision::flagged(Rule::Stay, "more than one multiplicity point")),
    }

    let Some((next, _)) = snapshot.visible().first() else {
        return Ok(Decision::stay(Rule::Stay));
    };
    let config = Configuration::from_points(
        std::iter::once(Angle::zero()).chain(snapshot.visible().iter().map(|(o, _)| o.clone())),
    )
    .expect("observer present");
    match config.head() {
        Ok(head) if head.is_zero() => Ok(Decision::new(next.clone(), Rule::Advance)),
        Ok(_) => Ok(Decision::stay(Rule::Stay)),
        Err(_) => Ok(Decision::flagged(Rule::Stay, "symmetric configuration without multiplicity")),
    }
}
