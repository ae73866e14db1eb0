use std::collections::BTreeSet;

use num_rational::BigRational;

use super::{AlgorithmError, Snapshot};
use crate::configuration::Configuration;
use crate::geometry::{antipodal, Angle};

/// Derived quantities of a snapshot, all in the observer's frame.
///
/// * `visible`: the observer plus every visible occupied point, as a set.
/// * `ghost`: `visible` plus the observer's antipodal point.
/// * `extended`: `visible` together with the antipodal points of its members.
/// * `delta`: smallest positive clockwise gap between consecutive points of
///   `extended`.
/// * `next`: the closest visible robot in the clockwise direction.
#[derive(Clone, Debug)]
pub struct LocalView {
    visible: Configuration,
    ghost: Configuration,
    extended: BTreeSet<Angle>,
    delta: Option<BigRational>,
    next: Option<Angle>,
}

impl LocalView {
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let offsets: Vec<Angle> = std::iter::once(Angle::zero())
            .chain(snapshot.visible().iter().map(|(o, _)| o.clone()))
            .collect();
        let visible = Configuration::from_points(offsets.iter().cloned()).expect("observer present");
        let ghost = if visible.contains(&Angle::half()) {
            visible.clone()
        } else {
            visible.with_point(Angle::half())
        };
        let extended: BTreeSet<Angle> = offsets.iter().flat_map(|o| [o.clone(), antipodal(o)]).collect();
        let delta = smallest_gap(&extended);
        let next = snapshot.visible().first().map(|(o, _)| o.clone());
        LocalView { visible, ghost, extended, delta, next }
    }

    pub fn visible(&self) -> &Configuration {
        &self.visible
    }

    pub fn ghost(&self) -> &Configuration {
        &self.ghost
    }

    pub fn extended(&self) -> &BTreeSet<Angle> {
        &self.extended
    }

    pub fn delta(&self) -> Option<&BigRational> {
        self.delta.as_ref()
    }

    pub fn next(&self) -> Option<&Angle> {
        self.next.as_ref()
    }
}

fn smallest_gap(points: &BTreeSet<Angle>) -> Option<BigRational> {
    if points.len() < 2 {
        return None;
    }
    let pts: Vec<&Angle> = points.iter().collect();
    let mut best: Option<BigRational> = None;
    for i in 0..pts.len() {
        let gap = (pts[(i + 1) % pts.len()] - pts[i]).into_turns();
        if best.as_ref().is_none_or(|b| gap < *b) {
            best = Some(gap);
        }
    }
    best
}

/// Head of the visible configuration, falling back to the ghost
/// configuration when the visible one is symmetric.
pub fn visible_head(view: &LocalView) -> Result<Angle, AlgorithmError> {
    view.visible
        .head()
        .or_else(|_| view.ghost.head())
        .map_err(|_| AlgorithmError::LeaderUndefined)
}

/// Head of the ghost configuration, falling back to the visible
/// configuration when the ghost one is symmetric.
pub fn ghost_head(view: &LocalView) -> Result<Angle, AlgorithmError> {
    view.ghost
        .head()
        .or_else(|_| view.visible.head())
        .map_err(|_| AlgorithmError::LeaderUndefined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::Multiplicity;
    use crate::geometry::{ratio, Visibility};

    fn view(offsets: &[&str]) -> LocalView {
        let visible = offsets.iter().map(|o| (o.parse().unwrap(), Multiplicity::One)).collect();
        LocalView::from_snapshot(&Snapshot::new(Visibility::half_circle(), Multiplicity::One, visible).unwrap())
    }

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    #[test]
    fn visible_head_examples() {
        assert_eq!(visible_head(&view(&["1/10", "2/5"])).unwrap(), Angle::zero());
        assert_eq!(visible_head(&view(&["1/10", "11/20"])).unwrap(), Angle::zero());
        assert_eq!(visible_head(&view(&["1/4", "3/4"])).unwrap(), a("3/4"));
    }

    #[test]
    fn ghost_head_examples() {
        assert_eq!(ghost_head(&view(&["1/10", "2/5"])).unwrap(), Angle::zero());
        assert_eq!(ghost_head(&view(&["1/10", "11/20"])).unwrap(), a("1/2"));
        assert_eq!(ghost_head(&view(&["1/100", "51/100", "3/4"])).unwrap(), a("1/2"));
    }

    #[test]
    fn ghost_adds_exactly_the_antipode() {
        let v = view(&["1/10", "11/20"]);
        assert_eq!(v.ghost().len(), v.visible().len() + 1);
        assert!(v.ghost().contains(&Angle::half()));
    }

    #[test]
    fn square_view_falls_back_to_visible_head() {
        // G is the full square, so both heads come from V.
        let v = view(&["1/4", "3/4"]);
        assert!(v.ghost().is_rotationally_symmetric());
        assert_eq!(ghost_head(&v).unwrap(), a("3/4"));
    }

    #[test]
    fn delta_and_next() {
        let v = view(&["1/10", "11/20"]);
        assert_eq!(v.delta(), Some(&ratio(1, 20)));
        assert_eq!(v.next(), Some(&a("1/10")));
        assert!(v.extended().contains(&a("1/20")));
        let lonely = view(&[]);
        assert_eq!(lonely.delta(), Some(&ratio(1, 2)));
        assert_eq!(lonely.next(), None);
    }

    #[test]
    fn both_symmetric_is_leader_undefined() {
        // Full visibility: V = G = square.
        let visible = ["1/4", "1/2", "3/4"].iter().map(|o| (a(o), Multiplicity::One)).collect();
        let snap = Snapshot::new(Visibility::Full, Multiplicity::One, visible).unwrap();
        let v = LocalView::from_snapshot(&snap);
        assert_eq!(visible_head(&v), Err(AlgorithmError::LeaderUndefined));
        assert_eq!(ghost_head(&v), Err(AlgorithmError::LeaderUndefined));
    }
}
