use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ImpossibilityError;
use crate::configuration::Configuration;
use crate::geometry::{format_rational, parse_rational, ratio, Angle, OpenArc, Visibility};

/// Perturbation coefficients, one per point of the regular set, each in
/// `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coefficients(Vec<BigRational>);

impl Coefficients {
    pub fn new(gamma: Vec<BigRational>) -> Result<Self, ImpossibilityError> {
        if let Some(g) = gamma.iter().find(|g| **g < BigRational::zero() || **g > BigRational::one()) {
            return Err(ImpossibilityError::CoefficientOutOfRange(format_rational(g)));
        }
        Ok(Coefficients(gamma))
    }

    pub fn zeros(n: usize) -> Self {
        Coefficients(vec![BigRational::zero(); n])
    }

    /// `n` distinct coefficients `k/denominator`, `0 <= k <= denominator`.
    pub fn sample_distinct<R: Rng>(n: usize, denominator: u64, rng: &mut R) -> Self {
        assert!(denominator as usize + 1 >= n, "not enough distinct values");
        let picks = rand::seq::index::sample(rng, denominator as usize + 1, n);
        Coefficients(picks.iter().map(|k| ratio(k as i64, denominator as i64)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &BigRational {
        &self.0[i]
    }

    /// Same coefficients with the `i`th replaced.
    pub fn with(&self, i: usize, value: BigRational) -> Result<Self, ImpossibilityError> {
        let mut v = self.0.clone();
        v[i] = value;
        Self::new(v)
    }

    pub fn all_distinct(&self) -> bool {
        let set: std::collections::BTreeSet<&BigRational> = self.0.iter().collect();
        set.len() == self.0.len()
    }

    /// Equal everywhere except possibly at `i`.
    pub fn i_related(&self, other: &Coefficients, i: usize) -> bool {
        self.len() == other.len() && (0..self.len()).all(|j| j == i || self.0[j] == other.0[j])
    }
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for Coefficients {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for Coefficients {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let values = raw
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Coefficients::new(values).map_err(serde::de::Error::custom)
    }
}

/// The regular set with each point pushed clockwise, remembering which
/// perturbed point came from which regular point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    copies: Vec<Angle>,
    config: Configuration,
}

impl Perturbation {
    /// Perturbed copy of the regular point `i/n`.
    pub fn copy(&self, i: usize) -> &Angle {
        &self.copies[i]
    }

    pub fn copies(&self) -> &[Angle] {
        &self.copies
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }
}

/// Moves point `i/n` of the regular `n`-set clockwise by `gamma_i * eps`.
pub fn perturb(n: usize, eps: &Angle, gamma: &Coefficients) -> Result<Perturbation, ImpossibilityError> {
    if gamma.len() != n {
        return Err(ImpossibilityError::SizeMismatch { expected: n, got: gamma.len() });
    }
    if n == 0 || eps.is_zero() || *eps.turns() >= ratio(1, n as i64) {
        return Err(ImpossibilityError::EpsilonOutOfRange(eps.clone()));
    }
    let copies: Vec<Angle> = (0..n)
        .map(|i| Angle::new(i as i64, n as i64).advance(&(gamma.get(i) * eps.turns())))
        .collect();
    let config = Configuration::from_points(copies.iter().cloned()).expect("n >= 1");
    Ok(Perturbation { copies, config })
}

/// `(S1 ∩ D) ∪ ρ(S2 ∩ D)` for the open semicircle `D` around `center` and
/// the half-turn rotation `ρ`, as a set.
pub fn d_combination(
    s1: &Configuration,
    s2: &Configuration,
    center: &Angle,
) -> Result<Configuration, ImpossibilityError> {
    let d = OpenArc::semicircle(center.clone());
    let half = Angle::half();
    let points: std::collections::BTreeSet<Angle> = s1
        .locations()
        .filter(|p| d.contains(p))
        .cloned()
        .chain(s2.locations().filter(|p| d.contains(p)).map(|p| p + &half))
        .collect();
    Configuration::from_points(points).map_err(|_| ImpossibilityError::EmptyCombination)
}

/// Whether mapping each regular point to its perturbed copy preserves
/// mutual visibility in both directions. `regular` must be the regular set
/// the perturbation was built from.
pub fn isomorphism_check(
    regular: &Configuration,
    perturbed: &Perturbation,
    visibility: &Visibility,
) -> Result<bool, ImpossibilityError> {
    let n = perturbed.len();
    if *regular != Configuration::regular(n) {
        return Err(ImpossibilityError::NoCorrespondence);
    }
    let original = regular.visibility_graph(visibility);
    let copies = crate::configuration::VisibilityGraph::new(perturbed.copies(), visibility);
    Ok((0..n).all(|i| (0..n).all(|j| original.has_edge(i, j) == copies.has_edge(i, j))))
}
