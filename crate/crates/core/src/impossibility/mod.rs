//! Executable impossibility argument for visibility of at most a quarter
//! turn.
//!
//! Perturbing the regular `n`-set by less than `epsilon(theta, n)` keeps
//! every visibility relation intact. Against such perturbations an
//! algorithm either freezes, moves a robot to an empty point, or moves a
//! robot onto the same neighbor for two members of a bundle; the last two
//! cases glue two perturbations into an asymmetric configuration that one
//! step turns symmetric. [`forge`] searches for one of the three and returns
//! a self-verifying [`Certificate`].

mod certificate;
mod compat;
mod derandomize;
mod forge;
mod perturbation;

use thiserror::Error;

use crate::algorithm::AlgorithmError;
use crate::engine::EngineError;
use crate::geometry::Angle;

pub use certificate::{
    build_lemma1_certificate, build_lemma2_certificate, verify_certificate, Certificate, Check, Evidence,
};
pub use compat::{epsilon, find_compatible, is_compatible};
pub use derandomize::{derandomize, parse_obstacles, DerandGrid, Point, MAX_GRID};
pub use forge::{forge, ForgeOptions};
pub use perturbation::{d_combination, isomorphism_check, perturb, Coefficients, Perturbation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImpossibilityError {
    #[error("theta must be ≤ 1/4 turn (and positive), got {0}")]
    ThetaOutOfRange(Angle),
    #[error("n = {n} is not compatible with theta = {theta}")]
    Incompatible { n: usize, theta: Angle },
    #[error("expected {expected} coefficients, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("coefficient {0} outside [0, 1]")]
    CoefficientOutOfRange(String),
    #[error("perturbation size {0} must lie strictly between 0 and 1/n")]
    EpsilonOutOfRange(Angle),
    #[error("D-combination is empty")]
    EmptyCombination,
    #[error("no recorded correspondence with the regular set")]
    NoCorrespondence,
    #[error("lemma 1 inapplicable: {0}")]
    Lemma1Inapplicable(String),
    #[error("lemma 2 inapplicable: {0}")]
    Lemma2Inapplicable(String),
    #[error("certificate check failed: {0}")]
    VerificationFailed(String),
    #[error("no certificate found after {0} samples")]
    NoCertificate(usize),
    #[error("coefficient denominator {0} is too small")]
    DenominatorTooSmall(u64),
    #[error("algorithm returned invisible destination {destination} for robot at {from}")]
    InvisibleDestination { from: Angle, destination: Angle },
    #[error("line bound exceeded along axis {axis}")]
    LineBoundExceeded { axis: usize },
    #[error("derandomization grid too large")]
    GridTooLarge,
    #[error("bad obstacles: {0}")]
    BadObstacles(String),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
