//! Exact-arithmetic simulation and verification of oblivious mobile robots
//! gathering on a circle.
//!
//! Angles are rational fractions of a turn throughout; nothing in the crate
//! rounds. The main entry points are [`engine::run`] for semi-synchronous
//! simulations, [`algorithm::Registry`] for the decision functions, and
//! [`impossibility::forge`] for building counterexample certificates against
//! algorithms with visibility of at most a quarter turn.

#![allow(clippy::result_large_err)]

pub mod algorithm;
pub mod cli;
pub mod configuration;
pub mod engine;
pub mod geometry;
pub mod impossibility;

pub use configuration::{AngleSequence, ConfigError, Configuration, VisibilityGraph};
pub use geometry::{angular_distance, antipodal, cw, in_theta_neighborhood, Angle, OpenArc, Visibility};
