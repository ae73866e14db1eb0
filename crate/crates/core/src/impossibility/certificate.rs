use serde::{Deserialize, Serialize};

use super::compat::{check_theta, epsilon};
use super::perturbation::{d_combination, perturb, Coefficients, Perturbation};
use super::ImpossibilityError;
use crate::algorithm::{Algorithm, Snapshot};
use crate::configuration::Configuration;
use crate::engine::{hypothetical_decisions, step};
use crate::geometry::{antipodal, Angle, Visibility};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// What the certificate claims, in enough detail to re-run every check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum Evidence {
    /// No robot moves on an asymmetric, connected perturbation.
    Frozen { gamma: Coefficients, config: Configuration, decisions: Vec<Angle> },
    /// The robot at `p_prime` moves to the unoccupied `target`.
    Lemma1 {
        gamma: Coefficients,
        mover: usize,
        s_prime: Configuration,
        p_prime: Angle,
        target: Angle,
        combined: Configuration,
        activated: Vec<Angle>,
        successor: Configuration,
        rotation: Angle,
    },
    /// Two members of one bundle send the perturbed robot onto the same
    /// occupied `target`.
    Lemma2 {
        gamma1: Coefficients,
        gamma2: Coefficients,
        mover: usize,
        s_prime: Configuration,
        s_double_prime: Configuration,
        p_prime: Angle,
        p_double_prime: Angle,
        target: Angle,
        combined: Configuration,
        activated: Vec<Angle>,
        successor: Configuration,
        rotation: Angle,
    },
}

impl Evidence {
    pub fn variant(&self) -> &'static str {
        match self {
            Evidence::Frozen { .. } => "Frozen",
            Evidence::Lemma1 { .. } => "Lemma1",
            Evidence::Lemma2 { .. } => "Lemma2",
        }
    }
}

/// Evidence that an algorithm fails to gather some asymmetric connected
/// configuration, together with the outcome of every check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub algorithm: String,
    pub theta: Angle,
    pub n: usize,
    pub epsilon: Angle,
    /// 1-based index of the forge sample that produced it, if any.
    pub sample: Option<usize>,
    pub evidence: Evidence,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn variant(&self) -> &'static str {
        self.evidence.variant()
    }

    pub fn is_verified(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: &str, passed: bool) {
        self.0.push(Check { name: name.to_string(), passed });
    }
}

pub(crate) fn absolute_target(
    algorithm: &dyn Algorithm,
    config: &Configuration,
    at: &Angle,
    visibility: &Visibility,
) -> Result<Option<Angle>, ImpossibilityError> {
    let d = algorithm.decide(&Snapshot::observe(config, at, visibility))?;
    if d.is_null() {
        return Ok(None);
    }
    if !visibility.sees_offset(&d.destination) {
        return Err(ImpossibilityError::InvisibleDestination { from: at.clone(), destination: d.destination });
    }
    Ok(Some(at + &d.destination))
}

fn one_step(
    q: &Configuration,
    activated: &[Angle],
    algorithm: &dyn Algorithm,
    visibility: &Visibility,
) -> Result<Configuration, ImpossibilityError> {
    let positions = q.expanded();
    let indices = positions
        .iter()
        .enumerate()
        .filter(|(_, p)| activated.contains(p))
        .map(|(i, _)| i)
        .collect();
    Ok(step(&positions, &indices, algorithm, visibility, 1)?.configuration)
}

#[allow(clippy::too_many_arguments)]
fn combined_checks(
    checks: &mut Checks,
    n: usize,
    combined: &Configuration,
    activated: &[Angle],
    successor: &Configuration,
    rotation: &Angle,
    algorithm: &dyn Algorithm,
    visibility: &Visibility,
) -> Result<(), ImpossibilityError> {
    checks.add("combined_size", combined.len() == n && combined.is_set());
    checks.add(
        "two_unpaired_antipodals",
        combined.is_set() && combined.has_exactly_two_unpaired_antipodals().unwrap_or(false),
    );
    checks.add("asymmetric", !combined.is_rotationally_symmetric());
    checks.add("connected", combined.visibility_graph(visibility).is_connected());
    let activated_present = activated.iter().all(|p| combined.contains(p));
    checks.add("activated_present", activated_present);
    let replayed = if activated_present { Some(one_step(combined, activated, algorithm, visibility)?) } else { None };
    checks.add("successor", replayed.as_ref() == Some(successor));
    checks.add(
        "successor_symmetric",
        *rotation == Angle::half() && successor.rotated(rotation) == *successor && successor.is_rotationally_symmetric(),
    );
    Ok(())
}

/// Re-derives every check from the evidence alone.
pub fn verify_certificate(cert: &Certificate, algorithm: &dyn Algorithm) -> Result<Vec<Check>, ImpossibilityError> {
    check_theta(&cert.theta)?;
    let visibility = Visibility::limited(cert.theta.clone()).expect("checked");
    let eps = epsilon(&cert.theta, cert.n)?;
    let mut checks = Checks(Vec::new());
    checks.add("epsilon", eps == cert.epsilon);
    let n = cert.n;
    match &cert.evidence {
        Evidence::Frozen { gamma, config, decisions } => {
            checks.add("perturbation", perturb(n, &eps, gamma)?.configuration() == config);
            checks.add("asymmetric", !config.is_rotationally_symmetric());
            checks.add("multiplicity_free", config.is_set());
            checks.add("connected", config.visibility_graph(&visibility).is_connected());
            let replayed = hypothetical_decisions(config, algorithm, &visibility)?;
            checks.add(
                "all_decisions_null",
                replayed.values().all(|d| d.is_null()) && decisions.iter().all(Angle::is_zero),
            );
        }
        Evidence::Lemma1 { gamma, mover, s_prime, p_prime, target, combined, activated, successor, rotation } => {
            let sp = perturb(n, &eps, gamma)?;
            checks.add("perturbation", sp.configuration() == s_prime && sp.copies().get(*mover) == Some(p_prime));
            let hit = absolute_target(algorithm, s_prime, p_prime, &visibility)?;
            checks.add("mover_targets_empty_point", hit.as_ref() == Some(target) && !s_prime.contains(target));
            let s2 = lemma1_replacement(s_prime, p_prime, target);
            checks.add("combined_is_d_combination", d_combination(s_prime, &s2, p_prime).ok().as_ref() == Some(combined));
            checks.add("activated_movers", activated.as_slice() == std::slice::from_ref(p_prime));
            combined_checks(&mut checks, n, combined, activated, successor, rotation, algorithm, &visibility)?;
        }
        Evidence::Lemma2 {
            gamma1,
            gamma2,
            mover,
            s_prime,
            s_double_prime,
            p_prime,
            p_double_prime,
            target,
            combined,
            activated,
            successor,
            rotation,
        } => {
            let s1 = perturb(n, &eps, gamma1)?;
            let s2 = perturb(n, &eps, gamma2)?;
            checks.add(
                "perturbation",
                s1.configuration() == s_prime
                    && s2.configuration() == s_double_prime
                    && s1.copies().get(*mover) == Some(p_prime)
                    && s2.copies().get(*mover) == Some(p_double_prime),
            );
            checks.add("same_bundle", *mover < n && gamma1.i_related(gamma2, *mover) && p_prime != p_double_prime);
            let hit1 = absolute_target(algorithm, s_prime, p_prime, &visibility)?;
            let hit2 = absolute_target(algorithm, s_double_prime, p_double_prime, &visibility)?;
            checks.add(
                "mover_targets_same_point",
                hit1.as_ref() == Some(target) && hit2.as_ref() == Some(target) && s_prime.contains(target),
            );
            let center = Angle::new(*mover as i64, n as i64);
            checks.add(
                "combined_is_d_combination",
                d_combination(s_prime, s_double_prime, &center).ok().as_ref() == Some(combined),
            );
            checks.add("activated_movers", *activated == vec![p_prime.clone(), antipodal(p_double_prime)]);
            combined_checks(&mut checks, n, combined, activated, successor, rotation, algorithm, &visibility)?;
        }
    }
    Ok(checks.0)
}

fn lemma1_replacement(s_prime: &Configuration, p_prime: &Angle, target: &Angle) -> Configuration {
    Configuration::from_points(s_prime.locations().filter(|p| *p != p_prime).cloned().chain([target.clone()]))
        .expect("nonempty")
}

fn finish(mut cert: Certificate, algorithm: &dyn Algorithm) -> Result<Certificate, ImpossibilityError> {
    cert.checks = verify_certificate(&cert, algorithm)?;
    if let Some(failed) = cert.checks.iter().find(|c| !c.passed) {
        return Err(ImpossibilityError::VerificationFailed(failed.name.clone()));
    }
    Ok(cert)
}

pub(crate) fn build_frozen(
    algorithm: &dyn Algorithm,
    theta: &Angle,
    gamma: &Coefficients,
    perturbation: &Perturbation,
) -> Result<Certificate, ImpossibilityError> {
    let n = gamma.len();
    let cert = Certificate {
        algorithm: algorithm.name().to_string(),
        theta: theta.clone(),
        n,
        epsilon: epsilon(theta, n)?,
        sample: None,
        evidence: Evidence::Frozen {
            gamma: gamma.clone(),
            config: perturbation.configuration().clone(),
            decisions: vec![Angle::zero(); n],
        },
        checks: Vec::new(),
    };
    finish(cert, algorithm)
}

/// Certificate from a robot that moves to an unoccupied point of an
/// `epsilon`-perturbation.
pub fn build_lemma1_certificate(
    algorithm: &dyn Algorithm,
    theta: &Angle,
    n: usize,
    gamma: &Coefficients,
    mover: usize,
) -> Result<Certificate, ImpossibilityError> {
    let eps = epsilon(theta, n)?;
    let visibility = Visibility::limited(theta.clone()).expect("checked by epsilon");
    let sp = perturb(n, &eps, gamma)?;
    if mover >= n {
        return Err(ImpossibilityError::Lemma1Inapplicable(format!("no robot {mover}")));
    }
    let s_prime = sp.configuration().clone();
    let p_prime = sp.copy(mover).clone();
    let target = match absolute_target(algorithm, &s_prime, &p_prime, &visibility)? {
        None => return Err(ImpossibilityError::Lemma1Inapplicable("the robot stays".into())),
        Some(t) if s_prime.contains(&t) => {
            return Err(ImpossibilityError::Lemma1Inapplicable(format!("target {t} is occupied")))
        }
        Some(t) => t,
    };
    let s2 = lemma1_replacement(&s_prime, &p_prime, &target);
    let combined = d_combination(&s_prime, &s2, &p_prime)?;
    let activated = vec![p_prime.clone()];
    let successor = one_step(&combined, &activated, algorithm, &visibility)?;
    let cert = Certificate {
        algorithm: algorithm.name().to_string(),
        theta: theta.clone(),
        n,
        epsilon: eps,
        sample: None,
        evidence: Evidence::Lemma1 {
            gamma: gamma.clone(),
            mover,
            s_prime,
            p_prime,
            target,
            combined,
            activated,
            successor,
            rotation: Angle::half(),
        },
        checks: Vec::new(),
    };
    finish(cert, algorithm)
}

/// Certificate from two members of one bundle whose perturbed robot moves
/// onto the same occupied point.
pub fn build_lemma2_certificate(
    algorithm: &dyn Algorithm,
    theta: &Angle,
    n: usize,
    gamma1: &Coefficients,
    gamma2: &Coefficients,
    mover: usize,
) -> Result<Certificate, ImpossibilityError> {
    let inapplicable = |why: String| Err(ImpossibilityError::Lemma2Inapplicable(why));
    let eps = epsilon(theta, n)?;
    let visibility = Visibility::limited(theta.clone()).expect("checked by epsilon");
    if mover >= n {
        return inapplicable(format!("no robot {mover}"));
    }
    if !gamma1.i_related(gamma2, mover) || gamma1 == gamma2 {
        return inapplicable(format!("coefficients are not distinct members of bundle {mover}"));
    }
    let s1 = perturb(n, &eps, gamma1)?;
    let s2 = perturb(n, &eps, gamma2)?;
    let (p_prime, p_double_prime) = (s1.copy(mover).clone(), s2.copy(mover).clone());
    let t1 = absolute_target(algorithm, s1.configuration(), &p_prime, &visibility)?;
    let t2 = absolute_target(algorithm, s2.configuration(), &p_double_prime, &visibility)?;
    let target = match (t1, t2) {
        (Some(a), Some(b)) if a == b && s1.configuration().contains(&a) => a,
        (a, b) => return inapplicable(format!("targets {a:?} and {b:?} are not one occupied point")),
    };
    let center = Angle::new(mover as i64, n as i64);
    let combined = d_combination(s1.configuration(), s2.configuration(), &center)?;
    let activated = vec![p_prime.clone(), antipodal(&p_double_prime)];
    let successor = one_step(&combined, &activated, algorithm, &visibility)?;
    let cert = Certificate {
        algorithm: algorithm.name().to_string(),
        theta: theta.clone(),
        n,
        epsilon: eps,
        sample: None,
        evidence: Evidence::Lemma2 {
            gamma1: gamma1.clone(),
            gamma2: gamma2.clone(),
            mover,
            s_prime: s1.configuration().clone(),
            s_double_prime: s2.configuration().clone(),
            p_prime,
            p_double_prime,
            target,
            combined,
            activated,
            successor,
            rotation: Angle::half(),
        },
        checks: Vec::new(),
    };
    finish(cert, algorithm)
}
