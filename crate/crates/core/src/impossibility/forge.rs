use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::certificate::{absolute_target, build_frozen, build_lemma1_certificate, build_lemma2_certificate, Certificate};
use super::compat::{epsilon, is_compatible};
use super::perturbation::{perturb, Coefficients};
use super::ImpossibilityError;
use crate::algorithm::Algorithm;
use crate::geometry::{ratio, Angle, Visibility};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForgeOptions {
    pub seed: u64,
    pub max_samples: usize,
    /// Coefficients are drawn from `k/denominator`, `0 <= k <= denominator`.
    pub denominator: u64,
}

impl Default for ForgeOptions {
    fn default() -> Self {
        ForgeOptions { seed: 0, max_samples: 100, denominator: 1000 }
    }
}

/// Searches seeded perturbations of the regular `n`-set for a verified
/// certificate that `algorithm` cannot gather at visibility `theta`.
///
/// A sample on which nobody moves is frozen. A robot moving to an empty
/// point yields a lemma 1 certificate. A robot moving onto another robot
/// has its coefficient redrawn up to `n` more times; since only `n - 1`
/// other robots exist, either some draw moves to an empty point, two draws
/// hit the same robot, or some draw stays.
pub fn forge(
    algorithm: &dyn Algorithm,
    theta: &Angle,
    n: usize,
    options: &ForgeOptions,
) -> Result<Certificate, ImpossibilityError> {
    if !is_compatible(n, theta)? {
        return Err(ImpossibilityError::Incompatible { n, theta: theta.clone() });
    }
    if (options.denominator as usize) < 2 * n {
        return Err(ImpossibilityError::DenominatorTooSmall(options.denominator));
    }
    let eps = epsilon(theta, n)?;
    let visibility = Visibility::limited(theta.clone()).expect("compatible theta");
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for sample in 1..=options.max_samples {
        let gamma = Coefficients::sample_distinct(n, options.denominator, &mut rng);
        let found = classify(algorithm, theta, n, &eps, &visibility, &gamma, options.denominator, &mut rng)?;
        if let Some(mut cert) = found {
            cert.sample = Some(sample);
            return Ok(cert);
        }
    }
    Err(ImpossibilityError::NoCertificate(options.max_samples))
}

#[allow(clippy::too_many_arguments)]
fn classify(
    algorithm: &dyn Algorithm,
    theta: &Angle,
    n: usize,
    eps: &Angle,
    visibility: &Visibility,
    gamma: &Coefficients,
    denominator: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Certificate>, ImpossibilityError> {
    let sp = perturb(n, eps, gamma)?;
    let mut movers = Vec::new();
    for i in 0..n {
        if let Some(t) = absolute_target(algorithm, sp.configuration(), sp.copy(i), visibility)? {
            movers.push((i, t));
        }
    }
    if movers.is_empty() {
        return build_frozen(algorithm, theta, gamma, &sp).map(Some);
    }
    for (i, target) in movers {
        if !sp.configuration().contains(&target) {
            return build_lemma1_certificate(algorithm, theta, n, gamma, i).map(Some);
        }
        let mut seen: BTreeMap<Angle, Coefficients> = BTreeMap::new();
        seen.insert(target, gamma.clone());
        let mut tried: Vec<u64> = Vec::new();
        for _ in 0..n {
            let value = loop {
                let k = rng.gen_range(0..=denominator);
                let v = ratio(k as i64, denominator as i64);
                if !tried.contains(&k) && !gamma.values().contains(&v) {
                    tried.push(k);
                    break v;
                }
            };
            let candidate = gamma.with(i, value)?;
            let s2 = perturb(n, eps, &candidate)?;
            match absolute_target(algorithm, s2.configuration(), s2.copy(i), visibility)? {
                None => {}
                Some(t) if !s2.configuration().contains(&t) => {
                    return build_lemma1_certificate(algorithm, theta, n, &candidate, i).map(Some);
                }
                Some(t) => {
                    if let Some(first) = seen.get(&t) {
                        return build_lemma2_certificate(algorithm, theta, n, first, &candidate, i).map(Some);
                    }
                    seen.insert(t, candidate);
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::Registry;

    fn run(name: &str) -> Certificate {
        let reg = Registry::any_visibility();
        forge(reg.get(name).unwrap().as_ref(), &Angle::quarter(), 6, &ForgeOptions::default()).unwrap()
    }

    #[test]
    fn stay_is_frozen_at_once() {
        let cert = run("stay");
        assert_eq!((cert.variant(), cert.sample), ("Frozen", Some(1)));
        assert!(cert.is_verified());
    }

    #[test]
    fn midpoint_gives_lemma1() {
        let cert = run("midpoint");
        assert_eq!(cert.variant(), "Lemma1");
        assert!(cert.sample.unwrap() <= 10);
    }

    #[test]
    fn nearest_gives_lemma2() {
        assert_eq!(run("nearest").variant(), "Lemma2");
    }

    #[test]
    fn listing1_is_certified() {
        assert!(run("listing1").is_verified());
    }

    #[test]
    fn rejects_incompatible_sizes() {
        let reg = Registry::with_builtins();
        let alg = reg.get("stay").unwrap();
        assert!(forge(alg.as_ref(), &Angle::quarter(), 4, &ForgeOptions::default()).is_err());
        assert!(forge(alg.as_ref(), &Angle::half(), 6, &ForgeOptions::default()).is_err());
    }
}
