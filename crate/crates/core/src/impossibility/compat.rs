use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::ImpossibilityError;
use crate::geometry::{ratio, Angle};

pub(crate) fn check_theta(theta: &Angle) -> Result<(), ImpossibilityError> {
    if theta.is_zero() || *theta > Angle::quarter() {
        return Err(ImpossibilityError::ThetaOutOfRange(theta.clone()));
    }
    Ok(())
}

/// Whether the regular `n`-set admits the perturbation arguments at
/// visibility `theta`:
///
/// 1. every open semicircle centered at a point holds exactly `n/2` points;
/// 2. no two points are exactly `theta` apart;
/// 3. some two distinct points are less than `theta` apart.
///
/// The regular set is invariant under rotation by `1/n`, so every pairwise
/// distance is `min(k, n-k)/n` for some `k` and it suffices to look from the
/// vertex at zero.
pub fn is_compatible(n: usize, theta: &Angle) -> Result<bool, ImpossibilityError> {
    check_theta(theta)?;
    if n < 2 {
        return Ok(false);
    }
    let in_semicircle = (0..n).filter(|&k| 4 * k.min(n - k) < n).count();
    let semicircle_half = 2 * in_semicircle == n;
    let num = theta.turns().numer();
    let den = theta.turns().denom();
    let never_exactly_theta = !(1..=n / 2).any(|a| BigInt::from(a) * den == BigInt::from(n) * num);
    let some_pair_closer = ratio(1, n as i64) < *theta.turns();
    Ok(semicircle_half && never_exactly_theta && some_pair_closer)
}

/// Smallest compatible size at least `n_min`. Only sizes of the form
/// `4k+2` can satisfy the semicircle condition, so only those are scanned.
pub fn find_compatible(theta: &Angle, n_min: usize) -> Result<usize, ImpossibilityError> {
    check_theta(theta)?;
    let mut n = n_min.max(2);
    n += (4 + 2 - n % 4) % 4;
    while !is_compatible(n, theta)? {
        n += 4;
    }
    Ok(n)
}

/// Half the distance from `theta` to the nearest multiple of `1/n`.
pub fn epsilon(theta: &Angle, n: usize) -> Result<Angle, ImpossibilityError> {
    if !is_compatible(n, theta)? {
        return Err(ImpossibilityError::Incompatible { n, theta: theta.clone() });
    }
    let delta = (0..=n)
        .map(|a| (theta.turns() - ratio(a as i64, n as i64)).abs())
        .min()
        .expect("n >= 2");
    let eps: BigRational = delta / BigRational::from_integer(2.into());
    debug_assert!(!eps.is_zero() && eps <= ratio(1, 4 * n as i64));
    Ok(Angle::from_turns(eps))
}
