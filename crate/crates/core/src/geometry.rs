//! Exact points on the unit circle.
//!
//! Every angle is a rational fraction of a full turn, normalized into `[0, 1)`.
//! Clockwise is the direction of increasing turn parameter, so `cw(a, b)` is
//! simply `(b - a) mod 1`. Half a turn is the antipodal offset and a quarter
//! turn is the radius of an open semicircle.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("malformed rational {0:?}: expected \"num/den\"")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("angle {0} outside [0, 1) turn")]
    OutOfRange(String),
    #[error("visibility range {0} must satisfy 0 < theta <= 1/2 turn")]
    BadVisibility(String),
    #[error("arc half-width {0} must satisfy 0 < w <= 1/2 turn")]
    BadHalfWidth(String),
}

/// Parses `"num/den"` (or a bare integer) into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, AngleError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| AngleError::Malformed(s.to_string()))?;
    let den: BigInt = den.parse().map_err(|_| AngleError::Malformed(s.to_string()))?;
    if den.is_zero() {
        return Err(AngleError::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Formats a rational as `"num/den"` in lowest terms, `"0/1"` for zero.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Shorthand for a small exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A point on the circle, stored as a fraction of a turn in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(BigRational);

impl Angle {
    /// Reduces any rational modulo one turn.
    pub fn from_turns(value: BigRational) -> Self {
        let floor = value.floor();
        Angle(value - floor)
    }

    pub fn new(num: i64, den: i64) -> Self {
        Self::from_turns(ratio(num, den))
    }

    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn half() -> Self {
        Self::new(1, 2)
    }

    pub fn quarter() -> Self {
        Self::new(1, 4)
    }

    pub fn turns(&self) -> &BigRational {
        &self.0
    }

    pub fn into_turns(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Multiplies by an exact rational and renormalizes.
    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::from_turns(&self.0 * factor)
    }

    /// Moves this point clockwise by an arbitrary rational arc length.
    pub fn advance(&self, arc: &BigRational) -> Self {
        Self::from_turns(&self.0 + arc)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({})", self)
    }
}

impl FromStr for Angle {
    type Err = AngleError;

    /// Accepts exactly the values in `[0, 1)`; fractions need not be reduced.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let r = parse_rational(s)?;
        if r.is_negative() || r >= BigRational::one() {
            return Err(AngleError::OutOfRange(s.trim().to_string()));
        }
        Ok(Angle(r))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &Angle {
    type Output = Angle;
    fn add(self, rhs: &Angle) -> Angle {
        Angle::from_turns(&self.0 + &rhs.0)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        &self + &rhs
    }
}

impl Sub for &Angle {
    type Output = Angle;
    fn sub(self, rhs: &Angle) -> Angle {
        Angle::from_turns(&self.0 - &rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        &self - &rhs
    }
}

impl Neg for &Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::from_turns(-&self.0)
    }
}

/// Clockwise angle from `a` to `b`; zero when they coincide.
pub fn cw(a: &Angle, b: &Angle) -> Angle {
    b - a
}

/// Length of the shorter arc between `a` and `b`, in `[0, 1/2]`.
pub fn angular_distance(a: &Angle, b: &Angle) -> Angle {
    let forward = cw(a, b);
    let backward = cw(b, a);
    forward.min(backward)
}

pub fn antipodal(a: &Angle) -> Angle {
    a + &Angle::half()
}

/// Strict membership in the `theta`-neighborhood of `observer`.
pub fn in_theta_neighborhood(observer: &Angle, p: &Angle, theta: &Angle) -> bool {
    angular_distance(observer, p) < *theta
}

/// Open arc of points strictly closer than `half_width` to `center`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenArc {
    center: Angle,
    half_width: Angle,
}

impl OpenArc {
    pub fn new(center: Angle, half_width: Angle) -> Result<Self, AngleError> {
        if half_width.is_zero() || half_width > Angle::half() {
            return Err(AngleError::BadHalfWidth(half_width.to_string()));
        }
        Ok(OpenArc { center, half_width })
    }

    /// The open semicircle centered at `center` (quarter-turn radius).
    pub fn semicircle(center: Angle) -> Self {
        OpenArc { center, half_width: Angle::quarter() }
    }

    pub fn center(&self) -> &Angle {
        &self.center
    }

    pub fn half_width(&self) -> &Angle {
        &self.half_width
    }

    pub fn contains(&self, p: &Angle) -> bool {
        angular_distance(&self.center, p) < self.half_width
    }
}

/// How much of the circle a robot sees.
///
/// `Limited(theta)` is the open `theta`-neighborhood of the observer.
/// `Full` is the whole circle including the antipodal point; on the command
/// line and in trace headers it is written `1/1` (or `full`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Visibility {
    Limited(Angle),
    Full,
}

impl Visibility {
    pub fn limited(theta: Angle) -> Result<Self, AngleError> {
        if theta.is_zero() || theta > Angle::half() {
            return Err(AngleError::BadVisibility(theta.to_string()));
        }
        Ok(Visibility::Limited(theta))
    }

    /// Visibility range `pi`: everything but the antipodal point.
    pub fn half_circle() -> Self {
        Visibility::Limited(Angle::half())
    }

    pub fn theta(&self) -> Option<&Angle> {
        match self {
            Visibility::Limited(t) => Some(t),
            Visibility::Full => None,
        }
    }

    /// Whether a clockwise offset from the observer lies in the visible arc.
    pub fn sees_offset(&self, offset: &Angle) -> bool {
        match self {
            Visibility::Full => true,
            Visibility::Limited(theta) => in_theta_neighborhood(&Angle::zero(), offset, theta),
        }
    }

    pub fn sees(&self, observer: &Angle, p: &Angle) -> bool {
        self.sees_offset(&cw(observer, p))
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Visibility::Limited(theta) => write!(f, "{}", theta),
            Visibility::Full => f.write_str("1/1"),
        }
    }
}

impl FromStr for Visibility {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("full") {
            return Ok(Visibility::Full);
        }
        let r = parse_rational(s)?;
        if r == BigRational::one() {
            return Ok(Visibility::Full);
        }
        if !r.is_positive() || r > ratio(1, 2) {
            return Err(AngleError::BadVisibility(s.trim().to_string()));
        }
        Ok(Visibility::Limited(Angle(r)))
    }
}

impl Serialize for Visibility {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Visibility {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
