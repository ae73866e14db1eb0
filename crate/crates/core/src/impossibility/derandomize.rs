use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ImpossibilityError;
use crate::geometry::{parse_rational, ratio};

/// Largest `|Z_n|` the inductive search will walk.
pub const MAX_GRID: u128 = 1 << 22;

pub type Point = Vec<BigRational>;

/// The grid `Z_n = Y_1 × … × Y_n` with `a_i = m^(2^(i-1))`,
/// `s_i = a_1 + … + a_i` and `Y_i = { j/s_n : s_(i-1) < j <= s_i }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerandGrid {
    m: u64,
    a: Vec<u64>,
    s: Vec<u64>,
}

impl DerandGrid {
    pub fn new(m: u64, n: usize) -> Result<Self, ImpossibilityError> {
        if m == 0 || n == 0 {
            return Err(ImpossibilityError::BadObstacles("m and n must be positive".into()));
        }
        let mut a = Vec::with_capacity(n);
        let mut s = vec![0u64];
        for i in 0..n {
            let ai = u32::try_from(1u64 << i.min(63))
                .ok()
                .and_then(|e| m.checked_pow(e))
                .ok_or(ImpossibilityError::GridTooLarge)?;
            let si = s[i].checked_add(ai).ok_or(ImpossibilityError::GridTooLarge)?;
            a.push(ai);
            s.push(si);
        }
        Ok(DerandGrid { m, a, s })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    /// Values of `Y_i`, ascending; `i` is 1-based.
    pub fn y(&self, i: usize) -> Vec<BigRational> {
        let sn = *self.s.last().expect("n >= 1") as i64;
        (self.s[i - 1] + 1..=self.s[i]).map(|j| ratio(j as i64, sn)).collect()
    }

    /// `|Z_n|`, if it fits.
    pub fn size(&self) -> Option<u128> {
        self.a.iter().try_fold(1u128, |acc, &x| acc.checked_mul(x as u128))
    }
}

fn validate(m: u64, n: usize, obstacles: &[Vec<Point>]) -> Result<Vec<BTreeSet<Point>>, ImpossibilityError> {
    if obstacles.len() != n {
        return Err(ImpossibilityError::BadObstacles(format!("expected {n} obstacle sets, got {}", obstacles.len())));
    }
    let (zero, one) = (BigRational::zero(), BigRational::one());
    let mut sets = Vec::with_capacity(n);
    for (axis, points) in obstacles.iter().enumerate() {
        let set: BTreeSet<Point> = points.iter().cloned().collect();
        let mut lines: BTreeMap<Point, u64> = BTreeMap::new();
        for p in &set {
            if p.len() != n || p.iter().any(|c| *c < zero || *c > one) {
                return Err(ImpossibilityError::BadObstacles(format!("point {p:?} is not in the unit {n}-cube")));
            }
            let mut key = p.clone();
            key.remove(axis);
            let count = lines.entry(key).or_insert(0);
            *count += 1;
            if *count >= m {
                return Err(ImpossibilityError::LineBoundExceeded { axis: axis + 1 });
            }
        }
        sets.push(set);
    }
    Ok(sets)
}

/// A point of `Z_n` lying in none of the obstacle sets, found by the
/// induction over prefixes: for every value `y` of the current axis the
/// shorter prefix yields some witness `z`; some witness repeats for at
/// least `m` values of `y`, and those `m` collinear points cannot all lie in
/// the current obstacle set.
///
/// `obstacles[i]` must meet every line parallel to axis `i + 1` in fewer
/// than `m` points.
pub fn derandomize(m: u64, n: usize, obstacles: &[Vec<Point>]) -> Result<Point, ImpossibilityError> {
    let sets = validate(m, n, obstacles)?;
    let grid = DerandGrid::new(m, n)?;
    match grid.size() {
        Some(size) if size <= MAX_GRID => {}
        _ => return Err(ImpossibilityError::GridTooLarge),
    }
    let ys: Vec<Vec<BigRational>> = (1..=n).map(|i| grid.y(i)).collect();
    witness(n, &[], &ys, &sets, m)
}

fn witness(
    i: usize,
    suffix: &[BigRational],
    ys: &[Vec<BigRational>],
    sets: &[BTreeSet<Point>],
    m: u64,
) -> Result<Point, ImpossibilityError> {
    let join = |z: &[BigRational], y: &BigRational| -> Point {
        z.iter().cloned().chain(std::iter::once(y.clone())).chain(suffix.iter().cloned()).collect()
    };
    if i == 1 {
        return ys[0]
            .iter()
            .find(|y| !sets[0].contains(&join(&[], y)))
            .map(|y| vec![y.clone()])
            .ok_or(ImpossibilityError::LineBoundExceeded { axis: 1 });
    }
    let mut by_witness: BTreeMap<Point, Vec<&BigRational>> = BTreeMap::new();
    for y in &ys[i - 1] {
        let tail: Vec<BigRational> = std::iter::once(y.clone()).chain(suffix.iter().cloned()).collect();
        by_witness.entry(witness(i - 1, &tail, ys, sets, m)?).or_default().push(y);
    }
    let (z, choices) = by_witness
        .iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0)))
        .expect("Y_i is nonempty");
    debug_assert!(choices.len() as u64 >= m);
    choices
        .iter()
        .find(|y| !sets[i - 1].contains(&join(z, y)))
        .map(|y| z.iter().cloned().chain(std::iter::once((*y).clone())).collect())
        .ok_or(ImpossibilityError::LineBoundExceeded { axis: i })
}

/// Parses obstacle files: one point per line, `AXIS c1 c2 … cn` with a
/// 1-based axis and `num/den` coordinates; `#` starts a comment.
pub fn parse_obstacles(text: &str, n: usize) -> Result<Vec<Vec<Point>>, ImpossibilityError> {
    let mut sets = vec![Vec::new(); n];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |why: &str| ImpossibilityError::BadObstacles(format!("line {}: {why}", lineno + 1));
        let mut fields = line.split_whitespace();
        let axis: usize = fields.next().and_then(|f| f.parse().ok()).ok_or_else(|| bad("missing axis"))?;
        if axis == 0 || axis > n {
            return Err(bad("axis out of range"));
        }
        let point = fields.map(parse_rational).collect::<Result<Point, _>>().map_err(|e| bad(&e.to_string()))?;
        if point.len() != n {
            return Err(bad("wrong number of coordinates"));
        }
        sets[axis - 1].push(point);
    }
    Ok(sets)
}
