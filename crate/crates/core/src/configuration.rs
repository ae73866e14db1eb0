//! Multisets of robot positions and the order-theoretic machinery on them:
//! angle sequences, truncation, lexicographic heads, rotational symmetry and
//! visibility graphs.
//!
//! A configuration is read clockwise starting from any one of its robots; the
//! resulting tuple of gaps is its angle sequence. All sequences of a
//! configuration are cyclic rotations of a single gap cycle, so symmetry
//! reduces to periodicity of that cycle and the head is the start of its
//! least rotation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::{angular_distance, antipodal, cw, Angle, AngleError, Visibility};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("configuration must contain at least one robot")]
    Empty,
    #[error("point unoccupied: {0}")]
    Unoccupied(Angle),
    #[error("occurrence index {index} out of range 1..={count} at {point}")]
    BadOccurrence { point: Angle, index: usize, count: usize },
    #[error("truncation point equals start")]
    TruncateAtStart,
    #[error("head undefined on symmetric configuration")]
    SymmetricHead,
    #[error("configuration has multiplicity points")]
    HasMultiplicity,
    #[error("denominator bound {bound} too small for {n} distinct angles (need >= {need})")]
    BoundTooSmall { n: usize, bound: u64, need: u64 },
    #[error("need at least {0} robots")]
    TooFew(usize),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Angle(#[from] AngleError),
}

/// Clockwise gap tuple read from one robot; always sums to one turn when
/// complete, shorter when truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleSequence {
    gaps: Vec<BigRational>,
}

impl AngleSequence {
    pub fn new(gaps: Vec<BigRational>) -> Self {
        AngleSequence { gaps }
    }

    pub fn gaps(&self) -> &[BigRational] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.gaps.iter().fold(BigRational::zero(), |acc, g| acc + g)
    }

    /// Truncation at the point lying `distance` clockwise of the start.
    ///
    /// Keeps whole gaps while their running sum stays below `distance`, then
    /// closes with the partial gap up to that point.
    pub fn truncated(&self, distance: &Angle) -> Result<AngleSequence, ConfigError> {
        if distance.is_zero() {
            return Err(ConfigError::TruncateAtStart);
        }
        let target = distance.turns();
        let mut prefix = BigRational::zero();
        let mut out = Vec::new();
        for gap in &self.gaps {
            let next = &prefix + gap;
            if &next >= target {
                out.push(target - &prefix);
                return Ok(AngleSequence::new(out));
            }
            out.push(gap.clone());
            prefix = next;
        }
        unreachable!("complete angle sequences sum to one turn")
    }

    /// Lexicographic order after padding the shorter side with zeros.
    pub fn lex_compare(&self, other: &AngleSequence) -> Ordering {
        let zero = BigRational::zero();
        let len = self.gaps.len().max(other.gaps.len());
        for i in 0..len {
            let x = self.gaps.get(i).unwrap_or(&zero);
            let y = other.gaps.get(i).unwrap_or(&zero);
            match x.cmp(y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// Start index of the lexicographically least rotation (Booth).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    let mut failure: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = failure[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = failure[i as usize];
        }
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            failure[j - k] = -1;
        } else {
            failure[j - k] = i + 1;
        }
    }
    k % n
}

/// Smallest `d` such that rotating the cycle by `d` leaves it unchanged.
pub fn cyclic_period<T: Eq>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut prefix = vec![0usize; n];
    for i in 1..n {
        let mut k = prefix[i - 1];
        while k > 0 && s[i] != s[k] {
            k = prefix[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        prefix[i] = k;
    }
    let p = n - prefix[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

/// A finite multiset of points on the circle.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    points: BTreeMap<Angle, usize>,
    n: usize,
}

impl Configuration {
    pub fn from_points<I: IntoIterator<Item = Angle>>(points: I) -> Result<Self, ConfigError> {
        Self::from_counts(points.into_iter().map(|p| (p, 1)))
    }

    pub fn from_counts<I: IntoIterator<Item = (Angle, usize)>>(counts: I) -> Result<Self, ConfigError> {
        let mut points = BTreeMap::new();
        let mut n = 0;
        for (p, c) in counts {
            if c == 0 {
                continue;
            }
            *points.entry(p).or_insert(0) += c;
            n += c;
        }
        if n == 0 {
            return Err(ConfigError::Empty);
        }
        Ok(Configuration { points, n })
    }

    /// The regular `n`-set with a vertex at angle zero.
    pub fn regular(n: usize) -> Self {
        assert!(n >= 1);
        Self::from_points((0..n).map(|i| Angle::new(i as i64, n as i64))).expect("n >= 1")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn distinct_len(&self) -> usize {
        self.points.len()
    }

    pub fn count(&self, p: &Angle) -> usize {
        self.points.get(p).copied().unwrap_or(0)
    }

    pub fn contains(&self, p: &Angle) -> bool {
        self.points.contains_key(p)
    }

    /// Occupied locations, ascending.
    pub fn locations(&self) -> impl Iterator<Item = &Angle> + '_ {
        self.points.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Angle, usize)> + '_ {
        self.points.iter().map(|(p, c)| (p, *c))
    }

    /// One entry per robot, ascending.
    pub fn expanded(&self) -> Vec<Angle> {
        self.points
            .iter()
            .flat_map(|(p, c)| std::iter::repeat_n(p.clone(), *c))
            .collect()
    }

    pub fn is_set(&self) -> bool {
        self.points.values().all(|&c| c == 1)
    }

    pub fn multiplicity_points(&self) -> impl Iterator<Item = &Angle> + '_ {
        self.points.iter().filter(|(_, c)| **c > 1).map(|(p, _)| p)
    }

    /// The single occupied location, if every robot coincides.
    pub fn gathered_point(&self) -> Option<&Angle> {
        if self.points.len() == 1 {
            self.points.keys().next()
        } else {
            None
        }
    }

    pub fn rotated(&self, by: &Angle) -> Self {
        Configuration {
            points: self.points.iter().map(|(p, c)| (p + by, *c)).collect(),
            n: self.n,
        }
    }

    pub fn with_point(&self, p: Angle) -> Self {
        let mut out = self.clone();
        *out.points.entry(p).or_insert(0) += 1;
        out.n += 1;
        out
    }

    /// Clockwise gaps between consecutive robots, starting at the first
    /// robot of the smallest location. Coincident robots contribute zeros.
    pub fn gap_cycle(&self) -> Vec<BigRational> {
        let pts = self.expanded();
        let n = pts.len();
        let mut gaps = Vec::with_capacity(n);
        let mut used = BigRational::zero();
        for i in 0..n - 1 {
            let g = pts[i + 1].turns() - pts[i].turns();
            used += &g;
            gaps.push(g);
        }
        gaps.push(BigRational::one() - used);
        gaps
    }

    fn first_index_of(&self, p: &Angle) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        Some(self.points.range(..p.clone()).map(|(_, c)| c).sum())
    }

    /// Angle sequence of the `occurrence`-th robot (1-based) located at `p`.
    pub fn angle_sequence(&self, p: &Angle, occurrence: usize) -> Result<AngleSequence, ConfigError> {
        let count = self.count(p);
        if count == 0 {
            return Err(ConfigError::Unoccupied(p.clone()));
        }
        if occurrence == 0 || occurrence > count {
            return Err(ConfigError::BadOccurrence { point: p.clone(), index: occurrence, count });
        }
        let n = self.n;
        if self.points.len() == 1 {
            let mut gaps = vec![BigRational::zero(); n];
            gaps[occurrence - 1] = BigRational::one();
            return Ok(AngleSequence::new(gaps));
        }
        let start = self.first_index_of(p).expect("occupied") + occurrence - 1;
        let cycle = self.gap_cycle();
        Ok(AngleSequence::new((0..n).map(|i| cycle[(start + i) % n].clone()).collect()))
    }

    /// Angle sequence of (the first robot at) `p`, truncated at `q`.
    pub fn truncated_sequence(&self, p: &Angle, q: &Angle) -> Result<AngleSequence, ConfigError> {
        if p == q {
            return Err(ConfigError::TruncateAtStart);
        }
        self.angle_sequence(p, 1)?.truncated(&cw(p, q))
    }

    /// Order of the rotation group preserving the multiset (1 when asymmetric).
    pub fn symmetry_order(&self) -> usize {
        if self.points.len() == 1 {
            return 1;
        }
        let cycle = self.gap_cycle();
        self.n / cyclic_period(&cycle)
    }

    pub fn is_rotationally_symmetric(&self) -> bool {
        self.symmetry_order() > 1
    }

    /// The location whose angle sequence is lexicographically smallest.
    pub fn head(&self) -> Result<Angle, ConfigError> {
        if self.is_rotationally_symmetric() {
            return Err(ConfigError::SymmetricHead);
        }
        if self.points.len() == 1 {
            return Ok(self.points.keys().next().expect("nonempty").clone());
        }
        let start = least_rotation(&self.gap_cycle());
        Ok(self.expanded().swap_remove(start))
    }

    /// Points whose antipodal point is unoccupied.
    pub fn unpaired_antipodals(&self) -> Vec<Angle> {
        self.points.keys().filter(|p| !self.contains(&antipodal(p))).cloned().collect()
    }

    /// True iff exactly two points lack antipodal partners (which forces
    /// asymmetry for sets).
    pub fn has_exactly_two_unpaired_antipodals(&self) -> Result<bool, ConfigError> {
        if !self.is_set() {
            return Err(ConfigError::HasMultiplicity);
        }
        Ok(self.unpaired_antipodals().len() == 2)
    }

    pub fn visibility_graph(&self, visibility: &Visibility) -> VisibilityGraph {
        VisibilityGraph::new(&self.expanded(), visibility)
    }

    /// Seeded set of `n` distinct angles `k/bound`, rejection-sampled until
    /// rotationally asymmetric.
    pub fn random_asymmetric(n: usize, seed: u64, bound: u64) -> Result<Self, ConfigError> {
        if n < 2 {
            return Err(ConfigError::TooFew(2));
        }
        let need = 4 * n as u64;
        if bound < need {
            return Err(ConfigError::BoundTooSmall { n, bound, need });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let picks = rand::seq::index::sample(&mut rng, bound as usize, n);
            let cfg = Self::from_points(picks.iter().map(|k| Angle::new(k as i64, bound as i64)))?;
            if !cfg.is_rotationally_symmetric() {
                return Ok(cfg);
            }
        }
    }

    /// Parses the line-oriented file format: one `num/den` per line, with
    /// an optional `xK` multiplicity suffix and `#` comments.
    pub fn parse_file(text: &str) -> Result<Self, ConfigError> {
        let mut counts = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            counts.push(parse_entry(line).map_err(|reason| ConfigError::Parse { line: i + 1, reason })?);
        }
        Self::from_counts(counts)
    }

    /// Parses a comma-separated inline list such as `0/1,1/10,2/5 x2`.
    pub fn parse_inline(text: &str) -> Result<Self, ConfigError> {
        let mut counts = Vec::new();
        for (i, item) in text.split(',').enumerate() {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            counts.push(parse_entry(item).map_err(|reason| ConfigError::Parse { line: i + 1, reason })?);
        }
        Self::from_counts(counts)
    }

    /// Entries in file-line form, ascending.
    pub fn entries(&self) -> Vec<String> {
        self.points
            .iter()
            .map(|(p, c)| if *c == 1 { p.to_string() } else { format!("{} x{}", p, c) })
            .collect()
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for e in self.entries() {
            out.push_str(&e);
            out.push('\n');
        }
        out
    }
}

fn parse_entry(entry: &str) -> Result<(Angle, usize), String> {
    let (angle, count) = match entry.find(['x', 'X']) {
        Some(pos) => {
            let k: usize = entry[pos + 1..]
                .trim()
                .parse()
                .map_err(|_| format!("bad multiplicity in {entry:?}"))?;
            if k == 0 {
                return Err(format!("zero multiplicity in {entry:?}"));
            }
            (entry[..pos].trim(), k)
        }
        None => (entry, 1),
    };
    let a: Angle = angle.parse().map_err(|e: AngleError| e.to_string())?;
    Ok((a, count))
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.entries().join(", "))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.entries().join(", "))
    }
}

impl FromStr for Configuration {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_inline(s)
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.entries().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<String>::deserialize(deserializer)?;
        let counts = entries
            .iter()
            .map(|e| parse_entry(e))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Configuration::from_counts(counts).map_err(serde::de::Error::custom)
    }
}

/// Mutual-visibility graph over robots in canonical (ascending, expanded)
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisibilityGraph {
    adjacency: Vec<Vec<bool>>,
}

impl VisibilityGraph {
    pub fn new(robots: &[Angle], visibility: &Visibility) -> Self {
        let n = robots.len();
        let mut adjacency = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let edge = match visibility {
                    Visibility::Full => true,
                    Visibility::Limited(theta) => angular_distance(&robots[i], &robots[j]) < *theta,
                };
                adjacency[i][j] = edge;
                adjacency[j][i] = edge;
            }
        }
        VisibilityGraph { adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|row| row.iter().filter(|e| **e).count()).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for (v, &edge) in self.adjacency[u].iter().enumerate() {
                if edge && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
