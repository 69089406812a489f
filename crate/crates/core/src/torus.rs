//! Geometry of the two-dimensional `n x n` torus.
//!
//! Positions double as vertex labels. Distances are the wrap-around
//! Manhattan metric, and the inverse-square normalizing factor is computed
//! by summing over distance rings instead of over all `n^2 - 1` vertices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side length of an `n x n` torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusSize(u32);

impl TorusSize {
    /// Largest side whose vertex count still fits a `u32` id.
    pub const MAX: u32 = 65_535;

    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::SizeTooSmall { n, min: 1 });
        }
        if n > Self::MAX {
            return Err(Error::SizeTooLarge(n));
        }
        Ok(TorusSize(n))
    }

    /// Like [`TorusSize::new`] but also enforces `n >= min`.
    pub fn at_least(n: u32, min: u32) -> Result<Self> {
        if n < min {
            return Err(Error::SizeTooSmall { n, min });
        }
        Self::new(n)
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn vertex_count(self) -> usize {
        (self.0 as usize) * (self.0 as usize)
    }

    /// Largest distance realized on this torus, `2 * floor(n / 2)`.
    #[inline]
    pub fn max_distance(self) -> u32 {
        2 * (self.0 / 2)
    }

    /// Reduces signed coordinates into `[0, n)^2`.
    #[inline]
    pub fn wrap(self, x: i64, y: i64) -> Position {
        let n = self.0 as i64;
        Position {
            x: x.rem_euclid(n) as u32,
            y: y.rem_euclid(n) as u32,
        }
    }

    /// Canonical vertex id `x * n + y`.
    #[inline]
    pub fn vertex_of(self, p: Position) -> u32 {
        p.x * self.0 + p.y
    }

    #[inline]
    pub fn position_of(self, id: u32) -> Position {
        Position {
            x: id / self.0,
            y: id % self.0,
        }
    }

    #[inline]
    pub fn contains(self, p: Position) -> bool {
        p.x < self.0 && p.y < self.0
    }
}

impl fmt::Display for TorusSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A point of `[0, n)^2`; also used as a vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub x: u32,
    pub y: u32,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: u32, y: u32) -> Self {
        Position { x, y }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[inline]
fn axis_distance(n: u32, a: u32, b: u32) -> u32 {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Wrap-around Manhattan distance between two vertices' positions.
#[inline]
pub fn torus_distance(n: TorusSize, u: Position, v: Position) -> u32 {
    axis_distance(n.0, u.x, v.x) + axis_distance(n.0, u.y, v.y)
}

/// The same metric evaluated on labels rather than on generator positions.
#[inline]
pub fn label_distance(n: TorusSize, p: Position, q: Position) -> u32 {
    axis_distance(n.0, p.x, q.x) + axis_distance(n.0, p.y, q.y)
}

/// Number of signed offsets `d` in one axis with `min(|d|, n - |d|) == k`.
#[inline]
fn axis_multiplicity(n: u32, k: u32) -> u32 {
    if k == 0 {
        1
    } else if 2 * k < n {
        2
    } else if 2 * k == n {
        1
    } else {
        0
    }
}

/// Number of vertices at distance exactly `i` from any fixed vertex.
///
/// Valid for `1 <= i <= n`; rings beyond the maximum distance are empty.
pub fn ring_size(n: TorusSize, i: u32) -> Result<u32> {
    if i == 0 || i > n.0 {
        return Err(Error::RingOutOfRange { n: n.0, i });
    }
    Ok(ring_size_unchecked(n, i))
}

pub(crate) fn ring_size_unchecked(n: TorusSize, i: u32) -> u32 {
    (0..=i)
        .map(|a| axis_multiplicity(n.0, a) * axis_multiplicity(n.0, i - a))
        .sum()
}

/// Signed offsets `(dx, dy)` at distance exactly `i` from the origin, one per
/// distinct torus position. Offsets use the representatives
/// `-(n-1)/2 ..= n/2`, so positions that coincide under wrap-around are only
/// produced once.
pub(crate) fn ring_offsets(n: TorusSize, i: u32) -> Vec<(i32, i32)> {
    let signs = |k: u32| -> &'static [i32] {
        if k == 0 || 2 * k == n.0 {
            &[1]
        } else {
            &[-1, 1]
        }
    };
    let mut out = Vec::new();
    for a in 0..=i {
        let b = i - a;
        if 2 * a > n.0 || 2 * b > n.0 {
            continue;
        }
        for &sx in signs(a) {
            for &sy in signs(b) {
                out.push((sx * a as i32, sy * b as i32));
            }
        }
    }
    out
}

/// All positions at distance `i` from `u`, sorted. Empty beyond the maximum
/// distance.
pub fn ring_members(n: TorusSize, u: Position, i: u32) -> Vec<Position> {
    if i == 0 {
        return vec![u];
    }
    let mut members: Vec<Position> = ring_offsets(n, i)
        .into_iter()
        .map(|(dx, dy)| n.wrap(u.x as i64 + dx as i64, u.y as i64 + dy as i64))
        .collect();
    members.sort_unstable();
    members
}

/// The inverse-square normalizing constant `Z` of a torus.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NormalizingFactor(f64);

impl NormalizingFactor {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Probability that a vertex picks a given target at distance `d`.
    #[inline]
    pub fn choice_probability(self, d: u32) -> f64 {
        self.0 / (d as f64 * d as f64)
    }
}

/// Exact `Z = (sum_{v != u} d_uv^-2)^-1`, summed ring by ring in O(n).
pub fn normalizing_factor(n: TorusSize) -> Result<NormalizingFactor> {
    if n.0 < 3 {
        return Err(Error::SizeTooSmall { n: n.0, min: 3 });
    }
    // smallest terms first
    let sum: f64 = (1..=n.max_distance())
        .rev()
        .map(|i| ring_size_unchecked(n, i) as f64 / (i as f64 * i as f64))
        .sum();
    Ok(NormalizingFactor(1.0 / sum))
}

/// Lower bound `(4 (ln n + 1))^-1` on `Z`.
pub fn z_lower_bound(n: TorusSize) -> f64 {
    1.0 / (4.0 * ((n.0 as f64).ln() + 1.0))
}

/// Upper bound `(4 ln(n / 2))^-1` on `Z`.
pub fn z_upper_bound(n: TorusSize) -> f64 {
    1.0 / (4.0 * (n.0 as f64 / 2.0).ln())
}

/// Componentwise `a + b (mod n)`.
#[inline]
pub fn label_add(n: TorusSize, a: Position, b: Position) -> Position {
    Position {
        x: (a.x + b.x) % n.0,
        y: (a.y + b.y) % n.0,
    }
}

/// Componentwise `a - b (mod n)`.
#[inline]
pub fn label_sub(n: TorusSize, a: Position, b: Position) -> Position {
    Position {
        x: (a.x + n.0 - b.x) % n.0,
        y: (a.y + n.0 - b.y) % n.0,
    }
}
