//! The integer lattice `X = {x ∈ Zⁿ : 0 ≤ xᵢ ≤ m−1}`, supports, and
//! support-restricted sublattices `X_S`.
//!
//! Every function and distribution in this crate is stored densely as a
//! vector of length `mⁿ`, indexed by a fixed bijection between lattice
//! points and `0..mⁿ`. The bijection is little-endian mixed radix:
//!
//! ```text
//! index(x) = Σᵢ xᵢ · mⁱ
//! ```
//!
//! and is frozen so that on-disk formats stay stable.

use crate::error::{Error, Result};

/// Default cap on the dense representation size `mⁿ`.
pub const DEFAULT_MAX_POINTS: usize = 1 << 24;

/// Environment variable overriding [`DEFAULT_MAX_POINTS`].
pub const MAX_POINTS_ENV: &str = "SDIST_MAX_POINTS";

fn max_points() -> usize {
    std::env::var(MAX_POINTS_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_POINTS)
}

/// The discrete domain: `n` dimensions, each taking `m` states `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeDomain {
    n: usize,
    m: usize,
    num_points: usize,
}

impl LatticeDomain {
    /// Builds the domain, rejecting anything whose dense representation
    /// `mⁿ` would exceed the configured point cap.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("n and m must be at least 1"));
        }
        let cap = max_points();
        let mut num_points: usize = 1;
        for _ in 0..n {
            num_points = num_points
                .checked_mul(m)
                .filter(|&p| p <= cap)
                .ok_or(Error::DomainTooLarge { n, m, cap })?;
        }
        Ok(Self { n, m, num_points })
    }

    pub fn dims(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> usize {
        self.m
    }

    /// Total number of lattice points, `mⁿ`.
    pub fn num_points(&self) -> usize {
        self.num_points
    }

    /// Point → flat index under the little-endian mixed-radix bijection.
    pub fn rank(&self, point: &Point) -> Result<usize> {
        if point.coords.len() != self.n {
            return Err(Error::DimensionMismatch {
                got: point.coords.len(),
                expected: self.n,
            });
        }
        let mut index = 0usize;
        let mut stride = 1usize;
        for (dim, &value) in point.coords.iter().enumerate() {
            if value as usize >= self.m {
                return Err(Error::CoordinateOutOfRange {
                    dim,
                    value,
                    states: self.m,
                });
            }
            index += value as usize * stride;
            if dim + 1 < self.n {
                stride *= self.m;
            }
        }
        Ok(index)
    }

    /// Flat index → point; inverse of [`rank`](Self::rank).
    pub fn unrank(&self, index: usize) -> Result<Point> {
        if index >= self.num_points {
            return Err(Error::IndexOutOfRange {
                index,
                points: self.num_points,
            });
        }
        let mut coords = Vec::with_capacity(self.n);
        let mut rest = index;
        for _ in 0..self.n {
            coords.push((rest % self.m) as u32);
            rest /= self.m;
        }
        Ok(Point { coords })
    }

    /// Iterates all points in ascending flat-index order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.num_points).map(|i| self.unrank(i).expect("index in range"))
    }

    fn check_support(&self, support: &Support) -> Result<()> {
        if let Some(&last) = support.indices.last()
            && last >= self.n
        {
            return Err(Error::SupportOutOfRange {
                index: last,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Number of points in the restricted sublattice `X_S`, i.e. `m^|S|`.
    pub fn restricted_size(&self, support: &Support) -> Result<usize> {
        self.check_support(support)?;
        // |S| ≤ n, so m^|S| ≤ mⁿ and cannot overflow.
        Ok(self.m.pow(support.len() as u32))
    }

    /// Flat indices of every point whose support is contained in `S`,
    /// ascending. `S = ∅` yields just the origin.
    pub fn restricted_indices(&self, support: &Support) -> Result<Vec<usize>> {
        let count = self.restricted_size(support)?;
        let strides: Vec<usize> = support
            .indices
            .iter()
            .map(|&dim| self.m.pow(dim as u32))
            .collect();
        let mut out = Vec::with_capacity(count);
        let mut digits = vec![0usize; strides.len()];
        let mut current = 0usize;
        'outer: loop {
            out.push(current);
            let mut d = 0;
            loop {
                if d == strides.len() {
                    break 'outer;
                }
                if digits[d] + 1 < self.m {
                    digits[d] += 1;
                    current += strides[d];
                    break;
                }
                current -= (self.m - 1) * strides[d];
                digits[d] = 0;
                d += 1;
            }
        }
        Ok(out)
    }

    /// The points of `X_S` in ascending flat-index order.
    pub fn restricted_points(&self, support: &Support) -> Result<Vec<Point>> {
        self.restricted_indices(support)?
            .into_iter()
            .map(|i| self.unrank(i))
            .collect()
    }
}

/// A lattice point: one coordinate per dimension, each in `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<u32>,
}

impl Point {
    pub fn new(coords: Vec<u32>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    /// The set of dimensions with a non-zero coordinate.
    pub fn support(&self) -> Support {
        Support {
            indices: self
                .coords
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0)
                .map(|(i, _)| i)
                .collect(),
        }
    }
}

impl From<&[u32]> for Point {
    fn from(coords: &[u32]) -> Self {
        Self::new(coords.to_vec())
    }
}

/// A subset of dimensions, stored as strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Support {
    indices: Vec<usize>,
}

impl Support {
    /// Sorts the given indices; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateSupportIndex { index: pair[0] });
            }
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &Support) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    /// This support plus one extra dimension (which must not be present).
    pub fn with(&self, index: usize) -> Result<Support> {
        if self.contains(index) {
            return Err(Error::DuplicateSupportIndex { index });
        }
        let mut indices = self.indices.clone();
        let pos = indices.partition_point(|&i| i < index);
        indices.insert(pos, index);
        Ok(Support { indices })
    }
}

impl std::fmt::Display for Support {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.indices.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
