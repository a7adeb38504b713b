use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered local dimensions of an N-partite product space.
///
/// Flat indices are row-major with party 0 the slowest digit, so
/// `|i>|j>` over dims `(d0, d1)` sits at `i * d1 + j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    dims: Vec<usize>,
}

impl HilbertSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("a space needs at least one party".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidParameter(format!("zero local dimension in {dims:?}")));
        }
        Ok(Self { dims })
    }

    /// `n` copies of `C^d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Place value of each party's digit in the flat index.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| {
                debug_assert!(i < d);
                acc * d + i
            })
    }

    /// Space of the listed parties, in the given order.
    pub fn subspace_of(&self, parties: &[usize]) -> HilbertSpace {
        HilbertSpace { dims: parties.iter().map(|&p| self.dims[p]).collect() }
    }

    pub fn tensor(&self, other: &HilbertSpace) -> HilbertSpace {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        HilbertSpace { dims }
    }

    /// For every flat index, the flat index of its `parties` digits within
    /// the subspace of those parties (ascending party order).
    pub fn projected_indices(&self, parties: &[usize]) -> Vec<usize> {
        let sub = self.subspace_of(parties);
        let sub_strides = sub.strides();
        let strides = self.strides();
        (0..self.total())
            .map(|i| {
                parties
                    .iter()
                    .zip(&sub_strides)
                    .map(|(&p, &s)| (i / strides[p]) % self.dims[p] * s)
                    .sum()
            })
            .collect()
    }

    /// For every flat index, the part of it carried by `parties`
    /// (the sum of their digit times stride).
    pub fn partial_offsets(&self, parties: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        (0..self.total())
            .map(|i| parties.iter().map(|&p| (i / strides[p]) % self.dims[p] * strides[p]).sum())
            .collect()
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| format!("C^{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A cut `K | K-bar` of an N-party system, stored canonically with party 0 in `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    n: usize,
    mask: u32,
}

/// Largest party count for which cuts can be enumerated.
pub const MAX_PARTIES: usize = 20;

impl Bipartition {
    /// Cut separating the 0-based `parties` from the rest. Either side may be
    /// given; the stored form always contains party 0.
    pub fn new(n: usize, parties: &[usize]) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(Error::CutOutOfRange(format!("{parties:?}"), n));
        }
        let mut mask = 0u32;
        for &p in parties {
            if p >= n {
                return Err(Error::CutOutOfRange(format!("{parties:?}"), n));
            }
            mask |= 1 << p;
        }
        let full = Self::full_mask(n);
        if mask == 0 || mask == full {
            return Err(Error::InvalidParameter(format!(
                "cut {parties:?} must be a nonempty proper subset of {n} parties"
            )));
        }
        if mask & 1 == 0 {
            mask = full & !mask;
        }
        Ok(Self { n, mask })
    }

    fn full_mask(n: usize) -> u32 {
        (1u32 << n) - 1
    }

    /// All `2^(n-1) - 1` distinct cuts, ordered by mask.
    pub fn all(n: usize) -> Result<Vec<Self>> {
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(Error::InvalidParameter(format!("cannot enumerate cuts for {n} parties")));
        }
        let full = Self::full_mask(n);
        Ok((0..(1u32 << (n - 1)))
            .map(|m| (m << 1) | 1)
            .filter(|&m| m != full)
            .map(|mask| Self { n, mask })
            .collect())
    }

    pub fn n_parties(&self) -> usize {
        self.n
    }

    pub fn contains(&self, party: usize) -> bool {
        party < self.n && self.mask & (1 << party) != 0
    }

    /// Parties of `K` (always includes 0), ascending.
    pub fn k_parties(&self) -> Vec<usize> {
        (0..self.n).filter(|&p| self.contains(p)).collect()
    }

    /// Parties of `K-bar`, ascending.
    pub fn kbar_parties(&self) -> Vec<usize> {
        (0..self.n).filter(|&p| !self.contains(p)).collect()
    }

    pub fn check_space(&self, space: &HilbertSpace) -> Result<()> {
        if space.n_parties() != self.n {
            return Err(Error::CutOutOfRange(self.to_string(), space.n_parties()));
        }
        Ok(())
    }
}

impl fmt::Display for Bipartition {
    /// One-based labels, e.g. `{1}|{2,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |ps: Vec<usize>| {
            ps.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(",")
        };
        write!(f, "{{{}}}|{{{}}}", show(self.k_parties()), show(self.kbar_parties()))
    }
}
