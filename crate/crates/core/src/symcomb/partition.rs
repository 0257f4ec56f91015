//! Integer partitions stored as weakly decreasing part lists.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SymError;

/// A multiset of positive integers, parts sorted in decreasing order.
///
/// The derived ordering compares part lists lexicographically, so sorting a
/// list of partitions of the same weight and reversing it gives the usual
/// reverse-lexicographic enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self, SymError> {
        if parts.contains(&0) {
            return Err(SymError::ZeroPart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Partition from per-size counts `(size, multiplicity)`.
    pub fn from_multiplicities(mults: &BTreeMap<u32, usize>) -> Self {
        let mut parts = Vec::new();
        for (&size, &m) in mults.iter().rev() {
            parts.extend(std::iter::repeat_n(size, m));
        }
        Self(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_part(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn multiplicities(&self) -> BTreeMap<u32, usize> {
        let mut m = BTreeMap::new();
        for &x in &self.0 {
            *m.entry(x).or_insert(0) += 1;
        }
        m
    }

    /// Every part multiplied by `k` (`{3,1}` -> `{6,2}` for `k = 2`).
    pub fn multiply_parts(&self, k: u32) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    /// Every part repeated `k` times (`{3,1}` -> `{3,3,1,1}` for `k = 2`).
    pub fn repeat_parts(&self, k: u32) -> Self {
        let mut parts = Vec::with_capacity(self.0.len() * k as usize);
        for &x in &self.0 {
            parts.extend(std::iter::repeat_n(x, k as usize));
        }
        Self(parts)
    }

    /// Multiset union.
    pub fn union(&self, other: &Partition) -> Self {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    /// Multiset containment.
    pub fn contains(&self, other: &Partition) -> bool {
        let mine = self.multiplicities();
        other
            .multiplicities()
            .iter()
            .all(|(k, m)| mine.get(k).copied().unwrap_or(0) >= *m)
    }

    /// Add `part` to the multiset.
    pub fn with_part(&self, part: u32) -> Self {
        let mut parts = self.0.clone();
        let at = parts.partition_point(|&x| x >= part);
        parts.insert(at, part);
        Self(parts)
    }

    /// Remove one copy of `part`, if present.
    pub fn without_part(&self, part: u32) -> Option<Self> {
        let at = self.0.iter().position(|&x| x == part)?;
        let mut parts = self.0.clone();
        parts.remove(at);
        Some(Self(parts))
    }

    /// gcd of the parts (0 for the empty partition).
    pub fn parts_gcd(&self) -> u32 {
        self.0.iter().fold(0, |g, &x| num_integer::gcd(g, x))
    }

    /// gcd of the multiplicities (0 for the empty partition).
    pub fn multiplicity_gcd(&self) -> usize {
        self.multiplicities().values().fold(0, |g, &m| num_integer::gcd(g, m))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = SymError;
    fn try_from(v: Vec<u32>) -> Result<Self, SymError> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = SymError;

    /// Accepts `3,1`, `[3,1]`, `{3,1}` or `3 1`.
    fn from_str(s: &str) -> Result<Self, SymError> {
        let inner = s.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
        let parts: Result<Vec<u32>, _> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>())
            .collect();
        let parts = parts.map_err(|e| SymError::BadPartition(format!("{s:?}: {e}")))?;
        Partition::new(parts)
    }
}

/// How [`scale_partition`] enlarges a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMode {
    /// `p^j·λ`: multiply each part.
    MultiplyParts,
    /// `p^j * λ`: repeat each part.
    RepeatParts,
}

pub fn scale_partition(lambda: &Partition, k: u32, mode: ScaleMode) -> Partition {
    match mode {
        ScaleMode::MultiplyParts => lambda.multiply_parts(k),
        ScaleMode::RepeatParts => lambda.repeat_parts(k),
    }
}

/// Partitions of `w` with parts at most `max_part` and, optionally, exactly
/// `num_parts` parts, in reverse-lexicographic order (`{4}` first). `w = 0`
/// yields the empty partition only.
pub fn partitions_of(w: u32, max_part: Option<u32>, num_parts: Option<usize>) -> Vec<Partition> {
    fn go(
        rest: u32,
        cap: u32,
        slots: Option<usize>,
        cur: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if rest == 0 {
            if slots.is_none_or(|s| s == 0) {
                out.push(Partition(cur.clone()));
            }
            return;
        }
        if slots == Some(0) {
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            if let Some(s) = slots {
                // the remaining s - 1 parts are each at most `first`
                if (first as u64) * (s as u64) < rest as u64 {
                    break;
                }
            }
            cur.push(first);
            go(rest - first, first, slots.map(|s| s - 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(w, max_part.unwrap_or(w), num_parts, &mut Vec::new(), &mut out);
    out
}
