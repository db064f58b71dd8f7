//! Integer partitions of a weight into at most a given number of parts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-increasing sequence of positive integers. Trailing zeros are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition from parts, dropping zeros. Parts must be non-increasing.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        let mut parts = parts;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::domain("partition", format!("parts {parts:?} are not non-increasing")));
        }
        Ok(Partition(parts))
    }

    /// Sorts arbitrary parts into a partition.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of non-zero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Largest part, zero for the empty partition.
    pub fn first(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// True when `self` is dominated by `other` (same weight, partial sums no larger).
    pub fn dominated_by(&self, other: &Partition) -> bool {
        if self.weight() != other.weight() {
            return false;
        }
        let n = self.len().max(other.len());
        let (mut a, mut b) = (0u32, 0u32);
        for i in 0..n {
            a += self.part(i);
            b += other.part(i);
            if a > b {
                return false;
            }
        }
        true
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        if trimmed.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts = trimmed
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse { detail: format!("partition part {t:?}: {e}") }))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// All partitions of `k` with at most `max_parts` parts, in reverse lexicographic order
/// (so `(k)` comes first).
pub fn enumerate_partitions(k: u32, max_parts: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(k, k, max_parts, &mut current, &mut out);
    out
}

fn fill(remaining: u32, cap: u32, slots: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    if slots == 0 {
        return;
    }
    for part in (1..=cap.min(remaining)).rev() {
        current.push(part);
        fill(remaining - part, part, slots - 1, current, out);
        current.pop();
    }
}

/// Number of partitions of `k` into at most `max_parts` parts.
pub fn partition_count(k: u32, max_parts: usize) -> u64 {
    let k = k as usize;
    // table[j] = partitions of j into parts of size <= current bound; parts <= m is
    // conjugate to at most m parts.
    let mut table = vec![0u64; k + 1];
    table[0] = 1;
    for size in 1..=max_parts.min(k.max(1)) {
        for j in size..=k {
            table[j] += table[j - size];
        }
    }
    table[k]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn count_oracle(k: u32, max_part: u32, slots: usize) -> u64 {
        if k == 0 {
            return 1;
        }
        if slots == 0 || max_part == 0 {
            return 0;
        }
        (1..=max_part.min(k)).map(|p| count_oracle(k - p, p, slots - 1)).sum()
    }

    #[test]
    fn small_enumerations() {
        let p4: Vec<String> = enumerate_partitions(4, 4).iter().map(|p| p.to_string()).collect();
        assert_eq!(p4, ["(4)", "(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"]);
        assert_eq!(enumerate_partitions(4, 2).len(), 3);
        assert_eq!(enumerate_partitions(0, 3), vec![Partition::empty()]);
        assert_eq!(partition_count(30, 30), 5604);
        assert_eq!(partition_count(0, 0), 1);
    }

    #[test]
    fn parse_roundtrip() {
        let p: Partition = "(3,1,1)".parse().unwrap();
        assert_eq!(p.parts(), &[3, 1, 1]);
        assert!("(1,2)".parse::<Partition>().is_err());
        assert_eq!("()".parse::<Partition>().unwrap(), Partition::empty());
    }

    #[test]
    fn dominance() {
        let a: Partition = "(2,1,1)".parse().unwrap();
        let b: Partition = "(2,2)".parse().unwrap();
        assert!(a.dominated_by(&b));
        assert!(!b.dominated_by(&a));
    }

    proptest! {
        #[test]
        fn enumeration_is_complete_and_ordered(k in 0u32..18, m in 1usize..7) {
            let parts = enumerate_partitions(k, m);
            prop_assert_eq!(parts.len() as u64, count_oracle(k, k, m));
            prop_assert_eq!(parts.len() as u64, partition_count(k, m));
            for p in &parts {
                prop_assert_eq!(p.weight(), k);
                prop_assert!(p.len() <= m);
                prop_assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            }
            for w in parts.windows(2) {
                prop_assert!(w[0] > w[1]);
            }
        }
    }
}
