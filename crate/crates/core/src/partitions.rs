//! Integer partitions.
//!
//! A [`Partition`] stores only its positive parts, in non-increasing order.
//! Operations that need a fixed number of rows pad with zeros on demand
//! (see [`Partition::padded`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts given in non-increasing order.
    /// Trailing zeros are dropped; a zero followed by a positive part is an
    /// ordering violation.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if let Some(w) = parts.windows(2).find(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts must be non-increasing, found {} before {}",
                w[0], w[1]
            )));
        }
        let mut parts = parts;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The hook `(k, 1^{n-k})`.
    pub fn hook(n: usize, k: usize) -> Self {
        assert!(1 <= k && k <= n, "hook arm must lie in 1..=n");
        let mut parts = vec![k];
        parts.extend(std::iter::repeat_n(1, n - k));
        Self { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest part, 0 for the empty partition.
    pub fn first(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// The `i`-th part (0-based), 0 past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `λ'_j = #{k : λ_k ≥ j}`.
    pub fn conjugate(&self) -> Self {
        let parts = (1..=self.first())
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Self { parts }
    }

    /// True when every part is even (vacuously for the empty partition).
    pub fn is_even(&self) -> bool {
        self.parts.iter().all(|p| p % 2 == 0)
    }

    /// Every part multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Self {
        if factor == 0 {
            return Self::empty();
        }
        Self {
            parts: self.parts.iter().map(|p| p * factor).collect(),
        }
    }

    /// Parts padded with zeros to exactly `len` entries. Panics if the
    /// partition is longer than `len`.
    pub fn padded(&self, len: usize) -> Vec<usize> {
        assert!(self.len() <= len, "partition longer than requested padding");
        let mut v = self.parts.clone();
        v.resize(len, 0);
        v
    }
}

impl fmt::Display for Partition {
    /// Comma-separated parts; the empty partition prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for p in &self.parts {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `"4,2,2"`; the empty string and `"0"` both denote the empty
    /// partition. Whitespace around parts and surrounding parentheses are
    /// tolerated.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s)
            .trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let parts = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("cannot parse part {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Iterator over all partitions with weight, length and largest part bounded
/// above, in decreasing lexicographic order. The empty partition comes last.
///
/// Walks the tree of partitions in post-order: a node is emitted after all
/// of its extensions, siblings are visited by decrementing the last part.
#[derive(Debug, Clone)]
pub struct Partitions {
    max_weight: usize,
    max_length: usize,
    max_part: usize,
    current: Option<Vec<usize>>,
}

impl Partitions {
    fn extend_greedily(&self, parts: &mut Vec<usize>) {
        let mut remaining = self.max_weight - parts.iter().sum::<usize>();
        while parts.len() < self.max_length && remaining > 0 {
            let cap = parts.last().copied().unwrap_or(self.max_part);
            let next = cap.min(self.max_part).min(remaining);
            if next == 0 {
                break;
            }
            parts.push(next);
            remaining -= next;
        }
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let out = self.current.take()?;
        let mut succ = out.clone();
        self.current = match succ.last().copied() {
            None => None,
            Some(1) => {
                succ.pop();
                Some(succ)
            }
            Some(last) => {
                *succ.last_mut().expect("nonempty") = last - 1;
                self.extend_greedily(&mut succ);
                Some(succ)
            }
        };
        Some(Partition { parts: out })
    }
}

/// All partitions with `|λ| ≤ max_weight`, `ℓ(λ) ≤ max_length`,
/// `λ₁ ≤ max_part`, in decreasing lexicographic order.
pub fn enumerate(max_weight: usize, max_length: usize, max_part: usize) -> Partitions {
    let mut it = Partitions {
        max_weight,
        max_length,
        max_part,
        current: None,
    };
    let mut start = Vec::new();
    it.extend_greedily(&mut start);
    it.current = Some(start);
    it
}

/// Partitions of exactly `n`, in decreasing lexicographic order.
pub fn partitions_of(n: usize) -> impl Iterator<Item = Partition> {
    enumerate(n, n, n).filter(move |p| p.weight() == n)
}

/// The hook partitions `(k, 1^{n-k})` of `n` paired with the sign
/// `(-1)^{n-k}`, for `k = n` down to `1`.
pub fn hooks_of(n: usize) -> impl Iterator<Item = (Partition, i32)> {
    (1..=n).rev().map(move |k| {
        (
            Partition::hook(n, k),
            if (n - k).is_multiple_of(2) { 1 } else { -1 },
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    /// Euler's pentagonal recurrence for the partition numbers.
    fn partition_counts(n: usize) -> Vec<u64> {
        let mut counts = vec![0i64; n + 1];
        counts[0] = 1;
        for m in 1..=n {
            let mut acc = 0i64;
            for k in 1i64.. {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * counts[m - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    acc += sign * counts[m - g2];
                }
            }
            counts[m] = acc;
        }
        counts.into_iter().map(|c| c as u64).collect()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(p(&[4, 2]).weight(), 6);
        assert_eq!(Partition::empty().weight(), 0);
        assert_eq!(p(&[3, 1, 1]).weight(), 5);
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(p(&[2, 2]).conjugate(), p(&[2, 2]));
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
    }

    #[test]
    fn parity_examples() {
        assert!(p(&[4, 2, 2]).is_even());
        assert!(!p(&[2, 1]).is_even());
        assert!(Partition::empty().is_even());
    }

    #[test]
    fn rejects_increasing_parts() {
        assert!(matches!(
            Partition::new(vec![1, 2]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            Partition::new(vec![2, 0, 1]),
            Err(Error::InvalidPartition(_))
        ));
        assert!("1,3".parse::<Partition>().is_err());
        assert!("a".parse::<Partition>().is_err());
    }

    #[test]
    fn zeros_are_stripped() {
        assert_eq!(p(&[2, 0, 0]), p(&[2]));
        assert_eq!(p(&[0]), Partition::empty());
    }

    #[test]
    fn text_form() {
        assert_eq!("4,2,2".parse::<Partition>().unwrap(), p(&[4, 2, 2]));
        assert_eq!("".parse::<Partition>().unwrap(), Partition::empty());
        assert_eq!("0".parse::<Partition>().unwrap(), Partition::empty());
        assert_eq!("(3, 1)".parse::<Partition>().unwrap(), p(&[3, 1]));
        assert_eq!(p(&[4, 2, 2]).to_string(), "4,2,2");
        assert_eq!(Partition::empty().to_string(), "0");
    }

    #[test]
    fn enumerate_small_box() {
        let got: Vec<_> = enumerate(4, 2, 4).collect();
        let want = vec![
            p(&[4]),
            p(&[3, 1]),
            p(&[3]),
            p(&[2, 2]),
            p(&[2, 1]),
            p(&[2]),
            p(&[1, 1]),
            p(&[1]),
            Partition::empty(),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_degenerate_bounds() {
        assert_eq!(
            enumerate(0, 5, 5).collect::<Vec<_>>(),
            vec![Partition::empty()]
        );
        assert_eq!(
            enumerate(5, 0, 5).collect::<Vec<_>>(),
            vec![Partition::empty()]
        );
        assert_eq!(
            enumerate(5, 5, 0).collect::<Vec<_>>(),
            vec![Partition::empty()]
        );
        assert_eq!(
            enumerate(2, 1, 2).collect::<Vec<_>>(),
            vec![p(&[2]), p(&[1]), Partition::empty()]
        );
    }

    #[test]
    fn enumerate_counts_match_pentagonal_recurrence() {
        let counts = partition_counts(16);
        for w in 0..=16 {
            let expected: u64 = counts[..=w].iter().sum();
            assert_eq!(enumerate(w, w, w).count() as u64, expected, "w = {w}");
        }
        for n in 0..=12 {
            assert_eq!(partitions_of(n).count() as u64, counts[n]);
        }
    }

    #[test]
    fn enumerate_is_strictly_decreasing_and_within_bounds() {
        for (w, l, m) in [(7, 3, 4), (9, 9, 2), (6, 2, 6), (10, 4, 3)] {
            let all: Vec<_> = enumerate(w, l, m).collect();
            for pair in all.windows(2) {
                assert!(pair[0] > pair[1], "{} !> {}", pair[0], pair[1]);
            }
            for q in &all {
                assert!(q.weight() <= w && q.len() <= l && q.first() <= m);
            }
            // brute force: every sequence in the box
            let brute = brute_force_count(w, l, m);
            assert_eq!(all.len(), brute);
        }
    }

    fn brute_force_count(w: usize, l: usize, m: usize) -> usize {
        fn rec(rem: usize, slots: usize, cap: usize) -> usize {
            let mut total = 1;
            if slots == 0 {
                return total;
            }
            for part in 1..=cap.min(rem) {
                total += rec(rem - part, slots - 1, part);
            }
            total
        }
        rec(w, l, m)
    }

    #[test]
    fn hooks_examples() {
        assert_eq!(
            hooks_of(2).collect::<Vec<_>>(),
            vec![(p(&[2]), 1), (p(&[1, 1]), -1)]
        );
        assert_eq!(hooks_of(1).collect::<Vec<_>>(), vec![(p(&[1]), 1)]);
        assert_eq!(
            hooks_of(4).collect::<Vec<_>>(),
            vec![
                (p(&[4]), 1),
                (p(&[3, 1]), -1),
                (p(&[2, 1, 1]), 1),
                (p(&[1, 1, 1, 1]), -1)
            ]
        );
    }

    #[test]
    fn hooks_shape() {
        for n in 1..=10 {
            let hooks: Vec<_> = hooks_of(n).collect();
            assert_eq!(hooks.len(), n);
            for (h, _) in hooks {
                assert_eq!(h.weight(), n);
                assert!(h.part(1) <= 1);
            }
        }
    }

    #[test]
    fn serde_uses_text_form() {
        let json = serde_json::to_string(&p(&[4, 2])).unwrap();
        assert_eq!(json, "\"4,2\"");
        let back: Partition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p(&[4, 2]));
    }

    proptest! {
        #[test]
        fn conjugate_is_weight_preserving_involution(raw in proptest::collection::vec(0usize..=12, 0..8)) {
            let mut parts = raw;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let lam = Partition::new(parts).unwrap();
            prop_assume!(lam.weight() <= 12);
            let c = lam.conjugate();
            prop_assert_eq!(c.weight(), lam.weight());
            prop_assert_eq!(c.conjugate(), lam.clone());
            prop_assert_eq!(c.len(), lam.first());
        }

        #[test]
        fn text_round_trip(raw in proptest::collection::vec(0usize..=20, 0..10)) {
            let mut parts = raw;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let lam = Partition::new(parts).unwrap();
            prop_assert_eq!(lam.to_string().parse::<Partition>().unwrap(), lam);
        }
    }
}
