//! Row/column label sequences and the order relations between them.
//!
//! Labels are 1-based at this surface; the matrix modules convert to 0-based
//! coordinates when they index entries.

use std::fmt;

use crate::error::{contract, Result};

/// A strictly increasing sequence of labels drawn from `{1, ..., n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSeq {
    labels: Vec<usize>,
    n: usize,
}

impl IndexSeq {
    pub fn new(labels: Vec<usize>, n: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(contract("label sequence must be nonempty"));
        }
        if labels[0] < 1 || labels[labels.len() - 1] > n {
            return Err(contract(format!("labels {labels:?} not within 1..={n}")));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(contract(format!("labels {labels:?} not strictly increasing")));
        }
        Ok(IndexSeq { labels, n })
    }

    /// `{start, start+1, ..., start+len-1}`.
    pub fn contiguous(start: usize, len: usize, n: usize) -> Result<Self> {
        Self::new((start..start + len).collect(), n)
    }

    pub fn full(n: usize) -> Self {
        IndexSeq { labels: (1..=n).collect(), n }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    /// `i_r - i_1 - (r - 1)`: the number of labels skipped between the ends.
    pub fn dispersion(&self) -> usize {
        self.labels[self.labels.len() - 1] - self.labels[0] - (self.labels.len() - 1)
    }

    pub fn is_contiguous(&self) -> bool {
        self.dispersion() == 0
    }

    /// Shift every label by `s`, clamping labels that would pass `n` to `n`.
    /// The clamped tail may repeat `n`, so the result is a plain vector.
    pub fn translate(&self, s: usize) -> Vec<usize> {
        self.labels.iter().map(|&i| (i + s).min(self.n)).collect()
    }

    /// 0-based coordinates of the labels.
    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter().map(|&i| i - 1)
    }

    /// Bit `i-1` set for each label `i`.
    pub fn mask(&self) -> u64 {
        self.labels.iter().fold(0u64, |m, &i| m | (1u64 << (i - 1)))
    }

    pub fn from_mask(mask: u64, n: usize) -> Self {
        let labels = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        IndexSeq { labels, n }
    }
}

impl fmt::Display for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.labels.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Componentwise order `a[k] <= b[k]` on label sequences of equal length.
pub fn seq_leq(a: &[usize], b: &[usize]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(contract(format!(
            "cannot compare sequences of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).all(|(x, y)| x <= y))
}

/// All `r`-element label sequences of `{1..n}` in lexicographic order.
pub fn sequences(n: usize, r: usize) -> Sequences {
    Sequences { n, current: if r <= n && r > 0 { Some((1..=r).collect()) } else { None } }
}

pub struct Sequences {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Sequences {
    type Item = IndexSeq;

    fn next(&mut self) -> Option<IndexSeq> {
        let current = self.current.take()?;
        let r = current.len();
        let mut next = current.clone();
        let mut k = r;
        while k > 0 {
            k -= 1;
            if next[k] < self.n - (r - 1 - k) {
                next[k] += 1;
                for m in k + 1..r {
                    next[m] = next[m - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(IndexSeq { labels: current, n: self.n })
    }
}
