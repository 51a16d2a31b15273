//! The lexicographically ordered list `Q(k, n)` of strictly increasing
//! k-tuples drawn from `{1, ..., n}`.
//!
//! Tuple entries are 1-based (matrix index convention), ranks are 0-based
//! (array storage convention).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Binomial coefficient, `0` when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// A strictly increasing tuple of 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KTuple(Vec<usize>);

impl KTuple {
    /// Validates that `entries` is strictly increasing and within `1..=n`.
    pub fn new(entries: Vec<usize>, n: usize) -> Result<Self> {
        let ok = !entries.is_empty()
            && entries.len() <= n
            && entries.iter().all(|&e| e >= 1 && e <= n)
            && entries.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(Self(entries))
        } else {
            Err(Error::NotAMember {
                k: entries.len(),
                tuple: entries,
                n,
            })
        }
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based positions, ready for array indexing.
    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&e| e - 1)
    }
}

impl fmt::Display for KTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// The materialized list `Q(k, n)` and its inverse rank map.
#[derive(Debug, Clone)]
pub struct KIndexer {
    n: usize,
    k: usize,
    tuples: Vec<KTuple>,
    ranks: HashMap<KTuple, usize>,
}

impl KIndexer {
    /// Enumerates `Q(k, n)` in lexicographic order.
    pub fn enumerate(n: usize, k: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(Error::InvalidOrder { k, n });
        }
        let mut tuples = Vec::with_capacity(binomial(n, k));
        let mut cur: Vec<usize> = (1..=k).collect();
        loop {
            tuples.push(KTuple(cur.clone()));
            // rightmost position that can still be incremented
            let Some(pos) = (0..k).rev().find(|&i| cur[i] < n - (k - 1 - i)) else {
                break;
            };
            cur[pos] += 1;
            for i in pos + 1..k {
                cur[i] = cur[i - 1] + 1;
            }
        }
        let ranks = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Self {
            n,
            k,
            tuples,
            ranks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[KTuple] {
        &self.tuples
    }

    /// The `i`-th tuple (0-based).
    pub fn tuple(&self, i: usize) -> &KTuple {
        &self.tuples[i]
    }

    /// Position of `t` in `Q(k, n)`.
    pub fn rank(&self, t: &KTuple) -> Result<usize> {
        self.ranks.get(t).copied().ok_or_else(|| Error::NotAMember {
            tuple: t.0.clone(),
            k: self.k,
            n: self.n,
        })
    }

    /// Rank lookup from raw entries, validating them first.
    pub fn rank_of(&self, entries: &[usize]) -> Result<usize> {
        let t = KTuple::new(entries.to_vec(), self.n)?;
        self.rank(&t)
    }
}
