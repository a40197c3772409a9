//! Query-counted, memoizing label oracles.
//!
//! `distinct_queries` (the cache size) is the budgeted metric throughout;
//! `total_calls` is kept for diagnostics. Repeat queries are free.

use std::collections::{HashMap, HashSet};

/// Anything the learners can query for labels. Element ids are those of the
/// instance the caller is working against; `Remapped` translates between id
/// spaces while sharing the underlying cache and counters.
pub trait LabelSource {
    fn query(&mut self, x: usize) -> bool;
    /// Number of distinct elements queried so far on the underlying oracle.
    fn distinct_queries(&self) -> usize;
}

/// The root oracle over a fixed truth vector, with optional corruption: the
/// returned bit is `truth[x] XOR flipped.contains(x)`.
#[derive(Debug, Clone)]
pub struct LabelOracle {
    truth: Vec<bool>,
    corruption: Option<HashSet<usize>>,
    cache: HashMap<usize, bool>,
    total_calls: u64,
}

impl LabelOracle {
    pub fn new(truth: Vec<bool>) -> Self {
        Self { truth, corruption: None, cache: HashMap::new(), total_calls: 0 }
    }

    pub fn with_corruption(truth: Vec<bool>, flipped: HashSet<usize>) -> Self {
        Self { truth, corruption: Some(flipped), cache: HashMap::new(), total_calls: 0 }
    }

    pub fn n(&self) -> usize {
        self.truth.len()
    }

    pub fn total_calls(&self) -> u64 {
        self.total_calls
    }

    /// Bits observed so far (element id -> returned bit).
    pub fn observed(&self) -> &HashMap<usize, bool> {
        &self.cache
    }

    /// The effective labeling the oracle answers with (truth XOR corruption).
    /// Test and harness helper; learners never call this.
    pub fn effective_labeling(&self) -> Vec<bool> {
        (0..self.truth.len())
            .map(|x| self.truth[x] ^ self.is_flipped(x))
            .collect()
    }

    fn is_flipped(&self, x: usize) -> bool {
        self.corruption.as_ref().is_some_and(|c| c.contains(&x))
    }
}

impl LabelSource for LabelOracle {
    fn query(&mut self, x: usize) -> bool {
        self.total_calls += 1;
        if let Some(&b) = self.cache.get(&x) {
            return b;
        }
        let b = self.truth[x] ^ self.is_flipped(x);
        self.cache.insert(x, b);
        b
    }

    fn distinct_queries(&self) -> usize {
        self.cache.len()
    }
}

/// A view of an oracle through an id remap (restricted id -> parent id).
pub struct Remapped<'a, L: LabelSource> {
    inner: &'a mut L,
    map: &'a [usize],
}

impl<'a, L: LabelSource> Remapped<'a, L> {
    pub fn new(inner: &'a mut L, map: &'a [usize]) -> Self {
        Self { inner, map }
    }
}

impl<L: LabelSource> LabelSource for Remapped<'_, L> {
    fn query(&mut self, x: usize) -> bool {
        self.inner.query(self.map[x])
    }

    fn distinct_queries(&self) -> usize {
        self.inner.distinct_queries()
    }
}
