//! The sorted table of `(x, F(x))` pairs and the policies for choosing the
//! subset it is built from.

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::oracle::Oracle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("subset size k = {k} must be in 1..={n}")]
    SubsetSize { n: usize, k: usize },
    #[error("k = {k} exceeds half the codomain size {codomain}")]
    TooManyDistinctImages { k: usize, codomain: usize },
    #[error("found only {found} of {k} distinct images after {candidates} candidates")]
    SelectionExhausted {
        k: usize,
        found: usize,
        candidates: u64,
    },
}

/// Default cap on candidate evaluations for distinct-image selection.
pub fn default_try_cap(k: usize) -> u64 {
    20 * k as u64
}

fn check_subset(n: usize, k: usize) -> Result<(), TableError> {
    if k == 0 || k > n {
        Err(TableError::SubsetSize { n, k })
    } else {
        Ok(())
    }
}

/// The fixed "arbitrary" subset `{0, .., k-1}`.
pub fn choose_subset_arbitrary(n: usize, k: usize) -> Result<Vec<usize>, TableError> {
    check_subset(n, k)?;
    Ok((0..k).collect())
}

/// A uniformly random `k`-subset of `{0..n-1}`, returned in ascending order.
pub fn choose_subset_random<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>, TableError> {
    check_subset(n, k)?;
    let mut subset = index::sample(rng, n, k).into_vec();
    subset.sort_unstable();
    Ok(subset)
}

/// Result of sampling `k` domain elements with pairwise distinct images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctSelection {
    /// Accepted `(x, f(x))` pairs, in draw order.
    pub pairs: Vec<(usize, usize)>,
    /// Oracle evaluations spent, accepted and rejected candidates alike.
    pub candidates: u64,
}

/// Draws random elements until `k` of them have distinct images under `f`.
///
/// An element that was already drawn is skipped without evaluating it again.
/// Fails once `try_cap` candidates have been evaluated.
pub fn choose_subset_distinct_images<O, R>(
    f: &O,
    k: usize,
    rng: &mut R,
    try_cap: u64,
) -> Result<DistinctSelection, TableError>
where
    O: Oracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = f.domain_size();
    check_subset(n, k)?;
    let codomain = f.codomain_size();
    if 2 * k > codomain {
        return Err(TableError::TooManyDistinctImages { k, codomain });
    }

    let mut seen = HashSet::with_capacity(2 * k);
    let mut images = HashSet::with_capacity(k);
    let mut pairs = Vec::with_capacity(k);
    let mut candidates = 0u64;
    while pairs.len() < k {
        if candidates >= try_cap || seen.len() == n {
            return Err(TableError::SelectionExhausted {
                k,
                found: pairs.len(),
                candidates,
            });
        }
        let x = rng.gen_range(0..n);
        if !seen.insert(x) {
            continue;
        }
        candidates += 1;
        let y = f.eval(x);
        if images.insert(y) {
            pairs.push((x, y));
        }
    }
    Ok(DistinctSelection { pairs, candidates })
}

/// Table of `(x, y)` pairs sorted by `y`, ties broken by `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    entries: Vec<(usize, usize)>,
}

impl PairTable {
    /// Builds a table from pairs that were already evaluated. Costs nothing.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut entries: Vec<(usize, usize)> = pairs.into_iter().collect();
        entries.sort_unstable_by_key(|&(x, y)| (y, x));
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in sorted order.
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    /// First adjacent pair sharing an image: lowest image value, then lowest `x`.
    pub fn find_internal_collision(&self) -> Option<(usize, usize)> {
        self.entries
            .windows(2)
            .find(|w| w[0].1 == w[1].1)
            .map(|w| (w[0].0, w[1].0))
    }

    /// Binary search for an entry with image `y`; returns the smallest such `x`.
    pub fn lookup_by_image(&self, y: usize) -> Option<usize> {
        let i = self.entries.partition_point(|&(_, v)| v < y);
        self.entries.get(i).filter(|&&(_, v)| v == y).map(|&(x, _)| x)
    }
}

/// Evaluates `f` on every element of `subset` and sorts the results.
/// Spends exactly `subset.len()` queries.
pub fn build_table<O: Oracle + ?Sized>(f: &O, subset: &[usize]) -> PairTable {
    PairTable::from_pairs(subset.iter().map(|&x| (x, f.eval(x))))
}
