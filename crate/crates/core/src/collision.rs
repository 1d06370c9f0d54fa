//! Quantum collision finding: the constant-space algorithm that searches for
//! the partner of one fixed point, and the table-based algorithm that trades
//! a table of `k` precomputed pairs for a search over `(r-1)·k` marked
//! elements.

use rand::Rng;
use thiserror::Error;

use crate::grover::{self, BbhtConfig, SearchError, SearchPredicate};
use crate::oracle::Superposition;
use crate::table::{self, PairTable, TableError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollisionError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("multiplicity r = {0} must be at least 2")]
    Multiplicity(usize),
    #[error("birthday constant must be positive and finite, got {0}")]
    BirthdayConstant(f64),
}

/// Queries spent in each phase of a collision search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseQueries {
    pub table_build: u64,
    pub grover: u64,
    pub finishing: u64,
}

impl PhaseQueries {
    pub fn total(&self) -> u64 {
        self.table_build + self.grover + self.finishing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionResult {
    /// Two distinct inputs with equal images.
    pub pair: (usize, usize),
    pub total_queries: u64,
    /// Table entries held during the search.
    pub table_space: usize,
    pub phases: PhaseQueries,
}

impl CollisionResult {
    fn new(pair: (usize, usize), table_space: usize, phases: PhaseQueries) -> Self {
        Self {
            pair,
            total_queries: phases.total(),
            table_space,
            phases,
        }
    }
}

/// `⌈(n/r)^{1/3}⌉`, the table size that balances building against searching.
pub fn default_table_size(n: usize, r: usize) -> usize {
    let (n, r) = (n as u128, r.max(1) as u128);
    let mut k = (n as f64 / r as f64).cbrt().floor() as u128;
    while k > 1 && (k - 1).pow(3) * r >= n {
        k -= 1;
    }
    while k.pow(3) * r < n {
        k += 1;
    }
    k.max(1) as usize
}

/// `H(x) = 1` iff some table entry `(x0, F(x))` exists with `x0 != x`.
///
/// Each query costs one evaluation of `F`; the table lookup is free.
pub(crate) struct TablePartnerPredicate<'a, O> {
    f: &'a O,
    table: &'a PairTable,
    marked: usize,
}

impl<'a, O: Superposition> TablePartnerPredicate<'a, O> {
    pub(crate) fn new(f: &'a O, table: &'a PairTable) -> Self {
        let mut marked = 0;
        let mut last = None;
        for &(_, y) in table.entries() {
            if last != Some(y) {
                marked += f.preimage_count(y) - 1;
                last = Some(y);
            }
        }
        Self { f, table, marked }
    }

    fn matches(&self, x: usize, y: usize) -> bool {
        self.table.lookup_by_image(y).is_some_and(|x0| x0 != x)
    }
}

impl<O: Superposition> SearchPredicate for TablePartnerPredicate<'_, O> {
    fn domain_size(&self) -> usize {
        self.f.domain_size()
    }

    fn query(&self, x: usize) -> bool {
        self.matches(x, self.f.eval(x))
    }

    fn charge_superposed(&self, iterations: u64) {
        self.f.charge_superposed(iterations);
    }

    fn is_marked(&self, x: usize) -> bool {
        self.matches(x, self.f.peek(x))
    }

    fn marked_count(&self) -> usize {
        self.marked
    }
}

// Runs the search phase against `table`, then spends one evaluation to find
// the table partner of the returned element.
fn search_and_finish<O, R>(
    f: &O,
    table: &PairTable,
    mut phases: PhaseQueries,
    search: impl FnOnce(&TablePartnerPredicate<'_, O>, &mut R) -> Result<grover::SearchOutcome, SearchError>,
    rng: &mut R,
) -> Result<CollisionResult, CollisionError>
where
    O: Superposition,
    R: Rng + ?Sized,
{
    let pred = TablePartnerPredicate::new(f, table);
    let outcome = search(&pred, rng)?;
    phases.grover = outcome.oracle_queries;
    let x1 = outcome.found.expect("successful search returns an element");
    let y1 = f.eval(x1);
    phases.finishing = 1;
    let x0 = table
        .lookup_by_image(y1)
        .expect("verified element has a table partner");
    Ok(CollisionResult::new((x0, x1), table.len(), phases))
}

/// Fix `x0 = 0` and search for the other preimage of `F(0)`. Constant space.
pub fn simple_quantum_collision<O, R>(f: &O, rng: &mut R) -> Result<CollisionResult, CollisionError>
where
    O: Superposition,
    R: Rng + ?Sized,
{
    let table = PairTable::from_pairs([(0, f.eval(0))]);
    let phases = PhaseQueries {
        table_build: 1,
        ..Default::default()
    };
    let pred = TablePartnerPredicate::new(f, &table);
    let outcome = grover::grover_search_known_t(&pred, 1, rng)?;
    let x1 = outcome.found.expect("successful search returns an element");
    Ok(CollisionResult::new(
        (0, x1),
        1,
        PhaseQueries {
            grover: outcome.oracle_queries,
            ..phases
        },
    ))
}

/// Table-based collision search on an exactly r-to-one function.
///
/// Tabulates `F` on `{0..k-1}`. A collision inside the table is returned
/// directly. Otherwise exactly `(r-1)·k` elements outside the table have a
/// partner in it, and known-t search finds one of them.
pub fn bht_collision<O, R>(
    f: &O,
    k: usize,
    r: usize,
    rng: &mut R,
) -> Result<CollisionResult, CollisionError>
where
    O: Superposition,
    R: Rng + ?Sized,
{
    if r < 2 {
        return Err(CollisionError::Multiplicity(r));
    }
    let subset = table::choose_subset_arbitrary(f.domain_size(), k)?;
    let table = table::build_table(f, &subset);
    let phases = PhaseQueries {
        table_build: k as u64,
        ..Default::default()
    };
    if let Some(pair) = table.find_internal_collision() {
        return Ok(CollisionResult::new(pair, k, phases));
    }
    let t = (r - 1) * k;
    search_and_finish(
        f,
        &table,
        phases,
        |pred, rng| grover::grover_search_known_t(pred, t, rng),
        rng,
    )
}

/// Collision search for an arbitrary function with a small image: random
/// table, unknown number of marked elements.
///
/// Fails with [`SearchError::BudgetExhausted`] when no element reachable from
/// the table was found within `config`'s budget; retrying is up to the caller.
pub fn generalized_collision<O, R>(
    f: &O,
    k: usize,
    rng: &mut R,
    config: &BbhtConfig,
) -> Result<CollisionResult, CollisionError>
where
    O: Superposition,
    R: Rng + ?Sized,
{
    let subset = table::choose_subset_random(f.domain_size(), k, rng)?;
    let table = table::build_table(f, &subset);
    let phases = PhaseQueries {
        table_build: k as u64,
        ..Default::default()
    };
    if let Some(pair) = table.find_internal_collision() {
        return Ok(CollisionResult::new(pair, k, phases));
    }
    search_and_finish(
        f,
        &table,
        phases,
        |pred, rng| grover::bbht_search(pred, rng, config),
        rng,
    )
}
