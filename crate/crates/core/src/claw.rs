//! Claw finding for a pair `F: X -> Z`, `G: Y -> Z`.
//!
//! A table of `F` on `k` points is searched for a `y` whose `G(y)` appears in
//! it. Bijections use the fixed subset `{0..k-1}`; r-to-one pairs sample `K` so
//! that its `F`-images are distinct, which makes the marked count exactly
//! `k·r`. Both variants then share the same search and finishing path.

use rand::Rng;
use thiserror::Error;

use crate::grover::{self, SearchError, SearchPredicate};
use crate::oracle::Superposition;
use crate::table::{self, PairTable, TableError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClawError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("multiplicity r = {0} must be at least 2")]
    Multiplicity(usize),
    #[error("k = {k} exceeds N/(2r) = {limit}")]
    TableTooLarge { k: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClawResult {
    /// `(x0, y0)` with `F(x0) = G(y0)`.
    pub claw: (usize, usize),
    pub f_queries: u64,
    pub g_queries: u64,
    pub table_space: usize,
    /// The tabulated subset `K`, in ascending order.
    pub subset: Vec<usize>,
    /// `F` evaluations spent choosing and tabulating `K`.
    pub table_f_queries: u64,
    /// `G` evaluations spent in the search phase.
    pub search_g_queries: u64,
}

/// `H(y) = 1` iff `G(y)` appears in the table. One `G` evaluation per query.
struct ClawPredicate<'a, O> {
    g: &'a O,
    table: &'a PairTable,
    marked: usize,
}

impl<'a, O: Superposition> ClawPredicate<'a, O> {
    fn new(g: &'a O, table: &'a PairTable) -> Self {
        let mut marked = 0;
        let mut last = None;
        for &(_, z) in table.entries() {
            if last != Some(z) {
                marked += g.preimage_count(z);
                last = Some(z);
            }
        }
        Self { g, table, marked }
    }
}

impl<O: Superposition> SearchPredicate for ClawPredicate<'_, O> {
    fn domain_size(&self) -> usize {
        self.g.domain_size()
    }

    fn query(&self, y: usize) -> bool {
        self.table.lookup_by_image(self.g.eval(y)).is_some()
    }

    fn charge_superposed(&self, iterations: u64) {
        self.g.charge_superposed(iterations);
    }

    fn is_marked(&self, y: usize) -> bool {
        self.table.lookup_by_image(self.g.peek(y)).is_some()
    }

    fn marked_count(&self) -> usize {
        self.marked
    }
}

/// Number of `y` with `G(y)` in the table, as the search sees it.
pub fn marked_count<O: Superposition>(g: &O, table: &PairTable) -> usize {
    ClawPredicate::new(g, table).marked_count()
}

// Search G's domain for a y hitting the table, then recover the claw: one G
// evaluation to look up G(y0), one F evaluation to confirm F(x0).
fn search_and_finish<O, R>(
    f: &O,
    g: &O,
    table: &PairTable,
    t: usize,
    table_f_queries: u64,
    rng: &mut R,
) -> Result<ClawResult, ClawError>
where
    O: Superposition,
    R: Rng + ?Sized,
{
    let pred = ClawPredicate::new(g, table);
    let outcome = grover::grover_search_known_t(&pred, t, rng)?;
    let y0 = outcome.found.expect("successful search returns an element");
    let z = g.eval(y0);
    let x0 = table
        .lookup_by_image(z)
        .expect("verified element hits the table");
    let confirmed = f.eval(x0);
    debug_assert_eq!(confirmed, z);
    Ok(ClawResult {
        claw: (x0, y0),
        f_queries: table_f_queries + 1,
        g_queries: outcome.oracle_queries + 1,
        table_space: table.len(),
        subset: {
            let mut k: Vec<usize> = table.entries().iter().map(|&(x, _)| x).collect();
            k.sort_unstable();
            k
        },
        table_f_queries,
        search_g_queries: outcome.oracle_queries,
    })
}

/// Claw search for two bijections on domains of equal size.
pub fn claw_bijective<O, R>(f: &O, g: &O, k: usize, rng: &mut R) -> Result<ClawResult, ClawError>
where
    O: Superposition,
    R: Rng + ?Sized,
{
    let subset = table::choose_subset_arbitrary(f.domain_size(), k)?;
    let table = table::build_table(f, &subset);
    search_and_finish(f, g, &table, k, k as u64, rng)
}

/// Claw search for two r-to-one functions with `N = r·|Z|`, `1 <= k <= N/(2r)`.
pub fn claw_r_to_one<O, R>(
    f: &O,
    g: &O,
    k: usize,
    r: usize,
    rng: &mut R,
) -> Result<ClawResult, ClawError>
where
    O: Superposition,
    R: Rng + ?Sized,
{
    if r < 2 {
        return Err(ClawError::Multiplicity(r));
    }
    let limit = f.domain_size() / (2 * r);
    if k > limit {
        return Err(ClawError::TableTooLarge { k, limit });
    }
    let selection = table::choose_subset_distinct_images(f, k, rng, table::default_try_cap(k))?;
    let table = PairTable::from_pairs(selection.pairs);
    search_and_finish(f, g, &table, k * r, selection.candidates, rng)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::collision::default_table_size;
    use crate::grover::{optimal_iterations, success_probability};
    use crate::oracle::{make_claw_pair, BlackBoxFunction, Oracle};

    fn assert_valid(f: &BlackBoxFunction, g: &BlackBoxFunction, res: &ClawResult) {
        let (x, y) = res.claw;
        assert_eq!(f.peek(x), g.peek(y));
        assert_eq!(res.f_queries, f.evaluations());
        assert_eq!(res.g_queries, g.evaluations());
    }

    fn predicted_g(n: usize, t: usize) -> f64 {
        let j = optimal_iterations(n, t);
        (j + 1) as f64 / success_probability(n, t, j) + 1.0
    }

    #[test]
    fn single_point() {
        let (f, g) = make_claw_pair(1, 1, 0).unwrap();
        let res = claw_bijective(&f, &g, 1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(res.claw, (0, 0));
        assert_valid(&f, &g, &res);
    }

    #[test]
    fn full_table_marks_everything() {
        for s in 0..20 {
            let (f, g) = make_claw_pair(3, 1, s).unwrap();
            let table = table::build_table(&f, &[0, 1, 2]);
            assert_eq!(marked_count(&g, &table), 3);
            let (f, g) = make_claw_pair(3, 1, s).unwrap();
            let res = claw_bijective(&f, &g, 3, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            assert_valid(&f, &g, &res);
            assert_eq!(res.search_g_queries, 1);
        }
    }

    #[test]
    fn bijective_accounting_and_mean() {
        let n = 1 << 15;
        let k = default_table_size(n, 1);
        let mut g_total = 0u64;
        for s in 0..500 {
            let (f, g) = make_claw_pair(n, 1, s).unwrap();
            let res = claw_bijective(&f, &g, k, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            assert_valid(&f, &g, &res);
            assert_eq!(res.f_queries, k as u64 + 1);
            g_total += res.g_queries;
        }
        let mean = g_total as f64 / 500.0;
        let expected = predicted_g(n, k);
        assert!(mean / expected < 2.0 && expected / mean < 2.0, "{mean} vs {expected}");
    }

    #[test]
    fn r_to_one_smallest_instance() {
        for s in 0..50 {
            let (f, g) = make_claw_pair(4, 2, s).unwrap();
            let res = claw_r_to_one(&f, &g, 1, 2, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            assert_valid(&f, &g, &res);
        }
    }

    #[test]
    fn r_to_one_marked_count_is_k_times_r() {
        for r in [2usize, 3, 4] {
            for s in 0..40 {
                let n = 48 * r;
                let (f, g) = make_claw_pair(n, r, s).unwrap();
                let k = 6;
                let sel = table::choose_subset_distinct_images(
                    &f,
                    k,
                    &mut ChaCha8Rng::seed_from_u64(s),
                    table::default_try_cap(k),
                )
                .unwrap();
                let table = PairTable::from_pairs(sel.pairs);
                let brute = (0..n)
                    .filter(|&y| table.entries().iter().any(|&(_, z)| z == g.peek(y)))
                    .count();
                assert_eq!(brute, k * r);
                assert_eq!(marked_count(&g, &table), brute);
            }
        }
    }

    #[test]
    fn r_to_one_means() {
        let (n, r) = (1 << 15, 2);
        let k = default_table_size(n, r);
        assert_eq!(k, 26);
        let (mut f_total, mut g_total) = (0u64, 0u64);
        for s in 0..500 {
            let (f, g) = make_claw_pair(n, r, s).unwrap();
            let res = claw_r_to_one(&f, &g, k, r, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            assert_valid(&f, &g, &res);
            assert!(res.table_f_queries >= k as u64);
            f_total += res.f_queries;
            g_total += res.g_queries;
        }
        let f_mean = f_total as f64 / 500.0;
        assert!(f_mean >= k as f64 && f_mean <= 2.0 * k as f64 * 1.25, "{f_mean}");
        let g_mean = g_total as f64 / 500.0;
        let expected = predicted_g(n, k * r);
        assert!(g_mean / expected < 2.0 && expected / g_mean < 2.0, "{g_mean} vs {expected}");
    }

    #[test]
    fn r_to_one_rejects_bad_parameters() {
        let (f, g) = make_claw_pair(64, 4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            claw_r_to_one(&f, &g, 9, 4, &mut rng),
            Err(ClawError::TableTooLarge { k: 9, limit: 8 })
        );
        assert_eq!(claw_r_to_one(&f, &g, 2, 1, &mut rng), Err(ClawError::Multiplicity(1)));
        assert!(matches!(
            claw_bijective(&f, &g, 0, &mut rng),
            Err(ClawError::Table(TableError::SubsetSize { .. }))
        ));
    }
}
