//! Classical birthday-paradox collision search.

use rand::Rng;

use crate::collision::{CollisionError, CollisionResult, PhaseQueries};
use crate::oracle::Oracle;
use crate::table;

/// Constant for which a 2-to-one function yields a collision with
/// probability about 1/2.
pub const DEFAULT_BIRTHDAY_CONSTANT: f64 = 1.18;

/// `min(⌈c·sqrt(N)⌉, N)`.
pub fn birthday_subset_size(n: usize, c: f64) -> usize {
    ((c * (n as f64).sqrt()).ceil() as usize).clamp(1, n)
}

/// Tabulates a random subset of size `⌈c·sqrt(N)⌉` and reports a collision
/// inside it, if any. Always spends exactly that many queries.
pub fn birthday_collision<O, R>(
    f: &O,
    c: f64,
    rng: &mut R,
) -> Result<Option<CollisionResult>, CollisionError>
where
    O: Oracle + ?Sized,
    R: Rng + ?Sized,
{
    if !(c > 0.0 && c.is_finite()) {
        return Err(CollisionError::BirthdayConstant(c));
    }
    let n = f.domain_size();
    let k = birthday_subset_size(n, c);
    let subset = table::choose_subset_random(n, k, rng)?;
    let table = table::build_table(f, &subset);
    let phases = PhaseQueries {
        table_build: k as u64,
        ..Default::default()
    };
    Ok(table.find_internal_collision().map(|pair| CollisionResult {
        pair,
        total_queries: phases.total(),
        table_space: k,
        phases,
    }))
}
