//! Instrumented black-box functions.
//!
//! A [`BlackBoxFunction`] is a fully materialized map `{0..N-1} -> {0..M-1}`
//! with an evaluation counter. Solvers see it through the [`Oracle`] trait,
//! where the only way to learn anything about the function is `eval`, and every
//! call is counted.
//!
//! The simulated quantum register additionally needs the exact measurement
//! distribution of a superposed query. That view is [`Superposition`]: it is
//! uncounted, and solver code only hands it to the Grover engine's sampler.
//! [`profile`] is test and harness introspection and is never used by solvers.

use std::cell::Cell;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest domain the constructors accept.
pub const MAX_DOMAIN: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("domain size must be in 1..={MAX_DOMAIN}, got {0}")]
    DomainSize(usize),
    #[error("multiplicity r = {r} must be at least {min}")]
    MultiplicityTooSmall { r: usize, min: usize },
    #[error("multiplicity r = {r} does not divide domain size {n}")]
    NotDivisible { n: usize, r: usize },
    #[error("codomain size {m} must be in 1..={n}")]
    CodomainSize { n: usize, m: usize },
}

/// Classical query access to a black-box function.
pub trait Oracle {
    fn domain_size(&self) -> usize;

    fn codomain_size(&self) -> usize;

    /// Evaluates the function at `x`, charging one query.
    ///
    /// Panics if `x` is outside the domain.
    fn eval(&self, x: usize) -> usize;

    /// Number of `eval` calls so far.
    fn evaluations(&self) -> u64;
}

/// Uncounted access used only to compute the outcome distribution of a
/// simulated quantum measurement.
pub trait Superposition: Oracle {
    /// Value of the function at `x` without touching the counter.
    fn peek(&self, x: usize) -> usize;

    /// Number of preimages of `y`.
    fn preimage_count(&self, y: usize) -> usize;

    /// Charges `queries` evaluations made in superposition by a simulated
    /// Grover iteration.
    fn charge_superposed(&self, queries: u64);
}

/// A finite function `{0..N-1} -> {0..M-1}` with an exact evaluation counter.
#[derive(Debug, Clone)]
pub struct BlackBoxFunction {
    mapping: Vec<u32>,
    codomain_size: usize,
    multiplicity: Vec<u32>,
    evals: Cell<u64>,
}

impl BlackBoxFunction {
    /// Wraps an explicit table. Every entry must be below `codomain_size`.
    pub fn from_mapping(mapping: Vec<u32>, codomain_size: usize) -> Result<Self, OracleError> {
        let n = mapping.len();
        if n == 0 || n > MAX_DOMAIN {
            return Err(OracleError::DomainSize(n));
        }
        if codomain_size == 0 || codomain_size > MAX_DOMAIN {
            return Err(OracleError::CodomainSize { n, m: codomain_size });
        }
        let mut multiplicity = vec![0u32; codomain_size];
        for &y in &mapping {
            let slot = multiplicity
                .get_mut(y as usize)
                .ok_or(OracleError::CodomainSize { n, m: codomain_size })?;
            *slot += 1;
        }
        Ok(Self {
            mapping,
            codomain_size,
            multiplicity,
            evals: Cell::new(0),
        })
    }
}

impl Oracle for BlackBoxFunction {
    fn domain_size(&self) -> usize {
        self.mapping.len()
    }

    fn codomain_size(&self) -> usize {
        self.codomain_size
    }

    fn eval(&self, x: usize) -> usize {
        assert!(
            x < self.mapping.len(),
            "oracle queried at {x}, outside domain of size {}",
            self.mapping.len()
        );
        self.evals.set(self.evals.get() + 1);
        self.mapping[x] as usize
    }

    fn evaluations(&self) -> u64 {
        self.evals.get()
    }
}

impl Superposition for BlackBoxFunction {
    fn peek(&self, x: usize) -> usize {
        self.mapping[x] as usize
    }

    fn preimage_count(&self, y: usize) -> usize {
        self.multiplicity.get(y).map_or(0, |&c| c as usize)
    }

    fn charge_superposed(&self, queries: u64) {
        self.evals.set(self.evals.get() + queries);
    }
}

/// Exact preimage statistics of a function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionProfile {
    /// Image value -> number of preimages. Only values in the image appear.
    pub multiplicity_histogram: BTreeMap<usize, usize>,
    pub image_size: usize,
}

impl FunctionProfile {
    /// Returns `Some(r)` when every image value has exactly `r` preimages.
    pub fn uniform_multiplicity(&self) -> Option<usize> {
        let mut counts = self.multiplicity_histogram.values();
        let first = *counts.next()?;
        counts.all(|&c| c == first).then_some(first)
    }
}

/// Introspects `f` without touching its counter.
pub fn profile(f: &BlackBoxFunction) -> FunctionProfile {
    let multiplicity_histogram: BTreeMap<usize, usize> = f
        .multiplicity
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(y, &c)| (y, c as usize))
        .collect();
    FunctionProfile {
        image_size: multiplicity_histogram.len(),
        multiplicity_histogram,
    }
}

fn check_domain(n: usize) -> Result<(), OracleError> {
    if n == 0 || n > MAX_DOMAIN {
        Err(OracleError::DomainSize(n))
    } else {
        Ok(())
    }
}

// Shuffle the domain, cut it into consecutive blocks of r, and give block i
// the label perm(i) for an independent shuffle perm of the codomain.
fn random_regular<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> BlackBoxFunction {
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    let mut labels: Vec<u32> = (0..(n / r) as u32).collect();
    labels.shuffle(rng);
    let mut mapping = vec![0u32; n];
    for (i, &x) in order.iter().enumerate() {
        mapping[x as usize] = labels[i / r];
    }
    BlackBoxFunction {
        mapping,
        codomain_size: n / r,
        multiplicity: vec![r as u32; n / r],
        evals: Cell::new(0),
    }
}

/// A uniformly random exactly r-to-one function on `{0..n-1}` onto `{0..n/r-1}`.
pub fn make_r_to_one(n: usize, r: usize, seed: u64) -> Result<BlackBoxFunction, OracleError> {
    check_domain(n)?;
    if r < 2 {
        return Err(OracleError::MultiplicityTooSmall { r, min: 2 });
    }
    if !n.is_multiple_of(r) {
        return Err(OracleError::NotDivisible { n, r });
    }
    Ok(random_regular(n, r, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Each input mapped independently and uniformly into `{0..m-1}`.
pub fn make_arbitrary_small_image(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<BlackBoxFunction, OracleError> {
    check_domain(n)?;
    if m == 0 || m > n {
        return Err(OracleError::CodomainSize { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mapping = (0..n).map(|_| rng.gen_range(0..m as u32)).collect();
    BlackBoxFunction::from_mapping(mapping, m)
}

/// Two independent r-to-one functions onto the same codomain `{0..n/r-1}`.
/// With `r = 1` both are permutations.
pub fn make_claw_pair(
    n: usize,
    r: usize,
    seed: u64,
) -> Result<(BlackBoxFunction, BlackBoxFunction), OracleError> {
    check_domain(n)?;
    if r < 1 {
        return Err(OracleError::MultiplicityTooSmall { r, min: 1 });
    }
    if !n.is_multiple_of(r) {
        return Err(OracleError::NotDivisible { n, r });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_regular(n, r, &mut rng);
    let g = random_regular(n, r, &mut rng);
    Ok((f, g))
}
