//! Exact simulation of Grover search.
//!
//! Starting from the uniform superposition, amplitudes stay uniform within the
//! marked and the unmarked class, so the whole evolution lives in a
//! two-dimensional subspace. After `j` iterations the marked class carries
//! probability `sin²((2j+1)θ)` with `sin²θ = t/N`. That closed form is exact for
//! any `N`, so the engine does not need `N` to be a power of two and costs
//! `O(1)` per measurement instead of `O(N)`.
//!
//! [`StateVector`] is a dense reference for small power-of-two domains, used
//! to check the closed form.

use std::cell::Cell;
use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use thiserror::Error;

/// Known-t search gives up after this many failed attempts.
pub const KNOWN_T_ATTEMPT_CUTOFF: u64 = 64;

/// Largest register the dense reference accepts.
pub const MAX_REFERENCE_QUBITS: u32 = 12;

/// Probability of measuring a marked element after `j` iterations.
pub fn success_probability(n: usize, t: usize, j: u64) -> f64 {
    GroverState::new(n, t).advanced(j).marked_mass()
}

/// `floor(π/4 · sqrt(N/t))`, or 0 when nothing is marked.
pub fn optimal_iterations(n: usize, t: usize) -> u64 {
    if t == 0 {
        return 0;
    }
    (FRAC_PI_4 * (n as f64 / t as f64).sqrt()).floor() as u64
}

/// State of a Grover register in its two-dimensional invariant subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverState {
    n: usize,
    t: usize,
    iterations: u64,
    theta: f64,
}

impl GroverState {
    /// Uniform superposition over `n` elements of which `t` are marked.
    pub fn new(n: usize, t: usize) -> Self {
        assert!(n >= 1 && t <= n, "need 0 <= t <= N and N >= 1 (N = {n}, t = {t})");
        Self {
            n,
            t,
            iterations: 0,
            theta: (t as f64 / n as f64).sqrt().asin(),
        }
    }

    pub fn iterate(&mut self, j: u64) {
        self.iterations += j;
    }

    fn advanced(mut self, j: u64) -> Self {
        self.iterate(j);
        self
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn angle(&self) -> f64 {
        (2 * self.iterations + 1) as f64 * self.theta
    }

    /// Total probability on the marked class.
    pub fn marked_mass(&self) -> f64 {
        if self.t == 0 {
            0.0
        } else if self.t == self.n {
            1.0
        } else {
            self.angle().sin().powi(2)
        }
    }

    pub fn unmarked_mass(&self) -> f64 {
        1.0 - self.marked_mass()
    }

    /// Amplitude of each individual marked element (zero when `t = 0`).
    pub fn marked_amplitude(&self) -> f64 {
        if self.t == 0 {
            0.0
        } else {
            self.angle().sin() / (self.t as f64).sqrt()
        }
    }

    /// Amplitude of each individual unmarked element (zero when `t = N`).
    pub fn unmarked_amplitude(&self) -> f64 {
        if self.t == self.n {
            0.0
        } else {
            self.angle().cos() / ((self.n - self.t) as f64).sqrt()
        }
    }
}

/// A search predicate `H` as seen by the simulator.
///
/// `query` is a classical evaluation and `charge_superposed` accounts for the
/// evaluations made inside simulated Grover iterations; both are paid for. The
/// remaining methods describe the true marked set and are used only to sample
/// the outcome of a simulated measurement; they must not touch any counter.
pub trait SearchPredicate {
    fn domain_size(&self) -> usize;

    /// One counted evaluation of `H`.
    fn query(&self, x: usize) -> bool;

    /// Charges `iterations` superposed evaluations of `H`.
    fn charge_superposed(&self, iterations: u64);

    /// Uncounted membership in the marked set.
    fn is_marked(&self, x: usize) -> bool;

    /// Exact number of marked elements.
    fn marked_count(&self) -> usize;

    /// Uniform marked element. Defaults to rejection sampling.
    fn sample_marked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        debug_assert!(self.marked_count() > 0);
        loop {
            let x = rng.gen_range(0..self.domain_size());
            if self.is_marked(x) {
                return x;
            }
        }
    }

    /// Uniform unmarked element. Defaults to rejection sampling.
    fn sample_unmarked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        debug_assert!(self.marked_count() < self.domain_size());
        loop {
            let x = rng.gen_range(0..self.domain_size());
            if !self.is_marked(x) {
                return x;
            }
        }
    }
}

/// Wraps a plain closure as a [`SearchPredicate`], enumerating its marked set
/// once up front (uncounted) and counting every later `query`.
pub struct CountingPredicate<F> {
    n: usize,
    predicate: F,
    marked: Vec<usize>,
    queries: Cell<u64>,
}

impl<F: Fn(usize) -> bool> CountingPredicate<F> {
    pub fn new(n: usize, predicate: F) -> Self {
        let marked = (0..n).filter(|&x| predicate(x)).collect();
        Self {
            n,
            predicate,
            marked,
            queries: Cell::new(0),
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }
}

impl<F: Fn(usize) -> bool> SearchPredicate for CountingPredicate<F> {
    fn domain_size(&self) -> usize {
        self.n
    }

    fn query(&self, x: usize) -> bool {
        self.queries.set(self.queries.get() + 1);
        (self.predicate)(x)
    }

    fn charge_superposed(&self, iterations: u64) {
        self.queries.set(self.queries.get() + iterations);
    }

    fn is_marked(&self, x: usize) -> bool {
        self.marked.binary_search(&x).is_ok()
    }

    fn marked_count(&self) -> usize {
        self.marked.len()
    }

    fn sample_marked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.marked[rng.gen_range(0..self.marked.len())]
    }
}

/// Result of one search: the verified element and its cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchOutcome {
    pub found: Option<usize>,
    /// Evaluations of `H`: every Grover iteration plus one verification per attempt.
    pub oracle_queries: u64,
    /// Grover iterations applied, summed over attempts.
    pub grover_invocations: u64,
    pub attempts: u64,
}

impl SearchOutcome {
    fn record_attempt(&mut self, iterations: u64) {
        self.grover_invocations += iterations;
        self.oracle_queries += iterations + 1;
        self.attempts += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no marked element verified after {} attempts", .0.attempts)]
    AttemptCutoff(SearchOutcome),
    #[error("query budget exhausted after {} queries", .0.oracle_queries)]
    BudgetExhausted(SearchOutcome),
}

impl SearchError {
    /// Work done before giving up.
    pub fn outcome(&self) -> SearchOutcome {
        match *self {
            SearchError::AttemptCutoff(o) | SearchError::BudgetExhausted(o) => o,
        }
    }
}

/// Runs `j` simulated iterations, measures, and verifies the candidate with
/// one counted query.
fn attempt<P, R>(pred: &P, j: u64, rng: &mut R, outcome: &mut SearchOutcome) -> Option<usize>
where
    P: SearchPredicate + ?Sized,
    R: Rng + ?Sized,
{
    let n = pred.domain_size();
    let t = pred.marked_count();
    let p = success_probability(n, t, j);
    let candidate = if t > 0 && (t == n || rng.gen_bool(p.clamp(0.0, 1.0))) {
        pred.sample_marked(rng)
    } else {
        pred.sample_unmarked(rng)
    };
    pred.charge_superposed(j);
    outcome.record_attempt(j);
    pred.query(candidate).then_some(candidate)
}

/// Grover search with a known number `t` of marked elements, repeated until
/// a measured candidate verifies.
///
/// Every attempt runs `optimal_iterations(N, t)` iterations, except that more
/// than half the domain marked means measuring right away: there the floor
/// rule can overshoot below 1/2 while a plain sample already succeeds with
/// probability above 1/2. The schedule uses the caller's `t`; the simulated
/// dynamics use the predicate's true count.
pub fn grover_search_known_t<P, R>(
    pred: &P,
    t: usize,
    rng: &mut R,
) -> Result<SearchOutcome, SearchError>
where
    P: SearchPredicate + ?Sized,
    R: Rng + ?Sized,
{
    let n = pred.domain_size();
    let j = if 2 * t > n { 0 } else { optimal_iterations(n, t) };
    let mut outcome = SearchOutcome::default();
    while outcome.attempts < KNOWN_T_ATTEMPT_CUTOFF {
        if let Some(x) = attempt(pred, j, rng, &mut outcome) {
            outcome.found = Some(x);
            return Ok(outcome);
        }
    }
    Err(SearchError::AttemptCutoff(outcome))
}

/// Schedule parameters for search with an unknown number of solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BbhtConfig {
    /// Growth factor λ of the iteration bound, in (1, 4/3).
    pub growth_factor: f64,
    /// The search fails rather than start an attempt that would exceed this.
    pub max_total_queries: u64,
}

impl BbhtConfig {
    pub const DEFAULT_GROWTH: f64 = 6.0 / 5.0;

    /// Default growth with a budget of `64·sqrt(N) + 64` queries: about
    /// fourteen times the expected cost when one element is marked.
    pub fn for_domain(n: usize) -> Self {
        Self {
            growth_factor: Self::DEFAULT_GROWTH,
            max_total_queries: 64 * (n as f64).sqrt().ceil() as u64 + 64,
        }
    }
}

impl Default for BbhtConfig {
    fn default() -> Self {
        Self {
            growth_factor: Self::DEFAULT_GROWTH,
            max_total_queries: u64::MAX,
        }
    }
}

/// Search without knowing the number of marked elements: draw the iteration
/// count uniformly below a bound `m` that grows by `λ` after each failure,
/// capped at `sqrt(N)`.
pub fn bbht_search<P, R>(
    pred: &P,
    rng: &mut R,
    config: &BbhtConfig,
) -> Result<SearchOutcome, SearchError>
where
    P: SearchPredicate + ?Sized,
    R: Rng + ?Sized,
{
    assert!(
        config.growth_factor > 1.0 && config.growth_factor < 4.0 / 3.0,
        "growth factor must lie in (1, 4/3), got {}",
        config.growth_factor
    );
    let cap = (pred.domain_size() as f64).sqrt();
    let mut bound = 1.0f64;
    let mut outcome = SearchOutcome::default();
    loop {
        let j = rng.gen_range(0..bound.ceil() as u64);
        if outcome.oracle_queries.saturating_add(j + 1) > config.max_total_queries {
            return Err(SearchError::BudgetExhausted(outcome));
        }
        if let Some(x) = attempt(pred, j, rng, &mut outcome) {
            outcome.found = Some(x);
            return Ok(outcome);
        }
        bound = (bound * config.growth_factor).min(cap).max(1.0);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReferenceError {
    #[error("register size must be in 1..={MAX_REFERENCE_QUBITS} qubits, got {0}")]
    Qubits(u32),
    #[error("marked element {x} outside domain of size {n}")]
    MarkedOutOfRange { x: usize, n: usize },
}

/// Dense real amplitude vector over `2^n` basis states.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: Vec<f64>,
}

impl StateVector {
    /// Uniform superposition over `2^n_qubits` states.
    pub fn uniform(n_qubits: u32) -> Result<Self, ReferenceError> {
        if n_qubits == 0 || n_qubits > MAX_REFERENCE_QUBITS {
            return Err(ReferenceError::Qubits(n_qubits));
        }
        let n = 1usize << n_qubits;
        Ok(Self {
            amplitudes: vec![1.0 / (n as f64).sqrt(); n],
        })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Phase flip on marked states, then inversion about the mean.
    pub fn grover_iteration(&mut self, marked: &[bool]) {
        for (a, &m) in self.amplitudes.iter_mut().zip(marked) {
            if m {
                *a = -*a;
            }
        }
        let mean = self.amplitudes.iter().sum::<f64>() / self.amplitudes.len() as f64;
        for a in &mut self.amplitudes {
            *a = 2.0 * mean - *a;
        }
    }

    pub fn probability_of(&self, marked: &[bool]) -> f64 {
        self.amplitudes
            .iter()
            .zip(marked)
            .filter(|(_, &m)| m)
            .map(|(a, _)| a * a)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }
}

/// Mask of length `2^n_qubits` with the given elements set.
pub fn marked_mask(marked: &[usize], n_qubits: u32) -> Result<Vec<bool>, ReferenceError> {
    if n_qubits == 0 || n_qubits > MAX_REFERENCE_QUBITS {
        return Err(ReferenceError::Qubits(n_qubits));
    }
    let n = 1usize << n_qubits;
    let mut mask = vec![false; n];
    for &x in marked {
        *mask.get_mut(x).ok_or(ReferenceError::MarkedOutOfRange { x, n })? = true;
    }
    Ok(mask)
}

/// Marked-set probability after `j` iterations, computed on the full state vector.
pub fn statevector_reference(
    marked: &[usize],
    n_qubits: u32,
    j: u64,
) -> Result<f64, ReferenceError> {
    let mask = marked_mask(marked, n_qubits)?;
    let mut state = StateVector::uniform(n_qubits)?;
    for _ in 0..j {
        state.grover_iteration(&mask);
    }
    Ok(state.probability_of(&mask))
}
