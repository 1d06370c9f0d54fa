//! Seeded experiment sweeps over the solvers.
//!
//! Every trial builds fresh oracles from a seed derived from the base seed,
//! the grid point and the trial index, so any row of a sweep can be re-run on
//! its own. Rows are produced in (grid point, trial) order whether or not the
//! trials run in parallel.

mod analysis;
mod csv;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{birthday_collision, birthday_subset_size, DEFAULT_BIRTHDAY_CONSTANT};
use crate::claw::{claw_bijective, claw_r_to_one, ClawResult};
use crate::collision::{
    bht_collision, default_table_size, generalized_collision, simple_quantum_collision,
    CollisionResult,
};
use crate::grover::BbhtConfig;
use crate::oracle::{
    make_arbitrary_small_image, make_claw_pair, make_r_to_one, BlackBoxFunction, Oracle,
    Superposition,
};

pub use self::analysis::{
    fit_log_log, fit_scaling_exponent, group_by, optimal_k_report, runtime_cost_model,
    tradeoff_check, AnalysisError, GroupStats, OptimalK, ScalingFit, TradeoffPoint,
    TradeoffReport,
};
pub use self::csv::{read_csv, write_csv, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Birthday,
    #[value(name = "simple")]
    SimpleQuantum,
    Bht,
    Generalized,
    #[value(name = "claw-bij")]
    ClawBij,
    #[value(name = "claw-r")]
    ClawR,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Birthday,
        Algorithm::SimpleQuantum,
        Algorithm::Bht,
        Algorithm::Generalized,
        Algorithm::ClawBij,
        Algorithm::ClawR,
    ];

    fn tag(self) -> u64 {
        self as u64 + 1
    }

    /// Multiplicity actually used for this algorithm's instances.
    pub fn effective_r(self, r: usize) -> usize {
        match self {
            Algorithm::ClawBij => 1,
            _ => r,
        }
    }
}

/// One trial of one solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub algorithm: Algorithm,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub seed: u64,
    pub trial: usize,
    pub success: bool,
    pub f_queries: u64,
    pub g_queries: u64,
    pub total_queries: u64,
    pub table_space: usize,
}

/// How the table size is chosen at each grid point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KPolicy {
    /// `⌈(N/r)^{1/3}⌉`, capped at `N/(2r)` for r-to-one claws.
    CubeRoot,
    /// Every listed `k` at every `N`.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub algorithm: Algorithm,
    pub n_grid: Vec<usize>,
    pub r: usize,
    pub k_policy: KPolicy,
    pub trials: usize,
    pub base_seed: u64,
    /// Birthday constant `c`; only the birthday baseline uses it.
    pub birthday_c: f64,
}

impl SweepConfig {
    pub fn new(algorithm: Algorithm, n_grid: Vec<usize>, r: usize, trials: usize, base_seed: u64) -> Self {
        Self {
            algorithm,
            n_grid,
            r,
            k_policy: KPolicy::CubeRoot,
            trials,
            base_seed,
            birthday_c: DEFAULT_BIRTHDAY_CONSTANT,
        }
    }

    pub fn with_k_grid(mut self, ks: Vec<usize>) -> Self {
        self.k_policy = KPolicy::Explicit(ks);
        self
    }

    /// Validated `(N, k)` grid points in sweep order.
    pub fn grid(&self) -> Result<Vec<(usize, usize)>, HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_grid.is_empty() {
            return bad("N grid is empty".into());
        }
        if let KPolicy::Explicit(ks) = &self.k_policy {
            if ks.is_empty() {
                return bad("k grid is empty".into());
            }
        }
        if !(self.birthday_c > 0.0 && self.birthday_c.is_finite()) {
            return bad(format!("birthday constant {} must be positive", self.birthday_c));
        }
        let alg = self.algorithm;
        let r = alg.effective_r(self.r);
        if alg != Algorithm::ClawBij && r < 2 {
            return bad(format!("r = {r} must be at least 2 for {alg:?}"));
        }

        let mut points = Vec::new();
        for &n in &self.n_grid {
            if n == 0 || n > crate::oracle::MAX_DOMAIN {
                return bad(format!("N = {n} out of range"));
            }
            if n % r != 0 {
                return bad(format!("r = {r} does not divide N = {n}"));
            }
            let ks = match (&self.k_policy, alg) {
                (_, Algorithm::Birthday) => vec![birthday_subset_size(n, self.birthday_c)],
                (_, Algorithm::SimpleQuantum) => vec![1],
                (KPolicy::CubeRoot, Algorithm::ClawR) => {
                    vec![default_table_size(n, r).min(n / (2 * r)).max(1)]
                }
                (KPolicy::CubeRoot, _) => vec![default_table_size(n, r)],
                (KPolicy::Explicit(ks), _) => ks.clone(),
            };
            for k in ks {
                let limit = if alg == Algorithm::ClawR { n / (2 * r) } else { n };
                if k == 0 || k > limit {
                    return bad(format!("k = {k} out of range 1..={limit} at N = {n}"));
                }
                points.push((n, k));
            }
        }
        Ok(points)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `base_seed XOR hash(algorithm, N, r, k, trial)`.
pub fn trial_seed(base_seed: u64, algorithm: Algorithm, n: usize, r: usize, k: usize, trial: usize) -> u64 {
    let h = [algorithm.tag(), n as u64, r as u64, k as u64, trial as u64]
        .into_iter()
        .fold(0u64, |h, v| splitmix64(h ^ v));
    base_seed ^ h
}

fn collision_record(
    f: &BlackBoxFunction,
    outcome: Result<Option<CollisionResult>, String>,
    mut rec: ExperimentRecord,
) -> ExperimentRecord {
    let delta = f.evaluations();
    if let Ok(Some(res)) = outcome {
        let (a, b) = res.pair;
        assert!(a != b && f.peek(a) == f.peek(b), "{:?} returned a non-collision", rec.algorithm);
        assert_eq!(res.total_queries, delta, "{:?} misreported its queries", rec.algorithm);
        rec.success = true;
        rec.table_space = res.table_space;
    }
    rec.f_queries = delta;
    rec.total_queries = delta;
    rec
}

fn claw_record(
    f: &BlackBoxFunction,
    g: &BlackBoxFunction,
    outcome: Result<ClawResult, String>,
    mut rec: ExperimentRecord,
) -> ExperimentRecord {
    let (fd, gd) = (f.evaluations(), g.evaluations());
    if let Ok(res) = outcome {
        let (x, y) = res.claw;
        assert_eq!(f.peek(x), g.peek(y), "{:?} returned a non-claw", rec.algorithm);
        assert_eq!((res.f_queries, res.g_queries), (fd, gd), "{:?} misreported its queries", rec.algorithm);
        rec.success = true;
        rec.table_space = res.table_space;
    }
    rec.f_queries = fd;
    rec.g_queries = gd;
    rec.total_queries = fd + gd;
    rec
}

/// Runs one trial with its own oracles and generator.
///
/// Solver failures become `success = false` rows carrying the queries they
/// consumed. Panics if a solver reports a count that differs from the oracle
/// counters or returns an invalid collision or claw.
pub fn run_trial(
    algorithm: Algorithm,
    n: usize,
    r: usize,
    k: usize,
    seed: u64,
    trial: usize,
    birthday_c: f64,
) -> ExperimentRecord {
    let r = algorithm.effective_r(r);
    let instance_seed = splitmix64(seed ^ 0x5eed_0f0f);
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0xa160_7e55));
    let rec = ExperimentRecord {
        algorithm,
        n,
        r,
        k,
        seed,
        trial,
        success: false,
        f_queries: 0,
        g_queries: 0,
        total_queries: 0,
        table_space: k,
    };
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match algorithm {
        Algorithm::Birthday | Algorithm::SimpleQuantum | Algorithm::Bht => {
            let f = make_r_to_one(n, r, instance_seed).expect("grid validated");
            let outcome = match algorithm {
                Algorithm::Birthday => birthday_collision(&f, birthday_c, &mut rng).map_err(|e| err(&e)),
                Algorithm::SimpleQuantum => simple_quantum_collision(&f, &mut rng).map(Some).map_err(|e| err(&e)),
                _ => bht_collision(&f, k, r, &mut rng).map(Some).map_err(|e| err(&e)),
            };
            collision_record(&f, outcome, rec)
        }
        Algorithm::Generalized => {
            let f = make_arbitrary_small_image(n, n / r, instance_seed).expect("grid validated");
            let outcome = generalized_collision(&f, k, &mut rng, &BbhtConfig::for_domain(n))
                .map(Some)
                .map_err(|e| err(&e));
            collision_record(&f, outcome, rec)
        }
        Algorithm::ClawBij | Algorithm::ClawR => {
            let (f, g) = make_claw_pair(n, r, instance_seed).expect("grid validated");
            let outcome = if algorithm == Algorithm::ClawBij {
                claw_bijective(&f, &g, k, &mut rng)
            } else {
                claw_r_to_one(&f, &g, k, r, &mut rng)
            };
            claw_record(&f, &g, outcome.map_err(|e| err(&e)), rec)
        }
    }
}

struct TrialSpec {
    n: usize,
    k: usize,
    trial: usize,
}

fn trial_specs(config: &SweepConfig) -> Result<Vec<TrialSpec>, HarnessError> {
    Ok(config
        .grid()?
        .into_iter()
        .flat_map(|(n, k)| (0..config.trials).map(move |trial| TrialSpec { n, k, trial }))
        .collect())
}

fn run_spec(config: &SweepConfig, spec: &TrialSpec) -> ExperimentRecord {
    let r = config.algorithm.effective_r(config.r);
    let seed = trial_seed(config.base_seed, config.algorithm, spec.n, r, spec.k, spec.trial);
    run_trial(config.algorithm, spec.n, r, spec.k, seed, spec.trial, config.birthday_c)
}

/// Runs every trial on the calling thread.
pub fn run_trials_sequential(config: &SweepConfig) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let specs = trial_specs(config)?;
    Ok(specs.iter().map(|s| run_spec(config, s)).collect())
}

/// Runs trials on the rayon pool; output order matches the sequential runner.
#[cfg(feature = "parallel")]
pub fn run_trials_parallel(config: &SweepConfig) -> Result<Vec<ExperimentRecord>, HarnessError> {
    use rayon::prelude::*;

    let specs = trial_specs(config)?;
    Ok(specs.par_iter().map(|s| run_spec(config, s)).collect())
}

/// Runs the sweep, in parallel when the `parallel` feature is enabled.
pub fn run_trials(config: &SweepConfig) -> Result<Vec<ExperimentRecord>, HarnessError> {
    #[cfg(feature = "parallel")]
    {
        run_trials_parallel(config)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_sequential(config)
    }
}
