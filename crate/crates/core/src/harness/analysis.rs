use std::collections::BTreeMap;

use thiserror::Error;

use super::ExperimentRecord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("need at least {need} distinct {what} values, got {got}")]
    TooFewPoints {
        what: &'static str,
        need: usize,
        got: usize,
    },
    #[error("{what} = {value} has only {got} trials, need {need}")]
    TooFewTrials {
        what: &'static str,
        value: usize,
        got: usize,
        need: usize,
    },
    #[error("records mix several values of {0}")]
    Mixed(&'static str),
    #[error("k grid [{lo}, {hi}] does not span the cube-root point {target:.2}")]
    GridMissesTarget { lo: usize, hi: usize, target: String },
    #[error("no records")]
    Empty,
}

/// Summary of the trials sharing one grid coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub trials: usize,
    pub mean_total: f64,
    /// Standard error of `mean_total`.
    pub std_err: f64,
    pub mean_space: f64,
    pub success_rate: f64,
    /// Mean total queries over successful trials only.
    pub success_mean_total: Option<f64>,
}

impl GroupStats {
    fn from_records(recs: &[&ExperimentRecord]) -> Self {
        let n = recs.len() as f64;
        let totals: Vec<f64> = recs.iter().map(|r| r.total_queries as f64).collect();
        let mean_total = totals.iter().sum::<f64>() / n;
        let var = if recs.len() > 1 {
            totals.iter().map(|t| (t - mean_total).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let succ: Vec<f64> = recs
            .iter()
            .filter(|r| r.success)
            .map(|r| r.total_queries as f64)
            .collect();
        Self {
            trials: recs.len(),
            mean_total,
            std_err: (var / n).sqrt(),
            mean_space: recs.iter().map(|r| r.table_space as f64).sum::<f64>() / n,
            success_rate: succ.len() as f64 / n,
            success_mean_total: (!succ.is_empty()).then(|| succ.iter().sum::<f64>() / succ.len() as f64),
        }
    }
}

/// Groups records by `key` and summarizes each group, in ascending key order.
pub fn group_by<K: Ord + Copy>(
    records: &[ExperimentRecord],
    key: impl Fn(&ExperimentRecord) -> K,
) -> Vec<(K, GroupStats)> {
    let mut groups: BTreeMap<K, Vec<&ExperimentRecord>> = BTreeMap::new();
    for rec in records {
        groups.entry(key(rec)).or_default().push(rec);
    }
    groups
        .into_iter()
        .map(|(k, recs)| (k, GroupStats::from_records(&recs)))
        .collect()
}

fn single_value(
    records: &[ExperimentRecord],
    what: &'static str,
    key: impl Fn(&ExperimentRecord) -> usize,
) -> Result<usize, AnalysisError> {
    let first = key(records.first().ok_or(AnalysisError::Empty)?);
    if records.iter().any(|r| key(r) != first) {
        return Err(AnalysisError::Mixed(what));
    }
    Ok(first)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(N, mean total queries)` per grid point.
    pub points: Vec<(usize, f64)>,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn fit_log_log(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits `log2(mean total queries)` against `log2 N`.
///
/// Needs at least 3 distinct `N`, each with at least 30 trials.
pub fn fit_scaling_exponent(records: &[ExperimentRecord]) -> Result<ScalingFit, AnalysisError> {
    let groups = group_by(records, |r| r.n);
    if groups.len() < 3 {
        return Err(AnalysisError::TooFewPoints {
            what: "N",
            need: 3,
            got: groups.len(),
        });
    }
    if let Some((n, s)) = groups.iter().find(|(_, s)| s.trials < 30) {
        return Err(AnalysisError::TooFewTrials {
            what: "N",
            value: *n,
            got: s.trials,
            need: 30,
        });
    }
    let points: Vec<(usize, f64)> = groups.iter().map(|(n, s)| (*n, s.mean_total)).collect();
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, m)| ((n as f64).log2(), m.log2()))
        .collect();
    let (slope, intercept) = fit_log_log(&logs);
    Ok(ScalingFit {
        slope,
        intercept,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub k: usize,
    /// Mean table entries.
    pub space: f64,
    /// Mean total queries.
    pub time: f64,
    pub time_std_err: f64,
    /// `S·T² / |F(X)|`.
    pub ratio: f64,
    /// `S·(T + 3·se)² < |F(X)|`.
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffReport {
    pub n: usize,
    pub r: usize,
    /// `N / r`.
    pub image_size: usize,
    pub points: Vec<TradeoffPoint>,
    pub min_ratio: f64,
    pub violations: usize,
}

/// Checks `S·T² >= |F(X)|` at every `k` of a sweep at fixed `(N, r)`, allowing
/// three standard errors of slack on `T`.
pub fn tradeoff_check(records: &[ExperimentRecord]) -> Result<TradeoffReport, AnalysisError> {
    let n = single_value(records, "N", |r| r.n)?;
    let r = single_value(records, "r", |r| r.r)?;
    let image_size = n / r;
    let points: Vec<TradeoffPoint> = group_by(records, |rec| rec.k)
        .into_iter()
        .map(|(k, s)| {
            let st2 = s.mean_space * s.mean_total.powi(2);
            let upper = s.mean_space * (s.mean_total + 3.0 * s.std_err).powi(2);
            TradeoffPoint {
                k,
                space: s.mean_space,
                time: s.mean_total,
                time_std_err: s.std_err,
                ratio: st2 / image_size as f64,
                violation: upper < image_size as f64,
            }
        })
        .collect();
    Ok(TradeoffReport {
        n,
        r,
        image_size,
        min_ratio: points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min),
        violations: points.iter().filter(|p| p.violation).count(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalK {
    pub k: usize,
    pub mean_total: f64,
    /// `(N/r)^{1/3}`.
    pub cube_root_target: f64,
    /// `k / target`.
    pub ratio: f64,
}

/// Empirical argmin over `k` of mean total queries at fixed `(N, r)`.
///
/// Needs at least 5 grid points whose range contains `(N/r)^{1/3}`.
pub fn optimal_k_report(records: &[ExperimentRecord]) -> Result<OptimalK, AnalysisError> {
    let n = single_value(records, "N", |r| r.n)?;
    let r = single_value(records, "r", |r| r.r)?;
    let groups = group_by(records, |rec| rec.k);
    if groups.len() < 5 {
        return Err(AnalysisError::TooFewPoints {
            what: "k",
            need: 5,
            got: groups.len(),
        });
    }
    let target = (n as f64 / r as f64).cbrt();
    let (lo, hi) = (groups[0].0, groups[groups.len() - 1].0);
    if !(lo as f64 <= target && target <= hi as f64) {
        return Err(AnalysisError::GridMissesTarget {
            lo,
            hi,
            target: format!("{target:.2}"),
        });
    }
    let (k, best) = groups
        .iter()
        .min_by(|a, b| a.1.mean_total.total_cmp(&b.1.mean_total))
        .expect("nonempty");
    Ok(OptimalK {
        k: *k,
        mean_total: best.mean_total,
        cube_root_target: target,
        ratio: *k as f64 / target,
    })
}

/// Expected running time with per-evaluation cost `t_eval` and a table access
/// costing `log_base_cost · log2 k`:
/// `(k + sqrt(N/(k·r))) · (t_eval + log_base_cost · log2 max(k, 2))`.
pub fn runtime_cost_model(k: usize, n: usize, r: usize, t_eval: f64, log_base_cost: f64) -> f64 {
    let evaluations = k as f64 + (n as f64 / (k as f64 * r as f64)).sqrt();
    evaluations * (t_eval + log_base_cost * (k.max(2) as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Algorithm;

    fn synthetic(n: usize, r: usize, k: usize, trials: usize, cost: impl Fn(usize) -> u64) -> Vec<ExperimentRecord> {
        (0..trials)
            .map(|trial| ExperimentRecord {
                algorithm: Algorithm::Bht,
                n,
                r,
                k,
                seed: 0,
                trial,
                success: true,
                f_queries: cost(trial),
                g_queries: 0,
                total_queries: cost(trial),
                table_space: k,
            })
            .collect()
    }

    #[test]
    fn planted_slopes() {
        let pts: Vec<(f64, f64)> = (10..=20).map(|e| (e as f64, e as f64 / 3.0)).collect();
        let (slope, intercept) = fit_log_log(&pts);
        assert!((slope - 1.0 / 3.0).abs() < 1e-9);
        assert!(intercept.abs() < 1e-9);

        // Exact integer means: N = 2^(6i), queries = N^{1/3} = 4^i and N^{1/2} = 8^i.
        for (root, expect) in [(4u64, 1.0 / 3.0), (8u64, 0.5)] {
            let recs: Vec<_> = (1..=4)
                .flat_map(|i| synthetic(1 << (6 * i), 2, 1, 30, move |_| root.pow(i as u32)))
                .collect();
            let fit = fit_scaling_exponent(&recs).unwrap();
            assert!((fit.slope - expect).abs() < 1e-9, "{}", fit.slope);
        }
    }

    #[test]
    fn scaling_needs_enough_data() {
        let two: Vec<_> = [1024, 2048].iter().flat_map(|&n| synthetic(n, 2, 1, 30, |_| 5)).collect();
        assert!(matches!(fit_scaling_exponent(&two), Err(AnalysisError::TooFewPoints { .. })));
        let thin: Vec<_> = [1024, 2048, 4096].iter().flat_map(|&n| synthetic(n, 2, 1, 29, |_| 5)).collect();
        assert!(matches!(fit_scaling_exponent(&thin), Err(AnalysisError::TooFewTrials { .. })));
    }

    #[test]
    fn full_table_tradeoff() {
        let n = 64;
        let recs = synthetic(n, 2, n, 10, |_| n as u64);
        let rep = tradeoff_check(&recs).unwrap();
        assert_eq!(rep.violations, 0);
        assert!((rep.min_ratio - (n as f64).powi(3) / 32.0).abs() < 1e-9);
    }

    #[test]
    fn synthetic_frontier_holds() {
        let (n, r) = (1usize << 18, 2usize);
        for e in 0..=18 {
            let k = 1usize << e;
            let t = k as f64 + (n as f64 / (r * k) as f64).sqrt();
            assert!(k as f64 * t * t >= (n / r) as f64);
        }
        let recs: Vec<_> = (2..=10)
            .flat_map(|e| {
                let k = 1usize << e;
                let t = (k as f64 + (n as f64 / (r * k) as f64).sqrt()).ceil() as u64;
                synthetic(n, r, k, 5, move |_| t)
            })
            .collect();
        let rep = tradeoff_check(&recs).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.min_ratio >= 1.0);
    }

    #[test]
    fn tradeoff_flags_violations_and_rejects_mixed_n() {
        let mut recs = synthetic(1 << 12, 2, 2, 10, |_| 3);
        let rep = tradeoff_check(&recs).unwrap();
        assert_eq!(rep.violations, 1);
        recs.extend(synthetic(1 << 13, 2, 2, 10, |_| 3));
        assert_eq!(tradeoff_check(&recs), Err(AnalysisError::Mixed("N")));
        assert_eq!(tradeoff_check(&[]), Err(AnalysisError::Empty));
    }

    #[test]
    fn optimal_k_on_planted_curve() {
        let (n, r) = (1usize << 18, 2usize);
        let cost = |k: usize| k as f64 + (n as f64 / (r * k) as f64).sqrt();
        let grid: Vec<usize> = (2..=9).map(|e| 1 << e).collect();
        let recs: Vec<_> = grid
            .iter()
            .flat_map(|&k| synthetic(n, r, k, 3, move |_| (cost(k) * 1000.0).round() as u64))
            .collect();
        let rep = optimal_k_report(&recs).unwrap();
        let direct = *grid.iter().min_by(|a, b| cost(**a).total_cmp(&cost(**b))).unwrap();
        assert_eq!(rep.k, direct);
        assert!((rep.cube_root_target - 2f64.powf(17.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn optimal_k_rejects_degenerate_grids() {
        let n = 1 << 18;
        let few: Vec<_> = [4, 8, 16, 32].iter().flat_map(|&k| synthetic(n, 2, k, 3, |_| 9)).collect();
        assert!(matches!(optimal_k_report(&few), Err(AnalysisError::TooFewPoints { .. })));
        let off: Vec<_> = [1, 2, 3, 4, 5].iter().flat_map(|&k| synthetic(n, 2, k, 3, |_| 9)).collect();
        assert!(matches!(optimal_k_report(&off), Err(AnalysisError::GridMissesTarget { .. })));
    }

    #[test]
    fn runtime_model_values() {
        let v = runtime_cost_model(64, 1 << 18, 2, 1.0, 1.0);
        // (64 + sqrt(2048)) * (1 + 6)
        assert!((v - 764.783_7).abs() < 1e-3, "{v}");
        let k1 = runtime_cost_model(1, 1 << 10, 2, 3.0, 2.0);
        assert!((k1 - (1.0 + 512f64.sqrt()) * (3.0 + 2.0)).abs() < 1e-12);
        let heavy = runtime_cost_model(16, 1 << 16, 4, 1e9, 1.0);
        let queries = 16.0 + (65536.0f64 / 64.0).sqrt();
        assert!((heavy / (queries * 1e9) - 1.0).abs() < 1e-8);
    }
}
