//! Monte Carlo experiments.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]: replicate
//! `r` runs on `seed::replicate_seed(seed, r)`, reference draw `i` on
//! `seed::reference_seed(seed, i)`, and results are collected in index order
//! and then sorted, so the report does not depend on the rayon pool it runs
//! in. Comparisons with limit laws use the two-sample Kolmogorov-Smirnov
//! distance against an equally sized reference sample.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, ValidatedSpec};
use crate::ladder::{estimate_drift_ratio, DriftEstimate};
use crate::limits::{self, wiener_path};
use crate::seed;
use crate::vervaat::{ReprResiduals, VervaatEvaluator};
use crate::walk::{build_walk, eval_point, fmt_f64, Grid};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    /// `sup_x |F_a(x) - F_b(x)|`
    pub d: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
}

/// `P(K > lambda) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² lambda²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    // The alternating series is useless for small lambda, where P ~ 1.
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("sample contains NaN".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov-Smirnov distance over the pooled sample points.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        // Advance past every copy of the next pooled value in both samples.
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok(KsResult {
        d,
        p_value: kolmogorov_survival(ne.sqrt() * d),
    })
}

pub fn median(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let v = sorted(xs)?;
    let m = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `n^{1/4} R_n*(t)` against the product-normal limit.
    BkPoint,
    /// `n V_n(t)` against `(sigma/mu)² W(t)²/2 + drift·t`.
    VervaatPoint,
    /// `n^{5/4} Q_n(t)` against its product-normal limit.
    VerrorPoint,
    /// `sup_grid |n V_n|` against `sup_grid |limit path|`.
    VervaatPathSup,
    /// `n^{5/4} Z_n(t)` from Wiener paths against the `Q_n` limit.
    ZnPoint,
    RateScan,
    BkGrowth,
}

impl Statistic {
    fn uses_drift(self) -> bool {
        matches!(
            self,
            Statistic::VervaatPoint | Statistic::VerrorPoint | Statistic::VervaatPathSup | Statistic::RateScan
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum DriftSource {
    /// `mu_D / mu_H = 0`; only valid for non-negative increments.
    ExactZero,
    /// Monte Carlo estimate from independent ladder cycles.
    Estimated { cycles: usize },
}

pub const MIN_REPLICATES: usize = 100;
pub const DEFAULT_GRID: usize = 512;
/// Mesh of the Wiener paths behind `Z_n`.
pub const ZN_MESH: f64 = 1.0 / 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: DistributionSpec,
    pub statistic: Statistic,
    /// Scale for pointwise statistics.
    #[serde(default)]
    pub n: usize,
    /// Geometric scale grid for rate scans and the growth diagnostic.
    #[serde(default)]
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    #[serde(default = "default_t")]
    pub t_eval: f64,
    pub seed: u64,
    #[serde(default = "default_drift")]
    pub drift: DriftSource,
    /// Uniform grid size `K` for supremum statistics.
    #[serde(default = "default_grid")]
    pub grid_size: usize,
}

fn default_t() -> f64 {
    1.0
}

fn default_drift() -> DriftSource {
    DriftSource::ExactZero
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

impl ExperimentConfig {
    pub fn pointwise(spec: DistributionSpec, statistic: Statistic, n: usize, replicates: usize, t: f64, seed: u64) -> Self {
        Self {
            spec,
            statistic,
            n,
            n_grid: Vec::new(),
            replicates,
            t_eval: t,
            seed,
            drift: DriftSource::ExactZero,
            grid_size: DEFAULT_GRID,
        }
    }

    pub fn scan(spec: DistributionSpec, statistic: Statistic, n_grid: Vec<usize>, replicates: usize, seed: u64) -> Self {
        Self {
            spec,
            statistic,
            n: 0,
            n_grid,
            replicates,
            t_eval: 1.0,
            seed,
            drift: DriftSource::ExactZero,
            grid_size: DEFAULT_GRID,
        }
    }

    pub fn with_drift(mut self, drift: DriftSource) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_grid(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    fn check_common(&self) -> Result<ValidatedSpec> {
        let spec = self.spec.validate()?;
        if self.replicates < MIN_REPLICATES {
            return Err(Error::InvalidArgument(format!(
                "replicates must be at least {MIN_REPLICATES}, got {}",
                self.replicates
            )));
        }
        if spec.is_degenerate() {
            return Err(Error::StandardizationUndefined);
        }
        Ok(spec)
    }

    fn check_grid(&self) -> Result<()> {
        let g = &self.n_grid;
        if g.len() < 2 || g.contains(&0) {
            return Err(Error::InvalidArgument("n grid needs at least two positive points".into()));
        }
        let ratio = g[1] as f64 / g[0] as f64;
        let geometric = ratio > 1.0
            && g.windows(2)
                .all(|w| ((w[1] as f64 / w[0] as f64) / ratio - 1.0).abs() < 1e-9);
        if !geometric {
            return Err(Error::InvalidArgument("n grid must be increasing and geometric".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftInfo {
    pub ratio: f64,
    pub estimate: Option<DriftEstimate>,
}

pub fn resolve_drift(config: &ExperimentConfig, spec: &ValidatedSpec) -> Result<DriftInfo> {
    match config.drift {
        DriftSource::ExactZero => {
            if !spec.as_nonnegative {
                return Err(Error::InvalidArgument(
                    "exact zero drift requires non-negative increments; use an estimated drift".into(),
                ));
            }
            Ok(DriftInfo {
                ratio: 0.0,
                estimate: None,
            })
        }
        DriftSource::Estimated { cycles } => {
            let est = estimate_drift_ratio(spec, cycles, seed::drift_seed(config.seed))?;
            Ok(DriftInfo {
                ratio: est.ratio_hat,
                estimate: Some(est),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub n: usize,
    /// Median over replicates of the scaled statistic.
    pub median: f64,
    /// Median of the `(log n)^{-1/2}`-normalized statistic (growth diagnostic).
    pub median_normalized: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateSummary {
    pub strictly_decreasing: bool,
    pub final_over_initial: f64,
    pub slope: f64,
}

impl RateSummary {
    pub const SLOPE_RANGE: (f64, f64) = (-0.45, -0.05);

    pub fn passes(&self) -> bool {
        self.strictly_decreasing
            && self.final_over_initial <= 0.5
            && (Self::SLOPE_RANGE.0..=Self::SLOPE_RANGE.1).contains(&self.slope)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthSummary {
    /// Last over first median of `n^{1/4} ||R_n*||`.
    pub growth_ratio: f64,
    /// `|m_last / m_prev - 1|` for the normalized medians at the two largest `n`.
    pub normalized_change: f64,
    /// Normalized statistic at the largest `n` against `sigma^{1/2} mu^{-1/2} ||W||^{1/2}`.
    pub ks_reference: KsResult,
}

impl GrowthSummary {
    pub const MIN_GROWTH: f64 = 1.15;
    pub const MAX_NORMALIZED_CHANGE: f64 = 0.20;

    pub fn passes(&self) -> bool {
        self.growth_ratio >= Self::MIN_GROWTH && self.normalized_change < Self::MAX_NORMALIZED_CHANGE
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub spec: ValidatedSpec,
    pub statistic_label: String,
    pub drift: Option<DriftInfo>,
    /// Sorted replicate statistics.
    pub empirical: Vec<f64>,
    /// Sorted reference draws.
    pub reference: Vec<f64>,
    pub ks: Option<KsResult>,
    /// Replicates dropped because their statistic was flagged.
    pub excluded_flagged: usize,
    pub scan: Vec<ScanPoint>,
    pub rate: Option<RateSummary>,
    pub growth: Option<GrowthSummary>,
    pub seed_rule: String,
    #[serde(skip)]
    pub runtime: Duration,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig, spec: ValidatedSpec, label: String) -> Self {
        Self {
            config: config.clone(),
            spec,
            statistic_label: label,
            drift: None,
            empirical: Vec::new(),
            reference: Vec::new(),
            ks: None,
            excluded_flagged: 0,
            scan: Vec::new(),
            rate: None,
            growth: None,
            seed_rule: seed::SEED_RULE.to_string(),
            runtime: Duration::ZERO,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One value per line under a header naming the statistic.
    pub fn write_samples_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_samples_csv(w, &self.statistic_label, &self.empirical)
    }
}

pub fn write_samples_csv<W: Write>(mut w: W, header: &str, values: &[f64]) -> std::io::Result<()> {
    writeln!(w, "{header}")?;
    for &v in values {
        writeln!(w, "{}", fmt_f64(v))?;
    }
    Ok(())
}

fn par_collect<T: Send>(count: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..count as u64).into_par_iter().map(f).collect()
}

/// Pointwise (or path-supremum) comparison of a rescaled process with its limit.
pub fn run_pointwise_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let spec = config.check_common()?;
    let t = config.t_eval;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!("t_eval = {t} outside (0, 1]")));
    }
    if config.n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let drift = if config.statistic.uses_drift() {
        Some(resolve_drift(config, &spec)?)
    } else {
        None
    };
    let drift_ratio = drift.map_or(0.0, |d| d.ratio);
    let (sigma, mu) = (spec.sigma(), spec.mu);
    let n = config.n;
    let nf = n as f64;
    let reps = config.replicates;
    let walk = |r: u64| build_walk(&spec, n, seed::replicate_seed(config.seed, r));

    let label;
    let mut excluded = 0;
    let (empirical, reference): (Vec<f64>, Vec<f64>) = match config.statistic {
        Statistic::BkPoint => {
            label = format!("n^(1/4) R_n*({t}), n={n}");
            let emp = par_collect(reps, |r| {
                let p = walk(r)?;
                Ok(nf.powf(0.25) * eval_point(&p, t, true)?.r_star.expect("standardized"))
            })?;
            let refs = par_collect(reps, |i| {
                limits::sample_limit_bk(t, sigma, mu, seed::reference_seed(config.seed, i))
            })?;
            (emp, refs)
        }
        Statistic::VervaatPoint => {
            label = format!("n V_n({t}), n={n}");
            let emp = par_collect(reps, |r| {
                let p = walk(r)?;
                Ok(nf * VervaatEvaluator::new(&p).integrate_v(t)?.v)
            })?;
            let refs = par_collect(reps, |i| {
                limits::sample_limit_vervaat(t, sigma, mu, drift_ratio, seed::reference_seed(config.seed, i))
            })?;
            (emp, refs)
        }
        Statistic::VerrorPoint => {
            label = format!("n^(5/4) Q_n({t}), n={n}");
            let emp = par_collect(reps, |r| {
                let p = walk(r)?;
                Ok(nf.powf(1.25) * VervaatEvaluator::new(&p).compute_q(t, drift_ratio)?)
            })?;
            let refs = par_collect(reps, |i| {
                limits::sample_limit_verror(t, sigma, mu, seed::reference_seed(config.seed, i))
            })?;
            (emp, refs)
        }
        Statistic::VervaatPathSup => {
            let k = config.grid_size;
            let grid = Grid::uniform(k)?;
            label = format!("sup_grid |n V_n|, n={n}, K={k}");
            let emp = par_collect(reps, |r| {
                let p = walk(r)?;
                let e = VervaatEvaluator::new(&p);
                grid.points()
                    .iter()
                    .try_fold(0.0f64, |m, &s| Ok(m.max((nf * e.integrate_v(s)?.v).abs())))
            })?;
            let refs = par_collect(reps, |i| {
                let w = wiener_path(1.0, 1.0 / k as f64, seed::reference_seed(config.seed, i))?;
                let vals = limits::limit_path_vervaat(&w, sigma, mu, drift_ratio, grid.points())?;
                Ok(vals.into_iter().fold(0.0f64, |m, v| m.max(v.abs())))
            })?;
            (emp, refs)
        }
        Statistic::ZnPoint => {
            label = format!("n^(5/4) Z_n({t}), n={n}");
            // W is needed on [n t - c, n t + c] with |c| = (sigma/mu)|W(n t)|.
            let horizon = nf * t + 10.0 * (sigma / mu) * (nf * t).sqrt() + 1.0;
            let draws = par_collect(reps, |i| {
                let w = wiener_path(horizon, ZN_MESH, seed::wiener_seed(config.seed, i))?;
                limits::z_n_functional(&w, nf, sigma, mu, t)
            })?;
            let emp: Vec<f64> = draws
                .iter()
                .filter(|z| !z.flagged)
                .map(|z| nf.powf(1.25) * z.value)
                .collect();
            excluded = draws.len() - emp.len();
            let refs = par_collect(reps, |i| {
                limits::sample_limit_verror(t, sigma, mu, seed::reference_seed(config.seed, i))
            })?;
            (emp, refs)
        }
        Statistic::RateScan | Statistic::BkGrowth => {
            return Err(Error::InvalidArgument(
                "scan statistics run through rate_scan / bk_growth_diagnostic".into(),
            ))
        }
    };
    let mut report = ExperimentReport::new(config, spec, label);
    report.drift = drift;
    report.ks = Some(ks_two_sample(&empirical, &reference)?);
    report.empirical = sorted(&empirical)?;
    report.reference = sorted(&reference)?;
    report.excluded_flagged = excluded;
    report.runtime = started.elapsed();
    Ok(report)
}

/// Medians of `sup_grid |n V_n - (n/2) barS² - drift·t|` across a geometric
/// scale grid, and their log-log slope.
///
/// Replicate `r` uses the same seed at every scale, so the walks for
/// different `n` share their increments (common random numbers).
pub fn rate_scan(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let spec = config.check_common()?;
    config.check_grid()?;
    if config.n_grid.len() < 5 {
        return Err(Error::InvalidArgument("rate scan needs at least 5 scales".into()));
    }
    let drift = resolve_drift(config, &spec)?;
    let grid = Grid::uniform(config.grid_size)?;
    let mut scan = Vec::with_capacity(config.n_grid.len());
    let mut last = Vec::new();
    for &n in &config.n_grid {
        let stats = par_collect(config.replicates, |r| {
            let p = build_walk(&spec, n, seed::replicate_seed(config.seed, r))?;
            let e = VervaatEvaluator::new(&p);
            grid.points().iter().try_fold(0.0f64, |m, &t| {
                Ok(m.max(e.scaled_deviation(t, drift.ratio)?.abs()))
            })
        })?;
        scan.push(ScanPoint {
            n,
            median: median(&stats)?,
            median_normalized: None,
        });
        last = stats;
    }
    let x: Vec<f64> = scan.iter().map(|p| (p.n as f64).ln()).collect();
    let y: Vec<f64> = scan.iter().map(|p| p.median.ln()).collect();
    let summary = RateSummary {
        strictly_decreasing: scan.windows(2).all(|w| w[1].median < w[0].median),
        final_over_initial: scan[scan.len() - 1].median / scan[0].median,
        slope: ls_slope(&x, &y),
    };
    let label = format!(
        "sup_grid |n V_n - (n/2) barS^2 - drift t|, K={}",
        config.grid_size
    );
    let mut report = ExperimentReport::new(config, spec, label);
    report.drift = Some(drift);
    report.empirical = sorted(&last)?;
    report.scan = scan;
    report.rate = Some(summary);
    report.runtime = started.elapsed();
    Ok(report)
}

/// Growth of `n^{1/4} ||R_n*||` against its `(log n)^{1/2}`-normalized
/// version, with the sup-norm taken exactly over all breakpoints.
pub fn bk_growth_diagnostic(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let spec = config.check_common()?;
    config.check_grid()?;
    let mut scan = Vec::with_capacity(config.n_grid.len());
    let mut last = Vec::new();
    for &n in &config.n_grid {
        let nf = n as f64;
        let sups = par_collect(config.replicates, |r| {
            let p = build_walk(&spec, n, seed::replicate_seed(config.seed, r))?;
            Ok(nf.powf(0.25) * p.sup_abs_remainder()?)
        })?;
        let norm = nf.ln().sqrt();
        let normalized: Vec<f64> = sups.iter().map(|s| s / norm).collect();
        scan.push(ScanPoint {
            n,
            median: median(&sups)?,
            median_normalized: Some(median(&normalized)?),
        });
        last = normalized;
    }
    let reference = par_collect(config.replicates, |i| {
        limits::sup_half_norm_reference(spec.sigma(), spec.mu, seed::reference_seed(config.seed, i))
    })?;
    let k = scan.len();
    let normalized = |i: usize| scan[i].median_normalized.expect("set above");
    let growth = GrowthSummary {
        growth_ratio: scan[k - 1].median / scan[0].median,
        normalized_change: (normalized(k - 1) / normalized(k - 2) - 1.0).abs(),
        ks_reference: ks_two_sample(&last, &reference)?,
    };
    let mut report = ExperimentReport::new(config, spec, "n^(1/4) (log n)^(-1/2) ||R_n*||".into());
    report.empirical = sorted(&last)?;
    report.reference = sorted(&reference)?;
    report.ks = Some(growth.ks_reference);
    report.scan = scan;
    report.growth = Some(growth);
    report.runtime = started.elapsed();
    Ok(report)
}

/// Dispatches on `config.statistic`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.statistic {
        Statistic::RateScan => rate_scan(config),
        Statistic::BkGrowth => bk_growth_diagnostic(config),
        _ => run_pointwise_experiment(config),
    }
}

/// Worst residuals of the exact representations over many paths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReprSweep {
    pub spec: ValidatedSpec,
    pub n: usize,
    pub seeds: usize,
    pub grid_size: usize,
    pub base_seed: u64,
    #[serde(flatten)]
    pub residuals: ReprResiduals,
}

/// Checks both representations and the renewal integral identity on the grid
/// `{k/K : k = 1..=K}` for `seeds` walks.
pub fn repr_sweep(spec: &ValidatedSpec, n: usize, seeds: usize, grid_size: usize, base_seed: u64) -> Result<ReprSweep> {
    let grid = Grid::uniform_positive(grid_size)?;
    let per_path = par_collect(seeds, |s| {
        let p = build_walk(spec, n, seed::replicate_seed(base_seed, s))?;
        ReprResiduals::of_path(&p, grid.points())
    })?;
    let residuals = per_path
        .into_iter()
        .fold(ReprResiduals::of_empty(spec.as_positive), ReprResiduals::merge);
    Ok(ReprSweep {
        spec: *spec,
        n,
        seeds,
        grid_size,
        base_seed,
        residuals,
    })
}

impl ReprResiduals {
    fn of_empty(positive: bool) -> Self {
        Self {
            max_abs_residual_ordinary: positive.then_some(0.0),
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::catalog;
    use proptest::prelude::*;

    #[test]
    fn ks_examples() {
        assert_eq!(ks_two_sample(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap().d, 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.5, 2.5]).unwrap().d, 0.5);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0, 5.0]).unwrap().d, 1.0);
        assert_eq!(ks_two_sample(&[1.0, 1.0, 4.0, 4.0], &[1.0, 1.0, 1.0, 4.0]).unwrap().d, 0.25);
        assert_eq!(ks_two_sample(&[], &[1.0]).unwrap_err(), Error::EmptySample);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // P(K > 1.36) ≈ 0.049, P(K > 1.63) ≈ 0.0098.
        assert!((kolmogorov_survival(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.628) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(5.0) < 1e-20);
    }

    #[test]
    fn median_and_slope() {
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 2.5);
        let x = [0.0, 1.0, 2.0];
        assert!((ls_slope(&x, &[1.0, 0.5, 0.0]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let spec = catalog()[1].spec;
        let few = ExperimentConfig::pointwise(spec, Statistic::VervaatPoint, 100, 99, 1.0, 1);
        assert!(run_pointwise_experiment(&few).is_err());
        let zero_drift = ExperimentConfig::pointwise(spec, Statistic::VervaatPoint, 100, 100, 1.0, 1);
        assert!(matches!(run_pointwise_experiment(&zero_drift), Err(Error::InvalidArgument(_))));
        let bad_t = ExperimentConfig::pointwise(catalog()[0].spec, Statistic::BkPoint, 100, 100, 0.0, 1);
        assert!(run_pointwise_experiment(&bad_t).is_err());
        let short = ExperimentConfig::scan(catalog()[0].spec, Statistic::RateScan, vec![256, 512, 1024], 100, 1);
        assert!(rate_scan(&short).is_err());
        let ragged = ExperimentConfig::scan(catalog()[0].spec, Statistic::RateScan, vec![256, 512, 1000, 2048, 4096], 100, 1);
        assert!(rate_scan(&ragged).is_err());
    }

    #[test]
    fn small_experiment_is_reproducible_across_pools() {
        let cfg = ExperimentConfig::pointwise(catalog()[1].spec, Statistic::VerrorPoint, 500, 150, 0.7, 9)
            .with_drift(DriftSource::Estimated { cycles: 2000 });
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_experiment(&cfg).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.empirical.len(), 150);
        assert!(a.drift.unwrap().estimate.is_some());
    }

    #[test]
    fn samples_csv() {
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, "x", &[0.1, -2.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "x");
        assert_eq!(lines[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn sweep_on_small_walks() {
        for spec in catalog() {
            let s = repr_sweep(&spec, 200, 10, 32, 3).unwrap();
            assert!(s.residuals.max_abs_residual_repr <= 1e-9);
            assert!(s.residuals.max_abs_residual_identity <= 1e-9);
        }
    }

    proptest! {
        #[test]
        fn ks_symmetric_and_self_zero(a in prop::collection::vec(-10.0f64..10.0, 1..60), b in prop::collection::vec(-10.0f64..10.0, 1..60)) {
            let ab = ks_two_sample(&a, &b).unwrap().d;
            let ba = ks_two_sample(&b, &a).unwrap().d;
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(ks_two_sample(&a, &a).unwrap().d, 0.0);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
