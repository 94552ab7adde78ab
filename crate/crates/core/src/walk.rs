//! Random walks and the averaged/standardized processes built from them.
//!
//! For scale `n` the walk is sampled until its first passage over `n·mu`,
//! which makes `N(n·mu·t)` available for every `t` in `[0, 1]`. All process
//! values are exact at any `t`; nothing is interpolated.

use std::io::Write;

use serde::Serialize;

use crate::distributions::ValidatedSpec;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Values of `n·t` within this distance below an integer are treated as that
/// integer when taking `[n·t]`.
pub const FLOOR_SNAP: f64 = 1e-9;

const BLOCK: usize = 1024;

/// `[x]` with breakpoint snapping.
#[inline]
pub fn snapped_floor(x: f64) -> usize {
    let c = x.ceil();
    let k = if c - x < FLOOR_SNAP { c } else { x.floor() };
    k.max(0.0) as usize
}

#[derive(Clone, Debug)]
pub struct WalkPath {
    spec: ValidatedSpec,
    n: usize,
    increments: Vec<f64>,
    /// `S_0 = 0, S_1, ..., S_m`.
    partial_sums: Vec<f64>,
    /// `running_max[k - 1] = max(S_1, ..., S_k)`.
    running_max: Vec<f64>,
}

/// Default length cap: `100·n·max(1/mu, 1)`.
pub fn default_cap(spec: &ValidatedSpec, n: usize) -> usize {
    let cap = 100.0 * n as f64 * (1.0 / spec.mu).max(1.0);
    cap.min(usize::MAX as f64 / 2.0).ceil() as usize
}

/// Samples increments until `S_m > n·mu` has happened and `m >= n`, so that
/// both `S_[nt]` and `N(n mu t)` exist for every `t` in `[0, 1]`.
pub fn build_walk(spec: &ValidatedSpec, n: usize, seed: u64) -> Result<WalkPath> {
    build_walk_with_cap(spec, n, seed, default_cap(spec, n))
}

pub fn build_walk_with_cap(spec: &ValidatedSpec, n: usize, seed: u64, cap: usize) -> Result<WalkPath> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let level = n as f64 * spec.mu;
    let mut stream = spec.stream(seed);
    let mut increments = Vec::with_capacity(n + n / 8 + 16);
    let mut partial_sums = Vec::with_capacity(n + n / 8 + 17);
    let mut acc = NeumaierSum::new();
    partial_sums.push(0.0);
    let mut block = Vec::with_capacity(BLOCK);
    let mut passed = false;
    'outer: loop {
        block.clear();
        stream.fill(&mut block, BLOCK);
        for &x in &block {
            if increments.len() >= cap {
                return Err(Error::WalkCapExceeded { cap, level });
            }
            increments.push(x);
            acc.add(x);
            let s = acc.value();
            partial_sums.push(s);
            passed |= s > level;
            if passed && increments.len() >= n {
                break 'outer;
            }
        }
    }
    Ok(WalkPath::assemble(*spec, n, increments, partial_sums))
}

impl WalkPath {
    /// Wraps explicit increments; used for hand-built paths. No coverage
    /// requirement is imposed, operations report `PathTooShort` instead.
    pub fn from_increments(spec: ValidatedSpec, n: usize, increments: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if increments.is_empty() {
            return Err(Error::InvalidArgument("path needs at least one increment".into()));
        }
        let mut acc = NeumaierSum::new();
        let mut partial_sums = Vec::with_capacity(increments.len() + 1);
        partial_sums.push(0.0);
        for &x in &increments {
            acc.add(x);
            partial_sums.push(acc.value());
        }
        Ok(Self::assemble(spec, n, increments, partial_sums))
    }

    fn assemble(spec: ValidatedSpec, n: usize, increments: Vec<f64>, partial_sums: Vec<f64>) -> Self {
        let mut running_max = Vec::with_capacity(increments.len());
        let mut best = f64::NEG_INFINITY;
        for &s in &partial_sums[1..] {
            best = best.max(s);
            running_max.push(best);
        }
        Self {
            spec,
            n,
            increments,
            partial_sums,
            running_max,
        }
    }

    pub fn spec(&self) -> &ValidatedSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.spec.mu
    }

    /// Number of increments `m`.
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// `S_0, ..., S_m`.
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    pub fn max_partial_sum(&self) -> f64 {
        *self.running_max.last().expect("non-empty path")
    }

    /// `N(level) = min{k >= 1 : S_k > level}`.
    pub fn first_passage(&self, level: f64) -> Result<usize> {
        let max = self.max_partial_sum();
        if !(level < max) {
            return Err(Error::PathTooShort { level, max });
        }
        Ok(self.running_max.partition_point(|&m| m <= level) + 1)
    }

    /// `S_n(t) = S_[nt] / (n·mu)`.
    pub fn averaged_sum(&self, t: f64) -> Result<f64> {
        let k = snapped_floor(self.n as f64 * t);
        let s = self.partial_sums.get(k).ok_or(Error::PathTooShort {
            level: t,
            max: (self.len() as f64) / self.n as f64,
        })?;
        Ok(s / (self.n as f64 * self.mu()))
    }

    /// `N_n(t) = N(n·mu·t) / n`.
    pub fn averaged_renewal(&self, t: f64) -> Result<f64> {
        let level = self.n as f64 * self.mu() * t;
        Ok(self.first_passage(level)? as f64 / self.n as f64)
    }

    /// `sup_{0<=t<=1} |R_n*(t)|`, computed exactly over all breakpoints.
    ///
    /// In the time scale `u = n·t`, `R_n*` is proportional to
    /// `S_[u] + mu·N(mu·u) - 2·mu·u`, which decreases linearly between the
    /// integer breakpoints and the ladder levels `S_{nu_j} / mu`, so the
    /// supremum of its modulus is attained at a right value or a left limit
    /// of some piece.
    pub fn sup_abs_remainder(&self) -> Result<f64> {
        let sigma = self.spec.sigma();
        if sigma == 0.0 {
            return Err(Error::StandardizationUndefined);
        }
        let mu = self.mu();
        let n = self.n;
        let end = n as f64;
        // Ladder records: strictly increasing running maxima and their epochs.
        let mut record_epochs = Vec::new();
        let mut record_levels = Vec::new();
        let mut best = 0.0;
        for (k, &s) in self.partial_sums.iter().enumerate().skip(1) {
            if s > best {
                best = s;
                record_epochs.push(k);
                record_levels.push(s);
            }
        }
        if !(mu * end < best) {
            return Err(Error::PathTooShort {
                level: mu * end,
                max: best,
            });
        }
        let s = &self.partial_sums;
        let g = |k: usize, j: usize, u: f64| s[k] + mu * record_epochs[j] as f64 - 2.0 * mu * u;

        // Current piece: [u0, next) with floor index k and N = record_epochs[j].
        let mut u0 = 0.0;
        let mut k = 0usize;
        let mut j = 0usize;
        let mut sup = 0.0f64;
        loop {
            let next_int = (k + 1) as f64;
            let next_rec = record_levels[j] / mu;
            let next = next_int.min(next_rec).min(end);
            sup = sup.max(g(k, j, u0).abs()).max(g(k, j, next).abs());
            if next >= end {
                break;
            }
            if next_int <= next_rec {
                k += 1;
            }
            if next_rec <= next_int {
                j += 1;
            }
            u0 = next;
        }
        // Value at t = 1 itself.
        let k_end = n;
        let j_end = record_levels.partition_point(|&l| l <= mu * end);
        sup = sup.max(g(k_end, j_end, end).abs());
        Ok(sup / ((n as f64).sqrt() * sigma))
    }
}

/// Evaluation points in `[0, 1]`, nondecreasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid(Vec<f64>);

impl Grid {
    /// `{k/K : k = 0..=K}`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("grid size must be at least 1".into()));
        }
        Ok(Self((0..=k).map(|i| i as f64 / k as f64).collect()))
    }

    /// `{k/K : k = 1..=K}`, the uniform grid without the origin.
    pub fn uniform_positive(k: usize) -> Result<Self> {
        let mut g = Self::uniform(k)?;
        g.0.remove(0);
        Ok(g)
    }

    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidArgument("grid points must lie in [0, 1]".into()));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("grid must be nondecreasing".into()));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

/// All first-section processes at one time point. Standardized fields are
/// `None` when they were not requested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProcessPoint {
    pub t: f64,
    /// `S_n(t)`
    pub sum_avg: f64,
    /// `s_n(t)`
    pub sum_std: Option<f64>,
    /// `N_n(t)`
    pub renewal_avg: f64,
    /// `r_n(t)`
    pub renewal_std: Option<f64>,
    pub bar_s: f64,
    pub bar_n: f64,
    /// `M_n(t) = barS + barN`
    pub m: f64,
    /// `R_n*(t) = s_n + r_n`
    pub r_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProcessGrid {
    pub points: Vec<ProcessPoint>,
}

pub fn eval_point(path: &WalkPath, t: f64, standardized: bool) -> Result<ProcessPoint> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
    }
    let scale = if standardized {
        let sigma = path.spec.sigma();
        if sigma == 0.0 {
            return Err(Error::StandardizationUndefined);
        }
        Some((path.n as f64).sqrt() * path.mu() / sigma)
    } else {
        None
    };
    let sum_avg = path.averaged_sum(t)?;
    let renewal_avg = path.averaged_renewal(t)?;
    let bar_s = sum_avg - t;
    let bar_n = renewal_avg - t;
    let sum_std = scale.map(|c| c * bar_s);
    let renewal_std = scale.map(|c| c * bar_n);
    Ok(ProcessPoint {
        t,
        sum_avg,
        sum_std,
        renewal_avg,
        renewal_std,
        bar_s,
        bar_n,
        m: bar_s + bar_n,
        r_star: sum_std.zip(renewal_std).map(|(s, r)| s + r),
    })
}

pub fn eval_processes(path: &WalkPath, grid: &Grid, standardized: bool) -> Result<ProcessGrid> {
    let points = grid
        .points()
        .iter()
        .map(|&t| eval_point(path, t, standardized))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProcessGrid { points })
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ProcessGrid {
    pub const CSV_HEADER: &'static str = "t,Sn,sn,Nn,rn,barS,barN,Mn,Rstar";

    /// Writes the header and one row per grid point; standardized fields must
    /// be present.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            let (Some(sn), Some(rn), Some(rs)) = (p.sum_std, p.renewal_std, p.r_star) else {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    "standardized fields missing",
                ));
            };
            let row = [p.t, p.sum_avg, sn, p.renewal_avg, rn, p.bar_s, p.bar_n, p.m, rs];
            let row: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{catalog, DistributionKind, DistributionSpec};
    use proptest::prelude::*;

    fn unit() -> ValidatedSpec {
        DistributionSpec::degenerate(1.0).validate().unwrap()
    }

    fn two_point() -> ValidatedSpec {
        catalog()[1]
    }

    #[test]
    fn unit_steps_walk() {
        let p = build_walk(&unit(), 4, 0).unwrap();
        assert_eq!(p.partial_sums(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(p.len(), 5);
    }

    #[test]
    fn length_is_minimal() {
        for seed in 0..50 {
            let p = build_walk(&two_point(), 100, seed).unwrap();
            let s = p.partial_sums();
            let level = 100.0 * p.mu();
            let first = s.iter().position(|&x| x > level).unwrap();
            assert_eq!(p.len(), first.max(100));
            assert!(p.len() >= 41);
            for k in 1..s.len() {
                assert!((s[k] - s[k - 1] - p.increments()[k - 1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn elementary_renewal_over_seeds() {
        let spec = catalog()[0];
        let ratios: Vec<f64> = (0..100)
            .map(|seed| {
                let p = build_walk(&spec, 1000, seed).unwrap();
                p.first_passage(1000.0).unwrap() as f64 / 1000.0
            })
            .collect();
        // N(n)/n has mean 1 + 1/n and standard deviation n^{-1/2} here.
        let mean = ratios.iter().sum::<f64>() / 100.0;
        assert!((mean - 1.001).abs() < 0.013, "{mean}");
        assert!(ratios.iter().all(|r| (r - 1.0).abs() < 0.16));
    }

    #[test]
    fn covers_n_steps_even_after_early_passage() {
        let spec = DistributionSpec::new(DistributionKind::Exponential { rate: 0.5 }).validate().unwrap();
        for seed in 0..200 {
            let p = build_walk(&spec, 3, seed).unwrap();
            assert!(p.len() >= 3);
            assert!(p.max_partial_sum() > 3.0 * spec.mu);
            let first = p.first_passage(3.0 * spec.mu).unwrap();
            assert!(p.len() == first.max(3));
        }
    }

    #[test]
    fn cap_reports_misspecified_walk() {
        let err = build_walk_with_cap(&two_point(), 1000, 1, 10).unwrap_err();
        assert!(matches!(err, Error::WalkCapExceeded { cap: 10, .. }));
    }

    #[test]
    fn first_passage_examples() {
        let p = WalkPath::from_increments(two_point(), 1, vec![2.0, -1.0, 3.0]).unwrap();
        assert_eq!(p.first_passage(1.5).unwrap(), 1);
        assert_eq!(p.first_passage(2.0).unwrap(), 3);
        assert!(matches!(p.first_passage(4.0), Err(Error::PathTooShort { .. })));
        let u = build_walk(&unit(), 4, 0).unwrap();
        assert_eq!(u.first_passage(3.0).unwrap(), 4);
        assert_eq!(u.first_passage(2.5).unwrap(), 3);
        assert_eq!(u.first_passage(-3.0).unwrap(), 1);
    }

    #[test]
    fn unit_steps_at_one() {
        let p = build_walk(&unit(), 4, 0).unwrap();
        let pt = eval_point(&p, 1.0, false).unwrap();
        assert_eq!(pt.bar_s, 0.0);
        assert_eq!(pt.bar_n, 0.25);
        assert_eq!(pt.m, 0.25);
        assert!(pt.r_star.is_none());
        assert_eq!(eval_point(&p, 1.0, true).unwrap_err(), Error::StandardizationUndefined);
    }

    #[test]
    fn origin_values() {
        for spec in catalog() {
            let p = build_walk(&spec, 50, 3).unwrap();
            let pt = eval_point(&p, 0.0, true).unwrap();
            assert_eq!(pt.sum_avg, 0.0);
            assert_eq!(pt.bar_s, 0.0);
            assert!(pt.renewal_avg >= 1.0 / 50.0);
        }
    }

    /// Direct transcription of the definitions, scanning the raw increments.
    fn brute(incs: &[f64], n: usize, mu: f64, sigma: f64, t: f64) -> [f64; 8] {
        let nf = n as f64;
        let k = (nf * t + 1e-9).floor() as usize;
        let s_k: f64 = incs[..k].iter().sum();
        let level = nf * mu * t;
        let mut acc = 0.0;
        let mut big_n = 0;
        for (i, x) in incs.iter().enumerate() {
            acc += x;
            if acc > level {
                big_n = i + 1;
                break;
            }
        }
        let sn = s_k / (nf * mu);
        let nn = big_n as f64 / nf;
        let c = nf.sqrt() * mu / sigma;
        [sn, c * (sn - t), nn, c * (nn - t), sn - t, nn - t, sn - t + nn - t, c * (sn - t + nn - t)]
    }

    #[test]
    fn grid_matches_brute_force_evaluation() {
        let spec = two_point();
        let p = build_walk(&spec, 10, 2024).unwrap();
        let g = eval_processes(&p, &Grid::uniform(64).unwrap(), true).unwrap();
        for pt in &g.points {
            let b = brute(p.increments(), 10, spec.mu, spec.sigma(), pt.t);
            let got = [
                pt.sum_avg,
                pt.sum_std.unwrap(),
                pt.renewal_avg,
                pt.renewal_std.unwrap(),
                pt.bar_s,
                pt.bar_n,
                pt.m,
                pt.r_star.unwrap(),
            ];
            for (x, y) in got.iter().zip(b) {
                assert!((x - y).abs() < 1e-12, "t={} {x} vs {y}", pt.t);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let spec = catalog()[0];
        let p = build_walk(&spec, 100, 1).unwrap();
        let g = eval_processes(&p, &Grid::uniform(64).unwrap(), true).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 66);
        assert_eq!(lines[0], ProcessGrid::CSV_HEADER);
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        assert_eq!(first[1], g.points[0].sum_avg);
    }

    #[test]
    fn sup_remainder_dominates_fine_grid() {
        for spec in catalog() {
            for seed in 0..5 {
                let p = build_walk(&spec, 200, seed).unwrap();
                let exact = p.sup_abs_remainder().unwrap();
                let grid = Grid::uniform(20_000).unwrap();
                let g = eval_processes(&p, &grid, true).unwrap();
                let fine = g.points.iter().map(|q| q.r_star.unwrap().abs()).fold(0.0, f64::max);
                assert!(fine <= exact + 1e-12, "{fine} > {exact}");
                // The fine grid comes within one linear drift step of the supremum.
                let slack = 2.0 * spec.mu * 200.0 / 20_000.0 / (200f64.sqrt() * spec.sigma());
                assert!(exact - fine <= slack + 1e-12, "{:?}: {exact} vs {fine}", spec.spec);
            }
        }
    }

    #[test]
    fn renewal_sandwich_for_positive_increments() {
        let spec = DistributionSpec::new(DistributionKind::Exponential { rate: 2.0 }).validate().unwrap();
        let p = build_walk(&spec, 300, 5).unwrap();
        let s = p.partial_sums();
        for i in 0..500 {
            let level = i as f64 * 0.29;
            if level >= p.max_partial_sum() {
                break;
            }
            let k = p.first_passage(level).unwrap();
            assert!(s[k] > level && s[k - 1] <= level);
        }
    }

    #[test]
    fn snapping() {
        assert_eq!(snapped_floor(2.9999999999), 3);
        assert_eq!(snapped_floor(2.99), 2);
        assert_eq!(snapped_floor(3.0), 3);
        assert_eq!(snapped_floor(0.3 * 10.0), 3);
    }

    proptest! {
        #[test]
        fn identities_hold_pointwise(seed in any::<u64>(), which in 0usize..5, n in 1usize..400) {
            let spec = catalog()[which];
            let p = build_walk(&spec, n, seed).unwrap();
            let g = eval_processes(&p, &Grid::uniform(97).unwrap(), true).unwrap();
            let c = (n as f64).sqrt() * spec.mu / spec.sigma();
            let mut prev = 0.0;
            for q in &g.points {
                prop_assert!(p.partial_sums()[p.first_passage(n as f64 * spec.mu * q.t).unwrap()] > n as f64 * spec.mu * q.t);
                prop_assert!((q.r_star.unwrap() - (q.sum_std.unwrap() + q.renewal_std.unwrap())).abs() < 1e-12);
                prop_assert!((q.m - q.r_star.unwrap() / c).abs() < 1e-12);
                prop_assert!(q.renewal_avg >= prev);
                prev = q.renewal_avg;
            }
        }
    }
}
