//! Strong ascending ladder structure of a walk.
//!
//! `nu_0 = 0` and `nu_i` is the first index after `nu_{i-1}` at which the walk
//! strictly exceeds `S_{nu_{i-1}}`. Between two ladder epochs the walk stays at
//! or below its previous record; the weighted sums `D_i` measure the area it
//! spends there, and their ratio to the mean ladder height is the drift of the
//! Vervaat process for general renewals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::ValidatedSpec;
use crate::seed;
use crate::sum::{prefix_sums, NeumaierSum};
use crate::walk::WalkPath;
use crate::{Error, Result};

/// Which weighting of the intra-cycle increments defines `D_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DConvention {
    /// `D_i = Σ_{j=1}^{g-1} (g - j) X_{nu_{i-1}+j}` with `g = nu_i - nu_{i-1}`,
    /// the sum that makes the renewal integral identity exact.
    #[default]
    InnerSum,
    /// `D_i = Σ_{j=2}^{g} (g - j) X_{nu_{i-1}+j-1}`, the same weights shifted
    /// by one index.
    Shifted,
}

impl DConvention {
    /// `D` from the within-cycle partial sums `S_{nu+k} - S_nu`, `k = 1..g-1`
    /// (all non-positive). The inner sum is their total; the shifted sum drops
    /// the last one.
    fn cycle_weight(self, rel: &[f64]) -> f64 {
        let take = match self {
            DConvention::InnerSum => rel.len(),
            DConvention::Shifted => rel.len().saturating_sub(1),
        };
        rel[..take].iter().copied().sum::<NeumaierSum>().value()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderDecomposition {
    /// `nu_0 = 0 < nu_1 < ... < nu_L`.
    epochs: Vec<usize>,
    /// `S_{nu_0} = 0, S_{nu_1}, ..., S_{nu_L}`.
    levels: Vec<f64>,
    /// `H_i`, `i = 1..L`.
    heights: Vec<f64>,
    /// `D_i`, `i = 1..L`.
    d_values: Vec<f64>,
    convention: DConvention,
    /// `d_prefix[j] = D_1 + ... + D_j`.
    d_prefix: Vec<f64>,
}

pub fn decompose(path: &WalkPath) -> LadderDecomposition {
    decompose_with(path, DConvention::InnerSum)
}

pub fn decompose_with(path: &WalkPath, convention: DConvention) -> LadderDecomposition {
    let s = path.partial_sums();
    let mut epochs = vec![0];
    let mut levels = vec![0.0];
    let mut heights = Vec::new();
    let mut d_values = Vec::new();
    let mut rel = Vec::new();
    let mut record = 0.0;
    for (k, &sk) in s.iter().enumerate().skip(1) {
        if sk > record {
            d_values.push(convention.cycle_weight(&rel));
            heights.push(sk - record);
            epochs.push(k);
            levels.push(sk);
            record = sk;
            rel.clear();
        } else {
            rel.push(sk - record);
        }
    }
    let d_prefix = prefix_sums(d_values.iter().copied());
    LadderDecomposition {
        epochs,
        levels,
        heights,
        d_values,
        convention,
        d_prefix,
    }
}

impl LadderDecomposition {
    /// Number of completed ladder cycles `L`.
    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    /// `nu_0, ..., nu_L`.
    pub fn epochs(&self) -> &[usize] {
        &self.epochs
    }

    /// `S_{nu_0}, ..., S_{nu_L}`.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d_values
    }

    pub fn convention(&self) -> DConvention {
        self.convention
    }

    /// `N_H(level) = min{j : S_{nu_j} > level}`.
    pub fn ladder_count(&self, level: f64) -> Result<usize> {
        let max = *self.levels.last().expect("nu_0 always present");
        if self.is_empty() || !(level < max) {
            return Err(Error::PathTooShort { level, max });
        }
        Ok(self.levels[1..].partition_point(|&l| l <= level) + 1)
    }

    /// `D_1 + ... + D_j`.
    pub fn d_sum(&self, j: usize) -> f64 {
        self.d_prefix[j]
    }
}

/// `N_H(level)`; `path` must be the path `decomp` came from.
pub fn ladder_count(decomp: &LadderDecomposition, _path: &WalkPath, level: f64) -> Result<usize> {
    decomp.ladder_count(level)
}

/// `B_n(t) = (n² mu)^{-1} Σ_{i=1}^{N_H(n mu t)} D_i`.
pub fn compute_b(decomp: &LadderDecomposition, path: &WalkPath, t: f64) -> Result<f64> {
    let n = path.n() as f64;
    let mu = path.mu();
    let l = decomp.ladder_count(n * mu * t)?;
    Ok(decomp.d_sum(l) / (n * n * mu))
}

/// One ladder cycle simulated from a fresh walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderCycle {
    pub epoch: usize,
    pub height: f64,
    pub d: f64,
}

const CYCLE_CAP: usize = 50_000_000;

/// Runs a walk from zero until its first strict ascent.
pub fn simulate_cycle(spec: &ValidatedSpec, seed: u64, convention: DConvention) -> Result<LadderCycle> {
    let mut stream = spec.stream(seed);
    let mut acc = NeumaierSum::new();
    let mut rel = Vec::new();
    for k in 1..=CYCLE_CAP {
        acc.add(stream.next_increment());
        let s = acc.value();
        if s > 0.0 {
            return Ok(LadderCycle {
                epoch: k,
                height: s,
                d: convention.cycle_weight(&rel),
            });
        }
        rel.push(s);
    }
    Err(Error::WalkCapExceeded {
        cap: CYCLE_CAP,
        level: 0.0,
    })
}

/// Independent cycles; cycle `c` runs on `mix(seed, c)`.
pub fn simulate_cycles(
    spec: &ValidatedSpec,
    cycles: usize,
    seed: u64,
    convention: DConvention,
) -> Result<Vec<LadderCycle>> {
    (0..cycles as u64)
        .into_par_iter()
        .map(|c| simulate_cycle(spec, seed::mix(seed, c), convention))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftEstimate {
    pub mu_d_hat: f64,
    pub mu_h_hat: f64,
    pub ratio_hat: f64,
    pub cycles: usize,
    pub std_err_ratio: f64,
    pub std_err_mu_d: f64,
    pub std_err_mu_h: f64,
    /// Mean ladder epoch `E nu_1`.
    pub mean_epoch: f64,
}

impl DriftEstimate {
    pub fn from_cycles(cycles: &[LadderCycle]) -> Result<Self> {
        if cycles.len() < 2 {
            return Err(Error::EmptySample);
        }
        let c = cycles.len() as f64;
        let mean = |f: &dyn Fn(&LadderCycle) -> f64| {
            cycles.iter().map(f).sum::<NeumaierSum>().value() / c
        };
        let mu_d = mean(&|x| x.d);
        let mu_h = mean(&|x| x.height);
        let mean_epoch = mean(&|x| x.epoch as f64);
        let ratio = mu_d / mu_h;
        let var = |f: &dyn Fn(&LadderCycle) -> f64, m: f64| {
            cycles.iter().map(|x| (f(x) - m).powi(2)).sum::<NeumaierSum>().value() / (c - 1.0)
        };
        let var_d = var(&|x| x.d, mu_d);
        let var_h = var(&|x| x.height, mu_h);
        // Delta method: Var(D - ratio·H) / (c · mu_H²).
        let var_lin = var(&|x| x.d - ratio * x.height, 0.0);
        Ok(Self {
            mu_d_hat: mu_d,
            mu_h_hat: mu_h,
            ratio_hat: ratio,
            cycles: cycles.len(),
            std_err_ratio: (var_lin / c).sqrt() / mu_h,
            std_err_mu_d: (var_d / c).sqrt(),
            std_err_mu_h: (var_h / c).sqrt(),
            mean_epoch,
        })
    }
}

pub const MIN_DRIFT_CYCLES: usize = 1000;

/// Monte Carlo estimate of `mu_D / mu_H` from independent ladder cycles.
pub fn estimate_drift_ratio(spec: &ValidatedSpec, cycles: usize, seed: u64) -> Result<DriftEstimate> {
    estimate_drift_ratio_with(spec, cycles, seed, DConvention::InnerSum)
}

pub fn estimate_drift_ratio_with(
    spec: &ValidatedSpec,
    cycles: usize,
    seed: u64,
    convention: DConvention,
) -> Result<DriftEstimate> {
    if cycles < MIN_DRIFT_CYCLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_DRIFT_CYCLES} cycles, got {cycles}"
        )));
    }
    DriftEstimate::from_cycles(&simulate_cycles(spec, cycles, seed, convention)?)
}

/// Exact ladder moments of a lattice two-point walk, by dynamic programming.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderOracle {
    pub mu_d: f64,
    pub mu_h: f64,
    pub mean_epoch: f64,
    /// Probability that the first ascent takes more than `depth` steps.
    pub truncation_mass: f64,
    pub depth: usize,
}

pub const DEFAULT_ORACLE_DEPTH: usize = 600;

/// Enumerates all paths of a walk with steps `a < 0 < b` (integers) up to
/// `depth` steps, tracking the probability mass and the accumulated
/// `Σ_{k<nu} S_k` of paths that have not yet ascended above zero.
pub fn two_point_ladder_oracle(a: f64, b: f64, p: f64, depth: usize) -> Result<LadderOracle> {
    let (down, up) = (a.min(b), a.max(b));
    let p_up = if b > a { p } else { 1.0 - p };
    if down.fract() != 0.0 || up.fract() != 0.0 || !(down < 0.0 && up > 0.0) {
        return Err(Error::InvalidArgument(
            "oracle needs integer steps a < 0 < b".into(),
        ));
    }
    if !(p > 0.0 && p < 1.0) || depth == 0 {
        return Err(Error::InvalidArgument("need p in (0,1) and depth >= 1".into()));
    }
    let (down, up) = (down as i64, up as i64);
    // Heights h <= 0 are stored at index -h.
    let width = (depth as i64 * -down + 1) as usize;
    let mut mass = vec![0.0f64; width];
    let mut area = vec![0.0f64; width];
    let mut next_mass = vec![0.0f64; width];
    let mut next_area = vec![0.0f64; width];
    mass[0] = 1.0;
    let (mut ed, mut eh, mut enu, mut absorbed) =
        (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    let mut reach = 0usize;
    for step in 1..=depth {
        next_mass[..=(reach + (-down) as usize).min(width - 1)].fill(0.0);
        next_area[..=(reach + (-down) as usize).min(width - 1)].fill(0.0);
        for idx in 0..=reach {
            let m = mass[idx];
            if m == 0.0 {
                continue;
            }
            let h = -(idx as i64);
            let ar = area[idx];
            for (dh, q) in [(up, p_up), (down, 1.0 - p_up)] {
                let h2 = h + dh;
                let w = m * q;
                if h2 > 0 {
                    absorbed += w;
                    ed += ar * q;
                    eh += w * h2 as f64;
                    enu += w * step as f64;
                } else {
                    let j = (-h2) as usize;
                    next_mass[j] += w;
                    next_area[j] += (ar + m * h2 as f64) * q;
                }
            }
        }
        reach = (reach + (-down) as usize).min(width - 1);
        std::mem::swap(&mut mass, &mut next_mass);
        std::mem::swap(&mut area, &mut next_area);
    }
    Ok(LadderOracle {
        mu_d: ed.value(),
        mu_h: eh.value(),
        mean_epoch: enu.value(),
        truncation_mass: 1.0 - absorbed.value(),
        depth,
    })
}
