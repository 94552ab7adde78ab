//! Exact Vervaat-type integrals.
//!
//! Both `barS` and `barN` are step functions minus the identity, so every
//! integral of them reduces to prefix sums over the walk and over its ladder
//! records. [`VervaatEvaluator`] precomputes those prefix sums once per path
//! (with compensated summation) after which each quantity costs a binary
//! search.
//!
//! With `T = N_n(t)`, `F(x) = ∫_0^x barS`, and `ℓ = N_H(n mu t)`:
//!
//! ```text
//! V(t)   = F(t) + ∫_0^t barN
//! A(t)   = ∫_T^t (barS(s) - barS(t)) ds = F(t) - F(T) + (T - t) barS(t)
//! B(t)   = (n² mu)^{-1} (D_1 + ... + D_ℓ)
//! V(t)   = A(t) + B(t) - M(t)²/2 + barS(t)²/2          (general walks)
//! V(t)   = A(t) - barS(t) barN(t) - barN(t)²/2          (positive increments)
//! ```

use serde::Serialize;

use crate::ladder::{decompose, LadderDecomposition};
use crate::sum::prefix_sums;
use crate::walk::{snapped_floor, WalkPath};
use crate::{Error, Result};

/// All per-`t` quantities of the Vervaat decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VervaatValues {
    pub t: f64,
    pub v: f64,
    /// `∫_0^t barS`
    pub int_s: f64,
    /// `∫_0^t barN`
    pub int_n: f64,
    pub a: f64,
    pub b: f64,
    pub q: f64,
}

/// Precomputed prefix structure for exact integration along one path.
pub struct VervaatEvaluator<'a> {
    path: &'a WalkPath,
    ladder: LadderDecomposition,
    /// `sum_prev[k] = S_0 + ... + S_{k-1}`.
    sum_prev: Vec<f64>,
    /// `renewal_area[j] = Σ_{i<=j} nu_i (S_{nu_i} - S_{nu_{i-1}})`.
    renewal_area: Vec<f64>,
    n: f64,
    mu: f64,
}

/// Positions within the walk that a time `t` resolves to.
#[derive(Clone, Copy, Debug)]
struct Located {
    t: f64,
    /// `n·t`
    nt: f64,
    /// `[n t]`
    k: usize,
    /// `ℓ = N_H(n mu t)`
    ell: usize,
}

impl<'a> VervaatEvaluator<'a> {
    pub fn new(path: &'a WalkPath) -> Self {
        Self::with_ladder(path, decompose(path))
    }

    /// Uses an existing decomposition; its `D` convention determines `B`.
    pub fn with_ladder(path: &'a WalkPath, ladder: LadderDecomposition) -> Self {
        let s = path.partial_sums();
        let sum_prev = prefix_sums(s.iter().copied());
        let epochs = ladder.epochs();
        let levels = ladder.levels();
        let renewal_area = prefix_sums(
            (1..epochs.len()).map(|i| epochs[i] as f64 * (levels[i] - levels[i - 1])),
        );
        Self {
            path,
            ladder,
            sum_prev,
            renewal_area,
            n: path.n() as f64,
            mu: path.mu(),
        }
    }

    pub fn ladder(&self) -> &LadderDecomposition {
        &self.ladder
    }

    pub fn path(&self) -> &WalkPath {
        self.path
    }

    fn locate(&self, t: f64) -> Result<Located> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
        }
        let nt = self.n * t;
        let k = snapped_floor(nt);
        let ell = self.ladder.ladder_count(self.n * self.mu * t)?;
        if k >= self.path.partial_sums().len() {
            return Err(Error::PathTooShort {
                level: nt,
                max: self.path.len() as f64,
            });
        }
        Ok(Located { t, nt, k, ell })
    }

    /// `∫_0^{u/n} S_n(s) ds` in units of `(n² mu)^{-1}`, for `u = n x`.
    fn raw_sum_integral(&self, u: f64, k: usize) -> f64 {
        self.sum_prev[k] + (u - k as f64) * self.path.partial_sums()[k]
    }

    /// `F(x)` at `x = u / n` where `[u] = k`.
    fn int_bar_s(&self, u: f64, k: usize) -> f64 {
        let x = u / self.n;
        self.raw_sum_integral(u, k) / (self.n * self.n * self.mu) - 0.5 * x * x
    }

    fn bar_s(&self, loc: &Located) -> f64 {
        self.path.partial_sums()[loc.k] / (self.n * self.mu) - loc.t
    }

    fn renewal_epoch(&self, loc: &Located) -> usize {
        self.ladder.epochs()[loc.ell]
    }

    fn bar_n(&self, loc: &Located) -> f64 {
        self.renewal_epoch(loc) as f64 / self.n - loc.t
    }

    fn int_bar_n(&self, loc: &Located) -> f64 {
        let nu = self.renewal_epoch(loc) as f64;
        let prev_level = self.ladder.levels()[loc.ell - 1];
        let completed = self.renewal_area[loc.ell - 1] / (self.n * self.n * self.mu);
        let partial = nu * (loc.t - prev_level / (self.n * self.mu)) / self.n;
        completed + partial - 0.5 * loc.t * loc.t
    }

    /// `F(N_n(t))`; `N_n(t)` is a multiple of `1/n`, so no rounding enters `[.]`.
    fn int_bar_s_to_renewal(&self, loc: &Located) -> f64 {
        let nu = self.renewal_epoch(loc);
        self.int_bar_s(nu as f64, nu)
    }

    fn a_at(&self, loc: &Located) -> f64 {
        let big_t = self.renewal_epoch(loc) as f64 / self.n;
        self.int_bar_s(loc.nt, loc.k) - self.int_bar_s_to_renewal(loc) + (big_t - loc.t) * self.bar_s(loc)
    }

    fn b_at(&self, loc: &Located) -> f64 {
        self.ladder.d_sum(loc.ell) / (self.n * self.n * self.mu)
    }

    /// `(V, ∫barS, ∫barN)` at `t`.
    pub fn integrate_v(&self, t: f64) -> Result<VervaatSplit> {
        let loc = self.locate(t)?;
        let int_s = self.int_bar_s(loc.nt, loc.k);
        let int_n = self.int_bar_n(&loc);
        Ok(VervaatSplit {
            v: int_s + int_n,
            int_s,
            int_n,
        })
    }

    pub fn bar_s_at(&self, t: f64) -> Result<f64> {
        Ok(self.bar_s(&self.locate(t)?))
    }

    pub fn bar_n_at(&self, t: f64) -> Result<f64> {
        Ok(self.bar_n(&self.locate(t)?))
    }

    /// `A_n(t) = ∫_{N_n(t)}^t (barS(s) - barS(t)) ds`, a signed integral.
    pub fn compute_a(&self, t: f64) -> Result<f64> {
        Ok(self.a_at(&self.locate(t)?))
    }

    pub fn compute_b(&self, t: f64) -> Result<f64> {
        Ok(self.b_at(&self.locate(t)?))
    }

    /// `A - barS·barN - barN²/2`; valid for almost surely positive increments.
    pub fn repr_ordinary(&self, t: f64) -> Result<f64> {
        if !self.path.spec().as_positive {
            return Err(Error::NotOrdinaryRenewal);
        }
        let loc = self.locate(t)?;
        let (s, n) = (self.bar_s(&loc), self.bar_n(&loc));
        Ok(self.a_at(&loc) - s * n - 0.5 * n * n)
    }

    /// `A + B - M²/2 + barS²/2`.
    pub fn repr_general(&self, t: f64) -> Result<f64> {
        let loc = self.locate(t)?;
        let (s, n) = (self.bar_s(&loc), self.bar_n(&loc));
        let m = s + n;
        Ok(self.a_at(&loc) + self.b_at(&loc) - 0.5 * m * m + 0.5 * s * s)
    }

    /// `[∫_0^t barN + ∫_0^{N_n(t)} barS] - [B - barN²/2]`, zero up to rounding.
    pub fn identity_residual(&self, t: f64) -> Result<f64> {
        let loc = self.locate(t)?;
        let n = self.bar_n(&loc);
        let lhs = self.int_bar_n(&loc) + self.int_bar_s_to_renewal(&loc);
        Ok(lhs - (self.b_at(&loc) - 0.5 * n * n))
    }

    /// `Q_n(t) = V - barS²/2 - drift·t/n`.
    ///
    /// The drift enters at the `1/n` scale of `B_n`, so that `n·Q_n` has no
    /// deterministic part.
    pub fn compute_q(&self, t: f64, drift_ratio: f64) -> Result<f64> {
        let loc = self.locate(t)?;
        let v = self.int_bar_s(loc.nt, loc.k) + self.int_bar_n(&loc);
        let s = self.bar_s(&loc);
        Ok(v - 0.5 * s * s - drift_ratio * t / self.n)
    }

    /// `n·V - (n/2)·barS² - drift·t`, the quantity that vanishes in probability.
    pub fn scaled_deviation(&self, t: f64, drift_ratio: f64) -> Result<f64> {
        Ok(self.n * self.compute_q(t, drift_ratio)?)
    }

    pub fn values(&self, t: f64, drift_ratio: f64) -> Result<VervaatValues> {
        let loc = self.locate(t)?;
        let int_s = self.int_bar_s(loc.nt, loc.k);
        let int_n = self.int_bar_n(&loc);
        let v = int_s + int_n;
        let s = self.bar_s(&loc);
        Ok(VervaatValues {
            t,
            v,
            int_s,
            int_n,
            a: self.a_at(&loc),
            b: self.b_at(&loc),
            q: v - 0.5 * s * s - drift_ratio * t / self.n,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VervaatSplit {
    pub v: f64,
    pub int_s: f64,
    pub int_n: f64,
}

pub fn integrate_v(path: &WalkPath, t: f64) -> Result<VervaatSplit> {
    VervaatEvaluator::new(path).integrate_v(t)
}

pub fn compute_a(path: &WalkPath, t: f64) -> Result<f64> {
    VervaatEvaluator::new(path).compute_a(t)
}

pub fn repr_ordinary(path: &WalkPath, t: f64) -> Result<f64> {
    VervaatEvaluator::new(path).repr_ordinary(t)
}

pub fn repr_general(path: &WalkPath, t: f64) -> Result<f64> {
    VervaatEvaluator::new(path).repr_general(t)
}

pub fn identity_residual(path: &WalkPath, t: f64) -> Result<f64> {
    VervaatEvaluator::new(path).identity_residual(t)
}

pub fn compute_q(path: &WalkPath, t: f64, drift_ratio: f64) -> Result<f64> {
    VervaatEvaluator::new(path).compute_q(t, drift_ratio)
}

/// Largest residuals of the representations and the renewal integral
/// identity over a set of paths and grid points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ReprResiduals {
    pub max_abs_residual_repr: f64,
    /// `None` unless the increments are almost surely positive.
    pub max_abs_residual_ordinary: Option<f64>,
    pub max_abs_residual_identity: f64,
}

impl ReprResiduals {
    pub fn of_path(path: &WalkPath, grid: &[f64]) -> Result<Self> {
        let eval = VervaatEvaluator::new(path);
        let positive = path.spec().as_positive;
        let mut out = ReprResiduals {
            max_abs_residual_ordinary: positive.then_some(0.0),
            ..Default::default()
        };
        for &t in grid {
            let v = eval.integrate_v(t)?.v;
            out.max_abs_residual_repr = out.max_abs_residual_repr.max((v - eval.repr_general(t)?).abs());
            out.max_abs_residual_identity = out.max_abs_residual_identity.max(eval.identity_residual(t)?.abs());
            if let Some(m) = out.max_abs_residual_ordinary.as_mut() {
                *m = m.max((v - eval.repr_ordinary(t)?).abs());
            }
        }
        Ok(out)
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            max_abs_residual_repr: self.max_abs_residual_repr.max(other.max_abs_residual_repr),
            max_abs_residual_ordinary: match (self.max_abs_residual_ordinary, other.max_abs_residual_ordinary) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
            max_abs_residual_identity: self.max_abs_residual_identity.max(other.max_abs_residual_identity),
        }
    }
}
