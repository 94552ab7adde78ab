//! Wiener paths and the limit laws of the rescaled processes.
//!
//! Samplers take a seed and are pure. The two pointwise laws are products of
//! powers of independent standard normals:
//!
//! ```text
//! Remainder R_n*:        t^{1/4} sigma^{1/2} mu^{-1/2} · N · |N'|^{1/2}
//! Vervaat error Q_n:     3^{-1/2} (sigma/mu)^{5/2} t^{3/4} · N · |N'|^{3/2}
//! Vervaat V_n (path):    (sigma/mu)² W(t)² / 2 + (mu_D/mu_H) t
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::seed;
use crate::{Error, Result};

/// Mesh of the reference paths used for `sup |W|` on `[0, 1]`.
pub const SUP_REFERENCE_MESH: f64 = 1.0 / 16384.0;

/// Minimum number of trapezoid panels for the `Z_n` integral.
pub const MIN_INNER_STEPS: usize = 256;

/// Brownian motion sampled on `{k·mesh}`, linearly interpolated in between.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WienerPath {
    horizon: f64,
    mesh: f64,
    seed: u64,
    values: Vec<f64>,
}

pub fn wiener_path(horizon: f64, mesh: f64, seed: u64) -> Result<WienerPath> {
    if !(mesh > 0.0 && mesh.is_finite()) || !(horizon >= mesh && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < mesh <= horizon, got mesh {mesh}, horizon {horizon}"
        )));
    }
    let steps = (horizon / mesh - 1e-9).ceil() as usize;
    let sd = mesh.sqrt();
    let mut rng = seed::rng(seed);
    let mut values = Vec::with_capacity(steps + 1);
    let mut w = 0.0;
    values.push(w);
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        values.push(w);
    }
    Ok(WienerPath {
        horizon,
        mesh,
        seed,
        values,
    })
}

impl WienerPath {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Values at the grid points `k·mesh`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right end of the sampled grid (at least `horizon`).
    pub fn coverage(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.mesh
    }

    /// `W(x)` for `x` inside the sampled range.
    pub fn try_value_at(&self, x: f64) -> Option<f64> {
        if !(0.0..=self.coverage()).contains(&x) {
            return None;
        }
        let pos = x / self.mesh;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        Some(self.values[i] + frac * (self.values[i + 1] - self.values[i]))
    }

    /// `W(x)`, with `W = 0` left of the origin and held constant right of the
    /// sampled range.
    pub fn value_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.try_value_at(x).unwrap_or(*self.values.last().expect("non-empty"))
        }
    }

    /// `W_n(t) = n^{-1/2} W(n t)`.
    pub fn w_n(&self, n: f64, t: f64) -> f64 {
        self.value_at(n * t) / n.sqrt()
    }

    /// `Y_n(t) = (sigma / (n mu)) W(n t)`.
    pub fn y_n(&self, n: f64, sigma: f64, mu: f64, t: f64) -> f64 {
        sigma / (n * mu) * self.value_at(n * t)
    }

    /// `max |W|` over the sampled grid points in `[0, upto]`.
    pub fn sup_abs(&self, upto: f64) -> f64 {
        let last = ((upto / self.mesh + 1e-9).floor() as usize).min(self.values.len() - 1);
        self.values[..=last].iter().fold(0.0, |m, w| m.max(w.abs()))
    }
}

/// A value of `Z_n(t)` and whether the integral left the sampled range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZnSample {
    pub value: f64,
    pub flagged: bool,
}

/// `Z_n(t) = ∫_0^{Y_n(t)} (Y_n(t - x) - Y_n(t)) dx`, signed when `Y_n(t) < 0`.
///
/// Substituting `u = n x` gives
/// `(sigma / (n² mu)) ∫_0^c (W(nt - u) - W(nt)) du` with `c = (sigma/mu) W(nt)`,
/// evaluated by the trapezoid rule with at least [`MIN_INNER_STEPS`] panels
/// and at least four panels per path cell.
pub fn z_n_functional(w: &WienerPath, n: f64, sigma: f64, mu: f64, t: f64) -> Result<ZnSample> {
    let cells = |c: f64| (4.0 * c.abs() / w.mesh()).ceil() as usize;
    let c = sigma / mu * w.value_at(n * t);
    z_n_functional_with_steps(w, n, sigma, mu, t, cells(c).max(MIN_INNER_STEPS))
}

pub fn z_n_functional_with_steps(
    w: &WienerPath,
    n: f64,
    sigma: f64,
    mu: f64,
    t: f64,
    steps: usize,
) -> Result<ZnSample> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!("t = {t} outside (0, 1]")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let centre = n * t;
    if centre > w.coverage() {
        return Err(Error::InvalidArgument(format!(
            "Wiener path covers [0, {}] but n t = {centre}",
            w.coverage()
        )));
    }
    let w_centre = w.value_at(centre);
    let c = sigma / mu * w_centre;
    if c == 0.0 {
        return Ok(ZnSample {
            value: 0.0,
            flagged: false,
        });
    }
    let sign = c.signum();
    let len = c.abs();
    let far = centre - sign * len;
    let flagged = far < 0.0 || far > w.coverage();
    let h = len / steps as f64;
    let g = |u: f64| w.value_at(centre - sign * u) - w_centre;
    let mut acc = crate::sum::NeumaierSum::new();
    acc.add(0.5 * g(0.0));
    for i in 1..steps {
        acc.add(g(i as f64 * h));
    }
    acc.add(0.5 * g(len));
    let value = sigma / (n * n * mu) * sign * h * acc.value();
    Ok(ZnSample { value, flagged })
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("t = {t} outside (0, 1]")))
    }
}

fn normal_pair(seed: u64) -> (f64, f64) {
    let mut rng = seed::rng(seed);
    (rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Draw from the pointwise limit of `n^{1/4} R_n*(t)`.
pub fn sample_limit_bk(t: f64, sigma: f64, mu: f64, seed: u64) -> Result<f64> {
    check_t(t)?;
    let (z, z2) = normal_pair(seed);
    Ok(t.powf(0.25) * (sigma / mu).sqrt() * z * z2.abs().sqrt())
}

/// Draw from the pointwise limit of `n^{5/4} Q_n(t)`.
pub fn sample_limit_verror(t: f64, sigma: f64, mu: f64, seed: u64) -> Result<f64> {
    check_t(t)?;
    let (z, z2) = normal_pair(seed);
    Ok((1.0f64 / 3.0).sqrt() * (sigma / mu).powf(2.5) * t.powf(0.75) * z * z2.abs().powf(1.5))
}

/// `(sigma/mu)² W(t)² / 2 + drift·t` on `grid`.
pub fn limit_path_vervaat(
    w: &WienerPath,
    sigma: f64,
    mu: f64,
    drift_ratio: f64,
    grid: &[f64],
) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&t| {
            let wt = w
                .try_value_at(t)
                .ok_or_else(|| Error::InvalidArgument(format!("t = {t} outside the Wiener path")))?;
            let y = sigma / mu * wt;
            Ok(0.5 * y * y + drift_ratio * t)
        })
        .collect()
}

/// Draw of `Z̃(t)` built from a one-step Wiener path on `[0, t]`.
pub fn sample_limit_vervaat(t: f64, sigma: f64, mu: f64, drift_ratio: f64, seed: u64) -> Result<f64> {
    check_t(t)?;
    let w = wiener_path(t, t, seed)?;
    Ok(limit_path_vervaat(&w, sigma, mu, drift_ratio, &[t])?[0])
}

/// `sigma^{1/2} mu^{-1/2} ||W||^{1/2}` with `||W|| = sup_{[0,1]} |W|`.
pub fn sup_half_norm_reference(sigma: f64, mu: f64, seed: u64) -> Result<f64> {
    sup_half_norm_reference_with_mesh(sigma, mu, seed, SUP_REFERENCE_MESH)
}

pub fn sup_half_norm_reference_with_mesh(sigma: f64, mu: f64, seed: u64, mesh: f64) -> Result<f64> {
    let w = wiener_path(1.0, mesh, seed)?;
    Ok((sigma / mu).sqrt() * w.sup_abs(1.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_path() -> WienerPath {
        WienerPath {
            horizon: 10.0,
            mesh: 0.5,
            seed: 0,
            values: vec![0.0; 21],
        }
    }

    #[test]
    fn starts_at_zero_and_interpolates() {
        let w = wiener_path(2.0, 0.25, 4).unwrap();
        assert_eq!(w.values()[0], 0.0);
        assert_eq!(w.values().len(), 9);
        let mid = w.value_at(0.125);
        assert!((mid - 0.5 * w.values()[1]).abs() < 1e-15);
        assert_eq!(w.value_at(-1.0), 0.0);
        assert!(w.try_value_at(2.5).is_none());
    }

    #[test]
    fn bad_mesh() {
        assert!(wiener_path(1.0, 0.0, 1).is_err());
        assert!(wiener_path(0.1, 0.2, 1).is_err());
    }

    #[test]
    fn zero_path_functionals() {
        let w = zero_path();
        assert_eq!(z_n_functional(&w, 4.0, 1.0, 1.0, 1.0).unwrap().value, 0.0);
        assert_eq!(sup_half_norm_reference_from(&w), 0.0);
    }

    fn sup_half_norm_reference_from(w: &WienerPath) -> f64 {
        w.sup_abs(1.0).sqrt()
    }

    #[test]
    fn negative_endpoint_integrates_forward_with_sign() {
        // W linear with slope -1 up to 4 then slope +1: W(4) = -4.
        let values: Vec<f64> = (0..=16)
            .map(|k| {
                let x = k as f64 * 0.5;
                if x <= 4.0 {
                    -x
                } else {
                    -8.0 + x
                }
            })
            .collect();
        let w = WienerPath {
            horizon: 8.0,
            mesh: 0.5,
            seed: 0,
            values,
        };
        // n = 4, t = 1, sigma = mu: c = W(4) = -4, Z = -(1/16) ∫_0^4 (W(4 + v) - W(4)) dv = -(1/16)·8.
        let z = z_n_functional(&w, 4.0, 1.0, 1.0, 1.0).unwrap();
        assert!((z.value + 0.5).abs() < 1e-12, "{}", z.value);
        assert!(!z.flagged);
        // Same thing written with Y_n.
        let y = w.y_n(4.0, 1.0, 1.0, 1.0);
        let steps = 4000;
        let h = y.abs() / steps as f64;
        let direct: f64 = (0..steps)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                w.y_n(4.0, 1.0, 1.0, 1.0 + x) - y
            })
            .sum::<f64>()
            * h;
        assert!((z.value + direct).abs() < 1e-9);
    }

    #[test]
    fn flags_arguments_left_of_origin() {
        let values: Vec<f64> = (0..=4).map(|k| 2.0 * k as f64).collect();
        let w = WienerPath {
            horizon: 2.0,
            mesh: 0.5,
            seed: 0,
            values,
        };
        // W(0.5) = 2 and c = 2 reaches back to 0.5 - 2 < 0.
        let z = z_n_functional(&w, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!(z.flagged);
    }

    #[test]
    fn samplers_are_deterministic_and_scale_in_t() {
        for seed in 0..50 {
            let a = sample_limit_bk(1.0, 1.0, 1.0, seed).unwrap();
            assert_eq!(a, sample_limit_bk(1.0, 1.0, 1.0, seed).unwrap());
            let b = sample_limit_bk(1.0 / 16.0, 1.0, 1.0, seed).unwrap();
            assert!((b - 0.5 * a).abs() < 1e-15);
            let c = sample_limit_verror(1.0, 1.0, 1.0, seed).unwrap();
            let d = sample_limit_verror(1.0 / 16.0, 1.0, 1.0, seed).unwrap();
            assert!((d - c / 8.0).abs() < 1e-15);
        }
        assert!(sample_limit_bk(0.0, 1.0, 1.0, 1).is_err());
        assert!(sample_limit_verror(1.5, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn vervaat_limit_path_basics() {
        let w = wiener_path(1.0, 1.0 / 64.0, 3).unwrap();
        let v = limit_path_vervaat(&w, 1.0, 1.0, 0.0, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(v[0], 0.0);
        let with_drift = limit_path_vervaat(&w, 1.0, 1.0, -2.0, &[0.5]).unwrap();
        assert!((with_drift[0] - (v[1] - 1.0)).abs() < 1e-15);
        assert!(limit_path_vervaat(&w, 1.0, 1.0, 0.0, &[1.5]).is_err());
    }
}
