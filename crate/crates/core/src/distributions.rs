//! Increment laws.
//!
//! A [`DistributionSpec`] names a law and its parameters; [`DistributionSpec::validate`]
//! fills in the analytic mean and variance and the sign flags, and rejects laws
//! that do not have a positive mean or (unless explicitly allowed) a positive
//! variance. Every catalog law has a finite fourth moment.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::seed::{self, SimRng};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DistributionKind {
    Exponential { rate: f64 },
    /// `P(X = b) = p`, `P(X = a) = 1 - p`.
    TwoPoint { a: f64, b: f64, p: f64 },
    ShiftedNormal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Deterministic { c: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub kind: DistributionKind,
    #[serde(default)]
    pub allow_degenerate: bool,
}

/// A spec whose moments and flags have been computed from its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidatedSpec {
    pub spec: DistributionSpec,
    pub mu: f64,
    pub sigma2: f64,
    pub m4_finite: bool,
    /// `P(X > 0) = 1`.
    pub as_positive: bool,
    /// `P(X >= 0) = 1`.
    pub as_nonnegative: bool,
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind) -> Self {
        Self {
            kind,
            allow_degenerate: false,
        }
    }

    pub fn degenerate(c: f64) -> Self {
        Self {
            kind: DistributionKind::Deterministic { c },
            allow_degenerate: true,
        }
    }

    pub fn validate(&self) -> Result<ValidatedSpec> {
        validate(self)
    }
}

fn param(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be finite, got {value}"),
        })
    }
}

fn bad(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

pub fn validate(spec: &DistributionSpec) -> Result<ValidatedSpec> {
    use DistributionKind::*;

    let (mu, sigma2, as_positive, as_nonnegative) = match spec.kind {
        Exponential { rate } => {
            let rate = param("rate", rate)?;
            if rate <= 0.0 {
                return Err(bad("rate", "must be positive"));
            }
            (1.0 / rate, 1.0 / (rate * rate), true, true)
        }
        TwoPoint { a, b, p } => {
            let (a, b, p) = (param("a", a)?, param("b", b)?, param("p", p)?);
            if !(p > 0.0 && p < 1.0) {
                return Err(bad("p", format!("must lie in (0, 1), got {p}")));
            }
            if a == b {
                return Err(bad("b", "the two support points must differ"));
            }
            let mu = p * b + (1.0 - p) * a;
            let sigma2 = p * (1.0 - p) * (b - a) * (b - a);
            let lo = a.min(b);
            (mu, sigma2, lo > 0.0, lo >= 0.0)
        }
        ShiftedNormal { mean, sd } => {
            let (mean, sd) = (param("mean", mean)?, param("sd", sd)?);
            if sd < 0.0 {
                return Err(bad("sd", "must be non-negative"));
            }
            if sd == 0.0 {
                (mean, 0.0, mean > 0.0, mean >= 0.0)
            } else {
                (mean, sd * sd, false, false)
            }
        }
        Uniform { lo, hi } => {
            let (lo, hi) = (param("lo", lo)?, param("hi", hi)?);
            if lo >= hi {
                return Err(bad("hi", "must exceed lo"));
            }
            // Draws come from the open interval, so lo = 0 still gives X > 0.
            ((lo + hi) / 2.0, (hi - lo) * (hi - lo) / 12.0, lo >= 0.0, lo >= 0.0)
        }
        Deterministic { c } => {
            let c = param("c", c)?;
            (c, 0.0, c > 0.0, c >= 0.0)
        }
    };

    if mu <= 0.0 {
        return Err(Error::NonPositiveMean { mu });
    }
    if sigma2 == 0.0 && !spec.allow_degenerate {
        return Err(Error::DegenerateVariance);
    }
    Ok(ValidatedSpec {
        spec: *spec,
        mu,
        sigma2,
        m4_finite: true,
        as_positive,
        as_nonnegative,
    })
}

impl ValidatedSpec {
    pub fn kind(&self) -> DistributionKind {
        self.spec.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma2 == 0.0
    }

    /// `E (X - mu)^4`.
    pub fn central_moment4(&self) -> f64 {
        use DistributionKind::*;
        match self.spec.kind {
            Exponential { rate } => 9.0 / rate.powi(4),
            TwoPoint { a, b, p } => {
                let q = 1.0 - p;
                p * q * (b - a).powi(4) * (1.0 - 3.0 * p * q)
            }
            ShiftedNormal { sd, .. } => 3.0 * sd.powi(4),
            Uniform { lo, hi } => (hi - lo).powi(4) / 80.0,
            Deterministic { .. } => 0.0,
        }
    }

    /// Sampler over a fresh stream for `seed`.
    pub fn stream(&self, seed: u64) -> IncrementStream {
        IncrementStream::new(self, seed)
    }
}

/// The standard catalog: one entry per non-degenerate family, covering
/// positive, non-negative-with-atoms-at-zero and signed increments.
pub fn catalog() -> Vec<ValidatedSpec> {
    use DistributionKind::*;
    [
        Exponential { rate: 1.0 },
        TwoPoint {
            a: -1.0,
            b: 1.0,
            p: 0.7,
        },
        TwoPoint {
            a: 0.0,
            b: 2.0,
            p: 0.5,
        },
        ShiftedNormal { mean: 1.0, sd: 1.0 },
        Uniform { lo: 0.0, hi: 2.0 },
    ]
    .into_iter()
    .map(|kind| DistributionSpec::new(kind).validate().expect("catalog entries are valid"))
    .collect()
}

enum Sampler {
    Exp(Exp<f64>),
    Normal(Normal<f64>),
    TwoPoint { a: f64, b: f64, p: f64 },
    Uniform { lo: f64, width: f64 },
    Constant(f64),
}

/// An endless, deterministic sequence of increments for one seed.
///
/// Draws are consumed strictly in order, so any prefix of the stream is
/// independent of how many further values are requested.
pub struct IncrementStream {
    rng: SimRng,
    sampler: Sampler,
}

impl IncrementStream {
    pub fn new(spec: &ValidatedSpec, seed: u64) -> Self {
        use DistributionKind::*;
        let sampler = match spec.spec.kind {
            Exponential { rate } => Sampler::Exp(Exp::new(rate).expect("validated rate")),
            ShiftedNormal { mean, sd } if sd > 0.0 => {
                Sampler::Normal(Normal::new(mean, sd).expect("validated sd"))
            }
            ShiftedNormal { mean, .. } => Sampler::Constant(mean),
            TwoPoint { a, b, p } => Sampler::TwoPoint { a, b, p },
            Uniform { lo, hi } => Sampler::Uniform { lo, width: hi - lo },
            Deterministic { c } => Sampler::Constant(c),
        };
        Self {
            rng: seed::rng(seed),
            sampler,
        }
    }

    #[inline]
    pub fn next_increment(&mut self) -> f64 {
        match &self.sampler {
            Sampler::Exp(d) => d.sample(&mut self.rng),
            Sampler::Normal(d) => d.sample(&mut self.rng),
            Sampler::TwoPoint { a, b, p } => {
                if self.rng.random::<f64>() < *p {
                    *b
                } else {
                    *a
                }
            }
            Sampler::Uniform { lo, width } => {
                let u: f64 = self.rng.sample(Open01);
                lo + width * u
            }
            Sampler::Constant(c) => *c,
        }
    }

    pub fn fill(&mut self, out: &mut Vec<f64>, count: usize) {
        out.reserve(count);
        for _ in 0..count {
            out.push(self.next_increment());
        }
    }
}

/// `count` i.i.d. increments, a deterministic function of `(spec, count, seed)`.
pub fn sample_increments(spec: &ValidatedSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    spec.stream(seed).fill(&mut out, count);
    Ok(out)
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DistributionKind::*;
        match self.kind {
            Exponential { rate } => write!(f, "exp:{rate}"),
            TwoPoint { a, b, p } => write!(f, "twopoint:{a},{b},{p}"),
            ShiftedNormal { mean, sd } => write!(f, "normal:{mean},{sd}"),
            Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            Deterministic { c } => write!(f, "det:{c}"),
        }
    }
}

/// Parses either a JSON object (`{"kind": ..., "params": {...}}`) or the
/// shorthand forms `exp:RATE`, `twopoint:A,B,P`, `normal:MEAN,SD`,
/// `uniform:LO,HI` and `det:C` (which implies `allow_degenerate`).
impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let fail = |reason: String| Error::ParseDistribution {
            input: s.to_string(),
            reason,
        };
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| fail(e.to_string()));
        }
        let (name, args) = s
            .split_once(':')
            .ok_or_else(|| fail("expected NAME:PARAMS".into()))?;
        let args = args
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|e| fail(format!("`{a}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let want = |k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(fail(format!("`{name}` takes {k} parameter(s), got {}", args.len())))
            }
        };
        use DistributionKind::*;
        let spec = match name.to_ascii_lowercase().as_str() {
            "exp" | "exponential" => {
                want(1)?;
                DistributionSpec::new(Exponential { rate: args[0] })
            }
            "twopoint" | "two_point" => {
                want(3)?;
                DistributionSpec::new(TwoPoint {
                    a: args[0],
                    b: args[1],
                    p: args[2],
                })
            }
            "normal" | "shifted_normal" => {
                want(2)?;
                DistributionSpec::new(ShiftedNormal {
                    mean: args[0],
                    sd: args[1],
                })
            }
            "uniform" => {
                want(2)?;
                DistributionSpec::new(Uniform {
                    lo: args[0],
                    hi: args[1],
                })
            }
            "det" | "deterministic" => {
                want(1)?;
                DistributionSpec::degenerate(args[0])
            }
            other => return Err(fail(format!("unknown distribution `{other}`"))),
        };
        Ok(spec)
    }
}
