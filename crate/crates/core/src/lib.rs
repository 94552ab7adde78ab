//! Partial-sum and renewal processes built from i.i.d. increments with
//! positive drift, exact evaluation of their Vervaat-type integrals, and
//! Monte Carlo machinery that compares the rescaled processes with their
//! limit laws.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`]: increment laws with analytic moments and seeded sampling.
//! * [`walk`]: random walks that run past the first passage over `n·mu`, and
//!   pointwise evaluation of the averaged and standardized processes.
//! * [`ladder`]: strong ascending ladder decomposition, the ladder renewal
//!   count, the weighted intra-cycle sums and drift estimation.
//! * [`vervaat`]: closed-form integrals of the step processes, the two
//!   representations of the Vervaat process and the Vervaat-error process.
//! * [`limits`]: Wiener paths, the Wiener functional `Z_n`, and samplers for
//!   every limit law.
//! * [`harness`]: two-sample Kolmogorov-Smirnov distances, pointwise
//!   experiments, rate scans and the sup-norm growth diagnostic.
//!
//! ```
//! use vervaat::distributions::{DistributionSpec, DistributionKind};
//! use vervaat::walk::build_walk;
//! use vervaat::vervaat::VervaatEvaluator;
//!
//! let spec = DistributionSpec::new(DistributionKind::Exponential { rate: 1.0 })
//!     .validate()
//!     .unwrap();
//! let path = build_walk(&spec, 1_000, 7).unwrap();
//! let eval = VervaatEvaluator::new(&path);
//! let v = eval.integrate_v(0.5).unwrap();
//! let repr = eval.repr_general(0.5).unwrap();
//! assert!((v.v - repr).abs() < 1e-12);
//! ```

pub mod distributions;
mod error;
pub mod harness;
pub mod ladder;
pub mod limits;
pub mod seed;
pub mod sum;
pub mod vervaat;
pub mod walk;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/processes.md")]
    mod processes {}
    #[doc = include_str!("../../../book/src/ladder.md")]
    mod ladder {}
    #[doc = include_str!("../../../book/src/vervaat.md")]
    mod vervaat {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
