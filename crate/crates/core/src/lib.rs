//! Work output and efficiency of N-level quantum Otto engines in the
//! ultra-hot regime.
//!
//! The working substance is a single N-level particle coupled alternately
//! to a hot and a cold bath. Between the thermal strokes the level
//! structure is rescaled uniformly by the compression deviation `chi`
//! (cold levels = (1-chi) * hot levels), and each thermal stroke relaxes
//! the populations toward the bath's Gibbs vector by a partial swap with
//! strength `xi`.
//!
//! The crate provides:
//!
//! - [`spectra`]: zero-mean level vectors, norms, uniform compression;
//! - [`cycle`]: the exact limit-cycle computation (the ground truth) plus
//!   the leading-order hot-bath work formula and its next-order correction;
//! - [`constraint`]: a small expression language for constraint functions
//!   `G(|Ec|, |Eh|) = const` with exact first and second partials via
//!   truncated two-variable Taylor arithmetic;
//! - [`optimizer`]: maximization of the leading-order work over `chi`
//!   subject to a constraint, with closed-form oracles for the named
//!   constraint families;
//! - [`universality`]: the small-`eta_c` expansion of the efficiency at
//!   maximal work, classical comparison values, and detection of
//!   constraints that defeat the truncated expansion;
//! - [`cli`]: config ingestion, command dispatch, and CSV/JSON output.

pub mod cli;
pub mod constraint;
pub mod cycle;
mod error;
pub mod numeric;
pub mod optimizer;
pub mod spectra;
pub mod universality;

pub use error::{Error, Result};

/// Central tolerance configuration. All defaults are part of the library
/// contract; the CLI exposes overrides for the solver-facing entries.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Absolute zero-mean check on spectrum levels, scaled by max|level|.
    pub spectrum_zero_mean: f64,
    /// Relative agreement between the cached norm-squared and a recompute.
    pub norm_recompute_rel: f64,
    /// Constraint root solve: |G - g0| <= tol * (1 + |g0|).
    pub constraint_root: f64,
    /// Symmetry test for constraint functions, relative to 1 + |G|.
    pub constraint_symmetry: f64,
    /// Stationarity of the work maximum: |residual| at chi*.
    pub stationarity: f64,
    /// chi*/eta_c above this fraction raises a boundary-proximity warning.
    pub boundary_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            spectrum_zero_mean: 1e-12,
            norm_recompute_rel: 1e-12,
            constraint_root: 1e-12,
            constraint_symmetry: 1e-10,
            stationarity: 1e-9,
            boundary_fraction: 0.999,
        }
    }
}
