//! Physical-layer security analysis of an RIS-assisted wiretap channel with a
//! friendly jammer.
//!
//! A source talks to a destination through a reconfigurable intelligent
//! surface (RIS) whose phases are tuned for the destination; a cooperating
//! jammer radiates artificial noise through the same surface, degrading a
//! passive eavesdropper that cannot cancel it. This crate computes the
//! secrecy outage probability (SOP) of that system three independent ways and
//! finds the transmit/jamming power split that minimizes it:
//!
//! - [`analytic::sop_exact_quadrature`] — adaptive quadrature of the outage
//!   integral over the fading model, the internal truth standard;
//! - [`analytic::sop_closed_form`] — closed form built from a three-term
//!   exponential Q-function approximation, exponential integrals, and the
//!   incomplete gamma function;
//! - [`analytic::sop_compact`] — a large-N compact form that exposes how the
//!   SOP scales with each system parameter;
//! - [`montecarlo::estimate_sop`] — reproducible Monte Carlo simulation of
//!   the physical channel draws, sharded with a counter-based RNG;
//! - [`optimizer::alpha_star_closed_form`] — the closed-form optimal power
//!   allocation factor, with golden-section and grid minimizers as
//!   independent cross-checks.
//!
//! The [`sweep`] module reproduces the experiment grids behind the usual
//! figures (SOP vs SNR, distance ratios, optimal allocation trends) as CSV,
//! and [`validate`] runs the full cross-method consistency harness.

pub mod analytic;
pub mod channel;
pub mod integrate;
pub mod montecarlo;
pub mod numerics;
pub mod optimizer;
pub mod sweep;
pub mod validate;

pub use channel::{LinkStats, SystemConfig};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to converge or produced a non-finite value.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A configuration violated its invariants or could not be parsed.
    #[error("invalid config: {0}")]
    Config(String),
    /// A grid objective was not unimodal; carries the scan for diagnosis.
    #[error("objective not unimodal on scan grid ({} points); first values: {}", scan.len(), format_scan(scan))]
    NonUnimodal { scan: Vec<(f64, f64)> },
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_scan(scan: &[(f64, f64)]) -> String {
    scan.iter()
        .take(8)
        .map(|(a, v)| format!("({a:.4}, {v:.3e})"))
        .collect::<Vec<_>>()
        .join(", ")
}
