//! Optimal transmit/jamming power split.
//!
//! Setting the α-derivative of the compact SOP to zero reduces to the
//! quadratic `α²ρζ_RE ζ_SR Γ₀N + α(ρ−1) − (ρ−1) = 0`, whose positive root is
//! the closed-form optimum [`alpha_star_closed_form`]. Because the compact
//! SOP is strictly convex in α (see
//! [`sop_second_derivative`](crate::analytic::sop_second_derivative)), that
//! root is the unique interior minimum, and golden-section search over the
//! same objective must land on it — [`alpha_star_numeric`] provides that
//! cross-check, plus grid-seeded refinement for the quadrature and Monte
//! Carlo objectives where convexity is not certified.

use crate::analytic::{
    beta_exponent, sop_closed_form, sop_compact_from_stats, sop_exact_quadrature,
    sop_second_derivative_from_stats,
};
use crate::channel::{derive_stats, SystemConfig};
use crate::montecarlo::estimate_sop;
use crate::{Error, Result};
use serde::Serialize;

/// Search domain for α: clamped away from the 1/α² and 1/(1−α) singularities.
pub const ALPHA_MIN: f64 = 1e-4;
pub const ALPHA_MAX: f64 = 1.0 - 1e-4;

/// Which SOP evaluator a numeric minimization drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Large-N compact form; certified convex, minimized by golden section.
    Compact,
    /// Closed form (with quadrature fallback out of regime).
    ClosedForm,
    /// Exact outage integral.
    Quadrature,
    /// Empirical SOP with common random numbers across α values.
    MonteCarlo { trials: u64, seed: u64 },
}

/// Outcome of a power allocation comparison at one scenario.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AllocationResult {
    pub alpha_star_closed: f64,
    pub alpha_star_numeric: f64,
    /// Exact (quadrature) SOP at the closed-form optimum.
    pub sop_at_star: f64,
    /// Exact SOP at the equal split α = 0.5.
    pub sop_at_epa: f64,
    /// Γ₀ advantage of optimal over equal allocation at a target SOP level,
    /// when requested.
    pub gain_db: Option<f64>,
}

/// Positive root of the stationarity quadratic:
/// `α* = (−(ρ−1) + √((ρ−1)² + 4ρζ_RE ζ_SR Γ₀N(ρ−1))) / (2ρζ_RE ζ_SR Γ₀N)`.
///
/// Always in (0, 1); independent of ζ_JR and ζ_RD.
pub fn alpha_star_closed_form(cfg: &SystemConfig) -> Result<f64> {
    let rho = cfg.rho();
    if rho <= 1.0 {
        return Err(Error::Domain(format!(
            "rate_threshold must be > 0 (ρ > 1) for the optimal split, got ρ = {rho}"
        )));
    }
    let zeta = cfg.zeta()?;
    let g = rho * zeta.re * zeta.sr * cfg.gamma0_linear() * cfg.n_elements as f64;
    let r1 = rho - 1.0;
    Ok((-r1 + (r1 * r1 + 4.0 * g * r1).sqrt()) / (2.0 * g))
}

/// Golden-section minimization of a unimodal scalar function on `[lo, hi]`.
pub(crate) fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > x_tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// Log-spaced α grid: the optimum migrates toward small α as Γ₀·N grows, so
// uniform spacing would starve that end.
fn log_alpha_grid(points: usize) -> Vec<f64> {
    let lo = ALPHA_MIN.ln();
    let hi = ALPHA_MAX.ln();
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Scan a grid, insist on a single descent-ascent pattern, then refine the
/// bracketing interval by golden section.
pub(crate) fn grid_then_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    grid: &[f64],
    x_tol: f64,
) -> Result<f64> {
    let values: Vec<f64> = grid.iter().map(|&a| f(a)).collect();
    // count falls-to-rise transitions, skipping exact plateaus
    let mut transitions = 0;
    let mut last_sign = 0i8;
    for w in values.windows(2) {
        let sign = match w[1].partial_cmp(&w[0]) {
            Some(std::cmp::Ordering::Greater) => 1,
            Some(std::cmp::Ordering::Less) => -1,
            _ => 0,
        };
        if sign != 0 {
            if last_sign == -1 && sign == 1 {
                transitions += 1;
            }
            last_sign = sign;
        }
    }
    let interior_min = last_sign == 1; // ends ascending: minimum is interior
    if transitions > 1 || (transitions == 1 && !interior_min) {
        return Err(Error::NonUnimodal {
            scan: grid.iter().copied().zip(values).collect(),
        });
    }
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    Ok(golden_section_min(f, lo, hi, x_tol).0)
}

/// Minimize the selected SOP objective over α ∈ [`ALPHA_MIN`, `ALPHA_MAX`].
///
/// The compact objective is certified convex and goes straight to golden
/// section; the others scan a log-spaced grid first and refuse non-unimodal
/// scans with the scan attached for diagnosis.
pub fn alpha_star_numeric(cfg: &SystemConfig, objective: Objective) -> Result<f64> {
    let stats = derive_stats(cfg)?;
    let n = cfg.n_elements;
    match objective {
        Objective::Compact => {
            // convex: golden section over the whole domain
            let mut err = None;
            let x = golden_section_min(
                |a| match sop_compact_from_stats(&stats, n, a) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        f64::INFINITY
                    }
                },
                ALPHA_MIN,
                ALPHA_MAX,
                1e-10,
            )
            .0;
            match err {
                Some(e) => Err(e),
                None => Ok(x),
            }
        }
        Objective::ClosedForm => {
            // λ_SE/λ_JE depend on α, so stats must be re-derived per point
            let mut eval = |a: f64| {
                let mut c = cfg.clone();
                c.alpha = a;
                match sop_closed_form(&c) {
                    Ok(bd) => bd.sop,
                    Err(_) => f64::INFINITY,
                }
            };
            grid_then_refine(&mut eval, &log_alpha_grid(200), 1e-7)
        }
        Objective::Quadrature => {
            let mut eval = |a: f64| {
                let mut c = cfg.clone();
                c.alpha = a;
                sop_exact_quadrature(&c).unwrap_or(f64::INFINITY)
            };
            grid_then_refine(&mut eval, &log_alpha_grid(200), 1e-7)
        }
        Objective::MonteCarlo { trials, seed } => {
            // common random numbers: the same seed for every α keeps the
            // sampled objective smooth enough to scan
            let mut eval = |a: f64| {
                let mut c = cfg.clone();
                c.alpha = a;
                match estimate_sop(&c, trials, seed) {
                    Ok(est) => est.sop_hat,
                    Err(_) => f64::INFINITY,
                }
            };
            grid_then_refine(&mut eval, &log_alpha_grid(48), 1e-4)
        }
    }
}

/// True iff the compact SOP is convex on a uniform α grid by both tests:
/// positive second derivative pointwise and positive second differences.
///
/// The second differences are checked in the log domain. The compact SOP
/// factors as `C·e^{β/α}/(1−α)` with `C > 0` independent of α, so
/// `f(α−h) + f(α+h) > 2f(α)` is equivalent to `e^{L(α−h)−L(α)} +
/// e^{L(α+h)−L(α)} > 2` with `L(α) = β/α − ln(1−α)`; that form stays finite
/// even where `e^{β/α}` itself would overflow (tiny α at low Γ₀·N).
pub fn certify_convexity(cfg: &SystemConfig, grid_points: usize) -> Result<bool> {
    if grid_points < 3 {
        return Err(Error::Domain("grid_points must be ≥ 3".into()));
    }
    let stats = derive_stats(cfg)?;
    let n = cfg.n_elements;
    let step = (ALPHA_MAX - ALPHA_MIN) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| ALPHA_MIN + i as f64 * step)
        .collect();
    for &a in &grid {
        if !(sop_second_derivative_from_stats(&stats, n, a)? > 0.0) {
            return Ok(false);
        }
    }
    let beta = beta_exponent(&stats, n);
    let log_shape = |a: f64| beta / a - (1.0 - a).ln();
    for w in grid.windows(3) {
        let mid = log_shape(w[1]);
        let lo = log_shape(w[0]) - mid;
        let hi = log_shape(w[2]) - mid;
        if !(lo.exp() + hi.exp() > 2.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compare optimal against equal power allocation at one scenario.
///
/// `gain_at_sop`, when given, also computes the Γ₀ advantage at that SOP
/// level via [`opa_gain_db`].
pub fn allocate(
    cfg: &SystemConfig,
    objective: Objective,
    gain_at_sop: Option<f64>,
) -> Result<AllocationResult> {
    let alpha_star_closed = alpha_star_closed_form(cfg)?;
    let alpha_star_numeric = alpha_star_numeric(cfg, objective)?;
    let exact_at = |a: f64| {
        let mut c = cfg.clone();
        c.alpha = a;
        sop_exact_quadrature(&c)
    };
    let sop_at_star = exact_at(alpha_star_closed)?;
    let sop_at_epa = exact_at(0.5)?;
    let gain_db = match gain_at_sop {
        Some(level) => Some(opa_gain_db(cfg, level)?),
        None => None,
    };
    Ok(AllocationResult {
        alpha_star_closed,
        alpha_star_numeric,
        sop_at_star,
        sop_at_epa,
        gain_db,
    })
}

// Exact SOP as a function of Γ₀ (dB) under a power policy.
fn sop_at_gamma0(cfg: &SystemConfig, gamma0_db: f64, optimal: bool) -> Result<f64> {
    let mut c = cfg.clone();
    c.gamma0_db = gamma0_db;
    if optimal {
        c.alpha = alpha_star_closed_form(&c)?.clamp(ALPHA_MIN, ALPHA_MAX);
    } else {
        c.alpha = 0.5;
    }
    crate::analytic::sop_exact_quadrature(&c)
}

// Find the Γ₀ (dB) where the policy's SOP crosses `level`, by bisection on
// the monotone-decreasing curve.
fn gamma0_at_sop(cfg: &SystemConfig, level: f64, optimal: bool) -> Result<f64> {
    let mut lo = -20.0;
    let mut hi = 90.0;
    let f_lo = sop_at_gamma0(cfg, lo, optimal)?;
    let f_hi = sop_at_gamma0(cfg, hi, optimal)?;
    if !(f_lo > level && f_hi < level) {
        return Err(Error::Numerical(format!(
            "SOP level {level:e} not bracketed on Γ₀ ∈ [{lo}, {hi}] dB (ends {f_lo:e}, {f_hi:e})"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if sop_at_gamma0(cfg, mid, optimal)? > level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-4 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Γ₀ gap (dB) between the equal-split and optimal-split curves at a target
/// SOP level, exact-quadrature method: how many dB of transmit budget the
/// optimal split saves at that operating point.
pub fn opa_gain_db(cfg: &SystemConfig, level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "target SOP must be in (0, 1), got {level}"
        )));
    }
    let epa = gamma0_at_sop(cfg, level, false)?;
    let opa = gamma0_at_sop(cfg, level, true)?;
    Ok(epa - opa)
}
