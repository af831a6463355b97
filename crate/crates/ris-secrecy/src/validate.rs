//! Cross-method consistency harness.
//!
//! One call exercises every route to the same physics — Monte Carlo against
//! quadrature, closed form against quadrature, closed-form optimum against
//! numeric minimization, the convexity certificate, distribution KS
//! distances, density normalization — and emits a deterministic JSON report.
//! Thresholds here are measured regression envelopes (see the individual
//! checks), so a healthy scenario passes every check; the report also
//! carries informational flags for known, documented approximation gaps
//! that are not failures.

use crate::analytic::{
    sop_closed_form_from_stats, sop_compact_from_stats, sop_exact_quadrature_from_stats,
};
use crate::channel::{
    derive_stats, derive_stats_from_zeta, pdf_gamma_e_raw, LinkStats, SystemConfig, Zeta,
};
use crate::integrate::{adaptive, breakpoints, integrate_exp_tail};
use crate::montecarlo::{empirical_cdf_gamma_d, empirical_cdf_gamma_e, estimate_sop};
use crate::optimizer::{alpha_star_closed_form, alpha_star_numeric, certify_convexity, Objective};
use crate::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::str::FromStr;

/// Node pair selector for fault injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Sr,
    Jr,
    Rd,
    Re,
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sr" => Ok(Link::Sr),
            "jr" => Ok(Link::Jr),
            "rd" => Ok(Link::Rd),
            "re" => Ok(Link::Re),
            other => Err(Error::Config(format!(
                "unknown link {other:?}; expected sr, jr, rd, re"
            ))),
        }
    }
}

/// Multiply one link's path gain in the *analytic* model only, leaving the
/// simulator on the honest config. Exists to prove the harness can fail:
/// a corrupted gain table must trip the Monte Carlo consistency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaScale {
    pub link: Link,
    pub factor: f64,
}

impl ZetaScale {
    /// Parse `"link=factor"`, e.g. `"re=2.0"`.
    pub fn parse(text: &str) -> Result<Self> {
        let (link, factor) = text
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected link=factor, got {text:?}")))?;
        let factor: f64 = factor
            .trim()
            .parse()
            .map_err(|e| Error::Config(format!("bad scale factor {factor:?}: {e}")))?;
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Config(format!(
                "scale factor must be > 0, got {factor}"
            )));
        }
        Ok(ZetaScale {
            link: Link::from_str(link.trim())?,
            factor,
        })
    }

    fn apply(&self, mut zeta: Zeta) -> Zeta {
        match self.link {
            Link::Sr => zeta.sr *= self.factor,
            Link::Jr => zeta.jr *= self.factor,
            Link::Rd => zeta.rd *= self.factor,
            Link::Re => zeta.re *= self.factor,
        }
        zeta
    }
}

/// One named consistency check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Informational observation, not a pass/fail gate.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFlag {
    pub name: String,
    pub detail: String,
}

/// Deterministic validation report; byte-identical for identical inputs.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub config: SystemConfig,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub flags: Vec<ReportFlag>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

// 95% one-sided quantile scale of the KS statistic for n samples.
fn ks_noise_quantile(n: u64) -> f64 {
    1.358 / (n as f64).sqrt()
}

/// Run every consistency check at the given scenario.
///
/// `trials ≥ 1e5` keeps the statistical checks meaningful. The KS
/// thresholds scale with the trial count: a frozen model-error budget
/// (measured at 1e6 trials) plus the sampling noise quantile.
pub fn run_validate(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<ValidationReport> {
    run_validate_with(cfg, trials, seed, None)
}

/// [`run_validate`] with optional fault injection into the analytic gain
/// table.
pub fn run_validate_with(
    cfg: &SystemConfig,
    trials: u64,
    seed: u64,
    inject: Option<ZetaScale>,
) -> Result<ValidationReport> {
    if trials < 100_000 {
        return Err(Error::Config(format!(
            "validation needs at least 1e5 trials, got {trials}"
        )));
    }
    cfg.validate()?;
    let stats = match inject {
        Some(scale) => derive_stats_from_zeta(cfg, scale.apply(cfg.zeta()?)),
        None => derive_stats(cfg)?,
    };

    let mut checks = Vec::new();
    let mut flags = Vec::new();

    // Monte Carlo of the physical channels vs quadrature of the analytic
    // model, at the Monte Carlo run's own confidence scale.
    let quad = sop_exact_quadrature_from_stats(&stats)?;
    let est = estimate_sop(cfg, trials, seed)?;
    let delta = (est.sop_hat - quad).abs();
    checks.push(CheckResult {
        name: "mc_vs_quadrature".into(),
        passed: delta <= est.ci95_half_width,
        detail: format!(
            "mc={:.6e} ci95=±{:.3e} quadrature={quad:.6e} delta={delta:.3e} outages={}",
            est.sop_hat, est.ci95_half_width, est.outages
        ),
    });
    if est.unreliable {
        flags.push(ReportFlag {
            name: "mc_low_counts".into(),
            detail: format!(
                "{} outages in {trials} trials; estimate is noise-dominated",
                est.outages
            ),
        });
    }

    // Closed form vs quadrature, inside the measured regression envelope.
    let bd = sop_closed_form_from_stats(&stats)?;
    if bd.regime_valid && quad < 0.1 {
        let rel = (bd.sop - quad).abs() / quad;
        checks.push(CheckResult {
            name: "closed_form_envelope".into(),
            passed: rel < 0.15,
            detail: format!("closed={:.6e} quadrature={quad:.6e} rel={rel:.4}", bd.sop),
        });
    } else {
        flags.push(ReportFlag {
            name: "closed_form_envelope_skipped".into(),
            detail: format!("regime_valid={} sop={quad:.3e}", bd.regime_valid),
        });
    }

    // The compact form is a known systematic under-estimate at moderate N;
    // report the deviation rather than failing on it.
    let compact = sop_compact_from_stats(&stats, cfg.n_elements, cfg.alpha)?;
    if bd.sop > 0.0 {
        let ratio = compact / bd.sop;
        if !(0.5..=2.0).contains(&ratio) {
            flags.push(ReportFlag {
                name: "compact_systematic_deviation".into(),
                detail: format!(
                    "compact/closed ratio {ratio:.4} outside [0.5, 2]; the large-N \
                     approximation drops the dominant finite-split mass at this N"
                ),
            });
        }
    }

    // Closed-form optimum vs golden-section minimization of the same
    // objective.
    let a_closed = alpha_star_closed_form(cfg)?;
    let a_numeric = alpha_star_numeric(cfg, Objective::Compact)?;
    checks.push(CheckResult {
        name: "alpha_star_consistency".into(),
        passed: (a_closed - a_numeric).abs() < 1e-3,
        detail: format!("closed={a_closed:.8} numeric={a_numeric:.8}"),
    });

    // Convexity certificate of the compact objective.
    let convex = certify_convexity(cfg, 999)?;
    checks.push(CheckResult {
        name: "convexity_certificate".into(),
        passed: convex,
        detail: "second derivative and log-domain second differences on 999 points".into(),
    });

    // Distribution checks. Budgets: Γ_E model distance measured 0.0036 at
    // N = 64 / 1e6 trials; Γ_D carries the CLT skewness gap ≈ 1.6·φ(0)/(6√N).
    let ks_trials = trials.min(crate::montecarlo::CDF_SAMPLE_CAP);
    let noise = ks_noise_quantile(ks_trials);
    let gamma_e = empirical_cdf_gamma_e(cfg, ks_trials, seed)?;
    let e_budget = 0.0036 + noise;
    checks.push(CheckResult {
        name: "ks_gamma_e".into(),
        passed: gamma_e.ks_distance < e_budget,
        detail: format!(
            "ks={:.5} budget={e_budget:.5} samples={ks_trials}",
            gamma_e.ks_distance
        ),
    });
    let gamma_d = empirical_cdf_gamma_d(cfg, ks_trials, seed)?;
    let clt_gap = 1.6 * 0.3989 / (6.0 * (cfg.n_elements as f64).sqrt());
    let d_budget = 1.25 * clt_gap + noise;
    checks.push(CheckResult {
        name: "ks_gamma_d".into(),
        passed: gamma_d.ks_distance < d_budget,
        detail: format!(
            "ks={:.5} budget={d_budget:.5} (clt_gap≈{clt_gap:.5}) samples={ks_trials}",
            gamma_d.ks_distance
        ),
    });

    // Eavesdropper density integrates to one.
    let pdf_mass = gamma_e_density_mass(&stats)?;
    checks.push(CheckResult {
        name: "pdf_normalization".into(),
        passed: (pdf_mass - 1.0).abs() < 1e-6,
        detail: format!("integral={pdf_mass:.9}"),
    });

    // Exactness gap of the closed-form optimum against the exact objective:
    // measured and reported, never asserted.
    let mut at_star = cfg.clone();
    at_star.alpha = a_closed;
    let sop_at_star = crate::analytic::sop_exact_quadrature(&at_star)?;
    let a_exact = alpha_star_numeric(cfg, Objective::Quadrature)?;
    let mut at_exact = cfg.clone();
    at_exact.alpha = a_exact;
    let sop_at_exact = crate::analytic::sop_exact_quadrature(&at_exact)?;
    flags.push(ReportFlag {
        name: "alpha_star_exactness_gap".into(),
        detail: format!(
            "alpha*={a_closed:.6} vs exact argmin {a_exact:.6}; sop {sop_at_star:.6e} vs \
             {sop_at_exact:.6e} (excess {:.4}%)",
            100.0 * (sop_at_star / sop_at_exact - 1.0)
        ),
    });

    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        config: cfg.clone(),
        trials,
        seed,
        checks,
        flags,
        passed,
    })
}

fn gamma_e_density_mass(stats: &LinkStats) -> Result<f64> {
    let r = stats.lambda_se / stats.lambda_je;
    let pdf = |x: f64| pdf_gamma_e_raw(x, stats);
    let pts = breakpoints(
        0.0,
        100.0 * stats.lambda_se,
        &[
            r,
            10.0 * r,
            0.01 * stats.lambda_se,
            0.1 * stats.lambda_se,
            stats.lambda_se,
        ],
    );
    let head = adaptive(pdf, &pts, 1e-12, 1e-10, 4000)?;
    let tail = integrate_exp_tail(
        pdf,
        100.0 * stats.lambda_se,
        stats.lambda_se,
        1e-14,
        1e-10,
        2000,
    )?;
    Ok(head.value + tail.value)
}

/// Render a short human-readable summary (one line per check).
pub fn summarize(report: &ValidationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{}: {} ({})",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.detail
        );
    }
    for f in &report.flags {
        let _ = writeln!(out, "note {}: {}", f.name, f.detail);
    }
    let _ = writeln!(
        out,
        "overall: {}",
        if report.passed { "pass" } else { "FAIL" }
    );
    out
}
