//! Scenario description and the per-link statistics all evaluators consume.
//!
//! The physical picture: source S and jammer J both reach destination D and
//! eavesdropper E only through an RIS R with `N` reflecting elements; direct
//! paths are blocked. Every individual channel `h_XY⁽ⁿ⁾` is Rayleigh with a
//! distance-based average power `ζ_XY`. With RIS phases matched to the S→R→D
//! hop, the destination SNR concentrates around a Gaussian-distributed
//! amplitude sum, while the eavesdropper sees misaligned phase sums whose
//! powers are exponential. [`derive_stats`] reduces a [`SystemConfig`] to
//! exactly those distribution parameters.

use crate::numerics::q_raw;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Node-pair distances in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Distances {
    /// source → RIS
    pub sr: f64,
    /// jammer → RIS
    pub jr: f64,
    /// RIS → destination
    pub rd: f64,
    /// RIS → eavesdropper
    pub re: f64,
}

/// Linear path gains per node pair, derived from [`Distances`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zeta {
    pub sr: f64,
    pub jr: f64,
    pub rd: f64,
    pub re: f64,
}

/// Full physical scenario.
///
/// Loadable from JSON with exactly these snake_case field names; unknown
/// fields are rejected. `reflect_amplitude` defaults to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Number of RIS elements, N ≥ 1.
    pub n_elements: u32,
    /// Total power budget over noise, Γ₀ = P_T/N₀, in dB.
    pub gamma0_db: f64,
    /// Fraction of the budget spent by the source; the jammer gets 1 − α.
    pub alpha: f64,
    /// Secrecy rate threshold R_th in bits per channel use.
    pub rate_threshold: f64,
    pub distances: Distances,
    /// Reference path loss z₀ in dB at 1 m.
    pub pathloss_ref_db: f64,
    /// Path loss exponent v > 0.
    pub pathloss_exponent: f64,
    /// Per-element amplitude reflection coefficient η ∈ (0, 1].
    #[serde(default = "default_reflect_amplitude")]
    pub reflect_amplitude: f64,
}

fn default_reflect_amplitude() -> f64 {
    1.0
}

impl SystemConfig {
    /// Default experiment scenario: R_th = 1 bit/channel use, geometry
    /// {d_SR, d_JR, d_RD, d_RE} = {30, 30, 30, 15} m, path loss
    /// ζ(dB) = 42 − 35·log₁₀(d), equal power split.
    pub fn default_scenario() -> Self {
        SystemConfig {
            n_elements: 64,
            gamma0_db: 30.0,
            alpha: 0.5,
            rate_threshold: 1.0,
            distances: Distances {
                sr: 30.0,
                jr: 30.0,
                rd: 30.0,
                re: 15.0,
            },
            pathloss_ref_db: 42.0,
            pathloss_exponent: 3.5,
            reflect_amplitude: 1.0,
        }
    }

    /// Parse from a JSON document, rejecting unknown fields, then validate.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SystemConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements < 1 {
            return Err(Error::Config("n_elements must be ≥ 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie strictly inside (0, 1), got {}",
                self.alpha
            )));
        }
        if !self.gamma0_db.is_finite() {
            return Err(Error::Config("gamma0_db must be finite".into()));
        }
        if !(self.rate_threshold >= 0.0) || !self.rate_threshold.is_finite() {
            return Err(Error::Config(format!(
                "rate_threshold must be ≥ 0, got {}",
                self.rate_threshold
            )));
        }
        for (name, d) in [
            ("sr", self.distances.sr),
            ("jr", self.distances.jr),
            ("rd", self.distances.rd),
            ("re", self.distances.re),
        ] {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Config(format!(
                    "distance {name} must be > 0, got {d}"
                )));
            }
        }
        if !self.pathloss_ref_db.is_finite() {
            return Err(Error::Config("pathloss_ref_db must be finite".into()));
        }
        if !(self.pathloss_exponent > 0.0) || !self.pathloss_exponent.is_finite() {
            return Err(Error::Config(format!(
                "pathloss_exponent must be > 0, got {}",
                self.pathloss_exponent
            )));
        }
        if !(self.reflect_amplitude > 0.0 && self.reflect_amplitude <= 1.0) {
            return Err(Error::Config(format!(
                "reflect_amplitude must lie in (0, 1], got {}",
                self.reflect_amplitude
            )));
        }
        Ok(())
    }

    /// Linear total-power-to-noise ratio Γ₀.
    pub fn gamma0_linear(&self) -> f64 {
        10f64.powf(self.gamma0_db / 10.0)
    }

    /// ρ = 2^{R_th}.
    pub fn rho(&self) -> f64 {
        self.rate_threshold.exp2()
    }

    pub fn zeta(&self) -> Result<Zeta> {
        Ok(Zeta {
            sr: pathloss_linear(self.distances.sr, self)?,
            jr: pathloss_linear(self.distances.jr, self)?,
            rd: pathloss_linear(self.distances.rd, self)?,
            re: pathloss_linear(self.distances.re, self)?,
        })
    }
}

/// Derived statistical parameters of the two SINRs for one `(config, α)`.
///
/// `Γ_D = αΓ₀·S²` with `S ≈ N(μ, σ²)` truncated to S > 0 (ψ normalizes);
/// `Γ_E = |H_SE|²/(1 + |H_JE|²)` with the two powers exponential with means
/// `λ_SE` and `λ_JE`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinkStats {
    /// The power split these statistics were derived for: λ_SE and λ_JE
    /// scale with α and 1−α respectively.
    pub alpha: f64,
    /// Mean of the destination amplitude sum: μ = πN√(ζ_RD ζ_SR)/4.
    pub mu: f64,
    /// Its variance: σ² = N ζ_RD ζ_SR (16 − π²)/16.
    pub sigma2: f64,
    /// Truncation normalizer ψ = 1/Q(−μ/σ) ∈ [1, 2).
    pub psi: f64,
    /// Mean eavesdropper signal power: λ_SE = αΓ₀Nη²ζ_RE ζ_SR.
    pub lambda_se: f64,
    /// Mean eavesdropper jamming power: λ_JE = (1−α)Γ₀Nη²ζ_RE ζ_JR.
    pub lambda_je: f64,
    /// ρ = 2^{R_th}.
    pub rho: f64,
    /// Linear Γ₀.
    pub gamma0: f64,
    pub zeta: Zeta,
}

/// Linear path gain `ζ = 10^{(z₀ − 10·v·log₁₀ d)/10}` for a distance in meters.
pub fn pathloss_linear(d: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("distance must be > 0, got {d}")));
    }
    let db = cfg.pathloss_ref_db - 10.0 * cfg.pathloss_exponent * d.log10();
    Ok(10f64.powf(db / 10.0))
}

/// Reduce a validated config to the distribution parameters used everywhere.
///
/// All evaluators share this one derivation so parameters cannot drift.
pub fn derive_stats(cfg: &SystemConfig) -> Result<LinkStats> {
    cfg.validate()?;
    Ok(derive_stats_from_zeta(cfg, cfg.zeta()?))
}

/// Statistics derivation from an explicit gain table. The validation
/// harness uses this to inject corrupted gains into the analytic side only.
pub fn derive_stats_from_zeta(cfg: &SystemConfig, zeta: Zeta) -> LinkStats {
    let n = cfg.n_elements as f64;
    let gamma0 = cfg.gamma0_linear();
    let eta2 = cfg.reflect_amplitude * cfg.reflect_amplitude;
    let mu = PI * n * (zeta.rd * zeta.sr).sqrt() / 4.0;
    let sigma2 = n * zeta.rd * zeta.sr * (16.0 - PI * PI) / 16.0;
    let psi = 1.0 / q_raw(-mu / sigma2.sqrt());
    LinkStats {
        alpha: cfg.alpha,
        mu,
        sigma2,
        psi,
        lambda_se: cfg.alpha * gamma0 * n * eta2 * zeta.re * zeta.sr,
        lambda_je: (1.0 - cfg.alpha) * gamma0 * n * eta2 * zeta.re * zeta.jr,
        rho: cfg.rho(),
        gamma0,
        zeta,
    }
}

/// CDF of the destination SINR:
/// `F(x) = 1 − ψ·Q((√(x/(αΓ₀)) − μ)/σ)`, clamped to [0, 1].
pub fn cdf_gamma_d(x: f64, s: &LinkStats, alpha: f64, gamma0: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("SINR must be ≥ 0, got {x}")));
    }
    Ok(cdf_gamma_d_raw(x, s, alpha, gamma0))
}

#[inline]
pub(crate) fn cdf_gamma_d_raw(x: f64, s: &LinkStats, alpha: f64, gamma0: f64) -> f64 {
    let sigma = s.sigma2.sqrt();
    let q0 = q_raw(-s.mu / sigma);
    let q = q_raw(((x / (alpha * gamma0)).sqrt() - s.mu) / sigma);
    // dividing by q0 instead of multiplying by a stored ψ makes F(0) exactly 0
    (1.0 - q / q0).clamp(0.0, 1.0)
}

/// CDF of the eavesdropper SINR:
/// `F(x) = 1 − (λ_SE/λ_JE)·e^{−x/λ_SE}/(x + λ_SE/λ_JE)`.
pub fn cdf_gamma_e(x: f64, s: &LinkStats) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("SINR must be ≥ 0, got {x}")));
    }
    Ok(cdf_gamma_e_raw(x, s))
}

#[inline]
pub(crate) fn cdf_gamma_e_raw(x: f64, s: &LinkStats) -> f64 {
    let r = s.lambda_se / s.lambda_je;
    (1.0 - r * (-x / s.lambda_se).exp() / (x + r)).clamp(0.0, 1.0)
}

/// PDF of the eavesdropper SINR, the derivative of [`cdf_gamma_e`]:
/// `f(x) = e^{−x/λ_SE}/(λ_JE(x + r)) + λ_SE·e^{−x/λ_SE}/(λ_JE(x + r)²)`
/// with `r = λ_SE/λ_JE`.
pub fn pdf_gamma_e(x: f64, s: &LinkStats) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("SINR must be ≥ 0, got {x}")));
    }
    Ok(pdf_gamma_e_raw(x, s))
}

#[inline]
pub(crate) fn pdf_gamma_e_raw(x: f64, s: &LinkStats) -> f64 {
    let r = s.lambda_se / s.lambda_je;
    let e = (-x / s.lambda_se).exp();
    e / (s.lambda_je * (x + r)) + s.lambda_se * e / (s.lambda_je * (x + r) * (x + r))
}
