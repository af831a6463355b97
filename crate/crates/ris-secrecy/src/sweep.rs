//! Experiment sweeps behind the standard result figures, emitted as CSV.
//!
//! Four runners cover the usual plots: SOP versus Γ₀ per RIS size with equal
//! and optimal power splits ([`run_fig1`]), SOP versus Γ₀ per
//! destination/eavesdropper distance ratio ([`run_fig2`]), the optimal split
//! versus N per Γ₀ ([`run_fig3`]), and versus d_RE per d_SR ([`run_fig4`]).
//! Output is plotting-tool-agnostic CSV: header row always present, floats
//! at 10 significant digits, rows sorted by sweep key so parallel evaluation
//! can never reorder them.

use crate::analytic::{sop_closed_form, sop_compact, sop_exact_quadrature};
use crate::channel::SystemConfig;
use crate::montecarlo::estimate_sop;
use crate::optimizer::alpha_star_closed_form;
use crate::{Error, Result};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::str::FromStr;

/// Which evaluator produces a sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Compact,
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Compact => "compact",
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }

    /// Parse a comma-separated method list, e.g. `"quadrature,closed_form"`.
    /// Duplicates collapse; the result keeps a fixed canonical order.
    pub fn parse_list(text: &str) -> Result<Vec<Method>> {
        let mut methods: Vec<Method> = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Method::from_str)
            .collect::<Result<_>>()?;
        methods.sort();
        methods.dedup();
        if methods.is_empty() {
            return Err(Error::Config("method list is empty".into()));
        }
        Ok(methods)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compact" => Ok(Method::Compact),
            "closed_form" => Ok(Method::ClosedForm),
            "quadrature" => Ok(Method::Quadrature),
            "monte_carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::Config(format!(
                "unknown method {other:?}; expected compact, closed_form, quadrature, monte_carlo"
            ))),
        }
    }
}

/// Inclusive numeric range `start..=stop` stepped by `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let r = SweepRange { start, stop, step };
        r.validate()?;
        Ok(r)
    }

    /// Parse `"start:stop:step"`, e.g. `"0:60:2"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "range must be start:stop:step, got {text:?}"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad range component {p:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        SweepRange::new(nums[0], nums[1], nums[2])
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() || !self.step.is_finite() {
            return Err(Error::Config("range components must be finite".into()));
        }
        if !(self.step > 0.0) {
            return Err(Error::Config(format!(
                "range step must be > 0, got {}",
                self.step
            )));
        }
        if !(self.start < self.stop) {
            return Err(Error::Config(format!(
                "range start must be below stop, got {}..{}",
                self.start, self.stop
            )));
        }
        let count = (self.stop - self.start) / self.step;
        if count > 100_000.0 {
            return Err(Error::Config(format!(
                "range has too many points ({count:.0})"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let v = self.start + self.step * k as f64;
            if v > self.stop + 1e-9 * self.step {
                break;
            }
            out.push(v);
            k += 1;
        }
        out
    }
}

/// The scenario knob a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Gamma0Db,
    NElements,
    DRe,
    DSr,
    Alpha,
    DistanceRatio,
}

/// A parameterized experiment sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub fixed: SystemConfig,
    pub methods: Vec<Method>,
    pub mc_trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.range.validate()?;
        self.fixed.validate()?;
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.methods.contains(&Method::MonteCarlo) && self.mc_trials < 1 {
            return Err(Error::Config(
                "monte_carlo method requires mc_trials ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

/// Power split policy of a Fig. 1-style row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Policy {
    /// Equal split α = 0.5.
    Epa,
    /// Closed-form optimal split per operating point.
    Opa,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Epa => "EPA",
            Policy::Opa => "OPA",
        }
    }
}

// Fixed RIS sizes of the Fig. 1 family.
const FIG1_N: [u32; 3] = [16, 32, 64];
// Destination/eavesdropper distance ratios of Fig. 2.
const FIG2_RATIOS: [f64; 3] = [1.0, 2.0, 4.0];
// Γ₀ values (dB) of the Fig. 3 curves.
const FIG3_GAMMA0_DB: [f64; 3] = [10.0, 20.0, 30.0];
// d_SR values (m) of the Fig. 4 curves.
const FIG4_DSR: [f64; 3] = [20.0, 30.0, 40.0];

fn format_f64(v: f64) -> String {
    // 10 significant digits, scientific; stable across platforms
    format!("{v:.9e}")
}

fn evaluate(cfg: &SystemConfig, method: Method, mc_trials: u64, seed: u64) -> Result<f64> {
    match method {
        Method::Compact => sop_compact(cfg),
        Method::ClosedForm => Ok(sop_closed_form(cfg)?.sop),
        Method::Quadrature => sop_exact_quadrature(cfg),
        Method::MonteCarlo => Ok(estimate_sop(cfg, mc_trials, seed)?.sop_hat),
    }
}

/// One row of the Fig. 1 sweep: SOP per (Γ₀, N, policy, method).
#[derive(Debug, Clone)]
pub struct Fig1Row {
    pub gamma0_db: f64,
    pub n: u32,
    pub policy: Policy,
    pub method: Method,
    pub sop: f64,
}

/// SOP versus Γ₀ for N ∈ {16, 32, 64} under both power policies.
///
/// The optimal policy recomputes the closed-form α* at every operating
/// point. Requires `variable == Gamma0Db`; the range is the Γ₀ grid in dB.
pub fn run_fig1(spec: &SweepSpec) -> Result<Vec<Fig1Row>> {
    spec.validate()?;
    if spec.variable != SweepVariable::Gamma0Db {
        return Err(Error::Config("fig1 sweeps gamma0_db".into()));
    }
    let mut points = Vec::new();
    for &n in &FIG1_N {
        for &g0 in &spec.range.values() {
            for policy in [Policy::Epa, Policy::Opa] {
                for &method in &spec.methods {
                    points.push((n, g0, policy, method));
                }
            }
        }
    }
    let mut rows = points
        .into_par_iter()
        .map(|(n, g0, policy, method)| {
            let mut cfg = spec.fixed.clone();
            cfg.n_elements = n;
            cfg.gamma0_db = g0;
            cfg.alpha = match policy {
                Policy::Epa => 0.5,
                Policy::Opa => alpha_star_closed_form(&cfg)?,
            };
            let sop = evaluate(&cfg, method, spec.mc_trials, spec.seed)?;
            Ok(Fig1Row {
                gamma0_db: g0,
                n,
                policy,
                method,
                sop,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        (a.n, a.policy, a.method)
            .cmp(&(b.n, b.policy, b.method))
            .then(a.gamma0_db.total_cmp(&b.gamma0_db))
    });
    Ok(rows)
}

pub fn fig1_csv(rows: &[Fig1Row]) -> String {
    let mut out = String::from("gamma0_db,n,policy,method,sop\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_f64(r.gamma0_db),
            r.n,
            r.policy.name(),
            r.method.name(),
            format_f64(r.sop)
        );
    }
    out
}

/// One row of the Fig. 2 sweep: SOP per (Γ₀, d_RD/d_RE ratio, method).
#[derive(Debug, Clone)]
pub struct Fig2Row {
    pub gamma0_db: f64,
    pub ratio: f64,
    pub method: Method,
    pub sop: f64,
}

/// SOP versus Γ₀ for d_RD/d_RE ∈ {1, 2, 4} at the fixed geometry
/// {d_SR, d_JR, d_RE} = {30, 30, 15} m.
///
/// Requires `variable == DistanceRatio`; the range is still the Γ₀ grid —
/// the ratio list is the curve family.
pub fn run_fig2(spec: &SweepSpec) -> Result<Vec<Fig2Row>> {
    spec.validate()?;
    if spec.variable != SweepVariable::DistanceRatio {
        return Err(Error::Config(
            "fig2 sweeps the d_RD/d_RE distance ratio family".into(),
        ));
    }
    let mut points = Vec::new();
    for &ratio in &FIG2_RATIOS {
        for &g0 in &spec.range.values() {
            for &method in &spec.methods {
                points.push((ratio, g0, method));
            }
        }
    }
    let mut rows = points
        .into_par_iter()
        .map(|(ratio, g0, method)| {
            let mut cfg = spec.fixed.clone();
            cfg.distances.sr = 30.0;
            cfg.distances.jr = 30.0;
            cfg.distances.re = 15.0;
            cfg.distances.rd = ratio * cfg.distances.re;
            cfg.gamma0_db = g0;
            let sop = evaluate(&cfg, method, spec.mc_trials, spec.seed)?;
            Ok(Fig2Row {
                gamma0_db: g0,
                ratio,
                method,
                sop,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        a.ratio
            .total_cmp(&b.ratio)
            .then(a.method.cmp(&b.method))
            .then(a.gamma0_db.total_cmp(&b.gamma0_db))
    });
    Ok(rows)
}

pub fn fig2_csv(rows: &[Fig2Row]) -> String {
    let mut out = String::from("gamma0_db,ratio,method,sop\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_f64(r.gamma0_db),
            format_f64(r.ratio),
            r.method.name(),
            format_f64(r.sop)
        );
    }
    out
}

/// One row of the Fig. 3 sweep: optimal α* per (N, Γ₀).
#[derive(Debug, Clone)]
pub struct Fig3Row {
    pub n: u32,
    pub gamma0_db: f64,
    pub alpha_star: f64,
}

/// Optimal power split versus N for Γ₀ ∈ {10, 20, 30} dB.
///
/// Requires `variable == NElements`; the range is the N grid (values are
/// rounded to integers).
pub fn run_fig3(spec: &SweepSpec) -> Result<Vec<Fig3Row>> {
    spec.validate()?;
    if spec.variable != SweepVariable::NElements {
        return Err(Error::Config("fig3 sweeps n_elements".into()));
    }
    let mut rows = Vec::new();
    for &nf in &spec.range.values() {
        let n = nf.round() as u32;
        if n < 1 {
            return Err(Error::Config(format!("n_elements must be ≥ 1, got {nf}")));
        }
        for &g0 in &FIG3_GAMMA0_DB {
            let mut cfg = spec.fixed.clone();
            cfg.n_elements = n;
            cfg.gamma0_db = g0;
            rows.push(Fig3Row {
                n,
                gamma0_db: g0,
                alpha_star: alpha_star_closed_form(&cfg)?,
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.n, 0)
            .cmp(&(b.n, 0))
            .then(a.gamma0_db.total_cmp(&b.gamma0_db))
    });
    Ok(rows)
}

pub fn fig3_csv(rows: &[Fig3Row]) -> String {
    let mut out = String::from("n,gamma0_db,alpha_star\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.n,
            format_f64(r.gamma0_db),
            format_f64(r.alpha_star)
        );
    }
    out
}

/// One row of the Fig. 4 sweep: optimal α* per (d_RE, d_SR).
#[derive(Debug, Clone)]
pub struct Fig4Row {
    pub d_re: f64,
    pub d_sr: f64,
    pub alpha_star: f64,
}

/// Optimal power split versus d_RE for d_SR ∈ {20, 30, 40} m.
///
/// Requires `variable == DRe`; the range is the d_RE grid in meters.
pub fn run_fig4(spec: &SweepSpec) -> Result<Vec<Fig4Row>> {
    spec.validate()?;
    if spec.variable != SweepVariable::DRe {
        return Err(Error::Config("fig4 sweeps d_re".into()));
    }
    let mut rows = Vec::new();
    for &d_re in &spec.range.values() {
        if !(d_re > 0.0) {
            return Err(Error::Config(format!("d_re must be > 0, got {d_re}")));
        }
        for &d_sr in &FIG4_DSR {
            let mut cfg = spec.fixed.clone();
            cfg.distances.re = d_re;
            cfg.distances.sr = d_sr;
            rows.push(Fig4Row {
                d_re,
                d_sr,
                alpha_star: alpha_star_closed_form(&cfg)?,
            });
        }
    }
    rows.sort_by(|a, b| a.d_re.total_cmp(&b.d_re).then(a.d_sr.total_cmp(&b.d_sr)));
    Ok(rows)
}

pub fn fig4_csv(rows: &[Fig4Row]) -> String {
    let mut out = String::from("d_re,d_sr,alpha_star\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_f64(r.d_re),
            format_f64(r.d_sr),
            format_f64(r.alpha_star)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(variable: SweepVariable, range: SweepRange) -> SweepSpec {
        SweepSpec {
            variable,
            range,
            fixed: SystemConfig::default_scenario(),
            methods: vec![Method::ClosedForm, Method::Quadrature],
            mc_trials: 10_000,
            seed: 7,
        }
    }

    #[test]
    fn method_list_parses_and_canonicalizes() {
        let m = Method::parse_list("quadrature, monte_carlo,quadrature").unwrap();
        assert_eq!(m, vec![Method::Quadrature, Method::MonteCarlo]);
        assert!(Method::parse_list("").is_err());
        assert!(Method::parse_list("exact").is_err());
    }

    #[test]
    fn range_parsing_and_values() {
        let r = SweepRange::parse("0:60:2").unwrap();
        let v = r.values();
        assert_eq!(v.len(), 31);
        assert_eq!(v[0], 0.0);
        assert_eq!(*v.last().unwrap(), 60.0);
        assert!(SweepRange::parse("5:1:2").is_err());
        assert!(SweepRange::parse("0:10:0").is_err());
        assert!(SweepRange::parse("0:10").is_err());
        assert!(SweepRange::parse("a:b:c").is_err());
    }

    #[test]
    fn fig1_policy_ordering_and_determinism() {
        let s = spec(
            SweepVariable::Gamma0Db,
            SweepRange::new(16.0, 24.0, 4.0).unwrap(),
        );
        let rows = run_fig1(&s).unwrap();
        // OPA never loses to EPA at the same (Γ₀, N, method)
        for r in &rows {
            if r.policy == Policy::Opa {
                let epa = rows
                    .iter()
                    .find(|q| {
                        q.policy == Policy::Epa
                            && q.n == r.n
                            && q.method == r.method
                            && q.gamma0_db == r.gamma0_db
                    })
                    .unwrap();
                assert!(
                    r.sop <= epa.sop * (1.0 + 1e-12),
                    "N={} Γ₀={}",
                    r.n,
                    r.gamma0_db
                );
            }
        }
        // larger N → lower SOP at fixed Γ₀/policy/method
        for r in &rows {
            if r.n == 64 {
                let smaller = rows
                    .iter()
                    .find(|q| {
                        q.n == 16
                            && q.policy == r.policy
                            && q.method == r.method
                            && q.gamma0_db == r.gamma0_db
                    })
                    .unwrap();
                assert!(r.sop < smaller.sop);
            }
        }
        let csv1 = fig1_csv(&rows);
        let csv2 = fig1_csv(&run_fig1(&s).unwrap());
        assert_eq!(csv1, csv2);
        assert!(csv1.starts_with("gamma0_db,n,policy,method,sop\n"));
    }

    #[test]
    fn fig1_rejects_wrong_variable() {
        let s = spec(
            SweepVariable::DRe,
            SweepRange::new(16.0, 24.0, 4.0).unwrap(),
        );
        assert!(run_fig1(&s).is_err());
    }

    #[test]
    fn fig2_closed_form_tracks_quadrature() {
        // measured envelope across the ratio family: 1.6% (ratio 1), 11%
        // (ratio 2), 5.4% (ratio 4); frozen regression bound 0.15
        let mut s = spec(
            SweepVariable::DistanceRatio,
            SweepRange::new(20.0, 30.0, 10.0).unwrap(),
        );
        s.methods = vec![Method::ClosedForm, Method::Quadrature];
        let rows = run_fig2(&s).unwrap();
        for r in rows.iter().filter(|r| r.method == Method::ClosedForm) {
            let quad = rows
                .iter()
                .find(|q| {
                    q.method == Method::Quadrature
                        && q.ratio == r.ratio
                        && q.gamma0_db == r.gamma0_db
                })
                .unwrap();
            if quad.sop < 0.1 {
                let rel = (r.sop - quad.sop).abs() / quad.sop;
                assert!(
                    rel < 0.15,
                    "ratio={} Γ₀={}: rel {rel}",
                    r.ratio,
                    r.gamma0_db
                );
            }
        }
    }

    #[test]
    fn fig2_ratio_ordering() {
        let mut s = spec(
            SweepVariable::DistanceRatio,
            SweepRange::new(20.0, 30.0, 5.0).unwrap(),
        );
        s.methods = vec![Method::Quadrature];
        let rows = run_fig2(&s).unwrap();
        // ratio 2 with d_RE = 15 is exactly the default geometry
        let base = rows
            .iter()
            .find(|r| r.ratio == 2.0 && r.gamma0_db == 20.0)
            .unwrap();
        let direct = sop_exact_quadrature(&SystemConfig {
            gamma0_db: 20.0,
            ..SystemConfig::default_scenario()
        })
        .unwrap();
        assert_eq!(base.sop, direct);
        // larger ratio → worse secrecy at every Γ₀
        for g0 in [20.0, 25.0, 30.0] {
            let at = |ratio: f64| {
                rows.iter()
                    .find(|r| r.ratio == ratio && r.gamma0_db == g0)
                    .unwrap()
                    .sop
            };
            assert!(at(1.0) < at(2.0) && at(2.0) < at(4.0), "Γ₀={g0}");
        }
    }

    #[test]
    fn fig3_trends() {
        let s = spec(
            SweepVariable::NElements,
            SweepRange::new(16.0, 128.0, 16.0).unwrap(),
        );
        let rows = run_fig3(&s).unwrap();
        // α* decreasing in N at fixed Γ₀, and in Γ₀ at fixed N
        for &g0 in &FIG3_GAMMA0_DB {
            let series: Vec<f64> = rows
                .iter()
                .filter(|r| r.gamma0_db == g0)
                .map(|r| r.alpha_star)
                .collect();
            assert!(series.windows(2).all(|w| w[1] < w[0]), "Γ₀={g0}");
        }
        for n in [16, 64, 128] {
            let series: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.alpha_star)
                .collect();
            assert!(series.windows(2).all(|w| w[1] < w[0]), "N={n}");
        }
    }

    #[test]
    fn fig4_trends() {
        let s = spec(SweepVariable::DRe, SweepRange::new(5.0, 50.0, 5.0).unwrap());
        let rows = run_fig4(&s).unwrap();
        // α* increasing in d_RE at fixed d_SR, and in d_SR at fixed d_RE
        for &d_sr in &FIG4_DSR {
            let series: Vec<f64> = rows
                .iter()
                .filter(|r| r.d_sr == d_sr)
                .map(|r| r.alpha_star)
                .collect();
            assert!(series.windows(2).all(|w| w[1] > w[0]), "d_SR={d_sr}");
        }
        for r in &rows {
            if r.d_sr == 40.0 {
                let narrower = rows
                    .iter()
                    .find(|q| q.d_re == r.d_re && q.d_sr == 20.0)
                    .unwrap();
                assert!(r.alpha_star > narrower.alpha_star);
            }
        }
    }

    #[test]
    fn csv_uses_ten_significant_digits() {
        assert_eq!(format_f64(0.5), "5.000000000e-1");
        assert_eq!(format_f64(12345.6789), "1.234567890e4");
    }

    #[test]
    fn monte_carlo_rows_are_seed_deterministic() {
        let mut s = spec(
            SweepVariable::Gamma0Db,
            SweepRange::new(10.0, 12.0, 2.0).unwrap(),
        );
        s.methods = vec![Method::MonteCarlo];
        s.mc_trials = 20_000;
        let a = fig1_csv(&run_fig1(&s).unwrap());
        let b = fig1_csv(&run_fig1(&s).unwrap());
        assert_eq!(a, b);
    }
}
