//! Experiment runner: figure sweeps, the validation harness, and single-point
//! SOP evaluation on top of the `ris_secrecy` library.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 validation
//! failure.

use clap::{Args, Parser, Subcommand};
use ris_secrecy::sweep::{
    fig1_csv, fig2_csv, fig3_csv, fig4_csv, run_fig1, run_fig2, run_fig3, run_fig4, Method,
    SweepRange, SweepSpec, SweepVariable,
};
use ris_secrecy::validate::{run_validate_with, summarize, ZetaScale};
use ris_secrecy::{analytic, montecarlo, optimizer, Error, SystemConfig};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ris-secrecy",
    about = "Secrecy outage probability of an RIS-assisted wiretap channel with a friendly jammer",
    version
)]
struct Cli {
    /// Worker threads for sweeps and Monte Carlo (default: all cores).
    /// Results are bit-identical regardless of this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario JSON (defaults to the built-in reference scenario).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output path (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Monte Carlo trials per point.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,

    /// RNG seed; fixed seed means byte-identical output.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Comma-separated evaluation methods:
    /// compact, closed_form, quadrature, monte_carlo.
    #[arg(long, default_value = "closed_form,quadrature")]
    methods: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the SOP at a single operating point.
    Sop {
        #[command(flatten)]
        common: CommonArgs,

        /// Also dump the closed-form intermediate quantities.
        #[arg(long)]
        explain: bool,
    },
    /// SOP versus Γ₀ for N ∈ {16, 32, 64}, equal and optimal power splits.
    Fig1 {
        #[command(flatten)]
        common: CommonArgs,

        /// Γ₀ grid in dB as start:stop:step.
        #[arg(long, default_value = "0:60:2")]
        gamma0_range: String,
    },
    /// SOP versus Γ₀ for destination/eavesdropper distance ratios {1, 2, 4}.
    Fig2 {
        #[command(flatten)]
        common: CommonArgs,

        /// Γ₀ grid in dB as start:stop:step.
        #[arg(long, default_value = "0:60:2")]
        gamma0_range: String,
    },
    /// Optimal power split versus N for Γ₀ ∈ {10, 20, 30} dB.
    Fig3 {
        #[command(flatten)]
        common: CommonArgs,

        /// N grid as start:stop:step.
        #[arg(long, default_value = "16:256:16")]
        n_range: String,
    },
    /// Optimal power split versus d_RE for d_SR ∈ {20, 30, 40} m.
    Fig4 {
        #[command(flatten)]
        common: CommonArgs,

        /// d_RE grid in meters as start:stop:step.
        #[arg(long, default_value = "5:50:2.5")]
        dre_range: String,
    },
    /// Run the cross-method consistency harness and emit a JSON report.
    Validate {
        #[command(flatten)]
        common: CommonArgs,

        /// Fault injection: scale one analytic path gain, e.g. re=2.0.
        /// Exists to demonstrate that the harness can fail.
        #[arg(long)]
        inject_zeta_scale: Option<String>,

        /// Print the human-readable summary to stderr as well.
        #[arg(long)]
        summary: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit(2); the contract here is 1 for usage problems
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    let pool = match build_pool(cli.threads) {
        Ok(pool) => pool,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };

    let code = pool.install(|| match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            classify(&e)
        }
    });
    ExitCode::from(code)
}

fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err("--threads must be ≥ 1".into());
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

fn classify(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain(_) => 1,
        Error::Numerical(_) | Error::NonUnimodal { .. } => 2,
    }
}

fn load_config(path: &Option<PathBuf>) -> ris_secrecy::Result<SystemConfig> {
    match path {
        None => Ok(SystemConfig::default_scenario()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            SystemConfig::from_json(&text)
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> ris_secrecy::Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => fs::write(p, content)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
    }
}

fn sweep_spec(
    common: &CommonArgs,
    variable: SweepVariable,
    range: &str,
) -> ris_secrecy::Result<SweepSpec> {
    Ok(SweepSpec {
        variable,
        range: SweepRange::parse(range)?,
        fixed: load_config(&common.config)?,
        methods: Method::parse_list(&common.methods)?,
        mc_trials: common.trials,
        seed: common.seed,
    })
}

fn dispatch(command: Command) -> ris_secrecy::Result<u8> {
    match command {
        Command::Sop { common, explain } => {
            let cfg = load_config(&common.config)?;
            let methods = Method::parse_list(&common.methods)?;
            let mut doc = serde_json::Map::new();
            doc.insert(
                "config".into(),
                serde_json::to_value(&cfg).expect("config serializes"),
            );
            for method in &methods {
                let value = match method {
                    Method::Compact => analytic::sop_compact(&cfg)?,
                    Method::ClosedForm => analytic::sop_closed_form(&cfg)?.sop,
                    Method::Quadrature => analytic::sop_exact_quadrature(&cfg)?,
                    Method::MonteCarlo => {
                        let est = montecarlo::estimate_sop(&cfg, common.trials, common.seed)?;
                        doc.insert(
                            "monte_carlo_estimate".into(),
                            serde_json::to_value(est).expect("estimate serializes"),
                        );
                        est.sop_hat
                    }
                };
                doc.insert(format!("sop_{}", method.name()), value.into());
            }
            doc.insert(
                "alpha_star_closed_form".into(),
                optimizer::alpha_star_closed_form(&cfg)?.into(),
            );
            if explain {
                let breakdown = analytic::sop_closed_form(&cfg)?;
                doc.insert(
                    "explain".into(),
                    serde_json::to_value(&breakdown).expect("breakdown serializes"),
                );
            }
            let json = serde_json::to_string_pretty(&doc).expect("document serializes");
            emit(&common.out, &format!("{json}\n"))?;
            Ok(0)
        }
        Command::Fig1 {
            common,
            gamma0_range,
        } => {
            let spec = sweep_spec(&common, SweepVariable::Gamma0Db, &gamma0_range)?;
            let rows = run_fig1(&spec)?;
            emit(&common.out, &fig1_csv(&rows))?;
            Ok(0)
        }
        Command::Fig2 {
            common,
            gamma0_range,
        } => {
            let spec = sweep_spec(&common, SweepVariable::DistanceRatio, &gamma0_range)?;
            let rows = run_fig2(&spec)?;
            emit(&common.out, &fig2_csv(&rows))?;
            Ok(0)
        }
        Command::Fig3 { common, n_range } => {
            let spec = sweep_spec(&common, SweepVariable::NElements, &n_range)?;
            let rows = run_fig3(&spec)?;
            emit(&common.out, &fig3_csv(&rows))?;
            Ok(0)
        }
        Command::Fig4 { common, dre_range } => {
            let spec = sweep_spec(&common, SweepVariable::DRe, &dre_range)?;
            let rows = run_fig4(&spec)?;
            emit(&common.out, &fig4_csv(&rows))?;
            Ok(0)
        }
        Command::Validate {
            common,
            inject_zeta_scale,
            summary,
        } => {
            let cfg = load_config(&common.config)?;
            let inject = inject_zeta_scale
                .as_deref()
                .map(ZetaScale::parse)
                .transpose()?;
            let report = run_validate_with(&cfg, common.trials, common.seed, inject)?;
            emit(&common.out, &format!("{}\n", report.to_json()))?;
            if summary {
                eprint!("{}", summarize(&report));
            }
            Ok(if report.passed { 0 } else { 3 })
        }
    }
}
