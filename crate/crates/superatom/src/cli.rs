//! Argument parsing and exit-code mapping for the `superatom` binary.
//!
//! Exit codes: 0 success, 2 validation error, 3 non-convergence, 4 I/O error.

use clap::{Parser, Subcommand};
use std::path::PathBuf;

use crate::commands::{self, FitArgs, FitCurveMode};
use crate::error::Error;
use crate::fit::FreeParam;

#[derive(Debug, Parser)]
#[command(
    name = "superatom",
    about = "Monte Carlo simulator and analysis toolkit for single-shot Rydberg-superatom readout",
    version
)]
pub struct Cli {
    /// Config JSON; built-in calibrated defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Trials-per-dataset override.
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Output directory override.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Prepared-state spec(s): r1, r2, d, a, r, l or rot:<theta>,<phi>.
    #[arg(long, global = true)]
    pub state: Vec<String>,

    /// Measurement basis for burst datasets: Z, X or Y.
    #[arg(long, global = true)]
    pub basis: Option<String>,

    /// Verbose output (full fit traces, per-state detail).
    #[arg(long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan the collective Rabi oscillation and echo the pi-pulse time.
    Rabi,
    /// Simulate photon-burst datasets and the single-shot analysis.
    Burst,
    /// Run qubit tomography over the Z/X/Y bases.
    Tomo {
        /// Use exact Born probabilities instead of Monte Carlo sampling.
        #[arg(long)]
        exact: bool,
    },
    /// Fit an efficiency-vs-OD points file to the saturation model.
    Fit {
        /// CSV with rows x,y[,sigma].
        points: PathBuf,
        /// Which curve the points belong to.
        #[arg(long, value_enum, default_value = "freespace")]
        mode: CliFitMode,
        /// Pin the saturation ceiling p instead of fitting it.
        #[arg(long)]
        fixed_p: Option<f64>,
        /// Measured cavity points to score against the shared-slope
        /// prediction (freespace mode).
        #[arg(long)]
        cavity_points: Option<PathBuf>,
    },
    /// Calibrate burst parameters against headline observables.
    Calibrate {
        /// Target observable, e.g. mean_r1=2.63 (repeatable).
        #[arg(long = "target", required = true)]
        targets: Vec<String>,
        /// Free parameter: p_click, s_surv, p_dark or eta_prep (repeatable).
        #[arg(long = "free")]
        free: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum CliFitMode {
    Freespace,
    Cavity,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Validation(_)
        | Error::InvalidParameter { .. }
        | Error::Malformed { .. }
        | Error::Empty(_)
        | Error::Underdetermined { .. } => 2,
        Error::NonConvergence { .. } | Error::NonFiniteModel { .. } => 3,
        Error::Io { .. } | Error::Json(_) | Error::Csv(_) => 4,
    }
}

fn percent(p: f64) -> String {
    format!("{:.2}%", p * 100.0)
}

fn run_command(cli: &Cli) -> crate::error::Result<()> {
    let config = commands::load_config(
        cli.config.as_deref(),
        cli.seed,
        cli.trials,
        cli.out.as_deref(),
        &cli.state,
        cli.basis.as_deref(),
    )?;

    match &cli.command {
        Command::Rabi => {
            let summary = commands::cmd_rabi(&config)?;
            println!("pi-pulse time: {:.3} ns", summary.pi_pulse_ns);
            println!(
                "peak population {:.4} at {:.1} ns over {} points",
                summary.peak_population, summary.peak_time_ns, summary.n_points
            );
            println!("scan written to {}", summary.scan_path.display());
        }
        Command::Burst => {
            let report = commands::cmd_burst(&config)?;
            for state in &report.states {
                println!(
                    "state {}: mean {:.4} photons, P(N=0) {}, P(N>=1) {}",
                    state.label,
                    state.mean_photons,
                    percent(state.prob_zero),
                    percent(state.prob_geq1),
                );
            }
            if let Some(disc) = &report.discrimination {
                println!(
                    "raw fidelity {} (r2: {}, r1: {})",
                    percent(disc.raw_fidelity),
                    percent(disc.p_detect_r2_given_r2),
                    percent(disc.p_detect_r1_given_r1),
                );
            }
            if let Some(corr) = &report.corrected {
                println!(
                    "corrected fidelity {} (r2: {}); corrected r2 mean {:.4}",
                    percent(corr.conditionals.raw_fidelity),
                    percent(corr.conditionals.p_detect_r2_given_r2),
                    corr.corrected_mean_r2,
                );
            }
            if let Some(eta) = report.prep_efficiency_estimate {
                println!("prep efficiency estimate {}", percent(eta));
            }
            for check in &report.checks {
                println!(
                    "[{}] {}: {:.4} vs {:.4} +- {:.4}",
                    if check.pass { "pass" } else { "FAIL" },
                    check.name,
                    check.value,
                    check.expected,
                    check.tolerance,
                );
            }
            println!(
                "report written to {}",
                config.out_dir.join("burst_report.json").display()
            );
        }
        Command::Tomo { exact } => {
            let mut config = config;
            if *exact {
                config.tomo_exact = true;
            }
            let report = commands::cmd_tomo(&config)?;
            println!(
                "basis probs: Z {:.4}, X {:.4}, Y {:.4}",
                report.basis_probs.z, report.basis_probs.x, report.basis_probs.y
            );
            println!(
                "stokes ({:.4}, {:.4}, {:.4}); fidelity {}",
                report.stokes.s1,
                report.stokes.s2,
                report.stokes.s3,
                percent(report.fidelity),
            );
            println!(
                "report written to {}",
                config.out_dir.join("tomography_report.json").display()
            );
        }
        Command::Fit {
            points,
            mode,
            fixed_p,
            cavity_points,
        } => {
            let args = FitArgs {
                points: points.clone(),
                mode: match mode {
                    CliFitMode::Freespace => FitCurveMode::Freespace,
                    CliFitMode::Cavity => FitCurveMode::Cavity,
                },
                fixed_p: *fixed_p,
                cavity_points: cavity_points.clone(),
                verbose: cli.verbose,
            };
            let report = commands::cmd_fit(&config, &args)?;
            println!(
                "fitted k = {:.6}, p = {:.6} (enhancement {:.4}); residual {:.3e} in {} iterations",
                report.k,
                report.p,
                report.enhancement,
                report.fit.residual_norm,
                report.fit.iterations,
            );
            if let Some(gap) = &report.prediction_gap {
                println!(
                    "shared-slope cavity prediction: mean relative gap {}",
                    percent(gap.mean_gap)
                );
            }
            if !report.fit.converged {
                return Err(Error::NonConvergence {
                    iterations: report.fit.iterations,
                    breakdown: vec![("od fit".into(), report.fit.residual_norm)],
                });
            }
        }
        Command::Calibrate { targets, free } => {
            let targets = commands::parse_targets(targets)?;
            let free: Vec<FreeParam> = free
                .iter()
                .map(|s| FreeParam::parse(s))
                .collect::<crate::error::Result<_>>()?;
            let report = commands::cmd_calibrate(&config, &targets, &free)?;
            println!(
                "calibration {} after {} iterations, residual {:.3e}",
                if report.converged {
                    "converged"
                } else {
                    "did not converge"
                },
                report.iterations,
                report.residual_norm,
            );
            for (name, target, achieved) in &report.residual_table {
                println!("  {name}: target {target:.6}, achieved {achieved:.6}");
            }
            println!(
                "calibrated config written to {}",
                report.calibrated_config.display()
            );
        }
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init()
        .ok();
    let cli = Cli::parse();
    match run_command(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
