//! The operations behind the `superatom` binary: each takes a validated
//! [`RunConfig`], writes its artifacts under `out_dir`, and returns the report
//! it wrote. The CLI layer only parses arguments and renders summaries.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::analysis::{
    corrected_conditionals, density_from_stokes, fit_poisson, prep_corrected_mean,
    prep_efficiency_from_peaks, project_physical, state_fidelity, stokes_from_probs,
    DiscriminationResult, StokesVector,
};
use crate::burst::{
    expected_statistics_with, photon_histogram, simulate_dataset_with, temporal_profile,
    BranchCounts, BurstStatistics, Dataset, TemporalProfile,
};
use crate::config::{parse_state, state_file_label, RunConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::fit::{
    calibrate_burst, fit_od_curve, predict_cavity_from_freespace, CalibrationTargets, DataPoint,
    FitOptions, FitResult, FreeParam, OdFit, OdMode,
};
use crate::io;
use crate::model::{pi_pulse_duration, rabi_population};
use crate::qubit::{basis_plus_state, born_probability, MeasurementBasis};
use crate::reference;

/// One pass/fail line of a report's consistency table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }
}

// ---------------------------------------------------------------------------
// rabi

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiSummary {
    pub schema_version: u32,
    pub config_digest: String,
    pub pi_pulse_ns: f64,
    pub peak_population: f64,
    pub peak_time_ns: f64,
    pub n_points: usize,
    pub scan_path: PathBuf,
}

/// Scan the collective Rabi oscillation and write `(t_ns, population)` CSV.
pub fn cmd_rabi(config: &RunConfig) -> Result<RabiSummary> {
    config.validate()?;
    io::ensure_dir(&config.out_dir)?;
    let params = config.rabi_params()?;
    let mut scan = Vec::new();
    let mut t_ns = 0.0;
    let mut peak = (0.0f64, 0.0f64);
    while t_ns <= config.scan_t_max_ns {
        let population = rabi_population(t_ns * 1e-9, &params)?;
        if population > peak.1 {
            peak = (t_ns, population);
        }
        scan.push((t_ns, population));
        t_ns += config.scan_step_ns;
    }
    let scan_path = config.out_dir.join("rabi_scan.csv");
    io::write_scan_csv(&scan_path, &scan)?;
    let summary = RabiSummary {
        schema_version: SCHEMA_VERSION,
        config_digest: config.digest(),
        pi_pulse_ns: pi_pulse_duration(params.omega)? * 1e9,
        peak_population: peak.1,
        peak_time_ns: peak.0,
        n_points: scan.len(),
        scan_path,
    };
    io::write_json(&config.out_dir.join("rabi_summary.json"), &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// burst

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub label: String,
    pub seed: u64,
    pub n_trials: u64,
    pub mean_photons: f64,
    pub prob_zero: f64,
    pub prob_geq1: f64,
    pub poisson_mean_fit: f64,
    pub branch_counts: BranchCounts,
    /// Analytic expectation for the same parameters.
    pub expected: BurstStatistics,
    pub dataset_csv: PathBuf,
    pub profile_csv: PathBuf,
    pub histogram_csv: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectedSummary {
    pub conditionals: DiscriminationResult,
    pub corrected_mean_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstReport {
    pub schema_version: u32,
    pub config_digest: String,
    pub config: RunConfig,
    pub states: Vec<StateSummary>,
    pub discrimination: Option<DiscriminationResult>,
    pub corrected: Option<CorrectedSummary>,
    pub prep_efficiency_estimate: Option<f64>,
    pub checks: Vec<CheckLine>,
}

fn simulate_state(
    config: &RunConfig,
    label: &str,
    ordinal: u64,
) -> Result<(Dataset, TemporalProfile, Vec<u64>, StateSummary)> {
    let state = parse_state(label)?;
    let basis = config.measurement_basis()?;
    let conv = config.convention();
    let seed = config.master_seed.wrapping_add(ordinal);
    let params = config.burst_params();
    let ds = simulate_dataset_with(&state, basis, &conv, config.n_trials, &params, seed)?;
    let profile = temporal_profile(&ds)?;
    let histogram = photon_histogram(&ds)?;
    let expected = expected_statistics_with(&state, basis, &conv, &params)?;

    let file_label = state_file_label(label);
    let dataset_csv = config.out_dir.join(format!("dataset_{file_label}.csv"));
    let profile_csv = config.out_dir.join(format!("profile_{file_label}.csv"));
    let histogram_csv = config.out_dir.join(format!("histogram_{file_label}.csv"));
    io::write_dataset_csv(&ds, &dataset_csv)?;
    io::write_profile_csv(&profile_csv, &profile)?;
    io::write_histogram_csv(&histogram_csv, &histogram)?;

    let summary = StateSummary {
        label: label.to_string(),
        seed,
        n_trials: config.n_trials,
        mean_photons: ds.mean_photons(),
        prob_zero: ds.fraction_zero(),
        prob_geq1: ds.fraction_geq(config.threshold),
        poisson_mean_fit: fit_poisson(&histogram)?,
        branch_counts: ds.branch_counts(),
        expected,
        dataset_csv,
        profile_csv,
        histogram_csv,
    };
    io::write_json(
        &config.out_dir.join(format!("summary_{file_label}.json")),
        &summary,
    )?;
    Ok((ds, profile, histogram, summary))
}

/// Simulate a burst dataset per requested state; when the run contains the
/// standard r1/r2 pair, also compute discrimination, corrected fidelity and
/// the first-peak preparation-efficiency estimate.
pub fn cmd_burst(config: &RunConfig) -> Result<BurstReport> {
    config.validate()?;
    io::ensure_dir(&config.out_dir)?;

    let mut states = Vec::new();
    let mut r1_data: Option<(Dataset, TemporalProfile)> = None;
    let mut r2_data: Option<(Dataset, TemporalProfile)> = None;
    for (ordinal, label) in config.states.iter().enumerate() {
        let (ds, profile, _hist, summary) = simulate_state(config, label, ordinal as u64)?;
        states.push(summary);
        match state_file_label(label).as_str() {
            "r1" => r1_data = Some((ds, profile)),
            "r2" => r2_data = Some((ds, profile)),
            _ => {}
        }
    }

    let mut discrimination = None;
    let mut corrected = None;
    let mut prep_efficiency_estimate = None;
    let mut checks = Vec::new();
    if let (Some((ds_r1, profile_r1)), Some((ds_r2, profile_r2))) = (&r1_data, &r2_data) {
        let disc = crate::analysis::discrimination(ds_r1, ds_r2, config.threshold)?;
        let p0_r1 = ds_r1.fraction_zero();
        let corr = corrected_conditionals(&disc, p0_r1, config.eta_prep)?;
        let corrected_mean_r2 =
            prep_corrected_mean(ds_r2.mean_photons(), ds_r1.mean_photons(), config.eta_prep)?;
        let period = config.burst_window_ns / config.n_repeats as u64;
        prep_efficiency_estimate = Some(prep_efficiency_from_peaks(
            profile_r1,
            profile_r2,
            (0, period),
        )?);

        checks.push(CheckLine::new(
            "mean photons (r1)",
            ds_r1.mean_photons(),
            reference::MEAN_PHOTONS_R1,
            0.05,
        ));
        checks.push(CheckLine::new(
            "mean photons (r2)",
            ds_r2.mean_photons(),
            reference::MEAN_PHOTONS_R2,
            0.02,
        ));
        checks.push(CheckLine::new(
            "P(detect r2 | r2)",
            disc.p_detect_r2_given_r2,
            reference::COND_R2,
            0.015,
        ));
        checks.push(CheckLine::new(
            "P(detect r1 | r1)",
            disc.p_detect_r1_given_r1,
            reference::COND_R1,
            0.015,
        ));
        checks.push(CheckLine::new(
            "raw fidelity",
            disc.raw_fidelity,
            reference::RAW_FIDELITY,
            0.012,
        ));
        if let Some(eta) = prep_efficiency_estimate {
            checks.push(CheckLine::new(
                "prep efficiency estimate",
                eta,
                reference::ETA_PREP,
                0.01,
            ));
        }
        discrimination = Some(disc);
        corrected = Some(CorrectedSummary {
            conditionals: corr,
            corrected_mean_r2,
        });
    }

    let report = BurstReport {
        schema_version: SCHEMA_VERSION,
        config_digest: config.digest(),
        config: config.clone(),
        states,
        discrimination,
        corrected,
        prep_efficiency_estimate,
        checks,
    };
    io::write_json(&config.out_dir.join("burst_report.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// tomo

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisProbs {
    pub z: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    pub schema_version: u32,
    pub config_digest: String,
    pub config: RunConfig,
    /// Plus-state probabilities per basis (exact or estimated).
    pub basis_probs: BasisProbs,
    /// Stokes vector before physicality projection.
    pub stokes_raw: StokesVector,
    /// Stokes vector after projection; what the density matrix encodes.
    pub stokes: StokesVector,
    /// Row-major (re, im) pairs of the projected density matrix.
    pub density_matrix: [[f64; 2]; 4],
    pub fidelity: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub exact: bool,
}

/// Tomograph the configured state: measure in Z, X, Y, rebuild the density
/// matrix from Stokes parameters and score fidelity against the target.
///
/// With `tomo_exact` the Born probabilities are used directly (a noiseless,
/// infinite-trial reference); otherwise each basis is simulated.
pub fn cmd_tomo(config: &RunConfig) -> Result<TomographyReport> {
    config.validate()?;
    io::ensure_dir(&config.out_dir)?;
    let state = parse_state(&config.tomo_state)?;
    let conv = config.convention();

    let mut probs = [0.0f64; 3];
    for (ordinal, basis) in MeasurementBasis::ALL.iter().enumerate() {
        probs[ordinal] = if config.tomo_exact {
            born_probability(&state, &basis_plus_state(*basis, &conv))
        } else {
            let seed = config.master_seed.wrapping_add(ordinal as u64);
            let ds = simulate_dataset_with(
                &state,
                *basis,
                &conv,
                config.n_trials,
                &config.burst_params(),
                seed,
            )?;
            ds.fraction_geq(config.threshold)
        };
    }
    let [p_z, p_x, p_y] = probs;

    let stokes_raw = stokes_from_probs(p_z, p_x, p_y);
    let rho = project_physical(&density_from_stokes(&stokes_raw));
    let report = TomographyReport {
        schema_version: SCHEMA_VERSION,
        config_digest: config.digest(),
        config: config.clone(),
        basis_probs: BasisProbs {
            z: p_z,
            x: p_x,
            y: p_y,
        },
        stokes_raw,
        stokes: rho.stokes(),
        density_matrix: rho.row_major_pairs(),
        fidelity: state_fidelity(&rho, &state),
        n_trials: if config.tomo_exact {
            0
        } else {
            config.n_trials
        },
        seed: config.master_seed,
        exact: config.tomo_exact,
    };
    io::write_json(&config.out_dir.join("tomography_report.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// fit

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitCurveMode {
    Freespace,
    Cavity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitArgs {
    pub points: PathBuf,
    pub mode: FitCurveMode,
    /// Pin the saturation ceiling instead of fitting it.
    pub fixed_p: Option<f64>,
    /// Measured cavity points to score against the shared-slope prediction
    /// (freespace mode only).
    pub cavity_points: Option<PathBuf>,
    /// Keep the full iterate trace in the emitted JSON.
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub points: Vec<DataPoint>,
    pub predicted: Vec<f64>,
    pub gap: Vec<f64>,
    pub mean_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub config_digest: String,
    pub mode: FitCurveMode,
    pub k: f64,
    pub p: f64,
    pub enhancement: f64,
    pub fit: FitResult,
    pub prediction_gap: Option<GapSummary>,
}

/// Fit an efficiency-vs-OD points file; in freespace mode optionally predict
/// the cavity curve with shared parameters and score measured cavity points.
pub fn cmd_fit(config: &RunConfig, args: &FitArgs) -> Result<FitReport> {
    config.validate()?;
    io::ensure_dir(&config.out_dir)?;
    let points = io::read_points_csv(&args.points)?;
    let mode = match args.mode {
        FitCurveMode::Freespace => OdMode::FreeSpace,
        FitCurveMode::Cavity => OdMode::Cavity {
            finesse: config.finesse,
        },
    };
    let od_fit: OdFit = fit_od_curve(&points, mode, args.fixed_p, &FitOptions::default())?;

    let prediction_gap = match (&args.mode, &args.cavity_points) {
        (FitCurveMode::Freespace, Some(path)) => {
            let measured = io::read_points_csv(path)?;
            let prediction = predict_cavity_from_freespace(&od_fit, config.finesse)?;
            let predicted: Result<Vec<f64>> =
                measured.iter().map(|pt| prediction.predict(pt.x)).collect();
            let gap = prediction.gap(&measured)?;
            let mean_gap = prediction.mean_gap(&measured)?;
            Some(GapSummary {
                points: measured,
                predicted: predicted?,
                gap,
                mean_gap,
            })
        }
        _ => None,
    };

    let mut fit = od_fit.fit.clone();
    if !args.verbose {
        fit.trace.clear();
    }
    let report = FitReport {
        schema_version: SCHEMA_VERSION,
        config_digest: config.digest(),
        mode: args.mode,
        k: od_fit.model.k,
        p: od_fit.model.p,
        enhancement: od_fit.model.enhancement,
        fit,
        prediction_gap,
    };
    io::write_json(&config.out_dir.join("fit_result.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// calibrate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrateReport {
    pub schema_version: u32,
    pub config_digest: String,
    pub targets: CalibrationTargets,
    pub free: Vec<FreeParam>,
    /// (target name, target value, achieved value).
    pub residual_table: Vec<(String, f64, f64)>,
    pub residual_norm: f64,
    pub iterations: u32,
    pub converged: bool,
    pub calibrated_config: PathBuf,
}

/// Calibrate the free burst parameters against the targets and write a new
/// config carrying the solution.
pub fn cmd_calibrate(
    config: &RunConfig,
    targets: &CalibrationTargets,
    free: &[FreeParam],
) -> Result<CalibrateReport> {
    config.validate()?;
    io::ensure_dir(&config.out_dir)?;
    let outcome = calibrate_burst(targets, free, &config.burst_params())?;

    let mut calibrated = config.clone();
    calibrated.p_click = outcome.params.p_click;
    calibrated.s_surv = outcome.params.s_surv;
    calibrated.p_dark = outcome.params.p_dark;
    calibrated.eta_prep = outcome.params.eta_prep;
    let calibrated_config = config.out_dir.join("calibrated_config.json");
    calibrated.to_file(&calibrated_config)?;

    let report = CalibrateReport {
        schema_version: SCHEMA_VERSION,
        config_digest: config.digest(),
        targets: *targets,
        free: free.to_vec(),
        residual_table: outcome.residual_table,
        residual_norm: outcome.fit.residual_norm,
        iterations: outcome.fit.iterations,
        converged: outcome.fit.converged,
        calibrated_config,
    };
    io::write_json(&config.out_dir.join("calibration_report.json"), &report)?;
    Ok(report)
}

// ---------------------------------------------------------------------------

/// Parse `name=value` target pairs into [`CalibrationTargets`].
pub fn parse_targets(pairs: &[String]) -> Result<CalibrationTargets> {
    let mut targets = CalibrationTargets::default();
    for pair in pairs {
        let (name, value) = pair.split_once('=').ok_or_else(|| Error::Malformed {
            line: 0,
            message: format!("target `{pair}` is not of the form name=value"),
        })?;
        let value: f64 = value.trim().parse().map_err(|_| Error::Malformed {
            line: 0,
            message: format!("target `{pair}` has a non-numeric value"),
        })?;
        match name.trim() {
            "mean_r1" => targets.mean_r1 = Some(value),
            "mean_r2" => targets.mean_r2 = Some(value),
            "p0_r2" => targets.p0_r2 = Some(value),
            "p_geq1_r1" => targets.p_geq1_r1 = Some(value),
            other => {
                return Err(Error::Malformed {
                    line: 0,
                    message: format!(
                        "unknown target `{other}`; expected mean_r1, mean_r2, p0_r2 or p_geq1_r1"
                    ),
                })
            }
        }
    }
    Ok(targets)
}

/// Resolve the effective config from an optional file plus CLI overrides.
pub fn load_config(
    path: Option<&Path>,
    seed: Option<u64>,
    trials: Option<u64>,
    out: Option<&Path>,
    state: &[String],
    basis: Option<&str>,
) -> Result<RunConfig> {
    let mut config = match path {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(trials) = trials {
        config.n_trials = trials;
    }
    if let Some(out) = out {
        config.out_dir = out.to_path_buf();
    }
    if !state.is_empty() {
        config.states = state.to_vec();
        config.tomo_state = state[0].clone();
    }
    if let Some(basis) = basis {
        config.basis = basis.to_string();
    }
    Ok(config)
}
