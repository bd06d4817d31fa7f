//! Run configuration: a flat, schema-versioned JSON document carrying every
//! physical parameter, the seed, trial counts and output selections.
//!
//! All randomness in a run flows from `master_seed`; identical configs
//! produce byte-identical artifacts.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::burst::{BurstParams, DarkCountMode};
use crate::error::{Error, Result};
use crate::model::{GeometryParams, RabiParams};
use crate::qubit::{BasisConvention, MeasurementBasis, QubitState, Rotation};
use crate::reference;

pub const SCHEMA_VERSION: u32 = 1;

/// Flat run configuration. Field names match the JSON schema one to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,

    // Reproducibility
    pub master_seed: u64,
    pub n_trials: u64,

    // Burst measurement
    pub n_repeats: u32,
    pub burst_window_ns: u64,
    pub p_click: f64,
    pub s_surv: f64,
    pub p_dark: f64,
    pub eta_prep: f64,
    pub mw_transfer_fidelity: f64,
    pub emission_tau_ns: f64,
    pub bin_size_ns: f64,
    pub dark_count_mode: DarkCountMode,
    pub phase_jitter_rad: f64,

    // Rabi scan
    pub rabi_omega_rad_per_s: f64,
    pub rabi_gamma_per_s: f64,
    pub rabi_amplitude: f64,
    pub scan_t_max_ns: f64,
    pub scan_step_ns: f64,

    // Cavity and geometry
    pub finesse: f64,
    pub blockade_radius_um: f64,
    pub excitation_radius_um: f64,

    // Basis-phase convention
    pub phase_x_rad: f64,
    pub phase_y_rad: f64,

    // Selections
    pub states: Vec<String>,
    pub basis: String,
    pub tomo_state: String,
    pub tomo_exact: bool,
    pub threshold: u32,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            master_seed: 20260810,
            n_trials: 100_000,
            n_repeats: reference::N_REPEATS,
            burst_window_ns: reference::BURST_WINDOW_NS,
            p_click: reference::CALIBRATED_P_CLICK,
            s_surv: reference::CALIBRATED_S_SURV,
            p_dark: reference::P_DARK,
            eta_prep: reference::ETA_PREP,
            mw_transfer_fidelity: reference::MW_TRANSFER_FIDELITY,
            emission_tau_ns: 50.0,
            bin_size_ns: reference::BIN_SIZE_NS,
            dark_count_mode: DarkCountMode::PerTrial,
            phase_jitter_rad: 0.0,
            rabi_omega_rad_per_s: reference::RABI_OMEGA_RAD_PER_S,
            rabi_gamma_per_s: 0.0,
            rabi_amplitude: reference::IN_FIBER_PEAK,
            scan_t_max_ns: 1000.0,
            scan_step_ns: 1.0,
            finesse: reference::FINESSE,
            blockade_radius_um: reference::BLOCKADE_RADIUS_UM,
            excitation_radius_um: reference::EXCITATION_RADIUS_UM,
            phase_x_rad: crate::qubit::DEFAULT_PHASE_X,
            phase_y_rad: crate::qubit::DEFAULT_PHASE_Y,
            states: vec!["r1".into(), "r2".into()],
            basis: "Z".into(),
            tomo_state: "d".into(),
            tomo_exact: false,
            threshold: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn burst_params(&self) -> BurstParams {
        BurstParams {
            n_repeats: self.n_repeats,
            burst_window_ns: self.burst_window_ns,
            p_click: self.p_click,
            s_surv: self.s_surv,
            p_dark: self.p_dark,
            eta_prep: self.eta_prep,
            mw_transfer_fidelity: self.mw_transfer_fidelity,
            emission_tau_ns: self.emission_tau_ns,
            bin_size_ns: self.bin_size_ns,
            dark_count_mode: self.dark_count_mode,
            phase_jitter_rad: self.phase_jitter_rad,
        }
    }

    pub fn rabi_params(&self) -> Result<RabiParams> {
        RabiParams::new(
            self.rabi_omega_rad_per_s,
            self.rabi_gamma_per_s,
            self.rabi_amplitude,
        )
    }

    pub fn geometry(&self) -> Result<GeometryParams> {
        GeometryParams::new(self.blockade_radius_um, self.excitation_radius_um)
    }

    pub fn convention(&self) -> BasisConvention {
        BasisConvention {
            phase_x: self.phase_x_rad,
            phase_y: self.phase_y_rad,
        }
    }

    pub fn measurement_basis(&self) -> Result<MeasurementBasis> {
        MeasurementBasis::parse(&self.basis)
    }

    /// Check every invariant, collecting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(format!(
                "schema_version = {} (this build reads version {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.n_trials == 0 {
            errs.push("n_trials must be >= 1".into());
        }
        if let Err(Error::Validation(list)) = self.burst_params().validate() {
            errs.extend(list);
        }
        if let Err(e) = self.rabi_params() {
            errs.push(e.to_string());
        }
        if let Err(e) = self.geometry() {
            errs.push(e.to_string());
        }
        if !(self.finesse > 0.0) {
            errs.push(format!("finesse = {} must be positive", self.finesse));
        }
        if !(self.scan_t_max_ns > 0.0) {
            errs.push(format!(
                "scan_t_max_ns = {} must be positive (zero-length scans are rejected)",
                self.scan_t_max_ns
            ));
        }
        if !(self.scan_step_ns > 0.0) {
            errs.push(format!(
                "scan_step_ns = {} must be positive",
                self.scan_step_ns
            ));
        }
        if self.scan_t_max_ns > 0.0
            && self.scan_step_ns > 0.0
            && self.scan_t_max_ns < self.scan_step_ns
        {
            errs.push("scan_t_max_ns must be at least one scan_step_ns".into());
        }
        if self.threshold == 0 {
            errs.push("threshold must be >= 1".into());
        }
        if self.states.is_empty() {
            errs.push("states must name at least one prepared state".into());
        }
        for label in &self.states {
            if let Err(e) = parse_state(label) {
                errs.push(e.to_string());
            }
        }
        if let Err(e) = MeasurementBasis::parse(&self.basis) {
            errs.push(e.to_string());
        }
        if let Err(e) = parse_state(&self.tomo_state) {
            errs.push(e.to_string());
        }
        if !self.phase_x_rad.is_finite() || !self.phase_y_rad.is_finite() {
            errs.push("basis phases must be finite".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        format!("sha256:{}", hex::encode(hasher.finalize()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
        let config: RunConfig = serde_json::from_str(&text)?;
        Ok(config)
    }

    pub fn to_file(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path.to_path_buf(), e))
    }
}

/// Parse a prepared-state spec.
///
/// Accepted forms: the named states `r1`, `r2`, `d`, `a`, `r`, `l`
/// (case-insensitive) and `rot:<theta>,<phi>` with angles in radians, meaning
/// the state prepared from |r1> by one pulse of that area and phase.
pub fn parse_state(spec: &str) -> Result<QubitState> {
    let lower = spec.trim().to_ascii_lowercase();
    match lower.as_str() {
        "r1" => return Ok(QubitState::r1()),
        "r2" => return Ok(QubitState::r2()),
        "d" => return Ok(QubitState::diagonal()),
        "a" => return Ok(QubitState::antidiagonal()),
        "r" => return Ok(QubitState::circular_right()),
        "l" => return Ok(QubitState::circular_left()),
        _ => {}
    }
    if let Some(rest) = lower.strip_prefix("rot:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            let theta: f64 = parts[0].trim().parse().map_err(|_| Error::Malformed {
                line: 0,
                message: format!("bad pulse area in state spec `{spec}`"),
            })?;
            let phi: f64 = parts[1].trim().parse().map_err(|_| Error::Malformed {
                line: 0,
                message: format!("bad phase in state spec `{spec}`"),
            })?;
            let rot = Rotation::new(theta, crate::qubit::wrap_phase(phi))?;
            return Ok(crate::qubit::prepare_state(&rot));
        }
    }
    Err(Error::Malformed {
        line: 0,
        message: format!(
            "unknown state spec `{spec}`; expected r1, r2, d, a, r, l or rot:<theta>,<phi>"
        ),
    })
}

/// Human-readable label normalization for file naming.
pub fn state_file_label(spec: &str) -> String {
    spec.trim()
        .to_ascii_lowercase()
        .replace([':', ',', '.'], "_")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::born_probability;
    use approx::assert_relative_eq;

    #[test]
    fn default_config_is_valid_and_calibrated() {
        let config = RunConfig::default();
        config.validate().unwrap();
        let stats = crate::burst::expected_statistics(
            &QubitState::r1(),
            MeasurementBasis::Z,
            &config.burst_params(),
        )
        .unwrap();
        assert_relative_eq!(stats.mean_photons, 2.63, epsilon = 1e-9);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let config = RunConfig::default();
        assert_eq!(config.digest(), config.digest());
        let mut other = config.clone();
        other.master_seed += 1;
        assert_ne!(config.digest(), other.digest());
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = RunConfig::default();
        let text = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn validation_lists_every_offender() {
        let config = RunConfig {
            p_click: 2.0,
            eta_prep: -1.0,
            n_trials: 0,
            threshold: 0,
            ..RunConfig::default()
        };
        match config.validate().unwrap_err() {
            Error::Validation(list) => assert_eq!(list.len(), 4),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn shipped_defaults_file_matches_builtin_defaults() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("config/defaults.json");
        let from_file = RunConfig::from_file(&path).unwrap();
        assert_eq!(from_file, RunConfig::default());
    }

    #[test]
    fn state_specs_parse() {
        assert_relative_eq!(
            born_probability(&parse_state("D").unwrap(), &QubitState::diagonal()),
            1.0,
            epsilon = 1e-12
        );
        let rot = parse_state("rot:1.5707963267948966,1.5707963267948966").unwrap();
        assert_relative_eq!(
            born_probability(&rot, &QubitState::diagonal()),
            1.0,
            epsilon = 1e-9
        );
        assert!(parse_state("q7").is_err());
        assert!(parse_state("rot:abc,0").is_err());
    }
}
