//! Seeded Monte Carlo engine for the blockade-conditioned photon-burst
//! measurement, plus the exact analytic forward model it is checked against.
//!
//! One trial follows the measurement protocol:
//!
//! 1. superatom preparation succeeds with probability `eta_prep`; a failed
//!    preparation leaves an unblockaded ground-state ensemble that retrieves
//!    normally,
//! 2. the basis pulse (with a transfer-error flip scaled by pulse area) and a
//!    Born draw decide whether the burst is blockaded,
//! 3. an unblockaded trial clicks independently per repeat with `p_click`,
//!    each click timestamped by a truncated-exponential emission envelope,
//! 4. a blockaded trial keeps suppressing clicks while the blockading
//!    excitation survives per-repeat checks with `s_surv`; once lost, the
//!    remaining repeats revert to the unblockaded rule,
//! 5. dark counts land uniformly in the window.
//!
//! Trial `i` of a dataset draws from substream `(master_seed, i)`, so
//! datasets are byte-identical across thread counts and schedules.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qubit::{
    basis_rotation_with, rotation_unitary, BasisConvention, MeasurementBasis, QubitState, Rotation,
};
use crate::rng::trial_rng;

/// Whether the dark-count probability applies once per trial or once per
/// repeat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DarkCountMode {
    #[default]
    PerTrial,
    PerRepeat,
}

/// All knobs of the burst measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstParams {
    /// Number of excite/retrieve repeats per burst.
    pub n_repeats: u32,
    /// Total burst window in integer nanoseconds; must divide evenly into
    /// `n_repeats` periods.
    pub burst_window_ns: u64,
    /// Per-repeat photon-detection probability on the unblockaded branch.
    pub p_click: f64,
    /// Per-repeat survival probability of the blockading excitation.
    pub s_surv: f64,
    /// Dark-count probability (see `dark_count_mode`).
    pub p_dark: f64,
    /// Superatom preparation efficiency.
    pub eta_prep: f64,
    /// Microwave transfer fidelity of a pi pulse; the flip error of a pulse
    /// with area theta is `(1 - fidelity) * theta / pi`.
    pub mw_transfer_fidelity: f64,
    /// Time constant of the intra-repeat emission envelope, in ns.
    pub emission_tau_ns: f64,
    /// Temporal-profile bin size in ns.
    pub bin_size_ns: f64,
    pub dark_count_mode: DarkCountMode,
    /// Gaussian sigma of the per-trial basis-pulse phase jitter, radians.
    pub phase_jitter_rad: f64,
}

impl Default for BurstParams {
    /// The calibrated reference parameter set.
    fn default() -> Self {
        use crate::reference as r;
        Self {
            n_repeats: r::N_REPEATS,
            burst_window_ns: r::BURST_WINDOW_NS,
            p_click: r::CALIBRATED_P_CLICK,
            s_surv: r::CALIBRATED_S_SURV,
            p_dark: r::P_DARK,
            eta_prep: r::ETA_PREP,
            mw_transfer_fidelity: r::MW_TRANSFER_FIDELITY,
            emission_tau_ns: r::BURST_WINDOW_NS as f64 / r::N_REPEATS as f64 / 8.0,
            bin_size_ns: r::BIN_SIZE_NS,
            dark_count_mode: DarkCountMode::PerTrial,
            phase_jitter_rad: 0.0,
        }
    }
}

impl BurstParams {
    /// Duration of one repeat, `burst_window / n_repeats`.
    pub fn repeat_period_ns(&self) -> u64 {
        self.burst_window_ns / self.n_repeats as u64
    }

    /// Check every invariant, collecting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut prob = |name: &str, v: f64| {
            if !(0.0..=1.0).contains(&v) {
                errs.push(format!("{name} = {v} must lie in [0, 1]"));
            }
        };
        prob("p_click", self.p_click);
        prob("s_surv", self.s_surv);
        prob("p_dark", self.p_dark);
        prob("eta_prep", self.eta_prep);
        prob("mw_transfer_fidelity", self.mw_transfer_fidelity);
        if self.n_repeats == 0 {
            errs.push("n_repeats must be >= 1".into());
        }
        if self.burst_window_ns == 0 {
            errs.push("burst_window_ns must be positive".into());
        } else if self.n_repeats > 0 && !self.burst_window_ns.is_multiple_of(self.n_repeats as u64)
        {
            errs.push(format!(
                "burst_window_ns = {} must be divisible by n_repeats = {}",
                self.burst_window_ns, self.n_repeats
            ));
        }
        if !(self.emission_tau_ns > 0.0) {
            errs.push(format!(
                "emission_tau_ns = {} must be positive",
                self.emission_tau_ns
            ));
        }
        if !(self.bin_size_ns > 0.0) {
            errs.push(format!(
                "bin_size_ns = {} must be positive",
                self.bin_size_ns
            ));
        }
        if !(self.phase_jitter_rad >= 0.0) {
            errs.push(format!(
                "phase_jitter_rad = {} must be nonnegative",
                self.phase_jitter_rad
            ));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Which generative branch a trial took. `DarkOnly` tags blockaded trials
/// whose only clicks were dark counts, the classification-error channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Unblocked,
    Blocked,
    PrepFail,
    DarkOnly,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::Unblocked => "unblocked",
            Branch::Blocked => "blocked",
            Branch::PrepFail => "prep_fail",
            Branch::DarkOnly => "dark_only",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unblocked" => Ok(Branch::Unblocked),
            "blocked" => Ok(Branch::Blocked),
            "prep_fail" => Ok(Branch::PrepFail),
            "dark_only" => Ok(Branch::DarkOnly),
            _ => Err(Error::Malformed {
                line: 0,
                message: format!("unknown branch label `{s}`"),
            }),
        }
    }
}

/// One detected photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Click {
    pub repeat_index: u32,
    pub timestamp_ns: u64,
}

/// Outcome of one measurement trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstRecord {
    pub clicks: Vec<Click>,
    pub total: u32,
    pub branch: Branch,
}

/// A batch of trials sharing preparation, basis, parameters and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<BurstRecord>,
    pub prepared_state: QubitState,
    pub basis: MeasurementBasis,
    pub params: BurstParams,
    pub master_seed: u64,
}

impl Dataset {
    pub fn n_trials(&self) -> usize {
        self.records.len()
    }

    pub fn mean_photons(&self) -> f64 {
        let sum: u64 = self.records.iter().map(|r| r.total as u64).sum();
        sum as f64 / self.records.len() as f64
    }

    pub fn fraction_zero(&self) -> f64 {
        let zeros = self.records.iter().filter(|r| r.total == 0).count();
        zeros as f64 / self.records.len() as f64
    }

    pub fn fraction_geq(&self, threshold: u32) -> f64 {
        let hits = self.records.iter().filter(|r| r.total >= threshold).count();
        hits as f64 / self.records.len() as f64
    }

    pub fn branch_counts(&self) -> BranchCounts {
        let mut counts = BranchCounts::default();
        for r in &self.records {
            match r.branch {
                Branch::Unblocked => counts.unblocked += 1,
                Branch::Blocked => counts.blocked += 1,
                Branch::PrepFail => counts.prep_fail += 1,
                Branch::DarkOnly => counts.dark_only += 1,
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCounts {
    pub unblocked: u64,
    pub blocked: u64,
    pub prep_fail: u64,
    pub dark_only: u64,
}

/// Exact moments of the generative model, computed without sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstStatistics {
    pub mean_photons: f64,
    pub prob_zero: f64,
    pub prob_geq1: f64,
    /// Branch weights implied by `eta_prep`, the transfer error and the Born
    /// probability.
    pub weight_prep_fail: f64,
    pub weight_unblocked: f64,
    pub weight_blocked: f64,
    /// Mean photons conditional on the blockaded branch (dark counts
    /// included): the quantity preparation correction recovers.
    pub blocked_branch_mean: f64,
}

/// Probability that the basis pulse plus Born draw routes a prepared trial to
/// the unblockaded (r1-pointer) branch, averaged over phase jitter.
fn unblocked_probability(state: &QubitState, rot: &Rotation, params: &BurstParams) -> f64 {
    let c = (rot.theta / 2.0).cos();
    let s = (rot.theta / 2.0).sin();
    // p_plus(delta) = |c psi1 + i e^{-i(phi+delta)} s psi2|^2; averaging the
    // cross term over Gaussian delta multiplies it by exp(-sigma^2/2).
    let w = num_complex::Complex64::I
        * state.amp_r1().conj()
        * state.amp_r2()
        * num_complex::Complex64::from_polar(1.0, -rot.phi);
    let damp = (-params.phase_jitter_rad * params.phase_jitter_rad / 2.0).exp();
    let p_plus =
        c * c * state.population_r1() + s * s * state.population_r2() + 2.0 * c * s * damp * w.re;
    let p_plus = p_plus.clamp(0.0, 1.0);
    let flip = (1.0 - params.mw_transfer_fidelity) * rot.theta / PI;
    p_plus * (1.0 - flip) + (1.0 - p_plus) * flip
}

/// Exact expectation of (mean photons, P(N=0), P(N>=1)) over the generative
/// model, by closed-form mixture summation.
pub fn expected_statistics(
    state: &QubitState,
    basis: MeasurementBasis,
    params: &BurstParams,
) -> Result<BurstStatistics> {
    expected_statistics_with(state, basis, &BasisConvention::default(), params)
}

/// [`expected_statistics`] under an explicit basis-phase convention.
pub fn expected_statistics_with(
    state: &QubitState,
    basis: MeasurementBasis,
    conv: &BasisConvention,
    params: &BurstParams,
) -> Result<BurstStatistics> {
    params.validate()?;
    let rot = basis_rotation_with(basis, conv);
    let n = params.n_repeats as i32;
    let p = params.p_click;
    let q = 1.0 - p;
    let s = params.s_surv;

    let p_unblk = unblocked_probability(state, &rot, params);
    let weight_prep_fail = 1.0 - params.eta_prep;
    let weight_unblocked = params.eta_prep * p_unblk;
    let weight_blocked = params.eta_prep * (1.0 - p_unblk);

    // Unblockaded branch: independent repeats.
    let mean_unblk = n as f64 * p;
    let p0_unblk = q.powi(n);

    // Blockaded branch: repeat i stays dark while the excitation has survived
    // i+1 checks; once lost the remaining repeats click independently.
    let mut expected_open_repeats = 0.0;
    for i in 0..n {
        expected_open_repeats += 1.0 - s.powi(i + 1);
    }
    let mean_blk = p * expected_open_repeats;
    let mut p0_blk = s.powi(n);
    for m in 0..n {
        p0_blk += s.powi(m) * (1.0 - s) * q.powi(n - m);
    }

    let open_weight = weight_prep_fail + weight_unblocked;
    let mean_signal = open_weight * mean_unblk + weight_blocked * mean_blk;
    let p0_signal = open_weight * p0_unblk + weight_blocked * p0_blk;

    let (dark_mean, dark_zero) = match params.dark_count_mode {
        DarkCountMode::PerTrial => (params.p_dark, 1.0 - params.p_dark),
        DarkCountMode::PerRepeat => (n as f64 * params.p_dark, (1.0 - params.p_dark).powi(n)),
    };

    let mean_photons = mean_signal + dark_mean;
    let prob_zero = p0_signal * dark_zero;
    Ok(BurstStatistics {
        mean_photons,
        prob_zero,
        prob_geq1: 1.0 - prob_zero,
        weight_prep_fail,
        weight_unblocked,
        weight_blocked,
        blocked_branch_mean: mean_blk + dark_mean,
    })
}

/// Draw a click offset inside one repeat from the truncated exponential
/// envelope, as integer nanoseconds in `[0, period)`.
fn sample_click_offset<R: Rng>(rng: &mut R, tau_ns: f64, period_ns: u64) -> u64 {
    let t = period_ns as f64;
    let cap = 1.0 - (-t / tau_ns).exp();
    let u: f64 = rng.random();
    let offset = -tau_ns * (1.0 - u * cap).ln();
    (offset.floor() as u64).min(period_ns - 1)
}

/// Run one measurement trial on a validated parameter set.
fn simulate_trial_unchecked<R: Rng>(
    state: &QubitState,
    basis: MeasurementBasis,
    conv: &BasisConvention,
    params: &BurstParams,
    rng: &mut R,
) -> BurstRecord {
    let prepared = rng.random::<f64>() < params.eta_prep;

    let mut branch;
    let mut blocked = false;
    if prepared {
        let rot = basis_rotation_with(basis, conv);
        let rot = if params.phase_jitter_rad > 0.0 {
            let delta: f64 = rng.sample(rand_distr::StandardNormal);
            Rotation {
                theta: rot.theta,
                phi: crate::qubit::wrap_phase(rot.phi + params.phase_jitter_rad * delta),
            }
        } else {
            rot
        };
        let rotated = rotation_unitary(&rot.inverse()).apply(state);
        let mut pointer_r1 = rng.random::<f64>() < rotated.population_r1();
        let flip = (1.0 - params.mw_transfer_fidelity) * rot.theta / PI;
        if flip > 0.0 && rng.random::<f64>() < flip {
            pointer_r1 = !pointer_r1;
        }
        if pointer_r1 {
            branch = Branch::Unblocked;
        } else {
            branch = Branch::Blocked;
            blocked = true;
        }
    } else {
        branch = Branch::PrepFail;
    }

    let period = params.repeat_period_ns();
    let mut clicks = Vec::new();
    let mut still_blocked = blocked;
    for repeat in 0..params.n_repeats {
        if still_blocked {
            if rng.random::<f64>() < params.s_surv {
                continue;
            }
            still_blocked = false;
        }
        if rng.random::<f64>() < params.p_click {
            let offset = sample_click_offset(rng, params.emission_tau_ns, period);
            clicks.push(Click {
                repeat_index: repeat,
                timestamp_ns: repeat as u64 * period + offset,
            });
        }
    }
    let signal_clicks = clicks.len();

    match params.dark_count_mode {
        DarkCountMode::PerTrial => {
            if rng.random::<f64>() < params.p_dark {
                let t = rng.random_range(0..params.burst_window_ns);
                clicks.push(Click {
                    repeat_index: (t / period) as u32,
                    timestamp_ns: t,
                });
            }
        }
        DarkCountMode::PerRepeat => {
            for repeat in 0..params.n_repeats {
                if rng.random::<f64>() < params.p_dark {
                    let t = repeat as u64 * period + rng.random_range(0..period);
                    clicks.push(Click {
                        repeat_index: repeat,
                        timestamp_ns: t,
                    });
                }
            }
        }
    }

    clicks.sort_by_key(|c| (c.timestamp_ns, c.repeat_index));
    if branch == Branch::Blocked && signal_clicks == 0 && !clicks.is_empty() {
        branch = Branch::DarkOnly;
    }
    BurstRecord {
        total: clicks.len() as u32,
        clicks,
        branch,
    }
}

/// Run one measurement trial with the default basis convention.
pub fn simulate_trial<R: Rng>(
    state: &QubitState,
    basis: MeasurementBasis,
    params: &BurstParams,
    rng: &mut R,
) -> Result<BurstRecord> {
    params.validate()?;
    Ok(simulate_trial_unchecked(
        state,
        basis,
        &BasisConvention::default(),
        params,
        rng,
    ))
}

/// Simulate `n_trials` independent trials; trial `i` draws from substream
/// `(master_seed, i)`, so the dataset is identical under any parallel
/// schedule.
pub fn simulate_dataset(
    state: &QubitState,
    basis: MeasurementBasis,
    n_trials: u64,
    params: &BurstParams,
    master_seed: u64,
) -> Result<Dataset> {
    simulate_dataset_with(
        state,
        basis,
        &BasisConvention::default(),
        n_trials,
        params,
        master_seed,
    )
}

/// [`simulate_dataset`] under an explicit basis-phase convention.
pub fn simulate_dataset_with(
    state: &QubitState,
    basis: MeasurementBasis,
    conv: &BasisConvention,
    n_trials: u64,
    params: &BurstParams,
    master_seed: u64,
) -> Result<Dataset> {
    if n_trials == 0 {
        return Err(Error::Empty("n_trials must be >= 1"));
    }
    params.validate()?;
    let records: Vec<BurstRecord> = (0..n_trials as usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, i as u64);
            simulate_trial_unchecked(state, basis, conv, params, &mut rng)
        })
        .collect();
    Ok(Dataset {
        records,
        prepared_state: *state,
        basis,
        params: params.clone(),
        master_seed,
    })
}

/// Histogram of click timestamps over the burst window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalProfile {
    pub bin_size_ns: f64,
    pub window_ns: u64,
    pub counts: Vec<u64>,
}

impl TemporalProfile {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Sum of counts in bins whose start time lies in `[start_ns, end_ns)`.
    pub fn area(&self, start_ns: u64, end_ns: u64) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let bin_start = *i as f64 * self.bin_size_ns;
                bin_start >= start_ns as f64 && bin_start < end_ns as f64
            })
            .map(|(_, c)| c)
            .sum()
    }
}

/// Bin all click timestamps of a dataset with the configured bin size.
pub fn temporal_profile(ds: &Dataset) -> Result<TemporalProfile> {
    if ds.records.is_empty() {
        return Err(Error::Empty("dataset has no records"));
    }
    let bin = ds.params.bin_size_ns;
    let n_bins = (ds.params.burst_window_ns as f64 / bin).ceil() as usize;
    let mut counts = vec![0u64; n_bins];
    for record in &ds.records {
        for click in &record.clicks {
            let idx = ((click.timestamp_ns as f64 / bin) as usize).min(n_bins - 1);
            counts[idx] += 1;
        }
    }
    Ok(TemporalProfile {
        bin_size_ns: bin,
        window_ns: ds.params.burst_window_ns,
        counts,
    })
}

/// Histogram of total detected photons per trial, indexed by N.
pub fn photon_histogram(ds: &Dataset) -> Result<Vec<u64>> {
    if ds.records.is_empty() {
        return Err(Error::Empty("dataset has no records"));
    }
    let max_total = ds.records.iter().map(|r| r.total).max().unwrap_or(0) as usize;
    let len = (ds.params.n_repeats as usize + 2).max(max_total + 1);
    let mut hist = vec![0u64; len];
    for record in &ds.records {
        hist[record.total as usize] += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn quiet_params() -> BurstParams {
        BurstParams {
            p_click: 0.0,
            p_dark: 0.0,
            ..BurstParams::default()
        }
    }

    #[test]
    fn no_channels_no_clicks() {
        let params = quiet_params();
        for seed in 0..20 {
            let mut rng = trial_rng(seed, 0);
            let rec = simulate_trial(
                &QubitState::diagonal(),
                MeasurementBasis::Z,
                &params,
                &mut rng,
            )
            .unwrap();
            assert_eq!(rec.total, 0);
            assert!(rec.clicks.is_empty());
        }
    }

    #[test]
    fn r1_trials_are_binomial() {
        let params = BurstParams {
            eta_prep: 1.0,
            p_dark: 0.0,
            p_click: 0.3,
            mw_transfer_fidelity: 1.0,
            ..BurstParams::default()
        };
        let ds =
            simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, 100_000, &params, 11).unwrap();
        let expected_mean = 12.0 * 0.3;
        let std_err = (12.0 * 0.3 * 0.7 / 100_000.0f64).sqrt();
        assert!((ds.mean_photons() - expected_mean).abs() < 4.0 * std_err);
        // All trials route through the unblockaded branch.
        let counts = ds.branch_counts();
        assert_eq!(counts.unblocked, 100_000);
    }

    #[test]
    fn perfect_blockade_never_clicks() {
        let params = BurstParams {
            eta_prep: 1.0,
            p_dark: 0.0,
            s_surv: 1.0,
            mw_transfer_fidelity: 1.0,
            ..BurstParams::default()
        };
        let ds =
            simulate_dataset(&QubitState::r2(), MeasurementBasis::Z, 20_000, &params, 3).unwrap();
        assert!(ds.records.iter().all(|r| r.total == 0));
        assert_eq!(ds.branch_counts().blocked, 20_000);
    }

    #[test]
    fn expected_statistics_matches_simple_closed_forms() {
        let params = BurstParams {
            eta_prep: 1.0,
            p_dark: 0.0,
            p_click: reference::MEAN_PHOTONS_R1 / 12.0,
            ..BurstParams::default()
        };
        let stats = expected_statistics(&QubitState::r1(), MeasurementBasis::Z, &params).unwrap();
        assert_relative_eq!(stats.mean_photons, 2.63, epsilon = 1e-12);
        assert_relative_eq!(
            stats.prob_zero,
            (1.0 - params.p_click).powi(12),
            epsilon = 1e-12
        );
    }

    #[test]
    fn calibrated_defaults_hit_reference_means() {
        let params = BurstParams::default();
        let r1 = expected_statistics(&QubitState::r1(), MeasurementBasis::Z, &params).unwrap();
        let r2 = expected_statistics(&QubitState::r2(), MeasurementBasis::Z, &params).unwrap();
        assert_relative_eq!(r1.mean_photons, reference::MEAN_PHOTONS_R1, epsilon = 1e-9);
        assert_relative_eq!(r2.mean_photons, reference::MEAN_PHOTONS_R2, epsilon = 1e-9);
        // Blockaded-branch mean is the preparation-corrected suppression level.
        assert!((r2.blocked_branch_mean - 0.075026).abs() < 1e-5);
    }

    #[test]
    fn determinism_same_seed_same_dataset() {
        let params = BurstParams::default();
        let a =
            simulate_dataset(&QubitState::r2(), MeasurementBasis::Z, 4096, &params, 99).unwrap();
        let b =
            simulate_dataset(&QubitState::r2(), MeasurementBasis::Z, 4096, &params, 99).unwrap();
        assert_eq!(a, b);
        let c =
            simulate_dataset(&QubitState::r2(), MeasurementBasis::Z, 4096, &params, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_trial_uses_substream_zero() {
        let params = BurstParams::default();
        let ds = simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, 1, &params, 5).unwrap();
        let mut rng = trial_rng(5, 0);
        let direct =
            simulate_trial(&QubitState::r1(), MeasurementBasis::Z, &params, &mut rng).unwrap();
        assert_eq!(ds.records[0], direct);
    }

    #[test]
    fn record_invariants_hold() {
        let params = BurstParams::default();
        let ds = simulate_dataset(
            &QubitState::diagonal(),
            MeasurementBasis::X,
            20_000,
            &params,
            8,
        )
        .unwrap();
        let period = params.repeat_period_ns();
        for rec in &ds.records {
            assert_eq!(rec.total as usize, rec.clicks.len());
            // At most one signal + one dark click per repeat.
            let mut per_repeat = std::collections::HashMap::new();
            for click in &rec.clicks {
                assert!(click.timestamp_ns < params.burst_window_ns);
                assert_eq!((click.timestamp_ns / period) as u32, click.repeat_index);
                *per_repeat.entry(click.repeat_index).or_insert(0u32) += 1;
            }
            assert!(per_repeat.values().all(|&n| n <= 2));
        }
    }

    #[test]
    fn invalid_probabilities_rejected_with_full_list() {
        let params = BurstParams {
            p_click: 1.5,
            p_dark: -0.2,
            ..BurstParams::default()
        };
        let err = params.validate().unwrap_err();
        match err {
            Error::Validation(list) => {
                assert_eq!(list.len(), 2);
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn profile_total_matches_click_count() {
        let params = BurstParams::default();
        let ds =
            simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, 5000, &params, 21).unwrap();
        let profile = temporal_profile(&ds).unwrap();
        let clicks: u64 = ds.records.iter().map(|r| r.total as u64).sum();
        assert_eq!(profile.total(), clicks);
        assert_eq!(profile.counts.len(), 1920);
    }

    #[test]
    fn r1_profile_has_twelve_near_equal_peaks() {
        let params = BurstParams::default();
        let ds = simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, 100_000, &params, 6)
            .unwrap();
        let profile = temporal_profile(&ds).unwrap();
        let period = params.repeat_period_ns();
        let areas: Vec<f64> = (0..params.n_repeats as u64)
            .map(|i| profile.area(i * period, (i + 1) * period) as f64)
            .collect();
        let mean = areas.iter().sum::<f64>() / areas.len() as f64;
        let var = areas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / areas.len() as f64;
        let cv = var.sqrt() / mean;
        assert!(cv < 0.10, "peak-area coefficient of variation {cv}");
        assert!(mean > 0.0);
    }

    #[test]
    fn histogram_mass_and_zero_case() {
        let params = quiet_params();
        let ds = simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, 777, &params, 1).unwrap();
        let hist = photon_histogram(&ds).unwrap();
        assert_eq!(hist[0], 777);
        assert_eq!(hist.iter().sum::<u64>(), 777);
    }

    #[test]
    fn binomial_sanity_two_repeats() {
        let params = BurstParams {
            n_repeats: 2,
            burst_window_ns: 800,
            eta_prep: 1.0,
            p_dark: 0.0,
            p_click: 0.5,
            ..BurstParams::default()
        };
        let n = 100_000u64;
        let ds = simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, n, &params, 13).unwrap();
        let hist = photon_histogram(&ds).unwrap();
        let frac_one = hist[1] as f64 / n as f64;
        let std_err = (0.5 * 0.5 / n as f64).sqrt();
        assert!((frac_one - 0.5).abs() < 3.0 * std_err);
    }

    #[test]
    fn blocked_mean_monotone_in_survival_and_dark() {
        let base = BurstParams::default();
        let mut previous = f64::INFINITY;
        for i in 0..=10 {
            let params = BurstParams {
                s_surv: i as f64 / 10.0,
                ..base.clone()
            };
            let stats =
                expected_statistics(&QubitState::r2(), MeasurementBasis::Z, &params).unwrap();
            assert!(stats.mean_photons <= previous + 1e-12);
            previous = stats.mean_photons;
        }
        let mut previous = -1.0;
        for i in 0..=10 {
            let params = BurstParams {
                p_dark: i as f64 / 10.0,
                ..base.clone()
            };
            let stats =
                expected_statistics(&QubitState::r2(), MeasurementBasis::Z, &params).unwrap();
            assert!(stats.mean_photons >= previous - 1e-12);
            previous = stats.mean_photons;
        }
    }

    #[test]
    fn per_repeat_dark_mode_statistics() {
        let params = BurstParams {
            eta_prep: 1.0,
            p_click: 0.0,
            p_dark: 0.05,
            dark_count_mode: DarkCountMode::PerRepeat,
            ..BurstParams::default()
        };
        let stats = expected_statistics(&QubitState::r1(), MeasurementBasis::Z, &params).unwrap();
        assert_relative_eq!(stats.mean_photons, 12.0 * 0.05, epsilon = 1e-12);
        assert_relative_eq!(stats.prob_zero, 0.95f64.powi(12), epsilon = 1e-12);
        let ds =
            simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, 100_000, &params, 4).unwrap();
        let se = (stats.mean_photons / 100_000.0f64).sqrt();
        assert!((ds.mean_photons() - stats.mean_photons).abs() < 4.0 * se);
    }

    #[test]
    fn phase_jitter_damps_contrast() {
        // Jittered X-basis measurement of |D>: analytic mean must match the
        // Monte Carlo at 4 standard errors.
        let params = BurstParams {
            phase_jitter_rad: 0.6,
            ..BurstParams::default()
        };
        let stats =
            expected_statistics(&QubitState::diagonal(), MeasurementBasis::X, &params).unwrap();
        let no_jitter = expected_statistics(
            &QubitState::diagonal(),
            MeasurementBasis::X,
            &BurstParams::default(),
        )
        .unwrap();
        assert!(stats.mean_photons < no_jitter.mean_photons);
        let n = 100_000u64;
        let ds =
            simulate_dataset(&QubitState::diagonal(), MeasurementBasis::X, n, &params, 17).unwrap();
        let per_trial_var = 12.0 * params.p_click; // loose upper bound
        let se = (per_trial_var / n as f64).sqrt();
        assert!((ds.mean_photons() - stats.mean_photons).abs() < 4.0 * se);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn histogram_is_exchangeable(seed in 0u64..1000, swap_a in 0usize..500, swap_b in 0usize..500) {
            let params = BurstParams::default();
            let mut ds = simulate_dataset(
                &QubitState::r1(), MeasurementBasis::Z, 500, &params, seed,
            ).unwrap();
            let before = photon_histogram(&ds).unwrap();
            ds.records.swap(swap_a, swap_b);
            ds.records.reverse();
            let after = photon_histogram(&ds).unwrap();
            prop_assert_eq!(before, after);
        }
    }
}
