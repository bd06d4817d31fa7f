//! Calibrate the per-repeat click probability and the blockade survival
//! probability so the analytic burst model reproduces the measured mean
//! photon numbers, then cross-check with Monte Carlo.
//!
//! Run with: cargo run --example calibration

use superatom::burst::{expected_statistics, simulate_dataset, BurstParams};
use superatom::fit::{calibrate_burst, CalibrationTargets, FreeParam};
use superatom::qubit::{MeasurementBasis, QubitState};
use superatom::reference;

fn main() {
    // Start deliberately miscalibrated.
    let base = BurstParams {
        p_click: 0.15,
        s_surv: 0.9,
        ..BurstParams::default()
    };
    let targets = CalibrationTargets {
        mean_r1: Some(reference::MEAN_PHOTONS_R1),
        mean_r2: Some(reference::MEAN_PHOTONS_R2),
        ..Default::default()
    };

    let outcome = calibrate_burst(&targets, &[FreeParam::PClick, FreeParam::SSurv], &base).unwrap();
    println!(
        "calibration converged in {} iterations, residual norm {:.3e}",
        outcome.fit.iterations, outcome.fit.residual_norm
    );
    for value in &outcome.fit.params {
        println!("  {} = {:.10}", value.name, value.value);
    }
    println!("\ntarget table:");
    for (name, target, achieved) in &outcome.residual_table {
        println!("  {name}: target {target:.6}, achieved {achieved:.6}");
    }

    // The analytic blockaded-branch mean is the preparation-corrected
    // suppression level.
    let stats =
        expected_statistics(&QubitState::r2(), MeasurementBasis::Z, &outcome.params).unwrap();
    println!(
        "\nblockaded-branch mean photons (dark counts included): {:.4}",
        stats.blocked_branch_mean
    );

    // Monte Carlo cross-check at 10^5 trials.
    let ds = simulate_dataset(
        &QubitState::r1(),
        MeasurementBasis::Z,
        100_000,
        &outcome.params,
        7,
    )
    .unwrap();
    println!(
        "Monte Carlo mean photons (r1) at the calibrated point: {:.4}",
        ds.mean_photons()
    );
}
