//! The headline measurement: photon bursts for both qubit levels, the photon
//! number distribution, threshold discrimination and the preparation-corrected
//! single-shot fidelity.
//!
//! Run with: cargo run --example single_shot_readout

use superatom::analysis::{
    corrected_conditionals, discrimination, fit_poisson, poisson_pmf, prep_corrected_mean,
};
use superatom::burst::{expected_statistics, photon_histogram, simulate_dataset, BurstParams};
use superatom::qubit::{MeasurementBasis, QubitState};
use superatom::reference;

fn main() {
    let params = BurstParams::default(); // calibrated reference parameters
    let n_trials = 100_000;

    println!(
        "simulating {n_trials} trials per state: {} repeats in {} ns, p_click {:.4}, s_surv {:.4}",
        params.n_repeats, params.burst_window_ns, params.p_click, params.s_surv
    );

    let ds_r1 =
        simulate_dataset(&QubitState::r1(), MeasurementBasis::Z, n_trials, &params, 1).unwrap();
    let ds_r2 =
        simulate_dataset(&QubitState::r2(), MeasurementBasis::Z, n_trials, &params, 2).unwrap();

    let exact_r1 = expected_statistics(&QubitState::r1(), MeasurementBasis::Z, &params).unwrap();
    let exact_r2 = expected_statistics(&QubitState::r2(), MeasurementBasis::Z, &params).unwrap();
    println!(
        "\nmean photons r1: {:.4} (analytic {:.4}); r2: {:.4} (analytic {:.4})",
        ds_r1.mean_photons(),
        exact_r1.mean_photons,
        ds_r2.mean_photons(),
        exact_r2.mean_photons
    );

    // Photon-number statistics with a Poisson fit, as in the measured
    // distribution.
    let hist = photon_histogram(&ds_r1).unwrap();
    let lambda = fit_poisson(&hist).unwrap();
    println!("\n N   observed   Poisson(lambda={lambda:.3})");
    for (n, &count) in hist.iter().enumerate().take(9) {
        let observed = count as f64 / n_trials as f64;
        let poisson = poisson_pmf(n as u32, lambda).unwrap();
        println!("{n:2}   {observed:8.4}   {poisson:8.4}");
    }

    // Threshold at one photon: N >= 1 reads r1, N = 0 reads r2.
    let disc = discrimination(&ds_r1, &ds_r2, 1).unwrap();
    println!(
        "\nP(detect r1 | r1) = {:.4}, P(detect r2 | r2) = {:.4}",
        disc.p_detect_r1_given_r1, disc.p_detect_r2_given_r2
    );
    println!("raw single-shot fidelity: {:.4}", disc.raw_fidelity);

    // Remove the preparation-failure admixture from the r2 numbers.
    let corrected =
        corrected_conditionals(&disc, ds_r1.fraction_zero(), reference::ETA_PREP).unwrap();
    let corrected_mean = prep_corrected_mean(
        ds_r2.mean_photons(),
        ds_r1.mean_photons(),
        reference::ETA_PREP,
    )
    .unwrap();
    println!(
        "after preparation correction: P(detect r2 | r2) = {:.4}, fidelity = {:.4}",
        corrected.p_detect_r2_given_r2, corrected.raw_fidelity
    );
    println!("blockaded-branch mean photons: {corrected_mean:.4}");

    let counts = ds_r2.branch_counts();
    println!(
        "\nr2 trial branches: {} blocked, {} prep failures, {} dark-only, {} unblocked",
        counts.blocked, counts.prep_fail, counts.dark_only, counts.unblocked
    );
}
