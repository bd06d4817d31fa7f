//! Monte Carlo vs analytic-model equivalence: branch-forcing parameter
//! corners and random parameter draws must agree within sampling error, and
//! the analytic model must agree with exhaustive enumeration exactly.

mod common;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use superatom::burst::{expected_statistics, simulate_dataset, BurstParams};
use superatom::qubit::{MeasurementBasis, QubitState};

const MC_TRIALS: u64 = 100_000;

fn mc_vs_expected(state: &QubitState, basis: MeasurementBasis, params: &BurstParams, seed: u64) {
    let expected = expected_statistics(state, basis, params).unwrap();
    let ds = simulate_dataset(state, basis, MC_TRIALS, params, seed).unwrap();

    let n = MC_TRIALS as f64;
    let sample_mean = ds.mean_photons();
    let sample_var = ds
        .records
        .iter()
        .map(|r| {
            let d = r.total as f64 - sample_mean;
            d * d
        })
        .sum::<f64>()
        / (n - 1.0);
    let mean_se = (sample_var / n).sqrt();
    let mean_tol = (4.0 * mean_se).max(1e-12);
    assert!(
        (sample_mean - expected.mean_photons).abs() < mean_tol,
        "mean: MC {sample_mean} vs exact {} (tol {mean_tol}) for {params:?}",
        expected.mean_photons,
    );

    let p0_se = (expected.prob_zero * (1.0 - expected.prob_zero) / n).sqrt();
    let p0_tol = (4.0 * p0_se).max(1e-12);
    assert!(
        (ds.fraction_zero() - expected.prob_zero).abs() < p0_tol,
        "P0: MC {} vs exact {} (tol {p0_tol}) for {params:?}",
        ds.fraction_zero(),
        expected.prob_zero,
    );
}

#[test]
fn corners_match_expected_statistics() {
    let mut seed = 1000;
    for eta in [0.0, 1.0] {
        for s in [0.0, 1.0] {
            for dark in [0.0, 1.0] {
                for click in [0.0, 1.0] {
                    let params = BurstParams {
                        eta_prep: eta,
                        s_surv: s,
                        p_dark: dark,
                        p_click: click,
                        ..BurstParams::default()
                    };
                    seed += 1;
                    mc_vs_expected(&QubitState::diagonal(), MeasurementBasis::Z, &params, seed);
                }
            }
        }
    }
}

#[test]
fn random_draws_match_expected_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let states = [QubitState::r1(), QubitState::r2(), QubitState::diagonal()];
    let bases = [
        MeasurementBasis::Z,
        MeasurementBasis::X,
        MeasurementBasis::Y,
    ];
    for draw in 0..20 {
        let params = BurstParams {
            p_click: rng.random(),
            s_surv: rng.random(),
            p_dark: rng.random(),
            eta_prep: rng.random(),
            mw_transfer_fidelity: rng.random(),
            ..BurstParams::default()
        };
        let state = states[draw % states.len()];
        let basis = bases[draw % bases.len()];
        mc_vs_expected(&state, basis, &params, 5000 + draw as u64);
    }
}

#[test]
fn enumeration_matches_expected_statistics_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let states = [QubitState::r1(), QubitState::r2(), QubitState::diagonal()];
    let bases = [
        MeasurementBasis::Z,
        MeasurementBasis::X,
        MeasurementBasis::Y,
    ];
    for draw in 0..24 {
        let n_repeats = 1 + (draw % 3) as u32;
        let params = BurstParams {
            n_repeats,
            burst_window_ns: 400 * n_repeats as u64,
            p_click: rng.random(),
            s_surv: rng.random(),
            p_dark: rng.random(),
            eta_prep: rng.random(),
            mw_transfer_fidelity: rng.random(),
            ..BurstParams::default()
        };
        let state = states[draw % states.len()];
        let basis = bases[draw % bases.len()];
        let (mean_bf, p0_bf) = common::enumerate_statistics(&state, basis, &params);
        let expected = expected_statistics(&state, basis, &params).unwrap();
        assert!(
            (mean_bf - expected.mean_photons).abs() < 1e-12,
            "mean mismatch at draw {draw}: {mean_bf} vs {}",
            expected.mean_photons
        );
        assert!(
            (p0_bf - expected.prob_zero).abs() < 1e-12,
            "P0 mismatch at draw {draw}: {p0_bf} vs {}",
            expected.prob_zero
        );
    }
}

#[test]
fn enumeration_covers_per_repeat_dark_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(321);
    for draw in 0..8 {
        let n_repeats = 1 + (draw % 3) as u32;
        let params = BurstParams {
            n_repeats,
            burst_window_ns: 400 * n_repeats as u64,
            p_click: rng.random(),
            s_surv: rng.random(),
            p_dark: rng.random::<f64>() * 0.2,
            eta_prep: rng.random(),
            dark_count_mode: superatom::burst::DarkCountMode::PerRepeat,
            ..BurstParams::default()
        };
        let (mean_bf, p0_bf) =
            common::enumerate_statistics(&QubitState::diagonal(), MeasurementBasis::Z, &params);
        let expected =
            expected_statistics(&QubitState::diagonal(), MeasurementBasis::Z, &params).unwrap();
        assert!((mean_bf - expected.mean_photons).abs() < 1e-12);
        assert!((p0_bf - expected.prob_zero).abs() < 1e-12);
    }
}
