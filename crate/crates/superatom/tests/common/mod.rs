//! Shared test helpers: an exhaustive enumeration oracle for the burst model
//! and a small pass/fail reporter for the acceptance suite.

// Each test target uses a subset of these helpers.
#![allow(dead_code)]

use superatom::burst::{BurstParams, DarkCountMode};
use superatom::qubit::{
    basis_plus_state, basis_rotation, born_probability, BasisConvention, MeasurementBasis,
    QubitState,
};

/// Exhaustive probability-tree evaluation of (mean photons, P(N = 0)) for the
/// burst generative model. Enumerates every branch, blockade-loss time,
/// click mask and dark outcome explicitly; independent of the closed-form
/// summation in the library.
pub fn enumerate_statistics(
    state: &QubitState,
    basis: MeasurementBasis,
    params: &BurstParams,
) -> (f64, f64) {
    assert!(
        params.n_repeats <= 12,
        "enumeration is exponential in repeats"
    );
    assert_eq!(
        params.phase_jitter_rad, 0.0,
        "enumeration covers the jitter-free model"
    );
    let n = params.n_repeats as usize;
    let p = params.p_click;
    let q = 1.0 - p;
    let s = params.s_surv;
    let conv = BasisConvention::default();

    // Route probability of the open (clicking) branch; the plus state is an
    // independent path to the Born probability used inside the simulator.
    let p_plus = born_probability(state, &basis_plus_state(basis, &conv));
    let rot = basis_rotation(basis);
    let flip = (1.0 - params.mw_transfer_fidelity) * rot.theta / std::f64::consts::PI;
    let p_open_given_prep = p_plus * (1.0 - flip) + (1.0 - p_plus) * flip;

    // (branch weight, number of repeats free to click)
    let mut branches: Vec<(f64, usize)> = Vec::new();
    branches.push((1.0 - params.eta_prep, n)); // preparation failure
    branches.push((params.eta_prep * p_open_given_prep, n)); // unblockaded
    let w_blocked = params.eta_prep * (1.0 - p_open_given_prep);
    for m in 0..=n {
        // m repeats stay blockaded, then the rest click freely.
        let w_m = if m < n {
            s.powi(m as i32) * (1.0 - s)
        } else {
            s.powi(n as i32)
        };
        branches.push((w_blocked * w_m, n - m));
    }

    // Signal outcomes: every click mask of every branch.
    let mut signal: Vec<(f64, u32)> = Vec::new();
    for (weight, open) in branches {
        if weight == 0.0 {
            continue;
        }
        for mask in 0u32..(1u32 << open) {
            let k = mask.count_ones();
            let prob = weight * p.powi(k as i32) * q.powi(open as i32 - k as i32);
            if prob > 0.0 {
                signal.push((prob, k));
            }
        }
    }

    // Fold in dark counts.
    let d = params.p_dark;
    let mut outcomes: Vec<(f64, u32)> = Vec::new();
    match params.dark_count_mode {
        DarkCountMode::PerTrial => {
            for &(prob, k) in &signal {
                outcomes.push((prob * (1.0 - d), k));
                outcomes.push((prob * d, k + 1));
            }
        }
        DarkCountMode::PerRepeat => {
            for &(prob, k) in &signal {
                for mask in 0u32..(1u32 << n) {
                    let j = mask.count_ones();
                    let w = d.powi(j as i32) * (1.0 - d).powi(n as i32 - j as i32);
                    outcomes.push((prob * w, k + j));
                }
            }
        }
    }

    let total_prob: f64 = outcomes.iter().map(|(w, _)| w).sum();
    assert!(
        (total_prob - 1.0).abs() < 1e-12,
        "enumeration probabilities sum to {total_prob}"
    );
    let mean = outcomes.iter().map(|(w, k)| w * *k as f64).sum();
    let p0 = outcomes
        .iter()
        .filter(|(_, k)| *k == 0)
        .map(|(w, _)| w)
        .sum();
    (mean, p0)
}

/// Collects named clause results for one acceptance criterion and prints one
/// summary line; panics at the end if any clause failed so every clause is
/// evaluated and reported first.
pub struct Checks {
    criterion: String,
    lines: Vec<String>,
    failures: Vec<String>,
}

impl Checks {
    pub fn new(criterion: &str) -> Self {
        Self {
            criterion: criterion.to_string(),
            lines: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn within(&mut self, label: &str, value: f64, expected: f64, tolerance: f64) {
        let pass = (value - expected).abs() <= tolerance;
        self.record(
            pass,
            format!("{label}: {value:.6} vs {expected:.6} +- {tolerance:.6}"),
        );
    }

    pub fn in_band(&mut self, label: &str, value: f64, lo: f64, hi: f64) {
        let pass = value >= lo && value <= hi;
        self.record(pass, format!("{label}: {value:.6} in [{lo:.6}, {hi:.6}]"));
    }

    pub fn is_true(&mut self, label: &str, pass: bool) {
        self.record(pass, label.to_string());
    }

    pub fn faster_than(&mut self, elapsed: std::time::Duration, limit_s: f64) {
        let pass = elapsed.as_secs_f64() < limit_s;
        self.record(
            pass,
            format!("runtime {:.2}s < {limit_s}s", elapsed.as_secs_f64()),
        );
    }

    fn record(&mut self, pass: bool, detail: String) {
        let tag = if pass { "pass" } else { "FAIL" };
        self.lines.push(format!("    [{tag}] {detail}"));
        if !pass {
            self.failures.push(detail);
        }
    }

    pub fn finish(self) {
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("{}: {verdict}", self.criterion);
        for line in &self.lines {
            println!("{line}");
        }
        assert!(
            self.failures.is_empty(),
            "{} failed clauses: {:?}",
            self.criterion,
            self.failures
        );
    }
}
