//! Everything computed from counted photons: threshold discrimination, raw
//! and preparation-corrected single-shot fidelity, the first-peak
//! preparation-efficiency estimator, Poisson fits, and Stokes-parameter
//! tomography with physicality projection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::burst::{BurstRecord, Dataset, TemporalProfile};
use crate::error::{Error, Result};
use crate::qubit::QubitState;

/// Threshold used throughout the reference analysis: one photon or more.
pub const DEFAULT_THRESHOLD: u32 = 1;

/// Single-shot readout outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// At least `threshold` photons: the retrieved level.
    R1,
    /// Below threshold: the blockading level.
    R2,
}

/// Classify one trial by thresholding its total photon number.
pub fn classify(record: &BurstRecord, threshold: u32) -> Outcome {
    if record.total >= threshold {
        Outcome::R1
    } else {
        Outcome::R2
    }
}

/// Conditional detection probabilities and their unweighted mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationResult {
    pub p_detect_r2_given_r2: f64,
    pub p_detect_r1_given_r1: f64,
    pub raw_fidelity: f64,
}

impl DiscriminationResult {
    pub fn new(p_detect_r2_given_r2: f64, p_detect_r1_given_r1: f64) -> Self {
        Self {
            p_detect_r2_given_r2,
            p_detect_r1_given_r1,
            raw_fidelity: 0.5 * (p_detect_r2_given_r2 + p_detect_r1_given_r1),
        }
    }
}

/// Conditional classification frequencies of an |r1>-prepared and an
/// |r2>-prepared dataset under a photon-number threshold.
pub fn discrimination(
    ds_r1: &Dataset,
    ds_r2: &Dataset,
    threshold: u32,
) -> Result<DiscriminationResult> {
    if threshold == 0 {
        return Err(Error::InvalidParameter {
            name: "threshold",
            value: 0.0,
            reason: "classification threshold must be >= 1",
        });
    }
    if ds_r1.records.is_empty() || ds_r2.records.is_empty() {
        return Err(Error::Empty("discrimination needs nonempty datasets"));
    }
    let hit_r1 = ds_r1
        .records
        .iter()
        .filter(|r| classify(r, threshold) == Outcome::R1)
        .count() as f64
        / ds_r1.records.len() as f64;
    let hit_r2 = ds_r2
        .records
        .iter()
        .filter(|r| classify(r, threshold) == Outcome::R2)
        .count() as f64
        / ds_r2.records.len() as f64;
    Ok(DiscriminationResult::new(hit_r2, hit_r1))
}

/// Remove the preparation-failure admixture from the r2 conditional:
/// `P_corr(0|r2) = (P_obs(0|r2) - (1 - eta_prep) * p0_given_r1) / eta_prep`.
///
/// The r1 conditional is unchanged and the mean recomputed. Results falling
/// outside [0, 1] indicate model mismatch; they are clamped with a warning.
pub fn corrected_conditionals(
    result: &DiscriminationResult,
    p0_given_r1: f64,
    eta_prep: f64,
) -> Result<DiscriminationResult> {
    if !(eta_prep > 0.0 && eta_prep <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta_prep",
            value: eta_prep,
            reason: "preparation efficiency must lie in (0, 1]",
        });
    }
    let raw = (result.p_detect_r2_given_r2 - (1.0 - eta_prep) * p0_given_r1) / eta_prep;
    let corrected = raw.clamp(0.0, 1.0);
    if corrected != raw {
        log::warn!("corrected r2 conditional {raw:.6} clamped to [0, 1]; model mismatch likely");
    }
    Ok(DiscriminationResult::new(
        corrected,
        result.p_detect_r1_given_r1,
    ))
}

/// Same decomposition for mean photon numbers: subtract the unprepared
/// (r1-like) contribution and rescale to the successfully-prepared fraction.
pub fn prep_corrected_mean(observed: f64, unprepared_reference: f64, eta_prep: f64) -> Result<f64> {
    if !(eta_prep > 0.0 && eta_prep <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta_prep",
            value: eta_prep,
            reason: "preparation efficiency must lie in (0, 1]",
        });
    }
    let raw = (observed - (1.0 - eta_prep) * unprepared_reference) / eta_prep;
    if raw < 0.0 {
        log::warn!("corrected mean {raw:.6} clamped to 0; model mismatch likely");
        return Ok(0.0);
    }
    Ok(raw)
}

/// Estimate the superatom preparation efficiency from the first-peak areas of
/// the r1 and r2 temporal profiles:
/// `eta = 1 - area_r2(window) / area_r1(window)`, clamped to [0, 1].
pub fn prep_efficiency_from_peaks(
    profile_r1: &TemporalProfile,
    profile_r2: &TemporalProfile,
    peak_window: (u64, u64),
) -> Result<f64> {
    if (profile_r1.bin_size_ns - profile_r2.bin_size_ns).abs() > 1e-12
        || profile_r1.window_ns != profile_r2.window_ns
    {
        return Err(Error::Malformed {
            line: 0,
            message: "temporal profiles do not share binning".into(),
        });
    }
    let area_r1 = profile_r1.area(peak_window.0, peak_window.1) as f64;
    let area_r2 = profile_r2.area(peak_window.0, peak_window.1) as f64;
    if area_r1 == 0.0 {
        return Err(Error::InvalidParameter {
            name: "first-peak area (r1)",
            value: 0.0,
            reason: "reference peak is empty; cannot form the ratio",
        });
    }
    Ok((1.0 - area_r2 / area_r1).clamp(0.0, 1.0))
}

/// Poisson probability mass `e^{-mean} mean^n / n!`.
pub fn poisson_pmf(n: u32, mean: f64) -> Result<f64> {
    if !(mean >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "mean",
            value: mean,
            reason: "Poisson mean must be nonnegative",
        });
    }
    if mean == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let mut value = (-mean).exp();
    for i in 1..=n {
        value *= mean / i as f64;
    }
    Ok(value)
}

/// Maximum-likelihood Poisson mean of a photon-number histogram: the sample
/// mean.
pub fn fit_poisson(hist: &[u64]) -> Result<f64> {
    let total: u64 = hist.iter().sum();
    if hist.is_empty() || total == 0 {
        return Err(Error::Empty("histogram has no counts"));
    }
    let weighted: f64 = hist
        .iter()
        .enumerate()
        .map(|(n, &c)| n as f64 * c as f64)
        .sum();
    Ok(weighted / total as f64)
}

/// Pauli expectation values (|r1> is +Z, |D> is +X, |R> is +Y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn norm(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }
}

/// Stokes parameters from the three plus-state probabilities.
pub fn stokes_from_probs(p_r1: f64, p_d: f64, p_r: f64) -> StokesVector {
    StokesVector {
        s1: 2.0 * p_d - 1.0,
        s2: 2.0 * p_r - 1.0,
        s3: 2.0 * p_r1 - 1.0,
    }
}

/// Exact Stokes vector of a pure state (Born probabilities, no sampling).
pub fn stokes_of_state(state: &QubitState) -> StokesVector {
    use crate::qubit::born_probability;
    stokes_from_probs(
        born_probability(state, &QubitState::r1()),
        born_probability(state, &QubitState::diagonal()),
        born_probability(state, &QubitState::circular_right()),
    )
}

/// 2x2 Hermitian, unit-trace state estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix2 {
    elements: [[Complex64; 2]; 2],
}

impl DensityMatrix2 {
    /// Build from a raw matrix; rejects non-Hermitian or non-unit-trace
    /// input (tolerance 1e-10).
    pub fn from_matrix(elements: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm_dev = (elements[0][1] - elements[1][0].conj())
            .norm()
            .max(elements[0][0].im.abs())
            .max(elements[1][1].im.abs());
        if herm_dev > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "density matrix",
                value: herm_dev,
                reason: "matrix is not Hermitian within 1e-10",
            });
        }
        let trace = elements[0][0].re + elements[1][1].re;
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "density matrix trace",
                value: trace,
                reason: "trace must be 1 within 1e-10",
            });
        }
        Ok(Self { elements })
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row][col]
    }

    /// Bloch vector `s_i = tr(rho sigma_i)`.
    pub fn stokes(&self) -> StokesVector {
        StokesVector {
            s1: 2.0 * self.elements[0][1].re,
            s2: -2.0 * self.elements[0][1].im,
            s3: self.elements[0][0].re - self.elements[1][1].re,
        }
    }

    /// Eigenvalues `(1 +- |s|)/2`, descending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.stokes().norm();
        (0.5 * (1.0 + r), 0.5 * (1.0 - r))
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.eigenvalues().1 >= -tol
    }

    /// Row-major (re, im) pairs, for reports.
    pub fn row_major_pairs(&self) -> [[f64; 2]; 4] {
        [
            [self.elements[0][0].re, self.elements[0][0].im],
            [self.elements[0][1].re, self.elements[0][1].im],
            [self.elements[1][0].re, self.elements[1][0].im],
            [self.elements[1][1].re, self.elements[1][1].im],
        ]
    }
}

/// `rho = (I + s1 X + s2 Y + s3 Z) / 2`.
pub fn density_from_stokes(s: &StokesVector) -> DensityMatrix2 {
    let half = 0.5;
    DensityMatrix2 {
        elements: [
            [
                Complex64::new(half * (1.0 + s.s3), 0.0),
                Complex64::new(half * s.s1, -half * s.s2),
            ],
            [
                Complex64::new(half * s.s1, half * s.s2),
                Complex64::new(half * (1.0 - s.s3), 0.0),
            ],
        ],
    }
}

/// Clip negative eigenvalues and renormalize the trace; for a qubit this is
/// exactly the radial shrink of the Bloch vector onto the unit sphere.
/// Physical states pass through unchanged.
pub fn project_physical(rho: &DensityMatrix2) -> DensityMatrix2 {
    let s = rho.stokes();
    let norm = s.norm();
    if norm <= 1.0 {
        return *rho;
    }
    density_from_stokes(&StokesVector {
        s1: s.s1 / norm,
        s2: s.s2 / norm,
        s3: s.s3 / norm,
    })
}

/// Overlap `<psi| rho |psi>` of a state estimate with a pure target.
pub fn state_fidelity(rho: &DensityMatrix2, psi: &QubitState) -> f64 {
    let amps = [psi.amp_r1(), psi.amp_r2()];
    let mut f = Complex64::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            f += amps[i].conj() * rho.entry(i, j) * amps[j];
        }
    }
    f.re.clamp(0.0, 1.0)
}
