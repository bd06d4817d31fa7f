//! Nonlinear least squares: a damped Gauss-Newton engine with numerically
//! differenced Jacobians, the saturation-model fits for efficiency-vs-OD
//! curves, and calibration of burst parameters against headline observables.
//!
//! Probabilities are optimized through logit transforms and positive rates
//! through softplus, so every iterate maps to a valid parameter set; results
//! are reported in natural units.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::burst::{expected_statistics, BurstParams};
use crate::error::{Error, Result};
use crate::model::{cavity_enhancement, EfficiencyModel};
use crate::qubit::{MeasurementBasis, QubitState};

/// One measured efficiency point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    /// Optical depth (dimensionless, nonnegative).
    pub x: f64,
    /// Efficiency in [0, 1].
    pub y: f64,
    /// Optional standard error; weights the residual when present.
    pub sigma: Option<f64>,
}

impl DataPoint {
    pub fn new(x: f64, y: f64, sigma: Option<f64>) -> Result<Self> {
        if !(x >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "x",
                value: x,
                reason: "optical depth must be nonnegative",
            });
        }
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::InvalidParameter {
                name: "y",
                value: y,
                reason: "efficiency must lie in [0, 1]",
            });
        }
        if let Some(s) = sigma {
            if !(s > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "sigma",
                    value: s,
                    reason: "standard error must be positive",
                });
            }
        }
        Ok(Self { x, y, sigma })
    }
}

/// Stopping rules and damping schedule of the Gauss-Newton engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Terminate when the infinity norm of `J^T r` drops below this.
    pub grad_tol: f64,
    /// Terminate when the accepted step norm drops below this.
    pub step_tol: f64,
    pub max_iterations: u32,
    /// Damping applied when a pure Gauss-Newton step is first rejected;
    /// grows/shrinks by factors of 10 afterwards.
    pub initial_damping: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            step_tol: 1e-12,
            max_iterations: 500,
            initial_damping: 1e-3,
        }
    }
}

/// A fitted parameter in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// One accepted iterate, for verbose traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub iteration: u32,
    /// Optimizer-space parameter vector at this iterate.
    pub params: Vec<f64>,
    pub residual_norm: f64,
    pub damping: f64,
}

/// Outcome of a least-squares run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Vec<NamedValue>,
    pub residual_norm: f64,
    pub iterations: u32,
    pub converged: bool,
    pub jacobian_condition: f64,
    pub trace: Vec<IterateRecord>,
}

fn finite_or_err(values: &[f64], params: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteModel {
            params: params.to_vec(),
        });
    }
    Ok(())
}

fn central_difference_jacobian<F>(
    residual_fn: &F,
    params: &DVector<f64>,
    n_residuals: usize,
) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = params.len();
    let mut jacobian = DMatrix::zeros(n_residuals, n);
    let mut probe = params.clone();
    for j in 0..n {
        let h = (1e-6f64).max(1e-6 * params[j].abs());
        probe[j] = params[j] + h;
        let plus = residual_fn(probe.as_slice())?;
        finite_or_err(&plus, probe.as_slice())?;
        probe[j] = params[j] - h;
        let minus = residual_fn(probe.as_slice())?;
        finite_or_err(&minus, probe.as_slice())?;
        probe[j] = params[j];
        for i in 0..n_residuals {
            jacobian[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jacobian)
}

fn condition_number(jacobian: &DMatrix<f64>) -> f64 {
    let sv = jacobian.clone().singular_values();
    let (mut smax, mut smin) = (0.0f64, f64::INFINITY);
    for s in sv.iter() {
        smax = smax.max(*s);
        smin = smin.min(*s);
    }
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Damped Gauss-Newton minimization of `sum residual_i^2` over an
/// unconstrained parameter vector. Deterministic given its inputs; the
/// returned residual norm never exceeds that of the initial guess.
pub fn minimize_residuals<F>(
    residual_fn: F,
    init: &[f64],
    param_names: &[&str],
    options: &FitOptions,
) -> Result<FitResult>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = init.len();
    assert_eq!(n, param_names.len(), "one name per parameter");
    let initial = residual_fn(init)?;
    finite_or_err(&initial, init)?;
    let m = initial.len();
    if m < n {
        return Err(Error::Underdetermined {
            residuals: m,
            params: n,
        });
    }

    let named = |values: &DVector<f64>| {
        param_names
            .iter()
            .zip(values.iter())
            .map(|(name, &value)| NamedValue {
                name: (*name).to_string(),
                value,
            })
            .collect::<Vec<_>>()
    };

    let mut params = DVector::from_column_slice(init);
    let mut residuals = DVector::from_vec(initial);
    let mut cost = residuals.norm();
    let mut damping = 0.0f64;
    let mut iterations = 0u32;
    let mut converged = false;
    let mut trace = vec![IterateRecord {
        iteration: 0,
        params: init.to_vec(),
        residual_norm: cost,
        damping,
    }];

    if n == 0 {
        return Ok(FitResult {
            params: Vec::new(),
            residual_norm: cost,
            iterations: 0,
            converged: true,
            jacobian_condition: 0.0,
            trace,
        });
    }

    let mut jacobian = central_difference_jacobian(&residual_fn, &params, m)?;
    loop {
        let gradient = jacobian.transpose() * &residuals;
        if gradient.amax() < options.grad_tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }

        // Try a step, inflating the damping until one is accepted.
        let mut accepted_step_norm = None;
        loop {
            let mut normal = &jacobian.transpose() * &jacobian;
            for d in 0..n {
                normal[(d, d)] += damping;
            }
            let step = nalgebra::Cholesky::new(normal).map(|ch| ch.solve(&(-&gradient)));
            if let Some(step) = step {
                let candidate = &params + &step;
                let cand_res = residual_fn(candidate.as_slice())?;
                finite_or_err(&cand_res, candidate.as_slice())?;
                let cand_vec = DVector::from_vec(cand_res);
                let cand_cost = cand_vec.norm();
                if cand_cost < cost {
                    params = candidate;
                    residuals = cand_vec;
                    cost = cand_cost;
                    iterations += 1;
                    damping = if damping == 0.0 {
                        0.0
                    } else {
                        let next = damping / 10.0;
                        if next < 1e-15 {
                            0.0
                        } else {
                            next
                        }
                    };
                    trace.push(IterateRecord {
                        iteration: iterations,
                        params: params.as_slice().to_vec(),
                        residual_norm: cost,
                        damping,
                    });
                    accepted_step_norm = Some(step.norm());
                    break;
                }
            }
            damping = if damping == 0.0 {
                options.initial_damping
            } else {
                damping * 10.0
            };
            if damping > 1e12 {
                break;
            }
        }

        let Some(step_norm) = accepted_step_norm else {
            break; // damping exhausted without progress
        };
        jacobian = central_difference_jacobian(&residual_fn, &params, m)?;
        if step_norm < options.step_tol {
            let gradient = jacobian.transpose() * &residuals;
            converged = gradient.amax() < options.grad_tol;
            break;
        }
    }

    Ok(FitResult {
        params: named(&params),
        residual_norm: cost,
        iterations,
        converged,
        jacobian_condition: condition_number(&jacobian),
        trace,
    })
}

/// Weighted least squares of a parameterized scalar model over data points.
pub fn least_squares<F>(
    model: F,
    points: &[DataPoint],
    init: &[f64],
    param_names: &[&str],
    options: &FitOptions,
) -> Result<FitResult>
where
    F: Fn(&[f64], f64) -> f64,
{
    if points.is_empty() {
        return Err(Error::Empty("least squares needs data points"));
    }
    if points.len() < init.len() {
        return Err(Error::Underdetermined {
            residuals: points.len(),
            params: init.len(),
        });
    }
    let data = points.to_vec();
    minimize_residuals(
        move |params| {
            Ok(data
                .iter()
                .map(|pt| {
                    let weight = pt.sigma.map_or(1.0, |s| 1.0 / s);
                    (model(params, pt.x) - pt.y) * weight
                })
                .collect())
        },
        init,
        param_names,
        options,
    )
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn inv_softplus(y: f64) -> f64 {
    if y > 30.0 {
        y
    } else {
        y.exp_m1().ln()
    }
}

/// Which curve the saturation model is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OdMode {
    FreeSpace,
    Cavity { finesse: f64 },
}

/// Result of an efficiency-vs-OD fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdFit {
    pub model: EfficiencyModel,
    pub fit: FitResult,
}

/// Default initial guesses for the saturation fit.
pub const DEFAULT_INIT_K: f64 = 0.2;
pub const DEFAULT_INIT_P: f64 = 0.5;

/// Fit `p * C/(C+1)` with `C = k * OD * enhancement` to measured points.
///
/// `fixed_p` pins the ceiling (e.g. to a known collection chain) and fits
/// only the slope `k`; otherwise both `k` and `p` are free.
pub fn fit_od_curve(
    points: &[DataPoint],
    mode: OdMode,
    fixed_p: Option<f64>,
    options: &FitOptions,
) -> Result<OdFit> {
    for pt in points {
        DataPoint::new(pt.x, pt.y, pt.sigma)?;
    }
    if let Some(p) = fixed_p {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "fixed_p",
                value: p,
                reason: "ceiling must lie in [0, 1]",
            });
        }
    }
    let enhancement = match mode {
        OdMode::FreeSpace => 1.0,
        OdMode::Cavity { finesse } => cavity_enhancement(finesse)?,
    };

    let saturation = move |k: f64, p: f64, od: f64| {
        let c = k * od * enhancement;
        p * c / (c + 1.0)
    };

    let fit = match fixed_p {
        Some(p) => least_squares(
            move |params, od| saturation(softplus(params[0]), p, od),
            points,
            &[inv_softplus(DEFAULT_INIT_K)],
            &["k_transformed"],
            options,
        )?,
        None => least_squares(
            move |params, od| saturation(softplus(params[0]), logistic(params[1]), od),
            points,
            &[inv_softplus(DEFAULT_INIT_K), logit(DEFAULT_INIT_P)],
            &["k_transformed", "p_transformed"],
            options,
        )?,
    };

    let k = softplus(fit.params[0].value);
    let p = fixed_p.unwrap_or_else(|| logistic(fit.params[1].value));
    let model = EfficiencyModel::new(k, p, enhancement)?;
    let mut fit = fit;
    fit.params = vec![
        NamedValue {
            name: "k".into(),
            value: k,
        },
        NamedValue {
            name: "p".into(),
            value: p,
        },
    ];
    Ok(OdFit { model, fit })
}

/// Cavity curve predicted from a free-space fit by sharing `k` and `p` and
/// switching on the cavity enhancement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityPrediction {
    pub model: EfficiencyModel,
}

impl CavityPrediction {
    pub fn predict(&self, od: f64) -> Result<f64> {
        crate::model::saturating_efficiency(od, &self.model)
    }

    /// Relative deviation `1 - measured/predicted` per point.
    pub fn gap(&self, points: &[DataPoint]) -> Result<Vec<f64>> {
        points
            .iter()
            .map(|pt| {
                let predicted = self.predict(pt.x)?;
                if predicted <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "predicted efficiency",
                        value: predicted,
                        reason: "prediction vanishes; gap undefined at this OD",
                    });
                }
                Ok(1.0 - pt.y / predicted)
            })
            .collect()
    }

    pub fn mean_gap(&self, points: &[DataPoint]) -> Result<f64> {
        let gaps = self.gap(points)?;
        if gaps.is_empty() {
            return Err(Error::Empty("gap needs measured points"));
        }
        Ok(gaps.iter().sum::<f64>() / gaps.len() as f64)
    }
}

/// Shared-slope cavity prediction from a converged free-space fit.
pub fn predict_cavity_from_freespace(freespace: &OdFit, finesse: f64) -> Result<CavityPrediction> {
    if !freespace.fit.converged {
        return Err(Error::NonConvergence {
            iterations: freespace.fit.iterations,
            breakdown: vec![("freespace fit".into(), freespace.fit.residual_norm)],
        });
    }
    let model = EfficiencyModel::new(
        freespace.model.k,
        freespace.model.p,
        cavity_enhancement(finesse)?,
    )?;
    Ok(CavityPrediction { model })
}

/// Observables the burst calibration can target, all under the Z basis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    /// Mean photons with the qubit prepared in the retrieved level.
    pub mean_r1: Option<f64>,
    /// Mean photons with the qubit prepared in the blockading level.
    pub mean_r2: Option<f64>,
    /// P(N = 0) with the qubit in the blockading level.
    pub p0_r2: Option<f64>,
    /// P(N >= 1) with the qubit in the retrieved level.
    pub p_geq1_r1: Option<f64>,
}

impl CalibrationTargets {
    fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        if let Some(v) = self.mean_r1 {
            out.push(("mean_r1", v));
        }
        if let Some(v) = self.mean_r2 {
            out.push(("mean_r2", v));
        }
        if let Some(v) = self.p0_r2 {
            out.push(("p0_r2", v));
        }
        if let Some(v) = self.p_geq1_r1 {
            out.push(("p_geq1_r1", v));
        }
        out
    }

    pub fn count(&self) -> usize {
        self.entries().len()
    }
}

/// Burst parameters that may be varied during calibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParam {
    PClick,
    SSurv,
    PDark,
    EtaPrep,
}

impl FreeParam {
    pub fn name(&self) -> &'static str {
        match self {
            FreeParam::PClick => "p_click",
            FreeParam::SSurv => "s_surv",
            FreeParam::PDark => "p_dark",
            FreeParam::EtaPrep => "eta_prep",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "p_click" => Ok(FreeParam::PClick),
            "s_surv" => Ok(FreeParam::SSurv),
            "p_dark" => Ok(FreeParam::PDark),
            "eta_prep" => Ok(FreeParam::EtaPrep),
            _ => Err(Error::Malformed {
                line: 0,
                message: format!(
                    "unknown free parameter `{s}`; expected p_click, s_surv, p_dark or eta_prep"
                ),
            }),
        }
    }

    fn get(&self, params: &BurstParams) -> f64 {
        match self {
            FreeParam::PClick => params.p_click,
            FreeParam::SSurv => params.s_surv,
            FreeParam::PDark => params.p_dark,
            FreeParam::EtaPrep => params.eta_prep,
        }
    }

    fn set(&self, params: &mut BurstParams, value: f64) {
        match self {
            FreeParam::PClick => params.p_click = value,
            FreeParam::SSurv => params.s_surv = value,
            FreeParam::PDark => params.p_dark = value,
            FreeParam::EtaPrep => params.eta_prep = value,
        }
    }
}

/// Calibrated parameters plus fit diagnostics and the per-target residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub params: BurstParams,
    pub fit: FitResult,
    /// (target name, target value, achieved value).
    pub residual_table: Vec<(String, f64, f64)>,
}

fn statistics_for(params: &BurstParams, target: &str) -> Result<f64> {
    match target {
        "mean_r1" => {
            Ok(expected_statistics(&QubitState::r1(), MeasurementBasis::Z, params)?.mean_photons)
        }
        "mean_r2" => {
            Ok(expected_statistics(&QubitState::r2(), MeasurementBasis::Z, params)?.mean_photons)
        }
        "p0_r2" => {
            Ok(expected_statistics(&QubitState::r2(), MeasurementBasis::Z, params)?.prob_zero)
        }
        "p_geq1_r1" => {
            Ok(expected_statistics(&QubitState::r1(), MeasurementBasis::Z, params)?.prob_geq1)
        }
        _ => unreachable!("targets enumerated internally"),
    }
}

/// Fit the free subset of burst parameters so the analytic forward model
/// reproduces the targets; no Monte Carlo runs inside the loop.
pub fn calibrate_burst(
    targets: &CalibrationTargets,
    free: &[FreeParam],
    base: &BurstParams,
) -> Result<CalibrationOutcome> {
    base.validate()?;
    let entries = targets.entries();
    if entries.is_empty() {
        return Err(Error::Empty("calibration needs at least one target"));
    }
    if free.len() > entries.len() {
        return Err(Error::Underdetermined {
            residuals: entries.len(),
            params: free.len(),
        });
    }
    for (i, a) in free.iter().enumerate() {
        if free[..i].contains(a) {
            return Err(Error::InvalidParameter {
                name: "free",
                value: i as f64,
                reason: "duplicate free parameter",
            });
        }
    }

    let apply = |engine_params: &[f64]| {
        let mut p = base.clone();
        for (fp, &x) in free.iter().zip(engine_params) {
            fp.set(&mut p, logistic(x));
        }
        p
    };

    let entries_for_fn = entries.clone();
    let base_for_fn = base.clone();
    let free_for_fn = free.to_vec();
    let residual_fn = move |engine_params: &[f64]| -> Result<Vec<f64>> {
        let mut p = base_for_fn.clone();
        for (fp, &x) in free_for_fn.iter().zip(engine_params) {
            fp.set(&mut p, logistic(x));
        }
        entries_for_fn
            .iter()
            .map(|(name, value)| Ok(statistics_for(&p, name)? - value))
            .collect()
    };

    let init: Vec<f64> = free
        .iter()
        .map(|fp| logit(fp.get(base).clamp(1e-9, 1.0 - 1e-9)))
        .collect();
    let names: Vec<&str> = free.iter().map(|fp| fp.name()).collect();
    let fit = minimize_residuals(residual_fn, &init, &names, &FitOptions::default())?;

    if !fit.converged {
        let final_params = apply(
            &fit.trace
                .last()
                .map(|t| t.params.clone())
                .unwrap_or_default(),
        );
        let breakdown = entries
            .iter()
            .map(|(name, value)| {
                let achieved = statistics_for(&final_params, name).unwrap_or(f64::NAN);
                ((*name).to_string(), achieved - value)
            })
            .collect();
        return Err(Error::NonConvergence {
            iterations: fit.iterations,
            breakdown,
        });
    }

    let engine_params: Vec<f64> = fit
        .trace
        .last()
        .map(|t| t.params.clone())
        .unwrap_or_default();
    let calibrated = apply(&engine_params);
    let residual_table = entries
        .iter()
        .map(|(name, value)| {
            let achieved = statistics_for(&calibrated, name).unwrap_or(f64::NAN);
            ((*name).to_string(), *value, achieved)
        })
        .collect();

    let mut fit = fit;
    fit.params = free
        .iter()
        .zip(&engine_params)
        .map(|(fp, &x)| NamedValue {
            name: fp.name().to_string(),
            value: logistic(x),
        })
        .collect();

    Ok(CalibrationOutcome {
        params: calibrated,
        fit,
        residual_table,
    })
}
