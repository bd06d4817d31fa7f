//! Closed-form physics: collective Rabi dynamics, cavity-enhanced retrieval
//! efficiency, loss-chain composition and the blockade-regime check.
//!
//! Everything in this module is a pure function of its arguments; the Monte
//! Carlo engine and the fit layer are checked against these formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Damped collective Rabi oscillation between the ground state and the
/// singly-excited Rydberg level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    /// Angular Rabi frequency in rad/s.
    pub omega: f64,
    /// Envelope damping rate in 1/s.
    pub gamma: f64,
    /// Dimensionless oscillation contrast in [0, 1].
    pub amplitude: f64,
}

impl RabiParams {
    pub fn new(omega: f64, gamma: f64, amplitude: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega,
                reason: "angular frequency must be positive",
            });
        }
        if !(gamma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "damping rate must be nonnegative",
            });
        }
        if !(0.0..=1.0).contains(&amplitude) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                value: amplitude,
                reason: "contrast must lie in [0, 1]",
            });
        }
        Ok(Self {
            omega,
            gamma,
            amplitude,
        })
    }
}

/// Saturating retrieval-efficiency model `p * C / (C + 1)` with effective
/// cooperativity `C = k * OD * enhancement`.
///
/// `enhancement` is 1 in free space and `2F/pi` inside the ring cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyModel {
    /// Cooperativity gained per unit optical depth.
    pub k: f64,
    /// Saturation ceiling in [0, 1].
    pub p: f64,
    /// Cooperativity multiplier, >= 1.
    pub enhancement: f64,
}

impl EfficiencyModel {
    pub fn new(k: f64, p: f64, enhancement: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k,
                reason: "cooperativity slope must be positive",
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "ceiling must lie in [0, 1]",
            });
        }
        if !(enhancement >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "enhancement",
                value: enhancement,
                reason: "enhancement must be >= 1",
            });
        }
        Ok(Self { k, p, enhancement })
    }

    /// Free-space model (`enhancement = 1`).
    pub fn free_space(k: f64, p: f64) -> Result<Self> {
        Self::new(k, p, 1.0)
    }

    /// Cavity model with `enhancement = 2 * finesse / pi`.
    pub fn cavity(k: f64, p: f64, finesse: f64) -> Result<Self> {
        Self::new(k, p, cavity_enhancement(finesse)?)
    }
}

/// One named efficiency stage in a loss chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossStage {
    pub name: String,
    pub efficiency: f64,
}

/// Ordered product of stage efficiencies (cavity output, fiber coupling,
/// Pockels cell, detector, ...). Stages commute; the order is kept only for
/// reporting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LossChain {
    stages: Vec<LossStage>,
}

impl LossChain {
    pub fn new(stages: impl IntoIterator<Item = (impl Into<String>, f64)>) -> Result<Self> {
        let stages: Vec<LossStage> = stages
            .into_iter()
            .map(|(name, efficiency)| LossStage {
                name: name.into(),
                efficiency,
            })
            .collect();
        for stage in &stages {
            if !(0.0..=1.0).contains(&stage.efficiency) {
                return Err(Error::InvalidParameter {
                    name: "stage efficiency",
                    value: stage.efficiency,
                    reason: "each stage must lie in [0, 1]",
                });
            }
        }
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[LossStage] {
        &self.stages
    }

    /// Concatenate two chains.
    pub fn concat(&self, other: &LossChain) -> LossChain {
        let mut stages = self.stages.clone();
        stages.extend(other.stages.iter().cloned());
        LossChain { stages }
    }
}

/// Blockade and excitation geometry, in micrometers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub blockade_radius_um: f64,
    pub excitation_radius_um: f64,
}

impl GeometryParams {
    pub fn new(blockade_radius_um: f64, excitation_radius_um: f64) -> Result<Self> {
        if !(blockade_radius_um > 0.0) {
            return Err(Error::InvalidParameter {
                name: "blockade_radius_um",
                value: blockade_radius_um,
                reason: "radius must be positive",
            });
        }
        if !(excitation_radius_um > 0.0) {
            return Err(Error::InvalidParameter {
                name: "excitation_radius_um",
                value: excitation_radius_um,
                reason: "radius must be positive",
            });
        }
        Ok(Self {
            blockade_radius_um,
            excitation_radius_um,
        })
    }
}

/// Excited-state population `amplitude * sin^2(omega t / 2) * exp(-gamma t)`
/// at time `t` (seconds, nonnegative).
pub fn rabi_population(t: f64, params: &RabiParams) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "time must be nonnegative",
        });
    }
    let osc = (params.omega * t / 2.0).sin().powi(2);
    Ok(params.amplitude * osc * (-params.gamma * t).exp())
}

/// Duration of a pi pulse, `pi / omega`.
pub fn pi_pulse_duration(omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            reason: "angular frequency must be positive",
        });
    }
    Ok(std::f64::consts::PI / omega)
}

/// Intrinsic cooperativity enhancement of a ring cavity, `2 * finesse / pi`.
pub fn cavity_enhancement(finesse: f64) -> Result<f64> {
    if !(finesse > 0.0) {
        return Err(Error::InvalidParameter {
            name: "finesse",
            value: finesse,
            reason: "finesse must be positive",
        });
    }
    Ok(2.0 * finesse / std::f64::consts::PI)
}

/// Saturating retrieval efficiency `p * C / (C + 1)` with
/// `C = k * od * enhancement`.
pub fn saturating_efficiency(od: f64, model: &EfficiencyModel) -> Result<f64> {
    if !(od >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "od",
            value: od,
            reason: "optical depth must be nonnegative",
        });
    }
    let c = model.k * od * model.enhancement;
    Ok(model.p * c / (c + 1.0))
}

/// Product of all stage efficiencies; 1 for the empty chain.
pub fn chain_efficiency(chain: &LossChain) -> f64 {
    chain.stages.iter().map(|s| s.efficiency).product()
}

/// True when the blockade radius strictly exceeds the excitation radius,
/// i.e. the ensemble can host at most one Rydberg excitation.
pub fn blockade_regime_ok(geom: &GeometryParams) -> bool {
    geom.blockade_radius_um > geom.excitation_radius_um
}
