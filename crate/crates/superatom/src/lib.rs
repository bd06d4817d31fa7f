//! Seeded Monte Carlo simulator and analysis toolkit for single-shot readout
//! of a Rydberg-superatom qubit via blockade-conditioned photon bursts.
//!
//! A superatom qubit encoded in two Rydberg levels is read out by repeatedly
//! exciting and retrieving single photons: the retrieved level produces a
//! burst of clicks, the blockading level suppresses it, and thresholding the
//! total photon number decides the outcome in one shot. This crate models
//! that measurement end to end:
//!
//! - [`model`] — closed-form physics: Rabi dynamics, cavity-enhanced
//!   retrieval efficiency, loss chains, blockade-regime check.
//! - [`qubit`] — SU(2) rotations, state preparation, measurement bases.
//! - [`burst`] — the seeded Monte Carlo burst engine plus its exact analytic
//!   counterpart ([`burst::expected_statistics`]).
//! - [`analysis`] — threshold discrimination, preparation-corrected
//!   fidelities, Poisson fits, Stokes tomography with physicality projection.
//! - [`fit`] — damped Gauss-Newton least squares, efficiency-curve fits and
//!   burst-parameter calibration.
//! - [`config`], [`io`], [`commands`] — reproducible runs: JSON configs,
//!   CSV/JSON artifacts, and the operations behind the `superatom` binary.
//!
//! Every stochastic path flows from a single master seed through per-trial
//! counter-based substreams, so results are bit-identical for a given
//! configuration regardless of thread count or scheduling.
//!
//! The `examples/` directory contains one runnable walkthrough per major
//! capability; start with `single_shot_readout`.

// Validation uses `!(x > 0.0)` so NaN is rejected along with out-of-range
// values; `x <= 0.0` would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod burst;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod fit;
pub mod io;
pub mod model;
pub mod qubit;
pub mod reference;
pub mod rng;

pub use error::{Error, Result};
