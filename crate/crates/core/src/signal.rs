//! Narrowband single-path signal model of a switched-array sounder.
//!
//! The general basis of one path stacks four polarimetric columns, each of the
//! form `((b_t (x) b_T (x) b_R) . a_nu) (x) b_f` for the Tx/Rx polarization
//! pairs HH, HV, VH and VV. This crate only executes the single-frequency
//! vertical-polarization receive specialization
//!
//! ```text
//! b(mu_R, eta) = b_RV . a_nu,      [a_nu]_i = exp(j 2 pi nu eta_i)
//! ```
//!
//! where `b_RV` is the receive steering vector (tiled over snapshots) and
//! `eta` the centered activation instants. Snapshot starting times are folded
//! into `eta` (see [`SwitchingSequence::eta_vector`]), which plays the role of
//! `b_t`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arrays::{steering_vector, ArrayModel, Direction};
use crate::error::{Error, Result};
use crate::switching::SwitchingSequence;

/// Full double-directional structural parameters of one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralParams {
    pub tx: Direction,
    pub rx: Direction,
    /// Doppler frequency in Hz.
    pub doppler: f64,
}

impl StructuralParams {
    /// The receive-side triple used by SIMO evaluations.
    pub fn receive(&self) -> ReceiveParams {
        ReceiveParams {
            direction: self.rx,
            doppler: self.doppler,
        }
    }
}

/// Receive-side structural parameters `(azimuth, elevation, doppler)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiveParams {
    pub direction: Direction,
    pub doppler: f64,
}

impl ReceiveParams {
    pub fn new(direction: Direction, doppler: f64) -> Self {
        Self { direction, doppler }
    }
}

/// Complex VV path amplitude `r exp(j psi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGain {
    amplitude: f64,
    phase: f64,
}

impl PathGain {
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() || !phase.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "path gain needs finite amplitude >= 0, got r = {amplitude}, psi = {phase}"
            )));
        }
        Ok(Self { amplitude, phase })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

fn check_sizes(array: &ArrayModel, seq: &SwitchingSequence) -> Result<()> {
    if array.len() != seq.len() {
        return Err(Error::InvalidArgument(format!(
            "array has {} elements but the sequence switches {}",
            array.len(),
            seq.len()
        )));
    }
    Ok(())
}

/// `exp(j 2 pi nu eta_i)` over the centered activation instants.
pub fn doppler_vector(seq: &SwitchingSequence, doppler: f64) -> Vec<Complex64> {
    seq.eta_vector(true)
        .into_iter()
        .map(|t| Complex64::cis(TAU * doppler * t))
        .collect()
}

/// Basis vector `b_RV . a_nu` of length `M * M_t`.
pub fn basis(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    params: &ReceiveParams,
) -> Result<Vec<Complex64>> {
    check_sizes(array, seq)?;
    basis_with_instants(array, &seq.eta_vector(true), params)
}

/// Basis vector for arbitrary activation instants `eta` (length a multiple
/// of the element count, indexed `m + t * M`).
pub fn basis_with_instants(
    array: &ArrayModel,
    eta: &[f64],
    params: &ReceiveParams,
) -> Result<Vec<Complex64>> {
    if eta.is_empty() || eta.len() % array.len() != 0 {
        return Err(Error::InvalidArgument(format!(
            "{} activation instants do not tile {} elements",
            eta.len(),
            array.len()
        )));
    }
    let steer = steering_vector(array, &params.direction)?;
    Ok(eta
        .iter()
        .enumerate()
        .map(|(i, &t)| steer[i % steer.len()] * Complex64::cis(TAU * params.doppler * t))
        .collect())
}

/// Noisy observation `gamma * b + n` with circular Gaussian noise of total
/// variance `noise_sigma^2` per complex sample.
pub fn synthesize<R: Rng + ?Sized>(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    params: &ReceiveParams,
    gain: PathGain,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if !(noise_sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    let gamma = gain.complex();
    let scale = noise_sigma / std::f64::consts::SQRT_2;
    Ok(basis(array, seq, params)?
        .into_iter()
        .map(|b| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            gamma * b + Complex64::new(re, im) * scale
        })
        .collect())
}

/// Per-element SNR `r^2 sum|g_m|^2 / (M sigma^2)` towards `dir`.
pub fn snr(array: &ArrayModel, dir: &Direction, gain: PathGain, noise_sigma: f64) -> Result<f64> {
    let power: f64 = array.element_gains(dir)?.iter().map(|g| g.norm_sqr()).sum();
    Ok(gain.amplitude().powi(2) * power / (array.len() as f64 * noise_sigma.powi(2)))
}
