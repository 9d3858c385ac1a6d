//! Spatio-temporal ambiguity function and the switching-sequence objective.
//!
//! `X(mu, mu', eta) = b(mu)^H b(mu') / (|b(mu)| |b(mu')|)`.
//!
//! The objective `f_P(eta)` integrates `|X|^P` over the region `D` of
//! receive-direction pairs and Doppler differences. It is estimated with a
//! fixed Owen-scrambled Sobol point set so that two sequences are always
//! compared on the same sample points. The reference Doppler is pinned to 0
//! and the second parameter point carries `nu' = -dnu`, so `nu - nu' = dnu`;
//! the magnitude of `X` only depends on that difference.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrays::{steering_vector, ArrayModel, Direction};
use crate::error::{Error, Result};
use crate::signal::{basis, basis_with_instants, ReceiveParams};
use crate::switching::SwitchingSequence;

/// Largest point count supported by the Sobol generator.
pub const MAX_SAMPLES: usize = 1 << 16;

/// Magnitudes below this are clamped in dB output.
pub const DB_FLOOR: f64 = -100.0;

/// Default Doppler bound as a fraction of `1 / (2 delta_t)`.
pub const DEFAULT_DOPPLER_FRACTION: f64 = 0.25;

/// Integration region: full azimuth and elevation ranges for both points and
/// Doppler differences within `[-doppler_bound, doppler_bound]` Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    doppler_bound: f64,
}

impl Region {
    pub fn new(doppler_bound: f64) -> Result<Self> {
        if !(doppler_bound > 0.0) || !doppler_bound.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Doppler bound must be positive, got {doppler_bound}"
            )));
        }
        Ok(Self { doppler_bound })
    }

    /// `fraction / (2 delta_t)`.
    pub fn from_slot_period(delta_t: f64, fraction: f64) -> Result<Self> {
        Self::new(fraction / (2.0 * delta_t))
    }

    pub fn doppler_bound(&self) -> f64 {
        self.doppler_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveConfig {
    /// Even exponent applied to `|X|`.
    pub power: u32,
    pub samples: usize,
    /// Owen-scramble seed of the point set.
    pub scramble: u32,
    /// Sample elevations by solid angle (`sin el` weighting) instead of
    /// uniformly on `[0, pi]`.
    pub solid_angle: bool,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        Self {
            power: 6,
            samples: 4096,
            scramble: 0,
            solid_angle: false,
        }
    }
}

impl ObjectiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.power < 2 || self.power % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "objective power must be an even integer >= 2, got {}",
                self.power
            )));
        }
        if self.samples == 0 || self.samples > MAX_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "sample count must be in 1..={MAX_SAMPLES}, got {}",
                self.samples
            )));
        }
        Ok(())
    }
}

/// Normalized inner product of two basis vectors. Errors when either vector
/// is zero.
pub fn normalized_product(b1: &[Complex64], b2: &[Complex64], p1: &ReceiveParams, p2: &ReceiveParams) -> Result<Complex64> {
    let n1 = b1.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let n2 = b2.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for (n, p) in [(n1, p1), (n2, p2)] {
        if !(n > 0.0) {
            return Err(Error::DegenerateDirection {
                azimuth: p.direction.azimuth(),
                elevation: p.direction.elevation(),
            });
        }
    }
    let dot: Complex64 = b1.iter().zip(b2).map(|(a, b)| a.conj() * b).sum();
    Ok(dot / (n1 * n2))
}

pub fn ambiguity_value(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    mu: &ReceiveParams,
    mu_prime: &ReceiveParams,
) -> Result<Complex64> {
    let b1 = basis(array, seq, mu)?;
    let b2 = basis(array, seq, mu_prime)?;
    normalized_product(&b1, &b2, mu, mu_prime)
}

/// Ambiguity value for arbitrary (not necessarily centered) activation instants.
pub fn ambiguity_with_instants(
    array: &ArrayModel,
    eta: &[f64],
    mu: &ReceiveParams,
    mu_prime: &ReceiveParams,
) -> Result<Complex64> {
    let b1 = basis_with_instants(array, eta, mu)?;
    let b2 = basis_with_instants(array, eta, mu_prime)?;
    normalized_product(&b1, &b2, mu, mu_prime)
}

/// Deterministic pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// One sample point of `D`: `(az, el, az', el', dnu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub first: Direction,
    pub second: Direction,
    pub delta_doppler: f64,
}

impl SamplePoint {
    pub fn params(&self) -> (ReceiveParams, ReceiveParams) {
        (
            ReceiveParams::new(self.first, 0.0),
            ReceiveParams::new(self.second, -self.delta_doppler),
        )
    }
}

/// Scrambled Sobol points mapped onto `D`, together with the volume of `D`.
pub fn sample_points(region: &Region, cfg: &ObjectiveConfig) -> Result<(Vec<SamplePoint>, f64)> {
    cfg.validate()?;
    let elevation = |u: f64| {
        if cfg.solid_angle {
            (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos()
        } else {
            PI * u
        }
    };
    let nu = region.doppler_bound;
    let points = (0..cfg.samples as u32)
        .map(|i| {
            let u = |d: u32| f64::from(sobol_burley::sample(i, d, cfg.scramble));
            Ok(SamplePoint {
                first: Direction::new(TAU * u(0), elevation(u(1)))?,
                second: Direction::new(TAU * u(2), elevation(u(3)))?,
                delta_doppler: nu * (2.0 * u(4) - 1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let angular = if cfg.solid_angle { 4.0 * PI } else { TAU * PI };
    Ok((points, angular * angular * 2.0 * nu))
}

/// Estimated objective with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub value: f64,
    /// Samples where one of the two directions had all-zero gains; they
    /// contribute `|X| = 0`.
    pub degenerate_samples: usize,
}

/// Objective evaluator with the sequence-independent part precomputed.
///
/// For every sample it stores `w_m = conj(s_m) s'_m` (steering vectors of the
/// two directions) and the norm product, so a sequence evaluation reduces to
/// `|sum_m w_m exp(-j 2 pi dnu eta_m)| / norm` per sample.
#[derive(Debug, Clone)]
pub struct ObjectiveEvaluator {
    elements: usize,
    power: i32,
    volume: f64,
    weights: Vec<Complex64>,
    delta_doppler: Vec<f64>,
    norms: Vec<f64>,
    degenerate: usize,
}

impl ObjectiveEvaluator {
    pub fn new(array: &ArrayModel, region: &Region, cfg: &ObjectiveConfig) -> Result<Self> {
        let (points, volume) = sample_points(region, cfg)?;
        let m = array.len();
        let per_sample = points
            .par_iter()
            .map(|p| {
                let s1 = steering_vector(array, &p.first)?;
                let s2 = steering_vector(array, &p.second)?;
                let n1: f64 = s1.iter().map(|v| v.norm_sqr()).sum();
                let n2: f64 = s2.iter().map(|v| v.norm_sqr()).sum();
                let w: Vec<Complex64> = s1.iter().zip(&s2).map(|(a, b)| a.conj() * b).collect();
                Ok((w, (n1 * n2).sqrt()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut weights = Vec::with_capacity(m * points.len());
        let mut norms = Vec::with_capacity(points.len());
        let mut degenerate = 0;
        for (w, n) in per_sample {
            weights.extend(w);
            if n > 0.0 {
                norms.push(n);
            } else {
                degenerate += 1;
                norms.push(0.0);
            }
        }
        Ok(Self {
            elements: m,
            power: cfg.power as i32,
            volume,
            weights,
            delta_doppler: points.iter().map(|p| p.delta_doppler).collect(),
            norms,
            degenerate,
        })
    }

    pub fn samples(&self) -> usize {
        self.norms.len()
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// `|X|^P` per sample, in sample order.
    pub fn sample_values(&self, seq: &SwitchingSequence) -> Result<Vec<f64>> {
        if seq.len() != self.elements {
            return Err(Error::InvalidArgument(format!(
                "evaluator built for {} elements, sequence has {}",
                self.elements,
                seq.len()
            )));
        }
        let m = self.elements;
        let snapshots = seq.snapshots();
        let eta = seq.eta_vector(true);
        let half_power = self.power / 2;
        Ok((0..self.samples())
            .into_par_iter()
            .map(|s| {
                let norm = self.norms[s];
                if norm == 0.0 {
                    return 0.0;
                }
                let w = &self.weights[s * m..(s + 1) * m];
                let omega = -TAU * self.delta_doppler[s];
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, &t) in eta.iter().enumerate() {
                    acc += w[i % m] * Complex64::cis(omega * t);
                }
                let x2 = acc.norm_sqr() / (norm * snapshots as f64).powi(2);
                x2.powi(half_power)
            })
            .collect())
    }

    pub fn evaluate(&self, seq: &SwitchingSequence) -> Result<ObjectiveValue> {
        let values = self.sample_values(seq)?;
        Ok(ObjectiveValue {
            value: self.volume * pairwise_sum(&values) / values.len() as f64,
            degenerate_samples: self.degenerate,
        })
    }
}

/// One-shot objective evaluation.
pub fn objective(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    region: &Region,
    cfg: &ObjectiveConfig,
) -> Result<ObjectiveValue> {
    ObjectiveEvaluator::new(array, region, cfg)?.evaluate(seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleAxis {
    /// Elevation sweep at the reference azimuth.
    Eoa,
    /// Azimuth sweep at the reference elevation.
    Aoa,
}

impl AngleAxis {
    pub fn name(&self) -> &'static str {
        match self {
            AngleAxis::Eoa => "eoa",
            AngleAxis::Aoa => "aoa",
        }
    }
}

/// `|X|` on a (Doppler difference, angle) grid with the first parameter point
/// fixed at `reference`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySurface {
    pub reference: ReceiveParams,
    pub axis: AngleAxis,
    /// Doppler differences `nu - nu'` in Hz.
    pub doppler: Vec<f64>,
    /// Absolute angles in radians.
    pub angle: Vec<f64>,
    /// Row-major `[angle][doppler]`.
    magnitude: Vec<f64>,
    /// Grid points whose direction has all-zero gains (stored as 0).
    pub degenerate_points: usize,
}

impl AmbiguitySurface {
    /// Builds a surface from precomputed magnitudes (row-major `[angle][doppler]`).
    pub fn from_magnitudes(
        reference: ReceiveParams,
        axis: AngleAxis,
        doppler: Vec<f64>,
        angle: Vec<f64>,
        magnitude: Vec<f64>,
    ) -> Result<Self> {
        check_grid("Doppler", &doppler)?;
        check_grid("angle", &angle)?;
        if magnitude.len() != doppler.len() * angle.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} magnitudes, got {}",
                doppler.len() * angle.len(),
                magnitude.len()
            )));
        }
        Ok(Self {
            reference,
            axis,
            doppler,
            angle,
            magnitude,
            degenerate_points: 0,
        })
    }

    pub fn get(&self, doppler_idx: usize, angle_idx: usize) -> f64 {
        self.magnitude[angle_idx * self.doppler.len() + doppler_idx]
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn db(&self, doppler_idx: usize, angle_idx: usize) -> f64 {
        to_db(self.get(doppler_idx, angle_idx))
    }

    /// Grid index of the largest magnitude `(doppler_idx, angle_idx)`.
    pub fn peak(&self) -> (usize, usize) {
        let (i, _) = self
            .magnitude
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        (i % self.doppler.len(), i / self.doppler.len())
    }
}

/// `20 log10 |x|` with a floor of [`DB_FLOOR`].
pub fn to_db(magnitude: f64) -> f64 {
    if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must be non-empty and strictly increasing"
        )));
    }
    Ok(())
}

/// Sweeps `mu' = (angle, nu_ref - dnu)` over the grid, `mu = reference`.
pub fn ambiguity_surface(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    reference: ReceiveParams,
    doppler_grid: &[f64],
    axis: AngleAxis,
    angle_grid: &[f64],
) -> Result<AmbiguitySurface> {
    check_grid("Doppler", doppler_grid)?;
    check_grid("angle", angle_grid)?;
    let b_ref = basis(array, seq, &reference)?;
    let n_ref = b_ref.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(n_ref > 0.0) {
        return Err(Error::DegenerateDirection {
            azimuth: reference.direction.azimuth(),
            elevation: reference.direction.elevation(),
        });
    }
    let eta = seq.eta_vector(true);
    let m = array.len();
    let rows = angle_grid
        .par_iter()
        .map(|&angle| {
            let dir = match axis {
                AngleAxis::Eoa => Direction::new(reference.direction.azimuth(), angle)?,
                AngleAxis::Aoa => Direction::new(angle, reference.direction.elevation())?,
            };
            let steer = steering_vector(array, &dir)?;
            let n2 = (seq.snapshots() as f64 * steer.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
            if n2 == 0.0 {
                return Ok((vec![0.0; doppler_grid.len()], true));
            }
            // conj(b_ref) . steer, Doppler applied per grid column
            let w: Vec<Complex64> = b_ref
                .iter()
                .enumerate()
                .map(|(i, b)| b.conj() * steer[i % m])
                .collect();
            let row = doppler_grid
                .iter()
                .map(|&dnu| {
                    let omega = TAU * (reference.doppler - dnu);
                    let acc: Complex64 = w
                        .iter()
                        .zip(&eta)
                        .map(|(w, &t)| w * Complex64::cis(omega * t))
                        .sum();
                    (acc.norm() / (n_ref * n2)).min(1.0)
                })
                .collect();
            Ok((row, false))
        })
        .collect::<Result<Vec<_>>>()?;
    let degenerate_points = rows.iter().filter(|(_, d)| *d).count() * doppler_grid.len();
    Ok(AmbiguitySurface {
        reference,
        axis,
        doppler: doppler_grid.to_vec(),
        angle: angle_grid.to_vec(),
        magnitude: rows.into_iter().flat_map(|(r, _)| r).collect(),
        degenerate_points,
    })
}

/// `n` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n).map(|i| start + step * i as f64).collect()
        }
    }
}
