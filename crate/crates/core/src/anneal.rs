//! Simulated annealing over switching sequences.
//!
//! Each iteration `k = 0..k_max` proposes a neighbor (swap of two slots,
//! restricted to subset `k mod n` for hybrid sequences), accepts it when
//! `exp((f(eta) - f(eta')) / T) > u` with `u ~ U[0, 1)`, and then cools the
//! temperature geometrically. Random draws happen in a fixed order per
//! iteration: the proposal's draws, then `u`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambiguity::ObjectiveEvaluator;
use crate::error::{Error, Result};
use crate::switching::SwitchingSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateKind {
    /// Swap any two slots.
    Random,
    /// Swap two slots inside one subset, cycling through subsets.
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub k_max: usize,
    /// Defaults to `0.1 |f(init)|`.
    pub initial_temperature: Option<f64>,
    /// Defaults to `1e-4^(1 / k_max)`, i.e. the last temperature is `1e-4 T0`.
    pub cooling_rate: Option<f64>,
    pub seed: u64,
    pub update: UpdateKind,
}

impl AnnealConfig {
    pub fn new(k_max: usize, seed: u64, update: UpdateKind) -> Self {
        Self {
            k_max,
            initial_temperature: None,
            cooling_rate: None,
            seed,
            update,
        }
    }

    pub fn default_cooling_rate(k_max: usize) -> f64 {
        1e-4f64.powf(1.0 / k_max as f64)
    }

    /// Resolves defaults into `(T0, alpha)` and validates them.
    pub fn schedule(&self, initial_objective: f64) -> Result<(f64, f64)> {
        if self.k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be at least 1".into()));
        }
        let t0 = self
            .initial_temperature
            .unwrap_or(0.1 * initial_objective.abs());
        let alpha = self
            .cooling_rate
            .unwrap_or_else(|| Self::default_cooling_rate(self.k_max));
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "initial temperature must be positive, got {t0}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cooling rate must lie in (0, 1), got {alpha}"
            )));
        }
        Ok((t0, alpha))
    }
}

/// `T0 alpha^k`.
pub fn temperature_schedule(t0: f64, alpha: f64, k: usize) -> f64 {
    t0 * alpha.powi(k as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Objective of the current sequence after the accept/reject decision.
    pub objective: f64,
    pub proposal_objective: f64,
    /// Temperature used in this iteration's acceptance test.
    pub temperature: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealTrace {
    pub initial_objective: f64,
    pub initial_temperature: f64,
    pub cooling_rate: f64,
    pub records: Vec<IterationRecord>,
    pub best_objective: f64,
    pub best_sequence: SwitchingSequence,
    pub wall_time_s: f64,
}

impl AnnealTrace {
    pub fn final_objective(&self) -> f64 {
        self.records.last().map_or(self.initial_objective, |r| r.objective)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.accepted).count() as f64 / self.records.len() as f64
    }
}

/// Runs annealing with an RNG seeded from `cfg.seed`.
pub fn anneal(
    init: &SwitchingSequence,
    cfg: &AnnealConfig,
    evaluator: &ObjectiveEvaluator,
) -> Result<(SwitchingSequence, AnnealTrace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    anneal_with_rng(init, cfg, evaluator, &mut rng)
}

/// Runs annealing drawing from a caller-owned RNG (`cfg.seed` is ignored).
/// Returns the final sequence; the best one seen is kept in the trace.
pub fn anneal_with_rng<R: Rng + ?Sized>(
    init: &SwitchingSequence,
    cfg: &AnnealConfig,
    evaluator: &ObjectiveEvaluator,
    rng: &mut R,
) -> Result<(SwitchingSequence, AnnealTrace)> {
    if cfg.update == UpdateKind::Hybrid && init.partition().is_none() {
        return Err(Error::InvalidPartition(
            "hybrid annealing needs an initial sequence with a partition".into(),
        ));
    }
    if cfg.update == UpdateKind::Random && init.partition().is_some() {
        return Err(Error::InvalidSequence(
            "random annealing needs an unpartitioned initial sequence".into(),
        ));
    }
    let started = Instant::now();
    let initial_objective = evaluator.evaluate(init)?.value;
    let (t0, alpha) = cfg.schedule(initial_objective)?;

    let mut trace = AnnealTrace {
        initial_objective,
        initial_temperature: t0,
        cooling_rate: alpha,
        records: Vec::with_capacity(cfg.k_max),
        best_objective: initial_objective,
        best_sequence: init.clone(),
        wall_time_s: 0.0,
    };
    let mut current = init.clone();
    let mut f_current = initial_objective;

    for k in 0..cfg.k_max {
        let temperature = temperature_schedule(t0, alpha, k);
        let proposal = match cfg.update {
            UpdateKind::Random => current.swap_random(rng)?,
            UpdateKind::Hybrid => current.swap_hybrid(k, rng)?,
        };
        let f_proposal = evaluator.evaluate(&proposal)?.value;
        if !f_proposal.is_finite() {
            trace.wall_time_s = started.elapsed().as_secs_f64();
            return Err(Error::AnnealAborted {
                iteration: k,
                reason: format!("objective evaluated to {f_proposal}"),
                trace: Box::new(trace),
            });
        }
        let u: f64 = rng.random();
        let accepted = ((f_current - f_proposal) / temperature).exp() > u;
        if accepted {
            current = proposal;
            f_current = f_proposal;
            if f_current < trace.best_objective {
                trace.best_objective = f_current;
                trace.best_sequence = current.clone();
            }
        }
        trace.records.push(IterationRecord {
            k,
            objective: f_current,
            proposal_objective: f_proposal,
            temperature,
            accepted,
        });
    }
    trace.wall_time_s = started.elapsed().as_secs_f64();
    Ok((current, trace))
}
