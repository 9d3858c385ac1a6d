//! Subcommand drivers. Each writes its outputs plus `manifest.json` into the
//! output directory.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use swseq_core::ambiguity::{ambiguity_surface, AmbiguitySurface, ObjectiveEvaluator};
use swseq_core::analysis::{compare_schemes, CompareSettings, SchemeSet, SweepGrids};
use swseq_core::anneal::{anneal_with_rng, AnnealConfig, AnnealTrace, UpdateKind};
use swseq_core::arrays::{effective_elements, ArrayModel};
use swseq_core::crlb::{crlb_report, ParamVector};
use swseq_core::io::{
    read_sequence, sequence_to_json, write_json, write_sequence, write_surface_csv, write_trace_csv,
    SurfaceMetadata,
};
use swseq_core::switching::{hybrid_init, random_init, sequential, SwitchingSequence};

use crate::config::{ExperimentConfig, Scheme};
use crate::error::CliError;

/// Everything a command needs besides the config itself.
pub struct RunContext {
    pub command: String,
    pub config: ExperimentConfig,
    pub config_sha256: String,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    threads: Option<usize>,
    config_sha256: &'a str,
    config: &'a ExperimentConfig,
    outputs: &'a [String],
    wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunContext {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn finish(&self, started: Instant, outputs: &[String]) -> Result<(), CliError> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            seed: self.config.seed,
            threads: self.threads,
            config_sha256: &self.config_sha256,
            config: &self.config,
            outputs,
            wall_time_s: started.elapsed().as_secs_f64(),
        };
        write_json(&self.path("manifest.json"), &manifest)?;
        Ok(())
    }
}

fn load_sequence(path: &Path, array: &ArrayModel) -> Result<SwitchingSequence, CliError> {
    if !path.is_file() {
        return Err(CliError::Config(format!("sequence file not found: {}", path.display())));
    }
    let seq = read_sequence(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    check_size(&seq, array)?;
    Ok(seq)
}

fn check_size(seq: &SwitchingSequence, array: &ArrayModel) -> Result<(), CliError> {
    if seq.len() != array.len() {
        return Err(CliError::Config(format!(
            "sequence has {} antennas but the array has {}",
            seq.len(),
            array.len()
        )));
    }
    Ok(())
}

fn initial_sequence(
    scheme: Scheme,
    cfg: &ExperimentConfig,
    array: &ArrayModel,
    rng: &mut ChaCha8Rng,
) -> Result<SwitchingSequence, CliError> {
    let (dt, snaps) = (cfg.sequence.delta_t_s, cfg.sequence.snapshots);
    Ok(match scheme {
        Scheme::Sequential => sequential(array.len(), dt, snaps)?,
        Scheme::Random => random_init(array.len(), dt, snaps, rng)?,
        Scheme::Hybrid => {
            let partition = array.partition().ok_or_else(|| {
                CliError::Config("sequence.scheme: hybrid switching needs an array with a subset partition".into())
            })?;
            hybrid_init(partition, dt, snaps, rng)?
        }
    })
}

/// The configured single sequence: the sequence file when given, otherwise
/// an initial sequence of the configured scheme.
fn configured_sequence(cfg: &ExperimentConfig, array: &ArrayModel) -> Result<SwitchingSequence, CliError> {
    match &cfg.sequence.file {
        Some(path) => load_sequence(path, array),
        None => initial_sequence(cfg.sequence.scheme, cfg, array, &mut ChaCha8Rng::seed_from_u64(cfg.seed)),
    }
}

fn run_anneal(
    scheme: Scheme,
    cfg: &ExperimentConfig,
    array: &ArrayModel,
    evaluator: &ObjectiveEvaluator,
    stream: u64,
) -> Result<(SwitchingSequence, AnnealTrace), CliError> {
    let update = match scheme {
        Scheme::Random => UpdateKind::Random,
        Scheme::Hybrid => UpdateKind::Hybrid,
        Scheme::Sequential => {
            return Err(CliError::Config(
                "sequence.scheme: optimization needs the random or hybrid scheme".into(),
            ))
        }
    };
    // initial sequence and annealing draw from one stream
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let init = initial_sequence(scheme, cfg, array, &mut rng)?;
    let anneal_cfg = AnnealConfig {
        k_max: cfg.anneal.k_max,
        initial_temperature: cfg.anneal.initial_temperature,
        cooling_rate: cfg.anneal.cooling_rate,
        seed: cfg.seed,
        update,
    };
    Ok(anneal_with_rng(&init, &anneal_cfg, evaluator, &mut rng)?)
}

fn write_trace(path: &Path, trace: &AnnealTrace) -> Result<(), CliError> {
    write_trace_csv(BufWriter::new(File::create(path)?), trace)?;
    Ok(())
}

fn write_surface(ctx: &RunContext, stem: &str, surface: &AmbiguitySurface, seq_sha: String) -> Result<Vec<String>, CliError> {
    let csv = format!("{stem}.csv");
    let meta = format!("{stem}.json");
    write_surface_csv(BufWriter::new(File::create(ctx.path(&csv))?), surface)?;
    write_json(&ctx.path(&meta), &SurfaceMetadata::new(surface, Some(ctx.config.seed), Some(seq_sha)))?;
    Ok(vec![csv, meta])
}

/// Writes `seq` to `name` and returns the SHA-256 of the written bytes.
fn save_sequence(ctx: &RunContext, name: &str, seq: &SwitchingSequence) -> Result<String, CliError> {
    let path = ctx.path(name);
    write_sequence(&path, seq)?;
    Ok(sha256_hex(&fs::read(path)?))
}

#[derive(Serialize)]
struct OptimizeSummary {
    scheme: Scheme,
    k_max: usize,
    initial_objective: f64,
    final_objective: f64,
    best_objective: f64,
    initial_temperature: f64,
    cooling_rate: f64,
    acceptance_rate: f64,
    wall_time_s: f64,
}

pub fn optimize(ctx: &RunContext) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = &ctx.config;
    let array = cfg.build_array()?;
    let evaluator = ObjectiveEvaluator::new(&array, &cfg.region()?, &cfg.objective)?;
    let (last, trace) = run_anneal(cfg.sequence.scheme, cfg, &array, &evaluator, 0)?;
    save_sequence(ctx, "sequence.json", &last)?;
    save_sequence(ctx, "best_sequence.json", &trace.best_sequence)?;
    write_trace(&ctx.path("trace.csv"), &trace)?;
    write_json(
        &ctx.path("optimize.json"),
        &OptimizeSummary {
            scheme: cfg.sequence.scheme,
            k_max: cfg.anneal.k_max,
            initial_objective: trace.initial_objective,
            final_objective: trace.final_objective(),
            best_objective: trace.best_objective,
            initial_temperature: trace.initial_temperature,
            cooling_rate: trace.cooling_rate,
            acceptance_rate: trace.acceptance_rate(),
            wall_time_s: trace.wall_time_s,
        },
    )?;
    let outputs = ["sequence.json", "best_sequence.json", "trace.csv", "optimize.json"].map(String::from);
    ctx.finish(started, &outputs)
}

pub fn ambiguity(ctx: &RunContext) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = &ctx.config;
    let array = cfg.build_array()?;
    let seq = configured_sequence(cfg, &array)?;
    let seq_sha = match &cfg.sequence.file {
        Some(path) => sha256_hex(&fs::read(path)?),
        None => sha256_hex(sequence_to_json(&seq)?.as_bytes()),
    };
    let surface = ambiguity_surface(
        &array,
        &seq,
        cfg.reference()?,
        &cfg.doppler_grid(),
        cfg.sweep.axis,
        &cfg.angle_grid(),
    )?;
    let mut outputs = write_surface(ctx, "surface", &surface, seq_sha)?;
    if cfg.sequence.file.is_none() {
        save_sequence(ctx, "sequence.json", &seq)?;
        outputs.push("sequence.json".into());
    }
    ctx.finish(started, &outputs)
}

/// Writes the report; a bound that could not be computed is recorded in the
/// report and then surfaced as a numeric failure.
pub fn crlb(ctx: &RunContext) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = &ctx.config;
    let spacing = cfg
        .ula_spacing()
        .ok_or_else(|| CliError::Config("array.kind: crlb needs a ULA array".into()))?;
    let array = cfg.build_array()?;
    let seq = configured_sequence(cfg, &array)?;
    let c = &cfg.crlb;
    let theta = ParamVector::new(c.phi_deg.to_radians(), c.doppler_hz, c.amplitude, c.phase_rad)
        .map_err(|e| CliError::Config(format!("crlb: {e}")))?;
    let report = crlb_report(&array, spacing, &seq, &theta, c.noise_sigma);
    write_json(&ctx.path("crlb.json"), &report)?;
    ctx.finish(started, &["crlb.json".to_string()])?;
    match report.error {
        Some(msg) => Err(CliError::Numeric(swseq_core::Error::Numeric(msg))),
        None => Ok(()),
    }
}

pub fn compare(ctx: &RunContext) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = &ctx.config;
    let array = cfg.build_array()?;
    let region = cfg.region()?;
    let evaluator = ObjectiveEvaluator::new(&array, &region, &cfg.objective)?;
    let mut outputs = Vec::new();

    let sequential_seq = match &cfg.compare.sequential_file {
        Some(p) => load_sequence(p, &array)?,
        None => sequential(array.len(), cfg.sequence.delta_t_s, cfg.sequence.snapshots)?,
    };
    let mut optimized = |scheme: Scheme, file: &Option<PathBuf>, stream: u64| -> Result<SwitchingSequence, CliError> {
        match file {
            Some(p) => load_sequence(p, &array),
            None => {
                let (seq, trace) = run_anneal(scheme, cfg, &array, &evaluator, stream)?;
                let name = format!("trace_{}.csv", scheme_name(scheme));
                write_trace(&ctx.path(&name), &trace)?;
                outputs.push(name);
                Ok(seq)
            }
        }
    };
    let random_seq = optimized(Scheme::Random, &cfg.compare.random_file, 1)?;
    let hybrid_seq = optimized(Scheme::Hybrid, &cfg.compare.hybrid_file, 2)?;

    let settings = CompareSettings {
        reference: cfg.reference()?,
        grids: SweepGrids {
            axis: cfg.sweep.axis,
            doppler: cfg.doppler_grid(),
            angle: cfg.angle_grid(),
        },
        threshold_db: cfg.effective.threshold_db,
        region,
        objective: cfg.objective,
        amplitude: cfg.crlb.amplitude,
        noise_sigma: cfg.crlb.noise_sigma,
    };
    let set = SchemeSet {
        sequential: &sequential_seq,
        random: &random_seq,
        hybrid: &hybrid_seq,
    };
    let (report, surfaces) = compare_schemes(&array, &set, &settings)?;
    for ((scheme, seq), surface) in [Scheme::Sequential, Scheme::Random, Scheme::Hybrid]
        .into_iter()
        .zip([&sequential_seq, &random_seq, &hybrid_seq])
        .zip(&surfaces)
    {
        let name = scheme_name(scheme);
        let seq_file = format!("sequence_{name}.json");
        let sha = save_sequence(ctx, &seq_file, seq)?;
        outputs.push(seq_file);
        outputs.extend(write_surface(ctx, &format!("surface_{name}"), surface, sha)?);
    }
    write_json(&ctx.path("comparison.json"), &report)?;
    outputs.push("comparison.json".into());
    ctx.finish(started, &outputs)
}

#[derive(Serialize)]
struct EffectiveReport {
    azimuth_deg: f64,
    elevation_deg: f64,
    threshold_db: f64,
    elements: usize,
    effective_elements: Vec<usize>,
    xi: f64,
    inverse_xi: f64,
}

pub fn effective_factor(ctx: &RunContext) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = &ctx.config;
    let array = cfg.build_array()?;
    let dir = cfg.reference()?.direction;
    let eff = effective_elements(&array, &dir, cfg.effective.threshold_db)?;
    let xi = eff.len() as f64 / array.len() as f64;
    write_json(
        &ctx.path("effective.json"),
        &EffectiveReport {
            azimuth_deg: cfg.sweep.reference.azimuth_deg,
            elevation_deg: cfg.sweep.reference.elevation_deg,
            threshold_db: cfg.effective.threshold_db,
            elements: array.len(),
            effective_elements: eff,
            xi,
            inverse_xi: 1.0 / xi,
        },
    )?;
    ctx.finish(started, &["effective.json".to_string()])
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::Sequential => "sequential",
        Scheme::Random => "random",
        Scheme::Hybrid => "hybrid",
    }
}
