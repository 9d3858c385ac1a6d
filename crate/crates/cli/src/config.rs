//! Experiment configuration: one JSON document, unknown fields rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swseq_core::ambiguity::{linspace, ObjectiveConfig, Region, DEFAULT_DOPPLER_FRACTION};
use swseq_core::arrays::{
    make_octagonal, make_ula, wavelength_from_carrier, ArrayModel, Direction, PanelRing, Polarization,
    DEFAULT_CARRIER_HZ, DEFAULT_PATCH_EXPONENT,
};
use swseq_core::io::load_pattern_csv;
use swseq_core::signal::ReceiveParams;
use swseq_core::switching::DEFAULT_SLOT_PERIOD_S;
use swseq_core::AngleAxis;

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: u64,
    #[serde(default)]
    pub array: ArraySpec,
    #[serde(default)]
    pub sequence: SequenceSpec,
    #[serde(default)]
    pub anneal: AnnealSpec,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(default)]
    pub objective: ObjectiveConfig,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub crlb: CrlbSpec,
    #[serde(default)]
    pub effective: EffectiveSpec,
    #[serde(default)]
    pub compare: CompareSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ArraySpec {
    Octagonal {
        #[serde(default = "default_panels")]
        panels: usize,
        #[serde(default = "default_side")]
        rows: usize,
        #[serde(default = "default_side")]
        cols: usize,
        /// In wavelengths.
        #[serde(default = "default_spacing")]
        spacing_wavelengths: f64,
        /// In meters; omitted means adjacent panels touch.
        #[serde(default)]
        radius_m: Option<f64>,
        #[serde(default = "default_carrier")]
        carrier_hz: f64,
        #[serde(default = "default_patch_exponent")]
        patch_exponent: f64,
        /// Measured V-polarized patterns replacing the synthetic patch model.
        #[serde(default)]
        pattern_file: Option<PathBuf>,
    },
    Ula {
        elements: usize,
        #[serde(default = "default_spacing")]
        spacing_wavelengths: f64,
        #[serde(default = "default_carrier")]
        carrier_hz: f64,
    },
}

fn default_panels() -> usize {
    8
}
fn default_side() -> usize {
    4
}
fn default_spacing() -> f64 {
    0.5
}
fn default_carrier() -> f64 {
    DEFAULT_CARRIER_HZ
}
fn default_patch_exponent() -> f64 {
    DEFAULT_PATCH_EXPONENT
}

impl Default for ArraySpec {
    fn default() -> Self {
        ArraySpec::Octagonal {
            panels: default_panels(),
            rows: default_side(),
            cols: default_side(),
            spacing_wavelengths: default_spacing(),
            radius_m: None,
            carrier_hz: default_carrier(),
            patch_exponent: default_patch_exponent(),
            pattern_file: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Sequential,
    Random,
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceSpec {
    pub scheme: Scheme,
    pub delta_t_s: f64,
    pub snapshots: usize,
    /// Existing sequence file; overrides `scheme` where a single sequence is used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for SequenceSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::Random,
            delta_t_s: DEFAULT_SLOT_PERIOD_S,
            snapshots: 1,
            file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealSpec {
    pub k_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cooling_rate: Option<f64>,
}

impl Default for AnnealSpec {
    fn default() -> Self {
        Self {
            k_max: 200,
            initial_temperature: None,
            cooling_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionSpec {
    /// Doppler bound as a fraction of `1 / (2 delta_t)`.
    pub doppler_fraction: f64,
    /// Absolute bound in Hz; takes precedence over the fraction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doppler_bound_hz: Option<f64>,
}

impl Default for RegionSpec {
    fn default() -> Self {
        Self {
            doppler_fraction: DEFAULT_DOPPLER_FRACTION,
            doppler_bound_hz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceSpec {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub doppler_hz: f64,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        Self {
            azimuth_deg: 180.0,
            elevation_deg: 90.0,
            doppler_hz: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: AngleAxis,
    pub reference: ReferenceSpec,
    pub doppler_hz: GridSpec,
    pub angle_deg: GridSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            axis: AngleAxis::Eoa,
            reference: ReferenceSpec::default(),
            doppler_hz: GridSpec {
                start: -3000.0,
                stop: 3000.0,
                count: 1201,
            },
            angle_deg: GridSpec {
                start: 30.0,
                stop: 150.0,
                count: 241,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrlbSpec {
    pub phi_deg: f64,
    pub doppler_hz: f64,
    pub amplitude: f64,
    pub phase_rad: f64,
    pub noise_sigma: f64,
}

impl Default for CrlbSpec {
    fn default() -> Self {
        Self {
            phi_deg: 90.0,
            doppler_hz: 0.0,
            amplitude: 1.0,
            phase_rad: 0.0,
            noise_sigma: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffectiveSpec {
    pub threshold_db: f64,
}

impl Default for EffectiveSpec {
    fn default() -> Self {
        Self { threshold_db: -10.0 }
    }
}

/// Optional precomputed sequences for `compare`; missing ones are
/// generated (sequential) or optimized (random, hybrid).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequential_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hybrid_file: Option<PathBuf>,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn check_file(field: &str, path: &Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) if !p.is_file() => Err(invalid(field, format!("file not found: {}", p.display()))),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    /// Parses and validates; relative paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        if let ArraySpec::Octagonal { pattern_file, .. } = &mut self.array {
            fix(pattern_file);
        }
        fix(&mut self.sequence.file);
        fix(&mut self.compare.sequential_file);
        fix(&mut self.compare.random_file);
        fix(&mut self.compare.hybrid_file);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
            ));
        }
        match &self.array {
            ArraySpec::Octagonal {
                panels,
                rows,
                cols,
                spacing_wavelengths,
                carrier_hz,
                patch_exponent,
                pattern_file,
                ..
            } => {
                if *panels < 3 {
                    return Err(invalid("array.panels", "need at least 3 panels"));
                }
                if *rows == 0 || *cols == 0 {
                    return Err(invalid("array.rows/cols", "must be positive"));
                }
                positive("array.spacing_wavelengths", *spacing_wavelengths)?;
                positive("array.carrier_hz", *carrier_hz)?;
                if !(*patch_exponent >= 0.0) {
                    return Err(invalid("array.patch_exponent", "must be >= 0"));
                }
                check_file("array.pattern_file", pattern_file)?;
            }
            ArraySpec::Ula {
                elements,
                spacing_wavelengths,
                carrier_hz,
            } => {
                if *elements < 2 {
                    return Err(invalid("array.elements", "need at least 2 elements"));
                }
                positive("array.spacing_wavelengths", *spacing_wavelengths)?;
                positive("array.carrier_hz", *carrier_hz)?;
            }
        }
        positive("sequence.delta_t_s", self.sequence.delta_t_s)?;
        if self.sequence.snapshots == 0 {
            return Err(invalid("sequence.snapshots", "must be at least 1"));
        }
        check_file("sequence.file", &self.sequence.file)?;
        if self.anneal.k_max == 0 {
            return Err(invalid("anneal.k_max", "must be at least 1"));
        }
        if let Some(t) = self.anneal.initial_temperature {
            positive("anneal.initial_temperature", t)?;
        }
        if let Some(a) = self.anneal.cooling_rate {
            if !(a > 0.0 && a < 1.0) {
                return Err(invalid("anneal.cooling_rate", "must lie in (0, 1)"));
            }
        }
        positive("region.doppler_fraction", self.region.doppler_fraction)?;
        if let Some(b) = self.region.doppler_bound_hz {
            positive("region.doppler_bound_hz", b)?;
        }
        self.objective.validate().map_err(|e| invalid("objective", e))?;
        for (field, g) in [("sweep.doppler_hz", &self.sweep.doppler_hz), ("sweep.angle_deg", &self.sweep.angle_deg)] {
            if g.count < 2 || !(g.start < g.stop) {
                return Err(invalid(field, "need count >= 2 and start < stop"));
            }
        }
        self.reference().map_err(|e| invalid("sweep.reference", e))?;
        positive("crlb.amplitude", self.crlb.amplitude)?;
        positive("crlb.noise_sigma", self.crlb.noise_sigma)?;
        if !(self.effective.threshold_db <= 0.0) {
            return Err(invalid("effective.threshold_db", "must be <= 0"));
        }
        check_file("compare.sequential_file", &self.compare.sequential_file)?;
        check_file("compare.random_file", &self.compare.random_file)?;
        check_file("compare.hybrid_file", &self.compare.hybrid_file)?;
        if self.sequence.scheme == Scheme::Hybrid && matches!(self.array, ArraySpec::Ula { .. }) {
            return Err(invalid(
                "sequence.scheme",
                "hybrid switching needs an array with a subset partition (octagonal)",
            ));
        }
        Ok(())
    }

    pub fn build_array(&self) -> Result<ArrayModel, CliError> {
        match &self.array {
            ArraySpec::Octagonal {
                panels,
                rows,
                cols,
                spacing_wavelengths,
                radius_m,
                carrier_hz,
                patch_exponent,
                pattern_file,
            } => {
                let wavelength = wavelength_from_carrier(*carrier_hz);
                let ring = PanelRing {
                    panels: *panels,
                    rows: *rows,
                    cols: *cols,
                    spacing: spacing_wavelengths * wavelength,
                    radius: *radius_m,
                    wavelength,
                    patch_exponent: *patch_exponent,
                };
                let array = make_octagonal(&ring).map_err(|e| invalid("array", e))?;
                match pattern_file {
                    Some(path) => {
                        let table = load_pattern_csv(path).map_err(|e| invalid("array.pattern_file", e))?;
                        let patterns = table
                            .patterns(array.len(), Polarization::V)
                            .map_err(|e| invalid("array.pattern_file", e))?;
                        array.with_patterns(patterns).map_err(|e| invalid("array.pattern_file", e))
                    }
                    None => Ok(array),
                }
            }
            ArraySpec::Ula {
                elements,
                spacing_wavelengths,
                carrier_hz,
            } => {
                let wavelength = wavelength_from_carrier(*carrier_hz);
                make_ula(*elements, spacing_wavelengths * wavelength, wavelength).map_err(|e| invalid("array", e))
            }
        }
    }

    /// ULA element spacing in meters.
    pub fn ula_spacing(&self) -> Option<f64> {
        match &self.array {
            ArraySpec::Ula {
                spacing_wavelengths,
                carrier_hz,
                ..
            } => Some(spacing_wavelengths * wavelength_from_carrier(*carrier_hz)),
            ArraySpec::Octagonal { .. } => None,
        }
    }

    pub fn region(&self) -> Result<Region, CliError> {
        match self.region.doppler_bound_hz {
            Some(b) => Region::new(b),
            None => Region::from_slot_period(self.sequence.delta_t_s, self.region.doppler_fraction),
        }
        .map_err(|e| invalid("region", e))
    }

    pub fn reference(&self) -> swseq_core::Result<ReceiveParams> {
        let r = &self.sweep.reference;
        Ok(ReceiveParams::new(
            Direction::from_degrees(r.azimuth_deg, r.elevation_deg)?,
            r.doppler_hz,
        ))
    }

    pub fn doppler_grid(&self) -> Vec<f64> {
        self.sweep.doppler_hz.values()
    }

    pub fn angle_grid(&self) -> Vec<f64> {
        self.sweep.angle_deg.values().into_iter().map(f64::to_radians).collect()
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {v}")))
    }
}
