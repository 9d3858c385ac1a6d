//! Antenna switching sequences for switched-array channel sounders.
//!
//! Array models, sequential/random/hybrid switching, the ambiguity-function
//! objective, Cramér-Rao bounds for AOA and Doppler, and simulated annealing
//! over switching sequences.

pub mod ambiguity;
pub mod analysis;
pub mod anneal;
pub mod arrays;
pub mod crlb;
pub mod error;
pub mod io;
pub mod signal;
pub mod switching;

pub use ambiguity::{
    ambiguity_surface, ambiguity_value, linspace, objective, AmbiguitySurface, AngleAxis,
    ObjectiveConfig, ObjectiveEvaluator, ObjectiveValue, Region,
};
pub use analysis::{
    alias_scan, compare_schemes, effective_factor, half_power_width, peak_sidelobe, Along,
    CompareSettings, ComparisonReport, SchemeSet, SweepGrids, WidthReport,
};
pub use anneal::{anneal, AnnealConfig, AnnealTrace, IterationRecord, UpdateKind};
pub use arrays::{
    effective_elements, make_octagonal, make_ula, steering_vector, ArrayModel, Direction,
    ElementPattern, PanelRing, Polarization,
};
pub use crlb::{crlb_aoa, crlb_doppler, crlb_report, fim_numeric, CrlbReport, CrlbResult, ParamVector};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use signal::{basis, PathGain, ReceiveParams, StructuralParams};
pub use switching::{hybrid_init, random_init, sequential, Partition, SwitchingSequence};
