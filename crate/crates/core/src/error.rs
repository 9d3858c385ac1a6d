use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("direction out of range: azimuth {azimuth} rad, elevation {elevation} rad")]
    InvalidDirection { azimuth: f64, elevation: f64 },

    #[error("pattern query outside tabulated grid for element {element}: azimuth {azimuth_deg} deg, elevation {elevation_deg} deg")]
    OutOfGrid {
        element: usize,
        azimuth_deg: f64,
        elevation_deg: f64,
    },

    #[error("invalid pattern table: {0}")]
    PatternTable(String),

    #[error("invalid switching sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("degenerate direction: every element gain vanishes at azimuth {azimuth} rad, elevation {elevation} rad")]
    DegenerateDirection { azimuth: f64, elevation: f64 },

    #[error("endfire singularity: sin(phi) = 0 at phi = {phi} rad, the AOA bound diverges")]
    EndfireSingularity { phi: f64 },

    #[error("unobservable Doppler: centered activation instants have zero norm")]
    UnobservableDoppler,

    #[error("singular Fisher information matrix; null-space direction {combination}")]
    SingularFim { combination: String },

    #[error("surface main lobe is clipped by the grid edge along the {axis} axis")]
    GridTooNarrow { axis: String },

    #[error("annealing aborted at iteration {iteration}: {reason}")]
    AnnealAborted {
        iteration: usize,
        reason: String,
        trace: Box<crate::anneal::AnnealTrace>,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
