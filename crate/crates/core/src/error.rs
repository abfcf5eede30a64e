use std::io;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength grid mismatch: {0}")]
    GridMismatch(String),

    #[error("chromaticity undefined for a zero color (X + Y + Z = 0)")]
    UndefinedChromaticity,

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("chromaticity ({x:.6}, {y:.6}) is outside the basis gamut")]
    OutOfGamut { x: f64, y: f64 },

    /// The target lies on the gamut boundary: its class is the single spectrum
    /// supported on the two bases of the edge.
    #[error("chromaticity ({x:.6}, {y:.6}) lies on the gamut boundary between bases {first} and {second}")]
    BoundarySingular {
        x: f64,
        y: f64,
        first: usize,
        second: usize,
    },

    #[error("degenerate triangle (|det| = {det:e})")]
    DegenerateTriangle { det: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("infinite extinction: transmittance is zero at {wavelength_nm} nm")]
    InfiniteExtinction { wavelength_nm: f64 },

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("no grid point satisfies the smoothness constraint")]
    ConstraintInfeasible,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    /// True for errors caused by a target that the basis cannot reproduce.
    pub fn is_gamut_error(&self) -> bool {
        matches!(
            self,
            Error::OutOfGamut { .. }
                | Error::BoundarySingular { .. }
                | Error::Infeasible(_)
                | Error::ConstraintInfeasible
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
