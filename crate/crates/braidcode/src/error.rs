use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Decoder stage that rejected a codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStep {
    PaletteSplit,
    GeneratorDecode,
    Remainder,
    BCompare,
    Crt,
    Range,
    Special,
    Screen,
}

impl fmt::Display for DecodeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DecodeStep::PaletteSplit => "palette split",
            DecodeStep::GeneratorDecode => "generator decode",
            DecodeStep::Remainder => "remainder scan",
            DecodeStep::BCompare => "offset comparison",
            DecodeStep::Crt => "crt",
            DecodeStep::Range => "range check",
            DecodeStep::Special => "special codeword",
            DecodeStep::Screen => "screen",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("tag {0:?} is outside the coding area")]
    OutOfCodingArea(Vec<usize>),

    #[error("point {point} is not in sub-grid {subgrid}")]
    NotInSubgrid { point: usize, subgrid: usize },

    #[error("{what}: {divisor} does not divide {value}")]
    Divisibility {
        what: &'static str,
        divisor: usize,
        value: usize,
    },

    #[error("palettes overlap on label {0:?}")]
    PaletteOverlap(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid parameters: {}", .0.join(", "))]
    InvalidParams(Vec<String>),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("not a codeword{}: {step}: {detail}", axis_note(.axis))]
    NotACodeword {
        axis: Option<usize>,
        step: DecodeStep,
        detail: String,
    },

    #[error("no tag has a codeword containing the given colors")]
    NotASubCodeword,

    #[error("coding area has {blocks} blocks, above the verification limit {limit}")]
    BoundExceeded { blocks: usize, limit: usize },

    #[error("json: {0}")]
    Json(String),
}

fn axis_note(axis: &Option<usize>) -> String {
    axis.map(|a| format!(" on axis {}", a + 1)).unwrap_or_default()
}

impl Error {
    pub(crate) fn not_codeword(step: DecodeStep, detail: impl Into<String>) -> Self {
        Error::NotACodeword {
            axis: None,
            step,
            detail: detail.into(),
        }
    }

    pub(crate) fn on_axis(self, axis: usize) -> Self {
        match self {
            Error::NotACodeword { step, detail, .. } => Error::NotACodeword {
                axis: Some(axis),
                step,
                detail,
            },
            other => other,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
