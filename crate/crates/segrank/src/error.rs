//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the evaluation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed NIfTI-1 file {path}: {reason}")]
    Nifti { path: PathBuf, reason: String },

    #[error("unsupported NIfTI datatype code {code} in {path} (expected uint8, int16 or int32)")]
    UnsupportedDatatype { path: PathBuf, code: i16 },

    #[error("grid mismatch: dims {dims_a:?} / spacing {spacing_a:?} vs dims {dims_b:?} / spacing {spacing_b:?}")]
    GridMismatch {
        dims_a: [usize; 3],
        spacing_a: [f64; 3],
        dims_b: [usize; 3],
        spacing_b: [f64; 3],
    },

    #[error("unknown structure {0:?}")]
    UnknownStructure(String),

    #[error("volume labelled with scheme {volume:?} does not match manifest scheme {manifest:?}")]
    SchemeMismatch { volume: String, manifest: String },

    #[error("label value {label} is not part of label scheme {scheme:?}")]
    UnknownLabel { label: u16, scheme: String },

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("ground-truth mask is empty; surface distance is undefined")]
    EmptyGroundTruth,

    #[error("ground-truth interface is empty; split-boundary distance is undefined")]
    EmptyGroundTruthInterface,

    #[error("masks overlap in {0} voxels but must be disjoint")]
    OverlappingMasks(usize),

    #[error("results table is incomplete: missing value for case {case:?}, team {team:?}, structure {structure:?}, metric {metric}")]
    IncompleteTable {
        case: String,
        team: String,
        structure: String,
        metric: String,
    },

    #[error("unknown ranking scheme {0:?}")]
    UnknownScheme(String),

    #[error("rankings cover different team sets")]
    MismatchedTeams,

    #[error("need at least two teams to correlate rankings, got {0}")]
    TooFewTeams(usize),

    #[error("metric subset is empty")]
    EmptyMetricSubset,

    #[error("prediction set is empty")]
    EmptyPredictionSet,

    #[error("grade {grade} for case {case:?} is outside the grade domain")]
    GradeOutsideDomain { case: String, grade: i64 },

    #[error("duplicate case id {0:?}")]
    DuplicateCase(String),

    #[error("truth and prediction files cover different case sets (first difference: {0:?})")]
    CaseSetMismatch(String),

    #[error("phantom does not fit the grid: {0}")]
    PhantomDoesNotFit(String),

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("malformed record in {path}: {reason}")]
    MalformedRecord { path: PathBuf, reason: String },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn nifti(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Nifti {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn record(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::MalformedRecord {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
