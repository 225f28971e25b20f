use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported algebra dimension {0} (must be 1..=10)")]
    UnsupportedDimension(usize),

    #[error("field kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },

    #[error("grid spec mismatch between fields")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("DCViolation: component {component} has mean {mean:e} (threshold {threshold:e})")]
    DcViolation {
        component: usize,
        mean: f64,
        threshold: f64,
    },

    #[error("NyquistContent: component {component} carries Nyquist-plane energy {norm:e}")]
    NyquistContent { component: usize, norm: f64 },

    #[error("direct DFT oracle limited to {cap} lattice points, field has {points}")]
    SizeCapExceeded { cap: usize, points: usize },

    #[error("recipe `{recipe}` cannot produce a field of kind {kind}")]
    RecipeKindMismatch { recipe: String, kind: String },

    #[error("invalid recipe parameters: {0}")]
    InvalidRecipe(String),

    #[error("heights must be positive, got {0}")]
    NonPositiveHeight(f64),

    #[error("slab heights must be uniformly spaced")]
    NonUniformHeights,

    #[error("slab needs at least 3 heights, got {0}")]
    TooFewHeights(usize),

    #[error("slab heights must be strictly increasing")]
    UnsortedHeights,

    #[error("evaluation point lies on the boundary hyperplane")]
    PointOnBoundary,

    #[error("evaluation point is on the {found} side, expected the {expected} side")]
    SideMismatch { expected: String, found: String },

    #[error("probe height {height} is within one grid cell ({cell}) of the plane")]
    ProbeTooClose { height: f64, cell: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("MalformedHeader: {0}")]
    MalformedHeader(String),

    #[error("unsupported field file version {0}")]
    UnsupportedVersion(u32),

    #[error("ShapeOverflow: declared shape does not fit in memory")]
    ShapeOverflow,

    #[error("TruncatedPayload: expected {expected} payload bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
