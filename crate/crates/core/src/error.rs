use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("polygon is not simple")]
    NonSimpleInput,
    #[error("hole is not strictly inside the outer polygon")]
    HoleNotInside,
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("2-opt did not untangle within {0} moves")]
    IterationLimit(usize),
    #[error("could not construct a {0} polygon after {1} attempts")]
    ClassConstructionFailed(&'static str, usize),
    #[error("augmentation copy {copy} not found within {attempts} attempts")]
    AugmentExhausted { copy: usize, attempts: usize },
    #[error("bounding box has zero width or height")]
    DegenerateExtent,
    #[error("grid has no zero crossing")]
    NoZeroCrossing,
    #[error("polyline has {got} points, need at least {need}")]
    TooFewPoints { got: usize, need: usize },
    #[error("diagonal ({0}, {1}) is not in the triangulation")]
    UnknownDiagonal(usize, usize),
    #[error("diagonal ({0}, {1}) does not bound a convex quadrilateral")]
    NotFlippable(usize, usize),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("no candidate polygon is valid")]
    NoValidCandidate,
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("diameter bucket {diameter} holds {available} polygons, reserve needs {needed}")]
    InsufficientPool {
        diameter: usize,
        available: usize,
        needed: usize,
    },
    #[error("malformed data: {0}")]
    Format(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
