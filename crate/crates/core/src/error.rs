use thiserror::Error;

#[derive(Debug, Error)]
pub enum CraftError {
    #[error("empty part geometry")]
    EmptyGeometry,
    #[error("zero-area geometry cannot be sampled")]
    ZeroArea,
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("degenerate bounding box {0:?}")]
    DegenerateBox([f64; 3]),
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("resolution mismatch: {0}x{1} vs {2}x{3}")]
    ResolutionMismatch(usize, usize, usize, usize),
    #[error("invalid label map: {0}")]
    InvalidLabelMap(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("no results to select from")]
    EmptyResults,
    #[error("no parts retained")]
    NoPartsRetained,
    #[error("anchor shape unavailable: no {0} in scene")]
    AnchorShapeUnavailable(String),
    #[error("insufficient scene objects: no {shape} left for part {part_id} ({label})")]
    InsufficientObjects {
        part_id: usize,
        label: String,
        shape: String,
    },
    #[error("empty model")]
    EmptyModel,
    #[error("no feasible combination")]
    NoFeasibleCombination,
    #[error("object class undeterminable")]
    ObjectClassUndeterminable,
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CraftError> = std::result::Result<T, E>;
