use std::path::PathBuf;

/// Errors produced anywhere in the shape pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape has no foreground pixels")]
    EmptyShape,
    #[error("failed to decode image: {0}")]
    Decode(String),
    #[error("skeleton degenerated: {0}")]
    DegenerateSkeleton(&'static str),
    #[error("root point has no incident branches")]
    NoCandidate,
    #[error("zero-length vector in spatial value")]
    DegenerateVector,
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero denominator in {0} distance")]
    ZeroDenominator(&'static str),
    #[error("correspondence is empty")]
    EmptyCorrespondence,
    #[error("no shapes to generalize")]
    EmptyInput,
    #[error("point pairs are degenerate: {0}")]
    DegeneratePairs(&'static str),
    #[error("need at least 2 matched endpoint pairs, found {0}")]
    InsufficientCorrespondence(usize),
    #[error("dataset at {0} contains no loadable shapes")]
    EmptyDataset(PathBuf),
    #[error("gallery is empty")]
    EmptyGallery,
    #[error("no prototypes to classify against")]
    NoPrototypes,
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
