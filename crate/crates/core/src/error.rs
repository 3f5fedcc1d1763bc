use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the feature extraction library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("image too small: {width}x{height}, need at least {min}x{min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("block size {block} does not fit a {width}x{height} image")]
    BlockTooLarge { block: usize, width: usize, height: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected a {expected}-channel image, got {actual} channel(s)")]
    ChannelMismatch { expected: usize, actual: usize },

    #[error("degenerate blue channel (mean {0:e})")]
    DegenerateBlueChannel(f64),

    #[error("alignment failed: correlation peak {0:.4} below threshold")]
    AlignmentFailed(f64),

    #[error("empty overlap after applying shift ({0}, {1})")]
    EmptyOverlap(i32, i32),

    #[error("no valid blocks in orientation map")]
    NoValidBlocks,

    #[error("need at least {needed} valid blocks, found {found}")]
    TooFewValidBlocks { needed: usize, found: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate separation: zero variance in both classes with distinct means")]
    DegenerateSeparation,

    #[error("empty class: {0}")]
    EmptyClass(String),

    #[error("descriptor configuration mismatch")]
    ConfigMismatch,

    #[error("scatter matrix singular even with ridge {0:e}")]
    Singular(f64),

    #[error("unrecognized model file")]
    UnrecognizedModel,

    #[error("malformed model file: {0}")]
    MalformedModel(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed manifest at line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("png decode: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("png encode: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
