use alloc::string::String;

use crate::metrics::table::TableParseError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("seed sampling degenerate: could not place {n} seeds {min_separation:.2}px apart on {width}x{height} after {rounds} rejections")]
    DegenerateSeeds {
        n: u32,
        width: u32,
        height: u32,
        min_separation: f64,
        rounds: u32,
    },

    #[error("packing overflow: fragment {fragment_id} could not be placed after {attempts} attempts")]
    PackingOverflow { fragment_id: u32, attempts: u32 },

    #[error("font family `{family}` could not be resolved")]
    FontResolution { family: String },

    #[error(transparent)]
    TableParse(#[from] TableParseError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
