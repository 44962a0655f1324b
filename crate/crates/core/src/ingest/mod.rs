//! On-disk formats and epoch alignment.

mod epochs;
mod manifest;
mod recording;

pub use epochs::{epoch_align, EpochSlice};
pub use manifest::{score_answers, SessionManifest, FORMAT_VERSION};
pub use recording::{parse_recording, read_recording, render_recording, write_recording};

use std::path::PathBuf;

use thiserror::Error;

use crate::record::RecordError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("epoch alignment: {0}")]
    Alignment(String),
    #[error("scoring: {0}")]
    Scoring(String),
    #[error(transparent)]
    Record(#[from] RecordError),
}
