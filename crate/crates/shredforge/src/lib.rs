//! Std side of shredforge: corpus ingestion, fonts, dataset IO, the
//! evaluation harness, scoring, reports and the command line.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod fonts;
pub mod fsutil;
pub mod harness;
pub mod imageio;
pub mod ingest;
pub mod report;
pub mod scoring;

pub use crate::error::{Error, ErrorClass, Result};
pub use shredforge_core as core;
