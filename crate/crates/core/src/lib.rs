//! Pure building blocks for shredded-document benchmarks.
//!
//! Everything in this crate is deterministic and free of IO: text layout and
//! page rasterization, Voronoi fragmentation, fragment deformation, packing and
//! compositing, the nonsense-text control generator, and every scoring metric
//! (NED, BLEU, ROUGE-L, TEDS, CodeBLEU). File formats, fonts loaded from disk,
//! HTTP and the command line live in the `shredforge` crate.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod compositor;
pub mod control;
pub mod corpus;
pub mod error;
pub mod font;
pub mod fragmenter;
pub mod kappa;
pub mod layout;
pub mod metrics;
pub mod pipeline;
pub mod postprocess;
pub mod raster;
pub mod rasterizer;
pub mod report;
pub mod rng;

pub use crate::corpus::{Category, CodeLanguage, LengthFilterRules, SourceDocument};
pub use crate::error::{Error, Result};
pub use crate::raster::{BBox, Raster, Rgba};
pub use crate::rng::RngStream;
