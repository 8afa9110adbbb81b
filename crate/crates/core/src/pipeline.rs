//! One document in, one shredded composite out.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::compositor::{deform_fragment, pack_rotated, render_placed, CompositeSpec, DeformParams, Placement};
use crate::corpus::{Category, SourceDocument};
use crate::error::{Error, Result};
use crate::font::FontSet;
use crate::fragmenter::{assign_cells, extract_fragments, sample_seeds, Point};
use crate::raster::Raster;
use crate::rasterizer::{inject_paper_noise, render_page, PageStyle};
use crate::rng::{sample_seed, RngStream};

/// Granularities used by the benchmark.
pub const STANDARD_PIECES: [u32; 3] = [8, 12, 16];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShredConfig {
    pub pieces: Vec<u32>,
    pub categories: Vec<Category>,
    pub master_seed: u64,
    pub style: PageStyle,
    pub deform: DeformParams,
    pub composite: CompositeSpec,
    /// Permit piece counts outside [`STANDARD_PIECES`].
    pub allow_any_pieces: bool,
}

impl Default for ShredConfig {
    fn default() -> Self {
        ShredConfig {
            pieces: STANDARD_PIECES.to_vec(),
            categories: Category::ALL.to_vec(),
            master_seed: 0,
            style: PageStyle::default(),
            deform: DeformParams::default(),
            composite: CompositeSpec::default(),
            allow_any_pieces: false,
        }
    }
}

impl ShredConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pieces.is_empty() {
            return Err(Error::invalid("pieces must not be empty"));
        }
        if let Some(n) = self.pieces.iter().find(|n| **n == 0) {
            return Err(Error::invalid(format!("piece count {n} is not positive")));
        }
        if !self.allow_any_pieces {
            if let Some(n) = self.pieces.iter().find(|n| !STANDARD_PIECES.contains(n)) {
                return Err(Error::invalid(format!(
                    "piece count {n} is not one of 8, 12, 16 (set allow_any_pieces to override)"
                )));
            }
        }
        if self.categories.is_empty() {
            return Err(Error::invalid("categories must not be empty"));
        }
        self.style.validate()?;
        self.deform.validate()?;
        self.composite.validate()
    }
}

/// Provenance for one fragment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragmentRecord {
    pub fragment_id: u32,
    pub seed_point: Point,
    /// Pixel count of the cut piece before deformation.
    pub opaque_count: u64,
    pub placement: Placement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Shredded {
    pub rng_seed: u64,
    pub n: u32,
    /// Sorted by fragment id.
    pub fragments: Vec<FragmentRecord>,
    pub composite: Raster,
}

/// Render, cut, warp, pack and composite one document.
///
/// Every random draw comes from a single stream seeded with
/// `sample_seed(master_seed, doc.id, n)`, in pipeline order.
pub fn shred_document(doc: &SourceDocument, n: u32, config: &ShredConfig, fonts: &FontSet) -> Result<Shredded> {
    config.validate()?;
    if !config.pieces.contains(&n) {
        return Err(Error::Precondition(format!("piece count {n} is not configured")));
    }
    if !config.categories.contains(&doc.category) {
        return Err(Error::Precondition(format!(
            "document {} has category {} which is not configured",
            doc.id, doc.category
        )));
    }
    let rng_seed = sample_seed(config.master_seed, &doc.id, n);
    let mut rng = RngStream::from_seed(rng_seed);

    let page = render_page(doc, &config.style, fonts)?;
    let page = inject_paper_noise(page, config.style.noise_amplitude, &mut rng)?;
    let (w, h) = (page.width_px(), page.height_px());
    let seeds = sample_seeds(w, h, n, &mut rng)?;
    let cells = assign_cells(w, h, &seeds)?;
    let pieces = extract_fragments(&page, &cells, &seeds)?;
    let warped = pieces
        .iter()
        .map(|f| deform_fragment(f, &config.deform, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let placed = pack_rotated(&warped, &config.composite, &mut rng)?;
    let composite = render_placed(&placed, &config.composite)?;

    let mut fragments: Vec<FragmentRecord> = placed
        .into_iter()
        .map(|(placement, _)| {
            let src = &pieces[placement.fragment_id as usize];
            FragmentRecord {
                fragment_id: placement.fragment_id,
                seed_point: src.seed,
                opaque_count: src.opaque_count,
                placement,
            }
        })
        .collect();
    fragments.sort_by_key(|f| f.fragment_id);
    Ok(Shredded {
        rng_seed,
        n,
        fragments,
        composite,
    })
}
