//! Turning fragments into a single scattered composite: warp, rotate, pack
//! without overlap, then draw with soft drop shadows.

mod deform;
mod pack;
mod render;
mod rotate;

use serde::{Deserialize, Serialize};

pub use deform::{deform_fragment, DeformParams, DisplacementField};
pub use pack::{pack_fragments, pack_rotated, Placement};
pub use render::{render_composite, render_placed, shadow_offset};
pub use rotate::rotate_fragment;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompositeSpec {
    pub canvas_px: u32,
    pub background_rgb: [u8; 3],
    /// Shadow offset as a fraction of the canvas width.
    pub shadow_thickness: f64,
    pub shadow_blur_px: f64,
    pub shadow_opacity: f64,
    pub min_gap_px: u32,
    pub max_place_attempts: u32,
}

impl Default for CompositeSpec {
    fn default() -> Self {
        CompositeSpec {
            canvas_px: 4096,
            background_rgb: [236, 233, 226],
            shadow_thickness: 0.002,
            shadow_blur_px: 4.0,
            shadow_opacity: 0.35,
            min_gap_px: 8,
            max_place_attempts: 1000,
        }
    }
}

impl CompositeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.canvas_px == 0 {
            return Err(Error::invalid("canvas_px must be positive"));
        }
        if !(self.shadow_thickness >= 0.0 && self.shadow_thickness.is_finite()) {
            return Err(Error::invalid("shadow_thickness must be non-negative"));
        }
        if !(self.shadow_blur_px >= 0.0 && self.shadow_blur_px.is_finite()) {
            return Err(Error::invalid("shadow_blur_px must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.shadow_opacity) {
            return Err(Error::invalid("shadow_opacity must be in [0, 1]"));
        }
        if self.max_place_attempts == 0 {
            return Err(Error::invalid("max_place_attempts must be positive"));
        }
        Ok(())
    }
}
