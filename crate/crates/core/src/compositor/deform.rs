use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fragmenter::Fragment;
use crate::raster::{BBox, Raster};
use crate::rng::RngStream;

/// Two-tier displacement: a broad wave and a fine crumple. Scales count noise
/// periods across the fragment; strengths are fractions of the fragment's
/// shorter bbox side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeformParams {
    pub wave_scale: f64,
    pub wave_strength: f64,
    pub crumple_scale: f64,
    pub crumple_strength: f64,
    pub enabled: bool,
}

impl Default for DeformParams {
    fn default() -> Self {
        DeformParams {
            wave_scale: 1.5,
            wave_strength: 0.15,
            crumple_scale: 8.0,
            crumple_strength: 0.02,
            enabled: true,
        }
    }
}

impl DeformParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.wave_strength) || !ok(self.crumple_strength) {
            return Err(Error::invalid("deformation strengths must be non-negative"));
        }
        if !(ok(self.wave_scale) && self.wave_scale > 0.0 && ok(self.crumple_scale) && self.crumple_scale > 0.0) {
            return Err(Error::invalid("deformation scales must be positive"));
        }
        Ok(())
    }

    fn is_identity(&self) -> bool {
        !self.enabled || (self.wave_strength == 0.0 && self.crumple_strength == 0.0)
    }
}

const WAVE_COMPONENTS: usize = 3;
const CRUMPLE_OCTAVES: usize = 4;

/// One sinusoid `weight * sin(2pi (fu*u + fv*v) + phase)`.
#[derive(Clone, Copy, Debug)]
struct Wave {
    fu: f64,
    fv: f64,
    phase: f64,
    weight: f64,
}

#[derive(Clone, Debug)]
struct Tier {
    amp: f64,
    x: Vec<Wave>,
    y: Vec<Wave>,
}

/// Smooth periodic vector field over a fragment's normalized coordinates.
/// Each tier is bounded by its amplitude, so the whole field is bounded by
/// [`DisplacementField::bound`].
#[derive(Clone, Debug)]
pub struct DisplacementField {
    width: f64,
    height: f64,
    tiers: Vec<Tier>,
}

fn random_wave(freq: f64, weight: f64, rng: &mut RngStream) -> Wave {
    let dir = 2.0 * PI * rng.unit();
    Wave {
        fu: freq * libm::cos(dir),
        fv: freq * libm::sin(dir),
        phase: 2.0 * PI * rng.unit(),
        weight,
    }
}

impl DisplacementField {
    pub fn sample(params: &DeformParams, width: u32, height: u32, rng: &mut RngStream) -> Self {
        let extent = f64::from(width.min(height));
        let mut tiers = Vec::new();
        if params.wave_strength > 0.0 {
            let mut axis = || {
                (0..WAVE_COMPONENTS)
                    .map(|_| {
                        let f = params.wave_scale * (0.8 + 0.4 * rng.unit());
                        random_wave(f, 1.0 / WAVE_COMPONENTS as f64, rng)
                    })
                    .collect::<Vec<_>>()
            };
            let (x, y) = (axis(), axis());
            tiers.push(Tier {
                amp: params.wave_strength * extent,
                x,
                y,
            });
        }
        if params.crumple_strength > 0.0 {
            let norm: f64 = (0..CRUMPLE_OCTAVES).map(|o| libm::pow(0.5, o as f64)).sum();
            let mut axis = || {
                (0..CRUMPLE_OCTAVES)
                    .map(|o| {
                        let f = params.crumple_scale * libm::pow(2.0, o as f64);
                        random_wave(f, libm::pow(0.5, o as f64) / norm, rng)
                    })
                    .collect::<Vec<_>>()
            };
            let (x, y) = (axis(), axis());
            tiers.push(Tier {
                amp: params.crumple_strength * extent,
                x,
                y,
            });
        }
        DisplacementField {
            width: f64::from(width.max(1)),
            height: f64::from(height.max(1)),
            tiers,
        }
    }

    /// Upper bound on the displacement magnitude.
    pub fn bound(&self) -> f64 {
        self.tiers.iter().map(|t| t.amp).sum()
    }

    /// Displacement at a point in fragment-local pixel coordinates.
    pub fn at(&self, x: f64, y: f64) -> (f64, f64) {
        let (u, v) = (x / self.width, y / self.height);
        let sum = |ws: &[Wave]| -> f64 {
            ws.iter()
                .map(|w| w.weight * libm::sin(2.0 * PI * (w.fu * u + w.fv * v) + w.phase))
                .sum()
        };
        let (mut dx, mut dy) = (0.0, 0.0);
        for t in &self.tiers {
            dx += t.amp * sum(&t.x) / SQRT_2;
            dy += t.amp * sum(&t.y) / SQRT_2;
        }
        (dx, dy)
    }
}

/// Per-axis table of `sin` and `cos` of one wave's phase contribution along a
/// row or column, so that `sin(a + b)` costs two multiplies per pixel.
fn trig_table(freq: f64, extent: f64, offset: f64, len: u32) -> Vec<(f64, f64)> {
    (0..len)
        .map(|i| {
            let a = 2.0 * PI * freq * ((f64::from(i) + 0.5 - offset) / extent);
            (libm::sin(a), libm::cos(a))
        })
        .collect()
}

/// Warp a fragment by a random displacement field.
///
/// Output pixel `q` takes the colour and coverage of input pixel
/// `round(q - D(q))`, so every output pixel comes from an input pixel at most
/// `bound()` away. The bbox grows to hold the warped piece and is then cropped
/// tight.
pub fn deform_fragment(frag: &Fragment, params: &DeformParams, rng: &mut RngStream) -> Result<Fragment> {
    params.validate()?;
    if params.is_identity() || frag.raster.is_empty() {
        return Ok(frag.clone());
    }
    let (w, h) = (frag.raster.width, frag.raster.height);
    let field = DisplacementField::sample(params, w, h, rng);
    let pad = libm::ceil(field.bound()) as u32;
    let (ow, oh) = (w + 2 * pad, h + 2 * pad);
    let padf = f64::from(pad);

    // Separable evaluation: sin(2pi(fu u + fv v) + p) = sin(A) cos(B) + cos(A) sin(B)
    // with A along x and B = 2pi fv v + p along y.
    struct Term {
        scale: f64,
        cols: Vec<(f64, f64)>,
        rows: Vec<(f64, f64)>,
        axis: usize,
    }
    let mut terms = Vec::new();
    for t in &field.tiers {
        for (axis, waves) in [(0usize, &t.x), (1, &t.y)] {
            for wv in waves.iter() {
                let mut rows = trig_table(wv.fv, field.height, padf, oh);
                let (sp, cp) = (libm::sin(wv.phase), libm::cos(wv.phase));
                for r in &mut rows {
                    *r = (r.0 * cp + r.1 * sp, r.1 * cp - r.0 * sp);
                }
                terms.push(Term {
                    scale: t.amp * wv.weight / SQRT_2,
                    cols: trig_table(wv.fu, field.width, padf, ow),
                    rows,
                    axis,
                });
            }
        }
    }

    let mut out = Raster::transparent(ow, oh);
    for qy in 0..oh {
        for qx in 0..ow {
            let mut d = [0.0f64; 2];
            for t in &terms {
                let (sa, ca) = t.cols[qx as usize];
                let (sb, cb) = t.rows[qy as usize];
                d[t.axis] += t.scale * (sa * cb + ca * sb);
            }
            let sx = libm::floor(f64::from(qx) - padf - d[0] + 0.5);
            let sy = libm::floor(f64::from(qy) - padf - d[1] + 0.5);
            if sx < 0.0 || sy < 0.0 || sx >= f64::from(w) || sy >= f64::from(h) {
                continue;
            }
            let px = frag.raster.get(sx as u32, sy as u32);
            if px[3] != 0 {
                out.set(qx, qy, px);
            }
        }
    }
    let Some(b) = out.opaque_bounds() else {
        return Ok(frag.clone());
    };
    let raster = out.crop(b);
    let x0 = frag.bbox.x0 - pad as i32 + b.x0;
    let y0 = frag.bbox.y0 - pad as i32 + b.y0;
    Ok(Fragment {
        fragment_id: frag.fragment_id,
        bbox: BBox {
            x0,
            y0,
            x1: x0 + raster.width as i32,
            y1: y0 + raster.height as i32,
        },
        opaque_count: raster.opaque_count(),
        raster,
        seed: frag.seed,
    })
}
