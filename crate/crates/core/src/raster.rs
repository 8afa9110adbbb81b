//! RGBA pixel buffers.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub type Rgba = [u8; 4];

/// Axis-aligned box with exclusive upper bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl BBox {
    pub fn width(&self) -> u32 {
        (self.x1 - self.x0).max(0) as u32
    }

    pub fn height(&self) -> u32 {
        (self.y1 - self.y0).max(0) as u32
    }
}

/// Row-major RGBA image.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<Rgba>,
}

impl core::fmt::Debug for Raster {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        Raster {
            width,
            height,
            pixels: vec![color; width as usize * height as usize],
        }
    }

    pub fn transparent(width: u32, height: u32) -> Self {
        Self::filled(width, height, [0, 0, 0, 0])
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgba {
        self.pixels[self.index(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, px: Rgba) {
        let i = self.index(x, y);
        self.pixels[i] = px;
    }

    pub fn row(&self, y: u32) -> &[Rgba] {
        let w = self.width as usize;
        &self.pixels[y as usize * w..(y as usize + 1) * w]
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn opaque_count(&self) -> u64 {
        self.pixels.iter().filter(|p| p[3] != 0).count() as u64
    }

    /// Tight box around pixels with nonzero alpha, in local coordinates.
    pub fn opaque_bounds(&self) -> Option<BBox> {
        let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);
        for y in 0..self.height {
            for (x, px) in self.row(y).iter().enumerate() {
                if px[3] != 0 {
                    let x = x as u32;
                    x0 = x0.min(x);
                    x1 = x1.max(x + 1);
                    y0 = y0.min(y);
                    y1 = y1.max(y + 1);
                }
            }
        }
        (x0 != u32::MAX).then(|| BBox {
            x0: x0 as i32,
            y0: y0 as i32,
            x1: x1 as i32,
            y1: y1 as i32,
        })
    }

    /// Copy of the sub-rectangle `b` (local coordinates, must lie inside).
    pub fn crop(&self, b: BBox) -> Raster {
        let (w, h) = (b.width(), b.height());
        let mut out = Vec::with_capacity(w as usize * h as usize);
        for y in b.y0..b.y1 {
            let row = self.row(y as u32);
            out.extend_from_slice(&row[b.x0 as usize..b.x1 as usize]);
        }
        Raster {
            width: w,
            height: h,
            pixels: out,
        }
    }

    /// Downscale so that the larger side equals `max_dim`, averaging source
    /// pixels by covered area. Images already within bounds are returned as is.
    pub fn fit_within(&self, max_dim: u32) -> Raster {
        let longest = self.width.max(self.height);
        if longest <= max_dim || max_dim == 0 {
            return self.clone();
        }
        let scale = f64::from(max_dim) / f64::from(longest);
        let tw = ((f64::from(self.width) * scale + 0.5) as u32).clamp(1, max_dim);
        let th = ((f64::from(self.height) * scale + 0.5) as u32).clamp(1, max_dim);
        self.area_resample(tw, th)
    }

    fn area_resample(&self, tw: u32, th: u32) -> Raster {
        let xw = box_weights(self.width, tw);
        let yw = box_weights(self.height, th);
        let mut out = Vec::with_capacity(tw as usize * th as usize);
        for ys in &yw {
            for xs in &xw {
                let mut acc = [0f64; 4];
                let mut total = 0f64;
                for &(sy, wy) in ys {
                    let row = self.row(sy);
                    for &(sx, wx) in xs {
                        let w = wx * wy;
                        let px = row[sx as usize];
                        for c in 0..4 {
                            acc[c] += w * f64::from(px[c]);
                        }
                        total += w;
                    }
                }
                let mut px = [0u8; 4];
                for c in 0..4 {
                    px[c] = (acc[c] / total + 0.5).clamp(0.0, 255.0) as u8;
                }
                out.push(px);
            }
        }
        Raster {
            width: tw,
            height: th,
            pixels: out,
        }
    }
}

/// For each destination index, the source indices it overlaps and the
/// overlap length.
fn box_weights(src: u32, dst: u32) -> Vec<Vec<(u32, f64)>> {
    let ratio = f64::from(src) / f64::from(dst);
    (0..dst)
        .map(|d| {
            let lo = f64::from(d) * ratio;
            let hi = f64::from(d + 1) * ratio;
            let first = lo as u32;
            let last = ((libm::ceil(hi) as u32).min(src)).max(first + 1);
            (first..last)
                .filter_map(|s| {
                    let a = lo.max(f64::from(s));
                    let b = hi.min(f64::from(s + 1));
                    (b > a).then_some((s, b - a))
                })
                .collect()
        })
        .collect()
}
