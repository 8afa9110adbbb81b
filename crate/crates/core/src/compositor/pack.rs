use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rotate::rotate_fragment;
use super::CompositeSpec;
use crate::error::{Error, Result};
use crate::fragmenter::Fragment;
use crate::raster::Raster;
use crate::rng::RngStream;

/// Where a fragment lands: the top-left corner of its rotated raster on the
/// canvas, and the rotation applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub fragment_id: u32,
    pub x: u32,
    pub y: u32,
    pub theta_deg: f64,
}

/// Horizontal runs `(row, start, end)` of opaque pixels.
pub(crate) fn opaque_runs(r: &Raster) -> Vec<(u32, u32, u32)> {
    let mut runs = Vec::new();
    for y in 0..r.height {
        let row = r.row(y);
        let mut x = 0usize;
        while x < row.len() {
            if row[x][3] == 0 {
                x += 1;
                continue;
            }
            let start = x;
            while x < row.len() && row[x][3] != 0 {
                x += 1;
            }
            runs.push((y, start as u32, x as u32));
        }
    }
    runs
}

/// One bit per canvas pixel.
struct Occupancy {
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Occupancy {
    fn new(size: u32) -> Self {
        let words_per_row = (size as usize).div_ceil(64);
        Occupancy {
            words_per_row,
            bits: vec![0; words_per_row * size as usize],
        }
    }

    /// Word index range and edge masks covering columns `[a, b)`.
    fn span(a: u32, b: u32) -> (usize, usize, u64, u64) {
        let (wa, wb) = ((a / 64) as usize, ((b - 1) / 64) as usize);
        let first = !0u64 << (a % 64);
        let last = !0u64 >> (63 - (b - 1) % 64);
        (wa, wb, first, last)
    }

    fn any(&self, y: u32, a: u32, b: u32) -> bool {
        if a >= b {
            return false;
        }
        let row = &self.bits[y as usize * self.words_per_row..][..self.words_per_row];
        let (wa, wb, first, last) = Self::span(a, b);
        if wa == wb {
            return row[wa] & first & last != 0;
        }
        row[wa] & first != 0 || row[wa + 1..wb].iter().any(|w| *w != 0) || row[wb] & last != 0
    }

    fn fill(&mut self, y: u32, a: u32, b: u32) {
        if a >= b {
            return;
        }
        let row = &mut self.bits[y as usize * self.words_per_row..][..self.words_per_row];
        let (wa, wb, first, last) = Self::span(a, b);
        if wa == wb {
            row[wa] |= first & last;
            return;
        }
        row[wa] |= first;
        for w in &mut row[wa + 1..wb] {
            *w = !0;
        }
        row[wb] |= last;
    }
}

/// Greedy largest-first random packing. Returns each placement with the
/// rotated fragment it refers to, in packing order.
///
/// Every trial draws an angle uniformly from `[0, 360)`, then a position
/// that keeps the rotated raster on the canvas. A trial succeeds when no
/// opaque pixel lies within `min_gap_px` (Chebyshev distance) of an opaque
/// pixel already placed; with a gap of 0 this is plain non-overlap.
pub fn pack_rotated(
    frags: &[Fragment],
    spec: &CompositeSpec,
    rng: &mut RngStream,
) -> Result<Vec<(Placement, Fragment)>> {
    spec.validate()?;
    let mut order: Vec<&Fragment> = frags.iter().collect();
    order.sort_by(|a, b| {
        b.opaque_count
            .cmp(&a.opaque_count)
            .then(a.fragment_id.cmp(&b.fragment_id))
    });

    let capacity = u64::from(spec.canvas_px) * u64::from(spec.canvas_px);
    let mut total = 0u64;
    for f in &order {
        total += f.opaque_count;
        if total > capacity {
            return Err(Error::PackingOverflow {
                fragment_id: f.fragment_id,
                attempts: 0,
            });
        }
    }

    let size = spec.canvas_px;
    let gap = spec.min_gap_px;
    let mut occ = Occupancy::new(size);
    let mut placed = Vec::with_capacity(order.len());
    for f in order {
        let mut done = None;
        for _ in 0..spec.max_place_attempts {
            let theta = rng.unit() * 360.0;
            let rot = rotate_fragment(f, theta);
            let (w, h) = (rot.raster.width, rot.raster.height);
            if w > size || h > size {
                continue;
            }
            let x = rng.below(size - w + 1);
            let y = rng.below(size - h + 1);
            let runs = opaque_runs(&rot.raster);
            if runs.iter().any(|&(r, a, b)| occ.any(y + r, x + a, x + b)) {
                continue;
            }
            for &(r, a, b) in &runs {
                let (yr, xa, xb) = (y + r, x + a, x + b);
                let lo = xa.saturating_sub(gap);
                let hi = (xb + gap).min(size);
                for yy in yr.saturating_sub(gap)..=(yr + gap).min(size - 1) {
                    occ.fill(yy, lo, hi);
                }
            }
            done = Some((
                Placement {
                    fragment_id: f.fragment_id,
                    x,
                    y,
                    theta_deg: theta,
                },
                rot,
            ));
            break;
        }
        match done {
            Some(p) => placed.push(p),
            None => {
                return Err(Error::PackingOverflow {
                    fragment_id: f.fragment_id,
                    attempts: spec.max_place_attempts,
                })
            }
        }
    }
    Ok(placed)
}

/// Placements only; see [`pack_rotated`].
pub fn pack_fragments(frags: &[Fragment], spec: &CompositeSpec, rng: &mut RngStream) -> Result<Vec<Placement>> {
    Ok(pack_rotated(frags, spec, rng)?.into_iter().map(|(p, _)| p).collect())
}
