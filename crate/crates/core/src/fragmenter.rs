//! Voronoi fragmentation of a page.
//!
//! Seeds and pixels are compared at pixel centers, so every distance is an
//! exact integer and ties resolve to the smallest seed index.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BBox, Raster};
use crate::rasterizer::PageRaster;
use crate::rng::RngStream;

/// Rejected candidates allowed across one seed set before giving up.
pub const MAX_SEED_REJECTIONS: u32 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub seeds: Vec<Point>,
}

impl SeedSet {
    pub fn n(&self) -> usize {
        self.seeds.len()
    }
}

fn dist2(a: Point, b: Point) -> u64 {
    let dx = i64::from(a.x) - i64::from(b.x);
    let dy = i64::from(a.y) - i64::from(b.y);
    (dx * dx + dy * dy) as u64
}

/// Sample `n` distinct seeds uniformly, rejecting any candidate closer than
/// `min(width, height) / (4n)` to a seed already drawn.
pub fn sample_seeds(width: u32, height: u32, n: u32, rng: &mut RngStream) -> Result<SeedSet> {
    if n == 0 {
        return Err(Error::invalid("seed count must be at least 1"));
    }
    if u64::from(width) * u64::from(height) < u64::from(n) {
        return Err(Error::invalid("page has fewer pixels than requested seeds"));
    }
    // d >= m / (4n)  <=>  16 n^2 d^2 >= m^2, all in integers.
    let m = u64::from(width.min(height));
    let scale = 16 * u64::from(n) * u64::from(n);
    let mut seeds: Vec<Point> = Vec::with_capacity(n as usize);
    let mut rejections = 0u32;
    while seeds.len() < n as usize {
        let p = Point {
            x: rng.below(width),
            y: rng.below(height),
        };
        let ok = seeds.iter().all(|s| {
            let d = dist2(*s, p);
            d > 0 && scale * d >= m * m
        });
        if ok {
            seeds.push(p);
        } else {
            rejections += 1;
            if rejections >= MAX_SEED_REJECTIONS {
                return Err(Error::DegenerateSeeds {
                    n,
                    width,
                    height,
                    min_separation: m as f64 / (4.0 * f64::from(n)),
                    rounds: rejections,
                });
            }
        }
    }
    Ok(SeedSet { seeds })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMap {
    pub width: u32,
    pub height: u32,
    pub n: u32,
    /// Row-major seed index per pixel.
    pub cell_index: Vec<u32>,
}

impl CellMap {
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.cell_index[y as usize * self.width as usize + x as usize]
    }
}

/// Index of the nearest seed to pixel `(x, y)`, smallest index on ties.
pub fn nearest_seed(seeds: &[Point], x: u32, y: u32) -> u32 {
    let p = Point { x, y };
    let mut best = 0usize;
    let mut best_d = u64::MAX;
    for (i, s) in seeds.iter().enumerate() {
        let d = dist2(*s, p);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best as u32
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

/// Assign every pixel to its nearest seed.
///
/// Each row is swept left to right. While seed `i` wins, seed `j` can only
/// take over if it lies further right, and the first column where it does is
/// found in closed form, so the row is filled run by run with exact integer
/// arithmetic. The result equals [`nearest_seed`] at every pixel.
pub fn assign_cells(width: u32, height: u32, seeds: &SeedSet) -> Result<CellMap> {
    let pts = &seeds.seeds;
    if pts.is_empty() {
        return Err(Error::invalid("seed set is empty"));
    }
    if pts.iter().any(|p| p.x >= width || p.y >= height) {
        return Err(Error::invalid("seed outside page bounds"));
    }
    let w = width as usize;
    let mut cell_index = vec![0u32; w * height as usize];
    // Per-seed constant for the current row: sx^2 + dy^2.
    let mut k = vec![0i64; pts.len()];
    for y in 0..height {
        for (kj, p) in k.iter_mut().zip(pts) {
            let dy = i64::from(y) - i64::from(p.y);
            *kj = i64::from(p.x) * i64::from(p.x) + dy * dy;
        }
        let row = &mut cell_index[y as usize * w..(y as usize + 1) * w];
        let mut x = 0i64;
        let mut win = nearest_seed(pts, 0, y) as usize;
        while x < i64::from(width) {
            let sxi = i64::from(pts[win].x);
            let mut next = i64::from(width);
            for (j, p) in pts.iter().enumerate() {
                let b = i64::from(p.x) - sxi;
                if b <= 0 {
                    continue;
                }
                // j beats i at column x iff 2bx > a (or 2bx >= a when j < i).
                let a = k[j] - k[win];
                let t = if j < win {
                    ceil_div(a, 2 * b)
                } else {
                    floor_div(a, 2 * b) + 1
                };
                next = next.min(t);
            }
            let end = next.max(x + 1).min(i64::from(width));
            for slot in &mut row[x as usize..end as usize] {
                *slot = win as u32;
            }
            x = end;
            if x < i64::from(width) {
                win = nearest_seed(pts, x as u32, y) as usize;
            }
        }
    }
    Ok(CellMap {
        width,
        height,
        n: pts.len() as u32,
        cell_index,
    })
}

/// One piece of a shredded page. `raster` covers `bbox`; pixels outside the
/// piece have alpha 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    pub fragment_id: u32,
    pub bbox: BBox,
    pub raster: Raster,
    pub opaque_count: u64,
    pub seed: Point,
}

/// Cut the page into one fragment per cell, in cell index order.
pub fn extract_fragments(page: &PageRaster, cells: &CellMap, seeds: &SeedSet) -> Result<Vec<Fragment>> {
    let r = &page.raster;
    if r.width != cells.width || r.height != cells.height {
        return Err(Error::invalid("cell map dimensions do not match the page"));
    }
    if seeds.n() != cells.n as usize {
        return Err(Error::invalid("seed set does not match the cell map"));
    }
    let n = cells.n as usize;
    let mut boxes = vec![(u32::MAX, u32::MAX, 0u32, 0u32); n];
    let mut counts = vec![0u64; n];
    for y in 0..cells.height {
        for x in 0..cells.width {
            let c = cells.get(x, y) as usize;
            let b = &mut boxes[c];
            b.0 = b.0.min(x);
            b.1 = b.1.min(y);
            b.2 = b.2.max(x + 1);
            b.3 = b.3.max(y + 1);
            counts[c] += 1;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (c, &(x0, y0, x1, y1)) in boxes.iter().enumerate() {
        if counts[c] == 0 {
            continue;
        }
        let mut fr = Raster::transparent(x1 - x0, y1 - y0);
        for y in y0..y1 {
            for x in x0..x1 {
                if cells.get(x, y) as usize == c {
                    let mut px = r.get(x, y);
                    px[3] = 255;
                    fr.set(x - x0, y - y0, px);
                }
            }
        }
        out.push(Fragment {
            fragment_id: c as u32,
            bbox: BBox {
                x0: x0 as i32,
                y0: y0 as i32,
                x1: x1 as i32,
                y1: y1 as i32,
            },
            raster: fr,
            opaque_count: counts[c],
            seed: seeds.seeds[c],
        });
    }
    Ok(out)
}
