use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::pack::{opaque_runs, Placement};
use super::rotate::rotate_fragment;
use super::CompositeSpec;
use crate::error::{Error, Result};
use crate::fragmenter::Fragment;
use crate::raster::Raster;

/// Shadow offset in pixels, down and to the right.
pub fn shadow_offset(spec: &CompositeSpec) -> u32 {
    libm::round(spec.shadow_thickness * f64::from(spec.canvas_px)) as u32
}

/// One box-blur pass of radius `r` along rows (`stride = 1`) or columns.
fn box_pass(src: &[u32], dst: &mut [u32], len: usize, count: usize, stride: usize, step: usize, r: usize) {
    let div = (2 * r + 1) as u32;
    for line in 0..count {
        let base = line * step;
        let at = |i: usize| src[base + i * stride];
        let mut sum: u32 = (0..=r.min(len - 1)).map(at).sum();
        for i in 0..len {
            dst[base + i * stride] = (sum + div / 2) / div;
            if i + r + 1 < len {
                sum += at(i + r + 1);
            }
            if i >= r {
                sum -= at(i - r);
            }
        }
    }
}

/// Coverage mask of `r`, padded by `pad` on every side and box-blurred twice.
fn blurred_mask(r: &Raster, pad: usize, radius: usize) -> (usize, usize, Vec<u32>) {
    let (w, h) = (r.width as usize + 2 * pad, r.height as usize + 2 * pad);
    let mut mask = vec![0u32; w * h];
    for (y, a, b) in opaque_runs(r) {
        let row = (y as usize + pad) * w;
        for v in &mut mask[row + a as usize + pad..row + b as usize + pad] {
            *v = 255;
        }
    }
    if radius > 0 {
        let mut tmp = vec![0u32; w * h];
        for _ in 0..2 {
            box_pass(&mask, &mut tmp, w, h, 1, w, radius);
            box_pass(&tmp, &mut mask, h, w, w, 1, radius);
        }
    }
    (w, h, mask)
}

/// Draw already-rotated fragments at their placements, in order, each after
/// its own soft shadow.
pub fn render_placed(placed: &[(Placement, Fragment)], spec: &CompositeSpec) -> Result<Raster> {
    spec.validate()?;
    let size = spec.canvas_px;
    let [br, bg, bb] = spec.background_rgb;
    let mut canvas = Raster::filled(size, size, [br, bg, bb, 255]);
    let offset = shadow_offset(spec) as i64;
    let radius = libm::round(spec.shadow_blur_px) as usize;
    for (p, f) in placed {
        let r = &f.raster;
        if u64::from(p.x) + u64::from(r.width) > u64::from(size)
            || u64::from(p.y) + u64::from(r.height) > u64::from(size)
        {
            return Err(Error::invalid("placement puts a fragment outside the canvas"));
        }
        if spec.shadow_opacity > 0.0 {
            let pad = 2 * radius;
            let (mw, mh, mask) = blurred_mask(r, pad, radius);
            let ox = i64::from(p.x) + offset - pad as i64;
            let oy = i64::from(p.y) + offset - pad as i64;
            for my in 0..mh {
                let cy = oy + my as i64;
                if cy < 0 || cy >= i64::from(size) {
                    continue;
                }
                for mx in 0..mw {
                    let m = mask[my * mw + mx];
                    let cx = ox + mx as i64;
                    if m == 0 || cx < 0 || cx >= i64::from(size) {
                        continue;
                    }
                    let keep = 1.0 - spec.shadow_opacity * f64::from(m) / 255.0;
                    let i = canvas.index(cx as u32, cy as u32);
                    let px = &mut canvas.pixels[i];
                    for c in &mut px[..3] {
                        *c = libm::floor(f64::from(*c) * keep + 0.5) as u8;
                    }
                }
            }
        }
        for (y, a, b) in opaque_runs(r) {
            let src = &r.row(y)[a as usize..b as usize];
            let start = canvas.index(p.x + a, p.y + y);
            for (dst, s) in canvas.pixels[start..start + src.len()].iter_mut().zip(src) {
                *dst = [s[0], s[1], s[2], 255];
            }
        }
    }
    Ok(canvas)
}

/// Composite unrotated fragments: each is rotated by its placement's angle
/// and drawn in placement order.
pub fn render_composite(frags: &[Fragment], placements: &[Placement], spec: &CompositeSpec) -> Result<Raster> {
    if frags.len() != placements.len() {
        return Err(Error::invalid("placements must pair one-to-one with fragments"));
    }
    let by_id: BTreeMap<u32, &Fragment> = frags.iter().map(|f| (f.fragment_id, f)).collect();
    if by_id.len() != frags.len() {
        return Err(Error::invalid("duplicate fragment id"));
    }
    let mut seen = BTreeMap::new();
    let mut placed = Vec::with_capacity(frags.len());
    for p in placements {
        let f = by_id
            .get(&p.fragment_id)
            .ok_or_else(|| Error::invalid(alloc::format!("no fragment with id {}", p.fragment_id)))?;
        if seen.insert(p.fragment_id, ()).is_some() {
            return Err(Error::invalid(alloc::format!(
                "fragment {} placed twice",
                p.fragment_id
            )));
        }
        placed.push((p.clone(), rotate_fragment(f, p.theta_deg)));
    }
    render_placed(&placed, spec)
}
