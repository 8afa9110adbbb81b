use crate::fragmenter::Fragment;
use crate::raster::{BBox, Raster};

fn with_raster(frag: &Fragment, raster: Raster, cx: f64, cy: f64) -> Fragment {
    let x0 = libm::floor(cx - f64::from(raster.width) / 2.0 + 0.5) as i32;
    let y0 = libm::floor(cy - f64::from(raster.height) / 2.0 + 0.5) as i32;
    Fragment {
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
    }
}

/// Clockwise on screen (y grows downward) by a multiple of 90 degrees.
fn quarter_turn(src: &Raster, quarters: u32) -> Raster {
    let (w, h) = (src.width, src.height);
    let (ow, oh) = if quarters % 2 == 1 { (h, w) } else { (w, h) };
    let mut out = Raster::transparent(ow, oh);
    for y in 0..h {
        for x in 0..w {
            let (nx, ny) = match quarters {
                1 => (h - 1 - y, x),
                2 => (w - 1 - x, h - 1 - y),
                _ => (y, w - 1 - x),
            };
            out.set(nx, ny, src.get(x, y));
        }
    }
    out
}

/// Rotate a fragment clockwise by `theta_deg` about its bbox center.
///
/// Quarter turns permute pixels exactly. Other angles sample bilinearly:
/// colour is averaged over the opaque neighbours only, and an output pixel is
/// opaque when any neighbour with nonzero weight is. The result is cropped to
/// its opaque extent.
pub fn rotate_fragment(frag: &Fragment, theta_deg: f64) -> Fragment {
    let mut t = libm::fmod(theta_deg, 360.0);
    if t < 0.0 {
        t += 360.0;
    }
    if t >= 360.0 {
        t = 0.0;
    }
    let src = &frag.raster;
    let cx = f64::from(frag.bbox.x0 + frag.bbox.x1) / 2.0;
    let cy = f64::from(frag.bbox.y0 + frag.bbox.y1) / 2.0;
    if t == 0.0 || src.is_empty() {
        return frag.clone();
    }
    if t % 90.0 == 0.0 {
        return with_raster(frag, quarter_turn(src, (t / 90.0) as u32), cx, cy);
    }
    let rad = t * (core::f64::consts::PI / 180.0);
    let (s, c) = (libm::sin(rad), libm::cos(rad));
    let (w, h) = (f64::from(src.width), f64::from(src.height));
    let ow = libm::ceil(w * c.abs() + h * s.abs() - 1e-9) as u32;
    let oh = libm::ceil(w * s.abs() + h * c.abs() - 1e-9) as u32;
    let mut out = Raster::transparent(ow, oh);
    let (ocx, ocy) = (f64::from(ow) / 2.0, f64::from(oh) / 2.0);
    for oy in 0..oh {
        let dy = f64::from(oy) + 0.5 - ocy;
        for ox in 0..ow {
            let dx = f64::from(ox) + 0.5 - ocx;
            // Inverse rotation back into source pixel-index space.
            let sx = c * dx + s * dy + w / 2.0 - 0.5;
            let sy = -s * dx + c * dy + h / 2.0 - 0.5;
            let (fx0, fy0) = (libm::floor(sx), libm::floor(sy));
            if fx0 < -1.0 || fy0 < -1.0 || fx0 >= w || fy0 >= h {
                continue;
            }
            let (ax, ay) = (sx - fx0, sy - fy0);
            let (x0, y0) = (fx0 as i64, fy0 as i64);
            let mut acc = [0f64; 3];
            let mut total = 0f64;
            for (nx, ny, wt) in [
                (x0, y0, (1.0 - ax) * (1.0 - ay)),
                (x0 + 1, y0, ax * (1.0 - ay)),
                (x0, y0 + 1, (1.0 - ax) * ay),
                (x0 + 1, y0 + 1, ax * ay),
            ] {
                if wt <= 0.0 || nx < 0 || ny < 0 || nx >= i64::from(src.width) || ny >= i64::from(src.height) {
                    continue;
                }
                let px = src.get(nx as u32, ny as u32);
                if px[3] == 0 {
                    continue;
                }
                for k in 0..3 {
                    acc[k] += wt * f64::from(px[k]);
                }
                total += wt;
            }
            if total > 0.0 {
                let ch = |k: usize| libm::floor(acc[k] / total + 0.5).clamp(0.0, 255.0) as u8;
                out.set(ox, oy, [ch(0), ch(1), ch(2), 255]);
            }
        }
    }
    match out.opaque_bounds() {
        Some(b) => {
            let shift_x = f64::from(b.x0 + b.x1) / 2.0 - ocx;
            let shift_y = f64::from(b.y0 + b.y1) / 2.0 - ocy;
            with_raster(frag, out.crop(b), cx + shift_x, cy + shift_y)
        }
        None => frag.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragmenter::Point;
    use proptest::prelude::*;

    fn frag(raster: Raster) -> Fragment {
        Fragment {
            fragment_id: 0,
            bbox: BBox {
                x0: 10,
                y0: 20,
                x1: 10 + raster.width as i32,
                y1: 20 + raster.height as i32,
            },
            opaque_count: raster.opaque_count(),
            raster,
            seed: Point { x: 0, y: 0 },
        }
    }

    fn blob(w: u32, h: u32) -> Fragment {
        // Ellipse-ish convex piece with a colour gradient.
        let mut r = Raster::transparent(w, h);
        for y in 0..h {
            for x in 0..w {
                let u = (f64::from(x) + 0.5) / f64::from(w) * 2.0 - 1.0;
                let v = (f64::from(y) + 0.5) / f64::from(h) * 2.0 - 1.0;
                if u * u + v * v <= 1.0 || (x < w / 2 && y < h / 2) {
                    r.set(x, y, [x as u8, y as u8, 100, 255]);
                }
            }
        }
        frag(r)
    }

    #[test]
    fn zero_and_full_turn_are_identity() {
        let f = blob(37, 23);
        assert_eq!(rotate_fragment(&f, 0.0), f);
        assert_eq!(rotate_fragment(&f, 360.0), f);
        assert_eq!(rotate_fragment(&f, 720.0), rotate_fragment(&f, 0.0));
    }

    #[test]
    fn quarter_turn_swaps_dimensions() {
        let f = frag(Raster::filled(30, 12, [1, 2, 3, 255]));
        let r = rotate_fragment(&f, 90.0);
        assert_eq!((r.raster.width, r.raster.height), (12, 30));
        assert_eq!(r.opaque_count, 360);
        // Center preserved: (25, 26).
        assert_eq!((r.bbox.x0 + r.bbox.x1, r.bbox.y0 + r.bbox.y1), (50, 52));
    }

    #[test]
    fn four_quarter_turns_round_trip() {
        let f = blob(19, 31);
        let mut g = f.clone();
        for _ in 0..4 {
            g = rotate_fragment(&g, 90.0);
        }
        assert_eq!(g.raster, f.raster);
        let half = rotate_fragment(&rotate_fragment(&f, 90.0), 90.0);
        assert_eq!(half.raster, rotate_fragment(&f, 180.0).raster);
        assert_eq!(rotate_fragment(&f, -90.0).raster, rotate_fragment(&f, 270.0).raster);
    }

    #[test]
    fn quarter_turn_is_clockwise() {
        // Top-left moves to top-right, bottom-right to bottom-left.
        let mut full = Raster::transparent(3, 2);
        full.set(0, 0, [9, 9, 9, 255]);
        full.set(2, 1, [5, 5, 5, 255]);
        let out = rotate_fragment(&frag(full), 90.0);
        assert_eq!((out.raster.width, out.raster.height), (2, 3));
        assert_eq!(out.raster.get(1, 0), [9, 9, 9, 255]);
        assert_eq!(out.raster.get(0, 2), [5, 5, 5, 255]);
    }

    #[test]
    fn solid_colour_survives_rotation() {
        let f = frag(Raster::filled(50, 40, [200, 100, 50, 255]));
        let r = rotate_fragment(&f, 33.0);
        assert!(r.raster.pixels.iter().all(|p| p[3] == 0 || *p == [200, 100, 50, 255]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn area_within_two_percent(theta in 0.0f64..360.0, w in 150u32..320, h in 150u32..320) {
            let f = blob(w, h);
            let r = rotate_fragment(&f, theta);
            let ratio = r.opaque_count as f64 / f.opaque_count as f64;
            prop_assert!((0.98..=1.02).contains(&ratio), "ratio {}", ratio);
            prop_assert_eq!(r.opaque_count, r.raster.opaque_count());
            let b = r.raster.opaque_bounds().unwrap();
            prop_assert_eq!((b.width(), b.height()), (r.raster.width, r.raster.height));
        }

        #[test]
        fn rotation_keeps_center(theta in 0.0f64..360.0) {
            let f = frag(Raster::filled(80, 60, [0, 0, 0, 255]));
            let r = rotate_fragment(&f, theta);
            let c0 = f64::from(f.bbox.x0 + f.bbox.x1) / 2.0;
            let c1 = f64::from(r.bbox.x0 + r.bbox.x1) / 2.0;
            prop_assert!((c0 - c1).abs() <= 1.5);
        }
    }
}
