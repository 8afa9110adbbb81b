//! Glyph sources for the page rasterizer.
//!
//! A [`Face`] hands out coverage bitmaps at a fixed pixel size. The crate
//! ships a builtin face scaled from an 8x8 bitmap font so that rendering works
//! with no font files at all; the `shredforge` crate adds TrueType faces.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use font8x8::legacy::{BASIC_LEGACY, BLOCK_LEGACY, BOX_LEGACY, GREEK_LEGACY, HIRAGANA_LEGACY, LATIN_LEGACY};

use crate::metrics::tokenize::is_cjk;

/// Coverage bitmap for one glyph. `top` is the distance from the baseline up
/// to the first row; `left` is the offset from the pen position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlyphBitmap {
    pub width: u32,
    pub height: u32,
    pub left: i32,
    pub top: i32,
    pub advance: u32,
    pub coverage: Vec<u8>,
}

pub trait Face: Send + Sync {
    fn family(&self) -> &str;
    fn size_px(&self) -> u32;
    /// `None` when the face has no glyph for `ch`.
    fn glyph(&self, ch: char) -> Option<GlyphBitmap>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Mono,
    Proportional,
}

/// Name under which the builtin face can be requested explicitly.
pub const BUILTIN_FAMILY: &str = "builtin";

fn bitmap8(ch: char) -> Option<[u8; 8]> {
    let c = ch as usize;
    let rows = match c {
        0x21..=0x7e => BASIC_LEGACY[c],
        0xa1..=0xff => LATIN_LEGACY[c - 0xa0],
        0x390..=0x3c9 => GREEK_LEGACY[c - 0x390],
        0x2500..=0x257f => BOX_LEGACY[c - 0x2500],
        0x2580..=0x259f => BLOCK_LEGACY[c - 0x2580],
        0x3040..=0x309f => HIRAGANA_LEGACY[c - 0x3040],
        _ => return None,
    };
    rows.iter().any(|r| *r != 0).then_some(rows)
}

/// The builtin face: 8x8 bitmaps box-filtered up to the requested size.
#[derive(Clone, Debug)]
pub struct BitmapFace {
    size_px: u32,
    spacing: Spacing,
}

impl BitmapFace {
    pub fn new(size_px: u32, spacing: Spacing) -> Self {
        BitmapFace { size_px, spacing }
    }

    fn cell_width(&self) -> u32 {
        ((self.size_px * 6 + 5) / 10).max(1)
    }

    fn cell_height(&self) -> u32 {
        ((self.size_px * 8 + 5) / 10).max(1)
    }

    fn space_advance(&self) -> u32 {
        match self.spacing {
            Spacing::Mono => self.cell_width(),
            Spacing::Proportional => ((self.size_px * 3 + 5) / 10).max(1),
        }
    }
}

impl Face for BitmapFace {
    fn family(&self) -> &str {
        BUILTIN_FAMILY
    }

    fn size_px(&self) -> u32 {
        self.size_px
    }

    fn glyph(&self, ch: char) -> Option<GlyphBitmap> {
        if ch == ' ' || ch == '\u{a0}' {
            return Some(GlyphBitmap {
                width: 0,
                height: 0,
                left: 0,
                top: 0,
                advance: self.space_advance(),
                coverage: Vec::new(),
            });
        }
        let rows = bitmap8(ch)?;
        let sx = self.cell_width() as f32 / 8.0;
        let sy = self.cell_height() as f32 / 8.0;
        // Inked column range; bit 0 is the leftmost pixel.
        let used = rows.iter().fold(0u8, |acc, r| acc | r);
        let (c0, c1) = match self.spacing {
            Spacing::Mono => (0u32, 7u32),
            Spacing::Proportional => (used.trailing_zeros(), 7 - used.leading_zeros()),
        };
        let width = (((c1 - c0 + 1) as f32) * sx + 0.5) as u32;
        let height = self.cell_height();
        let mut coverage = vec![0u8; (width * height) as usize];
        const SS: u32 = 4;
        for dy in 0..height {
            for dx in 0..width {
                let mut hits = 0u32;
                for j in 0..SS {
                    let sy_px = ((dy as f32 + (j as f32 + 0.5) / SS as f32) / sy) as u32;
                    let row = rows[sy_px.min(7) as usize];
                    for i in 0..SS {
                        let sx_px = c0 + ((dx as f32 + (i as f32 + 0.5) / SS as f32) / sx) as u32;
                        if row >> sx_px.min(7) & 1 == 1 {
                            hits += 1;
                        }
                    }
                }
                coverage[(dy * width + dx) as usize] = (hits * 255 / (SS * SS)) as u8;
            }
        }
        let advance = match self.spacing {
            Spacing::Mono => self.cell_width(),
            Spacing::Proportional => width + (self.size_px / 10).max(1),
        };
        Some(GlyphBitmap {
            width,
            height,
            left: 0,
            // Row 7 of the 8x8 cell is the descender row.
            top: ((7.0 * sy) + 0.5) as i32,
            advance,
            coverage,
        })
    }
}

/// Hollow box drawn for characters no face can render.
pub fn missing_glyph(ch: char, size_px: u32) -> GlyphBitmap {
    let full = is_cjk(ch);
    let advance = if full { size_px } else { (size_px * 6 + 5) / 10 };
    let width = advance.saturating_sub((size_px / 10).max(1) * 2).max(2);
    let height = ((size_px * 7 + 5) / 10).max(2);
    let stroke = (size_px / 14).max(1);
    let mut coverage = vec![0u8; (width * height) as usize];
    for y in 0..height {
        for x in 0..width {
            if x < stroke || y < stroke || x + stroke >= width || y + stroke >= height {
                coverage[(y * width + x) as usize] = 255;
            }
        }
    }
    GlyphBitmap {
        width,
        height,
        left: ((advance - width) / 2) as i32,
        top: height as i32,
        advance,
        coverage,
    }
}

/// The faces used to render one page: a prose face, a CJK face, and a
/// monospaced code face. Missing glyphs fall back through the CJK face and the
/// builtin face to a visible box.
pub struct FontSet {
    pub prose: Box<dyn Face>,
    pub cjk: Box<dyn Face>,
    pub code: Box<dyn Face>,
    size_px: u32,
}

impl FontSet {
    pub fn new(prose: Box<dyn Face>, cjk: Box<dyn Face>, code: Box<dyn Face>) -> Self {
        let size_px = prose.size_px();
        FontSet {
            prose,
            cjk,
            code,
            size_px,
        }
    }

    /// Builtin faces only.
    pub fn builtin(size_px: u32) -> Self {
        FontSet::new(
            Box::new(BitmapFace::new(size_px, Spacing::Proportional)),
            Box::new(BitmapFace::new(size_px, Spacing::Proportional)),
            Box::new(BitmapFace::new(size_px, Spacing::Mono)),
        )
    }

    pub fn size_px(&self) -> u32 {
        self.size_px
    }

    pub fn families(&self) -> [String; 3] {
        [
            String::from(self.prose.family()),
            String::from(self.cjk.family()),
            String::from(self.code.family()),
        ]
    }
}

/// Per-render glyph cache.
pub struct GlyphCache<'a> {
    fonts: &'a FontSet,
    code: bool,
    builtin: BitmapFace,
    glyphs: BTreeMap<char, Rc<GlyphBitmap>>,
}

impl<'a> GlyphCache<'a> {
    pub fn new(fonts: &'a FontSet, code: bool) -> Self {
        let spacing = if code { Spacing::Mono } else { Spacing::Proportional };
        GlyphCache {
            fonts,
            code,
            builtin: BitmapFace::new(fonts.size_px, spacing),
            glyphs: BTreeMap::new(),
        }
    }

    pub fn glyph(&mut self, ch: char) -> Rc<GlyphBitmap> {
        if let Some(g) = self.glyphs.get(&ch) {
            return g.clone();
        }
        let primary: &dyn Face = if self.code {
            &*self.fonts.code
        } else {
            &*self.fonts.prose
        };
        let g = if ch == '\t' {
            let space = self.glyph(' ');
            GlyphBitmap {
                advance: space.advance * 4,
                ..(*space).clone()
            }
        } else if ch.is_control() {
            GlyphBitmap {
                width: 0,
                height: 0,
                left: 0,
                top: 0,
                advance: 0,
                coverage: Vec::new(),
            }
        } else {
            primary
                .glyph(ch)
                .or_else(|| self.fonts.cjk.glyph(ch))
                .or_else(|| self.builtin.glyph(ch))
                .unwrap_or_else(|| missing_glyph(ch, self.fonts.size_px))
        };
        let g = Rc::new(g);
        self.glyphs.insert(ch, g.clone());
        g
    }

    pub fn advance(&mut self, ch: char) -> u32 {
        self.glyph(ch).advance
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_covers_ascii() {
        let f = BitmapFace::new(28, Spacing::Proportional);
        for ch in '!'..='~' {
            let g = f.glyph(ch).unwrap();
            assert!(g.coverage.iter().any(|c| *c > 0), "{ch}");
            assert!(g.advance > 0);
        }
        assert!(f.glyph('中').is_none());
    }

    #[test]
    fn mono_advances_are_uniform() {
        let f = BitmapFace::new(28, Spacing::Mono);
        let adv: Vec<u32> = ['i', 'W', ' ', '{']
            .iter()
            .map(|c| f.glyph(*c).unwrap().advance)
            .collect();
        assert!(adv.iter().all(|a| *a == 17));
    }

    #[test]
    fn proportional_is_narrower_for_thin_glyphs() {
        let f = BitmapFace::new(28, Spacing::Proportional);
        assert!(f.glyph('i').unwrap().advance < f.glyph('W').unwrap().advance);
    }

    #[test]
    fn fallback_box_for_unknown() {
        let fonts = FontSet::builtin(28);
        let mut cache = GlyphCache::new(&fonts, false);
        let g = cache.glyph('中');
        assert_eq!(g.advance, 28);
        assert!(g.coverage.iter().any(|c| *c == 255));
        assert_eq!(cache.advance('\t'), 4 * cache.advance(' '));
        assert_eq!(cache.advance('\r'), 0);
    }
}
