//! Page rendering: text layout onto an opaque page, plus paper-texture noise.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{Category, SourceDocument};
use crate::error::{Error, Result};
use crate::font::{FontSet, GlyphCache};
use crate::layout::{wrap_text, WrapMode, WrappedLine};
use crate::metrics::table::{parse_table_tree, TableTree};
use crate::raster::Raster;
use crate::rng::RngStream;

pub const MAX_NOISE_AMPLITUDE: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PageStyle {
    pub page_width_px: u32,
    pub font_size_px: u32,
    pub latin_font_name: String,
    pub cjk_font_name: String,
    /// Monospaced family for code. `None` uses the builtin face.
    pub code_font_name: Option<String>,
    pub line_spacing_factor: f64,
    pub margin_px: u32,
    pub background_rgb: [u8; 3],
    pub text_rgb: [u8; 3],
    pub noise_amplitude: u32,
}

impl Default for PageStyle {
    fn default() -> Self {
        PageStyle {
            page_width_px: 1600,
            font_size_px: 28,
            latin_font_name: String::from("Times New Roman"),
            cjk_font_name: String::from("SimSun"),
            code_font_name: None,
            line_spacing_factor: 1.4,
            margin_px: 48,
            background_rgb: [255, 255, 255],
            text_rgb: [0, 0, 0],
            noise_amplitude: 6,
        }
    }
}

impl PageStyle {
    pub fn validate(&self) -> Result<()> {
        if self.page_width_px <= 2 * self.margin_px {
            return Err(Error::invalid("page_width_px must exceed twice margin_px"));
        }
        if self.font_size_px == 0 {
            return Err(Error::invalid("font_size_px must be positive"));
        }
        if self.noise_amplitude > MAX_NOISE_AMPLITUDE {
            return Err(Error::invalid("noise_amplitude must be at most 64"));
        }
        if !(self.line_spacing_factor.is_finite() && self.line_spacing_factor > 0.0) {
            return Err(Error::invalid("line_spacing_factor must be positive"));
        }
        Ok(())
    }

    pub fn line_height(&self) -> u32 {
        (libm::round(f64::from(self.font_size_px) * self.line_spacing_factor) as u32).max(1)
    }

    pub fn content_width(&self) -> u32 {
        self.page_width_px - 2 * self.margin_px
    }

    /// Offset of the baseline below the top of a line box.
    fn baseline(&self) -> i32 {
        let lh = self.line_height() as i32;
        let size = self.font_size_px as i32;
        (lh - size) / 2 + (size * 8 + 5) / 10
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageRaster {
    pub source_doc_id: String,
    pub raster: Raster,
}

impl PageRaster {
    pub fn width_px(&self) -> u32 {
        self.raster.width
    }

    pub fn height_px(&self) -> u32 {
        self.raster.height
    }
}

fn wrap_mode(category: Category) -> WrapMode {
    if category == Category::Code {
        WrapMode::Code
    } else {
        WrapMode::Prose
    }
}

/// Lines exactly as `render_page` lays out a non-table document.
pub fn wrap_document(doc: &SourceDocument, style: &PageStyle, fonts: &FontSet) -> Vec<WrappedLine> {
    let mode = wrap_mode(doc.category);
    let mut cache = GlyphCache::new(fonts, mode == WrapMode::Code);
    wrap_text(&doc.text, mode, style.content_width(), &mut cache)
}

struct Canvas<'s> {
    raster: Raster,
    style: &'s PageStyle,
}

impl Canvas<'_> {
    fn draw_text(&mut self, cache: &mut GlyphCache<'_>, text: &str, x: i32, line_top: i32) {
        let baseline = line_top + self.style.baseline();
        let mut pen = x;
        let [tr, tg, tb] = self.style.text_rgb;
        for ch in text.chars() {
            let g = cache.glyph(ch);
            let gx = pen + g.left;
            let gy = baseline - g.top;
            for dy in 0..g.height as i32 {
                let y = gy + dy;
                if y < 0 || y >= self.raster.height as i32 {
                    continue;
                }
                for dx in 0..g.width as i32 {
                    let x = gx + dx;
                    if x < 0 || x >= self.raster.width as i32 {
                        continue;
                    }
                    let c = u32::from(g.coverage[(dy as u32 * g.width + dx as u32) as usize]);
                    if c == 0 {
                        continue;
                    }
                    let i = self.raster.index(x as u32, y as u32);
                    let px = &mut self.raster.pixels[i];
                    let mix = |bg: u8, fg: u8| ((u32::from(bg) * (255 - c) + u32::from(fg) * c + 127) / 255) as u8;
                    *px = [mix(px[0], tr), mix(px[1], tg), mix(px[2], tb), 255];
                }
            }
            pen += g.advance as i32;
        }
    }

    fn fill_rect(&mut self, x0: i32, y0: i32, x1: i32, y1: i32) {
        let [r, g, b] = self.style.text_rgb;
        let x0 = x0.clamp(0, self.raster.width as i32) as u32;
        let x1 = x1.clamp(0, self.raster.width as i32) as u32;
        let y0 = y0.clamp(0, self.raster.height as i32) as u32;
        let y1 = y1.clamp(0, self.raster.height as i32) as u32;
        for y in y0..y1 {
            for x in x0..x1 {
                self.raster.set(x, y, [r, g, b, 255]);
            }
        }
    }
}

fn blank(style: &PageStyle, height: u32) -> Raster {
    let [r, g, b] = style.background_rgb;
    Raster::filled(style.page_width_px, height, [r, g, b, 255])
}

/// Render a document onto an opaque page `style.page_width_px` wide.
///
/// Prose and code are wrapped to the width between the margins; tables are
/// drawn as a bordered grid. The page is exactly tall enough for the content
/// plus top and bottom margins.
pub fn render_page(doc: &SourceDocument, style: &PageStyle, fonts: &FontSet) -> Result<PageRaster> {
    style.validate()?;
    if fonts.size_px() != style.font_size_px {
        return Err(Error::invalid("font set size does not match font_size_px"));
    }
    let raster = if doc.category == Category::Table {
        let tree = parse_table_tree(&doc.text)?;
        render_table(&tree, style, fonts)
    } else {
        let lines = wrap_document(doc, style, fonts);
        let lh = style.line_height();
        let height = 2 * style.margin_px + lines.len() as u32 * lh;
        let mut canvas = Canvas {
            raster: blank(style, height),
            style,
        };
        let mut cache = GlyphCache::new(fonts, doc.category == Category::Code);
        for (i, line) in lines.iter().enumerate() {
            let top = (style.margin_px + i as u32 * lh) as i32;
            canvas.draw_text(&mut cache, &line.text, style.margin_px as i32, top);
        }
        canvas.raster
    };
    Ok(PageRaster {
        source_doc_id: doc.id.clone(),
        raster,
    })
}

/// Cell positions in the grid after resolving row and column spans.
struct GridCell {
    row: usize,
    col: usize,
    row_span: usize,
    col_span: usize,
    lines: Vec<WrappedLine>,
}

const BORDER: i32 = 2;

fn render_table(tree: &TableTree, style: &PageStyle, fonts: &FontSet) -> Raster {
    let n_rows = tree.rows.len();
    // Occupancy grid, grown as cells are placed.
    let mut occupied: Vec<Vec<bool>> = vec![Vec::new(); n_rows];
    let mut cells = Vec::new();
    let mut n_cols = 0usize;
    for (r, row) in tree.rows.iter().enumerate() {
        let mut c = 0usize;
        for cell in row {
            while occupied[r].get(c).copied().unwrap_or(false) {
                c += 1;
            }
            let rs = (cell.row_span as usize).min(n_rows - r).max(1);
            let cs = cell.col_span.max(1) as usize;
            for rr in r..r + rs {
                if occupied[rr].len() < c + cs {
                    occupied[rr].resize(c + cs, false);
                }
                for slot in &mut occupied[rr][c..c + cs] {
                    *slot = true;
                }
            }
            cells.push((r, c, rs, cs, cell.text.as_str()));
            n_cols = n_cols.max(c + cs);
            c += cs;
        }
    }
    let lh = style.line_height() as i32;
    if n_cols == 0 {
        return blank(style, 2 * style.margin_px);
    }
    let content = style.content_width() as i32;
    let col_w = (content - BORDER) / n_cols as i32;
    let pad = (style.font_size_px as i32 / 3).max(2);
    let mut cache = GlyphCache::new(fonts, false);
    let cells: Vec<GridCell> = cells
        .into_iter()
        .map(|(row, col, row_span, col_span, text)| {
            let inner = (col_w * col_span as i32 - BORDER - 2 * pad).max(1) as u32;
            GridCell {
                row,
                col,
                row_span,
                col_span,
                lines: wrap_text(text, WrapMode::Prose, inner, &mut cache),
            }
        })
        .collect();
    let need = |g: &GridCell| g.lines.len().max(1) as i32 * lh + 2 * pad + BORDER;
    let mut row_h = vec![lh + 2 * pad + BORDER; n_rows];
    for g in cells.iter().filter(|g| g.row_span == 1) {
        row_h[g.row] = row_h[g.row].max(need(g));
    }
    for g in cells.iter().filter(|g| g.row_span > 1) {
        let have: i32 = row_h[g.row..g.row + g.row_span].iter().sum();
        let last = g.row + g.row_span - 1;
        row_h[last] += (need(g) - have).max(0);
    }
    let mut row_y = Vec::with_capacity(n_rows + 1);
    let mut y = style.margin_px as i32;
    for h in &row_h {
        row_y.push(y);
        y += h;
    }
    row_y.push(y);
    let height = (y + BORDER) as u32 + style.margin_px;
    let mut canvas = Canvas {
        raster: blank(style, height),
        style,
    };
    let x_at = |c: usize| style.margin_px as i32 + c as i32 * col_w;
    for g in &cells {
        let (x0, x1) = (x_at(g.col), x_at(g.col + g.col_span));
        let (y0, y1) = (row_y[g.row], row_y[g.row + g.row_span]);
        canvas.fill_rect(x0, y0, x1 + BORDER, y0 + BORDER);
        canvas.fill_rect(x0, y1, x1 + BORDER, y1 + BORDER);
        canvas.fill_rect(x0, y0, x0 + BORDER, y1 + BORDER);
        canvas.fill_rect(x1, y0, x1 + BORDER, y1 + BORDER);
        for (i, line) in g.lines.iter().enumerate() {
            canvas.draw_text(
                &mut cache,
                &line.text,
                x0 + BORDER + pad,
                y0 + BORDER + pad + i as i32 * lh,
            );
        }
    }
    canvas.raster
}

/// Perturb every RGB channel by a uniform integer in `[-amplitude, amplitude]`,
/// clamped to the byte range. Pixels are visited in row-major order, channels
/// in RGB order. Alpha is untouched.
pub fn inject_paper_noise(mut page: PageRaster, amplitude: u32, rng: &mut RngStream) -> Result<PageRaster> {
    if amplitude > MAX_NOISE_AMPLITUDE {
        return Err(Error::invalid("noise amplitude must be at most 64"));
    }
    if amplitude == 0 {
        return Ok(page);
    }
    let a = amplitude as i32;
    for px in &mut page.raster.pixels {
        for c in &mut px[..3] {
            *c = (i32::from(*c) + rng.between(-a, a)).clamp(0, 255) as u8;
        }
    }
    Ok(page)
}
