//! Font resolution: builtin faces, or TrueType files from a font directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fontdue::{Font, FontSettings};
use shredforge_core::font::{BitmapFace, Face, FontSet, GlyphBitmap, Spacing, BUILTIN_FAMILY};
use shredforge_core::rasterizer::PageStyle;
use shredforge_core::Error as CoreError;

use crate::error::{Error, Result};

/// A TrueType face rasterized with `fontdue`.
pub struct TtfFace {
    family: String,
    size_px: u32,
    font: Arc<Font>,
}

impl TtfFace {
    pub fn load(path: &Path, family: &str, size_px: u32) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let font = Font::from_bytes(bytes, FontSettings::default())
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(TtfFace {
            family: family.to_string(),
            size_px,
            font: Arc::new(font),
        })
    }
}

impl Face for TtfFace {
    fn family(&self) -> &str {
        &self.family
    }

    fn size_px(&self) -> u32 {
        self.size_px
    }

    fn glyph(&self, ch: char) -> Option<GlyphBitmap> {
        if self.font.lookup_glyph_index(ch) == 0 {
            return None;
        }
        let (m, coverage) = self.font.rasterize(ch, self.size_px as f32);
        Some(GlyphBitmap {
            width: m.width as u32,
            height: m.height as u32,
            left: m.xmin,
            top: m.ymin + m.height as i32,
            advance: m.advance_width.round().max(0.0) as u32,
            coverage,
        })
    }
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Font files under `dir`, paired with the names they can be requested by.
fn catalogue(dir: &Path) -> Result<Vec<(PathBuf, Vec<String>)>> {
    if !dir.is_dir() {
        return Err(Error::Config(format!(
            "font directory {} does not exist",
            dir.display()
        )));
    }
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name().into_iter().flatten() {
        let p = entry.path();
        let ext = p
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        if !entry.file_type().is_file() || !matches!(ext.as_str(), "ttf" | "otf") {
            continue;
        }
        let mut names = vec![normalize(&p.file_stem().unwrap_or_default().to_string_lossy())];
        if let Ok(bytes) = std::fs::read(p) {
            if let Ok(f) = Font::from_bytes(bytes, FontSettings::default()) {
                if let Some(n) = f.name() {
                    names.push(normalize(n));
                }
            }
        }
        out.push((p.to_path_buf(), names));
    }
    Ok(out)
}

fn resolve_one(
    family: &str,
    spacing: Spacing,
    size: u32,
    fonts: Option<&[(PathBuf, Vec<String>)]>,
) -> Result<Box<dyn Face>> {
    let Some(fonts) = fonts else {
        return Ok(Box::new(BitmapFace::new(size, spacing)));
    };
    if family.eq_ignore_ascii_case(BUILTIN_FAMILY) {
        return Ok(Box::new(BitmapFace::new(size, spacing)));
    }
    let want = normalize(family);
    match fonts.iter().find(|(_, names)| names.contains(&want)) {
        Some((path, _)) => Ok(Box::new(TtfFace::load(path, family, size)?)),
        None => Err(CoreError::FontResolution {
            family: family.to_string(),
        }
        .into()),
    }
}

/// Faces for a page style.
///
/// Without a font directory every family renders with the builtin face.
/// With one, each configured family must match a font file by file stem or
/// font name (case and punctuation ignored); `"builtin"` always resolves.
pub fn resolve_fonts(style: &PageStyle, font_dir: Option<&Path>) -> Result<FontSet> {
    let cat = font_dir.map(catalogue).transpose()?;
    let cat = cat.as_deref();
    let size = style.font_size_px;
    let prose = resolve_one(&style.latin_font_name, Spacing::Proportional, size, cat)?;
    let cjk = resolve_one(&style.cjk_font_name, Spacing::Proportional, size, cat)?;
    let code = match &style.code_font_name {
        Some(name) => resolve_one(name, Spacing::Mono, size, cat)?,
        None => Box::new(BitmapFace::new(size, Spacing::Mono)),
    };
    Ok(FontSet::new(prose, cjk, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEJAVU: &str = "/usr/share/fonts/truetype/dejavu";

    #[test]
    fn builtin_without_directory() {
        let set = resolve_fonts(&PageStyle::default(), None).unwrap();
        assert_eq!(set.families(), ["builtin", "builtin", "builtin"]);
    }

    #[test]
    fn unknown_family_named_in_error() {
        let d = tempfile::tempdir().unwrap();
        let err = resolve_fonts(&PageStyle::default(), Some(d.path())).err().unwrap();
        assert!(err.to_string().contains("Times New Roman"), "{err}");
    }

    #[test]
    fn missing_directory_is_config_error() {
        assert!(matches!(
            resolve_fonts(&PageStyle::default(), Some(Path::new("/no/fonts"))),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn truetype_faces_render() {
        if !Path::new(DEJAVU).is_dir() {
            return;
        }
        let style = PageStyle {
            latin_font_name: "DejaVu Serif".into(),
            cjk_font_name: "builtin".into(),
            code_font_name: Some("DejaVuSansMono".into()),
            ..PageStyle::default()
        };
        let set = resolve_fonts(&style, Some(Path::new(DEJAVU))).unwrap();
        assert_eq!(set.families()[0], "DejaVu Serif");
        let g = set.prose.glyph('A').unwrap();
        assert!(g.width > 0 && g.coverage.iter().any(|c| *c > 128));
        assert!(set.code.glyph('i').unwrap().advance == set.code.glyph('W').unwrap().advance);
    }
}
