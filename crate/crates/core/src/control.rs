//! Nonsense-text control documents.
//!
//! A control keeps the rendered layout of an English news document (the same
//! wrapped lines, each with the same number of characters) but fills it with
//! random words, so a model cannot lean on meaning to reorder fragments.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Category, SourceDocument};
use crate::error::{Error, Result};
use crate::font::FontSet;
use crate::rasterizer::{wrap_document, PageStyle};
use crate::rng::RngStream;

pub const CONTROL_SUFFIX: &str = "_nonsense";

/// Character counts of the lines `doc` renders to.
pub fn line_lengths(doc: &SourceDocument, style: &PageStyle, fonts: &FontSet) -> Vec<usize> {
    wrap_document(doc, style, fonts)
        .iter()
        .map(|l| l.char_count())
        .collect()
}

/// A line of exactly `len` characters: random words separated by single
/// spaces, the last one truncated to fit. A single leftover position becomes
/// a space.
fn fill_line(len: usize, lexicon: &[&str], rng: &mut RngStream, out: &mut String) {
    let mut left = len;
    let mut first = true;
    while left > 0 {
        if !first {
            out.push(' ');
            left -= 1;
            if left == 0 {
                break;
            }
        }
        let word = lexicon[rng.below(lexicon.len() as u32) as usize];
        let take = word.chars().count().min(left);
        out.extend(word.chars().take(take));
        left -= take;
        first = false;
    }
}

/// Build the control for one English news document.
///
/// The source is wrapped exactly as the rasterizer would lay it out; each
/// wrapped line becomes one output line of the same length, and lines are
/// joined with `'\n'`.
pub fn generate_nonsense_control<S: AsRef<str>>(
    doc: &SourceDocument,
    lexicon: &[S],
    style: &PageStyle,
    fonts: &FontSet,
    rng: &mut RngStream,
) -> Result<SourceDocument> {
    if doc.category != Category::NewsEn {
        return Err(Error::Precondition(format!(
            "controls are built from news_en documents, {} is {}",
            doc.id, doc.category
        )));
    }
    let words: Vec<&str> = lexicon.iter().map(|w| w.as_ref()).filter(|w| !w.is_empty()).collect();
    if words.is_empty() {
        return Err(Error::invalid("lexicon is empty"));
    }
    if let Some(w) = words.iter().find(|w| w.chars().any(char::is_whitespace)) {
        return Err(Error::invalid(format!("lexicon entry {w:?} contains whitespace")));
    }
    let mut text = String::with_capacity(doc.text.len());
    for (i, len) in line_lengths(doc, style, fonts).into_iter().enumerate() {
        if i > 0 {
            text.push('\n');
        }
        fill_line(len, &words, rng, &mut text);
    }
    let mut out = SourceDocument::new(format!("{}{CONTROL_SUFFIX}", doc.id), Category::NewsEn, None, text)?;
    out.metadata = doc.metadata.clone();
    Ok(out
        .with_metadata("control", "nonsense")
        .with_metadata("source_id", &doc.id))
}
