//! Greedy line wrapping.
//!
//! Prose breaks at whitespace, and between CJK characters; words wider than a
//! whole line are split by character. Code breaks only when a line overflows,
//! one character at a time, so indentation survives. The wrapped lines
//! partition the input: concatenating every line's text followed by its
//! terminator gives back the original string.

use alloc::string::String;
use alloc::vec::Vec;

use crate::font::GlyphCache;
use crate::metrics::tokenize::is_cjk;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrapMode {
    Prose,
    Code,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrappedLine {
    pub text: String,
    /// The consumed break character: `'\n'` for hard breaks, the whitespace
    /// character a soft break happened at, or `None` for a forced break.
    pub terminator: Option<char>,
}

impl WrappedLine {
    pub fn char_count(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Piece {
    Space,
    Visible,
}

/// Split a hard line into whitespace runs, single CJK characters and words.
fn pieces(line: &str) -> Vec<(Piece, usize, usize)> {
    let mut out = Vec::new();
    let mut cur: Option<(Piece, usize)> = None;
    for (i, ch) in line.char_indices() {
        let kind = if ch.is_whitespace() {
            Piece::Space
        } else {
            Piece::Visible
        };
        let cjk = is_cjk(ch);
        match cur {
            Some((k, s)) if k == kind && !cjk => {
                let _ = s;
            }
            Some((k, s)) => {
                out.push((k, s, i));
                cur = Some((kind, i));
            }
            None => cur = Some((kind, i)),
        }
        if cjk {
            let end = i + ch.len_utf8();
            if let Some((k, s)) = cur.take() {
                if s < i {
                    out.push((k, s, i));
                }
            }
            out.push((Piece::Visible, i, end));
        }
    }
    if let Some((k, s)) = cur {
        out.push((k, s, line.len()));
    }
    out
}

fn width(cache: &mut GlyphCache<'_>, s: &str) -> u32 {
    s.chars().map(|c| cache.advance(c)).sum()
}

fn wrap_prose_line(line: &str, max_width: u32, cache: &mut GlyphCache<'_>, out: &mut Vec<WrappedLine>) -> usize {
    // Returns the byte offset where the final (unterminated) line starts.
    let mut start = 0;
    let mut committed = 0u32;
    let mut has_content = false;
    let mut pending: Option<(usize, usize, u32)> = None;
    for (kind, s, e) in pieces(line) {
        if kind == Piece::Space {
            let w = width(cache, &line[s..e]);
            pending = Some(match pending {
                Some((ps, _, pw)) => (ps, e, pw + w),
                None => (s, e, w),
            });
            continue;
        }
        let w = width(cache, &line[s..e]);
        let pw = pending.map_or(0, |p| p.2);
        if has_content && committed + pw + w > max_width {
            match pending {
                Some((_, pe, _)) => {
                    let last = line[..pe].chars().next_back().unwrap();
                    let cut = pe - last.len_utf8();
                    out.push(WrappedLine {
                        text: String::from(&line[start..cut]),
                        terminator: Some(last),
                    });
                    start = pe;
                }
                None => {
                    out.push(WrappedLine {
                        text: String::from(&line[start..s]),
                        terminator: None,
                    });
                    start = s;
                }
            }
            committed = 0;
            has_content = false;
            pending = None;
        }
        let pw = pending.map_or(0, |p| p.2);
        if !has_content && pw + w > max_width {
            // Word wider than the line: split by character.
            let mut line_w = pw;
            let mut line_has = false;
            for (i, ch) in line[s..e].char_indices() {
                let cw = cache.advance(ch);
                if line_has && line_w + cw > max_width {
                    out.push(WrappedLine {
                        text: String::from(&line[start..s + i]),
                        terminator: None,
                    });
                    start = s + i;
                    line_w = 0;
                }
                line_w += cw;
                line_has = true;
            }
            committed = line_w;
        } else {
            committed += pw + w;
        }
        has_content = true;
        pending = None;
    }
    start
}

fn wrap_code_line(line: &str, max_width: u32, cache: &mut GlyphCache<'_>, out: &mut Vec<WrappedLine>) -> usize {
    let mut start = 0;
    let mut w = 0u32;
    for (i, ch) in line.char_indices() {
        let cw = cache.advance(ch);
        if i > start && w + cw > max_width && !ch.is_whitespace() {
            out.push(WrappedLine {
                text: String::from(&line[start..i]),
                terminator: None,
            });
            start = i;
            w = 0;
        }
        w += cw;
    }
    start
}

/// Wrap `text` to `max_width` pixels. Empty text gives no lines.
pub fn wrap_text(text: &str, mode: WrapMode, max_width: u32, cache: &mut GlyphCache<'_>) -> Vec<WrappedLine> {
    let mut out = Vec::new();
    if text.is_empty() {
        return out;
    }
    let mut rest = text;
    loop {
        let (line, hard) = match rest.find('\n') {
            Some(k) => (&rest[..k], true),
            None => (rest, false),
        };
        let tail = match mode {
            WrapMode::Prose => wrap_prose_line(line, max_width, cache, &mut out),
            WrapMode::Code => wrap_code_line(line, max_width, cache, &mut out),
        };
        out.push(WrappedLine {
            text: String::from(&line[tail..]),
            terminator: hard.then_some('\n'),
        });
        if !hard {
            break;
        }
        rest = &rest[line.len() + 1..];
    }
    out
}

/// Pixel width of a line's visible content.
pub fn line_width(line: &str, cache: &mut GlyphCache<'_>) -> u32 {
    width(cache, line.trim_end())
}
