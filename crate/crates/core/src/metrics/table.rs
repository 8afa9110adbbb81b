//! Parser for the table subset of HTML (`table`, `tr`, `td`, `th` with
//! `rowspan`/`colspan`) into an ordered labeled tree.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ted::Tree;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("table markup error at byte {position}: {message}")]
pub struct TableParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    pub text: String,
    pub header: bool,
    pub row_span: u32,
    pub col_span: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableTree {
    pub rows: Vec<Vec<TableCell>>,
}

/// Node label used for tree edit distance. Cells compare kind, spans and
/// text as a single unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableNode {
    Table,
    Row,
    Cell(TableCell),
}

impl TableTree {
    pub fn node_count(&self) -> usize {
        1 + self.rows.len() + self.rows.iter().map(Vec::len).sum::<usize>()
    }

    pub fn to_tree(&self) -> Tree<TableNode> {
        Tree::node(
            TableNode::Table,
            self.rows
                .iter()
                .map(|r| {
                    Tree::node(
                        TableNode::Row,
                        r.iter().map(|c| Tree::leaf(TableNode::Cell(c.clone()))).collect(),
                    )
                })
                .collect(),
        )
    }

    /// Cell texts in reading order, separated by single spaces.
    pub fn flatten_text(&self) -> String {
        let mut out = String::new();
        for cell in self.rows.iter().flatten() {
            if cell.text.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&cell.text);
        }
        out
    }
}

#[derive(Debug)]
enum Token<'a> {
    Open { name: String, attrs: &'a str, pos: usize },
    Close { name: String, pos: usize },
    Text { text: &'a str, pos: usize },
}

fn err(position: usize, message: impl Into<String>) -> TableParseError {
    TableParseError {
        position,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token<'_>>, TableParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    let bytes = src.as_bytes();
    while i < src.len() {
        if bytes[i] == b'<' {
            let close = src[i..].find('>').ok_or_else(|| err(i, "unterminated tag"))? + i;
            let inner = &src[i + 1..close];
            if let Some(rest) = inner.strip_prefix('/') {
                let name = rest.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(err(i, format!("malformed closing tag `<{inner}>`")));
                }
                out.push(Token::Close {
                    name: name.to_ascii_lowercase(),
                    pos: i,
                });
            } else {
                let inner = inner.trim_end();
                if inner.ends_with('/') {
                    return Err(err(i, "self-closing tags are not part of the table subset"));
                }
                let name_end = inner.find(char::is_whitespace).unwrap_or(inner.len());
                let name = &inner[..name_end];
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric()) {
                    return Err(err(i, format!("malformed tag `<{inner}>`")));
                }
                out.push(Token::Open {
                    name: name.to_ascii_lowercase(),
                    attrs: &inner[name_end..],
                    pos: i,
                });
            }
            i = close + 1;
        } else {
            let next = src[i..].find('<').map_or(src.len(), |k| k + i);
            out.push(Token::Text {
                text: &src[i..next],
                pos: i,
            });
            i = next;
        }
    }
    Ok(out)
}

fn parse_spans(attrs: &str, pos: usize) -> Result<(u32, u32), TableParseError> {
    let (mut row_span, mut col_span) = (1, 1);
    let mut rest = attrs.trim_start();
    while !rest.is_empty() {
        let name_end = rest.find(|c: char| c == '=' || c.is_whitespace()).unwrap_or(rest.len());
        let name = rest[..name_end].to_ascii_lowercase();
        rest = rest[name_end..].trim_start();
        let mut value = None;
        if let Some(after) = rest.strip_prefix('=') {
            let after = after.trim_start();
            let (v, remaining) = match after.chars().next() {
                Some(q @ ('"' | '\'')) => {
                    let end = after[1..]
                        .find(q)
                        .ok_or_else(|| err(pos, format!("unterminated value for `{name}`")))?;
                    (&after[1..1 + end], &after[end + 2..])
                }
                _ => {
                    let end = after.find(char::is_whitespace).unwrap_or(after.len());
                    (&after[..end], &after[end..])
                }
            };
            value = Some(v);
            rest = remaining.trim_start();
        }
        if name == "rowspan" || name == "colspan" {
            let v = value.ok_or_else(|| err(pos, format!("`{name}` needs a value")))?;
            let n: i64 = v
                .trim()
                .parse()
                .map_err(|_| err(pos, format!("`{name}` value `{v}` is not an integer")))?;
            if n < 1 || n > u32::MAX as i64 {
                return Err(err(pos, format!("`{name}` must be >= 1, got {n}")));
            }
            if name == "rowspan" {
                row_span = n as u32;
            } else {
                col_span = n as u32;
            }
        }
    }
    Ok((row_span, col_span))
}

fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let entity = &rest[1..semi];
            let ch = match entity {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ => entity
                    .strip_prefix("#x")
                    .or_else(|| entity.strip_prefix("#X"))
                    .and_then(|h| u32::from_str_radix(h, 16).ok())
                    .or_else(|| entity.strip_prefix('#').and_then(|d| d.parse().ok()))
                    .and_then(char::from_u32),
            }?;
            Some((ch, semi))
        });
        match decoded {
            Some((ch, semi)) => {
                out.push(ch);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn normalize_ws(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for w in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

/// Parse table markup. Whitespace between structural tags is ignored; any
/// other stray text or element is an error.
pub fn parse_table_tree(markup: &str) -> Result<TableTree, TableParseError> {
    let tokens = lex(markup)?;
    let mut it = tokens.into_iter().filter(|t| match t {
        Token::Text { text, .. } => !text.trim().is_empty(),
        _ => true,
    });
    let mut tree = TableTree::default();

    match it.next() {
        Some(Token::Open { name, .. }) if name == "table" => {}
        Some(Token::Open { name, pos, .. }) | Some(Token::Close { name, pos }) => {
            return Err(err(pos, format!("expected <table>, found `{name}`")))
        }
        Some(Token::Text { pos, .. }) => return Err(err(pos, "expected <table>, found text")),
        None => return Err(err(markup.len(), "empty markup, expected <table>")),
    }

    loop {
        match it.next() {
            Some(Token::Close { name, .. }) if name == "table" => break,
            Some(Token::Open { name, .. }) if name == "tr" => {
                let mut row = Vec::new();
                loop {
                    match it.next() {
                        Some(Token::Close { name, .. }) if name == "tr" => break,
                        Some(Token::Open { name, attrs, pos }) if name == "td" || name == "th" => {
                            let (row_span, col_span) = parse_spans(attrs, pos)?;
                            let mut text = String::new();
                            loop {
                                match it.next() {
                                    Some(Token::Text { text: t, .. }) => text.push_str(t),
                                    Some(Token::Close { name: close, pos }) => {
                                        if close != name {
                                            return Err(err(pos, format!("expected </{name}>, found </{close}>")));
                                        }
                                        break;
                                    }
                                    Some(Token::Open { name: inner, pos, .. }) => {
                                        return Err(err(pos, format!("element `{inner}` is not allowed inside a cell")))
                                    }
                                    None => return Err(err(markup.len(), format!("unclosed <{name}>"))),
                                }
                            }
                            row.push(TableCell {
                                text: normalize_ws(&decode_entities(&text)),
                                header: name == "th",
                                row_span,
                                col_span,
                            });
                        }
                        Some(Token::Open { name, pos, .. }) | Some(Token::Close { name, pos }) => {
                            return Err(err(pos, format!("unexpected `{name}` inside a row")))
                        }
                        Some(Token::Text { pos, .. }) => return Err(err(pos, "text outside a cell")),
                        None => return Err(err(markup.len(), "unclosed <tr>")),
                    }
                }
                tree.rows.push(row);
            }
            Some(Token::Open { name, pos, .. }) | Some(Token::Close { name, pos }) => {
                return Err(err(pos, format!("unexpected `{name}` inside a table")))
            }
            Some(Token::Text { pos, .. }) => return Err(err(pos, "text outside a cell")),
            None => return Err(err(markup.len(), "unclosed <table>")),
        }
    }
    if let Some(tok) = it.next() {
        let pos = match tok {
            Token::Open { pos, .. } | Token::Close { pos, .. } | Token::Text { pos, .. } => pos,
        };
        return Err(err(pos, "content after </table>"));
    }
    Ok(tree)
}

/// Cell text of possibly malformed markup: everything outside angle brackets.
pub fn strip_tags(markup: &str) -> String {
    let mut out = String::with_capacity(markup.len());
    let mut in_tag = false;
    for ch in markup.chars() {
        match ch {
            '<' => {
                in_tag = true;
                out.push(' ');
            }
            '>' if in_tag => in_tag = false,
            c if !in_tag => out.push(c),
            _ => {}
        }
    }
    normalize_ws(&decode_entities(&out))
}
