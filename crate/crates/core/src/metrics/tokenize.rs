//! Tokenizers for n-gram and subsequence metrics.

use alloc::vec::Vec;

use crate::corpus::{Category, CodeLanguage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenizerMode {
    /// Split on unicode whitespace runs.
    Whitespace,
    /// Every CJK scalar is its own token; other runs split on whitespace.
    CjkChar,
    /// Identifiers, numeric and string literals, single operator characters.
    Code(CodeLanguage),
}

impl TokenizerMode {
    pub fn for_category(category: Category, language: Option<CodeLanguage>) -> Self {
        match (category, language) {
            (Category::NewsEn, _) => TokenizerMode::Whitespace,
            (Category::Code, Some(lang)) => TokenizerMode::Code(lang),
            // Table cells may hold either script.
            _ => TokenizerMode::CjkChar,
        }
    }
}

pub fn is_cjk(ch: char) -> bool {
    matches!(ch as u32,
        0x2E80..=0x2FDF      // radicals
        | 0x3000..=0x303F    // CJK symbols and punctuation
        | 0x3040..=0x30FF    // kana
        | 0x3100..=0x312F    // bopomofo
        | 0x3400..=0x4DBF    // extension A
        | 0x4E00..=0x9FFF    // unified ideographs
        | 0xAC00..=0xD7AF    // hangul syllables
        | 0xF900..=0xFAFF    // compatibility ideographs
        | 0xFE30..=0xFE4F    // compatibility forms
        | 0xFF00..=0xFFEF    // half/fullwidth forms
        | 0x20000..=0x2FA1F) // extensions B and beyond
}

pub fn tokenize(text: &str, mode: TokenizerMode) -> Vec<&str> {
    match mode {
        TokenizerMode::Whitespace => text.split_whitespace().collect(),
        TokenizerMode::CjkChar => cjk_tokens(text),
        TokenizerMode::Code(lang) => code_tokens(text, lang).into_iter().map(|t| t.text).collect(),
    }
}

fn cjk_tokens(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() || is_cjk(ch) {
            if let Some(s) = start.take() {
                out.push(&text[s..i]);
            }
            if is_cjk(ch) {
                out.push(&text[i..i + ch.len_utf8()]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Literal,
    Operator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeToken<'a> {
    pub text: &'a str,
    pub kind: TokenKind,
}

const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "var",
    "void",
    "volatile",
    "while",
];

const CPP_KEYWORDS: &[&str] = &[
    "alignas",
    "alignof",
    "and",
    "asm",
    "auto",
    "bool",
    "break",
    "case",
    "catch",
    "char",
    "char16_t",
    "char32_t",
    "class",
    "const",
    "const_cast",
    "constexpr",
    "continue",
    "decltype",
    "default",
    "define",
    "delete",
    "do",
    "double",
    "dynamic_cast",
    "else",
    "endif",
    "enum",
    "explicit",
    "export",
    "extern",
    "false",
    "float",
    "for",
    "friend",
    "goto",
    "if",
    "ifdef",
    "ifndef",
    "include",
    "inline",
    "int",
    "long",
    "mutable",
    "namespace",
    "new",
    "noexcept",
    "not",
    "nullptr",
    "operator",
    "or",
    "private",
    "protected",
    "public",
    "register",
    "reinterpret_cast",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "static_assert",
    "static_cast",
    "struct",
    "switch",
    "template",
    "this",
    "throw",
    "true",
    "try",
    "typedef",
    "typeid",
    "typename",
    "union",
    "unsigned",
    "using",
    "virtual",
    "void",
    "volatile",
    "while",
];

pub fn keywords(lang: CodeLanguage) -> &'static [&'static str] {
    match lang {
        CodeLanguage::Python => PYTHON_KEYWORDS,
        CodeLanguage::Java => JAVA_KEYWORDS,
        CodeLanguage::Cpp => CPP_KEYWORDS,
    }
}

pub fn is_keyword(lang: CodeLanguage, word: &str) -> bool {
    keywords(lang).contains(&word)
}

fn ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

/// Lex source code into typed tokens. Comments are not special-cased; their
/// words come out as identifiers.
pub fn code_tokens(text: &str, lang: CodeLanguage) -> Vec<CodeToken<'_>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let end_of = |k: usize| chars.get(k).map_or(text.len(), |c| c.0);
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (start, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let begin = k;
        let kind = if ident_start(c) {
            while k < chars.len() && ident_continue(chars[k].1) {
                k += 1;
            }
            let word = &text[start..end_of(k)];
            if is_keyword(lang, word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if c.is_ascii_digit() || (c == '.' && chars.get(k + 1).is_some_and(|n| n.1.is_ascii_digit())) {
            let hex = c == '0' && chars.get(k + 1).is_some_and(|n| matches!(n.1, 'x' | 'X'));
            k += 1;
            while k < chars.len() {
                let ch = chars[k].1;
                let exp_sign = !hex && matches!(ch, '+' | '-') && matches!(chars[k - 1].1, 'e' | 'E');
                if ch.is_ascii_alphanumeric() || ch == '_' || ch == '.' || exp_sign {
                    k += 1;
                } else {
                    break;
                }
            }
            TokenKind::Literal
        } else if c == '"' || c == '\'' {
            let triple = chars.get(k + 1).is_some_and(|n| n.1 == c) && chars.get(k + 2).is_some_and(|n| n.1 == c);
            if triple {
                k += 3;
                loop {
                    if k >= chars.len() {
                        break;
                    }
                    if chars[k].1 == c
                        && chars.get(k + 1).is_some_and(|n| n.1 == c)
                        && chars.get(k + 2).is_some_and(|n| n.1 == c)
                    {
                        k += 3;
                        break;
                    }
                    k += if chars[k].1 == '\\' { 2 } else { 1 };
                }
            } else {
                k += 1;
                while k < chars.len() {
                    match chars[k].1 {
                        '\\' => k += 2,
                        '\n' => break,
                        ch if ch == c => {
                            k += 1;
                            break;
                        }
                        _ => k += 1,
                    }
                }
            }
            k = k.min(chars.len());
            TokenKind::Literal
        } else {
            k += 1;
            TokenKind::Operator
        };
        debug_assert!(k > begin);
        out.push(CodeToken {
            text: &text[start..end_of(k)],
            kind,
        });
    }
    out
}
