//! Typed corpus documents and the category-specific length filters.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::table::parse_table_tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    NewsEn,
    NewsZh,
    Code,
    Table,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::NewsEn, Category::NewsZh, Category::Code, Category::Table];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::NewsEn => "news_en",
            Category::NewsZh => "news_zh",
            Category::Code => "code",
            Category::Table => "table",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown category `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeLanguage {
    Cpp,
    Java,
    Python,
}

impl CodeLanguage {
    pub const ALL: [CodeLanguage; 3] = [CodeLanguage::Cpp, CodeLanguage::Java, CodeLanguage::Python];

    pub fn as_str(self) -> &'static str {
        match self {
            CodeLanguage::Cpp => "cpp",
            CodeLanguage::Java => "java",
            CodeLanguage::Python => "python",
        }
    }

    /// Language for a file extension (without the dot), case-insensitive.
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "py" => Some(CodeLanguage::Python),
            "java" => Some(CodeLanguage::Java),
            "cpp" | "cc" | "cxx" | "c++" | "hpp" | "hh" | "hxx" | "h" => Some(CodeLanguage::Cpp),
            _ => None,
        }
    }
}

impl fmt::Display for CodeLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeLanguage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CodeLanguage::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown code language `{s}`")))
    }
}

/// One corpus item. `text` is the ground truth a model has to restore.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceDocument {
    pub id: String,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_language: Option<CodeLanguage>,
    pub text: String,
    pub char_count: usize,
    pub byte_count: usize,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl SourceDocument {
    /// Build a document, checking the category invariants.
    pub fn new(
        id: impl Into<String>,
        category: Category,
        code_language: Option<CodeLanguage>,
        text: impl Into<String>,
    ) -> Result<Self> {
        let text = text.into();
        match (category, code_language) {
            (Category::Code, None) => return Err(Error::invalid("code documents need a code_language")),
            (c, Some(_)) if c != Category::Code => {
                return Err(Error::invalid(format!(
                    "code_language is only allowed for code documents, got {c}"
                )))
            }
            _ => {}
        }
        if category == Category::Table {
            parse_table_tree(&text)?;
        }
        Ok(SourceDocument {
            id: id.into(),
            category,
            code_language,
            char_count: text.chars().count(),
            byte_count: text.len(),
            text,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthFilterRules {
    pub news_min_chars: usize,
    pub news_max_chars: usize,
    pub code_min_bytes: usize,
    pub code_max_bytes: usize,
}

impl Default for LengthFilterRules {
    fn default() -> Self {
        LengthFilterRules {
            news_min_chars: 800,
            news_max_chars: 2500,
            code_min_bytes: 1024,
            code_max_bytes: 4096,
        }
    }
}

impl LengthFilterRules {
    pub fn validate(&self) -> Result<()> {
        let ok = self.news_min_chars > 0
            && self.code_min_bytes > 0
            && self.news_min_chars < self.news_max_chars
            && self.code_min_bytes < self.code_max_bytes;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("inconsistent length filter rules {self:?}")))
        }
    }

    pub fn accepts(&self, doc: &SourceDocument) -> bool {
        match doc.category {
            Category::NewsEn | Category::NewsZh => {
                (self.news_min_chars..=self.news_max_chars).contains(&doc.char_count)
            }
            Category::Code => (self.code_min_bytes..=self.code_max_bytes).contains(&doc.byte_count),
            Category::Table => true,
        }
    }
}

/// Keep news within the character bounds and code within the byte bounds
/// (both inclusive). Tables always pass. Order is preserved.
pub fn filter_by_length(docs: &[SourceDocument], rules: &LengthFilterRules) -> Vec<SourceDocument> {
    docs.iter().filter(|d| rules.accepts(d)).cloned().collect()
}

/// Sparse histogram of character counts over half-open bins
/// `[k*bin_width, (k+1)*bin_width)`. Only non-empty bins are returned, in
/// ascending order of `bin_start`.
pub fn length_histogram(docs: &[SourceDocument], bin_width: usize) -> Result<Vec<(usize, usize)>> {
    if bin_width == 0 {
        return Err(Error::invalid("bin_width must be positive"));
    }
    let mut bins: BTreeMap<usize, usize> = BTreeMap::new();
    for d in docs {
        *bins.entry(d.char_count / bin_width * bin_width).or_default() += 1;
    }
    Ok(bins.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use proptest::prelude::*;

    fn news(n: usize) -> SourceDocument {
        SourceDocument::new(format!("n{n}"), Category::NewsEn, None, "x".repeat(n)).unwrap()
    }

    fn code(bytes: usize) -> SourceDocument {
        SourceDocument::new(
            format!("c{bytes}"),
            Category::Code,
            Some(CodeLanguage::Python),
            "#".repeat(bytes),
        )
        .unwrap()
    }

    #[test]
    fn news_bounds_inclusive() {
        let rules = LengthFilterRules::default();
        let kept = filter_by_length(&[news(799), news(800), news(2500), news(2501)], &rules);
        let ids: Vec<_> = kept.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["n800", "n2500"]);
    }

    #[test]
    fn code_bounds_in_bytes() {
        let rules = LengthFilterRules::default();
        assert!(rules.accepts(&code(2048)));
        assert!(rules.accepts(&code(1024)));
        assert!(!rules.accepts(&code(1023)));
        assert!(!rules.accepts(&code(4097)));
        // Multi-byte characters count by bytes for code.
        let cjk = SourceDocument::new("z", Category::Code, Some(CodeLanguage::Cpp), "中".repeat(400)).unwrap();
        assert_eq!(cjk.byte_count, 1200);
        assert!(rules.accepts(&cjk));
    }

    #[test]
    fn char_count_counts_scalars() {
        let d = SourceDocument::new("z", Category::NewsZh, None, "中国 ab").unwrap();
        assert_eq!((d.char_count, d.byte_count), (5, 9));
    }

    #[test]
    fn tables_always_kept() {
        let t = SourceDocument::new("t", Category::Table, None, "<table><tr><td>a</td></tr></table>").unwrap();
        assert_eq!(filter_by_length(&[t.clone()], &LengthFilterRules::default()), [t]);
    }

    #[test]
    fn category_invariants_enforced() {
        assert!(SourceDocument::new("a", Category::Code, None, "x").is_err());
        assert!(SourceDocument::new("a", Category::NewsEn, Some(CodeLanguage::Java), "x").is_err());
        assert!(SourceDocument::new("a", Category::Table, None, "<tr></tr>").is_err());
    }

    #[test]
    fn histogram_examples() {
        assert_eq!(length_histogram(&[], 400).unwrap(), []);
        let docs = [news(100), news(399), news(400)];
        assert_eq!(length_histogram(&docs, 400).unwrap(), [(0, 2), (400, 1)]);
        assert_eq!(length_histogram(&[news(1200)], 400).unwrap(), [(1200, 1)]);
        assert!(length_histogram(&docs, 0).is_err());
    }

    #[test]
    fn rules_validation() {
        assert!(LengthFilterRules::default().validate().is_ok());
        let bad = LengthFilterRules {
            news_min_chars: 10,
            news_max_chars: 5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("news_zh".parse::<Category>().unwrap(), Category::NewsZh);
        assert!("blog".parse::<Category>().is_err());
        assert_eq!(CodeLanguage::from_extension("PY"), Some(CodeLanguage::Python));
        assert_eq!(CodeLanguage::from_extension("rs"), None);
    }

    fn arb_doc() -> impl Strategy<Value = SourceDocument> {
        (0usize..3, 0usize..5000).prop_map(|(k, len)| match k {
            0 => news(len),
            1 => code(len.max(1)),
            _ => SourceDocument::new("t", Category::Table, None, String::from("<table></table>")).unwrap(),
        })
    }

    proptest! {
        #[test]
        fn filter_idempotent(docs in proptest::collection::vec(arb_doc(), 0..30)) {
            let rules = LengthFilterRules::default();
            let once = filter_by_length(&docs, &rules);
            prop_assert_eq!(filter_by_length(&once, &rules), once);
        }

        #[test]
        fn histogram_counts_sum(docs in proptest::collection::vec(arb_doc(), 0..30), w in 1usize..1000) {
            let h = length_histogram(&docs, w).unwrap();
            prop_assert_eq!(h.iter().map(|(_, c)| c).sum::<usize>(), docs.len());
            prop_assert!(h.windows(2).all(|p| p[0].0 < p[1].0));
        }
    }
}
