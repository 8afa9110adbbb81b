//! Per-sample scoring: picks tokenizer and metric set by category.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::bleu::{bleu, BleuConfig, Smoothing};
use super::codebleu::{codebleu, UNIFORM};
use super::edit::ned;
use super::lcs::rouge_l;
use super::table::{parse_table_tree, strip_tags};
use super::ted::teds;
use super::tokenize::{tokenize, TokenizerMode};
use crate::corpus::{Category, CodeLanguage};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreOptions {
    pub beta: f64,
    pub bleu: BleuConfig,
    pub codebleu_weights: [f64; 4],
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            beta: 1.0,
            bleu: BleuConfig::default(),
            codebleu_weights: UNIFORM,
        }
    }
}

impl ScoreOptions {
    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Self {
        self.bleu.smoothing = smoothing;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub sample_id: String,
    pub model_name: String,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_language: Option<CodeLanguage>,
    pub n_pieces: u32,
    pub ned: f64,
    pub bleu: f64,
    pub rouge_l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub teds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codebleu: Option<f64>,
}

/// Identity of the sample being scored.
#[derive(Clone, Debug)]
pub struct SampleKey<'a> {
    pub sample_id: &'a str,
    pub model_name: &'a str,
    pub category: Category,
    pub code_language: Option<CodeLanguage>,
    pub n_pieces: u32,
}

/// Score one restored text against its ground truth.
///
/// NED always runs on the raw strings. Tables get TEDS on the parsed markup
/// (0 when the hypothesis does not parse) and BLEU/ROUGE-L on flattened cell
/// text; code additionally gets CodeBLEU.
pub fn score_transcript(
    key: &SampleKey<'_>,
    reference: &str,
    hypothesis: &str,
    opts: &ScoreOptions,
) -> Result<ScoreRecord> {
    opts.bleu.validate()?;
    let mode = TokenizerMode::for_category(key.category, key.code_language);
    let mut teds_score = None;
    let mut codebleu_score = None;

    let (ref_text, hyp_text): (String, String) = match key.category {
        Category::Table => {
            let reference_tree = parse_table_tree(reference)?;
            let hyp_tree = parse_table_tree(hypothesis).ok();
            teds_score = Some(hyp_tree.as_ref().map_or(0.0, |h| teds(&reference_tree, h)));
            let hyp_flat = hyp_tree.map_or_else(|| strip_tags(hypothesis), |t| t.flatten_text());
            (reference_tree.flatten_text(), hyp_flat)
        }
        _ => (String::from(reference), String::from(hypothesis)),
    };
    if let (Category::Code, Some(lang)) = (key.category, key.code_language) {
        codebleu_score = Some(codebleu(reference, hypothesis, lang, opts.codebleu_weights)?.score);
    }

    let r: Vec<&str> = tokenize(&ref_text, mode);
    let h: Vec<&str> = tokenize(&hyp_text, mode);
    Ok(ScoreRecord {
        sample_id: key.sample_id.into(),
        model_name: key.model_name.into(),
        category: key.category,
        code_language: key.code_language,
        n_pieces: key.n_pieces,
        ned: ned(reference, hypothesis),
        bleu: bleu(&r, &h, &opts.bleu),
        rouge_l: rouge_l(&r, &h, opts.beta)?,
        teds: teds_score,
        codebleu: codebleu_score,
    })
}
