//! Code-aware BLEU with four components: token BLEU, keyword-weighted
//! unigram match, a syntax proxy (token-kind sequence similarity) and a
//! dataflow proxy (overlap of adjacent identifier pairs).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::bleu::{bleu, brevity_penalty, BleuConfig};
use super::edit::ned_seq;
use super::tokenize::{code_tokens, CodeToken, TokenKind};
use crate::corpus::CodeLanguage;
use crate::error::{Error, Result};

const KEYWORD_WEIGHT: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeBleu {
    pub score: f64,
    pub ngram: f64,
    pub weighted_ngram: f64,
    pub syntax: f64,
    pub dataflow: f64,
}

fn weighted_unigram(reference: &[CodeToken<'_>], hypothesis: &[CodeToken<'_>]) -> f64 {
    if hypothesis.is_empty() {
        return 0.0;
    }
    let mut refs: BTreeMap<&str, usize> = BTreeMap::new();
    for t in reference {
        *refs.entry(t.text).or_default() += 1;
    }
    let mut hyps: BTreeMap<&str, (usize, bool)> = BTreeMap::new();
    for t in hypothesis {
        let e = hyps.entry(t.text).or_insert((0, t.kind == TokenKind::Keyword));
        e.0 += 1;
    }
    let (mut matched, mut total) = (0.0, 0.0);
    for (tok, (count, keyword)) in hyps {
        let w = if keyword { KEYWORD_WEIGHT } else { 1.0 };
        matched += w * count.min(refs.get(tok).copied().unwrap_or(0)) as f64;
        total += w * count as f64;
    }
    brevity_penalty(reference.len(), hypothesis.len()) * matched / total
}

fn identifier_pairs<'a>(tokens: &[CodeToken<'a>]) -> BTreeSet<(&'a str, &'a str)> {
    let ids: Vec<&str> = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Identifier)
        .map(|t| t.text)
        .collect();
    ids.windows(2).map(|w| (w[0], w[1])).collect()
}

fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// CodeBLEU as a weighted sum of its components. `weights` apply to
/// (ngram, weighted_ngram, syntax, dataflow) and must sum to one.
pub fn codebleu(reference: &str, hypothesis: &str, language: CodeLanguage, weights: [f64; 4]) -> Result<CodeBleu> {
    if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("codebleu weights must be non-negative and sum to 1"));
    }
    let r = code_tokens(reference, language);
    let h = code_tokens(hypothesis, language);
    let (ngram, weighted_ngram, syntax, dataflow) = if r.is_empty() && h.is_empty() {
        (1.0, 1.0, 1.0, 1.0)
    } else {
        let rt: Vec<&str> = r.iter().map(|t| t.text).collect();
        let ht: Vec<&str> = h.iter().map(|t| t.text).collect();
        let rk: Vec<TokenKind> = r.iter().map(|t| t.kind).collect();
        let hk: Vec<TokenKind> = h.iter().map(|t| t.kind).collect();
        (
            bleu(&rt, &ht, &BleuConfig::default()),
            weighted_unigram(&r, &h),
            1.0 - ned_seq(&rk, &hk),
            jaccard(&identifier_pairs(&r), &identifier_pairs(&h)),
        )
    };
    let score = weights[0] * ngram + weights[1] * weighted_ngram + weights[2] * syntax + weights[3] * dataflow;
    Ok(CodeBleu {
        score: score.clamp(0.0, 1.0),
        ngram,
        weighted_ngram,
        syntax,
        dataflow,
    })
}

pub const UNIFORM: [f64; 4] = [0.25; 4];
