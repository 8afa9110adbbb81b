//! Single-reference BLEU with clipped n-gram precision and brevity penalty.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    #[default]
    None,
    /// Add one to numerator and denominator of every precision with n >= 2.
    AddOneCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BleuConfig {
    pub max_n: usize,
    pub weights: Vec<f64>,
    pub smoothing: Smoothing,
}

impl Default for BleuConfig {
    fn default() -> Self {
        Self::uniform(4, Smoothing::None)
    }
}

impl BleuConfig {
    pub fn uniform(max_n: usize, smoothing: Smoothing) -> Self {
        BleuConfig {
            max_n,
            weights: vec![1.0 / max_n as f64; max_n],
            smoothing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 || self.weights.len() != self.max_n {
            return Err(Error::invalid(format!(
                "bleu needs {} weights, got {}",
                self.max_n,
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::invalid("bleu weights must be non-negative"));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("bleu weights sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

fn ngram_counts<T: Ord>(tokens: &[T], n: usize) -> BTreeMap<&[T], usize> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= n {
        for g in tokens.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

/// `(clipped matches, hypothesis n-gram total)` for order `n`.
pub fn clipped_counts<T: Ord>(reference: &[T], hypothesis: &[T], n: usize) -> (usize, usize) {
    let refs = ngram_counts(reference, n);
    let hyps = ngram_counts(hypothesis, n);
    let matched = hyps
        .iter()
        .map(|(g, c)| (*c).min(refs.get(g).copied().unwrap_or(0)))
        .sum();
    (matched, hypothesis.len().saturating_sub(n - 1))
}

pub fn brevity_penalty(reference_len: usize, hypothesis_len: usize) -> f64 {
    if hypothesis_len == 0 {
        0.0
    } else if hypothesis_len > reference_len {
        1.0
    } else {
        libm::exp(1.0 - reference_len as f64 / hypothesis_len as f64)
    }
}

/// BLEU in `[0, 1]`.
///
/// Orders longer than the reference have no reference n-grams at all; they
/// are dropped and the remaining weights renormalized, so that a short
/// sequence compared with itself still scores 1. An empty hypothesis scores 0.
pub fn bleu<T: Ord>(reference: &[T], hypothesis: &[T], cfg: &BleuConfig) -> f64 {
    if hypothesis.is_empty() {
        return 0.0;
    }
    let orders = cfg.max_n.min(reference.len());
    let weight_sum: f64 = cfg.weights.iter().take(orders).sum();
    if orders == 0 || weight_sum <= 0.0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=orders {
        let w = cfg.weights[n - 1] / weight_sum;
        let (mut matched, mut total) = clipped_counts(reference, hypothesis, n);
        if n >= 2 && cfg.smoothing == Smoothing::AddOneCounts {
            matched += 1;
            total += 1;
        }
        if matched == 0 || total == 0 {
            if w > 0.0 {
                return 0.0;
            }
            continue;
        }
        log_sum += w * libm::log(matched as f64 / total as f64);
    }
    (brevity_penalty(reference.len(), hypothesis.len()) * libm::exp(log_sum)).clamp(0.0, 1.0)
}
