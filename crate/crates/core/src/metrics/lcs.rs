//! Longest common subsequence and ROUGE-L.

use alloc::vec;

use crate::error::{Error, Result};

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

/// ROUGE-L F-measure. `beta` weights recall over precision; 1 is balanced.
///
/// Two empty sequences score 1; one empty sequence scores 0.
pub fn rouge_l<T: PartialEq>(reference: &[T], hypothesis: &[T], beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid("rouge_l beta must be positive"));
    }
    match (reference.is_empty(), hypothesis.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let lcs = lcs_len(reference, hypothesis);
    if lcs == 0 {
        return Ok(0.0);
    }
    let recall = lcs as f64 / reference.len() as f64;
    let precision = lcs as f64 / hypothesis.len() as f64;
    let b2 = beta * beta;
    Ok((1.0 + b2) * recall * precision / (recall + b2 * precision))
}
