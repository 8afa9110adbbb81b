//! Cohen's kappa for two annotators.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `matrix[i][j]` counts items labelled `i` by the first annotator and `j` by
/// the second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementCounts {
    pub matrix: Vec<Vec<u64>>,
}

impl AgreementCounts {
    pub fn new(matrix: Vec<Vec<u64>>) -> Result<Self> {
        let k = matrix.len();
        if k < 2 {
            return Err(Error::invalid("agreement matrix needs at least two labels"));
        }
        if matrix.iter().any(|row| row.len() != k) {
            return Err(Error::invalid("agreement matrix must be square"));
        }
        Ok(AgreementCounts { matrix })
    }

    pub fn total(&self) -> u64 {
        self.matrix.iter().flatten().sum()
    }
}

/// `(p_o - p_e) / (1 - p_e)`; exactly 1 when both annotators put every item
/// in the same single label.
pub fn compute_cohens_kappa(counts: &AgreementCounts) -> Result<f64> {
    let m = &counts.matrix;
    let k = m.len();
    if k < 2 || m.iter().any(|row| row.len() != k) {
        return Err(Error::invalid(
            "agreement matrix must be square with at least two labels",
        ));
    }
    let total = counts.total();
    if total == 0 {
        return Err(Error::invalid("agreement matrix has no items"));
    }
    let n = total as f64;
    let trace: u64 = (0..k).map(|i| m[i][i]).sum();
    let chance: u128 = (0..k)
        .map(|i| {
            let row: u64 = m[i].iter().sum();
            let col: u64 = m.iter().map(|r| r[i]).sum();
            u128::from(row) * u128::from(col)
        })
        .sum();
    let n2 = u128::from(total) * u128::from(total);
    if chance == n2 {
        return Ok(1.0);
    }
    let p_o = trace as f64 / n;
    let p_e = chance as f64 / n2 as f64;
    Ok((p_o - p_e) / (1.0 - p_e))
}
