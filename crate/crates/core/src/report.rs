//! Aggregation of per-sample scores into summary cells and decay deltas.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Category, CodeLanguage};
use crate::error::{Error, Result};
use crate::metrics::ScoreRecord;

/// Which record fields define a group. Fields left out are pooled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupBy {
    pub model: bool,
    pub category: bool,
    /// Split code records by language as well as category.
    pub code_language: bool,
    pub n_pieces: bool,
}

impl GroupBy {
    pub const MODEL_N: GroupBy = GroupBy {
        model: true,
        category: false,
        code_language: false,
        n_pieces: true,
    };
}

/// Means over one group. `None` key fields mean "all".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub model_name: Option<String>,
    pub category: Option<Category>,
    pub code_language: Option<CodeLanguage>,
    pub n_pieces: Option<u32>,
    pub mean_ned: f64,
    pub mean_bleu: f64,
    pub mean_rouge: f64,
    pub mean_teds: Option<f64>,
    pub mean_codebleu: Option<f64>,
    pub sample_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Ned,
    Bleu,
    RougeL,
    Teds,
    CodeBleu,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Ned,
        Metric::Bleu,
        Metric::RougeL,
        Metric::Teds,
        Metric::CodeBleu,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Ned => "ned",
            Metric::Bleu => "bleu",
            Metric::RougeL => "rouge_l",
            Metric::Teds => "teds",
            Metric::CodeBleu => "codebleu",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Ned => "NED",
            Metric::Bleu => "BLEU",
            Metric::RougeL => "ROUGE-L",
            Metric::Teds => "TEDS",
            Metric::CodeBleu => "CodeBLEU",
        }
    }

    pub fn of(self, cell: &SummaryCell) -> Option<f64> {
        match self {
            Metric::Ned => Some(cell.mean_ned),
            Metric::Bleu => Some(cell.mean_bleu),
            Metric::RougeL => Some(cell.mean_rouge),
            Metric::Teds => cell.mean_teds,
            Metric::CodeBleu => cell.mean_codebleu,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "ned" => Ok(Metric::Ned),
            "bleu" => Ok(Metric::Bleu),
            "rouge" | "rouge_l" => Ok(Metric::RougeL),
            "teds" => Ok(Metric::Teds),
            "codebleu" => Ok(Metric::CodeBleu),
            _ => Err(Error::invalid(format!("unknown metric `{s}`"))),
        }
    }
}

type Key = (Option<String>, Option<Category>, Option<CodeLanguage>, Option<u32>);

/// Sum in a fixed order so the mean does not depend on record order.
fn mean(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    Some(values.iter().sum::<f64>() / n)
}

/// Arithmetic means per group, sorted by model, category, language and piece
/// count. Optional metrics average over the records that carry them.
pub fn aggregate(records: &[ScoreRecord], group_by: GroupBy) -> Result<Vec<SummaryCell>> {
    if records.is_empty() {
        return Err(Error::invalid("no score records to aggregate"));
    }
    let mut groups: BTreeMap<Key, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records {
        let key = (
            group_by.model.then(|| r.model_name.clone()),
            group_by.category.then_some(r.category),
            if group_by.code_language { r.code_language } else { None },
            group_by.n_pieces.then_some(r.n_pieces),
        );
        groups.entry(key).or_default().push(r);
    }
    Ok(groups
        .into_iter()
        .map(|((model_name, category, code_language, n_pieces), rs)| {
            let col = |f: fn(&ScoreRecord) -> Option<f64>| rs.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
            SummaryCell {
                model_name,
                category,
                code_language,
                n_pieces,
                mean_ned: mean(col(|r| Some(r.ned))).unwrap_or(0.0),
                mean_bleu: mean(col(|r| Some(r.bleu))).unwrap_or(0.0),
                mean_rouge: mean(col(|r| Some(r.rouge_l))).unwrap_or(0.0),
                mean_teds: mean(col(|r| r.teds)),
                mean_codebleu: mean(col(|r| r.codebleu)),
                sample_count: rs.len(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `(model, value(to_n) - value(from_n))`, sorted by model.
    pub deltas: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

/// Change of `metric` between two granularities, per model.
///
/// Uses cells with a model and piece count that pool all categories. Models
/// without both levels (or without the metric) are skipped with a warning.
pub fn decay(summary: &[SummaryCell], metric: Metric, from_n: u32, to_n: u32) -> DecayReport {
    let mut levels: BTreeMap<&str, BTreeMap<u32, Option<f64>>> = BTreeMap::new();
    for c in summary {
        if c.category.is_some() || c.code_language.is_some() {
            continue;
        }
        if let (Some(m), Some(n)) = (&c.model_name, c.n_pieces) {
            levels.entry(m.as_str()).or_default().insert(n, metric.of(c));
        }
    }
    let mut report = DecayReport::default();
    for (model, by_n) in levels {
        match (by_n.get(&from_n), by_n.get(&to_n)) {
            (Some(Some(a)), Some(Some(b))) => report.deltas.push((String::from(model), b - a)),
            (Some(_), Some(_)) => report
                .warnings
                .push(format!("{model}: {} is not available", metric.label())),
            (a, _) => {
                let missing = if a.is_none() { from_n } else { to_n };
                report.warnings.push(format!("{model}: no summary at N={missing}"));
            }
        }
    }
    report
}

/// Round half to even at two decimals.
pub fn round2(x: f64) -> f64 {
    libm::rint(x * 100.0) / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(model: &str, n: u32, ned: f64) -> ScoreRecord {
        ScoreRecord {
            sample_id: format!("s{n}"),
            model_name: String::from(model),
            category: Category::NewsEn,
            code_language: None,
            n_pieces: n,
            ned,
            bleu: 1.0 - ned,
            rouge_l: 0.5,
            teds: None,
            codebleu: None,
        }
    }

    #[test]
    fn means_and_groups() {
        let cells = aggregate(&[rec("m", 8, 0.2), rec("m", 8, 0.4)], GroupBy::MODEL_N).unwrap();
        assert_eq!(cells.len(), 1);
        assert!((cells[0].mean_ned - 0.3).abs() < 1e-12);
        assert_eq!(cells[0].sample_count, 2);
        assert_eq!(cells[0].mean_teds, None);

        let by_n = GroupBy {
            n_pieces: true,
            ..GroupBy::default()
        };
        let cells = aggregate(&[rec("m", 16, 0.2), rec("m", 8, 0.4), rec("k", 8, 0.1)], by_n).unwrap();
        let ns: Vec<_> = cells.iter().map(|c| c.n_pieces).collect();
        assert_eq!(ns, [Some(8), Some(16)]);
        assert_eq!(cells[0].model_name, None);
        assert!(aggregate(&[], by_n).is_err());
    }

    #[test]
    fn optional_metrics_average_where_present() {
        let mut a = rec("m", 8, 0.0);
        a.category = Category::Table;
        a.teds = Some(0.5);
        let b = rec("m", 8, 0.0);
        let cells = aggregate(&[a, b], GroupBy::MODEL_N).unwrap();
        assert_eq!(cells[0].mean_teds, Some(0.5));
    }

    #[test]
    fn decay_deltas_and_warnings() {
        let recs = [
            rec("a", 8, 0.33),
            rec("a", 16, 0.41),
            rec("b", 8, 0.5),
            rec("c", 8, 0.2),
            rec("c", 16, 0.2),
        ];
        let cells = aggregate(&recs, GroupBy::MODEL_N).unwrap();
        let d = decay(&cells, Metric::Ned, 8, 16);
        assert_eq!(d.deltas.len(), 2);
        assert_eq!(d.deltas[0].0, "a");
        assert_eq!(round2(d.deltas[0].1), 0.08);
        assert_eq!(d.deltas[1], (String::from("c"), 0.0));
        assert_eq!(d.warnings, ["b: no summary at N=16"]);
        let teds = decay(&cells, Metric::Teds, 8, 16);
        assert!(teds.deltas.is_empty());
        assert_eq!(teds.warnings.len(), 3);
    }

    #[test]
    fn rounding() {
        assert_eq!(round2(0.333), 0.33);
        assert_eq!(round2(0.507), 0.51);
        assert_eq!(round2(0.834), 0.83);
        assert_eq!(round2(0.125), 0.12);
        assert_eq!(round2(0.375), 0.38);
    }

    #[test]
    fn metric_names() {
        for m in Metric::ALL {
            assert_eq!(m.as_str().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("ROUGE-L".parse::<Metric>().unwrap(), Metric::RougeL);
        assert!("f1".parse::<Metric>().is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant(neds in proptest::collection::vec((0.0f64..1.0, 0usize..3), 1..30), seed in any::<u64>()) {
            let recs: Vec<_> = neds.iter().map(|(v, n)| rec("m", [8, 12, 16][*n], *v)).collect();
            let mut shuffled = recs.clone();
            let mut rng = crate::rng::RngStream::from_seed(seed);
            for i in (1..shuffled.len()).rev() {
                let j = rng.below(i as u32 + 1) as usize;
                shuffled.swap(i, j);
            }
            prop_assert_eq!(aggregate(&recs, GroupBy::MODEL_N).unwrap(), aggregate(&shuffled, GroupBy::MODEL_N).unwrap());
        }

        #[test]
        fn decay_antisymmetric(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let cells = aggregate(&[rec("m", 8, a), rec("m", 16, b)], GroupBy::MODEL_N).unwrap();
            let fwd = decay(&cells, Metric::Ned, 8, 16);
            let back = decay(&cells, Metric::Ned, 16, 8);
            prop_assert_eq!(fwd.deltas[0].1, -back.deltas[0].1);
        }

        #[test]
        fn rounding_error_bounded(x in 0.0f64..1.0) {
            prop_assert!((round2(x) - x).abs() <= 0.005 + 1e-12);
        }
    }
}
