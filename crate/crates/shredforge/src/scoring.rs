//! Score model transcripts against dataset ground truth.

use std::path::{Path, PathBuf};

use serde::Serialize;
use shredforge_core::metrics::{score_transcript, SampleKey, ScoreOptions, ScoreRecord};

use crate::dataset::list_samples;
use crate::error::{Error, Result};
use crate::fsutil::{canonical_json, read_string, write_atomic};
use crate::harness::{model_dir_name, read_transcript};

/// Line endings to LF and outer whitespace trimmed, the same cleanup
/// applied to model output.
pub fn normalize_reference(text: &str) -> String {
    text.replace("\r\n", "\n").replace('\r', "\n").trim().to_string()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelScores {
    pub model_name: String,
    pub records: Vec<ScoreRecord>,
    /// Samples with no transcript; they are left out of `records`.
    pub missing: Vec<String>,
}

/// Models with a results directory under `results`.
pub fn result_models(results: &Path) -> Result<Vec<String>> {
    let entries = std::fs::read_dir(results).map_err(|e| Error::io(results, e))?;
    let mut models = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(results, e))?;
        if entry.path().is_dir() {
            models.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    models.sort();
    Ok(models)
}

/// Score one model's transcripts. The model name recorded in the scores is
/// taken from the transcripts; `model_dir` is the results subdirectory.
pub fn score_model(dataset: &Path, results: &Path, model_dir: &str, opts: &ScoreOptions) -> Result<ModelScores> {
    let dir = results.join(model_dir_name(model_dir));
    if !dir.is_dir() {
        return Err(Error::io(
            &dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "results directory not found"),
        ));
    }
    let mut out = ModelScores {
        model_name: model_dir.to_string(),
        ..ModelScores::default()
    };
    for sample in list_samples(dataset)? {
        let path = dir.join(format!("{}.json", sample.sample_id));
        if !path.exists() {
            out.missing.push(sample.sample_id.clone());
            continue;
        }
        let t = read_transcript(&path)?;
        out.model_name = t.model_name.clone();
        let key = SampleKey {
            sample_id: &sample.sample_id,
            model_name: &t.model_name,
            category: sample.category,
            code_language: sample.code_language,
            n_pieces: sample.n,
        };
        let record = score_transcript(&key, &normalize_reference(&sample.ground_truth), &t.text, opts)
            .map_err(|e| Error::from(e).in_sample(&sample.sample_id))?;
        out.records.push(record);
    }
    Ok(out)
}

#[derive(Serialize)]
struct ScoreEcho<'a> {
    model_name: &'a str,
    options: &'a ScoreOptions,
    scored: usize,
    missing: &'a [String],
}

pub fn scores_path(out: &Path, model_dir: &str) -> PathBuf {
    out.join(format!("{}.jsonl", model_dir_name(model_dir)))
}

/// Write `<model>.jsonl` (one record per line) and `<model>.config.json`.
pub fn write_scores(out: &Path, model_dir: &str, scores: &ModelScores, opts: &ScoreOptions) -> Result<PathBuf> {
    let mut lines = String::new();
    for r in &scores.records {
        lines.push_str(&serde_json::to_string(r).map_err(|e| Error::validation("score", e.to_string()))?);
        lines.push('\n');
    }
    let path = scores_path(out, model_dir);
    write_atomic(&path, lines.as_bytes())?;
    let echo = ScoreEcho {
        model_name: &scores.model_name,
        options: opts,
        scored: scores.records.len(),
        missing: &scores.missing,
    };
    write_atomic(
        &out.join(format!("{}.config.json", model_dir_name(model_dir))),
        canonical_json(&echo)?.as_bytes(),
    )?;
    Ok(path)
}

pub fn parse_scores(text: &str) -> Result<Vec<ScoreRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::validation("scores", format!("line {}: {e}", i + 1))))
        .collect()
}

/// All records from `*.jsonl` files in a directory, or from a single file.
pub fn load_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    if path.is_file() {
        return parse_scores(&read_string(path)?);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    let mut records = Vec::new();
    for f in files {
        records.extend(parse_scores(&read_string(&f)?)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_cleanup() {
        assert_eq!(normalize_reference("a\r\nb\r\n\n"), "a\nb");
        assert_eq!(normalize_reference("  x "), "x");
    }

    #[test]
    fn missing_results_dir_names_path() {
        let d = tempfile::tempdir().unwrap();
        let err = score_model(d.path(), &d.path().join("nope"), "m", &ScoreOptions::default()).unwrap_err();
        assert!(err.to_string().contains("nope"));
        assert_eq!(err.class(), crate::error::ErrorClass::Runtime);
    }

    #[test]
    fn jsonl_parsing_reports_line() {
        let err = parse_scores("\n{bad}\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
