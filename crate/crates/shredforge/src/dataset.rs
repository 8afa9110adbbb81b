//! Samples on disk: `<root>/<category>/<n>/<sample_id>/{composite.png, manifest.json}`
//! plus `<root>/config.json`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use shredforge_core::font::FontSet;
use shredforge_core::pipeline::{shred_document, FragmentRecord, ShredConfig};
use shredforge_core::{Category, CodeLanguage, Raster, SourceDocument};

use crate::error::{Error, Result};
use crate::fsutil::{canonical_json, read, read_string, write_atomic};
use crate::imageio::{decode_png, encode_png_rgb};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const COMPOSITE: &str = "composite.png";
pub const CONFIG: &str = "config.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShredSample {
    pub schema: u32,
    pub sample_id: String,
    pub doc_id: String,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_language: Option<CodeLanguage>,
    pub n: u32,
    pub rng_seed: u64,
    /// Relative to the dataset root, `/`-separated.
    pub composite_path: String,
    pub ground_truth: String,
    pub ground_truth_sha256: String,
    pub fragments: Vec<FragmentRecord>,
}

const REQUIRED: [&str; 10] = [
    "schema",
    "sample_id",
    "doc_id",
    "category",
    "n",
    "rng_seed",
    "composite_path",
    "ground_truth",
    "ground_truth_sha256",
    "fragments",
];

/// A generated sample together with its composite image.
#[derive(Clone, Debug, PartialEq)]
pub struct BuiltSample {
    pub sample: ShredSample,
    pub composite: Raster,
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Filesystem-safe sample id: `<doc id with separators replaced>_n<n>`.
pub fn sample_id_for(doc_id: &str, n: u32) -> String {
    let safe: String = doc_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}_n{n}")
}

fn sample_rel_dir(category: Category, n: u32, sample_id: &str) -> String {
    format!("{category}/{n}/{sample_id}")
}

/// Run the full generation pipeline for one document at one granularity.
pub fn build_sample(doc: &SourceDocument, n: u32, config: &ShredConfig, fonts: &FontSet) -> Result<BuiltSample> {
    let sample_id = sample_id_for(&doc.id, n);
    let shredded = shred_document(doc, n, config, fonts).map_err(|e| Error::from(e).in_sample(&sample_id))?;
    let sample = ShredSample {
        schema: SCHEMA_VERSION,
        composite_path: format!("{}/{COMPOSITE}", sample_rel_dir(doc.category, n, &sample_id)),
        sample_id,
        doc_id: doc.id.clone(),
        category: doc.category,
        code_language: doc.code_language,
        n,
        rng_seed: shredded.rng_seed,
        ground_truth_sha256: sha256_hex(&doc.text),
        ground_truth: doc.text.clone(),
        fragments: shredded.fragments,
    };
    Ok(BuiltSample {
        sample,
        composite: shredded.composite,
    })
}

/// Write the composite and manifest under `root`; returns the sample directory.
pub fn write_sample(built: &BuiltSample, root: &Path) -> Result<PathBuf> {
    let s = &built.sample;
    let dir = root.join(sample_rel_dir(s.category, s.n, &s.sample_id));
    write_atomic(&root.join(&s.composite_path), &encode_png_rgb(&built.composite)?)?;
    write_atomic(&dir.join(MANIFEST), canonical_json(s)?.as_bytes())?;
    Ok(dir)
}

fn validate(s: &ShredSample) -> Result<()> {
    if s.schema != SCHEMA_VERSION {
        return Err(Error::validation(
            "schema",
            format!("unsupported schema version {}", s.schema),
        ));
    }
    if sha256_hex(&s.ground_truth) != s.ground_truth_sha256.to_ascii_lowercase() {
        return Err(Error::validation("ground_truth_sha256", "does not match ground_truth"));
    }
    if s.fragments.len() != s.n as usize {
        return Err(Error::validation(
            "fragments",
            format!("expected {} fragments, found {}", s.n, s.fragments.len()),
        ));
    }
    if (s.category == Category::Code) != s.code_language.is_some() {
        return Err(Error::validation(
            "code_language",
            "must be present exactly for code samples",
        ));
    }
    Ok(())
}

/// Parse and check a manifest. Unknown fields are ignored.
pub fn parse_manifest(text: &str) -> Result<ShredSample> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::validation("manifest", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::validation("manifest", "expected a JSON object"))?;
    if let Some(missing) = REQUIRED.iter().find(|k| !obj.contains_key(**k)) {
        return Err(Error::validation(*missing, "missing field"));
    }
    let sample: ShredSample = serde_json::from_value(value.clone()).map_err(|e| {
        let field = obj
            .keys()
            .find(|k| e.to_string().contains(&format!("`{k}`")))
            .cloned()
            .unwrap_or_else(|| "manifest".into());
        Error::validation(field, e.to_string())
    })?;
    validate(&sample)?;
    Ok(sample)
}

/// Read `dir/manifest.json`.
pub fn read_sample(dir: &Path) -> Result<ShredSample> {
    let path = dir.join(MANIFEST);
    parse_manifest(&read_string(&path)?).map_err(|e| match e {
        Error::Validation { field, message } => Error::validation(field, format!("{}: {message}", path.display())),
        other => other,
    })
}

pub fn read_composite(root: &Path, sample: &ShredSample) -> Result<Raster> {
    decode_png(&read(&root.join(&sample.composite_path))?)
}

/// Every sample under `root`, sorted by category, n, then sample id.
pub fn list_samples(root: &Path) -> Result<Vec<ShredSample>> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
        ));
    }
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root)
        .min_depth(4)
        .max_depth(4)
        .sort_by_file_name()
    {
        let entry = entry.map_err(|e| Error::io(root, e.into()))?;
        if entry.file_type().is_file() && entry.file_name() == MANIFEST {
            out.push(read_sample(entry.path().parent().unwrap_or(root))?);
        }
    }
    out.sort_by(|a, b| (a.category, a.n, &a.sample_id).cmp(&(b.category, b.n, &b.sample_id)));
    Ok(out)
}

/// Echo the generation config at `<root>/config.json`.
pub fn write_dataset_config(root: &Path, config: &ShredConfig) -> Result<()> {
    write_atomic(&root.join(CONFIG), canonical_json(config)?.as_bytes())
}

pub fn read_dataset_config(root: &Path) -> Result<ShredConfig> {
    let path = root.join(CONFIG);
    serde_json::from_str(&read_string(&path)?)
        .map_err(|e| Error::validation("config", format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use shredforge_core::compositor::CompositeSpec;
    use shredforge_core::rasterizer::PageStyle;

    fn config() -> ShredConfig {
        ShredConfig {
            master_seed: 7,
            style: PageStyle {
                page_width_px: 320,
                font_size_px: 12,
                margin_px: 12,
                ..PageStyle::default()
            },
            composite: CompositeSpec {
                canvas_px: 768,
                ..CompositeSpec::default()
            },
            ..ShredConfig::default()
        }
    }

    fn doc() -> SourceDocument {
        SourceDocument::new(
            "news_en/x y.txt",
            Category::NewsEn,
            None,
            "Lorem ipsum dolor sit amet. ".repeat(12),
        )
        .unwrap()
    }

    #[test]
    fn sha_of_known_string() {
        assert_eq!(
            sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn ids_are_path_safe() {
        assert_eq!(sample_id_for("news_en/x y.txt", 8), "news_en_x_y.txt_n8");
    }

    #[test]
    fn write_then_read_round_trips() {
        let d = tempfile::tempdir().unwrap();
        let fonts = FontSet::builtin(12);
        let built = build_sample(&doc(), 8, &config(), &fonts).unwrap();
        assert_eq!(built.sample.fragments.len(), 8);
        let dir = write_sample(&built, d.path()).unwrap();
        assert!(dir.ends_with("news_en/8/news_en_x_y.txt_n8"));
        let back = read_sample(&dir).unwrap();
        assert_eq!(back, built.sample);
        assert_eq!(read_composite(d.path(), &back).unwrap().pixels.len(), 768 * 768);
        assert_eq!(list_samples(d.path()).unwrap(), vec![back]);
    }

    #[test]
    fn manifest_checks() {
        let fonts = FontSet::builtin(12);
        let built = build_sample(&doc(), 8, &config(), &fonts).unwrap();
        let text = canonical_json(&built.sample).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();

        v["future_field"] = serde_json::json!({"x": 1});
        assert_eq!(parse_manifest(&v.to_string()).unwrap(), built.sample);

        let mut bad = v.clone();
        bad["ground_truth_sha256"] = serde_json::json!("00");
        match parse_manifest(&bad.to_string()) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "ground_truth_sha256"),
            other => panic!("{other:?}"),
        }

        let mut missing = v.clone();
        missing.as_object_mut().unwrap().remove("rng_seed");
        match parse_manifest(&missing.to_string()) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "rng_seed"),
            other => panic!("{other:?}"),
        }

        let mut wrong_type = v;
        wrong_type["n"] = serde_json::json!("eight");
        assert!(matches!(
            parse_manifest(&wrong_type.to_string()),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn category_guard_carries_sample_context() {
        let mut cfg = config();
        cfg.categories = vec![Category::Code];
        let err = build_sample(&doc(), 8, &cfg, &FontSet::builtin(12)).unwrap_err();
        assert!(err.to_string().contains("news_en_x_y.txt_n8"));
        assert_eq!(err.class(), crate::error::ErrorClass::Validation);
    }
}
