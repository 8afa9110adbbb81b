//! Directory ingestion of local corpora.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use shredforge_core::{Category, CodeLanguage, SourceDocument};
use walkdir::WalkDir;

use crate::error::{Error, Result};

const SIDECAR_SUFFIX: &str = ".meta.json";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileError {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ingested {
    /// Sorted by id.
    pub documents: Vec<SourceDocument>,
    pub errors: Vec<FileError>,
}

fn read_sidecar(path: &Path) -> std::result::Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let map: BTreeMap<String, serde_json::Value> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    map.into_iter()
        .map(|(k, v)| match v {
            serde_json::Value::String(s) => Ok((k, s)),
            other => Err(format!("metadata value for `{k}` is not a string: {other}")),
        })
        .collect()
}

fn load_file(path: &Path, rel: &str, category: Category) -> std::result::Result<SourceDocument, String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    let text = String::from_utf8(bytes).map_err(|e| format!("not valid UTF-8: {e}"))?;
    let code_language = if category == Category::Code {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        Some(CodeLanguage::from_extension(ext).ok_or_else(|| format!("unknown code extension `{ext}`"))?)
    } else {
        None
    };
    let id = format!("{category}/{rel}");
    let mut doc = SourceDocument::new(id, category, code_language, text).map_err(|e| e.to_string())?;
    doc.metadata.insert("origin".into(), rel.to_string());
    let sidecar = PathBuf::from(format!("{}{SIDECAR_SUFFIX}", path.display()));
    if sidecar.is_file() {
        let extra = read_sidecar(&sidecar).map_err(|e| format!("{}: {e}", sidecar.display()))?;
        doc.metadata.extend(extra);
    }
    Ok(doc)
}

/// One document per file under `root`, with ids `<category>/<relative path>`.
///
/// Files that cannot be decoded or typed are reported in `errors` and
/// skipped. `<file>.meta.json` sidecars add string metadata to their file.
pub fn ingest_directory(root: &Path, category: Category) -> Result<Ingested> {
    if !root.is_dir() {
        return Err(Error::Ingest(format!("{} is not a readable directory", root.display())));
    }
    let mut out = Ingested::default();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                out.errors.push(FileError {
                    path: e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf()),
                    message: e.to_string(),
                });
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let name = entry.file_name().to_string_lossy();
        if name.ends_with(SIDECAR_SUFFIX) || name.starts_with('.') {
            continue;
        }
        let rel = path
            .strip_prefix(root)
            .unwrap_or(path)
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        match load_file(path, &rel, category) {
            Ok(doc) => out.documents.push(doc),
            Err(message) => out.errors.push(FileError {
                path: path.to_path_buf(),
                message,
            }),
        }
    }
    out.documents.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// Ingest `root/<category>` for each requested category that exists.
pub fn ingest_corpus(root: &Path, categories: &[Category]) -> Result<Ingested> {
    if !root.is_dir() {
        return Err(Error::Ingest(format!("{} is not a readable directory", root.display())));
    }
    let mut all = Ingested::default();
    for &c in categories {
        let dir = root.join(c.as_str());
        if !dir.is_dir() {
            continue;
        }
        let part = ingest_directory(&dir, c)?;
        all.documents.extend(part.documents);
        all.errors.extend(part.errors);
    }
    all.documents.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(all)
}
