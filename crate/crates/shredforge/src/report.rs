//! Summary tables, decay and radar charts written from score records.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use shredforge_core::metrics::ScoreRecord;
use shredforge_core::report::{aggregate, decay, round2, GroupBy, Metric, SummaryCell};
use shredforge_core::{Category, CodeLanguage};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            _ => Err(Error::validation(
                "format",
                format!("expected markdown or csv, got `{s}`"),
            )),
        }
    }
}

fn fmt2(x: f64) -> String {
    format!("{:.2}", round2(x))
}

fn opt_str<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Render summary cells. Markdown shows values at two decimals (half to
/// even); CSV keeps full precision.
pub fn emit_table(cells: &[SummaryCell], format: TableFormat) -> Result<String> {
    if cells.is_empty() {
        return Err(Error::validation("cells", "no summary cells to render"));
    }
    match format {
        TableFormat::Markdown => Ok(markdown(cells)),
        TableFormat::Csv => csv_table(cells),
    }
}

fn markdown(cells: &[SummaryCell]) -> String {
    let has_model = cells.iter().any(|c| c.model_name.is_some());
    let has_cat = cells.iter().any(|c| c.category.is_some());
    let has_lang = cells.iter().any(|c| c.code_language.is_some());
    let has_n = cells.iter().any(|c| c.n_pieces.is_some());
    let has_teds = cells.iter().any(|c| c.mean_teds.is_some());
    let has_cb = cells.iter().any(|c| c.mean_codebleu.is_some());

    let mut header = Vec::new();
    let keys = [
        (has_model, "Model"),
        (has_cat, "Category"),
        (has_lang, "Language"),
        (has_n, "N"),
    ];
    header.extend(keys.iter().filter(|k| k.0).map(|k| k.1));
    header.push("NED / BLEU / ROUGE-L");
    if has_teds {
        header.push("TEDS");
    }
    if has_cb {
        header.push("CodeBLEU");
    }
    header.push("Samples");

    let mut out = format!("| {} |\n|", header.join(" | "));
    for _ in &header {
        out.push_str("---|");
    }
    out.push('\n');
    for c in cells {
        let mut row = Vec::new();
        if has_model {
            row.push(opt_str(&c.model_name));
        }
        if has_cat {
            row.push(opt_str(&c.category));
        }
        if has_lang {
            row.push(opt_str(&c.code_language.map(CodeLanguage::as_str)));
        }
        if has_n {
            row.push(opt_str(&c.n_pieces));
        }
        row.push(format!(
            "{} / {} / {}",
            fmt2(c.mean_ned),
            fmt2(c.mean_bleu),
            fmt2(c.mean_rouge)
        ));
        if has_teds {
            row.push(c.mean_teds.map_or_else(|| "-".into(), fmt2));
        }
        if has_cb {
            row.push(c.mean_codebleu.map_or_else(|| "-".into(), fmt2));
        }
        row.push(c.sample_count.to_string());
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}

fn csv_table(cells: &[SummaryCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "model",
        "category",
        "code_language",
        "n_pieces",
        "ned",
        "bleu",
        "rouge_l",
        "teds",
        "codebleu",
        "sample_count",
    ];
    let csv_err = |e: csv::Error| Error::validation("csv", e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for c in cells {
        w.write_record([
            opt_str(&c.model_name),
            opt_str(&c.category),
            opt_str(&c.code_language.map(CodeLanguage::as_str)),
            opt_str(&c.n_pieces),
            c.mean_ned.to_string(),
            c.mean_bleu.to_string(),
            c.mean_rouge.to_string(),
            opt_str(&c.mean_teds),
            opt_str(&c.mean_codebleu),
            c.sample_count.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::validation("csv", e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::validation("csv", e.to_string()))
}

/// One radar axis: a category, narrowed to a language for code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadarDim {
    pub label: String,
    pub category: Category,
    pub code_language: Option<CodeLanguage>,
}

impl RadarDim {
    pub fn parse(label: &str) -> Result<Self> {
        let (category, code_language) = match label {
            "en" | "news_en" => (Category::NewsEn, None),
            "zh" | "news_zh" => (Category::NewsZh, None),
            "table" => (Category::Table, None),
            "cpp" => (Category::Code, Some(CodeLanguage::Cpp)),
            "java" => (Category::Code, Some(CodeLanguage::Java)),
            "python" => (Category::Code, Some(CodeLanguage::Python)),
            _ => {
                return Err(Error::validation(
                    "dimension",
                    format!("unknown radar dimension `{label}`"),
                ))
            }
        };
        Ok(RadarDim {
            label: label.to_string(),
            category,
            code_language,
        })
    }
}

pub const DEFAULT_RADAR_DIMS: [&str; 6] = ["en", "zh", "cpp", "java", "python", "table"];

pub fn default_radar_dims() -> Vec<RadarDim> {
    DEFAULT_RADAR_DIMS
        .iter()
        .map(|d| RadarDim::parse(d).expect("known dimension"))
        .collect()
}

const RADAR_SIZE: f64 = 480.0;
const RADAR_RADIUS: f64 = 180.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Point on axis `k` of `d` at normalized radius `v`; axis 0 points up and
/// the rest follow clockwise.
pub fn radar_point(k: usize, d: usize, v: f64) -> (f64, f64) {
    let angle = -std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * k as f64 / d as f64;
    let c = RADAR_SIZE / 2.0;
    (c + RADAR_RADIUS * v * angle.cos(), c + RADAR_RADIUS * v * angle.sin())
}

/// Radar chart of `metric` per model across `dims`, as SVG plus the CSV of
/// plotted values. Cells must be grouped by model, category and language.
pub fn emit_radar(cells: &[SummaryCell], metric: Metric, dims: &[RadarDim]) -> Result<(String, String)> {
    if dims.len() < 3 {
        return Err(Error::validation(
            "dimensions",
            "a radar chart needs at least 3 dimensions",
        ));
    }
    let mut models: Vec<&str> = cells.iter().filter_map(|c| c.model_name.as_deref()).collect();
    models.sort_unstable();
    models.dedup();
    if models.is_empty() {
        return Err(Error::validation("cells", "no per-model cells for the radar chart"));
    }
    let mut values = Vec::new();
    for m in &models {
        let mut row = Vec::new();
        for d in dims {
            let v = cells
                .iter()
                .find(|c| {
                    c.model_name.as_deref() == Some(m)
                        && c.category == Some(d.category)
                        && c.code_language == d.code_language
                        && c.n_pieces.is_none()
                })
                .and_then(|c| metric.of(c))
                .ok_or_else(|| {
                    Error::validation("radar", format!("no {} value for ({m}, {})", metric.label(), d.label))
                })?;
            row.push(v);
        }
        values.push(row);
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::validation("csv", e.to_string());
    let mut header = vec!["model".to_string()];
    header.extend(dims.iter().map(|d| d.label.clone()));
    w.write_record(&header).map_err(csv_err)?;
    for (m, row) in models.iter().zip(&values) {
        let mut rec = vec![m.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let csv = finish_csv(w)?;

    let d = dims.len();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{h}" viewBox="0 0 {s} {h}" font-family="sans-serif" font-size="13">"#,
        s = RADAR_SIZE,
        h = RADAR_SIZE + 20.0 * models.len() as f64,
    );
    let _ = writeln!(svg, r#"<title>{}</title>"#, metric.label());
    for ring in [0.25, 0.5, 0.75, 1.0] {
        let pts: Vec<String> = (0..d).map(|k| fmt_pt(radar_point(k, d, ring))).collect();
        let _ = writeln!(
            svg,
            r##"<polygon class="grid" points="{}" fill="none" stroke="#ccc"/>"##,
            pts.join(" ")
        );
    }
    for (k, dim) in dims.iter().enumerate() {
        let (x0, y0) = radar_point(k, d, 0.0);
        let (x1, y1) = radar_point(k, d, 1.0);
        let (lx, ly) = radar_point(k, d, 1.12);
        let _ = writeln!(
            svg,
            r##"<line class="axis" x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="#999"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{lx:.3}" y="{ly:.3}" text-anchor="middle">{}</text>"#,
            escape(&dim.label)
        );
    }
    for (i, (m, row)) in models.iter().zip(&values).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(k, v)| fmt_pt(radar_point(k, d, v.clamp(0.0, 1.0))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="model" data-model="{name}" points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" "),
            name = escape(m),
        );
        let _ = writeln!(
            svg,
            r#"<text x="10" y="{:.0}" fill="{color}">{}</text>"#,
            RADAR_SIZE + 15.0 + 20.0 * i as f64,
            escape(m)
        );
    }
    svg.push_str("</svg>\n");
    Ok((svg, csv))
}

fn fmt_pt((x, y): (f64, f64)) -> String {
    format!("{x:.3},{y:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn decay_csv(cells: &[SummaryCell], from_n: u32, to_n: u32) -> Result<(String, Vec<String>)> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::validation("csv", e.to_string());
    w.write_record(["model", "metric", "from_n", "to_n", "delta"])
        .map_err(csv_err)?;
    let mut warnings = Vec::new();
    for metric in [
        Metric::Ned,
        Metric::Bleu,
        Metric::RougeL,
        Metric::Teds,
        Metric::CodeBleu,
    ] {
        let r = decay(cells, metric, from_n, to_n);
        for (model, delta) in r.deltas {
            w.write_record([
                model,
                metric.as_str().to_string(),
                from_n.to_string(),
                to_n.to_string(),
                delta.to_string(),
            ])
            .map_err(csv_err)?;
        }
        if matches!(metric, Metric::Ned | Metric::Bleu | Metric::RougeL) {
            warnings.extend(r.warnings);
        }
    }
    warnings.dedup();
    Ok((finish_csv(w)?, warnings))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportOptions {
    pub radar_metric: Metric,
    pub radar_dims: Vec<RadarDim>,
    pub decay_from: u32,
    pub decay_to: u32,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            radar_metric: Metric::RougeL,
            radar_dims: default_radar_dims(),
            decay_from: 8,
            decay_to: 16,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Write summary.{md,csv}, decay.csv and, when every model covers every
/// dimension, radar.{svg,csv}.
pub fn write_report(records: &[ScoreRecord], out: &Path, opts: &ReportOptions) -> Result<ReportOutput> {
    if records.is_empty() {
        return Err(Error::validation("scores", "no score records"));
    }
    let mut output = ReportOutput::default();
    let put = |name: &str, body: &str, output: &mut ReportOutput| -> Result<()> {
        let p = out.join(name);
        write_atomic(&p, body.as_bytes())?;
        output.files.push(p);
        Ok(())
    };
    let summary = aggregate(records, GroupBy::MODEL_N)?;
    put("summary.md", &emit_table(&summary, TableFormat::Markdown)?, &mut output)?;
    put("summary.csv", &emit_table(&summary, TableFormat::Csv)?, &mut output)?;
    let (decay, warnings) = decay_csv(&summary, opts.decay_from, opts.decay_to)?;
    output.warnings.extend(warnings);
    put("decay.csv", &decay, &mut output)?;
    let by_dim = aggregate(
        records,
        GroupBy {
            model: true,
            category: true,
            code_language: true,
            n_pieces: false,
        },
    )?;
    match emit_radar(&by_dim, opts.radar_metric, &opts.radar_dims) {
        Ok((svg, csv)) => {
            put("radar.svg", &svg, &mut output)?;
            put("radar.csv", &csv, &mut output)?;
        }
        Err(e) => output.warnings.push(format!("radar chart skipped: {e}")),
    }
    Ok(output)
}
