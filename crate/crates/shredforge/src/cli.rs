//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use shredforge_core::control::{generate_nonsense_control, CONTROL_SUFFIX};
use shredforge_core::corpus::filter_by_length;
use shredforge_core::kappa::{compute_cohens_kappa, AgreementCounts};
use shredforge_core::metrics::{ScoreOptions, Smoothing};
use shredforge_core::pipeline::ShredConfig;
use shredforge_core::report::Metric;
use shredforge_core::rng::sample_seed;
use shredforge_core::{Category, LengthFilterRules, RngStream, SourceDocument};

use crate::dataset::{build_sample, write_dataset_config, write_sample};
use crate::error::{Error, ErrorClass, Result};
use crate::fonts::resolve_fonts;
use crate::fsutil::{canonical_json, read_string, write_atomic};
use crate::harness::mock::{MockFixture, MockServer};
use crate::harness::{run_evaluation, EndpointConfig, PromptSpec, Transcriber};
use crate::ingest::ingest_corpus;
use crate::report::{emit_table, write_report, RadarDim, ReportOptions, TableFormat};
use crate::scoring::{load_scores, result_models, score_model, write_scores};

/// Everything a run can be configured with; each section may come from a
/// TOML file and is then overridden by flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub shred: ShredConfig,
    pub endpoint: EndpointConfig,
    pub metrics: ScoreOptions,
    /// Directory of TTF/OTF files; the builtin bitmap font when unset.
    pub font_dir: Option<PathBuf>,
    pub length_filter: LengthFilterRules,
    /// Generate from every ingested document regardless of length.
    pub skip_length_filter: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        toml::from_str(&read_string(path)?).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// First 16 hex digits of the SHA-256 of the canonical JSON form.
pub fn config_digest<T: Serialize>(value: &T) -> Result<String> {
    let json = canonical_json(value)?;
    Ok(Sha256::digest(json.as_bytes())[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

#[derive(Parser, Debug)]
#[command(
    name = "shredforge",
    version,
    about = "Shredded-document benchmark generation and evaluation"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render, shred and composite a corpus into a dataset.
    Generate(GenerateArgs),
    /// Build nonsense-text controls for English news documents.
    Control(ControlArgs),
    /// Send every dataset sample to a model endpoint.
    Evaluate(EvaluateArgs),
    /// Score transcripts against ground truth.
    Score(ScoreArgs),
    /// Summary tables, decay and radar chart from scores.
    Report(ReportArgs),
    /// Run the mock chat-completion server.
    MockServer(MockArgs),
    /// Cohen's kappa of an agreement matrix.
    Kappa(KappaArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated piece counts.
    #[arg(long, value_delimiter = ',')]
    pieces: Option<Vec<u32>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated categories (news_en, news_zh, code, table).
    #[arg(long, value_delimiter = ',')]
    categories: Option<Vec<String>>,
    #[arg(long)]
    fonts: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    concurrency: Option<usize>,
    /// Keep documents outside the news and code length bounds.
    #[arg(long)]
    no_length_filter: bool,
}

#[derive(Args, Debug)]
struct ControlArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Word list, whitespace separated.
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fonts: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    results: PathBuf,
    /// API base URL, e.g. https://host/v1.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    concurrency: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    max_retries: Option<u32>,
    #[arg(long)]
    api_key_env: Option<String>,
    /// Replace the bundled system prompt.
    #[arg(long)]
    prompt: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    results: PathBuf,
    /// Directory for `<model>.jsonl`.
    #[arg(long, default_value = "scores")]
    out: PathBuf,
    /// Score one model; all models under the results directory otherwise.
    #[arg(long)]
    model: Option<String>,
    /// ROUGE-L F-measure beta.
    #[arg(long)]
    beta: Option<f64>,
    /// BLEU smoothing: none or add_one_counts.
    #[arg(long)]
    smoothing: Option<String>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Scores directory or a single JSONL file.
    #[arg(long)]
    scores: PathBuf,
    #[arg(long, default_value = "report")]
    out: PathBuf,
    /// Table printed to stdout: markdown or csv.
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Radar chart metric.
    #[arg(long, default_value = "rouge_l")]
    metric: String,
    #[arg(long, value_delimiter = ',')]
    dimensions: Option<Vec<String>>,
    #[arg(long, default_value_t = 8)]
    decay_from: u32,
    #[arg(long, default_value_t = 16)]
    decay_to: u32,
}

#[derive(Args, Debug)]
struct MockArgs {
    /// JSON fixture; echo mode for every sample when omitted.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Dataset whose ground truth the echo mode returns.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, default_value_t = 8089)]
    port: u16,
}

#[derive(Args, Debug)]
struct KappaArgs {
    /// Rows separated by `;`, counts by `,`, e.g. "20,5;5,20".
    #[arg(long)]
    matrix: String,
}

/// Parse `argv` (program name first), run, and return the exit code:
/// 0 on success, 1 for usage or validation errors, 2 for runtime errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e.class() {
                ErrorClass::Validation => 1,
                ErrorClass::Runtime => 2,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Generate(a) => generate(&mut cfg, a),
        Command::Control(a) => control(&mut cfg, a),
        Command::Evaluate(a) => evaluate(&mut cfg, a),
        Command::Score(a) => score(&mut cfg, a),
        Command::Report(a) => report(&cfg, a),
        Command::MockServer(a) => mock_server(a),
        Command::Kappa(a) => kappa(a),
    }
}

fn announce<T: Serialize>(seed: u64, effective: &T) -> Result<()> {
    println!("seed: {seed}");
    println!("config digest: {}", config_digest(effective)?);
    Ok(())
}

fn parse_categories(names: &[String]) -> Result<Vec<Category>> {
    names
        .iter()
        .map(|s| s.trim().parse::<Category>().map_err(Error::from))
        .collect()
}

fn generate(cfg: &mut RunConfig, a: GenerateArgs) -> Result<()> {
    if let Some(p) = a.pieces {
        cfg.shred.pieces = p;
    }
    if let Some(s) = a.seed {
        cfg.shred.master_seed = s;
    }
    if let Some(c) = &a.categories {
        cfg.shred.categories = parse_categories(c)?;
    }
    if a.fonts.is_some() {
        cfg.font_dir = a.fonts;
    }
    if a.no_length_filter {
        cfg.skip_length_filter = true;
    }
    cfg.shred.validate()?;
    cfg.length_filter.validate()?;
    announce(
        cfg.shred.master_seed,
        &(&cfg.shred, &cfg.length_filter, cfg.skip_length_filter),
    )?;
    let font_dir = cfg.font_dir.as_deref();
    resolve_fonts(&cfg.shred.style, font_dir)?;

    let ingested = ingest_corpus(&a.corpus, &cfg.shred.categories)?;
    for e in &ingested.errors {
        eprintln!("warning: skipped {}: {}", e.path.display(), e.message);
    }
    let documents = if cfg.skip_length_filter {
        ingested.documents
    } else {
        let kept = filter_by_length(&ingested.documents, &cfg.length_filter);
        println!(
            "length filter kept {} of {} documents",
            kept.len(),
            ingested.documents.len()
        );
        kept
    };
    if documents.is_empty() {
        return Err(Error::Ingest(format!(
            "no usable documents under {}",
            a.corpus.display()
        )));
    }
    let jobs: Vec<(&SourceDocument, u32)> = documents
        .iter()
        .flat_map(|d| cfg.shred.pieces.iter().map(move |&n| (d, n)))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = a.concurrency {
        if k == 0 {
            return Err(Error::validation("concurrency", "must be at least 1"));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    let shred = &cfg.shred;
    let results: Vec<Result<()>> = pool.install(|| {
        jobs.par_iter()
            .map_init(
                || resolve_fonts(&shred.style, font_dir),
                |fonts, (doc, n)| {
                    let fonts = fonts.as_ref().map_err(|e| Error::Config(e.to_string()))?;
                    write_sample(&build_sample(doc, *n, shred, fonts)?, &a.out).map(|_| ())
                },
            )
            .collect()
    });
    results.into_iter().collect::<Result<Vec<()>>>()?;
    write_dataset_config(&a.out, shred)?;
    println!("generated {} samples into {}", jobs.len(), a.out.display());
    Ok(())
}

fn control(cfg: &mut RunConfig, a: ControlArgs) -> Result<()> {
    if let Some(s) = a.seed {
        cfg.shred.master_seed = s;
    }
    if a.fonts.is_some() {
        cfg.font_dir = a.fonts;
    }
    cfg.shred.style.validate()?;
    announce(cfg.shred.master_seed, &cfg.shred.style)?;
    let lexicon_text = read_string(&a.lexicon)?;
    let lexicon: Vec<&str> = lexicon_text.split_whitespace().collect();
    let fonts = resolve_fonts(&cfg.shred.style, cfg.font_dir.as_deref())?;
    let ingested = ingest_corpus(&a.corpus, &[Category::NewsEn])?;
    for e in &ingested.errors {
        eprintln!("warning: skipped {}: {}", e.path.display(), e.message);
    }
    if ingested.documents.is_empty() {
        return Err(Error::Ingest(format!(
            "no news_en documents under {}",
            a.corpus.display()
        )));
    }
    for doc in &ingested.documents {
        let mut rng = RngStream::from_seed(sample_seed(cfg.shred.master_seed, &doc.id, 0));
        let out = generate_nonsense_control(doc, &lexicon, &cfg.shred.style, &fonts, &mut rng)?;
        let rel = doc.id.strip_prefix("news_en/").unwrap_or(&doc.id);
        let path = a.out.join("news_en").join(format!("{rel}{CONTROL_SUFFIX}"));
        write_atomic(&path, out.text.as_bytes())?;
        let sidecar = path.with_file_name(format!(
            "{}.meta.json",
            path.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        ));
        write_atomic(&sidecar, canonical_json(&out.metadata)?.as_bytes())?;
    }
    println!("wrote {} controls into {}", ingested.documents.len(), a.out.display());
    Ok(())
}

fn evaluate(cfg: &mut RunConfig, a: EvaluateArgs) -> Result<()> {
    let ep = &mut cfg.endpoint;
    if let Some(v) = a.endpoint {
        ep.base_url = v;
    }
    if let Some(v) = a.model {
        ep.model_name = v;
    }
    if let Some(v) = a.concurrency {
        ep.max_concurrency = v;
    }
    if let Some(v) = a.temperature {
        ep.temperature = v;
    }
    if let Some(v) = a.max_retries {
        ep.max_retries = v;
    }
    if let Some(v) = a.api_key_env {
        ep.api_key_env = v;
    }
    let prompt = match &a.prompt {
        Some(p) => PromptSpec::from_file(p)?,
        None => PromptSpec::default(),
    };
    announce(cfg.shred.master_seed, &(&cfg.endpoint, &prompt.version))?;
    let client = Transcriber::new(cfg.endpoint.clone(), prompt)?;
    let summary = run_evaluation(&a.dataset, &a.results, &client)?;
    println!(
        "{} samples: {} transcribed, {} already present, {} failed",
        summary.total,
        summary.completed,
        summary.skipped,
        summary.failures.len()
    );
    if let Some((id, msg)) = summary.failures.first() {
        return Err(Error::Transport(format!(
            "{} samples failed; first was {id}: {msg}",
            summary.failures.len()
        )));
    }
    Ok(())
}

fn parse_smoothing(s: &str) -> Result<Smoothing> {
    match s {
        "none" => Ok(Smoothing::None),
        "add_one_counts" | "add-one" | "add1" => Ok(Smoothing::AddOneCounts),
        _ => Err(Error::validation(
            "smoothing",
            format!("expected none or add_one_counts, got `{s}`"),
        )),
    }
}

fn score(cfg: &mut RunConfig, a: ScoreArgs) -> Result<()> {
    if let Some(b) = a.beta {
        cfg.metrics.beta = b;
    }
    if let Some(s) = &a.smoothing {
        cfg.metrics.bleu.smoothing = parse_smoothing(s)?;
    }
    if !(cfg.metrics.beta > 0.0 && cfg.metrics.beta.is_finite()) {
        return Err(Error::validation("beta", "must be positive"));
    }
    cfg.metrics.bleu.validate()?;
    announce(cfg.shred.master_seed, &cfg.metrics)?;
    let models = match a.model {
        Some(m) => vec![m],
        None => result_models(&a.results)?,
    };
    if models.is_empty() {
        return Err(Error::Ingest(format!("no model results under {}", a.results.display())));
    }
    for m in models {
        let scores = score_model(&a.dataset, &a.results, &m, &cfg.metrics)?;
        if !scores.missing.is_empty() {
            eprintln!("warning: {m}: {} samples have no transcript", scores.missing.len());
        }
        let path = write_scores(&a.out, &m, &scores, &cfg.metrics)?;
        println!("{m}: scored {} samples into {}", scores.records.len(), path.display());
    }
    Ok(())
}

fn report(cfg: &RunConfig, a: ReportArgs) -> Result<()> {
    let format: TableFormat = a.format.parse()?;
    let metric: Metric = a.metric.parse()?;
    let mut opts = ReportOptions {
        radar_metric: metric,
        decay_from: a.decay_from,
        decay_to: a.decay_to,
        ..ReportOptions::default()
    };
    if let Some(d) = &a.dimensions {
        opts.radar_dims = d.iter().map(|s| RadarDim::parse(s.trim())).collect::<Result<_>>()?;
    }
    let labels: Vec<&str> = opts.radar_dims.iter().map(|d| d.label.as_str()).collect();
    announce(
        cfg.shred.master_seed,
        &(metric.as_str(), &labels, opts.decay_from, opts.decay_to),
    )?;
    let records = load_scores(&a.scores)?;
    let out = write_report(&records, &a.out, &opts)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let summary = shredforge_core::report::aggregate(&records, shredforge_core::report::GroupBy::MODEL_N)?;
    print!("{}", emit_table(&summary, format)?);
    Ok(())
}

fn mock_server(a: MockArgs) -> Result<()> {
    let mut fixture = match &a.fixture {
        Some(p) => MockFixture::load(p)?,
        None => MockFixture::default(),
    };
    if let Some(d) = &a.dataset {
        fixture = fixture.with_dataset(d)?;
    }
    announce(0, &fixture)?;
    let server = MockServer::start(fixture, a.port)?;
    println!("listening on {}", server.base_url());
    server.wait();
    Ok(())
}

fn kappa(a: KappaArgs) -> Result<()> {
    let matrix = a
        .matrix
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::validation("matrix", format!("`{}`: {e}", v.trim())))
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let k = compute_cohens_kappa(&AgreementCounts::new(matrix)?)?;
    println!("{k}");
    Ok(())
}
