//! Acceptance criteria, one line of output per criterion.
//!
//! Runs with its own `main` so the verdict lines are always printed.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use shredforge::core::compositor::{deform_fragment, pack_rotated, CompositeSpec, DeformParams};
use shredforge::core::control::{generate_nonsense_control, line_lengths};
use shredforge::core::font::FontSet;
use shredforge::core::fragmenter::{assign_cells, extract_fragments, sample_seeds, Fragment};
use shredforge::core::kappa::{compute_cohens_kappa, AgreementCounts};
use shredforge::core::metrics::{
    bleu, lcs_len, levenshtein, ned, parse_table_tree, rouge_l, teds, tree_edit_distance, BleuConfig, ScoreOptions,
    Tree,
};
use shredforge::core::pipeline::ShredConfig;
use shredforge::core::rasterizer::{inject_paper_noise, render_page, PageStyle};
use shredforge::core::report::{aggregate, decay, round2, GroupBy, Metric};
use shredforge::core::{Category, Error as CoreError, RngStream, SourceDocument};
use shredforge::dataset::{build_sample, list_samples, read_composite, write_sample, MANIFEST};
use shredforge::fonts::resolve_fonts;
use shredforge::harness::mock::{MockFixture, MockReply, MockServer, ScriptStep};
use shredforge::harness::{read_transcript, run_evaluation, transcript_path, EndpointConfig, PromptSpec, Transcriber};
use shredforge::report::{emit_table, TableFormat};
use shredforge::scoring::{load_scores, score_model};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "metric oracle equivalence", metric_oracles),
        (2, "hand-derived metric values", hand_values),
        (3, "voronoi correctness", voronoi),
        (4, "packing safety", packing),
        (5, "end-to-end determinism", determinism),
        (6, "protocol round-trip", protocol),
        (7, "nonsense control line lengths", control_lengths),
        (8, "fixture report fidelity", report_fixture),
        (9, "cohen's kappa", kappa),
        (10, "throughput", throughput),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn random_string(rng: &mut RngStream, max_len: u32) -> Vec<char> {
    const ALPHABET: [char; 8] = ['a', 'b', 'c', 'd', ' ', '文', '字', 'é'];
    let len = rng.below(max_len + 1);
    (0..len)
        .map(|_| ALPHABET[rng.below(ALPHABET.len() as u32) as usize])
        .collect()
}

fn dp_levenshtein(a: &[char], b: &[char]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn brute_lcs(a: &[u8], b: &[u8]) -> usize {
    let mut best = 0;
    for mask in 0u32..(1 << a.len()) {
        let picked: Vec<u8> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
        if picked.len() <= best {
            continue;
        }
        let mut it = b.iter();
        if picked.iter().all(|p| it.any(|x| x == p)) {
            best = picked.len();
        }
    }
    best
}

/// Random tree with `n` nodes; node `i > 0` hangs under a random earlier node.
fn random_tree(rng: &mut RngStream, n: usize) -> Tree<u8> {
    let parents: Vec<usize> = (1..n).map(|i| rng.below(i as u32) as usize).collect();
    let labels: Vec<u8> = (0..n).map(|_| b'a' + rng.below(3) as u8).collect();
    fn build(i: usize, parents: &[usize], labels: &[u8]) -> Tree<u8> {
        let kids = (1..labels.len())
            .filter(|&c| parents[c - 1] == i)
            .map(|c| build(c, parents, labels))
            .collect();
        Tree::node(labels[i], kids)
    }
    build(0, &parents, &labels)
}

/// Preorder labels with the subtree extent of every node.
fn flatten(t: &Tree<u8>, labels: &mut Vec<u8>, end: &mut Vec<usize>) {
    let i = labels.len();
    labels.push(t.label);
    end.push(0);
    for c in &t.children {
        flatten(c, labels, end);
    }
    end[i] = labels.len();
}

/// Cheapest edit script over every valid mapping: mapped pairs keep both
/// preorder and ancestry, unmapped nodes are deleted or inserted.
fn exhaustive_ted(a: &Tree<u8>, b: &Tree<u8>) -> usize {
    let (mut la, mut ea, mut lb, mut eb) = (vec![], vec![], vec![], vec![]);
    flatten(a, &mut la, &mut ea);
    flatten(b, &mut lb, &mut eb);
    let anc = |end: &[usize], x: usize, y: usize| x < y && y < end[x];
    let mut best = usize::MAX;
    let mut pairs: Vec<(usize, usize)> = vec![];
    fn go(
        i: usize,
        pairs: &mut Vec<(usize, usize)>,
        best: &mut usize,
        la: &[u8],
        lb: &[u8],
        ok: &dyn Fn(&[(usize, usize)], usize, usize) -> bool,
    ) {
        if i == la.len() {
            let relabel = pairs.iter().filter(|(x, y)| la[*x] != lb[*y]).count();
            *best = (*best).min(relabel + la.len() + lb.len() - 2 * pairs.len());
            return;
        }
        go(i + 1, pairs, best, la, lb, ok);
        let from = pairs.last().map_or(0, |p| p.1 + 1);
        for j in from..lb.len() {
            if ok(pairs, i, j) {
                pairs.push((i, j));
                go(i + 1, pairs, best, la, lb, ok);
                pairs.pop();
            }
        }
    }
    let ok =
        |pairs: &[(usize, usize)], i: usize, j: usize| pairs.iter().all(|&(x, y)| anc(&ea, x, i) == anc(&eb, y, j));
    go(0, &mut pairs, &mut best, &la, &lb, &ok);
    best
}

fn metric_oracles() -> Outcome {
    let mut rng = RngStream::from_seed(1);
    for k in 0..1000 {
        let (a, b) = (random_string(&mut rng, 50), random_string(&mut rng, 50));
        let (sa, sb): (String, String) = (a.iter().collect(), b.iter().collect());
        ensure!(
            levenshtein(&sa, &sb) == dp_levenshtein(&a, &b),
            "levenshtein differs on pair {k}: {sa:?} {sb:?}"
        );
    }
    for k in 0..500 {
        let a: Vec<u8> = (0..rng.below(13)).map(|_| rng.below(4) as u8).collect();
        let b: Vec<u8> = (0..rng.below(13)).map(|_| rng.below(4) as u8).collect();
        ensure!(
            lcs_len(&a, &b) == brute_lcs(&a, &b),
            "lcs differs on pair {k}: {a:?} {b:?}"
        );
    }
    for k in 0..200 {
        let na = 1 + rng.below(8) as usize;
        let nb = 1 + rng.below(8) as usize;
        let (a, b) = (random_tree(&mut rng, na), random_tree(&mut rng, nb));
        let (fast, slow) = (tree_edit_distance(&a, &b), exhaustive_ted(&a, &b));
        ensure!(fast == slow, "tree edit distance differs on pair {k}: {fast} vs {slow}");
    }
    Ok("1000 levenshtein, 500 lcs, 200 tree pairs exact".into())
}

fn hand_values() -> Outcome {
    let n = ned("kitten", "sitting");
    ensure!((n - 3.0 / 7.0).abs() <= 1e-12, "ned = {n}");
    let r = rouge_l(&["A", "B", "C", "D", "E"], &["A", "C", "E"], 1.0).map_err(|e| e.to_string())?;
    ensure!((r - 0.75).abs() <= 1e-12, "rouge_l = {r}");
    let b = bleu(&["the", "cat"], &["the", "the", "the", "the"], &BleuConfig::default());
    ensure!(b == 0.0, "clipped bleu = {b}");
    let one = parse_table_tree("<table><tr><td>a</td></tr></table>").map_err(|e| e.to_string())?;
    let other = parse_table_tree("<table><tr><td>b</td></tr></table>").map_err(|e| e.to_string())?;
    let t = teds(&one, &other);
    ensure!((t - 2.0 / 3.0).abs() <= 1e-12, "teds = {t}");
    Ok(format!("ned {n:.6}, rouge_l {r}, bleu {b}, teds {t:.6}"))
}

fn voronoi() -> Outcome {
    let mut rng = RngStream::from_seed(3);
    for k in 0..100 {
        let n = [8, 12, 16][rng.below(3) as usize];
        let (w, h) = (32 + rng.below(481), 32 + rng.below(481));
        let seeds = sample_seeds(w, h, n, &mut rng).map_err(|e| format!("config {k}: {e}"))?;
        let cells = assign_cells(w, h, &seeds).map_err(|e| e.to_string())?;
        let mut area = vec![0u64; n as usize];
        for y in 0..h {
            let mut first = vec![u32::MAX; n as usize];
            let mut last = vec![0u32; n as usize];
            let mut count = vec![0u32; n as usize];
            for x in 0..w {
                let got = cells.get(x, y);
                let want = seeds
                    .seeds
                    .iter()
                    .enumerate()
                    .min_by_key(|(i, s)| {
                        let (dx, dy) = (i64::from(x) - i64::from(s.x), i64::from(y) - i64::from(s.y));
                        (dx * dx + dy * dy, *i)
                    })
                    .map(|(i, _)| i as u32)
                    .unwrap();
                ensure!(
                    got == want,
                    "config {k} ({w}x{h}, n={n}): pixel ({x},{y}) in cell {got}, nearest is {want}"
                );
                let c = got as usize;
                first[c] = first[c].min(x);
                last[c] = x;
                count[c] += 1;
                area[c] += 1;
            }
            for c in 0..n as usize {
                ensure!(
                    count[c] == 0 || last[c] - first[c] + 1 == count[c],
                    "config {k}: cell {c} split on row {y}"
                );
            }
        }
        ensure!(
            area.iter().sum::<u64>() == u64::from(w) * u64::from(h),
            "config {k}: not a partition"
        );
        ensure!(area.iter().all(|&a| a > 0), "config {k}: empty cell");
    }
    Ok("100 configurations match brute force".into())
}

fn scattered(
    doc: &SourceDocument,
    n: u32,
    seed: u64,
    style: &PageStyle,
    spec: &CompositeSpec,
) -> Result<Vec<(shredforge::core::compositor::Placement, Fragment)>, CoreError> {
    let fonts = FontSet::builtin(style.font_size_px);
    let mut rng = RngStream::from_seed(seed);
    let page = inject_paper_noise(render_page(doc, style, &fonts)?, style.noise_amplitude, &mut rng)?;
    let (w, h) = (page.width_px(), page.height_px());
    let seeds = sample_seeds(w, h, n, &mut rng)?;
    let pieces = extract_fragments(&page, &assign_cells(w, h, &seeds)?, &seeds)?;
    let warped = pieces
        .iter()
        .map(|f| deform_fragment(f, &DeformParams::default(), &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    pack_rotated(&warped, spec, &mut rng)
}

fn packing() -> Outcome {
    let style = PageStyle {
        page_width_px: 800,
        font_size_px: 20,
        margin_px: 24,
        ..PageStyle::default()
    };
    let spec = CompositeSpec {
        canvas_px: 2048,
        ..CompositeSpec::default()
    };
    let mut text_rng = RngStream::from_seed(4);
    let mut pairs_checked = 0usize;
    for k in 0..50u64 {
        let doc = SourceDocument::new(
            format!("news_en/p{k}"),
            Category::NewsEn,
            None,
            common::english(&mut text_rng, 120),
        )
        .map_err(|e| e.to_string())?;
        let n = [8, 12, 16][(k % 3) as usize];
        let placed = scattered(&doc, n, k, &style, &spec).map_err(|e| format!("sample {k}: {e}"))?;
        ensure!(placed.len() == n as usize, "sample {k}: {} placements", placed.len());
        for (p, f) in &placed {
            ensure!(
                p.x + f.raster.width <= spec.canvas_px && p.y + f.raster.height <= spec.canvas_px,
                "sample {k}: fragment {} leaves the canvas",
                p.fragment_id
            );
        }
        for i in 0..placed.len() {
            for j in i + 1..placed.len() {
                pairs_checked += 1;
                let ((pa, fa), (pb, fb)) = (&placed[i], &placed[j]);
                let x0 = pa.x.max(pb.x);
                let y0 = pa.y.max(pb.y);
                let x1 = (pa.x + fa.raster.width).min(pb.x + fb.raster.width);
                let y1 = (pa.y + fa.raster.height).min(pb.y + fb.raster.height);
                for y in y0..y1.max(y0) {
                    for x in x0..x1.max(x0) {
                        let a = fa.raster.get(x - pa.x, y - pa.y)[3] != 0;
                        let b = fb.raster.get(x - pb.x, y - pb.y)[3] != 0;
                        ensure!(
                            !(a && b),
                            "sample {k}: fragments {} and {} overlap at ({x},{y})",
                            pa.fragment_id,
                            pb.fragment_id
                        );
                    }
                }
            }
        }
    }
    let tiny = CompositeSpec {
        canvas_px: 200,
        ..CompositeSpec::default()
    };
    let doc = SourceDocument::new(
        "news_en/big",
        Category::NewsEn,
        None,
        common::english(&mut text_rng, 200),
    )
    .map_err(|e| e.to_string())?;
    let first = scattered(&doc, 8, 9, &style, &tiny);
    let second = scattered(&doc, 8, 9, &style, &tiny);
    let overflow = match (&first, &second) {
        (
            Err(CoreError::PackingOverflow { fragment_id: a, .. }),
            Err(CoreError::PackingOverflow { fragment_id: b, .. }),
        ) if a == b => {
            format!("overflow on fragment {a} both runs")
        }
        _ => {
            return Err(format!(
                "expected identical PackingOverflow, got {:?} / {:?}",
                first.err(),
                second.err()
            ))
        }
    };
    Ok(format!(
        "50 samples, {pairs_checked} fragment pairs disjoint and contained; {overflow}"
    ))
}

fn generate_into(corpus: &Path, out: &Path) -> Result<(), String> {
    let code = common::run(&[
        "generate",
        "--corpus",
        common::path(corpus),
        "--out",
        common::path(out),
        "--pieces",
        "8,12,16",
        "--seed",
        "42",
        "--no-length-filter",
    ]);
    if code == 0 {
        Ok(())
    } else {
        Err(format!("generate exited with {code}"))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("corpus");
    common::mixed_corpus(&corpus, 1);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    generate_into(&corpus, &a)?;
    generate_into(&corpus, &b)?;
    let sa = list_samples(&a).map_err(|e| e.to_string())?;
    let sb = list_samples(&b).map_err(|e| e.to_string())?;
    ensure!(
        sa.len() == sb.len() && !sa.is_empty(),
        "sample counts {} vs {}",
        sa.len(),
        sb.len()
    );
    for (x, y) in sa.iter().zip(&sb) {
        let rel = Path::new(&x.composite_path).parent().unwrap().join(MANIFEST);
        let ma = std::fs::read(a.join(&rel)).map_err(|e| e.to_string())?;
        let mb = std::fs::read(b.join(&rel)).map_err(|e| e.to_string())?;
        ensure!(ma == mb, "manifest {} differs", rel.display());
        let ia = read_composite(&a, x).map_err(|e| e.to_string())?;
        let ib = read_composite(&b, y).map_err(|e| e.to_string())?;
        ensure!(ia == ib, "composite of {} differs", x.sample_id);
    }
    Ok(format!("{} samples identical across two runs", sa.len()))
}

fn protocol() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = common::small_dataset(dir.path(), 2, "8,16");
    let samples = list_samples(&data).map_err(|e| e.to_string())?;
    ensure!(samples.len() >= 10, "only {} samples", samples.len());
    let bound = 3;
    let retried = samples[0].sample_id.clone();
    let mut scripts = BTreeMap::new();
    scripts.insert(
        retried.clone(),
        vec![
            ScriptStep {
                status: 429,
                reply: None,
            },
            ScriptStep {
                status: 429,
                reply: None,
            },
        ],
    );
    let echo = MockFixture {
        delay_ms: 40,
        scripts,
        ..MockFixture::default()
    }
    .with_dataset(&data)
    .map_err(|e| e.to_string())?;
    let empty = MockFixture {
        default: MockReply::Empty,
        ..MockFixture::default()
    };
    let results = dir.path().join("results");
    let mut means = Vec::new();
    let mut observed = 0;
    let mut attempts = 0;
    for (model, fixture) in [("echo", echo), ("empty", empty)] {
        let server = MockServer::start(fixture, 0).map_err(|e| e.to_string())?;
        let endpoint = EndpointConfig {
            base_url: server.base_url(),
            model_name: model.into(),
            api_key_env: common::test_key_env(),
            max_concurrency: bound,
            retry_base_ms: 10,
            ..EndpointConfig::default()
        };
        let client = Transcriber::new(endpoint, PromptSpec::default()).map_err(|e| e.to_string())?;
        let summary = run_evaluation(&data, &results, &client).map_err(|e| e.to_string())?;
        ensure!(summary.failures.is_empty(), "{model}: failures {:?}", summary.failures);
        observed = observed.max(server.stats().max_in_flight());
        if model == "echo" {
            attempts = read_transcript(&transcript_path(&results, model, &retried))
                .map_err(|e| e.to_string())?
                .attempts;
        }
        let scores = score_model(&data, &results, model, &ScoreOptions::default()).map_err(|e| e.to_string())?;
        ensure!(
            scores.records.len() == samples.len(),
            "{model}: {} records",
            scores.records.len()
        );
        let k = scores.records.len() as f64;
        let mean =
            |f: fn(&shredforge::core::metrics::ScoreRecord) -> f64| scores.records.iter().map(f).sum::<f64>() / k;
        means.push((mean(|r| r.ned), mean(|r| r.bleu), mean(|r| r.rouge_l)));
    }
    let (ned_e, bleu_e, rouge_e) = means[0];
    ensure!(ned_e.abs() <= 1e-12, "echo mean NED {ned_e}");
    ensure!(
        (bleu_e - 1.0).abs() <= 1e-12 && (rouge_e - 1.0).abs() <= 1e-12,
        "echo BLEU {bleu_e}, ROUGE-L {rouge_e}"
    );
    ensure!((means[1].0 - 1.0).abs() <= 1e-12, "empty mean NED {}", means[1].0);
    ensure!(attempts == 3, "429-then-200 took {attempts} attempts");
    ensure!(observed <= bound, "{observed} requests in flight, bound {bound}");
    Ok(format!(
        "{} samples; echo NED {ned_e} BLEU {bleu_e} ROUGE-L {rouge_e}; empty NED {}; attempts {attempts}; max in flight {observed}/{bound}",
        samples.len(),
        means[1].0
    ))
}

fn control_lengths() -> Outcome {
    let style = PageStyle::default();
    let fonts = FontSet::builtin(style.font_size_px);
    let lexicon = [
        "lorem",
        "ipsum",
        "dolor",
        "sit",
        "amet",
        "consectetur",
        "adipiscing",
        "elit",
        "sed",
        "do",
        "eiusmod",
        "tempor",
    ];
    let mut rng = RngStream::from_seed(11);
    let mut lines = 0;
    for k in 0..50 {
        let words = 40 + rng.below(300) as usize;
        let src = SourceDocument::new(
            format!("news_en/doc{k}"),
            Category::NewsEn,
            None,
            common::english(&mut rng, words),
        )
        .map_err(|e| e.to_string())?;
        let ctl = generate_nonsense_control(&src, &lexicon, &style, &fonts, &mut RngStream::from_seed(k))
            .map_err(|e| e.to_string())?;
        let mut want = line_lengths(&src, &style, &fonts);
        let mut got: Vec<usize> = ctl.text.split('\n').map(|l| l.chars().count()).collect();
        want.sort_unstable();
        got.sort_unstable();
        ensure!(want == got, "doc {k}: line lengths {want:?} vs {got:?}");
        lines += want.len();
    }
    Ok(format!("50 documents, {lines} lines matched"))
}

fn report_fixture() -> Outcome {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/gemini3pro_scores.jsonl");
    let records = load_scores(&fixture).map_err(|e| e.to_string())?;
    let summary = aggregate(&records, GroupBy::MODEL_N).map_err(|e| e.to_string())?;
    let row = |n: u32| {
        summary
            .iter()
            .find(|c| c.model_name.as_deref() == Some("Gemini 3 Pro") && c.n_pieces == Some(n))
            .map(|c| (round2(c.mean_ned), round2(c.mean_bleu), round2(c.mean_rouge)))
    };
    ensure!(row(8) == Some((0.33, 0.51, 0.83)), "N=8 row {:?}", row(8));
    ensure!(row(16) == Some((0.41, 0.44, 0.76)), "N=16 row {:?}", row(16));
    let md = emit_table(&summary, TableFormat::Markdown).map_err(|e| e.to_string())?;
    ensure!(
        md.contains("| Gemini 3 Pro | 8 | 0.33 / 0.51 / 0.83 |"),
        "markdown:\n{md}"
    );
    ensure!(
        md.contains("| Gemini 3 Pro | 16 | 0.41 / 0.44 / 0.76 |"),
        "markdown:\n{md}"
    );
    let d = decay(&summary, Metric::Ned, 8, 16);
    let delta = d
        .deltas
        .iter()
        .find(|(m, _)| m == "Gemini 3 Pro")
        .map(|(_, v)| round2(*v));
    ensure!(delta == Some(0.08), "NED decay {delta:?}");
    Ok("N=8 0.33/0.51/0.83, N=16 0.41/0.44/0.76, NED decay +0.08".into())
}

fn kappa() -> Outcome {
    let k = compute_cohens_kappa(&AgreementCounts::new(vec![vec![20, 5], vec![5, 20]]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure!((k - 0.6).abs() <= 1e-12, "kappa = {k}");
    let p = compute_cohens_kappa(&AgreementCounts::new(vec![vec![30, 0], vec![0, 20]]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure!(p == 1.0, "perfect agreement kappa = {p}");
    Ok(format!("{k} and {p}"))
}

fn throughput() -> Outcome {
    let config = ShredConfig {
        pieces: vec![8],
        ..ShredConfig::default()
    };
    ensure!(
        config.style.page_width_px == 1600 && config.composite.canvas_px == 4096,
        "default geometry changed"
    );
    let doc = SourceDocument::new(
        "news_en/speed.txt",
        Category::NewsEn,
        None,
        common::english(&mut RngStream::from_seed(5), 450),
    )
    .map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let fonts = resolve_fonts(&config.style, None).map_err(|e| e.to_string())?;
    let built = build_sample(&doc, 8, &config, &fonts).map_err(|e| e.to_string())?;
    write_sample(&built, dir.path()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "one N=8 sample took {secs:.2}s");
    Ok(format!("one N=8 sample with PNG written in {secs:.2}s"))
}
