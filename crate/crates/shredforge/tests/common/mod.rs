#![allow(dead_code)]

use std::path::Path;

use shredforge::core::RngStream;

const WORDS: [&str; 40] = [
    "the",
    "city",
    "council",
    "voted",
    "on",
    "a",
    "new",
    "budget",
    "for",
    "public",
    "transport",
    "after",
    "months",
    "of",
    "debate",
    "between",
    "residents",
    "and",
    "officials",
    "who",
    "argued",
    "that",
    "rising",
    "costs",
    "would",
    "affect",
    "local",
    "schools",
    "while",
    "supporters",
    "said",
    "investment",
    "in",
    "buses",
    "trains",
    "was",
    "overdue",
    "mayor",
    "announced",
    "reforms",
];

const HANZI: &str =
    "城市议会通过了新的公共交通预算经过数月辩论居民与官员认为成本上升会影响当地学校支持者表示投资早该进行";

pub fn english(rng: &mut RngStream, words: usize) -> String {
    let mut out = String::new();
    for i in 0..words {
        if i > 0 {
            out.push(if rng.below(14) == 0 { '\n' } else { ' ' });
        }
        let w = WORDS[rng.below(WORDS.len() as u32) as usize];
        if i == 0 || out.ends_with('\n') {
            let mut c = w.chars();
            let first = c.next().unwrap().to_ascii_uppercase();
            out.push(first);
            out.extend(c);
        } else {
            out.push_str(w);
        }
        if rng.below(9) == 0 {
            out.push('.');
        }
    }
    out.push('.');
    out
}

pub fn chinese(rng: &mut RngStream, chars: usize) -> String {
    let pool: Vec<char> = HANZI.chars().collect();
    let mut out = String::new();
    for i in 0..chars {
        out.push(pool[rng.below(pool.len() as u32) as usize]);
        if i % 23 == 22 {
            out.push('。');
        }
    }
    out
}

pub const CPP: &str = "#include <vector>\n\nint sum(const std::vector<int>& xs) {\n    int total = 0;\n    for (int x : xs) {\n        total += x;\n    }\n    return total;\n}\n";

pub const PYTHON: &str = "def mean(values):\n    if not values:\n        return 0.0\n    return sum(values) / len(values)\n\n\nprint(mean([1, 2, 3]))\n";

pub const JAVA: &str = "public class Greeter {\n    public static void main(String[] args) {\n        System.out.println(\"hello\");\n    }\n}\n";

pub const TABLE: &str = "<table><tr><th>City</th><th>Budget</th></tr><tr><td>North</td><td>120</td></tr><tr><td>South</td><td>95</td></tr></table>";

pub fn write(root: &Path, rel: &str, text: &str) {
    let p = root.join(rel);
    std::fs::create_dir_all(p.parent().unwrap()).unwrap();
    std::fs::write(p, text).unwrap();
}

/// A small corpus covering every category: `news` English articles plus one
/// document each of Chinese news, C++, Python, Java and a table.
pub fn mixed_corpus(root: &Path, news: usize) {
    let mut rng = RngStream::from_seed(7);
    for i in 0..news {
        write(root, &format!("news_en/article{i:02}.txt"), &english(&mut rng, 60));
    }
    write(root, "news_zh/report.txt", &chinese(&mut rng, 90));
    write(root, "code/sum.cpp", CPP);
    write(root, "code/mean.py", PYTHON);
    write(root, "code/Greeter.java", JAVA);
    write(root, "table/budget.html", TABLE);
}

/// Scaled-down geometry so integration tests stay fast.
pub const SMALL_CONFIG: &str = r#"
[shred]
master_seed = 42
pieces = [8, 12, 16]

[shred.style]
page_width_px = 400
font_size_px = 14
margin_px = 16

[shred.composite]
canvas_px = 1024
"#;

pub fn write_small_config(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, SMALL_CONFIG).unwrap();
    p
}

pub fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["shredforge"];
    argv.extend_from_slice(args);
    shredforge::cli::run(argv)
}

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Build a dataset of `news` English articles plus the other categories at
/// the given piece counts, using the small geometry.
pub fn small_dataset(dir: &Path, news: usize, pieces: &str) -> std::path::PathBuf {
    let corpus = dir.join("corpus");
    mixed_corpus(&corpus, news);
    let cfg = write_small_config(dir);
    let out = dir.join("dataset");
    let code = run(&[
        "--config",
        path(&cfg),
        "generate",
        "--corpus",
        path(&corpus),
        "--out",
        path(&out),
        "--pieces",
        pieces,
        "--no-length-filter",
    ]);
    assert_eq!(code, 0);
    out
}

pub const TEST_KEY_ENV: &str = "SHREDFORGE_IT_KEY";

/// Set the API key variable used by tests, once per process.
pub fn test_key_env() -> String {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| std::env::set_var(TEST_KEY_ENV, "test-key"));
    TEST_KEY_ENV.to_string()
}
