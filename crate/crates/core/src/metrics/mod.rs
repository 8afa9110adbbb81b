//! Scoring functions: NED, BLEU, ROUGE-L, TEDS and CodeBLEU, plus the
//! tokenizers and the table-markup parser they rely on.

pub mod bleu;
pub mod codebleu;
pub mod edit;
pub mod lcs;
pub mod score;
pub mod table;
pub mod ted;
pub mod tokenize;

pub use bleu::{bleu, BleuConfig, Smoothing};
pub use codebleu::{codebleu, CodeBleu};
pub use edit::{edit_distance, levenshtein, ned};
pub use lcs::{lcs_len, rouge_l};
pub use score::{score_transcript, SampleKey, ScoreOptions, ScoreRecord};
pub use table::{parse_table_tree, TableTree};
pub use ted::{teds, tree_edit_distance, Tree};
pub use tokenize::{tokenize, TokenizerMode};
