//! Multi-reference caption metrics and the evaluation / ablation reports.

pub mod ablation;
pub mod bleu;
pub mod cider;
pub mod meteor;
mod ngrams;
pub mod report;
pub mod rouge;
mod tokenize;

pub use ablation::{render_ablation_table, run_ablation_suite, AblationCell, AblationReport, Predictor};
pub use bleu::{bleu_n, bleu_stats, closest_ref_len, BleuStats};
pub use cider::{cider, CiderParams};
pub use meteor::{meteor_lite, stem, SynonymTable};
pub use ngrams::ngram_counts;
pub use report::{evaluate, read_eval_records, render_table, table_cells, EvalRecord, ItemScores, MetricConfig, MetricReport, Scores};
pub use rouge::{lcs_len, rouge_l};
pub use tokenize::{tokenize, TOKENIZER_VERSION};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no records to evaluate")]
    EmptyInput,
    #[error("{0}: record has no references")]
    NoReferences(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}
