use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bleu::{bleu_stats, BleuStats};
use super::cider::{cider, CiderParams};
use super::meteor::{meteor_lite, SynonymTable, METEOR_ALPHA, METEOR_BETA, METEOR_GAMMA};
use super::rouge::{rouge_l, ROUGE_BETA};
use super::tokenize::{tokenize, TOKENIZER_VERSION};
use super::MetricsError;
use crate::ui_model::AblationConfig;

/// One scored pair, also the line format of eval input files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub icon_ref: String,
    pub candidate: String,
    pub references: Vec<String>,
}

/// Everything that influences scores, echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub tokenizer: String,
    pub rouge_beta: f64,
    pub meteor_alpha: f64,
    pub meteor_beta: f64,
    pub meteor_gamma: f64,
    pub meteor_synonym_groups: usize,
    pub cider_max_n: usize,
    pub cider_sigma: f64,
    pub cider_epsilon: f64,
    pub cider_scale: f64,
    pub cider_df_corpus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ablation: Option<AblationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_version: Option<String>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        let cider = CiderParams::default();
        Self {
            tokenizer: TOKENIZER_VERSION.to_owned(),
            rouge_beta: ROUGE_BETA,
            meteor_alpha: METEOR_ALPHA,
            meteor_beta: METEOR_BETA,
            meteor_gamma: METEOR_GAMMA,
            meteor_synonym_groups: 0,
            cider_max_n: cider.max_n,
            cider_sigma: cider.sigma,
            cider_epsilon: cider.epsilon,
            cider_scale: cider.scale,
            cider_df_corpus: "evaluated references".to_owned(),
            mode: None,
            ablation: None,
            template_version: None,
        }
    }
}

impl MetricConfig {
    pub fn cider_params(&self) -> CiderParams {
        CiderParams {
            max_n: self.cider_max_n,
            sigma: self.cider_sigma,
            epsilon: self.cider_epsilon,
            scale: self.cider_scale,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub bleu1: f64,
    pub bleu2: f64,
    pub rouge_l: f64,
    pub meteor_lite: f64,
    pub cider: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemScores {
    pub icon_ref: String,
    #[serde(flatten)]
    pub scores: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub config: MetricConfig,
    pub count: usize,
    pub corpus: Scores,
    /// Always "n/a": SPICE is not computed.
    pub spice: String,
    pub items: Vec<ItemScores>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Score every record. BLEU's corpus figure aggregates clipped counts and
/// lengths across items; the other corpus figures are per-item means.
pub fn evaluate(records: &[EvalRecord], config: &MetricConfig, synonyms: &SynonymTable) -> Result<MetricReport, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut cands = Vec::with_capacity(records.len());
    let mut ref_sets = Vec::with_capacity(records.len());
    for r in records {
        if r.references.is_empty() {
            return Err(MetricsError::NoReferences(r.icon_ref.clone()));
        }
        cands.push(tokenize(&r.candidate));
        ref_sets.push(r.references.iter().map(|s| tokenize(s)).collect::<Vec<_>>());
    }
    let ciders = cider(&cands, &ref_sets, &config.cider_params());
    let mut corpus_bleu = BleuStats::default();
    let mut items = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let stats = bleu_stats(&cands[i], &ref_sets[i], 2);
        corpus_bleu.add(&stats);
        items.push(ItemScores {
            icon_ref: r.icon_ref.clone(),
            scores: Scores {
                bleu1: stats.score(1),
                bleu2: stats.score(2),
                rouge_l: rouge_l(&cands[i], &ref_sets[i]),
                meteor_lite: meteor_lite(&cands[i], &ref_sets[i], synonyms),
                cider: ciders[i],
            },
        });
    }
    let corpus = Scores {
        bleu1: corpus_bleu.score(1),
        bleu2: corpus_bleu.score(2),
        rouge_l: mean(items.iter().map(|i| i.scores.rouge_l)),
        meteor_lite: mean(items.iter().map(|i| i.scores.meteor_lite)),
        cider: mean(items.iter().map(|i| i.scores.cider)),
    };
    Ok(MetricReport {
        config: config.clone(),
        count: records.len(),
        corpus,
        spice: "n/a".to_owned(),
        items,
    })
}

pub const TABLE_HEADER: [&str; 6] = ["BLEU-1", "BLEU-2", "ROUGE", "METEOR", "CIDEr", "SPICE"];

/// Table cells as printed: every metric ×100, SPICE "n/a".
pub fn table_cells(s: &Scores) -> [String; 6] {
    let f = |x: f64| format!("{:.1}", x * 100.0);
    [f(s.bleu1), f(s.bleu2), f(s.rouge_l), f(s.meteor_lite), f(s.cider), "n/a".to_owned()]
}

pub fn render_table(label: &str, report: &MetricReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {}", "", TABLE_HEADER.map(|h| format!("{h:>8}")).join(" "));
    let _ = writeln!(
        out,
        "{:<12} {}",
        label,
        table_cells(&report.corpus).map(|c| format!("{c:>8}")).join(" ")
    );
    let _ = writeln!(out, "({} items; scores x100)", report.count);
    out
}

pub fn read_eval_records(path: &Path) -> Result<Vec<EvalRecord>, MetricsError> {
    let text = std::fs::read_to_string(path).map_err(|e| MetricsError::Io(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| MetricsError::Format(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(c: &str, refs: &[&str]) -> EvalRecord {
        EvalRecord {
            icon_ref: c.into(),
            candidate: c.into(),
            references: refs.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(
            evaluate(&[], &MetricConfig::default(), &SynonymTable::default()).unwrap_err(),
            MetricsError::EmptyInput
        );
    }

    #[test]
    fn figure_one_fixture() {
        let r = evaluate(
            &[rec("go back 15 seconds", &["go back 15 seconds", "rewind 15 seconds"])],
            &MetricConfig::default(),
            &SynonymTable::default(),
        )
        .unwrap();
        assert_eq!(r.corpus.bleu1, 1.0);
        assert_eq!(r.spice, "n/a");
    }

    #[test]
    fn report_round_trips() {
        let r = evaluate(&[rec("delete", &["delete item"]), rec("play", &["play"])], &MetricConfig::default(), &SynonymTable::default()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<MetricReport>(&json).unwrap(), r);
        assert!(render_table("TextT", &r).contains("n/a"));
    }
}
