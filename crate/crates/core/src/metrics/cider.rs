//! CIDEr-D with document frequencies taken over the evaluated corpus's
//! reference sets.

use std::collections::{HashMap, HashSet};

use super::ngrams::ngram_counts;

pub const CIDER_MAX_N: usize = 4;
pub const CIDER_SIGMA: f64 = 6.0;
pub const CIDER_EPSILON: f64 = 1.0;
pub const CIDER_SCALE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiderParams {
    pub max_n: usize,
    pub sigma: f64,
    /// Added to the document count inside the log so a one-item corpus still
    /// has non-zero weights.
    pub epsilon: f64,
    pub scale: f64,
}

impl Default for CiderParams {
    fn default() -> Self {
        Self {
            max_n: CIDER_MAX_N,
            sigma: CIDER_SIGMA,
            epsilon: CIDER_EPSILON,
            scale: CIDER_SCALE,
        }
    }
}

/// Per-item reference-set document frequency of every n-gram.
pub struct DocFreq<'a> {
    df: HashMap<&'a [String], usize>,
    docs: usize,
}

impl<'a> DocFreq<'a> {
    pub fn build(ref_sets: &'a [Vec<Vec<String>>], max_n: usize) -> Self {
        let mut df = HashMap::new();
        for refs in ref_sets {
            let mut seen: HashSet<&[String]> = HashSet::new();
            for r in refs {
                for n in 1..=max_n {
                    seen.extend(ngram_counts(r, n).into_keys());
                }
            }
            for g in seen {
                *df.entry(g).or_insert(0) += 1;
            }
        }
        Self { df, docs: ref_sets.len() }
    }

    pub fn idf(&self, gram: &[String], epsilon: f64) -> f64 {
        let df = self.df.get(gram).copied().unwrap_or(0).max(1) as f64;
        ((self.docs as f64 + epsilon) / df).ln()
    }
}

fn weighted<'t>(tokens: &'t [String], n: usize, df: &DocFreq<'_>, eps: f64) -> (HashMap<&'t [String], f64>, f64) {
    let vec: HashMap<&[String], f64> = ngram_counts(tokens, n)
        .into_iter()
        .map(|(g, c)| (g, c as f64 * df.idf(g, eps)))
        .collect();
    let norm = vec.values().map(|v| v * v).sum::<f64>().sqrt();
    (vec, norm)
}

fn item_score(candidate: &[String], refs: &[Vec<String>], df: &DocFreq<'_>, p: &CiderParams) -> f64 {
    if refs.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for n in 1..=p.max_n {
        let (h, h_norm) = weighted(candidate, n, df, p.epsilon);
        let mut per_ref = 0.0;
        for r in refs {
            let (rv, r_norm) = weighted(r, n, df, p.epsilon);
            if h_norm == 0.0 || r_norm == 0.0 {
                continue;
            }
            let dot: f64 = h.iter().filter_map(|(g, hv)| rv.get(g).map(|rv| hv.min(*rv) * rv)).sum();
            let delta = candidate.len() as f64 - r.len() as f64;
            per_ref += dot / (h_norm * r_norm) * (-(delta * delta) / (2.0 * p.sigma * p.sigma)).exp();
        }
        total += per_ref / refs.len() as f64;
    }
    total / p.max_n as f64 * p.scale
}

/// Scores for every `(candidate, references)` item, already scaled.
pub fn cider(candidates: &[Vec<String>], ref_sets: &[Vec<Vec<String>>], params: &CiderParams) -> Vec<f64> {
    let df = DocFreq::build(ref_sets, params.max_n);
    candidates
        .iter()
        .zip(ref_sets)
        .map(|(c, refs)| item_score(c, refs, &df, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tokenize;

    #[test]
    fn self_match_is_ten() {
        let c = vec![tokenize("go back fifteen seconds now")];
        let r = vec![vec![c[0].clone()]];
        let s = cider(&c, &r, &CiderParams::default());
        assert!((s[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn no_overlap_is_zero() {
        let s = cider(&[tokenize("volume up")], &[vec![tokenize("delete item")]], &CiderParams::default());
        assert_eq!(s, [0.0]);
    }

    #[test]
    fn short_exact_match_only_scores_its_orders() {
        let c = vec![tokenize("delete")];
        let s = cider(&c, &[vec![c[0].clone()]], &CiderParams::default());
        assert!((s[0] - 2.5).abs() < 1e-12);
    }
}
