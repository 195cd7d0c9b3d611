use super::ngrams::ngram_counts;

/// Per-order clipped match and candidate n-gram totals plus the lengths that
/// feed the brevity penalty. Summing these across items gives corpus BLEU.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BleuStats {
    pub matches: Vec<usize>,
    pub totals: Vec<usize>,
    pub cand_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn add(&mut self, other: &BleuStats) {
        if self.matches.len() < other.matches.len() {
            self.matches.resize(other.matches.len(), 0);
            self.totals.resize(other.totals.len(), 0);
        }
        for (i, (m, t)) in other.matches.iter().zip(&other.totals).enumerate() {
            self.matches[i] += m;
            self.totals[i] += t;
        }
        self.cand_len += other.cand_len;
        self.ref_len += other.ref_len;
    }

    /// Geometric mean of the first `n` precisions times the brevity penalty.
    pub fn score(&self, n: usize) -> f64 {
        if self.cand_len == 0 || n == 0 || self.matches.len() < n {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for i in 0..n {
            if self.matches[i] == 0 || self.totals[i] == 0 {
                return 0.0;
            }
            log_sum += (self.matches[i] as f64 / self.totals[i] as f64).ln();
        }
        let c = self.cand_len as f64;
        let r = self.ref_len as f64;
        let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
        bp * (log_sum / n as f64).exp()
    }
}

/// Length of the reference closest to `cand_len`; ties go to the shorter one.
pub fn closest_ref_len(cand_len: usize, refs: &[Vec<String>]) -> usize {
    refs.iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(cand_len), r))
        .unwrap_or(0)
}

pub fn bleu_stats(candidate: &[String], refs: &[Vec<String>], max_n: usize) -> BleuStats {
    let mut stats = BleuStats {
        matches: vec![0; max_n],
        totals: vec![0; max_n],
        cand_len: candidate.len(),
        ref_len: closest_ref_len(candidate.len(), refs),
    };
    for n in 1..=max_n {
        let cand = ngram_counts(candidate, n);
        let ref_counts: Vec<_> = refs.iter().map(|r| ngram_counts(r, n)).collect();
        for (gram, &count) in &cand {
            let max_ref = ref_counts.iter().map(|rc| rc.get(gram).copied().unwrap_or(0)).max().unwrap_or(0);
            stats.matches[n - 1] += count.min(max_ref);
        }
        stats.totals[n - 1] = candidate.len().saturating_sub(n - 1);
    }
    stats
}

/// Sentence-level BLEU-n over tokenized input.
pub fn bleu_n(candidate: &[String], refs: &[Vec<String>], n: usize) -> f64 {
    bleu_stats(candidate, refs, n).score(n)
}
