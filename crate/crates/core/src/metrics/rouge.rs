pub const ROUGE_BETA: f64 = 1.2;

pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// LCS F-measure with β = 1.2, best over references.
pub fn rouge_l(candidate: &[String], refs: &[Vec<String>]) -> f64 {
    if candidate.is_empty() {
        return 0.0;
    }
    let b2 = ROUGE_BETA * ROUGE_BETA;
    refs.iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let lcs = lcs_len(candidate, r) as f64;
            if lcs == 0.0 {
                return 0.0;
            }
            let p = lcs / candidate.len() as f64;
            let rec = lcs / r.len() as f64;
            (1.0 + b2) * p * rec / (rec + b2 * p)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::tokenize;

    #[test]
    fn examples() {
        let t = tokenize;
        assert_eq!(rouge_l(&t("go back"), &[t("go back")]), 1.0);
        let f = rouge_l(&t("select angola"), &[t("set your location to angola")]);
        assert!((f - 0.2652).abs() < 5e-5, "{f}");
        assert_eq!(rouge_l(&t("a b"), &[t("c d")]), 0.0);
        assert_eq!(lcs_len(&t("a b c d"), &t("b d a c")), 2);
    }
}
