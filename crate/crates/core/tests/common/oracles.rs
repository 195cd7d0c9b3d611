//! Brute-force reference implementations of the caption metrics. They share
//! no code with the library: n-grams are enumerated as joined strings, LCS by
//! trying every subsequence, alignments by exhaustive enumeration.

fn grams(tokens: &[String], n: usize) -> Vec<String> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n).map(|i| tokens[i..i + n].join(" ")).collect()
}

fn count(list: &[String], g: &str) -> usize {
    list.iter().filter(|x| *x == g).count()
}

fn distinct(list: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for g in list {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

/// (clipped matches, candidate n-gram total) for one order.
pub fn clipped(cand: &[String], refs: &[Vec<String>], n: usize) -> (usize, usize) {
    let c = grams(cand, n);
    let matched = distinct(&c)
        .iter()
        .map(|g| {
            let max_ref = refs.iter().map(|r| count(&grams(r, n), g)).max().unwrap_or(0);
            count(&c, g).min(max_ref)
        })
        .sum();
    (matched, c.len())
}

pub fn closest_len(cand_len: usize, refs: &[Vec<String>]) -> usize {
    let mut best = refs[0].len();
    for r in refs {
        let d = (r.len() as i64 - cand_len as i64).abs();
        let bd = (best as i64 - cand_len as i64).abs();
        if d < bd || (d == bd && r.len() < best) {
            best = r.len();
        }
    }
    best
}

fn bleu_from(matches: &[usize], totals: &[usize], c: usize, r: usize) -> f64 {
    if c == 0 || matches.contains(&0) {
        return 0.0;
    }
    let log_p: f64 = matches.iter().zip(totals).map(|(&m, &t)| (m as f64 / t as f64).ln()).sum::<f64>() / matches.len() as f64;
    let bp = if c >= r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    bp * log_p.exp()
}

pub fn bleu(cand: &[String], refs: &[Vec<String>], n: usize) -> f64 {
    let (m, t): (Vec<usize>, Vec<usize>) = (1..=n).map(|k| clipped(cand, refs, k)).unzip();
    bleu_from(&m, &t, cand.len(), closest_len(cand.len(), refs))
}

/// Corpus BLEU: clipped counts and lengths summed over items first.
pub fn corpus_bleu(items: &[(Vec<String>, Vec<Vec<String>>)], n: usize) -> f64 {
    let mut m = vec![0; n];
    let mut t = vec![0; n];
    let (mut c, mut r) = (0, 0);
    for (cand, refs) in items {
        for k in 1..=n {
            let (a, b) = clipped(cand, refs, k);
            m[k - 1] += a;
            t[k - 1] += b;
        }
        c += cand.len();
        r += closest_len(cand.len(), refs);
    }
    bleu_from(&m, &t, c, r)
}

fn is_subsequence(needle: &[&String], hay: &[String]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == *n))
}

/// Longest common subsequence by trying every subsequence of the shorter input.
pub fn lcs(a: &[String], b: &[String]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    assert!(short.len() <= 20, "exhaustive LCS only for short inputs");
    let mut best = 0;
    for mask in 0u32..(1 << short.len()) {
        let pick: Vec<&String> = (0..short.len()).filter(|i| mask & (1 << i) != 0).map(|i| &short[i]).collect();
        if pick.len() > best && is_subsequence(&pick, long) {
            best = pick.len();
        }
    }
    best
}

pub fn rouge_l(cand: &[String], refs: &[Vec<String>]) -> f64 {
    let beta2 = 1.2f64 * 1.2;
    refs.iter()
        .map(|r| {
            let l = lcs(cand, r) as f64;
            if l == 0.0 {
                return 0.0;
            }
            let p = l / cand.len() as f64;
            let rec = l / r.len() as f64;
            (1.0 + beta2) * p * rec / (rec + beta2 * p)
        })
        .fold(0.0, f64::max)
}

/// Suffix stripping: first of ing, es, ed, s, e leaving three or more chars.
pub fn stem(w: &str) -> String {
    for suf in ["ing", "es", "ed", "s", "e"] {
        if w.len() >= suf.len() + 3 && w.ends_with(suf) {
            return w[..w.len() - suf.len()].to_owned();
        }
    }
    w.to_owned()
}

/// 2 = exact, 1 = stem, 0 = none.
fn kind(a: &str, b: &str) -> u8 {
    if a == b {
        2
    } else if stem(a) == stem(b) {
        1
    } else {
        0
    }
}

fn chunks(pairs: &[(usize, usize)]) -> usize {
    let mut p = pairs.to_vec();
    p.sort();
    let mut c = 0;
    for (k, &(i, j)) in p.iter().enumerate() {
        if k == 0 || p[k - 1] != (i - 1, j.wrapping_sub(1)) {
            c += 1;
        }
    }
    c
}

fn enumerate_alignments(cand: &[String], r: &[String], i: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize, u8)>, out: &mut Vec<Vec<(usize, usize, u8)>>) {
    if i == cand.len() {
        out.push(cur.clone());
        return;
    }
    enumerate_alignments(cand, r, i + 1, used, cur, out);
    for j in 0..r.len() {
        let k = kind(&cand[i], &r[j]);
        if !used[j] && k > 0 {
            used[j] = true;
            cur.push((i, j, k));
            enumerate_alignments(cand, r, i + 1, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
}

/// METEOR-lite over every possible one-to-one alignment; the alignment kept
/// maximises (exact, exact+stem, total) and then minimises chunks.
pub fn meteor(cand: &[String], refs: &[Vec<String>]) -> f64 {
    refs.iter()
        .map(|r| {
            let mut all = Vec::new();
            enumerate_alignments(cand, r, 0, &mut vec![false; r.len()], &mut Vec::new(), &mut all);
            let key = |a: &Vec<(usize, usize, u8)>| {
                let pairs: Vec<(usize, usize)> = a.iter().map(|x| (x.0, x.1)).collect();
                (
                    a.iter().filter(|x| x.2 == 2).count(),
                    a.len(),
                    a.len(),
                    usize::MAX - chunks(&pairs),
                )
            };
            let best = all.iter().max_by_key(|a| key(a)).unwrap();
            let m = best.len() as f64;
            if m == 0.0 {
                return 0.0;
            }
            let pairs: Vec<(usize, usize)> = best.iter().map(|x| (x.0, x.1)).collect();
            let p = m / cand.len() as f64;
            let rec = m / r.len() as f64;
            let f = p * rec / (0.9 * p + 0.1 * rec);
            f * (1.0 - 0.5 * (chunks(&pairs) as f64 / m).powi(3))
        })
        .fold(0.0, f64::max)
}

/// CIDEr-D by direct TF-IDF cosine: df over per-item reference sets,
/// idf = ln((N + 1) / max(df, 1)), n = 1..4, σ = 6, ×10.
pub fn cider(corpus: &[(Vec<String>, Vec<Vec<String>>)]) -> Vec<f64> {
    let big_n = corpus.len() as f64;
    let df = |g: &str, n: usize| -> f64 {
        corpus
            .iter()
            .filter(|(_, refs)| refs.iter().any(|r| grams(r, n).iter().any(|x| x == g)))
            .count()
            .max(1) as f64
    };
    let vector = |toks: &[String], n: usize| -> Vec<(String, f64)> {
        let gs = grams(toks, n);
        distinct(&gs)
            .into_iter()
            .map(|g| {
                let w = count(&gs, &g) as f64 * ((big_n + 1.0) / df(&g, n)).ln();
                (g, w)
            })
            .collect()
    };
    let norm = |v: &[(String, f64)]| v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    corpus
        .iter()
        .map(|(cand, refs)| {
            let mut total = 0.0;
            for n in 1..=4 {
                let h = vector(cand, n);
                let mut s = 0.0;
                for r in refs {
                    let rv = vector(r, n);
                    let (hn, rn) = (norm(&h), norm(&rv));
                    if hn == 0.0 || rn == 0.0 {
                        continue;
                    }
                    let dot: f64 = h
                        .iter()
                        .map(|(g, hw)| rv.iter().find(|(x, _)| x == g).map_or(0.0, |(_, rw)| hw.min(*rw) * rw))
                        .sum();
                    let d = cand.len() as f64 - r.len() as f64;
                    s += dot / (hn * rn) * (-d * d / 72.0).exp();
                }
                total += s / refs.len() as f64;
            }
            total / 4.0 * 10.0
        })
        .collect()
}

/// Lowercase, split on whitespace, trim ASCII punctuation from each token.
pub fn tokens(s: &str) -> Vec<String> {
    s.split_whitespace()
        .map(|t| t.to_lowercase().trim_matches(|c: char| c.is_ascii_punctuation()).to_owned())
        .filter(|t| !t.is_empty())
        .collect()
}
