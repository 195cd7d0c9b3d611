//! METEOR-lite: staged unigram alignment (exact, suffix stem, optional
//! synonym table) with the usual F-mean and fragmentation penalty.

use std::collections::HashMap;
use std::path::Path;

pub const METEOR_ALPHA: f64 = 0.9;
pub const METEOR_BETA: f64 = 3.0;
pub const METEOR_GAMMA: f64 = 0.5;

const SUFFIXES: [&str; 5] = ["ing", "es", "ed", "s", "e"];
const MIN_STEM: usize = 3;
const SEARCH_BUDGET: usize = 200_000;

/// Strip the first listed suffix that leaves at least three characters.
pub fn stem(word: &str) -> &str {
    for suffix in SUFFIXES {
        if let Some(base) = word.strip_suffix(suffix) {
            if base.chars().count() >= MIN_STEM {
                return base;
            }
        }
    }
    word
}

/// Flat synonym groups: one group per line, words separated by commas,
/// `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    groups: HashMap<String, Vec<usize>>,
}

impl SynonymTable {
    pub fn parse(text: &str) -> Self {
        let mut groups: HashMap<String, Vec<usize>> = HashMap::new();
        let lines = text.lines().map(|l| l.split('#').next().unwrap_or_default());
        for (gid, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            for word in line.split(',').map(|w| w.trim().to_lowercase()).filter(|w| !w.is_empty()) {
                groups.entry(word).or_default().push(gid);
            }
        }
        Self { groups }
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Number of synonym groups.
    pub fn group_count(&self) -> usize {
        self.groups.values().flatten().max().map_or(0, |g| g + 1)
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        match (self.groups.get(a), self.groups.get(b)) {
            (Some(ga), Some(gb)) => ga.iter().any(|g| gb.contains(g)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchKind {
    Exact,
    Stem,
    Synonym,
}

pub fn match_kind(a: &str, b: &str, synonyms: &SynonymTable) -> Option<MatchKind> {
    if a == b {
        Some(MatchKind::Exact)
    } else if stem(a) == stem(b) {
        Some(MatchKind::Stem)
    } else if synonyms.are_synonyms(a, b) {
        Some(MatchKind::Synonym)
    } else {
        None
    }
}

/// Aligned `(candidate index, reference index, kind)` triples.
pub type Alignment = Vec<(usize, usize, MatchKind)>;

pub fn count_chunks(alignment: &Alignment) -> usize {
    let mut pairs: Vec<(usize, usize)> = alignment.iter().map(|&(i, j, _)| (i, j)).collect();
    pairs.sort_unstable();
    let breaks = pairs.windows(2).filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1)).count();
    if pairs.is_empty() {
        0
    } else {
        breaks + 1
    }
}

/// Ordering key: more exact, then more exact+stem, then more total matches,
/// then fewer chunks.
pub fn alignment_key(alignment: &Alignment) -> (usize, usize, usize, std::cmp::Reverse<usize>) {
    let exact = alignment.iter().filter(|a| a.2 == MatchKind::Exact).count();
    let stemmed = alignment.iter().filter(|a| a.2 <= MatchKind::Stem).count();
    (exact, stemmed, alignment.len(), std::cmp::Reverse(count_chunks(alignment)))
}

struct Search<'a> {
    kinds: &'a [Vec<Option<MatchKind>>],
    used: Vec<bool>,
    current: Alignment,
    best: Alignment,
    nodes: usize,
}

impl Search<'_> {
    fn run(&mut self, i: usize) -> bool {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return false;
        }
        if i == self.kinds.len() {
            if alignment_key(&self.current) > alignment_key(&self.best) {
                self.best = self.current.clone();
            }
            return true;
        }
        for j in 0..self.used.len() {
            if let (false, Some(kind)) = (self.used[j], self.kinds[i][j]) {
                self.used[j] = true;
                self.current.push((i, j, kind));
                let ok = self.run(i + 1);
                self.current.pop();
                self.used[j] = false;
                if !ok {
                    return false;
                }
            }
        }
        self.run(i + 1)
    }
}

fn greedy(kinds: &[Vec<Option<MatchKind>>], ref_len: usize) -> Alignment {
    let mut used = vec![false; ref_len];
    let mut out: Alignment = Vec::new();
    for stage in [MatchKind::Exact, MatchKind::Stem, MatchKind::Synonym] {
        for (i, row) in kinds.iter().enumerate() {
            if out.iter().any(|a| a.0 == i) {
                continue;
            }
            let prev = out.iter().find(|a| a.0 + 1 == i).map(|a| a.1 + 1);
            let candidates = (0..ref_len).filter(|&j| !used[j] && row[j] == Some(stage));
            let pick = candidates.clone().find(|&j| Some(j) == prev).or_else(|| candidates.min());
            if let Some(j) = pick {
                used[j] = true;
                out.push((i, j, stage));
            }
        }
    }
    out
}

/// Best alignment by [`alignment_key`]; exhaustive for short inputs, greedy
/// stage-by-stage once the search space grows too large.
pub fn align(candidate: &[String], reference: &[String], synonyms: &SynonymTable) -> Alignment {
    let kinds: Vec<Vec<Option<MatchKind>>> = candidate
        .iter()
        .map(|c| reference.iter().map(|r| match_kind(c, r, synonyms)).collect())
        .collect();
    let mut search = Search {
        kinds: &kinds,
        used: vec![false; reference.len()],
        current: Vec::new(),
        best: Vec::new(),
        nodes: 0,
    };
    if search.run(0) {
        search.best
    } else {
        greedy(&kinds, reference.len())
    }
}

pub fn meteor_score(matches: usize, chunks: usize, cand_len: usize, ref_len: usize) -> f64 {
    if matches == 0 || cand_len == 0 || ref_len == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let p = m / cand_len as f64;
    let r = m / ref_len as f64;
    let f_mean = p * r / (METEOR_ALPHA * p + (1.0 - METEOR_ALPHA) * r);
    let penalty = METEOR_GAMMA * (chunks as f64 / m).powf(METEOR_BETA);
    f_mean * (1.0 - penalty)
}

pub fn meteor_lite(candidate: &[String], refs: &[Vec<String>], synonyms: &SynonymTable) -> f64 {
    refs.iter()
        .map(|r| {
            let a = align(candidate, r, synonyms);
            meteor_score(a.len(), count_chunks(&a), candidate.len(), r.len())
        })
        .fold(0.0, f64::max)
}
