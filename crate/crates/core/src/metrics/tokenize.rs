pub const TOKENIZER_VERSION: &str = "lower-ws-punct-v1";

/// Lowercase, split on whitespace, strip leading/trailing ASCII punctuation
/// from each token and drop what becomes empty.
pub fn tokenize(s: &str) -> Vec<String> {
    s.split_whitespace()
        .map(|t| t.trim_matches(|c: char| c.is_ascii_punctuation()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}
