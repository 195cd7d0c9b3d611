//! Resource-id keyword table for the icon-class buckets used by the
//! fine-tune sampler.

use super::DatasetError;

pub const BUILTIN_CLASS_TABLE: &str = include_str!("../../resources/icon_classes.csv");
pub const OTHER_CLASS: &str = "other";

#[derive(Debug, Clone, PartialEq, Eq)]
struct ClassEntry {
    name: String,
    keywords: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMap {
    entries: Vec<ClassEntry>,
}

/// Lowercase word tokens of an identifier: separators, digit runs and
/// camelCase humps all split.
pub fn identifier_tokens(id: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in id.chars() {
        if !ch.is_alphanumeric() {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
            prev = None;
            continue;
        }
        let boundary = match prev {
            Some(p) => (p.is_lowercase() && ch.is_uppercase()) || (p.is_ascii_digit() != ch.is_ascii_digit()),
            None => false,
        };
        if boundary && !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
        cur.extend(ch.to_lowercase());
        prev = Some(ch);
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

impl ClassMap {
    /// Parse a `class,keywords` CSV; keywords are `|`-separated phrases.
    pub fn from_csv(text: &str) -> Result<Self, DatasetError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| DatasetError::Format(format!("class table row {}: {e}", i + 2)))?;
            let name = row.get(0).unwrap_or_default().trim();
            if name.is_empty() || name == OTHER_CLASS {
                return Err(DatasetError::Format(format!("class table row {}: invalid class name '{name}'", i + 2)));
            }
            let keywords = row
                .get(1)
                .unwrap_or_default()
                .split('|')
                .map(identifier_tokens)
                .filter(|k| !k.is_empty())
                .collect();
            entries.push(ClassEntry {
                name: name.to_owned(),
                keywords,
            });
        }
        Ok(Self { entries })
    }

    pub fn builtin() -> Self {
        Self::from_csv(BUILTIN_CLASS_TABLE).expect("bundled class table parses")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv(&text)
    }

    /// Named classes, excluding the implicit `other`.
    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The class whose longest keyword phrase appears in the resource id;
    /// ties go to the earlier table row. No match → `other`.
    pub fn assign(&self, resource_id: Option<&str>) -> &str {
        let Some(rid) = resource_id else {
            return OTHER_CLASS;
        };
        let tokens = identifier_tokens(rid);
        let mut best: Option<(&str, usize)> = None;
        for e in &self.entries {
            for k in &e.keywords {
                if contains_run(&tokens, k) && best.is_none_or(|(_, len)| k.len() > len) {
                    best = Some((&e.name, k.len()));
                }
            }
        }
        best.map_or(OTHER_CLASS, |(n, _)| n)
    }
}
