use serde::{Deserialize, Serialize};

/// A non-fatal note produced while degrading gracefully.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub source: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(source: &str, message: impl Into<String>) -> Self {
        let d = Self {
            source: source.to_owned(),
            message: message.into(),
        };
        log::warn!("[{}] {}", d.source, d.message);
        d
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.source, self.message)
    }
}
