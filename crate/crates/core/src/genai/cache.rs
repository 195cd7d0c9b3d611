use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use crate::ui_model::AltTextResult;

pub trait ResultCache: Send + Sync {
    fn get(&self, fingerprint: &str) -> Option<AltTextResult>;
    fn put(&self, fingerprint: &str, result: &AltTextResult) -> std::io::Result<()>;
}

/// Content-addressed store: `<dir>/<first 2 hex chars>/<fingerprint>.json`.
#[derive(Debug)]
pub struct DiskCache {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            write_lock: Mutex::new(()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, fingerprint: &str) -> PathBuf {
        let shard = fingerprint.get(..2).unwrap_or("__");
        self.dir.join(shard).join(format!("{fingerprint}.json"))
    }
}

impl ResultCache for DiskCache {
    fn get(&self, fingerprint: &str) -> Option<AltTextResult> {
        let bytes = std::fs::read(self.entry_path(fingerprint)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    fn put(&self, fingerprint: &str, result: &AltTextResult) -> std::io::Result<()> {
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let path = self.entry_path(fingerprint);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("json.tmp");
        let json = serde_json::to_vec_pretty(result).map_err(std::io::Error::other)?;
        std::fs::write(&tmp, json)?;
        // rename keeps readers from ever seeing a half-written entry
        std::fs::rename(&tmp, &path)
    }
}

#[derive(Debug, Default)]
pub struct MemoryCache {
    entries: RwLock<HashMap<String, AltTextResult>>,
}

impl ResultCache for MemoryCache {
    fn get(&self, fingerprint: &str) -> Option<AltTextResult> {
        self.entries.read().ok()?.get(fingerprint).cloned()
    }

    fn put(&self, fingerprint: &str, result: &AltTextResult) -> std::io::Result<()> {
        self.entries
            .write()
            .map_err(|_| std::io::Error::other("cache lock poisoned"))?
            .insert(fingerprint.to_owned(), result.clone());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ui_model::{GenerationMode, TokenUsage};
    use rust_decimal::Decimal;

    #[test]
    fn disk_layout_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path());
        let fp = "abcdef0123";
        let r = AltTextResult {
            icon_ref: "s#0".into(),
            alt_text: "delete".into(),
            mode: GenerationMode::TEXT_T,
            prompt_fingerprint: fp.into(),
            token_usage: TokenUsage {
                prompt_tokens: 3,
                completion_tokens: 1,
            },
            cost_usd: Decimal::new(175, 7),
            cached: false,
        };
        assert!(cache.get(fp).is_none());
        cache.put(fp, &r).unwrap();
        assert!(dir.path().join("ab").join("abcdef0123.json").is_file());
        assert_eq!(cache.get(fp).unwrap(), r);
    }
}
