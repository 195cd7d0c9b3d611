//! Rico / widget-caption ingestion, the filtered icon dataset, label sampling
//! and the line-delimited manifest.

mod build;
pub mod classes;
pub mod rico;
mod sample;

use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ui_model::{BoundingBox, IconContext};

pub use build::{build_icon_dataset, load_captions, load_splits, BuildReport, CaptionRow, DatasetBuild};
pub use classes::{ClassMap, OTHER_CLASS};
pub use rico::{load_rico_dir, load_rico_screen};
pub use sample::{sample_finetune_subset, sample_r1, DEFAULT_CLASS_CAP};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "valid" | "val" | "validation" | "dev" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(DatasetError::Format(format!("unknown split '{other}'"))),
        }
    }
}

/// One captioned icon, self-contained enough to drive prompting and scoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedIcon {
    pub screen_id: String,
    pub path: Vec<usize>,
    pub bounds: BoundingBox,
    pub split: Split,
    pub labels: Vec<String>,
    pub context: IconContext,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_bounds: Option<BoundingBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screenshot: Option<PathBuf>,
}

impl AnnotatedIcon {
    pub fn icon_ref(&self) -> String {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        format!("{}#{}", self.screen_id, path.join("."))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub icons: usize,
    pub labels: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub screens: usize,
    pub train: SplitCounts,
    pub valid: SplitCounts,
    pub test: SplitCounts,
    pub total: SplitCounts,
}

impl DatasetStats {
    pub fn from_icons(icons: &[AnnotatedIcon]) -> Self {
        let mut s = DatasetStats::default();
        let mut screens = std::collections::HashSet::new();
        for icon in icons {
            screens.insert(icon.screen_id.as_str());
            let c = s.split_mut(icon.split);
            c.icons += 1;
            c.labels += icon.labels.len();
        }
        s.screens = screens.len();
        s.total = SplitCounts {
            icons: s.train.icons + s.valid.icons + s.test.icons,
            labels: s.train.labels + s.valid.labels + s.test.labels,
        };
        s
    }

    pub fn split(&self, split: Split) -> SplitCounts {
        match split {
            Split::Train => self.train,
            Split::Valid => self.valid,
            Split::Test => self.test,
        }
    }

    fn split_mut(&mut self, split: Split) -> &mut SplitCounts {
        match split {
            Split::Train => &mut self.train,
            Split::Valid => &mut self.valid,
            Split::Test => &mut self.test,
        }
    }
}

pub fn write_manifest(path: &Path, icons: &[AnnotatedIcon]) -> Result<(), DatasetError> {
    let io = |e: std::io::Error| DatasetError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for icon in icons {
        serde_json::to_writer(&mut out, icon).map_err(|e| DatasetError::Format(e.to_string()))?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_manifest(path: &Path) -> Result<Vec<AnnotatedIcon>, DatasetError> {
    let io = |e: std::io::Error| DatasetError::Io(format!("{}: {e}", path.display()));
    let reader = std::io::BufReader::new(std::fs::File::open(path).map_err(io)?);
    let mut icons = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let icon = serde_json::from_str(&line)
            .map_err(|e| DatasetError::Format(format!("{} line {}: {e}", path.display(), i + 1)))?;
        icons.push(icon);
    }
    Ok(icons)
}
