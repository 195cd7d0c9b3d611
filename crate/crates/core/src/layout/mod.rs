//! Android XML layouts: parsing into [`Screen`] trees with byte spans,
//! drawable lookup, alt-text injection and the layout watcher.

mod drawable;
mod inject;
mod parse;
mod watch;

pub use drawable::{resolve_drawable, DENSITY_ORDER};
pub use inject::{escape_attr, inject_alt_text, plan_injection, InjectOptions, Injection};
pub use parse::{parse_layout, parse_layout_file, LayoutElement, ParsedLayout, RawAttr, SourceSpan};
pub use watch::{is_layout_path, watch_layouts, WatchEvent, WatchHandle, WatchOptions};

use thiserror::Error;

pub const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";
pub const APP_NS: &str = "http://schemas.android.com/apk/res-auto";
pub const TOOLS_NS: &str = "http://schemas.android.com/tools";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("malformed layout xml at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("bad path: no element at {path:?} (failed at depth {depth})")]
    BadPath { path: Vec<usize>, depth: usize },
    #[error("element at {path:?} already has a contentDescription")]
    AlreadyAnnotated { path: Vec<usize> },
    #[error("element at {path:?} changed since it was read: {reason}")]
    Moved { path: Vec<usize>, reason: String },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub(crate) fn line_col(bytes: &[u8], offset: usize) -> (usize, usize) {
    let upto = &bytes[..offset.min(bytes.len())];
    let line = upto.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = upto.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
    (line, col)
}
