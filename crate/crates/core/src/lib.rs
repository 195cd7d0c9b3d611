//! Context-aware alt-text generation for Android UI icons.
//!
//! The pipeline: parse a layout ([`layout`]), find icons and pull their DOM
//! context ([`extract`]), optionally add in-icon OCR text ([`vision`]), prompt
//! a chat-completions backend ([`genai`]) and write the answer back as
//! `android:contentDescription`. [`dataset`] and [`metrics`] reproduce the
//! offline evaluation over Rico / widget-caption data.

pub mod cli;
pub mod dataset;
pub mod diag;
pub mod extract;
pub mod genai;
pub mod layout;
pub mod metrics;
pub mod pipeline;
pub(crate) mod sync;
pub mod ui_model;
pub mod vision;

pub use extract::{detect_icons, diff_new_icons, extract_context, size_filter, IconCandidate, SizeFilter};
pub use ui_model::{
    node_at_path, AblationConfig, AltTextResult, BoundingBox, GenerationMode, IconContext, ImageScope, ModelVariant,
    NodeProps, Screen, TokenUsage, ViewNode,
};
