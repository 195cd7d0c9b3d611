//! Chat-format training files for fine-tuning, plus a sidecar config.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::backend::{ChatMessage, PriceTable};
use super::prompt::{ImagePart, PromptBuilder};
use super::GenaiError;
use crate::ui_model::{AblationConfig, GenerationMode, IconContext};

pub const PER_CLASS_CAP: usize = 15;
pub const EPOCHS: u32 = 3;
/// Flat per-image charge used in the token estimate.
pub const IMAGE_TOKEN_ESTIMATE: u64 = 85;

/// One training icon: its context, optional image, class bucket and target label.
#[derive(Debug, Clone, PartialEq)]
pub struct FinetuneExample {
    pub icon_ref: String,
    pub class: String,
    pub context: IconContext,
    pub image: Option<ImagePart>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinetuneRecord {
    pub mode: GenerationMode,
    pub messages: Vec<ChatMessage>,
    pub target: String,
}

impl FinetuneRecord {
    pub fn to_json(&self) -> Value {
        let mut messages: Vec<Value> = self.messages.iter().map(ChatMessage::to_json).collect();
        messages.push(ChatMessage::assistant(&self.target).to_json());
        json!({ "messages": messages })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub seed: Option<u64>,
    pub population: usize,
    pub sampled: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinetuneExport {
    pub data_path: PathBuf,
    pub config_path: PathBuf,
    pub records: usize,
    pub per_class: BTreeMap<String, usize>,
    pub estimated_training_tokens: u64,
    pub estimated_cost_usd: Decimal,
}

fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

/// `train.jsonl` → `train.config.json`.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    let stem = data_path.file_stem().and_then(|s| s.to_str()).unwrap_or("finetune");
    data_path.with_file_name(format!("{stem}.config.json"))
}

fn check_caps(examples: &[FinetuneExample]) -> Result<BTreeMap<String, usize>, GenaiError> {
    let mut per_class = BTreeMap::new();
    for ex in examples {
        *per_class.entry(ex.class.clone()).or_insert(0usize) += 1;
    }
    if let Some((class, n)) = per_class.iter().find(|(_, n)| **n > PER_CLASS_CAP) {
        return Err(GenaiError::Validation(format!(
            "class '{class}' has {n} records; at most {PER_CLASS_CAP} per class are allowed"
        )));
    }
    Ok(per_class)
}

pub fn build_record(ex: &FinetuneExample, mode: GenerationMode, builder: &PromptBuilder) -> Result<FinetuneRecord, GenaiError> {
    let target = ex.label.trim();
    if target.is_empty() {
        return Err(GenaiError::Validation(format!("{}: empty target label", ex.icon_ref)));
    }
    let payload = builder.build(&ex.context, mode, AblationConfig::FULL)?;
    let image = if mode.is_multimodal() {
        Some(ex.image.clone().ok_or(GenaiError::MissingImage)?)
    } else {
        None
    };
    Ok(FinetuneRecord {
        mode,
        messages: vec![ChatMessage::user(payload.text, image)],
        target: target.to_owned(),
    })
}

/// Write one chat-format JSON object per line to `out` and the sidecar config
/// next to it. Nothing is written when validation fails.
pub fn export_finetune_dataset(
    examples: &[FinetuneExample],
    mode: GenerationMode,
    builder: &PromptBuilder,
    base_model: &str,
    prices: &PriceTable,
    provenance: &Provenance,
    out: &Path,
) -> Result<FinetuneExport, GenaiError> {
    let per_class = check_caps(examples)?;
    let records = examples
        .iter()
        .map(|ex| build_record(ex, mode, builder))
        .collect::<Result<Vec<_>, _>>()?;

    let mut tokens = 0u64;
    let mut body = Vec::new();
    for r in &records {
        for m in &r.messages {
            for part in &m.content {
                tokens += match part {
                    super::ContentPart::Text(t) => estimate_tokens(t),
                    super::ContentPart::Image(_) => IMAGE_TOKEN_ESTIMATE,
                };
            }
        }
        tokens += estimate_tokens(&r.target);
        serde_json::to_writer(&mut body, &r.to_json()).map_err(|e| GenaiError::Protocol(e.to_string()))?;
        body.push(b'\n');
    }
    let trained = tokens * u64::from(EPOCHS);
    let cost = Decimal::from(trained) * prices.training_per_million / Decimal::from(1_000_000u64);

    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::File::create(out)?.write_all(&body)?;

    let config_path = sidecar_path(out);
    let config = json!({
        "base_model": base_model,
        "mode": mode.to_string(),
        "epochs": EPOCHS,
        "template_version": builder.templates.version,
        "records": records.len(),
        "per_class_cap": PER_CLASS_CAP,
        "per_class": per_class,
        "provenance": provenance,
        "estimated_training_tokens": trained,
        "estimated_cost_usd": cost.to_string(),
    });
    std::fs::write(&config_path, serde_json::to_string_pretty(&config).map_err(|e| GenaiError::Protocol(e.to_string()))? + "\n")?;

    Ok(FinetuneExport {
        data_path: out.to_path_buf(),
        config_path,
        records: records.len(),
        per_class,
        estimated_training_tokens: trained,
        estimated_cost_usd: cost,
    })
}

/// Check one exported line against the chat fine-tune schema: a single
/// `messages` key holding user turns followed by exactly one final assistant turn.
pub fn validate_chat_line(line: &Value) -> Result<(), String> {
    let obj = line.as_object().ok_or("line is not an object")?;
    if obj.len() != 1 {
        return Err("line must hold only 'messages'".into());
    }
    let messages = obj.get("messages").and_then(Value::as_array).ok_or("missing 'messages' array")?;
    if messages.len() < 2 {
        return Err("need at least a user and an assistant message".into());
    }
    for (i, m) in messages.iter().enumerate() {
        let role = m.get("role").and_then(Value::as_str).ok_or(format!("message {i}: missing role"))?;
        let last = i + 1 == messages.len();
        match (role, last) {
            ("assistant", true) => {
                let c = m.get("content").and_then(Value::as_str).ok_or("assistant content must be a string")?;
                if c.trim().is_empty() {
                    return Err("assistant content is empty".into());
                }
            }
            ("system" | "user", false) => validate_content(m.get("content"), i)?,
            _ => return Err(format!("message {i}: unexpected role '{role}' at this position")),
        }
    }
    Ok(())
}

fn validate_content(content: Option<&Value>, i: usize) -> Result<(), String> {
    match content {
        Some(Value::String(_)) => Ok(()),
        Some(Value::Array(parts)) if !parts.is_empty() => {
            for p in parts {
                match p.get("type").and_then(Value::as_str) {
                    Some("text") if p.get("text").is_some_and(Value::is_string) => {}
                    Some("image_url")
                        if p
                            .pointer("/image_url/url")
                            .and_then(Value::as_str)
                            .is_some_and(|u| u.starts_with("data:image/")) => {}
                    _ => return Err(format!("message {i}: malformed content part")),
                }
            }
            Ok(())
        }
        _ => Err(format!("message {i}: content must be a string or non-empty part list")),
    }
}
