use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rust_decimal::Decimal;

use super::backend::{BackendConfig, ChatBackend, ChatMessage, ChatRequest, HttpBackend, PriceTable};
use super::cache::ResultCache;
use super::prompt::{ImagePart, PromptBuilder};
use super::GenaiError;
use crate::diag::Diagnostic;
use crate::ui_model::{AblationConfig, AltTextResult, GenerationMode, IconContext, TokenUsage};

/// Decoding and pricing knobs shared by every request.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSettings {
    pub model: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub prices: PriceTable,
}

impl From<&BackendConfig> for GenerationSettings {
    fn from(c: &BackendConfig) -> Self {
        Self {
            model: c.model.clone(),
            max_tokens: c.max_output_tokens,
            temperature: c.temperature,
            prices: c.prices.clone(),
        }
    }
}

/// A backend plus settings plus per-fingerprint request coalescing.
pub struct LlmClient {
    backend: Arc<dyn ChatBackend>,
    pub settings: GenerationSettings,
    inflight: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl LlmClient {
    pub fn new(backend: Arc<dyn ChatBackend>, settings: GenerationSettings) -> Self {
        Self {
            backend,
            settings,
            inflight: Mutex::new(HashMap::new()),
        }
    }

    pub fn from_config(config: &BackendConfig) -> Result<Self, GenaiError> {
        Ok(Self::new(Arc::new(HttpBackend::new(config)?), GenerationSettings::from(config)))
    }

    fn request(&self, message: ChatMessage, fingerprint: Option<String>) -> ChatRequest {
        ChatRequest {
            model: self.settings.model.clone(),
            messages: vec![message],
            max_tokens: self.settings.max_tokens,
            temperature: self.settings.temperature,
            fingerprint,
        }
    }

    fn key_lock(&self, key: &str) -> Arc<Mutex<()>> {
        let mut map = self.inflight.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key.to_owned()).or_default().clone()
    }
}

fn first_line(s: &str) -> &str {
    s.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("")
}

const QUOTES: &[char] = &['"', '\'', '`', '\u{201c}', '\u{201d}', '\u{2018}', '\u{2019}'];

/// First non-empty line with surrounding quotes and trailing periods removed.
pub fn normalize_reply(raw: &str) -> String {
    let mut s = first_line(raw);
    loop {
        let before = s;
        s = s.trim();
        if let Some(inner) = s.strip_suffix('.') {
            s = inner;
        }
        if s.len() >= 2 && s.starts_with(QUOTES) && s.ends_with(QUOTES) {
            let open = s.chars().next().map_or(0, char::len_utf8);
            let close = s.chars().last().map_or(0, char::len_utf8);
            s = &s[open..s.len() - close];
        }
        if s == before {
            return s.to_owned();
        }
    }
}

/// Zero-shot icon-only label. Replies longer than six words are cut to their
/// first two words.
pub fn classify_icon(icon_png: &[u8], client: &LlmClient, prompt: &str) -> Result<(String, Option<Diagnostic>), GenaiError> {
    let req = client.request(ChatMessage::user(prompt, Some(ImagePart::png(icon_png.to_vec()))), None);
    let resp = client.backend.complete(&req)?;
    let line = first_line(&resp.content).to_owned();
    if line.is_empty() {
        return Err(GenaiError::EmptyGeneration);
    }
    let words: Vec<&str> = line.split_whitespace().collect();
    if words.len() > 6 {
        let short = words[..2].join(" ");
        let diag = Diagnostic::new(
            "classify",
            format!("classifier reply had {} words; truncated to '{short}'", words.len()),
        );
        return Ok((short, Some(diag)));
    }
    Ok((line, None))
}

#[derive(Debug, Clone)]
pub struct GenerationRequest {
    pub icon_ref: String,
    pub context: IconContext,
    pub image: Option<ImagePart>,
    pub mode: GenerationMode,
    pub ablation: AblationConfig,
}

/// Build the prompt, consult the cache, call the backend once on a miss.
pub fn generate_alt_text(
    request: &GenerationRequest,
    builder: &PromptBuilder,
    client: &LlmClient,
    cache: Option<&dyn ResultCache>,
) -> Result<AltTextResult, GenaiError> {
    let mut payload = builder.build(&request.context, request.mode, request.ablation)?;
    if request.mode.is_multimodal() {
        let image = request.image.clone().ok_or(GenaiError::MissingImage)?;
        payload = payload.with_image(image);
    }
    let fingerprint = payload.fingerprint(&client.settings.model);

    let lock = client.key_lock(&fingerprint);
    let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());

    if let Some(hit) = cache.and_then(|c| c.get(&fingerprint)) {
        return Ok(AltTextResult {
            icon_ref: request.icon_ref.clone(),
            token_usage: TokenUsage::default(),
            cost_usd: Decimal::ZERO,
            cached: true,
            ..hit
        });
    }

    let req = client.request(ChatMessage::user(payload.text, payload.image), Some(fingerprint.clone()));
    let resp = client.backend.complete(&req)?;
    let alt_text = normalize_reply(&resp.content);
    if alt_text.is_empty() {
        return Err(GenaiError::EmptyGeneration);
    }
    let result = AltTextResult {
        icon_ref: request.icon_ref.clone(),
        alt_text,
        mode: request.mode,
        prompt_fingerprint: fingerprint.clone(),
        token_usage: resp.usage,
        cost_usd: client.settings.prices.cost(resp.usage),
        cached: false,
    };
    if let Some(c) = cache {
        if let Err(e) = c.put(&fingerprint, &result) {
            log::warn!("cache write failed for {fingerprint}: {e}");
        }
    }
    Ok(result)
}
