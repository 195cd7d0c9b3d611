//! Prompting, the chat backend client, result caching, cost accounting and
//! fine-tune export.

pub mod backend;
pub mod cache;
pub mod cost;
pub mod finetune;
pub mod generate;
pub mod prompt;

pub use backend::{
    parse_chat_response, BackendConfig, ChatBackend, ChatMessage, ChatRequest, ChatResponse, ContentPart, HttpBackend,
    PriceTable, RetryPolicy, DEFAULT_API_KEY_ENV, FINGERPRINT_HEADER,
};
pub use cache::{DiskCache, MemoryCache, ResultCache};
pub use cost::{account_costs, CostSummary, ModeCost};
pub use finetune::{export_finetune_dataset, validate_chat_line, FinetuneExample, FinetuneExport, FinetuneRecord, Provenance, PER_CLASS_CAP};
pub use generate::{classify_icon, generate_alt_text, normalize_reply, GenerationRequest, GenerationSettings, LlmClient};
pub use prompt::{
    ablate, build_prompt, ImagePart, PromptBuilder, PromptPayload, PromptTemplates, CLASSIFIER_PROMPT, MMT_TEMPLATE,
    TEMPLATE_VERSION, TEXTT_TEMPLATE, TEXTT_UNLABELED_TEMPLATE,
};

#[derive(Debug, thiserror::Error)]
pub enum GenaiError {
    #[error("missing icon label: TextT needs an icon-only label")]
    MissingIconLabel,
    #[error("multimodal mode needs an image")]
    MissingImage,
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("backend failed after {} attempt(s): {}", attempts.len(), attempts.join("; "))]
    Backend { attempts: Vec<String> },
    #[error("empty generation")]
    EmptyGeneration,
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
