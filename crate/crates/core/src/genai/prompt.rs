use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::GenaiError;
use crate::ui_model::{AblationConfig, GenerationMode, IconContext, ModelVariant};

pub const TEXTT_TEMPLATE: &str = include_str!("../../resources/prompts/textt.txt");
pub const TEXTT_UNLABELED_TEMPLATE: &str = include_str!("../../resources/prompts/textt_unlabeled.txt");
pub const MMT_TEMPLATE: &str = include_str!("../../resources/prompts/mmt.txt");
pub const CLASSIFIER_PROMPT: &str = include_str!("../../resources/prompts/classifier.txt");
pub const TEMPLATE_VERSION: &str = "builtin-v1";

const LABEL_SLOT: &str = "{icon-only label}";
const CONTEXT_SLOT: &str = "{icon context}";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplates {
    pub textt: String,
    pub textt_unlabeled: String,
    pub mmt: String,
    pub classifier: String,
    /// `builtin-v1`, or `custom:<sha256 prefix>` once anything is overridden.
    pub version: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        Self {
            textt: TEXTT_TEMPLATE.to_owned(),
            textt_unlabeled: TEXTT_UNLABELED_TEMPLATE.to_owned(),
            mmt: MMT_TEMPLATE.to_owned(),
            classifier: CLASSIFIER_PROMPT.to_owned(),
            version: TEMPLATE_VERSION.to_owned(),
        }
    }
}

impl PromptTemplates {
    /// Recompute `version` so overridden templates are visible in report echoes.
    pub fn refresh_version(&mut self) {
        let builtin = Self::default();
        if self.textt == builtin.textt
            && self.textt_unlabeled == builtin.textt_unlabeled
            && self.mmt == builtin.mmt
            && self.classifier == builtin.classifier
        {
            self.version = TEMPLATE_VERSION.to_owned();
            return;
        }
        let mut h = Sha256::new();
        for t in [&self.textt, &self.textt_unlabeled, &self.mmt, &self.classifier] {
            h.update(t.as_bytes());
            h.update([0]);
        }
        self.version = format!("custom:{}", &hex::encode(h.finalize())[..12]);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagePart {
    pub bytes: Vec<u8>,
    pub media_type: String,
}

impl ImagePart {
    pub fn png(bytes: Vec<u8>) -> Self {
        Self {
            bytes,
            media_type: "image/png".to_owned(),
        }
    }

    pub fn data_url(&self) -> String {
        use base64::Engine as _;
        format!(
            "data:{};base64,{}",
            self.media_type,
            base64::engine::general_purpose::STANDARD.encode(&self.bytes)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptPayload {
    pub text: String,
    pub image: Option<ImagePart>,
    pub mode: GenerationMode,
}

impl PromptPayload {
    pub fn with_image(mut self, image: ImagePart) -> Self {
        self.image = Some(image);
        self
    }

    /// Stable key over model id, prompt text and image bytes.
    pub fn fingerprint(&self, model_id: &str) -> String {
        let mut h = Sha256::new();
        h.update(model_id.as_bytes());
        h.update([0]);
        h.update(self.text.as_bytes());
        h.update([0]);
        if let Some(img) = &self.image {
            h.update(img.media_type.as_bytes());
            h.update([0]);
            h.update(&img.bytes);
        }
        hex::encode(h.finalize())
    }
}

/// Apply an ablation by dropping the withheld components from the context.
pub fn ablate(ctx: &IconContext, ablation: AblationConfig) -> IconContext {
    let mut out = ctx.clone();
    if ablation.omit_ocr_text {
        out.in_icon_text.clear();
    }
    if ablation.omit_resource_id {
        out.ui_element_info = out.ui_element_info.without_resource_id();
    }
    if ablation.omit_parent_sibling {
        out.parent_node = None;
        out.sibling_nodes.clear();
    }
    out
}

/// Single left-to-right pass so substituted values are never re-scanned.
fn render(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    'outer: while !rest.is_empty() {
        for (slot, value) in slots {
            if let Some(tail) = rest.strip_prefix(slot) {
                out.push_str(value);
                rest = tail;
                continue 'outer;
            }
        }
        let ch = rest.chars().next().expect("non-empty");
        out.push(ch);
        rest = &rest[ch.len_utf8()..];
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct PromptBuilder {
    pub templates: PromptTemplates,
    /// Fall back to the unlabeled TextT template instead of failing.
    pub allow_unlabeled: bool,
}

impl PromptBuilder {
    pub fn build(&self, ctx: &IconContext, mode: GenerationMode, ablation: AblationConfig) -> Result<PromptPayload, GenaiError> {
        let context_json = ablate(ctx, ablation).to_prompt_json();
        let text = match mode.variant {
            ModelVariant::TextT => match ctx.icon_label.as_deref().map(str::trim).filter(|l| !l.is_empty()) {
                Some(label) => render(&self.templates.textt, &[(LABEL_SLOT, label), (CONTEXT_SLOT, &context_json)]),
                None if self.allow_unlabeled => render(&self.templates.textt_unlabeled, &[(CONTEXT_SLOT, &context_json)]),
                None => return Err(GenaiError::MissingIconLabel),
            },
            ModelVariant::Mmt => render(&self.templates.mmt, &[(CONTEXT_SLOT, &context_json)]),
        };
        Ok(PromptPayload { text, image: None, mode })
    }
}

/// Fill the TextT or MMT template for `ctx` with the built-in templates.
pub fn build_prompt(ctx: &IconContext, mode: GenerationMode, ablation: AblationConfig) -> Result<PromptPayload, GenaiError> {
    PromptBuilder::default().build(ctx, mode, ablation)
}
