//! `altgen.toml`: every knob the commands read, validated at load.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::extract::SizeFilter;
use crate::genai::{BackendConfig, PromptTemplates};
use crate::ui_model::{AblationConfig, GenerationMode, ImageScope, ModelVariant};
use crate::vision::OcrOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AblateFlag {
    Ocr,
    ResourceId,
    ParentSibling,
}

pub fn ablation_from_flags(flags: &[AblateFlag]) -> AblationConfig {
    AblationConfig {
        omit_ocr_text: flags.contains(&AblateFlag::Ocr),
        omit_resource_id: flags.contains(&AblateFlag::ResourceId),
        omit_parent_sibling: flags.contains(&AblateFlag::ParentSibling),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationDefaults {
    pub mode: ModelVariant,
    pub image_scope: ImageScope,
    pub ablate: Vec<AblateFlag>,
    /// Use the label-free TextT template when no icon-only label is available.
    pub allow_unlabeled: bool,
}

impl Default for GenerationDefaults {
    fn default() -> Self {
        Self {
            mode: ModelVariant::Mmt,
            image_scope: ImageScope::Icon,
            ablate: Vec::new(),
            allow_unlabeled: true,
        }
    }
}

impl GenerationDefaults {
    pub fn mode(&self) -> GenerationMode {
        GenerationMode {
            variant: self.mode,
            image_scope: self.image_scope,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OcrConfig {
    /// Program plus arguments of a JSON-lines OCR process.
    pub command: Vec<String>,
    /// Endpoint accepting `image/png` POSTs.
    pub url: Option<String>,
    /// Fixture file for [`crate::vision::FixtureOcr`].
    pub fixture: Option<PathBuf>,
    pub timeout_secs: u64,
    pub min_confidence: f64,
    /// Run OCR on the standardized icon instead of the raw crop.
    pub on_standardized: bool,
    pub max_concurrency: usize,
}

impl Default for OcrConfig {
    fn default() -> Self {
        let o = OcrOptions::default();
        Self {
            command: Vec::new(),
            url: None,
            fixture: None,
            timeout_secs: 30,
            min_confidence: o.min_confidence,
            on_standardized: o.on_standardized,
            max_concurrency: o.max_concurrency,
        }
    }
}

impl OcrConfig {
    pub fn options(&self) -> OcrOptions {
        OcrOptions {
            min_confidence: self.min_confidence,
            on_standardized: self.on_standardized,
            max_concurrency: self.max_concurrency,
        }
    }

    pub fn is_configured(&self) -> bool {
        !self.command.is_empty() || self.url.is_some() || self.fixture.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpscalerConfig {
    /// Program plus arguments; `{input}` and `{output}` are substituted.
    pub command: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WatchConfig {
    pub debounce_ms: u64,
    pub annotate_on_first_sight: bool,
    pub retry_attempts: u32,
    pub retry_backoff_ms: u64,
}

impl Default for WatchConfig {
    fn default() -> Self {
        Self {
            debounce_ms: 300,
            annotate_on_first_sight: false,
            retry_attempts: 5,
            retry_backoff_ms: 1_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptOverrides {
    pub textt_file: Option<PathBuf>,
    pub textt_unlabeled_file: Option<PathBuf>,
    pub mmt_file: Option<PathBuf>,
    pub classifier_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataFiles {
    /// Replacement for the bundled icon-class keyword table.
    pub class_table: Option<PathBuf>,
    /// Synonym groups for METEOR-lite.
    pub synonyms: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub backend: BackendConfig,
    pub generation: GenerationDefaults,
    pub ocr: OcrConfig,
    pub upscaler: UpscalerConfig,
    pub size_filter: SizeFilter,
    pub watch: WatchConfig,
    pub prompts: PromptOverrides,
    pub data: DataFiles,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl ToolConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: ToolConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_owned(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::from_toml(&text, &path.display().to_string())?;
        cfg.resolve_relative(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Paths in a config file are relative to the file.
    fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.cache_dir);
        fix(&mut self.ocr.fixture);
        fix(&mut self.prompts.textt_file);
        fix(&mut self.prompts.textt_unlabeled_file);
        fix(&mut self.prompts.mmt_file);
        fix(&mut self.prompts.classifier_file);
        fix(&mut self.data.class_table);
        fix(&mut self.data.synonyms);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let b = &self.backend;
        if b.endpoint.trim().is_empty() {
            return bad("backend.endpoint is empty".into());
        }
        if b.model.trim().is_empty() {
            return bad("backend.model is empty".into());
        }
        if !(0.0..=2.0).contains(&b.temperature) {
            return bad(format!("backend.temperature {} outside [0, 2]", b.temperature));
        }
        if b.max_output_tokens == 0 {
            return bad("backend.max_output_tokens must be > 0".into());
        }
        if b.max_in_flight == 0 {
            return bad("backend.max_in_flight must be > 0".into());
        }
        if b.retry.max_attempts == 0 {
            return bad("backend.retry.max_attempts must be > 0".into());
        }
        b.prices.validate().map_err(|m| ConfigError::Invalid(format!("backend.prices: {m}")))?;
        if !(0.0..=1.0).contains(&self.ocr.min_confidence) {
            return bad("ocr.min_confidence must be within [0, 1]".into());
        }
        if self.ocr.max_concurrency == 0 {
            return bad("ocr.max_concurrency must be > 0".into());
        }
        let engines = usize::from(!self.ocr.command.is_empty()) + usize::from(self.ocr.url.is_some()) + usize::from(self.ocr.fixture.is_some());
        if engines > 1 {
            return bad("configure at most one of ocr.command, ocr.url, ocr.fixture".into());
        }
        let f = &self.size_filter;
        if !(f.max_screen_fraction > 0.0 && f.max_screen_fraction <= 1.0) {
            return bad("size_filter.max_screen_fraction must be within (0, 1]".into());
        }
        if f.max_aspect_ratio < 1.0 {
            return bad("size_filter.max_aspect_ratio must be >= 1".into());
        }
        if self.generation.mode == ModelVariant::TextT && self.generation.image_scope == ImageScope::Container {
            return bad("generation.image_scope = \"container\" needs mode = \"mmt\"".into());
        }
        Ok(())
    }

    /// Built-in templates with any configured overrides applied.
    pub fn templates(&self) -> Result<PromptTemplates, ConfigError> {
        let mut t = PromptTemplates::default();
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|e| ConfigError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        };
        let o = &self.prompts;
        if let Some(p) = &o.textt_file {
            t.textt = read(p)?;
        }
        if let Some(p) = &o.textt_unlabeled_file {
            t.textt_unlabeled = read(p)?;
        }
        if let Some(p) = &o.mmt_file {
            t.mmt = read(p)?;
        }
        if let Some(p) = &o.classifier_file {
            t.classifier = read(p)?;
        }
        t.refresh_version();
        Ok(t)
    }
}
