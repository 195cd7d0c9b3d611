//! Per-icon orchestration: images, OCR, zero-shot label, prompt, backend.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use image::RgbaImage;
use sha2::{Digest, Sha256};

use crate::dataset::AnnotatedIcon;
use crate::diag::Diagnostic;
use crate::genai::{classify_icon, generate_alt_text, GenaiError, GenerationRequest, ImagePart, LlmClient, PromptBuilder, ResultCache};
use crate::ui_model::{AblationConfig, AltTextResult, BoundingBox, GenerationMode, IconContext, ImageScope, ModelVariant};
use crate::vision::{crop_icon, encode_png, load_image, mark_bbox, ocr_in_icon_text, standardize, OcrEngine, OcrOptions, Upscaler, VisionError};

/// Images available for one icon.
#[derive(Debug, Clone, Default)]
pub struct IconImages {
    /// The icon as cropped or loaded, before standardization.
    pub raw: Option<RgbaImage>,
    /// 128×128 standardized icon.
    pub icon: Option<RgbaImage>,
    /// Parent container with the icon framed in red.
    pub container: Option<RgbaImage>,
}

fn push(diags: &mut Vec<Diagnostic>, d: Option<Diagnostic>) {
    diags.extend(d);
}

/// Cut the icon and its marked container out of a full screenshot.
pub fn images_from_screenshot(
    screenshot: &RgbaImage,
    bounds: BoundingBox,
    parent_bounds: Option<BoundingBox>,
    upscaler: Option<&dyn Upscaler>,
) -> Result<(IconImages, Vec<Diagnostic>), VisionError> {
    let mut diags = Vec::new();
    let (raw, d) = crop_icon(screenshot, bounds)?;
    push(&mut diags, d);
    let (icon, d) = standardize(&raw, upscaler)?;
    push(&mut diags, d);
    let container = match parent_bounds {
        Some(pb) => {
            let (crop, d) = crop_icon(screenshot, pb)?;
            push(&mut diags, d);
            match bounds.relative_to(&pb) {
                Some(rel) => mark_bbox(&crop, rel),
                None => crop,
            }
        }
        None => mark_bbox(screenshot, bounds),
    };
    Ok((
        IconImages {
            raw: Some(raw),
            icon: Some(icon),
            container: Some(container),
        },
        diags,
    ))
}

/// Icon image from a drawable file; layouts carry no container raster.
pub fn images_from_file(path: &Path, upscaler: Option<&dyn Upscaler>) -> Result<(IconImages, Vec<Diagnostic>), VisionError> {
    let raw = load_image(path)?;
    let (icon, d) = standardize(&raw, upscaler)?;
    Ok((
        IconImages {
            raw: Some(raw),
            icon: Some(icon),
            container: None,
        },
        d.into_iter().collect(),
    ))
}

pub struct Pipeline {
    pub client: LlmClient,
    pub cache: Option<Arc<dyn ResultCache>>,
    pub builder: PromptBuilder,
    pub ocr: Option<Arc<dyn OcrEngine>>,
    pub ocr_options: OcrOptions,
    pub upscaler: Option<Arc<dyn Upscaler>>,
    labels: Mutex<HashMap<String, Option<String>>>,
}

/// Outcome of one generation plus everything that degraded along the way.
#[derive(Debug, Clone)]
pub struct Generated {
    pub result: AltTextResult,
    pub context: IconContext,
    pub diagnostics: Vec<Diagnostic>,
}

impl Pipeline {
    pub fn new(client: LlmClient, builder: PromptBuilder) -> Self {
        Self {
            client,
            cache: None,
            builder,
            ocr: None,
            ocr_options: OcrOptions::default(),
            upscaler: None,
            labels: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_cache(mut self, cache: Arc<dyn ResultCache>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_ocr(mut self, engine: Arc<dyn OcrEngine>, options: OcrOptions) -> Self {
        self.ocr = Some(engine);
        self.ocr_options = options;
        self
    }

    pub fn with_upscaler(mut self, upscaler: Arc<dyn Upscaler>) -> Self {
        self.upscaler = Some(upscaler);
        self
    }

    fn label_for(&self, png: &[u8], diags: &mut Vec<Diagnostic>) -> Option<String> {
        let key = hex::encode(Sha256::digest(png));
        if let Some(hit) = self.labels.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return hit.clone();
        }
        let label = match classify_icon(png, &self.client, &self.builder.templates.classifier) {
            Ok((label, d)) => {
                push(diags, d);
                Some(label)
            }
            Err(e) => {
                diags.push(Diagnostic::new("classify", format!("no icon-only label: {e}")));
                None
            }
        };
        self.labels.lock().unwrap_or_else(|e| e.into_inner()).insert(key, label.clone());
        label
    }

    /// Fill in-icon text and, for TextT, the zero-shot label.
    pub fn enrich(&self, ctx: &mut IconContext, images: &IconImages, mode: GenerationMode) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let ocr_source = if self.ocr_options.on_standardized { &images.icon } else { &images.raw };
        if let (Some(engine), Some(img)) = (&self.ocr, ocr_source) {
            let (texts, d) = ocr_in_icon_text(img, engine.as_ref(), self.ocr_options.min_confidence);
            push(&mut diags, d);
            if ctx.in_icon_text.is_empty() {
                ctx.in_icon_text = texts;
            }
        }
        if mode.variant == ModelVariant::TextT && ctx.icon_label.is_none() {
            if let Some(icon) = &images.icon {
                match encode_png(icon) {
                    Ok(png) => ctx.icon_label = self.label_for(&png, &mut diags),
                    Err(e) => diags.push(Diagnostic::new("classify", e.to_string())),
                }
            }
        }
        diags
    }

    fn image_part(images: &IconImages, mode: GenerationMode) -> Result<Option<ImagePart>, GenaiError> {
        if !mode.is_multimodal() {
            return Ok(None);
        }
        let img = match mode.image_scope {
            ImageScope::Icon => images.icon.as_ref(),
            ImageScope::Container => images.container.as_ref(),
        }
        .ok_or(GenaiError::MissingImage)?;
        let png = encode_png(img).map_err(|e| GenaiError::Protocol(e.to_string()))?;
        Ok(Some(ImagePart::png(png)))
    }

    pub fn generate(
        &self,
        icon_ref: &str,
        context: &IconContext,
        images: &IconImages,
        mode: GenerationMode,
        ablation: AblationConfig,
    ) -> Result<Generated, GenaiError> {
        let mut ctx = context.clone();
        let diagnostics = self.enrich(&mut ctx, images, mode);
        let request = GenerationRequest {
            icon_ref: icon_ref.to_owned(),
            context: ctx.clone(),
            image: Self::image_part(images, mode)?,
            mode,
            ablation,
        };
        let result = generate_alt_text(&request, &self.builder, &self.client, self.cache.as_deref())?;
        Ok(Generated {
            result,
            context: ctx,
            diagnostics,
        })
    }

    /// Images for a dataset icon; a missing or unreadable screenshot yields
    /// none plus a diagnostic.
    pub fn dataset_images(&self, icon: &AnnotatedIcon) -> (IconImages, Vec<Diagnostic>) {
        let Some(shot) = &icon.screenshot else {
            return (IconImages::default(), Vec::new());
        };
        let loaded = load_image(shot)
            .and_then(|img| images_from_screenshot(&img, icon.bounds, icon.parent_bounds, self.upscaler.as_deref()));
        match loaded {
            Ok(x) => x,
            Err(e) => (
                IconImages::default(),
                vec![Diagnostic::new("vision", format!("{}: {e}", shot.display()))],
            ),
        }
    }

    pub fn predict(&self, icon: &AnnotatedIcon, mode: GenerationMode, ablation: AblationConfig) -> Result<Generated, GenaiError> {
        let (images, mut diags) = self.dataset_images(icon);
        let mut out = self.generate(&icon.icon_ref(), &icon.context, &images, mode, ablation)?;
        diags.append(&mut out.diagnostics);
        out.diagnostics = diags;
        Ok(out)
    }

    /// Run `f` over `items` on up to `workers` threads, keeping input order.
    pub fn par_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
        if items.is_empty() {
            return Vec::new();
        }
        let workers = workers.clamp(1, items.len());
        let chunk = items.len().div_ceil(workers);
        std::thread::scope(|s| {
            let handles: Vec<_> = items.chunks(chunk).map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<_>>())).collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        })
    }
}
