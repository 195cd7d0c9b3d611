//! Batch and on-save alt-text injection into layout files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;
use crate::diag::Diagnostic;
use crate::extract::{detect_icons, extract_context, IconCandidate};
use crate::layout::{is_layout_path, parse_layout, plan_injection, resolve_drawable, InjectOptions, ParsedLayout};
use crate::pipeline::{images_from_file, IconImages, Pipeline};
use crate::ui_model::{AblationConfig, AltTextResult, GenerationMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnotateOptions {
    pub mode: GenerationMode,
    pub ablation: AblationConfig,
    pub force: bool,
    pub dry_run: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum IconStatus {
    Annotated,
    WouldAnnotate,
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct IconOutcome {
    pub file: PathBuf,
    pub path: Vec<usize>,
    pub resource_id: Option<String>,
    pub status: IconStatus,
    pub alt_text: Option<String>,
    #[serde(skip)]
    pub result: Option<AltTextResult>,
    #[serde(skip)]
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AnnotateSummary {
    pub outcomes: Vec<IconOutcome>,
    pub files_modified: Vec<PathBuf>,
}

impl AnnotateSummary {
    pub fn count(&self, pred: impl Fn(&IconStatus) -> bool) -> usize {
        self.outcomes.iter().filter(|o| pred(&o.status)).count()
    }

    pub fn annotated(&self) -> usize {
        self.count(|s| matches!(s, IconStatus::Annotated | IconStatus::WouldAnnotate))
    }

    pub fn failed(&self) -> usize {
        self.count(|s| matches!(s, IconStatus::Failed(_)))
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed() > 0 {
            super::EXIT_PARTIAL
        } else {
            super::EXIT_OK
        }
    }

    pub fn results(&self) -> Vec<AltTextResult> {
        self.outcomes.iter().filter_map(|o| o.result.clone()).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let (status, detail) = match &o.status {
                IconStatus::Annotated => ("annotated", o.alt_text.clone().unwrap_or_default()),
                IconStatus::WouldAnnotate => ("would annotate", o.alt_text.clone().unwrap_or_default()),
                IconStatus::Skipped(why) => ("skipped", why.clone()),
                IconStatus::Failed(why) => ("FAILED", why.clone()),
            };
            let _ = writeln!(
                out,
                "{}#{}  {:<24} {:<15} {}",
                o.file.display(),
                path_str(&o.path),
                o.resource_id.as_deref().unwrap_or("-"),
                status,
                detail
            );
        }
        let _ = writeln!(
            out,
            "{} annotated, {} skipped, {} failed",
            self.annotated(),
            self.count(|s| matches!(s, IconStatus::Skipped(_))),
            self.failed()
        );
        out
    }
}

fn path_str(path: &[usize]) -> String {
    path.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
}

/// Directory whose `res/` holds the layout: the parent of the nearest `res`
/// ancestor, else the file's own directory.
pub fn project_root_for(file: &Path) -> PathBuf {
    file.ancestors()
        .find(|a| a.file_name().is_some_and(|n| n == "res"))
        .and_then(Path::parent)
        .or_else(|| file.parent())
        .unwrap_or(Path::new("."))
        .to_path_buf()
}

/// Layout files under `target`, or `target` itself.
pub fn layout_files(target: &Path) -> Result<Vec<PathBuf>, CliError> {
    if target.is_file() {
        if !is_layout_path(target) {
            return Err(CliError::Usage(format!("{} is not inside a res/layout* directory", target.display())));
        }
        return Ok(vec![target.to_path_buf()]);
    }
    if !target.is_dir() {
        return Err(CliError::Usage(format!("{} does not exist", target.display())));
    }
    let mut files: Vec<PathBuf> = walkdir::WalkDir::new(target)
        .into_iter()
        .filter_map(Result::ok)
        .map(walkdir::DirEntry::into_path)
        .filter(|p| is_layout_path(p))
        .collect();
    files.sort();
    Ok(files)
}

fn outcome(file: &Path, cand: &IconCandidate, status: IconStatus) -> IconOutcome {
    IconOutcome {
        file: file.to_path_buf(),
        path: cand.path.clone(),
        resource_id: cand.node.resource_id.clone(),
        status,
        alt_text: None,
        result: None,
        diagnostics: Vec::new(),
    }
}

fn icon_images(layout: &ParsedLayout, cand: &IconCandidate, root: &Path, pipeline: &Pipeline) -> (IconImages, Vec<Diagnostic>) {
    let Some(element) = layout.element(&cand.path) else {
        return (IconImages::default(), Vec::new());
    };
    match resolve_drawable(&element.attrs, root) {
        Some(file) => images_from_file(&file, pipeline.upscaler.as_deref()).unwrap_or_else(|e| {
            (IconImages::default(), vec![Diagnostic::new("vision", format!("{}: {e}", file.display()))])
        }),
        None => (IconImages::default(), Vec::new()),
    }
}

/// Generate alt text for one icon of a parsed layout. Nothing is written.
pub fn generate_for(
    file: &Path,
    layout: &ParsedLayout,
    cand: &IconCandidate,
    root: &Path,
    pipeline: &Pipeline,
    options: &AnnotateOptions,
) -> IconOutcome {
    let (images, mut diags) = icon_images(layout, cand, root, pipeline);
    if options.mode.is_multimodal() && images.icon.is_none() {
        return IconOutcome {
            diagnostics: diags,
            ..outcome(file, cand, IconStatus::Skipped("icon image file not found".into()))
        };
    }
    let ctx = extract_context(&layout.screen, cand);
    let icon_ref = format!("{}#{}", file.display(), path_str(&cand.path));
    match pipeline.generate(&icon_ref, &ctx, &images, options.mode, options.ablation) {
        Ok(g) => {
            diags.extend(g.diagnostics);
            IconOutcome {
                alt_text: Some(g.result.alt_text.clone()),
                result: Some(g.result),
                diagnostics: diags,
                ..outcome(file, cand, IconStatus::WouldAnnotate)
            }
        }
        Err(e) => IconOutcome {
            diagnostics: diags,
            ..outcome(file, cand, IconStatus::Failed(e.to_string()))
        },
    }
}

/// Find the element the icon now lives at: by resource id when it has one,
/// else at the same path with the same class.
fn relocate(current: &ParsedLayout, cand: &IconCandidate) -> Result<Vec<usize>, String> {
    let found = match &cand.node.resource_id {
        Some(id) => current
            .screen
            .root
            .walk()
            .into_iter()
            .filter(|(_, n)| n.resource_id.as_deref() == Some(id.as_str()))
            .map(|(p, n)| (p, n.class_name.clone()))
            .collect::<Vec<_>>(),
        None => current
            .screen
            .root
            .child_at(&cand.path)
            .ok()
            .map(|n| vec![(cand.path.clone(), n.class_name.clone())])
            .unwrap_or_default(),
    };
    match found.as_slice() {
        [(path, class)] if *class == cand.node.class_name => Ok(path.clone()),
        [] => Err("element moved or was removed before writing".into()),
        [_] => Err("element changed class before writing".into()),
        _ => Err("resource id is no longer unique".into()),
    }
}

/// Re-read `file` and write each generated alt text into it. Outcomes are
/// updated in place; the file is written once.
pub fn write_outcomes(file: &Path, outcomes: &mut [(IconCandidate, IconOutcome)], options: &AnnotateOptions) -> Result<bool, CliError> {
    if !is_layout_path(file) {
        return Err(CliError::Usage(format!("refusing to write outside res/layout*: {}", file.display())));
    }
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", file.display()));
    let mut buf = std::fs::read(file).map_err(io)?;
    let original = buf.clone();
    for (cand, out) in outcomes.iter_mut() {
        if out.status != IconStatus::WouldAnnotate {
            continue;
        }
        let alt = out.alt_text.clone().unwrap_or_default();
        let step = parse_layout(&buf, "layout", None)
            .map_err(|e| e.to_string())
            .and_then(|current| relocate(&current, cand))
            .and_then(|path| plan_injection(&buf, &path, &alt, InjectOptions { force: options.force }).map_err(|e| e.to_string()));
        match step {
            Ok(inj) => {
                buf = inj.apply(&buf);
                if !options.dry_run {
                    out.status = IconStatus::Annotated;
                }
            }
            Err(e) => out.status = IconStatus::Failed(e),
        }
    }
    if options.dry_run || buf == original {
        return Ok(false);
    }
    let tmp = file.with_extension("xml.altgen-tmp");
    std::fs::write(&tmp, &buf).map_err(io)?;
    std::fs::rename(&tmp, file).map_err(io)?;
    Ok(true)
}

/// Icons of one file that still need alt text.
pub fn pending_icons(layout: &ParsedLayout, force: bool) -> Vec<IconCandidate> {
    detect_icons(&layout.screen)
        .into_iter()
        .filter(|c| force || c.node.content_description.as_deref().is_none_or(|d| d.trim().is_empty()))
        .collect()
}

pub fn annotate_file(file: &Path, pipeline: &Pipeline, options: &AnnotateOptions, workers: usize) -> Result<(Vec<IconOutcome>, bool), CliError> {
    let bytes = std::fs::read(file).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
    let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("layout");
    let layout = parse_layout(&bytes, stem, None).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let icons = pending_icons(&layout, options.force);
    let root = project_root_for(file);
    let generated = Pipeline::par_map(&icons, workers, |c| generate_for(file, &layout, c, &root, pipeline, options));
    let mut pairs: Vec<(IconCandidate, IconOutcome)> = icons.into_iter().zip(generated).collect();
    let modified = write_outcomes(file, &mut pairs, options)?;
    Ok((pairs.into_iter().map(|(_, o)| o).collect(), modified))
}

/// Annotate every icon lacking a content description under `target`.
pub fn annotate(target: &Path, pipeline: &Pipeline, options: &AnnotateOptions, workers: usize) -> Result<AnnotateSummary, CliError> {
    let files = layout_files(target)?;
    let mut summary = AnnotateSummary::default();
    for file in files {
        match annotate_file(&file, pipeline, options, workers) {
            Ok((outcomes, modified)) => {
                summary.outcomes.extend(outcomes);
                if modified {
                    summary.files_modified.push(file);
                }
            }
            Err(e) => summary.outcomes.push(IconOutcome {
                file: file.clone(),
                path: Vec::new(),
                resource_id: None,
                status: IconStatus::Failed(e.to_string()),
                alt_text: None,
                result: None,
                diagnostics: Vec::new(),
            }),
        }
    }
    Ok(summary)
}
