use std::path::{Path, PathBuf};

use super::{RawAttr, ANDROID_NS, APP_NS};

/// Density qualifiers in lookup order; the empty string is the unqualified folder.
pub const DENSITY_ORDER: [&str; 6] = ["", "-mdpi", "-hdpi", "-xhdpi", "-xxhdpi", "-xxxhdpi"];

const RASTER_EXTENSIONS: [&str; 3] = ["png", "webp", "jpg"];

fn drawable_reference(attrs: &[RawAttr]) -> Option<&str> {
    let src = attrs
        .iter()
        .find(|a| a.namespace.as_deref() == Some(ANDROID_NS) && a.local_name == "src")
        .or_else(|| {
            attrs
                .iter()
                .find(|a| a.namespace.as_deref() == Some(APP_NS) && a.local_name == "srcCompat")
        })?;
    Some(src.value.as_str())
}

/// Find the raster file behind an element's `android:src` / `app:srcCompat`.
///
/// Vector drawables (`.xml`) and unknown references yield `None`.
pub fn resolve_drawable(attrs: &[RawAttr], project_root: &Path) -> Option<PathBuf> {
    let reference = drawable_reference(attrs)?;
    let (kind, name) = reference.strip_prefix('@')?.split_once('/')?;
    if kind != "drawable" && kind != "mipmap" {
        return None;
    }
    let res_dirs = candidate_res_dirs(project_root);
    for density in DENSITY_ORDER {
        for res in &res_dirs {
            for ext in RASTER_EXTENSIONS {
                let path = res.join(format!("{kind}{density}")).join(format!("{name}.{ext}"));
                if path.is_file() {
                    return Some(path);
                }
            }
        }
    }
    None
}

/// `res` directories under the project root: the root itself when it is a
/// `res` dir, `<root>/res`, and `src/*/res` for module layouts.
fn candidate_res_dirs(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if root.file_name().and_then(|n| n.to_str()) == Some("res") {
        out.push(root.to_path_buf());
    }
    out.push(root.join("res"));
    for base in [root.join("src"), root.join("app").join("src")] {
        if let Ok(entries) = std::fs::read_dir(&base) {
            let mut sets: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path().join("res")).collect();
            sets.sort();
            out.extend(sets);
        }
    }
    out.retain(|p| p.is_dir());
    out
}
