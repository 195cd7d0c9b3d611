use std::path::Path;

use serde_json::Value;

use super::DatasetError;
use crate::diag::Diagnostic;
use crate::ui_model::{BoundingBox, ImageHandle, Screen, ViewNode};

/// `"com.app/com.app.ui.MainActivity"` → `"com.app.ui.MainActivity"`.
fn activity_name(raw: &str) -> String {
    raw.rsplit_once('/').map_or(raw, |(_, a)| a).to_owned()
}

/// `"com.app:id/rewind_button"` → `"rewind_button"`.
fn resource_suffix(raw: &str) -> &str {
    raw.rsplit_once('/').map_or(raw, |(_, s)| s)
}

fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_owned()
    } else {
        format!("root/{}", path.iter().map(usize::to_string).collect::<Vec<_>>().join("/"))
    }
}

fn opt_string(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => Some(s.clone()),
        // Rico stores content-desc as `[null]` or `["..."]`.
        Value::Array(items) => items.iter().find_map(|i| i.as_str().map(str::to_owned)),
        _ => None,
    }
}

fn parse_bounds(v: &Value, path: &[usize]) -> Result<Option<BoundingBox>, DatasetError> {
    let schema = |msg: &str| DatasetError::Schema {
        path: fmt_path(path),
        message: msg.to_owned(),
    };
    let arr = v.as_array().ok_or_else(|| schema("bounds is not an array"))?;
    if arr.len() != 4 {
        return Err(schema("bounds must have 4 entries"));
    }
    let mut c = [0i64; 4];
    for (slot, item) in c.iter_mut().zip(arr) {
        *slot = item.as_i64().ok_or_else(|| schema("bounds entries must be integers"))?;
    }
    // degenerate or off-screen boxes occur in real dumps; the node stays, its geometry does not
    Ok(BoundingBox::new(c[0], c[1], c[2], c[3]).ok())
}

fn parse_node(v: &Value, path: &mut Vec<usize>) -> Result<ViewNode, DatasetError> {
    let obj = v.as_object().ok_or_else(|| DatasetError::Schema {
        path: fmt_path(path),
        message: "node is not an object".into(),
    })?;
    let class = obj.get("class").and_then(Value::as_str).ok_or_else(|| DatasetError::Schema {
        path: fmt_path(path),
        message: "missing \"class\"".into(),
    })?;
    let mut node = ViewNode::new(class);
    node.resource_id = obj
        .get("resource-id")
        .and_then(Value::as_str)
        .map(|r| resource_suffix(r).to_owned());
    node.text = opt_string(obj.get("text"));
    node.content_description = opt_string(obj.get("content-desc"));
    node.clickable = obj.get("clickable").and_then(Value::as_bool);
    if let Some(b) = obj.get("bounds") {
        node.bounds = parse_bounds(b, path)?;
    }
    if let Some(children) = obj.get("children") {
        let arr = children.as_array().ok_or_else(|| DatasetError::Schema {
            path: fmt_path(path),
            message: "children is not an array".into(),
        })?;
        for child in arr.iter().filter(|c| !c.is_null()) {
            path.push(node.children.len());
            let parsed = parse_node(child, path)?;
            path.pop();
            node.children.push(parsed);
        }
    }
    Ok(node)
}

/// Map one Rico view-hierarchy document onto a [`Screen`]. The root is read
/// from `activity.root` or a top-level `root`; null children are skipped.
pub fn load_rico_screen(doc: &Value, screen_id: &str) -> Result<Screen, DatasetError> {
    let activity = doc.get("activity_name").and_then(Value::as_str).unwrap_or_default();
    let root = doc
        .pointer("/activity/root")
        .or_else(|| doc.get("root"))
        .ok_or_else(|| DatasetError::Schema {
            path: "root".into(),
            message: "document has no root node".into(),
        })?;
    let root = parse_node(root, &mut Vec::new())?;
    let mut screen = Screen::new(screen_id, activity_name(activity), root);
    screen.screen_dims = screen.root.bounds.map(|b| (b.right, b.bottom));
    Ok(screen)
}

/// Load every `<id>.json` under `dir` (sorted by id). A sibling `<id>.png` or
/// `<id>.jpg` becomes the screenshot. Unreadable files become diagnostics.
pub fn load_rico_dir(dir: &Path) -> Result<(Vec<Screen>, Vec<Diagnostic>), DatasetError> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| DatasetError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut screens = Vec::new();
    let mut diags = Vec::new();
    for file in files {
        let id = file.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
        let parsed = std::fs::read(&file)
            .map_err(|e| DatasetError::Io(e.to_string()))
            .and_then(|b| serde_json::from_slice::<Value>(&b).map_err(|e| DatasetError::Io(e.to_string())))
            .and_then(|doc| load_rico_screen(&doc, &id));
        match parsed {
            Ok(mut screen) => {
                if let Some(shot) = ["png", "jpg", "jpeg"].iter().map(|x| file.with_extension(x)).find(|p| p.is_file()) {
                    screen.screenshot = Some(ImageHandle(shot));
                }
                screens.push(screen);
            }
            Err(e) => diags.push(Diagnostic::new("rico", format!("{}: {e}", file.display()))),
        }
    }
    Ok((screens, diags))
}
