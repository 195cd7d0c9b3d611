//! Core domain types shared by every other module.
//!
//! Everything here is an immutable value once built. The only non-trivial
//! logic is the canonical JSON form of [`IconContext`], which is what ends up
//! inside prompts, cache keys and golden fixtures, so its byte layout is fixed.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("bad path: index {index} out of range at depth {depth} ({len} children)")]
    BadPath { depth: usize, index: usize, len: usize },
    #[error("invalid bounding box [{0}, {1}, {2}, {3}]")]
    InvalidBounds(i64, i64, i64, i64),
    #[error("invalid icon context json: {0}")]
    ContextJson(String),
}

/// Pixel rectangle in screen coordinates; `right`/`bottom` are exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub left: u32,
    pub top: u32,
    pub right: u32,
    pub bottom: u32,
}

impl BoundingBox {
    pub fn new(left: i64, top: i64, right: i64, bottom: i64) -> Result<Self, ModelError> {
        if left < 0 || top < 0 || left >= right || top >= bottom || right > u32::MAX as i64 || bottom > u32::MAX as i64 {
            return Err(ModelError::InvalidBounds(left, top, right, bottom));
        }
        Ok(Self {
            left: left as u32,
            top: top as u32,
            right: right as u32,
            bottom: bottom as u32,
        })
    }

    pub fn width(&self) -> u32 {
        self.right - self.left
    }

    pub fn height(&self) -> u32 {
        self.bottom - self.top
    }

    /// Re-express `self` relative to the top-left corner of `outer`.
    /// Returns `None` when `self` is not contained in `outer`.
    pub fn relative_to(&self, outer: &BoundingBox) -> Option<BoundingBox> {
        if self.left < outer.left || self.top < outer.top || self.right > outer.right || self.bottom > outer.bottom {
            return None;
        }
        Some(BoundingBox {
            left: self.left - outer.left,
            top: self.top - outer.top,
            right: self.right - outer.left,
            bottom: self.bottom - outer.top,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewNode {
    pub class_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clickable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundingBox>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ViewNode>,
}

impl ViewNode {
    pub fn new(class_name: impl Into<String>) -> Self {
        Self {
            class_name: class_name.into(),
            resource_id: None,
            text: None,
            content_description: None,
            clickable: None,
            bounds: None,
            children: Vec::new(),
        }
    }

    pub fn with_resource_id(mut self, id: impl Into<String>) -> Self {
        self.resource_id = Some(id.into());
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn with_clickable(mut self, clickable: bool) -> Self {
        self.clickable = Some(clickable);
        self
    }

    pub fn with_bounds(mut self, bounds: BoundingBox) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn with_child(mut self, child: ViewNode) -> Self {
        self.children.push(child);
        self
    }

    /// Class name without its package qualifier (`android.widget.ImageView` -> `ImageView`).
    pub fn simple_class_name(&self) -> &str {
        simple_class_name(&self.class_name)
    }

    pub fn child_at(&self, path: &[usize]) -> Result<&ViewNode, ModelError> {
        let mut node = self;
        for (depth, &index) in path.iter().enumerate() {
            node = node.children.get(index).ok_or(ModelError::BadPath {
                depth,
                index,
                len: node.children.len(),
            })?;
        }
        Ok(node)
    }

    /// Pre-order walk yielding `(path, node)` pairs in document order.
    pub fn walk(&self) -> Vec<(Vec<usize>, &ViewNode)> {
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<usize>, &ViewNode)> = vec![(Vec::new(), self)];
        while let Some((path, node)) = stack.pop() {
            for (i, child) in node.children.iter().enumerate().rev() {
                let mut p = path.clone();
                p.push(i);
                stack.push((p, child));
            }
            out.push((path, node));
        }
        out
    }
}

pub fn simple_class_name(class_name: &str) -> &str {
    class_name.rsplit('.').next().unwrap_or(class_name)
}

/// Handle to a screenshot on disk; images are decoded lazily by the vision module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageHandle(pub std::path::PathBuf);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub screen_id: String,
    pub activity_name: String,
    pub root: ViewNode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screenshot: Option<ImageHandle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen_dims: Option<(u32, u32)>,
}

impl Screen {
    pub fn new(screen_id: impl Into<String>, activity_name: impl Into<String>, root: ViewNode) -> Self {
        Self {
            screen_id: screen_id.into(),
            activity_name: activity_name.into(),
            root,
            screenshot: None,
            screen_dims: None,
        }
    }

    pub fn with_screenshot(mut self, handle: ImageHandle, dims: (u32, u32)) -> Self {
        self.screenshot = Some(handle);
        self.screen_dims = Some(dims);
        self
    }
}

/// Address a node by child indices from the root. `[]` is the root itself.
pub fn node_at_path<'a>(screen: &'a Screen, path: &[usize]) -> Result<&'a ViewNode, ModelError> {
    screen.root.child_at(path)
}

/// The textual properties of one DOM node that may enter a prompt.
///
/// Blank values are dropped at construction and there is deliberately no
/// slot for a content description.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeProps {
    class_name: Option<String>,
    resource_id: Option<String>,
    text: Option<String>,
}

fn non_blank(value: Option<&str>) -> Option<String> {
    value.filter(|v| !v.trim().is_empty()).map(str::to_owned)
}

impl NodeProps {
    pub fn new(class_name: Option<&str>, resource_id: Option<&str>, text: Option<&str>) -> Self {
        Self {
            class_name: non_blank(class_name),
            resource_id: non_blank(resource_id),
            text: non_blank(text),
        }
    }

    pub fn from_node(node: &ViewNode) -> Self {
        Self::new(
            Some(node.simple_class_name()),
            node.resource_id.as_deref(),
            node.text.as_deref(),
        )
    }

    pub fn class_name(&self) -> Option<&str> {
        self.class_name.as_deref()
    }

    pub fn resource_id(&self) -> Option<&str> {
        self.resource_id.as_deref()
    }

    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    pub fn without_resource_id(&self) -> Self {
        Self {
            resource_id: None,
            ..self.clone()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.class_name.is_none() && self.resource_id.is_none() && self.text.is_none()
    }

    pub fn len(&self) -> usize {
        [&self.class_name, &self.resource_id, &self.text]
            .iter()
            .filter(|v| v.is_some())
            .count()
    }

    /// Key/value pairs in the order and naming used for the icon itself
    /// (`class_name` first).
    fn element_entries(&self) -> Vec<(&'static str, &str)> {
        let mut out = Vec::new();
        if let Some(v) = &self.class_name {
            out.push(("class_name", v.as_str()));
        }
        if let Some(v) = &self.resource_id {
            out.push(("resource_id", v.as_str()));
        }
        if let Some(v) = &self.text {
            out.push(("text", v.as_str()));
        }
        out
    }

    /// Key/value pairs as used for the container and siblings
    /// (`resource_id` first, class under the key `class`).
    fn related_entries(&self) -> Vec<(&'static str, &str)> {
        let mut out = Vec::new();
        if let Some(v) = &self.resource_id {
            out.push(("resource_id", v.as_str()));
        }
        if let Some(v) = &self.class_name {
            out.push(("class", v.as_str()));
        }
        if let Some(v) = &self.text {
            out.push(("text", v.as_str()));
        }
        out
    }

    fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a String, &'a Value)>) -> Result<Self, ModelError> {
        let mut props = NodeProps::default();
        for (key, value) in entries {
            let value = value
                .as_str()
                .ok_or_else(|| ModelError::ContextJson(format!("property {key} is not a string")))?;
            let slot = match key.as_str() {
                "class" | "class_name" => &mut props.class_name,
                "resource_id" => &mut props.resource_id,
                "text" => &mut props.text,
                other => return Err(ModelError::ContextJson(format!("unknown node property {other}"))),
            };
            *slot = non_blank(Some(value));
        }
        Ok(props)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelVariant {
    #[serde(rename = "textt")]
    TextT,
    #[serde(rename = "mmt")]
    Mmt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageScope {
    Icon,
    Container,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenerationMode {
    pub variant: ModelVariant,
    pub image_scope: ImageScope,
}

impl GenerationMode {
    pub const TEXT_T: GenerationMode = GenerationMode {
        variant: ModelVariant::TextT,
        image_scope: ImageScope::Icon,
    };
    pub const MMT_ICON: GenerationMode = GenerationMode {
        variant: ModelVariant::Mmt,
        image_scope: ImageScope::Icon,
    };
    pub const MMT_CONTAINER: GenerationMode = GenerationMode {
        variant: ModelVariant::Mmt,
        image_scope: ImageScope::Container,
    };

    pub fn is_multimodal(&self) -> bool {
        self.variant == ModelVariant::Mmt
    }
}

impl fmt::Display for GenerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.variant, self.image_scope) {
            (ModelVariant::TextT, _) => f.write_str("TextT"),
            (ModelVariant::Mmt, ImageScope::Icon) => f.write_str("MMT_i"),
            (ModelVariant::Mmt, ImageScope::Container) => f.write_str("MMT_c"),
        }
    }
}

/// Which context components are withheld from the prompt.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct AblationConfig {
    pub omit_ocr_text: bool,
    pub omit_resource_id: bool,
    pub omit_parent_sibling: bool,
}

impl AblationConfig {
    pub const FULL: AblationConfig = AblationConfig {
        omit_ocr_text: false,
        omit_resource_id: false,
        omit_parent_sibling: false,
    };

    /// The four input rows of the ablation table, full input first.
    pub fn table_rows() -> [AblationConfig; 4] {
        [
            Self::FULL,
            AblationConfig { omit_ocr_text: true, ..Self::FULL },
            AblationConfig { omit_resource_id: true, ..Self::FULL },
            AblationConfig { omit_parent_sibling: true, ..Self::FULL },
        ]
    }

    pub fn is_full(&self) -> bool {
        *self == Self::FULL
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.omit_ocr_text {
            parts.push("in-icon text (OCR)");
        }
        if self.omit_resource_id {
            parts.push("icon's resource-id");
        }
        if self.omit_parent_sibling {
            parts.push("parent & sibling DOM info");
        }
        if parts.is_empty() {
            "all".to_owned()
        } else {
            format!("w/o {}", parts.join(", "))
        }
    }
}

/// Textual context of one icon: activity, the icon's own properties, its
/// container and the container's other children.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IconContext {
    pub app_activity_name: String,
    pub ui_element_info: NodeProps,
    pub parent_node: Option<NodeProps>,
    pub sibling_nodes: Vec<NodeProps>,
    pub in_icon_text: Vec<String>,
    pub icon_label: Option<String>,
}

impl IconContext {
    /// Canonical JSON including OCR text and icon label when present.
    pub fn to_canonical_json(&self) -> String {
        render_value(&self.to_value(true))
    }

    /// Canonical JSON without the `icon_label` key; this is the form embedded in prompts.
    pub fn to_prompt_json(&self) -> String {
        render_value(&self.to_value(false))
    }

    fn to_value(&self, with_label: bool) -> Value {
        let mut top = Map::new();
        top.insert("app_activity_name".into(), Value::String(self.app_activity_name.clone()));
        top.insert("UI_element_info".into(), entries_object(&self.ui_element_info.element_entries()));
        let parent: Vec<Value> = self
            .parent_node
            .iter()
            .flat_map(|p| p.related_entries())
            .map(|(k, v)| entries_object(&[(k, v)]))
            .collect();
        top.insert("parent_node".into(), Value::Array(parent));
        let siblings: Vec<Value> = self
            .sibling_nodes
            .iter()
            .map(|s| entries_object(&s.related_entries()))
            .collect();
        top.insert("sibling_nodes".into(), Value::Array(siblings));
        if !self.in_icon_text.is_empty() {
            top.insert(
                "in_icon_text".into(),
                Value::Array(self.in_icon_text.iter().cloned().map(Value::String).collect()),
            );
        }
        if with_label {
            if let Some(label) = &self.icon_label {
                top.insert("icon_label".into(), Value::String(label.clone()));
            }
        }
        Value::Object(top)
    }

    pub fn from_canonical_json(s: &str) -> Result<Self, ModelError> {
        let value: Value = serde_json::from_str(s).map_err(|e| ModelError::ContextJson(e.to_string()))?;
        Self::from_value(&value)
    }

    fn from_value(value: &Value) -> Result<Self, ModelError> {
        let bad = |m: &str| ModelError::ContextJson(m.to_owned());
        let top = value.as_object().ok_or_else(|| bad("top level is not an object"))?;
        for key in top.keys() {
            if !matches!(
                key.as_str(),
                "app_activity_name" | "UI_element_info" | "parent_node" | "sibling_nodes" | "in_icon_text" | "icon_label"
            ) {
                return Err(bad(&format!("unknown key {key}")));
            }
        }
        let app_activity_name = top
            .get("app_activity_name")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing app_activity_name"))?
            .to_owned();
        let ui_element_info = match top.get("UI_element_info") {
            Some(Value::Object(m)) => NodeProps::from_entries(m)?,
            _ => return Err(bad("missing UI_element_info")),
        };
        let parent_entries = top
            .get("parent_node")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing parent_node"))?;
        let mut merged = Map::new();
        for entry in parent_entries {
            let obj = entry.as_object().ok_or_else(|| bad("parent_node entry is not an object"))?;
            for (k, v) in obj {
                merged.insert(k.clone(), v.clone());
            }
        }
        let parent_node = if parent_entries.is_empty() {
            None
        } else {
            Some(NodeProps::from_entries(&merged)?)
        };
        let sibling_nodes = top
            .get("sibling_nodes")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing sibling_nodes"))?
            .iter()
            .map(|s| match s {
                Value::Object(m) => NodeProps::from_entries(m),
                _ => Err(bad("sibling entry is not an object")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let in_icon_text = match top.get("in_icon_text") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| bad("in_icon_text entry is not a string")))
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(bad("in_icon_text is not an array")),
        };
        let icon_label = match top.get("icon_label") {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(bad("icon_label is not a string")),
        };
        Ok(Self {
            app_activity_name,
            ui_element_info,
            parent_node,
            sibling_nodes,
            in_icon_text,
            icon_label,
        })
    }
}

impl Serialize for IconContext {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_value(true).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IconContext {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        IconContext::from_value(&value).map_err(serde::de::Error::custom)
    }
}

fn entries_object(entries: &[(&str, &str)]) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert((*k).to_owned(), Value::String((*v).to_owned()));
    }
    Value::Object(m)
}

/// Two-space pretty printer. Objects holding a single scalar are written
/// inline as `{ "key": "value" }`; everything else is expanded one entry per line.
pub fn render_value(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out
}

fn write_scalar(out: &mut String, value: &Value) {
    // serde_json never fails on a scalar Value
    out.push_str(&serde_json::to_string(value).unwrap_or_default());
}

fn is_scalar(value: &Value) -> bool {
    !matches!(value, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) if map.len() == 1 && map.values().all(is_scalar) => {
            let (k, v) = map.iter().next().expect("one entry");
            out.push_str("{ ");
            write_scalar(out, &Value::String(k.clone()));
            out.push_str(": ");
            write_scalar(out, v);
            out.push_str(" }");
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_scalar(out, &Value::String(k.clone()));
                out.push_str(": ");
                write_value(out, v, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{}}}", pad(indent));
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, v, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{}]", pad(indent));
        }
        scalar => write_scalar(out, scalar),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltTextResult {
    pub icon_ref: String,
    pub alt_text: String,
    pub mode: GenerationMode,
    pub prompt_fingerprint: String,
    pub token_usage: TokenUsage,
    pub cost_usd: rust_decimal::Decimal,
    pub cached: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three_level() -> Screen {
        let root = ViewNode::new("FrameLayout")
            .with_child(ViewNode::new("LinearLayout").with_child(ViewNode::new("ImageButton").with_resource_id("b")))
            .with_child(ViewNode::new("TextView"));
        Screen::new("s1", "MainActivity", root)
    }

    #[test]
    fn empty_path_is_root() {
        let s = three_level();
        assert_eq!(node_at_path(&s, &[]).unwrap().class_name, "FrameLayout");
    }

    #[test]
    fn nested_path() {
        let s = three_level();
        let n = node_at_path(&s, &[0, 0]).unwrap();
        assert_eq!(n.class_name, "ImageButton");
    }

    #[test]
    fn bad_path_names_depth() {
        let s = three_level();
        assert_eq!(
            node_at_path(&s, &[5]).unwrap_err(),
            ModelError::BadPath { depth: 0, index: 5, len: 2 }
        );
        assert!(matches!(node_at_path(&s, &[0, 3]), Err(ModelError::BadPath { depth: 1, .. })));
    }

    #[test]
    fn bounds_validation() {
        assert!(BoundingBox::new(0, 0, 10, 10).is_ok());
        assert!(BoundingBox::new(10, 0, 10, 10).is_err());
        assert!(BoundingBox::new(-1, 0, 10, 10).is_err());
    }

    #[test]
    fn walk_is_document_order() {
        let s = three_level();
        let classes: Vec<_> = s.root.walk().into_iter().map(|(_, n)| n.class_name.clone()).collect();
        assert_eq!(classes, ["FrameLayout", "LinearLayout", "ImageButton", "TextView"]);
    }

    #[test]
    fn blank_props_are_dropped() {
        let p = NodeProps::new(Some("ImageView"), Some("   "), Some(""));
        assert_eq!(p.len(), 1);
        assert_eq!(p.resource_id(), None);
    }

    fn arb_opt_string() -> impl Strategy<Value = Option<String>> {
        prop_oneof![
            Just(None),
            Just(Some(String::new())),
            Just(Some("  \t".to_owned())),
            "[a-zA-Z_ ]{0,12}".prop_map(Some),
        ]
    }

    fn arb_node() -> impl Strategy<Value = ViewNode> {
        let leaf = ("[A-Za-z.]{1,16}", arb_opt_string(), arb_opt_string(), arb_opt_string()).prop_map(
            |(class, id, text, cd)| ViewNode {
                class_name: class,
                resource_id: id,
                text,
                content_description: cd,
                clickable: None,
                bounds: None,
                children: vec![],
            },
        );
        leaf.prop_recursive(3, 20, 4, |inner| {
            (inner.clone(), prop::collection::vec(inner, 0..4)).prop_map(|(mut n, kids)| {
                n.children = kids;
                n
            })
        })
    }

    fn arb_props() -> impl Strategy<Value = NodeProps> {
        (arb_opt_string(), arb_opt_string(), arb_opt_string())
            .prop_map(|(c, r, t)| NodeProps::new(c.as_deref(), r.as_deref(), t.as_deref()))
    }

    proptest! {
        #[test]
        fn node_props_never_blank(node in arb_node()) {
            for (_, n) in node.walk() {
                let p = NodeProps::from_node(n);
                for v in [p.class_name(), p.resource_id(), p.text()].into_iter().flatten() {
                    prop_assert!(!v.trim().is_empty());
                }
                let json = IconContext { ui_element_info: p, ..Default::default() }.to_canonical_json();
                prop_assert!(!json.contains("content_description"));
                prop_assert!(!json.contains("contentDescription"));
            }
        }

        #[test]
        fn canonical_json_round_trips(
            activity in "[a-zA-Z.\"\\\\]{0,20}",
            icon in arb_props(),
            parent in prop::option::of(arb_props()),
            siblings in prop::collection::vec(arb_props(), 0..4),
            ocr in prop::collection::vec("[A-Za-z]{1,6}", 0..3),
            label in prop::option::of("[a-z ]{1,10}"),
        ) {
            let parent = parent.filter(|p| !p.is_empty());
            let ctx = IconContext {
                app_activity_name: activity,
                ui_element_info: icon,
                parent_node: parent,
                sibling_nodes: siblings,
                in_icon_text: ocr,
                icon_label: label,
            };
            let json = ctx.to_canonical_json();
            let back = IconContext::from_canonical_json(&json).unwrap();
            prop_assert_eq!(back, ctx);
        }
    }
}
