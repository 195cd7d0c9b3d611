use std::collections::HashMap;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{line_col, LayoutError, ANDROID_NS, APP_NS, TOOLS_NS};
use crate::ui_model::{Screen, ViewNode};

/// Byte range of one element in the source document, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub byte_start: usize,
    pub byte_end: usize,
    pub element_path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAttr {
    /// Qualified name as written, e.g. `android:src`.
    pub name: String,
    /// Namespace URI the prefix resolved to, if any.
    pub namespace: Option<String>,
    pub local_name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutElement {
    pub span: SourceSpan,
    /// Byte range of the start tag (or the whole empty-element tag).
    pub start_tag: (usize, usize),
    pub attrs: Vec<RawAttr>,
}

impl LayoutElement {
    pub fn path(&self) -> &[usize] {
        &self.span.element_path
    }

    pub fn attr(&self, namespace: &str, local_name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|a| a.namespace.as_deref() == Some(namespace) && a.local_name == local_name)
            .map(|a| a.value.as_str())
    }

    pub fn android_attr(&self, local_name: &str) -> Option<&str> {
        self.attr(ANDROID_NS, local_name)
    }
}

#[derive(Debug, Clone)]
pub struct ParsedLayout {
    pub screen: Screen,
    /// Elements in document order.
    pub elements: Vec<LayoutElement>,
    /// Prefix bound to the android namespace on the root element, if declared.
    pub android_prefix: Option<String>,
}

impl ParsedLayout {
    pub fn element(&self, path: &[usize]) -> Option<&LayoutElement> {
        self.elements.iter().find(|e| e.path() == path)
    }
}

struct OpenElement {
    node: ViewNode,
    element_index: usize,
    scope: HashMap<String, String>,
}

fn strip_id_prefix(raw: &str) -> &str {
    raw.strip_prefix("@+id/")
        .or_else(|| raw.strip_prefix("@id/"))
        .or_else(|| raw.strip_prefix("@android:id/"))
        .unwrap_or(raw)
}

fn parse_error(bytes: &[u8], offset: usize, message: impl Into<String>) -> LayoutError {
    let (line, column) = line_col(bytes, offset);
    LayoutError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn resolve_prefix(prefix: &str, scopes: &[HashMap<String, String>]) -> Option<String> {
    for scope in scopes.iter().rev() {
        if let Some(ns) = scope.get(prefix) {
            return Some(ns.clone());
        }
    }
    // undeclared conventional prefixes are common in fragments pasted by hand
    match prefix {
        "android" => Some(ANDROID_NS.to_owned()),
        "app" => Some(APP_NS.to_owned()),
        _ => None,
    }
}

/// Parse a layout document. `layout_name` is the file stem and doubles as the
/// screen id and the activity name when no hint is given.
pub fn parse_layout(xml: &[u8], layout_name: &str, activity_hint: Option<&str>) -> Result<ParsedLayout, LayoutError> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().trim_text(false);

    let mut stack: Vec<OpenElement> = Vec::new();
    let mut elements: Vec<LayoutElement> = Vec::new();
    let mut root: Option<ViewNode> = None;
    let mut android_prefix = None;

    loop {
        let start = reader.buffer_position() as usize;
        let event = reader
            .read_event()
            .map_err(|e| parse_error(xml, reader.error_position() as usize, e.to_string()))?;
        let end = reader.buffer_position() as usize;
        let is_empty = matches!(event, Event::Empty(_));
        match event {
            Event::Start(tag) | Event::Empty(tag) => {
                if root.is_some() && stack.is_empty() {
                    return Err(parse_error(xml, start, "more than one root element"));
                }
                let path: Vec<usize> = match stack.last() {
                    Some(parent) => {
                        let mut p = elements[parent.element_index].span.element_path.clone();
                        p.push(parent.node.children.len());
                        p
                    }
                    None => Vec::new(),
                };
                let scopes: Vec<HashMap<String, String>> = stack.iter().map(|o| o.scope.clone()).collect();
                let (node, attrs, scope) = element_from_tag(&tag, &scopes, xml, start)?;
                if stack.is_empty() {
                    android_prefix = scope.iter().find(|(_, ns)| ns.as_str() == ANDROID_NS).map(|(p, _)| p.clone());
                }
                elements.push(LayoutElement {
                    span: SourceSpan {
                        byte_start: start,
                        byte_end: end,
                        element_path: path,
                    },
                    start_tag: (start, end),
                    attrs,
                });
                let open = OpenElement {
                    node,
                    element_index: elements.len() - 1,
                    scope,
                };
                if is_empty {
                    close(open, &mut stack, &mut root);
                } else {
                    stack.push(open);
                }
            }
            Event::End(_) => {
                let open = stack
                    .pop()
                    .ok_or_else(|| parse_error(xml, start, "unexpected closing tag"))?;
                elements[open.element_index].span.byte_end = end;
                close(open, &mut stack, &mut root);
            }
            Event::Text(t) => {
                if stack.is_empty() && !t.iter().all(u8::is_ascii_whitespace) {
                    return Err(parse_error(xml, start, "text outside the root element"));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if let Some(open) = stack.last() {
        let at = elements[open.element_index].span.byte_start;
        return Err(parse_error(xml, at, format!("unclosed element <{}>", open.node.class_name)));
    }
    let root = root.ok_or_else(|| parse_error(xml, xml.len(), "document has no root element"))?;
    let context_attr = elements.first().and_then(|e| {
        e.attrs
            .iter()
            .find(|a| a.local_name == "context" && (a.namespace.as_deref() == Some(TOOLS_NS) || a.name.starts_with("tools:")))
            .map(|a| a.value.trim_start_matches('.').to_owned())
            .filter(|v| !v.is_empty())
    });
    let activity = activity_hint.map(str::to_owned).or(context_attr).unwrap_or_else(|| layout_name.to_owned());
    Ok(ParsedLayout {
        screen: Screen::new(layout_name, activity, root),
        elements,
        android_prefix,
    })
}

fn close(open: OpenElement, stack: &mut [OpenElement], root: &mut Option<ViewNode>) {
    match stack.last_mut() {
        Some(parent) => parent.node.children.push(open.node),
        None => *root = Some(open.node),
    }
}

/// Node, its raw attributes and the namespace scope it opens.
type TagParts = (ViewNode, Vec<RawAttr>, HashMap<String, String>);

fn element_from_tag(
    tag: &BytesStart<'_>,
    outer_scopes: &[HashMap<String, String>],
    xml: &[u8],
    offset: usize,
) -> Result<TagParts, LayoutError> {
    let class_name = String::from_utf8_lossy(tag.name().as_ref()).into_owned();
    let mut raw: Vec<(String, String)> = Vec::new();
    let mut scope = HashMap::new();
    for attr in tag.attributes() {
        let attr = attr.map_err(|e| parse_error(xml, offset, e.to_string()))?;
        let name = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = match attr.unescape_value() {
            Ok(v) => v.into_owned(),
            Err(_) => String::from_utf8_lossy(&attr.value).into_owned(),
        };
        if let Some(prefix) = name.strip_prefix("xmlns:") {
            scope.insert(prefix.to_owned(), value.clone());
        }
        raw.push((name, value));
    }
    let mut scopes = outer_scopes.to_vec();
    scopes.push(scope.clone());
    let attrs: Vec<RawAttr> = raw
        .into_iter()
        .map(|(name, value)| {
            let (namespace, local_name) = match name.split_once(':') {
                Some(("xmlns", local)) => (None, local.to_owned()),
                Some((prefix, local)) => (resolve_prefix(prefix, &scopes), local.to_owned()),
                None => (None, name.clone()),
            };
            RawAttr {
                name,
                namespace,
                local_name,
                value,
            }
        })
        .collect();

    let android = |local: &str| {
        attrs
            .iter()
            .find(|a| a.namespace.as_deref() == Some(ANDROID_NS) && a.local_name == local)
            .map(|a| a.value.clone())
    };
    let mut node = ViewNode::new(class_name);
    node.resource_id = android("id").map(|v| strip_id_prefix(&v).to_owned());
    node.text = android("text");
    node.content_description = android("contentDescription");
    node.clickable = match android("clickable").as_deref() {
        Some("true") => Some(true),
        Some(_) => Some(false),
        None if node.class_name.ends_with("ImageButton") => Some(true),
        None => None,
    };
    Ok((node, attrs, scope))
}

pub fn parse_layout_file(path: &Path, activity_hint: Option<&str>) -> Result<ParsedLayout, LayoutError> {
    let bytes = std::fs::read(path).map_err(|e| LayoutError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("layout");
    parse_layout(&bytes, stem, activity_hint)
}
