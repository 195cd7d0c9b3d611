use super::{parse_layout, LayoutError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InjectOptions {
    /// Replace an existing contentDescription instead of refusing.
    pub force: bool,
}

/// A single planned edit: `replace` bytes at `offset` are swapped for `text`.
/// Plain insertions have `replace == 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub offset: usize,
    pub replace: usize,
    pub text: String,
}

impl Injection {
    pub fn apply(&self, xml: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(xml.len() + self.text.len());
        out.extend_from_slice(&xml[..self.offset]);
        out.extend_from_slice(self.text.as_bytes());
        out.extend_from_slice(&xml[self.offset + self.replace..]);
        out
    }
}

pub fn escape_attr(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for ch in value.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug)]
struct ScannedAttr {
    /// Value bytes between the quotes.
    value: (usize, usize),
    /// Offset just past the closing quote.
    end: usize,
    /// Whitespace run preceding the attribute name.
    leading_ws: (usize, usize),
}

/// Lexes the attributes of one start tag (`<Name ... >` or `<Name ... />`).
/// Offsets are relative to `tag`.
fn scan_start_tag(tag: &[u8]) -> Option<(usize, Vec<ScannedAttr>)> {
    let mut i = 1;
    while i < tag.len() && !tag[i].is_ascii_whitespace() && tag[i] != b'/' && tag[i] != b'>' {
        i += 1;
    }
    let name_end = i;
    let mut attrs = Vec::new();
    loop {
        let ws_start = i;
        while i < tag.len() && tag[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= tag.len() || tag[i] == b'/' || tag[i] == b'>' {
            return Some((name_end, attrs));
        }
        let name_start = i;
        while i < tag.len() && tag[i] != b'=' && !tag[i].is_ascii_whitespace() {
            i += 1;
        }
        while i < tag.len() && tag[i].is_ascii_whitespace() {
            i += 1;
        }
        if tag.get(i) != Some(&b'=') {
            return None;
        }
        i += 1;
        while i < tag.len() && tag[i].is_ascii_whitespace() {
            i += 1;
        }
        let quote = *tag.get(i)?;
        if quote != b'"' && quote != b'\'' {
            return None;
        }
        i += 1;
        let value_start = i;
        while i < tag.len() && tag[i] != quote {
            i += 1;
        }
        if i >= tag.len() {
            return None;
        }
        let value_end = i;
        i += 1;
        attrs.push(ScannedAttr {
            value: (value_start, value_end),
            end: i,
            leading_ws: (ws_start, name_start),
        });
    }
}

/// Work out where and what to write for `alt_text` on the element at `path`.
pub fn plan_injection(
    xml: &[u8],
    path: &[usize],
    alt_text: &str,
    options: InjectOptions,
) -> Result<Injection, LayoutError> {
    let parsed = parse_layout(xml, "layout", None)?;
    let element = parsed.element(path).ok_or_else(|| LayoutError::BadPath {
        path: path.to_vec(),
        depth: deepest_valid_depth(&parsed.screen.root, path),
    })?;
    let (tag_start, tag_end) = element.start_tag;
    let tag = &xml[tag_start..tag_end];
    let malformed = || LayoutError::Parse {
        line: super::line_col(xml, tag_start).0,
        column: super::line_col(xml, tag_start).1,
        message: "could not lex start tag".into(),
    };
    let (name_end, attrs) = scan_start_tag(tag).ok_or_else(malformed)?;
    let escaped = escape_attr(alt_text);

    let existing = element
        .attrs
        .iter()
        .position(|a| a.namespace.as_deref() == Some(super::ANDROID_NS) && a.local_name == "contentDescription");
    if let Some(idx) = existing {
        if !options.force {
            return Err(LayoutError::AlreadyAnnotated { path: path.to_vec() });
        }
        let scanned = attrs.get(idx).ok_or_else(malformed)?;
        let mut value = escaped;
        if tag[scanned.value.0 - 1] == b'\'' {
            value = value.replace('\'', "&apos;");
        }
        return Ok(Injection {
            offset: tag_start + scanned.value.0,
            replace: scanned.value.1 - scanned.value.0,
            text: value,
        });
    }

    let prefix = parsed.android_prefix.clone().unwrap_or_else(|| "android".to_owned());
    let attribute = format!("{prefix}:contentDescription=\"{escaped}\"");
    let (offset, separator) = match attrs.last() {
        Some(last) => {
            let ws = &tag[last.leading_ws.0..last.leading_ws.1];
            let sep = match ws.iter().rposition(|&b| b == b'\n') {
                Some(nl) => {
                    // keep the line-ending flavour and indentation of the attribute list
                    let crlf = nl > 0 && ws[nl - 1] == b'\r';
                    let indent = String::from_utf8_lossy(&ws[nl + 1..]).into_owned();
                    format!("{}{}", if crlf { "\r\n" } else { "\n" }, indent)
                }
                None => " ".to_owned(),
            };
            (last.end, sep)
        }
        None => (name_end, " ".to_owned()),
    };
    Ok(Injection {
        offset: tag_start + offset,
        replace: 0,
        text: format!("{separator}{attribute}"),
    })
}

fn deepest_valid_depth(root: &crate::ui_model::ViewNode, path: &[usize]) -> usize {
    let mut node = root;
    for (depth, &i) in path.iter().enumerate() {
        match node.children.get(i) {
            Some(child) => node = child,
            None => return depth,
        }
    }
    path.len()
}

/// Insert `android:contentDescription` on the element at `path`, leaving every
/// other byte untouched.
pub fn inject_alt_text(xml: &[u8], path: &[usize], alt_text: &str) -> Result<Vec<u8>, LayoutError> {
    let plan = plan_injection(xml, path, alt_text, InjectOptions::default())?;
    Ok(plan.apply(xml))
}
