//! Random Android layout documents for injection properties.

use proptest::prelude::*;

const TAGS: [&str; 5] = ["LinearLayout", "ImageButton", "ImageView", "TextView", "androidx.appcompat.widget.AppCompatImageButton"];
const ATTRS: [&str; 5] = [
    r#"android:id="@+id/item""#,
    r#"android:layout_width="wrap_content""#,
    r#"app:srcCompat="@drawable/ic_play""#,
    r#"tools:ignore="ContentDescription""#,
    r#"android:text='a &amp; b'"#,
];
const SEPARATORS: [&str; 4] = [" ", "\n    ", "\r\n        ", "\t"];

#[derive(Debug, Clone)]
pub struct El {
    tag: usize,
    attrs: Vec<(usize, usize)>,
    close_sep: usize,
    children: Vec<El>,
}

pub fn element() -> impl Strategy<Value = El> {
    let leaf = (0..TAGS.len(), prop::collection::vec((0..ATTRS.len(), 0..SEPARATORS.len()), 0..4), 0..SEPARATORS.len())
        .prop_map(|(tag, attrs, close_sep)| El { tag, attrs, close_sep, children: vec![] });
    leaf.prop_recursive(3, 16, 3, |inner| {
        (0..TAGS.len(), prop::collection::vec((0..ATTRS.len(), 0..SEPARATORS.len()), 0..4), 0..SEPARATORS.len(), prop::collection::vec(inner, 1..4))
            .prop_map(|(tag, attrs, close_sep, children)| El { tag, attrs, close_sep, children })
    })
}

fn render(el: &El, depth: usize, root: bool, out: &mut String) {
    let pad = "  ".repeat(depth);
    out.push_str(&pad);
    out.push('<');
    out.push_str(TAGS[el.tag]);
    if root {
        out.push_str(concat!(
            "\n    xmlns:android=\"http://schemas.android.com/apk/res/android\"",
            "\n    xmlns:app=\"http://schemas.android.com/apk/res-auto\"",
            "\n    xmlns:tools=\"http://schemas.android.com/tools\""
        ));
    }
    let mut seen = Vec::new();
    for &(a, s) in &el.attrs {
        if !seen.contains(&a) {
            seen.push(a);
            out.push_str(SEPARATORS[s]);
            out.push_str(ATTRS[a]);
        }
    }
    if el.close_sep % 2 == 1 {
        out.push_str(SEPARATORS[el.close_sep]);
    }
    if el.children.is_empty() {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    for (i, c) in el.children.iter().enumerate() {
        if i == 1 {
            out.push_str(&pad);
            out.push_str("  <!-- spacer <b/> -->\n");
        }
        render(c, depth + 1, false, out);
    }
    out.push_str(&pad);
    out.push_str("</");
    out.push_str(TAGS[el.tag]);
    out.push_str(">\n");
}

pub fn document(el: &El, prolog: bool) -> String {
    let mut out = String::new();
    if prolog {
        out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    }
    render(el, 0, true, &mut out);
    out
}

pub fn paths(el: &El, prefix: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in el.children.iter().enumerate() {
        let mut p = prefix.clone();
        p.push(i);
        paths(c, p, out);
    }
}

/// Remove the one `android:contentDescription` attribute that is not present in
/// `original`, together with the whitespace in front of it.
pub fn strip_added_attribute(injected: &str, original: &str) -> String {
    let re = regex::Regex::new(r#"\s+android:contentDescription="[^"]*""#).unwrap();
    let hits: Vec<_> = re.find_iter(injected).collect();
    let before = re.find_iter(original).count();
    assert_eq!(hits.len(), before + 1);
    for m in hits {
        let candidate = format!("{}{}", &injected[..m.start()], &injected[m.end()..]);
        if candidate == original {
            return candidate;
        }
    }
    panic!("no single attribute removal recovers the original");
}

/// Layout, prolog flag, element pick and alt text.
pub fn injection_case() -> impl Strategy<Value = (El, bool, prop::sample::Index, String)> {
    (element(), any::<bool>(), any::<prop::sample::Index>(), "[A-Za-z0-9 &<>\"'.,-]{1,24}")
}

/// Inject, check that removing the new attribute restores the input, that the
/// parsed value round-trips and that a second injection is refused.
pub fn check_injection(root: &El, prolog: bool, pick: &prop::sample::Index, alt: &str) -> Result<(), String> {
    use altgen::layout::{inject_alt_text, parse_layout, LayoutError};
    let xml = document(root, prolog);
    let mut all = Vec::new();
    paths(root, vec![], &mut all);
    let path = pick.get(&all).clone();

    let out = inject_alt_text(xml.as_bytes(), &path, alt).map_err(|e| e.to_string())?;
    let out_text = String::from_utf8(out.clone()).map_err(|e| e.to_string())?;
    if strip_added_attribute(&out_text, &xml) != xml {
        return Err("removing the attribute does not restore the input".into());
    }
    let reparsed = parse_layout(&out, "l", None).map_err(|e| e.to_string())?;
    let value = reparsed.element(&path).and_then(|e| e.android_attr("contentDescription"));
    if value != Some(alt) {
        return Err(format!("parsed value {value:?} != {alt:?}"));
    }
    let before = parse_layout(xml.as_bytes(), "l", None).map_err(|e| e.to_string())?;
    if before.elements.len() != reparsed.elements.len() {
        return Err("element count changed".into());
    }
    match inject_alt_text(&out, &path, "second") {
        Err(LayoutError::AlreadyAnnotated { path: p }) if p == path => Ok(()),
        other => Err(format!("double injection gave {other:?}")),
    }
}
