//! Icon detection and context extraction over a parsed screen.

use serde::{Deserialize, Serialize};

use crate::ui_model::{IconContext, NodeProps, Screen, ViewNode};

const BUTTON_SUFFIX: &str = "ImageButton";
const VIEW_SUFFIX: &str = "ImageView";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IconCandidate {
    pub screen_ref: String,
    pub path: Vec<usize>,
    pub node: ViewNode,
    pub parent: Option<ViewNode>,
}

impl IconCandidate {
    pub fn icon_ref(&self) -> String {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        format!("{}#{}", self.screen_ref, path.join("."))
    }
}

/// Class-based icon heuristic: any `*ImageButton`, and `*ImageView` only when clickable.
pub fn is_icon(node: &ViewNode) -> bool {
    let class = node.class_name.as_str();
    class.ends_with(BUTTON_SUFFIX) || (class.ends_with(VIEW_SUFFIX) && node.clickable == Some(true))
}

pub fn detect_icons(screen: &Screen) -> Vec<IconCandidate> {
    let mut out = Vec::new();
    collect(&screen.root, None, &mut Vec::new(), &screen.screen_id, &mut out);
    out
}

fn collect(
    node: &ViewNode,
    parent: Option<&ViewNode>,
    path: &mut Vec<usize>,
    screen_ref: &str,
    out: &mut Vec<IconCandidate>,
) {
    if is_icon(node) {
        out.push(IconCandidate {
            screen_ref: screen_ref.to_owned(),
            path: path.clone(),
            node: node.clone(),
            parent: parent.cloned(),
        });
    }
    for (i, child) in node.children.iter().enumerate() {
        path.push(i);
        collect(child, Some(node), path, screen_ref, out);
        path.pop();
    }
}

/// Thresholds for dropping abnormally large or narrow elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SizeFilter {
    /// Maximum fraction of the screen width/height an icon may span.
    pub max_screen_fraction: f64,
    /// Maximum long-side / short-side ratio.
    pub max_aspect_ratio: f64,
    pub min_side_px: u32,
}

impl Default for SizeFilter {
    fn default() -> Self {
        Self {
            max_screen_fraction: 0.5,
            max_aspect_ratio: 4.0,
            min_side_px: 8,
        }
    }
}

impl SizeFilter {
    pub fn keep(&self, candidate: &IconCandidate, screen_dims: (u32, u32)) -> bool {
        let Some(b) = candidate.node.bounds else {
            return true;
        };
        let (w, h) = (b.width(), b.height());
        let (sw, sh) = screen_dims;
        if w < self.min_side_px || h < self.min_side_px {
            return false;
        }
        if f64::from(w) > self.max_screen_fraction * f64::from(sw) || f64::from(h) > self.max_screen_fraction * f64::from(sh) {
            return false;
        }
        let ratio = f64::from(w.max(h)) / f64::from(w.min(h));
        ratio <= self.max_aspect_ratio
    }
}

pub fn size_filter(candidate: &IconCandidate, screen_dims: (u32, u32)) -> bool {
    SizeFilter::default().keep(candidate, screen_dims)
}

/// Siblings carrying nothing beyond a class name add no signal and are skipped.
fn sibling_props(node: &ViewNode) -> Option<NodeProps> {
    let props = NodeProps::from_node(node);
    (props.resource_id().is_some() || props.text().is_some()).then_some(props)
}

pub fn extract_context(screen: &Screen, candidate: &IconCandidate) -> IconContext {
    let parent_node = candidate.parent.as_ref().map(NodeProps::from_node);
    let sibling_nodes = match (&candidate.parent, candidate.path.last()) {
        (Some(parent), Some(&own_index)) => parent
            .children
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != own_index)
            .filter_map(|(_, sib)| sibling_props(sib))
            .collect(),
        _ => Vec::new(),
    };
    IconContext {
        app_activity_name: screen.activity_name.clone(),
        ui_element_info: NodeProps::from_node(&candidate.node),
        parent_node,
        sibling_nodes,
        in_icon_text: Vec::new(),
        icon_label: None,
    }
}

/// Icons present in `new` without a counterpart in `old`.
///
/// Candidates are paired one-to-one: first by (class, resource id) when both
/// carry an id, then by (path, class) among the leftovers. Two nodes with
/// different resource ids never pair positionally.
pub fn diff_new_icons(old: &Screen, new: &Screen) -> Vec<IconCandidate> {
    let old_icons = detect_icons(old);
    let new_icons = detect_icons(new);
    let mut old_used = vec![false; old_icons.len()];
    let mut new_matched = vec![false; new_icons.len()];

    for (ni, n) in new_icons.iter().enumerate() {
        let Some(rid) = n.node.resource_id.as_deref() else { continue };
        if let Some(oi) = old_icons.iter().enumerate().position(|(oi, o)| {
            !old_used[oi] && o.node.class_name == n.node.class_name && o.node.resource_id.as_deref() == Some(rid)
        }) {
            old_used[oi] = true;
            new_matched[ni] = true;
        }
    }
    for (ni, n) in new_icons.iter().enumerate() {
        if new_matched[ni] {
            continue;
        }
        if let Some(oi) = old_icons.iter().enumerate().position(|(oi, o)| {
            !old_used[oi]
                && o.path == n.path
                && o.node.class_name == n.node.class_name
                && !ids_conflict(o.node.resource_id.as_deref(), n.node.resource_id.as_deref())
        }) {
            old_used[oi] = true;
            new_matched[ni] = true;
        }
    }
    new_icons
        .into_iter()
        .zip(new_matched)
        .filter_map(|(c, matched)| (!matched).then_some(c))
        .collect()
}

fn ids_conflict(a: Option<&str>, b: Option<&str>) -> bool {
    matches!((a, b), (Some(x), Some(y)) if x != y)
}
