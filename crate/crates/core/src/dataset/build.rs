use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnnotatedIcon, DatasetError, DatasetStats, Split};
use crate::extract::{detect_icons, extract_context, SizeFilter};
use crate::ui_model::{BoundingBox, Screen};

pub const MAX_LABELS: usize = 3;

/// One caption-file row: a widget addressed by screen and bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionRow {
    pub screen_id: String,
    pub bounds: BoundingBox,
    pub captions: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct RawCaption {
    screen_id: String,
    left: i64,
    top: i64,
    right: i64,
    bottom: i64,
    captions: String,
}

/// CSV with header `screen_id,left,top,right,bottom,captions`; captions are
/// `|`-separated.
pub fn load_captions(path: &Path) -> Result<Vec<CaptionRow>, DatasetError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<RawCaption>().enumerate() {
        let line = i + 2;
        let r = rec.map_err(|e| DatasetError::Format(format!("{} line {line}: {e}", path.display())))?;
        let bounds = BoundingBox::new(r.left, r.top, r.right, r.bottom)
            .map_err(|e| DatasetError::Format(format!("{} line {line}: {e}", path.display())))?;
        rows.push(CaptionRow {
            screen_id: r.screen_id,
            bounds,
            captions: r.captions.split('|').map(str::to_owned).collect(),
        });
    }
    Ok(rows)
}

/// CSV with header `screen_id,split`.
pub fn load_splits(path: &Path) -> Result<HashMap<String, Split>, DatasetError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| DatasetError::Format(format!("{} line {}: {e}", path.display(), i + 2)))?;
        let (Some(id), Some(split)) = (rec.get(0), rec.get(1)) else {
            return Err(DatasetError::Format(format!("{} line {}: expected 2 columns", path.display(), i + 2)));
        };
        out.insert(id.trim().to_owned(), split.parse()?);
    }
    Ok(out)
}

/// Rows and icons that did not make it into the dataset, by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub unknown_screen_captions: usize,
    pub unmatched_captions: usize,
    pub size_filtered_icons: usize,
    pub unsplit_icons: usize,
    pub truncated_label_sets: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetBuild {
    pub icons: Vec<AnnotatedIcon>,
    pub stats: DatasetStats,
    pub report: BuildReport,
}

struct ScreenOutcome {
    icons: Vec<AnnotatedIcon>,
    report: BuildReport,
}

fn screen_dims(screen: &Screen) -> Option<(u32, u32)> {
    screen.screen_dims.or_else(|| screen.root.bounds.map(|b| (b.right, b.bottom)))
}

fn process_screen(
    screen: &Screen,
    captions: &mut HashMap<BoundingBox, Vec<String>>,
    split: Option<Split>,
    filter: &SizeFilter,
) -> ScreenOutcome {
    let mut report = BuildReport::default();
    let mut icons = Vec::new();
    for cand in detect_icons(screen) {
        let Some(bounds) = cand.node.bounds else { continue };
        if let Some(dims) = screen_dims(screen) {
            if !filter.keep(&cand, dims) {
                report.size_filtered_icons += captions.contains_key(&bounds) as usize;
                captions.remove(&bounds);
                continue;
            }
        }
        // first icon in path order claims a shared bounding box
        let Some(mut labels) = captions.remove(&bounds) else { continue };
        let Some(split) = split else {
            report.unsplit_icons += 1;
            continue;
        };
        if labels.len() > MAX_LABELS {
            labels.truncate(MAX_LABELS);
            report.truncated_label_sets += 1;
        }
        icons.push(AnnotatedIcon {
            screen_id: screen.screen_id.clone(),
            path: cand.path.clone(),
            bounds,
            split,
            labels,
            context: extract_context(screen, &cand),
            parent_bounds: cand.parent.as_ref().and_then(|p| p.bounds),
            screenshot: screen.screenshot.as_ref().map(|h| h.0.clone()),
        });
    }
    report.unmatched_captions = captions.len();
    ScreenOutcome { icons, report }
}

/// Detect and size-filter icons per screen, join them to captions by
/// `(screen_id, bounds)` and assign each screen's split.
pub fn build_icon_dataset(
    screens: &[Screen],
    captions: &[CaptionRow],
    splits: &HashMap<String, Split>,
    filter: &SizeFilter,
) -> DatasetBuild {
    let known: HashSet<&str> = screens.iter().map(|s| s.screen_id.as_str()).collect();
    let mut report = BuildReport::default();
    let mut by_screen: HashMap<&str, HashMap<BoundingBox, Vec<String>>> = HashMap::new();
    for row in captions {
        if !known.contains(row.screen_id.as_str()) {
            report.unknown_screen_captions += 1;
            continue;
        }
        let labels = by_screen.entry(&row.screen_id).or_default().entry(row.bounds).or_default();
        labels.extend(row.captions.iter().map(|c| c.trim()).filter(|c| !c.is_empty()).map(str::to_owned));
    }
    if report.unknown_screen_captions > 0 {
        log::warn!("{} caption rows reference unknown screens", report.unknown_screen_captions);
    }
    let jobs: Vec<(&Screen, HashMap<BoundingBox, Vec<String>>)> = screens
        .iter()
        .map(|s| (s, by_screen.remove(s.screen_id.as_str()).unwrap_or_default()))
        .collect();

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    let chunk = jobs.len().div_ceil(workers).max(1);
    let outcomes: Vec<ScreenOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|(screen, caps)| {
                            let mut caps = caps.clone();
                            process_screen(screen, &mut caps, splits.get(&screen.screen_id).copied(), filter)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("dataset worker panicked")).collect()
    });

    let mut icons = Vec::new();
    for o in outcomes {
        icons.extend(o.icons);
        report.unmatched_captions += o.report.unmatched_captions;
        report.size_filtered_icons += o.report.size_filtered_icons;
        report.unsplit_icons += o.report.unsplit_icons;
        report.truncated_label_sets += o.report.truncated_label_sets;
    }
    DatasetBuild {
        stats: DatasetStats::from_icons(&icons),
        icons,
        report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ui_model::ViewNode;

    fn bb(l: i64, t: i64, r: i64, b: i64) -> BoundingBox {
        BoundingBox::new(l, t, r, b).unwrap()
    }

    fn screen(id: &str) -> Screen {
        let root = ViewNode::new("FrameLayout")
            .with_bounds(bb(0, 0, 1000, 2000))
            .with_child(ViewNode::new("ImageButton").with_resource_id("play").with_bounds(bb(0, 0, 100, 100)))
            .with_child(ViewNode::new("ImageButton").with_resource_id("wide").with_bounds(bb(0, 200, 900, 300)));
        Screen::new(id, "A", root)
    }

    fn row(id: &str, b: BoundingBox, caps: &[&str]) -> CaptionRow {
        CaptionRow {
            screen_id: id.into(),
            bounds: b,
            captions: caps.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn empty_corpus() {
        let b = build_icon_dataset(&[], &[], &HashMap::new(), &SizeFilter::default());
        assert!(b.icons.is_empty());
        assert_eq!(b.stats, DatasetStats::default());
    }

    #[test]
    fn joins_filters_and_reports() {
        let screens = [screen("1"), screen("2")];
        let captions = [
            row("1", bb(0, 0, 100, 100), &["play", "start"]),
            row("1", bb(0, 200, 900, 300), &["too wide"]),
            row("2", bb(0, 0, 100, 100), &["a", "b", "c", "d"]),
            row("9", bb(0, 0, 100, 100), &["ghost"]),
            row("2", bb(5, 5, 50, 50), &["nowhere"]),
        ];
        let splits = HashMap::from([("1".to_owned(), Split::Train), ("2".to_owned(), Split::Test)]);
        let b = build_icon_dataset(&screens, &captions, &splits, &SizeFilter::default());
        assert_eq!(b.icons.len(), 2);
        assert_eq!(b.icons[0].labels, ["play", "start"]);
        assert_eq!(b.icons[1].labels, ["a", "b", "c"]);
        assert_eq!(b.stats.train.labels, 2);
        assert_eq!(b.stats.test.labels, 3);
        assert_eq!(b.report.unknown_screen_captions, 1);
        assert_eq!(b.report.unmatched_captions, 1);
        assert_eq!(b.report.size_filtered_icons, 1);
        assert_eq!(b.report.truncated_label_sets, 1);
        assert_eq!(b.icons[0].context.ui_element_info.resource_id(), Some("play"));
    }
}
