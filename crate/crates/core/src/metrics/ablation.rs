use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::meteor::SynonymTable;
use super::report::{evaluate, EvalRecord, MetricConfig, MetricReport};
use crate::dataset::AnnotatedIcon;
use crate::ui_model::{AblationConfig, GenerationMode};

/// One (mode, ablation) cell of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationCell {
    pub mode: String,
    pub ablation: AblationConfig,
    pub label: String,
    pub report: Option<MetricReport>,
    /// Icons whose generation failed; they are left out of `report`.
    pub failures: Vec<String>,
}

impl AblationCell {
    pub fn cider(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.corpus.cider)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub cells: Vec<AblationCell>,
}

/// Generator signature used by the suite: alt text for one icon under a mode
/// and ablation, or an error message.
pub type Predictor<'a> = dyn Fn(&AnnotatedIcon, GenerationMode, AblationConfig) -> Result<String, String> + Sync + 'a;

/// Regenerate and score every icon once per (mode, ablation) cell. A cell
/// whose icons partly fail is scored on the rest and lists the failures.
pub fn run_ablation_suite(
    icons: &[AnnotatedIcon],
    modes: &[GenerationMode],
    ablations: &[AblationConfig],
    predict: &Predictor<'_>,
    config: &MetricConfig,
    synonyms: &SynonymTable,
) -> AblationReport {
    let mut cells = Vec::with_capacity(modes.len() * ablations.len());
    for &mode in modes {
        for &ablation in ablations {
            let mut records = Vec::new();
            let mut failures = Vec::new();
            for icon in icons {
                let icon_ref = icon.icon_ref();
                match predict(icon, mode, ablation) {
                    Ok(candidate) => records.push(EvalRecord {
                        icon_ref,
                        candidate,
                        references: icon.labels.clone(),
                    }),
                    Err(e) => failures.push(format!("{icon_ref}: {e}")),
                }
            }
            let cell_config = MetricConfig {
                mode: Some(mode.to_string()),
                ablation: Some(ablation),
                ..config.clone()
            };
            cells.push(AblationCell {
                mode: mode.to_string(),
                ablation,
                label: ablation.label(),
                report: evaluate(&records, &cell_config, synonyms).ok(),
                failures,
            });
        }
    }
    AblationReport { cells }
}

pub fn render_ablation_table(report: &AblationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:<50} {:>8} {:>8}  notes", "mode", "input", "CIDEr", "SPICE");
    for c in &report.cells {
        let cider = c.cider().map_or_else(|| "failed".to_owned(), |v| format!("{:.1}", v * 100.0));
        let notes = if c.failures.is_empty() {
            String::new()
        } else {
            format!("{} icon(s) failed", c.failures.len())
        };
        let _ = writeln!(out, "{:<8} {:<50} {:>8} {:>8}  {notes}", c.mode, c.label, cider, "n/a");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Split;
    use crate::ui_model::{BoundingBox, IconContext, NodeProps};

    fn icons() -> Vec<AnnotatedIcon> {
        (0..3)
            .map(|i| AnnotatedIcon {
                screen_id: i.to_string(),
                path: vec![0],
                bounds: BoundingBox::new(0, 0, 10, 10).unwrap(),
                split: Split::Test,
                labels: vec![format!("open item number {i}")],
                context: IconContext {
                    ui_element_info: NodeProps::new(Some("ImageButton"), Some("b"), None),
                    sibling_nodes: vec![NodeProps::new(Some("TextView"), Some("SENTINEL"), None)],
                    ..Default::default()
                },
                parent_bounds: None,
                screenshot: None,
            })
            .collect()
    }

    #[test]
    fn grid_shape_and_echo() {
        let echo = |icon: &AnnotatedIcon, _: GenerationMode, _: AblationConfig| Ok(icon.labels[0].clone());
        let r = run_ablation_suite(
            &icons(),
            &[GenerationMode::TEXT_T, GenerationMode::MMT_ICON],
            &AblationConfig::table_rows(),
            &echo,
            &MetricConfig::default(),
            &SynonymTable::default(),
        );
        assert_eq!(r.cells.len(), 8);
        let first = r.cells[0].cider().unwrap();
        assert!(r.cells.iter().all(|c| c.cider() == Some(first)));
        assert!(render_ablation_table(&r).contains("n/a"));
    }

    #[test]
    fn sentinel_sensitive_cell_differs_and_failures_annotated() {
        let sensitive = |icon: &AnnotatedIcon, _: GenerationMode, a: AblationConfig| {
            if icon.screen_id == "2" && a.omit_ocr_text {
                return Err("backend down".to_owned());
            }
            let sees_sentinel = !a.omit_parent_sibling && !icon.context.sibling_nodes.is_empty();
            Ok(if sees_sentinel { icon.labels[0].clone() } else { "something else".to_owned() })
        };
        let r = run_ablation_suite(
            &icons(),
            &[GenerationMode::TEXT_T],
            &AblationConfig::table_rows(),
            &sensitive,
            &MetricConfig::default(),
            &SynonymTable::default(),
        );
        assert_ne!(r.cells[0].cider(), r.cells[3].cider());
        assert_eq!(r.cells[1].failures.len(), 1);
        assert_eq!(r.cells[1].report.as_ref().unwrap().count, 2);
    }
}
