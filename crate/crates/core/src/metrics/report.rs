use std::path::{Path, PathBuf};

use serde::Serialize;

use super::svg::grouped_bar_chart;
use super::{MetricsError, ResilienceReport};
use crate::grid::EntityKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReportFormat {
    Json,
    Text,
    Csv,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 4] = [ReportFormat::Json, ReportFormat::Text, ReportFormat::Csv, ReportFormat::Svg];
}

/// Short label used on chart axes: the part before `:` in names like "S1: ...".
fn short_name(name: &str) -> String {
    name.split(':').next().unwrap_or(name).trim().to_string()
}

pub fn render_json(reports: &[ResilienceReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// Fixed-width table with the columns of the cascade results table, followed
/// by reference values where the scenario carries them.
pub fn render_table(reports: &[ResilienceReport]) -> String {
    let name_w = reports.iter().map(|r| r.scenario.len()).max().unwrap_or(8).max(8);
    let mut out = format!(
        "{:<name_w$}  {:>16}  {:>13}  {:>15}  {:>18}  {:>14}\n",
        "Scenario", "Initially Failed", "Cascade Depth", "Operability (O)", "Resilience Gap (G)", "Total Affected"
    );
    out.push_str(&format!("{}\n", "-".repeat(name_w + 2 + 16 + 2 + 13 + 2 + 15 + 2 + 18 + 2 + 14)));
    for r in reports {
        out.push_str(&format!(
            "{:<name_w$}  {:>16}  {:>13}  {:>15.4}  {:>18.4}  {:>14}\n",
            r.scenario, r.initial_failed, r.cascade_depth, r.operability, r.resilience_gap, r.total_affected
        ));
    }
    if reports.iter().any(|r| r.reference.operability.is_some()) {
        out.push_str("\nReference values\n");
        for r in reports {
            let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
            let (o, g) = match r.reference.operability {
                Some(o) => (format!("{o:.4}"), format!("{:.4}", 1.0 - o)),
                None => ("-".into(), "-".into()),
            };
            out.push_str(&format!(
                "{:<name_w$}  {:>16}  {:>13}  {:>15}  {:>18}  {:>14}\n",
                r.scenario,
                opt(r.reference.initial_entities),
                "-",
                o,
                g,
                opt(r.reference.total_affected)
            ));
        }
    }
    out
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

/// One row per scenario with the results-table columns plus the split of
/// affected entities.
pub fn render_csv(reports: &[ResilienceReport]) -> String {
    csv_string(
        &[
            "scenario",
            "initial_failed",
            "cascade_depth",
            "operability",
            "resilience_gap",
            "total_affected",
            "affected_failed_only",
            "direct",
            "propagated",
        ],
        reports
            .iter()
            .map(|r| {
                vec![
                    r.scenario.clone(),
                    r.initial_failed.to_string(),
                    r.cascade_depth.to_string(),
                    r.operability.to_string(),
                    r.resilience_gap.to_string(),
                    r.total_affected.to_string(),
                    r.affected_failed_only.to_string(),
                    r.direct.to_string(),
                    r.propagated.to_string(),
                ]
            })
            .collect(),
    )
}

/// Plot series as CSV, one file per chart.
#[derive(Debug, Clone, PartialEq)]
struct SeriesCsv {
    file: &'static str,
    content: String,
}

fn series(reports: &[ResilienceReport]) -> Vec<SeriesCsv> {
    let kinds: Vec<&str> = EntityKind::ALL.iter().map(|k| k.as_str()).collect();
    let mut header = vec!["scenario"];
    header.extend(&kinds);
    let initial = csv_string(
        &header,
        reports
            .iter()
            .map(|r| {
                let mut row = vec![r.scenario.clone()];
                row.extend(EntityKind::ALL.iter().map(|k| r.initial_breakdown.get(k).copied().unwrap_or(0).to_string()));
                row
            })
            .collect(),
    );
    let mut failed_header = vec!["scenario".to_string()];
    for k in &kinds {
        failed_header.push(format!("{k}_failed"));
        failed_header.push(format!("{k}_degraded"));
    }
    let failed_header: Vec<&str> = failed_header.iter().map(String::as_str).collect();
    let failed = csv_string(
        &failed_header,
        reports
            .iter()
            .map(|r| {
                let mut row = vec![r.scenario.clone()];
                for k in EntityKind::ALL {
                    let c = r.breakdown.get(&k).copied().unwrap_or_default();
                    row.push(c.failed.to_string());
                    row.push(c.degraded.to_string());
                }
                row
            })
            .collect(),
    );
    let og = csv_string(
        &["scenario", "operability", "resilience_gap"],
        reports
            .iter()
            .map(|r| vec![r.scenario.clone(), r.operability.to_string(), r.resilience_gap.to_string()])
            .collect(),
    );
    let split = csv_string(
        &["scenario", "direct", "propagated"],
        reports
            .iter()
            .map(|r| vec![r.scenario.clone(), r.direct.to_string(), r.propagated.to_string()])
            .collect(),
    );
    vec![
        SeriesCsv { file: "initial_by_kind.csv", content: initial },
        SeriesCsv { file: "operability_gap.csv", content: og },
        SeriesCsv { file: "direct_vs_cascade.csv", content: split },
        SeriesCsv { file: "failed_by_kind.csv", content: failed },
    ]
}

/// (file name, SVG text) for the four charts.
pub fn render_svgs(reports: &[ResilienceReport]) -> Vec<(&'static str, String)> {
    let cats: Vec<String> = reports.iter().map(|r| short_name(&r.scenario)).collect();
    let per_kind = |f: &dyn Fn(&ResilienceReport, EntityKind) -> f64| -> Vec<(String, Vec<f64>)> {
        EntityKind::ALL
            .iter()
            .map(|k| (k.as_str().to_string(), reports.iter().map(|r| f(r, *k)).collect()))
            .collect()
    };
    vec![
        (
            "initial_by_kind.svg",
            grouped_bar_chart(
                "Initial failures by entity type",
                &cats,
                &per_kind(&|r, k| r.initial_breakdown.get(&k).copied().unwrap_or(0) as f64),
            ),
        ),
        (
            "operability_gap.svg",
            grouped_bar_chart(
                "Post-cascade operability and resilience gap",
                &cats,
                &[
                    ("operability".into(), reports.iter().map(|r| r.operability).collect()),
                    ("resilience gap".into(), reports.iter().map(|r| r.resilience_gap).collect()),
                ],
            ),
        ),
        (
            "direct_vs_cascade.svg",
            grouped_bar_chart(
                "Direct vs cascade-propagated failures",
                &cats,
                &[
                    ("direct".into(), reports.iter().map(|r| r.direct as f64).collect()),
                    ("propagated".into(), reports.iter().map(|r| r.propagated as f64).collect()),
                ],
            ),
        ),
        (
            "failed_by_kind.svg",
            grouped_bar_chart(
                "Post-cascade failed entities by type",
                &cats,
                &per_kind(&|r, k| r.breakdown.get(&k).map_or(0, |c| c.failed) as f64),
            ),
        ),
    ]
}

/// (file name, content) for every requested format, in a fixed order.
pub fn render_all(reports: &[ResilienceReport], formats: &[ReportFormat]) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Json => files.push(("resilience.json".to_string(), render_json(reports))),
            ReportFormat::Text => files.push(("resilience_table.txt".to_string(), render_table(reports))),
            ReportFormat::Csv => {
                files.push(("resilience.csv".to_string(), render_csv(reports)));
                files.extend(series(reports).into_iter().map(|s| (s.file.to_string(), s.content)));
            }
            ReportFormat::Svg => files.extend(render_svgs(reports).into_iter().map(|(n, s)| (n.to_string(), s))),
        }
    }
    files
}

/// Write the requested formats into `dir` and return the paths written.
pub fn emit_report(reports: &[ResilienceReport], dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::NoReports);
    }
    std::fs::create_dir_all(dir).map_err(|source| MetricsError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for (name, content) in render_all(reports, formats) {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|source| MetricsError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::JointNetwork;
    use crate::metrics::simulate_all;
    use crate::scenario::default_scenarios;

    fn reports() -> Vec<ResilienceReport> {
        let net = JointNetwork::default_network().unwrap();
        simulate_all(&net, &default_scenarios()).unwrap().into_iter().map(|o| o.report).collect()
    }

    #[test]
    fn json_has_table_columns() {
        let r = reports();
        let v: serde_json::Value = serde_json::from_str(&render_json(&r)).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 4);
        for key in ["scenario", "initial_failed", "cascade_depth", "operability", "resilience_gap", "total_affected", "breakdown", "direct", "propagated"] {
            assert!(rows[0].get(key).is_some(), "{key}");
        }
        assert!(rows[0]["breakdown"]["Gateway"].get("failed").is_some());
    }

    #[test]
    fn empty_is_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_report(&[], dir.path(), &ReportFormat::ALL), Err(MetricsError::NoReports)));
    }

    #[test]
    fn byte_stable() {
        let r = reports();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let pa = emit_report(&r, a.path(), &ReportFormat::ALL).unwrap();
        let pb = emit_report(&reports(), b.path(), &ReportFormat::ALL).unwrap();
        assert_eq!(pa.len(), pb.len());
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
        }
        assert!(render_table(&r).contains("Reference values"));
    }
}
