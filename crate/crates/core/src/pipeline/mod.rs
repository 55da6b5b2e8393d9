//! Stage orchestration: ingest → characterize → hypotheses → severity →
//! network → scenarios → simulate → report.
//!
//! Each stage writes its artifacts under `<out_dir>/<stage>/` followed by a
//! `manifest.json` with content hashes of its inputs, parameters and outputs.
//! A stage whose inputs and parameters are unchanged and whose outputs are
//! intact is skipped.

pub mod cli;
mod config;
mod manifest;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{validate_config, Inputs, PipelineConfig, SeveritySettings, StageToggles, StatsSettings};
pub use manifest::{sha256_hex, Manifest};

use crate::data;
use crate::grid::{parse_case_str, CoordinateTable, JointNetwork, NetworkInputs, OverlayConfig, SubstationMapping};
use crate::metrics::{render_all, render_json, ReportFormat, ResilienceReport};
use crate::outage::{filter_window, parse_outage_reader, read_records_csv, write_records_csv, CategoryMapping, GeoTable, OutageRecord};
use crate::scenario::{build_scenario, load_scenarios_reader, scenarios_json, InitialFailureSet, Scenario};
use crate::severity::train_severity_model;
use crate::stats::{characterize, run_hypotheses};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Characterize,
    Hypotheses,
    Severity,
    Network,
    Scenarios,
    Simulate,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Characterize,
        Stage::Hypotheses,
        Stage::Severity,
        Stage::Network,
        Stage::Scenarios,
        Stage::Simulate,
        Stage::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Characterize => "characterize",
            Stage::Hypotheses => "hypotheses",
            Stage::Severity => "severity",
            Stage::Network => "network",
            Stage::Scenarios => "scenarios",
            Stage::Simulate => "simulate",
            Stage::Report => "report",
        }
    }

    pub fn dependencies(self) -> &'static [Stage] {
        match self {
            Stage::Ingest | Stage::Network => &[],
            Stage::Characterize | Stage::Hypotheses | Stage::Severity => &[Stage::Ingest],
            Stage::Scenarios => &[Stage::Network],
            Stage::Simulate => &[Stage::Network, Stage::Scenarios],
            Stage::Report => &[Stage::Simulate],
        }
    }

    /// Parse `all` or a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Stage>, PipelineError> {
        if s.trim() == "all" {
            return Ok(Stage::ALL.to_vec());
        }
        let mut out: Vec<Stage> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = PipelineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| PipelineError::Config { key: "stages".into(), msg: format!("unknown stage `{s}`") })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("stage {stage} needs {missing}, which has not been run (no intact manifest under {missing}/)")]
    Dependency { stage: Stage, missing: Stage },
    #[error("stage {stage} failed: {msg}")]
    Stage { stage: Stage, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// 1 for validation problems, 2 for anything that happened while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Ran,
    UpToDate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageResult {
    pub stage: Stage,
    pub status: StageStatus,
    pub outputs: Vec<String>,
}

/// Scenario plus its T0 failure set, as passed from `scenarios` to `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub scenario: Scenario,
    pub initial: InitialFailureSet,
}

type Files = Vec<(String, Vec<u8>)>;

struct StageInputs {
    contents: BTreeMap<String, Vec<u8>>,
    params: String,
}

impl StageInputs {
    fn get(&self, key: &str) -> Option<&[u8]> {
        self.contents.get(key).map(Vec::as_slice)
    }

    fn text(&self, stage: Stage, key: &str) -> Result<&str, PipelineError> {
        let bytes = self.get(key).ok_or_else(|| fail(stage, format!("missing input {key}")))?;
        std::str::from_utf8(bytes).map_err(|e| fail(stage, format!("{key}: {e}")))
    }
}

fn fail(stage: Stage, msg: impl fmt::Display) -> PipelineError {
    PipelineError::Stage { stage, msg: msg.to_string() }
}

fn read(path: &Path) -> Result<Vec<u8>, PipelineError> {
    std::fs::read(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

fn manifest_path(out: &Path, stage: Stage) -> PathBuf {
    out.join(stage.as_str()).join("manifest.json")
}

fn gather(cfg: &PipelineConfig, stage: Stage, out: &Path) -> Result<StageInputs, PipelineError> {
    let mut contents = BTreeMap::new();
    let mut external = |key: &str, p: &Option<PathBuf>, bundled: Option<&str>| -> Result<(), PipelineError> {
        match (cfg.input(p), bundled) {
            (Some(path), _) => {
                contents.insert(key.to_string(), read(&path)?);
            }
            (None, Some(text)) => {
                contents.insert(format!("{key} (bundled)"), text.as_bytes().to_vec());
            }
            (None, None) => {}
        }
        Ok(())
    };
    let i = &cfg.inputs;
    let params = match stage {
        Stage::Ingest => {
            if i.outage_csv.is_none() {
                return Err(PipelineError::Config { key: "inputs.outage_csv".into(), msg: "required by the ingest stage".into() });
            }
            external("inputs.outage_csv", &i.outage_csv, None)?;
            external("inputs.category_mapping", &i.category_mapping, Some(data::CATEGORY_MAPPING))?;
            serde_json::json!({})
        }
        Stage::Characterize | Stage::Hypotheses => {
            external("inputs.geo_groups", &i.geo_groups, Some(data::GEO_GROUPS))?;
            serde_json::to_value(&cfg.stats).expect("settings serialize")
        }
        Stage::Severity => {
            external("inputs.geo_groups", &i.geo_groups, Some(data::GEO_GROUPS))?;
            serde_json::json!({ "severity": cfg.severity, "seed": cfg.seed, "window": cfg.stats.window() })
        }
        Stage::Network => {
            external("inputs.case", &i.case, Some(data::IEEE118_CASE))?;
            external("inputs.substations", &i.substations, Some(data::SUBSTATION_MAPPING))?;
            external("inputs.overlay", &i.overlay, Some(data::OVERLAY_CONFIG))?;
            external("inputs.coordinates", &i.coordinates, None)?;
            external("inputs.rules", &i.rules, None)?;
            serde_json::json!({})
        }
        Stage::Scenarios => {
            external("inputs.scenarios", &i.scenarios, Some(data::SCENARIOS))?;
            serde_json::json!({})
        }
        Stage::Simulate | Stage::Report => serde_json::json!({}),
    };
    for artifact in upstream_artifacts(stage) {
        let path = out.join(artifact);
        contents.insert((*artifact).to_string(), read(&path)?);
    }
    Ok(StageInputs { contents, params: params.to_string() })
}

fn upstream_artifacts(stage: Stage) -> &'static [&'static str] {
    match stage {
        Stage::Ingest | Stage::Network => &[],
        Stage::Characterize | Stage::Hypotheses | Stage::Severity => &["ingest/records.csv"],
        Stage::Scenarios => &["network/network.json"],
        Stage::Simulate => &["network/network.json", "scenarios/scenarios.json"],
        Stage::Report => &["simulate/reports.json"],
    }
}

fn bundled_or<'a>(inputs: &'a StageInputs, stage: Stage, key: &str) -> Result<&'a str, PipelineError> {
    if inputs.get(key).is_some() {
        inputs.text(stage, key)
    } else {
        inputs.text(stage, &format!("{key} (bundled)"))
    }
}

fn records(inputs: &StageInputs, stage: Stage, cfg: &PipelineConfig) -> Result<Vec<OutageRecord>, PipelineError> {
    let all = read_records_csv(inputs.get("ingest/records.csv").unwrap_or_default()).map_err(|e| fail(stage, e))?;
    Ok(filter_window(&all, cfg.stats.window()))
}

fn geo(inputs: &StageInputs, stage: Stage) -> Result<GeoTable, PipelineError> {
    GeoTable::from_reader(bundled_or(inputs, stage, "inputs.geo_groups")?.as_bytes()).map_err(|e| fail(stage, e))
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s.into_bytes()
}

fn slug(name: &str) -> String {
    let head = name.split(':').next().unwrap_or(name).trim();
    head.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
}

fn execute(cfg: &PipelineConfig, stage: Stage, inputs: &StageInputs) -> Result<Files, PipelineError> {
    let dir = stage.as_str();
    let f = |name: &str, bytes: Vec<u8>| (format!("{dir}/{name}"), bytes);
    Ok(match stage {
        Stage::Ingest => {
            let mapping = CategoryMapping::from_reader(bundled_or(inputs, stage, "inputs.category_mapping")?.as_bytes())
                .map_err(|e| fail(stage, e))?;
            let report = parse_outage_reader(inputs.get("inputs.outage_csv").unwrap_or_default(), &mapping)
                .map_err(|e| fail(stage, e))?;
            let mut csv = Vec::new();
            write_records_csv(&mut csv, &report.records).map_err(|e| fail(stage, e))?;
            vec![f("records.csv", csv), f("report.json", json_bytes(&report.summary()))]
        }
        Stage::Characterize => {
            let recs = records(inputs, stage, cfg)?;
            let c = characterize(&recs, &geo(inputs, stage)?, cfg.stats.window(), cfg.stats.top_states).map_err(|e| fail(stage, e))?;
            let mut series = String::from("year,climate_outages\n");
            for p in &c.annual_climate_counts.points {
                series.push_str(&format!("{},{}\n", p.year, p.value));
            }
            vec![f("characterization.json", json_bytes(&c)), f("annual_climate_counts.csv", series.into_bytes())]
        }
        Stage::Hypotheses => {
            let recs = records(inputs, stage, cfg)?;
            let report = run_hypotheses(&recs, &geo(inputs, stage)?, &cfg.stats.hypothesis_config()).map_err(|e| fail(stage, e))?;
            let mut j = report.to_json();
            j.push('\n');
            vec![f("hypotheses.json", j.into_bytes()), f("hypotheses.txt", report.to_text().into_bytes())]
        }
        Stage::Severity => {
            let recs = records(inputs, stage, cfg)?;
            let run = train_severity_model(&recs, &geo(inputs, stage)?, &cfg.severity_config()).map_err(|e| fail(stage, e))?;
            let summary = serde_json::json!({
                "train_size": run.train_size,
                "test_size": run.test_size,
                "labeling": run.model.labeling,
                "iterations": run.model.logistic.iterations,
                "accuracy": run.evaluation.accuracy,
                "auc": run.evaluation.auc,
            });
            let mut model = run.model.to_json();
            model.push('\n');
            vec![
                f("model.json", model.into_bytes()),
                f("evaluation.json", json_bytes(&run.evaluation)),
                f("evaluation.txt", run.evaluation.to_text().into_bytes()),
                f("roc.csv", run.evaluation.roc_csv().into_bytes()),
                f("coefficients.json", json_bytes(&run.ranking)),
                f("summary.json", json_bytes(&summary)),
            ]
        }
        Stage::Network => {
            let case = parse_case_str(bundled_or(inputs, stage, "inputs.case")?).map_err(|e| fail(stage, e))?;
            let mapping = SubstationMapping::from_reader(bundled_or(inputs, stage, "inputs.substations")?.as_bytes())
                .map_err(|e| fail(stage, e))?;
            let overlay = OverlayConfig::from_toml_str(bundled_or(inputs, stage, "inputs.overlay")?).map_err(|e| fail(stage, e))?;
            let coordinates = match inputs.get("inputs.coordinates") {
                Some(b) => Some(CoordinateTable::from_reader(b).map_err(|e| fail(stage, e))?),
                None => None,
            };
            let rules_override = match inputs.get("inputs.rules") {
                Some(_) => Some(inputs.text(stage, "inputs.rules")?.to_string()),
                None => None,
            };
            let net = JointNetwork::build(NetworkInputs { case, mapping, overlay, coordinates, rules_override })
                .map_err(|e| fail(stage, e))?;
            let mut ranking = String::from("rank,substation_id,centrality\n");
            for (r, id) in net.ranking.iter().enumerate() {
                let s = net.substation(*id).expect("ranked substation exists");
                ranking.push_str(&format!("{},{},{}\n", r + 1, id, s.centrality));
            }
            vec![
                f("network.json", net.to_json().into_bytes()),
                f("rules.miim", net.rules_text.clone().into_bytes()),
                f("coordinates.csv", CoordinateTable::to_csv(&net.substations).into_bytes()),
                f("ranking.csv", ranking.into_bytes()),
                f("census.json", json_bytes(&net.census)),
            ]
        }
        Stage::Scenarios => {
            let net = JointNetwork::from_json(inputs.text(stage, "network/network.json")?).map_err(|e| fail(stage, e))?;
            let scenarios = load_scenarios_reader(bundled_or(inputs, stage, "inputs.scenarios")?.as_bytes()).map_err(|e| fail(stage, e))?;
            let mut entries = Vec::new();
            for s in scenarios {
                let initial = build_scenario(&s, &net).map_err(|e| fail(stage, e))?;
                entries.push(ScenarioEntry { scenario: s, initial });
            }
            let pairs: Vec<(Scenario, InitialFailureSet)> = entries.iter().map(|e| (e.scenario.clone(), e.initial.clone())).collect();
            let mut listing = scenarios_json(&pairs);
            listing.push('\n');
            vec![f("scenarios.json", json_bytes(&entries)), f("initial_failures.json", listing.into_bytes())]
        }
        Stage::Simulate => {
            let net = JointNetwork::from_json(inputs.text(stage, "network/network.json")?).map_err(|e| fail(stage, e))?;
            let entries: Vec<ScenarioEntry> =
                serde_json::from_str(inputs.text(stage, "scenarios/scenarios.json")?).map_err(|e| fail(stage, e))?;
            let mut files = Vec::new();
            let mut reports = Vec::new();
            for e in &entries {
                let trace = net.cascade(&e.initial.entities).map_err(|err| fail(stage, err))?;
                let report = ResilienceReport::from_trace(&e.scenario.name, &trace, &net.entities, &e.initial, e.scenario.reference)
                    .map_err(|err| fail(stage, err))?;
                files.push(f(&format!("traces/{}.json", slug(&e.scenario.name)), (trace.to_json() + "\n").into_bytes()));
                reports.push(report);
            }
            files.insert(0, f("reports.json", render_json(&reports).into_bytes()));
            files
        }
        Stage::Report => {
            let reports: Vec<ResilienceReport> =
                serde_json::from_str(inputs.text(stage, "simulate/reports.json")?).map_err(|e| fail(stage, e))?;
            if reports.is_empty() {
                return Err(fail(stage, "no reports to emit"));
            }
            render_all(&reports, &ReportFormat::ALL)
                .into_iter()
                .map(|(name, content)| f(&name, content.into_bytes()))
                .collect()
        }
    })
}

fn dependency_ok(out: &Path, dep: Stage) -> bool {
    Manifest::read(&manifest_path(out, dep)).is_some_and(|m| m.outputs_intact(out))
}

/// Run `stages` (in pipeline order) and report what each one did.
pub fn run(cfg: &PipelineConfig, stages: &[Stage]) -> Result<Vec<StageResult>, PipelineError> {
    let mut cfg = cfg.clone();
    cfg.stages = StageToggles::only(stages);
    cfg.validate()?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|source| PipelineError::Io { path: out.clone(), source })?;
    let mut results = Vec::new();
    for stage in cfg.stages.selected() {
        for dep in stage.dependencies() {
            if !dependency_ok(&out, *dep) {
                return Err(PipelineError::Dependency { stage, missing: *dep });
            }
        }
        let inputs = gather(&cfg, stage, &out)?;
        let input_hashes: BTreeMap<String, String> = inputs.contents.iter().map(|(k, v)| (k.clone(), sha256_hex(v))).collect();
        let params = sha256_hex(inputs.params.as_bytes());
        let mpath = manifest_path(&out, stage);
        if let Some(m) = Manifest::read(&mpath) {
            if m.inputs == input_hashes && m.params == params && m.version == env!("CARGO_PKG_VERSION") && m.outputs_intact(&out) {
                results.push(StageResult { stage, status: StageStatus::UpToDate, outputs: m.outputs.keys().cloned().collect() });
                continue;
            }
        }
        // A stale manifest must not vouch for partially rewritten outputs.
        let _ = std::fs::remove_file(&mpath);
        let stage_dir = out.join(stage.as_str());
        if stage_dir.exists() {
            std::fs::remove_dir_all(&stage_dir).map_err(|source| PipelineError::Io { path: stage_dir.clone(), source })?;
        }
        let files = execute(&cfg, stage, &inputs)?;
        let mut outputs = BTreeMap::new();
        for (rel, bytes) in &files {
            let path = out.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|source| PipelineError::Io { path: parent.to_path_buf(), source })?;
            }
            std::fs::write(&path, bytes).map_err(|source| PipelineError::Io { path: path.clone(), source })?;
            outputs.insert(rel.clone(), sha256_hex(bytes));
        }
        let manifest = Manifest {
            stage: stage.as_str().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: input_hashes,
            params,
            outputs,
        };
        std::fs::write(&mpath, manifest.to_json()).map_err(|source| PipelineError::Io { path: mpath.clone(), source })?;
        results.push(StageResult { stage, status: StageStatus::Ran, outputs: manifest.outputs.keys().cloned().collect() });
    }
    Ok(results)
}
