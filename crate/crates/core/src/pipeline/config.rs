use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{PipelineError, Stage};
use crate::outage::StudyWindow;
use crate::severity::SeverityConfig;
use crate::stats::{HypothesisConfig, TTestKind};

/// Input files. Anything left out falls back to the bundled defaults, except
/// the outage CSV, which has no default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub outage_csv: Option<PathBuf>,
    pub category_mapping: Option<PathBuf>,
    pub geo_groups: Option<PathBuf>,
    pub case: Option<PathBuf>,
    pub substations: Option<PathBuf>,
    pub coordinates: Option<PathBuf>,
    pub overlay: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub scenarios: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StageToggles {
    pub ingest: bool,
    pub characterize: bool,
    pub hypotheses: bool,
    pub severity: bool,
    pub network: bool,
    pub scenarios: bool,
    pub simulate: bool,
    pub report: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            ingest: true,
            characterize: true,
            hypotheses: true,
            severity: true,
            network: true,
            scenarios: true,
            simulate: true,
            report: true,
        }
    }
}

impl StageToggles {
    pub fn enabled(&self, stage: Stage) -> bool {
        match stage {
            Stage::Ingest => self.ingest,
            Stage::Characterize => self.characterize,
            Stage::Hypotheses => self.hypotheses,
            Stage::Severity => self.severity,
            Stage::Network => self.network,
            Stage::Scenarios => self.scenarios,
            Stage::Simulate => self.simulate,
            Stage::Report => self.report,
        }
    }

    pub fn only(stages: &[Stage]) -> Self {
        let mut t = Self {
            ingest: false,
            characterize: false,
            hypotheses: false,
            severity: false,
            network: false,
            scenarios: false,
            simulate: false,
            report: false,
        };
        for s in stages {
            match s {
                Stage::Ingest => t.ingest = true,
                Stage::Characterize => t.characterize = true,
                Stage::Hypotheses => t.hypotheses = true,
                Stage::Severity => t.severity = true,
                Stage::Network => t.network = true,
                Stage::Scenarios => t.scenarios = true,
                Stage::Simulate => t.simulate = true,
                Stage::Report => t.report = true,
            }
        }
        t
    }

    pub fn selected(&self) -> Vec<Stage> {
        Stage::ALL.into_iter().filter(|s| self.enabled(*s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsSettings {
    pub alpha: f64,
    pub major_outage_customers: u64,
    pub t_test: TTestKind,
    pub first_year: i32,
    pub last_year: i32,
    pub top_states: usize,
}

impl Default for StatsSettings {
    fn default() -> Self {
        let h = HypothesisConfig::default();
        Self {
            alpha: h.alpha,
            major_outage_customers: h.major_outage_customers,
            t_test: h.t_test,
            first_year: h.window.first_year,
            last_year: h.window.last_year,
            top_states: 10,
        }
    }
}

impl StatsSettings {
    pub fn window(&self) -> StudyWindow {
        StudyWindow { first_year: self.first_year, last_year: self.last_year }
    }

    pub fn hypothesis_config(&self) -> HypothesisConfig {
        HypothesisConfig {
            alpha: self.alpha,
            major_outage_customers: self.major_outage_customers,
            t_test: self.t_test,
            window: self.window(),
            ..HypothesisConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeveritySettings {
    pub l2_lambda: f64,
    pub train_fraction: f64,
    pub threshold: f64,
    pub balanced_class_weights: bool,
    pub tolerance: f64,
    pub max_iter: usize,
    pub top_k: usize,
}

impl Default for SeveritySettings {
    fn default() -> Self {
        let d = SeverityConfig::default();
        Self {
            l2_lambda: d.l2_lambda,
            train_fraction: d.train_fraction,
            threshold: d.decision_threshold,
            balanced_class_weights: d.balanced_class_weights,
            tolerance: d.tolerance,
            max_iter: d.max_iter,
            top_k: d.top_k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub out_dir: PathBuf,
    /// Seeds the train/test split. Required so no run depends on ambient randomness.
    pub seed: Option<u64>,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub stages: StageToggles,
    #[serde(default)]
    pub stats: StatsSettings,
    #[serde(default)]
    pub severity: SeveritySettings,
    /// Directory relative input paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| PipelineError::Config {
            key: "<file>".into(),
            msg: e.message().to_string(),
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Config {
            key: "<file>".into(),
            msg: format!("{}: {e}", path.display()),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.out_dir)
    }

    pub fn input(&self, p: &Option<PathBuf>) -> Option<PathBuf> {
        p.as_deref().map(|p| self.resolve(p))
    }

    pub fn severity_config(&self) -> SeverityConfig {
        let s = &self.severity;
        SeverityConfig {
            l2_lambda: s.l2_lambda,
            train_fraction: s.train_fraction,
            seed: self.seed.unwrap_or_default(),
            decision_threshold: s.threshold,
            balanced_class_weights: s.balanced_class_weights,
            tolerance: s.tolerance,
            max_iter: s.max_iter,
            top_k: s.top_k,
        }
    }

    /// Check every field and cross-reference before anything runs.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |key: &str, msg: String| Err(PipelineError::Config { key: key.into(), msg });
        if self.seed.is_none() {
            return bad("seed", "missing; seeds must be explicit".into());
        }
        let needs_outages = [Stage::Ingest, Stage::Characterize, Stage::Hypotheses, Stage::Severity]
            .iter()
            .any(|s| self.stages.enabled(*s));
        if needs_outages && self.inputs.outage_csv.is_none() {
            return bad("inputs.outage_csv", "required when outage stages are enabled".into());
        }
        let i = &self.inputs;
        for (key, p) in [
            ("inputs.outage_csv", &i.outage_csv),
            ("inputs.category_mapping", &i.category_mapping),
            ("inputs.geo_groups", &i.geo_groups),
            ("inputs.case", &i.case),
            ("inputs.substations", &i.substations),
            ("inputs.coordinates", &i.coordinates),
            ("inputs.overlay", &i.overlay),
            ("inputs.rules", &i.rules),
            ("inputs.scenarios", &i.scenarios),
        ] {
            if let Some(p) = self.input(p) {
                if !p.is_file() {
                    return bad(key, format!("{} does not exist", p.display()));
                }
            }
        }
        let st = &self.stats;
        if !(st.alpha > 0.0 && st.alpha < 1.0) {
            return bad("stats.alpha", format!("must lie in (0, 1), got {}", st.alpha));
        }
        if st.first_year > st.last_year {
            return bad("stats.first_year", format!("{} is after stats.last_year {}", st.first_year, st.last_year));
        }
        if st.top_states == 0 {
            return bad("stats.top_states", "must be at least 1".into());
        }
        let sv = &self.severity;
        if !(sv.train_fraction > 0.0 && sv.train_fraction < 1.0) {
            return bad("severity.train_fraction", format!("must lie in (0, 1), got {}", sv.train_fraction));
        }
        if !(sv.l2_lambda.is_finite() && sv.l2_lambda >= 0.0) {
            return bad("severity.l2_lambda", format!("must be finite and non-negative, got {}", sv.l2_lambda));
        }
        if !(sv.threshold > 0.0 && sv.threshold < 1.0) {
            return bad("severity.threshold", format!("must lie in (0, 1), got {}", sv.threshold));
        }
        if sv.tolerance.is_nan() || sv.tolerance <= 0.0 || sv.max_iter == 0 {
            return bad("severity.tolerance", "tolerance and max_iter must be positive".into());
        }
        Ok(())
    }
}

/// Load and validate a pipeline config file.
pub fn validate_config(path: impl AsRef<Path>) -> Result<PipelineConfig, PipelineError> {
    let cfg = PipelineConfig::load(path)?;
    cfg.validate()?;
    Ok(cfg)
}
