//! Severity-risk modeling: composite severity labels, leakage-safe features,
//! a class-weighted L2 logistic regression and its evaluation.

mod eval;
mod features;
mod label;
mod logistic;
mod split;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{evaluate, roc_auc, roc_curve, ClassMetrics, Confusion, EvalReport, RocPoint};
pub use features::{check_no_leakage, FeatureEncoder, FeatureMatrix, Season, Standardizer};
pub use label::{label_severity, top_quartile_count, LabeledRecord, SeverityLabeling};
pub use logistic::{
    fit_logistic, gradient, objective, predict_proba, sigmoid, ClassWeights, LogisticConfig, LogisticModel,
};
pub use split::{stratified_split, Split};

use crate::outage::{GeoTable, OutageError, OutageRecord};

#[derive(Debug, Error)]
pub enum SeverityError {
    #[error("cannot normalize {0}: constant over the dataset")]
    DegenerateNormalization(&'static str),
    #[error("{0}")]
    EmptyInput(&'static str),
    #[error("{0}")]
    SingleClass(&'static str),
    #[error("stratification needs at least 2 {class} records, found {count}")]
    Stratification { class: &'static str, count: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("feature `{0}` is derived from outage impact and would leak the label")]
    LeakyFeature(String),
    #[error("logistic fit did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence { gradient_norm: f64, iterations: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Outage(#[from] OutageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeverityConfig {
    pub l2_lambda: f64,
    pub train_fraction: f64,
    pub seed: u64,
    pub decision_threshold: f64,
    pub balanced_class_weights: bool,
    pub tolerance: f64,
    pub max_iter: usize,
    pub top_k: usize,
}

impl Default for SeverityConfig {
    fn default() -> Self {
        Self {
            l2_lambda: 1.0,
            train_fraction: 0.8,
            seed: 42,
            decision_threshold: 0.5,
            balanced_class_weights: true,
            tolerance: 1e-8,
            max_iter: 10_000,
            top_k: 5,
        }
    }
}

/// Everything needed to score new records: label parameters, encoder,
/// standardization and logistic weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityModel {
    pub labeling: SeverityLabeling,
    /// All encoded feature names, before zero-variance columns are dropped.
    pub feature_names: Vec<String>,
    pub dropped_features: Vec<String>,
    pub standardizer: Standardizer,
    pub logistic: LogisticModel,
    pub decision_threshold: f64,
}

impl SeverityModel {
    /// Names of the columns the logistic weights refer to.
    pub fn retained_names(&self) -> Vec<String> {
        self.standardizer.kept.iter().map(|&j| self.feature_names[j].clone()).collect()
    }

    /// Severe-risk probability of a record.
    pub fn predict_record(&self, encoder: &FeatureEncoder, record: &OutageRecord, geo: &GeoTable) -> Result<f64, SeverityError> {
        let raw = encoder.encode(record, geo)?;
        predict_proba(&self.logistic, &self.standardizer.transform_row(&raw))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCoefficient {
    pub feature: String,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoefficientRanking {
    /// Every coefficient, descending by signed value.
    pub all: Vec<RankedCoefficient>,
    /// Largest positive coefficients, strongest first.
    pub top_positive: Vec<RankedCoefficient>,
    /// Most negative coefficients, strongest first.
    pub top_negative: Vec<RankedCoefficient>,
}

pub fn coefficient_ranking(weights: &[f64], names: &[String], k: usize) -> CoefficientRanking {
    let mut all: Vec<RankedCoefficient> = names
        .iter()
        .zip(weights)
        .map(|(n, w)| RankedCoefficient {
            feature: n.clone(),
            coefficient: *w,
        })
        .collect();
    all.sort_by(|a, b| b.coefficient.total_cmp(&a.coefficient).then_with(|| a.feature.cmp(&b.feature)));
    let top_positive = all.iter().filter(|c| c.coefficient > 0.0).take(k).cloned().collect();
    let top_negative = all.iter().rev().filter(|c| c.coefficient < 0.0).take(k).cloned().collect();
    CoefficientRanking {
        all,
        top_positive,
        top_negative,
    }
}

/// Outputs of a full severity-model run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityRun {
    pub model: SeverityModel,
    pub evaluation: EvalReport,
    pub ranking: CoefficientRanking,
    pub train_size: usize,
    pub test_size: usize,
}

/// Labels, encodes, splits, fits and evaluates in one pass.
pub fn train_severity_model(
    records: &[OutageRecord],
    geo: &GeoTable,
    config: &SeverityConfig,
) -> Result<SeverityRun, SeverityError> {
    let (labeled, labeling) = label_severity(records)?;
    let encoder = FeatureEncoder::default();
    check_no_leakage(encoder.names().iter().map(String::as_str))?;
    let x_raw = encoder.encode_all(labeled.iter().map(|l| &l.record), geo)?;
    let y: Vec<bool> = labeled.iter().map(|l| l.severe).collect();

    let split = stratified_split(&y, config.train_fraction, config.seed)?;
    let x_train_raw = x_raw.select_rows(&split.train);
    let y_train: Vec<bool> = split.train.iter().map(|&i| y[i]).collect();
    let standardizer = Standardizer::fit(&x_train_raw);
    let x_train = standardizer.transform(&x_train_raw);

    let class_weights = if config.balanced_class_weights {
        ClassWeights::balanced(&y_train)?
    } else {
        ClassWeights::UNIFORM
    };
    let logistic = fit_logistic(
        &x_train,
        &y_train,
        class_weights,
        &LogisticConfig {
            l2_lambda: config.l2_lambda,
            tolerance: config.tolerance,
            max_iter: config.max_iter,
        },
    )?;

    let x_test = standardizer.transform(&x_raw.select_rows(&split.test));
    let y_test: Vec<bool> = split.test.iter().map(|&i| y[i]).collect();
    let scores = (0..x_test.rows)
        .map(|i| predict_proba(&logistic, x_test.row(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let evaluation = evaluate(&scores, &y_test, config.decision_threshold)?;

    let names = encoder.names().to_vec();
    let dropped_features = standardizer.dropped.iter().map(|&j| names[j].clone()).collect();
    let model = SeverityModel {
        labeling,
        feature_names: names,
        dropped_features,
        standardizer,
        logistic,
        decision_threshold: config.decision_threshold,
    };
    let ranking = coefficient_ranking(&model.logistic.weights, &model.retained_names(), config.top_k);
    Ok(SeverityRun {
        model,
        evaluation,
        ranking,
        train_size: split.train.len(),
        test_size: split.test.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_orders_and_splits_by_sign() {
        let names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let r = coefficient_ranking(&[0.5, -1.0, 2.0, 0.0], &names, 5);
        let order: Vec<_> = r.all.iter().map(|c| c.feature.as_str()).collect();
        assert_eq!(order, ["c", "a", "d", "b"]);
        assert_eq!(r.top_positive.len(), 2);
        assert_eq!(r.top_negative[0].feature, "b");
    }

    #[test]
    fn zero_weights_give_empty_tops() {
        let names = vec!["x".to_string(), "y".to_string()];
        let r = coefficient_ranking(&[0.0, 0.0], &names, 3);
        assert!(r.top_positive.is_empty());
        assert!(r.top_negative.is_empty());
    }
}
