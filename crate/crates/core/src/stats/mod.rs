//! Descriptive outage characterization and the hypothesis-test harness,
//! built on from-scratch OLS and two-sample t-tests.

mod descriptive;
mod hypotheses;
mod ols;
pub mod special;
mod ttest;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use descriptive::{annual_counts, annual_mean, category_counts, climate_share, top_states, AnnualPoint, AnnualSeries};
pub use hypotheses::{
    comparison_samples, run_hypotheses, CompareMetric, Expectation, HypothesisConfig, HypothesisReport, HypothesisRow,
    HypothesisSpec, HypothesisTest, Outcome, Statistic, TrendMetric,
};
pub use ols::{ols_fit, OlsResult};
pub use ttest::{pooled_t_test, t_test, welch_t_test, TTestKind, TTestResult};

use crate::outage::{classify_region, EventCategory, GeoTable, OutageError, OutageRecord, StudyWindow};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("regressor is constant")]
    DegenerateRegressor,
    #[error("test statistic undefined: {0}")]
    UndefinedStatistic(String),
    #[error("{0}")]
    EmptyInput(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Outage(#[from] OutageError),
    #[error("{id}: {source}")]
    Hypothesis {
        id: String,
        #[source]
        source: Box<StatsError>,
    },
}

/// Descriptive summary of a cleaned record set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Characterization {
    pub total_records: usize,
    pub climate_records: usize,
    pub climate_share: f64,
    pub category_counts: BTreeMap<EventCategory, usize>,
    pub annual_climate_counts: AnnualSeries,
    pub top_states: Vec<(String, usize)>,
    /// Mean peak customers of climate events in coastal states.
    pub coastal_mean_customers: Option<f64>,
    pub inland_mean_customers: Option<f64>,
    /// Share of Severe Weather records located in coastal states.
    pub coastal_severe_weather_share: Option<f64>,
}

pub fn characterize(
    records: &[OutageRecord],
    geo: &GeoTable,
    window: StudyWindow,
    top_k: usize,
) -> Result<Characterization, StatsError> {
    let climate: Vec<OutageRecord> = records.iter().filter(|r| r.is_climate()).cloned().collect();
    let (mut c_sum, mut c_n, mut i_sum, mut i_n) = (0.0, 0usize, 0.0, 0usize);
    let (mut sw_coastal, mut sw_total) = (0usize, 0usize);
    for r in &climate {
        let coastal = classify_region(&r.state, geo)?.coastal;
        if r.category == EventCategory::SevereWeather {
            sw_total += 1;
            sw_coastal += usize::from(coastal);
        }
        if let Some(c) = r.max_customers {
            if coastal {
                c_sum += c as f64;
                c_n += 1;
            } else {
                i_sum += c as f64;
                i_n += 1;
            }
        }
    }
    let mean = |s: f64, n: usize| (n > 0).then(|| s / n as f64);
    Ok(Characterization {
        total_records: records.len(),
        climate_records: climate.len(),
        climate_share: climate_share(records)?,
        category_counts: category_counts(records),
        annual_climate_counts: annual_counts(records, |r| r.is_climate(), window),
        top_states: top_states(&climate, top_k),
        coastal_mean_customers: mean(c_sum, c_n),
        inland_mean_customers: mean(i_sum, i_n),
        coastal_severe_weather_share: (sw_total > 0).then(|| sw_coastal as f64 / sw_total as f64),
    })
}

#[cfg(test)]
pub(crate) mod test_support {
    use chrono::{TimeZone, Utc};

    use crate::outage::{EventCategory, OutageRecord};

    pub fn record(id: &str, category: EventCategory, state: &str, year: i32, customers: u64) -> OutageRecord {
        let start = Utc.with_ymd_and_hms(year, 7, 1, 12, 0, 0).unwrap();
        OutageRecord {
            event_id: id.into(),
            raw_event_type: category.as_str().into(),
            category,
            state: state.into(),
            start_time: start,
            end_time: start + chrono::Duration::minutes(90),
            duration_minutes: 90.0,
            max_customers: Some(customers),
            year,
        }
    }
}
