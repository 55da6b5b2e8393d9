use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::descriptive::{annual_counts, annual_mean, AnnualSeries};
use super::ols::{ols_fit, OlsResult};
use super::ttest::{t_test, TTestKind, TTestResult};
use super::StatsError;
use crate::outage::{classify_region, GeoTable, OutageRecord, StudyWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendMetric {
    /// Annual count of climate-related outages.
    ClimateCount,
    /// Annual share of climate outages with customers at or above the major-outage cutoff.
    MajorOutageShare,
    /// Annual mean duration (minutes) of climate outages.
    MeanDuration,
    /// Annual mean peak customers of climate outages.
    MeanCustomers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMetric {
    /// Per-state mean annual climate-outage count, coastal vs inland states.
    StateAnnualFrequency,
    /// Event-level peak customers of climate outages, coastal vs inland.
    EventCustomers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "metric", rename_all = "snake_case")]
pub enum HypothesisTest {
    Trend(TrendMetric),
    Compare(CompareMetric),
}

/// What outcome counts as support for the hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Significant positive slope.
    Increase,
    /// Significant negative slope.
    Decrease,
    /// No significant slope (stability / weak trend).
    Stable,
    /// Coastal mean significantly greater than inland.
    Greater,
    /// Coastal mean significantly lower than inland.
    Less,
    /// No significant difference.
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSpec {
    pub id: String,
    pub label: String,
    pub test: HypothesisTest,
    pub expectation: Expectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HypothesisConfig {
    pub alpha: f64,
    /// Peak-customer cutoff defining a major outage.
    pub major_outage_customers: u64,
    pub t_test: TTestKind,
    pub window: StudyWindow,
    pub hypotheses: Vec<HypothesisSpec>,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        let spec = |id: &str, label: &str, test, expectation| HypothesisSpec {
            id: id.into(),
            label: label.into(),
            test,
            expectation,
        };
        Self {
            alpha: 0.05,
            major_outage_customers: 50_000,
            t_test: TTestKind::Welch,
            window: StudyWindow::default(),
            hypotheses: vec![
                spec(
                    "H1(a)",
                    "Frequency increased over time",
                    HypothesisTest::Trend(TrendMetric::ClimateCount),
                    Expectation::Increase,
                ),
                spec(
                    "H1(b)",
                    "Major-outage proportion remained stable",
                    HypothesisTest::Trend(TrendMetric::MajorOutageShare),
                    Expectation::Stable,
                ),
                spec(
                    "H1(c)",
                    "Average duration shows weak trend",
                    HypothesisTest::Trend(TrendMetric::MeanDuration),
                    Expectation::Stable,
                ),
                spec(
                    "H1(d)",
                    "Average severity shows weak trend",
                    HypothesisTest::Trend(TrendMetric::MeanCustomers),
                    Expectation::Stable,
                ),
                spec(
                    "H2(a)",
                    "Coastal frequency > inland",
                    HypothesisTest::Compare(CompareMetric::StateAnnualFrequency),
                    Expectation::Greater,
                ),
                spec(
                    "H2(b)",
                    "Coastal severity > inland",
                    HypothesisTest::Compare(CompareMetric::EventCustomers),
                    Expectation::Greater,
                ),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Supported,
    #[serde(rename = "Not Supported")]
    NotSupported,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Supported => "Supported",
            Outcome::NotSupported => "Not Supported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test")]
pub enum Statistic {
    #[serde(rename = "OLS")]
    Ols(OlsResult),
    #[serde(rename = "Two-sample t-test")]
    TTest {
        #[serde(flatten)]
        result: TTestResult,
        n_coastal: usize,
        n_inland: usize,
    },
}

impl Statistic {
    pub fn p_value(&self) -> f64 {
        match self {
            Statistic::Ols(r) => r.p_value,
            Statistic::TTest { result, .. } => result.p_value,
        }
    }

    fn test_name(&self) -> &'static str {
        match self {
            Statistic::Ols(_) => "OLS",
            Statistic::TTest { .. } => "Two-sample t-test",
        }
    }

    fn key_statistic(&self) -> String {
        match self {
            Statistic::Ols(r) => format!("β = {}, R² = {:.3}", fmt_sig(r.slope), r.r_squared),
            Statistic::TTest { result, .. } => {
                let p = if result.p_value < 0.001 {
                    "p < 0.001".to_string()
                } else {
                    format!("p = {:.3}", result.p_value)
                };
                format!("t = {:.2}, {p}", result.t)
            }
        }
    }
}

fn fmt_sig(v: f64) -> String {
    let a = v.abs();
    if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.4}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRow {
    pub name: String,
    pub label: String,
    pub expectation: Expectation,
    pub statistic: Statistic,
    pub p: f64,
    pub alpha: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub alpha: f64,
    pub major_outage_customers: u64,
    pub t_test: TTestKind,
    pub window: StudyWindow,
    pub rows: Vec<HypothesisRow>,
}

impl HypothesisReport {
    pub fn row(&self, name: &str) -> Option<&HypothesisRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text summary table, one row per hypothesis.
    pub fn to_text(&self) -> String {
        let header = ["Hypothesis", "Test", "Key Statistic", "Outcome"];
        let body: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    format!("{}: {}", r.name, r.label),
                    r.statistic.test_name().to_string(),
                    r.statistic.key_statistic(),
                    r.outcome.as_str().to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(|h| h.chars().count());
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "HYPOTHESIS TESTING RESULTS, {}-{} (ALPHA = {}; major outage >= {} customers)",
            self.window.first_year, self.window.last_year, self.alpha, self.major_outage_customers
        );
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &header.map(String::from));
        line(&mut out, &widths.map(|w| "-".repeat(w)));
        for row in &body {
            line(&mut out, row);
        }
        out
    }
}

fn decide(expectation: Expectation, stat: &Statistic, alpha: f64) -> Outcome {
    let (direction, p) = match stat {
        Statistic::Ols(r) => (r.slope, r.p_value),
        Statistic::TTest { result, .. } => (result.t, result.p_value),
    };
    let significant = p < alpha;
    let supported = match expectation {
        Expectation::Increase | Expectation::Greater => significant && direction > 0.0,
        Expectation::Decrease | Expectation::Less => significant && direction < 0.0,
        Expectation::Stable | Expectation::Equal => !significant,
    };
    if supported {
        Outcome::Supported
    } else {
        Outcome::NotSupported
    }
}

fn trend_series(records: &[OutageRecord], metric: TrendMetric, config: &HypothesisConfig) -> AnnualSeries {
    let climate = |r: &OutageRecord| r.is_climate();
    let w = config.window;
    match metric {
        TrendMetric::ClimateCount => annual_counts(records, climate, w),
        TrendMetric::MajorOutageShare => {
            let cutoff = config.major_outage_customers;
            annual_mean(
                records,
                climate,
                |r| r.max_customers.map(|c| if c >= cutoff { 1.0 } else { 0.0 }),
                w,
            )
        }
        TrendMetric::MeanDuration => annual_mean(records, climate, |r| Some(r.duration_minutes), w),
        TrendMetric::MeanCustomers => annual_mean(records, climate, |r| r.max_customers.map(|c| c as f64), w),
    }
    .defined()
}

/// Coastal and inland samples for a comparison metric.
pub fn comparison_samples(
    records: &[OutageRecord],
    geo: &GeoTable,
    metric: CompareMetric,
    window: StudyWindow,
) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    let mut coastal = Vec::new();
    let mut inland = Vec::new();
    match metric {
        CompareMetric::StateAnnualFrequency => {
            let states: BTreeSet<&str> = records.iter().map(|r| r.state.as_str()).collect();
            let mut per_state: BTreeMap<&str, usize> = states.iter().map(|s| (*s, 0)).collect();
            for r in records.iter().filter(|r| r.is_climate() && window.contains(r.year)) {
                *per_state.get_mut(r.state.as_str()).expect("state collected above") += 1;
            }
            let years = window.len().max(1) as f64;
            for (state, count) in per_state {
                let group = classify_region(state, geo)?;
                let v = count as f64 / years;
                if group.coastal {
                    coastal.push(v);
                } else {
                    inland.push(v);
                }
            }
        }
        CompareMetric::EventCustomers => {
            for r in records.iter().filter(|r| r.is_climate() && window.contains(r.year)) {
                let Some(c) = r.max_customers else { continue };
                if classify_region(&r.state, geo)?.coastal {
                    coastal.push(c as f64);
                } else {
                    inland.push(c as f64);
                }
            }
        }
    }
    Ok((coastal, inland))
}

fn run_one(
    spec: &HypothesisSpec,
    records: &[OutageRecord],
    geo: &GeoTable,
    config: &HypothesisConfig,
) -> Result<HypothesisRow, StatsError> {
    let statistic = match spec.test {
        HypothesisTest::Trend(metric) => {
            let series = trend_series(records, metric, config);
            Statistic::Ols(ols_fit(&series.years(), &series.values())?)
        }
        HypothesisTest::Compare(metric) => {
            let (coastal, inland) = comparison_samples(records, geo, metric, config.window)?;
            Statistic::TTest {
                result: t_test(&coastal, &inland, config.t_test)?,
                n_coastal: coastal.len(),
                n_inland: inland.len(),
            }
        }
    };
    Ok(HypothesisRow {
        name: spec.id.clone(),
        label: spec.label.clone(),
        expectation: spec.expectation,
        p: statistic.p_value(),
        alpha: config.alpha,
        outcome: decide(spec.expectation, &statistic, config.alpha),
        statistic,
    })
}

/// Runs every configured hypothesis. Errors are labeled with the hypothesis id.
pub fn run_hypotheses(
    records: &[OutageRecord],
    geo: &GeoTable,
    config: &HypothesisConfig,
) -> Result<HypothesisReport, StatsError> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(StatsError::InvalidConfig(format!("alpha must lie in (0, 1), got {}", config.alpha)));
    }
    let rows = config
        .hypotheses
        .iter()
        .map(|spec| {
            run_one(spec, records, geo, config).map_err(|e| StatsError::Hypothesis {
                id: spec.id.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HypothesisReport {
        alpha: config.alpha,
        major_outage_customers: config.major_outage_customers,
        t_test: config.t_test,
        window: config.window,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::EventCategory;
    use crate::stats::test_support::record;

    fn flat_fixture() -> Vec<OutageRecord> {
        let mut rs = Vec::new();
        let mut n = 0;
        for year in 2015..=2023 {
            for (i, state) in ["TX", "FL", "CO", "NV", "MI", "AZ"].iter().enumerate() {
                for _ in 0..=i {
                    n += 1;
                    let customers = 1000 + (n as u64 * 37 + year as u64 * 11) % 500;
                    rs.push(record(&format!("e{n}"), EventCategory::SevereWeather, state, year, customers));
                }
            }
        }
        rs
    }

    #[test]
    fn flat_counts_do_not_support_increase() {
        let report = run_hypotheses(&flat_fixture(), &GeoTable::default_table(), &HypothesisConfig::default()).unwrap();
        assert_eq!(report.rows.len(), 6);
        let h1a = report.row("H1(a)").unwrap();
        assert_eq!(h1a.outcome, Outcome::NotSupported);
        match &h1a.statistic {
            Statistic::Ols(r) => assert_eq!(r.slope, 0.0),
            _ => panic!("expected OLS"),
        }
    }

    #[test]
    fn identical_severity_samples_not_supported() {
        let mut rs = Vec::new();
        for (i, c) in [100u64, 200, 300, 400].iter().enumerate() {
            rs.push(record(&format!("c{i}"), EventCategory::SevereWeather, "FL", 2016, *c));
            rs.push(record(&format!("i{i}"), EventCategory::SevereWeather, "CO", 2016, *c));
        }
        let cfg = HypothesisConfig {
            hypotheses: HypothesisConfig::default().hypotheses.into_iter().filter(|h| h.id == "H2(b)").collect(),
            ..Default::default()
        };
        let report = run_hypotheses(&rs, &GeoTable::default_table(), &cfg).unwrap();
        let row = &report.rows[0];
        match &row.statistic {
            Statistic::TTest { result, .. } => assert_eq!(result.t, 0.0),
            _ => panic!("expected t-test"),
        }
        assert_eq!(row.outcome, Outcome::NotSupported);
    }

    #[test]
    fn rising_counts_supported() {
        let mut rs = Vec::new();
        let mut n = 0;
        for year in 2015..=2023 {
            for _ in 0..(10 * (year - 2014)) {
                n += 1;
                rs.push(record(&format!("e{n}"), EventCategory::SevereWeather, "TX", year, 10));
            }
        }
        let cfg = HypothesisConfig {
            hypotheses: HypothesisConfig::default().hypotheses[..1].to_vec(),
            ..Default::default()
        };
        let report = run_hypotheses(&rs, &GeoTable::default_table(), &cfg).unwrap();
        assert_eq!(report.rows[0].outcome, Outcome::Supported);
        assert!(report.to_text().contains("H1(a): Frequency increased over time"));
    }

    #[test]
    fn errors_are_labeled() {
        let rs = vec![record("x", EventCategory::SevereWeather, "ZZ", 2016, 1)];
        let cfg = HypothesisConfig {
            hypotheses: HypothesisConfig::default().hypotheses[4..5].to_vec(),
            ..Default::default()
        };
        let err = run_hypotheses(&rs, &GeoTable::default_table(), &cfg).unwrap_err();
        assert!(err.to_string().contains("H2(a)"), "{err}");
    }

    #[test]
    fn alpha_validated() {
        let cfg = HypothesisConfig {
            alpha: 1.5,
            ..Default::default()
        };
        assert!(run_hypotheses(&flat_fixture(), &GeoTable::default_table(), &cfg).is_err());
    }

    #[test]
    fn json_has_required_fields() {
        let report = run_hypotheses(&flat_fixture(), &GeoTable::default_table(), &HypothesisConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let row = &v["rows"][0];
        for key in ["name", "statistic", "p", "alpha", "outcome"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["rows"][5]["statistic"]["test"], "Two-sample t-test");
    }
}
