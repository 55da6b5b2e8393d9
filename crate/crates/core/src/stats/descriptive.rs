use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::outage::{EventCategory, OutageRecord, StudyWindow};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnualPoint {
    pub year: i32,
    pub value: f64,
}

/// One value per year, years strictly increasing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnnualSeries {
    pub points: Vec<AnnualPoint>,
}

impl AnnualSeries {
    pub fn years(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.year as f64).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn value(&self, year: i32) -> Option<f64> {
        self.points.iter().find(|p| p.year == year).map(|p| p.value)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Drops years with no defined value (NaN).
    pub fn defined(&self) -> AnnualSeries {
        AnnualSeries {
            points: self.points.iter().copied().filter(|p| p.value.is_finite()).collect(),
        }
    }
}

/// Count of matching records per year of the window, zero-filled.
pub fn annual_counts<F>(records: &[OutageRecord], predicate: F, window: StudyWindow) -> AnnualSeries
where
    F: Fn(&OutageRecord) -> bool,
{
    let mut counts: BTreeMap<i32, usize> = window.years().map(|y| (y, 0)).collect();
    for r in records.iter().filter(|r| predicate(r)) {
        if let Some(c) = counts.get_mut(&r.year) {
            *c += 1;
        }
    }
    AnnualSeries {
        points: counts
            .into_iter()
            .map(|(year, c)| AnnualPoint { year, value: c as f64 })
            .collect(),
    }
}

/// Per-year mean of `metric` over matching records; years where the metric is
/// never defined get NaN.
pub fn annual_mean<F, M>(records: &[OutageRecord], predicate: F, metric: M, window: StudyWindow) -> AnnualSeries
where
    F: Fn(&OutageRecord) -> bool,
    M: Fn(&OutageRecord) -> Option<f64>,
{
    let mut acc: BTreeMap<i32, (f64, usize)> = window.years().map(|y| (y, (0.0, 0))).collect();
    for r in records.iter().filter(|r| predicate(r)) {
        if let (Some(slot), Some(v)) = (acc.get_mut(&r.year), metric(r)) {
            slot.0 += v;
            slot.1 += 1;
        }
    }
    AnnualSeries {
        points: acc
            .into_iter()
            .map(|(year, (sum, n))| AnnualPoint {
                year,
                value: if n == 0 { f64::NAN } else { sum / n as f64 },
            })
            .collect(),
    }
}

/// States ranked by record count, descending; ties alphabetical.
pub fn top_states(records: &[OutageRecord], k: usize) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(r.state.as_str()).or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().map(|(s, c)| (s.to_string(), c)).collect();
    // BTreeMap order is alphabetical and the sort is stable
    ranked.sort_by_key(|e| std::cmp::Reverse(e.1));
    ranked.truncate(k);
    ranked
}

pub fn climate_share(records: &[OutageRecord]) -> Result<f64, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyInput("climate share of an empty record set"));
    }
    let climate = records.iter().filter(|r| r.is_climate()).count();
    Ok(climate as f64 / records.len() as f64)
}

pub fn category_counts(records: &[OutageRecord]) -> BTreeMap<EventCategory, usize> {
    let mut out = BTreeMap::new();
    for r in records {
        *out.entry(r.category).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::test_support::record;

    #[test]
    fn empty_gives_nine_zeros() {
        let s = annual_counts(&[], |_| true, StudyWindow::default());
        assert_eq!(s.len(), 9);
        assert!(s.values().iter().all(|v| *v == 0.0));
        assert_eq!(s.points[0].year, 2015);
        assert_eq!(s.points[8].year, 2023);
    }

    #[test]
    fn counts_sum_to_climate_total() {
        let rs = vec![
            record("a", EventCategory::SevereWeather, "TX", 2015, 1),
            record("b", EventCategory::SevereWeather, "TX", 2015, 1),
            record("c", EventCategory::Vandalism, "TX", 2016, 1),
            record("d", EventCategory::WinterStorm, "MI", 2020, 1),
        ];
        let s = annual_counts(&rs, |r| r.is_climate(), StudyWindow::default());
        assert_eq!(s.value(2015), Some(2.0));
        assert_eq!(s.value(2016), Some(0.0));
        assert_eq!(s.values().iter().sum::<f64>(), 3.0);
    }

    #[test]
    fn top_states_single_state_and_ties() {
        let rs = vec![record("a", EventCategory::SevereWeather, "TX", 2015, 1)];
        assert_eq!(top_states(&rs, 3), vec![("TX".to_string(), 1)]);

        let rs = vec![
            record("a", EventCategory::SevereWeather, "TX", 2015, 1),
            record("b", EventCategory::SevereWeather, "FL", 2015, 1),
            record("c", EventCategory::SevereWeather, "MI", 2015, 1),
            record("d", EventCategory::SevereWeather, "MI", 2015, 1),
        ];
        let top = top_states(&rs, 3);
        let names: Vec<_> = top.iter().map(|t| t.0.as_str()).collect();
        assert_eq!(names, ["MI", "FL", "TX"]);
    }

    #[test]
    fn share_cases() {
        let all = vec![
            record("a", EventCategory::SevereWeather, "TX", 2015, 1),
            record("b", EventCategory::NaturalDisaster, "TX", 2015, 1),
        ];
        assert_eq!(climate_share(&all).unwrap(), 1.0);
        let mixed = vec![
            record("a", EventCategory::SevereWeather, "TX", 2015, 1),
            record("b", EventCategory::Vandalism, "TX", 2015, 1),
            record("c", EventCategory::Other, "TX", 2015, 1),
            record("d", EventCategory::SystemOperations, "TX", 2015, 1),
        ];
        assert_eq!(climate_share(&mixed).unwrap(), 0.25);
        assert!(climate_share(&[]).is_err());
    }

    #[test]
    fn annual_mean_nan_for_empty_year() {
        let rs = vec![
            record("a", EventCategory::SevereWeather, "TX", 2015, 10),
            record("b", EventCategory::SevereWeather, "TX", 2015, 30),
        ];
        let s = annual_mean(&rs, |_| true, |r| r.max_customers.map(|c| c as f64), StudyWindow::default());
        assert_eq!(s.value(2015), Some(20.0));
        assert!(s.value(2016).unwrap().is_nan());
        assert_eq!(s.defined().len(), 1);
    }
}
