use serde::{Deserialize, Serialize};

use super::SeverityError;
use crate::outage::OutageRecord;

/// Parameters of the composite severity label, stored so scoring can be
/// reproduced exactly on new records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityLabeling {
    pub duration_min: f64,
    pub duration_max: f64,
    pub customers_min: f64,
    pub customers_max: f64,
    /// Scores at or above this value are severe.
    pub threshold: f64,
    pub severe_count: usize,
    pub total: usize,
}

impl SeverityLabeling {
    pub fn normalize_duration(&self, minutes: f64) -> f64 {
        (minutes - self.duration_min) / (self.duration_max - self.duration_min)
    }

    pub fn normalize_customers(&self, customers: f64) -> f64 {
        (customers - self.customers_min) / (self.customers_max - self.customers_min)
    }

    /// Mean of the min-max normalized duration and peak customers.
    pub fn score(&self, duration_minutes: f64, customers: f64) -> f64 {
        (self.normalize_duration(duration_minutes) + self.normalize_customers(customers)) / 2.0
    }

    pub fn is_severe(&self, score: f64) -> bool {
        score >= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub record: OutageRecord,
    pub norm_duration: f64,
    pub norm_customers: f64,
    pub score: f64,
    pub severe: bool,
}

/// Number of records in the top quartile: `ceil(n / 4)`.
pub fn top_quartile_count(n: usize) -> usize {
    n.div_ceil(4)
}

/// Labels the top quartile of composite severity scores as severe.
///
/// Records without a customer count are skipped. The threshold is the
/// `ceil(n/4)`-th largest score, so with distinct scores exactly that many
/// records are severe; ties at the threshold are all severe.
pub fn label_severity(records: &[OutageRecord]) -> Result<(Vec<LabeledRecord>, SeverityLabeling), SeverityError> {
    let usable: Vec<(&OutageRecord, f64)> = records
        .iter()
        .filter_map(|r| r.max_customers.map(|c| (r, c as f64)))
        .filter(|(r, _)| r.duration_minutes.is_finite())
        .collect();
    if usable.is_empty() {
        return Err(SeverityError::EmptyInput("no records with duration and customer counts"));
    }
    let (mut dmin, mut dmax, mut cmin, mut cmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (r, c) in &usable {
        dmin = dmin.min(r.duration_minutes);
        dmax = dmax.max(r.duration_minutes);
        cmin = cmin.min(*c);
        cmax = cmax.max(*c);
    }
    if dmax == dmin {
        return Err(SeverityError::DegenerateNormalization("duration"));
    }
    if cmax == cmin {
        return Err(SeverityError::DegenerateNormalization("max_customers"));
    }
    let mut labeling = SeverityLabeling {
        duration_min: dmin,
        duration_max: dmax,
        customers_min: cmin,
        customers_max: cmax,
        threshold: f64::NAN,
        severe_count: 0,
        total: usable.len(),
    };
    let scores: Vec<f64> = usable
        .iter()
        .map(|(r, c)| labeling.score(r.duration_minutes, *c))
        .collect();
    let mut sorted = scores.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    labeling.threshold = sorted[top_quartile_count(sorted.len()) - 1];

    let labeled: Vec<LabeledRecord> = usable
        .iter()
        .zip(scores)
        .map(|((r, c), score)| LabeledRecord {
            record: (*r).clone(),
            norm_duration: labeling.normalize_duration(r.duration_minutes),
            norm_customers: labeling.normalize_customers(*c),
            score,
            severe: labeling.is_severe(score),
        })
        .collect();
    labeling.severe_count = labeled.iter().filter(|l| l.severe).count();
    Ok((labeled, labeling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::EventCategory;
    use chrono::{TimeZone, Utc};

    fn rec(id: usize, duration: f64, customers: Option<u64>) -> OutageRecord {
        let start = Utc.with_ymd_and_hms(2018, 3, 1, 0, 0, 0).unwrap();
        OutageRecord {
            event_id: format!("r{id}"),
            raw_event_type: "Severe Weather".into(),
            category: EventCategory::SevereWeather,
            state: "TX".into(),
            start_time: start,
            end_time: start,
            duration_minutes: duration,
            max_customers: customers,
            year: 2018,
        }
    }

    #[test]
    fn eight_distinct_scores_two_severe() {
        let rs: Vec<_> = (0..8).map(|i| rec(i, (i * 10) as f64, Some((i * i) as u64 + 1))).collect();
        let (labeled, params) = label_severity(&rs).unwrap();
        // brute force: sort scores, top ceil(8/4) = 2
        let mut scores: Vec<f64> = labeled.iter().map(|l| l.score).collect();
        scores.sort_by(|a, b| b.total_cmp(a));
        let severe_ids: Vec<_> = labeled.iter().filter(|l| l.severe).map(|l| l.record.event_id.as_str()).collect();
        assert_eq!(severe_ids, ["r6", "r7"]);
        assert_eq!(params.severe_count, 2);
        assert_eq!(params.threshold, scores[1]);
    }

    #[test]
    fn extremes_score_one() {
        let rs = vec![rec(0, 0.0, Some(0)), rec(1, 100.0, Some(1000)), rec(2, 50.0, Some(10))];
        let (labeled, _) = label_severity(&rs).unwrap();
        assert_eq!(labeled[1].score, 1.0);
        assert!(labeled[1].severe);
        assert_eq!(labeled[0].score, 0.0);
    }

    #[test]
    fn constant_duration_is_degenerate() {
        let rs = vec![rec(0, 5.0, Some(1)), rec(1, 5.0, Some(2))];
        assert!(matches!(label_severity(&rs), Err(SeverityError::DegenerateNormalization("duration"))));
    }

    #[test]
    fn records_without_customers_skipped() {
        let rs = vec![rec(0, 0.0, Some(0)), rec(1, 100.0, None), rec(2, 50.0, Some(10))];
        let (labeled, p) = label_severity(&rs).unwrap();
        assert_eq!(labeled.len(), 2);
        assert_eq!(p.total, 2);
    }

    #[test]
    fn ties_at_threshold_are_severe() {
        let rs: Vec<_> = (0..8).map(|i| rec(i, if i < 4 { 0.0 } else { 10.0 }, Some(if i < 4 { 0 } else { 10 }))).collect();
        let (labeled, p) = label_severity(&rs).unwrap();
        assert_eq!(labeled.iter().filter(|l| l.severe).count(), 4);
        assert_eq!(p.threshold, 1.0);
    }
}
