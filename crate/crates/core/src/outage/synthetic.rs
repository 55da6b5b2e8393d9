//! Deterministic synthetic outage extracts in the canonical CSV schema.
//!
//! The generator mimics the broad shape of national outage data (rising
//! climate-outage counts, Severe Weather dominance, heavy-tailed customer
//! impact, a coastal severity premium) so the whole pipeline can be exercised
//! without the real extract. It also injects a small share of defective rows.

use std::io::Write;

use chrono::{Duration, TimeZone, Utc};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use super::ingest::format_timestamp;
use super::{GeoTable, OutageError, REQUIRED_COLUMNS};

#[derive(Debug, Clone, Copy)]
pub struct SyntheticConfig {
    pub records: usize,
    pub seed: u64,
    /// Fraction of rows written with a defect (bad timestamp, negative duration).
    pub defect_rate: f64,
    /// Fraction of rows with an empty customer count.
    pub missing_customers_rate: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            records: 5_000,
            seed: 2015,
            defect_rate: 0.004,
            missing_customers_rate: 0.02,
        }
    }
}

struct RawKind {
    raw: &'static str,
    weight: f64,
    /// Log-scale shift of the customer distribution.
    impact: f64,
    duration: f64,
    peak_months: &'static [u32],
}

const KINDS: &[RawKind] = &[
    RawKind { raw: "Severe Weather", weight: 0.40, impact: 1.1, duration: 0.5, peak_months: &[5, 6, 7, 8] },
    RawKind { raw: "Severe Weather - Thunderstorms", weight: 0.22, impact: 1.0, duration: 0.4, peak_months: &[6, 7, 8] },
    RawKind { raw: "Winter Storm", weight: 0.09, impact: 0.7, duration: 0.6, peak_months: &[12, 1, 2] },
    RawKind { raw: "Natural Disaster", weight: 0.05, impact: 0.3, duration: 0.3, peak_months: &[8, 9, 10] },
    RawKind { raw: "Wildfire", weight: 0.04, impact: 0.2, duration: 0.4, peak_months: &[7, 8, 9, 10] },
    RawKind { raw: "Vandalism", weight: 0.05, impact: -0.8, duration: -0.3, peak_months: &[] },
    RawKind { raw: "System Operations", weight: 0.06, impact: -0.2, duration: -0.5, peak_months: &[] },
    RawKind { raw: "Transmission Interruption", weight: 0.05, impact: 0.1, duration: -0.4, peak_months: &[] },
    RawKind { raw: "Fuel Supply Emergency", weight: 0.01, impact: -0.5, duration: 0.2, peak_months: &[] },
    RawKind { raw: "Unknown", weight: 0.025, impact: -0.4, duration: 0.0, peak_months: &[] },
    RawKind { raw: "Equipment Failure", weight: 0.005, impact: -0.6, duration: -0.2, peak_months: &[] },
];

const HOT_STATES: &[(&str, f64)] = &[("TX", 14.0), ("MI", 10.0), ("FL", 9.0), ("CA", 8.5), ("NC", 7.0)];

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [(T, f64)]) -> &'a T {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut x = rng.random::<f64>() * total;
    for (item, w) in items {
        if x < *w {
            return item;
        }
        x -= w;
    }
    &items[items.len() - 1].0
}

fn year_weight(year: i32) -> f64 {
    match year {
        2014 | 2024 => 0.5,
        2021 => 10.5,
        y => 1.0 + 0.95 * (y - 2015) as f64,
    }
}

/// Writes `config.records` synthetic rows (plus header) to `writer`.
pub fn write_synthetic_csv<W: Write>(writer: W, config: &SyntheticConfig) -> Result<(), OutageError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let geo = GeoTable::default_table();
    let states: Vec<(String, f64)> = geo
        .iter()
        .map(|g| {
            let w = HOT_STATES
                .iter()
                .find(|(s, _)| *s == g.state)
                .map(|(_, w)| *w)
                .unwrap_or(if g.coastal { 1.6 } else { 1.0 });
            (g.state.clone(), w)
        })
        .collect();
    let years: Vec<(i32, f64)> = (2014..=2024).map(|y| (y, year_weight(y))).collect();
    let kinds: Vec<(usize, f64)> = KINDS.iter().enumerate().map(|(i, k)| (i, k.weight)).collect();
    let base_customers = LogNormal::new(6.2, 1.5).expect("valid lognormal");
    let base_duration = LogNormal::new(5.0, 1.0).expect("valid lognormal");

    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REQUIRED_COLUMNS)?;
    for n in 0..config.records {
        let kind = &KINDS[*pick(&mut rng, &kinds)];
        let state = pick(&mut rng, &states).clone();
        let year = *pick(&mut rng, &years);
        let month = if !kind.peak_months.is_empty() && rng.random::<f64>() < 0.7 {
            kind.peak_months[rng.random_range(0..kind.peak_months.len())]
        } else {
            rng.random_range(1..=12)
        };
        let day = rng.random_range(1..=28);
        let start = Utc
            .with_ymd_and_hms(year, month, day, rng.random_range(0..24), rng.random_range(0..60), 0)
            .single()
            .expect("valid date");
        let coastal = geo.get(&state).is_some_and(|g| g.coastal);
        let duration = (base_duration.sample(&mut rng) * kind.duration.exp()).round().max(1.0);
        let customers = base_customers.sample(&mut rng) * (kind.impact + if coastal { 0.45 } else { 0.0 }).exp();
        let end = start + Duration::minutes(duration as i64);

        let mut start_s = format_timestamp(&start);
        let mut duration_s = format!("{duration}");
        let end_s = if rng.random::<f64>() < 0.1 { String::new() } else { format_timestamp(&end) };
        let customers_s = if rng.random::<f64>() < config.missing_customers_rate {
            String::new()
        } else {
            format!("{}", customers.round() as u64)
        };
        if rng.random::<f64>() < config.defect_rate {
            if rng.random::<bool>() {
                start_s = "not-a-time".into();
            } else {
                duration_s = format!("-{duration}");
            }
        }
        w.write_record([
            format!("EV{n:07}").as_str(),
            kind.raw,
            &state,
            &start_s,
            &end_s,
            &duration_s,
            &customers_s,
        ])?;
    }
    w.flush().map_err(|e| OutageError::Csv(e.into()))?;
    Ok(())
}

/// Convenience wrapper returning the CSV as a string.
pub fn synthetic_csv(config: &SyntheticConfig) -> String {
    let mut buf = Vec::new();
    write_synthetic_csv(&mut buf, config).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::{parse_outage_reader, CategoryMapping};

    #[test]
    fn deterministic_and_parseable() {
        let cfg = SyntheticConfig {
            records: 800,
            ..Default::default()
        };
        let a = synthetic_csv(&cfg);
        assert_eq!(a, synthetic_csv(&cfg));
        let report = parse_outage_reader(a.as_bytes(), &CategoryMapping::default_mapping()).unwrap();
        assert_eq!(report.records.len() + report.rejects.len(), 800);
        let climate = report.records.iter().filter(|r| r.is_climate()).count() as f64;
        let share = climate / report.records.len() as f64;
        assert!((0.7..0.9).contains(&share), "{share}");
        assert!(report.unmapped.get("Equipment Failure").copied().unwrap_or(0) > 0);
    }
}
