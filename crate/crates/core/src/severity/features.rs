use std::fmt;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::SeverityError;
use crate::outage::{classify_region, CensusRegion, EventCategory, GeoTable, OutageRecord};

/// Meteorological season of the event start month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Fall,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Winter, Season::Spring, Season::Summer, Season::Fall];

    /// DJF / MAM / JJA / SON.
    pub fn from_month(month: u32) -> Season {
        match month {
            12 | 1 | 2 => Season::Winter,
            3..=5 => Season::Spring,
            6..=8 => Season::Summer,
            _ => Season::Fall,
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Substrings that mark a column as derived from outage impact.
const LEAKY_NAMES: [&str; 3] = ["duration", "customer", "severity"];

/// Rejects any feature name that would leak the severity target.
pub fn check_no_leakage<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<(), SeverityError> {
    for name in names {
        let lower = name.to_ascii_lowercase();
        if LEAKY_NAMES.iter().any(|bad| lower.contains(bad)) {
            return Err(SeverityError::LeakyFeature(name.to_string()));
        }
    }
    Ok(())
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(cols: usize) -> Self {
        Self {
            rows: 0,
            cols,
            data: Vec::new(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(cols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.cols, "row width");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }

    pub fn select_rows(&self, idx: &[usize]) -> FeatureMatrix {
        let mut m = Self::new(self.cols);
        for &i in idx {
            m.push_row(self.row(i));
        }
        m
    }
}

/// One-hot event category, season, census region, season×region interactions,
/// a coastal indicator and the year. Impact variables are never encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    names: Vec<String>,
}

impl Default for FeatureEncoder {
    fn default() -> Self {
        let mut names = Vec::new();
        for c in EventCategory::ALL {
            names.push(format!("category:{c}"));
        }
        for s in Season::ALL {
            names.push(format!("season:{s}"));
        }
        for r in CensusRegion::ALL {
            names.push(format!("region:{r}"));
        }
        names.push("coastal".into());
        names.push("year".into());
        for s in Season::ALL {
            for r in CensusRegion::ALL {
                names.push(format!("season:{s}*region:{r}"));
            }
        }
        check_no_leakage(names.iter().map(String::as_str)).expect("default features are impact-free");
        Self { names }
    }
}

impl FeatureEncoder {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn encode(&self, record: &OutageRecord, geo: &GeoTable) -> Result<Vec<f64>, SeverityError> {
        let group = classify_region(&record.state, geo)?;
        let season = Season::from_month(record.start_time.month());
        let mut x = Vec::with_capacity(self.dim());
        x.extend(EventCategory::ALL.iter().map(|c| f64::from(u8::from(*c == record.category))));
        x.extend(Season::ALL.iter().map(|s| f64::from(u8::from(*s == season))));
        x.extend(CensusRegion::ALL.iter().map(|r| f64::from(u8::from(*r == group.census_region))));
        x.push(f64::from(u8::from(group.coastal)));
        x.push(record.year as f64);
        for s in Season::ALL {
            for r in CensusRegion::ALL {
                x.push(f64::from(u8::from(s == season && r == group.census_region)));
            }
        }
        debug_assert_eq!(x.len(), self.dim());
        Ok(x)
    }

    pub fn encode_all<'a>(
        &self,
        records: impl IntoIterator<Item = &'a OutageRecord>,
        geo: &GeoTable,
    ) -> Result<FeatureMatrix, SeverityError> {
        let mut m = FeatureMatrix::new(self.dim());
        for r in records {
            m.push_row(&self.encode(r, geo)?);
        }
        Ok(m)
    }
}

/// Training-set standardization. Zero-variance columns are dropped and recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    /// Indices of retained input columns.
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &FeatureMatrix) -> Self {
        let n = x.rows as f64;
        let (mut kept, mut dropped, mut means, mut stds) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for j in 0..x.cols {
            let mean = x.column(j).sum::<f64>() / n;
            let var = x.column(j).map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            if std > 1e-12 * mean.abs().max(1.0) {
                kept.push(j);
                means.push(mean);
                stds.push(std);
            } else {
                dropped.push(j);
            }
        }
        Self {
            kept,
            dropped,
            means,
            stds,
        }
    }

    pub fn dim(&self) -> usize {
        self.kept.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        self.kept
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&j, (m, s))| (row[j] - m) / s)
            .collect()
    }

    pub fn transform(&self, x: &FeatureMatrix) -> FeatureMatrix {
        let mut out = FeatureMatrix::new(self.dim());
        for i in 0..x.rows {
            out.push_row(&self.transform_row(x.row(i)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::test_support::record;

    #[test]
    fn seasons() {
        assert_eq!(Season::from_month(12), Season::Winter);
        assert_eq!(Season::from_month(2), Season::Winter);
        assert_eq!(Season::from_month(3), Season::Spring);
        assert_eq!(Season::from_month(8), Season::Summer);
        assert_eq!(Season::from_month(11), Season::Fall);
    }

    #[test]
    fn no_impact_columns() {
        let enc = FeatureEncoder::default();
        assert_eq!(enc.dim(), 10 + 4 + 4 + 1 + 1 + 16);
        assert!(enc
            .names()
            .iter()
            .all(|n| !n.contains("duration") && !n.contains("customer")));
        assert!(check_no_leakage(["year", "duration_minutes"]).is_err());
        assert!(check_no_leakage(["max_customers"]).is_err());
    }

    #[test]
    fn encoding_one_hot() {
        let enc = FeatureEncoder::default();
        let r = record("a", EventCategory::WinterStorm, "MI", 2019, 10);
        let x = enc.encode(&r, &GeoTable::default_table()).unwrap();
        let on: Vec<&str> = enc
            .names()
            .iter()
            .zip(&x)
            .filter(|(n, v)| **v == 1.0 && n.as_str() != "year")
            .map(|(n, _)| n.as_str())
            .collect();
        // July start in the test helper
        assert_eq!(
            on,
            ["category:WinterStorm", "season:Summer", "region:Midwest", "coastal", "season:Summer*region:Midwest"]
        );
        assert_eq!(x[enc.names().iter().position(|n| n == "year").unwrap()], 2019.0);
    }

    #[test]
    fn standardized_moments() {
        let x = FeatureMatrix::from_rows(&[
            vec![1.0, 5.0, 0.0],
            vec![2.0, 5.0, 1.0],
            vec![4.0, 5.0, 1.0],
            vec![9.0, 5.0, 0.0],
        ]);
        let s = Standardizer::fit(&x);
        assert_eq!(s.dropped, vec![1]);
        let z = s.transform(&x);
        for j in 0..z.cols {
            let mean = z.column(j).sum::<f64>() / 4.0;
            let var = z.column(j).map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-9);
        }
    }
}
