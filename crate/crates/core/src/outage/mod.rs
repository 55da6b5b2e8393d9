//! Outage record ingestion: CSV parsing, category standardization, geographic
//! grouping and study-window filtering.

mod category;
mod geo;
mod ingest;
pub mod synthetic;

use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use category::{standardize_category, CategoryMapping, EventCategory};
pub use geo::{classify_region, CensusRegion, GeoGroup, GeoTable};
pub use ingest::{
    parse_outage_csv, parse_outage_reader, write_records_csv, read_records_csv, IngestReport, RowIssue,
    REQUIRED_COLUMNS,
};

#[derive(Debug, Error)]
pub enum OutageError {
    #[error("outage CSV is missing required column `{0}`")]
    MissingColumn(String),
    #[error("unknown state code `{0}`")]
    UnknownState(String),
    #[error("unknown event category `{0}`")]
    UnknownCategory(String),
    #[error("{0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl OutageError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        OutageError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One cleaned outage event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageRecord {
    pub event_id: String,
    pub raw_event_type: String,
    pub category: EventCategory,
    pub state: String,
    pub start_time: DateTime<Utc>,
    pub end_time: DateTime<Utc>,
    pub duration_minutes: f64,
    /// `None` when the source row had no customer count. Such rows still count
    /// toward frequency analyses but are skipped by severity analyses.
    pub max_customers: Option<u64>,
    pub year: i32,
}

impl OutageRecord {
    pub fn is_climate(&self) -> bool {
        self.category.is_climate()
    }

    pub fn month(&self) -> u32 {
        self.start_time.month()
    }
}

/// Inclusive range of calendar years kept for analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyWindow {
    pub first_year: i32,
    pub last_year: i32,
}

impl Default for StudyWindow {
    /// 2015 through 2023; 2014 is a partial year in the source data.
    fn default() -> Self {
        Self {
            first_year: 2015,
            last_year: 2023,
        }
    }
}

impl StudyWindow {
    pub fn contains(&self, year: i32) -> bool {
        (self.first_year..=self.last_year).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.first_year..=self.last_year
    }

    pub fn len(&self) -> usize {
        (self.last_year - self.first_year + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn filter_window(records: &[OutageRecord], window: StudyWindow) -> Vec<OutageRecord> {
    records.iter().filter(|r| window.contains(r.year)).cloned().collect()
}

/// Keeps records whose year lies in the default 2015–2023 window.
pub fn filter_study_window(records: &[OutageRecord]) -> Vec<OutageRecord> {
    filter_window(records, StudyWindow::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn rec(year: i32) -> OutageRecord {
        let start = Utc.with_ymd_and_hms(year, 6, 1, 0, 0, 0).unwrap();
        OutageRecord {
            event_id: format!("e{year}"),
            raw_event_type: "Severe Weather".into(),
            category: EventCategory::SevereWeather,
            state: "TX".into(),
            start_time: start,
            end_time: start,
            duration_minutes: 0.0,
            max_customers: Some(1),
            year,
        }
    }

    #[test]
    fn window_edges() {
        let out = filter_study_window(&[rec(2014), rec(2015), rec(2023), rec(2024)]);
        let years: Vec<_> = out.iter().map(|r| r.year).collect();
        assert_eq!(years, vec![2015, 2023]);
    }

    #[test]
    fn window_is_idempotent() {
        let rs: Vec<_> = (2010..2030).map(rec).collect();
        let once = filter_study_window(&rs);
        assert_eq!(filter_study_window(&once), once);
        assert_eq!(once.len(), 9);
    }
}
