use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{standardize_category, CategoryMapping, EventCategory, OutageError, OutageRecord};

pub const REQUIRED_COLUMNS: [&str; 7] = [
    "event_id",
    "raw_event_type",
    "state",
    "start_time",
    "end_time",
    "duration_minutes",
    "max_customers",
];

/// Maximum disagreement, in minutes, tolerated between the duration column and
/// the timestamps before the row is flagged.
const DURATION_TOLERANCE_MIN: f64 = 1.0;

/// A row that was rejected or flagged during ingestion. `line` is the 1-based
/// line in the source file (the header is line 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowIssue {
    pub line: u64,
    pub event_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestReport {
    /// Parsed records ordered by `(start_time, event_id)`.
    pub records: Vec<OutageRecord>,
    pub rejects: Vec<RowIssue>,
    /// Rows kept with a correction applied (duration recomputed from timestamps).
    pub flagged: Vec<RowIssue>,
    /// Raw event types that fell through to `Other`, with counts.
    pub unmapped: BTreeMap<String, usize>,
    /// Kept rows without a customer count.
    pub missing_customers: usize,
}

impl IngestReport {
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "records": self.records.len(),
            "rejects": self.rejects,
            "flagged": self.flagged,
            "unmapped": self.unmapped,
            "missing_customers": self.missing_customers,
        })
    }
}

pub(crate) fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc());
        }
    }
    None
}

pub(crate) fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

struct Columns([usize; 7]);

impl Columns {
    fn from_headers(headers: &csv::StringRecord) -> Result<Self, OutageError> {
        let mut idx = [0usize; 7];
        for (slot, name) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
            *slot = headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| OutageError::MissingColumn(name.to_string()))?;
        }
        Ok(Columns(idx))
    }

    fn get<'r>(&self, row: &'r csv::StringRecord, which: usize) -> &'r str {
        row.get(self.0[which]).map(str::trim).unwrap_or("")
    }
}

enum RowOutcome {
    Kept(OutageRecord, Option<String>),
    Rejected(String),
}

fn parse_row(cols: &Columns, row: &csv::StringRecord, mapping: &CategoryMapping) -> RowOutcome {
    let event_id = cols.get(row, 0);
    let raw_event_type = cols.get(row, 1);
    let state = cols.get(row, 2).to_ascii_uppercase();
    if event_id.is_empty() {
        return RowOutcome::Rejected("empty event_id".into());
    }
    if state.len() != 2 || !state.chars().all(|c| c.is_ascii_alphabetic()) {
        return RowOutcome::Rejected(format!("invalid state code {state:?}"));
    }
    let Some(start_time) = parse_timestamp(cols.get(row, 3)) else {
        return RowOutcome::Rejected("unparseable start_time".into());
    };
    let end_raw = cols.get(row, 4);
    let end_time = if end_raw.is_empty() {
        None
    } else {
        match parse_timestamp(end_raw) {
            Some(t) => Some(t),
            None => return RowOutcome::Rejected("unparseable end_time".into()),
        }
    };
    let dur_raw = cols.get(row, 5);
    let duration = if dur_raw.is_empty() {
        None
    } else {
        match dur_raw.parse::<f64>() {
            Ok(d) if d.is_finite() => Some(d),
            _ => return RowOutcome::Rejected("unparseable duration".into()),
        }
    };
    let cust_raw = cols.get(row, 6);
    let max_customers = if cust_raw.is_empty() {
        None
    } else {
        match cust_raw.parse::<f64>() {
            Ok(c) if c.is_finite() && c >= 0.0 && c.fract() == 0.0 => Some(c as u64),
            Ok(c) if c.is_finite() && c < 0.0 => return RowOutcome::Rejected("negative max_customers".into()),
            _ => return RowOutcome::Rejected("unparseable max_customers".into()),
        }
    };

    if duration.is_some_and(|d| d < 0.0) {
        return RowOutcome::Rejected("negative duration".into());
    }

    let mut flag = None;
    let (end_time, duration_minutes) = match (end_time, duration) {
        (Some(end), dur) => {
            let from_stamps = (end - start_time).num_seconds() as f64 / 60.0;
            if from_stamps < 0.0 {
                return RowOutcome::Rejected("negative duration".into());
            }
            if let Some(d) = dur {
                if (d - from_stamps).abs() > DURATION_TOLERANCE_MIN {
                    flag = Some(format!(
                        "duration {d} min disagrees with timestamps ({from_stamps} min); timestamps used"
                    ));
                }
            }
            (end, from_stamps)
        }
        (None, Some(d)) => {
            let end = start_time + chrono::Duration::milliseconds((d * 60_000.0).round() as i64);
            (end, d)
        }
        (None, None) => return RowOutcome::Rejected("missing end_time and duration".into()),
    };

    RowOutcome::Kept(
        OutageRecord {
            event_id: event_id.to_string(),
            raw_event_type: raw_event_type.to_string(),
            category: standardize_category(raw_event_type, mapping),
            state,
            start_time,
            end_time,
            duration_minutes,
            max_customers,
            year: start_time.year(),
        },
        flag,
    )
}

/// Parses the canonical outage CSV from any reader.
pub fn parse_outage_reader<R: Read>(reader: R, mapping: &CategoryMapping) -> Result<IngestReport, OutageError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let cols = Columns::from_headers(rdr.headers()?)?;
    let mut report = IngestReport::default();
    let mut row = csv::StringRecord::new();
    let mut line = 1u64;
    loop {
        line += 1;
        match rdr.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                report.rejects.push(RowIssue {
                    line,
                    event_id: String::new(),
                    reason: format!("malformed row: {e}"),
                });
                continue;
            }
        }
        let event_id = cols.get(&row, 0).to_string();
        match parse_row(&cols, &row, mapping) {
            RowOutcome::Kept(rec, flag) => {
                if mapping.lookup(&rec.raw_event_type).is_none() {
                    *report.unmapped.entry(rec.raw_event_type.clone()).or_default() += 1;
                }
                if rec.max_customers.is_none() {
                    report.missing_customers += 1;
                }
                if let Some(reason) = flag {
                    report.flagged.push(RowIssue {
                        line,
                        event_id,
                        reason,
                    });
                }
                report.records.push(rec);
            }
            RowOutcome::Rejected(reason) => report.rejects.push(RowIssue { line, event_id, reason }),
        }
    }
    report
        .records
        .sort_by(|a, b| a.start_time.cmp(&b.start_time).then_with(|| a.event_id.cmp(&b.event_id)));
    Ok(report)
}

/// Parses an outage CSV file. Malformed rows are reported in
/// [`IngestReport::rejects`], never dropped silently.
pub fn parse_outage_csv(path: impl AsRef<Path>, mapping: &CategoryMapping) -> Result<IngestReport, OutageError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| OutageError::io(path, e))?;
    parse_outage_reader(std::io::BufReader::new(file), mapping)
}

#[derive(Serialize, Deserialize)]
struct CleanRow {
    event_id: String,
    raw_event_type: String,
    category: EventCategory,
    state: String,
    start_time: String,
    end_time: String,
    duration_minutes: f64,
    max_customers: Option<u64>,
}

/// Writes cleaned records (canonical columns plus `category`).
pub fn write_records_csv<W: Write>(writer: W, records: &[OutageRecord]) -> Result<(), OutageError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(CleanRow {
            event_id: r.event_id.clone(),
            raw_event_type: r.raw_event_type.clone(),
            category: r.category,
            state: r.state.clone(),
            start_time: format_timestamp(&r.start_time),
            end_time: format_timestamp(&r.end_time),
            duration_minutes: r.duration_minutes,
            max_customers: r.max_customers,
        })?;
    }
    w.flush().map_err(|e| OutageError::Csv(e.into()))?;
    Ok(())
}

/// Reads records written by [`write_records_csv`].
pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<OutageRecord>, OutageError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<CleanRow>() {
        let row = row?;
        let start_time = parse_timestamp(&row.start_time)
            .ok_or_else(|| OutageError::Config(format!("bad start_time in cleaned records: {}", row.start_time)))?;
        let end_time = parse_timestamp(&row.end_time)
            .ok_or_else(|| OutageError::Config(format!("bad end_time in cleaned records: {}", row.end_time)))?;
        out.push(OutageRecord {
            event_id: row.event_id,
            raw_event_type: row.raw_event_type,
            category: row.category,
            state: row.state,
            start_time,
            end_time,
            duration_minutes: row.duration_minutes,
            max_customers: row.max_customers,
            year: start_time.year(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "event_id,raw_event_type,state,start_time,end_time,duration_minutes,max_customers\n";

    fn parse(body: &str) -> IngestReport {
        let text = format!("{HEADER}{body}");
        parse_outage_reader(text.as_bytes(), &CategoryMapping::default_mapping()).unwrap()
    }

    #[test]
    fn three_valid_rows() {
        let r = parse(
            "a,Severe Weather,TX,2016-05-01T10:00:00Z,2016-05-01T12:00:00Z,120,5000\n\
             b,Vandalism,CO,2017-01-02T00:00:00Z,2017-01-02T00:30:00Z,30,10\n\
             c,Winter Storm,MI,2018-02-03T05:00:00Z,2018-02-03T06:00:00Z,60,250\n",
        );
        assert_eq!(r.records.len(), 3);
        assert!(r.rejects.is_empty());
        assert!(r.flagged.is_empty());
        assert_eq!(r.records[0].year, 2016);
        assert_eq!(r.records[2].category, EventCategory::WinterStorm);
    }

    #[test]
    fn negative_duration_rejected() {
        let r = parse(
            "a,Severe Weather,TX,2016-05-01T10:00:00Z,,120,5000\n\
             b,Severe Weather,TX,2016-05-01T10:00:00Z,,-5,5000\n\
             c,Severe Weather,TX,2016-05-01T10:00:00Z,,60,5000\n",
        );
        assert_eq!(r.records.len(), 2);
        assert_eq!(r.rejects.len(), 1);
        assert_eq!(r.rejects[0].reason, "negative duration");
        assert_eq!(r.rejects[0].line, 3);
        assert_eq!(r.rejects[0].event_id, "b");
    }

    #[test]
    fn end_before_start_is_negative_duration() {
        let r = parse("a,Severe Weather,TX,2016-05-01T10:00:00Z,2016-05-01T09:00:00Z,,1\n");
        assert_eq!(r.rejects[0].reason, "negative duration");
    }

    #[test]
    fn bad_timestamp_is_row_level() {
        let r = parse(
            "a,Severe Weather,TX,yesterday,2016-05-01T12:00:00Z,120,5000\n\
             b,Severe Weather,TX,2016-05-01T10:00:00Z,2016-05-01T12:00:00Z,120,5000\n",
        );
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.rejects[0].reason, "unparseable start_time");
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "event_id,raw_event_type,state,start_time,end_time,duration_minutes\n";
        match parse_outage_reader(text.as_bytes(), &CategoryMapping::new()) {
            Err(OutageError::MissingColumn(c)) => assert_eq!(c, "max_customers"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn timestamps_win_over_duration() {
        let r = parse("a,Severe Weather,TX,2016-05-01T10:00:00Z,2016-05-01T12:00:00Z,60,5000\n");
        assert_eq!(r.records[0].duration_minutes, 120.0);
        assert_eq!(r.flagged.len(), 1);
        // within one minute: no flag
        let r = parse("a,Severe Weather,TX,2016-05-01T10:00:00Z,2016-05-01T12:00:00Z,120.5,5000\n");
        assert!(r.flagged.is_empty());
    }

    #[test]
    fn missing_customers_retained() {
        let r = parse("a,Severe Weather,TX,2016-05-01T10:00:00Z,2016-05-01T12:00:00Z,120,\n");
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].max_customers, None);
        assert_eq!(r.missing_customers, 1);
    }

    #[test]
    fn unmapped_counted() {
        let r = parse(
            "a,Squirrel,TX,2016-05-01T10:00:00Z,,1,1\n\
             b,Squirrel,TX,2016-05-01T11:00:00Z,,1,1\n",
        );
        assert_eq!(r.unmapped.get("Squirrel"), Some(&2));
        assert!(r.records.iter().all(|x| x.category == EventCategory::Other));
    }

    #[test]
    fn output_sorted_by_start_then_id() {
        let r = parse(
            "z,Severe Weather,TX,2016-05-01T10:00:00Z,,1,1\n\
             a,Severe Weather,TX,2016-05-01T10:00:00Z,,1,1\n\
             m,Severe Weather,TX,2015-05-01T10:00:00Z,,1,1\n",
        );
        let ids: Vec<_> = r.records.iter().map(|x| x.event_id.as_str()).collect();
        assert_eq!(ids, ["m", "a", "z"]);
    }

    #[test]
    fn cleaned_csv_round_trip() {
        let r = parse(
            "a,Severe Weather,TX,2016-05-01T10:00:00Z,2016-05-01T12:00:00Z,120,5000\n\
             b,Hail,CO,2017-01-02T00:00:00Z,,30.5,\n",
        );
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &r.records).unwrap();
        let back = read_records_csv(buf.as_slice()).unwrap();
        assert_eq!(back, r.records);
    }
}
