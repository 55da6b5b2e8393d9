//! Parse a raw outage CSV and summarize what was kept, rejected and flagged.
//!
//! cargo run --example ingest_outages -- [outages.csv]
//!
//! Without an argument a seeded synthetic extract is used.

use gridrisk::outage::synthetic::{synthetic_csv, SyntheticConfig};
use gridrisk::outage::{filter_study_window, parse_outage_csv, parse_outage_reader, CategoryMapping};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mapping = CategoryMapping::default_mapping();
    let report = match std::env::args().nth(1) {
        Some(path) => parse_outage_csv(path, &mapping)?,
        None => parse_outage_reader(synthetic_csv(&SyntheticConfig::default()).as_bytes(), &mapping)?,
    };
    println!("kept {} records, rejected {}, flagged {}", report.records.len(), report.rejects.len(), report.flagged.len());
    println!("missing customer counts: {}", report.missing_customers);
    for issue in report.rejects.iter().take(5) {
        println!("  reject line {} ({}): {}", issue.line, issue.event_id, issue.reason);
    }
    for (raw, n) in &report.unmapped {
        println!("  unmapped event type {raw:?} x{n}");
    }
    println!("in study window: {}", filter_study_window(&report.records).len());
    Ok(())
}
