//! Label severe outages, train the class-weighted logistic model and print
//! held-out metrics and the strongest coefficients.

use gridrisk::outage::synthetic::{synthetic_csv, SyntheticConfig};
use gridrisk::outage::{filter_study_window, parse_outage_reader, CategoryMapping, GeoTable};
use gridrisk::severity::{train_severity_model, SeverityConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw = synthetic_csv(&SyntheticConfig { records: 10_000, ..SyntheticConfig::default() });
    let records = filter_study_window(&parse_outage_reader(raw.as_bytes(), &CategoryMapping::default_mapping())?.records);
    let climate: Vec<_> = records.into_iter().filter(|r| r.is_climate() && r.max_customers.is_some()).collect();

    let run = train_severity_model(&climate, &GeoTable::default_table(), &SeverityConfig::default())?;
    println!("severity threshold {:.4} (train {}, test {})", run.model.labeling.threshold, run.train_size, run.test_size);
    print!("{}", run.evaluation.to_text());
    println!("raises severe risk:");
    for c in &run.ranking.top_positive {
        println!("  {:<28} {:+.3}", c.feature, c.coefficient);
    }
    println!("lowers severe risk:");
    for c in &run.ranking.top_negative {
        println!("  {:<28} {:+.3}", c.feature, c.coefficient);
    }
    Ok(())
}
