//! Descriptive statistics of a cleaned outage set: climate share, category
//! counts, annual climate counts and the most affected states.

use gridrisk::outage::synthetic::{synthetic_csv, SyntheticConfig};
use gridrisk::outage::{filter_study_window, parse_outage_reader, CategoryMapping, GeoTable, StudyWindow};
use gridrisk::stats::characterize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw = synthetic_csv(&SyntheticConfig { records: 8000, ..SyntheticConfig::default() });
    let records = filter_study_window(&parse_outage_reader(raw.as_bytes(), &CategoryMapping::default_mapping())?.records);
    let c = characterize(&records, &GeoTable::default_table(), StudyWindow::default(), 5)?;

    println!("{} records, {} climate ({:.1}%)", c.total_records, c.climate_records, 100.0 * c.climate_share);
    for (cat, n) in &c.category_counts {
        println!("  {:<22} {n}", cat.as_str());
    }
    println!("climate events per year:");
    for p in &c.annual_climate_counts.points {
        println!("  {} {}", p.year, p.value);
    }
    println!("top states: {:?}", c.top_states);
    if let (Some(coastal), Some(inland)) = (c.coastal_mean_customers, c.inland_mean_customers) {
        println!("mean peak customers, coastal {coastal:.0} vs inland {inland:.0}");
    }
    Ok(())
}
