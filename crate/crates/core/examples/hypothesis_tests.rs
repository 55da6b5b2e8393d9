//! Run the trend and two-sample hypothesis battery and print the table.

use gridrisk::outage::synthetic::{synthetic_csv, SyntheticConfig};
use gridrisk::outage::{parse_outage_reader, CategoryMapping, GeoTable};
use gridrisk::stats::{ols_fit, run_hypotheses, welch_t_test, HypothesisConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // the primitives on their own
    let fit = ols_fit(&[2015.0, 2016.0, 2017.0, 2018.0, 2019.0], &[40.0, 46.0, 49.0, 57.0, 60.0])?;
    println!("toy trend: slope {:.2}/yr, R2 {:.3}, p {:.4}", fit.slope, fit.r_squared, fit.p_value);
    let t = welch_t_test(&[10.0, 12.0, 14.0, 16.0], &[1.0, 2.0, 3.0, 4.0])?;
    println!("toy Welch: t {:.3}, df {:.2}, p {:.2e}\n", t.t, t.df, t.p_value);

    let raw = synthetic_csv(&SyntheticConfig { records: 8000, ..SyntheticConfig::default() });
    let records = parse_outage_reader(raw.as_bytes(), &CategoryMapping::default_mapping())?.records;
    let report = run_hypotheses(&records, &GeoTable::default_table(), &HypothesisConfig::default())?;
    print!("{}", report.to_text());
    Ok(())
}
