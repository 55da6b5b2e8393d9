//! Write a seeded synthetic outage CSV in the raw input schema.
//!
//! cargo run --example synthetic_outages -- outages.csv [records] [seed]

use gridrisk::outage::synthetic::{write_synthetic_csv, SyntheticConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "outages.csv".into());
    let mut cfg = SyntheticConfig::default();
    if let Some(n) = args.next() {
        cfg.records = n.parse()?;
    }
    if let Some(s) = args.next() {
        cfg.seed = s.parse()?;
    }
    let file = std::fs::File::create(&path)?;
    write_synthetic_csv(std::io::BufWriter::new(file), &cfg)?;
    println!("wrote {} raw rows to {path} (seed {})", cfg.records, cfg.seed);
    Ok(())
}
