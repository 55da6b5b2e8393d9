//! End-to-end pipeline in a scratch directory on a synthetic outage extract,
//! run twice to show the up-to-date skip.
//!
//! cargo run --example run_pipeline -- [work-dir]

use gridrisk::outage::synthetic::{write_synthetic_csv, SyntheticConfig};
use gridrisk::pipeline::{run, PipelineConfig, Stage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "pipeline-demo".into()));
    std::fs::create_dir_all(&dir)?;
    write_synthetic_csv(std::fs::File::create(dir.join("outages.csv"))?, &SyntheticConfig::default())?;
    let cfg = PipelineConfig::from_toml_str(
        "out_dir = \"out\"\nseed = 42\n\n[inputs]\noutage_csv = \"outages.csv\"\n",
        &dir,
    )?;
    for pass in 1..=2 {
        println!("pass {pass}:");
        for r in run(&cfg, &Stage::ALL)? {
            println!("  {:<12} {:?} ({} outputs)", r.stage.as_str(), r.status, r.outputs.len());
        }
    }
    println!("artifacts under {}", dir.join("out").display());
    Ok(())
}
