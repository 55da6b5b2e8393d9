//! Simulate the bundled scenarios and write every report format to a directory.
//!
//! cargo run --example emit_reports -- [out-dir]

use gridrisk::grid::JointNetwork;
use gridrisk::metrics::{emit_report, simulate_all, ReportFormat};
use gridrisk::scenario::default_scenarios;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "report".into()));
    let net = JointNetwork::default_network()?;
    let reports: Vec<_> = simulate_all(&net, &default_scenarios())?.into_iter().map(|o| o.report).collect();
    for path in emit_report(&reports, &dir, &ReportFormat::ALL)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
