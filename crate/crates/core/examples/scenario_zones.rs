//! Show how each scenario's affected zone and T0 failure set are derived.

use gridrisk::grid::{JointNetwork, Layer};
use gridrisk::scenario::{build_scenario, default_scenarios, scope_to_count};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = JointNetwork::default_network()?;
    let total = net.substations.len();
    for s in default_scenarios() {
        let initial = build_scenario(&s, &net)?;
        println!(
            "{}: {:.0}% of {total} -> {} substations (zone {}), {} entities at T0 (power {}, comm {})",
            s.name,
            100.0 * s.affected_fraction,
            scope_to_count(s.affected_fraction, total),
            initial.substations.len(),
            initial.len(),
            initial.has_layer(Layer::Power),
            initial.has_layer(Layer::Communication),
        );
        let kinds: Vec<String> = initial.by_kind.iter().map(|(k, n)| format!("{}={n}", k.as_str())).collect();
        println!("    {}", kinds.join(" "));
    }
    Ok(())
}
