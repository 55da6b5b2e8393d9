//! Build the joint power-communication network from the bundled inputs and
//! print its census, the top-ranked substations and a few dependency rules.

use gridrisk::grid::JointNetwork;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = JointNetwork::default_network()?;
    println!("{} substations, {} entities", net.census.substations, net.census.total);
    for (kind, n) in &net.census.by_kind {
        println!("  {:<8} {n}", kind.as_str());
    }
    println!("most central substations:");
    for id in net.ranking.iter().take(5) {
        let s = net.substation(*id).expect("ranked substation exists");
        println!("  S{id:<4} buses {:?}  centrality {:.3} pu", s.buses, s.centrality);
    }
    println!("rules ({} total), first few:", net.rules.len());
    for line in net.rules_text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).take(6) {
        println!("  {line}");
    }
    Ok(())
}
