//! Parse a small dependency-rule text and cascade a failure through it.

use gridrisk::miim::{cascade, parse_rules, RuleSet};

const RULES: &str = "
# a gateway needs either router; the server needs its gateway
gw <- hard: r1 | r2
srv <- hard: gw
gw <- hard: srv
# the bus keeps running degraded without its server
bus <- soft: srv
pmu <- hard: srv & bus
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ids: Vec<String> = ["r1", "r2", "gw", "srv", "bus", "pmu"].map(String::from).to_vec();
    let rules = RuleSet::link(&ids, &parse_rules(RULES)?)?;
    for clamp in [vec!["r1"], vec!["r1", "r2"]] {
        let idx: Vec<usize> = clamp.iter().map(|id| rules.index_of(id).expect("known id")).collect();
        let trace = cascade(&rules, &idx)?;
        println!("fail {clamp:?}: depth {}", trace.depth);
        for (round, states) in trace.rounds.iter().enumerate() {
            let row: Vec<String> = ids.iter().zip(states).map(|(id, s)| format!("{id}={s}")).collect();
            println!("  t{round}: {}", row.join(" "));
        }
    }
    Ok(())
}
