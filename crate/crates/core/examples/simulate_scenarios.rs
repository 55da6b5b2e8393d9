//! Run the four bundled scenarios on the default joint network and print the
//! cascade results table.

use gridrisk::grid::JointNetwork;
use gridrisk::metrics::{render_table, simulate_all};
use gridrisk::scenario::default_scenarios;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let network = JointNetwork::default_network()?;
    let outcomes = simulate_all(&network, &default_scenarios())?;
    let reports: Vec<_> = outcomes.iter().map(|o| o.report.clone()).collect();
    print!("{}", render_table(&reports));
    println!();
    for o in &outcomes {
        let r = &o.report;
        println!(
            "{}: zone {} substations, direct {}, propagated {}, failed-only {}",
            r.scenario, r.zone_substations, r.direct, r.propagated, r.affected_failed_only
        );
        for (kind, c) in &r.breakdown {
            println!(
                "    {:<8} initial {:>3}  failed {:>3}  degraded {:>3}  of {:>3}",
                kind.as_str(),
                r.initial_breakdown[kind],
                c.failed,
                c.degraded,
                c.population
            );
        }
    }
    Ok(())
}
