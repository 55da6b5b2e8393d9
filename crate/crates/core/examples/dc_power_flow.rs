//! DC power flow on the bundled IEEE 118-bus case; prints the most loaded
//! lines and the worst nodal balance residual.

use gridrisk::grid::{conservation_residuals, dc_power_flow, PowerCase};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = PowerCase::ieee118();
    let flow = dc_power_flow(&case)?;
    let mut order: Vec<usize> = (0..case.branches.len()).collect();
    order.sort_by(|&a, &b| flow.flows[b].abs().total_cmp(&flow.flows[a].abs()));
    println!("{} buses, {} branches, slack bus {}", case.buses.len(), case.branches.len(), case.slack);
    for &i in order.iter().take(10) {
        let br = &case.branches[i];
        println!("  line {:>3}  {:>3} -> {:>3}  {:>8.1} MW", br.id, br.from, br.to, flow.flows[i] * case.base_mva);
    }
    let worst = conservation_residuals(&case, &flow).into_iter().fold(0.0f64, |m, r| m.max(r.abs()));
    println!("max conservation residual {worst:.2e} pu");
    Ok(())
}
