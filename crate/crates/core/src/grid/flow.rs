use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::case::PowerCase;
use super::GridError;

/// Pivot magnitude, relative to the largest diagonal entry of B', below which
/// the susceptance matrix is treated as singular.
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcFlow {
    /// Voltage angles in radians, in case bus order; the slack angle is 0.
    pub angles: Vec<f64>,
    /// Signed branch flows in per unit, positive from `from` to `to`, in case branch order.
    pub flows: Vec<f64>,
}

/// Solves `B' θ = P` with the slack angle fixed at zero and returns
/// `(θ_from − θ_to) / x` for every branch.
pub fn dc_power_flow(case: &PowerCase) -> Result<DcFlow, GridError> {
    let index = case.bus_index();
    let slack = index[&case.slack];
    // reduced position of each bus (slack excluded)
    let reduced: Vec<Option<usize>> = (0..case.buses.len())
        .map(|i| match i.cmp(&slack) {
            std::cmp::Ordering::Less => Some(i),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(i - 1),
        })
        .collect();
    let n = case.buses.len() - 1;
    let mut b = DMatrix::<f64>::zeros(n, n);
    for br in &case.branches {
        let y = 1.0 / br.x;
        let (f, t) = (reduced[index[&br.from]], reduced[index[&br.to]]);
        if let Some(f) = f {
            b[(f, f)] += y;
        }
        if let Some(t) = t {
            b[(t, t)] += y;
        }
        if let (Some(f), Some(t)) = (f, t) {
            b[(f, t)] -= y;
            b[(t, f)] -= y;
        }
    }
    let p = DVector::from_iterator(
        n,
        case.buses.iter().enumerate().filter(|(i, _)| *i != slack).map(|(_, bus)| bus.injection),
    );

    let scale = b.diagonal().amax().max(f64::MIN_POSITIVE);
    let lu = b.lu();
    let u = lu.u();
    for k in 0..n {
        if u[(k, k)].abs() <= PIVOT_TOL * scale {
            let bus = case.buses.iter().enumerate().find(|(i, _)| reduced[*i] == Some(k)).map(|(_, b)| b.id);
            return Err(GridError::SingularMatrix {
                bus: bus.unwrap_or_default(),
                pivot: u[(k, k)],
            });
        }
    }
    let theta_red = lu.solve(&p).ok_or(GridError::SingularMatrix { bus: 0, pivot: 0.0 })?;
    let angles: Vec<f64> = reduced.iter().map(|r| r.map_or(0.0, |k| theta_red[k])).collect();
    let flows = case
        .branches
        .iter()
        .map(|br| (angles[index[&br.from]] - angles[index[&br.to]]) / br.x)
        .collect();
    Ok(DcFlow { angles, flows })
}

/// Per-bus mismatch `injection − Σ outgoing flow`, in case bus order.
pub fn conservation_residuals(case: &PowerCase, flow: &DcFlow) -> Vec<f64> {
    let index = case.bus_index();
    let mut net_out = vec![0.0; case.buses.len()];
    for (br, f) in case.branches.iter().zip(&flow.flows) {
        net_out[index[&br.from]] += f;
        net_out[index[&br.to]] -= f;
    }
    case.buses.iter().zip(net_out).map(|(b, out)| b.injection - out).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::case::{parse_case_str, Branch, Bus};
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_bus_single_line() {
        let c = parse_case_str("SLACK 2\nBUS\n1 1.0\n2 -1.0\nBRANCH\n1 1 2 0.1\n").unwrap();
        let f = dc_power_flow(&c).unwrap();
        assert_abs_diff_eq!(f.flows[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn triangle_hand_solution() {
        // A=1, B=2 (slack), C=3; equal reactances
        let c = parse_case_str("SLACK 2\nBUS\n1 1\n2 -1\n3 0\nBRANCH\n1 1 2 0.1\n2 1 3 0.1\n3 3 2 0.1\n").unwrap();
        let f = dc_power_flow(&c).unwrap();
        assert_abs_diff_eq!(f.flows[0], 2.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f.flows[1], 1.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f.flows[2], 1.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn ieee118_conserves_flow() {
        let c = PowerCase::ieee118();
        let f = dc_power_flow(&c).unwrap();
        let worst = conservation_residuals(&c, &f).into_iter().map(f64::abs).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn reversing_a_branch_negates_its_flow() {
        let c = PowerCase::ieee118();
        let f = dc_power_flow(&c).unwrap();
        let mut branches = c.branches.clone();
        let b0 = branches[5];
        branches[5] = Branch {
            from: b0.to,
            to: b0.from,
            ..b0
        };
        let buses: Vec<Bus> = c.buses.clone();
        let r = PowerCase::new(c.base_mva, c.slack, buses, branches).unwrap();
        let g = dc_power_flow(&r).unwrap();
        assert_abs_diff_eq!(g.flows[5], -f.flows[5], epsilon = 1e-10);
        assert_abs_diff_eq!(g.flows[0], f.flows[0], epsilon = 1e-10);
    }

    #[test]
    fn singular_names_bus() {
        // huge reactance makes bus 3 numerically detached
        let c = parse_case_str("SLACK 1\nBUS\n1 0\n2 0\n3 0\nBRANCH\n1 1 2 1\n2 2 3 1e300\n").unwrap();
        match dc_power_flow(&c) {
            Err(GridError::SingularMatrix { bus, .. }) => assert_eq!(bus, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
