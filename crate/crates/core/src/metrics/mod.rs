//! Cascade outcome metrics and report emission.

mod report;
mod svg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Entity, EntityKind, GridError, JointNetwork};
use crate::miim::{CascadeTrace, State, DEGRADED, FAILED, OPERATIONAL};
use crate::scenario::{build_scenario, InitialFailureSet, Scenario, ScenarioError, ScenarioReference};

pub use report::{emit_report, render_all, render_csv, render_json, render_svgs, render_table, ReportFormat};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("operability is undefined for an empty network")]
    EmptyNetwork,
    #[error("no reports to emit")]
    NoReports,
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// O = (1/N) Σ state/2.
pub fn operability(states: &[State]) -> Result<f64, MetricsError> {
    if states.is_empty() {
        return Err(MetricsError::EmptyNetwork);
    }
    let sum: u64 = states.iter().map(|&s| s as u64).sum();
    Ok(sum as f64 / (2.0 * states.len() as f64))
}

pub fn resilience_gap(o: f64) -> f64 {
    1.0 - o
}

/// Entities whose final state differs from the all-operational baseline,
/// clamped initial failures included.
pub fn total_affected(trace: &CascadeTrace) -> usize {
    trace.final_states().iter().filter(|&&s| s != OPERATIONAL).count()
}

/// Entities that end failed (degraded ones excluded).
pub fn failed_count(trace: &CascadeTrace) -> usize {
    trace.final_states().iter().filter(|&&s| s == FAILED).count()
}

/// (direct, propagated): the clamp set and everything else that changed.
pub fn decompose_direct_vs_cascade(trace: &CascadeTrace) -> (usize, usize) {
    let direct = trace.clamped.len();
    (direct, total_affected(trace) - direct)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KindCounts {
    pub population: usize,
    pub failed: usize,
    pub degraded: usize,
}

impl KindCounts {
    pub fn operational(&self) -> usize {
        self.population - self.failed - self.degraded
    }
}

pub fn breakdown_by_kind(states: &[State], entities: &[Entity]) -> BTreeMap<EntityKind, KindCounts> {
    let mut out: BTreeMap<EntityKind, KindCounts> = EntityKind::ALL.iter().map(|k| (*k, KindCounts::default())).collect();
    for (s, e) in states.iter().zip(entities) {
        let c = out.get_mut(&e.kind).unwrap();
        c.population += 1;
        match *s {
            FAILED => c.failed += 1,
            DEGRADED => c.degraded += 1,
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceReport {
    pub scenario: String,
    pub initial_failed: usize,
    pub cascade_depth: usize,
    pub operability: f64,
    pub resilience_gap: f64,
    pub total_affected: usize,
    pub affected_failed_only: usize,
    pub breakdown: BTreeMap<EntityKind, KindCounts>,
    pub initial_breakdown: BTreeMap<EntityKind, usize>,
    pub direct: usize,
    pub propagated: usize,
    pub zone_substations: usize,
    pub reference: ScenarioReference,
}

impl ResilienceReport {
    pub fn from_trace(
        scenario: &str,
        trace: &CascadeTrace,
        entities: &[Entity],
        initial: &InitialFailureSet,
        reference: ScenarioReference,
    ) -> Result<Self, MetricsError> {
        let o = operability(trace.final_states())?;
        let (direct, propagated) = decompose_direct_vs_cascade(trace);
        Ok(Self {
            scenario: scenario.to_string(),
            initial_failed: trace.clamped.len(),
            cascade_depth: trace.depth,
            operability: o,
            resilience_gap: resilience_gap(o),
            total_affected: total_affected(trace),
            affected_failed_only: failed_count(trace),
            breakdown: breakdown_by_kind(trace.final_states(), entities),
            initial_breakdown: initial.by_kind.clone(),
            direct,
            propagated,
            zone_substations: initial.substations.len(),
            reference,
        })
    }
}

/// Everything produced for one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub scenario: Scenario,
    pub initial: InitialFailureSet,
    pub trace: CascadeTrace,
    pub report: ResilienceReport,
}

pub fn simulate_scenario(network: &JointNetwork, scenario: &Scenario) -> Result<ScenarioOutcome, MetricsError> {
    let initial = build_scenario(scenario, network)?;
    let trace = network.cascade(&initial.entities)?;
    let report = ResilienceReport::from_trace(&scenario.name, &trace, &network.entities, &initial, scenario.reference)?;
    Ok(ScenarioOutcome { scenario: scenario.clone(), initial, trace, report })
}

pub fn simulate_all(network: &JointNetwork, scenarios: &[Scenario]) -> Result<Vec<ScenarioOutcome>, MetricsError> {
    scenarios.iter().map(|s| simulate_scenario(network, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miim::{cascade, parse_rules, RuleSet};

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("e{i}")).collect()
    }

    #[test]
    fn operability_cases() {
        assert_eq!(operability(&[2; 446]).unwrap(), 1.0);
        let mut half = vec![2u8; 223];
        half.extend(vec![0u8; 223]);
        assert_eq!(operability(&half).unwrap(), 0.5);
        assert!(operability(&[]).is_err());
        assert_eq!(resilience_gap(1.0), 0.0);
        assert!((resilience_gap(0.4753) - 0.5247).abs() < 1e-12);
        assert!((resilience_gap(0.1760) - 0.8240).abs() < 1e-12);
    }

    #[test]
    fn chain_of_three_all_affected() {
        let rules = RuleSet::link(&ids(3), &parse_rules("e0 <- hard: e1\ne1 <- hard: e2").unwrap()).unwrap();
        let t = cascade(&rules, &[2]).unwrap();
        assert_eq!(total_affected(&t), 3);
        assert_eq!(decompose_direct_vs_cascade(&t), (1, 2));
    }

    #[test]
    fn no_rules() {
        let rules = RuleSet::link(&ids(4), &[]).unwrap();
        assert_eq!(total_affected(&cascade(&rules, &[]).unwrap()), 0);
        let t = cascade(&rules, &[1, 3]).unwrap();
        assert_eq!(decompose_direct_vs_cascade(&t), (2, 0));
    }

    #[test]
    fn degraded_counts_as_affected_not_failed() {
        let rules = RuleSet::link(&ids(2), &parse_rules("e0 <- soft: e1").unwrap()).unwrap();
        let t = cascade(&rules, &[1]).unwrap();
        assert_eq!(total_affected(&t), 2);
        assert_eq!(failed_count(&t), 1);
    }

    #[test]
    fn kind_breakdown() {
        let entities = vec![
            Entity { id: "pmu_1".into(), kind: EntityKind::Pmu, home_substation: 1 },
            Entity { id: "bus_1".into(), kind: EntityKind::Bus, home_substation: 1 },
        ];
        let b = breakdown_by_kind(&[2, 2], &entities);
        assert!(b.values().all(|c| c.failed == 0 && c.degraded == 0));
        let b = breakdown_by_kind(&[0, 2], &entities);
        assert_eq!(b[&EntityKind::Pmu].failed, 1);
        assert_eq!(b.values().map(|c| c.failed).sum::<usize>(), 1);
        assert_eq!(b[&EntityKind::Bus].operational(), 1);
    }
}
