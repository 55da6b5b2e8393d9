//! Scenario rows and the initial failure sets they induce on a joint network.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Adjacency, Entity, EntityKind, JointNetwork, Layer, Substation};
use crate::outage::EventCategory;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario row {row}: {msg}")]
    Config { row: usize, msg: String },
    #[error("scenario file has no rows")]
    Empty,
    #[error("zone of {n} substations requested but the network has {total}")]
    Scope { n: usize, total: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Zone {
    Coastal,
    Inland,
}

impl FromStr for Zone {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coastal" => Ok(Zone::Coastal),
            "inland" => Ok(Zone::Inland),
            _ => Err(format!("unknown zone `{s}`")),
        }
    }
}

/// Severity percentile tier. Carried as metadata; the fraction is what drives
/// the zone size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Percentile {
    P75,
    P90,
}

impl FromStr for Percentile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p75" => Ok(Percentile::P75),
            "p90" => Ok(Percentile::P90),
            _ => Err(format!("unknown percentile tier `{s}`")),
        }
    }
}

impl fmt::Display for Percentile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Percentile::P75 => "p75",
            Percentile::P90 => "p90",
        })
    }
}

/// Published values a scenario can be compared against.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScenarioReference {
    pub substations: Option<usize>,
    pub initial_entities: Option<usize>,
    pub operability: Option<f64>,
    pub total_affected: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub event_type: EventCategory,
    pub zone: Zone,
    pub percentile: Percentile,
    pub affected_fraction: f64,
    pub reference: ScenarioReference,
}

#[derive(Deserialize)]
struct RawRow {
    name: String,
    event_type: String,
    zone: String,
    percentile: String,
    affected_fraction: f64,
    expected_substations: Option<usize>,
    expected_initial_entities: Option<usize>,
    reference_operability: Option<f64>,
    reference_total_affected: Option<usize>,
}

pub fn load_scenarios_reader<R: Read>(reader: R) -> Result<Vec<Scenario>, ScenarioError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out: Vec<Scenario> = Vec::new();
    for (i, row) in rdr.deserialize::<RawRow>().enumerate() {
        let row_no = i + 1;
        let bad = |msg: String| ScenarioError::Config { row: row_no, msg };
        let raw = row.map_err(|e| bad(e.to_string()))?;
        if raw.name.is_empty() {
            return Err(bad("empty name".into()));
        }
        if out.iter().any(|s| s.name == raw.name) {
            return Err(bad(format!("duplicate scenario `{}`", raw.name)));
        }
        let event_type: EventCategory = raw.event_type.parse().map_err(|_| bad(format!("unknown event type `{}`", raw.event_type)))?;
        if !event_type.is_climate() {
            return Err(bad(format!("event type {event_type} is not climate-related")));
        }
        let f = raw.affected_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(bad(format!("affected_fraction {f} is outside (0, 1]")));
        }
        out.push(Scenario {
            name: raw.name,
            event_type,
            zone: raw.zone.parse().map_err(bad)?,
            percentile: raw.percentile.parse().map_err(bad)?,
            affected_fraction: f,
            reference: ScenarioReference {
                substations: raw.expected_substations,
                initial_entities: raw.expected_initial_entities,
                operability: raw.reference_operability,
                total_affected: raw.reference_total_affected,
            },
        });
    }
    if out.is_empty() {
        return Err(ScenarioError::Empty);
    }
    Ok(out)
}

pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<Scenario>, ScenarioError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    load_scenarios_reader(file)
}

/// The four bundled scenarios S1 to S4.
pub fn default_scenarios() -> Vec<Scenario> {
    load_scenarios_reader(crate::data::SCENARIOS.as_bytes()).expect("bundled scenarios are valid")
}

/// round-half-up(fraction × total), at least 1.
pub fn scope_to_count(fraction: f64, total: usize) -> usize {
    let n = (fraction * total as f64 + 0.5).floor() as usize;
    n.max(1)
}

/// The first `n` substations of a centrality ranking.
pub fn select_affected_zone(ranking: &[u32], n: usize) -> Result<Vec<u32>, ScenarioError> {
    if n > ranking.len() {
        return Err(ScenarioError::Scope { n, total: ranking.len() });
    }
    Ok(ranking[..n].to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialFailureSet {
    pub scenario: String,
    /// Zone substations in ranking order.
    pub substations: Vec<u32>,
    /// Failed entity ids in network order.
    pub entities: Vec<String>,
    pub by_kind: BTreeMap<EntityKind, usize>,
}

impl InitialFailureSet {
    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn has_layer(&self, layer: Layer) -> bool {
        self.by_kind.iter().any(|(k, n)| k.layer() == layer && *n > 0)
    }
}

/// Entities failed at T0: everything homed in the zone, plus S-ADMs and OADMs
/// whose home lies within the adjacency distance (inclusive) of a zone substation.
pub fn initial_failures(
    zone: &[u32],
    substations: &[Substation],
    entities: &[Entity],
    adjacency: &Adjacency,
) -> Vec<usize> {
    let zone_set: BTreeSet<u32> = zone.iter().copied().collect();
    let by_id: BTreeMap<u32, &Substation> = substations.iter().map(|s| (s.id, s)).collect();
    let zone_subs: Vec<&Substation> = zone.iter().filter_map(|id| by_id.get(id).copied()).collect();
    let near = |home: u32, limit: f64| {
        by_id
            .get(&home)
            .is_some_and(|h| zone_subs.iter().any(|z| h.distance_km(z) <= limit))
    };
    entities
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            zone_set.contains(&e.home_substation)
                || match e.kind {
                    EntityKind::Sadm => near(e.home_substation, adjacency.sadm_km),
                    EntityKind::Oadm => near(e.home_substation, adjacency.oadm_km),
                    _ => false,
                }
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn build_initial_failures(name: &str, zone: &[u32], network: &JointNetwork) -> InitialFailureSet {
    let idx = initial_failures(zone, &network.substations, &network.entities, &network.overlay.adjacency);
    let mut by_kind: BTreeMap<EntityKind, usize> = EntityKind::ALL.iter().map(|k| (*k, 0)).collect();
    for &i in &idx {
        *by_kind.get_mut(&network.entities[i].kind).unwrap() += 1;
    }
    InitialFailureSet {
        scenario: name.to_string(),
        substations: zone.to_vec(),
        entities: idx.iter().map(|&i| network.entities[i].id.clone()).collect(),
        by_kind,
    }
}

/// Zone selection and initial failures for one scenario.
pub fn build_scenario(scenario: &Scenario, network: &JointNetwork) -> Result<InitialFailureSet, ScenarioError> {
    let n = scope_to_count(scenario.affected_fraction, network.substations.len());
    let zone = select_affected_zone(&network.ranking, n)?;
    Ok(build_initial_failures(&scenario.name, &zone, network))
}

#[derive(Serialize)]
struct ScenarioReportRow<'a> {
    scenario: &'a Scenario,
    zone_size: usize,
    initial_entities: usize,
    by_kind: &'a BTreeMap<EntityKind, usize>,
    substations: &'a [u32],
    entities: &'a [String],
}

/// JSON listing each scenario's zone, per-kind T0 counts and failed ids.
pub fn scenarios_json(rows: &[(Scenario, InitialFailureSet)]) -> String {
    let out: Vec<ScenarioReportRow> = rows
        .iter()
        .map(|(s, f)| ScenarioReportRow {
            scenario: s,
            zone_size: f.substations.len(),
            initial_entities: f.len(),
            by_kind: &f.by_kind,
            substations: &f.substations,
            entities: &f.entities,
        })
        .collect();
    serde_json::to_string_pretty(&out).expect("scenario report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rounding() {
        assert_eq!(scope_to_count(0.20, 107), 21);
        assert_eq!(scope_to_count(0.35, 107), 37);
        assert_eq!(scope_to_count(0.15, 107), 16);
        assert_eq!(scope_to_count(0.25, 107), 27);
        assert_eq!(scope_to_count(0.001, 107), 1);
        assert_eq!(scope_to_count(1.0, 107), 107);
        assert_eq!(scope_to_count(0.5, 3), 2);
    }

    #[test]
    fn default_rows() {
        let s = default_scenarios();
        let fr: Vec<f64> = s.iter().map(|s| s.affected_fraction).collect();
        assert_eq!(fr, vec![0.20, 0.35, 0.15, 0.25]);
        assert_eq!(s[2].event_type, EventCategory::NaturalDisaster);
        assert_eq!(s[2].zone, Zone::Inland);
        assert_eq!(s[3].percentile, Percentile::P90);
        for sc in &s {
            assert_eq!(Some(scope_to_count(sc.affected_fraction, 107)), sc.reference.substations);
        }
    }

    #[test]
    fn fifth_row_and_bad_fraction() {
        let mut text = crate::data::SCENARIOS.to_string();
        text.push_str("S5: Test,WinterStorm,Inland,p75,0.5,,,,\n");
        assert_eq!(load_scenarios_reader(text.as_bytes()).unwrap().len(), 5);
        let bad = "name,event_type,zone,percentile,affected_fraction\nX,SevereWeather,Coastal,p75,0\n";
        assert!(matches!(load_scenarios_reader(bad.as_bytes()), Err(ScenarioError::Config { row: 1, .. })));
        let bad = "name,event_type,zone,percentile,affected_fraction\nX,Vandalism,Coastal,p75,0.2\n";
        assert!(load_scenarios_reader(bad.as_bytes()).is_err());
    }

    #[test]
    fn zone_selection() {
        let ranking = [4, 9, 1, 7];
        assert_eq!(select_affected_zone(&ranking, 2).unwrap(), vec![4, 9]);
        assert_eq!(select_affected_zone(&ranking, 4).unwrap(), ranking.to_vec());
        assert!(select_affected_zone(&ranking, 5).is_err());
    }

    fn sub(id: u32, x: f64) -> Substation {
        Substation { id, buses: vec![id], x_km: x, y_km: 0.0, centrality: 0.0 }
    }

    fn ent(id: &str, kind: EntityKind, home: u32) -> Entity {
        Entity { id: id.into(), kind, home_substation: home }
    }

    #[test]
    fn inclusive_distance_rule() {
        let subs = [sub(1, 0.0), sub(2, 35.0), sub(3, 35.000001), sub(4, 50.0), sub(5, 50.000001)];
        let entities = vec![
            ent("bus_1", EntityKind::Bus, 1),
            ent("srv_1", EntityKind::SubstationServer, 1),
            ent("gw_1", EntityKind::Gateway, 1),
            ent("sadm_1", EntityKind::Sadm, 2),
            ent("sadm_2", EntityKind::Sadm, 3),
            ent("oadm_1", EntityKind::Oadm, 4),
            ent("oadm_2", EntityKind::Oadm, 5),
            ent("srv_2", EntityKind::SubstationServer, 2),
        ];
        let adj = Adjacency { sadm_km: 35.0, oadm_km: 50.0 };
        let got = initial_failures(&[1], &subs, &entities, &adj);
        let ids: Vec<&str> = got.iter().map(|&i| entities[i].id.as_str()).collect();
        assert_eq!(ids, vec!["bus_1", "srv_1", "gw_1", "sadm_1", "oadm_1"]);
        assert!(initial_failures(&[], &subs, &entities, &adj).is_empty());
    }

    #[test]
    fn default_network_scenarios() {
        let net = JointNetwork::default_network().unwrap();
        let sets: Vec<InitialFailureSet> = default_scenarios().iter().map(|s| build_scenario(s, &net).unwrap()).collect();
        for f in &sets {
            assert_eq!(f.by_kind.values().sum::<usize>(), f.len());
            assert!(f.has_layer(Layer::Power) && f.has_layer(Layer::Communication));
        }
        let s1: BTreeSet<_> = sets[0].entities.iter().collect();
        let s2: BTreeSet<_> = sets[1].entities.iter().collect();
        assert!(s1.is_subset(&s2) && s1.len() < s2.len());
        assert_eq!(sets[1].substations.len(), 37);
    }
}
