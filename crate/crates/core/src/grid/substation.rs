use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::case::PowerCase;
use super::flow::DcFlow;
use super::GridError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Substation {
    pub id: u32,
    /// Member bus ids, ascending.
    pub buses: Vec<u32>,
    pub x_km: f64,
    pub y_km: f64,
    /// Sum of |flow| over lines touching any member bus, per unit.
    pub centrality: f64,
}

impl Substation {
    pub fn distance_km(&self, other: &Substation) -> f64 {
        ((self.x_km - other.x_km).powi(2) + (self.y_km - other.y_km).powi(2)).sqrt()
    }
}

/// bus id → substation id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubstationMapping(pub BTreeMap<u32, u32>);

#[derive(Deserialize)]
struct MappingRow {
    bus_id: u32,
    substation_id: u32,
}

impl SubstationMapping {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, GridError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut map = BTreeMap::new();
        for (i, row) in rdr.deserialize::<MappingRow>().enumerate() {
            let row = row.map_err(|e| GridError::Mapping(format!("row {}: {e}", i + 2)))?;
            if map.insert(row.bus_id, row.substation_id).is_some() {
                return Err(GridError::Mapping(format!("bus {} mapped twice", row.bus_id)));
            }
        }
        Ok(Self(map))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| GridError::io(path, e))?;
        Self::from_reader(file)
    }

    /// The bundled 107-substation grouping of the 118-bus case: eleven pairs of
    /// buses joined by transformers or very short lines share a substation.
    pub fn default_mapping() -> Self {
        Self::from_reader(crate::data::SUBSTATION_MAPPING.as_bytes()).expect("bundled mapping is valid")
    }

    /// One substation per bus, numbered by bus id.
    pub fn identity(case: &PowerCase) -> Self {
        Self(case.buses.iter().map(|b| (b.id, b.id)).collect())
    }
}

/// Partitions the case buses into substations, ordered by substation id.
pub fn group_substations(case: &PowerCase, mapping: &SubstationMapping) -> Result<Vec<Substation>, GridError> {
    let bus_ids: BTreeSet<u32> = case.buses.iter().map(|b| b.id).collect();
    if let Some(extra) = mapping.0.keys().find(|b| !bus_ids.contains(b)) {
        return Err(GridError::Mapping(format!("mapping lists bus {extra}, which is not in the case")));
    }
    let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for bus in &bus_ids {
        let sub = mapping
            .0
            .get(bus)
            .ok_or_else(|| GridError::Mapping(format!("bus {bus} is not mapped to a substation")))?;
        groups.entry(*sub).or_default().push(*bus);
    }
    Ok(groups
        .into_iter()
        .map(|(id, buses)| Substation {
            id,
            buses,
            x_km: 0.0,
            y_km: 0.0,
            centrality: 0.0,
        })
        .collect())
}

/// Σ |flow| over branches with at least one end in `buses`; a branch with both
/// ends inside is counted once.
pub fn power_flow_centrality(buses: &[u32], case: &PowerCase, flow: &DcFlow) -> f64 {
    let members: BTreeSet<u32> = buses.iter().copied().collect();
    case.branches
        .iter()
        .zip(&flow.flows)
        .filter(|(br, _)| members.contains(&br.from) || members.contains(&br.to))
        .map(|(_, f)| f.abs())
        .sum()
}

pub fn assign_centrality(substations: &mut [Substation], case: &PowerCase, flow: &DcFlow) {
    for s in substations {
        s.centrality = power_flow_centrality(&s.buses, case, flow);
    }
}

/// Substation ids by descending centrality, ties by ascending id.
pub fn rank_substations(substations: &[Substation]) -> Vec<u32> {
    let mut order: Vec<&Substation> = substations.iter().collect();
    order.sort_by(|a, b| b.centrality.total_cmp(&a.centrality).then(a.id.cmp(&b.id)));
    order.into_iter().map(|s| s.id).collect()
}
