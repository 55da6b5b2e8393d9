use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::case::PowerCase;
use super::flow::{dc_power_flow, DcFlow};
use super::layout::{assign_coordinates, CoordinateTable, LayoutSource};
use super::overlay::{build_comm_overlay, Entity, EntityKind, OverlayConfig};
use super::substation::{assign_centrality, group_substations, rank_substations, Substation, SubstationMapping};
use super::GridError;
use crate::miim::{self, parse_rules, CascadeTrace, DependencyRule, RuleSet};

/// Everything needed to build a [`JointNetwork`].
#[derive(Debug, Clone)]
pub struct NetworkInputs {
    pub case: PowerCase,
    pub mapping: SubstationMapping,
    pub overlay: OverlayConfig,
    /// Fixed coordinates; when absent the seeded force-directed layout is used.
    pub coordinates: Option<CoordinateTable>,
    /// Replaces the generated rule template.
    pub rules_override: Option<String>,
}

impl Default for NetworkInputs {
    fn default() -> Self {
        Self {
            case: PowerCase::ieee118(),
            mapping: SubstationMapping::default_mapping(),
            overlay: OverlayConfig::default_config(),
            coordinates: None,
            rules_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub substations: usize,
    pub by_kind: BTreeMap<EntityKind, usize>,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointNetwork {
    pub case: PowerCase,
    pub flow: DcFlow,
    /// Sorted by id, with coordinates and centrality.
    pub substations: Vec<Substation>,
    /// Substation ids by descending centrality.
    pub ranking: Vec<u32>,
    pub entities: Vec<Entity>,
    pub overlay: OverlayConfig,
    pub rules_text: String,
    pub rules: Vec<DependencyRule>,
    pub census: Census,
}

impl JointNetwork {
    pub fn build(inputs: NetworkInputs) -> Result<Self, GridError> {
        let NetworkInputs { case, mapping, overlay, coordinates, rules_override } = inputs;
        overlay.validate()?;
        let flow = dc_power_flow(&case)?;
        let mut substations = group_substations(&case, &mapping)?;
        substations.sort_by_key(|s| s.id);
        assign_centrality(&mut substations, &case, &flow);
        let layout = match coordinates {
            Some(t) => LayoutSource::Table(t),
            None => LayoutSource::ForceDirected {
                seed: overlay.layout.seed,
                median_link_km: overlay.layout.median_branch_km,
            },
        };
        assign_coordinates(&mut substations, &case, &layout)?;
        let ranking = rank_substations(&substations);
        let generated = build_comm_overlay(&substations, &case, &overlay)?;
        let rules_text = rules_override.unwrap_or(generated.rules_text);
        let rules = parse_rules(&rules_text)?;
        let entities = generated.entities;

        let mut by_kind: BTreeMap<EntityKind, usize> = EntityKind::ALL.iter().map(|k| (*k, 0)).collect();
        for e in &entities {
            *by_kind.get_mut(&e.kind).unwrap() += 1;
        }
        let census = Census {
            substations: substations.len(),
            by_kind,
            total: entities.len(),
        };
        let net = Self { case, flow, substations, ranking, entities, overlay, rules_text, rules, census };
        net.rule_set()?;
        Ok(net)
    }

    /// The bundled IEEE 118-bus network with the default overlay.
    pub fn default_network() -> Result<Self, GridError> {
        Self::build(NetworkInputs::default())
    }

    pub fn entity_ids(&self) -> Vec<String> {
        self.entities.iter().map(|e| e.id.clone()).collect()
    }

    pub fn rule_set(&self) -> Result<RuleSet, GridError> {
        Ok(RuleSet::link(&self.entity_ids(), &self.rules)?)
    }

    pub fn substation(&self, id: u32) -> Option<&Substation> {
        self.substations.binary_search_by_key(&id, |s| s.id).ok().map(|i| &self.substations[i])
    }

    pub fn entity_index(&self) -> BTreeMap<&str, usize> {
        self.entities.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect()
    }

    /// Run a cascade with the given entity ids clamped to failed.
    pub fn cascade(&self, clamp_ids: &[String]) -> Result<CascadeTrace, GridError> {
        let rules = self.rule_set()?;
        let mut clamp = Vec::with_capacity(clamp_ids.len());
        for id in clamp_ids {
            let i = rules
                .index_of(id)
                .ok_or_else(|| miim::MiimError::UnknownEntity { line: 0, id: id.clone() })?;
            clamp.push(i);
        }
        Ok(miim::cascade(&rules, &clamp)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
