use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::case::PowerCase;
use super::substation::{rank_substations, Substation};
use super::GridError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Bus,
    SubstationServer,
    Gateway,
    Pmu,
    Sadm,
    Oadm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layer {
    Power,
    Communication,
}

impl EntityKind {
    pub const ALL: [EntityKind; 6] = [
        EntityKind::Bus,
        EntityKind::SubstationServer,
        EntityKind::Gateway,
        EntityKind::Pmu,
        EntityKind::Sadm,
        EntityKind::Oadm,
    ];

    pub fn layer(self) -> Layer {
        match self {
            EntityKind::Bus => Layer::Power,
            _ => Layer::Communication,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Bus => "bus",
            EntityKind::SubstationServer => "server",
            EntityKind::Gateway => "gateway",
            EntityKind::Pmu => "pmu",
            EntityKind::Sadm => "sadm",
            EntityKind::Oadm => "oadm",
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            EntityKind::Bus => "bus",
            EntityKind::SubstationServer => "srv",
            EntityKind::Gateway => "gw",
            EntityKind::Pmu => "pmu",
            EntityKind::Sadm => "sadm",
            EntityKind::Oadm => "oadm",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A non-cable entity of the joint network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub kind: EntityKind,
    pub home_substation: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementPolicy {
    Degree,
    Spread,
    Centrality,
}

impl FromStr for PlacementPolicy {
    type Err = GridError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "degree" => Ok(Self::Degree),
            "spread" => Ok(Self::Spread),
            "centrality" => Ok(Self::Centrality),
            other => Err(GridError::Overlay(format!("unknown placement policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceCounts {
    pub pmu: usize,
    pub sadm: usize,
    pub oadm: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub pmu: PlacementPolicy,
    pub sadm: PlacementPolicy,
    pub oadm: PlacementPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Adjacency {
    pub sadm_km: f64,
    pub oadm_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    pub seed: u64,
    pub median_branch_km: f64,
}

/// How many of the nearest devices of each kind a gateway can reach the
/// backbone through (any one suffices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Uplinks {
    pub sadm: usize,
    pub oadm: usize,
}

impl Default for Uplinks {
    fn default() -> Self {
        Self { sadm: 1, oadm: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayConfig {
    pub counts: DeviceCounts,
    pub placement: Placement,
    pub adjacency: Adjacency,
    pub layout: LayoutConfig,
    #[serde(default)]
    pub uplinks: Uplinks,
}

impl OverlayConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, GridError> {
        let cfg: Self = toml::from_str(text).map_err(|e| GridError::Overlay(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| GridError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn default_config() -> Self {
        Self::from_toml_str(crate::data::OVERLAY_CONFIG).expect("bundled overlay config is valid")
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let a = &self.adjacency;
        if !(a.sadm_km.is_finite() && a.sadm_km >= 0.0 && a.oadm_km.is_finite() && a.oadm_km >= 0.0) {
            return Err(GridError::Overlay("adjacency distances must be finite and non-negative".into()));
        }
        if !(self.layout.median_branch_km.is_finite() && self.layout.median_branch_km > 0.0) {
            return Err(GridError::Overlay("layout.median_branch_km must be positive".into()));
        }
        Ok(())
    }
}

/// Entities plus dependency rules in the rule DSL.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub entities: Vec<Entity>,
    pub rules_text: String,
}

/// Branches touching each substation, internal branches once.
fn substation_degree(substations: &[Substation], case: &PowerCase) -> BTreeMap<u32, usize> {
    let mut bus_to_sub = BTreeMap::new();
    for s in substations {
        for b in &s.buses {
            bus_to_sub.insert(*b, s.id);
        }
    }
    let mut degree: BTreeMap<u32, usize> = substations.iter().map(|s| (s.id, 0)).collect();
    for br in &case.branches {
        let (a, b) = (bus_to_sub[&br.from], bus_to_sub[&br.to]);
        *degree.get_mut(&a).unwrap() += 1;
        if a != b {
            *degree.get_mut(&b).unwrap() += 1;
        }
    }
    degree
}

fn min_distance(s: &Substation, refs: &[&Substation]) -> f64 {
    refs.iter().map(|r| s.distance_km(r)).fold(f64::INFINITY, f64::min)
}

/// Choose host substations (one device per host) for `count` devices.
fn place(
    policy: PlacementPolicy,
    count: usize,
    substations: &[Substation],
    degree: &BTreeMap<u32, usize>,
    ranking: &[u32],
    already: &[u32],
) -> Vec<u32> {
    let by_id: BTreeMap<u32, &Substation> = substations.iter().map(|s| (s.id, s)).collect();
    match policy {
        PlacementPolicy::Centrality => ranking.iter().copied().take(count).collect(),
        PlacementPolicy::Degree => {
            let mut order: Vec<u32> = substations.iter().map(|s| s.id).collect();
            order.sort_by(|a, b| degree[b].cmp(&degree[a]).then(a.cmp(b)));
            order.truncate(count);
            order
        }
        PlacementPolicy::Spread => {
            let mut refs: Vec<&Substation> = already.iter().map(|id| by_id[id]).collect();
            let mut chosen: BTreeSet<u32> = BTreeSet::new();
            let mut picks = Vec::with_capacity(count);
            for _ in 0..count {
                let pick = if refs.is_empty() {
                    ranking[0]
                } else {
                    let mut best: Option<(f64, u32)> = None;
                    for s in substations.iter().filter(|s| !chosen.contains(&s.id)) {
                        let d = min_distance(s, &refs);
                        if best.is_none_or(|(bd, _)| d > bd) {
                            best = Some((d, s.id));
                        }
                    }
                    best.expect("count checked against substation total").1
                };
                chosen.insert(pick);
                refs.push(by_id[&pick]);
                picks.push(pick);
            }
            picks
        }
    }
}

fn numbered(kind: EntityKind, mut hosts: Vec<u32>) -> Vec<Entity> {
    hosts.sort_unstable();
    hosts
        .into_iter()
        .enumerate()
        .map(|(i, home)| Entity {
            id: format!("{}_{}", kind.prefix(), i + 1),
            kind,
            home_substation: home,
        })
        .collect()
}

/// Emit the joint network's entities and default rule template.
///
/// Every substation gets one server (`srv_k`) and one gateway (`gw_k`). PMUs,
/// S-ADMs and OADMs are placed at most one per substation per kind. Rules:
///
/// * `srv_k <- hard: gw_k` and `gw_k <- hard: srv_k`
/// * `gw_k <- hard: <nearest S-ADMs> | <nearest OADMs>` (counts from `uplinks`)
/// * `pmu_j <- hard: srv_home`, `sadm_j <- hard: srv_home`, `oadm_j <- hard: srv_home`
/// * `bus_i <- soft: srv_home`
pub fn build_comm_overlay(
    substations: &[Substation],
    case: &PowerCase,
    config: &OverlayConfig,
) -> Result<Overlay, GridError> {
    let total = substations.len();
    for (name, n) in [("PMU", config.counts.pmu), ("S-ADM", config.counts.sadm), ("OADM", config.counts.oadm)] {
        if n > total {
            return Err(GridError::Overlay(format!(
                "cannot place {n} {name}s: at most one per substation and only {total} substations ({n} > {total})"
            )));
        }
    }
    let degree = substation_degree(substations, case);
    let ranking = rank_substations(substations);
    let pmu_hosts = place(config.placement.pmu, config.counts.pmu, substations, &degree, &ranking, &[]);
    let sadm_hosts = place(config.placement.sadm, config.counts.sadm, substations, &degree, &ranking, &[]);
    let oadm_hosts = place(config.placement.oadm, config.counts.oadm, substations, &degree, &ranking, &sadm_hosts);

    let mut subs: Vec<&Substation> = substations.iter().collect();
    subs.sort_by_key(|s| s.id);
    let mut entities = Vec::new();
    let mut bus_home: Vec<(u32, u32)> = subs.iter().flat_map(|s| s.buses.iter().map(move |b| (*b, s.id))).collect();
    bus_home.sort_unstable();
    entities.extend(bus_home.iter().map(|&(b, s)| Entity {
        id: format!("bus_{b}"),
        kind: EntityKind::Bus,
        home_substation: s,
    }));
    for kind in [EntityKind::SubstationServer, EntityKind::Gateway] {
        entities.extend(subs.iter().map(|s| Entity {
            id: format!("{}_{}", kind.prefix(), s.id),
            kind,
            home_substation: s.id,
        }));
    }
    let pmus = numbered(EntityKind::Pmu, pmu_hosts);
    let sadms = numbered(EntityKind::Sadm, sadm_hosts);
    let oadms = numbered(EntityKind::Oadm, oadm_hosts);

    let by_id: BTreeMap<u32, &Substation> = substations.iter().map(|s| (s.id, s)).collect();
    let nearest = |from: &Substation, devices: &[Entity], k: usize| -> Vec<String> {
        let mut ranked: Vec<(f64, &Entity)> = devices
            .iter()
            .map(|d| (from.distance_km(by_id[&d.home_substation]), d))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        ranked.into_iter().take(k).map(|(_, d)| d.id.clone()).collect()
    };

    let mut text = String::from("# Communication overlay rules\n\n# servers and gateways fail together\n");
    for s in &subs {
        text.push_str(&format!("srv_{0} <- hard: gw_{0}\ngw_{0} <- hard: srv_{0}\n", s.id));
    }
    text.push_str("\n# gateways reach the backbone through the nearest S-ADM or OADM\n");
    for s in &subs {
        let mut options = nearest(s, &sadms, config.uplinks.sadm);
        options.extend(nearest(s, &oadms, config.uplinks.oadm));
        if !options.is_empty() {
            text.push_str(&format!("gw_{} <- hard: {}\n", s.id, options.join(" | ")));
        }
    }
    text.push_str("\n# co-located devices draw on the substation server\n");
    for d in pmus.iter().chain(&sadms).chain(&oadms) {
        text.push_str(&format!("{} <- hard: srv_{}\n", d.id, d.home_substation));
    }
    text.push_str("\n# buses lose monitoring and control without their server\n");
    for &(b, s) in &bus_home {
        text.push_str(&format!("bus_{b} <- soft: srv_{s}\n"));
    }
    entities.extend(pmus);
    entities.extend(sadms);
    entities.extend(oadms);
    Ok(Overlay { entities, rules_text: text })
}
