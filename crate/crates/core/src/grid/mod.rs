//! Joint power-communication network over a DC power-flow case.

mod case;
mod flow;
mod layout;
mod network;
mod overlay;
mod substation;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use case::{parse_case, parse_case_str, Branch, Bus, PowerCase};
pub use flow::{conservation_residuals, dc_power_flow, DcFlow};
pub use layout::{assign_coordinates, force_directed_layout, substation_links, CoordinateTable, LayoutSource};
pub use network::{Census, JointNetwork, NetworkInputs};
pub use overlay::{
    build_comm_overlay, Adjacency, DeviceCounts, Entity, EntityKind, Layer, LayoutConfig, Overlay, OverlayConfig,
    Placement, PlacementPolicy, Uplinks,
};
pub use substation::{
    assign_centrality, group_substations, power_flow_centrality, rank_substations, Substation, SubstationMapping,
};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("case line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("case schema: {0}")]
    Schema(String),
    #[error("topology: buses {0:?} are not connected to the slack bus")]
    Disconnected(Vec<u32>),
    #[error("singular susceptance matrix: near-zero pivot {pivot:e} at bus {bus}")]
    SingularMatrix { bus: u32, pivot: f64 },
    #[error("substation mapping: {0}")]
    Mapping(String),
    #[error("overlay: {0}")]
    Overlay(String),
    #[error("coordinates: {0}")]
    Coordinates(String),
    #[error("rules: {0}")]
    Rules(#[from] crate::miim::MiimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl GridError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        GridError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
