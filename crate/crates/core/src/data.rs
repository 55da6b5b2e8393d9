//! Default inputs bundled with the crate. The same files live under `data/`
//! and can be edited or replaced through the pipeline config.

pub const IEEE118_CASE: &str = include_str!("../data/ieee118.case");
pub const SUBSTATION_MAPPING: &str = include_str!("../data/substations.csv");
pub const OVERLAY_CONFIG: &str = include_str!("../data/overlay.toml");
pub const SCENARIOS: &str = include_str!("../data/scenarios.csv");
pub const CATEGORY_MAPPING: &str = include_str!("../data/category_mapping.csv");
pub const GEO_GROUPS: &str = include_str!("../data/geo_groups.csv");
