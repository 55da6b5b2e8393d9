use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OutageError;

/// US Census region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CensusRegion {
    Northeast,
    Midwest,
    South,
    West,
}

impl CensusRegion {
    pub const ALL: [CensusRegion; 4] = [
        CensusRegion::Northeast,
        CensusRegion::Midwest,
        CensusRegion::South,
        CensusRegion::West,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CensusRegion::Northeast => "Northeast",
            CensusRegion::Midwest => "Midwest",
            CensusRegion::South => "South",
            CensusRegion::West => "West",
        }
    }
}

impl fmt::Display for CensusRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CensusRegion {
    type Err = OutageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CensusRegion::ALL
            .iter()
            .copied()
            .find(|r| r.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| OutageError::Config(format!("unknown census region {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeoGroup {
    pub state: String,
    pub coastal: bool,
    pub census_region: CensusRegion,
}

/// State → geographic grouping lookup table.
#[derive(Debug, Clone, Default)]
pub struct GeoTable {
    groups: BTreeMap<String, GeoGroup>,
}

#[derive(Deserialize)]
struct GeoRow {
    state: String,
    coastal: String,
    census_region: String,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" => Some(true),
        "false" | "0" | "no" | "n" => Some(false),
        _ => None,
    }
}

impl GeoTable {
    pub fn from_groups(groups: impl IntoIterator<Item = GeoGroup>) -> Self {
        Self {
            groups: groups.into_iter().map(|g| (g.state.clone(), g)).collect(),
        }
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, OutageError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut groups = Vec::new();
        for (i, row) in rdr.deserialize::<GeoRow>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| OutageError::Config(format!("geo grouping row {line}: {e}")))?;
            let coastal = parse_bool(&row.coastal)
                .ok_or_else(|| OutageError::Config(format!("geo grouping row {line}: bad coastal flag {:?}", row.coastal)))?;
            groups.push(GeoGroup {
                state: row.state.to_ascii_uppercase(),
                coastal,
                census_region: row.census_region.parse()?,
            });
        }
        Ok(Self::from_groups(groups))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, OutageError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| OutageError::io(path, e))?;
        Self::from_reader(file)
    }

    /// The bundled grouping: 50 states plus DC, 30 of them coastal
    /// (ocean, Gulf of Mexico or Great Lakes shoreline).
    pub fn default_table() -> Self {
        Self::from_reader(crate::data::GEO_GROUPS.as_bytes()).expect("bundled geo grouping is valid")
    }

    pub fn get(&self, state: &str) -> Option<&GeoGroup> {
        self.groups.get(state)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GeoGroup> {
        self.groups.values()
    }

    pub fn coastal_count(&self) -> usize {
        self.groups.values().filter(|g| g.coastal).count()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

pub fn classify_region<'a>(state: &str, table: &'a GeoTable) -> Result<&'a GeoGroup, OutageError> {
    table
        .get(state)
        .ok_or_else(|| OutageError::UnknownState(state.to_string()))
}
