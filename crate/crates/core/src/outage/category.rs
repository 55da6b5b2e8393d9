use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::OutageError;

/// Standardized outage event category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventCategory {
    SevereWeather,
    WinterStorm,
    NaturalDisaster,
    Vandalism,
    PhysicalAttack,
    CyberEvent,
    SystemOperations,
    TransmissionInterruption,
    FuelSupply,
    Other,
}

impl EventCategory {
    pub const ALL: [EventCategory; 10] = [
        EventCategory::SevereWeather,
        EventCategory::WinterStorm,
        EventCategory::NaturalDisaster,
        EventCategory::Vandalism,
        EventCategory::PhysicalAttack,
        EventCategory::CyberEvent,
        EventCategory::SystemOperations,
        EventCategory::TransmissionInterruption,
        EventCategory::FuelSupply,
        EventCategory::Other,
    ];

    /// Climate-related outages are the union of the three weather/hazard categories.
    pub fn is_climate(self) -> bool {
        matches!(
            self,
            EventCategory::SevereWeather | EventCategory::WinterStorm | EventCategory::NaturalDisaster
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventCategory::SevereWeather => "SevereWeather",
            EventCategory::WinterStorm => "WinterStorm",
            EventCategory::NaturalDisaster => "NaturalDisaster",
            EventCategory::Vandalism => "Vandalism",
            EventCategory::PhysicalAttack => "PhysicalAttack",
            EventCategory::CyberEvent => "CyberEvent",
            EventCategory::SystemOperations => "SystemOperations",
            EventCategory::TransmissionInterruption => "TransmissionInterruption",
            EventCategory::FuelSupply => "FuelSupply",
            EventCategory::Other => "Other",
        }
    }
}

impl fmt::Display for EventCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventCategory {
    type Err = OutageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = normalize_key(s).replace(' ', "");
        EventCategory::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().to_ascii_lowercase() == key)
            .ok_or_else(|| OutageError::UnknownCategory(s.to_string()))
    }
}

fn normalize_key(s: &str) -> String {
    s.trim().to_ascii_lowercase()
}

/// User-editable mapping from raw event-type strings to standardized categories.
///
/// Keys are matched case-insensitively after trimming. Raw types that are not
/// listed but spell a standard category name directly are accepted as that category.
#[derive(Debug, Clone, Default)]
pub struct CategoryMapping {
    entries: HashMap<String, EventCategory>,
}

#[derive(Debug, Deserialize)]
struct MappingRow {
    raw_type: String,
    standard_category: String,
}

impl CategoryMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, raw: &str, category: EventCategory) {
        self.entries.insert(normalize_key(raw), category);
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, OutageError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut mapping = Self::new();
        for (i, row) in rdr.deserialize::<MappingRow>().enumerate() {
            let row = row.map_err(|e| OutageError::Config(format!("category mapping row {}: {e}", i + 2)))?;
            let category = row.standard_category.parse()?;
            mapping.insert(&row.raw_type, category);
        }
        Ok(mapping)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, OutageError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| OutageError::io(path, e))?;
        Self::from_reader(file)
    }

    /// The mapping shipped in `data/category_mapping.csv`.
    pub fn default_mapping() -> Self {
        Self::from_reader(crate::data::CATEGORY_MAPPING.as_bytes()).expect("bundled category mapping is valid")
    }

    /// Returns `None` when the raw type is neither listed nor a standard name.
    pub fn lookup(&self, raw_event_type: &str) -> Option<EventCategory> {
        self.entries
            .get(&normalize_key(raw_event_type))
            .copied()
            .or_else(|| raw_event_type.parse().ok())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Total mapping: anything unmapped lands in [`EventCategory::Other`].
pub fn standardize_category(raw_event_type: &str, mapping: &CategoryMapping) -> EventCategory {
    mapping.lookup(raw_event_type).unwrap_or(EventCategory::Other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_categories_map_to_climate() {
        let m = CategoryMapping::default_mapping();
        let sw = standardize_category("Severe Weather", &m);
        assert_eq!(sw, EventCategory::SevereWeather);
        assert!(sw.is_climate());
        let ws = standardize_category("Winter Storm", &m);
        assert_eq!(ws, EventCategory::WinterStorm);
        assert!(ws.is_climate());
        assert!(standardize_category("Natural Disaster", &m).is_climate());
    }

    #[test]
    fn vandalism_is_not_climate() {
        let m = CategoryMapping::default_mapping();
        let v = standardize_category("Vandalism", &m);
        assert!(!v.is_climate());
    }

    #[test]
    fn unmapped_goes_to_other() {
        let m = CategoryMapping::new();
        assert_eq!(standardize_category("Squirrel", &m), EventCategory::Other);
        assert_eq!(m.lookup("Squirrel"), None);
        assert_eq!(standardize_category("  severe weather ", &m), EventCategory::SevereWeather);
        assert_eq!(standardize_category("WinterStorm", &m), EventCategory::WinterStorm);
    }

    #[test]
    fn climate_flag_only_for_three_categories() {
        let climate: Vec<_> = EventCategory::ALL.iter().filter(|c| c.is_climate()).collect();
        assert_eq!(climate.len(), 3);
    }

    #[test]
    fn mapping_rejects_unknown_standard_name() {
        let text = "raw_type,standard_category\nStorm,Stormy\n";
        assert!(CategoryMapping::from_reader(text.as_bytes()).is_err());
    }
}
