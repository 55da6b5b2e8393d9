use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// What a stage consumed and produced. Written after the outputs, so a
/// manifest on disk means the stage completed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub version: String,
    /// Input label (config key or upstream artifact) → content hash.
    pub inputs: BTreeMap<String, String>,
    /// Hash of the stage's parameters.
    pub params: String,
    /// Output path relative to the output directory → content hash.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn read(path: &Path) -> Option<Self> {
        let text = std::fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Every recorded output still exists with the recorded content.
    pub fn outputs_intact(&self, out_dir: &Path) -> bool {
        self.outputs.iter().all(|(rel, hash)| {
            std::fs::read(out_dir.join(rel)).is_ok_and(|bytes| &sha256_hex(&bytes) == hash)
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
