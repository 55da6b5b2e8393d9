use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GridError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: u32,
    /// Net real-power injection, per unit on the case base.
    pub injection: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    /// Series reactance, per unit.
    pub x: f64,
}

/// DC power-flow case: buses with net injections, branches with reactances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCase {
    pub base_mva: f64,
    pub slack: u32,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    /// Injection moved onto the slack bus so injections sum to zero.
    pub slack_adjustment: f64,
}

impl PowerCase {
    /// Builds a case, balancing the slack injection and checking connectivity.
    pub fn new(base_mva: f64, slack: u32, mut buses: Vec<Bus>, branches: Vec<Branch>) -> Result<Self, GridError> {
        let mut seen = BTreeSet::new();
        for b in &buses {
            if !seen.insert(b.id) {
                return Err(GridError::Schema(format!("duplicate bus id {}", b.id)));
            }
        }
        let mut branch_ids = BTreeSet::new();
        for br in &branches {
            if !branch_ids.insert(br.id) {
                return Err(GridError::Schema(format!("duplicate branch id {}", br.id)));
            }
            for end in [br.from, br.to] {
                if !seen.contains(&end) {
                    return Err(GridError::Schema(format!("branch {} references unknown bus {end}", br.id)));
                }
            }
            if br.from == br.to {
                return Err(GridError::Schema(format!("branch {} is a self-loop", br.id)));
            }
            if !(br.x.is_finite() && br.x != 0.0) {
                return Err(GridError::Schema(format!("branch {} has unusable reactance {}", br.id, br.x)));
            }
        }
        if !seen.contains(&slack) {
            return Err(GridError::Schema(format!("slack bus {slack} is not a bus")));
        }
        let others: f64 = buses.iter().filter(|b| b.id != slack).map(|b| b.injection).sum();
        let slack_bus = buses.iter_mut().find(|b| b.id == slack).expect("slack checked above");
        let balanced = -others;
        let slack_adjustment = balanced - slack_bus.injection;
        slack_bus.injection = balanced;

        let case = Self {
            base_mva,
            slack,
            buses,
            branches,
            slack_adjustment,
        };
        case.check_connected()?;
        Ok(case)
    }

    pub fn bus_index(&self) -> BTreeMap<u32, usize> {
        self.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect()
    }

    fn check_connected(&self) -> Result<(), GridError> {
        let index = self.bus_index();
        let mut adj = vec![Vec::new(); self.buses.len()];
        for br in &self.branches {
            let (f, t) = (index[&br.from], index[&br.to]);
            adj[f].push(t);
            adj[t].push(f);
        }
        let mut seen = vec![false; self.buses.len()];
        let mut queue = VecDeque::from([index[&self.slack]]);
        seen[index[&self.slack]] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let islanded: Vec<u32> = self
            .buses
            .iter()
            .zip(&seen)
            .filter(|(_, s)| !**s)
            .map(|(b, _)| b.id)
            .collect();
        if islanded.is_empty() {
            Ok(())
        } else {
            Err(GridError::Disconnected(islanded))
        }
    }

    /// The bundled IEEE 118-bus case.
    pub fn ieee118() -> Self {
        parse_case_str(crate::data::IEEE118_CASE).expect("bundled case is valid")
    }
}

/// Parses the plain-text case format:
///
/// ```text
/// BASE_MVA 100
/// SLACK 69
/// BUS
/// <id> <injection_pu>
/// BRANCH
/// <id> <from> <to> <x_pu>
/// ```
///
/// `#` starts a comment; blank lines are ignored.
pub fn parse_case_str(text: &str) -> Result<PowerCase, GridError> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Bus,
        Branch,
    }
    let mut section = Section::Header;
    let mut base_mva = 100.0;
    let mut slack = None;
    let mut buses = Vec::new();
    let mut branches = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| GridError::Parse { line: line_no, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0].to_ascii_uppercase().as_str() {
            "BUS" if fields.len() == 1 => {
                section = Section::Bus;
                continue;
            }
            "BRANCH" if fields.len() == 1 => {
                section = Section::Branch;
                continue;
            }
            "BASE_MVA" => {
                base_mva = fields
                    .get(1)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("BASE_MVA needs a number".into()))?;
                continue;
            }
            "SLACK" => {
                slack = Some(
                    fields
                        .get(1)
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err("SLACK needs a bus id".into()))?,
                );
                continue;
            }
            _ => {}
        }
        let num = |k: usize| -> Result<f64, GridError> {
            fields
                .get(k)
                .ok_or_else(|| err(format!("expected at least {} fields", k + 1)))?
                .parse::<f64>()
                .map_err(|e| err(format!("field {}: {e}", k + 1)))
        };
        let id = |k: usize| -> Result<u32, GridError> {
            fields
                .get(k)
                .ok_or_else(|| err(format!("expected at least {} fields", k + 1)))?
                .parse::<u32>()
                .map_err(|e| err(format!("field {}: {e}", k + 1)))
        };
        match section {
            Section::Header => return Err(err(format!("unexpected `{line}` before BUS/BRANCH section"))),
            Section::Bus => buses.push(Bus {
                id: id(0)?,
                injection: num(1)?,
            }),
            Section::Branch => branches.push(Branch {
                id: id(0)?,
                from: id(1)?,
                to: id(2)?,
                x: num(3)?,
            }),
        }
    }
    let slack = slack.ok_or_else(|| GridError::Schema("missing SLACK designation".into()))?;
    PowerCase::new(base_mva, slack, buses, branches)
}

pub fn parse_case(path: impl AsRef<Path>) -> Result<PowerCase, GridError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GridError::io(path, e))?;
    parse_case_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_case_dimensions() {
        let c = PowerCase::ieee118();
        assert_eq!(c.buses.len(), 118);
        assert_eq!(c.branches.len(), 186);
        assert_eq!(c.slack, 69);
        let total: f64 = c.buses.iter().map(|b| b.injection).sum();
        assert!(total.abs() < 1e-9);
    }

    #[test]
    fn two_bus_toy() {
        let c = parse_case_str("SLACK 2\nBUS\n1 1.0\n2 -1.0\nBRANCH\n1 1 2 0.1\n").unwrap();
        assert_eq!(c.buses.len(), 2);
        assert_eq!(c.branches.len(), 1);
        assert_eq!(c.slack_adjustment, 0.0);
    }

    #[test]
    fn island_is_topology_error() {
        let e = parse_case_str("SLACK 1\nBUS\n1 0\n2 0\n3 0\nBRANCH\n1 1 2 0.1\n").unwrap_err();
        assert!(matches!(e, GridError::Disconnected(ref b) if b == &vec![3]), "{e}");
    }

    #[test]
    fn duplicate_branch_id() {
        let e = parse_case_str("SLACK 1\nBUS\n1 0\n2 0\nBRANCH\n1 1 2 0.1\n1 2 1 0.2\n").unwrap_err();
        assert!(matches!(e, GridError::Schema(ref m) if m.contains("duplicate branch")), "{e}");
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = parse_case_str("SLACK 1\nBUS\n1 zero\n").unwrap_err();
        assert!(matches!(e, GridError::Parse { line: 3, .. }), "{e}");
    }
}
