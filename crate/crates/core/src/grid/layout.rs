use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::case::PowerCase;
use super::substation::Substation;
use super::GridError;

const ITERATIONS: usize = 400;

/// Substation pairs joined by at least one branch, as index pairs into `substations`.
pub fn substation_links(substations: &[Substation], case: &PowerCase) -> Vec<(usize, usize)> {
    let mut bus_to_sub = BTreeMap::new();
    for (i, s) in substations.iter().enumerate() {
        for b in &s.buses {
            bus_to_sub.insert(*b, i);
        }
    }
    let mut links = BTreeSet::new();
    for br in &case.branches {
        let (a, b) = (bus_to_sub[&br.from], bus_to_sub[&br.to]);
        if a != b {
            links.insert((a.min(b), a.max(b)));
        }
    }
    links.into_iter().collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Deterministic force-directed (Fruchterman–Reingold) embedding of the
/// substation graph, scaled so the median length of linked substation pairs
/// equals `median_link_km`.
pub fn force_directed_layout(
    substations: &mut [Substation],
    case: &PowerCase,
    seed: u64,
    median_link_km: f64,
) -> Result<(), GridError> {
    let n = substations.len();
    if n == 0 {
        return Ok(());
    }
    let links = substation_links(substations, case);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (n as f64).sqrt();
    let mut pos: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side])
        .collect();
    let k = 1.0;
    let mut temp = side / 10.0;
    let cooling = temp / ITERATIONS as f64;

    for _ in 0..ITERATIONS {
        let mut disp = vec![[0.0f64; 2]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pos[i][0] - pos[j][0];
                let dy = pos[i][1] - pos[j][1];
                let d2 = (dx * dx + dy * dy).max(1e-9);
                let f = k * k / d2;
                disp[i][0] += dx * f;
                disp[i][1] += dy * f;
                disp[j][0] -= dx * f;
                disp[j][1] -= dy * f;
            }
        }
        for &(i, j) in &links {
            let dx = pos[i][0] - pos[j][0];
            let dy = pos[i][1] - pos[j][1];
            let d = (dx * dx + dy * dy).sqrt().max(1e-9);
            let f = d / k;
            disp[i][0] -= dx * f;
            disp[i][1] -= dy * f;
            disp[j][0] += dx * f;
            disp[j][1] += dy * f;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
            if len > 0.0 {
                let step = len.min(temp);
                p[0] += d[0] / len * step;
                p[1] += d[1] / len * step;
            }
        }
        temp = (temp - cooling).max(1e-3);
    }

    let link_lengths: Vec<f64> = links
        .iter()
        .map(|&(i, j)| ((pos[i][0] - pos[j][0]).powi(2) + (pos[i][1] - pos[j][1]).powi(2)).sqrt())
        .collect();
    let m = median(link_lengths);
    let scale = if m.is_finite() && m > 0.0 { median_link_km / m } else { median_link_km };
    let (min_x, min_y) = pos
        .iter()
        .fold((f64::INFINITY, f64::INFINITY), |(ax, ay), p| (ax.min(p[0]), ay.min(p[1])));
    for (s, p) in substations.iter_mut().zip(&pos) {
        s.x_km = (p[0] - min_x) * scale;
        s.y_km = (p[1] - min_y) * scale;
    }
    Ok(())
}

/// substation id → (x_km, y_km).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoordinateTable(pub BTreeMap<u32, (f64, f64)>);

#[derive(Deserialize)]
struct CoordRow {
    substation_id: u32,
    x_km: f64,
    y_km: f64,
}

impl CoordinateTable {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, GridError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut map = BTreeMap::new();
        for (i, row) in rdr.deserialize::<CoordRow>().enumerate() {
            let row = row.map_err(|e| GridError::Coordinates(format!("row {}: {e}", i + 2)))?;
            if !(row.x_km.is_finite() && row.y_km.is_finite()) {
                return Err(GridError::Coordinates(format!("substation {} has non-finite coordinates", row.substation_id)));
            }
            map.insert(row.substation_id, (row.x_km, row.y_km));
        }
        Ok(Self(map))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| GridError::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn apply(&self, substations: &mut [Substation]) -> Result<(), GridError> {
        for s in substations {
            let (x, y) = self
                .0
                .get(&s.id)
                .ok_or_else(|| GridError::Coordinates(format!("no coordinates for substation {}", s.id)))?;
            s.x_km = *x;
            s.y_km = *y;
        }
        Ok(())
    }

    pub fn to_csv(substations: &[Substation]) -> String {
        let mut out = String::from("substation_id,x_km,y_km\n");
        for s in substations {
            out.push_str(&format!("{},{},{}\n", s.id, s.x_km, s.y_km));
        }
        out
    }
}

/// Where coordinates come from.
#[derive(Debug, Clone, PartialEq)]
pub enum LayoutSource {
    ForceDirected { seed: u64, median_link_km: f64 },
    Table(CoordinateTable),
}

pub fn assign_coordinates(substations: &mut [Substation], case: &PowerCase, source: &LayoutSource) -> Result<(), GridError> {
    match source {
        LayoutSource::ForceDirected { seed, median_link_km } => {
            force_directed_layout(substations, case, *seed, *median_link_km)
        }
        LayoutSource::Table(t) => t.apply(substations),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::substation::{group_substations, SubstationMapping};

    fn default_subs() -> (PowerCase, Vec<Substation>) {
        let case = PowerCase::ieee118();
        let subs = group_substations(&case, &SubstationMapping::default_mapping()).unwrap();
        (case, subs)
    }

    #[test]
    fn same_seed_same_coordinates() {
        let (case, mut a) = default_subs();
        let mut b = a.clone();
        force_directed_layout(&mut a, &case, 7, 30.0).unwrap();
        force_directed_layout(&mut b, &case, 7, 30.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distances_positive_and_scaled() {
        let (case, mut subs) = default_subs();
        force_directed_layout(&mut subs, &case, 118, 30.0).unwrap();
        for i in 0..subs.len() {
            for j in (i + 1)..subs.len() {
                let d = subs[i].distance_km(&subs[j]);
                assert!(d.is_finite() && d > 0.0, "{i} {j} {d}");
            }
        }
        let links = substation_links(&subs, &case);
        let m = median(links.iter().map(|&(i, j)| subs[i].distance_km(&subs[j])).collect());
        assert!((m - 30.0).abs() < 1e-9, "{m}");
    }

    #[test]
    fn table_pass_through_and_missing() {
        let (case, mut subs) = default_subs();
        let mut text = String::from("substation_id,x_km,y_km\n");
        for s in &subs {
            text.push_str(&format!("{},{},{}\n", s.id, s.id as f64 * 1.5, -(s.id as f64)));
        }
        let table = CoordinateTable::from_reader(text.as_bytes()).unwrap();
        assign_coordinates(&mut subs, &case, &LayoutSource::Table(table.clone())).unwrap();
        assert_eq!(subs[3].x_km, subs[3].id as f64 * 1.5);
        let mut partial = table;
        partial.0.remove(&1);
        assert!(partial.apply(&mut subs).is_err());
    }
}
