//! File formats: pattern tables, sequences, annealing traces and surfaces.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambiguity::{AmbiguitySurface, AngleAxis};
use crate::anneal::AnnealTrace;
use crate::arrays::{ElementPattern, PatternGrid, Polarization};
use crate::error::{Error, Result};
use crate::switching::{Partition, SwitchingSequence};

/// Per-element complex gain tables keyed by `(element, polarization)`.
#[derive(Debug, Clone, Default)]
pub struct PatternTable {
    pub grids: BTreeMap<(usize, Polarization), Arc<PatternGrid>>,
}

impl PatternTable {
    /// Patterns for elements `0..count` in the given polarization.
    pub fn patterns(&self, count: usize, pol: Polarization) -> Result<Vec<ElementPattern>> {
        (0..count)
            .map(|m| {
                self.grids
                    .get(&(m, pol))
                    .map(|g| ElementPattern::tabulated(g.clone(), pol))
                    .ok_or_else(|| Error::PatternTable(format!("no {pol:?} pattern for element {m}")))
            })
            .collect()
    }
}

#[derive(Debug, Deserialize)]
struct PatternRow {
    element: usize,
    pol: String,
    azimuth_deg: f64,
    elevation_deg: f64,
    re: f64,
    im: f64,
}

fn parse_pol(s: &str) -> Result<Polarization> {
    match s.trim() {
        "V" | "v" => Ok(Polarization::V),
        "H" | "h" => Ok(Polarization::H),
        other => Err(Error::PatternTable(format!("unknown polarization {other:?}"))),
    }
}

/// Reads `element,pol,azimuth_deg,elevation_deg,re,im` rows. Each
/// `(element, pol)` block must form a complete rectangular grid.
pub fn read_pattern_csv<R: Read>(reader: R) -> Result<PatternTable> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let expected = ["element", "pol", "azimuth_deg", "elevation_deg", "re", "im"];
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::PatternTable(format!(
            "expected header {}, got {}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut blocks: BTreeMap<(usize, Polarization), Vec<PatternRow>> = BTreeMap::new();
    for row in rdr.deserialize() {
        let row: PatternRow = row?;
        let key = (row.element, parse_pol(&row.pol)?);
        blocks.entry(key).or_default().push(row);
    }
    let mut grids = BTreeMap::new();
    for (key, rows) in blocks {
        grids.insert(key, Arc::new(grid_from_rows(key, &rows)?));
    }
    Ok(PatternTable { grids })
}

pub fn load_pattern_csv(path: &Path) -> Result<PatternTable> {
    read_pattern_csv(fs::File::open(path)?)
}

fn grid_from_rows(key: (usize, Polarization), rows: &[PatternRow]) -> Result<PatternGrid> {
    let axis = |f: fn(&PatternRow) -> f64| {
        let mut v: Vec<f64> = rows.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let az = axis(|r| r.azimuth_deg);
    let el = axis(|r| r.elevation_deg);
    if az.len() * el.len() != rows.len() {
        return Err(Error::PatternTable(format!(
            "element {} {:?}: {} rows do not form a {}x{} grid",
            key.0,
            key.1,
            rows.len(),
            az.len(),
            el.len()
        )));
    }
    let mut gains = vec![None; rows.len()];
    for r in rows {
        let i = az.binary_search_by(|x| x.total_cmp(&r.azimuth_deg)).unwrap();
        let j = el.binary_search_by(|x| x.total_cmp(&r.elevation_deg)).unwrap();
        let slot = &mut gains[j * az.len() + i];
        if slot.is_some() {
            return Err(Error::PatternTable(format!(
                "element {} {:?}: duplicate sample at azimuth {} deg, elevation {} deg",
                key.0, key.1, r.azimuth_deg, r.elevation_deg
            )));
        }
        *slot = Some(Complex64::new(r.re, r.im));
    }
    PatternGrid::new(
        az.into_iter().map(f64::to_radians).collect(),
        el.into_iter().map(f64::to_radians).collect(),
        gains.into_iter().map(Option::unwrap).collect(),
    )
}

/// On-disk sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    #[serde(rename = "M")]
    pub m: usize,
    pub delta_t_s: f64,
    pub snapshots: usize,
    pub order: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
}

impl SequenceFile {
    pub fn from_sequence(seq: &SwitchingSequence) -> Self {
        Self {
            m: seq.len(),
            delta_t_s: seq.delta_t(),
            snapshots: seq.snapshots(),
            order: seq.order().to_vec(),
            partition: seq.partition().map(Partition::to_index_lists),
        }
    }

    pub fn to_sequence(&self) -> Result<SwitchingSequence> {
        if self.order.len() != self.m {
            return Err(Error::InvalidSequence(format!(
                "M = {} but order has {} entries",
                self.m,
                self.order.len()
            )));
        }
        let partition = self
            .partition
            .as_deref()
            .map(Partition::from_index_lists)
            .transpose()?;
        SwitchingSequence::new(self.order.clone(), self.delta_t_s, self.snapshots, partition)
    }
}

pub fn sequence_to_json(seq: &SwitchingSequence) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SequenceFile::from_sequence(seq))?)
}

pub fn sequence_from_json(text: &str) -> Result<SwitchingSequence> {
    serde_json::from_str::<SequenceFile>(text)?.to_sequence()
}

pub fn write_sequence(path: &Path, seq: &SwitchingSequence) -> Result<()> {
    let mut text = sequence_to_json(seq)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_sequence(path: &Path) -> Result<SwitchingSequence> {
    sequence_from_json(&fs::read_to_string(path)?)
}

/// Writes `k,objective,proposal_objective,temperature,accepted`.
pub fn write_trace_csv<W: Write>(writer: W, trace: &AnnealTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in &trace.records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SurfaceRow {
    delta_doppler_hz: f64,
    angle_deg: f64,
    magnitude_db: f64,
}

/// Writes `delta_doppler_hz,angle_deg,magnitude_db`, angle-major.
pub fn write_surface_csv<W: Write>(writer: W, surface: &AmbiguitySurface) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (j, &a) in surface.angle.iter().enumerate() {
        for (i, &d) in surface.doppler.iter().enumerate() {
            w.serialize(SurfaceRow {
                delta_doppler_hz: d,
                angle_deg: a.to_degrees(),
                magnitude_db: surface.db(i, j),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Sidecar describing how a surface CSV was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMetadata {
    pub axis: AngleAxis,
    pub reference_azimuth_deg: f64,
    pub reference_elevation_deg: f64,
    pub reference_doppler_hz: f64,
    pub doppler_grid_hz: Vec<f64>,
    pub angle_grid_deg: Vec<f64>,
    pub degenerate_points: usize,
    pub seed: Option<u64>,
    pub sequence_sha256: Option<String>,
}

impl SurfaceMetadata {
    pub fn new(surface: &AmbiguitySurface, seed: Option<u64>, sequence_sha256: Option<String>) -> Self {
        let r = &surface.reference;
        Self {
            axis: surface.axis,
            reference_azimuth_deg: r.direction.azimuth().to_degrees(),
            reference_elevation_deg: r.direction.elevation().to_degrees(),
            reference_doppler_hz: r.doppler,
            doppler_grid_hz: surface.doppler.clone(),
            angle_grid_deg: surface.angle.iter().map(|a| a.to_degrees()).collect(),
            degenerate_points: surface.degenerate_points,
            seed,
            sequence_sha256,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::Direction;
    use crate::switching::{hybrid_init, random_init};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TABLE: &str = "element,pol,azimuth_deg,elevation_deg,re,im
0,V,0,0,1,0
0,V,90,0,0,1
0,V,0,180,2,0
0,V,90,180,0,2
1,H,0,0,1,1
1,H,0,180,1,1
";

    #[test]
    fn pattern_table_parses() {
        let t = read_pattern_csv(TABLE.as_bytes()).unwrap();
        assert_eq!(t.grids.len(), 2);
        let g = &t.grids[&(0, Polarization::V)];
        assert_eq!(g.azimuth().len(), 2);
        assert_eq!(g.elevation().len(), 2);
        let p = t.patterns(1, Polarization::V).unwrap();
        let v = p[0].gain(&Direction::from_degrees(0.0, 180.0).unwrap()).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!(t.patterns(2, Polarization::V).is_err());
    }

    #[test]
    fn pattern_table_rejects_bad_input() {
        let bad_header = "element,pol,az,el,re,im\n0,V,0,0,1,0\n";
        assert!(matches!(read_pattern_csv(bad_header.as_bytes()), Err(Error::PatternTable(_))));
        let incomplete = "element,pol,azimuth_deg,elevation_deg,re,im\n0,V,0,0,1,0\n0,V,90,0,1,0\n0,V,0,180,1,0\n";
        assert!(matches!(read_pattern_csv(incomplete.as_bytes()), Err(Error::PatternTable(_))));
        let pol = "element,pol,azimuth_deg,elevation_deg,re,im\n0,X,0,0,1,0\n";
        assert!(matches!(read_pattern_csv(pol.as_bytes()), Err(Error::PatternTable(_))));
    }

    #[test]
    fn sequence_file_rejects_mismatch() {
        let text = r#"{"M": 3, "delta_t_s": 1e-5, "snapshots": 1, "order": [0, 1]}"#;
        assert!(sequence_from_json(text).is_err());
        let text = r#"{"M": 2, "delta_t_s": 1e-5, "snapshots": 1, "order": [0, 1], "extra": 1}"#;
        assert!(sequence_from_json(text).is_err());
    }

    #[test]
    fn hybrid_sequence_round_trip_on_disk() {
        let p = Partition::uniform(4, 3).unwrap();
        let s = hybrid_init(&p, 1.3e-5, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seq.json");
        write_sequence(&path, &s).unwrap();
        let back = read_sequence(&path).unwrap();
        assert_eq!(back, s);
        let path2 = dir.path().join("seq2.json");
        write_sequence(&path2, &back).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    proptest! {
        #[test]
        fn sequence_round_trip_is_bit_exact(seed in any::<u64>(), m in 1usize..40, dt in 1e-9f64..1.0, snaps in 1usize..4) {
            let s = random_init(m, dt, snaps, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let text = sequence_to_json(&s).unwrap();
            let back = sequence_from_json(&text).unwrap();
            prop_assert_eq!(back.delta_t().to_bits(), s.delta_t().to_bits());
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(sequence_to_json(&back).unwrap(), text);
        }
    }
}
