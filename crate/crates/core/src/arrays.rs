//! Antenna array geometries, element radiation patterns and array response
//! (steering) vectors.
//!
//! Coordinates are Cartesian in meters with z pointing up. A [`Direction`] is
//! given by azimuth (from the x axis towards y) and elevation measured from
//! zenith, so the horizon is at elevation pi/2. The response of element `m` to
//! a plane wave arriving from direction `u` is `g_m(u) * exp(j k <u, p_m>)`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::switching::Partition;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default carrier frequency in Hz (mmWave band).
pub const DEFAULT_CARRIER_HZ: f64 = 28.0e9;

/// Default synthetic patch exponent; gives a half-power beamwidth of about 65 degrees.
pub const DEFAULT_PATCH_EXPONENT: f64 = 2.0;

/// Gains with `cos(psi)` at or below this are treated as back hemisphere.
const BACK_HEMISPHERE_EPS: f64 = 1e-12;

pub type Vec3 = [f64; 3];

pub fn wavelength_from_carrier(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_hz
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Propagation direction (direction of arrival or departure).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    azimuth: f64,
    elevation: f64,
}

impl Direction {
    /// Azimuth is wrapped into `[0, 2pi)`; elevation must lie in `[0, pi]`.
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() || !elevation.is_finite() || !(0.0..=PI).contains(&elevation) {
            return Err(Error::InvalidDirection { azimuth, elevation });
        }
        let mut azimuth = azimuth.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if azimuth >= TAU {
            azimuth = 0.0;
        }
        Ok(Self { azimuth, elevation })
    }

    pub fn from_degrees(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        Self::new(azimuth_deg.to_radians(), elevation_deg.to_radians())
    }

    /// Direction in the horizontal plane.
    pub fn horizon(azimuth: f64) -> Result<Self> {
        Self::new(azimuth, PI / 2.0)
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    /// `(sin el cos az, sin el sin az, cos el)`
    pub fn unit_vector(&self) -> Vec3 {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        [se * ca, se * sa, ce]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    V,
    H,
}

/// Complex gain sampled on a rectangular (azimuth, elevation) grid.
///
/// Azimuth starts at 0 and stays below 2pi (interpolation wraps around);
/// elevation spans exactly `[0, pi]`. Gains are stored elevation-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid {
    azimuth: Vec<f64>,
    elevation: Vec<f64>,
    gains: Vec<Complex64>,
}

impl PatternGrid {
    pub fn new(azimuth: Vec<f64>, elevation: Vec<f64>, gains: Vec<Complex64>) -> Result<Self> {
        let strictly_increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if azimuth.is_empty() || elevation.len() < 2 {
            return Err(Error::PatternTable(
                "grid needs at least one azimuth and two elevation samples".into(),
            ));
        }
        if !strictly_increasing(&azimuth) || !strictly_increasing(&elevation) {
            return Err(Error::PatternTable("grid axes must be strictly increasing".into()));
        }
        if azimuth[0].abs() > 1e-9 || *azimuth.last().unwrap() >= TAU {
            return Err(Error::PatternTable("azimuth axis must cover [0, 360) degrees".into()));
        }
        if elevation[0].abs() > 1e-9 || (elevation.last().unwrap() - PI).abs() > 1e-9 {
            return Err(Error::PatternTable("elevation axis must cover [0, 180] degrees".into()));
        }
        if gains.len() != azimuth.len() * elevation.len() {
            return Err(Error::PatternTable(format!(
                "expected {} gain samples, got {}",
                azimuth.len() * elevation.len(),
                gains.len()
            )));
        }
        Ok(Self {
            azimuth,
            elevation,
            gains,
        })
    }

    pub fn azimuth(&self) -> &[f64] {
        &self.azimuth
    }

    pub fn elevation(&self) -> &[f64] {
        &self.elevation
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    fn at(&self, el: usize, az: usize) -> Complex64 {
        self.gains[el * self.azimuth.len() + az]
    }

    /// Bilinear interpolation of the complex gain, `None` outside the grid.
    pub fn interpolate(&self, azimuth: f64, elevation: f64) -> Option<Complex64> {
        let n_az = self.azimuth.len();
        if !(self.elevation[0]..=*self.elevation.last().unwrap()).contains(&elevation)
            || !(0.0..TAU).contains(&azimuth)
        {
            return None;
        }
        let j = match self.elevation.partition_point(|&e| e <= elevation) {
            0 => return None,
            j if j >= self.elevation.len() => self.elevation.len() - 2,
            j => j - 1,
        };
        let te = (elevation - self.elevation[j]) / (self.elevation[j + 1] - self.elevation[j]);

        let i = self.azimuth.partition_point(|&a| a <= azimuth).saturating_sub(1);
        let (i1, a0, a1) = if i + 1 < n_az {
            (i + 1, self.azimuth[i], self.azimuth[i + 1])
        } else {
            (0, self.azimuth[i], self.azimuth[0] + TAU)
        };
        let ta = if a1 > a0 { (azimuth - a0) / (a1 - a0) } else { 0.0 };

        let lo = self.at(j, i) * (1.0 - ta) + self.at(j, i1) * ta;
        let hi = self.at(j + 1, i) * (1.0 - ta) + self.at(j + 1, i1) * ta;
        Some(lo * (1.0 - te) + hi * te)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternKind {
    Omni,
    /// `max(0, cos psi)^exponent`, psi measured from `boresight` (unit vector).
    Patch { exponent: f64, boresight: Vec3 },
    Tabulated(Arc<PatternGrid>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementPattern {
    pub kind: PatternKind,
    pub polarization: Polarization,
}

impl ElementPattern {
    pub fn omni() -> Self {
        Self {
            kind: PatternKind::Omni,
            polarization: Polarization::V,
        }
    }

    pub fn patch(exponent: f64, boresight: Vec3) -> Result<Self> {
        if !(exponent >= 0.0) || !exponent.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "patch exponent must be finite and >= 0, got {exponent}"
            )));
        }
        let norm = dot(&boresight, &boresight).sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("patch boresight must be non-zero".into()));
        }
        Ok(Self {
            kind: PatternKind::Patch {
                exponent,
                boresight: [boresight[0] / norm, boresight[1] / norm, boresight[2] / norm],
            },
            polarization: Polarization::V,
        })
    }

    pub fn tabulated(grid: Arc<PatternGrid>, polarization: Polarization) -> Self {
        Self {
            kind: PatternKind::Tabulated(grid),
            polarization,
        }
    }

    /// Complex gain towards `dir`; `None` for out-of-grid tabulated queries.
    pub fn gain(&self, dir: &Direction) -> Option<Complex64> {
        match &self.kind {
            PatternKind::Omni => Some(Complex64::new(1.0, 0.0)),
            PatternKind::Patch {
                exponent,
                boresight,
            } => {
                let c = dot(&dir.unit_vector(), boresight);
                let g = if c <= BACK_HEMISPHERE_EPS { 0.0 } else { c.powf(*exponent) };
                Some(Complex64::new(g, 0.0))
            }
            PatternKind::Tabulated(grid) => grid.interpolate(dir.azimuth(), dir.elevation()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub position: Vec3,
    pub pattern: ElementPattern,
}

/// An antenna array: element positions and patterns plus the carrier wavelength.
///
/// Immutable after construction and `Sync`, so evaluation workers can share it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayModel {
    elements: Vec<Element>,
    wavelength: f64,
    partition: Option<Partition>,
}

impl ArrayModel {
    pub fn new(elements: Vec<Element>, wavelength: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument("array needs at least one element".into()));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self {
            elements,
            wavelength,
            partition: None,
        })
    }

    /// Attaches a natural subset partition (e.g. one subset per panel).
    pub fn with_partition(mut self, partition: Partition) -> Result<Self> {
        if partition.len() != self.len() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} antennas, array has {}",
                partition.len(),
                self.len()
            )));
        }
        self.partition = Some(partition);
        Ok(self)
    }

    /// Replaces the pattern of every element, e.g. with measured tables.
    pub fn with_patterns(mut self, patterns: Vec<ElementPattern>) -> Result<Self> {
        if patterns.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "got {} patterns for {} elements",
                patterns.len(),
                self.len()
            )));
        }
        for (e, p) in self.elements.iter_mut().zip(patterns) {
            e.pattern = p;
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    /// Pattern gain of every element towards `dir`.
    pub fn element_gains(&self, dir: &Direction) -> Result<Vec<Complex64>> {
        self.elements
            .iter()
            .enumerate()
            .map(|(m, e)| {
                e.pattern.gain(dir).ok_or(Error::OutOfGrid {
                    element: m,
                    azimuth_deg: dir.azimuth().to_degrees(),
                    elevation_deg: dir.elevation().to_degrees(),
                })
            })
            .collect()
    }
}

/// Uniform linear array of omni V-polarized elements on the x axis, centered
/// on the origin: element `m` sits at `x = (m - (M-1)/2) * spacing`.
pub fn make_ula(count: usize, spacing: f64, wavelength: f64) -> Result<ArrayModel> {
    if count == 0 {
        return Err(Error::InvalidArgument("ULA needs at least one element".into()));
    }
    if !(spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "element spacing must be positive, got {spacing}"
        )));
    }
    let center = (count as f64 - 1.0) / 2.0;
    let elements = (0..count)
        .map(|m| Element {
            position: [(m as f64 - center) * spacing, 0.0, 0.0],
            pattern: ElementPattern::omni(),
        })
        .collect();
    ArrayModel::new(elements, wavelength)
}

/// Ring of vertical rectangular panels (the octagonal sounder array and its
/// relatives).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRing {
    pub panels: usize,
    pub rows: usize,
    pub cols: usize,
    /// Element spacing in meters, both along a row and along a column.
    pub spacing: f64,
    /// Distance from the ring axis to each panel center. `None` makes adjacent
    /// panel edges touch.
    pub radius: Option<f64>,
    pub wavelength: f64,
    pub patch_exponent: f64,
}

impl Default for PanelRing {
    fn default() -> Self {
        let wavelength = wavelength_from_carrier(DEFAULT_CARRIER_HZ);
        Self {
            panels: 8,
            rows: 4,
            cols: 4,
            spacing: wavelength / 2.0,
            radius: None,
            wavelength,
            patch_exponent: DEFAULT_PATCH_EXPONENT,
        }
    }
}

impl PanelRing {
    pub fn contiguous_radius(&self) -> f64 {
        self.cols as f64 * self.spacing / (2.0 * (PI / self.panels as f64).tan())
    }

    /// Outward normal azimuth of panel `p`.
    pub fn panel_azimuth(&self, p: usize) -> f64 {
        TAU * p as f64 / self.panels as f64
    }
}

/// Builds a panel ring. Panel `p` faces outward at azimuth `2 pi p / panels`;
/// elements are ordered panel-major, then row (top first), then column.
/// The returned array carries the panel partition.
pub fn make_octagonal(ring: &PanelRing) -> Result<ArrayModel> {
    if ring.panels < 3 {
        return Err(Error::InvalidArgument(format!(
            "a panel ring needs at least 3 panels, got {}",
            ring.panels
        )));
    }
    if ring.rows * ring.cols == 0 {
        return Err(Error::InvalidArgument("panels need at least one element".into()));
    }
    if !(ring.spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "element spacing must be positive, got {}",
            ring.spacing
        )));
    }
    let radius = ring.radius.unwrap_or_else(|| ring.contiguous_radius());
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }

    let per_panel = ring.rows * ring.cols;
    let col_center = (ring.cols as f64 - 1.0) / 2.0;
    let row_center = (ring.rows as f64 - 1.0) / 2.0;
    let mut elements = Vec::with_capacity(ring.panels * per_panel);
    for p in 0..ring.panels {
        let (s, c) = ring.panel_azimuth(p).sin_cos();
        let normal = [c, s, 0.0];
        let tangent = [-s, c, 0.0];
        let pattern = ElementPattern::patch(ring.patch_exponent, normal)?;
        for r in 0..ring.rows {
            let z = (row_center - r as f64) * ring.spacing;
            for col in 0..ring.cols {
                let t = (col as f64 - col_center) * ring.spacing;
                elements.push(Element {
                    position: [
                        radius * normal[0] + t * tangent[0],
                        radius * normal[1] + t * tangent[1],
                        z,
                    ],
                    pattern: pattern.clone(),
                });
            }
        }
    }
    let partition = Partition::uniform(ring.panels, per_panel)?;
    ArrayModel::new(elements, ring.wavelength)?.with_partition(partition)
}

/// Array response vector towards `dir`.
pub fn steering_vector(array: &ArrayModel, dir: &Direction) -> Result<Vec<Complex64>> {
    let u = dir.unit_vector();
    let k = array.wavenumber();
    let gains = array.element_gains(dir)?;
    Ok(array
        .elements()
        .iter()
        .zip(gains)
        .map(|(e, g)| g * Complex64::cis(k * dot(&u, &e.position)))
        .collect())
}

/// Indices of elements whose power towards `dir` is within `threshold_db`
/// (<= 0) of the strongest element.
pub fn effective_elements(
    array: &ArrayModel,
    dir: &Direction,
    threshold_db: f64,
) -> Result<Vec<usize>> {
    if !(threshold_db <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "power threshold must be <= 0 dB, got {threshold_db}"
        )));
    }
    let power: Vec<f64> = array.element_gains(dir)?.iter().map(|g| g.norm_sqr()).collect();
    let max = power.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(Vec::new());
    }
    let floor = max * 10f64.powf(threshold_db / 10.0);
    Ok(power
        .iter()
        .enumerate()
        .filter(|(_, &p)| p >= floor)
        .map(|(m, _)| m)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const LAMBDA: f64 = 1.0;

    #[test]
    fn ula_positions_are_centered() {
        let a = make_ula(2, LAMBDA / 2.0, LAMBDA).unwrap();
        assert_abs_diff_eq!(a.elements()[0].position[0], -0.25);
        assert_abs_diff_eq!(a.elements()[1].position[0], 0.25);

        let single = make_ula(1, LAMBDA / 2.0, LAMBDA).unwrap();
        assert_eq!(single.elements()[0].position, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn ula_rejects_bad_input() {
        assert!(make_ula(0, 0.5, 1.0).is_err());
        assert!(make_ula(4, 0.0, 1.0).is_err());
        assert!(make_ula(4, 0.5, -1.0).is_err());
    }

    #[test]
    fn broadside_ula_is_all_ones() {
        for m in [4, 8] {
            let a = make_ula(m, LAMBDA / 2.0, LAMBDA).unwrap();
            let dir = Direction::from_degrees(90.0, 90.0).unwrap();
            for v in steering_vector(&a, &dir).unwrap() {
                assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn endfire_two_element_phases() {
        // mu = pi cos 0 = pi, element phases -mu/2 and +mu/2
        let a = make_ula(2, LAMBDA / 2.0, LAMBDA).unwrap();
        let dir = Direction::from_degrees(0.0, 90.0).unwrap();
        let v = steering_vector(&a, &dir).unwrap();
        let expect = [Complex64::cis(-PI / 2.0), Complex64::cis(PI / 2.0)];
        for (got, want) in v.iter().zip(expect) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn octagon_layout_and_partition() {
        let a = make_octagonal(&PanelRing::default()).unwrap();
        assert_eq!(a.len(), 128);
        let part = a.partition().unwrap();
        assert_eq!(part.subsets().len(), 8);
        assert!(part.subsets().iter().all(|s| s.len() == 16));
        // panel-major: first 16 elements all face azimuth 0
        for e in &a.elements()[..16] {
            match &e.pattern.kind {
                PatternKind::Patch { boresight, .. } => {
                    assert_abs_diff_eq!(boresight[0], 1.0, epsilon = 1e-12)
                }
                _ => panic!("expected patch"),
            }
        }
    }

    #[test]
    fn octagon_rejects_bad_geometry() {
        let bad = |f: fn(&mut PanelRing)| {
            let mut r = PanelRing::default();
            f(&mut r);
            make_octagonal(&r).is_err()
        };
        assert!(bad(|r| r.panels = 2));
        assert!(bad(|r| r.radius = Some(0.0)));
        assert!(bad(|r| r.spacing = -1.0));
        assert!(bad(|r| r.rows = 0));
    }

    #[test]
    fn back_facing_panels_are_silent() {
        let a = make_octagonal(&PanelRing::default()).unwrap();
        let dir = Direction::from_degrees(0.0, 90.0).unwrap();
        let v = steering_vector(&a, &dir).unwrap();
        // panels 2..=6 face 90..270 degrees away
        for p in 2..=6 {
            for m in 16 * p..16 * (p + 1) {
                assert_eq!(v[m].norm(), 0.0, "element {m}");
            }
        }
        assert!(v[0].norm() > 0.99);
    }

    #[test]
    fn square_ring_of_ulas() {
        let ring = PanelRing {
            panels: 4,
            rows: 1,
            cols: 8,
            spacing: 0.5,
            radius: None,
            wavelength: 1.0,
            patch_exponent: 0.0,
        };
        let a = make_octagonal(&ring).unwrap();
        assert_eq!(a.len(), 32);
        // side 1 faces +y
        let dir = Direction::from_degrees(90.0, 90.0).unwrap();
        assert_eq!(effective_elements(&a, &dir, -3.0).unwrap(), (8..16).collect::<Vec<_>>());
    }

    #[test]
    fn effective_elements_counts() {
        let ula = make_ula(8, 0.5, 1.0).unwrap();
        let dir = Direction::from_degrees(33.0, 70.0).unwrap();
        assert_eq!(effective_elements(&ula, &dir, -3.0).unwrap().len(), 8);
        assert!(effective_elements(&ula, &dir, 1.0).is_err());

        // panel 0 boresight: neighbors at 45 degrees are cos^4(45) = -6 dB,
        // panels at 90 degrees get exactly zero
        let oct = make_octagonal(&PanelRing::default()).unwrap();
        let dir = Direction::from_degrees(0.0, 90.0).unwrap();
        let eff = effective_elements(&oct, &dir, -10.0).unwrap();
        assert_eq!(eff.len(), 48);
        let expect: Vec<usize> = (0..32).chain(112..128).collect();
        assert_eq!(eff, expect);
        assert_eq!(effective_elements(&oct, &dir, -5.0).unwrap().len(), 16);
    }

    #[test]
    fn patch_gain_values() {
        let p = ElementPattern::patch(2.0, [1.0, 0.0, 0.0]).unwrap();
        let g = |az: f64| p.gain(&Direction::from_degrees(az, 90.0).unwrap()).unwrap().re;
        assert_abs_diff_eq!(g(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g(60.0), 0.25, epsilon = 1e-12);
        assert_eq!(g(90.0), 0.0);
        assert_eq!(g(135.0), 0.0);
        assert!(ElementPattern::patch(-1.0, [1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn tabulated_interpolation() {
        let az: Vec<f64> = (0..4).map(|i| (i as f64 * 90.0).to_radians()).collect();
        let el: Vec<f64> = (0..3).map(|i| (i as f64 * 90.0).to_radians()).collect();
        // gain = azimuth index + 10 * elevation index
        let gains = (0..3)
            .flat_map(|j| (0..4).map(move |i| Complex64::new(i as f64 + 10.0 * j as f64, 1.0)))
            .collect();
        let grid = PatternGrid::new(az, el, gains).unwrap();
        let g = grid.interpolate(45f64.to_radians(), 45f64.to_radians()).unwrap();
        assert_abs_diff_eq!(g.re, 5.5, epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, 1.0, epsilon = 1e-12);
        // wrap between 270 and 360
        let g = grid.interpolate(315f64.to_radians(), 90f64.to_radians()).unwrap();
        assert_abs_diff_eq!(g.re, 11.5, epsilon = 1e-12);
        assert!(grid.interpolate(0.1, 3.5).is_none());
    }

    #[test]
    fn pattern_grid_validation() {
        let el = vec![0.0, PI];
        assert!(PatternGrid::new(vec![0.0, 0.0], el.clone(), vec![Complex64::default(); 4]).is_err());
        assert!(PatternGrid::new(vec![0.5], el.clone(), vec![Complex64::default(); 2]).is_err());
        assert!(PatternGrid::new(vec![0.0], vec![0.0, 1.0], vec![Complex64::default(); 2]).is_err());
        assert!(PatternGrid::new(vec![0.0], el.clone(), vec![Complex64::default(); 3]).is_err());
        assert!(PatternGrid::new(vec![0.0], el, vec![Complex64::default(); 2]).is_ok());
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(0.0, -0.1).is_err());
        assert!(Direction::new(f64::NAN, 1.0).is_err());
        let d = Direction::new(-0.5, 1.0).unwrap();
        assert!(d.azimuth() >= 0.0 && d.azimuth() < TAU);
    }

    fn arb_array() -> impl Strategy<Value = ArrayModel> {
        prop_oneof![
            (1usize..20, 0.1f64..1.0).prop_map(|(m, d)| make_ula(m, d, 1.0).unwrap()),
            (3usize..9, 1usize..3, 1usize..4, 0.0f64..3.0).prop_map(|(p, r, c, q)| {
                make_octagonal(&PanelRing {
                    panels: p,
                    rows: r,
                    cols: c,
                    spacing: 0.5,
                    radius: None,
                    wavelength: 1.0,
                    patch_exponent: q,
                })
                .unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn steering_magnitude_equals_gain(a in arb_array(), az in 0.0..TAU, el in 0.0..PI) {
            let dir = Direction::new(az, el).unwrap();
            let v = steering_vector(&a, &dir).unwrap();
            let g = a.element_gains(&dir).unwrap();
            for (x, y) in v.iter().zip(g) {
                prop_assert!((x.norm() - y.norm()).abs() < 1e-12);
            }
        }

        #[test]
        fn steering_is_azimuth_periodic(a in arb_array(), az in 0.0..TAU, el in 0.0..PI) {
            let v0 = steering_vector(&a, &Direction::new(az, el).unwrap()).unwrap();
            let v1 = steering_vector(&a, &Direction::new(az + TAU, el).unwrap()).unwrap();
            for (x, y) in v0.iter().zip(v1) {
                prop_assert!((x - y).norm() < 1e-9);
            }
        }

        #[test]
        fn ula_steering_conjugate_symmetric(m in 1usize..32, az in 0.0..TAU, el in 0.0..PI) {
            let a = make_ula(m, 0.5, 1.0).unwrap();
            let v = steering_vector(&a, &Direction::new(az, el).unwrap()).unwrap();
            for i in 0..m {
                prop_assert!((v[i] - v[m - 1 - i].conj()).norm() < 1e-12);
            }
        }

        #[test]
        fn ring_element_count(p in 3usize..10, r in 1usize..5, c in 1usize..5) {
            let a = make_octagonal(&PanelRing { panels: p, rows: r, cols: c, ..PanelRing::default() }).unwrap();
            prop_assert_eq!(a.len(), p * r * c);
            let part = a.partition().unwrap();
            for (i, s) in part.subsets().iter().enumerate() {
                prop_assert_eq!(s.clone(), i * r * c..(i + 1) * r * c);
            }
        }
    }
}
