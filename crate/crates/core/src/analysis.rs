//! Post-processing of ambiguity surfaces: half-power widths, sidelobe scan,
//! effective factor and the three-scheme comparison.

use serde::{Deserialize, Serialize};

use crate::ambiguity::{
    ambiguity_surface, to_db, AmbiguitySurface, AngleAxis, ObjectiveConfig, ObjectiveEvaluator,
    Region,
};
use crate::arrays::{effective_elements, ArrayModel, Direction};
use crate::crlb::crlb_doppler;
use crate::error::{Error, Result};
use crate::signal::ReceiveParams;
use crate::switching::SwitchingSequence;

/// `20 log10(1/sqrt(2))`.
pub const HALF_POWER_DB: f64 = -3.010_299_956_639_812;

/// Default effective-element threshold relative to the strongest element.
pub const DEFAULT_EFFECTIVE_THRESHOLD_DB: f64 = -10.0;

/// Surface axis along which a width is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Along {
    Doppler,
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthAxis {
    Doppler,
    Eoa,
    Aoa,
}

/// Half-power interval; Hz for Doppler, degrees for angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub axis: WidthAxis,
    pub lower: f64,
    pub upper: f64,
    pub method: String,
}

impl WidthReport {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Contiguous interval around the surface peak where `|X|` stays at or above
/// half power, along one axis through the peak. Crossings are interpolated
/// linearly in dB between neighboring grid samples.
pub fn half_power_width(surface: &AmbiguitySurface, along: Along) -> Result<WidthReport> {
    let (pd, pa) = surface.peak();
    let (coords, values, peak, axis, to_unit): (&[f64], Vec<f64>, usize, WidthAxis, fn(f64) -> f64) = match along {
        Along::Doppler => (
            &surface.doppler,
            (0..surface.doppler.len()).map(|i| surface.db(i, pa)).collect(),
            pd,
            WidthAxis::Doppler,
            |x| x,
        ),
        Along::Angle => (
            &surface.angle,
            (0..surface.angle.len()).map(|j| surface.db(pd, j)).collect(),
            pa,
            match surface.axis {
                AngleAxis::Eoa => WidthAxis::Eoa,
                AngleAxis::Aoa => WidthAxis::Aoa,
            },
            f64::to_degrees,
        ),
    };
    let clipped = || Error::GridTooNarrow {
        axis: format!("{axis:?}").to_lowercase(),
    };
    let crossing = |inside: usize, outside: usize| {
        let (d0, d1) = (values[inside], values[outside]);
        let t = (HALF_POWER_DB - d0) / (d1 - d0);
        coords[inside] + t * (coords[outside] - coords[inside])
    };
    let upper = (peak + 1..values.len())
        .find(|&k| values[k] < HALF_POWER_DB)
        .map(|k| crossing(k - 1, k))
        .ok_or_else(clipped)?;
    let lower = (0..peak)
        .rev()
        .find(|&k| values[k] < HALF_POWER_DB)
        .map(|k| crossing(k + 1, k))
        .ok_or_else(clipped)?;
    Ok(WidthReport {
        axis,
        lower: to_unit(lower),
        upper: to_unit(upper),
        method: "half-power crossing, linear interpolation in dB".into(),
    })
}

/// Fraction of elements within `threshold_db` of the strongest one.
pub fn effective_factor(array: &ArrayModel, dir: &Direction, threshold_db: f64) -> Result<f64> {
    Ok(effective_elements(array, dir, threshold_db)?.len() as f64 / array.len() as f64)
}

/// A local maximum of `|X|` outside the main lobe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    pub delta_doppler_hz: f64,
    pub angle_deg: f64,
    pub magnitude: f64,
}

/// Main-lobe box `[doppler lo, hi] x [angle lo, hi]` (Hz, rad) spanned by the
/// half-power widths through the peak. An axis whose lobe is clipped by the
/// grid is excluded entirely.
pub fn main_lobe_box(surface: &AmbiguitySurface) -> ((f64, f64), (f64, f64)) {
    let full = |g: &[f64]| (g[0], g[g.len() - 1]);
    let d = half_power_width(surface, Along::Doppler)
        .map(|w| (w.lower, w.upper))
        .unwrap_or_else(|_| full(&surface.doppler));
    let a = half_power_width(surface, Along::Angle)
        .map(|w| (w.lower.to_radians(), w.upper.to_radians()))
        .unwrap_or_else(|_| full(&surface.angle));
    (d, a)
}

/// Local maxima outside the main-lobe box, strongest first. A grid point is
/// a local maximum when it is no smaller than any of its 8 neighbors and
/// strictly larger than at least one.
pub fn alias_scan(surface: &AmbiguitySurface) -> Vec<Lobe> {
    let ((d_lo, d_hi), (a_lo, a_hi)) = main_lobe_box(surface);
    let nd = surface.doppler.len();
    let na = surface.angle.len();
    let mut lobes = Vec::new();
    for j in 0..na {
        for i in 0..nd {
            let (x, y) = (surface.doppler[i], surface.angle[j]);
            if (d_lo..=d_hi).contains(&x) && (a_lo..=a_hi).contains(&y) {
                continue;
            }
            let v = surface.get(i, j);
            let mut dominates_one = false;
            let mut is_max = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= nd as i64 || jj >= na as i64 {
                        continue;
                    }
                    let n = surface.get(ii as usize, jj as usize);
                    if n > v {
                        is_max = false;
                    } else if n < v {
                        dominates_one = true;
                    }
                }
            }
            if is_max && dominates_one {
                lobes.push(Lobe {
                    delta_doppler_hz: x,
                    angle_deg: y.to_degrees(),
                    magnitude: v,
                });
            }
        }
    }
    lobes.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    lobes
}

/// Peak sidelobe level (linear); 0 when there is no sidelobe.
pub fn peak_sidelobe(surface: &AmbiguitySurface) -> f64 {
    alias_scan(surface).first().map_or(0.0, |l| l.magnitude)
}

/// Sweep grids shared by all schemes of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrids {
    pub axis: AngleAxis,
    /// Hz.
    pub doppler: Vec<f64>,
    /// Radians.
    pub angle: Vec<f64>,
}

/// Settings of a three-scheme comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSettings {
    pub reference: ReceiveParams,
    pub grids: SweepGrids,
    pub threshold_db: f64,
    pub region: Region,
    pub objective: ObjectiveConfig,
    /// Path amplitude and noise level for the Doppler bounds.
    pub amplitude: f64,
    pub noise_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub name: String,
    pub objective: f64,
    pub doppler_width: Option<WidthReport>,
    pub angle_width: Option<WidthReport>,
    pub psl: f64,
    pub psl_db: f64,
    /// Doppler bound over the whole centered sequence.
    pub crlb_nu_full: f64,
    /// Doppler bound over the effective elements, centered among themselves.
    pub crlb_nu_effective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub reference_azimuth_deg: f64,
    pub reference_elevation_deg: f64,
    pub effective_elements: usize,
    pub xi: f64,
    pub inverse_xi: f64,
    pub schemes: Vec<SchemeReport>,
    /// Hybrid over random half-power Doppler width.
    pub broadening_ratio: Option<f64>,
    /// Hybrid over random half-power angle width.
    pub angle_width_ratio: Option<f64>,
    /// Hybrid over random effective Doppler bound.
    pub crlb_nu_ratio: f64,
    /// Sequential PSL over random PSL, in dB.
    pub psl_reduction_db: f64,
}

/// Sequences compared by [`compare_schemes`].
pub struct SchemeSet<'a> {
    pub sequential: &'a SwitchingSequence,
    pub random: &'a SwitchingSequence,
    pub hybrid: &'a SwitchingSequence,
}

/// Evaluates sequential, random and hybrid sequences on common grids.
/// Returns the report and the three surfaces in that order.
pub fn compare_schemes(
    array: &ArrayModel,
    set: &SchemeSet<'_>,
    settings: &CompareSettings,
) -> Result<(ComparisonReport, Vec<AmbiguitySurface>)> {
    let seqs = [
        ("sequential", set.sequential),
        ("random", set.random),
        ("hybrid", set.hybrid),
    ];
    let first = set.sequential;
    if seqs
        .iter()
        .any(|(_, s)| s.len() != first.len() || s.delta_t() != first.delta_t() || s.snapshots() != first.snapshots())
    {
        return Err(Error::InvalidArgument(
            "compared sequences must share element count, slot period and snapshots".into(),
        ));
    }
    let dir = settings.reference.direction;
    let effective = effective_elements(array, &dir, settings.threshold_db)?;
    let xi = effective.len() as f64 / array.len() as f64;
    let evaluator = ObjectiveEvaluator::new(array, &settings.region, &settings.objective)?;

    let mut reports = Vec::with_capacity(3);
    let mut surfaces = Vec::with_capacity(3);
    for (name, seq) in seqs {
        let surface = ambiguity_surface(
            array,
            seq,
            settings.reference,
            &settings.grids.doppler,
            settings.grids.axis,
            &settings.grids.angle,
        )?;
        let psl = peak_sidelobe(&surface);
        reports.push(SchemeReport {
            name: name.to_string(),
            objective: evaluator.evaluate(seq)?.value,
            doppler_width: half_power_width(&surface, Along::Doppler).ok(),
            angle_width: half_power_width(&surface, Along::Angle).ok(),
            psl,
            psl_db: to_db(psl),
            crlb_nu_full: crlb_doppler(&seq.eta_vector(true), settings.amplitude, settings.noise_sigma)?,
            crlb_nu_effective: crlb_doppler(
                &seq.eta_subset(&effective, true),
                settings.amplitude,
                settings.noise_sigma,
            )?,
        });
        surfaces.push(surface);
    }

    let width_ratio = |f: fn(&SchemeReport) -> Option<&WidthReport>| match (f(&reports[2]), f(&reports[1])) {
        (Some(h), Some(r)) => Some(h.width() / r.width()),
        _ => None,
    };
    let report = ComparisonReport {
        reference_azimuth_deg: dir.azimuth().to_degrees(),
        reference_elevation_deg: dir.elevation().to_degrees(),
        effective_elements: effective.len(),
        xi,
        inverse_xi: 1.0 / xi,
        broadening_ratio: width_ratio(|r| r.doppler_width.as_ref()),
        angle_width_ratio: width_ratio(|r| r.angle_width.as_ref()),
        crlb_nu_ratio: reports[2].crlb_nu_effective / reports[1].crlb_nu_effective,
        psl_reduction_db: reports[0].psl_db - reports[1].psl_db,
        schemes: reports,
    };
    Ok((report, surfaces))
}
