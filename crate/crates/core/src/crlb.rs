//! Cramer-Rao bounds for azimuth and Doppler of a single narrowband path.
//!
//! Two routes are provided. The closed forms assume an omni ULA and a
//! diagonal Fisher information matrix. The numeric route builds the Jacobian
//! of the noise-free mean `s = r e^{j psi} (b_RV . a_nu)` by central finite
//! differences, forms `F = 2/sigma^2 Re(D^H D)` and inverts it in full, so it
//! is independent of the closed forms and also shows how far from diagonal
//! the FIM is for a given sequence.
//!
//! The path is assumed to arrive in the horizontal plane (elevation pi/2).

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arrays::{ArrayModel, Direction};
use crate::error::{Error, Result};
use crate::signal::{basis, ReceiveParams};
use crate::switching::SwitchingSequence;

pub const PARAM_NAMES: [&str; 4] = ["phi", "nu", "r", "psi"];

/// Below this eigenvalue of the diagonally normalized FIM the matrix is
/// reported as singular.
const SINGULAR_EIGENVALUE: f64 = 1e-8;

/// `[phi, nu, r, psi]`: azimuth (rad), Doppler (Hz), amplitude, phase (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub phi: f64,
    pub nu: f64,
    pub r: f64,
    pub psi: f64,
}

impl ParamVector {
    pub fn new(phi: f64, nu: f64, r: f64, psi: f64) -> Result<Self> {
        if !(r > 0.0) || ![phi, nu, r, psi].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "parameters must be finite with r > 0, got phi={phi} nu={nu} r={r} psi={psi}"
            )));
        }
        Ok(Self { phi, nu, r, psi })
    }

    fn as_array(&self) -> [f64; 4] {
        [self.phi, self.nu, self.r, self.psi]
    }

    fn from_array(v: [f64; 4]) -> Self {
        Self {
            phi: v[0],
            nu: v[1],
            r: v[2],
            psi: v[3],
        }
    }
}

/// Closed-form AOA bound for an omni ULA:
/// `6 sigma^2 / (r^2 M (M^2 - 1)) * (lambda / (2 pi d sin phi))^2`.
pub fn crlb_aoa(
    elements: usize,
    spacing: f64,
    wavelength: f64,
    phi: f64,
    r: f64,
    sigma: f64,
) -> Result<f64> {
    if elements < 2 {
        return Err(Error::InvalidArgument(format!(
            "AOA bound needs at least 2 elements, got {elements}"
        )));
    }
    if !(spacing > 0.0 && wavelength > 0.0 && r > 0.0 && sigma >= 0.0) {
        return Err(Error::InvalidArgument(
            "spacing, wavelength and r must be positive, sigma non-negative".into(),
        ));
    }
    let s = phi.sin();
    if s.abs() < 1e-12 {
        return Err(Error::EndfireSingularity { phi });
    }
    let m = elements as f64;
    let geom = wavelength / (2.0 * PI * spacing * s);
    Ok(sigma * sigma * 6.0 / (r * r * m * (m * m - 1.0)) * geom * geom)
}

/// Closed-form Doppler bound `(1/8) (sigma / (r pi |eta|))^2`; `eta` is
/// centered before taking its norm.
pub fn crlb_doppler(eta: &[f64], r: f64, sigma: f64) -> Result<f64> {
    if !(r > 0.0 && sigma >= 0.0) {
        return Err(Error::InvalidArgument("r must be positive, sigma non-negative".into()));
    }
    let norm = centered_norm(eta);
    if !(norm > 0.0) {
        return Err(Error::UnobservableDoppler);
    }
    Ok((sigma / (r * PI * norm)).powi(2) / 8.0)
}

fn centered_norm(eta: &[f64]) -> f64 {
    if eta.is_empty() {
        return 0.0;
    }
    let mean = eta.iter().sum::<f64>() / eta.len() as f64;
    eta.iter().map(|e| (e - mean).powi(2)).sum::<f64>().sqrt()
}

/// Noise-free mean signal for a path arriving in the horizontal plane.
pub fn mean_signal(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    theta: &ParamVector,
) -> Result<Vec<Complex64>> {
    let dir = Direction::new(theta.phi, FRAC_PI_2)?;
    let gamma = Complex64::from_polar(theta.r, theta.psi);
    Ok(basis(array, seq, &ReceiveParams::new(dir, theta.nu))?
        .into_iter()
        .map(|b| gamma * b)
        .collect())
}

/// Central-difference steps `(phi, nu, r, psi)`.
pub fn fd_steps(seq: &SwitchingSequence, theta: &ParamVector) -> [f64; 4] {
    let eta_norm = centered_norm(&seq.eta_vector(true));
    let nu_step = if eta_norm > 0.0 {
        1e-3 / eta_norm
    } else {
        1e-3 / seq.delta_t()
    };
    [1e-6, nu_step, 1e-6 * theta.r, 1e-6]
}

/// Fisher information matrix from the finite-difference Jacobian.
pub fn fisher_information(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    theta: &ParamVector,
    sigma: f64,
) -> Result<Matrix4<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let steps = fd_steps(seq, theta);
    let base = theta.as_array();
    let mut columns = Vec::with_capacity(4);
    for (k, h) in steps.iter().enumerate() {
        let mut plus = base;
        let mut minus = base;
        plus[k] += h;
        minus[k] -= h;
        let sp = mean_signal(array, seq, &ParamVector::from_array(plus))?;
        let sm = mean_signal(array, seq, &ParamVector::from_array(minus))?;
        let col: Vec<Complex64> = sp.iter().zip(&sm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        columns.push(col);
    }
    let mut f = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let v: f64 = columns[i]
                .iter()
                .zip(&columns[j])
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>()
                * 2.0
                / (sigma * sigma);
            f[(i, j)] = v;
            f[(j, i)] = v;
        }
    }
    Ok(f)
}

/// Bounds from the numeric FIM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrlbResult {
    /// Full-inverse variances.
    pub var_phi: f64,
    pub var_nu: f64,
    pub var_r: f64,
    pub var_psi: f64,
    /// Reciprocal-diagonal variances `1 / F_ii` (diagonal-FIM shortcut).
    pub diagonal_var: [f64; 4],
    pub fim: [[f64; 4]; 4],
    /// Largest `|F_ij| / sqrt(F_ii F_jj)` over `i != j`.
    pub off_diag_ratio: f64,
}

/// `max |F_ij| / sqrt(F_ii F_jj)`, the largest parameter coupling.
pub fn off_diagonal_ratio(f: &Matrix4<f64>) -> f64 {
    let mut ratio: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                ratio = ratio.max(f[(i, j)].abs() / (f[(i, i)] * f[(j, j)]).sqrt());
            }
        }
    }
    ratio
}

fn describe_combination(v: &[f64]) -> String {
    let mut terms: Vec<(usize, f64)> = v.iter().cloned().enumerate().filter(|(_, c)| c.abs() > 1e-3).collect();
    terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    let sign = if terms.first().map_or(1.0, |t| t.1.signum()) < 0.0 { -1.0 } else { 1.0 };
    terms
        .iter()
        .map(|(i, c)| format!("{:+.3}*{}", sign * c, PARAM_NAMES[*i]))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Inverts a FIM. Singularity is judged on the diagonally normalized matrix
/// so that parameter units do not matter; the reported combination is in
/// normalized coordinates.
pub fn invert_fim(f: &Matrix4<f64>) -> Result<CrlbResult> {
    let f = (f + f.transpose()) * 0.5;
    let diag: Vec<f64> = (0..4).map(|i| f[(i, i)]).collect();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::SingularFim {
            combination: format!("{:+.3}*{}", 1.0, PARAM_NAMES[i]),
        });
    }
    let scale = Matrix4::from_fn(|i, j| if i == j { 1.0 / diag[i].sqrt() } else { 0.0 });
    let normalized = scale * f * scale;
    let eig = SymmetricEigen::new(normalized);
    let (k, min) = eig
        .eigenvalues
        .iter()
        .cloned()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    if min < SINGULAR_EIGENVALUE {
        let v: Vec<f64> = eig.eigenvectors.column(k).iter().cloned().collect();
        return Err(Error::SingularFim {
            combination: describe_combination(&v),
        });
    }
    let inv = scale
        * normalized
            .try_inverse()
            .ok_or_else(|| Error::Numeric("FIM inversion failed".into()))?
        * scale;
    let mut fim = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            fim[i][j] = f[(i, j)];
        }
    }
    Ok(CrlbResult {
        var_phi: inv[(0, 0)],
        var_nu: inv[(1, 1)],
        var_r: inv[(2, 2)],
        var_psi: inv[(3, 3)],
        diagonal_var: [1.0 / diag[0], 1.0 / diag[1], 1.0 / diag[2], 1.0 / diag[3]],
        fim,
        off_diag_ratio: off_diagonal_ratio(&f),
    })
}

/// Numeric CRLBs (finite-difference Jacobian, full FIM inverse).
pub fn fim_numeric(
    array: &ArrayModel,
    seq: &SwitchingSequence,
    theta: &ParamVector,
    sigma: f64,
) -> Result<CrlbResult> {
    invert_fim(&fisher_information(array, seq, theta, sigma)?)
}

/// Analytic `(F_rr, F_psipsi)` for the given direction:
/// `2 M_t sum|g|^2 / sigma^2` and `r^2` times that.
pub fn gain_information(
    array: &ArrayModel,
    snapshots: usize,
    theta: &ParamVector,
    sigma: f64,
) -> Result<(f64, f64)> {
    let dir = Direction::new(theta.phi, FRAC_PI_2)?;
    let power: f64 = array.element_gains(&dir)?.iter().map(|g| g.norm_sqr()).sum();
    let f_rr = 2.0 * snapshots as f64 * power / (sigma * sigma);
    Ok((f_rr, theta.r * theta.r * f_rr))
}

/// Closed-form and numeric bounds side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrlbReport {
    pub params: ReportParams,
    pub closed_form: ClosedForm,
    pub numeric: Option<NumericBounds>,
    pub off_diag_ratio: Option<f64>,
    /// Closed forms within 1% of the numeric variances.
    pub agreement: Option<bool>,
    /// Set when a bound could not be computed (endfire, singular FIM, ...).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub phi_rad: f64,
    pub nu_hz: f64,
    pub r: f64,
    pub psi_rad: f64,
    pub sigma: f64,
    pub elements: usize,
    pub spacing_m: f64,
    pub wavelength_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub var_phi: Option<f64>,
    pub var_nu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericBounds {
    pub var_phi: f64,
    pub var_nu: f64,
    pub var_r: f64,
    pub var_psi: f64,
}

/// Relative tolerance used for the `agreement` flag.
pub const AGREEMENT_TOLERANCE: f64 = 0.01;

/// Builds a report for an omni ULA; bound failures are captured in `error`
/// rather than returned.
pub fn crlb_report(
    array: &ArrayModel,
    spacing: f64,
    seq: &SwitchingSequence,
    theta: &ParamVector,
    sigma: f64,
) -> CrlbReport {
    let params = ReportParams {
        phi_rad: theta.phi,
        nu_hz: theta.nu,
        r: theta.r,
        psi_rad: theta.psi,
        sigma,
        elements: array.len(),
        spacing_m: spacing,
        wavelength_m: array.wavelength(),
    };
    let mut errors = Vec::new();
    let var_phi = crlb_aoa(array.len(), spacing, array.wavelength(), theta.phi, theta.r, sigma)
        .map_err(|e| errors.push(e.to_string()))
        .ok();
    let var_nu = crlb_doppler(&seq.eta_vector(true), theta.r, sigma)
        .map_err(|e| errors.push(e.to_string()))
        .ok();
    let numeric = fim_numeric(array, seq, theta, sigma)
        .map_err(|e| errors.push(e.to_string()))
        .ok();
    let agreement = match (&numeric, var_phi, var_nu) {
        (Some(n), Some(p), Some(v)) => Some(
            (p / n.var_phi - 1.0).abs() < AGREEMENT_TOLERANCE
                && (v / n.var_nu - 1.0).abs() < AGREEMENT_TOLERANCE,
        ),
        _ => None,
    };
    CrlbReport {
        params,
        closed_form: ClosedForm { var_phi, var_nu },
        off_diag_ratio: numeric.as_ref().map(|n| n.off_diag_ratio),
        numeric: numeric.map(|n| NumericBounds {
            var_phi: n.var_phi,
            var_nu: n.var_nu,
            var_r: n.var_r,
            var_psi: n.var_psi,
        }),
        agreement,
        error: if errors.is_empty() { None } else { Some(errors.join("; ")) },
    }
}
