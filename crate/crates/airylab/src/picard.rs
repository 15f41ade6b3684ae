//! The contraction scheme made executable: the Duhamel map, Picard iteration
//! to its fixed point with honest convergence diagnostics, and the (rho, T)
//! ball/horizon selection rules of the unweighted and weighted schemes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AiryError, Result};
use crate::evolution::nonlinearity_spectrum;
use crate::grid::{SpaceField, SpaceTimeField, TimeGrid};
use crate::norms::{sobolev_norm, weighted_l2, xt_norm, yt_norm};
use crate::spectral::{airy_orbit, fft_forward, fft_inverse};

/// Norm the Picard increments are measured in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "r")]
pub enum NormKind {
    #[serde(rename = "yt")]
    Yt,
    #[serde(rename = "xt")]
    Xt(f64),
}

impl NormKind {
    pub fn evaluate(&self, u: &SpaceTimeField) -> Result<f64> {
        match self {
            NormKind::Yt => Ok(yt_norm(u)),
            NormKind::Xt(r) => xt_norm(u, *r),
        }
    }
}

/// Per-iteration increments and the empirical contraction record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PicardDiagnostics {
    pub increments: Vec<f64>,
    pub contraction_factors: Vec<f64>,
    pub norm_kind: NormKind,
    pub converged: bool,
    pub iterations: usize,
}

/// Ball radius and horizon selected for the fixed-point argument, together
/// with the scheme constant and exponent they were derived from. `t_formula`
/// is the untruncated horizon from the selection rule; `t_horizon` is the
/// value actually used after the optional cap (any smaller horizon still
/// satisfies the defining inequality).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContractionParams {
    pub c_constant: f64,
    pub rho: f64,
    pub t_horizon: f64,
    pub t_formula: f64,
    pub theta: f64,
    pub r: f64,
}

/// Duhamel quadrature: frames of the retarded integral
/// I(t_m) = integral over [0, t_m] of e^{-i(t_m - t') d^3} f(t') dt'
/// by composite trapezoid over the existing nodes.
///
/// Internally the partial sums satisfy R_{m+1} = E (R_m + w_m / 2) + w_{m+1}/2
/// with E the one-step propagator, so the whole sweep costs O(M) transforms.
pub fn airy_retarded_integral(f: &SpaceTimeField) -> SpaceTimeField {
    let grid = f.grid().clone();
    let n = grid.n_points();
    let dt = f.times().dt();
    let steps = f.times().n_steps();
    let real_input = f.frames().iter().all(SpaceField::is_real);

    let e_step: Vec<Complex64> = (0..n)
        .map(|i| {
            let xi = grid.wavenumber_at_fft_index(i);
            Complex64::from_polar(1.0, dt * xi * xi * xi)
        })
        .collect();

    let spectra: Vec<Vec<Complex64>> = f
        .frames()
        .iter()
        .map(|frame| fft_forward(frame.values()))
        .collect();

    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(SpaceField::zero(grid.clone()));
    let mut running = vec![Complex64::new(0.0, 0.0); n];
    for m in 1..=steps {
        for i in 0..n {
            running[i] = e_step[i] * (running[i] + 0.5 * spectra[m - 1][i])
                + 0.5 * spectra[m][i];
        }
        let scaled: Vec<Complex64> = running.iter().map(|v| v * dt).collect();
        let mut values = fft_inverse(&scaled);
        if real_input {
            for v in &mut values {
                v.im = 0.0;
            }
        }
        frames.push(SpaceField::new(grid.clone(), values));
    }
    SpaceTimeField::new(grid, f.times().clone(), frames)
}

/// One application of the integral-equation map: free evolution of the datum
/// minus the retarded integral of the propagated flux derivative of `u`.
/// Frame 0 is the datum itself.
pub fn duhamel_map(u: &SpaceTimeField, u0: &SpaceField) -> Result<SpaceTimeField> {
    duhamel_map_with(u, u0, true)
}

/// As [`duhamel_map`] with explicit control of product dealiasing.
pub fn duhamel_map_with(
    u: &SpaceTimeField,
    u0: &SpaceField,
    dealias: bool,
) -> Result<SpaceTimeField> {
    if u.grid() != u0.grid() {
        return Err(AiryError::GridMismatch);
    }
    let grid = u.grid().clone();
    let n = grid.n_points();
    let dt = u.times().dt();
    let steps = u.times().n_steps();
    let real_input = u0.is_real() && u.frames().iter().all(SpaceField::is_real);

    let e_step: Vec<Complex64> = (0..n)
        .map(|i| {
            let xi = grid.wavenumber_at_fft_index(i);
            Complex64::from_polar(1.0, dt * xi * xi * xi)
        })
        .collect();

    let flux: Vec<Vec<Complex64>> = u
        .frames()
        .iter()
        .map(|frame| nonlinearity_spectrum(frame, dealias))
        .collect::<Result<_>>()?;
    let datum_spectrum = fft_forward(u0.values());

    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(u0.clone());
    let mut running = vec![Complex64::new(0.0, 0.0); n];
    for m in 1..=steps {
        for i in 0..n {
            running[i] =
                e_step[i] * (running[i] + 0.5 * flux[m - 1][i]) + 0.5 * flux[m][i];
        }
        let t_m = u.times().nodes()[m];
        let combined: Vec<Complex64> = (0..n)
            .map(|i| {
                let xi = grid.wavenumber_at_fft_index(i);
                let linear = Complex64::from_polar(1.0, t_m * xi * xi * xi) * datum_spectrum[i];
                linear - dt * running[i]
            })
            .collect();
        let mut values = fft_inverse(&combined);
        if real_input {
            for v in &mut values {
                v.im = 0.0;
            }
        }
        frames.push(SpaceField::new(grid.clone(), values));
    }
    Ok(SpaceTimeField::new(grid, u.times().clone(), frames))
}

/// Picard iteration from the free orbit. Stops when the increment in the
/// requested norm drops below `tol`, or `max_iter` is reached, or the
/// increment has grown three times in a row (reported as non-converged, not
/// as an error).
pub fn picard_solve(
    u0: &SpaceField,
    times: &TimeGrid,
    tol: f64,
    max_iter: usize,
    norm_kind: NormKind,
) -> Result<(SpaceTimeField, PicardDiagnostics)> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(max_iter >= 1);
    let mut current = airy_orbit(u0, times);
    let mut increments = Vec::new();
    let mut converged = false;
    let mut growth_streak = 0usize;
    let mut iterations = 0usize;

    for _ in 0..max_iter {
        iterations += 1;
        let next = duhamel_map(&current, u0)?;
        let increment = norm_kind.evaluate(&next.sub(&current))?;
        if let Some(&last) = increments.last() {
            if increment > last {
                growth_streak += 1;
            } else {
                growth_streak = 0;
            }
        }
        increments.push(increment);
        current = next;
        if increment < tol {
            converged = true;
            break;
        }
        if growth_streak >= 3 {
            break;
        }
    }

    let contraction_factors = increments
        .windows(2)
        .map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] })
        .collect();
    Ok((
        current,
        PicardDiagnostics {
            increments,
            contraction_factors,
            norm_kind,
            converged,
            iterations,
        },
    ))
}

/// Ball radius and largest admissible horizon for the unweighted scheme:
/// rho = 2 C |u0|_{H^{1/3}} and T with C T^{1/2} rho^4 = rho / 2.
pub fn select_parameters_unweighted(u0: &SpaceField, c_constant: f64) -> Result<ContractionParams> {
    select_parameters_unweighted_capped(u0, c_constant, None)
}

/// As [`select_parameters_unweighted`], optionally capping the horizon (the
/// selection inequality holds for every smaller T, so a cap is always
/// admissible; it keeps small-data horizons at desk scale).
pub fn select_parameters_unweighted_capped(
    u0: &SpaceField,
    c_constant: f64,
    t_cap: Option<f64>,
) -> Result<ContractionParams> {
    assert!(c_constant > 0.0);
    let h13 = sobolev_norm(u0, 1.0 / 3.0);
    if h13 == 0.0 {
        return Err(AiryError::ZeroDatum);
    }
    let rho = 2.0 * c_constant * h13;
    let t_formula = (1.0 / (2.0 * c_constant * rho.powi(3))).powi(2);
    let t_horizon = t_cap.map_or(t_formula, |cap| t_formula.min(cap));
    let params = ContractionParams {
        c_constant,
        rho,
        t_horizon,
        t_formula,
        theta: 0.5,
        r: 0.0,
    };
    debug_assert!(
        c_constant * params.t_horizon.sqrt() * rho.powi(4) <= rho / 2.0 * (1.0 + 1e-12),
        "selection inequality must hold at the chosen horizon"
    );
    Ok(params)
}

/// Ball radius and horizon for the weighted scheme:
/// rho = 2 C (|u0|_{H^{1/3}} + ||x|^r u0|_{L^2}) and T with
/// rho/2 + C T^theta (|u0|_{H^{1/3}} + rho^4) = rho at the boundary.
pub fn select_parameters_weighted(
    u0: &SpaceField,
    c_constant: f64,
    r: f64,
    theta: f64,
) -> Result<ContractionParams> {
    select_parameters_weighted_capped(u0, c_constant, r, theta, None)
}

pub fn select_parameters_weighted_capped(
    u0: &SpaceField,
    c_constant: f64,
    r: f64,
    theta: f64,
    t_cap: Option<f64>,
) -> Result<ContractionParams> {
    assert!(c_constant > 0.0);
    assert!(theta > 0.0 && theta <= 1.0);
    if r == 0.0 {
        return Err(AiryError::ZeroWeight);
    }
    if !(0.0..=1.0 / 6.0 + 1e-12).contains(&r) {
        return Err(AiryError::WeightOutOfRange(r));
    }
    let h13 = sobolev_norm(u0, 1.0 / 3.0);
    let weighted = weighted_l2(u0, r);
    if h13 == 0.0 {
        return Err(AiryError::ZeroDatum);
    }
    let rho = 2.0 * c_constant * (h13 + weighted);
    let t_formula = (rho / (2.0 * c_constant * (h13 + rho.powi(4)))).powf(1.0 / theta);
    let t_horizon = t_cap.map_or(t_formula, |cap| t_formula.min(cap));
    let params = ContractionParams {
        c_constant,
        rho,
        t_horizon,
        t_formula,
        theta,
        r,
    };
    debug_assert!(
        rho / 2.0 + c_constant * params.t_horizon.powf(theta) * (h13 + rho.powi(4))
            <= rho * (1.0 + 1e-12),
        "selection inequality must hold at the chosen horizon"
    );
    Ok(params)
}
