//! Independent oracle dynamics for u_t + u_xxx + (u^4)_x = 0: an
//! integrating-factor RK4 pseudo-spectral stepper plus an exact traveling-wave
//! factory. The stepper applies the dispersive factor e^{i t xi^3} exactly and
//! shares no quadrature structure with the Duhamel solver, which is what makes
//! agreement between the two meaningful.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AiryError, Result};
use crate::grid::{sample, SpaceField, SpaceTimeField, SpatialGrid, TimeGrid};
use crate::spectral::{apply_symbol_raw, fft_forward, fft_inverse, MultiplierSymbol};

use std::sync::Arc;

/// Stepper configuration. `dt` caps the internal substep;
/// `substeps_per_frame` floors the substep count between output frames.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub dealias: bool,
    pub substeps_per_frame: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-4,
            dealias: true,
            substeps_per_frame: 1,
        }
    }
}

/// Traveling-wave parameters: speed and initial center.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolitonParams {
    pub c: f64,
    pub x0: f64,
}

/// Default relative boundary-decay tolerance for profile construction.
pub const DEFAULT_DECAY_TOL: f64 = 1e-12;

/// Quartic flux derivative: spectral d/dx of the pointwise fourth power,
/// with optional 2/3-rule truncation of the product spectrum.
pub fn nonlinearity(f: &SpaceField, dealias: bool) -> Result<SpaceField> {
    let spectrum = nonlinearity_spectrum(f, dealias)?;
    let mut values = fft_inverse(&spectrum);
    if f.is_real() {
        for v in &mut values {
            v.im = 0.0;
        }
    }
    Ok(SpaceField::new(f.grid().clone(), values))
}

/// Spectral-side nonlinearity: FFT(f^4) * i xi (Nyquist zeroed), dealiased.
/// Shared by the oracle stepper and the Duhamel quadrature.
pub(crate) fn nonlinearity_spectrum(f: &SpaceField, dealias: bool) -> Result<Vec<Complex64>> {
    let quartic: Vec<Complex64> = f.values().iter().map(|v| v * v * v * v).collect();
    if quartic.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(AiryError::NonlinearityOverflow {
            max_abs: f.sup_abs(),
        });
    }
    let mut spectrum = fft_forward(&quartic);
    if dealias {
        apply_symbol_raw(
            f.grid(),
            &mut spectrum,
            &MultiplierSymbol::dealias(f.grid().nyquist()),
        )?;
    }
    apply_symbol_raw(f.grid(), &mut spectrum, &MultiplierSymbol::derivative())?;
    Ok(spectrum)
}

/// Traveling-wave profile phi_c(y) = (5c/2)^{1/3} sech^{2/3}(3 sqrt(c) y / 2),
/// the decaying solution of phi'' = c phi - phi^4.
pub fn soliton_profile(c: f64, y: f64) -> f64 {
    let amplitude = (2.5 * c).powf(1.0 / 3.0);
    let arg = 1.5 * c.sqrt() * y;
    // sech^{2/3} via exp to stay finite for large |arg|
    let sech = 2.0 * (-arg.abs()).exp() / (1.0 + (-2.0 * arg.abs()).exp());
    amplitude * sech.powf(2.0 / 3.0)
}

/// Periodization of the profile over the torus: summing translated images
/// makes the sampled field a genuinely smooth periodic function, so spectral
/// differentiation sees no boundary kink.
fn periodized_profile(c: f64, x0: f64, length: f64, x: f64) -> f64 {
    let mut total = 0.0;
    let mut m = 0i32;
    loop {
        let tail_plus = soliton_profile(c, x - x0 + m as f64 * length);
        let tail_minus = if m > 0 {
            soliton_profile(c, x - x0 - m as f64 * length)
        } else {
            0.0
        };
        total += tail_plus + tail_minus;
        if m > 0 && tail_plus + tail_minus < 1e-18 {
            break;
        }
        m += 1;
        if m > 16 {
            break;
        }
    }
    total
}

/// Samples the traveling wave on the grid, rejecting profiles whose tails
/// have not decayed below `decay_tol` (relative to the peak) at the boundary.
pub fn soliton_with_decay_tol(
    params: SolitonParams,
    grid: &Arc<SpatialGrid>,
    decay_tol: f64,
) -> Result<SpaceField> {
    assert!(params.c > 0.0, "wave speed must be positive");
    let field = sample(
        |x| periodized_profile(params.c, params.x0, grid.length(), x),
        grid,
    )?;
    let ratio = field.boundary_decay_ratio();
    if ratio > decay_tol {
        return Err(AiryError::InsufficientDecay {
            ratio,
            tol: decay_tol,
        });
    }
    Ok(field)
}

/// Samples the traveling wave with the default decay tolerance.
pub fn soliton(params: SolitonParams, grid: &Arc<SpatialGrid>) -> Result<SpaceField> {
    soliton_with_decay_tol(params, grid, DEFAULT_DECAY_TOL)
}

/// Integrating-factor RK4 evolution of real data, frames at the time nodes.
/// Mass (the zero mode) is conserved exactly by construction; a non-finite
/// value aborts with the failing step index.
pub fn evolve_oracle(
    u0: &SpaceField,
    times: &TimeGrid,
    cfg: &SolverConfig,
) -> Result<SpaceTimeField> {
    assert!(u0.is_real(), "oracle dynamics expect real-valued data");
    assert!(cfg.dt > 0.0 && cfg.substeps_per_frame >= 1);
    let grid = u0.grid().clone();
    let n = grid.n_points();
    let frame_dt = times.dt();
    let substeps = cfg
        .substeps_per_frame
        .max((frame_dt / cfg.dt).ceil() as usize)
        .max(1);
    let h = frame_dt / substeps as f64;

    // per-substep propagators for the half and full step
    let e_half: Vec<Complex64> = (0..n)
        .map(|i| {
            let xi = grid.wavenumber_at_fft_index(i);
            Complex64::from_polar(1.0, 0.5 * h * xi * xi * xi)
        })
        .collect();
    let e_full: Vec<Complex64> = e_half.iter().map(|e| e * e).collect();
    let dealias_gain: Vec<f64> = (0..n)
        .map(|i| {
            let xi = grid.wavenumber_at_fft_index(i);
            if cfg.dealias && xi.abs() > 2.0 / 3.0 * grid.nyquist() {
                0.0
            } else {
                1.0
            }
        })
        .collect();

    // nonlinear term in spectral space: -i xi FFT(u^4), u from the spectrum
    let rhs = |spec: &[Complex64]| -> Result<Vec<Complex64>> {
        let phys = fft_inverse(spec);
        let quartic: Vec<Complex64> = phys
            .iter()
            .map(|v| {
                let re = v.re; // real dynamics; drop rounding drift
                Complex64::new(re * re * re * re, 0.0)
            })
            .collect();
        let mut out = fft_forward(&quartic);
        for (i, c) in out.iter_mut().enumerate() {
            let xi = grid.wavenumber_at_fft_index(i);
            *c *= Complex64::new(0.0, -xi) * dealias_gain[i];
        }
        out[n / 2] = Complex64::new(0.0, 0.0);
        Ok(out)
    };

    let mut spec = fft_forward(u0.values());
    let mut frames = Vec::with_capacity(times.n_steps() + 1);
    frames.push(u0.clone());
    let mut step_index = 0usize;

    for _ in 1..=times.n_steps() {
        for _ in 0..substeps {
            step_index += 1;
            let a = rhs(&spec)?;
            let stage2: Vec<Complex64> = (0..n)
                .map(|i| e_half[i] * (spec[i] + 0.5 * h * a[i]))
                .collect();
            let b = rhs(&stage2)?;
            let stage3: Vec<Complex64> = (0..n)
                .map(|i| e_half[i] * spec[i] + 0.5 * h * b[i])
                .collect();
            let c = rhs(&stage3)?;
            let stage4: Vec<Complex64> = (0..n)
                .map(|i| e_full[i] * spec[i] + h * e_half[i] * c[i])
                .collect();
            let d = rhs(&stage4)?;
            for i in 0..n {
                spec[i] = e_full[i] * spec[i]
                    + (h / 6.0)
                        * (e_full[i] * a[i] + 2.0 * e_half[i] * (b[i] + c[i]) + d[i]);
            }
            if spec.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(AiryError::SolverBlowUp {
                    step: step_index,
                    t: step_index as f64 * h,
                });
            }
        }
        let mut values = fft_inverse(&spec);
        for v in &mut values {
            v.im = 0.0;
        }
        frames.push(SpaceField::new(grid.clone(), values));
    }

    Ok(SpaceTimeField::new(grid, times.clone(), frames))
}
