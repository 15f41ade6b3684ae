//! Fourier-multiplier engine: forward/backward transforms and the diagonal
//! operators built on them — fractional derivative `D^a` with symbol |xi|^a,
//! Bessel potential (1+xi^2)^a, Hilbert transform, spectral derivative, and
//! the Airy propagator with symbol e^{i t xi^3}.
//!
//! Conventions:
//! - `|xi|^a` at xi = 0 is 0 for a > 0; `frac_deriv` with a = 0 is the
//!   identity map (no 0^0 evaluation happens).
//! - Odd symbols (i xi, -i sgn xi) annihilate the unpaired Nyquist mode so
//!   real fields stay real.
//! - After a conjugate-symmetric symbol acts on an exactly-real field, the
//!   imaginary round-off is dropped, which is the physical-space face of
//!   re-imposing Hermitian spectral symmetry.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use crate::error::{AiryError, Result};
use crate::grid::{SpaceField, SpaceTimeField, SpatialGrid, TimeGrid};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

// Plans are immutable once built; the lock only guards cache insertion.
static PLANS: Lazy<Mutex<HashMap<usize, PlanPair>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(n: usize) -> PlanPair {
    let mut cache = PLANS.lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Unnormalized forward DFT of the field values, FFT storage order.
pub(crate) fn fft_forward(values: &[Complex64]) -> Vec<Complex64> {
    let (fwd, _) = plans(values.len());
    let mut buf = values.to_vec();
    fwd.process(&mut buf);
    buf
}

/// Inverse DFT including the 1/n normalization.
pub(crate) fn fft_inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let (_, inv) = plans(n);
    let mut buf = spectrum.to_vec();
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Fourier coefficients c_k with f(x_j) = sum_k c_k e^{i xi_k x_j}, returned
/// in the same increasing-wavenumber order as `grid.wavenumbers()`.
pub fn to_spectrum(f: &SpaceField) -> Vec<Complex64> {
    let grid = f.grid();
    let n = grid.n_points();
    let raw = fft_forward(f.values());
    let scale = 1.0 / n as f64;
    let half_l = grid.length() / 2.0;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, value) in raw.iter().enumerate() {
        let xi = grid.wavenumber_at_fft_index(i);
        // phase accounts for x_0 = -L/2 rather than 0
        let phase = Complex64::from_polar(1.0, xi * half_l);
        let k_monotone = if i < n / 2 { i + n / 2 } else { i - n / 2 };
        out[k_monotone] = value * scale * phase;
    }
    out
}

/// Inverse of [`to_spectrum`]: rebuilds the field from increasing-wavenumber
/// coefficients.
pub fn from_spectrum(grid: &Arc<SpatialGrid>, coeffs: &[Complex64]) -> SpaceField {
    let n = grid.n_points();
    assert_eq!(coeffs.len(), n, "spectrum/grid size mismatch");
    let half_l = grid.length() / 2.0;
    let mut raw = vec![Complex64::new(0.0, 0.0); n];
    for (k_monotone, value) in coeffs.iter().enumerate() {
        let i = if k_monotone >= n / 2 {
            k_monotone - n / 2
        } else {
            k_monotone + n / 2
        };
        let xi = grid.wavenumber_at_fft_index(i);
        let phase = Complex64::from_polar(1.0, -xi * half_l);
        raw[i] = value * phase;
    }
    // c_k are true Fourier coefficients, so the unnormalized inverse DFT
    // reconstructs the samples directly.
    let (_, inv) = plans(n);
    inv.process(&mut raw);
    SpaceField::new(grid.clone(), raw)
}

/// A diagonal Fourier operator: wavenumber -> complex gain.
#[derive(Clone)]
pub struct MultiplierSymbol {
    label: String,
    rule: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    /// m(-xi) = conj(m(xi)): the operator maps real fields to real fields.
    hermitian: bool,
    /// Odd symbols have no Nyquist partner; annihilate that mode.
    zero_nyquist: bool,
}

impl std::fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("label", &self.label)
            .field("hermitian", &self.hermitian)
            .field("zero_nyquist", &self.zero_nyquist)
            .finish()
    }
}

impl MultiplierSymbol {
    pub fn new(
        label: impl Into<String>,
        rule: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        hermitian: bool,
        zero_nyquist: bool,
    ) -> Self {
        MultiplierSymbol {
            label: label.into(),
            rule: Arc::new(rule),
            hermitian,
            zero_nyquist,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        (self.rule)(xi)
    }

    pub fn identity() -> Self {
        Self::new("identity", |_| Complex64::new(1.0, 0.0), true, false)
    }

    /// Spectral derivative d/dx, symbol i xi.
    pub fn derivative() -> Self {
        Self::new("d/dx", |xi| Complex64::new(0.0, xi), true, true)
    }

    /// |xi|^alpha for alpha > 0 with |0|^alpha = 0; alpha = 0 is the identity.
    pub fn fractional(alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::identity();
        }
        Self::new(
            format!("D^{alpha}"),
            move |xi| {
                if xi == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(xi.abs().powf(alpha), 0.0)
                }
            },
            true,
            false,
        )
    }

    /// Bessel potential (1 + xi^2)^alpha.
    pub fn bessel(alpha: f64) -> Self {
        Self::new(
            format!("(1+D^2)^{alpha}"),
            move |xi| Complex64::new((1.0 + xi * xi).powf(alpha), 0.0),
            true,
            false,
        )
    }

    /// Hilbert transform, symbol -i sgn(xi); the mean and Nyquist modes die.
    pub fn hilbert() -> Self {
        Self::new(
            "hilbert",
            |xi| {
                if xi == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -xi.signum())
                }
            },
            true,
            true,
        )
    }

    /// Airy propagator at time t, unimodular symbol e^{i t xi^3}.
    pub fn airy(t: f64) -> Self {
        Self::new(
            format!("airy({t})"),
            move |xi| Complex64::from_polar(1.0, t * xi * xi * xi),
            true,
            false,
        )
    }

    /// Sharp low-pass keeping |xi| <= 2/3 of the Nyquist wavenumber.
    pub fn dealias(nyquist: f64) -> Self {
        let cutoff = 2.0 / 3.0 * nyquist;
        Self::new(
            "dealias-2/3",
            move |xi| {
                if xi.abs() <= cutoff {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
            true,
            false,
        )
    }
}

/// Multiplies the spectrum in place (FFT order) by the symbol, applying the
/// Nyquist rule. Errors if the symbol is not finite at a grid wavenumber.
pub(crate) fn apply_symbol_raw(
    grid: &SpatialGrid,
    spectrum: &mut [Complex64],
    symbol: &MultiplierSymbol,
) -> Result<()> {
    let n = grid.n_points();
    for (i, c) in spectrum.iter_mut().enumerate() {
        let xi = grid.wavenumber_at_fft_index(i);
        let m = symbol.eval(xi);
        if !m.re.is_finite() || !m.im.is_finite() {
            return Err(AiryError::NonFiniteSymbol {
                label: symbol.label().to_string(),
                xi,
            });
        }
        *c *= m;
    }
    if symbol.zero_nyquist {
        spectrum[n / 2] = Complex64::new(0.0, 0.0);
    }
    Ok(())
}

/// Applies a diagonal Fourier operator to the field.
pub fn apply_multiplier(f: &SpaceField, symbol: &MultiplierSymbol) -> Result<SpaceField> {
    let was_real = symbol.hermitian && f.is_real();
    let mut spectrum = fft_forward(f.values());
    apply_symbol_raw(f.grid(), &mut spectrum, symbol)?;
    let mut values = fft_inverse(&spectrum);
    if was_real {
        for v in &mut values {
            v.im = 0.0;
        }
    }
    Ok(SpaceField::new(f.grid().clone(), values))
}

/// Fractional derivative D^alpha, alpha >= 0.
pub fn frac_deriv(f: &SpaceField, alpha: f64) -> Result<SpaceField> {
    if alpha < 0.0 || !alpha.is_finite() {
        return Err(AiryError::NegativeFractionalOrder(alpha));
    }
    apply_multiplier(f, &MultiplierSymbol::fractional(alpha))
}

/// Bessel potential (1 + D^2)^alpha, any real alpha.
pub fn bessel(f: &SpaceField, alpha: f64) -> Result<SpaceField> {
    apply_multiplier(f, &MultiplierSymbol::bessel(alpha))
}

/// Hilbert transform.
pub fn hilbert(f: &SpaceField) -> Result<SpaceField> {
    apply_multiplier(f, &MultiplierSymbol::hilbert())
}

/// Spectral derivative.
pub fn deriv(f: &SpaceField) -> Result<SpaceField> {
    apply_multiplier(f, &MultiplierSymbol::derivative())
}

/// Free Airy evolution of `f` by time `t` (negative t propagates backward).
pub fn airy_propagate(f: &SpaceField, t: f64) -> SpaceField {
    apply_multiplier(f, &MultiplierSymbol::airy(t)).expect("airy symbol is always finite")
}

/// The full free orbit: frame m is the propagation of `u0` to node t_m.
pub fn airy_orbit(u0: &SpaceField, times: &TimeGrid) -> SpaceTimeField {
    let frames = times
        .nodes()
        .iter()
        .map(|&t| airy_propagate(u0, t))
        .collect();
    SpaceTimeField::new(u0.grid().clone(), times.clone(), frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, make_time_grid, sample, sample_complex};
    use crate::norms::{lp_norm, Exponent};

    fn rel_l2_diff(a: &SpaceField, b: &SpaceField) -> f64 {
        let d = a.sub(b);
        let denom = lp_norm(b, Exponent::integer(2));
        if denom == 0.0 {
            lp_norm(&d, Exponent::integer(2))
        } else {
            lp_norm(&d, Exponent::integer(2)) / denom
        }
    }

    fn random_real_field(seed: u64, n: usize, length: f64) -> SpaceField {
        use rand::{Rng, SeedableRng};
        let grid = make_grid(n, length).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // band-limited: random low modes, zero mean, zero Nyquist
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        for k in 1..=n / 8 {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spec[k] = c;
            spec[n - k] = c.conj();
        }
        let values = fft_inverse(&spec);
        let mut f = SpaceField::new(grid, values);
        for v in f.values_mut() {
            v.im = 0.0;
        }
        f
    }

    #[test]
    fn spectrum_of_constant_and_single_mode() {
        let grid = make_grid(32, 16.0).unwrap();
        let one = sample(|_| 1.0, &grid).unwrap();
        let spec = to_spectrum(&one);
        let zero_idx = grid.n_points() / 2; // monotone order puts k=0 mid-array
        assert!((spec[zero_idx] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        for (k, c) in spec.iter().enumerate() {
            if k != zero_idx {
                assert!(c.norm() < 1e-13);
            }
        }

        let xi1 = 2.0 * std::f64::consts::PI / 16.0;
        let mode = sample_complex(|x| Complex64::from_polar(1.0, xi1 * x), &grid).unwrap();
        let spec = to_spectrum(&mode);
        assert!((spec[zero_idx + 1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn spectrum_round_trip() {
        let f = random_real_field(7, 128, 32.0);
        let back = from_spectrum(f.grid(), &to_spectrum(&f));
        assert!(rel_l2_diff(&back, &f) < 1e-12);
    }

    #[test]
    fn identity_multiplier_is_identity() {
        let f = random_real_field(3, 64, 16.0);
        let g = apply_multiplier(&f, &MultiplierSymbol::identity()).unwrap();
        assert!(rel_l2_diff(&g, &f) < 1e-13);
    }

    #[test]
    fn derivative_of_single_mode() {
        let grid = make_grid(64, 16.0).unwrap();
        let xi1 = 2.0 * std::f64::consts::PI / 16.0;
        let mode = sample_complex(|x| Complex64::from_polar(1.0, xi1 * x), &grid).unwrap();
        let d = deriv(&mode).unwrap();
        for (a, b) in d.values().iter().zip(mode.values()) {
            assert!((a - Complex64::new(0.0, xi1) * b).norm() < 1e-12);
        }
    }

    #[test]
    fn multipliers_compose_diagonally() {
        let f = random_real_field(11, 64, 16.0);
        let m1 = MultiplierSymbol::fractional(0.5);
        let m2 = MultiplierSymbol::bessel(-0.25);
        let seq = apply_multiplier(&apply_multiplier(&f, &m1).unwrap(), &m2).unwrap();
        let product = MultiplierSymbol::new(
            "m1*m2",
            move |xi| m1.eval(xi) * m2.eval(xi),
            true,
            false,
        );
        let combined = apply_multiplier(&f, &product).unwrap();
        assert!(rel_l2_diff(&seq, &combined) < 1e-12);
    }

    #[test]
    fn frac_deriv_cos_is_cos_on_2pi_grid() {
        let grid = make_grid(64, 2.0 * std::f64::consts::PI).unwrap();
        let c = sample(f64::cos, &grid).unwrap();
        let d = frac_deriv(&c, 1.0).unwrap();
        assert!(rel_l2_diff(&d, &c) < 1e-12);
    }

    #[test]
    fn frac_deriv_single_mode_gain() {
        let grid = make_grid(64, 16.0).unwrap();
        let xi1 = 2.0 * std::f64::consts::PI / 16.0;
        let mode = sample_complex(|x| Complex64::from_polar(1.0, xi1 * x), &grid).unwrap();
        let d = frac_deriv(&mode, 1.0 / 3.0).unwrap();
        let gain = xi1.powf(1.0 / 3.0);
        for (a, b) in d.values().iter().zip(mode.values()) {
            assert!((a - b * gain).norm() < 1e-12);
        }
    }

    #[test]
    fn frac_deriv_rejects_negative_order() {
        let f = random_real_field(1, 32, 8.0);
        assert!(frac_deriv(&f, -0.5).is_err());
    }

    #[test]
    fn frac_deriv_matches_hilbert_of_derivative() {
        let f = random_real_field(21, 256, 64.0);
        let lhs = frac_deriv(&f, 1.0).unwrap();
        let rhs = hilbert(&deriv(&f).unwrap()).unwrap();
        assert!(rel_l2_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn frac_deriv_orders_add_on_zero_mean() {
        let f = random_real_field(5, 128, 32.0);
        let a = 0.4;
        let b = 0.9;
        let lhs = frac_deriv(&f, a + b).unwrap();
        let rhs = frac_deriv(&frac_deriv(&f, a).unwrap(), b).unwrap();
        assert!(rel_l2_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn bessel_zero_is_identity_and_inverse_pairs() {
        let f = random_real_field(9, 128, 32.0);
        let id = bessel(&f, 0.0).unwrap();
        assert!(rel_l2_diff(&id, &f) < 1e-13);
        let round = bessel(&bessel(&f, 0.7).unwrap(), -0.7).unwrap();
        assert!(rel_l2_diff(&round, &f) < 1e-12);
    }

    #[test]
    fn bessel_single_mode_gain() {
        let grid = make_grid(64, 16.0).unwrap();
        let xi1 = 2.0 * std::f64::consts::PI / 16.0;
        let mode = sample_complex(|x| Complex64::from_polar(1.0, xi1 * x), &grid).unwrap();
        let d = bessel(&mode, -1.0 / 6.0).unwrap();
        let gain = (1.0 + xi1 * xi1).powf(-1.0 / 6.0);
        for (a, b) in d.values().iter().zip(mode.values()) {
            assert!((a - b * gain).norm() < 1e-12);
        }
    }

    #[test]
    fn hilbert_of_cos_is_sin() {
        let grid = make_grid(128, 2.0 * std::f64::consts::PI).unwrap();
        let c = sample(f64::cos, &grid).unwrap();
        let s = sample(f64::sin, &grid).unwrap();
        let h = hilbert(&c).unwrap();
        assert!(rel_l2_diff(&h, &s) < 1e-12);
    }

    #[test]
    fn hilbert_kills_constants_and_squares_to_minus_one() {
        let grid = make_grid(64, 8.0).unwrap();
        let c = sample(|_| 3.0, &grid).unwrap();
        let h = hilbert(&c).unwrap();
        assert!(h.sup_abs() < 1e-13);

        let f = random_real_field(13, 128, 32.0); // zero-mean by construction
        let hh = hilbert(&hilbert(&f).unwrap()).unwrap();
        assert!(rel_l2_diff(&hh, &f.scale(-1.0)) < 1e-12);
    }

    #[test]
    fn hilbert_is_isometry_on_zero_mean() {
        let f = random_real_field(17, 128, 32.0);
        let h = hilbert(&f).unwrap();
        let a = lp_norm(&f, Exponent::integer(2));
        let b = lp_norm(&h, Exponent::integer(2));
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn airy_at_zero_is_identity_and_single_mode_phase() {
        let f = random_real_field(2, 64, 16.0);
        let g = airy_propagate(&f, 0.0);
        assert!(rel_l2_diff(&g, &f) < 1e-13);

        let grid = make_grid(64, 16.0).unwrap();
        let xi1 = 2.0 * std::f64::consts::PI / 16.0;
        let mode = sample_complex(|x| Complex64::from_polar(1.0, xi1 * x), &grid).unwrap();
        let t = 0.7;
        let prop = airy_propagate(&mode, t);
        let phase = Complex64::from_polar(1.0, t * xi1.powi(3));
        for (a, b) in prop.values().iter().zip(mode.values()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn airy_is_unitary_at_many_times() {
        let f = random_real_field(23, 256, 64.0);
        let norm0 = lp_norm(&f, Exponent::integer(2));
        for t in [0.1, 1.0, 10.0] {
            let g = airy_propagate(&f, t);
            let n = lp_norm(&g, Exponent::integer(2));
            assert!((n - norm0).abs() < 1e-12 * norm0, "t={t}: {n} vs {norm0}");
        }
    }

    #[test]
    fn airy_group_law() {
        let f = random_real_field(29, 128, 32.0);
        let (s, t) = (0.15, 0.25);
        let a = airy_propagate(&airy_propagate(&f, s), t);
        let b = airy_propagate(&f, s + t);
        assert!(rel_l2_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn airy_commutes_with_frac_deriv() {
        let f = random_real_field(31, 128, 32.0);
        let a = frac_deriv(&airy_propagate(&f, 0.3), 1.0 / 3.0).unwrap();
        let b = airy_propagate(&frac_deriv(&f, 1.0 / 3.0).unwrap(), 0.3);
        assert!(rel_l2_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn airy_orbit_frames() {
        let grid = make_grid(256, 32.0).unwrap();
        let u0 = sample(|x| (-x * x).exp(), &grid).unwrap();
        let times = make_time_grid(1.0, 8).unwrap();
        let orbit = airy_orbit(&u0, &times);
        assert_eq!(orbit.frames().len(), 9);
        assert!(rel_l2_diff(orbit.frame(0), &u0) < 1e-13);
        let norm0 = lp_norm(&u0, Exponent::integer(2));
        for f in orbit.frames() {
            assert!((lp_norm(f, Exponent::integer(2)) - norm0).abs() < 1e-12 * norm0);
        }

        let zero_orbit = airy_orbit(&SpaceField::zero(grid), &times);
        for f in zero_orbit.frames() {
            assert_eq!(f.sup_abs(), 0.0);
        }
    }

    #[test]
    fn real_fields_stay_real_under_hermitian_symbols() {
        let grid = make_grid(128, 32.0).unwrap();
        let u0 = sample(|x| (-(x - 1.0) * (x - 1.0)).exp(), &grid).unwrap();
        for g in [
            airy_propagate(&u0, 2.0),
            deriv(&u0).unwrap(),
            frac_deriv(&u0, 1.0 / 3.0).unwrap(),
            hilbert(&u0).unwrap(),
            bessel(&u0, 1.0 / 6.0).unwrap(),
        ] {
            assert!(g.is_real());
        }
    }

    #[test]
    fn rejects_non_finite_symbol() {
        let f = random_real_field(37, 32, 8.0);
        let bad = MultiplierSymbol::new("1/xi", |xi| Complex64::new(1.0 / xi, 0.0), true, false);
        assert!(matches!(
            apply_multiplier(&f, &bad),
            Err(AiryError::NonFiniteSymbol { .. })
        ));
    }
}
