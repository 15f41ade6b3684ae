//! Discretization substrate: periodic spatial grids standing in for the real
//! line, uniform time grids, and the field containers every other module
//! operates on.
//!
//! The line is approximated by a torus of length `L` with the fundamental
//! domain `[-L/2, L/2)`, so the weight `|x|^r` is single-valued and centered
//! at the origin. All test data decay far below round-off at the boundary.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{AiryError, Result};

/// Periodic spatial grid over `[-L/2, L/2)` with power-of-two resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    n_points: usize,
    length: f64,
    spacing: f64,
    points: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl SpatialGrid {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Sample points x_j = -L/2 + j dx.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Wavenumbers xi_k = 2 pi k / L in increasing order, k = -n/2 .. n/2 - 1.
    /// The lone Nyquist mode k = -n/2 has no conjugate partner.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Wavenumber of the mode at FFT storage index `i`
    /// (0, 1, .., n/2 - 1, -n/2, .., -1 times 2 pi / L).
    pub fn wavenumber_at_fft_index(&self, i: usize) -> f64 {
        debug_assert!(i < self.n_points);
        let n = self.n_points;
        let k = if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        };
        2.0 * std::f64::consts::PI * k as f64 / self.length
    }

    /// Largest magnitude wavenumber representable on this grid.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.n_points as f64 / self.length
    }
}

/// Builds the periodic grid. `n_points` must be a power of two.
pub fn make_grid(n_points: usize, length: f64) -> Result<Arc<SpatialGrid>> {
    if n_points == 0 || !n_points.is_power_of_two() {
        return Err(AiryError::GridSizeNotPowerOfTwo(n_points));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(AiryError::NonPositiveLength(length));
    }
    let spacing = length / n_points as f64;
    let points = (0..n_points)
        .map(|j| -length / 2.0 + j as f64 * spacing)
        .collect();
    let half = (n_points / 2) as i64;
    let wavenumbers = (-half..half)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / length)
        .collect();
    Ok(Arc::new(SpatialGrid {
        n_points,
        length,
        spacing,
        points,
        wavenumbers,
    }))
}

/// Uniform time grid t_m = m T / M on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    /// Composite trapezoid weights over the nodes.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let dt = self.dt();
        let mut w = vec![dt; self.n_steps + 1];
        w[0] = dt / 2.0;
        w[self.n_steps] = dt / 2.0;
        w
    }
}

pub fn make_time_grid(horizon: f64, n_steps: usize) -> Result<TimeGrid> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(AiryError::NonPositiveHorizon(horizon));
    }
    if n_steps == 0 {
        return Err(AiryError::EmptyTimeGrid);
    }
    let nodes = (0..=n_steps)
        .map(|m| m as f64 * horizon / n_steps as f64)
        .collect();
    Ok(TimeGrid {
        horizon,
        n_steps,
        nodes,
    })
}

/// Complex-valued samples of a function of x on a spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceField {
    grid: Arc<SpatialGrid>,
    values: Vec<Complex64>,
}

impl SpaceField {
    pub fn new(grid: Arc<SpatialGrid>, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.n_points(), "field/grid size mismatch");
        SpaceField { grid, values }
    }

    pub fn zero(grid: Arc<SpatialGrid>) -> Self {
        let n = grid.n_points();
        SpaceField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// True when every imaginary part is exactly zero. Real-field status
    /// propagates exactly through real-symbol operators, so an exact check
    /// is reliable here.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest boundary magnitude relative to the overall supremum; the
    /// measure of how well this datum pretends the torus is the line.
    pub fn boundary_decay_ratio(&self) -> f64 {
        let n = self.values.len();
        let boundary = self.values[0].norm().max(self.values[n - 1].norm());
        let sup = self.sup_abs();
        if sup == 0.0 {
            0.0
        } else {
            boundary / sup
        }
    }

    pub fn scale(&self, factor: f64) -> SpaceField {
        SpaceField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &SpaceField) -> SpaceField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        SpaceField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SpaceField) -> SpaceField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        SpaceField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Pointwise multiplication by a real weight function of x.
    pub fn weight_pointwise(&self, weight: impl Fn(f64) -> f64) -> SpaceField {
        let values = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, v)| v * weight(x))
            .collect();
        SpaceField {
            grid: self.grid.clone(),
            values,
        }
    }
}

/// Samples a scalar function of x on the grid, rejecting non-finite values.
pub fn sample(f: impl Fn(f64) -> f64, grid: &Arc<SpatialGrid>) -> Result<SpaceField> {
    let mut values = Vec::with_capacity(grid.n_points());
    for &x in grid.points() {
        let v = f(x);
        if !v.is_finite() {
            return Err(AiryError::NonFiniteSample { x });
        }
        values.push(Complex64::new(v, 0.0));
    }
    Ok(SpaceField::new(grid.clone(), values))
}

/// Samples a complex-valued function of x on the grid.
pub fn sample_complex(f: impl Fn(f64) -> Complex64, grid: &Arc<SpatialGrid>) -> Result<SpaceField> {
    let mut values = Vec::with_capacity(grid.n_points());
    for &x in grid.points() {
        let v = f(x);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(AiryError::NonFiniteSample { x });
        }
        values.push(v);
    }
    Ok(SpaceField::new(grid.clone(), values))
}

/// A time-indexed sequence of space fields on `[0, T]`, one frame per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: Arc<SpatialGrid>,
    times: TimeGrid,
    frames: Vec<SpaceField>,
}

impl SpaceTimeField {
    pub fn new(grid: Arc<SpatialGrid>, times: TimeGrid, frames: Vec<SpaceField>) -> Self {
        assert_eq!(frames.len(), times.n_steps() + 1, "frame count mismatch");
        for f in &frames {
            assert_eq!(f.grid(), &grid, "frames must share the grid");
        }
        SpaceTimeField {
            grid,
            times,
            frames,
        }
    }

    pub fn zero(grid: Arc<SpatialGrid>, times: TimeGrid) -> Self {
        let frames = (0..=times.n_steps())
            .map(|_| SpaceField::zero(grid.clone()))
            .collect();
        SpaceTimeField {
            grid,
            times,
            frames,
        }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn frames(&self) -> &[SpaceField] {
        &self.frames
    }

    pub fn frame(&self, m: usize) -> &SpaceField {
        &self.frames[m]
    }

    pub fn sub(&self, other: &SpaceTimeField) -> SpaceTimeField {
        assert_eq!(self.times, other.times, "time grid mismatch");
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.sub(b))
            .collect();
        SpaceTimeField::new(self.grid.clone(), self.times.clone(), frames)
    }

    pub fn scale(&self, factor: f64) -> SpaceTimeField {
        let frames = self.frames.iter().map(|f| f.scale(factor)).collect();
        SpaceTimeField::new(self.grid.clone(), self.times.clone(), frames)
    }

    /// Applies a frame-wise map, keeping grid and time structure.
    pub fn map_frames(&self, op: impl Fn(&SpaceField) -> SpaceField) -> SpaceTimeField {
        let frames = self.frames.iter().map(op).collect();
        SpaceTimeField::new(self.grid.clone(), self.times.clone(), frames)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basic_layout() {
        let g = make_grid(8, 16.0).unwrap();
        assert_eq!(g.spacing(), 2.0);
        assert_eq!(g.points()[0], -8.0);
        // xi_1 = 2 pi / 16 = pi / 8
        let xi1 = g.wavenumbers()[g.n_points() / 2 + 1];
        assert!((xi1 - std::f64::consts::PI / 8.0).abs() < 1e-15);
        // dx * n = L exactly
        assert_eq!(g.spacing() * g.n_points() as f64, g.length());
    }

    #[test]
    fn grid_two_points() {
        let g = make_grid(2, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(g.wavenumbers().len(), 2);
        assert!((g.wavenumbers()[0] + 1.0).abs() < 1e-15);
        assert!((g.wavenumbers()[1]).abs() < 1e-15);
    }

    #[test]
    fn grid_spacing_1024() {
        let g = make_grid(1024, 128.0).unwrap();
        assert_eq!(g.spacing(), 0.125);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(make_grid(12, 1.0).is_err());
        assert!(make_grid(0, 1.0).is_err());
        assert!(make_grid(8, 0.0).is_err());
        assert!(make_grid(8, -2.0).is_err());
    }

    #[test]
    fn wavenumbers_symmetric_except_nyquist() {
        let g = make_grid(16, 32.0).unwrap();
        let w = g.wavenumbers();
        // all but the first (Nyquist) pair off against a negative partner
        for k in 1..g.n_points() / 2 {
            let neg = w[g.n_points() / 2 - k];
            let pos = w[g.n_points() / 2 + k];
            assert!((neg + pos).abs() < 1e-15);
        }
        assert!(w[0] < 0.0);
    }

    #[test]
    fn fft_index_wavenumbers_match_monotone_set() {
        let g = make_grid(8, 4.0).unwrap();
        let mut from_fft: Vec<f64> = (0..8).map(|i| g.wavenumber_at_fft_index(i)).collect();
        from_fft.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in from_fft.iter().zip(g.wavenumbers()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_weights_sum_to_length() {
        for n in [2usize, 64, 1024] {
            let g = make_grid(n, 37.5).unwrap();
            let total = g.spacing() * n as f64;
            assert!((total - g.length()).abs() < 1e-12 * g.length());
        }
    }

    #[test]
    fn sample_zero_and_cosine() {
        let g = make_grid(4, 2.0 * std::f64::consts::PI).unwrap();
        let z = sample(|_| 0.0, &g).unwrap();
        assert!(z.values().iter().all(|v| v.norm() == 0.0));

        let c = sample(f64::cos, &g).unwrap();
        let expect = [-1.0, 0.0, 1.0, 0.0];
        for (v, e) in c.values().iter().zip(expect) {
            assert!((v.re - e).abs() < 1e-15);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn sample_gaussian_boundary_tiny() {
        let g = make_grid(256, 32.0).unwrap();
        let f = sample(|x| (-x * x).exp(), &g).unwrap();
        assert!(f.values()[0].norm() < 1e-100);
        assert!(f.boundary_decay_ratio() < 1e-100);
    }

    #[test]
    fn sample_rejects_non_finite() {
        let g = make_grid(8, 4.0).unwrap();
        let err = sample(|x| 1.0 / x, &g);
        assert!(matches!(err, Err(AiryError::NonFiniteSample { .. })));
    }

    #[test]
    fn sample_is_linear() {
        let g = make_grid(64, 16.0).unwrap();
        let f = |x: f64| (-x * x).exp();
        let h = |x: f64| x * (-x * x / 2.0).exp();
        let lhs = sample(|x| 2.0 * f(x) + 3.0 * h(x), &g).unwrap();
        let rhs = sample(f, &g).unwrap().scale(2.0).add(&sample(h, &g).unwrap().scale(3.0));
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn time_grid_nodes() {
        let t = make_time_grid(1.0, 4).unwrap();
        assert_eq!(t.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let t = make_time_grid(0.5, 1).unwrap();
        assert_eq!(t.nodes(), &[0.0, 0.5]);
        let t = make_time_grid(2.0, 8).unwrap();
        assert_eq!(t.nodes()[3], 0.75);
        assert!(make_time_grid(0.0, 4).is_err());
        assert!(make_time_grid(-1.0, 4).is_err());
        assert!(make_time_grid(1.0, 0).is_err());
    }

    #[test]
    fn trapezoid_weights_sum_to_horizon() {
        let t = make_time_grid(2.5, 17).unwrap();
        let s: f64 = t.trapezoid_weights().iter().sum();
        assert!((s - 2.5).abs() < 1e-12);
    }
}
