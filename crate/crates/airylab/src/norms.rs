//! Norm functionals: Lebesgue norms on the grid, mixed space-time norms in
//! both nesting orders, Sobolev norms via Plancherel, weighted L2 moments,
//! and the six-component composite norms the fixed-point scheme contracts in.
//!
//! Exponents are carried as exact rationals (8/3, 24/11, 18/17, ...) so
//! configs and reports stay greppable; they become floats only inside the
//! power evaluations. Time integrals use composite trapezoid weights on the
//! existing nodes; an infinite exponent means max over nodes.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{AiryError, Result};
use crate::grid::{SpaceField, SpaceTimeField};
use crate::spectral::{deriv, fft_forward, frac_deriv};

/// A Lebesgue exponent in (0, inf].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    Finite(Ratio<i64>),
    Infinity,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent::Infinity;

    pub fn integer(p: i64) -> Exponent {
        Exponent::Finite(Ratio::from_integer(p))
    }

    pub fn rational(num: i64, den: i64) -> Exponent {
        Exponent::Finite(Ratio::new(num, den))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    fn validate(&self) -> Result<()> {
        if let Exponent::Finite(r) = self {
            if *r <= Ratio::from_integer(0) {
                return Err(AiryError::NonPositiveExponent(self.as_f64()));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Exponent::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Exponent::Infinity);
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|e| format!("{e}"))?;
            let den: i64 = den.trim().parse().map_err(|e| format!("{e}"))?;
            if den == 0 {
                return Err("zero denominator".into());
            }
            return Ok(Exponent::rational(num, den));
        }
        let n: i64 = s.parse().map_err(|e| format!("{e}"))?;
        Ok(Exponent::integer(n))
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which norm is evaluated first in a mixed space-time norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormOrder {
    /// L^p_x L^q_T: time norm inside, space norm outside.
    XOuter,
    /// L^q_T L^p_x: space norm inside, time norm outside.
    TOuter,
}

/// Mixed-norm exponent pair with nesting order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub p: Exponent,
    pub q: Exponent,
    pub order: NormOrder,
}

impl MixedNormSpec {
    pub fn x_outer(p: Exponent, q: Exponent) -> Result<Self> {
        p.validate()?;
        q.validate()?;
        Ok(MixedNormSpec {
            p,
            q,
            order: NormOrder::XOuter,
        })
    }

    pub fn t_outer(p: Exponent, q: Exponent) -> Result<Self> {
        p.validate()?;
        q.validate()?;
        Ok(MixedNormSpec {
            p,
            q,
            order: NormOrder::TOuter,
        })
    }
}

/// Sobolev regularity and weight exponent pair. The weight range comes from
/// the admissible window r <= s/2 of the commutator formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevParams {
    pub s: f64,
    pub r: f64,
}

impl SobolevParams {
    pub fn new(s: f64, r: f64) -> Result<Self> {
        if !(0.0..=1.0 / 6.0 + 1e-12).contains(&r) {
            return Err(AiryError::WeightOutOfRange(r));
        }
        if r > s / 2.0 + 1e-12 {
            return Err(AiryError::WeightOutOfRange(r));
        }
        Ok(SobolevParams { s, r })
    }

    /// Theorem-scale defaults: s = 1/3 with a caller-chosen weight.
    pub fn third_order(r: f64) -> Result<Self> {
        Self::new(1.0 / 3.0, r)
    }
}

/// The six components of the unweighted working norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuVector {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub mu5: f64,
    pub mu6: f64,
}

impl MuVector {
    pub fn sum(&self) -> f64 {
        self.mu1 + self.mu2 + self.mu3 + self.mu4 + self.mu5 + self.mu6
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.mu1, self.mu2, self.mu3, self.mu4, self.mu5, self.mu6]
    }
}

/// L^p norm over the spatial grid; p = inf is the grid max.
pub fn lp_norm(f: &SpaceField, p: Exponent) -> f64 {
    let dx = f.grid().spacing();
    match p {
        Exponent::Infinity => f.sup_abs(),
        Exponent::Finite(_) => {
            let pf = p.as_f64();
            let sum: f64 = f.values().iter().map(|v| v.norm().powf(pf) * dx).sum();
            sum.powf(1.0 / pf)
        }
    }
}

fn time_norm(samples: &[f64], weights: &[f64], q: Exponent) -> f64 {
    match q {
        Exponent::Infinity => samples.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(_) => {
            let qf = q.as_f64();
            let sum: f64 = samples
                .iter()
                .zip(weights)
                .map(|(&s, &w)| s.powf(qf) * w)
                .sum();
            sum.powf(1.0 / qf)
        }
    }
}

/// Mixed space-time norm in the declared nesting order.
pub fn mixed_norm(u: &SpaceTimeField, spec: &MixedNormSpec) -> f64 {
    let weights = u.times().trapezoid_weights();
    let n = u.grid().n_points();
    let dx = u.grid().spacing();
    match spec.order {
        NormOrder::XOuter => {
            // inner: per x_j a time norm; outer: spatial p-norm of those
            let mut inner = vec![0.0_f64; n];
            match spec.q {
                Exponent::Infinity => {
                    for frame in u.frames() {
                        for (j, v) in frame.values().iter().enumerate() {
                            inner[j] = inner[j].max(v.norm());
                        }
                    }
                }
                Exponent::Finite(_) => {
                    let qf = spec.q.as_f64();
                    for (frame, &w) in u.frames().iter().zip(&weights) {
                        for (j, v) in frame.values().iter().enumerate() {
                            inner[j] += v.norm().powf(qf) * w;
                        }
                    }
                    let inv = 1.0 / qf;
                    for s in &mut inner {
                        *s = s.powf(inv);
                    }
                }
            }
            match spec.p {
                Exponent::Infinity => inner.iter().copied().fold(0.0, f64::max),
                Exponent::Finite(_) => {
                    let pf = spec.p.as_f64();
                    let sum: f64 = inner.iter().map(|s| s.powf(pf) * dx).sum();
                    sum.powf(1.0 / pf)
                }
            }
        }
        NormOrder::TOuter => {
            let inner: Vec<f64> = u.frames().iter().map(|f| lp_norm(f, spec.p)).collect();
            time_norm(&inner, &weights, spec.q)
        }
    }
}

/// Inhomogeneous Sobolev norm via the discrete Plancherel sum
/// (L sum_k (1+xi_k^2)^s |c_k|^2)^{1/2}, normalized so s = 0 recovers the
/// grid L2 norm.
pub fn sobolev_norm(f: &SpaceField, s: f64) -> f64 {
    let grid = f.grid();
    let n = grid.n_points() as f64;
    let spectrum = fft_forward(f.values());
    let mut sum = 0.0;
    for (i, c) in spectrum.iter().enumerate() {
        let xi = grid.wavenumber_at_fft_index(i);
        let coeff = c.norm_sqr() / (n * n);
        sum += (1.0 + xi * xi).powf(s) * coeff;
    }
    (grid.length() * sum).sqrt()
}

/// Weighted moment (sum_j |x_j|^{2r} |f_j|^2 dx)^{1/2} on the fundamental
/// domain.
pub fn weighted_l2(f: &SpaceField, r: f64) -> f64 {
    assert!(r >= 0.0, "weight exponent must be nonnegative");
    if r == 0.0 {
        return lp_norm(f, Exponent::integer(2));
    }
    let dx = f.grid().spacing();
    let sum: f64 = f
        .grid()
        .points()
        .iter()
        .zip(f.values())
        .map(|(&x, v)| x.abs().powf(2.0 * r) * v.norm_sqr() * dx)
        .sum();
    sum.sqrt()
}

/// The derived orbits the composite norms need: spectral d/dx, D^{1/3},
/// and D^{1/3} d/dx applied frame by frame.
struct DerivedOrbits {
    dx: SpaceTimeField,
    d13: SpaceTimeField,
    d13_dx: SpaceTimeField,
}

fn derived_orbits(u: &SpaceTimeField) -> DerivedOrbits {
    let dx = u.map_frames(|f| deriv(f).expect("derivative symbol is finite"));
    let d13 = u.map_frames(|f| frac_deriv(f, 1.0 / 3.0).expect("nonnegative order"));
    let d13_dx = dx.map_frames(|f| frac_deriv(f, 1.0 / 3.0).expect("nonnegative order"));
    DerivedOrbits { dx, d13, d13_dx }
}

fn mu_specs() -> [MixedNormSpec; 5] {
    [
        // mu2: || d/dx u ||_{L^24_x L^{8/3}_T}
        MixedNormSpec::x_outer(Exponent::integer(24), Exponent::rational(8, 3)).unwrap(),
        // mu3: || D^{1/3} u ||_{L^8_x L^8_T}
        MixedNormSpec::x_outer(Exponent::integer(8), Exponent::integer(8)).unwrap(),
        // mu4: || D^{1/3} d/dx u ||_{L^inf_x L^2_T}
        MixedNormSpec::x_outer(Exponent::Infinity, Exponent::integer(2)).unwrap(),
        // mu5: || u ||_{L^6_x L^inf_T}
        MixedNormSpec::x_outer(Exponent::integer(6), Exponent::Infinity).unwrap(),
        // mu6: || d/dx u ||_{L^inf_x L^2_T}
        MixedNormSpec::x_outer(Exponent::Infinity, Exponent::integer(2)).unwrap(),
    ]
}

/// The six norm components of the working norm, all derivatives spectral.
pub fn mu_norms(u: &SpaceTimeField) -> MuVector {
    let d = derived_orbits(u);
    let [s2, s3, s4, s5, s6] = mu_specs();
    let mu1 = u
        .frames()
        .iter()
        .map(|f| sobolev_norm(f, 1.0 / 3.0))
        .fold(0.0, f64::max);
    MuVector {
        mu1,
        mu2: mixed_norm(&d.dx, &s2),
        mu3: mixed_norm(&d.d13, &s3),
        mu4: mixed_norm(&d.d13_dx, &s4),
        mu5: mixed_norm(u, &s5),
        mu6: mixed_norm(&d.dx, &s6),
    }
}

/// Running values of the six components on every prefix [0, t_m]. The last
/// entry equals `mu_norms(u)`. Shares the per-frame spectral work across
/// prefixes, so the whole series costs about as much as one full evaluation.
pub fn mu_norms_running(u: &SpaceTimeField) -> Vec<MuVector> {
    let d = derived_orbits(u);
    let n = u.grid().n_points();
    let dx = u.grid().spacing();
    let dt = u.times().dt();
    let m_last = u.times().n_steps();

    // per-x accumulators: [mu2 q=8/3, mu3 q=8, mu4 q=2, mu6 q=2] trapezoid
    // prefix integrals, plus running maxima for mu5 and mu1.
    let mut acc2 = vec![0.0; n];
    let mut acc3 = vec![0.0; n];
    let mut acc4 = vec![0.0; n];
    let mut acc6 = vec![0.0; n];
    let mut max5 = vec![0.0_f64; n];
    let mut mu1_running = 0.0_f64;

    let q2 = 8.0 / 3.0;
    let pow2 = |v: f64| v.powf(q2);
    let pow3 = |v: f64| v.powi(8);
    let pow_sq = |v: f64| v * v;

    let mut prev2: Vec<f64> = Vec::new();
    let mut prev3: Vec<f64> = Vec::new();
    let mut prev4: Vec<f64> = Vec::new();
    let mut prev6: Vec<f64> = Vec::new();

    let mut out = Vec::with_capacity(m_last + 1);
    for m in 0..=m_last {
        let f2: Vec<f64> = d.dx.frame(m).values().iter().map(|v| pow2(v.norm())).collect();
        let f3: Vec<f64> = d.d13.frame(m).values().iter().map(|v| pow3(v.norm())).collect();
        let f4: Vec<f64> = d
            .d13_dx
            .frame(m)
            .values()
            .iter()
            .map(|v| pow_sq(v.norm()))
            .collect();
        let f6: Vec<f64> = d.dx.frame(m).values().iter().map(|v| pow_sq(v.norm())).collect();

        if m > 0 {
            for j in 0..n {
                acc2[j] += 0.5 * dt * (prev2[j] + f2[j]);
                acc3[j] += 0.5 * dt * (prev3[j] + f3[j]);
                acc4[j] += 0.5 * dt * (prev4[j] + f4[j]);
                acc6[j] += 0.5 * dt * (prev6[j] + f6[j]);
            }
        }
        for (j, v) in u.frame(m).values().iter().enumerate() {
            max5[j] = max5[j].max(v.norm());
        }
        mu1_running = mu1_running.max(sobolev_norm(u.frame(m), 1.0 / 3.0));

        let outer = |acc: &[f64], inv_q: f64, p: f64| -> f64 {
            let sum: f64 = acc.iter().map(|&a| a.powf(inv_q * p) * dx).sum();
            sum.powf(1.0 / p)
        };
        let mu2 = outer(&acc2, 1.0 / q2, 24.0);
        let mu3 = outer(&acc3, 1.0 / 8.0, 8.0);
        let mu4 = acc4.iter().copied().fold(0.0, f64::max).sqrt();
        let mu6 = acc6.iter().copied().fold(0.0, f64::max).sqrt();
        let mu5 = {
            let sum: f64 = max5.iter().map(|&a| a.powi(6) * dx).sum();
            sum.powf(1.0 / 6.0)
        };
        out.push(MuVector {
            mu1: mu1_running,
            mu2,
            mu3,
            mu4,
            mu5,
            mu6,
        });

        prev2 = f2;
        prev3 = f3;
        prev4 = f4;
        prev6 = f6;
    }
    out
}

/// Sum of the six components.
pub fn yt_norm(u: &SpaceTimeField) -> f64 {
    mu_norms(u).sum()
}

/// Working norm of the weighted scheme: the unweighted composite plus the
/// supremum over frames of the r-weighted moment. Requires r in [0, 1/6].
pub fn xt_norm(u: &SpaceTimeField, r: f64) -> Result<f64> {
    if !(0.0..=1.0 / 6.0 + 1e-12).contains(&r) {
        return Err(AiryError::WeightOutOfRange(r));
    }
    let weighted_sup = u
        .frames()
        .iter()
        .map(|f| weighted_l2(f, r))
        .fold(0.0, f64::max);
    Ok(yt_norm(u) + weighted_sup)
}
