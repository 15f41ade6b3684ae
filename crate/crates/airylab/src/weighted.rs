//! Weighted-space machinery: the commutator residual that measures how far
//! |x|^r fails to commute with the Airy propagator, its linear-growth bound,
//! and the persistence experiment that tracks Sobolev and weighted norms of
//! a solution along the evolution.
//!
//! The residual is represented operationally — as the defect in the pointwise
//! commutation identity — rather than through any closed-form kernel. The
//! weight |x|^r acts in physical space on the fundamental domain; data are
//! required to decay at the boundary so the |x|^r seam at the domain edge is
//! immaterial.

use serde::{Deserialize, Serialize};

use crate::error::{AiryError, Result};
use crate::evolution::{evolve_oracle, SolverConfig};
use crate::grid::{SpaceField, TimeGrid};
use crate::norms::{lp_norm, sobolev_norm, weighted_l2, Exponent, MuVector};
use crate::picard::{picard_solve, NormKind};
use crate::spectral::airy_propagate;

/// Relative boundary decay demanded of weighted-path inputs.
const BOUNDARY_DECAY_TOL: f64 = 1e-12;

/// Per-time commutator residual norms against the linear-growth majorant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlpReport {
    pub times: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub bound_values: Vec<f64>,
    pub max_ratio: f64,
}

/// Norm trajectories of one persistence run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub times: Vec<f64>,
    pub h13_norms: Vec<f64>,
    pub weighted_norms: Vec<f64>,
    pub mu_table: MuVector,
    pub verdict: bool,
    /// Ceiling the tracked norms were checked against.
    pub ceiling: f64,
    /// Empirical constant in the growth shape
    /// w(t) <= w(0) + K (1 + T) |u0|_{H^{1/3}}.
    pub k_emp: f64,
    /// Where the solver failed, when it did.
    pub failure_time: Option<f64>,
}

/// Which dynamics drives a persistence run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PersistenceSolver {
    Picard,
    Oracle,
}

/// Knobs for [`persistence_run`]; the ceiling is typically the ball radius
/// from the horizon selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PersistenceOptions {
    pub ceiling: f64,
    pub picard_tol: f64,
    pub max_iter: usize,
    pub oracle: SolverConfig,
}

impl Default for PersistenceOptions {
    fn default() -> Self {
        PersistenceOptions {
            ceiling: f64::INFINITY,
            picard_tol: 1e-10,
            max_iter: 25,
            oracle: SolverConfig::default(),
        }
    }
}

fn check_weight_and_decay(u0: &SpaceField, r: f64) -> Result<()> {
    if r == 0.0 {
        return Err(AiryError::ZeroWeight);
    }
    if !(0.0..=1.0 / 6.0 + 1e-12).contains(&r) {
        return Err(AiryError::WeightOutOfRange(r));
    }
    let ratio = u0.boundary_decay_ratio();
    if ratio > BOUNDARY_DECAY_TOL {
        return Err(AiryError::InsufficientDecay {
            ratio,
            tol: BOUNDARY_DECAY_TOL,
        });
    }
    Ok(())
}

/// The commutator defect at time t: the field whose forward propagation is
/// |x|^r e^{-it d^3} u0 - e^{-it d^3}(|x|^r u0). Isolated by inverting the
/// outer propagator, which is legitimate because the propagator is an
/// invertible L2 isometry.
pub fn flp_residual(u0: &SpaceField, r: f64, t: f64) -> Result<SpaceField> {
    check_weight_and_decay(u0, r)?;
    let weighted_orbit = airy_propagate(u0, t).weight_pointwise(|x| x.abs().powf(r));
    let orbit_of_weighted = airy_propagate(&u0.weight_pointwise(|x| x.abs().powf(r)), t);
    let defect = weighted_orbit.sub(&orbit_of_weighted);
    Ok(airy_propagate(&defect, -t))
}

/// L2 size of the defect without materializing the backward propagation
/// (the propagator is an isometry).
fn residual_norm(u0: &SpaceField, weighted_u0: &SpaceField, r: f64, t: f64) -> f64 {
    let weighted_orbit = airy_propagate(u0, t).weight_pointwise(|x| x.abs().powf(r));
    let orbit_of_weighted = airy_propagate(weighted_u0, t);
    lp_norm(&weighted_orbit.sub(&orbit_of_weighted), Exponent::integer(2))
}

/// Sweeps the residual over the time nodes and compares against the
/// majorant (1 + t)(|u0|_{L^2} + |D^{2r} u0|_{L^2}).
pub fn flp_bound_check(u0: &SpaceField, r: f64, times: &TimeGrid) -> Result<FlpReport> {
    check_weight_and_decay(u0, r)?;
    let weighted_u0 = u0.weight_pointwise(|x| x.abs().powf(r));
    let l2 = lp_norm(u0, Exponent::integer(2));
    let d2r = lp_norm(
        &crate::spectral::frac_deriv(u0, 2.0 * r)?,
        Exponent::integer(2),
    );
    let base = l2 + d2r;

    let mut out_times = Vec::with_capacity(times.n_steps() + 1);
    let mut residual_norms = Vec::with_capacity(times.n_steps() + 1);
    let mut bound_values = Vec::with_capacity(times.n_steps() + 1);
    let mut max_ratio = 0.0_f64;
    for &t in times.nodes() {
        let res = residual_norm(u0, &weighted_u0, r, t);
        let bound = (1.0 + t) * base;
        out_times.push(t);
        residual_norms.push(res);
        bound_values.push(bound);
        if bound > 0.0 {
            max_ratio = max_ratio.max(res / bound);
        }
    }
    Ok(FlpReport {
        times: out_times,
        residual_norms,
        bound_values,
        max_ratio,
    })
}

/// Evolves the datum and records the Sobolev and r-weighted norms at every
/// node. The verdict is true when every tracked norm is finite and below the
/// configured ceiling. Solver failure produces a false verdict with the
/// failure time, not an error.
pub fn persistence_run(
    u0: &SpaceField,
    r: f64,
    times: &TimeGrid,
    solver: PersistenceSolver,
    options: &PersistenceOptions,
) -> Result<PersistenceReport> {
    if !(0.0..=1.0 / 6.0 + 1e-12).contains(&r) {
        return Err(AiryError::WeightOutOfRange(r));
    }

    let evolved = match solver {
        PersistenceSolver::Picard => {
            let norm_kind = if r > 0.0 { NormKind::Xt(r) } else { NormKind::Yt };
            match picard_solve(u0, times, options.picard_tol, options.max_iter, norm_kind) {
                Ok((field, diag)) if diag.converged => Ok(field),
                Ok((_, _)) => Err(times.horizon()),
                Err(AiryError::NonlinearityOverflow { .. }) => Err(times.horizon()),
                Err(e) => return Err(e),
            }
        }
        PersistenceSolver::Oracle => match evolve_oracle(u0, times, &options.oracle) {
            Ok(field) => Ok(field),
            Err(AiryError::SolverBlowUp { t, .. }) => Err(t),
            Err(e) => return Err(e),
        },
    };

    let field = match evolved {
        Ok(field) => field,
        Err(failure_time) => {
            return Ok(PersistenceReport {
                times: vec![],
                h13_norms: vec![],
                weighted_norms: vec![],
                mu_table: MuVector {
                    mu1: f64::NAN,
                    mu2: f64::NAN,
                    mu3: f64::NAN,
                    mu4: f64::NAN,
                    mu5: f64::NAN,
                    mu6: f64::NAN,
                },
                verdict: false,
                ceiling: options.ceiling,
                k_emp: f64::NAN,
                failure_time: Some(failure_time),
            })
        }
    };

    let h13_norms: Vec<f64> = field
        .frames()
        .iter()
        .map(|f| sobolev_norm(f, 1.0 / 3.0))
        .collect();
    let weighted_norms: Vec<f64> = field
        .frames()
        .iter()
        .map(|f| weighted_l2(f, r))
        .collect();
    let mu_table = crate::norms::mu_norms(&field);

    let h13_0 = h13_norms[0];
    let w0 = weighted_norms[0];
    let horizon = times.horizon();
    let k_emp = if h13_0 > 0.0 {
        weighted_norms
            .iter()
            .map(|&w| (w - w0) / ((1.0 + horizon) * h13_0))
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    let all_finite = h13_norms.iter().chain(&weighted_norms).all(|v| v.is_finite());
    let below_ceiling = h13_norms
        .iter()
        .chain(&weighted_norms)
        .all(|&v| v <= options.ceiling);
    Ok(PersistenceReport {
        times: times.nodes().to_vec(),
        h13_norms,
        weighted_norms,
        mu_table,
        verdict: all_finite && below_ceiling,
        ceiling: options.ceiling,
        k_emp,
        failure_time: None,
    })
}
