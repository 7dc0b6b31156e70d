//! Euler-Newton path tracking for the homotopy
//! H(x,t) = (t*A + (1-t)*I) x^{m-1} - b from the trivial start system at
//! t = 0 to the target multilinear system at t = 1.
//!
//! The problem is scaled by omega, the largest magnitude among the
//! entries of A and b, before tracking; termination is on the residue of
//! the scaled system. The combined tensor t*A + (1-t)*I is never
//! materialized: H and its derivatives are assembled from contractions
//! of the scaled A plus diagonal terms.

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, lu_solve, norm2, DenseMatrix};
use crate::tensor::{power_vector, power_vector_int, DenseTensor, JacobianMode};

/// The scaled system together with the original inputs.
#[derive(Debug, Clone)]
pub struct HomotopyProblem {
    a_scaled: DenseTensor,
    b_scaled: Vec<f64>,
    omega: f64,
    a_orig: DenseTensor,
    b_orig: Vec<f64>,
}

impl HomotopyProblem {
    /// Scale (A, b) by omega = max(|A| entries, b entries). Scaling does
    /// not change the solution set of A x^{m-1} = b.
    pub fn scale(a: DenseTensor, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.len(),
            });
        }
        if let Some(bad) = b.iter().find(|&&v| v <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "right side must be positive, found {bad}"
            )));
        }
        let omega = b
            .iter()
            .fold(a.max_abs(), |acc, &v| acc.max(v));
        if omega == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot scale an all-zero problem".into(),
            ));
        }
        let mut a_scaled = a.clone();
        for e in a_scaled.entries_mut() {
            *e /= omega;
        }
        let b_scaled = b.iter().map(|v| v / omega).collect();
        Ok(HomotopyProblem {
            a_scaled,
            b_scaled,
            omega,
            a_orig: a,
            b_orig: b,
        })
    }

    pub fn order(&self) -> usize {
        self.a_scaled.order()
    }

    pub fn dim(&self) -> usize {
        self.a_scaled.dim()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn scaled_tensor(&self) -> &DenseTensor {
        &self.a_scaled
    }

    pub fn scaled_rhs(&self) -> &[f64] {
        &self.b_scaled
    }

    pub fn original_tensor(&self) -> &DenseTensor {
        &self.a_orig
    }

    pub fn original_rhs(&self) -> &[f64] {
        &self.b_orig
    }

    /// H(x,t) = t * A x^{m-1} + (1-t) * x^{[m-1]} - b on the scaled data.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        let m = self.order();
        let ax = self.a_scaled.apply(x)?;
        let xp = power_vector_int(x, (m - 1) as i32);
        Ok(ax
            .iter()
            .zip(&xp)
            .zip(&self.b_scaled)
            .map(|((a, p), b)| t * a + (1.0 - t) * p - b)
            .collect())
    }

    /// D_x H(x,t) = t * (m-1) Ahat x^{m-2} + (1-t) * (m-1) diag(x^{[m-2]}).
    pub fn jacobian_x(&self, x: &[f64], t: f64) -> Result<DenseMatrix> {
        let m = self.order();
        let mut jac = self.a_scaled.jacobian(x, JacobianMode::OnTheFly)?;
        let xp = power_vector_int(x, (m - 2) as i32);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                jac[(i, j)] *= t;
            }
            jac[(i, i)] += (1.0 - t) * (m - 1) as f64 * xp[i];
        }
        Ok(jac)
    }

    /// D_t H(x,t) = A x^{m-1} - x^{[m-1]}, independent of t.
    pub fn dt(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = self.order();
        let ax = self.a_scaled.apply(x)?;
        let xp = power_vector_int(x, (m - 1) as i32);
        Ok(ax.iter().zip(&xp).map(|(a, p)| a - p).collect())
    }

    /// Scaled residue ||A x^{m-1} - b||_2, the termination quantity.
    pub fn residue_scaled(&self, x: &[f64]) -> Result<f64> {
        Ok(norm2(&self.eval(x, 1.0)?))
    }

    /// Residue of the original, unscaled system.
    pub fn residue_orig(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a_orig.apply(x)?;
        let r: Vec<f64> = ax.iter().zip(&self.b_orig).map(|(a, b)| a - b).collect();
        Ok(norm2(&r))
    }
}

/// x0 = b^{[1/(m-1)]}, the exact solution of the start system
/// I x^{m-1} = b.
pub fn initial_point(b: &[f64], order: usize) -> Result<Vec<f64>> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "order must be >= 2, got {order}"
        )));
    }
    if let Some(bad) = b.iter().find(|&&v| v <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "initial point requires b > 0, found {bad}"
        )));
    }
    power_vector(b, 1.0 / (order - 1) as f64)
}

/// Stepsize-control constants and tolerances for [`track`].
#[derive(Debug, Clone, Copy)]
pub struct TrackerConfig {
    pub h_init: f64,
    pub h_min: f64,
    pub expand: f64,
    pub contract: f64,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub final_tol: f64,
    pub max_predictor_steps: usize,
    pub boundary_fraction: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            h_init: 0.2,
            h_min: 1e-8,
            expand: 2.0,
            contract: 0.5,
            newton_tol: 1e-10,
            newton_max: 10,
            final_tol: 1e-12,
            max_predictor_steps: 500,
            boundary_fraction: 0.9,
        }
    }
}

impl TrackerConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.contract > 0.0
            && self.contract < 1.0
            && self.expand > 1.0
            && self.h_min < self.h_init
            && self.h_init <= 1.0
            && self.newton_tol > 0.0
            && self.final_tol > 0.0
            && self.boundary_fraction > 0.0
            && self.boundary_fraction <= 1.0;
        if !ok {
            return Err(Error::InvalidArgument(
                "tracker config violates 0 < contract < 1 < expand, h_min < h_init <= 1, tolerances > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Mutable state of one path-following run.
#[derive(Debug, Clone)]
pub struct TrackState {
    pub x: Vec<f64>,
    pub t: f64,
    pub h: f64,
    pub euler_count: usize,
    pub newton_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Converged,
    StepTooSmall,
    MaxSteps,
    SingularJacobian,
}

impl std::fmt::Display for TrackStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TrackStatus::Converged => "Converged",
            TrackStatus::StepTooSmall => "StepTooSmall",
            TrackStatus::MaxSteps => "MaxSteps",
            TrackStatus::SingularJacobian => "SingularJacobian",
        };
        f.write_str(s)
    }
}

/// Outcome of a tracking run. `euitr` counts accepted predictor steps;
/// `nwitr` counts every corrector iteration including final polishing.
#[derive(Debug, Clone)]
pub struct TrackResult {
    pub x: Vec<f64>,
    pub euitr: usize,
    pub nwitr: usize,
    pub residue_scaled: f64,
    pub residue_orig: f64,
    pub status: TrackStatus,
}

/// Solve the Davidenko system D_x H * xdot = -D_t H for the tangent and
/// take the Euler step x + h * xdot.
pub fn euler_predict(p: &HomotopyProblem, state: &TrackState, h: f64) -> Result<Vec<f64>> {
    let jac = p.jacobian_x(&state.x, state.t)?;
    let f = lu_factor(&jac)?;
    let rhs: Vec<f64> = p.dt(&state.x)?.iter().map(|v| -v).collect();
    let tangent = lu_solve(&f, &rhs)?;
    Ok(state
        .x
        .iter()
        .zip(&tangent)
        .map(|(xi, di)| xi + h * di)
        .collect())
}

/// Result of a Newton correction attempt.
#[derive(Debug, Clone)]
pub enum NewtonOutcome {
    /// Corrected point and the number of iterations spent.
    Converged(Vec<f64>, usize),
    /// Residual still above tolerance after the iteration cap.
    NotConverged(usize),
}

/// Fixed-t Newton iteration toward H(x,t) = 0, with fraction-to-boundary
/// damping that keeps every iterate strictly positive.
pub fn newton_correct(
    p: &HomotopyProblem,
    x_hat: &[f64],
    t: f64,
    tol: f64,
    cfg: &TrackerConfig,
) -> Result<NewtonOutcome> {
    let mut x = x_hat.to_vec();
    for iters in 0..=cfg.newton_max {
        let r = p.eval(&x, t)?;
        if norm2(&r) <= tol {
            return Ok(NewtonOutcome::Converged(x, iters));
        }
        if iters == cfg.newton_max {
            break;
        }
        let jac = p.jacobian_x(&x, t)?;
        let f = lu_factor(&jac)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = lu_solve(&f, &rhs)?;

        // largest lambda in (0,1] with x + lambda*delta >= (1-bf)*x
        let mut lambda: f64 = 1.0;
        for (xi, di) in x.iter().zip(&delta) {
            if *di < 0.0 {
                lambda = lambda.min(cfg.boundary_fraction * xi / -di);
            }
        }
        for (xi, di) in x.iter_mut().zip(&delta) {
            *xi += lambda * di;
        }
    }
    Ok(NewtonOutcome::NotConverged(cfg.newton_max))
}

/// Track the solution path of H(x,t) = 0 from t = 0 to t = 1 with an
/// adaptive Euler-Newton predictor-corrector, then polish at t = 1 until
/// the scaled residue drops below `final_tol`.
pub fn track(a: DenseTensor, b: Vec<f64>, cfg: &TrackerConfig) -> Result<TrackResult> {
    cfg.validate()?;
    let p = HomotopyProblem::scale(a, b)?;
    track_problem(&p, cfg)
}

/// Same as [`track`] for an already-scaled problem.
pub fn track_problem(p: &HomotopyProblem, cfg: &TrackerConfig) -> Result<TrackResult> {
    track_problem_with_observer(p, cfg, &mut |_| {})
}

/// [`track_problem`] with a callback invoked at every accepted point,
/// for callers that want to inspect the path (diagnostics, tests).
pub fn track_problem_with_observer(
    p: &HomotopyProblem,
    cfg: &TrackerConfig,
    observer: &mut dyn FnMut(&TrackState),
) -> Result<TrackResult> {
    cfg.validate()?;
    let mut state = TrackState {
        x: initial_point(p.scaled_rhs(), p.order())?,
        t: 0.0,
        h: cfg.h_init,
        euler_count: 0,
        newton_count: 0,
    };

    while state.t < 1.0 {
        if state.euler_count >= cfg.max_predictor_steps {
            return finish(p, state, TrackStatus::MaxSteps);
        }
        let last_step = state.h >= 1.0 - state.t;
        let h_eff = state.h.min(1.0 - state.t);

        let x_hat = match euler_predict(p, &state, h_eff) {
            Ok(x_hat) => x_hat,
            Err(Error::SingularMatrix { .. }) => {
                return finish(p, state, TrackStatus::SingularJacobian)
            }
            Err(e) => return Err(e),
        };

        let accepted = if x_hat.iter().all(|&v| v > 0.0) {
            let t_next = if last_step { 1.0 } else { state.t + h_eff };
            match newton_correct(p, &x_hat, t_next, cfg.newton_tol, cfg)? {
                NewtonOutcome::Converged(x_new, iters) => {
                    state.newton_count += iters;
                    state.x = x_new;
                    state.t = t_next;
                    state.euler_count += 1;
                    observer(&state);
                    if iters <= 2 {
                        state.h = (state.h * cfg.expand).min(1.0);
                    }
                    true
                }
                NewtonOutcome::NotConverged(iters) => {
                    state.newton_count += iters;
                    false
                }
            }
        } else {
            // predictor left the positive orthant: step was too aggressive
            false
        };

        if !accepted {
            state.h *= cfg.contract;
            if state.h < cfg.h_min {
                return finish(p, state, TrackStatus::StepTooSmall);
            }
        }
    }

    // polish at t = 1 under the final tolerance
    match newton_correct(p, &state.x.clone(), 1.0, cfg.final_tol, cfg) {
        Ok(NewtonOutcome::Converged(x, iters)) => {
            state.newton_count += iters;
            state.x = x;
            observer(&state);
            finish(p, state, TrackStatus::Converged)
        }
        Ok(NewtonOutcome::NotConverged(iters)) => {
            state.newton_count += iters;
            finish(p, state, TrackStatus::MaxSteps)
        }
        Err(Error::SingularMatrix { .. }) => finish(p, state, TrackStatus::SingularJacobian),
        Err(e) => Err(e),
    }
}

fn finish(p: &HomotopyProblem, state: TrackState, status: TrackStatus) -> Result<TrackResult> {
    let residue_scaled = p.residue_scaled(&state.x)?;
    let residue_orig = p.residue_orig(&state.x)?;
    let status = if status == TrackStatus::Converged
        && !(residue_scaled <= 1e-12 && state.x.iter().all(|&v| v > 0.0))
    {
        TrackStatus::MaxSteps
    } else {
        status
    };
    Ok(TrackResult {
        x: state.x,
        euitr: state.euler_count,
        nwitr: state.newton_count,
        residue_scaled,
        residue_orig,
        status,
    })
}
