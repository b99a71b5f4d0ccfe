//! Landweber and Nesterov-accelerated two-point gradient iterations with
//! steepest-descent stepsize and discrepancy-principle stopping.

use crate::error::Result;
use crate::field::{LameField, VectorField};
use crate::operator::{AdjointGradient, Linearization, OperatorContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::time::Instant;

/// Guard for the degenerate case F'(x)s = 0 with s != 0.
const STEPSIZE_CAP: f64 = 1e6;
/// Below this gradient norm the iteration is declared converged.
const GRADIENT_ATOL: f64 = 1e-150;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Two-point gradient: Landweber with Nesterov momentum.
    Tpg,
    /// Classical Landweber, unit stepsize.
    Landweber,
    /// Landweber with the steepest descent stepsize.
    LandweberSd,
}

#[derive(Debug, Clone, Copy)]
pub struct StoppingRule {
    pub tau: f64,
    pub delta: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Residual fell below tau * delta.
    Discrepancy,
    /// Iteration cap reached; a normal termination, not an error.
    MaxIters,
    /// Gradient vanished below absolute tolerance.
    Converged,
}

#[derive(Debug, Clone)]
pub struct IterationState {
    pub x: LameField,
    pub x_prev: LameField,
    pub k: usize,
    pub residual_history: Vec<f64>,
    pub stopped: Option<StopReason>,
}

impl IterationState {
    pub fn new(x0: LameField) -> Self {
        IterationState {
            x_prev: x0.clone(),
            x: x0,
            k: 0,
            residual_history: Vec::new(),
            stopped: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NoisyData {
    pub u_delta: VectorField,
    /// Exact L2 distance to the clean field.
    pub delta: f64,
    pub seed: u64,
}

/// One row of the per-iteration log.
#[derive(Debug, Clone, Copy)]
pub struct LogRow {
    pub k: usize,
    pub residual: f64,
    pub stepsize: f64,
    pub alpha: f64,
    pub wall_secs: f64,
}

#[derive(Debug)]
pub struct ReconstructionResult {
    /// Final iterate (a deviation field in compact mode).
    pub x: LameField,
    /// Final effective Lame fields entering the PDE.
    pub lame: LameField,
    pub state: IterationState,
    pub log: Vec<LogRow>,
    pub wall_secs: f64,
}

/// Gradient direction s(x) = F'(x)*(u_delta - F(x)) and the L2 residual norm.
pub fn residual_gradient(
    ctx: &OperatorContext,
    x: &LameField,
    u_delta: &VectorField,
) -> Result<(AdjointGradient, f64)> {
    let lin = ctx.linearize(x)?;
    let (grad, res) = residual_gradient_at(ctx, &lin, u_delta)?;
    Ok((grad, res))
}

fn residual_gradient_at(
    ctx: &OperatorContext,
    lin: &Linearization,
    u_delta: &VectorField,
) -> Result<(AdjointGradient, f64)> {
    let mut r = u_delta.clone();
    r.axpy(-1.0, &lin.u);
    let res = ctx.l2_norm(&r);
    let grad = ctx.adjoint(lin, &r)?;
    Ok((grad, res))
}

pub enum Stepsize {
    Value(f64),
    /// Gradient below absolute tolerance; no step should be taken.
    Converged,
}

/// Steepest descent stepsize omega = ||s||_{Hs}^2 / ||F'(x)s||_{L2}^2.
pub fn steepest_descent_stepsize(
    ctx: &OperatorContext,
    lin: &Linearization,
    s: &AdjointGradient,
) -> Result<Stepsize> {
    let num = ctx.hs_norm_sq(&s.field)?;
    if num.sqrt() <= GRADIENT_ATOL {
        return Ok(Stepsize::Converged);
    }
    let dfs = ctx.derivative(lin, &s.field)?;
    let den = ctx.l2_inner(&dfs, &dfs);
    if den <= 0.0 {
        // degenerate direction: cap instead of dividing by zero
        return Ok(Stepsize::Value(STEPSIZE_CAP));
    }
    Ok(Stepsize::Value(num / den))
}

/// Nesterov momentum factor alpha_k = (k-1)/(k+2), clamped at zero.
pub fn nesterov_alpha(k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        (k as f64 - 1.0) / (k as f64 + 2.0)
    }
}

/// Shared update from the extrapolated point z: x_next = P(z + omega s(z)).
fn step_from(
    ctx: &OperatorContext,
    z: &LameField,
    u_delta: &VectorField,
    use_sd_stepsize: bool,
) -> Result<(Option<LameField>, f64)> {
    let lin = ctx.linearize(z)?;
    let (s, _res) = residual_gradient_at(ctx, &lin, u_delta)?;
    let omega = if use_sd_stepsize {
        match steepest_descent_stepsize(ctx, &lin, &s)? {
            Stepsize::Converged => return Ok((None, 0.0)),
            Stepsize::Value(v) => v,
        }
    } else {
        1.0
    };
    let mut x_next = z.clone();
    x_next.axpy(omega, &s.field);
    Ok((Some(ctx.project_admissible(&x_next)), omega))
}

/// One accelerated step. The gradient and stepsize are evaluated at
/// z_k = x_k + alpha_k (x_k - x_{k-1}); the result is projected onto the
/// admissible set.
pub fn tpg_step(
    ctx: &OperatorContext,
    state: &mut IterationState,
    u_delta: &VectorField,
) -> Result<StepInfoPublic> {
    let alpha = nesterov_alpha(state.k);
    let mut z = state.x.clone();
    let mut momentum = state.x.clone();
    momentum.axpy(-1.0, &state.x_prev);
    z.axpy(alpha, &momentum);
    advance(ctx, state, u_delta, &z, true, alpha)
}

/// One Landweber step from x_k, optionally with the steepest descent
/// stepsize. With `use_sd_stepsize` this is bitwise identical to `tpg_step`
/// with the momentum forced to zero.
pub fn landweber_step(
    ctx: &OperatorContext,
    state: &mut IterationState,
    u_delta: &VectorField,
    use_sd_stepsize: bool,
) -> Result<StepInfoPublic> {
    let z = state.x.clone();
    advance(ctx, state, u_delta, &z, use_sd_stepsize, 0.0)
}

#[derive(Debug, Clone, Copy)]
pub struct StepInfoPublic {
    pub stepsize: f64,
    pub alpha: f64,
}

fn advance(
    ctx: &OperatorContext,
    state: &mut IterationState,
    u_delta: &VectorField,
    z: &LameField,
    use_sd_stepsize: bool,
    alpha: f64,
) -> Result<StepInfoPublic> {
    let (next, omega) = step_from(ctx, z, u_delta, use_sd_stepsize)?;
    match next {
        Some(x_next) => {
            state.x_prev = std::mem::replace(&mut state.x, x_next);
            state.k += 1;
        }
        None => {
            state.stopped = Some(StopReason::Converged);
        }
    }
    Ok(StepInfoPublic {
        stepsize: omega,
        alpha,
    })
}

/// First index whose residual satisfies the discrepancy inequality, if any.
pub fn stop_index(history: &[f64], rule: &StoppingRule) -> Option<usize> {
    history.iter().position(|&r| r <= rule.tau * rule.delta)
}

/// Stopping decision for the current state.
pub fn check_discrepancy(state: &IterationState, rule: &StoppingRule) -> Option<StopReason> {
    if let Some(&last) = state.residual_history.last() {
        if last <= rule.tau * rule.delta {
            return Some(StopReason::Discrepancy);
        }
    }
    if state.k >= rule.max_iters {
        return Some(StopReason::MaxIters);
    }
    None
}

/// Gaussian nodal noise scaled so the L2 perturbation is exactly
/// `relative_level` times the L2 norm of `u`.
pub fn add_noise(
    ctx: &OperatorContext,
    u: &VectorField,
    relative_level: f64,
    seed: u64,
) -> NoisyData {
    if relative_level == 0.0 {
        return NoisyData {
            u_delta: u.clone(),
            delta: 0.0,
            seed,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = VectorField {
        values: (0..u.values.len())
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect(),
    };
    let norm_u = ctx.l2_norm(u);
    let norm_e = ctx.l2_norm(&noise);
    let delta = relative_level * norm_u;
    let mut u_delta = u.clone();
    u_delta.axpy(delta / norm_e, &noise);
    NoisyData {
        u_delta,
        delta,
        seed,
    }
}

/// Run the configured iteration until the discrepancy principle (or the
/// iteration cap, or gradient convergence) stops it.
pub fn run_inversion(
    ctx: &OperatorContext,
    x0: LameField,
    u_delta: &VectorField,
    rule: &StoppingRule,
    method: Method,
) -> Result<ReconstructionResult> {
    let start = Instant::now();
    let mut state = IterationState::new(ctx.project_admissible(&x0));
    let mut log = Vec::new();

    loop {
        let lin = ctx.linearize(&state.x)?;
        let mut r = u_delta.clone();
        r.axpy(-1.0, &lin.u);
        state.residual_history.push(ctx.l2_norm(&r));

        if let Some(reason) = check_discrepancy(&state, rule) {
            state.stopped = Some(reason);
            log.push(LogRow {
                k: state.k,
                residual: *state.residual_history.last().unwrap(),
                stepsize: 0.0,
                alpha: 0.0,
                wall_secs: start.elapsed().as_secs_f64(),
            });
            break;
        }

        let info = match method {
            Method::Tpg => tpg_step(ctx, &mut state, u_delta)?,
            Method::Landweber => landweber_step(ctx, &mut state, u_delta, false)?,
            Method::LandweberSd => landweber_step(ctx, &mut state, u_delta, true)?,
        };
        log.push(LogRow {
            k: state.k.saturating_sub(1),
            residual: state.residual_history[state.residual_history.len() - 1],
            stepsize: info.stepsize,
            alpha: info.alpha,
            wall_secs: start.elapsed().as_secs_f64(),
        });
        if state.stopped.is_some() {
            break;
        }
    }

    let lame = ctx.effective_lame(&state.x)?;
    Ok(ReconstructionResult {
        x: state.x.clone(),
        lame,
        state,
        log,
        wall_secs: start.elapsed().as_secs_f64(),
    })
}
