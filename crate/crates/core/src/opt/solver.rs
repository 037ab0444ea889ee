//! Augmented-Lagrangian solver for the transcribed minimum-effort problems.
//!
//! Outer loop: multiplier and penalty updates on the terminal equality
//! residuals. Inner loop: projected-gradient descent on the augmented
//! objective over the control/free-scalar box, with a Barzilai-Borwein
//! initial step and Armijo backtracking. Gradients are forward finite
//! differences; the per-column evaluations are independent and collected in
//! index order, so results are bit-identical however they are scheduled.
//!
//! Everything is deterministic: no randomization, no time-dependent state.

use super::shooting::{evaluate_decision, residual_labels, DecisionEval};
use super::{OptimizationResult, SolverConfig, SolverStatus, TranscribedProblem};
use crate::error::Result;
use crate::exec::par_map_range;
use crate::opt::baseline;
use std::sync::atomic::{AtomicUsize, Ordering};

struct Workspace<'a> {
    problem: &'a TranscribedProblem,
    config: &'a SolverConfig,
    /// Per-decision-entry scale and raw box bounds.
    scale: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Objective normalization so the scaled cost is O(1).
    cost_ref: f64,
    /// Per-constraint normalization so each scaled residual starts O(1);
    /// frozen at the initial iterate, so the solve stays deterministic.
    residual_scale: Vec<f64>,
    evaluations: AtomicUsize,
}

impl<'a> Workspace<'a> {
    fn new(problem: &'a TranscribedProblem, config: &'a SolverConfig) -> Self {
        let n_samples = problem.sample_count();
        let mut scale = Vec::with_capacity(problem.decision_len());
        let mut lower = Vec::with_capacity(problem.decision_len());
        let mut upper = Vec::with_capacity(problem.decision_len());
        for c in 0..problem.channels() {
            for _ in 0..n_samples {
                scale.push(problem.control_scales[c]);
                lower.push(problem.control_lower[c]);
                upper.push(problem.control_upper[c]);
            }
        }
        for s in &problem.free_scalars {
            scale.push(s.scale);
            lower.push(s.lower);
            upper.push(s.upper);
        }
        let mut cost_ref = 0.0;
        for c in 0..problem.channels() {
            cost_ref += problem.effort_weights[c]
                * problem.control_scales[c]
                * problem.control_scales[c];
        }
        cost_ref *= problem.final_time();
        if cost_ref <= 0.0 {
            cost_ref = 1.0;
        }
        Workspace {
            problem,
            config,
            scale,
            lower,
            upper,
            cost_ref,
            residual_scale: Vec::new(),
            evaluations: AtomicUsize::new(0),
        }
    }

    fn unscale(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.scale).map(|(v, s)| v * s).collect()
    }

    fn project(&self, x: &mut [f64]) {
        for i in 0..x.len() {
            x[i] = x[i].clamp(self.lower[i] / self.scale[i], self.upper[i] / self.scale[i]);
        }
    }

    fn evaluate(&self, x: &[f64]) -> DecisionEval {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        evaluate_decision(self.problem, &self.unscale(x))
    }

    /// Scaled residual vector of an evaluation.
    fn scaled_residuals(&self, eval: &DecisionEval) -> Vec<f64> {
        eval.residuals
            .iter()
            .zip(&self.residual_scale)
            .map(|(c, s)| c / s)
            .collect()
    }

    /// Augmented objective at fixed multipliers and penalty, built on the
    /// scaled residuals.
    fn phi(&self, eval: &DecisionEval, lambda: &[f64], mu: f64) -> f64 {
        let mut value = eval.cost / self.cost_ref;
        for ((c, s), l) in eval.residuals.iter().zip(&self.residual_scale).zip(lambda) {
            let cs = c / s;
            value += l * cs + 0.5 * mu * cs * cs;
        }
        value
    }

    fn phi_at(&self, x: &[f64], lambda: &[f64], mu: f64) -> (f64, DecisionEval) {
        let eval = self.evaluate(x);
        (self.phi(&eval, lambda, mu), eval)
    }

    /// Forward-difference gradient of the augmented objective. Columns are
    /// independent; results are collected in index order.
    fn gradient(&self, x: &[f64], phi_x: f64, lambda: &[f64], mu: f64) -> Vec<f64> {
        let n = x.len();
        par_map_range(self.config.parallelism, n, |i| {
            let h = self.config.fd_step * x[i].abs().max(1.0);
            let mut probe = x.to_vec();
            probe[i] += h;
            let (phi_probe, _) = self.phi_at(&probe, lambda, mu);
            (phi_probe - phi_x) / h
        })
    }

    /// Infinity norm of the unit-step projected gradient, the box-aware
    /// first-order optimality measure.
    fn projected_gradient_norm(&self, x: &[f64], g: &[f64]) -> f64 {
        let mut norm = 0.0f64;
        for i in 0..x.len() {
            let mut trial = x[i] - g[i];
            trial = trial.clamp(self.lower[i] / self.scale[i], self.upper[i] / self.scale[i]);
            norm = norm.max((trial - x[i]).abs());
        }
        norm
    }
}

struct InnerOutcome {
    phi: f64,
    eval: DecisionEval,
    pg_norm: f64,
    iterations: usize,
}

/// Projected-gradient descent with BB step and Armijo backtracking.
fn minimize_inner(
    ws: &Workspace,
    x: &mut Vec<f64>,
    lambda: &[f64],
    mu: f64,
) -> InnerOutcome {
    const ARMIJO: f64 = 1e-4;
    const MAX_BACKTRACKS: usize = 40;
    // Non-monotone (GLL) reference window: accept against the worst of the
    // last few values, which lets Barzilai-Borwein steps run at full length.
    const MEMORY: usize = 8;

    let (mut phi, mut eval) = ws.phi_at(x, lambda, mu);
    let mut g = ws.gradient(x, phi, lambda, mu);
    let mut alpha = {
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gmax > 0.0 {
            (1.0 / gmax).clamp(1e-8, 1e4)
        } else {
            1.0
        }
    };
    let mut iterations = 0;
    let mut pg_norm = ws.projected_gradient_norm(x, &g);
    let mut recent = std::collections::VecDeque::from(vec![phi]);

    for _ in 0..ws.config.inner_max {
        if pg_norm < ws.config.eps_gradient {
            break;
        }
        iterations += 1;

        // Projected step direction for the current trial step length.
        let mut direction = vec![0.0; x.len()];
        let mut descent = 0.0;
        for i in 0..x.len() {
            let trial = (x[i] - alpha * g[i])
                .clamp(ws.lower[i] / ws.scale[i], ws.upper[i] / ws.scale[i]);
            direction[i] = trial - x[i];
            descent += g[i] * direction[i];
        }
        if descent >= -1e-18 {
            break;
        }

        let phi_reference = recent.iter().copied().fold(phi, f64::max);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let x_new: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + t * di)
                .collect();
            let (phi_new, eval_new) = ws.phi_at(&x_new, lambda, mu);
            if phi_new <= phi_reference + ARMIJO * t * descent {
                accepted = Some((x_new, phi_new, eval_new));
                break;
            }
            t *= 0.5;
        }
        let Some((x_new, phi_new, eval_new)) = accepted else {
            break; // stalled: no acceptable step along the projected arc
        };

        let g_new = ws.gradient(&x_new, phi_new, lambda, mu);
        let (mut s_dot_s, mut s_dot_y) = (0.0, 0.0);
        for i in 0..x.len() {
            let s = x_new[i] - x[i];
            let y = g_new[i] - g[i];
            s_dot_s += s * s;
            s_dot_y += s * y;
        }
        alpha = if s_dot_y > 1e-18 {
            (s_dot_s / s_dot_y).clamp(1e-10, 1e10)
        } else {
            1e4
        };

        *x = x_new;
        phi = phi_new;
        eval = eval_new;
        g = g_new;
        pg_norm = ws.projected_gradient_norm(x, &g);
        recent.push_back(phi);
        if recent.len() > MEMORY {
            recent.pop_front();
        }
    }

    InnerOutcome {
        phi,
        eval,
        pg_norm,
        iterations,
    }
}

/// Build the raw initial decision vector: constant thrust at the value the
/// constant-thrust baseline needs for the first fixed terminal component
/// (mid-box when no such constant exists), zero deflection, free scalars at
/// their declared guesses.
fn initial_guess(problem: &TranscribedProblem) -> Vec<f64> {
    let n_samples = problem.sample_count();
    let mut z = Vec::with_capacity(problem.decision_len());
    for c in 0..problem.channels() {
        let value = 0.0f64.clamp(problem.control_lower[c], problem.control_upper[c]);
        z.extend(std::iter::repeat(value).take(n_samples));
    }
    for s in &problem.free_scalars {
        z.push(s.guess.clamp(s.lower, s.upper));
    }

    let first_fixed = problem
        .boundary
        .terminal
        .iter()
        .position(|t| matches!(t, super::TerminalComponent::Fixed(_)));
    let mid = 0.5 * (problem.control_lower[0] + problem.control_upper[0]);
    let thrust_guess = first_fixed
        .and_then(|component| {
            baseline::constant_thrust_baseline(problem, component, f64::INFINITY)
                .ok()
                .map(|b| b.thrust)
        })
        .unwrap_or(mid);
    for k in 0..n_samples {
        z[k] = thrust_guess.clamp(problem.control_lower[0], problem.control_upper[0]);
    }
    z
}

/// Solve the transcribed problem. Free boundary scalars declared on the
/// problem ride along in the decision vector and are reported in the result.
pub fn solve(problem: &TranscribedProblem, config: &SolverConfig) -> Result<OptimizationResult> {
    problem.validate()?;
    let ws = Workspace::new(problem, config);
    let labels = residual_labels(problem);
    let m = labels.len();

    let raw0 = initial_guess(problem);
    let mut x: Vec<f64> = raw0
        .iter()
        .zip(&ws.scale)
        .map(|(v, s)| v / s)
        .collect();
    ws.project(&mut x);

    // Freeze per-constraint scales at the initial iterate so residuals of
    // very different units (m/s, rad, m) weigh comparably in the penalty.
    let eval0 = ws.evaluate(&x);
    let mut ws = ws;
    ws.residual_scale = if eval0.failure.is_none() {
        eval0
            .residuals
            .iter()
            .map(|c| c.abs().max(1.0))
            .collect()
    } else {
        vec![1.0; m]
    };

    let mut lambda = vec![0.0; m];
    let mut mu = config.penalty_initial;
    let mut total_inner = 0;
    let mut outer_done = 0;
    let mut previous_violation = f64::INFINITY;
    let mut stalled_at_cap = 0;
    let mut status = SolverStatus::MaxIterations;

    // Track the best iterate seen: feasibility first, then cost.
    let mut best_x = x.clone();
    let mut best_eval = ws.evaluate(&x);
    let better = |candidate: &DecisionEval, incumbent: &DecisionEval, eps: f64| -> bool {
        let cand_feasible = candidate.max_residual() < eps && candidate.failure.is_none();
        let inc_feasible = incumbent.max_residual() < eps && incumbent.failure.is_none();
        match (cand_feasible, inc_feasible) {
            (true, true) => candidate.cost < incumbent.cost,
            (true, false) => true,
            (false, true) => false,
            (false, false) => candidate.max_residual() < incumbent.max_residual(),
        }
    };

    for outer in 0..config.outer_max {
        outer_done = outer + 1;
        let outcome = minimize_inner(&ws, &mut x, &lambda, mu);
        total_inner += outcome.iterations;
        let violation = outcome.eval.max_residual();

        if better(&outcome.eval, &best_eval, config.eps_constraint) {
            best_eval = outcome.eval.clone();
            best_x = x.clone();
        }

        if violation < config.eps_constraint
            && outcome.pg_norm < config.eps_gradient
            && outcome.eval.failure.is_none()
        {
            status = SolverStatus::Converged;
            break;
        }

        if outcome.eval.failure.is_none() {
            let scaled = ws.scaled_residuals(&outcome.eval);
            for (l, c) in lambda.iter_mut().zip(&scaled) {
                *l = (*l + mu * c).clamp(-1e12, 1e12);
            }
        }
        if violation > 0.25 * previous_violation {
            if mu >= config.penalty_cap {
                stalled_at_cap += 1;
                if stalled_at_cap >= 3 {
                    status = SolverStatus::Infeasible;
                    break;
                }
            } else {
                mu = (mu * config.penalty_growth).min(config.penalty_cap);
            }
        } else {
            stalled_at_cap = 0;
        }
        previous_violation = violation.min(previous_violation);
        let _ = outcome.phi;
    }

    let raw_best = ws.unscale(&best_x);
    let program = problem.program_from_decision(&raw_best);
    let free_offset = problem.channels() * problem.sample_count();
    let free_scalars = problem
        .free_scalars
        .iter()
        .enumerate()
        .map(|(i, s)| (s.label.clone(), raw_best[free_offset + i]))
        .collect();
    let residuals: Vec<(String, f64)> = labels
        .into_iter()
        .zip(best_eval.residuals.iter().copied())
        .collect();

    // A best iterate that satisfies the tolerance is a converged answer even
    // if the loop ended on the iteration cap afterwards.
    if status != SolverStatus::Converged
        && best_eval.failure.is_none()
        && best_eval.max_residual() < config.eps_constraint
    {
        status = SolverStatus::Converged;
    }

    Ok(OptimizationResult {
        status,
        cost: best_eval.cost,
        program,
        free_scalars,
        residuals,
        max_residual: best_eval.max_residual(),
        iterations: total_inner,
        outer_iterations: outer_done,
        objective_evaluations: ws.evaluations.load(Ordering::Relaxed),
    })
}
