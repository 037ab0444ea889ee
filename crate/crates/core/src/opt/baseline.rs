//! Constant-thrust baseline: bisect a constant first-channel control so the
//! propagated trajectory meets one selected terminal component. Used to
//! initialize the solver and, when the constant program happens to satisfy
//! every terminal constraint, as an optimality oracle the optimized cost
//! must not exceed.

use super::shooting::evaluate_decision;
use super::{TerminalComponent, TranscribedProblem};
use crate::error::{Error, Result};
use crate::opt::cost::effort_cost;

/// Thrust bisection tolerance [N].
const THRUST_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct BaselineResult {
    /// Constant first-channel value that meets the matched component.
    pub thrust: f64,
    /// Effort cost of the constant program.
    pub cost: f64,
    /// Full residual vector of the constant program.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Whether the constant program satisfies every terminal constraint
    /// within the tolerance it was given.
    pub feasible: bool,
}

/// Decision vector for a constant first channel, other channels zero
/// (clamped), free scalars at their guesses.
fn constant_decision(problem: &TranscribedProblem, value: f64) -> Vec<f64> {
    let n = problem.sample_count();
    let mut z = Vec::with_capacity(problem.decision_len());
    for c in 0..problem.channels() {
        let v = if c == 0 {
            value.clamp(problem.control_lower[0], problem.control_upper[0])
        } else {
            0.0f64.clamp(problem.control_lower[c], problem.control_upper[c])
        };
        z.extend(std::iter::repeat(v).take(n));
    }
    for s in &problem.free_scalars {
        z.push(s.guess.clamp(s.lower, s.upper));
    }
    z
}

/// Bisect the constant first-channel control until the propagated terminal
/// component `match_component` meets its fixed target.
///
/// `feasibility_eps` is only used to judge full-constraint feasibility of
/// the result; pass the solver's constraint tolerance (or infinity to skip
/// the judgment).
pub fn constant_thrust_baseline(
    problem: &TranscribedProblem,
    match_component: usize,
    feasibility_eps: f64,
) -> Result<BaselineResult> {
    let TerminalComponent::Fixed(_) = problem
        .boundary
        .terminal
        .get(match_component)
        .copied()
        .ok_or_else(|| Error::parameter("match component out of range"))?
    else {
        return Err(Error::parameter(format!(
            "terminal component {match_component} is free; nothing to match"
        )));
    };

    // Map residual index: residuals appear in component order over the
    // constrained components.
    let residual_index = problem
        .boundary
        .terminal
        .iter()
        .take(match_component)
        .filter(|t| matches!(t, TerminalComponent::Fixed(_)))
        .count();

    let miss = |value: f64| -> Option<(f64, Vec<f64>, f64)> {
        let z = constant_decision(problem, value);
        let eval = evaluate_decision(problem, &z);
        if eval.failure.is_some() {
            return None;
        }
        let cost = effort_cost(
            &problem.program_from_decision(&z),
            &problem.effort_weights,
        )
        .expect("validated program");
        Some((eval.residuals[residual_index], eval.residuals, cost))
    };

    // Bracket the sign change, walking the ends inward past any region
    // where the propagation itself fails (e.g. thrust too low to keep the
    // forward speed positive).
    let (mut lo, mut hi) = (problem.control_lower[0], problem.control_upper[0]);
    let mut f_lo = miss(lo);
    let mut f_hi = miss(hi);
    const SCAN: usize = 32;
    let span = hi - lo;
    for k in 1..=SCAN {
        if f_lo.is_some() {
            break;
        }
        lo = problem.control_lower[0] + span * k as f64 / SCAN as f64;
        f_lo = miss(lo);
    }
    for k in 1..=SCAN {
        if f_hi.is_some() {
            break;
        }
        hi = problem.control_upper[0] - span * k as f64 / SCAN as f64;
        f_hi = miss(hi);
    }
    let (Some(lo_eval), Some(hi_eval)) = (f_lo, f_hi) else {
        return Err(Error::domain(
            "constant-thrust baseline: propagation fails across the whole thrust range",
        ));
    };
    if lo >= hi || lo_eval.0 * hi_eval.0 > 0.0 {
        return Err(Error::domain(format!(
            "constant-thrust baseline infeasible: terminal miss has no sign change \
             over [{lo}, {hi}] N ({} vs {})",
            lo_eval.0, hi_eval.0
        )));
    }

    let (mut lo_miss, mut best) = (lo_eval.0, hi_eval);
    let mut best_thrust = hi;
    while hi - lo > THRUST_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        match miss(mid) {
            Some(result) => {
                let mid_miss = result.0;
                best_thrust = mid;
                best = result;
                if lo_miss * mid_miss <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    lo_miss = mid_miss;
                }
            }
            None => {
                // Failure inside the bracket: retreat toward the feasible
                // high end, which propagated successfully.
                lo = mid;
            }
        }
    }

    let (_, residuals, cost) = best;
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(BaselineResult {
        thrust: best_thrust,
        cost,
        residuals,
        max_residual,
        feasible: max_residual < feasibility_eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::shooting::test_models::Quadrature;
    use crate::opt::{BoundarySpec, TerminalComponent};
    use crate::sim::IntegratorConfig;
    use approx::assert_relative_eq;

    fn quadrature_problem(target: f64) -> TranscribedProblem {
        TranscribedProblem {
            model: Box::new(Quadrature),
            boundary: BoundarySpec {
                initial: vec![0.0],
                terminal: vec![TerminalComponent::Fixed(target)],
            },
            dt: 0.2,
            intervals: 5,
            control_lower: vec![0.0],
            control_upper: vec![10.0],
            control_scales: vec![1.0],
            effort_weights: vec![1.0],
            free_scalars: Vec::new(),
            integrator: IntegratorConfig::default(),
            component_names: vec!["x".into()],
        }
    }

    #[test]
    fn bisection_matches_the_analytic_constant() {
        // xdot = u, x(1) = 3 under constant u needs u = 3; the effort is
        // exactly u^2 * t_f.
        let problem = quadrature_problem(3.0);
        let b = constant_thrust_baseline(&problem, 0, 1e-2).unwrap();
        assert!((b.thrust - 3.0).abs() < 1e-3, "thrust {}", b.thrust);
        assert_relative_eq!(b.cost, 9.0, epsilon = 1e-2);
        assert!(b.feasible);
    }

    #[test]
    fn no_sign_change_is_reported_infeasible() {
        // Target unreachable with u in [0, 10] over 1 s.
        let problem = quadrature_problem(50.0);
        let err = constant_thrust_baseline(&problem, 0, 1e-2).unwrap_err();
        assert!(err.to_string().contains("no sign change"), "{err}");
    }

    #[test]
    fn free_component_cannot_be_matched() {
        let mut problem = quadrature_problem(1.0);
        problem.boundary.terminal = vec![TerminalComponent::Free];
        assert!(constant_thrust_baseline(&problem, 0, 1e-2).is_err());
    }
}
