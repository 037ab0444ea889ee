//! Single-shooting evaluation of a transcribed problem: build the control
//! program from the decision vector, propagate the phase model, and measure
//! the terminal residuals. Also provides the [`Dynamics`] adapters that
//! expose the launch and boost models to the integrator and solver.

use super::{FreeScalarKind, TerminalComponent, TranscribedProblem};
use crate::environment::EnvironmentModel;
use crate::error::Result;
use crate::opt::cost::effort_cost;
use crate::phases::{boost_derivative, launch_derivative, BoostControl, LaunchControl, LongitudinalState};
use crate::sim::{propagate_terminal, Dynamics, ProgramSource};
use crate::vehicle::{AddedMassSet, CoefficientProvider, VehicleParams};
use std::sync::Arc;

/// Launch-phase dynamics (thrust-only control) for the integrator.
pub struct LaunchShooting {
    pub params: VehicleParams,
    pub added: AddedMassSet,
    pub provider: Arc<CoefficientProvider>,
    pub env: EnvironmentModel,
}

impl Dynamics for LaunchShooting {
    fn state_dim(&self) -> usize {
        LongitudinalState::DIM
    }
    fn control_dim(&self) -> usize {
        1
    }
    fn derivative(&self, _t: f64, x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
        let state = LongitudinalState::from_slice(x);
        let d = launch_derivative(
            &state,
            &LaunchControl { thrust: u[0] },
            &self.params,
            &self.added,
            &self.provider,
            &self.env,
        )?;
        out.copy_from_slice(&d);
        Ok(())
    }
}

/// Boost-phase dynamics (thrust + pitch deflection) for the integrator.
pub struct BoostShooting {
    pub params: VehicleParams,
    pub provider: Arc<CoefficientProvider>,
    pub env: EnvironmentModel,
}

impl Dynamics for BoostShooting {
    fn state_dim(&self) -> usize {
        LongitudinalState::DIM
    }
    fn control_dim(&self) -> usize {
        2
    }
    fn derivative(&self, _t: f64, x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
        let state = LongitudinalState::from_slice(x);
        let d = boost_derivative(
            &state,
            &BoostControl {
                thrust: u[0],
                pitch_deflection: u[1],
            },
            &self.params,
            &self.provider,
            &self.env,
        )?;
        out.copy_from_slice(&d);
        Ok(())
    }
}

/// Everything the solver needs from one decision-vector evaluation.
#[derive(Debug, Clone)]
pub struct DecisionEval {
    /// Effort cost of the sampled program [N^2 s].
    pub cost: f64,
    /// Propagated terminal state, when propagation succeeded.
    pub terminal_state: Option<Vec<f64>>,
    /// One entry per constrained terminal component, in component order:
    /// fixed components first semantics do not apply - order follows the
    /// state vector, with free-scalar targets contributing at their
    /// component index.
    pub residuals: Vec<f64>,
    /// Set when propagation aborted: (failing time, reason). The residuals
    /// then carry a large penalty that grows the earlier the failure.
    pub failure: Option<(f64, String)>,
}

impl DecisionEval {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Labels of the constrained terminal components, matching the residual
/// order of [`evaluate_decision`].
pub fn residual_labels(problem: &TranscribedProblem) -> Vec<String> {
    let mut labels = Vec::new();
    for (i, tag) in problem.boundary.terminal.iter().enumerate() {
        let name = problem
            .component_names
            .get(i)
            .cloned()
            .unwrap_or_else(|| format!("x{i}"));
        match tag {
            TerminalComponent::Fixed(_) => labels.push(name),
            TerminalComponent::Free => {
                if problem
                    .free_scalars
                    .iter()
                    .any(|s| s.kind == FreeScalarKind::TerminalTarget(i))
                {
                    labels.push(name);
                }
            }
        }
    }
    labels
}

const FAILURE_RESIDUAL: f64 = 1e6;

/// Evaluate cost and terminal residuals for the decision vector `z`
/// (raw units, channel-major samples followed by free scalars).
pub fn evaluate_decision(problem: &TranscribedProblem, z: &[f64]) -> DecisionEval {
    debug_assert_eq!(z.len(), problem.decision_len());
    let program = problem.program_from_decision(z);
    let cost = effort_cost(&program, &problem.effort_weights)
        .expect("validated weights and sample count");

    let free_offset = problem.channels() * problem.sample_count();
    let mut initial = problem.boundary.initial.clone();
    for (slot, scalar) in problem.free_scalars.iter().enumerate() {
        if let FreeScalarKind::InitialComponent(i) = scalar.kind {
            initial[i] = z[free_offset + slot];
        }
    }

    let t_f = problem.final_time();
    let source = ProgramSource {
        program: &program,
        hold: problem.integrator.hold,
    };
    let propagated = propagate_terminal(
        problem.model.as_ref(),
        &initial,
        &source,
        t_f,
        &problem.integrator,
    );

    match propagated {
        Ok(terminal) => {
            let mut residuals = Vec::new();
            for (i, tag) in problem.boundary.terminal.iter().enumerate() {
                match tag {
                    TerminalComponent::Fixed(target) => residuals.push(terminal[i] - target),
                    TerminalComponent::Free => {
                        if let Some(slot) = problem
                            .free_scalars
                            .iter()
                            .position(|s| s.kind == FreeScalarKind::TerminalTarget(i))
                        {
                            residuals.push(terminal[i] - z[free_offset + slot]);
                        }
                    }
                }
            }
            DecisionEval {
                cost,
                terminal_state: Some(terminal),
                residuals,
                failure: None,
            }
        }
        Err(err) => {
            let (time, reason) = match &err {
                crate::error::Error::Propagation { time, reason } => (*time, reason.clone()),
                other => (0.0, other.to_string()),
            };
            // Penalize failures so the solver retreats toward evaluable
            // iterates; earlier failures are worse.
            let penalty = FAILURE_RESIDUAL * (1.0 + (t_f - time).max(0.0));
            let count = residual_labels(problem).len();
            DecisionEval {
                cost,
                terminal_state: None,
                residuals: vec![penalty; count],
                failure: Some((time, reason)),
            }
        }
    }
}

/// The terminal residual vector alone (empty when every terminal component
/// is free and untargeted).
pub fn terminal_residuals(problem: &TranscribedProblem, z: &[f64]) -> Vec<f64> {
    evaluate_decision(problem, z).residuals
}

#[cfg(test)]
pub(crate) mod test_models {
    use super::*;

    /// Double integrator: x = [position, velocity], control = acceleration.
    pub struct DoubleIntegrator;

    impl Dynamics for DoubleIntegrator {
        fn state_dim(&self) -> usize {
            2
        }
        fn control_dim(&self) -> usize {
            1
        }
        fn derivative(&self, _t: f64, x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
            out[0] = x[1];
            out[1] = u[0];
            Ok(())
        }
    }

    /// Pure quadrature stub: xdot = u.
    pub struct Quadrature;

    impl Dynamics for Quadrature {
        fn state_dim(&self) -> usize {
            1
        }
        fn control_dim(&self) -> usize {
            1
        }
        fn derivative(&self, _t: f64, _x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
            out[0] = u[0];
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::test_models::*;
    use super::*;
    use crate::opt::BoundarySpec;
    use crate::sim::IntegratorConfig;
    use approx::assert_relative_eq;

    fn quadrature_problem() -> TranscribedProblem {
        TranscribedProblem {
            model: Box::new(Quadrature),
            boundary: BoundarySpec {
                initial: vec![0.0],
                terminal: vec![TerminalComponent::Fixed(1.0)],
            },
            dt: 0.2,
            intervals: 5,
            control_lower: vec![-10.0],
            control_upper: vec![10.0],
            control_scales: vec![1.0],
            effort_weights: vec![1.0],
            free_scalars: Vec::new(),
            integrator: IntegratorConfig::default(),
            component_names: vec!["x".into()],
        }
    }

    #[test]
    fn constant_control_quadrature_hits_its_target_exactly() {
        let problem = quadrature_problem();
        problem.validate().unwrap();
        let z = vec![1.0; 6];
        let eval = evaluate_decision(&problem, &z);
        assert!(eval.failure.is_none());
        assert_relative_eq!(eval.residuals[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(eval.cost, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn all_free_terminal_gives_empty_residuals() {
        let mut problem = quadrature_problem();
        problem.boundary.terminal = vec![TerminalComponent::Free];
        // validate() rejects this (no fixed component), but the evaluation
        // contract still applies for residual extraction.
        let eval = evaluate_decision(&problem, &vec![1.0; 6]);
        assert!(eval.residuals.is_empty());
        assert!(residual_labels(&problem).is_empty());
    }

    #[test]
    fn free_initial_component_shifts_the_start() {
        let mut problem = quadrature_problem();
        problem.free_scalars.push(crate::opt::FreeScalarSpec {
            label: "x0".into(),
            kind: FreeScalarKind::InitialComponent(0),
            lower: -5.0,
            upper: 5.0,
            scale: 1.0,
            guess: 0.0,
        });
        let mut z = vec![0.0; 7];
        z[6] = 1.0; // start exactly at the target with zero control
        let eval = evaluate_decision(&problem, &z);
        assert_relative_eq!(eval.residuals[0], 0.0, epsilon = 1e-12);
        assert_eq!(eval.cost, 0.0);
    }

    #[test]
    fn free_terminal_target_residual_tracks_the_scalar() {
        let mut problem = quadrature_problem();
        problem.boundary.terminal = vec![TerminalComponent::Free];
        problem.free_scalars.push(crate::opt::FreeScalarSpec {
            label: "xf".into(),
            kind: FreeScalarKind::TerminalTarget(0),
            lower: 0.0,
            upper: 2.0,
            scale: 1.0,
            guess: 1.0,
        });
        let mut z = vec![1.0; 7];
        z[6] = 0.25;
        let eval = evaluate_decision(&problem, &z);
        // Propagated terminal is 1.0; the decision target is 0.25.
        assert_relative_eq!(eval.residuals[0], 0.75, epsilon = 1e-12);
        assert_eq!(residual_labels(&problem), vec!["x".to_string()]);
    }

    #[test]
    fn double_integrator_linear_control_is_integrated_exactly() {
        // RK4 integrates the cubic response to a piecewise-linear control
        // exactly; a(t) = 6 - 12t gives x(1) = 1, v(1) = 0.
        let problem = TranscribedProblem {
            model: Box::new(DoubleIntegrator),
            boundary: BoundarySpec {
                initial: vec![0.0, 0.0],
                terminal: vec![
                    TerminalComponent::Fixed(1.0),
                    TerminalComponent::Fixed(0.0),
                ],
            },
            dt: 0.05,
            intervals: 20,
            control_lower: vec![-100.0],
            control_upper: vec![100.0],
            control_scales: vec![10.0],
            effort_weights: vec![1.0],
            free_scalars: Vec::new(),
            integrator: IntegratorConfig {
                step: 0.0125,
                ..Default::default()
            },
            component_names: vec!["x".into(), "v".into()],
        };
        let z: Vec<f64> = (0..=20).map(|k| 6.0 - 12.0 * (k as f64 * 0.05)).collect();
        let eval = evaluate_decision(&problem, &z);
        assert!(eval.max_residual() < 1e-12, "{:?}", eval.residuals);
    }

    #[test]
    fn propagation_failure_is_penalized() {
        struct FailsAt {
            t_fail: f64,
        }
        impl Dynamics for FailsAt {
            fn state_dim(&self) -> usize {
                1
            }
            fn control_dim(&self) -> usize {
                1
            }
            fn derivative(&self, t: f64, _x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
                if t >= self.t_fail {
                    return Err(crate::error::Error::singularity("blew up"));
                }
                out[0] = u[0];
                Ok(())
            }
        }
        let make = |t_fail: f64| TranscribedProblem {
            model: Box::new(FailsAt { t_fail }),
            boundary: BoundarySpec {
                initial: vec![0.0],
                terminal: vec![TerminalComponent::Fixed(1.0)],
            },
            dt: 0.2,
            intervals: 5,
            control_lower: vec![-10.0],
            control_upper: vec![10.0],
            control_scales: vec![1.0],
            effort_weights: vec![1.0],
            free_scalars: Vec::new(),
            integrator: IntegratorConfig::default(),
            component_names: vec!["x".into()],
        };
        let early = evaluate_decision(&make(0.1), &vec![1.0; 6]);
        let late = evaluate_decision(&make(0.9), &vec![1.0; 6]);
        assert!(early.failure.is_some() && late.failure.is_some());
        assert!(
            early.residuals[0] > late.residuals[0],
            "earlier failures must be penalized harder"
        );
    }
}
