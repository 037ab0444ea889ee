//! Minimum-effort optimal control: single-shooting transcription of the
//! phase models onto a sampled control grid, an augmented-Lagrangian
//! box-constrained solver over the resulting decision vector, and a
//! constant-control baseline used both for initialization and as an
//! optimality oracle.

pub mod baseline;
pub mod cost;
pub mod shooting;
pub mod solver;

pub use baseline::{constant_thrust_baseline, BaselineResult};
pub use cost::effort_cost;
pub use shooting::{
    evaluate_decision, terminal_residuals, BoostShooting, DecisionEval, LaunchShooting,
};
pub use solver::solve;

use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::sim::{ControlProgram, Dynamics, IntegratorConfig};
use serde::{Deserialize, Serialize};

/// Terminal boundary tag for one state component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TerminalComponent {
    Fixed(f64),
    Free,
}

/// Fixed initial state plus per-component terminal tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub initial: Vec<f64>,
    pub terminal: Vec<TerminalComponent>,
}

impl BoundarySpec {
    pub fn fixed_count(&self) -> usize {
        self.terminal
            .iter()
            .filter(|t| matches!(t, TerminalComponent::Fixed(_)))
            .count()
    }
}

/// Box bounds on the control channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlBounds {
    /// Thrust range [N].
    pub thrust: (f64, f64),
    /// Symmetric deflection limit [rad] (boost only).
    pub deflection: f64,
}

impl Default for ControlBounds {
    fn default() -> Self {
        ControlBounds {
            thrust: (0.0, 30_000.0),
            deflection: 12.0f64.to_radians(),
        }
    }
}

impl ControlBounds {
    pub fn validate(&self) -> Result<()> {
        if self.thrust.0 < 0.0 || self.thrust.1 <= self.thrust.0 {
            return Err(Error::parameter(format!(
                "thrust bounds [{}, {}] must be ordered with a nonnegative minimum",
                self.thrust.0, self.thrust.1
            )));
        }
        if self.deflection <= 0.0 {
            return Err(Error::parameter("deflection bound must be positive"));
        }
        Ok(())
    }
}

/// What a free boundary scalar modifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeScalarKind {
    /// Replaces one component of the initial state (e.g. launch depth).
    InitialComponent(usize),
    /// Becomes the target of one terminal component (e.g. final forward
    /// velocity); the component itself must be tagged `Free`.
    TerminalTarget(usize),
}

/// A boundary scalar handed to the optimizer as an extra decision variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeScalarSpec {
    pub label: String,
    pub kind: FreeScalarKind,
    pub lower: f64,
    pub upper: f64,
    /// Normalization used by the solver (lengths ~100 m, speeds ~100 m/s).
    pub scale: f64,
    pub guess: f64,
}

/// A minimum-effort problem transcribed onto a sampled control grid.
///
/// The decision vector is channel-major: all samples of channel 0, then
/// channel 1, ..., followed by the free scalars, for a total of
/// channels x (N+1) + free entries.
pub struct TranscribedProblem {
    pub model: Box<dyn Dynamics + Send + Sync>,
    pub boundary: BoundarySpec,
    /// Control grid spacing [s].
    pub dt: f64,
    /// Interval count N; the final time is N dt.
    pub intervals: usize,
    /// Per-channel box bounds.
    pub control_lower: Vec<f64>,
    pub control_upper: Vec<f64>,
    /// Per-channel normalization for the solver.
    pub control_scales: Vec<f64>,
    /// Per-channel effort weights (thrust 1, deflection 0 by default).
    pub effort_weights: Vec<f64>,
    pub free_scalars: Vec<FreeScalarSpec>,
    pub integrator: IntegratorConfig,
    /// State-component names used in residual reports.
    pub component_names: Vec<String>,
}

impl TranscribedProblem {
    pub fn final_time(&self) -> f64 {
        self.intervals as f64 * self.dt
    }

    pub fn sample_count(&self) -> usize {
        self.intervals + 1
    }

    pub fn channels(&self) -> usize {
        self.control_scales.len()
    }

    pub fn decision_len(&self) -> usize {
        self.channels() * self.sample_count() + self.free_scalars.len()
    }

    pub fn validate(&self) -> Result<()> {
        let state_dim = self.model.state_dim();
        let channels = self.model.control_dim();
        if self.boundary.initial.len() != state_dim
            || self.boundary.terminal.len() != state_dim
        {
            return Err(Error::parameter(
                "boundary specification does not match the model state dimension",
            ));
        }
        if self.boundary.fixed_count() == 0 {
            return Err(Error::parameter(
                "at least one terminal component must be fixed",
            ));
        }
        if self.intervals < 2 {
            return Err(Error::parameter("need at least two control intervals"));
        }
        if self.dt <= 0.0 {
            return Err(Error::parameter("control grid spacing must be positive"));
        }
        let per_channel = [
            self.control_lower.len(),
            self.control_upper.len(),
            self.control_scales.len(),
            self.effort_weights.len(),
        ];
        if per_channel.iter().any(|&l| l != channels) {
            return Err(Error::parameter(
                "per-channel bound/scale/weight lengths must match the model control dimension",
            ));
        }
        for c in 0..channels {
            if self.control_lower[c] > self.control_upper[c] {
                return Err(Error::parameter(format!(
                    "control channel {c} bounds are not ordered"
                )));
            }
            if self.control_scales[c] <= 0.0 {
                return Err(Error::parameter("control scales must be positive"));
            }
        }
        let ratio = self.dt / self.integrator.step;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::parameter(format!(
                "integrator step {} must divide the control spacing {}",
                self.integrator.step, self.dt
            )));
        }
        for scalar in &self.free_scalars {
            if !(scalar.lower <= scalar.upper) || scalar.scale <= 0.0 {
                return Err(Error::parameter(format!(
                    "free scalar '{}' has an invalid box or scale",
                    scalar.label
                )));
            }
            match scalar.kind {
                FreeScalarKind::InitialComponent(i) => {
                    if i >= state_dim {
                        return Err(Error::parameter(format!(
                            "free scalar '{}' indexes state component {i} out of range",
                            scalar.label
                        )));
                    }
                }
                FreeScalarKind::TerminalTarget(i) => {
                    if i >= state_dim {
                        return Err(Error::parameter(format!(
                            "free scalar '{}' indexes state component {i} out of range",
                            scalar.label
                        )));
                    }
                    if !matches!(self.boundary.terminal[i], TerminalComponent::Free) {
                        return Err(Error::parameter(format!(
                            "free scalar '{}' targets component {i} which is already fixed",
                            scalar.label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Extract the sampled control program from a decision vector.
    pub fn program_from_decision(&self, z: &[f64]) -> ControlProgram {
        let channels = self.channels();
        let n = self.sample_count();
        let mut samples = vec![0.0; channels * n];
        for c in 0..channels {
            for k in 0..n {
                samples[k * channels + c] = z[c * n + k];
            }
        }
        ControlProgram::new(self.dt, channels, samples).expect("validated dimensions")
    }
}

/// Solver exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    Infeasible,
    MaxIterations,
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverStatus::Converged => "converged",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::MaxIterations => "max_iterations",
        };
        f.write_str(s)
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub status: SolverStatus,
    /// Effort cost J [N^2 s].
    pub cost: f64,
    pub program: ControlProgram,
    /// Optimized free boundary scalars, in declaration order.
    pub free_scalars: Vec<(String, f64)>,
    /// Terminal residual per constrained component.
    pub residuals: Vec<(String, f64)>,
    pub max_residual: f64,
    /// Total inner (projected-gradient) iterations.
    pub iterations: usize,
    pub outer_iterations: usize,
    pub objective_evaluations: usize,
}

/// Execution knobs shared by one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Convergence threshold on each raw residual, in its natural unit.
    pub eps_constraint: f64,
    /// Convergence threshold on the scaled projected-gradient norm.
    pub eps_gradient: f64,
    pub penalty_initial: f64,
    pub penalty_growth: f64,
    pub penalty_cap: f64,
    pub outer_max: usize,
    pub inner_max: usize,
    /// Relative forward-difference step in scaled variables.
    pub fd_step: f64,
    #[serde(skip)]
    pub parallelism: Parallelism,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps_constraint: 1e-2,
            eps_gradient: 1e-3,
            penalty_initial: 10.0,
            penalty_growth: 10.0,
            penalty_cap: 1e10,
            outer_max: 30,
            inner_max: 500,
            fd_step: 1e-6,
            parallelism: Parallelism::default(),
        }
    }
}
