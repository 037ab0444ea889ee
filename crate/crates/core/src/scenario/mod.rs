//! Scenario and sweep file ingestion, problem construction, sweep
//! execution, combined launch+boost cost reports, and CSV/JSON export.
//!
//! Files are line oriented `key = value` with `[section]` headers and `#`
//! comments. Unknown keys are rejected with the offending line so typos
//! cannot silently change a study.

pub mod export;
pub mod parse;
pub mod run;
pub mod sweep;

pub use parse::{parse_scenario, parse_sweep};
pub use run::{optimize_scenario, simulate_scenario, SimulationArtifacts};
pub use sweep::{
    combined_cost, run_combined_sweep, run_sweep, CombinedCostReport, CombinedRow, SweepRow,
    SweepTable,
};

use crate::environment::EnvironmentModel;
use crate::error::{Error, Result};
use crate::opt::{
    BoundarySpec, ControlBounds, FreeScalarKind, FreeScalarSpec, SolverConfig, TerminalComponent,
    TranscribedProblem,
};
use crate::opt::{BoostShooting, LaunchShooting};
use crate::sim::{ControlHold, IntegratorConfig};
use crate::vehicle::coefficients::FallbackCoefficients;
use crate::vehicle::{derive_added_mass, CoefficientProvider, VehicleParams};
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    Launch,
    Boost,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaunchMode {
    Horizontal,
    Vertical,
}

/// Free boundary parameters a scenario may hand to the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParamDecl {
    pub name: FreeParamName,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeParamName {
    /// Launch depth z0 [m].
    InitialDepth,
    /// Terminal forward velocity [m/s].
    TerminalForwardVelocity,
    /// Boost terminal altitude [m].
    TerminalAltitude,
}

impl FreeParamName {
    pub fn as_str(&self) -> &'static str {
        match self {
            FreeParamName::InitialDepth => "z0",
            FreeParamName::TerminalForwardVelocity => "uf",
            FreeParamName::TerminalAltitude => "altitude_f",
        }
    }
}

#[derive(Debug, Clone)]
pub enum CoefficientSource {
    Fallback(FallbackCoefficients),
    Table(PathBuf),
}

/// Extra fields of a combined (launch + boost) mission scenario.
#[derive(Debug, Clone)]
pub struct CombinedSpec {
    /// Water-exit forward velocity shared by both legs [m/s].
    pub exit_velocity: f64,
    /// Water-exit pitch angle [deg] used when the scenario runs standalone;
    /// sweeps override it per row.
    pub theta_exit_deg: f64,
    pub launch_t_f: f64,
    pub boost_t_f: f64,
    /// Boost-leg terminal specification.
    pub boost_terminal: [TerminalComponent; 5],
    /// Append a vertical-launch comparison row (vertical leg + 90 deg boost).
    pub vertical_comparison: bool,
    pub vertical_t_f: f64,
    pub vertical_z0: f64,
}

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub name: String,
    pub phase: PhaseKind,
    pub launch_mode: LaunchMode,
    /// Initial state [u, w, q, theta, z].
    pub initial: [f64; 5],
    /// Terminal tags per state component.
    pub terminal: [TerminalComponent; 5],
    pub t_f: f64,
    pub dt: f64,
    pub bounds: ControlBounds,
    pub free_params: Vec<FreeParamDecl>,
    pub vehicle: VehicleParams,
    pub environment: EnvironmentModel,
    pub coefficients: CoefficientSource,
    pub solver: SolverConfig,
    pub integrator_step: f64,
    /// Constant program for `simulate` runs without optimization:
    /// (thrust [N], deflection [rad]).
    pub constant_control: Option<(f64, f64)>,
    pub combined: Option<CombinedSpec>,
}

impl ScenarioSpec {
    pub fn intervals(&self) -> usize {
        (self.t_f / self.dt).round() as usize
    }

    pub fn build_provider(&self) -> Result<CoefficientProvider> {
        match &self.coefficients {
            CoefficientSource::Fallback(fb) => Ok(CoefficientProvider::Fallback(*fb)),
            CoefficientSource::Table(path) => CoefficientProvider::from_table_file(path),
        }
    }

    fn free_scalar_specs(&self) -> Vec<FreeScalarSpec> {
        self.free_params
            .iter()
            .map(|decl| match decl.name {
                FreeParamName::InitialDepth => FreeScalarSpec {
                    label: "z0".into(),
                    kind: FreeScalarKind::InitialComponent(4),
                    lower: decl.lower,
                    upper: decl.upper,
                    scale: 100.0,
                    guess: 0.5 * (decl.lower + decl.upper),
                },
                FreeParamName::TerminalForwardVelocity => FreeScalarSpec {
                    label: "uf".into(),
                    kind: FreeScalarKind::TerminalTarget(0),
                    lower: decl.lower,
                    upper: decl.upper,
                    scale: 100.0,
                    guess: 0.5 * (decl.lower + decl.upper),
                },
                // Altitude boxes map onto down-positive z: [lo_alt, hi_alt]
                // becomes [-hi_alt, -lo_alt].
                FreeParamName::TerminalAltitude => FreeScalarSpec {
                    label: "altitude_f".into(),
                    kind: FreeScalarKind::TerminalTarget(4),
                    lower: -decl.upper,
                    upper: -decl.lower,
                    scale: 100.0,
                    guess: -0.5 * (decl.lower + decl.upper),
                },
            })
            .collect()
    }

    /// Terminal tags with free-parameter targets forced to `Free` (their
    /// constraint rides on the free scalar instead).
    fn effective_terminal(&self) -> Vec<TerminalComponent> {
        let mut terminal = self.terminal.to_vec();
        for decl in &self.free_params {
            match decl.name {
                FreeParamName::TerminalForwardVelocity => terminal[0] = TerminalComponent::Free,
                FreeParamName::TerminalAltitude => terminal[4] = TerminalComponent::Free,
                FreeParamName::InitialDepth => {}
            }
        }
        terminal
    }

    /// Transcribe this (single-phase) scenario into a solver problem.
    pub fn build_problem(&self) -> Result<TranscribedProblem> {
        let provider = Arc::new(self.build_provider()?);
        self.build_problem_with(provider)
    }

    pub fn build_problem_with(
        &self,
        provider: Arc<CoefficientProvider>,
    ) -> Result<TranscribedProblem> {
        self.vehicle.validate()?;
        self.bounds.validate()?;
        let names = vec![
            "u".to_string(),
            "w".to_string(),
            "q".to_string(),
            "theta".to_string(),
            "z".to_string(),
        ];
        let boundary = BoundarySpec {
            initial: self.initial.to_vec(),
            terminal: self.effective_terminal(),
        };
        let integrator = IntegratorConfig {
            step: self.integrator_step,
            hold: ControlHold::PiecewiseLinear,
        };
        let (model, lower, upper, scales, weights): (
            Box<dyn crate::sim::Dynamics + Send + Sync>,
            Vec<f64>,
            Vec<f64>,
            Vec<f64>,
            Vec<f64>,
        ) = match self.phase {
            PhaseKind::Launch => {
                let added = derive_added_mass(&self.vehicle, self.environment.water_density)?;
                (
                    Box::new(LaunchShooting {
                        params: self.vehicle.clone(),
                        added,
                        provider,
                        env: self.environment.clone(),
                    }),
                    vec![self.bounds.thrust.0],
                    vec![self.bounds.thrust.1],
                    vec![self.bounds.thrust.1],
                    vec![1.0],
                )
            }
            PhaseKind::Boost => (
                Box::new(BoostShooting {
                    params: self.vehicle.clone(),
                    provider,
                    env: self.environment.clone(),
                }),
                vec![self.bounds.thrust.0, -self.bounds.deflection],
                vec![self.bounds.thrust.1, self.bounds.deflection],
                vec![self.bounds.thrust.1, self.bounds.deflection],
                vec![1.0, 0.0],
            ),
            PhaseKind::Combined => {
                return Err(Error::parameter(
                    "combined scenarios are built per leg; use launch_leg/boost_leg",
                ))
            }
        };
        let problem = TranscribedProblem {
            model,
            boundary,
            dt: self.dt,
            intervals: self.intervals(),
            control_lower: lower,
            control_upper: upper,
            control_scales: scales,
            effort_weights: weights,
            free_scalars: self.free_scalar_specs(),
            integrator,
            component_names: names,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// The launch leg of a combined scenario at water-exit angle
    /// `theta_exit_deg`.
    pub fn launch_leg(&self, theta_exit_deg: f64) -> Result<ScenarioSpec> {
        let combined = self.combined_fields()?;
        let mut leg = self.clone();
        leg.name = format!("{}_launch_{}deg", self.name, theta_exit_deg);
        leg.phase = PhaseKind::Launch;
        leg.t_f = combined.launch_t_f;
        leg.terminal = [
            TerminalComponent::Fixed(combined.exit_velocity),
            TerminalComponent::Free,
            TerminalComponent::Free,
            TerminalComponent::Fixed(theta_exit_deg.to_radians()),
            TerminalComponent::Fixed(0.0),
        ];
        leg.free_params.clear();
        leg.constant_control = None;
        leg.combined = None;
        Ok(leg)
    }

    /// The vertical-launch comparison leg of a combined scenario.
    pub fn vertical_leg(&self) -> Result<ScenarioSpec> {
        let combined = self.combined_fields()?;
        let mut leg = self.launch_leg(90.0)?;
        leg.name = format!("{}_vertical_launch", self.name);
        leg.launch_mode = LaunchMode::Vertical;
        leg.t_f = combined.vertical_t_f;
        leg.initial = [
            self.initial[0],
            0.0,
            0.0,
            std::f64::consts::FRAC_PI_2,
            combined.vertical_z0,
        ];
        Ok(leg)
    }

    /// The boost leg of a combined scenario at water-exit angle
    /// `theta_exit_deg`.
    pub fn boost_leg(&self, theta_exit_deg: f64) -> Result<ScenarioSpec> {
        let combined = self.combined_fields()?;
        let mut leg = self.clone();
        leg.name = format!("{}_boost_{}deg", self.name, theta_exit_deg);
        leg.phase = PhaseKind::Boost;
        leg.launch_mode = LaunchMode::Horizontal;
        leg.t_f = combined.boost_t_f;
        leg.initial = [
            combined.exit_velocity,
            0.0,
            0.0,
            theta_exit_deg.to_radians(),
            0.0,
        ];
        leg.terminal = combined.boost_terminal;
        leg.free_params.clear();
        leg.constant_control = None;
        leg.combined = None;
        Ok(leg)
    }

    fn combined_fields(&self) -> Result<&CombinedSpec> {
        self.combined.as_ref().ok_or_else(|| {
            Error::parameter("scenario has no combined-mission fields (phase != combined)")
        })
    }

    /// Display form of an optimized free scalar: terminal-altitude targets
    /// are stored as down-positive z and shown as altitude.
    pub fn display_free_scalar(&self, label: &str, value: f64) -> f64 {
        if label == "altitude_f" {
            -value
        } else {
            value
        }
    }
}
