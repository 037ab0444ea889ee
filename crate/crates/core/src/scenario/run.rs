//! Scenario orchestration shared by the CLI and the test suites: optimize a
//! scenario, propagate the resulting program through the simplified model,
//! and verify it on the full 6-DOF model (open loop for launch, closed loop
//! with the pitch autopilot for boost).

use super::{PhaseKind, ScenarioSpec};
use crate::error::{Error, Result};
use crate::opt::{solve, OptimizationResult};
use crate::sim::{
    closed_loop_boost, integrate, simulate_to_surface, synthesize_pitch_autopilot, BoostTrim,
    ControlProgram, IntegratorConfig, LqWeights, ProgramSource, Trajectory,
};
use crate::vehicle::{derive_added_mass, BodyState6Dof, SixDofDynamics, SixDofOptions};
use std::sync::Arc;

/// Everything a `simulate` run produces.
pub struct SimulationArtifacts {
    /// Simplified-model trajectory (launch runs stop at the surface).
    pub simplified: Trajectory,
    /// Full-model verification trajectory, when requested.
    pub six_dof: Option<Trajectory>,
    /// The optimization behind the applied program (absent for constant
    ///-control simulations).
    pub result: Option<OptimizationResult>,
    /// The program that was applied.
    pub program: ControlProgram,
}

/// Solve the scenario's minimum-effort problem.
pub fn optimize_scenario(spec: &ScenarioSpec) -> Result<OptimizationResult> {
    if spec.phase == PhaseKind::Combined {
        return Err(Error::parameter(
            "optimize applies to single-phase scenarios; run a combined sweep instead",
        ));
    }
    let problem = spec.build_problem()?;
    solve(&problem, &spec.solver)
}

fn constant_program(spec: &ScenarioSpec, thrust: f64, deflection: f64) -> Result<ControlProgram> {
    let samples = spec.intervals() + 1;
    match spec.phase {
        PhaseKind::Launch => ControlProgram::constant(spec.dt, &[thrust], samples),
        PhaseKind::Boost => ControlProgram::constant(spec.dt, &[thrust, deflection], samples),
        PhaseKind::Combined => Err(Error::parameter("combined scenarios cannot be simulated")),
    }
}

/// Pad a 1-2 channel program to the 3 control channels of the 6-DOF model
/// (thrust, pitch deflection, yaw deflection).
fn pad_to_six_dof(program: &ControlProgram) -> ControlProgram {
    let n = program.sample_count();
    let mut samples = Vec::with_capacity(3 * n);
    for k in 0..n {
        let s = program.sample(k);
        samples.push(s[0]);
        samples.push(s.get(1).copied().unwrap_or(0.0));
        samples.push(0.0);
    }
    ControlProgram::new(program.dt, 3, samples).expect("padded program")
}

/// Sample the pitch-angle history of a trajectory onto the control grid,
/// for use as the autopilot reference.
fn pitch_reference(trajectory: &Trajectory, dt: f64, t_f: f64, theta_index: usize) -> ControlProgram {
    let n = (t_f / dt).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 * dt;
        // Trajectories are on a uniform finer grid; pick the nearest record.
        let row = trajectory
            .times
            .iter()
            .position(|time| (time - t).abs() < 1e-9)
            .unwrap_or_else(|| {
                trajectory
                    .times
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| {
                        (*a - t).abs().total_cmp(&(*b - t).abs())
                    })
                    .map(|(i, _)| i)
                    .unwrap_or(trajectory.times.len() - 1)
            });
        samples.push(trajectory.states[row][theta_index]);
    }
    ControlProgram::new(dt, 1, samples).expect("pitch reference")
}

/// Propagate a scenario: optimize (unless a constant program is configured),
/// run the simplified model, and optionally verify on the 6-DOF model.
pub fn simulate_scenario(spec: &ScenarioSpec, six_dof: bool) -> Result<SimulationArtifacts> {
    if spec.phase == PhaseKind::Combined {
        return Err(Error::parameter(
            "simulate applies to single-phase scenarios",
        ));
    }
    let problem = spec.build_problem()?;
    let (program, result) = match spec.constant_control {
        Some((thrust, deflection)) => (constant_program(spec, thrust, deflection)?, None),
        None => {
            let result = solve(&problem, &spec.solver)?;
            (result.program.clone(), Some(result))
        }
    };

    // Trajectory export runs at the simulation default step for event
    // resolution, independent of the solver's internal shooting step.
    let config = IntegratorConfig::default();
    let source = ProgramSource {
        program: &program,
        hold: config.hold,
    };
    let simplified = match spec.phase {
        PhaseKind::Launch => simulate_to_surface(
            problem.model.as_ref(),
            &spec.initial,
            &source,
            spec.t_f,
            &config,
            4,
        )?,
        PhaseKind::Boost => integrate(
            problem.model.as_ref(),
            &spec.initial,
            &source,
            spec.t_f,
            &config,
        )?,
        PhaseKind::Combined => unreachable!(),
    };

    let six_dof_traj = if six_dof {
        Some(verify_six_dof(spec, &program, &simplified, &config)?)
    } else {
        None
    };

    Ok(SimulationArtifacts {
        simplified,
        six_dof: six_dof_traj,
        result,
        program,
    })
}

fn verify_six_dof(
    spec: &ScenarioSpec,
    program: &ControlProgram,
    simplified: &Trajectory,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let provider = Arc::new(spec.build_provider()?);
    let added = derive_added_mass(&spec.vehicle, spec.environment.water_density)?;
    let [u, w, q, theta, z] = spec.initial;
    let x0 = BodyState6Dof::longitudinal(u, w, q, theta, z);

    match spec.phase {
        PhaseKind::Launch => {
            // Open-loop thrust through the full model, stopped at the
            // surface. Vertical launches exercise the planar kinematics.
            let dynamics = SixDofDynamics {
                params: spec.vehicle.clone(),
                added,
                provider,
                env: spec.environment.clone(),
                options: SixDofOptions::default(),
            };
            let padded = pad_to_six_dof(program);
            let source = ProgramSource {
                program: &padded,
                hold: config.hold,
            };
            simulate_to_surface(&dynamics, &x0.to_array(), &source, spec.t_f, config, 11)
        }
        PhaseKind::Boost => {
            // Closed loop: thrust open loop, deflection from the pitch
            // autopilot tracking the simplified-model pitch history.
            let trim = BoostTrim::for_scenario(theta, &spec.vehicle, &provider, &spec.environment)?;
            let autopilot = synthesize_pitch_autopilot(
                &spec.vehicle,
                &provider,
                &spec.environment,
                &trim,
                &LqWeights::default(),
                spec.bounds.deflection,
            )?;
            let theta_ref = pitch_reference(simplified, spec.dt, spec.t_f, 3);
            let thrust_program =
                ControlProgram::new(program.dt, 1, program.channel(0))?;
            closed_loop_boost(
                &x0,
                &thrust_program,
                &theta_ref,
                &autopilot,
                &spec.vehicle,
                &added,
                &provider,
                &spec.environment,
                spec.t_f,
                config,
            )
        }
        PhaseKind::Combined => unreachable!(),
    }
}
