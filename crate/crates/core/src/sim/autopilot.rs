//! Pitch-tracking autopilot for the boost phase.
//!
//! The boost verification runs the full 6-DOF model closed loop: thrust is
//! applied open loop while the pitch-plane thrust deflection is commanded by
//! state feedback on pitch rate and pitch angle plus an integral of the
//! pitch error. Gains come from an LQ design on the pitch channel
//! linearized about a mid-boost trim point and are recomputed per scenario.

use super::{
    integrate, ControlHold, ControlProgram, ControlSource, Dynamics, IntegratorConfig, Trajectory,
};
use crate::environment::{dynamic_pressure, EnvironmentModel, SOUND_SPEED_AIR};
use crate::error::{Error, Result};
use crate::vehicle::coefficients::{CoefficientProvider, CM};
use crate::vehicle::{
    six_dof_derivative, AddedMassSet, BodyState6Dof, SixDofOptions, ThrustCommand, VehicleParams,
};
use nalgebra::{Matrix3, Vector3};

/// LQ weights for the augmented pitch channel [integral error, pitch error,
/// pitch rate] and the deflection effort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqWeights {
    pub integral: f64,
    pub attitude: f64,
    pub rate: f64,
    pub effort: f64,
}

impl Default for LqWeights {
    fn default() -> Self {
        LqWeights {
            integral: 8.0,
            attitude: 10.0,
            rate: 6.0,
            effort: 8.0,
        }
    }
}

/// Linearization point for the gain synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostTrim {
    /// Forward speed [m/s]; mid-boost default.
    pub forward_speed: f64,
    /// Pitch attitude [rad], usually the water-exit angle of the scenario.
    pub pitch: f64,
    /// Trim thrust [N]; the deflection authority scales with it.
    pub thrust: f64,
    /// Altitude [m] for the density lookup.
    pub altitude: f64,
}

impl BoostTrim {
    /// Trim for a boost scenario starting at water-exit pitch `pitch`:
    /// mid-boost speed and altitude, thrust balancing weight and drag along
    /// the body axis.
    pub fn for_scenario(
        pitch: f64,
        params: &VehicleParams,
        provider: &CoefficientProvider,
        env: &EnvironmentModel,
    ) -> Result<BoostTrim> {
        let forward_speed = 85.0;
        let altitude = 300.0;
        let rho = env.air_density(altitude)?;
        let q_bar = dynamic_pressure(rho, forward_speed);
        let (coeffs, _) = provider.evaluate(0.0, 0.0, forward_speed / SOUND_SPEED_AIR);
        let drag = q_bar * params.reference_area * coeffs.c0[0];
        let thrust = (env.weight(params.mass) * pitch.sin() - drag).clamp(2_000.0, 30_000.0);
        Ok(BoostTrim {
            forward_speed,
            pitch,
            thrust,
            altitude,
        })
    }
}

/// Integral + state feedback on the pitch channel, with output saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchAutopilot {
    pub k_integral: f64,
    pub k_attitude: f64,
    pub k_rate: f64,
    /// Deflection saturation [rad].
    pub deflection_limit: f64,
}

impl PitchAutopilot {
    /// Deflection command for the current pitch error state.
    pub fn command(&self, integral_error: f64, pitch_error: f64, pitch_rate: f64) -> f64 {
        let raw = -(self.k_integral * integral_error
            + self.k_attitude * pitch_error
            + self.k_rate * pitch_rate);
        raw.clamp(-self.deflection_limit, self.deflection_limit)
    }
}

/// Steady-state solution of the continuous algebraic Riccati equation by
/// integrating the Riccati ODE to convergence (RK4, fixed step).
fn solve_care(a: &Matrix3<f64>, b: &Vector3<f64>, q: &Matrix3<f64>, r: f64) -> Result<Matrix3<f64>> {
    let riccati = |p: &Matrix3<f64>| -> Matrix3<f64> {
        a.transpose() * p + p * a - p * (b * b.transpose()) * p / r + q
    };
    let mut p = *q;
    let h = 0.01;
    for _ in 0..2_000_000 {
        let k1 = riccati(&p);
        let k2 = riccati(&(p + 0.5 * h * k1));
        let k3 = riccati(&(p + 0.5 * h * k2));
        let k4 = riccati(&(p + h * k3));
        let delta = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        p += delta;
        if delta.amax() < 1e-10 * (1.0 + p.amax()) {
            return Ok(p);
        }
    }
    Err(Error::parameter(
        "Riccati iteration did not converge for the pitch channel",
    ))
}

/// Synthesize autopilot gains at `trim` and verify closed-loop stability of
/// the design model.
pub fn synthesize_pitch_autopilot(
    params: &VehicleParams,
    provider: &CoefficientProvider,
    env: &EnvironmentModel,
    trim: &BoostTrim,
    weights: &LqWeights,
    deflection_limit: f64,
) -> Result<PitchAutopilot> {
    if trim.forward_speed <= 0.0 {
        return Err(Error::parameter("trim forward speed must be positive"));
    }
    let rho = env.air_density(trim.altitude)?;
    let q_bar = dynamic_pressure(rho, trim.forward_speed);
    let mach = trim.forward_speed / SOUND_SPEED_AIR;
    let (coeffs, _) = provider.evaluate(0.0, 0.0, mach);

    // Pitch-rate damping and deflection authority of the linearized channel
    // xi-dot = theta_err, theta-dot = q, q-dot = a_qq q + b_q theta_T.
    let iy = params.inertia[1];
    let a_qq = q_bar * params.reference_area * params.diameter * coeffs.cq[CM]
        * params.diameter
        / (2.0 * trim.forward_speed * iy);
    let b_q = trim.thrust * params.thrust_arm / iy;
    if b_q.abs() < 1e-9 {
        return Err(Error::parameter(
            "no deflection authority at zero trim thrust",
        ));
    }

    let a = Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, a_qq);
    let b = Vector3::new(0.0, 0.0, b_q);
    let q = Matrix3::from_diagonal(&Vector3::new(
        weights.integral,
        weights.attitude,
        weights.rate,
    ));
    let p = solve_care(&a, &b, &q, weights.effort)?;
    let gain = (b.transpose() * p) / weights.effort;
    let autopilot = PitchAutopilot {
        k_integral: gain[(0, 0)],
        k_attitude: gain[(0, 1)],
        k_rate: gain[(0, 2)],
        deflection_limit,
    };

    // Numerical stability check of the closed design loop.
    let k = Vector3::new(autopilot.k_integral, autopilot.k_attitude, autopilot.k_rate);
    let a_closed = a - b * k.transpose();
    let eigen = a_closed.complex_eigenvalues();
    if eigen.iter().any(|lambda| lambda.re >= -1e-9) {
        return Err(Error::parameter(format!(
            "closed pitch loop unstable at trim: eigenvalues {eigen:?}"
        )));
    }
    Ok(autopilot)
}

/// 6-DOF boost dynamics augmented with the autopilot integral state. State
/// layout: the 12 rigid-body components followed by the integral of the
/// pitch error. Controls: [thrust, pitch deflection, pitch reference].
struct ClosedLoopBoost<'a> {
    params: &'a VehicleParams,
    added: &'a AddedMassSet,
    provider: &'a CoefficientProvider,
    env: &'a EnvironmentModel,
}

impl Dynamics for ClosedLoopBoost<'_> {
    fn state_dim(&self) -> usize {
        13
    }
    fn control_dim(&self) -> usize {
        3
    }
    fn derivative(&self, _t: f64, x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
        let state = BodyState6Dof::from_slice(x);
        let command = ThrustCommand {
            thrust: u[0],
            pitch_deflection: u[1],
            yaw_deflection: 0.0,
        };
        let d = six_dof_derivative(
            &state,
            &command,
            self.params,
            self.added,
            self.provider,
            self.env,
            &SixDofOptions::default(),
        )?;
        out[..12].copy_from_slice(&d);
        out[12] = state.theta - u[2];
        Ok(())
    }
}

struct ClosedLoopSource<'a> {
    thrust: &'a ControlProgram,
    theta_ref: &'a ControlProgram,
    autopilot: &'a PitchAutopilot,
    hold: ControlHold,
}

impl ControlSource for ClosedLoopSource<'_> {
    fn control_dim(&self) -> usize {
        3
    }
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let mut thrust = [0.0];
        let mut theta_ref = [0.0];
        self.thrust.value_at(t, self.hold, &mut thrust);
        self.theta_ref.value_at(t, self.hold, &mut theta_ref);
        let deflection = self
            .autopilot
            .command(x[12], x[7] - theta_ref[0], x[4]);
        out[0] = thrust[0];
        out[1] = deflection;
        out[2] = theta_ref[0];
    }
}

/// Run the boost phase closed loop on the full 6-DOF model: thrust open
/// loop, deflection from the autopilot tracking `theta_ref`.
#[allow(clippy::too_many_arguments)]
pub fn closed_loop_boost(
    x0: &BodyState6Dof,
    thrust_program: &ControlProgram,
    theta_ref: &ControlProgram,
    autopilot: &PitchAutopilot,
    params: &VehicleParams,
    added: &AddedMassSet,
    provider: &CoefficientProvider,
    env: &EnvironmentModel,
    t_f: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let dynamics = ClosedLoopBoost {
        params,
        added,
        provider,
        env,
    };
    let source = ClosedLoopSource {
        thrust: thrust_program,
        theta_ref,
        autopilot,
        hold: config.hold,
    };
    let mut x0_aug = [0.0; 13];
    x0_aug[..12].copy_from_slice(&x0.to_array());
    integrate(&dynamics, &x0_aug, &source, t_f, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (VehicleParams, CoefficientProvider, EnvironmentModel) {
        (
            VehicleParams::default(),
            CoefficientProvider::fallback(),
            EnvironmentModel::default(),
        )
    }

    fn autopilot_at(pitch: f64) -> (PitchAutopilot, BoostTrim) {
        let (params, provider, env) = setup();
        let trim = BoostTrim::for_scenario(pitch, &params, &provider, &env).unwrap();
        let ap = synthesize_pitch_autopilot(
            &params,
            &provider,
            &env,
            &trim,
            &LqWeights::default(),
            12.0f64.to_radians(),
        )
        .unwrap();
        (ap, trim)
    }

    #[test]
    fn gains_are_positive_and_loop_is_stable() {
        let (ap, _) = autopilot_at(0.6);
        assert!(ap.k_integral > 0.0);
        assert!(ap.k_attitude > 0.0);
        assert!(ap.k_rate > 0.0);
    }

    #[test]
    fn command_saturates_at_the_deflection_limit() {
        let (ap, _) = autopilot_at(0.6);
        let limit = 12.0f64.to_radians();
        assert_eq!(ap.command(0.0, 10.0, 0.0), -limit);
        assert_eq!(ap.command(0.0, -10.0, 0.0), limit);
        assert_eq!(ap.command(0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn linear_step_response_settles_within_five_seconds() {
        // Step oracle on the synthesis model itself: the closed design loop
        // must settle to within 5% of a 5 degree step in under 5 s without
        // hitting the deflection limit.
        let (params, provider, env) = setup();
        let trim = BoostTrim::for_scenario(0.6, &params, &provider, &env).unwrap();
        let ap = synthesize_pitch_autopilot(
            &params,
            &provider,
            &env,
            &trim,
            &LqWeights::default(),
            12.0f64.to_radians(),
        )
        .unwrap();

        let rho = env.air_density(trim.altitude).unwrap();
        let q_bar = dynamic_pressure(rho, trim.forward_speed);
        let (coeffs, _) = provider.evaluate(0.0, 0.0, trim.forward_speed / SOUND_SPEED_AIR);
        let iy = params.inertia[1];
        let a_qq = q_bar * params.reference_area * params.diameter * coeffs.cq[CM]
            * params.diameter
            / (2.0 * trim.forward_speed * iy);
        let b_q = trim.thrust * params.thrust_arm / iy;

        let step = 5.0f64.to_radians();
        let (mut xi, mut theta, mut q) = (0.0, 0.0, 0.0);
        let h = 0.001;
        let mut settle_time = None;
        let mut max_deflection = 0.0f64;
        for i in 0..10_000 {
            let t = i as f64 * h;
            let deflection = ap.command(xi, theta - step, q);
            max_deflection = max_deflection.max(deflection.abs());
            let q_dot = a_qq * q + b_q * deflection;
            xi += h * (theta - step);
            theta += h * q;
            q += h * q_dot;
            if (theta - step).abs() <= 0.05 * step {
                settle_time.get_or_insert(t);
            } else {
                settle_time = None;
            }
        }
        let settle = settle_time.expect("never settled");
        assert!(settle < 5.0, "settled at {settle} s");
        assert!(
            max_deflection < 12.0f64.to_radians(),
            "saturated at {} deg",
            max_deflection.to_degrees()
        );
    }
}
