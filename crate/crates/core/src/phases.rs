//! Simplified longitudinal dynamics of the two powered phases.
//!
//! Both models share the five-state vector [u, w, q, theta, z] with z
//! positive down. The launch model keeps every added-mass derivative of the
//! underwater equations and resolves the mutual (wdot, qdot) coupling by a
//! direct 2x2 solve; the boost model is rigid-body only, in air, with a
//! small-angle pitch-plane thrust deflection.
//!
//! Rate-derivative terms are normalized by d/(2u) (forward speed dominant),
//! which is why u > 0 is required; dynamic pressure uses the full in-plane
//! speed.

use crate::environment::{dynamic_pressure, EnvironmentModel, SOUND_SPEED_AIR};
use crate::error::{Error, Result};
use crate::vehicle::coefficients::{CoefficientProvider, CM, CX, CZ};
use crate::vehicle::AddedMassSet;
use crate::vehicle::VehicleParams;
use serde::{Deserialize, Serialize};

/// Five-state longitudinal vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalState {
    /// Forward body velocity [m/s].
    pub u: f64,
    /// Down body velocity [m/s].
    pub w: f64,
    /// Pitch rate [rad/s].
    pub q: f64,
    /// Pitch angle [rad].
    pub theta: f64,
    /// Position, positive down [m]: depth under water, -altitude in air.
    pub z: f64,
}

impl LongitudinalState {
    pub const DIM: usize = 5;

    pub fn new(u: f64, w: f64, q: f64, theta: f64, z: f64) -> Self {
        LongitudinalState { u, w, q, theta, z }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.u, self.w, self.q, self.theta, self.z]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        LongitudinalState {
            u: x[0],
            w: x[1],
            q: x[2],
            theta: x[3],
            z: x[4],
        }
    }
}

/// Launch-phase control: booster thrust only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchControl {
    pub thrust: f64,
}

/// Boost-phase control: thrust plus pitch-plane deflection [rad].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostControl {
    pub thrust: f64,
    pub pitch_deflection: f64,
}

fn check_forward_speed(u: f64) -> Result<()> {
    if u <= 0.0 {
        return Err(Error::singularity(format!(
            "forward speed must be positive for the d/(2u) rate normalization, got u = {u}"
        )));
    }
    Ok(())
}

/// Launch-phase state derivative (under water, thrust along body x).
pub fn launch_derivative(
    state: &LongitudinalState,
    control: &LaunchControl,
    params: &VehicleParams,
    added: &AddedMassSet,
    provider: &CoefficientProvider,
    env: &EnvironmentModel,
) -> Result<[f64; 5]> {
    check_forward_speed(state.u)?;
    let (u, w, q, theta) = (state.u, state.w, state.q, state.theta);
    let m = params.mass;
    let iy = params.inertia[1];

    let rho = env.water_density;
    let speed = (u * u + w * w).sqrt();
    let q_bar = dynamic_pressure(rho, speed);
    let qa = q_bar * params.reference_area;
    let alpha = w.atan2(u);
    let (coeffs, _) = provider.evaluate(alpha, 0.0, 0.0);
    let rate_norm = params.diameter / (2.0 * u) * q;

    let weight = env.weight(m);
    let buoyancy = env.buoyancy(params.volume);
    let (sin_theta, cos_theta) = theta.sin_cos();

    let force_x = qa * (coeffs.c0[CX] + coeffs.cq[CX] * rate_norm) + control.thrust
        - (weight - buoyancy) * sin_theta;
    let force_z = qa * (coeffs.c0[CZ] + coeffs.cq[CZ] * rate_norm) + (weight - buoyancy) * cos_theta;
    let moment = qa * params.diameter * (coeffs.c0[CM] + coeffs.cq[CM] * rate_norm)
        + params.cb_cg_distance() * buoyancy * cos_theta;

    let u_dot = (force_x - m * w * q + added.z_wdot * w * q + added.z_qdot * q * q)
        / (m - added.x_udot);

    // The w and q equations reference each other's accelerations through
    // Z_qdot and M_wdot; assemble the reduced mass matrix and solve.
    let a11 = m - added.z_wdot;
    let a12 = -added.z_qdot;
    let a21 = -added.m_wdot;
    let a22 = iy - added.m_qdot;
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-12 {
        return Err(Error::parameter(
            "singular reduced (w, q) mass matrix in the launch model",
        ));
    }
    let rhs_w = force_z + m * q * u - added.x_udot * q * u;
    let rhs_q = moment - added.z_wdot * w * u - added.z_qdot * q * u + added.x_udot * u * w;
    let w_dot = (rhs_w * a22 - a12 * rhs_q) / det;
    let q_dot = (a11 * rhs_q - a21 * rhs_w) / det;

    Ok([u_dot, w_dot, q_dot, q, -sin_theta * u + cos_theta * w])
}

/// Boost-phase state derivative (in air, rigid body, small-angle thrust
/// deflection). Density queries below sea level clamp to the sea-level
/// value so that shooting iterates which momentarily dip under z = 0 stay
/// evaluable.
pub fn boost_derivative(
    state: &LongitudinalState,
    control: &BoostControl,
    params: &VehicleParams,
    provider: &CoefficientProvider,
    env: &EnvironmentModel,
) -> Result<[f64; 5]> {
    check_forward_speed(state.u)?;
    let (u, w, q, theta) = (state.u, state.w, state.q, state.theta);
    let m = params.mass;
    let iy = params.inertia[1];

    let altitude = (-state.z).max(0.0);
    let rho = env.air_density(altitude)?;
    let speed = (u * u + w * w).sqrt();
    let q_bar = dynamic_pressure(rho, speed);
    let qa = q_bar * params.reference_area;
    let alpha = w.atan2(u);
    let mach = speed / SOUND_SPEED_AIR;
    let (coeffs, _) = provider.evaluate(alpha, 0.0, mach);
    let rate_norm = params.diameter / (2.0 * u) * q;

    let weight = env.weight(m);
    let (sin_theta, cos_theta) = theta.sin_cos();
    let thrust = control.thrust;
    let deflection = control.pitch_deflection;

    let u_dot =
        (qa * (coeffs.c0[CX] + coeffs.cq[CX] * rate_norm) + thrust - weight * sin_theta
            - m * w * q)
            / m;
    let w_dot = (qa * (coeffs.c0[CZ] + coeffs.cq[CZ] * rate_norm) - thrust * deflection
        + weight * cos_theta
        + m * q * u)
        / m;
    let q_dot = (qa * params.diameter * (coeffs.c0[CM] + coeffs.cq[CM] * rate_norm)
        + thrust * params.thrust_arm * deflection)
        / iy;

    Ok([u_dot, w_dot, q_dot, q, -sin_theta * u + cos_theta * w])
}
