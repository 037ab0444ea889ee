//! The assembled six degree-of-freedom state derivative.
//!
//! (M_RB + M_A) nudot = tau_A/H + tau_R + tau_T - (C_RB + C_A) nu, with
//! standard Euler-angle kinematics and a flat-Earth NED position frame,
//! z positive down. The medium switches at z = 0: under water buoyancy and
//! the supplied added-mass set apply; in air buoyancy is zero, air density
//! follows the ISA model, and added mass is dropped.

use super::added_mass::{added_mass_terms, rigid_body_terms, AddedMassSet};
use super::coefficients::CoefficientProvider;
use super::forces::{aero_hydro_forces, restoring_forces, thrust_forces};
use super::{BodyState6Dof, VehicleParams};
use crate::environment::{dynamic_pressure, total_speed, EnvironmentModel, SOUND_SPEED_AIR};
use crate::error::{Error, Result};
use nalgebra::Vector6;

/// Booster command: thrust magnitude [N] plus pitch- and yaw-plane
/// deflections [rad].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ThrustCommand {
    pub thrust: f64,
    pub pitch_deflection: f64,
    pub yaw_deflection: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SixDofOptions {
    /// Use the linearized thrust deflection force instead of the full
    /// trigonometric form.
    pub small_angle_thrust: bool,
}

impl Default for SixDofOptions {
    fn default() -> Self {
        SixDofOptions {
            small_angle_thrust: false,
        }
    }
}

/// Pitch magnitude beyond which full Euler kinematics are singular; vertical
/// flight is only supported in the longitudinal plane.
const VERTICAL_PITCH_LIMIT: f64 = 89.9 * std::f64::consts::PI / 180.0;
const LATERAL_TOLERANCE: f64 = 1e-9;

/// Evaluate the full state derivative.
#[allow(clippy::too_many_arguments)]
pub fn six_dof_derivative(
    state: &BodyState6Dof,
    command: &ThrustCommand,
    params: &VehicleParams,
    added: &AddedMassSet,
    provider: &CoefficientProvider,
    env: &EnvironmentModel,
    options: &SixDofOptions,
) -> Result<[f64; 12]> {
    let underwater = state.z > 0.0;
    let (density, buoyancy, added_eff) = if underwater {
        (
            env.water_density,
            env.buoyancy(params.volume),
            *added,
        )
    } else {
        (env.air_density(-state.z)?, 0.0, AddedMassSet::ZERO)
    };
    let weight = env.weight(params.mass);

    let nu = Vector6::new(state.u, state.v, state.w, state.p, state.q, state.r);
    let speed = total_speed(state.u, state.v, state.w);
    let q_bar = dynamic_pressure(density, speed);
    let alpha = state.w.atan2(state.u);
    let beta = if speed > 0.0 {
        (state.v / speed).asin()
    } else {
        0.0
    };
    let mach = if underwater { 0.0 } else { speed / SOUND_SPEED_AIR };

    let tau_ah = aero_hydro_forces(
        provider,
        q_bar,
        params.reference_area,
        params.diameter,
        speed,
        alpha,
        beta,
        mach,
        state.p,
        state.q,
        state.r,
    )?;
    let tau_r = restoring_forces(
        weight,
        buoyancy,
        params.cb_cg_distance(),
        state.phi,
        state.theta,
    );
    let tau_t = thrust_forces(
        command.thrust,
        command.pitch_deflection,
        command.yaw_deflection,
        params.thrust_arm,
        options.small_angle_thrust,
    );
    let tau = (tau_ah + tau_r + tau_t).as_vector();

    let (m_rb, c_rb) = rigid_body_terms(params, &nu);
    let (m_a, c_a) = added_mass_terms(&added_eff, &nu);
    let rhs = tau - (c_rb + c_a) * nu;
    let nu_dot = (m_rb + m_a)
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::parameter("singular combined mass matrix"))?;

    // Attitude kinematics. Near-vertical flight is restricted to the
    // longitudinal plane, where theta-dot = q remains well defined.
    let (phi_dot, theta_dot, psi_dot) = if state.theta.abs() >= VERTICAL_PITCH_LIMIT {
        let lateral = [state.v, state.p, state.r, state.phi, state.psi];
        if lateral.iter().any(|x| x.abs() > LATERAL_TOLERANCE) {
            return Err(Error::domain(format!(
                "lateral motion at |theta| >= 89.9 deg (theta = {:.4} rad): \
                 Euler kinematics singular outside the longitudinal plane",
                state.theta
            )));
        }
        (0.0, state.q, 0.0)
    } else {
        let (sin_phi, cos_phi) = state.phi.sin_cos();
        let tan_theta = state.theta.tan();
        (
            state.p + (state.q * sin_phi + state.r * cos_phi) * tan_theta,
            state.q * cos_phi - state.r * sin_phi,
            (state.q * sin_phi + state.r * cos_phi) / state.theta.cos(),
        )
    };

    // Body-to-NED rotation for the position rates, z down.
    let (sin_phi, cos_phi) = state.phi.sin_cos();
    let (sin_theta, cos_theta) = state.theta.sin_cos();
    let (sin_psi, cos_psi) = state.psi.sin_cos();
    let north_dot = state.u * cos_theta * cos_psi
        + state.v * (sin_phi * sin_theta * cos_psi - cos_phi * sin_psi)
        + state.w * (cos_phi * sin_theta * cos_psi + sin_phi * sin_psi);
    let east_dot = state.u * cos_theta * sin_psi
        + state.v * (sin_phi * sin_theta * sin_psi + cos_phi * cos_psi)
        + state.w * (cos_phi * sin_theta * sin_psi - sin_phi * cos_psi);
    let z_dot = -state.u * sin_theta + state.v * sin_phi * cos_theta + state.w * cos_phi * cos_theta;

    Ok([
        nu_dot[0], nu_dot[1], nu_dot[2], nu_dot[3], nu_dot[4], nu_dot[5], phi_dot, theta_dot,
        psi_dot, north_dot, east_dot, z_dot,
    ])
}

/// [`crate::sim::Dynamics`] adapter for the full model with open-loop
/// controls [thrust, pitch deflection, yaw deflection].
pub struct SixDofDynamics {
    pub params: VehicleParams,
    pub added: AddedMassSet,
    pub provider: std::sync::Arc<CoefficientProvider>,
    pub env: EnvironmentModel,
    pub options: SixDofOptions,
}

impl crate::sim::Dynamics for SixDofDynamics {
    fn state_dim(&self) -> usize {
        BodyState6Dof::DIM
    }
    fn control_dim(&self) -> usize {
        3
    }
    fn derivative(&self, _t: f64, x: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
        let state = BodyState6Dof::from_slice(x);
        let command = ThrustCommand {
            thrust: u[0],
            pitch_deflection: u[1],
            yaw_deflection: u[2],
        };
        let d = six_dof_derivative(
            &state,
            &command,
            &self.params,
            &self.added,
            &self.provider,
            &self.env,
            &self.options,
        )?;
        out.copy_from_slice(&d);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::added_mass::derive_added_mass;
    use approx::assert_relative_eq;

    fn setup() -> (
        VehicleParams,
        AddedMassSet,
        CoefficientProvider,
        EnvironmentModel,
    ) {
        let params = VehicleParams::default();
        let env = EnvironmentModel::default();
        let added = derive_added_mass(&params, env.water_density).unwrap();
        (params, added, CoefficientProvider::fallback(), env)
    }

    #[test]
    fn underwater_rest_pitches_up_and_sinks() {
        let (params, added, provider, env) = setup();
        let state = BodyState6Dof::longitudinal(0.0, 0.0, 0.0, 0.0, 100.0);
        let d = six_dof_derivative(
            &state,
            &ThrustCommand::default(),
            &params,
            &added,
            &provider,
            &env,
            &SixDofOptions::default(),
        )
        .unwrap();

        // Independent oracle: solve the 2x2 coupled (wdot, qdot) system of
        // the w/q rows at rest directly.
        let weight = env.weight(params.mass);
        let buoy = env.buoyancy(params.volume);
        let a11 = params.mass - added.z_wdot;
        let a12 = -added.z_qdot;
        let a21 = -added.m_wdot;
        let a22 = params.inertia[1] - added.m_qdot;
        let det = a11 * a22 - a12 * a21;
        let rz = weight - buoy;
        let rm = params.cb_cg_distance() * buoy;
        let w_dot = (rz * a22 - a12 * rm) / det;
        let q_dot = (a11 * rm - a21 * rz) / det;

        assert_relative_eq!(d[0], 0.0, epsilon = 1e-12); // udot
        assert_relative_eq!(d[2], w_dot, max_relative = 1e-9);
        assert_relative_eq!(d[4], q_dot, max_relative = 1e-9);
        assert!(d[2] > 0.0, "heavier than displaced water: sinks at rest");
        assert!(d[4] > 0.0, "buoyancy moment pitches the nose up");
    }

    #[test]
    fn air_zero_incidence_decouples_axial_thrust_and_gravity() {
        let (params, _, _, env) = setup();
        // All-zero coefficients force Q-scaled terms to vanish.
        let provider = CoefficientProvider::Fallback(super::super::FallbackCoefficients {
            axial: 0.0,
            normal_slope: 0.0,
            moment_slope: 0.0,
            pitch_damping: 0.0,
        });
        let weight = env.weight(params.mass);
        let state = BodyState6Dof::longitudinal(50.0, 0.0, 0.0, 0.0, -100.0);
        let cmd = ThrustCommand {
            thrust: weight,
            ..Default::default()
        };
        let d = six_dof_derivative(
            &state,
            &cmd,
            &params,
            &AddedMassSet::ZERO,
            &provider,
            &env,
            &SixDofOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(d[0], weight / params.mass, max_relative = 1e-12);
        assert_relative_eq!(d[2], env.gravity, max_relative = 1e-12);
        assert_relative_eq!(d[4], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn longitudinal_plane_stays_closed() {
        let (params, added, provider, env) = setup();
        let states = [
            BodyState6Dof::longitudinal(12.0, 1.5, 0.2, 0.4, 60.0),
            BodyState6Dof::longitudinal(30.0, -2.0, -0.1, 1.0, -200.0),
            BodyState6Dof::longitudinal(8.0, 0.0, 0.05, 0.1, 5.0),
        ];
        for state in states {
            let cmd = ThrustCommand {
                thrust: 15_000.0,
                pitch_deflection: 0.1,
                yaw_deflection: 0.0,
            };
            let d = six_dof_derivative(
                &state, &cmd, &params, &added, &provider, &env,
                &SixDofOptions::default(),
            )
            .unwrap();
            // vdot, pdot, rdot, phidot, psidot, eastdot all exactly zero.
            for idx in [1, 3, 5, 6, 8, 10] {
                assert_eq!(d[idx], 0.0, "lateral channel {idx} leaked");
            }
        }
    }

    #[test]
    fn vertical_flight_uses_planar_kinematics() {
        let (params, added, provider, env) = setup();
        let state = BodyState6Dof::longitudinal(
            20.0,
            0.0,
            0.05,
            std::f64::consts::FRAC_PI_2,
            50.0,
        );
        let d = six_dof_derivative(
            &state,
            &ThrustCommand::default(),
            &params,
            &added,
            &provider,
            &env,
            &SixDofOptions::default(),
        )
        .unwrap();
        assert_eq!(d[7], state.q, "theta-dot must fall back to q");
        assert_relative_eq!(d[11], -20.0, max_relative = 1e-12); // zdot = -u

        let mut lateral = state;
        lateral.r = 0.01;
        let err = six_dof_derivative(
            &lateral,
            &ThrustCommand::default(),
            &params,
            &added,
            &provider,
            &env,
            &SixDofOptions::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("89.9"), "{err}");
    }
}
