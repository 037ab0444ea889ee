//! Individual force and moment sources in the body frame: restoring
//! (gravity + buoyancy), booster thrust with pitch/yaw deflections, and the
//! coefficient-based aerodynamic / hydrodynamic contribution.

use super::coefficients::CoefficientProvider;
use super::ForceMoment;
use crate::error::{Error, Result};

/// Combined gravitational and buoyancy forces and moments for a body whose
/// cg and cb both lie on the body x axis, body frame at the cg.
///
/// `weight` and `buoyancy` are force magnitudes [N]; callers pass zero
/// buoyancy in air. `cb_cg_distance` is the forward offset of the cb from
/// the cg [m], which is what produces the nose-up pitching moment.
pub fn restoring_forces(
    weight: f64,
    buoyancy: f64,
    cb_cg_distance: f64,
    phi: f64,
    theta: f64,
) -> ForceMoment {
    let (sin_phi, cos_phi) = phi.sin_cos();
    let (sin_theta, cos_theta) = theta.sin_cos();
    ForceMoment {
        fx: (buoyancy - weight) * sin_theta,
        fy: (weight - buoyancy) * cos_theta * sin_phi,
        fz: (weight - buoyancy) * cos_theta * cos_phi,
        mx: 0.0,
        my: cb_cg_distance * buoyancy * cos_theta * cos_phi,
        mz: -cb_cg_distance * buoyancy * cos_theta * sin_phi,
    }
}

/// Booster thrust force and moment for thrust `thrust` [N] deflected by
/// `theta_t` in the pitch plane and `psi_t` in the yaw plane, applied on the
/// body x axis with moment arm `l_x` [m].
///
/// With `small_angle` the linearized form (valid for deflections of a few
/// degrees) is used instead of the full trigonometric one.
pub fn thrust_forces(
    thrust: f64,
    theta_t: f64,
    psi_t: f64,
    l_x: f64,
    small_angle: bool,
) -> ForceMoment {
    if small_angle {
        return ForceMoment {
            fx: thrust,
            fy: thrust * psi_t,
            fz: -thrust * theta_t,
            mx: 0.0,
            my: thrust * l_x * theta_t,
            mz: thrust * l_x * psi_t,
        };
    }
    let (sin_t, cos_t) = theta_t.sin_cos();
    let (sin_p, cos_p) = psi_t.sin_cos();
    ForceMoment {
        fx: thrust * cos_t * cos_p,
        fy: thrust * sin_p,
        fz: -thrust * sin_t * cos_p,
        mx: 0.0,
        my: thrust * l_x * sin_t * cos_p,
        mz: thrust * l_x * sin_p,
    }
}

/// Aerodynamic / hydrodynamic forces and moments.
///
/// Coefficients are evaluated at `(alpha, beta, mach)` and combined with the
/// rate derivatives normalized by d/(2V); moment rows are scaled by the
/// reference length. A zero speed with non-zero body rates leaves the
/// normalization undefined and is rejected.
#[allow(clippy::too_many_arguments)]
pub fn aero_hydro_forces(
    provider: &CoefficientProvider,
    dynamic_pressure: f64,
    reference_area: f64,
    reference_length: f64,
    speed: f64,
    alpha: f64,
    beta: f64,
    mach: f64,
    p: f64,
    q: f64,
    r: f64,
) -> Result<ForceMoment> {
    let rates_active = p != 0.0 || q != 0.0 || r != 0.0;
    if speed <= 0.0 {
        if rates_active {
            return Err(Error::singularity(
                "rate-derivative normalization d/(2V) undefined at zero total speed",
            ));
        }
        // At rest every contribution is Q-scaled and Q = 0.
        return Ok(ForceMoment::ZERO);
    }

    let (set, _clamped) = provider.evaluate(alpha, beta, mach);
    let norm = reference_length / (2.0 * speed);
    let qa = dynamic_pressure * reference_area;
    let coeff = |i: usize| set.c0[i] + (set.cp[i] * p + set.cq[i] * q + set.cr[i] * r) * norm;

    Ok(ForceMoment {
        fx: qa * coeff(0),
        fy: qa * coeff(1),
        fz: qa * coeff(2),
        mx: qa * reference_length * coeff(3),
        my: qa * reference_length * coeff(4),
        mz: qa * reference_length * coeff(5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::EnvironmentModel;
    use crate::vehicle::VehicleParams;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn restoring_level_attitude() {
        let fm = restoring_forces(100.0, 60.0, 0.1, 0.0, 0.0);
        assert_eq!(fm.fx, 0.0);
        assert_eq!(fm.fy, 0.0);
        assert_relative_eq!(fm.fz, 40.0, max_relative = 1e-12);
        assert_relative_eq!(fm.my, 6.0, max_relative = 1e-12);
        assert_eq!(fm.mx, 0.0);
        assert_eq!(fm.mz, 0.0);
    }

    #[test]
    fn restoring_vertical_attitude() {
        let fm = restoring_forces(100.0, 60.0, 0.1, 0.0, FRAC_PI_2);
        assert_relative_eq!(fm.fx, -40.0, max_relative = 1e-12);
        assert!(fm.fz.abs() < 1e-12);
        assert!(fm.my.abs() < 1e-12);
    }

    #[test]
    fn restoring_default_vehicle_magnitudes() {
        // Hand evaluation with the default parameter table and g = 9.81:
        // W = 1513 * 9.81, B = 1023 * 9.81 * 1.332.
        let params = VehicleParams::default();
        let env = EnvironmentModel::default();
        let weight = env.weight(params.mass);
        let buoyancy = env.buoyancy(params.volume);
        assert_relative_eq!(weight, 14_842.53, max_relative = 1e-10);
        assert_relative_eq!(buoyancy, 13_367.459_16, max_relative = 1e-10);
        let fm = restoring_forces(weight, buoyancy, params.cb_cg_distance(), 0.0, 0.0);
        assert_relative_eq!(fm.fz, 1475.070_84, epsilon = 1e-6);
        assert_relative_eq!(fm.my, 1336.745_916, epsilon = 1e-6);
        assert!(fm.my > 0.0, "buoyancy moment must pitch the nose up");
    }

    #[test]
    fn thrust_with_zero_deflection_is_axial() {
        for small in [false, true] {
            let fm = thrust_forces(30_000.0, 0.0, 0.0, 2.9903, small);
            assert_eq!(
                fm,
                ForceMoment {
                    fx: 30_000.0,
                    ..ForceMoment::ZERO
                }
            );
        }
    }

    #[test]
    fn small_angle_pitch_deflection_components() {
        let t = 20_000.0;
        let theta_t = 0.05;
        let l_x = 2.9903;
        let fm = thrust_forces(t, theta_t, 0.0, l_x, true);
        assert_relative_eq!(fm.fz, -t * theta_t, max_relative = 1e-12);
        assert_relative_eq!(fm.my, t * l_x * theta_t, max_relative = 1e-12);
        assert_eq!(fm.fy, 0.0);
        assert_eq!(fm.mz, 0.0);
    }

    #[test]
    fn small_angle_error_bounds_over_deflection_range() {
        // Computed against the full trigonometric form over the +/-12 deg
        // pitch-deflection range: the deflection-induced components (fz, my)
        // stay within 1% of their exact values, while the axial component
        // carries the cosine loss, sup (1 - cos t)/cos t = 2.234% at 12 deg.
        let t = 30_000.0;
        let l_x = 2.9903;
        let mut worst_fz = 0.0f64;
        let mut worst_my = 0.0f64;
        let mut worst_fx = 0.0f64;
        for k in -120..=120 {
            let theta_t = (k as f64 / 10.0).to_radians();
            let full = thrust_forces(t, theta_t, 0.0, l_x, false);
            let small = thrust_forces(t, theta_t, 0.0, l_x, true);
            if theta_t != 0.0 {
                worst_fz = worst_fz.max(((small.fz - full.fz) / full.fz).abs());
                worst_my = worst_my.max(((small.my - full.my) / full.my).abs());
            }
            worst_fx = worst_fx.max(((small.fx - full.fx) / full.fx).abs());
        }
        assert!(worst_fz < 0.01, "fz relative error {worst_fz}");
        assert!(worst_my < 0.01, "my relative error {worst_my}");
        assert!(
            worst_fx < 0.02235,
            "fx cosine loss {worst_fx} exceeds the 12 deg bound"
        );
    }

    #[test]
    fn aero_zero_dynamic_pressure_gives_zero() {
        let provider = CoefficientProvider::fallback();
        let fm =
            aero_hydro_forces(&provider, 0.0, 0.2104, 0.5175, 10.0, 0.1, 0.0, 0.0, 0.0, 0.2, 0.0)
                .unwrap();
        assert_eq!(fm, ForceMoment::ZERO);
    }

    #[test]
    fn aero_zero_incidence_fallback_is_axial_only() {
        let provider = CoefficientProvider::fallback();
        let fm = aero_hydro_forces(
            &provider, 51_150.0, 0.2104, 0.5175, 10.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        )
        .unwrap();
        assert_relative_eq!(fm.fx, 51_150.0 * 0.2104 * -0.30, max_relative = 1e-12);
        assert_eq!(fm.fz, 0.0);
        assert_eq!(fm.my, 0.0);
    }

    #[test]
    fn aero_zero_speed_with_rates_is_singular() {
        let provider = CoefficientProvider::fallback();
        let err = aero_hydro_forces(
            &provider, 0.0, 0.2104, 0.5175, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.0,
        )
        .unwrap_err();
        assert!(err.to_string().contains("zero total speed"), "{err}");
        // At rest with no rates the contribution is simply zero.
        assert!(aero_hydro_forces(
            &provider, 0.0, 0.2104, 0.5175, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
        )
        .is_ok());
    }
}
