//! Hydrodynamic added-mass parameters and the mass / Coriolis matrices they
//! enter, plus the rigid-body counterparts.
//!
//! The axial term comes from the classical prolate-spheroid result (Lamb's
//! k1 factor, as tabulated by Blevins); the transverse, cross and rotary
//! terms come from strip theory over the hull sections.

use super::VehicleParams;
use crate::error::{Error, Result};
use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

/// The ten non-zero added-mass derivatives of a body with xy- and xz-plane
/// symmetry. Units follow the usual SNAME convention: translational terms in
/// kg, cross terms in kg m, rotary terms in kg m^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddedMassSet {
    pub x_udot: f64,
    pub y_vdot: f64,
    pub y_rdot: f64,
    pub z_wdot: f64,
    pub z_qdot: f64,
    pub k_pdot: f64,
    pub m_wdot: f64,
    pub m_qdot: f64,
    pub n_vdot: f64,
    pub n_rdot: f64,
}

impl AddedMassSet {
    /// All-zero set; used for flight in air where added-mass effects are
    /// dropped from the motion model.
    pub const ZERO: AddedMassSet = AddedMassSet {
        x_udot: 0.0,
        y_vdot: 0.0,
        y_rdot: 0.0,
        z_wdot: 0.0,
        z_qdot: 0.0,
        k_pdot: 0.0,
        m_wdot: 0.0,
        m_qdot: 0.0,
        n_vdot: 0.0,
        n_rdot: 0.0,
    };
}

/// Reference added-mass values for the default airframe. The strip-theory
/// derivation is validated against these (10% relative) in the test suite,
/// and the `params` CLI subcommand prints the comparison.
pub fn reference_added_mass() -> AddedMassSet {
    AddedMassSet {
        x_udot: -10.5294,
        y_vdot: -1296.5,
        y_rdot: -99.4382,
        z_wdot: -1296.5,
        z_qdot: 99.4382,
        k_pdot: 0.0,
        m_wdot: 99.4382,
        m_qdot: -3936.7,
        n_vdot: -99.4382,
        n_rdot: -3936.7,
    }
}

/// Lamb's axial added-mass factor k1 for a prolate spheroid with semi-major
/// axis `a` and semi-minor axis `b`.
fn lamb_k1(a: f64, b: f64) -> f64 {
    let e2 = 1.0 - (b / a) * (b / a);
    let e = e2.sqrt();
    let alpha0 = (2.0 * (1.0 - e2) / (e * e * e)) * (0.5 * ((1.0 + e) / (1.0 - e)).ln() - e);
    alpha0 / (2.0 - alpha0)
}

/// Local hull radius at distance `s` from the nose tip: ellipsoidal cap of
/// length `nose_length`, cylindrical body elsewhere.
fn hull_radius(s: f64, radius: f64, nose_length: f64) -> f64 {
    if s < nose_length && nose_length > 0.0 {
        let t = 1.0 - s / nose_length;
        radius * (1.0 - t * t).max(0.0).sqrt()
    } else {
        radius
    }
}

const STRIP_COUNT: usize = 1000;

/// Derive the added-mass set for `params` in a fluid of density `rho`.
///
/// The axial term uses the prolate spheroid whose semi-minor axis is the
/// hull radius and whose volume matches the displaced volume, scaled by the
/// displaced fluid mass. The remaining terms integrate the sectional added
/// mass rho pi r(x)^2 over the hull with a midpoint rule, taking first and
/// second moments about the center of gravity. The roll term is zero for a
/// finless hull.
pub fn derive_added_mass(params: &VehicleParams, rho: f64) -> Result<AddedMassSet> {
    params.validate()?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::parameter(format!(
            "fluid density must be strictly positive, got {rho}"
        )));
    }

    let radius = params.diameter / 2.0;
    let spheroid_a = 3.0 * params.volume / (4.0 * std::f64::consts::PI * radius * radius);
    if spheroid_a <= radius {
        return Err(Error::parameter(format!(
            "degenerate geometry: equivalent spheroid semi-major axis {spheroid_a} m \
             not larger than hull radius {radius} m"
        )));
    }
    let x_udot = -lamb_k1(spheroid_a, radius) * rho * params.volume;

    // Strip integrals: I0 = total sectional mass, I1/I2 = first and second
    // moments about the cg, with body x positive toward the nose.
    let x_cg = params.cg_position[0];
    let h = params.length / STRIP_COUNT as f64;
    let (mut i0, mut i1, mut i2) = (0.0, 0.0, 0.0);
    for k in 0..STRIP_COUNT {
        let s = (k as f64 + 0.5) * h;
        let r = hull_radius(s, radius, params.nose_length);
        let sectional = rho * std::f64::consts::PI * r * r;
        let x = x_cg - s;
        i0 += sectional * h;
        i1 += sectional * x * h;
        i2 += sectional * x * x * h;
    }

    Ok(AddedMassSet {
        x_udot,
        y_vdot: -i0,
        y_rdot: -i1,
        z_wdot: -i0,
        z_qdot: i1,
        k_pdot: 0.0,
        m_wdot: i1,
        m_qdot: -i2,
        n_vdot: -i1,
        n_rdot: -i2,
    })
}

/// Added-mass matrix M_A and Coriolis/centripetal matrix C_A(nu).
///
/// M_A is the negated derivative pattern for a doubly symmetric body; C_A is
/// the associated skew-symmetric matrix built from the momentum-like terms
/// a1..a3, b1..b3.
pub fn added_mass_terms(a: &AddedMassSet, nu: &Vector6<f64>) -> (Matrix6<f64>, Matrix6<f64>) {
    let (u, v, w, p, q, r) = (nu[0], nu[1], nu[2], nu[3], nu[4], nu[5]);

    #[rustfmt::skip]
    let m_a = -Matrix6::new(
        a.x_udot, 0.0,      0.0,      0.0,      0.0,      0.0,
        0.0,      a.y_vdot, 0.0,      0.0,      0.0,      a.y_rdot,
        0.0,      0.0,      a.z_wdot, 0.0,      a.z_qdot, 0.0,
        0.0,      0.0,      0.0,      a.k_pdot, 0.0,      0.0,
        0.0,      0.0,      a.m_wdot, 0.0,      a.m_qdot, 0.0,
        0.0,      a.n_vdot, 0.0,      0.0,      0.0,      a.n_rdot,
    );

    let a1 = a.x_udot * u;
    let a2 = a.y_vdot * v + a.y_rdot * r;
    let a3 = a.z_wdot * w + a.z_qdot * q;
    let b1 = a.k_pdot * p;
    let b2 = a.m_wdot * w + a.m_qdot * q;
    let b3 = a.n_vdot * v + a.n_rdot * r;

    #[rustfmt::skip]
    let c_a = Matrix6::new(
        0.0, 0.0, 0.0, 0.0, -a3,  a2,
        0.0, 0.0, 0.0,  a3, 0.0, -a1,
        0.0, 0.0, 0.0, -a2,  a1, 0.0,
        0.0, -a3,  a2, 0.0, -b3,  b2,
         a3, 0.0, -a1,  b3, 0.0, -b1,
        -a2,  a1, 0.0, -b2,  b1, 0.0,
    );

    (m_a, c_a)
}

/// Rigid-body mass matrix M_RB = diag(m, m, m, Ix, Iy, Iz) and the matching
/// Coriolis/centripetal matrix C_RB(nu), body frame at the cg.
pub fn rigid_body_terms(params: &VehicleParams, nu: &Vector6<f64>) -> (Matrix6<f64>, Matrix6<f64>) {
    let m = params.mass;
    let [ix, iy, iz] = params.inertia;
    let (u, v, w, p, q, r) = (nu[0], nu[1], nu[2], nu[3], nu[4], nu[5]);

    let m_rb = Matrix6::from_diagonal(&Vector6::new(m, m, m, ix, iy, iz));

    #[rustfmt::skip]
    let c_rb = Matrix6::new(
        0.0,      0.0,      0.0,      0.0,     m * w,   -m * v,
        0.0,      0.0,      0.0,     -m * w,   0.0,      m * u,
        0.0,      0.0,      0.0,      m * v,  -m * u,    0.0,
        0.0,      m * w,   -m * v,    0.0,     iz * r,  -iy * q,
       -m * w,    0.0,      m * u,   -iz * r,  0.0,      ix * p,
        m * v,   -m * u,    0.0,      iy * q, -ix * p,   0.0,
    );

    (m_rb, c_rb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn derived() -> AddedMassSet {
        derive_added_mass(&VehicleParams::default(), 1023.0).unwrap()
    }

    #[test]
    fn derivation_matches_reference_within_ten_percent() {
        let a = derived();
        let r = reference_added_mass();
        let pairs = [
            (a.x_udot, r.x_udot),
            (a.y_vdot, r.y_vdot),
            (a.y_rdot, r.y_rdot),
            (a.z_wdot, r.z_wdot),
            (a.z_qdot, r.z_qdot),
            (a.m_wdot, r.m_wdot),
            (a.m_qdot, r.m_qdot),
            (a.n_vdot, r.n_vdot),
            (a.n_rdot, r.n_rdot),
        ];
        for (got, want) in pairs {
            let rel = (got - want).abs() / want.abs();
            assert!(rel <= 0.10, "derived {got} vs reference {want}: {rel:.3}");
        }
        assert_eq!(a.k_pdot, 0.0);
    }

    #[test]
    fn symmetry_pairings_are_exact() {
        let a = derived();
        assert_eq!(a.y_vdot, a.z_wdot);
        assert_eq!(a.n_rdot, a.m_qdot);
        assert_eq!(a.y_rdot, -a.z_qdot);
        assert_eq!(a.n_vdot, a.y_rdot);
        assert_eq!(a.m_wdot, a.z_qdot);
    }

    #[test]
    fn diagonal_terms_nonpositive_and_roll_zero() {
        let a = derived();
        for term in [a.x_udot, a.y_vdot, a.z_wdot, a.m_qdot, a.n_rdot] {
            assert!(term <= 0.0, "{term}");
        }
        assert_eq!(a.k_pdot, 0.0);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(derive_added_mass(&VehicleParams::default(), 0.0).is_err());
        assert!(derive_added_mass(&VehicleParams::default(), -1.0).is_err());
        let mut p = VehicleParams::default();
        p.mass = 0.0;
        assert!(derive_added_mass(&p, 1023.0).is_err());
        let mut p = VehicleParams::default();
        p.cb_position[0] = p.cg_position[0] + 0.1;
        assert!(derive_added_mass(&p, 1023.0).is_err());
    }

    #[test]
    fn coriolis_vanishes_at_rest_and_a1_matches_hand_value() {
        let a = reference_added_mass();
        let (_, c0) = added_mass_terms(&a, &Vector6::zeros());
        assert_eq!(c0, Matrix6::zeros());

        // nu = (10,0,0,0,0,0): only a1 = X_udot * u survives, appearing in
        // the (1,5)/(2,4) rotational coupling slots of C_A.
        let (_, c) = added_mass_terms(&a, &Vector6::new(10.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_relative_eq!(c[(1, 5)], 105.294, max_relative = 1e-12);
        assert_relative_eq!(c[(2, 4)], -105.294, max_relative = 1e-12);
        assert_eq!(c[(0, 4)], 0.0);
        assert_eq!(c[(0, 5)], 0.0);
    }

    #[test]
    fn rigid_body_mass_matrix_is_table_diagonal() {
        let p = VehicleParams::default();
        let (m_rb, c_rb) = rigid_body_terms(&p, &Vector6::zeros());
        let diag: Vec<f64> = (0..6).map(|i| m_rb[(i, i)]).collect();
        assert_eq!(
            diag,
            vec![1513.0, 1513.0, 1513.0, 50.6684, 4841.6944, 4841.6944]
        );
        assert_eq!(c_rb * Vector6::zeros(), Vector6::zeros());

        // nu = (0, v, 0, 0, 0, r): X-channel cross term is m(-v r).
        let nu = Vector6::new(0.0, 3.0, 0.0, 0.0, 0.0, 0.2);
        let (_, c) = rigid_body_terms(&p, &nu);
        let coriolis = c * nu;
        assert_relative_eq!(coriolis[0], -1513.0 * 3.0 * 0.2, max_relative = 1e-12);
    }

    #[test]
    fn combined_mass_matrix_symmetric_positive_definite() {
        let p = VehicleParams::default();
        let a = derived();
        let (m_rb, _) = rigid_body_terms(&p, &Vector6::zeros());
        let (m_a, _) = added_mass_terms(&a, &Vector6::zeros());
        let m = m_rb + m_a;
        assert_relative_eq!(m, m.transpose(), max_relative = 1e-12);
        assert!(m.clone_owned().cholesky().is_some(), "not positive definite");
    }

    proptest! {
        #[test]
        fn coriolis_matrix_is_skew_symmetric(
            u in -40.0f64..40.0, v in -10.0f64..10.0, w in -10.0f64..10.0,
            p in -2.0f64..2.0, q in -2.0f64..2.0, r in -2.0f64..2.0
        ) {
            let a = derived();
            let nu = Vector6::new(u, v, w, p, q, r);
            let (_, c_a) = added_mass_terms(&a, &nu);
            let sum = c_a + c_a.transpose();
            prop_assert!(sum.amax() <= 1e-9, "C_A + C_A^T max {}", sum.amax());
            // consequence: nu' C_A nu = 0 to machine precision
            let quad = (nu.transpose() * c_a * nu)[0];
            prop_assert!(quad.abs() <= 1e-6, "quadratic form {quad}");
        }
    }
}
