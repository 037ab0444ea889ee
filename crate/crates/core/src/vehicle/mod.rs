//! Vehicle physical parameters, hydrodynamic added mass, force and moment
//! sources, and the assembled six degree-of-freedom state derivative.

pub mod added_mass;
pub mod coefficients;
pub mod forces;
pub mod six_dof;

pub use added_mass::{
    added_mass_terms, derive_added_mass, reference_added_mass, rigid_body_terms, AddedMassSet,
};
pub use coefficients::{CoefficientProvider, CoefficientSet, FallbackCoefficients};
pub use forces::{aero_hydro_forces, restoring_forces, thrust_forces};
pub use six_dof::{six_dof_derivative, SixDofDynamics, SixDofOptions, ThrustCommand};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Physical parameter set of the vehicle.
///
/// Positions are given in the measurement frame of the airframe drawing,
/// origin at the nose tip with x running aft, so `x_cg` and `x_cb` are
/// distances from the nose. The body frame used by the dynamics is centered
/// at the center of gravity with x forward.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Total mass [kg], constant across both flight phases.
    pub mass: f64,
    /// Moments of inertia about the body axes [kg m^2].
    pub inertia: [f64; 3],
    /// Overall length [m].
    pub length: f64,
    /// Body diameter [m]; also the aerodynamic reference length.
    pub diameter: f64,
    /// Aerodynamic reference area [m^2].
    pub reference_area: f64,
    /// Displaced volume [m^3].
    pub volume: f64,
    /// Center of gravity in the measurement frame [m].
    pub cg_position: [f64; 3],
    /// Center of buoyancy in the measurement frame [m].
    pub cb_position: [f64; 3],
    /// Thrust moment arm along body x [m], see the thrust force model.
    pub thrust_arm: f64,
    /// Length of the ellipsoidal nose cap [m] used by the strip-theory
    /// added-mass derivation. The airframe nose is blunt; this value is
    /// calibrated so the derived added-mass set reproduces the reference
    /// values for this hull within tolerance.
    pub nose_length: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            mass: 1513.0,
            inertia: [50.6684, 4841.6944, 4841.6944],
            length: 6.1806,
            diameter: 0.5175,
            reference_area: 0.2104,
            volume: 1.332,
            cg_position: [3.1903, 0.0, 0.0],
            cb_position: [3.0903, 0.0, 0.0],
            thrust_arm: 2.9903,
            nose_length: 0.15,
        }
    }
}

impl VehicleParams {
    /// Distance from the center of buoyancy to the center of gravity along
    /// the hull axis [m]. Positive: the cb sits nearer the nose, which is
    /// what makes the hull pitch nose-up under buoyancy.
    pub fn cb_cg_distance(&self) -> f64 {
        self.cg_position[0] - self.cb_position[0]
    }

    /// Check the documented invariants.
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("mass", self.mass),
            ("I_x", self.inertia[0]),
            ("I_y", self.inertia[1]),
            ("I_z", self.inertia[2]),
            ("length", self.length),
            ("diameter", self.diameter),
            ("reference_area", self.reference_area),
            ("volume", self.volume),
        ];
        for (name, value) in positives {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::parameter(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        if self.cb_cg_distance() <= 0.0 {
            return Err(Error::parameter(format!(
                "center of buoyancy must sit ahead of the center of gravity \
                 (x_cg - x_cb = {} <= 0)",
                self.cb_cg_distance()
            )));
        }
        if !(self.nose_length >= 0.0 && self.nose_length < self.length) {
            return Err(Error::parameter(format!(
                "nose length {} m must lie in [0, length)",
                self.nose_length
            )));
        }
        Ok(())
    }
}

/// Forces [N] and moments [N m] in the body frame. Closed under addition
/// with a zero element, so sources can be summed term by term.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForceMoment {
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl ForceMoment {
    pub const ZERO: ForceMoment = ForceMoment {
        fx: 0.0,
        fy: 0.0,
        fz: 0.0,
        mx: 0.0,
        my: 0.0,
        mz: 0.0,
    };

    pub fn as_vector(&self) -> nalgebra::Vector6<f64> {
        nalgebra::Vector6::new(self.fx, self.fy, self.fz, self.mx, self.my, self.mz)
    }
}

impl std::ops::Add for ForceMoment {
    type Output = ForceMoment;
    fn add(self, rhs: ForceMoment) -> ForceMoment {
        ForceMoment {
            fx: self.fx + rhs.fx,
            fy: self.fy + rhs.fy,
            fz: self.fz + rhs.fz,
            mx: self.mx + rhs.mx,
            my: self.my + rhs.my,
            mz: self.mz + rhs.mz,
        }
    }
}

/// Full rigid-body state: body velocities and rates, Euler attitude, and
/// NED position with z positive down (z is depth under water; altitude is
/// -z in air).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState6Dof {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub north: f64,
    pub east: f64,
    pub z: f64,
}

impl BodyState6Dof {
    pub const DIM: usize = 12;

    /// Longitudinal-plane state: lateral velocities, rates and angles zero.
    pub fn longitudinal(u: f64, w: f64, q: f64, theta: f64, z: f64) -> Self {
        BodyState6Dof {
            u,
            v: 0.0,
            w,
            p: 0.0,
            q,
            r: 0.0,
            phi: 0.0,
            theta,
            psi: 0.0,
            north: 0.0,
            east: 0.0,
            z,
        }
    }

    pub fn to_array(&self) -> [f64; 12] {
        [
            self.u, self.v, self.w, self.p, self.q, self.r, self.phi, self.theta, self.psi,
            self.north, self.east, self.z,
        ]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        BodyState6Dof {
            u: x[0],
            v: x[1],
            w: x[2],
            p: x[3],
            q: x[4],
            r: x[5],
            phi: x[6],
            theta: x[7],
            psi: x[8],
            north: x[9],
            east: x[10],
            z: x[11],
        }
    }
}
