//! Medium properties and kinematic scalars used by every force model:
//! seawater density, ISA troposphere air density, gravity, total speed and
//! dynamic pressure.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Standard gravity used inside the ISA density formula. The troposphere
/// constants are pinned to the 1976 standard so density values are
/// bit-reproducible; the mission-level `gravity` field of
/// [`EnvironmentModel`] is configured independently.
pub const ISA_STANDARD_GRAVITY: f64 = 9.80665;

/// Speed of sound used for Mach lookups in air. Underwater queries use a
/// fixed Mach of zero instead (see the phase models).
pub const SOUND_SPEED_AIR: f64 = 340.0;

/// Top of the implemented ISA layer. The mission profile ends at 600 m, so
/// only the troposphere is modeled; queries above this are rejected rather
/// than silently extrapolated.
pub const ISA_TROPOSPHERE_TOP: f64 = 11_000.0;

/// Which fluid surrounds the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Medium {
    Water,
    Air,
}

/// Immutable bundle of medium properties. All operations on it are pure, so
/// one model can be shared freely across workers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvironmentModel {
    /// Sea water density [kg/m^3].
    pub water_density: f64,
    /// Gravitational acceleration used for weight and buoyancy [m/s^2].
    pub gravity: f64,
    /// ISA sea-level density [kg/m^3].
    pub isa_sea_level_density: f64,
    /// ISA sea-level temperature [K].
    pub isa_sea_level_temperature: f64,
    /// ISA temperature lapse rate [K/m].
    pub isa_lapse_rate: f64,
    /// Specific gas constant of air [J/(kg K)].
    pub gas_constant_air: f64,
}

impl Default for EnvironmentModel {
    fn default() -> Self {
        EnvironmentModel {
            water_density: 1023.0,
            gravity: 9.81,
            isa_sea_level_density: 1.225,
            isa_sea_level_temperature: 288.15,
            isa_lapse_rate: 0.0065,
            gas_constant_air: 287.053,
        }
    }
}

impl EnvironmentModel {
    /// ISA troposphere density at geometric altitude `altitude` [m].
    ///
    /// rho = rho0 (1 - L h / T0)^(g/(R L) - 1), valid for 0 <= h <= 11 km.
    pub fn air_density(&self, altitude: f64) -> Result<f64> {
        if !(0.0..=ISA_TROPOSPHERE_TOP).contains(&altitude) {
            return Err(Error::domain(format!(
                "altitude {altitude} m outside the implemented ISA band [0, {ISA_TROPOSPHERE_TOP}] m"
            )));
        }
        let temp_ratio = 1.0 - self.isa_lapse_rate * altitude / self.isa_sea_level_temperature;
        let exponent =
            ISA_STANDARD_GRAVITY / (self.gas_constant_air * self.isa_lapse_rate) - 1.0;
        Ok(self.isa_sea_level_density * temp_ratio.powf(exponent))
    }

    /// Density of the surrounding medium. Water is a constant; air follows
    /// the ISA model at the given altitude.
    pub fn medium_density(&self, depth_or_altitude: f64, medium: Medium) -> Result<f64> {
        match medium {
            Medium::Water => Ok(self.water_density),
            Medium::Air => self.air_density(depth_or_altitude),
        }
    }

    /// Weight [N] of a mass [kg] under this model's gravity.
    pub fn weight(&self, mass: f64) -> f64 {
        mass * self.gravity
    }

    /// Buoyancy force [N] of a displaced volume [m^3] in sea water.
    pub fn buoyancy(&self, volume: f64) -> f64 {
        self.water_density * self.gravity * volume
    }
}

/// Magnitude of the body velocity vector, V = sqrt(u^2 + v^2 + w^2).
pub fn total_speed(u: f64, v: f64, w: f64) -> f64 {
    (u * u + v * v + w * w).sqrt()
}

/// Dynamic pressure Q = 1/2 rho V^2 [Pa].
pub fn dynamic_pressure(density: f64, speed: f64) -> f64 {
    0.5 * density * speed * speed
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sea_level_density_is_exact() {
        let env = EnvironmentModel::default();
        assert_eq!(env.air_density(0.0).unwrap(), 1.225);
    }

    #[test]
    fn isa_density_at_600_m() {
        // Frozen from a hand evaluation of the troposphere formula with
        // L = 0.0065 K/m, T0 = 288.15 K, g = 9.80665 m/s^2, R = 287.053.
        let env = EnvironmentModel::default();
        assert_relative_eq!(
            env.air_density(600.0).unwrap(),
            1.155_976_925_762_233,
            max_relative = 1e-12
        );
    }

    #[test]
    fn altitude_outside_band_is_rejected() {
        let env = EnvironmentModel::default();
        let err = env.air_density(-1.0).unwrap_err();
        assert!(err.to_string().contains("[0, 11000] m"), "{err}");
        assert!(env.air_density(11_000.1).is_err());
    }

    #[test]
    fn medium_density_dispatch() {
        let env = EnvironmentModel::default();
        assert_eq!(env.medium_density(250.0, Medium::Water).unwrap(), 1023.0);
        assert_eq!(env.medium_density(0.0, Medium::Air).unwrap(), 1.225);
        assert_relative_eq!(
            env.medium_density(600.0, Medium::Air).unwrap(),
            1.1559769257622334,
            max_relative = 1e-12
        );
        assert!(env.medium_density(-5.0, Medium::Air).is_err());
    }

    #[test]
    fn speed_and_dynamic_pressure_basics() {
        assert_eq!(total_speed(3.0, 0.0, 4.0), 5.0);
        assert_eq!(dynamic_pressure(1023.0, 10.0), 51_150.0);
        assert_eq!(total_speed(0.0, 0.0, 0.0), 0.0);
        assert_eq!(dynamic_pressure(1023.0, 0.0), 0.0);
    }

    #[test]
    fn air_density_strictly_decreasing() {
        let env = EnvironmentModel::default();
        let mut prev = env.air_density(0.0).unwrap();
        for i in 1..=110 {
            let h = i as f64 * 100.0;
            let rho = env.air_density(h).unwrap();
            assert!(rho < prev, "density not decreasing at {h} m");
            prev = rho;
        }
    }

    proptest! {
        #[test]
        fn total_speed_permutation_and_sign_invariant(
            u in -50.0f64..50.0, v in -50.0f64..50.0, w in -50.0f64..50.0
        ) {
            let base = total_speed(u, v, w);
            // summation order differs, so allow one ulp-scale slack
            prop_assert!((base - total_speed(w, u, v)).abs() <= 1e-12 * base.max(1.0));
            prop_assert!((base - total_speed(-u, v, -w)).abs() <= 1e-12 * base.max(1.0));
        }

        #[test]
        fn dynamic_pressure_scales_quadratically(
            rho in 0.0f64..1500.0, v in 0.0f64..200.0, k in 0.0f64..8.0
        ) {
            let scaled = dynamic_pressure(rho, k * v);
            let reference = k * k * dynamic_pressure(rho, v);
            prop_assert!((scaled - reference).abs() <= 1e-9 * reference.max(1.0));
        }
    }
}
