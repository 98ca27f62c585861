//! Natural units: energies in k_B·T, actions in ħ, times in ħ/(k_B·T).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380649e-23;
/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054571817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub temperature_kelvin: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { temperature_kelvin: 0.1 }
    }
}

impl UnitSystem {
    pub fn new(temperature_kelvin: f64) -> Result<Self> {
        if !(temperature_kelvin > 0.0 && temperature_kelvin.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {temperature_kelvin}"
            )));
        }
        Ok(Self { temperature_kelvin })
    }

    /// Seconds per natural time unit, ħ/(k_B T).
    pub fn time_unit(&self) -> f64 {
        HBAR / (K_B * self.temperature_kelvin)
    }

    /// Watts per natural power unit, (k_B T)²/ħ.
    pub fn power_unit(&self) -> f64 {
        let e = K_B * self.temperature_kelvin;
        e * e / HBAR
    }

    /// Joules per natural energy unit.
    pub fn energy_unit(&self) -> f64 {
        K_B * self.temperature_kelvin
    }
}

pub fn time_to_si(t_natural: f64, units: &UnitSystem) -> f64 {
    t_natural * units.time_unit()
}

pub fn power_to_si(p_natural: f64, units: &UnitSystem) -> f64 {
    p_natural * units.power_unit()
}

pub fn energy_to_si(e_natural: f64, units: &UnitSystem) -> f64 {
    e_natural * units.energy_unit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_time_at_100mk() {
        let u = UnitSystem::default();
        assert!((time_to_si(1.0, &u) / 7.638e-11 - 1.0).abs() < 1e-3);
        assert_eq!(time_to_si(0.0, &UnitSystem::new(3.0).unwrap()), 0.0);
    }

    #[test]
    fn unit_power_at_100mk() {
        let u = UnitSystem::default();
        assert!((power_to_si(1.0, &u) / 1.808e-14 - 1.0).abs() < 1e-3);
        assert_eq!(power_to_si(0.0, &u), 0.0);
    }

    #[test]
    fn published_engine_estimates() {
        let u = UnitSystem::default();
        let t = time_to_si(639.0, &u);
        assert!((t / 48.8e-9 - 1.0).abs() < 0.01);
        let p = 0.25 * 0.05f64.powi(2) * (0.233 / 7.71);
        assert!((power_to_si(p, &u) / 0.341e-18 - 1.0).abs() < 0.01);
    }

    #[test]
    fn round_trip() {
        let u = UnitSystem::new(0.37).unwrap();
        for &x in &[1e-6, 0.3, 17.0, 4.2e5] {
            assert!((time_to_si(x, &u) / u.time_unit() / x - 1.0).abs() < 1e-12);
            assert!((power_to_si(x, &u) / u.power_unit() / x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_temperature() {
        assert!(UnitSystem::new(0.0).is_err());
        assert!(UnitSystem::new(-1.0).is_err());
    }
}
