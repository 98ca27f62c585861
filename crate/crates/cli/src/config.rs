//! Run configuration. Every section and key is optional; missing values take
//! the standard parameter set.

use std::path::Path;

use adiacycle_core::optimizer::ObjectiveKind;
use adiacycle_core::units::UnitSystem;
use adiacycle_core::{BathParams, Curve, Drive};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub bath: BathSection,
    pub drive: DriveSection,
    pub units: UnitsSection,
    pub numerics: NumericsSection,
    pub coeffs: GridSection,
    pub optimize: OptimizeSection,
    pub scan: ScanSection,
    pub sector: SectorSection,
    pub profiles: ProfilesSection,
    pub figures: FiguresSection,
    pub curve: Option<Curve>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            bath: BathSection::default(),
            drive: DriveSection::default(),
            units: UnitsSection::default(),
            numerics: NumericsSection::default(),
            coeffs: GridSection::default(),
            optimize: OptimizeSection::default(),
            scan: ScanSection::default(),
            sector: SectorSection::default(),
            profiles: ProfilesSection::default(),
            figures: FiguresSection::default(),
            curve: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathSection {
    pub gamma_bar: f64,
    pub eps_cutoff: f64,
}

impl Default for BathSection {
    fn default() -> Self {
        let b = BathParams::default();
        Self { gamma_bar: b.gamma_bar, eps_cutoff: b.eps_cutoff }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    /// ΔT/T
    pub bias_ratio: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { bias_ratio: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitsSection {
    pub temperature_kelvin: f64,
}

impl Default for UnitsSection {
    fn default() -> Self {
        Self { temperature_kelvin: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsSection {
    /// Relative tolerance of the adaptive line integrals.
    pub tolerance: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self { tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub z_range: [f64; 2],
    pub x_range: [f64; 2],
    pub nz: usize,
    pub nx: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { z_range: [-3.0, 3.0], x_range: [-3.0, 3.0], nz: 60, nx: 60 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub center: [f64; 2],
    pub objective: ObjectiveKind,
    pub seeds: usize,
    pub max_iterations: usize,
    pub r_max: f64,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self { center: [1.0, 1.0], objective: ObjectiveKind::Power, seeds: 8, max_iterations: 500, r_max: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub objective: ObjectiveKind,
    pub z_range: [f64; 2],
    pub x_range: [f64; 2],
    pub nz: usize,
    pub nx: usize,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self { objective: ObjectiveKind::Power, z_range: [0.3, 3.0], x_range: [0.3, 3.0], nz: 10, nx: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorSection {
    pub radius_range: [f64; 2],
    pub n_radius: usize,
    /// Apertures are kπ/n_aperture for k = 1..=n_aperture.
    pub n_aperture: usize,
    /// Radii of the Ω = π/2 efficiency curve.
    pub efficiency_radii: Vec<f64>,
}

impl Default for SectorSection {
    fn default() -> Self {
        Self {
            radius_range: [0.5, 20.0],
            n_radius: 40,
            n_aperture: 64,
            efficiency_radii: vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfilesSection {
    pub points: usize,
}

impl Default for ProfilesSection {
    fn default() -> Self {
        Self { points: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiguresSection {
    /// Second coupling shown next to the configured one in the eigenvalue plot.
    pub gamma_bar_alt: f64,
    pub radial_points: usize,
    pub radial_range: [f64; 2],
    /// Couplings for the crossover-radius curve.
    pub coupling_range: [f64; 2],
    pub coupling_points: usize,
}

impl Default for FiguresSection {
    fn default() -> Self {
        Self {
            gamma_bar_alt: 0.05,
            radial_points: 200,
            radial_range: [0.01, 10.0],
            coupling_range: [0.01, 0.6],
            coupling_points: 60,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => Self::default(),
        };
        Ok(cfg)
    }

    pub fn bath(&self) -> Result<BathParams, CliError> {
        Ok(BathParams::new(self.bath.gamma_bar, self.bath.eps_cutoff)?)
    }

    pub fn drive(&self) -> Result<Drive, CliError> {
        Ok(Drive::engine(self.drive.bias_ratio)?)
    }

    pub fn units(&self) -> Result<UnitSystem, CliError> {
        Ok(UnitSystem::new(self.units.temperature_kelvin)?)
    }

    /// Echo for output headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("# unserializable config: {e}\n"))
    }
}

pub fn check_grid(name: &str, z: [f64; 2], x: [f64; 2], nz: usize, nx: usize) -> Result<(), CliError> {
    if nz == 0 || nx == 0 {
        return Err(CliError::Config(format!("[{name}] grid needs nz, nx ≥ 1")));
    }
    if z.iter().chain(x.iter()).any(|v| !v.is_finite()) || z[1] < z[0] || x[1] < x[0] {
        return Err(CliError::Config(format!("[{name}] ranges must be finite and increasing")));
    }
    Ok(())
}
