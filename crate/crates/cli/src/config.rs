//! TOML run configuration. Every section is optional; unknown keys are
//! rejected. Physical inputs are in recoil units: energies and Ω in E_r,
//! times in ħ/E_r, lengths in 1/κ, momenta in κ. `kappa` and `mass` fix the
//! internal scale (ħ = 1).

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::Deserialize;

use tripod_soc::atomlight::{default_phases, LaserConfig, Vec2};
use tripod_soc::dynamics::{GridSpec, PacketParams};
use tripod_soc::gauge::regular_triangle_wavevectors;
use tripod_soc::units::RecoilUnits;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub scheme: SchemeConfig,
    pub spectrum: SpectrumConfig,
    pub gauge: GaugeConfig,
    pub bands: BandsConfig,
    pub grid: GridConfig,
    pub packet: PacketConfig,
    pub evolve: EvolveConfig,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SchemeConfig {
    /// Ω in E_r.
    pub omega: f64,
    pub kappa: f64,
    pub mass: f64,
    /// S_{j,p} in radians, rows j = 1..3.
    pub phases: Option<[[f64; 2]; 3]>,
    /// k_j in units of κ.
    pub wavevectors: Option<[[f64; 2]; 3]>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            omega: 20.0,
            kappa: 1.0,
            mass: 1.0,
            phases: None,
            wavevectors: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub samples: usize,
    /// Positions are drawn uniformly from [−extent, extent]² (1/κ).
    pub extent: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            extent: 20.0 * std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GaugeConfig {
    /// Differencing step in 1/κ.
    pub step: f64,
    /// Evaluation point in 1/κ.
    pub position: [f64; 2],
}

impl Default for GaugeConfig {
    fn default() -> Self {
        Self {
            step: 1e-4,
            position: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BandsConfig {
    /// Largest |k| sampled, in κ.
    pub k_max: f64,
    pub n_radial: usize,
    pub n_angle: usize,
    /// Drop the gauge fields: free-particle paraboloid.
    pub zero_coupling: bool,
}

impl Default for BandsConfig {
    fn default() -> Self {
        Self {
            k_max: 1.0,
            n_radial: 257,
            n_angle: 96,
            zero_coupling: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub points: [usize; 2],
    /// Box lengths in 1/κ.
    pub size: [f64; 2],
    /// Time step in ħ/E_r.
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points: [128, 128],
            size: [64.0, 64.0],
            dt: 0.01,
            steps: 500,
            stride: 10,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PacketConfig {
    /// In 1/κ.
    pub center: [f64; 2],
    /// rms radius in 1/κ.
    pub width: f64,
    /// Central momentum in κ.
    pub momentum: [f64; 2],
    /// Ground-doublet amplitudes as [re, im] pairs.
    pub spin: [[f64; 2]; 2],
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self {
            center: [0.0, 0.0],
            width: 4.0,
            momentum: [0.0, 0.0],
            spin: [[1.0, 0.0], [0.0, 0.0]],
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum EvolveMode {
    Reduced,
    Full,
    Adiabatic,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub mode: EvolveMode,
    /// Ω values in E_r for the adiabatic sweep.
    pub omegas: Vec<f64>,
    /// Bound on √3Ω·dt for full runs in the sweep.
    pub phase_budget: f64,
    /// Harmonic trap frequency in E_r/ħ (reduced mode only; 0 disables).
    pub trap_frequency: f64,
    /// Write the final field as a binary snapshot.
    pub snapshot: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            mode: EvolveMode::Reduced,
            omegas: vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            phase_budget: 0.2,
            trap_frequency: 0.0,
            snapshot: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn units(&self) -> RecoilUnits {
        RecoilUnits::new(self.scheme.kappa, self.scheme.mass)
    }

    /// Internal laser configuration.
    pub fn laser(&self) -> Result<LaserConfig> {
        let s = &self.scheme;
        let wavevectors = match s.wavevectors {
            Some(ks) => ks.map(|k| Vec2::new(k[0], k[1]) * s.kappa),
            None => regular_triangle_wavevectors(s.kappa)?,
        };
        let phases = s.phases.unwrap_or_else(default_phases);
        let units = RecoilUnits::new(s.kappa, s.mass);
        Ok(LaserConfig::new(
            s.omega * units.energy(),
            s.kappa,
            wavevectors,
            phases,
            s.mass,
        )?)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let g = &self.grid;
        let u = self.units();
        Ok(GridSpec::new(
            g.points[0],
            g.points[1],
            g.size[0] * u.length(),
            g.size[1] * u.length(),
            g.dt * u.time(),
            g.steps,
        )?
        .with_stride(g.stride)?)
    }

    pub fn packet(&self) -> PacketParams {
        let p = &self.packet;
        let u = self.units();
        PacketParams {
            center: Vec2::new(p.center[0], p.center[1]) * u.length(),
            width: p.width * u.length(),
            momentum: Vec2::new(p.momentum[0], p.momentum[1]) * u.momentum(),
            spin: p.spin.map(|c| Complex64::new(c[0], c[1])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_canonical_defaults() {
        let c = RunConfig::parse("").unwrap();
        let laser = c.laser().unwrap();
        assert_eq!(laser.omega, 10.0);
        assert!(laser.closure_residual() < 1e-15);
        assert_eq!(c.evolve.mode, EvolveMode::Reduced);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("omgea = 3").is_err());
        assert!(RunConfig::parse("[scheme]\nomgea = 3").is_err());
        assert!(RunConfig::parse("[evolve]\nmode = \"sideways\"").is_err());
    }

    #[test]
    fn recoil_units_converted_at_the_boundary() {
        let c = RunConfig::parse(
            "[scheme]\nomega = 4.0\nkappa = 2.0\nmass = 0.5\n[grid]\ndt = 0.5\nsize = [10.0, 20.0]\npoints = [16, 16]\n[packet]\nwidth = 3.0\nmomentum = [0.25, 0.0]",
        )
        .unwrap();
        // E_r = κ²/2m = 4, ħ/E_r = 0.25, 1/κ = 0.5.
        assert_eq!(c.laser().unwrap().omega, 16.0);
        let g = c.grid().unwrap();
        assert_eq!((g.dt, g.lx, g.ly), (0.125, 5.0, 10.0));
        let p = c.packet();
        assert_eq!((p.width, p.momentum.x), (1.5, 0.5));
    }

    #[test]
    fn wavevector_override_in_kappa_units() {
        let c = RunConfig::parse(
            "[scheme]\nkappa = 2.0\nwavevectors = [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]",
        )
        .unwrap();
        let l = c.laser().unwrap();
        assert_eq!(l.wavevectors[2], Vec2::new(-2.0, -2.0));
    }
}
