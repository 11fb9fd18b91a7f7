//! Effective spin-1/2 Hamiltonian of the ground doublet and its dispersion.
//!
//! With no external potential the reduced Hamiltonian
//! H = (p − A)²/2m + Φ is diagonal in momentum, and each k gives a 2×2
//! Hermitian block. For the regular triangle the lower band has a ring of
//! minima at |k| = κ/4.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::atomlight::{LaserConfig, Vec2};
use crate::error::{Error, Result};
use crate::gauge::{gauge_fields_analytic, GaugeFields, Mat2};

/// The finest radial spacing accepted by [`dispersion`], as a fraction of κ.
pub const MAX_RADIAL_SPACING: f64 = 1.0 / 128.0;

/// External scalar potential V(r).
#[derive(Debug, Clone, PartialEq)]
pub enum ExternalPotential {
    /// V = ½ m ω_t² |r|².
    Harmonic { frequency: f64 },
    /// Values on the simulation grid, indexed `[ix, iy]`.
    Sampled(Array2<f64>),
}

/// Inputs to the reduced Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonianSpec {
    pub fields: GaugeFields,
    pub mass: f64,
    /// Momentum scale used for grid-resolution checks.
    pub kappa: f64,
    pub external_potential: Option<ExternalPotential>,
}

impl EffectiveHamiltonianSpec {
    /// Closed-form fields of a laser configuration, no external potential.
    pub fn from_config(config: &LaserConfig) -> Self {
        Self {
            fields: gauge_fields_analytic(config),
            mass: config.mass,
            kappa: config.kappa,
            external_potential: None,
        }
    }

    pub fn free(kappa: f64, mass: f64) -> Self {
        Self {
            fields: GaugeFields::zero(),
            mass,
            kappa,
            external_potential: None,
        }
    }

    pub fn with_potential(mut self, v: ExternalPotential) -> Self {
        self.external_potential = Some(v);
        self
    }

    pub fn with_fields(mut self, fields: GaugeFields) -> Self {
        self.fields = fields;
        self
    }

    /// (k − A)²/2m as a 2×2 matrix, without Φ.
    pub fn kinetic_block(&self, k: &Vec2) -> Mat2 {
        let id = Mat2::identity();
        let px = id * Complex64::new(k.x, 0.0) - self.fields.a_x;
        let py = id * Complex64::new(k.y, 0.0) - self.fields.a_y;
        (px * px + py * py) / Complex64::new(2.0 * self.mass, 0.0)
    }
}

/// H(k) = (k·I − A)·(k·I − A)/2m + Φ.
pub fn bloch_hamiltonian(spec: &EffectiveHamiltonianSpec, k: &Vec2) -> Result<Mat2> {
    if spec.external_potential.is_some() {
        return Err(Error::PotentialPresent);
    }
    Ok(spec.kinetic_block(k) + spec.fields.phi)
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn hermitian2_eigenvalues(h: &Mat2) -> [f64; 2] {
    let mean = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let half_diff = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let off = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    let r = half_diff.hypot(off.norm());
    [mean - r, mean + r]
}

/// Closed-form bands of the regular triangle:
/// E_∓(k) = (k² ∓ κ|k|/2 + κ²/8)/2m + 3κ²/16m.
pub fn regular_triangle_bands(kappa: f64, mass: f64, k: &Vec2) -> [f64; 2] {
    let kn = k.norm();
    let offset = 3.0 * kappa * kappa / (16.0 * mass);
    let base = kn * kn + kappa * kappa / 8.0;
    let split = kappa * kn / 2.0;
    [
        (base - split) / (2.0 * mass) + offset,
        (base + split) / (2.0 * mass) + offset,
    ]
}

/// Momentum sample points together with their radial resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrid {
    pub points: Vec<Vec2>,
    pub radial_spacing: f64,
}

impl KGrid {
    /// Origin plus `n_radial − 1` rings of `n_angle` points out to `k_max`.
    pub fn polar(k_max: f64, n_radial: usize, n_angle: usize) -> Self {
        let n_radial = n_radial.max(2);
        let n_angle = n_angle.max(1);
        let dk = k_max / (n_radial - 1) as f64;
        let mut points = vec![Vec2::zeros()];
        for i in 1..n_radial {
            let kr = i as f64 * dk;
            for a in 0..n_angle {
                let th = 2.0 * PI * a as f64 / n_angle as f64;
                points.push(Vec2::new(kr * th.cos(), kr * th.sin()));
            }
        }
        Self {
            points,
            radial_spacing: dk,
        }
    }

    /// Square n×n grid on [−k_max, k_max]².
    pub fn cartesian(k_max: f64, n: usize) -> Self {
        let n = n.max(2);
        let dk = 2.0 * k_max / (n - 1) as f64;
        let points = (0..n)
            .flat_map(|i| {
                (0..n).map(move |j| Vec2::new(-k_max + i as f64 * dk, -k_max + j as f64 * dk))
            })
            .collect();
        Self {
            points,
            radial_spacing: dk,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionResult {
    pub k_grid: Vec<Vec2>,
    pub lower_band: Vec<f64>,
    pub upper_band: Vec<f64>,
    /// |k| of the lower-band minimum after radial parabolic refinement.
    pub ring_radius: f64,
    pub min_energy: f64,
    /// E_+ − E_− at the refined minimum.
    pub gap_at_ring: f64,
    pub radial_spacing: f64,
}

pub fn dispersion(spec: &EffectiveHamiltonianSpec, grid: &KGrid) -> Result<DispersionResult> {
    if spec.external_potential.is_some() {
        return Err(Error::PotentialPresent);
    }
    let limit = spec.kappa * MAX_RADIAL_SPACING;
    if !(grid.radial_spacing <= limit) {
        return Err(Error::GridTooCoarse {
            spacing: grid.radial_spacing,
            limit,
        });
    }
    if grid.points.is_empty() {
        return Err(Error::InvalidGrid("empty k grid".into()));
    }

    let bands_at = |k: &Vec2| hermitian2_eigenvalues(&(spec.kinetic_block(k) + spec.fields.phi));
    let bands: Vec<[f64; 2]> = grid.points.par_iter().map(bands_at).collect();

    let (imin, _) = bands
        .iter()
        .enumerate()
        .min_by(|a, b| a.1[0].total_cmp(&b.1[0]))
        .expect("non-empty grid");
    let kmin = grid.points[imin];
    let t0 = kmin.norm();
    let dir = if t0 > 0.0 {
        kmin / t0
    } else {
        Vec2::new(1.0, 0.0)
    };
    let lower = |t: f64| bands_at(&(dir * t))[0];
    let dk = grid.radial_spacing;
    let (fm, f0, fp) = (lower(t0 - dk), lower(t0), lower(t0 + dk));
    let curvature = fm - 2.0 * f0 + fp;
    let t_star = if curvature > 0.0 {
        t0 + 0.5 * dk * (fm - fp) / curvature
    } else {
        t0
    };
    let at_ring = bands_at(&(dir * t_star));

    Ok(DispersionResult {
        k_grid: grid.points.clone(),
        lower_band: bands.iter().map(|b| b[0]).collect(),
        upper_band: bands.iter().map(|b| b[1]).collect(),
        ring_radius: t_star.abs(),
        min_energy: at_ring[0],
        gap_at_ring: at_ring[1] - at_ring[0],
        radial_spacing: dk,
    })
}
