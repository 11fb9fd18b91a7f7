//! Geometric gauge potentials of the dressed ground doublet.
//!
//! The vector potential is A_{s,q} = i⟨s,+|∇|q,+⟩ and the scalar potential is
//! Φ_{s,q} = −(1/2m) Σ_X ⟨s,+|∇|X⟩·⟨X|∇|q,+⟩, where X runs over |1,−⟩, |2,−⟩
//! and |D⟩. Both are evaluated two ways: from closed forms that follow from
//! the plane-wave structure of the dressed states, and by central
//! differences of the analytic frame.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::atomlight::{dressed_frame, DressedFrame, Ket5, LaserConfig, Vec2, N_BARE};
use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;

/// Default central-difference step in units of 1/κ.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Smallest accepted step in units of 1/κ.
pub const MIN_STEP: f64 = 1e-12;

/// Matrix-valued vector potential (x and y components) and scalar potential.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFields {
    pub a_x: Mat2,
    pub a_y: Mat2,
    pub phi: Mat2,
}

impl GaugeFields {
    pub fn zero() -> Self {
        Self {
            a_x: Mat2::zeros(),
            a_y: Mat2::zeros(),
            phi: Mat2::zeros(),
        }
    }

    /// Largest entrywise modulus of the difference in A.
    pub fn max_vector_deviation(&self, other: &GaugeFields) -> f64 {
        max_abs(&(self.a_x - other.a_x)).max(max_abs(&(self.a_y - other.a_y)))
    }

    pub fn max_scalar_deviation(&self, other: &GaugeFields) -> f64 {
        max_abs(&(self.phi - other.phi))
    }

    /// Largest anti-Hermitian residual among A_x, A_y and Φ.
    pub fn hermiticity_residual(&self) -> f64 {
        [self.a_x, self.a_y, self.phi]
            .iter()
            .map(|m| max_abs(&(m - m.adjoint())))
            .fold(0.0, f64::max)
    }
}

pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn pauli_x() -> Mat2 {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    Mat2::new(o, l, l, o)
}

pub fn pauli_y() -> Mat2 {
    let (o, i) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
    Mat2::new(o, -i, i, o)
}

pub fn pauli_z() -> Mat2 {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    Mat2::new(l, o, o, -l)
}

fn hermitize(m: Mat2) -> Mat2 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// k_j = κ(cos(2π(j−2)/3), sin(2π(j−2)/3)).
pub fn regular_triangle_wavevectors(kappa: f64) -> Result<[Vec2; 3]> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidKappa(kappa));
    }
    Ok([1.0, 2.0, 3.0].map(|j: f64| {
        let theta = 2.0 * PI / 3.0 * (j - 2.0);
        Vec2::new(kappa * theta.cos(), kappa * theta.sin())
    }))
}

/// Phase factor e^{i(S_{j,s} − S_{j,q})}.
fn phase_factor(config: &LaserConfig, j: usize, s: usize, q: usize) -> Complex64 {
    Complex64::from_polar(1.0, config.phases[j][s] - config.phases[j][q])
}

/// A_{s,q} = (1/6) Σ_j k_j e^{i(S_{j,s} − S_{j,q})}. Independent of position.
pub fn vector_potential_analytic(config: &LaserConfig) -> [Mat2; 2] {
    let mut a = [Mat2::zeros(), Mat2::zeros()];
    for s in 0..2 {
        for q in 0..2 {
            for j in 0..N_BARE {
                let f = phase_factor(config, j, s, q) / 6.0;
                a[0][(s, q)] += f * config.wavevectors[j].x;
                a[1][(s, q)] += f * config.wavevectors[j].y;
            }
        }
    }
    a
}

/// Closed form of Φ from completeness of the dressed basis:
/// Φ = (1/2m)[(1/6) Σ_j |k_j|² e^{i(S_{j,s} − S_{j,q})} − A·A].
pub fn scalar_potential_analytic(config: &LaserConfig) -> Mat2 {
    let a = vector_potential_analytic(config);
    let mut grad_overlap = Mat2::zeros();
    for s in 0..2 {
        for q in 0..2 {
            for j in 0..N_BARE {
                grad_overlap[(s, q)] +=
                    phase_factor(config, j, s, q) * config.wavevectors[j].norm_squared() / 6.0;
            }
        }
    }
    let aa = a[0] * a[0] + a[1] * a[1];
    (grad_overlap - aa) / Complex64::new(2.0 * config.mass, 0.0)
}

pub fn gauge_fields_analytic(config: &LaserConfig) -> GaugeFields {
    let [a_x, a_y] = vector_potential_analytic(config);
    GaugeFields {
        a_x,
        a_y,
        phi: scalar_potential_analytic(config),
    }
}

/// Gauge fields of the regular triangle, (κ/4)(σ_x, σ_y) and (3κ²/16m)·I.
pub fn regular_triangle_fields(kappa: f64, mass: f64) -> GaugeFields {
    let q = Complex64::new(kappa / 4.0, 0.0);
    GaugeFields {
        a_x: pauli_x() * q,
        a_y: pauli_y() * q,
        phi: Mat2::identity() * Complex64::new(3.0 * kappa * kappa / (16.0 * mass), 0.0),
    }
}

fn check_step(config: &LaserConfig, h: f64) -> Result<()> {
    let floor = MIN_STEP / config.kappa;
    if !(h >= floor) {
        return Err(Error::StepTooSmall { step: h, floor });
    }
    Ok(())
}

/// Frames at r ± h e_x and r ± h e_y, in that order.
fn stencil(config: &LaserConfig, r: &Vec2, h: f64) -> Result<[DressedFrame; 4]> {
    let ex = Vec2::new(h, 0.0);
    let ey = Vec2::new(0.0, h);
    Ok([
        dressed_frame(config, &(r + ex))?,
        dressed_frame(config, &(r - ex))?,
        dressed_frame(config, &(r + ey))?,
        dressed_frame(config, &(r - ey))?,
    ])
}

/// Central-difference gradients (∂_x, ∂_y) of all five eigenvectors.
fn frame_gradients(st: &[DressedFrame; 4], h: f64) -> [[Ket5; 5]; 2] {
    let inv = Complex64::new(1.0 / (2.0 * h), 0.0);
    let d = |p: &DressedFrame, m: &DressedFrame| {
        let (vp, vm) = (p.eigenvectors(), m.eigenvectors());
        [0, 1, 2, 3, 4].map(|n| (vp[n] - vm[n]) * inv)
    };
    [d(&st[0], &st[1]), d(&st[2], &st[3])]
}

/// A_{s,q} = i⟨s,+|∇|q,+⟩ by central differences of the analytic frame,
/// Hermitian-symmetrised.
pub fn vector_potential_numeric(config: &LaserConfig, r: &Vec2, h: f64) -> Result<[Mat2; 2]> {
    check_step(config, h)?;
    let centre = dressed_frame(config, r)?;
    let grads = frame_gradients(&stencil(config, r, h)?, h);
    let i = Complex64::new(0.0, 1.0);
    Ok(grads.map(|g| {
        let mut a = Mat2::zeros();
        for s in 0..2 {
            for q in 0..2 {
                a[(s, q)] = i * centre.plus[s].dotc(&g[q]);
            }
        }
        hermitize(a)
    }))
}

/// Φ_{s,q} = −(1/2m) Σ_X ⟨s,+|∇|X⟩·⟨X|∇|q,+⟩ by central differences.
pub fn scalar_potential_numeric(config: &LaserConfig, r: &Vec2, h: f64) -> Result<Mat2> {
    check_step(config, h)?;
    let centre = dressed_frame(config, r)?;
    let vecs = centre.eigenvectors();
    let grads = frame_gradients(&stencil(config, r, h)?, h);
    let excluded = [2usize, 3, 4];
    let mut phi = Mat2::zeros();
    for g in &grads {
        for s in 0..2 {
            for q in 0..2 {
                for &x in &excluded {
                    phi[(s, q)] += vecs[s].dotc(&g[x]) * vecs[x].dotc(&g[q]);
                }
            }
        }
    }
    Ok(hermitize(
        phi * Complex64::new(-1.0 / (2.0 * config.mass), 0.0),
    ))
}

pub fn gauge_fields_numeric(config: &LaserConfig, r: &Vec2, h: f64) -> Result<GaugeFields> {
    let [a_x, a_y] = vector_potential_numeric(config, r, h)?;
    Ok(GaugeFields {
        a_x,
        a_y,
        phi: scalar_potential_numeric(config, r, h)?,
    })
}

/// Deviation of the numeric fields from the closed forms at steps h and h/2,
/// and the observed convergence order log2(err(h)/err(h/2)).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCheck {
    pub step: f64,
    pub vector_error: f64,
    pub vector_error_half: f64,
    pub scalar_error: f64,
    pub scalar_error_half: f64,
}

impl ConvergenceCheck {
    pub fn vector_order(&self) -> f64 {
        (self.vector_error / self.vector_error_half).log2()
    }

    pub fn scalar_order(&self) -> f64 {
        (self.scalar_error / self.scalar_error_half).log2()
    }
}

pub fn convergence_check(config: &LaserConfig, r: &Vec2, h: f64) -> Result<ConvergenceCheck> {
    let exact = gauge_fields_analytic(config);
    let coarse = gauge_fields_numeric(config, r, h)?;
    let fine = gauge_fields_numeric(config, r, h / 2.0)?;
    Ok(ConvergenceCheck {
        step: h,
        vector_error: coarse.max_vector_deviation(&exact),
        vector_error_half: fine.max_vector_deviation(&exact),
        scalar_error: coarse.max_scalar_deviation(&exact),
        scalar_error_half: fine.max_scalar_deviation(&exact),
    })
}

/// Swap the Cartesian roles of A (e_x ↔ e_y), turning the Dresselhaus form
/// into the Rashba form. Φ is unchanged.
pub fn rashba_relabel(fields: &GaugeFields) -> GaugeFields {
    GaugeFields {
        a_x: fields.a_y,
        a_y: fields.a_x,
        phi: fields.phi,
    }
}
