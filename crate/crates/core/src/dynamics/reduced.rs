//! Split-step propagation of the two-component Hamiltonian
//! H = (p − A)²/2m + Φ + V.
//!
//! A and Φ are constant, so the kinetic-plus-gauge factor is applied exactly
//! in momentum space as a 2×2 unitary per k. The Φ + V factor is applied in
//! position space. Strang ordering: half position step, full momentum step,
//! half position step.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::atomlight::Vec2;
use crate::bands::{hermitian2_eigenvalues, EffectiveHamiltonianSpec, ExternalPotential};
use crate::dynamics::field::{check_shape, SpinorField};
use crate::dynamics::grid::{Fft2, GridSpec};
use crate::dynamics::report::{EvolutionReport, Representation, Sample};
use crate::error::{Error, Result};
use crate::gauge::Mat2;

/// exp(−i H t) for a 2×2 Hermitian H.
pub fn expm_hermitian2(h: &Mat2, t: f64) -> Mat2 {
    let mean = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let traceless = h - Mat2::identity() * Complex64::new(mean, 0.0);
    let [lo, hi] = hermitian2_eigenvalues(h);
    let r = 0.5 * (hi - lo);
    let phase = Complex64::from_polar(1.0, -mean * t);
    let (c, s) = ((r * t).cos(), (r * t).sin());
    let rot = if r > 0.0 {
        Mat2::identity() * Complex64::new(c, 0.0) - traceless * Complex64::new(0.0, s / r)
    } else {
        Mat2::identity()
    };
    rot * phase
}

/// V sampled on the grid.
pub fn sample_potential(spec: &EffectiveHamiltonianSpec, grid: &GridSpec) -> Result<Array2<f64>> {
    match &spec.external_potential {
        None => Ok(Array2::zeros((grid.nx, grid.ny))),
        Some(ExternalPotential::Harmonic { frequency }) => {
            let k = 0.5 * spec.mass * frequency * frequency;
            Ok(Array2::from_shape_fn((grid.nx, grid.ny), |(i, j)| {
                k * (grid.x(i).powi(2) + grid.y(j).powi(2))
            }))
        }
        Some(ExternalPotential::Sampled(v)) => {
            if v.shape() != [grid.nx, grid.ny] {
                return Err(Error::ShapeMismatch(
                    "sampled potential does not match grid".into(),
                ));
            }
            Ok(v.clone())
        }
    }
}

fn spectral_radius(h: &Mat2) -> f64 {
    let [a, b] = hermitian2_eigenvalues(h);
    a.abs().max(b.abs())
}

/// Precomputed factors for one (spec, grid, dt) combination.
pub struct ReducedPropagator {
    grid: GridSpec,
    spec: EffectiveHamiltonianSpec,
    potential: Array2<f64>,
    /// exp(−i (k − A)²/2m dt) per momentum.
    kinetic: Vec<Mat2>,
    /// exp(−i Φ dt/2).
    phi_half: Mat2,
    /// exp(−i V dt/2) per position.
    v_half: Vec<Complex64>,
    fft: Fft2,
}

impl ReducedPropagator {
    pub fn new(spec: &EffectiveHamiltonianSpec, grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let dt = grid.dt;
        let potential = sample_potential(spec, grid)?;
        let blocks: Vec<Mat2> = (0..grid.len())
            .into_par_iter()
            .map(|idx| spec.kinetic_block(&grid.momentum(idx)))
            .collect();

        let max_kin = blocks
            .iter()
            .map(|b| spectral_radius(&(b + spec.fields.phi)))
            .fold(0.0, f64::max);
        let max_v = potential.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let limit = std::f64::consts::PI / (max_kin + max_v);
        if dt > limit {
            return Err(Error::UnstableStep { dt, limit });
        }

        let kinetic = blocks.par_iter().map(|b| expm_hermitian2(b, dt)).collect();
        let v_half = potential
            .iter()
            .map(|v| Complex64::from_polar(1.0, -v * dt / 2.0))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            spec: spec.clone(),
            potential,
            kinetic,
            phi_half: expm_hermitian2(&spec.fields.phi, dt / 2.0),
            v_half,
            fft: Fft2::for_grid(grid),
        })
    }

    fn position_half_step(&self, up: &mut [Complex64], down: &mut [Complex64]) {
        let m = self.phi_half;
        up.par_iter_mut()
            .zip(down.par_iter_mut())
            .zip(self.v_half.par_iter())
            .for_each(|((a, b), ph)| {
                let (x, y) = (*a, *b);
                *a = (m[(0, 0)] * x + m[(0, 1)] * y) * ph;
                *b = (m[(1, 0)] * x + m[(1, 1)] * y) * ph;
            });
    }

    fn momentum_step(&mut self, up: &mut [Complex64], down: &mut [Complex64]) {
        self.fft.forward(up);
        self.fft.forward(down);
        up.par_iter_mut()
            .zip(down.par_iter_mut())
            .zip(self.kinetic.par_iter())
            .for_each(|((a, b), m)| {
                let (x, y) = (*a, *b);
                *a = m[(0, 0)] * x + m[(0, 1)] * y;
                *b = m[(1, 0)] * x + m[(1, 1)] * y;
            });
        self.fft.inverse(up);
        self.fft.inverse(down);
    }

    /// One Strang step in place.
    pub fn step(&mut self, field: &mut SpinorField) {
        let mut comps = field.psi.axis_iter_mut(Axis(0));
        let mut up = comps.next().expect("two components");
        let mut down = comps.next().expect("two components");
        let up = up.as_slice_mut().expect("standard layout");
        let down = down.as_slice_mut().expect("standard layout");
        self.position_half_step(up, down);
        self.momentum_step(up, down);
        self.position_half_step(up, down);
    }

    /// Observables of the current state.
    pub fn observe(&mut self, field: &SpinorField, time: f64) -> Sample {
        let g = &self.grid;
        let area = g.cell_area();
        let (mut n1, mut n2) = (0.0, 0.0);
        let mut pos = Vec2::zeros();
        let mut e_pot = 0.0;
        let phi = self.spec.fields.phi;
        for i in 0..g.nx {
            let x = g.x(i);
            let (mut r1, mut r2, mut ry, mut rv) = (0.0, 0.0, 0.0, 0.0);
            for j in 0..g.ny {
                let a = field.psi[[0, i, j]];
                let b = field.psi[[1, i, j]];
                let d = a.norm_sqr() + b.norm_sqr();
                r1 += a.norm_sqr();
                r2 += b.norm_sqr();
                ry += d * g.y(j);
                let pa = phi[(0, 0)] * a + phi[(0, 1)] * b;
                let pb = phi[(1, 0)] * a + phi[(1, 1)] * b;
                rv += d * self.potential[[i, j]] + (a.conj() * pa + b.conj() * pb).re;
            }
            n1 += r1;
            n2 += r2;
            pos.x += (r1 + r2) * x;
            pos.y += ry;
            e_pot += rv;
        }
        let norm = (n1 + n2) * area;
        let mean_position = pos * area / norm;

        let k = field.momentum_space();
        let mut e_kin = 0.0;
        for idx in 0..g.len() {
            let (i, j) = (idx / g.ny, idx % g.ny);
            let (a, b) = (k[[0, i, j]], k[[1, i, j]]);
            let h = self.spec.kinetic_block(&g.momentum(idx));
            let ha = h[(0, 0)] * a + h[(0, 1)] * b;
            let hb = h[(1, 0)] * a + h[(1, 1)] * b;
            e_kin += (a.conj() * ha + b.conj() * hb).re;
        }
        e_kin *= area / g.len() as f64;

        Sample {
            time,
            mean_position,
            norm,
            populations: vec![n1 * area, n2 * area],
            spin: Some(field.spin()),
            fidelity: None,
            energy: e_kin + e_pot * area,
        }
    }
}

/// Propagate `initial` for `grid.n_steps` steps of `grid.dt`. Returns the
/// sampled observables and the final state.
pub fn evolve_reduced(
    spec: &EffectiveHamiltonianSpec,
    initial: &SpinorField,
    grid: &GridSpec,
) -> Result<(EvolutionReport, SpinorField)> {
    check_shape(&initial.psi, 2, grid)?;
    if !initial.grid.same_space(grid) {
        return Err(Error::ShapeMismatch(
            "initial field lives on a different box".into(),
        ));
    }
    let mut prop = ReducedPropagator::new(spec, grid)?;
    let mut field = SpinorField {
        psi: initial.psi.as_standard_layout().into_owned(),
        grid: grid.clone(),
    };
    let mut samples = vec![prop.observe(&field, 0.0)];
    for n in 1..=grid.n_steps {
        prop.step(&mut field);
        if n % grid.sample_stride == 0 || n == grid.n_steps {
            samples.push(prop.observe(&field, n as f64 * grid.dt));
        }
    }
    Ok((
        EvolutionReport {
            representation: Representation::Reduced,
            samples,
        },
        field,
    ))
}
