//! Split-step propagation of the five-level Hamiltonian p²/2m + H₀(r) in the
//! bare basis.
//!
//! The kinetic factor is a scalar phase per momentum, applied to all five
//! components. The coupling factor exp(−i H₀(r) dt/2) is applied exactly at
//! every grid point from the closed-form dressed frame. Strang ordering:
//! half coupling, full kinetic, half coupling; consecutive half coupling steps
//! are fused when no sample is taken in between.

use ndarray::Axis;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::atomlight::{LaserConfig, Vec2};
use crate::dynamics::field::{check_shape, FullField};
use crate::dynamics::frames::FrameGrid;
use crate::dynamics::grid::{Fft2, GridSpec};
use crate::dynamics::report::{EvolutionReport, Representation, Sample};
use crate::error::{Error, Result};

/// Points per shortest laser wavelength required by the full evolver.
pub const POINTS_PER_WAVELENGTH: f64 = 8.0;

pub struct FullPropagator {
    grid: GridSpec,
    mass: f64,
    frames: FrameGrid,
    kinetic: Vec<Complex64>,
    half: [(f64, f64); 2],
    whole: [(f64, f64); 2],
    fft: Fft2,
}

impl FullPropagator {
    pub fn new(config: &LaserConfig, grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        if config.omega == 0.0 {
            return Err(Error::DegenerateCoupling);
        }
        let kmax = config.max_wavenumber();
        if kmax > 0.0 {
            let dx_max = 2.0 * std::f64::consts::PI / kmax / POINTS_PER_WAVELENGTH;
            if grid.dx() > dx_max || grid.dy() > dx_max {
                return Err(Error::InvalidGrid(format!(
                    "spacing ({:.3e}, {:.3e}) does not resolve the laser wavelength (need <= {dx_max:.3e})",
                    grid.dx(),
                    grid.dy()
                )));
            }
        }
        let frames = FrameGrid::new(config, grid)?;
        let dt = grid.dt;
        let inv2m = 1.0 / (2.0 * config.mass);
        let max_kin = (0..grid.len())
            .map(|idx| grid.momentum(idx).norm_squared() * inv2m)
            .fold(0.0, f64::max);
        let max_coupling = frames.totals[0].max(frames.totals[1]);
        let limit = std::f64::consts::PI / (max_kin + max_coupling);
        if dt > limit {
            return Err(Error::UnstableStep { dt, limit });
        }
        let kinetic = (0..grid.len())
            .map(|idx| Complex64::from_polar(1.0, -grid.momentum(idx).norm_squared() * inv2m * dt))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            mass: config.mass,
            half: frames.trig(dt / 2.0),
            whole: frames.trig(dt),
            frames,
            kinetic,
            fft: Fft2::for_grid(grid),
        })
    }

    pub fn frames(&self) -> &FrameGrid {
        &self.frames
    }

    fn coupling(&self, field: &mut FullField, trig: &[(f64, f64); 2]) {
        let mut slices: Vec<&mut [Complex64]> = field
            .psi
            .axis_iter_mut(Axis(0))
            .map(|c| c.into_slice().expect("standard layout"))
            .collect();
        let [c0, c1, c2, c3, c4] = &mut slices[..] else {
            unreachable!("five components")
        };
        let frames = &self.frames;
        c0.par_iter_mut()
            .zip(c1.par_iter_mut())
            .zip(c2.par_iter_mut())
            .zip(c3.par_iter_mut())
            .zip(c4.par_iter_mut())
            .enumerate()
            .for_each(|(idx, ((((a, b), c), d), e))| {
                let mut v = [*a, *b, *c, *d, *e];
                frames.propagate(idx, &mut v, trig);
                (*a, *b, *c, *d, *e) = (v[0], v[1], v[2], v[3], v[4]);
            });
    }

    fn kinetic(&mut self, field: &mut FullField) {
        for mut comp in field.psi.axis_iter_mut(Axis(0)) {
            let s = comp.as_slice_mut().expect("standard layout");
            self.fft.forward(s);
            s.par_iter_mut()
                .zip(self.kinetic.par_iter())
                .for_each(|(z, k)| *z *= k);
            self.fft.inverse(s);
        }
    }

    /// Advance `n` Strang steps, fusing interior half coupling steps.
    pub fn advance(&mut self, field: &mut FullField, n: usize) {
        if n == 0 {
            return;
        }
        let (half, whole) = (self.half, self.whole);
        self.coupling(field, &half);
        for i in 0..n {
            self.kinetic(field);
            let trig = if i + 1 == n { half } else { whole };
            self.coupling(field, &trig);
        }
    }

    pub fn observe(&mut self, field: &FullField, time: f64) -> Sample {
        let g = &self.grid;
        let area = g.cell_area();
        let pops = field.dressed_populations(&self.frames);
        let mut pos = Vec2::zeros();
        let mut density_total = 0.0;
        for i in 0..g.nx {
            let x = g.x(i);
            let (mut row, mut ry) = (0.0, 0.0);
            for j in 0..g.ny {
                let d: f64 = (0..5).map(|c| field.psi[[c, i, j]].norm_sqr()).sum();
                row += d;
                ry += d * g.y(j);
            }
            density_total += row;
            pos.x += row * x;
            pos.y += ry;
        }
        let norm = density_total * area;
        let mean_position = pos * area / norm;

        let inv2m = 1.0 / (2.0 * self.mass);
        let mut e_kin = 0.0;
        let mut fft = Fft2::for_grid(g);
        for comp in field.psi.outer_iter() {
            let mut buf = comp.to_owned().into_raw_vec_and_offset().0;
            fft.forward(&mut buf);
            e_kin += buf
                .iter()
                .enumerate()
                .map(|(idx, z)| z.norm_sqr() * g.momentum(idx).norm_squared())
                .sum::<f64>();
        }
        e_kin *= inv2m * area / g.len() as f64;
        let [o1, o2] = self.frames.totals;
        let e_coupling = -o1 * pops[0] - o2 * pops[1] + o1 * pops[3] + o2 * pops[4];

        Sample {
            time,
            mean_position,
            norm,
            populations: pops.to_vec(),
            spin: None,
            fidelity: Some((pops[0] + pops[1]) / norm),
            energy: e_kin + e_coupling,
        }
    }
}

/// Propagate the five-level state for `grid.n_steps` steps of `grid.dt`.
pub fn evolve_full(
    config: &LaserConfig,
    initial: &FullField,
    grid: &GridSpec,
) -> Result<(EvolutionReport, FullField)> {
    check_shape(&initial.psi, 5, grid)?;
    if !initial.grid.same_space(grid) {
        return Err(Error::ShapeMismatch(
            "initial field lives on a different box".into(),
        ));
    }
    let mut prop = FullPropagator::new(config, grid)?;
    let mut field = FullField {
        psi: initial.psi.as_standard_layout().into_owned(),
        grid: grid.clone(),
    };
    let mut samples = vec![prop.observe(&field, 0.0)];
    let mut done = 0;
    while done < grid.n_steps {
        let chunk = (grid.sample_stride - done % grid.sample_stride).min(grid.n_steps - done);
        prop.advance(&mut field, chunk);
        done += chunk;
        samples.push(prop.observe(&field, done as f64 * grid.dt));
    }
    Ok((
        EvolutionReport {
            representation: Representation::Full,
            samples,
        },
        field,
    ))
}
