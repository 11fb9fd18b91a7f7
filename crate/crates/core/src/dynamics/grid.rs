use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::atomlight::Vec2;
use crate::error::{Error, Result};

/// Periodic simulation box and time stepping.
///
/// Positions are x_i = −L_x/2 + i·L_x/n_x; momenta follow the usual discrete
/// Fourier ordering (0, 1, …, n/2 − 1, −n/2, …, −1)·2π/L. Fields are stored
/// row-major with the y index contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Observables are recorded every `sample_stride` steps and at the end.
    pub sample_stride: usize,
}

pub const DEFAULT_SAMPLE_STRIDE: usize = 10;

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, dt: f64, n_steps: usize) -> Result<Self> {
        let g = Self {
            nx,
            ny,
            lx,
            ly,
            dt,
            n_steps,
            sample_stride: DEFAULT_SAMPLE_STRIDE,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_time(&self, dt: f64, n_steps: usize) -> Result<Self> {
        let mut g = self.clone();
        g.dt = dt;
        g.n_steps = n_steps;
        g.validate()?;
        Ok(g)
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        self.sample_stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} is not a power of two >= 2"
                )));
            }
        }
        for (name, v) in [("lx", self.lx), ("ly", self.ly)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGrid(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidGrid("sample_stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.lx + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -0.5 * self.ly + j as f64 * self.dy()
    }

    pub fn position(&self, idx: usize) -> Vec2 {
        Vec2::new(self.x(idx / self.ny), self.y(idx % self.ny))
    }

    pub fn kx(&self, i: usize) -> f64 {
        fft_freq(i, self.nx) * 2.0 * PI / self.lx
    }

    pub fn ky(&self, j: usize) -> f64 {
        fft_freq(j, self.ny) * 2.0 * PI / self.ly
    }

    pub fn momentum(&self, idx: usize) -> Vec2 {
        Vec2::new(self.kx(idx / self.ny), self.ky(idx % self.ny))
    }

    /// Nyquist momentum along the coarser axis.
    pub fn k_max(&self) -> f64 {
        (PI / self.dx()).min(PI / self.dy())
    }

    /// Same box and resolution (time stepping may differ).
    pub fn same_space(&self, other: &GridSpec) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

fn fft_freq(i: usize, n: usize) -> f64 {
    if i < n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// In-place 2D FFT on row-major `nx × ny` buffers.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    transposed: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
            transposed: vec![Complex64::new(0.0, 0.0); nx * ny],
        }
    }

    pub fn for_grid(grid: &GridSpec) -> Self {
        Self::new(grid.nx, grid.ny)
    }

    /// Unnormalised forward transform.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let (fx, fy) = (self.fwd_x.clone(), self.fwd_y.clone());
        self.run(data, &*fx, &*fy);
    }

    /// Inverse transform including the 1/(nx·ny) factor.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let (ix, iy) = (self.inv_x.clone(), self.inv_y.clone());
        self.run(data, &*ix, &*iy);
        let s = 1.0 / (self.nx * self.ny) as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    fn run(&mut self, data: &mut [Complex64], fx: &dyn Fft<f64>, fy: &dyn Fft<f64>) {
        let (nx, ny) = (self.nx, self.ny);
        assert_eq!(data.len(), nx * ny, "buffer does not match FFT size");
        process_rows(data, ny, fy);
        transpose(data, &mut self.transposed, nx, ny);
        process_rows(&mut self.transposed, nx, fx);
        transpose(&self.transposed, data, ny, nx);
    }
}

fn process_rows(data: &mut [Complex64], len: usize, fft: &dyn Fft<f64>) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(len).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

/// `src` is rows × cols; `dst` becomes cols × rows.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
}
