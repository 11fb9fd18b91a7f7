use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;

use crate::atomlight::{DressedLevel, LaserConfig, Vec2};
use crate::dynamics::frames::FrameGrid;
use crate::dynamics::grid::{Fft2, GridSpec};
use crate::error::{Error, Result};

/// Largest accepted density (relative to the peak) at the box boundary.
pub const BOUNDARY_TAIL_TOL: f64 = 1e-12;

/// Two-component wavefunction on the dressed ground doublet,
/// shape `(2, nx, ny)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub psi: Array3<Complex64>,
    pub grid: GridSpec,
}

/// Five-component wavefunction in the bare basis (|1⟩, |2⟩, |3⟩, |e_1⟩, |e_2⟩),
/// shape `(5, nx, ny)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullField {
    pub psi: Array3<Complex64>,
    pub grid: GridSpec,
}

pub(crate) fn check_shape(psi: &Array3<Complex64>, n: usize, grid: &GridSpec) -> Result<()> {
    let want = [n, grid.nx, grid.ny];
    if psi.shape() != want {
        return Err(Error::ShapeMismatch(format!(
            "field shape {:?} does not match {:?}",
            psi.shape(),
            want
        )));
    }
    Ok(())
}

/// Σ|ψ|²·dx·dy.
pub fn norm_of(psi: &Array3<Complex64>, grid: &GridSpec) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_area()
}

/// Σ ψ_a* ψ_b·dx·dy.
pub fn inner_of(a: &Array3<Complex64>, b: &Array3<Complex64>, grid: &GridSpec) -> Complex64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        * grid.cell_area()
}

/// L2 distance between two fields.
pub fn distance_of(a: &Array3<Complex64>, b: &Array3<Complex64>, grid: &GridSpec) -> f64 {
    (a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        * grid.cell_area())
    .sqrt()
}

impl SpinorField {
    pub fn new(psi: Array3<Complex64>, grid: GridSpec) -> Result<Self> {
        check_shape(&psi, 2, &grid)?;
        Ok(Self { psi, grid })
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.psi, &self.grid)
    }

    pub fn inner(&self, other: &SpinorField) -> Complex64 {
        inner_of(&self.psi, &other.psi, &self.grid)
    }

    /// ⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩ normalised by the norm.
    pub fn spin(&self) -> [f64; 3] {
        let (u, d) = (
            self.psi.index_axis(Axis(0), 0),
            self.psi.index_axis(Axis(0), 1),
        );
        let mut acc = [0.0; 4];
        for (a, b) in u.iter().zip(d.iter()) {
            let ud = a.conj() * b;
            acc[0] += 2.0 * ud.re;
            acc[1] += 2.0 * ud.im;
            acc[2] += a.norm_sqr() - b.norm_sqr();
            acc[3] += a.norm_sqr() + b.norm_sqr();
        }
        [acc[0] / acc[3], acc[1] / acc[3], acc[2] / acc[3]]
    }

    /// Momentum-space amplitudes (unnormalised forward FFT of each component).
    pub fn momentum_space(&self) -> Array3<Complex64> {
        let mut out = self.psi.as_standard_layout().into_owned();
        let mut fft = Fft2::for_grid(&self.grid);
        for mut c in out.outer_iter_mut() {
            fft.forward(c.as_slice_mut().expect("standard layout"));
        }
        out
    }
}

impl FullField {
    pub fn new(psi: Array3<Complex64>, grid: GridSpec) -> Result<Self> {
        check_shape(&psi, 5, &grid)?;
        Ok(Self { psi, grid })
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.psi, &self.grid)
    }

    pub fn inner(&self, other: &FullField) -> Complex64 {
        inner_of(&self.psi, &other.psi, &self.grid)
    }

    /// Σ_q Ψ_q(r) |q,+,r⟩.
    pub fn from_spinor(config: &LaserConfig, spinor: &SpinorField) -> Result<Self> {
        let frames = FrameGrid::new(config, &spinor.grid)?;
        Ok(Self::from_spinor_with(&frames, spinor))
    }

    pub fn from_spinor_with(frames: &FrameGrid, spinor: &SpinorField) -> Self {
        let grid = &spinor.grid;
        let zero = Complex64::new(0.0, 0.0);
        let mut psi = Array3::zeros((5, grid.nx, grid.ny));
        let (s1, s2) = (
            spinor.psi.index_axis(Axis(0), 0),
            spinor.psi.index_axis(Axis(0), 1),
        );
        for idx in 0..grid.len() {
            let (i, j) = (idx / grid.ny, idx % grid.ny);
            let v = frames.compose(idx, &[s1[[i, j]], s2[[i, j]], zero, zero, zero]);
            for c in 0..5 {
                psi[[c, i, j]] = v[c];
            }
        }
        Self {
            psi,
            grid: grid.clone(),
        }
    }

    /// envelope(r)·|level, r⟩.
    pub fn from_level(
        config: &LaserConfig,
        grid: &GridSpec,
        envelope: &Array2<Complex64>,
        level: DressedLevel,
    ) -> Result<Self> {
        if envelope.shape() != [grid.nx, grid.ny] {
            return Err(Error::ShapeMismatch("envelope does not match grid".into()));
        }
        let frames = FrameGrid::new(config, grid)?;
        let mut psi = Array3::zeros((5, grid.nx, grid.ny));
        for idx in 0..grid.len() {
            let (i, j) = (idx / grid.ny, idx % grid.ny);
            let mut amps = [Complex64::new(0.0, 0.0); 5];
            amps[level as usize] = envelope[[i, j]];
            let v = frames.compose(idx, &amps);
            for c in 0..5 {
                psi[[c, i, j]] = v[c];
            }
        }
        Ok(Self {
            psi,
            grid: grid.clone(),
        })
    }

    /// Ψ_q(r) = ⟨q,+,r|ψ(r)⟩.
    pub fn project_ground(&self, frames: &FrameGrid) -> SpinorField {
        let g = &self.grid;
        let mut psi = Array3::zeros((2, g.nx, g.ny));
        for idx in 0..g.len() {
            let (i, j) = (idx / g.ny, idx % g.ny);
            let v: [Complex64; 5] = std::array::from_fn(|c| self.psi[[c, i, j]]);
            let a = frames.project(idx, &v);
            psi[[0, i, j]] = a[0];
            psi[[1, i, j]] = a[1];
        }
        SpinorField {
            psi,
            grid: g.clone(),
        }
    }

    /// Integrated populations of (|1,+⟩, |2,+⟩, |D⟩, |1,−⟩, |2,−⟩).
    pub fn dressed_populations(&self, frames: &FrameGrid) -> [f64; 5] {
        let g = &self.grid;
        let comps: Vec<&[Complex64]> = self
            .psi
            .outer_iter()
            .map(|c| c.to_slice().expect("standard layout"))
            .collect();
        let mut pops = [0.0; 5];
        for idx in 0..g.len() {
            let v: [Complex64; 5] = std::array::from_fn(|c| comps[c][idx]);
            let a = frames.project(idx, &v);
            for n in 0..5 {
                pops[n] += a[n].norm_sqr();
            }
        }
        pops.map(|p| p * g.cell_area())
    }
}

/// Wavepacket parameters. `width` is the rms radius w of the density:
/// ψ ∝ exp(−|r − r₀|²/2w²), so the rms momentum spread about k₀ is 1/w.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketParams {
    pub center: Vec2,
    pub width: f64,
    pub momentum: Vec2,
    pub spin: [Complex64; 2],
}

/// Normalised scalar Gaussian envelope times a plane wave.
pub fn gaussian_envelope(
    grid: &GridSpec,
    center: &Vec2,
    width: f64,
    momentum: &Vec2,
) -> Result<Array2<Complex64>> {
    let min = 4.0 * grid.dx().max(grid.dy());
    if !(width >= min) {
        return Err(Error::PacketTooNarrow { width, min });
    }
    let edge = (0.5 * grid.lx - center.x.abs()).min(0.5 * grid.ly - center.y.abs());
    let tail = if edge <= 0.0 {
        1.0
    } else {
        (-(edge * edge) / (width * width)).exp()
    };
    if tail > BOUNDARY_TAIL_TOL {
        return Err(Error::PacketTouchesBoundary { tail });
    }
    let mut env = Array2::from_shape_fn((grid.nx, grid.ny), |(i, j)| {
        let r = Vec2::new(grid.x(i), grid.y(j));
        let d = r - center;
        Complex64::from_polar(
            (-d.norm_squared() / (2.0 * width * width)).exp(),
            momentum.dot(&r),
        )
    });
    let n = env.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.cell_area();
    let s = 1.0 / n.sqrt();
    env.mapv_inplace(|z| z * s);
    Ok(env)
}

/// Gaussian envelope times a constant (normalised) spinor.
pub fn gaussian_packet(grid: &GridSpec, params: &PacketParams) -> Result<SpinorField> {
    let env = gaussian_envelope(grid, &params.center, params.width, &params.momentum)?;
    let sn = (params.spin[0].norm_sqr() + params.spin[1].norm_sqr()).sqrt();
    if !(sn > 0.0) {
        return Err(Error::InvalidParameter {
            name: "spin",
            value: sn,
            reason: "spinor amplitudes must not both vanish",
        });
    }
    let spin = params.spin.map(|s| s / sn);
    let mut psi = Array3::zeros((2, grid.nx, grid.ny));
    for c in 0..2 {
        psi.index_axis_mut(Axis(0), c)
            .assign(&env.mapv(|z| z * spin[c]));
    }
    Ok(SpinorField {
        psi,
        grid: grid.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(128, 128, 64.0, 64.0, 0.01, 10).unwrap()
    }

    fn params(width: f64) -> PacketParams {
        PacketParams {
            center: Vec2::new(1.0, -2.0),
            width,
            momentum: Vec2::new(0.3, 0.0),
            spin: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        }
    }

    #[test]
    fn packet_is_normalised() {
        let f = gaussian_packet(&grid(), &params(4.0)).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn momentum_width_is_inverse_width() {
        let g = grid();
        let w = 5.0;
        let mut p = params(w);
        p.momentum = Vec2::zeros();
        p.center = Vec2::zeros();
        let f = gaussian_packet(&g, &p).unwrap();
        let phi = f.momentum_space();
        let (mut num, mut den) = (0.0, 0.0);
        for c in 0..2 {
            for idx in 0..g.len() {
                let a = phi[[c, idx / g.ny, idx % g.ny]].norm_sqr();
                num += a * g.momentum(idx).norm_squared();
                den += a;
            }
        }
        let rms = (num / den).sqrt();
        assert!((rms * w - 1.0).abs() < 0.02, "{rms}");
    }

    #[test]
    fn spin_up_has_unit_sigma_z() {
        let mut p = params(4.0);
        p.spin = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let f = gaussian_packet(&grid(), &p).unwrap();
        let s = f.spin();
        assert!((s[2] - 1.0).abs() < 1e-14 && s[0].abs() < 1e-14);
    }

    #[test]
    fn narrow_and_boundary_packets_rejected() {
        assert!(matches!(
            gaussian_packet(&grid(), &params(1.0)),
            Err(Error::PacketTooNarrow { .. })
        ));
        assert!(matches!(
            gaussian_packet(&grid(), &params(12.0)),
            Err(Error::PacketTouchesBoundary { .. })
        ));
    }

    #[test]
    fn dressed_mapping_round_trip() {
        let cfg = LaserConfig::canonical(5.0, 1.0, 1.0).unwrap();
        let g = GridSpec::new(64, 64, 32.0, 32.0, 0.01, 1).unwrap();
        let mut p = params(3.0);
        p.center = Vec2::zeros();
        let spinor = gaussian_packet(&g, &p).unwrap();
        let frames = FrameGrid::new(&cfg, &g).unwrap();
        let full = FullField::from_spinor_with(&frames, &spinor);
        assert!((full.norm() - 1.0).abs() < 1e-12);
        let back = full.project_ground(&frames);
        assert!(distance_of(&back.psi, &spinor.psi, &g) < 1e-13);
        let pops = full.dressed_populations(&frames);
        assert!((pops[0] + pops[1] - 1.0).abs() < 1e-12);
        assert!(pops[2] < 1e-28 && pops[3] < 1e-28);
    }

    #[test]
    fn level_packet() {
        let cfg = LaserConfig::canonical(5.0, 1.0, 1.0).unwrap();
        let g = GridSpec::new(64, 64, 32.0, 32.0, 0.01, 1).unwrap();
        let env = gaussian_envelope(&g, &Vec2::zeros(), 3.0, &Vec2::zeros()).unwrap();
        let full = FullField::from_level(&cfg, &g, &env, DressedLevel::Dark).unwrap();
        let pops = full.dressed_populations(&FrameGrid::new(&cfg, &g).unwrap());
        assert!((pops[2] - 1.0).abs() < 1e-12);
        assert!(full
            .psi
            .index_axis(Axis(0), 3)
            .iter()
            .all(|z| z.norm() == 0.0));
    }
}
