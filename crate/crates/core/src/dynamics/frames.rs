use num_complex::Complex64;
use rayon::prelude::*;

use crate::atomlight::{dressed_frame, LaserConfig};
use crate::dynamics::grid::GridSpec;
use crate::error::Result;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Analytic dressed frame sampled on every grid point.
///
/// Only the bare-state parts of |B_1⟩, |B_2⟩ and |D⟩ are stored; the dressed
/// states follow as |p,±⟩ = (|B_p⟩ ± |e_p⟩)/√2.
#[derive(Debug, Clone)]
pub struct FrameGrid {
    bright: Vec<[[Complex64; 3]; 2]>,
    dark: Vec<[Complex64; 3]>,
    /// Ω_1, Ω_2 (uniform for plane-wave beams).
    pub totals: [f64; 2],
}

fn dot3(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

impl FrameGrid {
    pub fn new(config: &LaserConfig, grid: &GridSpec) -> Result<Self> {
        let frames: Vec<_> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let f = dressed_frame(config, &grid.position(idx))?;
                let b = f.bright.map(|v| [v[0], v[1], v[2]]);
                let d = [f.dark[0], f.dark[1], f.dark[2]];
                Ok((b, d, [-f.energies[0], -f.energies[1]]))
            })
            .collect::<Result<_>>()?;
        let totals = frames.first().map(|f| f.2).unwrap_or([0.0; 2]);
        let (bright, dark) = frames.into_iter().map(|(b, d, _)| (b, d)).unzip();
        Ok(Self {
            bright,
            dark,
            totals,
        })
    }

    /// Amplitudes on (|1,+⟩, |2,+⟩, |D⟩, |1,−⟩, |2,−⟩) of a bare-basis vector.
    #[inline]
    pub fn project(&self, idx: usize, v: &[Complex64; 5]) -> [Complex64; 5] {
        let b = [v[0], v[1], v[2]];
        let [b1, b2] = &self.bright[idx];
        let c1 = dot3(b1, &b);
        let c2 = dot3(b2, &b);
        let d = dot3(&self.dark[idx], &b);
        [
            (c1 + v[3]) * FRAC_1_SQRT_2,
            (c2 + v[4]) * FRAC_1_SQRT_2,
            d,
            (c1 - v[3]) * FRAC_1_SQRT_2,
            (c2 - v[4]) * FRAC_1_SQRT_2,
        ]
    }

    /// Bare-basis vector with the given dressed amplitudes.
    #[inline]
    pub fn compose(&self, idx: usize, a: &[Complex64; 5]) -> [Complex64; 5] {
        let [b1, b2] = &self.bright[idx];
        let d = &self.dark[idx];
        let w1 = (a[0] + a[3]) * FRAC_1_SQRT_2;
        let w2 = (a[1] + a[4]) * FRAC_1_SQRT_2;
        let mut out = [Complex64::new(0.0, 0.0); 5];
        for j in 0..3 {
            out[j] = b1[j] * w1 + b2[j] * w2 + d[j] * a[2];
        }
        out[3] = (a[0] - a[3]) * FRAC_1_SQRT_2;
        out[4] = (a[1] - a[4]) * FRAC_1_SQRT_2;
        out
    }

    /// Apply exp(−i H₀ t) at one point, given (cos Ω_p t, sin Ω_p t).
    ///
    /// With c_p = ⟨B_p|b⟩ the propagator acts as
    /// b → b + Σ_p B_p[(cos − 1) c_p + i sin e_p], e_p → cos e_p + i sin c_p.
    #[inline]
    pub fn propagate(&self, idx: usize, v: &mut [Complex64; 5], trig: &[(f64, f64); 2]) {
        let b = [v[0], v[1], v[2]];
        let bright = &self.bright[idx];
        let mut corr = [Complex64::new(0.0, 0.0); 3];
        for p in 0..2 {
            let (c, s) = trig[p];
            let cp = dot3(&bright[p], &b);
            let e = v[3 + p];
            let w = cp * (c - 1.0) + Complex64::new(0.0, s) * e;
            for j in 0..3 {
                corr[j] += bright[p][j] * w;
            }
            v[3 + p] = e * c + Complex64::new(0.0, s) * cp;
        }
        for j in 0..3 {
            v[j] = b[j] + corr[j];
        }
    }

    /// (cos Ω_p t, sin Ω_p t) for both p.
    pub fn trig(&self, t: f64) -> [(f64, f64); 2] {
        self.totals.map(|o| ((o * t).cos(), (o * t).sin()))
    }
}
