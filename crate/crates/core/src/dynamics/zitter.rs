//! Zitterbewegung analysis: the trembling of ⟨x(t)⟩ produced by interference
//! between the two spin-orbit-split bands.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::bands::{hermitian2_eigenvalues, EffectiveHamiltonianSpec};
use crate::dynamics::field::SpinorField;
use crate::error::{Error, Result};
use crate::gauge::Mat2;

/// Zero-padding factor applied before the spectral peak search.
const PAD_FACTOR: usize = 16;

/// Angular frequency of the strongest oscillation in a uniformly sampled
/// series, from the zero-padded DFT of the mean-removed signal with a
/// parabolic fit through the peak bin and its neighbours.
pub fn dominant_frequency(times: &[f64], values: &[f64]) -> Result<f64> {
    let n = times.len();
    if n < 4 || values.len() != n {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: n as f64,
            reason: "need at least four samples with matching times and values",
        });
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
    if !(dt > 0.0) || !uniform {
        return Err(Error::InvalidParameter {
            name: "times",
            value: dt,
            reason: "samples must be uniformly spaced and increasing",
        });
    }

    let mean = values.iter().sum::<f64>() / n as f64;
    let len = (n * PAD_FACTOR).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (b, v) in buf.iter_mut().zip(values) {
        *b = Complex64::new(v - mean, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|z| z.norm()).collect();

    let peak = (1..mag.len() - 1)
        .max_by(|&a, &b| mag[a].total_cmp(&mag[b]))
        .expect("spectrum has interior bins");
    let (l, c, r) = (mag[peak - 1], mag[peak], mag[peak + 1]);
    let denom = l - 2.0 * c + r;
    let shift = if denom != 0.0 {
        0.5 * (l - r) / denom
    } else {
        0.0
    };
    let bin = peak as f64 + shift;
    Ok(2.0 * PI * bin / (len as f64 * dt))
}

fn block(spec: &EffectiveHamiltonianSpec, k: &crate::atomlight::Vec2) -> Mat2 {
    spec.kinetic_block(k) + spec.fields.phi
}

/// Band splitting E_+(k) − E_−(k) averaged over the packet's momentum
/// distribution Σ_s |Ψ_s(k)|².
pub fn mean_band_splitting(spec: &EffectiveHamiltonianSpec, field: &SpinorField) -> f64 {
    let g = &field.grid;
    let psi_k = field.momentum_space();
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..g.len() {
        let (i, j) = (idx / g.ny, idx % g.ny);
        let w = psi_k[[0, i, j]].norm_sqr() + psi_k[[1, i, j]].norm_sqr();
        if w == 0.0 {
            continue;
        }
        let [lo, hi] = hermitian2_eigenvalues(&block(spec, &g.momentum(idx)));
        num += w * (hi - lo);
        den += w;
    }
    num / den
}

/// Fractions of the packet in the (lower, upper) band.
pub fn band_weights(spec: &EffectiveHamiltonianSpec, field: &SpinorField) -> [f64; 2] {
    let g = &field.grid;
    let psi_k = field.momentum_space();
    let (mut lower, mut total) = (0.0, 0.0);
    for idx in 0..g.len() {
        let (i, j) = (idx / g.ny, idx % g.ny);
        let (a, b) = (psi_k[[0, i, j]], psi_k[[1, i, j]]);
        let w = a.norm_sqr() + b.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let h = block(spec, &g.momentum(idx));
        let [lo, hi] = hermitian2_eigenvalues(&h);
        total += w;
        if hi - lo <= f64::EPSILON * (lo.abs() + hi.abs()).max(1.0) {
            // Degenerate point: split evenly.
            lower += 0.5 * w;
            continue;
        }
        // Projector onto the lower eigenvector: (E_+ − H)/(E_+ − E_−).
        let p = (Mat2::identity() * Complex64::new(hi, 0.0) - h) / Complex64::new(hi - lo, 0.0);
        let pa = p[(0, 0)] * a + p[(0, 1)] * b;
        let pb = p[(1, 0)] * a + p[(1, 1)] * b;
        lower += (a.conj() * pa + b.conj() * pb).re;
    }
    [lower / total, 1.0 - lower / total]
}
