//! Five-level split-step evolution checked against an exact solution.
//!
//! With φ_j = e^{i k_j·r} ψ_j for the bare ground states, the atom-light
//! coupling becomes position independent and the five-level problem is
//! diagonal in momentum: each plane wave q evolves under a constant 5×5
//! Hermitian matrix with kinetic entries |q − k_j|²/2m and |q|²/2m.

use ndarray::Array3;
use num_complex::Complex64;

use tripod_soc::atomlight::{hermitian_eigen, DressedLevel, LaserConfig, Mat5, Vec2};
use tripod_soc::dynamics::field::distance_of;
use tripod_soc::dynamics::{evolve_full, gaussian_envelope, Fft2, FullField, GridSpec};

fn exact(cfg: &LaserConfig, init: &FullField, t: f64) -> Array3<Complex64> {
    let g = &init.grid;
    let mut phi = init.psi.clone();
    for j in 0..3 {
        for idx in 0..g.len() {
            let (a, b) = (idx / g.ny, idx % g.ny);
            phi[[j, a, b]] *= Complex64::from_polar(1.0, cfg.wavevectors[j].dot(&g.position(idx)));
        }
    }
    let mut fft = Fft2::for_grid(g);
    for mut c in phi.outer_iter_mut() {
        fft.forward(c.as_slice_mut().unwrap());
    }
    let inv2m = 0.5 / cfg.mass;
    for idx in 0..g.len() {
        let (a, b) = (idx / g.ny, idx % g.ny);
        let q = g.momentum(idx);
        let mut h = Mat5::zeros();
        for j in 0..3 {
            h[(j, j)] = Complex64::new((q - cfg.wavevectors[j]).norm_squared() * inv2m, 0.0);
            for p in 0..2 {
                let w = -Complex64::from_polar(cfg.omega, cfg.phases[j][p]);
                h[(3 + p, j)] = w;
                h[(j, 3 + p)] = w.conj();
            }
        }
        for p in 0..2 {
            h[(3 + p, 3 + p)] = Complex64::new(q.norm_squared() * inv2m, 0.0);
        }
        let (vals, vecs) = hermitian_eigen(&h);
        let mut d = Mat5::zeros();
        for n in 0..5 {
            d[(n, n)] = Complex64::from_polar(1.0, -vals[n] * t);
        }
        let u = vecs * d * vecs.adjoint();
        let v = nalgebra::Vector5::from_fn(|c, _| phi[[c, a, b]]);
        let w = u * v;
        for c in 0..5 {
            phi[[c, a, b]] = w[c];
        }
    }
    for mut c in phi.outer_iter_mut() {
        fft.inverse(c.as_slice_mut().unwrap());
    }
    for j in 0..3 {
        for idx in 0..g.len() {
            let (a, b) = (idx / g.ny, idx % g.ny);
            phi[[j, a, b]] *= Complex64::from_polar(1.0, -cfg.wavevectors[j].dot(&g.position(idx)));
        }
    }
    phi
}

fn packet(
    cfg: &LaserConfig,
    grid: &GridSpec,
    width: f64,
    k0: Vec2,
    level: DressedLevel,
) -> FullField {
    let env = gaussian_envelope(grid, &Vec2::zeros(), width, &k0).unwrap();
    FullField::from_level(cfg, grid, &env, level).unwrap()
}

#[test]
fn split_step_converges_to_exact_solution_at_second_order() {
    let cfg = LaserConfig::canonical(2.5, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(64, 64, 32.0, 32.0, 0.04, 50).unwrap();
    let init = packet(&cfg, &grid, 3.0, Vec2::new(0.3, 0.0), DressedLevel::Plus1);
    let t = grid.total_time();
    let reference = exact(&cfg, &init, t);
    let err = |dt: f64| {
        let g = grid.with_time(dt, (t / dt).round() as usize).unwrap();
        let (_, end) = evolve_full(&cfg, &init, &g).unwrap();
        distance_of(&end.psi, &reference, &grid)
    };
    let (e1, e2) = (err(0.04), err(0.02));
    let ratio = e1 / e2;
    assert!(e1 < 1e-2, "coarse error {e1}");
    assert!((ratio - 4.0).abs() < 0.8, "errors {e1} {e2} ratio {ratio}");
}

#[test]
fn ground_doublet_fidelity_at_twenty_recoil() {
    // Ω = 20 E_r, t = 10 ħ/E_r with E_r = 1/2.
    let cfg = LaserConfig::canonical(10.0, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(128, 128, 64.0, 64.0, 0.02, 1000).unwrap();
    let init = packet(&cfg, &grid, 4.0, Vec2::zeros(), DressedLevel::Plus1);
    let (rep, _) = evolve_full(&cfg, &init, &grid).unwrap();
    let worst = rep.fidelities().into_iter().fold(1.0, f64::min);
    assert!(worst >= 0.99, "fidelity {worst}");
    assert!(rep.norm_drift() <= 1e-10);
    assert!(rep.population_closure() <= 1e-10);
}

#[test]
fn dark_state_leakage_falls_with_coupling() {
    let grid = GridSpec::new(128, 128, 64.0, 64.0, 0.02, 1000).unwrap();
    let leak = |omega_recoil: f64| {
        let cfg = LaserConfig::canonical(omega_recoil * 0.5, 1.0, 1.0).unwrap();
        let init = packet(&cfg, &grid, 4.0, Vec2::zeros(), DressedLevel::Dark);
        let (rep, _) = evolve_full(&cfg, &init, &grid).unwrap();
        rep.samples
            .iter()
            .map(|s| 1.0 - s.populations[2] / s.norm)
            .fold(0.0, f64::max)
    };
    let l = [10.0, 20.0, 50.0].map(leak);
    assert!(l[0] > l[1] && l[1] > l[2], "{l:?}");
    assert!(l[2] <= 1e-2, "{l:?}");
}

#[test]
fn energy_conserved_at_small_step() {
    // The Strang energy error is O(dt²); 1e-8 needs dt of a few 1e-4.
    let cfg = LaserConfig::canonical(2.5, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(64, 64, 32.0, 32.0, 2.5e-4, 1000).unwrap();
    let init = packet(&cfg, &grid, 3.0, Vec2::new(0.3, 0.0), DressedLevel::Plus1);
    let (rep, _) = evolve_full(&cfg, &init, &grid).unwrap();
    assert!(
        rep.relative_energy_drift() <= 1e-8,
        "{}",
        rep.relative_energy_drift()
    );
    assert!(rep.norm_drift() <= 1e-10);
}
