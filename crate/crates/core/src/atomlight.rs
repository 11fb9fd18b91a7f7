//! Atom-light coupling of the double-tripod scheme.
//!
//! Three bare states |1⟩, |2⟩, |3⟩ each couple to two mutually uncoupled
//! states |e_1⟩, |e_2⟩ through plane-wave Rabi frequencies
//! Ω_{j,p} = Ω·exp(i k_j·r + i S_{j,p}). All 5-component vectors and 5×5
//! matrices use the fixed basis order (|1⟩, |2⟩, |3⟩, |e_1⟩, |e_2⟩).
//!
//! The dressed eigenbasis is built from closed-form expressions rather than a
//! numerical eigensolver, so its phase is a smooth function of position. This
//! is what makes the gauge potentials computed from it well defined.

use std::f64::consts::PI;

use nalgebra::{Matrix5, SymmetricEigen, Vector2, Vector5};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauge::regular_triangle_wavevectors;

pub type Vec2 = Vector2<f64>;
pub type Ket5 = Vector5<Complex64>;
pub type Mat5 = Matrix5<Complex64>;

/// Tolerance on |⟨B_2|B_1⟩| for accepting a phase matrix.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Number of bare states coupled to each excited state.
pub const N_BARE: usize = 3;

/// Physical parameters of the laser configuration (ħ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct LaserConfig {
    /// Common Rabi amplitude Ω.
    pub omega: f64,
    /// Wave-vector magnitude κ.
    pub kappa: f64,
    /// k_1, k_2, k_3.
    pub wavevectors: [Vec2; 3],
    /// S_{j,p}, indexed `[j - 1][p - 1]`.
    pub phases: [[f64; 2]; 3],
    pub mass: f64,
}

impl LaserConfig {
    /// Regular-triangle wave vectors and the default phase prescription.
    pub fn canonical(omega: f64, kappa: f64, mass: f64) -> Result<Self> {
        let wavevectors = regular_triangle_wavevectors(kappa)?;
        Self::new(omega, kappa, wavevectors, default_phases(), mass)
    }

    pub fn new(
        omega: f64,
        kappa: f64,
        wavevectors: [Vec2; 3],
        phases: [[f64; 2]; 3],
        mass: f64,
    ) -> Result<Self> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega,
                reason: "must be finite and non-negative",
            });
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidKappa(kappa));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: mass,
                reason: "must be finite and positive",
            });
        }
        if wavevectors
            .iter()
            .any(|k| !(k.x.is_finite() && k.y.is_finite()))
            || phases.iter().flatten().any(|s| !s.is_finite())
        {
            return Err(Error::InvalidParameter {
                name: "wavevectors/phases",
                value: f64::NAN,
                reason: "must be finite",
            });
        }
        Ok(Self {
            omega,
            kappa,
            wavevectors,
            phases,
            mass,
        })
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(omega, self.kappa, self.wavevectors, self.phases, self.mass)
    }

    pub fn with_wavevectors(&self, wavevectors: [Vec2; 3]) -> Result<Self> {
        Self::new(self.omega, self.kappa, wavevectors, self.phases, self.mass)
    }

    pub fn with_phases(&self, phases: [[f64; 2]; 3]) -> Result<Self> {
        Self::new(self.omega, self.kappa, self.wavevectors, phases, self.mass)
    }

    /// E_r = κ²/2m.
    pub fn recoil_energy(&self) -> f64 {
        self.kappa * self.kappa / (2.0 * self.mass)
    }

    /// |Σ_j Ω_{j,2} Ω*_{j,1}| / Ω². Position independent because all beams
    /// share the amplitude Ω.
    pub fn orthogonality_residual(&self) -> f64 {
        (0..N_BARE)
            .map(|j| Complex64::from_polar(1.0, self.phases[j][1] - self.phases[j][0]))
            .sum::<Complex64>()
            .norm()
    }

    /// |k_1 + k_2 + k_3|.
    pub fn closure_residual(&self) -> f64 {
        self.wavevectors.iter().sum::<Vec2>().norm()
    }

    /// Largest |k_j|.
    pub fn max_wavenumber(&self) -> f64 {
        self.wavevectors
            .iter()
            .map(|k| k.norm())
            .fold(0.0, f64::max)
    }
}

/// S_{j,p} = (−1)^p (π/3)(j − 2).
pub fn default_phases() -> [[f64; 2]; 3] {
    let mut s = [[0.0; 2]; 3];
    for (j, row) in s.iter_mut().enumerate() {
        for (p, v) in row.iter_mut().enumerate() {
            let sign = if (p + 1) % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign * PI / 3.0 * (j as f64 + 1.0 - 2.0);
        }
    }
    s
}

/// Rabi frequencies at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiMatrix {
    /// Ω_{j,p}, indexed `[j - 1][p - 1]`.
    pub values: [[Complex64; 2]; 3],
    /// Ω_p = sqrt(Σ_j |Ω_{j,p}|²), positive root.
    pub totals: [f64; 2],
}

pub fn rabi_matrix(config: &LaserConfig, r: &Vec2) -> RabiMatrix {
    let mut values = [[Complex64::new(0.0, 0.0); 2]; 3];
    for (j, row) in values.iter_mut().enumerate() {
        let kr = config.wavevectors[j].dot(r);
        for (p, v) in row.iter_mut().enumerate() {
            *v = Complex64::from_polar(config.omega, kr + config.phases[j][p]);
        }
    }
    let totals = [0, 1].map(|p| {
        values
            .iter()
            .map(|row| row[p].norm_sqr())
            .sum::<f64>()
            .sqrt()
    });
    RabiMatrix { values, totals }
}

/// H₀ = −Σ_p Σ_j Ω_{j,p} |e_p⟩⟨j| + H.c.
pub fn build_hamiltonian(rabi: &RabiMatrix) -> Mat5 {
    let mut h = Mat5::zeros();
    for j in 0..N_BARE {
        for p in 0..2 {
            let w = -rabi.values[j][p];
            h[(N_BARE + p, j)] = w;
            h[(j, N_BARE + p)] = w.conj();
        }
    }
    h
}

/// Closed-form eigensystem of H₀ at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedFrame {
    pub position: Vec2,
    /// |B_1⟩, |B_2⟩.
    pub bright: [Ket5; 2],
    pub dark: Ket5,
    /// |1,+⟩, |2,+⟩ (the degenerate ground doublet).
    pub plus: [Ket5; 2],
    /// |1,−⟩, |2,−⟩.
    pub minus: [Ket5; 2],
    /// Energies of (|1,+⟩, |2,+⟩, |D⟩, |1,−⟩, |2,−⟩).
    pub energies: [f64; 5],
}

/// Index of each dressed level in [`DressedFrame::eigenvectors`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DressedLevel {
    Plus1 = 0,
    Plus2 = 1,
    Dark = 2,
    Minus1 = 3,
    Minus2 = 4,
}

impl DressedFrame {
    /// Eigenvectors in the order (|1,+⟩, |2,+⟩, |D⟩, |1,−⟩, |2,−⟩).
    pub fn eigenvectors(&self) -> [Ket5; 5] {
        [
            self.plus[0],
            self.plus[1],
            self.dark,
            self.minus[0],
            self.minus[1],
        ]
    }

    pub fn level(&self, level: DressedLevel) -> Ket5 {
        self.eigenvectors()[level as usize]
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn unitary(&self) -> Mat5 {
        Mat5::from_columns(&self.eigenvectors())
    }

    /// exp(−i H₀ t) assembled from the spectral decomposition.
    pub fn propagator(&self, t: f64) -> Mat5 {
        let u = self.unitary();
        let mut phased = u;
        for (n, e) in self.energies.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -e * t);
            for i in 0..5 {
                phased[(i, n)] *= ph;
            }
        }
        phased * u.adjoint()
    }
}

fn bare_ket(c: [Complex64; 3]) -> Ket5 {
    let z = Complex64::new(0.0, 0.0);
    Ket5::new(c[0], c[1], c[2], z, z)
}

pub fn dressed_frame(config: &LaserConfig, r: &Vec2) -> Result<DressedFrame> {
    let rabi = rabi_matrix(config, r);
    if rabi.totals.iter().any(|&t| t <= f64::MIN_POSITIVE) {
        return Err(Error::DegenerateCoupling);
    }

    // |B_p⟩ = (1/Ω_p) Σ_j Ω*_{j,p} |j⟩
    let bright3: [[Complex64; 3]; 2] =
        [0, 1].map(|p| [0, 1, 2].map(|j| rabi.values[j][p].conj() / rabi.totals[p]));
    let overlap: Complex64 = (0..3).map(|j| bright3[1][j].conj() * bright3[0][j]).sum();
    if overlap.norm() > ORTHOGONALITY_TOL {
        return Err(Error::OrthogonalityViolation {
            residual: overlap.norm(),
        });
    }

    // Orthogonal complement of the bright pair, with a constant phase so the
    // default configuration gives (1/√3) Σ_j (−1)^{j+1} e^{−i k_j·r} |j⟩.
    let (b1, b2) = (&bright3[0], &bright3[1]);
    let cross = [
        b1[1] * b2[2] - b1[2] * b2[1],
        b1[2] * b2[0] - b1[0] * b2[2],
        b1[0] * b2[1] - b1[1] * b2[0],
    ];
    let minus_i = Complex64::new(0.0, -1.0);
    let dark3 = cross.map(|c| minus_i * c.conj());

    let bright = bright3.map(bare_ket);
    let dark = bare_ket(dark3);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let dressed = |p: usize, sign: f64| {
        let mut v = bright[p];
        v[N_BARE + p] += Complex64::new(sign, 0.0);
        v * Complex64::new(inv_sqrt2, 0.0)
    };
    let plus = [dressed(0, 1.0), dressed(1, 1.0)];
    let minus = [dressed(0, -1.0), dressed(1, -1.0)];
    let [o1, o2] = rabi.totals;
    Ok(DressedFrame {
        position: *r,
        bright,
        dark,
        plus,
        minus,
        energies: [-o1, -o2, 0.0, o1, o2],
    })
}

/// Residuals of the analytic frame against a dense Hermitian eigensolve.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    /// max_n |ε_n(analytic) − ε_n(numeric)| over sorted spectra.
    pub eigenvalue_deviation: f64,
    /// Largest principal angle (radians) between span{|1,+⟩, |2,+⟩} and the
    /// numerically computed lowest-two eigenvector subspace. `None` when the
    /// coupling vanishes and the spectrum is totally degenerate.
    pub subspace_angle: Option<f64>,
    pub degenerate: bool,
}

/// Sorted eigenvalues and matching eigenvectors (as columns).
pub fn hermitian_eigen(h: &Mat5) -> ([f64; 5], Mat5) {
    let eig = SymmetricEigen::new(*h);
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = [0, 1, 2, 3, 4].map(|i| eig.eigenvalues[order[i]]);
    let vectors = Mat5::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i))
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

pub fn verify_frame_against_eigensolver(config: &LaserConfig, r: &Vec2) -> Result<FrameReport> {
    let h = build_hamiltonian(&rabi_matrix(config, r));
    let (numeric, vectors) = hermitian_eigen(&h);

    let frame = match dressed_frame(config, r) {
        Ok(f) => f,
        Err(Error::DegenerateCoupling) => {
            let dev = numeric.iter().map(|e| e.abs()).fold(0.0, f64::max);
            return Ok(FrameReport {
                eigenvalue_deviation: dev,
                subspace_angle: None,
                degenerate: true,
            });
        }
        Err(e) => return Err(e),
    };

    let mut analytic = frame.energies;
    analytic.sort_by(f64::total_cmp);
    let eigenvalue_deviation = analytic
        .iter()
        .zip(numeric.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    // sin θ_max = ‖(I − Q_n Q_n†) Q_a‖₂
    let qn = vectors.columns(0, 2).into_owned();
    let qa = nalgebra::Matrix5x2::from_columns(&frame.plus);
    let resid = qa - &qn * (qn.adjoint() * qa);
    let sin_max = resid.svd(false, false).singular_values.max();
    Ok(FrameReport {
        eigenvalue_deviation,
        subspace_angle: Some(sin_max.min(1.0).asin()),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn canonical() -> LaserConfig {
        LaserConfig::canonical(1.0, 1.0, 1.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn default_phases_follow_prescription() {
        let s = default_phases();
        for j in 1..=3 {
            for p in 1..=2 {
                let expect = (-1f64).powi(p) * PI / 3.0 * (j as f64 - 2.0);
                assert_eq!(s[j - 1][p as usize - 1], expect);
            }
        }
        assert_eq!(s[1], [0.0, 0.0]);
    }

    #[test]
    fn rabi_at_origin() {
        let r = rabi_matrix(&canonical(), &Vec2::zeros());
        assert!((r.values[1][0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((r.values[1][1] - c(1.0, 0.0)).norm() < 1e-15);
        let e = Complex64::from_polar(1.0, PI / 3.0);
        assert!((r.values[0][0] - e).norm() < 1e-15);
        assert!((r.totals[0] - SQRT3).abs() < 1e-15);
        assert!((r.totals[1] - SQRT3).abs() < 1e-15);
    }

    #[test]
    fn rabi_columns_orthogonal_everywhere() {
        let cfg = canonical();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r = Vec2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
            let m = rabi_matrix(&cfg, &r);
            let s: Complex64 = (0..3).map(|j| m.values[j][1] * m.values[j][0].conj()).sum();
            assert!(s.norm() <= 1e-12 * cfg.omega * cfg.omega);
        }
    }

    #[test]
    fn rabi_zero_phase_case() {
        let cfg = LaserConfig::new(1.0, 1.0, [Vec2::zeros(); 3], [[0.0; 2]; 3], 1.0).unwrap();
        let m = rabi_matrix(&cfg, &Vec2::new(3.0, -7.0));
        for row in m.values {
            for v in row {
                assert!((v - c(1.0, 0.0)).norm() < 1e-15);
            }
        }
        assert!((m.totals[0] - SQRT3).abs() < 1e-15);
        assert!((m.totals[1] - SQRT3).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_structure() {
        let cfg = canonical();
        let m = rabi_matrix(&cfg, &Vec2::new(0.4, 1.3));
        let h = build_hamiltonian(&m);
        assert!((h - h.adjoint()).norm() == 0.0);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(h[(a, b)], c(0.0, 0.0));
            }
        }
        for a in 3..5 {
            for b in 3..5 {
                assert_eq!(h[(a, b)], c(0.0, 0.0));
            }
        }
        assert_eq!(h[(4, 2)], -m.values[2][1]);
    }

    #[test]
    fn spectrum_at_origin() {
        let h = build_hamiltonian(&rabi_matrix(&canonical(), &Vec2::zeros()));
        let (vals, _) = hermitian_eigen(&h);
        let expect = [-SQRT3, -SQRT3, 0.0, SQRT3, SQRT3];
        for (a, b) in vals.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn zero_rabi_gives_zero_matrix() {
        let cfg = canonical().with_omega(0.0).unwrap();
        let h = build_hamiltonian(&rabi_matrix(&cfg, &Vec2::new(1.0, 2.0)));
        assert_eq!(h, Mat5::zeros());
        let (vals, _) = hermitian_eigen(&h);
        assert!(vals.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dark_state_at_origin() {
        let f = dressed_frame(&canonical(), &Vec2::zeros()).unwrap();
        let s = 1.0 / SQRT3;
        let expect = [s, -s, s];
        for j in 0..3 {
            assert!((f.dark[j] - c(expect[j], 0.0)).norm() < 1e-15);
        }
        for b in &f.bright {
            assert!(f.dark.dotc(b).norm() < 1e-15);
        }
    }

    #[test]
    fn dark_state_matches_plane_wave_form() {
        let cfg = canonical();
        let r = Vec2::new(2.7, -0.9);
        let f = dressed_frame(&cfg, &r).unwrap();
        for j in 0..3 {
            let sign = if j == 1 { -1.0 } else { 1.0 };
            let expect = Complex64::from_polar(sign / SQRT3, -cfg.wavevectors[j].dot(&r));
            assert!((f.dark[j] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn frame_invariants_random_positions() {
        let cfg = LaserConfig::canonical(2.3, 1.7, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = Vec2::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
            let f = dressed_frame(&cfg, &r).unwrap();
            let h = build_hamiltonian(&rabi_matrix(&cfg, &r));
            let u = f.unitary();
            assert!((u.adjoint() * u - Mat5::identity()).norm() < 1e-12);
            for b in f.bright.iter().chain(std::iter::once(&f.dark)) {
                assert!((b.norm() - 1.0).abs() < 1e-12);
            }
            assert!(f.bright[1].dotc(&f.bright[0]).norm() < 1e-12);
            for (v, e) in f.eigenvectors().iter().zip(f.energies) {
                let resid = (h * v - v * Complex64::new(e, 0.0)).norm();
                assert!(resid <= 1e-12 * cfg.omega, "{resid}");
            }
            assert!((f.energies[2] - f.energies[0] - SQRT3 * cfg.omega).abs() < 1e-12);
            assert!((f.energies[3] - f.energies[0] - 2.0 * SQRT3 * cfg.omega).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_phases_violate_orthogonality() {
        let cfg = canonical().with_phases([[0.0; 2]; 3]).unwrap();
        assert!((cfg.orthogonality_residual() - 3.0).abs() < 1e-15);
        match dressed_frame(&cfg, &Vec2::zeros()) {
            Err(Error::OrthogonalityViolation { residual }) => {
                assert!((residual - 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_coupling_rejected_by_frame() {
        let cfg = canonical().with_omega(0.0).unwrap();
        assert_eq!(
            dressed_frame(&cfg, &Vec2::zeros()),
            Err(Error::DegenerateCoupling)
        );
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            LaserConfig::canonical(1.0, 0.0, 1.0),
            Err(Error::InvalidKappa(_))
        ));
        assert!(LaserConfig::canonical(-1.0, 1.0, 1.0).is_err());
        assert!(LaserConfig::canonical(1.0, 1.0, 0.0).is_err());
        assert!(LaserConfig::canonical(0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn propagator_is_exponential() {
        let cfg = canonical();
        let r = Vec2::new(0.3, 0.8);
        let f = dressed_frame(&cfg, &r).unwrap();
        let h = build_hamiltonian(&rabi_matrix(&cfg, &r));
        // Taylor series oracle for exp(−i H t).
        let t = 0.37;
        let a = h * Complex64::new(0.0, -t);
        let mut term = Mat5::identity();
        let mut sum = Mat5::identity();
        for n in 1..60 {
            term = term * a / Complex64::new(n as f64, 0.0);
            sum += term;
        }
        assert!((f.propagator(t) - sum).norm() < 1e-13);
    }

    #[test]
    fn verification_report_at_origin() {
        let rep = verify_frame_against_eigensolver(&canonical(), &Vec2::zeros()).unwrap();
        assert!(rep.eigenvalue_deviation <= 1e-12);
        assert!(rep.subspace_angle.unwrap() <= 1e-10);
        assert!(!rep.degenerate);
    }

    #[test]
    fn verification_report_sweep() {
        let cfg = canonical();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let r = Vec2::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0));
            let rep = verify_frame_against_eigensolver(&cfg, &r).unwrap();
            assert!(rep.eigenvalue_deviation <= 1e-12, "{rep:?}");
            assert!(rep.subspace_angle.unwrap() <= 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn verification_flags_degenerate_coupling() {
        let cfg = canonical().with_omega(0.0).unwrap();
        let rep = verify_frame_against_eigensolver(&cfg, &Vec2::zeros()).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.subspace_angle, None);
        assert_eq!(rep.eigenvalue_deviation, 0.0);
    }

    #[test]
    fn frame_is_smooth_second_order() {
        // Central-difference derivative error must shrink by ~4 per step halving.
        let cfg = canonical();
        let r = Vec2::new(0.21, -0.43);
        let exact: Ket5 = {
            let f = dressed_frame(&cfg, &r).unwrap();
            let mut d = f.plus[0];
            for j in 0..3 {
                d[j] *= Complex64::new(0.0, -cfg.wavevectors[j].x);
            }
            d[3] = c(0.0, 0.0);
            d
        };
        let err = |h: f64| {
            let p = dressed_frame(&cfg, &(r + Vec2::new(h, 0.0))).unwrap().plus[0];
            let m = dressed_frame(&cfg, &(r - Vec2::new(h, 0.0))).unwrap().plus[0];
            ((p - m) / Complex64::new(2.0 * h, 0.0) - exact).norm()
        };
        let order = (err(1e-2) / err(5e-3)).log2();
        assert!((order - 2.0).abs() < 0.05, "{order}");
    }
}
