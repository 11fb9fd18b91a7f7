//! Recoil units.
//!
//! The library works with ħ = 1 and keeps the wave number κ and the atomic
//! mass m as free parameters. Configuration surfaces express energies in
//! multiples of the recoil energy E_r = ħ²κ²/2m, times in ħ/E_r, lengths in
//! 1/κ and momenta in κ; this type converts between the two.

/// Scale factors for a given (κ, m) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoilUnits {
    pub kappa: f64,
    pub mass: f64,
}

impl RecoilUnits {
    pub fn new(kappa: f64, mass: f64) -> Self {
        Self { kappa, mass }
    }

    /// E_r = κ²/2m.
    pub fn energy(&self) -> f64 {
        self.kappa * self.kappa / (2.0 * self.mass)
    }

    /// ħ/E_r.
    pub fn time(&self) -> f64 {
        1.0 / self.energy()
    }

    /// 1/κ.
    pub fn length(&self) -> f64 {
        1.0 / self.kappa
    }

    pub fn momentum(&self) -> f64 {
        self.kappa
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass_unit_kappa() {
        let u = RecoilUnits::new(1.0, 1.0);
        assert_eq!(u.energy(), 0.5);
        assert_eq!(u.time(), 2.0);
        assert_eq!(u.length(), 1.0);
    }

    #[test]
    fn recoil_energy_scales_quadratically() {
        let u = RecoilUnits::new(2.0, 0.5);
        assert!((u.energy() - 4.0).abs() < 1e-15);
        assert!((u.energy() * u.time() - 1.0).abs() < 1e-15);
    }
}
