use crate::atomlight::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Two-component ground-doublet dynamics.
    Reduced,
    /// Five-level bare-basis dynamics.
    Full,
}

/// Observables at one sampled time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub mean_position: Vec2,
    pub norm: f64,
    /// Reduced: (|Ψ_1|², |Ψ_2|²). Full: (|1,+⟩, |2,+⟩, |D⟩, |1,−⟩, |2,−⟩).
    pub populations: Vec<f64>,
    /// ⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩ (reduced only).
    pub spin: Option<[f64; 3]>,
    /// Fraction of the norm in the ground doublet (full only).
    pub fidelity: Option<f64>,
    /// ⟨H⟩ (not normalised).
    pub energy: f64,
}

/// Time series from one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport {
    pub representation: Representation,
    pub samples: Vec<Sample>,
}

impl EvolutionReport {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn mean_x(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.mean_position.x).collect()
    }

    pub fn mean_y(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.mean_position.y).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.fidelity).collect()
    }

    /// max |norm(t) − norm(0)|.
    pub fn norm_drift(&self) -> f64 {
        let n0 = self.samples.first().map(|s| s.norm).unwrap_or(0.0);
        self.samples
            .iter()
            .map(|s| (s.norm - n0).abs())
            .fold(0.0, f64::max)
    }

    /// max |E(t) − E(0)| / |E(0)|.
    pub fn relative_energy_drift(&self) -> f64 {
        let e0 = self.samples.first().map(|s| s.energy).unwrap_or(0.0);
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs() / e0.abs())
            .fold(0.0, f64::max)
    }

    /// max_t |Σ populations − norm|.
    pub fn population_closure(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.populations.iter().sum::<f64>() - s.norm).abs())
            .fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}
