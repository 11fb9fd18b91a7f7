//! Reduced versus full dynamics as a function of the Rabi frequency.

use rayon::prelude::*;

use crate::atomlight::LaserConfig;
use crate::bands::EffectiveHamiltonianSpec;
use crate::dynamics::field::{gaussian_packet, FullField, PacketParams};
use crate::dynamics::frames::FrameGrid;
use crate::dynamics::full::evolve_full;
use crate::dynamics::grid::GridSpec;
use crate::dynamics::reduced::evolve_reduced;
use crate::error::Result;

/// Default bound on √3Ω·dt for the full evolver.
pub const DEFAULT_PHASE_BUDGET: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticRow {
    /// Ω in units of E_r.
    pub omega_recoil: f64,
    /// |⟨mapped reduced|full⟩|² / (‖reduced‖²‖full‖²) at the final time.
    pub overlap: f64,
    /// Ground-doublet fraction of the full state at the final time.
    pub fidelity: f64,
    /// Steps taken by the full evolver.
    pub full_steps: usize,
}

/// Run both representations from the same packet and compare final states.
///
/// `grid.dt` and `grid.n_steps` fix the reduced run and the physical time.
/// The full run uses the largest step not exceeding `grid.dt` or
/// `phase_budget/(√3Ω)` that divides the same time evenly. The Ω values of
/// `config` are replaced by each entry of `omegas_recoil` (in E_r).
pub fn compare_adiabatic(
    config: &LaserConfig,
    grid: &GridSpec,
    packet: &PacketParams,
    omegas_recoil: &[f64],
    phase_budget: f64,
) -> Result<Vec<AdiabaticRow>> {
    let t_final = grid.total_time();
    let initial = gaussian_packet(grid, packet)?;
    let reduced_final = if grid.n_steps == 0 {
        initial.clone()
    } else {
        // The reduced Hamiltonian does not depend on Ω.
        let spec = EffectiveHamiltonianSpec::from_config(config);
        evolve_reduced(
            &spec,
            &initial,
            &grid.clone().with_stride(grid.n_steps.max(1))?,
        )?
        .1
    };

    omegas_recoil
        .par_iter()
        .map(|&w| {
            let cfg = config.with_omega(w * config.recoil_energy())?;
            let frames = FrameGrid::new(&cfg, grid)?;
            let start = FullField::from_spinor_with(&frames, &initial);
            let dt_max = grid
                .dt
                .min(phase_budget / cfg.omega.max(f64::MIN_POSITIVE) / 3f64.sqrt());
            let n = if t_final > 0.0 {
                (t_final / dt_max).ceil() as usize
            } else {
                0
            };
            let (fidelity, end) = if n == 0 {
                (1.0, start)
            } else {
                let g = grid.with_time(t_final / n as f64, n)?.with_stride(n)?;
                let (rep, end) = evolve_full(&cfg, &start, &g)?;
                (rep.last().and_then(|s| s.fidelity).unwrap_or(f64::NAN), end)
            };
            let mapped = FullField::from_spinor_with(&frames, &reduced_final);
            let overlap = mapped.inner(&end).norm_sqr() / (mapped.norm() * end.norm());
            Ok(AdiabaticRow {
                omega_recoil: w,
                overlap,
                fidelity,
                full_steps: n,
            })
        })
        .collect()
}
