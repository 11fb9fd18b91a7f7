//! Subcommand implementations. Each returns `Ok(true)` when its checks pass,
//! `Ok(false)` when a check fails, and `Err` when the run cannot proceed.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tripod_soc::atomlight::{
    build_hamiltonian, hermitian_eigen, rabi_matrix, verify_frame_against_eigensolver, Vec2,
    ORTHOGONALITY_TOL,
};
use tripod_soc::bands::{dispersion, EffectiveHamiltonianSpec, ExternalPotential, KGrid};
use tripod_soc::dynamics::{
    compare_adiabatic, evolve_full, evolve_reduced, gaussian_packet, FullField,
};
use tripod_soc::gauge::{
    convergence_check, gauge_fields_analytic, gauge_fields_numeric, rashba_relabel, GaugeFields,
};
use tripod_soc::io::{report_table, save_snapshot, Column, OutputScales, Table};
use tripod_soc::validation;
use tripod_soc::Error;

use crate::config::{EvolveMode, RunConfig};

/// Options shared by all subcommands after merging flags over the file.
pub struct RunContext {
    pub config: RunConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub rashba: bool,
}

pub const EIGENVALUE_TOL: f64 = 1e-12;
pub const SUBSPACE_TOL: f64 = 1e-10;
pub const GAUGE_TOL: f64 = 1e-6;

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| {
        Error::Io(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })?;
    Ok(())
}

fn write(table: &Table, dir: &Path, name: &str) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    table.write_file(&path)?;
    Ok(path)
}

fn check_coupling(cfg: &tripod_soc::atomlight::LaserConfig) -> Result<()> {
    if cfg.omega == 0.0 {
        return Err(Error::DegenerateCoupling.into());
    }
    let residual = cfg.orthogonality_residual();
    if residual > ORTHOGONALITY_TOL {
        return Err(Error::OrthogonalityViolation { residual }.into());
    }
    Ok(())
}

pub fn spectrum(ctx: &RunContext) -> Result<bool> {
    let cfg = ctx.config.laser()?;
    check_coupling(&cfg)?;
    let units = ctx.config.units();
    let extent = ctx.config.spectrum.extent * units.length();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);

    let mut cols = vec![Column::new("x", "1/kappa"), Column::new("y", "1/kappa")];
    cols.extend((1..=5).map(|n| Column::new(&format!("e{n}"), "hbar*Omega")));
    cols.push(Column::new("eig_dev", "hbar*Omega"));
    cols.push(Column::new("subspace_angle", "rad"));
    let mut table = Table::new(cols)
        .meta("omega", format!("{} E_r", ctx.config.scheme.omega))
        .meta("seed", ctx.seed)
        .meta(
            "analytic_levels",
            "-sqrt3 -sqrt3 0 sqrt3 sqrt3 (hbar*Omega)",
        );

    let (mut worst_dev, mut worst_angle) = (0.0f64, 0.0f64);
    for _ in 0..ctx.config.spectrum.samples {
        let r = Vec2::new(
            rng.random_range(-extent..=extent),
            rng.random_range(-extent..=extent),
        );
        let (vals, _) = hermitian_eigen(&build_hamiltonian(&rabi_matrix(&cfg, &r)));
        let report = verify_frame_against_eigensolver(&cfg, &r)?;
        let dev = report.eigenvalue_deviation / cfg.omega;
        let angle = report.subspace_angle.unwrap_or(f64::NAN);
        worst_dev = worst_dev.max(dev);
        worst_angle = worst_angle.max(angle);
        let mut row = vec![r.x / units.length(), r.y / units.length()];
        row.extend(vals.iter().map(|v| v / cfg.omega));
        row.extend([dev, angle]);
        table.push(row)?;
    }
    let passed = worst_dev <= EIGENVALUE_TOL && worst_angle <= SUBSPACE_TOL;
    let table = table
        .foot(
            "max_eigenvalue_deviation",
            format!("{worst_dev:.3e} hbar*Omega"),
        )
        .foot("max_subspace_angle", format!("{worst_angle:.3e} rad"))
        .foot("status", if passed { "pass" } else { "fail" });
    let path = write(&table, &ctx.out, "spectrum.dat")?;

    let s3 = 3f64.sqrt();
    println!(
        "dressed spectrum (hbar*Omega): {:.6} {:.6} {:.6} {:.6} {:.6}",
        -s3, -s3, 0.0, s3, s3
    );
    println!(
        "{} positions: max eigenvalue deviation {worst_dev:.3e} hbar*Omega (tol {EIGENVALUE_TOL:.0e}), max subspace angle {worst_angle:.3e} rad (tol {SUBSPACE_TOL:.0e})",
        ctx.config.spectrum.samples
    );
    println!("wrote {}", path.display());
    Ok(passed)
}

fn fields_for(ctx: &RunContext, fields: GaugeFields) -> GaugeFields {
    if ctx.rashba {
        rashba_relabel(&fields)
    } else {
        fields
    }
}

pub fn gauge(ctx: &RunContext) -> Result<bool> {
    let cfg = ctx.config.laser()?;
    check_coupling(&cfg)?;
    let units = ctx.config.units();
    let g = &ctx.config.gauge;
    let r = Vec2::new(g.position[0], g.position[1]) * units.length();
    let h = g.step * units.length();

    let analytic = fields_for(ctx, gauge_fields_analytic(&cfg));
    let numeric = fields_for(ctx, gauge_fields_numeric(&cfg, &r, h)?);
    let conv = convergence_check(&cfg, &r, h)?;
    let (kappa, er) = (cfg.kappa, cfg.recoil_energy());

    let mut table = Table::new(vec![
        Column::new("component", "0=A_x,1=A_y,2=Phi"),
        Column::new("s", "1"),
        Column::new("q", "1"),
        Column::new("analytic_re", "hbar*kappa|E_r"),
        Column::new("analytic_im", "hbar*kappa|E_r"),
        Column::new("numeric_re", "hbar*kappa|E_r"),
        Column::new("numeric_im", "hbar*kappa|E_r"),
        Column::new("deviation", "hbar*kappa|E_r"),
    ])
    .meta(
        "position",
        format!("{} {} (1/kappa)", g.position[0], g.position[1]),
    )
    .meta("step", format!("{:e} (1/kappa)", g.step))
    .meta("form", if ctx.rashba { "rashba" } else { "dresselhaus" });

    let mut dev = [0.0f64; 2];
    for (c, (a, n, scale)) in [
        (analytic.a_x, numeric.a_x, kappa),
        (analytic.a_y, numeric.a_y, kappa),
        (analytic.phi, numeric.phi, er),
    ]
    .into_iter()
    .enumerate()
    {
        for s in 0..2 {
            for q in 0..2 {
                let (av, nv) = (a[(s, q)] / scale, n[(s, q)] / scale);
                let d = (av - nv).norm();
                dev[(c == 2) as usize] = dev[(c == 2) as usize].max(d);
                table.push(vec![
                    c as f64, s as f64, q as f64, av.re, av.im, nv.re, nv.im, d,
                ])?;
            }
        }
    }
    let diag = [analytic.a_x, analytic.a_y]
        .iter()
        .flat_map(|m| [m[(0, 0)].norm(), m[(1, 1)].norm()])
        .fold(0.0, f64::max)
        / kappa;
    let passed = dev[0] <= GAUGE_TOL && dev[1] <= GAUGE_TOL;
    let table = table
        .foot("max_vector_deviation", format!("{:.3e} hbar*kappa", dev[0]))
        .foot("max_scalar_deviation", format!("{:.3e} E_r", dev[1]))
        .foot("vector_order", format!("{:.3}", conv.vector_order()))
        .foot("scalar_order", format!("{:.3}", conv.scalar_order()))
        .foot("max_diagonal_A", format!("{diag:.3e} hbar*kappa"))
        .foot("status", if passed { "pass" } else { "fail" });
    let path = write(&table, &ctx.out, "gauge.dat")?;

    let show = |name: &str, m: &tripod_soc::gauge::Mat2, scale: f64, unit: &str| {
        println!(
            "{name} [{unit}] = [[{:+.6}{:+.6}i, {:+.6}{:+.6}i], [{:+.6}{:+.6}i, {:+.6}{:+.6}i]]",
            m[(0, 0)].re / scale,
            m[(0, 0)].im / scale,
            m[(0, 1)].re / scale,
            m[(0, 1)].im / scale,
            m[(1, 0)].re / scale,
            m[(1, 0)].im / scale,
            m[(1, 1)].re / scale,
            m[(1, 1)].im / scale
        );
    };
    println!("analytic:");
    show("  A_x", &analytic.a_x, kappa, "hbar*kappa");
    show("  A_y", &analytic.a_y, kappa, "hbar*kappa");
    show("  Phi", &analytic.phi, er, "E_r");
    println!("numeric (step {:e}/kappa):", g.step);
    show("  A_x", &numeric.a_x, kappa, "hbar*kappa");
    show("  A_y", &numeric.a_y, kappa, "hbar*kappa");
    show("  Phi", &numeric.phi, er, "E_r");
    println!(
        "max deviation: A {:.3e} hbar*kappa, Phi {:.3e} E_r (tol {GAUGE_TOL:.0e}); convergence order A {:.3}, Phi {:.3}; max |diagonal A| {diag:.3e} hbar*kappa",
        dev[0],
        dev[1],
        conv.vector_order(),
        conv.scalar_order()
    );
    println!("wrote {}", path.display());
    Ok(passed)
}

pub fn bands(ctx: &RunContext) -> Result<bool> {
    let b = &ctx.config.bands;
    let units = ctx.config.units();
    let (kappa, mass) = (ctx.config.scheme.kappa, ctx.config.scheme.mass);
    let spec = if b.zero_coupling {
        EffectiveHamiltonianSpec::free(kappa, mass)
    } else {
        let cfg = ctx.config.laser()?;
        check_coupling(&cfg)?;
        let spec = EffectiveHamiltonianSpec::from_config(&cfg);
        let fields = fields_for(ctx, spec.fields.clone());
        spec.with_fields(fields)
    };
    let grid = KGrid::polar(b.k_max * units.momentum(), b.n_radial, b.n_angle);
    let d = dispersion(&spec, &grid)?;

    let (kp, er) = (units.momentum(), units.energy());
    let mut table = Table::new(vec![
        Column::new("kx", "kappa"),
        Column::new("ky", "kappa"),
        Column::new("E_lower", "E_r"),
        Column::new("E_upper", "E_r"),
    ])
    .meta(
        "coupling",
        if b.zero_coupling { "none" } else { "geometric" },
    )
    .meta("form", if ctx.rashba { "rashba" } else { "dresselhaus" });
    for (i, k) in d.k_grid.iter().enumerate() {
        table.push(vec![
            k.x / kp,
            k.y / kp,
            d.lower_band[i] / er,
            d.upper_band[i] / er,
        ])?;
    }
    let table = table
        .foot("ring_radius", format!("{:.9} kappa", d.ring_radius / kp))
        .foot("min_energy", format!("{:.9} E_r", d.min_energy / er))
        .foot("gap_at_ring", format!("{:.9} E_r", d.gap_at_ring / er))
        .foot(
            "radial_spacing",
            format!("{:.3e} kappa", d.radial_spacing / kp),
        );
    let path = write(&table, &ctx.out, "bands.dat")?;
    println!(
        "ring radius {:.6} kappa, minimum {:.6} E_r, gap at ring {:.6} E_r (radial spacing {:.2e} kappa)",
        d.ring_radius / kp,
        d.min_energy / er,
        d.gap_at_ring / er,
        d.radial_spacing / kp
    );
    println!("wrote {}", path.display());
    Ok(true)
}

pub fn evolve(ctx: &RunContext) -> Result<bool> {
    let ev = &ctx.config.evolve;
    let cfg = ctx.config.laser()?;
    let grid = ctx.config.grid()?;
    let packet = ctx.config.packet();
    let units = ctx.config.units();
    let scales = OutputScales {
        time: units.time(),
        length: units.length(),
        energy: units.energy(),
        time_unit: "hbar/E_r",
        length_unit: "1/kappa",
        energy_unit: "E_r",
    };
    if ctx.rashba && ev.mode != EvolveMode::Reduced {
        return Err(Error::InvalidParameter {
            name: "rashba",
            value: 1.0,
            reason: "the relabelled form applies to reduced dynamics only",
        }
        .into());
    }
    ensure_dir(&ctx.out)?;

    match ev.mode {
        EvolveMode::Reduced => {
            if cfg.omega > 0.0 {
                check_coupling(&cfg)?;
            }
            let mut spec = EffectiveHamiltonianSpec::from_config(&cfg);
            spec = spec.clone().with_fields(fields_for(ctx, spec.fields));
            if ev.trap_frequency != 0.0 {
                spec = spec.with_potential(ExternalPotential::Harmonic {
                    frequency: ev.trap_frequency * units.energy(),
                });
            }
            let init = gaussian_packet(&grid, &packet)?;
            let (rep, end) = evolve_reduced(&spec, &init, &grid)?;
            let table = report_table(&rep, &scales)?
                .foot("norm_drift", format!("{:.3e}", rep.norm_drift()))
                .foot(
                    "relative_energy_drift",
                    format!("{:.3e}", rep.relative_energy_drift()),
                );
            let path = write(&table, &ctx.out, "observables.dat")?;
            println!(
                "reduced: {} steps, norm drift {:.3e}, relative energy drift {:.3e}",
                grid.n_steps,
                rep.norm_drift(),
                rep.relative_energy_drift()
            );
            println!("wrote {}", path.display());
            if ev.snapshot {
                let p = ctx.out.join("final.snap");
                save_snapshot(&p, &end.psi, grid.lx, grid.ly, grid.total_time())?;
                println!("wrote {}", p.display());
            }
        }
        EvolveMode::Full => {
            check_coupling(&cfg)?;
            let init = FullField::from_spinor(&cfg, &gaussian_packet(&grid, &packet)?)?;
            let (rep, end) = evolve_full(&cfg, &init, &grid)?;
            let table = report_table(&rep, &scales)?
                .foot("norm_drift", format!("{:.3e}", rep.norm_drift()))
                .foot(
                    "relative_energy_drift",
                    format!("{:.3e}", rep.relative_energy_drift()),
                );
            let path = write(&table, &ctx.out, "observables.dat")?;
            let fid = rep.fidelities().into_iter().fold(1.0, f64::min);
            println!(
                "full: {} steps, norm drift {:.3e}, minimum ground-doublet fidelity {fid:.6}",
                grid.n_steps,
                rep.norm_drift()
            );
            println!("wrote {}", path.display());
            if ev.snapshot {
                let p = ctx.out.join("final.snap");
                save_snapshot(&p, &end.psi, grid.lx, grid.ly, grid.total_time())?;
                println!("wrote {}", p.display());
            }
        }
        EvolveMode::Adiabatic => {
            if ev.omegas.is_empty() {
                bail!(Error::InvalidParameter {
                    name: "evolve.omegas",
                    value: 0.0,
                    reason: "the sweep needs at least one value",
                });
            }
            check_coupling(&cfg.with_omega(1.0)?)?;
            let rows = compare_adiabatic(&cfg, &grid, &packet, &ev.omegas, ev.phase_budget)?;
            let monotone = rows.windows(2).all(|w| w[1].overlap >= w[0].overlap);
            let mut table = Table::new(vec![
                Column::new("omega", "E_r"),
                Column::new("overlap", "1"),
                Column::new("fidelity", "1"),
                Column::new("full_steps", "1"),
            ])
            .meta(
                "time",
                format!("{} hbar/E_r", grid.total_time() / units.time()),
            );
            for r in &rows {
                table.push(vec![
                    r.omega_recoil,
                    r.overlap,
                    r.fidelity,
                    r.full_steps as f64,
                ])?;
                println!(
                    "Omega = {:7.2} E_r: overlap {:.6}, fidelity {:.6}",
                    r.omega_recoil, r.overlap, r.fidelity
                );
            }
            let table = table.foot("monotone", monotone);
            let path = write(&table, &ctx.out, "adiabatic.dat")?;
            println!("overlap monotone in Omega: {monotone}");
            println!("wrote {}", path.display());
        }
    }
    Ok(true)
}

pub fn validate(ctx: &RunContext) -> Result<bool> {
    let outcomes = validation::run_all(ctx.seed);
    let mut text = String::new();
    for o in &outcomes {
        println!("{o}");
        text.push_str(&format!(
            "[{}] criterion {} ({}): {}; required {}\n",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.measured,
            o.threshold
        ));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    ensure_dir(&ctx.out)?;
    let path = ctx.out.join("validation.txt");
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(passed == outcomes.len())
}
