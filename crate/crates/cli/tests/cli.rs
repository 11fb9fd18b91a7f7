use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use tripod_soc::io::{load_snapshot, Table};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripod-soc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn table(path: &Path) -> Table {
    Table::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_succeeds_and_creates_default_output_dir() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["spectrum"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = table(&dir.path().join("results/spectrum.dat"));
    assert_eq!(t.rows.len(), 100);
    assert_eq!(t.lookup("status"), Some("pass"));
}

#[test]
fn nested_output_dir_is_created() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--out", "a/b/c", "bands"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("a/b/c/bands.dat").exists());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let c = config(dir.path(), "[scheme]\nomgea = 3.0\n");
    let out = run(dir.path(), &["--config", &c, "spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omgea"));
}

#[test]
fn zero_coupling_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let c = config(dir.path(), "[scheme]\nomega = 0.0\n");
    for cmd in ["spectrum", "gauge", "bands"] {
        let out = run(dir.path(), &["--config", &c, cmd]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    }
}

#[test]
fn non_orthogonal_phases_report_the_residual() {
    let dir = TempDir::new().unwrap();
    let c = config(
        dir.path(),
        "[scheme]\nphases = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]\n",
    );
    let out = run(dir.path(), &["--config", &c, "gauge"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("orthogonality") && err.contains("3.000e0"),
        "{err}"
    );
}

#[test]
fn unwritable_output_path_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("blocker"), "").unwrap();
    let out = run(dir.path(), &["--out", "blocker/sub", "bands"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.starts_with("error:") && !err.contains("panicked"),
        "{err}"
    );
}

#[test]
fn bad_usage_exits_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(dir.path(), &["--seed", "x", "spectrum"]).status.code(),
        Some(2)
    );
}

#[test]
fn same_seed_gives_identical_output() {
    let dir = TempDir::new().unwrap();
    for (out, seed) in [("a", "7"), ("b", "7"), ("c", "8")] {
        assert!(run(dir.path(), &["--out", out, "--seed", seed, "spectrum"])
            .status
            .success());
    }
    let read = |d: &str| std::fs::read(dir.path().join(d).join("spectrum.dat")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn bands_report_ring_and_free_limit() {
    let dir = TempDir::new().unwrap();
    assert!(run(dir.path(), &["--out", "soc", "bands"]).status.success());
    let t = table(&dir.path().join("soc/bands.dat"));
    let r: f64 = t
        .lookup("ring_radius")
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((r - 0.25).abs() <= 0.0039, "{r}");

    let c = config(dir.path(), "[bands]\nzero_coupling = true\n");
    assert!(run(dir.path(), &["--config", &c, "--out", "free", "bands"])
        .status
        .success());
    let t = table(&dir.path().join("free/bands.dat"));
    let (k, lo, hi) = (
        t.column("kx").unwrap(),
        t.column("E_lower").unwrap(),
        t.column("E_upper").unwrap(),
    );
    let ky = t.column("ky").unwrap();
    for i in 0..k.len() {
        let e = k[i] * k[i] + ky[i] * ky[i];
        assert!((lo[i] - e).abs() < 1e-12 && (hi[i] - e).abs() < 1e-12);
    }
}

#[test]
fn rashba_flag_swaps_vector_potential_components() {
    let dir = TempDir::new().unwrap();
    assert!(run(dir.path(), &["--out", "d", "gauge"]).status.success());
    assert!(run(dir.path(), &["--out", "r", "--rashba", "gauge"])
        .status
        .success());
    let d = table(&dir.path().join("d/gauge.dat"));
    let r = table(&dir.path().join("r/gauge.dat"));
    // Rows are (component, s, q) with A_x first, then A_y, then Φ.
    let block = |t: &Table, c: usize| -> Vec<Vec<f64>> {
        t.rows[4 * c..4 * c + 4]
            .iter()
            .map(|row| row[3..5].to_vec())
            .collect()
    };
    assert_ne!(block(&d, 0), block(&d, 1));
    assert_eq!(r.lookup("form"), Some("rashba"));
    assert_eq!(block(&r, 2), block(&d, 2));
    // Both forms are off-diagonal with |entries| = κ/4.
    for t in [&d, &r] {
        for c in 0..2 {
            let b = block(t, c);
            assert!(b[0][0].abs() + b[0][1].abs() + b[3][0].abs() + b[3][1].abs() < 1e-15);
            assert!(((b[1][0].powi(2) + b[1][1].powi(2)).sqrt() - 0.25).abs() < 1e-12);
        }
    }
    assert_ne!(block(&d, 0), block(&r, 0));
}

#[test]
fn reduced_evolution_writes_observables_and_snapshot() {
    let dir = TempDir::new().unwrap();
    let c = config(
        dir.path(),
        "[grid]\npoints = [64, 64]\nsize = [32.0, 32.0]\nsteps = 40\nstride = 10\n[packet]\nwidth = 3.0\n[evolve]\nsnapshot = true\n",
    );
    let out = run(dir.path(), &["--config", &c, "--out", "ev", "evolve"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = table(&dir.path().join("ev/observables.dat"));
    let times = t.column("t").unwrap();
    assert_eq!(times.len(), 5);
    assert!((times[4] - 0.4).abs() < 1e-12);
    for n in t.column("norm").unwrap() {
        assert!((n - 1.0).abs() < 1e-10);
    }
    let (header, psi) = load_snapshot(&dir.path().join("ev/final.snap")).unwrap();
    assert_eq!(psi.dim(), (2, 64, 64));
    assert!(
        (header.time - 0.8).abs() < 1e-12,
        "snapshot time is internal: {}",
        header.time
    );
}

#[test]
fn rashba_rejected_for_full_dynamics() {
    let dir = TempDir::new().unwrap();
    let c = config(dir.path(), "[evolve]\nmode = \"full\"\n");
    assert_eq!(
        run(dir.path(), &["--config", &c, "--rashba", "evolve"])
            .status
            .code(),
        Some(2)
    );
}
