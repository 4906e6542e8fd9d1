use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cornerscale_core::io::{read_matrix, Matrix};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cornerscale"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

const BARRIER: &str = r#"
[model]
potentials = [{ mode = 0, potential = { kind = "barrier", height = 8.0, start = 1.0, end = 2.0 } }]
[numerics]
length = 16.0
points = 400
max_energy = 8.0
scaling_radius = 3.0
richardson_levels = 0
stability_tolerance = 1e-3
"#;

#[test]
fn free_model_gives_a_header_only_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "free.toml",
        "[numerics]\nlength = 6.0\npoints = 100\nrichardson_levels = 0\n",
    );
    let out = dir.path().join("out");
    let o = run(&[
        "resonances",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        data_lines(&out.join("resonances.csv")),
        vec!["re,im,residual,theta_spread,mode,method,kind,multiplicity"]
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.toml", BARRIER);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, threads) in [(&a, "1"), (&b, "2")] {
        let o = bin()
            .args([
                "resonances",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .env("CORNERSCALE_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["resonances.csv", "resonances.svg"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let text = std::fs::read_to_string(a.join("resonances.csv")).unwrap();
    for key in [
        "# config_sha256: ",
        "# grid: L=16 n=400",
        "# tolerances: rays=0.02 stability=0.001",
    ] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
    // The narrow barrier resonance, unrefined on this grid.
    let rows = data_lines(&a.join("resonances.csv"));
    assert_eq!(rows.len(), 2, "{rows:?}");
    let cells: Vec<&str> = rows[1].split(',').collect();
    let (re, im): (f64, f64) = (cells[0].parse().unwrap(), cells[1].parse().unwrap());
    assert!(
        (re - 4.9997706).abs() < 1e-3 && (im + 0.0861884).abs() < 1e-3,
        "{re} {im}"
    );
}

#[test]
fn rays_share_the_direction_of_theta_prime() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "[model.cross_section]\nkind = \"circle\"\nradius = 1.0\n[numerics]\ntheta = [0.4, 0.3]\n",
    );
    let out = dir.path().join("out");
    let o = run(&[
        "essential-spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    // θ′ = (1 + θ)^{-2}, so arg θ′ = −2 arg(1.4 + 0.3i).
    let expected = -2.0 * 0.3f64.atan2(1.4);
    let rows = data_lines(&out.join("rays.csv"));
    assert_eq!(
        rows[0],
        "origin_re,origin_im,direction_re,direction_im,arg,label"
    );
    let origins: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(origins, vec![0.0, 1.0, 4.0, 9.0]);
    for r in &rows[1..] {
        let arg: f64 = r.split(',').nth(4).unwrap().parse().unwrap();
        assert!((arg - expected).abs() < 1e-14, "{arg} vs {expected}");
    }
    assert!(out.join("rays.svg").exists());
}

#[test]
fn oracle_agrees_with_the_grid_spectrum() {
    let o = run(&["oracle", "well", "-V0", "5", "-a", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let exact: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((exact + 0.931426119417670).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.toml",
        "[model]\npotentials = [{ mode = 0, potential = { kind = \"square_well\", depth = 5.0, width = 1.0 } }]\n",
    );
    let out = dir.path().join("out");
    let o = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = data_lines(&out.join("spectrum.csv"));
    assert_eq!(rows.len(), 2);
    let refined: f64 = rows[1].split(',').nth(4).unwrap().parse().unwrap();
    assert!((refined - exact).abs() < 1e-4, "{refined} vs {exact}");
}

#[test]
fn schema_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("unknown.toml", "[numerics]\nlenght = 3.0\n"),
        ("theta.toml", "[numerics]\ntheta = [0.1, 0.9]\n"),
        ("support.toml", "[model]\npotentials = [{ mode = 0, potential = { kind = \"barrier\", height = 1.0, start = 1.0, end = 5.0 } }]\n[numerics]\nscaling_radius = 2.0\n"),
        ("geometry.toml", "[model]\ngeometry = \"cusp\"\n"),
    ] {
        let cfg = write_config(dir.path(), name, body);
        let o = run(&["resonances", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&[
        "run",
        "--config",
        write_config(dir.path(), "e.toml", "").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_checks_are_warnings_not_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.toml",
        "[task.parametrix]\nratio = 0.01\n[output]\nformats = [\"csv\", \"matrix\"]\n",
    );
    let out = dir.path().join("out");
    let o = run(&[
        "parametrix-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: "));
    let w = data_lines(&out.join("warnings.csv"));
    assert!(w[1].contains("decay check fails"), "{w:?}");

    // The exported kernel has the same largest singular value as the table.
    let m = match read_matrix(&mut std::fs::File::open(out.join("parametrix_g_0.csmx")).unwrap())
        .unwrap()
    {
        Matrix::Complex(m) => m,
        Matrix::Real(_) => panic!("expected a complex matrix"),
    };
    assert_eq!(m.nrows(), m.ncols());
    let sigma1: f64 = data_lines(&out.join("parametrix.csv"))[1]
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    let frob: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(sigma1 <= frob * (1.0 + 1e-12) && sigma1 > 0.0);
}

#[test]
fn run_uses_the_task_command_and_schema_prints_a_valid_config() {
    let o = run(&["schema"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(cornerscale_cli::RunConfig::parse(&text).is_ok());

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "r.toml",
        "[model]\ngeometry = \"cusp\"\n[numerics]\npoints = 2000\nlevels = 2\n[task]\ncommand = \"spectrum\"\n",
    );
    let out = dir.path().join("out");
    let o = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_lines(&out.join("spectrum.csv"));
    let edge: f64 = rows[1].split(',').next_back().unwrap().parse().unwrap();
    assert!((edge - 0.25).abs() < 1e-3, "{edge}");
}

#[test]
fn barrier_oracle_takes_negative_bounds_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "oracle",
        "barrier",
        "--height",
        "8",
        "--start",
        "1",
        "--end",
        "2",
        "--re",
        "4.8",
        "5.2",
        "--im",
        "-0.2",
        "-0.02",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_lines(&dir.path().join("oracle.csv"));
    assert_eq!(rows[0], "index,re,im,kind");
    let cells: Vec<&str> = rows[1].split(',').collect();
    let (re, im): (f64, f64) = (cells[1].parse().unwrap(), cells[2].parse().unwrap());
    assert!((re - 4.9997706058).abs() < 1e-9 && (im + 0.0861884442).abs() < 1e-9);
    assert_eq!(rows.len(), 2);
}
