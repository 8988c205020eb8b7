use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxopt"))
        .args(args)
        .output()
        .expect("spawn fluxopt")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.conf");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn singleton_range_gives_one_row() {
    let cfg = config("fluxonium_ec2p5.conf");
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--n-min",
        "68",
        "--n-max",
        "68",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "N,T_phi_us,T1_us,T2_us,f01_GHz,EJa_over_ECa,eps0_GHz,eps1_GHz"
    );
    assert!(lines[1].starts_with("68,"));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("n_opt = 68"));
}

#[test]
fn summary_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let summary = dir.path().join("summary.json");
    let cfg = config("fluxonium_ec0p55.conf");
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--n-max",
        "30",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let s: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["n_opt"], 12);
    for key in ["t2_opt", "band_low", "band_high"] {
        assert!(s[key].is_number(), "{key}");
    }
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 30);
}

#[test]
fn csv_fields_are_finite_or_inf() {
    let dir = tempfile::tempdir().unwrap();
    // without end-node coupling two junctions cannot relax: T1 = inf at N = 2
    let cfg = write_config(
        dir.path(),
        "qubit.e_c_ghz = 0.55\nqubit.e_j_ghz = 2.2\nqubit.e_l_ghz = 0.72\nqubit.cd_ratio = 0\nsweep.n_min = 2\nsweep.n_max = 6\n",
    );
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut saw_inf = false;
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            if field == "inf" {
                saw_inf = true;
            } else {
                assert!(field.parse::<f64>().unwrap().is_finite(), "{field}");
            }
        }
    }
    assert!(saw_inf);
    assert!(text.lines().nth(1).unwrap().split(',').nth(2) == Some("inf"));
}

#[test]
fn derive_reports_black_sheep_scale() {
    let cfg = config("fluxonium_ec0p55.conf");
    let out = run(&[
        "derive",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines().nth(1).unwrap().starts_with("12,0.73,"),
        "{text}"
    );
}

#[test]
fn spectrum_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("wf.dat");
    let cfg = config("fluxonium_ec0p55.conf");
    let out = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["f01_GHz"].as_f64().unwrap() - 0.4765319982).abs() < 1e-6);
    let text = fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("# level")).count(), 2);
}

#[test]
fn oracle_scan_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "qubit.e_c_ghz = 0.25\nqubit.e_j_ghz = 0.5\nqubit.e_l_ghz = 5\noracle.n_values = 2\noracle.n_max = 8\noracle.scan_points = 5\n",
    );
    let out = run(&[
        "oracle",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,Q_e,E0_GHz,E1_GHz");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("2,2,"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "qubit.e_c_ghz = 0.5\nqubit.e_j_ghz = 2\nqubit.e_l_ghz = 1\nqubit.lambda = 3\n",
    );
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("line 4") && err.contains("qubit.lambda"),
        "{err}"
    );

    let out = run(&[
        "sweep",
        "--config",
        dir.path().join("missing.conf").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["sweep"]);
    assert_eq!(out.status.code(), Some(2));

    let good = config("fluxonium_ec0p55.conf");
    let out = run(&[
        "sweep",
        "--config",
        good.to_str().unwrap(),
        "--lambda",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // a grid far narrower than the wavefunction cannot be widened enough
    let cfg = write_config(
        dir.path(),
        "qubit.e_c_ghz = 1\nqubit.e_j_ghz = 1\nqubit.e_l_ghz = 1e-6\nsolver.theta_max = 1\n",
    );
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    let cfg = config("fluxonium_ec2p5.conf");
    let p = cfg.to_str().unwrap();
    let a = run(&["sweep", "--config", p, "--n-max", "80", "--jobs", "2"]).stdout;
    let b = run(&["sweep", "--config", p, "--n-max", "80", "--jobs", "3"]).stdout;
    assert_eq!(a, b);
    let a = run(&[
        "sweep", "--config", p, "--n-max", "80", "--format", "json", "--jobs", "1",
    ])
    .stdout;
    let b = run(&[
        "sweep", "--config", p, "--n-max", "80", "--format", "json", "--jobs", "5",
    ])
    .stdout;
    assert_eq!(a, b);
}
