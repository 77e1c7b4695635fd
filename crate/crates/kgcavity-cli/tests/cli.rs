//! Per-subcommand contract checks against the built binary: file outputs,
//! validation messages, exit statuses.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kgcavity"))
}

fn write_config(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pairs_emits_unique_pair_and_compton_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "pairs.conf",
        "mass = 9.42477796076938\nlength = 1.0\ndelta_t = 1.0\n",
    );
    let out = run(&[
        "pairs",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("pairs.json"));
    assert_eq!(v["pair_count"], 1);
    assert_eq!(v["pairs"][0]["n_x"], 4);
    assert_eq!(v["pairs"][0]["n_t"], 5);
    assert_eq!(v["form"], "dispersion");
    // Compton bound for n_t = 5: 5*pi/(3*pi) = 5/3.
    let bound = v["compton_bounds"][0]["bound"].as_f64().unwrap();
    assert!((bound - 5.0 / 3.0).abs() < 1e-12);
    let csv = fs::read_to_string(dir.path().join("pairs.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n_x,n_t,residual");
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn pairs_laser_cavity_is_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "laser.conf",
        "mass = 0\nlength = 1.0\ndelta_t = 1.0\nmax_index = 50\n",
    );
    let out = run(&[
        "pairs",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("pairs.json"));
    assert_eq!(v["pair_count"], 50);
    for (i, p) in v["pairs"].as_array().unwrap().iter().enumerate() {
        assert_eq!(p["n_x"], i as u64 + 1);
        assert_eq!(p["n_t"], i as u64 + 1);
    }
    // Massless: no Compton bound.
    assert!(v["compton_bounds"][0]["bound"].is_null());
}

#[test]
fn missing_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.conf", "mass = 1.0\ndelta_t = 1.0\n");
    let out = run(&["pairs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`length`"), "stderr: {stderr}");
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "typo.conf",
        "mass = 1.0\nlength = 1.0\ndelta_t = 1.0\nlenght = 2.0\n",
    );
    let out = run(&["pairs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`lenght`"));
}

#[test]
fn bvp_zero_boundaries_feasible_zero_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bvp0.conf",
        "mass = 1.0\nlength = 1.0\ndelta_t = 0.7\nn_space = 5\nn_time = 4\n\
         initial_coeffs = 0, 0\nfinal_coeffs = 0, 0\n",
    );
    let out = run(&[
        "bvp",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("bvp.json"));
    assert_eq!(v["feasible"], true);
    assert_eq!(v["kge_residual_max"].as_f64().unwrap(), 0.0);
    let csv = fs::read_to_string(dir.path().join("bvp.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.ends_with(",0.0"), "non-zero sample: {line}");
    }
    // 6 time rows x 7 space columns + header.
    assert_eq!(csv.lines().count(), 1 + 6 * 7);
}

#[test]
fn bvp_single_mode_matches_analytic_solution() {
    // omega = 2 cavity (massless, L = pi/2), dt = pi/4: a(t) = cos(2t).
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bvp1.conf",
        "mass = 0\nlength = 1.5707963267948966\ndelta_t = 0.7853981633974483\n\
         n_space = 9\nn_time = 8\ninitial_coeffs = 1.0\nfinal_coeffs = 0.0\n",
    );
    let out = run(&[
        "bvp",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("bvp.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let (t, x, phi) = (cols[0], cols[1], cols[2]);
        let want = (2.0 * t).cos() * (2.0 * x).sin();
        assert!(
            (phi - want).abs() < 1e-10,
            "phi({t},{x}) = {phi}, want {want}"
        );
    }
}

#[test]
fn bvp_resonant_incompatible_reports_infeasible() {
    // omega_1*dt = pi with incompatible endpoints (needs beta = -alpha).
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bvpres.conf",
        "mass = 0\nlength = 1.0\ndelta_t = 1.0\nn_space = 4\nn_time = 4\n\
         initial_coeffs = 1.0\nfinal_coeffs = 1.0\n",
    );
    let out = run(&[
        "bvp",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "infeasible is a result, not a failure"
    );
    let v = json(&dir.path().join("bvp.json"));
    assert_eq!(v["feasible"], false);
    assert_eq!(v["modes"][0]["classification"], "infeasible");
    assert!((v["modes"][0]["mismatch"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn bvp_unreadable_profile_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bvpprof.conf",
        "mass = 0\nlength = 1.0\ndelta_t = 0.4\nn_space = 4\nn_time = 4\n\
         initial_profile = /nonexistent/profile.txt\nfinal_coeffs = 0, 0, 0, 0\n",
    );
    let out = run(&["bvp", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bvp_profile_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // Samples of 0.8*sin(pi x / L) on the 5-point interior grid, L = 1.
    let samples: Vec<String> = (1..=5)
        .map(|i| format!("{}", 0.8 * (std::f64::consts::PI * i as f64 / 6.0).sin()))
        .collect();
    let profile = dir.path().join("profile.txt");
    fs::write(&profile, samples.join("\n")).unwrap();
    let cfg = write_config(
        dir.path(),
        "bvpprof2.conf",
        &format!(
            "mass = 0\nlength = 1.0\ndelta_t = 0.4\nn_space = 5\nn_time = 4\n\
             initial_profile = {}\nfinal_coeffs = 0.1, 0, 0, 0, 0\n",
            profile.display()
        ),
    );
    let out = run(&[
        "bvp",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("bvp.json"));
    // Decomposed profile: first coefficient 0.8, rest ~0.
    assert!((v["modes"][0]["coeff_cos"].as_f64().unwrap() - 0.8).abs() < 1e-10);
    assert!(v["modes"][1]["coeff_cos"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn scan_minimal_two_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scan2.conf",
        "mass = 1.0\nlength = 1.0\ndt_min = 0.5\ndt_max = 0.6\nsteps = 2\n",
    );
    let out = run(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3); // header + 2 data rows
    let v = json(&dir.path().join("scan.json"));
    assert_eq!(v["summaries"].as_array().unwrap().len(), 1);
}

#[test]
fn scan_tolerance_sweep_fractions_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scansweep.conf",
        "mass = 9.42477796076938\nlength = 1.0\ndt_min = 0.9\ndt_max = 1.1\nsteps = 501\n\
         tolerances = 1e-5, 1e-4, 1e-3\n",
    );
    let out = run(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("scan.json"));
    let fracs: Vec<f64> = v["summaries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["admissible_fraction"].as_f64().unwrap())
        .collect();
    assert_eq!(fracs.len(), 3);
    assert!(fracs[0] <= fracs[1] && fracs[1] <= fracs[2], "{fracs:?}");
}

#[test]
fn scan_rejects_inverted_window() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scanbad.conf",
        "mass = 1.0\nlength = 1.0\ndt_min = 0.7\ndt_max = 0.6\nsteps = 5\n",
    );
    let out = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pathint_matches_analytic_oracle_and_bruteforce() {
    let dir = tempfile::tempdir().unwrap();
    // omega = 1 (massless, L = pi), dt = pi/2, non-resonant.
    let cfg = write_config(
        dir.path(),
        "pi.conf",
        "mass = 0\nlength = 3.141592653589793\ndelta_t = 1.5707963267948966\n\
         n_x = 1\nn_slices = 256\nalpha = 1.0\nbeta = 0.0\n",
    );
    let out = run(&[
        "pathint",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("pathint.json"));
    let mag = v["magnitude"].as_f64().unwrap();
    let oracle = v["analytic_oracle"]["magnitude"].as_f64().unwrap();
    assert!((mag - oracle).abs() / oracle < 0.01, "{mag} vs {oracle}");
    assert_eq!(v["kernel_rank_deficiency"], 0);

    // Brute-force block on a single-slice case.
    let cfg1 = write_config(
        dir.path(),
        "pi1.conf",
        "mass = 0\nlength = 3.141592653589793\ndelta_t = 1.5707963267948966\n\
         n_x = 1\nn_slices = 1\nalpha = 1.0\nbeta = 0.0\n",
    );
    let out = run(&[
        "pathint",
        "--config",
        cfg1.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--bruteforce",
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("pathint.json"));
    let dmag = v["bruteforce"]["delta_magnitude_rel"].as_f64().unwrap();
    assert!(dmag < 1e-3, "bruteforce delta {dmag}");
}

#[test]
fn pathint_resonant_incompatible_zero_weight() {
    let dir = tempfile::tempdir().unwrap();
    // omega = 1, dt = pi: resonant; alpha = beta = 1 incompatible (n_t = 1 odd).
    let cfg = write_config(
        dir.path(),
        "pires.conf",
        "mass = 0\nlength = 3.141592653589793\ndelta_t = 3.141592653589793\n\
         n_x = 1\nn_slices = 64\nalpha = 1.0\nbeta = 1.0\nsingularity_tol = 1e-4\n",
    );
    let out = run(&[
        "pathint",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("pathint.json"));
    assert_eq!(v["weight"].as_f64().unwrap(), 0.0);
    assert!(v["compatibility_residual"].as_f64().unwrap() > 0.0);
    assert_eq!(v["stationary_phase"]["weight_ratio"].as_f64().unwrap(), 0.0);
    // No classical path: header-only CSV.
    let csv = fs::read_to_string(dir.path().join("pathint.csv")).unwrap();
    assert_eq!(csv, "slice,t,a_classical\n");
}

#[test]
fn pathint_bruteforce_depth_cap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "pideep.conf",
        "mass = 0\nlength = 3.141592653589793\ndelta_t = 1.0\n\
         n_x = 1\nn_slices = 4\nalpha = 0.0\nbeta = 0.0\n",
    );
    let out = run(&["pathint", "--config", cfg.to_str().unwrap(), "--bruteforce"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_slices"));
}

#[test]
fn pathint_nonconvergent_bruteforce_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "piconv.conf",
        "mass = 0\nlength = 3.141592653589793\ndelta_t = 1.5707963267948966\n\
         n_x = 1\nn_slices = 1\nalpha = 1.0\nbeta = 0.0\nbruteforce_tol = 1e-18\n",
    );
    let out = run(&["pathint", "--config", cfg.to_str().unwrap(), "--bruteforce"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("converge"));
}

#[test]
fn dispersion_and_compton_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "disp.conf",
        "mass = 3.0\nk_max = 4.0\nsteps = 5\n",
    );
    let out = run(&[
        "dispersion",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("dispersion.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    // omega(4) = sqrt(9 + 16) = 5.
    assert_eq!(last, "4.0,4.0,5.0");

    let ccfg = write_config(
        dir.path(),
        "compton.conf",
        "units = si\nmass = 9.109e-31\nn_t_max = 1\n",
    );
    let out = run(&[
        "compton",
        "--config",
        ccfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("compton.json"));
    let bound = v["bounds"][0]["bound"].as_f64().unwrap();
    assert!(bound < 1e-20 && bound > 1e-22, "electron bound {bound}");
}

#[test]
fn form_flag_switches_constraint_branch() {
    let dir = tempfile::tempdir().unwrap();
    // m = 5pi: paper-literal form has n_t^2 + n_x^2 = 25.
    let cfg = write_config(
        dir.path(),
        "paper.conf",
        "mass = 15.707963267948966\nlength = 1.0\ndelta_t = 1.0\n",
    );
    let out = run(&[
        "pairs",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--form",
        "paper",
    ]);
    assert!(out.status.success());
    let v = json(&dir.path().join("pairs.json"));
    assert_eq!(v["form"], "paper");
    let got: Vec<(u64, u64)> = v["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["n_x"].as_u64().unwrap(), p["n_t"].as_u64().unwrap()))
        .collect();
    assert_eq!(got, vec![(3, 4), (4, 3)]);
}
