//! End-to-end tests of the h2mol binary: golden outputs against frozen
//! reference values, byte-identical reruns, cache behavior including
//! corruption recovery, config-file merging, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

/// Command for the built binary with a hermetic environment.
fn bin(cache: &Path) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_h2mol"));
    c.env_remove("H2MOL_CACHE_DIR");
    c.arg("--cache-dir").arg(cache);
    c
}

fn run(cache: &Path, args: &[&str]) -> Output {
    bin(cache)
        .args(args)
        .output()
        .expect("binary spawns")
}

/// Runs expecting success and returns stdout.
fn run_ok(cache: &Path, args: &[&str]) -> String {
    let out = run(cache, args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON output")
}

fn num(v: &serde_json::Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing numeric field {key} in {v}"))
}

#[test]
fn integrals_document_matches_reference_values() {
    let dir = TempDir::new().unwrap();
    let text = run_ok(
        dir.path(),
        &["integrals", "--R", "1.41968", "--alpha", "1.199206"],
    );
    let doc = json(&text);
    assert_eq!(doc["schema_version"], 1);

    // Values frozen from an independent implementation.
    let ints = &doc["integrals_ry"];
    let wants = [
        ("eps", -1.749493),
        ("t", -0.737679),
        ("u", 1.661254),
        ("k", 0.962045),
        ("j", 0.022040),
        ("v", -0.011851),
    ];
    for (key, want) in wants {
        assert!(
            (num(ints, key) - want).abs() < 1e-4,
            "{key}: {} vs {want}",
            num(ints, key)
        );
    }

    // Each closed form is cross-checked by its quadrature twin.
    let oracle = doc["oracle"].as_array().expect("oracle array");
    assert_eq!(oracle.len(), 7);
    for entry in oracle {
        let err = num(entry, "error_estimate");
        assert!(err >= 0.0 && err < 1e-8, "oracle error {err}");
    }
}

#[test]
fn spectrum_document_reports_phase_and_complex_shape() {
    let dir = TempDir::new().unwrap();
    let text = run_ok(
        dir.path(),
        &[
            "spectrum",
            "--R",
            "1.41968",
            "--alpha",
            "1.199206",
            "--gamma",
            "0.6",
        ],
    );
    let doc = json(&text);
    assert_eq!(doc["pt_broken"], true);
    assert!(num(&doc, "a_minus_b") > 0.0);

    let energies = doc["energies_ry"].as_array().expect("energy array");
    assert_eq!(energies.len(), 6);
    // Complex values must be {"re", "im"} objects, not bare pairs.
    for e in energies {
        assert!(e.get("re").is_some() && e.get("im").is_some(), "shape {e}");
    }
    // The complex pair is conjugate: E5 below the axis, E6 above.
    assert!(num(&energies[4], "im") < 0.0);
    assert!((num(&energies[4], "im") + num(&energies[5], "im")).abs() < 1e-12);
}

#[test]
fn equilibrium_document_matches_reference_row() {
    let dir = TempDir::new().unwrap();
    let doc = json(&run_ok(dir.path(), &["equilibrium", "--gamma", "0"]));
    // Reference equilibrium row at zero coupling.
    assert!((num(&doc, "r0") - 1.41968).abs() < 2e-3);
    assert!((num(&doc, "alpha0") - 1.199206).abs() < 2e-3);
    assert!((num(&doc, "e_total") - (-2.323011)).abs() < 5e-4);
    assert_eq!(doc["stability"], "Stable");
}

#[test]
fn sweep_csv_is_byte_identical_across_cache_states() {
    let dir = TempDir::new().unwrap();
    let args = ["sweep", "--gamma-from", "0", "--gamma-to", "0.4", "--steps", "3"];
    let fresh = run_ok(dir.path(), &args);
    let cached = run_ok(dir.path(), &args);
    let mut bypass_args = args.to_vec();
    bypass_args.push("--no-cache");
    let bypass = run_ok(dir.path(), &bypass_args);
    assert_eq!(fresh, cached, "cache hit changed the bytes");
    assert_eq!(fresh, bypass, "cache bypass changed the bytes");

    let mut lines = fresh.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma_Ry,R0_a0,alpha0_inv_a0,E_total_Ry,E_diss_Ry,stability"
    );
    assert_eq!(fresh.lines().count(), 4, "header plus one row per point");
    for row in lines {
        assert_eq!(row.split(',').count(), 6);
        assert!(row.ends_with("Stable"));
    }
}

#[test]
fn sweep_points_share_the_equilibrium_cache() {
    let dir = TempDir::new().unwrap();
    run_ok(dir.path(), &["equilibrium", "--gamma", "0.2"]);
    let before = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(before, 1);

    // A sweep through the same coupling adds only the two new points.
    run_ok(
        dir.path(),
        &["sweep", "--gamma-from", "0.1", "--gamma-to", "0.3", "--steps", "3"],
    );
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);

    // Rerunning adds nothing: every point is a hit.
    run_ok(
        dir.path(),
        &["sweep", "--gamma-from", "0.1", "--gamma-to", "0.3", "--steps", "3"],
    );
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn changed_tolerance_is_a_cache_miss() {
    let dir = TempDir::new().unwrap();
    let base = ["td-sweep", "--from", "0.5", "--to", "0.5", "--steps", "1"];
    run_ok(dir.path(), &base);
    let n1 = std::fs::read_dir(dir.path()).unwrap().count();
    let mut loose = base.to_vec();
    loose.extend(["--rtol", "1e-8"]);
    run_ok(dir.path(), &loose);
    let n2 = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(n2 > n1, "changed tolerance must not reuse the record");
}

#[test]
fn corrupt_cache_record_recovers_with_warning() {
    let dir = TempDir::new().unwrap();
    let first = run_ok(dir.path(), &["equilibrium", "--gamma", "0.25"]);
    let record = std::fs::read_dir(dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    std::fs::write(&record, "not json at all {{{").unwrap();

    let out = run(dir.path(), &["equilibrium", "--gamma", "0.25"]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("corrupt"), "no warning in: {stderr}");
    assert_eq!(first, String::from_utf8(out.stdout).unwrap());

    // The rewrite repaired the record: next run hits silently.
    let out = run(dir.path(), &["equilibrium", "--gamma", "0.25"]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    assert_eq!(first, String::from_utf8(out.stdout).unwrap());
}

#[test]
fn config_file_supplies_values_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"schema_version":1,"gamma":0.5}"#).unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_config = json(&run_ok(dir.path(), &["equilibrium", "--config", cfg]));
    assert_eq!(num(&from_config, "gamma"), 0.5);

    let overridden = json(&run_ok(
        dir.path(),
        &["equilibrium", "--config", cfg, "--gamma", "0"],
    ));
    assert_eq!(num(&overridden, "gamma"), 0.0);
}

#[test]
fn malformed_requests_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"schema_version":1,"gamm":0.5}"#).unwrap();

    let cases: Vec<Vec<&str>> = vec![
        // Unknown config key.
        vec!["equilibrium", "--config", cfg.to_str().unwrap()],
        // Missing required parameter.
        vec!["equilibrium"],
        // Domain refusals.
        vec!["equilibrium", "--gamma=-0.5"],
        vec!["phonons", "--gamma", "1.2"],
        vec!["density", "--gamma", "0", "--plane", "xy"],
        // Empty range.
        vec!["sweep", "--gamma-from", "0.5", "--gamma-to", "0.1", "--steps", "3"],
        // Non-positive tolerance.
        vec!["dynamics", "--gamma", "0.5", "--rtol", "0"],
        // Unknown subcommand.
        vec!["no-such-command"],
    ];
    for args in cases {
        let out = run(dir.path(), &args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {:?}: stderr {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty(), "args {args:?} left stderr empty");
    }
}

#[test]
fn help_and_version_exit_0() {
    let dir = TempDir::new().unwrap();
    assert!(run(dir.path(), &["--help"]).status.success());
    assert!(run(dir.path(), &["--version"]).status.success());
}

#[test]
fn dynamics_streams_rows_and_footer() {
    let dir = TempDir::new().unwrap();
    let text = run_ok(dir.path(), &["dynamics", "--gamma", "0.5"]);
    let lines: Vec<&str> = text.lines().collect();

    let header = lines[0];
    assert!(header.starts_with("T_hbar_per_Ry,n1u_re,n1u_im,"));
    assert_eq!(header.split(',').count(), 33, "time plus 16 re/im pairs");

    // First data row is the initial state: occupations exactly one half.
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "0.000000000000e0");
    assert_eq!(first[1], "5.000000000000e-1");
    for row in &lines[1..lines.len() - 1] {
        assert_eq!(row.split(',').count(), 33, "ragged row: {row}");
    }

    // Footer carries the dissociation time; frozen reference value.
    let footer = lines.last().unwrap();
    let doc = json(footer.strip_prefix("# ").expect("footer is a # JSON line"));
    assert_eq!(doc["schema_version"], 1);
    let t_d = num(&doc, "t_d");
    assert!(
        (t_d - 2.159157e-3).abs() < 1e-3 * 2.159157e-3,
        "t_d = {t_d}"
    );
    assert_eq!(num(&doc, "final_t"), t_d);
}

#[test]
fn hermitian_dynamics_runs_the_full_horizon() {
    let dir = TempDir::new().unwrap();
    let text = run_ok(
        dir.path(),
        &["dynamics", "--gamma", "0.5", "--hermitian", "--t-max", "1"],
    );
    let footer = text.lines().last().unwrap();
    let doc = json(footer.strip_prefix("# ").unwrap());
    assert!(doc["t_d"].is_null(), "no breakdown without gain/loss");
    assert_eq!(num(&doc, "final_t"), 1.0);
    assert_eq!(doc["hermitian"], true);
}

#[test]
fn td_sweep_emits_decreasing_times_and_fit_footer() {
    let dir = TempDir::new().unwrap();
    let text = run_ok(
        dir.path(),
        &["td-sweep", "--from", "0.1", "--to", "1.0", "--steps", "5"],
    );
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma_Ry,T_D_hbar_per_Ry,error");

    let times: Vec<f64> = lines[1..lines.len() - 1]
        .iter()
        .map(|row| row.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(times.len(), 5);
    assert!(
        times.windows(2).all(|w| w[1] < w[0]),
        "dissociation times must decrease: {times:?}"
    );

    let doc = json(lines.last().unwrap().strip_prefix("# ").unwrap());
    assert_eq!(doc["n_detected"], 5);
    assert!(doc["fit_error"].is_null());
    let fit = &doc["fit"];
    assert!(num(fit, "a") > 0.0);
    assert!(num(fit, "b").is_finite() && num(fit, "c").is_finite());
}

#[test]
fn thresholds_document_matches_reference_bold_rows() {
    let dir = TempDir::new().unwrap();
    let doc = json(&run_ok(dir.path(), &["thresholds"]));
    // Reference threshold couplings.
    assert!((num(&doc, "gamma_pt") - 0.520873).abs() < 1e-3);
    assert!((num(&doc, "gamma_ms") - 0.659374).abs() < 1e-3);
    assert!((num(&doc, "gamma_d") - 1.024638).abs() < 5e-3);
}

#[test]
fn report_collects_every_zero_coupling_row() {
    let dir = TempDir::new().unwrap();
    let doc = json(&run_ok(dir.path(), &["report", "--gamma", "0"]));

    assert!((num(&doc["equilibrium"], "r0") - 1.41968).abs() < 2e-3);
    assert!((num(&doc["integrals_ry"], "t") - (-0.737679)).abs() < 1e-4);
    let k_h = num(&doc["phonons"], "k_h");
    assert!((k_h / 0.691719 - 1.0).abs() < 0.02, "k_h = {k_h}");
    assert!((num(&doc["morse"], "e_d_ry") - 0.323007).abs() < 5e-4);
    assert!((num(&doc["couplings_ry_per_a0"], "g_t") - 0.609033).abs() < 5e-3);
    assert!((num(&doc, "rotational_b0_ry") - 5.4043e-4).abs() < 1e-7);

    // The harmonic/Morse stiffness disagreement is flagged, not hidden.
    assert_eq!(doc["consistency"]["k_within_5_percent"], false);

    // Past the breakup coupling only the classification survives.
    let unbound = json(&run_ok(dir.path(), &["report", "--gamma", "1.2"]));
    assert_eq!(unbound["equilibrium"]["stability"], "Unbound");
    assert!(unbound["phonons"].is_null());
    assert!(unbound["morse"].is_null());
    assert!(unbound["couplings_ry_per_a0"].is_null());
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = TempDir::new().unwrap();
    let stdout_text = run_ok(dir.path(), &["equilibrium", "--gamma", "0.1"]);
    let path = dir.path().join("eq.json");
    let out = run(
        dir.path(),
        &["equilibrium", "--gamma", "0.1", "--out", path.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout_text);
}

#[test]
fn curve_and_density_emit_metadata_and_units() {
    let dir = TempDir::new().unwrap();
    let curve = run_ok(
        dir.path(),
        &["curve", "--gamma", "0.3", "--r-min", "1.0", "--r-max", "1.5", "--steps", "2"],
    );
    let mut lines = curve.lines();
    let meta = json(lines.next().unwrap().strip_prefix("# ").unwrap());
    assert_eq!(num(&meta, "gamma_ry"), 0.3);
    let header = lines.next().unwrap();
    assert!(header.starts_with("R_a0,alpha_opt_inv_a0,E1_re_Ry,E1_im_Ry,"));
    assert!(header.ends_with("S_overlap"));
    assert_eq!(curve.lines().count(), 4);

    let density = run_ok(dir.path(), &["density", "--gamma", "0", "--n", "5"]);
    let mut lines = density.lines();
    let meta = json(lines.next().unwrap().strip_prefix("# ").unwrap());
    // The sampled density is normalized to the electron count.
    assert!((num(&meta, "integral_electrons") - 2.0).abs() < 1e-3);
    assert_eq!(lines.next().unwrap(), "x_a0,z_a0,rho_inv_a0^3");
    assert_eq!(density.lines().count(), 2 + 25);

    // The midplane point sits between the protons: a real covalent bridge.
    let row: Vec<&str> = density.lines().nth(14).unwrap().split(',').collect();
    assert_eq!(row[0], "0.000000000000e0");
    assert_eq!(row[1], "0.000000000000e0");
    assert!(row[2].parse::<f64>().unwrap() > 0.1);
}
