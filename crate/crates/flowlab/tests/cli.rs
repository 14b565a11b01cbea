//! End-to-end tests of the command-line interface: subcommands, exit codes,
//! and the provenance files every run must leave behind.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flowlab"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flowlab-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cfg(dir: &std::path::Path, body: &str) -> PathBuf {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn corpus_list_names_every_field() {
    let out = bin().args(["corpus", "list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "ZeroField",
        "IdentityDrift",
        "LipschitzBaseline",
        "LogDriftDeterministic",
        "LogDiffusion",
        "EscapeGrowthField",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn simulate_zero_field_writes_constant_trajectories() {
    let dir = scratch("sim-zero");
    let cfg = write_cfg(
        &dir,
        "schema_version = 1\n[experiment]\nname = zero\nseed = 5\ndt = 0.1\nhorizon = 0.5\n\
         [field]\nname = ZeroField\n[simulate]\npoints = 0.25 -1.5\n",
    );
    let out_dir = dir.join("out");
    let st = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());

    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,point_id,x_1");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let value: f64 = cols[2].parse().unwrap();
        let want = if cols[1] == "0" { 0.25 } else { -1.5 };
        assert_eq!(value, want, "non-constant row: {line}");
    }
    // Provenance: resolved config parses back and names the field.
    let resolved = std::fs::read_to_string(out_dir.join("config.resolved.cfg")).unwrap();
    let parsed = flowlab::config::ExperimentConfig::parse(&resolved).unwrap();
    assert_eq!(parsed.field.name, "ZeroField");
    assert_eq!(parsed.seed, 5);
    // Summary carries the version string.
    let summary = std::fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"tool_version\""));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_config_exits_2_and_names_the_key() {
    let dir = scratch("badcfg");
    let cfg = write_cfg(&dir, "[experiment]\nwobble = 1\n");
    let out = bin().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("wobble"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_check_exits_2() {
    let dir = scratch("badcheck");
    let cfg = write_cfg(&dir, "schema_version = 1\n");
    let out = bin()
        .args(["verify", "nonsense", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bounds_ordering_violation_exits_4() {
    let dir = scratch("badbounds");
    let cfg = write_cfg(&dir, "schema_version = 1\n[bounds]\nxi0 = 1e-8\neps = 0.01\n");
    let out = bin()
        .args(["bounds", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("ordering"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulation_overflow_exits_3() {
    let dir = scratch("overflow");
    let cfg = write_cfg(
        &dir,
        "schema_version = 1\n[experiment]\nname = boom\ndt = 1.0\nhorizon = 20\n\
         [field]\nname = IdentityDrift\n[simulate]\npoints = 1e299\ndump_trajectories = false\n",
    );
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_nonconfluence_on_zero_field_passes() {
    let dir = scratch("verify-zero");
    let cfg = write_cfg(
        &dir,
        "schema_version = 1\n[experiment]\nname = v\nseed = 3\ndt = 0.01\nhorizon = 0.5\nreplications = 20\n\
         [field]\nname = ZeroField\n[verify]\npair = 0 0.5\neps = 1e-2 1e-4\n",
    );
    let out_dir = dir.join("out");
    let st = bin()
        .args(["verify", "nonconfluence", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"], "pass");
    assert_eq!(verdict["check"], "nonconfluence");
    let csv = std::fs::read_to_string(out_dir.join("estimates.csv")).unwrap();
    assert!(csv.starts_with("t,separation_or_x0,estimate,ci_halfwidth,n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_flag_overrides_config() {
    let dir = scratch("seed-override");
    let cfg = write_cfg(
        &dir,
        "schema_version = 1\n[experiment]\nname = s\nseed = 1\ndt = 0.01\nhorizon = 0.2\n\
         [field]\nname = LogDiffusion\n[simulate]\npoints = 0.05\ndump_trajectories = false\n",
    );
    let run = |seed: &str, out: &std::path::Path| {
        let st = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read_to_string(out.join("summary.json")).unwrap()
    };
    let a = run("7", &dir.join("a"));
    let b = run("8", &dir.join("b"));
    let a2 = run("7", &dir.join("a2"));
    assert_ne!(a, b, "different seeds must differ");
    assert_eq!(a, a2, "same seed must reproduce");
    // The resolved config records the override.
    let resolved = std::fs::read_to_string(dir.join("a").join("config.resolved.cfg")).unwrap();
    assert!(resolved.contains("seed = 7"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_holder_on_lipschitz_baseline_passes_flat() {
    let dir = scratch("holder-flat");
    let cfg = write_cfg(
        &dir,
        "schema_version = 1\n[experiment]\nname = h\nseed = 11\ndt = 0.001\nhorizon = 1\nreplications = 2\n\
         [field]\nname = LipschitzBaseline\n[verify]\npowers = 2\ntimes = 0 0.5 1\n",
    );
    let out_dir = dir.join("out");
    let st = bin()
        .args(["verify", "holder", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"], "pass");
    // Flat exponent: every fitted slope equals the moment power 2.
    for fit in verdict["statistics"][0]["fits"].as_array().unwrap() {
        let slope = fit["slope"].as_f64().unwrap();
        assert!((slope - 2.0).abs() < 1e-6, "slope {slope}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_modulus_conditions_report_only_for_constant_family() {
    let dir = scratch("modcond");
    let cfg = write_cfg(
        &dir,
        "schema_version = 1\n[experiment]\nname = mc\n[field]\nname = LipschitzBaseline\n",
    );
    let out_dir = dir.join("out");
    let st = bin()
        .args(["verify", "modulus-conditions", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    // Report-only must not fail the exit code.
    assert!(st.success());
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"], "report-only");
    assert_eq!(verdict["statistics"]["unbounded_at_zero"], false);
    assert_eq!(verdict["statistics"]["integral_diverges"], true);
    std::fs::remove_dir_all(&dir).ok();
}
