use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(args)
        .output()
        .expect("spawn simulate")
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec!["--out", out];
    args.extend_from_slice(extra);
    simulate(&args)
}

const SMALL: &[&str] = &["--nodes", "120", "--area", "500x500", "--seeds", "1,2,3"];

#[test]
fn writes_every_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), SMALL);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["runs.csv", "fig_energy.csv", "fig_lifetime.csv", "fig_delay.csv", "summary.txt", "resolved_config.txt"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert!(runs.starts_with(
        "tick,protocol,seed,cumulative_dissipated,remaining_total,alive_count,cluster_count,mean_delay,e_total_radio\n"
    ));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("nodes = 120"));
    assert!(stdout.contains("DCP lifetime > LEACH lifetime:"));
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_into(a.path(), SMALL).status.success());
    assert!(run_into(b.path(), SMALL).status.success());
    for f in ["runs.csv", "fig_energy.csv", "fig_lifetime.csv", "fig_delay.csv", "summary.txt"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn echoed_config_reproduces_the_run() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run_into(a.path(), &["--nodes", "90", "--p-active", "0.3", "--seeds", "4", "--horizon", "120"]).status.success());
    let echoed = a.path().join("resolved_config.txt");
    assert!(run_into(b.path(), &["--config", echoed.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(a.path().join("runs.csv")).unwrap(), fs::read(b.path().join("runs.csv")).unwrap());
    assert_eq!(fs::read(echoed).unwrap(), fs::read(b.path().join("resolved_config.txt")).unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    fs::write(&cfg, "nodes = 450\nseeds = [1]\nprotocol = \"dcp\"\n").unwrap();
    let out = run_into(&dir.path().join("out"), &["--config", cfg.to_str().unwrap(), "--nodes", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let resolved = fs::read_to_string(dir.path().join("out/resolved_config.txt")).unwrap();
    assert!(resolved.contains("nodes = 10\n"));
    let summary = fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("trend comparison skipped"));
}

#[test]
fn zero_refresh_time_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--refresh-time", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("refresh_time"));
    assert!(!dir.path().join("runs.csv").exists());
}

#[test]
fn bad_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!run_into(dir.path(), &["--protocol", "aodv"]).status.success());
    assert!(!run_into(dir.path(), &["--area", "100"]).status.success());
    assert!(!run_into(dir.path(), &["--config", "/nonexistent.toml"]).status.success());
}

#[test]
fn positions_file_drives_placement() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pos.csv"), "id,x,y\n1,0,0\n2,5,0\n3,90,90\n").unwrap();
    let cfg = dir.path().join("sim.toml");
    fs::write(
        &cfg,
        "positions_file = \"pos.csv\"\narea_width = 100.0\narea_height = 100.0\nrange = 10.0\nseeds = [1]\n",
    )
    .unwrap();
    let out = run_into(&dir.path().join("out"), &["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = fs::read_to_string(dir.path().join("out/runs.csv")).unwrap();
    // two DCP clusters: {1,2} and {3}
    assert!(runs.lines().nth(1).unwrap().starts_with("0,dcp,1,0,1500,3,2,"));
}
