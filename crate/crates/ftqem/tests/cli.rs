//! End-to-end checks of the `ftqem` binary: exit codes, config handling and
//! reproducible outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ftqem"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ftqem-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(dir: &Path, f: &str) -> String {
    std::fs::read_to_string(dir.join(f)).unwrap()
}

const SMALL: &str = "
[threshold_scan]
distances = [3, 5]
points = 3
shots = 2000
";

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&run(&["no-such-command"])), 3);
    assert_eq!(code(&run(&["resources", "--no-such-flag"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn config_errors_exit_3() {
    let d = scratch("cfg");
    let unknown = d.join("unknown.toml");
    std::fs::write(&unknown, "[resources]\nbogus = 1\n").unwrap();
    assert_eq!(code(&run(&["resources", "--config", unknown.to_str().unwrap()])), 3);
    let invalid = d.join("invalid.toml");
    std::fs::write(&invalid, "[threshold_scan]\npoints = 0\n").unwrap();
    assert_eq!(code(&run(&["threshold-scan", "--config", invalid.to_str().unwrap()])), 3);
    let missing = d.join("missing.toml");
    assert_eq!(code(&run(&["resources", "--config", missing.to_str().unwrap()])), 3);
    assert_eq!(code(&run(&["resources", "--workers", "0"])), 3);
}

#[test]
fn print_config_round_trips() {
    let d = scratch("print");
    let first = run(&["resources", "--print-config"]);
    assert_eq!(code(&first), 0);
    let path = d.join("printed.toml");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = run(&["resources", "--config", path.to_str().unwrap(), "--print-config"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn resources_writes_versioned_stats() {
    let d = scratch("res");
    let o = run(&["resources", "--out", d.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value = serde_json::from_str(&read(&d, "stats.json")).unwrap();
    assert_eq!(stats["schema_version"], 1);
    assert_eq!(stats["subcommand"], "resources");
    assert!(read(&d, "resources.csv").lines().count() > 1);
    assert!(d.join("config.toml").exists());
}

#[test]
fn same_seed_gives_identical_files() {
    let d = scratch("det");
    let cfg = d.join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let outs: Vec<PathBuf> = ["a", "b"].iter().map(|s| d.join(s)).collect();
    for (k, out) in outs.iter().enumerate() {
        let workers = if k == 0 { "1" } else { "2" };
        let o = run(&[
            "threshold-scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(),
            "--seed", "9", "--workers", workers,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["stats.json", "threshold.csv", "config.toml"] {
        assert_eq!(read(&outs[0], f), read(&outs[1], f), "{f}");
    }
}

#[test]
fn deterministic_acceptance_mode() {
    let d = scratch("acc");
    let o = run(&["resources", "--acceptance", "--out", d.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("PASS criterion 11"), "{text}");
    let doc: serde_json::Value = serde_json::from_str(&read(&d, "acceptance.json")).unwrap();
    assert_eq!(doc["schema_version"], 1);
}

#[test]
fn selftest_passes() {
    let d = scratch("self");
    let o = run(&["selftest", "--out", d.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}
