use std::path::Path;
use std::process::{Command, Output};

fn fracmass(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmass"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("FRACMASS_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_command_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracmass(&[], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"command": "crofton", "sampels": 10}"#).unwrap();
    let o = fracmass(&["--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sampels"), "{}", stderr(&o));
}

#[test]
fn s_grid_must_increase() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracmass(&["vortex-limit", "--s-grid", "0.9,0.8"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s_grid"));
}

#[test]
fn config_file_selects_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "crofton", "samples": 2000, "seed": 4}"#).unwrap();
    let o = fracmass(&["--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("crofton.csv").exists());
}

#[test]
fn vortex_limit_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracmass(&["vortex-limit"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("vortex_limit.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "relative_gap").unwrap();
    let gaps: Vec<f64> = rdr.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
    assert_eq!(gaps.len(), 4);
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(gaps[3] < 0.15);
}

#[test]
fn link_reports_the_hopf_pair() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracmass(&["link", "--configurations", "5", "--loops", "12"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("hopf")).unwrap();
    let g: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((g.abs() - 1.0).abs() < 1e-3);
    assert!(out.contains("5/5 agree"));
}

#[test]
fn seeds_reproduce_and_differ() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = fracmass(&["crofton", "--samples", "5000", "--seed", seed], dir.path());
        assert!(o.status.success());
        std::fs::read_to_string(dir.path().join("crofton.csv")).unwrap()
    };
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3"), run("4"));
}

#[test]
fn seed_from_environment_yields_to_flag() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_fracmass"));
        c.args(["crofton", "--samples", "3000", "--out"]).arg(dir.path()).env_remove("FRACMASS_SEED");
        if let Some(e) = env {
            c.env("FRACMASS_SEED", e);
        }
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        assert!(c.output().unwrap().status.success());
        std::fs::read_to_string(dir.path().join("crofton.csv")).unwrap()
    };
    let by_env = run(Some("8"), None);
    assert_eq!(by_env, run(None, Some("8")));
    assert_eq!(run(Some("5"), Some("8")), by_env);
}
