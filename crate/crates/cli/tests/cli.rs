use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fictplay::io::{validate_game, GameFile};
use fictplay::extract_potential;
use tempfile::TempDir;

fn fictplay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fictplay"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn coord_json(dir: &Path) -> PathBuf {
    let file = GameFile {
        players: 2,
        actions: vec![2, 2],
        utilities: vec![vec![1.0, 0.0, 0.0, 1.0]; 2],
        potential: None,
    };
    let path = dir.join("coord.json");
    fs::write(&path, file.to_json()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_valid_games_deterministically() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let out = fictplay(&["gen", "--actions", "2,2", "--n", "5", "--seed", "7", "--out", s(dir.path())]);
        assert_eq!(out.status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for name in names {
        let text = fs::read_to_string(a.path().join(&name)).unwrap();
        assert_eq!(text, fs::read_to_string(b.path().join(&name)).unwrap());
        let game = validate_game(&text).unwrap();
        assert!(extract_potential(&game, 1e-9).is_ok());
        assert!(GameFile::from_json(&text).unwrap().potential.is_some());
    }
}

#[test]
fn simulate_writes_csv_and_event_log() {
    let dir = TempDir::new().unwrap();
    let game = coord_json(dir.path());
    let out = fictplay(&["simulate", "--game", s(&game), "--x0", "0.4,0.7", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let segments: std::collections::BTreeSet<&str> =
        csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(segments.len(), 2);

    let log: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("events.json")).unwrap()).unwrap();
    let events = log["events"].as_array().unwrap();
    assert_eq!(events.len(), 1);
    let t = events[0]["time"].as_f64().unwrap();
    assert!((t - 1.2f64.ln()).abs() < 1e-9 && (t - 0.1823).abs() < 1e-4);
}

#[test]
fn rate_certifies_converged_run() {
    let dir = TempDir::new().unwrap();
    let game = coord_json(dir.path());
    let out = fictplay(&["rate", "--game", s(&game), "--x0", "0.2,0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["status"], "Converged");
    assert_eq!(cert["tau"], 0.0);
    assert!((cert["c"].as_f64().unwrap() - 0.13f64.sqrt()).abs() < 1e-9);
    assert_eq!(cert["bound"]["ok"], true);
}

#[test]
fn rate_fails_verification_on_mixed_capture() {
    let dir = TempDir::new().unwrap();
    let game = coord_json(dir.path());
    let out = fictplay(&["rate", "--game", s(&game), "--x0", "0.4,0.6", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["status"], "MixedEquilibriumReached");
    assert!(cert["c"].is_null());
}

#[test]
fn matching_pennies_is_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("pennies.json");
    let file = GameFile {
        players: 2,
        actions: vec![2, 2],
        utilities: vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        potential: None,
    };
    fs::write(&path, file.to_json()).unwrap();
    assert_eq!(fictplay(&["potential-check", "--game", s(&path)]).status.code(), Some(2));
    assert_eq!(fictplay(&["equilibria", "--game", s(&path)]).status.code(), Some(2));
}

#[test]
fn equilibria_lists_three_for_coordination() {
    let dir = TempDir::new().unwrap();
    let game = coord_json(dir.path());
    let out = fictplay(&["equilibria", "--game", s(&game)]);
    assert_eq!(out.status.code(), Some(0));
    let eqs: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let kinds: Vec<&str> = eqs.as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["pure", "pure", "mixed"]);
}

#[test]
fn input_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let game = coord_json(dir.path());
    let missing = dir.path().join("missing.json");
    assert_eq!(fictplay(&["simulate", "--game", s(&missing), "--x0", "0.1,0.1"]).status.code(), Some(1));
    assert_eq!(fictplay(&["simulate", "--game", s(&game), "--x0", "1.5,0.1"]).status.code(), Some(1));
    assert_eq!(fictplay(&["simulate", "--game", s(&game), "--x0", "0.1"]).status.code(), Some(1));
    assert_eq!(fictplay(&["rate", "--game", s(&game), "--x0", "0.2,0.3", "--metric", "taxicab"]).status.code(), Some(1));
    assert_eq!(fictplay(&["bogus"]).status.code(), Some(1));
    fs::write(dir.path().join("bad.json"), "{\"players\": 3}").unwrap();
    assert_eq!(fictplay(&["equilibria", "--game", s(&dir.path().join("bad.json"))]).status.code(), Some(1));
}

#[test]
fn batch_summary_is_deterministic() {
    let run = || {
        let out = fictplay(&["batch", "--actions", "2,2", "--n", "4", "--n-inits", "5", "--seed", "3", "--threads", "2"]);
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let first = run();
    assert_eq!(first, run());
    let summary: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(summary["runs"], 20);
    assert_eq!(summary["fraction_converged_to_pure"], 1.0);
    assert_eq!(summary["per_run"].as_array().unwrap().len(), 20);
}
