use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use stabilis::cli::{EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use stabilis::fixtures;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn stabilis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabilis"))
        .current_dir(fixture_dir())
        .env_remove("STABILIS_BUDGET")
        .args(args)
        .output()
        .unwrap()
}

fn records(args: &[&str]) -> (Vec<(String, String)>, i32) {
    let out = stabilis(&[&["--format", "records"], args].concat());
    let text = String::from_utf8(out.stdout).unwrap();
    let recs = text
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap_or_else(|| panic!("not a record: {l:?}"));
            (k.to_string(), v.to_string())
        })
        .collect();
    (recs, out.status.code().unwrap())
}

fn get<'a>(recs: &'a [(String, String)], key: &str) -> &'a str {
    recs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str()).unwrap_or_else(|| panic!("missing {key}"))
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("stabilis-cli-{}-{name}", std::process::id()))
}

#[test]
fn check_shopping_is_stable() {
    let (recs, code) = records(&["check", "--game", "fig1.game", "--profile", "ss.profile", "--eps", "0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(get(&recs, "command"), "check");
    for key in ["nash", "envy", "immune"] {
        assert_eq!(get(&recs, key), "yes", "{key}");
    }
}

#[test]
fn check_movie_gaps() {
    let (recs, code) = records(&["check", "--game", "fig1.game", "--profile", "mm.profile"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(get(&recs, "nash_gap"), "0");
    assert_eq!(get(&recs, "immune_gap"), "3");
    assert_eq!(get(&recs, "envy_gap"), "2");
    assert_eq!(get(&recs, "immune"), "no");
}

#[test]
fn check_with_tolerance() {
    let (recs, _) = records(&["check", "--game", "fig1.game", "--profile", "mm.profile", "--eps", "2"]);
    assert_eq!(get(&recs, "envy"), "yes");
    assert_eq!(get(&recs, "immune"), "no");
}

#[test]
fn records_start_with_command_and_digest() {
    let (recs, _) = records(&["multi", "gamma", "--game", "fig1.game"]);
    assert_eq!(recs[0].0, "command");
    assert_eq!(recs[1], ("input.game".into(), "fig1.game".into()));
    assert_eq!(recs[2].0, "input.game.sha256");
    assert_eq!(recs[2].1.len(), 64);
    assert!(recs[2].1.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn reduce_sat_matches_fixture() {
    let out = stabilis(&["reduce", "sat", "--cnf", "example.cnf"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let fixture = std::fs::read(fixture_dir().join("table1.game")).unwrap();
    assert_eq!(out.stdout, fixture);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), fixtures::TABLE1);
}

#[test]
fn reduce_sat_records_digest_matches_game_digest() {
    let (reduced, _) = records(&["reduce", "sat", "--cnf", "example.cnf"]);
    let (checked, _) = records(&["multi", "gamma", "--game", "table1.game"]);
    assert_eq!(get(&reduced, "game.sha256"), get(&checked, "input.game.sha256"));
    assert_eq!(get(&reduced, "num_actions"), "9");
    assert_eq!(get(&reduced, "beta"), "-2");
}

#[test]
fn immune_nash_negative_exits_one() {
    let (recs, code) = records(&["solve", "immune-nash", "--game", "fig2.game"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert_eq!(get(&recs, "exists"), "false");
}

#[test]
fn immune_nash_positive() {
    let (recs, code) = records(&["solve", "immune-nash", "--game", "fig1.game"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(get(&recs, "exists"), "true");
    assert_eq!(get(&recs, "nash_gap"), "0");
    assert_eq!(get(&recs, "immune_gap"), "0");
}

#[test]
fn envy_proof_nash_absent_on_fig2() {
    let (recs, code) = records(&["solve", "envy-proof-nash", "--game", "fig2.game"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert_eq!(get(&recs, "found"), "no");
}

#[test]
fn profile_out_round_trips_through_check() {
    let path = temp_path("envy-proof.profile");
    let path_str = path.to_str().unwrap();
    let (solved, code) = records(&["solve", "envy-proof", "--game", "fig2.game", "--profile-out", path_str]);
    assert_eq!(code, EXIT_OK);
    let (checked, code) = records(&["check", "--game", "fig2.game", "--profile", path_str]);
    assert_eq!(code, EXIT_OK);
    std::fs::remove_file(&path).unwrap();
    for key in ["nash_gap", "immune_gap", "envy_gap"] {
        assert_eq!(get(&solved, key), get(&checked, key), "{key}");
    }
    assert_eq!(get(&checked, "envy"), "yes");
}

#[test]
fn enumerate_table1_lists_three_witnesses() {
    let (recs, code) = records(&["enumerate", "nash", "--game", "table1.game", "--max-support", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(get(&recs, "witness.0.profile.0"), "0 0 0 0 0 0 0 0 1");
    assert_eq!(get(&recs, "witness.1.profile.0"), "0 0 1/2 0 1/2 0 0 0 0");
    assert_eq!(get(&recs, "witness.2.profile.1"), "0 0 0 1/2 0 1/2 0 0 0");
    assert!(!recs.iter().any(|(k, _)| k.starts_with("witness.3.")));
}

#[test]
fn stdin_game() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_stabilis"))
        .current_dir(fixture_dir())
        .args(["--format", "records", "check", "--game", "-", "--profile", "ss.profile"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(fixtures::FIG1.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("envy=yes\n"), "{text}");
}

#[test]
fn budget_exceeded_exits_three() {
    let out = stabilis(&["approx", "envy-nash", "--game", "table1.game", "--eps", "1", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(EXIT_BUDGET));
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_stabilis"))
        .current_dir(fixture_dir())
        .env("STABILIS_BUDGET", "100")
        .args(["--format", "records", "approx", "envy-nash", "--game", "table1.game", "--eps", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_BUDGET));
    assert!(String::from_utf8(out.stdout).unwrap().contains("budget=100\n"));
}

#[test]
fn approx_fig2_certifies() {
    let (recs, code) = records(&["approx", "envy-nash", "--game", "fig2.game", "--eps", "1/4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(get(&recs, "k"), "34");
    assert_eq!(get(&recs, "complete"), "yes");
    assert_eq!(get(&recs, "found"), "yes");
}

#[test]
fn multi_check_team_game() {
    let (recs, code) = records(&["multi", "check", "--game", "team3.game", "--profile", "team3.profile", "--t", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(get(&recs, "t"), "2");
    assert_eq!(get(&recs, "nash"), "yes");
}

#[test]
fn multi_coalition_size_bounds() {
    let out = stabilis(&["multi", "check", "--game", "fig1.game", "--profile", "mm.profile", "--t", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let out = stabilis(&["multi", "check", "--game", "fig1.game", "--profile", "mm.profile", "--t", "3"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 6] = [
        &["bogus"],
        &["check", "--game", "fig1.game"],
        &["check", "--game", "missing.game", "--profile", "mm.profile"],
        &["check", "--game", "fig1.game", "--profile", "mm.profile", "--eps", "-1"],
        &["check", "--game", "fig1.game", "--profile", "team3.profile"],
        &["approx", "envy-nash", "--game", "fig2.game", "--eps", "1/0"],
    ];
    for args in cases {
        let out = stabilis(args);
        assert_eq!(out.status.code(), Some(EXIT_USAGE), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_game_reports_line() {
    let path = temp_path("bad.game");
    std::fs::write(&path, "players: 2\nactions: 2 2\nutility 0:\n1 2\n").unwrap();
    let out = stabilis(&["multi", "gamma", "--game", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 4"));
}

#[test]
fn human_mode_marks_approximations() {
    let out = stabilis(&["check", "--game", "fig1.game", "--profile", "mm.profile", "--eps", "1/3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("~0.333"), "{text}");
}
