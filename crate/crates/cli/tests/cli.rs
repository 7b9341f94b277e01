use std::path::{Path, PathBuf};
use std::process::Command;

use qkpr_cli::{run, EXIT_CHANNEL, EXIT_OK, EXIT_USAGE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qkpr"))
}

/// Runs in-process with `--out` pointing into `dir`; returns (exit code, file text).
fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let out: PathBuf = dir.join(name);
    let mut argv = vec!["qkpr".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(out.display().to_string());
    let code = run(argv);
    (code, std::fs::read_to_string(&out).unwrap_or_default())
}

fn rows(csv_text: &str) -> Vec<Vec<String>> {
    csv_text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn simulate_optimum_prints_two_thirds() {
    let out = bin()
        .args([
            "simulate",
            "--state",
            "ghz",
            "--moves",
            "opt",
            "--channel",
            "pd",
            "--p",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "p,channel,noise_stage,payoff_alice,payoff_bob,payoff_charlie"
    );
    assert_eq!(
        lines[1],
        "0.000000000000,pd,pre,0.666666666667,0.666666666667,0.666666666667"
    );
}

#[test]
fn as_printed_trit_flip_fails_validation_with_exit_three() {
    let out = bin()
        .args([
            "validate-channels",
            "--channel",
            "tpf",
            "--tpf-variant",
            "as-printed",
            "--p",
            "0.3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CHANNEL));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("1.1·I"), "{err}");
    assert!(err.contains("trit-phase flip (as-printed)"), "{err}");
}

#[test]
fn default_channels_validate() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(dir.path(), "v.csv", &["validate-channels"]);
    assert_eq!(code, EXIT_OK);
    let r = rows(&text);
    assert_eq!(r.len(), 5 * 11);
    assert!(r.iter().all(|row| row[4] == "true"));
    let (code, _) = run_to_file(
        dir.path(),
        "w.csv",
        &[
            "validate-channels",
            "--channel",
            "pf",
            "--pf-variant",
            "as-printed",
        ],
    );
    assert_eq!(
        code, EXIT_OK,
        "the as-printed phase flip is amplitude damping, which is complete"
    );
}

#[test]
fn noisy_simulation_with_incomplete_channel_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run_to_file(
        dir.path(),
        "s.csv",
        &[
            "simulate",
            "--channel",
            "tpf",
            "--tpf-variant",
            "as-printed",
            "--p",
            "0.5",
        ],
    );
    assert_eq!(code, EXIT_CHANNEL);
}

#[test]
fn unital_sweep_of_maximal_mixture_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        "p.csv",
        &[
            "sweep-p",
            "--state",
            "mixed",
            "--f",
            "0",
            "--channel",
            "dep",
            "--grid",
            "11",
        ],
    );
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("p,channel,noise_stage,payoff_alice,payoff_bob,payoff_charlie\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 11);
    for (k, row) in r.iter().enumerate() {
        assert!((row[0].parse::<f64>().unwrap() - k as f64 / 10.0).abs() < 1e-12);
        assert_eq!(&row[3..], ["0.444444444444"; 3]);
    }
}

#[test]
fn sweep_p_lists_channels_inside_each_p() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        "p.csv",
        &[
            "sweep-p",
            "--channel",
            "all",
            "--grid",
            "3",
            "--noise-stage",
            "post",
        ],
    );
    assert_eq!(code, EXIT_OK);
    let r = rows(&text);
    let labels: Vec<&str> = r.iter().map(|row| row[1].as_str()).collect();
    assert_eq!(labels[..5], ["ad", "pd", "dep", "pf", "tpf"]);
    assert_eq!(r.len(), 15);
    assert!(r.iter().all(|row| row[2] == "post"));
    let ps: Vec<f64> = r.iter().map(|row| row[0].parse().unwrap()).collect();
    assert!(ps.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sweep_angles_rows_are_theta_major() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        "a.csv",
        &[
            "sweep-angles",
            "--theta-grid",
            "3",
            "--phi-grid",
            "4",
            "--channel",
            "ad",
            "--p",
            "1",
        ],
    );
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("theta,phi,p,channel,payoff_alice,payoff_bob,payoff_charlie\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 12);
    let keys: Vec<(f64, f64)> = r
        .iter()
        .map(|row| (row[0].parse().unwrap(), row[1].parse().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
    // full amplitude damping erases the initial state
    assert!(r.iter().all(|row| row[4..] == r[0][4..]));
}

#[test]
fn config_file_matches_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"state": "angles", "theta": "acos(1/sqrt3)", "phi": 0.5, "channel": "ad", "p": 0.25,
            "noise-stage": "post", "moves": "custom", "bob": "identity"}"#,
    )
    .unwrap();
    let cfg = cfg.display().to_string();
    let (c1, from_file) = run_to_file(dir.path(), "1.csv", &["simulate", "--config", &cfg]);
    let (c2, from_flags) = run_to_file(
        dir.path(),
        "2.csv",
        &[
            "simulate",
            "--state",
            "angles",
            "--theta",
            "acos(1/sqrt3)",
            "--phi",
            "0.5",
            "--channel",
            "ad",
            "--p",
            "0.25",
            "--noise-stage",
            "post",
            "--moves",
            "custom",
            "--bob",
            "identity",
        ],
    );
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(from_file, from_flags);
    let (_, overridden) = run_to_file(
        dir.path(),
        "3.csv",
        &["simulate", "--config", &cfg, "--p", "0.5"],
    );
    assert!(
        overridden.contains("\n0.500000000000,ad,post,"),
        "{overridden}"
    );
}

#[test]
fn custom_moves_fill_unnamed_players_with_opt() {
    let dir = tempfile::tempdir().unwrap();
    let (_, named) = run_to_file(
        dir.path(),
        "n.csv",
        &[
            "simulate",
            "--moves",
            "custom",
            "--charlie",
            "acos(1/sqrt3), pi/4, pi/4, 5pi/18, 5pi/18, 5pi/18, pi/3, 11pi/6",
        ],
    );
    let (_, opt) = run_to_file(dir.path(), "o.csv", &["simulate"]);
    assert_eq!(named, opt);
    let (code, _) = run_to_file(
        dir.path(),
        "x.csv",
        &["simulate", "--moves", "identity", "--alice", "opt"],
    );
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn printed_optimum_is_selectable() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text) = run_to_file(
        dir.path(),
        "p.csv",
        &["simulate", "--moves", "opt-as-printed"],
    );
    assert!(
        text.contains(",0.610321551561,0.610321551561,0.610321551561"),
        "{text}"
    );
}

#[test]
fn json_output_parses_with_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        "j.json",
        &[
            "sweep-p",
            "--channel",
            "pd,ad",
            "--grid",
            "2",
            "--format",
            "json",
        ],
    );
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "sweep-p");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert!(text.contains("0.666666666667"));
}

#[test]
fn nash_check_reports_one_row_per_player() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        "n.csv",
        &[
            "nash-check",
            "--channel",
            "dep",
            "--p",
            "0.3",
            "--budget",
            "3000",
        ],
    );
    assert_eq!(code, EXIT_OK);
    let header = text.lines().next().unwrap();
    assert_eq!(header, "channel,p,noise_stage,player,baseline,best_payoff,improvement,evaluations,nash_holds,best_move");
    let r = rows(&text);
    assert_eq!(
        r.iter().map(|row| row[3].as_str()).collect::<Vec<_>>(),
        ["alice", "bob", "charlie"]
    );
    for row in &r {
        assert!(row[7].parse::<usize>().unwrap() <= 3000);
        assert_eq!(row[8], "true");
    }
    let (_, one) = run_to_file(
        dir.path(),
        "m.csv",
        &["nash-check", "--player", "bob", "--budget", "500"],
    );
    assert_eq!(rows(&one).len(), 1);
}

#[test]
fn argument_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_cfg = dir.path().join("bad.json");
    std::fs::write(&bad_cfg, r#"{"chanel": "pd"}"#).unwrap();
    let bad_cfg = bad_cfg.display().to_string();
    let cases: Vec<Vec<&str>> = vec![
        vec!["simulate", "--channel", "xx"],
        vec!["simulate", "--state", "mixed"],
        vec!["simulate", "--state", "mixed", "--f", "1.5"],
        vec!["simulate", "--f", "0.5"],
        vec![
            "simulate", "--state", "angles", "--theta", "pi/", "--phi", "0",
        ],
        vec![
            "simulate", "--state", "angles", "--theta", "4", "--phi", "0",
        ],
        vec!["simulate", "--p", "-0.1"],
        vec!["simulate", "--channel", "pd,ad"],
        vec!["simulate", "--budget", "10"],
        vec!["sweep-angles", "--state", "ghz"],
        vec!["sweep-p", "--grid", "0"],
        vec!["simulate", "--moves", "custom", "--alice", "1,2,3"],
        vec!["simulate", "--config", &bad_cfg],
        vec!["simulate", "--config", "/nonexistent/c.json"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let (code, _) = run_to_file(dir.path(), "e.csv", &args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(["qkpr", "--help"]), EXIT_OK);
    assert_eq!(run(["qkpr", "sweep-p", "--help"]), EXIT_OK);
}
