use std::fs;
use std::process::{Command, Output};

fn riskcurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskcurve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn table_output_and_usage_errors() {
    let o = riskcurve(&["table", "stpete:5,5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "[[-3, 1/2], [-1, 1/4], [3, 1/8], [11, 1/16], [27, 1/32], [27, 1/32]]\n"
    );
    let o = riskcurve(&["table", "gfamily:10", "--format", "json"]);
    assert_eq!(stdout(&o), "[[-1,\"9/10\"],[10,\"1/10\"]]\n");

    assert_eq!(riskcurve(&["table", "stpete:0,5"]).status.code(), Some(2));
    assert_eq!(riskcurve(&["table", "bogus:1"]).status.code(), Some(1));
    assert_eq!(riskcurve(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(riskcurve(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coin.json");
    fs::write(&path, r#"[[-1, "1/2"], [1, "1/2"]]"#).unwrap();
    let p = path.to_str().unwrap();
    let o = riskcurve(&["verify", p, "--n", "2", "--no-strict", "--runs", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exact:      0.7500000000  (3/4)"), "{}", stdout(&o));
    // zero mean: solve refuses
    let o = riskcurve(&["solve", p, "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refuse to play"));

    fs::write(&path, r#"[[-1, "1/2"], [1, "1/3"]]"#).unwrap();
    assert_eq!(riskcurve(&["table", p]).status.code(), Some(2));
}

#[test]
fn sweep_is_byte_reproducible_from_its_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = riskcurve(&["sweep", "stpete:7,7", "--n-max", "40", "--out", d, "--name", "sp"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read(dir.path().join("sp.csv")).unwrap();
    let svg = fs::read(dir.path().join("sp.svg")).unwrap();

    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sp.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["method"], "exact");
    assert_eq!(meta["strict"], true);
    let command = meta["command"].as_str().unwrap().to_string();
    for f in ["sp.csv", "sp.svg", "sp.dat", "sp.meta.json"] {
        fs::remove_file(dir.path().join(f)).unwrap();
    }
    let args: Vec<&str> = command.split(' ').skip(1).collect();
    assert_eq!(riskcurve(&args).status.code(), Some(0));
    assert_eq!(fs::read(dir.path().join("sp.csv")).unwrap(), csv);
    assert_eq!(fs::read(dir.path().join("sp.svg")).unwrap(), svg);
    // no temporary files left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 4);
}

#[test]
fn solve_and_approx() {
    let o = riskcurve(&["solve", "gfamily:10", "--epsilon", "0.0013", "--strategy", "clt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n = 9876"), "{}", stdout(&o));

    let o = riskcurve(&["solve", "stpete:5,5", "--epsilon", "0.1", "--strategy", "exact", "--horizon", "300"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let n: u64 = out.lines().find_map(|l| l.strip_prefix("n = ")).unwrap().parse().unwrap();
    assert!((1..=100).contains(&n), "{out}");
    assert!(out.contains("certificate:"));

    let o = riskcurve(&["solve", "gfamily:10", "--epsilon", "0.001", "--strategy", "exact", "--horizon", "30"]);
    assert_eq!(o.status.code(), Some(4));

    let o = riskcurve(&["approx", "gfamily:10", "--n", "100", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("~ 0.61906661"), "{}", stdout(&o));
}

#[test]
fn simulate_is_seeded() {
    let run = |seed: &str| stdout(&riskcurve(&["simulate", "stpete:5,5", "--n", "100", "--runs", "500", "--seed", seed]));
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
    let o = riskcurve(&["simulate", "stpete:5,5", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn recurrence_not_found_exit_code() {
    let o = riskcurve(&["recurrence", "gfamily:10", "--max-order", "3", "--max-degree", "3"]);
    assert_eq!(o.status.code(), Some(4));
    let o = riskcurve(&["recurrence", "gfamily:10", "--terms", "10"]);
    assert_eq!(o.status.code(), Some(2));
}
