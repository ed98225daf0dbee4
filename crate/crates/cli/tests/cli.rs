use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn persuade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus(stem: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{stem}.json"))
        .display()
        .to_string()
}

fn field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .parse()
        .unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn prosecutor_solve_audit_and_signal() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = path(dir.path(), "p.json");
    let o = persuade(&["solve", "--input", &corpus("prosecutor"), "--output", &scheme]);
    assert!(o.status.success(), "{o:?}");
    assert!((field(&stdout(&o), "value") - 2.0 / 3.0).abs() < 1e-9);

    let o = persuade(&["audit", "--input", &corpus("prosecutor"), "--scheme", &scheme]);
    assert!(o.status.success(), "{o:?}");
    assert!((field(&stdout(&o), "value") - 2.0 / 3.0).abs() < 1e-9);

    // the guilty state always gets "convict"
    for seed in 0..20 {
        let o = persuade(&["signal", "--input", &corpus("prosecutor"), "--scheme", &scheme, "--state", "1", "--seed", &seed.to_string()]);
        assert_eq!(stdout(&o), "signal: 1\n");
    }
}

#[test]
fn tampered_value_fails_audit() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = path(dir.path(), "p.json");
    assert!(persuade(&["solve", "--input", &corpus("prosecutor"), "--output", &scheme]).status.success());
    let text = std::fs::read_to_string(&scheme).unwrap().replace("0.6666666666666666", "0.7");
    std::fs::write(&scheme, text).unwrap();
    let o = persuade(&["audit", "--input", &corpus("prosecutor"), "--scheme", &scheme]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn investor_methods() {
    let dir = tempfile::tempdir().unwrap();
    let opt = path(dir.path(), "opt.json");
    let o = persuade(&["solve", "--input", &corpus("investor"), "--method", "iid-opt", "--output", &opt]);
    assert!(o.status.success(), "{o:?}");
    assert!((field(&stdout(&o), "value") - 5.0 / 9.0).abs() < 1e-9);
    assert!(persuade(&["audit", "--input", &corpus("investor"), "--scheme", &opt]).status.success());

    let o = persuade(&["solve", "--input", &corpus("investor"), "--method", "exact"]);
    assert!((field(&stdout(&o), "value") - 5.0 / 9.0).abs() < 1e-9);

    let approx = path(dir.path(), "approx.json");
    let o = persuade(&["solve", "--input", &corpus("investor"), "--method", "iid-approx", "--output", &approx]);
    let text = stdout(&o);
    assert!(field(&text, "value") <= field(&text, "lp_bound") + 1e-9);
    let o = persuade(&["signal", "--input", &corpus("investor"), "--scheme", &approx, "--state", "2,0"]);
    assert!(o.status.success(), "{o:?}");

    // iid methods need an iid instance
    let o = persuade(&["solve", "--input", &corpus("prosecutor"), "--method", "iid-opt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn khintchine_of_two_ones() {
    let o = persuade(&["khintchine", "--a", "1,1"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(field(&text, "brute"), 1.0);
    assert!((field(&text, "lp") - 1.0).abs() < 1e-9);
}

#[test]
fn verify_small_passes() {
    let o = persuade(&["verify", "--suite", "small", "--seed", "7"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn same_seed_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = path(dir.path(), name);
        let o = persuade(&["generate", "--kind", "iid", "--actions", "3", "--types", "2", "--seed", "11", "--output", &out]);
        assert!(o.status.success());
        let bb = persuade(&["blackbox", "--input", &out, "--epsilon", "0.3", "-K", "50", "--force-K", "--trials", "50", "--seed", "4"]);
        assert!(bb.status.success(), "{bb:?}");
        (std::fs::read(&out).unwrap(), bb.stdout)
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn corpus_round_trips_through_solve() {
    for stem in ["prosecutor", "investor_halved", "rain_shine_r", "rain_shine_s", "three_action_lambda", "three_action_lambda_prime"] {
        let dir = tempfile::tempdir().unwrap();
        let scheme = path(dir.path(), "s.json");
        assert!(persuade(&["solve", "--input", &corpus(stem), "--output", &scheme]).status.success(), "{stem}");
        let first = std::fs::read(&scheme).unwrap();
        let o = persuade(&["audit", "--input", &corpus(stem), "--scheme", &scheme]);
        assert!(o.status.success(), "{stem}: {o:?}");
        assert!(persuade(&["solve", "--input", &corpus(stem), "--output", &scheme]).status.success());
        assert_eq!(first, std::fs::read(&scheme).unwrap(), "{stem}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(persuade(&["solve"]).status.code(), Some(2));
    assert_eq!(persuade(&["solve", "--input", "x", "--method", "magic"]).status.code(), Some(2));
    assert_eq!(persuade(&["solve", "--input", &corpus("prosecutor"), "--epsilon", "-1"]).status.code(), Some(2));
    assert_eq!(
        persuade(&["blackbox", "--input", &corpus("prosecutor"), "--epsilon", "0.2", "-K", "10"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, "{\n  \"kind\": \"explicit\",\n  \"actions\": 2,\n  \"states\": 3\n}\n").unwrap();
    let o = persuade(&["solve", "--input", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("states") && err.contains("line 4"), "{err}");

    assert_eq!(persuade(&["solve", "--input", &path(dir.path(), "missing.json")]).status.code(), Some(1));
}
