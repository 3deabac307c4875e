use diophant::cli::{run_with, verify_file};
use diophant::numeric::DEFAULT_CEILING;
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("diophant").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cli_json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = cli(&full);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn pell_and_expansion() {
    let v = cli_json(&["cf", "pell", "61"]);
    assert_eq!(v["x"], "1766319049");
    assert_eq!(v["y"], "226153980");
    let v = cli_json(&["cf", "expand", "pi", "--count", "5"]);
    let q: Vec<&str> = v["quotients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(q, ["3", "7", "15", "1", "292"]);
}

#[test]
fn negative_gap_parses() {
    let v = cli_json(&["solve", "expgap", "-a", "2", "-b", "3", "-m=-1"]);
    assert_eq!(v["solutions"], serde_json::json!([[1, 1], [3, 2]]));
    assert_eq!(v["complete"], true);
}

#[test]
fn bad_input_exit_codes() {
    let (code, _, err) = cli(&["class", "h", "-d", "12"]);
    assert_ne!(code, 0);
    assert!(err.contains("error"), "{err}");
    let (code, _, _) = cli(&["--precision-ceiling", "16", "class", "e163"]);
    assert_eq!(code, 2);
    let (code, _, _) = cli(&["no-such-command"]);
    assert_eq!(code, 2);
}

#[test]
fn certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let v = cli_json(&[
        "--certificate-dir",
        d,
        "solve",
        "expgap",
        "-a",
        "3",
        "-b",
        "2",
        "-m",
        "1",
    ]);
    let path = v["certificate_file"].as_str().unwrap().to_string();
    verify_file(std::path::Path::new(&path), DEFAULT_CEILING).unwrap();

    let (code, out, _) = cli(&["--format", "json", "verify", &path]);
    assert_eq!(code, 0, "{out}");

    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\"new_bound\": \"", "\"new_bound\": \"1", 1);
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).unwrap();
    assert!(verify_file(std::path::Path::new(&path), DEFAULT_CEILING).is_err());
}

#[test]
fn csv_output() {
    let (code, out, _) = cli(&["--format", "csv", "class", "list", "--h", "1", "--dmax", "200"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.len() >= 10, "{out}");
    assert!(lines.iter().skip(1).any(|l| l.starts_with("163")), "{out}");
}
