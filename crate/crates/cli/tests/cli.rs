use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symbasis")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dims_single_value() {
    let o = run(&["dims", "--family", "Pminus", "--r", "2", "--k", "1", "--n", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "20");
}

#[test]
fn dims_range_as_csv() {
    let o = run(&["--format", "csv", "dims", "--family", "P", "--k", "0", "--n", "2", "--r", "0", "--r-max", "3"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let dims: Vec<u64> = rdr.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(dims, vec![1, 3, 6, 10]);
}

#[test]
fn basis_exit_codes() {
    let ok = run(&["basis", "--family", "P", "--r", "1", "--k", "1", "--n", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    let obstructed = run(&["basis", "--family", "P", "--r", "3", "--k", "1", "--n", "2"]);
    assert_eq!(obstructed.status.code(), Some(2));
    assert!(stdout(&obstructed).contains("6·1 ⊕ 7·2"));
    let bad = run(&["basis", "--family", "P", "--r", "1", "--k", "1", "--n", "5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));
}

#[test]
fn basis_json_is_well_formed() {
    let o = run(&["--format", "json", "basis", "--family", "P", "--r", "1", "--k", "1", "--n", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 6);
    assert_eq!(v["exists"], true);
    assert_eq!(v["basis"].as_array().unwrap().len(), 6);
}

#[test]
fn output_is_deterministic() {
    let args = ["--format", "json", "basis", "--family", "Pminus", "--r", "2", "--k", "1", "--n", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn writes_to_file() {
    let dir = std::env::temp_dir().join(format!("symbasis-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.md");
    let o = run(&["--format", "md", "-o", path.to_str().unwrap(), "invariant-table", "--n", "2", "--r-max", "3"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("| "));
    assert!(!text.contains('!'));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn other_commands() {
    let s = run(&["stiffness-orbits", "--r", "2", "--n", "2"]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let d = run(&["duality-check", "--family", "P", "--r", "1", "--k", "1", "--n", "3"]);
    assert_eq!(d.status.code(), Some(0));
    let g = run(&["geodecomp-check", "--family", "P", "--r", "2", "--k", "0", "--n", "2"]);
    assert_eq!(g.status.code(), Some(0));
    let dec = run(&["decomposability", "--family", "P", "--r", "3", "--k", "1", "--n", "3"]);
    assert_eq!(dec.status.code(), Some(2));
    let rep = run(&["rep-decompose", "--family", "P", "--r", "1", "--k", "0", "--n", "2"]);
    assert!(rep.status.success());
}
