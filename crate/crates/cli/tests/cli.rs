use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fermat-forge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ff-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn charsum_gauss_sum() {
    let o = run(&["charsum", "--group", "F_7", "--poly", "0,0,1", "--poly", "0,1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("poly,modulus,bound,ratio,pass\n"));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let gauss = &rows[0];
    assert_eq!(&gauss[0], "0,0,1");
    assert!((gauss[1].parse::<f64>().unwrap() - 7f64.sqrt()).abs() < 1e-9);
    assert!(rows[1][1].parse::<f64>().unwrap() < 1e-9);
    assert_eq!(&gauss[4], "true");
}

#[test]
fn count_structured_set_is_zero() {
    let o = run(&["count", "--group", "F_101", "--set", "densecount"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "F_101");
    assert_eq!(row[4], "0");
}

#[test]
fn count_methods_agree() {
    let eq = r#"{"blocks":[2,1],"exponents":[1,2],"coefficients":[1,1,-1],"u":0}"#;
    let a = run(&["count", "--group", "F_5", "--set", "full", "--equation", eq, "--method", "brute"]);
    let b = run(&["count", "--group", "F_5", "--set", "full", "--equation", eq]);
    let count = |o: &Output| stdout(o).lines().nth(1).unwrap().split(',').nth(4).unwrap().to_string();
    assert_eq!(count(&a), "25");
    assert_eq!(count(&b), "25");
}

#[test]
fn obstruction_report() {
    let o = run(&["obstruction", "--group", "Z/15", "--k", "2", "--s", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["15", "2", "3", "10"]);
    assert_eq!(row[8], "1|2");
}

#[test]
fn extremal_example() {
    let o = run(&["extremal", "--group", "F_13", "--spec", r#"{"lambdas":[1],"exponents":[2],"blocks":[3]}"#]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "6");
    assert_eq!(row[5], "0");
}

#[test]
fn bohr_l1_full_group() {
    let spec = r#"{"group":{"kind":"cyclic","N":17},"chars":[1],"intervals":[[[0,1],[1,1]]]}"#;
    let o = run(&["bohr-l1", "--spec", spec]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], &["17", "1", "1"]);
    assert!((row[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn wrap_emits_json() {
    let o = run(&[
        "wrap",
        "--group",
        "Z/31",
        "--set",
        "full",
        "--set",
        "full",
        "--set",
        "full",
        "--epsilon",
        "0.3",
        "--delta",
        "0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["sets"].as_array().unwrap().len(), 3);
    assert_eq!(v["truncated_count"], 31 * 31);
}

#[test]
fn wrap_rejects_sparse_sets() {
    let o = run(&[
        "wrap",
        "--group",
        "Z/31",
        "--set",
        "interval:len=2",
        "--set",
        "full",
        "--set",
        "full",
        "--epsilon",
        "0.3",
        "--delta",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn run_writes_artifacts_and_replays() {
    let dir = scratch("run");
    let cfg = configs().join("extremal_gallery.toml");
    let o = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.join("extremal_gallery.csv")).unwrap();
    assert!(dir.join("extremal_gallery.meta.json").exists());
    let row7 = csv.lines().nth(8).unwrap();
    let r = bin().args(["run", "--config"]).arg(&cfg).args(["--replay", "7"]).output().unwrap();
    assert!(r.status.success());
    assert_eq!(stdout(&r).lines().nth(1).unwrap(), row7);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn run_is_deterministic() {
    let cfg = configs().join("threshold_scan.toml");
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for d in [&a, &b] {
        let o = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(d).output().unwrap();
        assert!(o.status.success());
    }
    let read = |d: &PathBuf| std::fs::read(d.join("threshold_scan.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert!(a.join("threshold_scan.svg").exists());
    std::fs::remove_dir_all(a).unwrap();
    std::fs::remove_dir_all(b).unwrap();
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(run(&["count", "--group", "Z/1", "--set", "full"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--group", "F_7", "--set", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["charsum", "--group", "F_7", "--poly", "3"]).status.code(), Some(2));
}
