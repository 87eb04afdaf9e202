use std::process::{Command, Output};

use susy_lab::cli::{CatalogEntry, PartnerLevels, SuiteResult};
use susy_lab::SpectrumResult;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_susy-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn catalog_listing() {
    let o = run(&["catalog"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("oscillator-3d  IIIA  (0,∞)"));

    let o = run(&["catalog", "--format", "json"]);
    let entries: Vec<CatalogEntry> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(entries.len(), 14);

    let o = run(&["catalog", "--tag", "IIIB_neg_lambda", "--format", "json"]);
    let entries: Vec<CatalogEntry> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e.instance.name().starts_with("scarf1")));
}

#[test]
fn spectrum_levels() {
    let o = run(&["spectrum", "oscillator-3d", "--a", "-3", "--nmax", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r: SpectrumResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.values(), vec![7.0, 9.0, 11.0]);

    let o = run(&["spectrum", "oscillator-3d", "--a", "3", "--nmax", "2", "--format", "json"]);
    let r: SpectrumResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.values(), vec![0.0, 2.0, 4.0]);

    let o = run(&["spectrum", "oscillator-3d", "--a", "-3", "--format", "csv"]);
    assert!(stdout(&o).starts_with("n,E\n0,7\n"));
}

#[test]
fn both_partners() {
    let o = run(&["spectrum", "oscillator-3d", "--both-partners", "--nmax", "3", "--format", "json"]);
    let r: PartnerLevels = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.levels.len(), 4);
    assert!(r.levels.iter().all(|l| l.e_minus == l.e_plus && l.minus_n == l.n));
}

#[test]
fn verify_examples() {
    let o = run(&["verify", "oscillator-3d", "--a", "-3", "--nmax", "5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r: SuiteResult = serde_json::from_str(&stdout(&o)).unwrap();
    let q = r.checks.iter().find(|c| c.check == "quantization").unwrap();
    assert!(q.worst_error.unwrap() < 1e-9);

    let o = run(&["verify", "scarf1", "--a", "2", "--B", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("single intersection"), "{text}");
    assert!(text.contains("SKIP"));

    let o = run(&["verify", "morse", "--broken"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("BSWKB undefined: single intersection (Class I)"));
}

#[test]
fn verify_with_oracle() {
    let o = run(&["verify", "oscillator-3d", "--oracle", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r: SuiteResult = serde_json::from_str(&stdout(&o)).unwrap();
    let c = r.checks.iter().find(|c| c.check == "oracle").unwrap();
    assert!(c.worst_error.unwrap() < 1e-3);
}

#[test]
fn exit_code_contract() {
    // a tolerance no quadrature can meet
    assert_eq!(code(&run(&["verify", "oscillator-3d", "--tol", "1e-30"])), 1);
    assert_eq!(code(&run(&["spectrum", "morse-broken"])), 1);

    assert_eq!(code(&run(&["spectrum", "no-such-entry"])), 2);
    assert_eq!(code(&run(&["spectrum", "coulomb", "--a", "0"])), 2);
    assert_eq!(code(&run(&["verify", "oscillator-3d", "--hbar", "-1"])), 2);
    assert_eq!(code(&run(&["catalog", "--tag", "IV"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["spectrum", "{not json"])), 2);
}

#[test]
fn inline_json_instance() {
    let doc = r#"{"name":"osc","tag":"IIIA","params":{"a":-2,"omega":1},"domain":{"xL":0,"xR":"+inf"}}"#;
    let o = run(&["spectrum", doc, "--nmax", "1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "n,E\n0,5\n1,7\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["suite", "--skip", "oracle", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn suite_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = run(&["suite", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r: SuiteResult = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(r.pass && r.failed == 0);
    assert!(r.worst_quantization_error.unwrap() < 1e-9);
    assert!(r.checks.iter().any(|c| c.check == "oracle" && c.instance == "scarf1"));
    assert!(r.checks.iter().filter(|c| c.worst_error.is_some()).count() > 30);
}

#[test]
fn figure_data_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure-data", "oscillator-3d", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);

    let w = std::fs::read_to_string(dir.path().join("oscillator-3d-superpotentials.csv")).unwrap();
    let mut lines = w.lines();
    assert_eq!(lines.next(), Some("x,W_broken,W_unbroken"));
    assert!(lines.next().unwrap().starts_with("0.2,"));
    assert!(w.lines().last().unwrap().starts_with("8,"));

    let v = std::fs::read_to_string(dir.path().join("oscillator-3d-potentials.csv")).unwrap();
    assert!(v.starts_with("phase,x,V_minus,V_plus\n"));

    let levels = std::fs::read_to_string(dir.path().join("oscillator-3d-levels.csv")).unwrap();
    let broken: Vec<(f64, f64)> = levels
        .lines()
        .filter(|l| l.starts_with("broken,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect();
    assert_eq!(broken[..3], [(7.0, 7.0), (9.0, 9.0), (11.0, 11.0)]);
    // unbroken rows pair E-_{n+1} with E+_n
    assert!(levels.contains("unbroken,0,1,2,2\n"));
}
