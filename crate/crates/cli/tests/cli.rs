use std::path::PathBuf;
use std::process::{Command, Output};

fn wachlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wachlab"))
        .args(args)
        .output()
        .expect("run wachlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header.join(","),
        "p,k,ap,val,variant,char1,char2,lambda_poly,ramification,match"
    );
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn tempdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("wachlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn reduce_split_example() {
    let o = wachlab(&["reduce", "--p", "5", "--k", "9", "--ap", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "split: ω^3μ_3 ⊕ ωμ_2");
}

#[test]
fn reduce_out_of_scope_exits_2() {
    let o = wachlab(&["reduce", "--p", "5", "--k", "6", "--ap", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of scope"));
    let o = wachlab(&["reduce", "--p", "5", "--k", "8", "--ap", "25"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reduce_ramified_irreducible() {
    let o = wachlab(&["reduce", "--p", "5", "--k", "7", "--ap", "pi", "--eisenstein", "x^2-5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "irreducible: ind(ω₂^2)");
}

#[test]
fn parse_errors_exit_3() {
    for args in [
        vec!["reduce", "--p", "5", "--k", "8", "--ap", "3*+"],
        vec!["reduce", "--p", "5", "--k", "8", "--ap", "pi", "--eisenstein", "2x^2-5"],
        vec!["reduce", "--p", "5", "--k", "8"],
        vec!["table", "--p", "5", "--k", "7..x"],
    ] {
        assert_eq!(wachlab(&args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn reduce_validate_json() {
    let o = wachlab(&["reduce", "--p", "5", "--k", "8", "--ap", "15", "--validate", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["variant"], "nonsplit");
    assert_eq!(v["provenance"], "both");
    assert_eq!(v["ramification"], "peu");
    assert_eq!(v["nontrivial"], true);
    let checks: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert!(checks.contains(&"psi cokernel"));
    assert!(checks.contains(&"det = omega^(k-1)"));
}

#[test]
fn table_p7_all_match() {
    let o = wachlab(&["table", "--p", "7", "--k", "9..13", "--ap", "7", "--validate"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[9] == "yes"));
    assert_eq!(rows.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["9", "10", "11", "12", "13"]);
}

#[test]
fn table_p5_lambda_column() {
    let o = wachlab(&["table", "--p", "5", "--k", "7..9", "--ap", "5,10,15,20", "--validate"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| !r[7].is_empty() && r[9] == "yes"));
    // k = 8, a_p = 15: λ = 3·7 mod 5 = 1, the extension case.
    let r = rows.iter().find(|r| r[1] == "8" && r[2] == "15").unwrap();
    assert_eq!((r[4].as_str(), r[7].as_str(), r[8].as_str()), ("nonsplit", "x+4", "peu"));
}

#[test]
fn table_empty_range() {
    let o = wachlab(&["table", "--p", "5", "--k", "20..30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(csv_rows(&o).is_empty());
}

#[test]
fn table_is_deterministic_and_validate_keeps_formula_columns() {
    let base = ["table", "--p", "3,5", "--format", "json"];
    let a = wachlab(&[&base[..], &["--jobs", "1", "--validate"]].concat());
    let b = wachlab(&[&base[..], &["--jobs", "4", "--validate"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let plain = wachlab(&["table", "--p", "3,5"]);
    let valid = wachlab(&["table", "--p", "3,5", "--validate"]);
    let (x, y) = (csv_rows(&plain), csv_rows(&valid));
    assert_eq!(x.len(), y.len());
    for (r, s) in x.iter().zip(&y) {
        assert_eq!(r[..9], s[..9]);
        assert_eq!(r[9], "");
        assert_eq!(s[9], "yes");
    }
}

#[test]
fn table_writes_sidecar() {
    let d = tempdir("table");
    let out = d.join("t.csv");
    let o = wachlab(&["table", "--p", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let body = std::fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("p,k,ap,"));
    assert!(!body.contains("elapsed"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("t.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["rows"], 2);
}

#[test]
fn verify_quick_passes_fast() {
    let t = std::time::Instant::now();
    let o = wachlab(&["verify", "--quick", "--format", "json"]);
    assert!(t.elapsed().as_secs() < 10);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["suite"].as_str().unwrap())
        .collect();
    for s in ["operators", "wach", "modp", "classify", "faults"] {
        assert!(names.contains(&s), "suite {s} missing");
    }
}

#[test]
fn verify_with_fault_names_the_check() {
    for (fault, check) in [
        ("g", "commutation gamma="),
        ("alpha", "phi(delta) = lambda delta"),
        ("lambda", "phi(delta) = lambda delta"),
    ] {
        let o = wachlab(&["verify", "--quick", "--fault", fault]);
        assert_eq!(o.status.code(), Some(1), "{fault}");
        let text = stdout(&o);
        assert!(
            text.lines().any(|l| l.starts_with("FAIL") && l.contains(check)),
            "{fault}: {text}"
        );
    }
}

#[test]
fn fixture_files_roundtrip() {
    let d = tempdir("fixture");
    let o = wachlab(&["fixture", "--p", "5", "--k", "8", "--ap", "15", "--out-dir", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let read = |n: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(d.join(n)).unwrap()).unwrap()
    };
    let wach = wachlab::wach::WachData::from_json(&read("wach.json")).unwrap();
    assert!(wachlab::wach::verify_wach(&wach).is_ok());
    let res = wachlab::modp::ResWach::from_json(&read("reswach.json")).unwrap();
    assert_eq!(res.beta, res.field.elem(1));
    let w = wachlab::modp::CharWitness::from_json(&read("witness.json"), 5).unwrap();
    assert_eq!(w.lambda, res.field.elem(1));
    assert_eq!(read("extension.json")["ramification"], "peu");
    assert_eq!(read("result.json")["variant"], "nonsplit");
}

#[test]
fn formula_grid_matches_golden_table() {
    let o = wachlab(&["table", "--p", "3..13"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = include_str!("fixtures/formula_grid.csv");
    assert_eq!(stdout(&o), golden);
}
