//! Regression against stored Wach data. Regenerate with
//! `wachlab fixture --p P --k K --ap A --out-dir DIR` if the JSON layout changes.

use wachlab::modp::{delta_line, extension_data, reduce_wach, solve_z, ResWach};
use wachlab::wach::{build_wach, verify_wach, WachContext, WachData};

fn load(name: &str) -> serde_json::Value {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn fresh(stored: &WachData) -> WachData {
    let ctx = WachContext::new(&stored.params).unwrap();
    build_wach(&stored.params, &ctx).unwrap()
}

#[test]
fn stored_wach_data_verifies_and_matches_rebuild() {
    for name in ["wach_p5_k8_ap15.json", "wach_p7_k9_ap21.json"] {
        let json = load(name);
        let stored = WachData::from_json(&json).unwrap();
        let report = verify_wach(&stored).unwrap();
        assert!(report.passed(), "{name}: {:?}", report.first_failure());
        assert_eq!(fresh(&stored).to_json(), json, "{name}");
    }
}

#[test]
fn stored_extension_instance_reduces_to_the_same_data() {
    let stored = WachData::from_json(&load("wach_p5_k8_ap15.json")).unwrap();
    let res = reduce_wach(&stored).unwrap();
    assert_eq!(res, ResWach::from_json(&load("reswach_p5_k8_ap15.json")).unwrap());
    assert_eq!(res.beta, res.field.elem(1));
    let z = solve_z(&res.ubar, &res.beta, res.k, res.mx).unwrap();
    let w = delta_line(&res, &z, &res.beta).unwrap();
    assert_eq!(w.lambda, res.field.elem(1));
    let ext = extension_data(&res, &z, &w.lambda).unwrap();
    assert!(ext.nontrivial);
}
