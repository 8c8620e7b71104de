use std::time::Instant;

use wachlab::wach::{build_wach, inject_g_fault, wach_report, WachContext, WachData, WachParams};

fn build(p: u64, k: u32, ap: i64) -> WachData {
    let params = WachParams::unramified(p, k, ap);
    let ctx = WachContext::new(&params).unwrap();
    build_wach(&params, &ctx).unwrap()
}

#[test]
fn small_cases_satisfy_all_identities() {
    for (p, k, ap) in [(3, 5, 3), (3, 5, -3), (5, 7, 5), (5, 9, 10), (7, 9, 7)] {
        let t = Instant::now();
        let data = build(p, k, ap);
        let r = wach_report(&data).unwrap();
        eprintln!("p={p} k={k} ap={ap}: {:?}", t.elapsed());
        assert!(r.passed(), "p={p} k={k} ap={ap}: {:?}", r.first_failure());
        assert!(data.certified_digits >= 2);
    }
}

#[test]
fn injected_fault_is_located() {
    let data = build(5, 7, 5);
    let k = data.params.k as i64;
    for d in [k - 1, k + 2] {
        let bad = inject_g_fault(&data, 0, d).unwrap();
        let r = wach_report(&bad).unwrap();
        let f = r.first_failure().expect("fault must be detected");
        assert!(f.name.starts_with("commutation") || f.name.starts_with("cocycle"));
        assert!(f.fail_degree.unwrap() >= d);
    }
}

#[test]
fn json_roundtrip() {
    let data = build(3, 5, 3);
    let v = data.to_json();
    let back = WachData::from_json(&v).unwrap();
    assert_eq!(back.to_json(), v);
    assert!(wach_report(&back).unwrap().passed());
}
