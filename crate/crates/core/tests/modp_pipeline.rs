use wachlab::modp::*;
use wachlab::wach::{build_wach, WachContext, WachParams};
use wachlab::{Coeff, Fq};

fn reduced(p: u64, k: u32, ap: i64) -> ResWach {
    let params = WachParams::unramified(p, k, ap);
    let ctx = WachContext::new(&params).unwrap();
    reduce_wach(&build_wach(&params, &ctx).unwrap()).unwrap()
}

#[test]
fn kp2_split_for_p3() {
    let res = reduced(3, 5, 3);
    assert_eq!(res.beta, res.field.elem(1));
    let q = build_q_kp2(&res).unwrap();
    let m = dwork_trivialize(&q, res.mx).unwrap();
    let eig = diagonalize_const(&q.at_zero(), &res.beta).unwrap();
    assert!(eig.double_root);
    assert_eq!(eig.lambda_value(), res.field.elem(2));
    let checks = gamma_scalar_check(&res, &m, &eig).unwrap();
    assert_eq!(checks.len(), 2);
}

#[test]
fn kp2_quadratic_roots_for_p5() {
    let res = reduced(5, 7, 5);
    let q = build_q_kp2(&res).unwrap();
    let m = dwork_trivialize(&q, res.mx).unwrap();
    let eig = diagonalize_const(&q.at_zero(), &res.beta).unwrap();
    gamma_scalar_check(&res, &m, &eig).unwrap();
}

#[test]
fn delta_line_for_p5_k9() {
    let res = reduced(5, 9, 5);
    assert_eq!(res.beta, res.field.elem(3));
    let z = solve_z(&res.ubar, &res.beta, res.k, res.mx).unwrap();
    let w = delta_line(&res, &z, &res.beta).unwrap();
    assert_eq!(w.omega_exp, 3);
    assert!(w.checked_precision > 0);
}

#[test]
fn extension_for_p5_k8() {
    let res = reduced(5, 8, 15);
    let one = Fq::one(&res.field);
    assert_eq!(res.beta, one);
    let z = solve_z(&res.ubar, &res.beta, res.k, res.mx).unwrap();
    let ext = extension_data(&res, &z, &res.beta).unwrap();
    assert_eq!(ext.ramification, Ramification::Peu);
    assert!(ext.nontrivial);
}
