use wachlab::modp::{delta_line, inject_alpha_fault, reduce_wach, solve_z};
use wachlab::wach::{build_wach, inject_g_fault, verify_wach, WachContext, WachParams};
use wachlab::Error;

fn check_name(e: Error) -> String {
    match e {
        Error::CheckFailed { check, .. } => check,
        other => panic!("expected a named check failure, got {other}"),
    }
}

#[test]
fn perturbed_gamma_matrix_fails_commutation() {
    for (p, k, ap) in [(5u64, 9u32, 5i64), (7, 10, 14)] {
        let params = WachParams::unramified(p, k, ap);
        let data = build_wach(&params, &WachContext::new(&params).unwrap()).unwrap();
        for gi in 0..2 {
            for degree in [1, k as i64 - 1, k as i64 + 2] {
                let bad = inject_g_fault(&data, gi, degree).unwrap();
                let name = check_name(verify_wach(&bad).unwrap_err());
                let a = params.gamma_gens[gi];
                assert_eq!(name, format!("commutation gamma={a}"), "p={p} k={k} degree {degree}");
            }
        }
    }
}

#[test]
fn perturbed_alpha_bar_fails_phi_check() {
    for (p, k, ap) in [(5u64, 9u32, 5i64), (5, 8, 15), (7, 11, 21)] {
        let params = WachParams::unramified(p, k, ap);
        let data = build_wach(&params, &WachContext::new(&params).unwrap()).unwrap();
        let res = reduce_wach(&data).unwrap();
        let z = solve_z(&res.ubar, &res.beta, k, res.mx).unwrap();
        assert!(delta_line(&res, &z, &res.beta).is_ok());
        for degree in [p as i64, p as i64 + 3] {
            let bad = inject_alpha_fault(&res, degree);
            let name = check_name(delta_line(&bad, &z, &res.beta).unwrap_err());
            assert_eq!(name, "phi(delta) = lambda delta", "p={p} k={k} degree {degree}");
        }
    }
}

#[test]
fn wrong_lambda_fails_phi_check() {
    for (p, k, ap) in [(5u64, 9u32, 5i64), (7, 12, 7)] {
        let params = WachParams::unramified(p, k, ap);
        let data = build_wach(&params, &WachContext::new(&params).unwrap()).unwrap();
        let res = reduce_wach(&data).unwrap();
        for l in 1..p as i64 {
            let lambda = res.field.elem(l);
            if lambda == res.beta {
                continue;
            }
            // Either z for the wrong λ or the correct z: both must fail.
            let z_wrong = solve_z(&res.ubar, &lambda, k, res.mx).unwrap();
            let z_right = solve_z(&res.ubar, &res.beta, k, res.mx).unwrap();
            for z in [z_wrong, z_right] {
                let name = check_name(delta_line(&res, &z, &lambda).unwrap_err());
                assert_eq!(name, "phi(delta) = lambda delta", "p={p} k={k} λ={l}");
            }
        }
    }
}
