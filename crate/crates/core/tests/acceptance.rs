//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use wachlab::classify::{
    canonicalize_rho, classify, closed_form_rho, cross_validate_with, retryable, PipelineRun, Variant,
};
use wachlab::modp::{delta_line, inject_alpha_fault, reduce_wach, solve_z};
use wachlab::suite::{default_rings, operator_suite};
use wachlab::wach::{build_wach, inject_g_fault, uniqueness_check, verify_wach, WachContext, WachParams};
use wachlab::{Coeff, EisensteinRing, Error, Fq, OlElem, ResSeries};

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

/// A finished (p, k, c) run of the pipeline.
struct Run {
    p: u64,
    k: u32,
    c: i64,
    elapsed: Duration,
    result: Result<PipelineRun, String>,
}

fn run_one(p: u64, k: u32, c: i64, ctx: &WachContext) -> Run {
    let t = Instant::now();
    let params = WachParams::unramified(p, k, c * p as i64);
    let result = match cross_validate_with(&params, ctx) {
        Ok((_, run)) => Ok(run),
        Err(e) if retryable(&e) => {
            let mut p2 = params.clone();
            p2.mx *= 2;
            WachContext::new(&p2)
                .and_then(|c2| cross_validate_with(&p2, &c2))
                .map(|(_, run)| run)
                .map_err(|e| e.to_string())
        }
        Err(e) => Err(e.to_string()),
    };
    Run {
        p,
        k,
        c,
        elapsed: t.elapsed(),
        result,
    }
}

/// Runs every (p, k) group on a small thread pool; each group shares one
/// context across its a_p values.
fn run_grid(groups: Vec<(u64, u32)>) -> Vec<Run> {
    let next = AtomicUsize::new(0);
    let out = Mutex::new(Vec::new());
    let threads = std::thread::available_parallelism().map_or(2, |n| n.get()).min(8);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(p, k)) = groups.get(i) else { break };
                let ctx = WachContext::new(&WachParams::unramified(p, k, p as i64));
                let mut local = Vec::new();
                for c in 1..p as i64 {
                    match &ctx {
                        Ok(ctx) => local.push(run_one(p, k, c, ctx)),
                        Err(e) => local.push(Run {
                            p,
                            k,
                            c,
                            elapsed: Duration::ZERO,
                            result: Err(format!("context: {e}")),
                        }),
                    }
                }
                out.lock().unwrap().extend(local);
            });
        }
    });
    let mut v = out.into_inner().unwrap();
    v.sort_by_key(|r| (r.p, r.k, r.c));
    v
}

const GRID_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

fn first_error(runs: &[Run]) -> Option<String> {
    runs.iter().find_map(|r| {
        r.result
            .as_ref()
            .err()
            .map(|e| format!("p={} k={} c={}: {e}", r.p, r.k, r.c))
    })
}

fn slowest(runs: &[Run]) -> Duration {
    runs.iter().map(|r| r.elapsed).max().unwrap_or_default()
}

fn criterion_1(runs: &[Run]) -> Outcome {
    if let Some(e) = first_error(runs) {
        return outcome(false, e);
    }
    for r in runs {
        let run = r.result.as_ref().unwrap();
        let want = run.reduced.field.elem(r.c * (r.k as i64 - 1));
        if run.result.lambda != Some(want) {
            return outcome(false, format!("p={} k={} c={}: λ ≠ c(k−1)", r.p, r.k, r.c));
        }
    }
    let slow = slowest(runs);
    outcome(
        slow < Duration::from_secs(60),
        format!("{} instances match, λ = c(k−1) mod p, slowest {:.2?}", runs.len(), slow),
    )
}

fn criterion_2(runs: &[Run]) -> Outcome {
    if let Some(e) = first_error(runs) {
        return outcome(false, e);
    }
    let (mut quad, mut double) = (0, 0);
    for r in runs {
        let run = r.result.as_ref().unwrap();
        let Variant::SplitSum(a, b) = run.result.variant else {
            return outcome(false, format!("p={} k={} c={}: not split", r.p, r.k, r.c));
        };
        if a.omega_exp != 1 || b.omega_exp != 1 {
            return outcome(false, format!("p={} c={}: ω-exponents not 1", r.p, r.c));
        }
        // λ² − (a_p/p)λ + 1 = 0 and λ_b = λ_a^{−1}.
        let l = a.lambda;
        let lq = if l.field().degree() == 2 { l } else { l.embed(wachlab::FqField::quadratic(r.p)) };
        let cc = lq.field().elem(r.c);
        let val = lq.times(&lq).minus(&cc.times(&lq)).plus(&lq.field().elem(1));
        if !val.is_zero() || a.mul(&b).lambda.as_prime() != Some(1) {
            return outcome(false, format!("p={} c={}: λ is not a root of x² − cx + 1", r.p, r.c));
        }
        if l.field().degree() == 2 {
            quad += 1;
        }
        if a == b {
            double += 1;
        }
    }
    outcome(
        quad > 0 && double > 0,
        format!(
            "{} instances match ({quad} with λ ∉ F_p, {double} double roots), slowest {:.2?}",
            runs.len(),
            slowest(runs)
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut done = Vec::new();
    for p in [5u64, 7] {
        let k = p as u32 + 3;
        for c in 1..p as i64 {
            let l = (c * (k as i64 - 1)).rem_euclid(p as i64);
            if l != 1 && l != p as i64 - 1 {
                continue;
            }
            let t = Instant::now();
            let params = WachParams::unramified(p, k, c * p as i64);
            let run = WachContext::new(&params).and_then(|ctx| cross_validate_with(&params, &ctx));
            let run = match run {
                Ok((_, run)) => run,
                Err(e) => return outcome(false, format!("p={p} c={c}: {e}")),
            };
            let Some(ext) = &run.extension else {
                return outcome(false, format!("p={p} c={c}: no extension data"));
            };
            let f = run.reduced.field;
            let lam = f.elem(l);
            let m = &ext.mat_phi;
            let phi_ok = m.e[2].is_zero()
                && m.e[0].coeff(0) == lam
                && m.e[3].coeff(0) == lam.inverse().unwrap()
                && m.e[1].valuation() == Some(-1);
            let gamma_ok = ext.mat_gamma.iter().all(|(a, g)| {
                let om = run.reduced.omega(*a).inverse().unwrap();
                g.e[2].is_zero()
                    && g.e[0].coeff(0) == om
                    && g.e[3].coeff(0) == om.times(&om)
                    && g.e[1].valuation().map_or(true, |v| v >= 2)
            });
            let w = &ext.cokernel.windows;
            let stable = w.len() >= 3 && w[w.len() - 3..].iter().all(|v| v.in_image == w[w.len() - 1].in_image);
            let nonsplit = matches!(run.result.variant, Variant::NonSplit { nontrivial: true, .. });
            if !(phi_ok && gamma_ok && stable && nonsplit && ext.nontrivial)
                || ext.ramification != wachlab::modp::Ramification::Peu
            {
                return outcome(false, format!("p={p} c={c}: shape, ramification or verdict wrong"));
            }
            let el = t.elapsed();
            if el > Duration::from_secs(120) {
                return outcome(false, format!("p={p} c={c}: {el:.2?}"));
            }
            done.push(format!("p={p} a_p={} λ={l}", c * p as i64));
        }
    }
    outcome(
        done.len() == 4,
        format!("peu, non-split, window-stable: {}", done.join(", ")),
    )
}

fn criterion_4() -> Outcome {
    let mut n = 0;
    for p in [5u64, 7, 11] {
        let ring = EisensteinRing::new(p, vec![BigInt::from(-(p as i64)), 0.into(), 1.into()], 6).unwrap();
        let pi = OlElem::uniformizer(&ring);
        for k in p as u32 + 2..=2 * p as u32 - 1 {
            let t = Instant::now();
            let r = match classify(p, k, &pi) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("p={p} k={k}: {e}")),
            };
            let want = closed_form_rho(p, k);
            let ok = matches!(r.variant, Variant::Irreducible(rho) if rho == canonicalize_rho(&want));
            if !ok || t.elapsed() > Duration::from_secs(1) {
                return outcome(false, format!("p={p} k={k}: expected {want}"));
            }
            n += 1;
        }
    }
    outcome(true, format!("{n} instances give ind(ω₂^(k−p)), semisimplicity precondition holds"))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut total = 0;
    for ring in default_rings() {
        let reps = match operator_suite(&ring, 100, 20_26) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{}: {e}", ring.label())),
        };
        for rep in reps {
            if !rep.passed() {
                return outcome(
                    false,
                    format!("{} [{}]: {:?}", rep.identity, rep.ring, rep.first_failure),
                );
            }
            total += rep.instances;
        }
    }
    let el = t.elapsed();
    outcome(
        el < Duration::from_secs(60),
        format!("{total} randomized checks (4 identities × 12 rings × 100), 0 failures, {el:.2?}"),
    )
}

fn criterion_6(runs: &[Run]) -> Outcome {
    if let Some(e) = first_error(runs) {
        return outcome(false, e);
    }
    let mut names: BTreeMap<&'static str, usize> = BTreeMap::new();
    for r in runs {
        let run = r.result.as_ref().unwrap();
        for (key, prefix) in [
            ("commutation", "commutation gamma="),
            ("cocycle", "cocycle gamma="),
            ("G_init", "G = G_init mod X^(k-1)"),
            ("alpha(0)", "alpha(0) = a_p"),
        ] {
            if !run.checks.iter().any(|c| c.starts_with(prefix)) {
                return outcome(false, format!("p={} k={} c={}: {prefix} not run", r.p, r.k, r.c));
            }
            *names.entry(key).or_default() += 1;
        }
        if run.wach.certified_digits < run.wach.params.n_target {
            return outcome(false, format!("p={} k={}: certified digits too low", r.p, r.k));
        }
    }
    for (p, k, ap) in [(5u64, 8u32, 15i64), (5, 9, 5), (7, 10, 14)] {
        match uniqueness_check(&WachParams::unramified(p, k, ap)) {
            Ok(c) if c.passed => {}
            Ok(c) => return outcome(false, format!("uniqueness p={p} k={k}: differs at X^{:?}", c.fail_degree)),
            Err(e) => return outcome(false, format!("uniqueness p={p} k={k}: {e}")),
        }
    }
    outcome(
        true,
        format!(
            "relations and G_init hold on {} grid instances; precision doubling stable on 3 samples",
            runs.len()
        ),
    )
}

fn criterion_7(all: &[&[Run]]) -> Outcome {
    let mut n = 0;
    for runs in all {
        for r in runs.iter() {
            let Ok(run) = &r.result else {
                return outcome(false, format!("p={} k={} c={}: no result", r.p, r.k, r.c));
            };
            let ring = EisensteinRing::unramified(r.p, 6).unwrap();
            let formula = classify(r.p, r.k, &OlElem::from_i64(&ring, r.c * r.p as i64)).unwrap();
            for v in [&run.result.variant, &formula.variant] {
                if let Variant::SplitSum(a, b) = v {
                    let det = a.mul(b);
                    let want = wachlab::classify::CharSymbol::omega_pow(r.p, r.k as i64 - 1);
                    if det != want {
                        return outcome(false, format!("p={} k={} c={}: {a}·{b} = {det}", r.p, r.k, r.c));
                    }
                    n += 1;
                }
            }
        }
    }
    outcome(true, format!("{n} split outputs satisfy χ₁χ₂ = ω^(k−1)"))
}

fn named_failure(r: Result<(), Error>) -> Option<String> {
    match r {
        Err(Error::CheckFailed { check, .. }) => Some(check),
        _ => None,
    }
}

fn criterion_8() -> Outcome {
    let mut fixtures = 0;
    for (p, k, ap) in [(5u64, 9u32, 5i64), (5, 8, 15), (7, 11, 21)] {
        let params = WachParams::unramified(p, k, ap);
        let data = match WachContext::new(&params).and_then(|c| build_wach(&params, &c)) {
            Ok(d) => d,
            Err(e) => return outcome(false, format!("p={p} k={k}: {e}")),
        };
        for (gi, a) in params.gamma_gens.iter().enumerate() {
            for degree in [1, k as i64, params.mx - 1] {
                let bad = inject_g_fault(&data, gi, degree).unwrap();
                let got = named_failure(verify_wach(&bad).map(|_| ()));
                if got.as_deref() != Some(&format!("commutation gamma={a}")) {
                    return outcome(false, format!("perturbed G p={p} k={k} deg {degree}: {got:?}"));
                }
                fixtures += 1;
            }
        }
        let res = reduce_wach(&data).unwrap();
        let z = solve_z(&res.ubar, &res.beta, k, res.mx).unwrap();
        for degree in [p as i64, p as i64 + 1, 2 * p as i64] {
            let bad = inject_alpha_fault(&res, degree);
            let got = named_failure(delta_line(&bad, &z, &res.beta).map(|_| ()));
            if got.as_deref() != Some("phi(delta) = lambda delta") {
                return outcome(false, format!("perturbed ᾱ p={p} k={k} deg {degree}: {got:?}"));
            }
            fixtures += 1;
        }
        for l in 1..p as i64 {
            let wrong: Fq = res.field.elem(l);
            if wrong == res.beta {
                continue;
            }
            let zw: ResSeries = solve_z(&res.ubar, &wrong, k, res.mx).unwrap();
            let got = named_failure(delta_line(&res, &zw, &wrong).map(|_| ()));
            if got.as_deref() != Some("phi(delta) = lambda delta") {
                return outcome(false, format!("wrong λ={l} p={p} k={k}: {got:?}"));
            }
            fixtures += 1;
        }
    }
    outcome(true, format!("{fixtures} fault fixtures, each caught by its named check, 0 silent passes"))
}

fn main() {
    let t0 = Instant::now();
    let grid1: Vec<(u64, u32)> = GRID_PRIMES
        .iter()
        .flat_map(|&p| (p as u32 + 3..=2 * p as u32 - 1).map(move |k| (p, k)))
        .collect();
    let grid2: Vec<(u64, u32)> = GRID_PRIMES.iter().map(|&p| (p, p as u32 + 2)).collect();
    let runs1 = run_grid(grid1);
    let runs2 = run_grid(grid2);
    let results = [
        ("1", "val = 1, k ≥ p+3 grid", criterion_1(&runs1)),
        ("2", "val = 1, k = p+2 grid", criterion_2(&runs2)),
        ("3", "extension class, k = p+3, λ = ±1", criterion_3()),
        ("4", "irreducible branch, val = 1/2", criterion_4()),
        ("5", "operator identity suite", criterion_5()),
        ("6", "Wach relation suite", criterion_6(&runs1)),
        ("7", "determinant identity", criterion_7(&[&runs1, &runs2])),
        ("8", "fault sensitivity", criterion_8()),
    ];
    let mut failed = 0;
    for (n, title, o) in &results {
        println!(
            "criterion {n} [{}] {title}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.summary
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1?}",
        results.len() - failed,
        results.len(),
        t0.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
