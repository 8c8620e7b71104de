//! `wachlab verify`: operator identities, Wach relations, mod-p checks and
//! fault detection, reported one line per check.

use clap::{Args, ValueEnum};
use serde::Serialize;
use wachlab::classify::cross_validate_with;
use wachlab::modp::{delta_line, inject_alpha_fault, reduce_wach, solve_z};
use wachlab::suite::{default_rings, operator_suite, SuiteRing};
use wachlab::wach::{
    build_wach, initial_report, inject_g_fault, uniqueness_check, wach_report, CheckOutcome, WachContext,
    WachData,
};
use wachlab::{Coeff, Error};

use crate::config::{CliError, Format, Instance, EXIT_FAILURE, EXIT_OK};
use crate::emit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Perturb one coefficient of G_γ.
    G,
    /// Perturb ᾱ inside P̄ above degree p.
    Alpha,
    /// Use a wrong λ for δ.
    Lambda,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Small subset (seconds).
    #[arg(long)]
    quick: bool,
    /// Seed of the randomized operator identities.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random instances per ring and identity (default 100, 10 with --quick).
    #[arg(long)]
    instances: Option<u32>,
    /// Extra instance: p (with --k and --ap).
    #[arg(long, requires_all = ["k", "ap"])]
    p: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    ap: Option<String>,
    #[arg(long)]
    eisenstein: Option<String>,
    /// Inject a fault into every instance; the named check must then fail.
    #[arg(long, value_enum)]
    fault: Option<Fault>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn entry(suite: &str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Entry {
    Entry {
        suite: suite.into(),
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn from_outcome(suite: &str, tag: &str, c: &CheckOutcome) -> Entry {
    let detail = match c.fail_degree {
        Some(d) => format!(
            "{tag}: differs at X^{d}, π-adic valuation {}",
            c.fail_pi_level.map_or("∞".into(), |l| l.to_string())
        ),
        None => tag.to_string(),
    };
    entry(suite, c.name.clone(), c.passed, detail)
}

fn from_error(suite: &str, tag: &str, e: &Error) -> Entry {
    match e {
        Error::CheckFailed { check, detail } => entry(suite, check.clone(), false, format!("{tag}: {detail}")),
        e => entry(suite, "error", false, format!("{tag}: {e}")),
    }
}

fn tag(inst: &Instance) -> String {
    format!("p={} k={} ap={}", inst.p, inst.k, inst.ap_text)
}

fn smoke(quick: bool) -> Vec<(u64, u32, &'static str)> {
    let mut v = vec![(3, 5, "3"), (5, 8, "15"), (5, 9, "5")];
    if !quick {
        v.extend([(5, 7, "10"), (7, 9, "7"), (7, 10, "14"), (7, 11, "7"), (7, 13, "21"), (11, 14, "11")]);
    }
    v
}

fn operator_entries(quick: bool, instances: u32, seed: u64) -> Vec<Entry> {
    let rings = if quick {
        vec![
            SuiteRing::Unramified { p: 3, digits: 5 },
            SuiteRing::Ramified { p: 5, digits: 4 },
            SuiteRing::PrimeField { p: 5 },
            SuiteRing::Quadratic { p: 3 },
        ]
    } else {
        default_rings()
    };
    let mut out = Vec::new();
    for r in rings {
        match operator_suite(&r, instances, seed) {
            Ok(reps) => out.extend(reps.into_iter().map(|rep| {
                entry(
                    "operators",
                    format!("{} [{}]", rep.identity, rep.ring),
                    rep.passed(),
                    match rep.first_failure {
                        Some(f) => format!("{}/{} failed; {f}", rep.failures, rep.instances),
                        None => format!("{} instances", rep.instances),
                    },
                )
            })),
            Err(e) => out.push(entry("operators", r.label(), false, e.to_string())),
        }
    }
    out
}

/// δ check with the requested fault, on the reduction of `data`.
fn delta_with_fault(data: &WachData, fault: Fault) -> Result<(), Error> {
    let res = reduce_wach(data)?;
    let k = data.params.k;
    let z = solve_z(&res.ubar, &res.beta, k, res.mx)?;
    match fault {
        Fault::Alpha => delta_line(&inject_alpha_fault(&res, res.p as i64), &z, &res.beta).map(|_| ()),
        Fault::Lambda => {
            let wrong = res.beta.plus(&res.field.elem(1));
            let wrong = if wrong.is_zero() { res.field.elem(1) } else { wrong };
            delta_line(&res, &z, &wrong).map(|_| ())
        }
        Fault::G => Ok(()),
    }
}

fn instance_entries(inst: &Instance, fault: Option<Fault>, uniq: bool) -> Vec<Entry> {
    let t = tag(inst);
    let params = inst.params();
    let ctx = match WachContext::new(&params) {
        Ok(c) => c,
        Err(e) => return vec![from_error("wach", &t, &e)],
    };
    let data = match build_wach(&params, &ctx) {
        Ok(d) => d,
        Err(e) => return vec![from_error("wach", &t, &e)],
    };
    let mut out = Vec::new();
    let checked = match fault {
        Some(Fault::G) => match inject_g_fault(&data, 0, params.k as i64 + 2) {
            Ok(d) => d,
            Err(e) => return vec![from_error("wach", &t, &e)],
        },
        _ => data.clone(),
    };
    match wach_report(&checked) {
        Ok(r) => out.extend(r.checks.iter().map(|c| from_outcome("wach", &t, c))),
        Err(e) => out.push(from_error("wach", &t, &e)),
    }
    match initial_report(&checked, &ctx) {
        Ok(r) => out.extend(r.iter().map(|c| from_outcome("wach", &t, c))),
        Err(e) => out.push(from_error("wach", &t, &e)),
    }
    if uniq {
        match uniqueness_check(&params) {
            Ok(c) => out.push(from_outcome("wach", &t, &c)),
            Err(e) => out.push(from_error("wach", &t, &e)),
        }
    }
    match fault {
        Some(f @ (Fault::Alpha | Fault::Lambda)) if inst.k as u64 >= inst.p + 3 => {
            if let Err(e) = delta_with_fault(&data, f) {
                out.push(from_error("modp", &t, &e));
            } else {
                out.push(entry("modp", "phi(delta) = lambda delta", true, t.clone()));
            }
        }
        Some(_) => {}
        None => match cross_validate_with(&params, &ctx) {
            Ok((rep, _)) => {
                out.extend(rep.checks.iter().map(|c| entry("modp", c.clone(), true, t.clone())));
                out.push(entry("classify", "pipeline = formula", true, format!("{t}: {}", rep.formula)));
            }
            Err(e) => out.push(from_error("modp", &t, &e)),
        },
    }
    out
}

/// Each fault must be caught by its named check.
fn fault_entries() -> Vec<Entry> {
    let mut out = Vec::new();
    let inst = Instance::new(5, 9, "5", None).expect("fixed instance");
    let params = inst.params();
    let data = WachContext::new(&params).and_then(|c| build_wach(&params, &c));
    let data = match data {
        Ok(d) => d,
        Err(e) => return vec![from_error("faults", "p=5 k=9 ap=5", &e)],
    };
    let expect = |kind: &str, want: &str, got: Result<(), Error>| {
        let ok = matches!(&got, Err(Error::CheckFailed { check, .. }) if check == want);
        let detail = match got {
            Ok(()) => "silent pass".to_string(),
            Err(e) => e.to_string(),
        };
        entry("faults", format!("{kind} detected by {want:?}"), ok, detail)
    };
    let g = inject_g_fault(&data, 0, 10)
        .and_then(|bad| wachlab::wach::verify_wach(&bad).map(|_| ()));
    out.push(expect("perturbed G", &format!("commutation gamma={}", params.gamma_gens[0]), g));
    out.push(expect("perturbed alpha", "phi(delta) = lambda delta", delta_with_fault(&data, Fault::Alpha)));
    out.push(expect("wrong lambda", "phi(delta) = lambda delta", delta_with_fault(&data, Fault::Lambda)));
    out
}

pub fn run(a: &VerifyArgs) -> Result<i32, CliError> {
    let instances = a.instances.unwrap_or(if a.quick { 10 } else { 100 });
    let mut list = Vec::new();
    for (p, k, ap) in smoke(a.quick) {
        list.push(Instance::new(p, k, ap, None)?);
    }
    if let (Some(p), Some(k), Some(ap)) = (a.p, a.k, a.ap.as_deref()) {
        list.push(Instance::new(p, k, ap, a.eisenstein.as_deref())?);
    }
    let mut entries = Vec::new();
    if a.fault.is_none() {
        entries.extend(operator_entries(a.quick, instances, a.seed));
    }
    for (i, inst) in list.iter().enumerate() {
        let uniq = a.fault.is_none() && i < if a.quick { 1 } else { 3 };
        entries.extend(instance_entries(inst, a.fault, uniq));
    }
    if a.fault.is_none() {
        entries.extend(fault_entries());
    }
    let failed = entries.iter().filter(|e| !e.passed).count();
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "passed": failed == 0,
            "failures": failed,
            "checks": entries,
        }))? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut write = |r: [&str; 4]| w.write_record(r).map_err(|e| CliError::failure(e.to_string()));
            write(["suite", "name", "passed", "detail"])?;
            for e in &entries {
                write([&e.suite, &e.name, if e.passed { "pass" } else { "FAIL" }, &e.detail])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::failure(e.to_string()))?)
                .expect("csv output is utf-8")
        }
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                s += &format!(
                    "{} [{}] {}: {}\n",
                    if e.passed { "pass" } else { "FAIL" },
                    e.suite,
                    e.name,
                    e.detail
                );
            }
            s += &format!("{} checks, {failed} failed\n", entries.len());
            s
        }
    };
    emit(None, &text)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}
