//! One evaluated (p, k, a_p): formula, optional pipeline, and its table row.

use serde::Serialize;
use wachlab::classify::{ap_over_p_residue, classify, closed_form_rho, cross_validate_with, retryable, ReductionJson, ReductionResult, Variant};
use wachlab::wach::{WachContext, WachParams};
use wachlab::{Error, Valuation};

use crate::apspec::format_poly;
use crate::config::Instance;

pub const CSV_HEADER: [&str; 10] = [
    "p",
    "k",
    "ap",
    "val",
    "variant",
    "char1",
    "char2",
    "lambda_poly",
    "ramification",
    "match",
];

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub p: u64,
    pub k: u32,
    pub ap: String,
    pub val: String,
    pub variant: String,
    pub char1: String,
    pub char2: String,
    pub lambda_poly: String,
    pub ramification: String,
    /// "yes", "no", "error", or empty when the pipeline did not run.
    #[serde(rename = "match")]
    pub matched: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<ReductionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<ReductionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub exit: i32,
}

impl Row {
    pub fn csv_fields(&self) -> [String; 10] {
        [
            self.p.to_string(),
            self.k.to_string(),
            self.ap.clone(),
            self.val.clone(),
            self.variant.clone(),
            self.char1.clone(),
            self.char2.clone(),
            self.lambda_poly.clone(),
            self.ramification.clone(),
            self.matched.clone(),
        ]
    }

    pub fn failed(&self) -> bool {
        self.matched == "no" || self.matched == "error"
    }
}

/// Outcome of the pipeline side of a row.
pub struct Validation {
    pub result: ReductionResult,
    pub checks: Vec<String>,
    pub retried: bool,
}

/// Runs the pipeline with a prepared context, retrying once with Mx doubled
/// on a precision-type failure.
pub fn validate(params: &WachParams, ctx: Option<&WachContext>) -> Result<Validation, Error> {
    let first = match ctx {
        Some(c) => cross_validate_with(params, c),
        None => WachContext::new(params).and_then(|c| cross_validate_with(params, &c)),
    };
    let (report, run, retried) = match first {
        Ok((r, run)) => (r, run, false),
        Err(e) if retryable(&e) => {
            let mut p2 = params.clone();
            p2.mx *= 2;
            let c = WachContext::new(&p2)?;
            let (r, run) = cross_validate_with(&p2, &c)?;
            (r, run, true)
        }
        Err(e) => return Err(e),
    };
    Ok(Validation {
        result: run.result,
        checks: report.checks,
        retried,
    })
}

fn val_string(inst: &Instance) -> String {
    match inst.ap_elem().map(|a| a.valuation()) {
        Ok(Valuation::Exact(v)) => v.to_string(),
        Ok(Valuation::AtLeast(v)) => format!(">={v}"),
        Err(_) => String::new(),
    }
}

fn lambda_poly(inst: &Instance, r: &ReductionResult) -> String {
    let Some(l) = r.lambda else {
        return String::new();
    };
    let p = inst.p;
    if inst.k as u64 == p + 2 {
        // x² − (a_p/p)x + 1
        let c = inst
            .ap_elem()
            .and_then(|a| ap_over_p_residue(&a))
            .ok()
            .and_then(|c| c.as_prime());
        match c {
            Some(c) => format_poly(&[1, (p - c) % p, 1], "x"),
            None => String::new(),
        }
    } else {
        format_poly(&l.min_poly(), "x")
    }
}

fn fill_from(row: &mut Row, inst: &Instance, r: &ReductionResult) {
    row.variant = r.variant.name().to_string();
    match &r.variant {
        Variant::Irreducible(_) => {
            row.char1 = closed_form_rho(inst.p, inst.k).to_string();
        }
        Variant::SplitSum(a, b) => {
            let mut v = [*a, *b];
            v.sort();
            row.char1 = v[0].to_string();
            row.char2 = v[1].to_string();
        }
        Variant::NonSplit {
            sub,
            quot,
            ramification,
            ..
        } => {
            row.char1 = sub.to_string();
            row.char2 = quot.to_string();
            row.ramification = ramification.to_string();
        }
    }
    row.lambda_poly = lambda_poly(inst, r);
}

/// Evaluates one instance. The pipeline runs when `run_pipeline` is set and
/// val(a_p) = 1.
pub fn evaluate(inst: &Instance, run_pipeline: bool, ctx: Option<&WachContext>) -> Row {
    let mut row = Row {
        p: inst.p,
        k: inst.k,
        ap: inst.ap_text.clone(),
        val: val_string(inst),
        variant: String::new(),
        char1: String::new(),
        char2: String::new(),
        lambda_poly: String::new(),
        ramification: String::new(),
        matched: String::new(),
        formula: None,
        pipeline: None,
        error: None,
        exit: 0,
    };
    let formula = inst.ap_elem().and_then(|a| classify(inst.p, inst.k, &a));
    let formula = match formula {
        Ok(f) => f,
        Err(e) => {
            row.variant = match e {
                Error::OutOfScope(_) => "out-of-scope".into(),
                _ => "error".into(),
            };
            row.exit = crate::config::exit_code(&e);
            row.error = Some(e.to_string());
            return row;
        }
    };
    fill_from(&mut row, inst, &formula);
    row.formula = Some(formula.to_json());
    if run_pipeline && formula.lambda.is_some() {
        match validate(&inst.params(), ctx) {
            Ok(v) => {
                row.matched = "yes".into();
                let mut j = v.result.to_json();
                j.checks = v.checks;
                if v.retried {
                    j.checks.push("retried with Mx doubled".into());
                }
                row.pipeline = Some(j);
            }
            Err(e) => {
                row.matched = if matches!(e, Error::Mismatch(_)) { "no" } else { "error" }.into();
                row.exit = 1;
                row.error = Some(e.to_string());
            }
        }
    }
    row
}
