//! End-to-end comparison of the Wach-module pipeline with the closed form.

use serde::{Deserialize, Serialize};

use super::chars::{complete_pair, dualize, CharSymbol};
use super::result::{classify, Precisions, Provenance, ReductionResult, Variant};
use crate::error::{Error, Result};
use crate::modp::{
    build_q_kp2, delta_line, diagonalize_const, dwork_trivialize, extension_data, gamma_scalar_check,
    reduce_wach, solve_z, ExtensionData, ResWach,
};
use crate::padic::coeff::Coeff;
use crate::wach::{build_wach, initial_report, verify_wach, WachContext, WachData, WachParams};

/// All intermediate data of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub wach: WachData,
    pub reduced: ResWach,
    /// Characters of V̄* found by the pipeline.
    pub vstar: Vec<CharSymbol>,
    pub extension: Option<ExtensionData>,
    /// Names of the assertions that ran and passed.
    pub checks: Vec<String>,
    pub result: ReductionResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossReport {
    pub matched: bool,
    pub formula: String,
    pub pipeline: String,
    pub checks: Vec<String>,
    pub precisions: Precisions,
    /// Whether the run was repeated with Mx doubled.
    pub retried: bool,
}

/// Runs wach-builder and the mod-p engine and assembles the reduction of V̄.
pub fn run_pipeline(params: &WachParams, ctx: &WachContext) -> Result<PipelineRun> {
    let p = params.p;
    let k = params.k;
    let mut checks = Vec::new();
    let wach = build_wach(params, ctx)?;
    let report = verify_wach(&wach)?;
    checks.extend(report.checks.iter().map(|c| c.name.clone()));
    for c in initial_report(&wach, ctx)? {
        if !c.passed {
            return Err(Error::check(c.name, format!("differs at X^{}", c.fail_degree.unwrap_or(-1))));
        }
        checks.push(c.name);
    }
    let res = reduce_wach(&wach)?;
    checks.push("reduction: beta = (a_p/p)(k-1), G = 1 mod X".into());
    let om_inv = -1i64;
    let mut extension = None;
    let (vstar, variant) = if k as u64 == p + 2 {
        let q = build_q_kp2(&res)?;
        let m = dwork_trivialize(&q, res.mx)?;
        let eig = diagonalize_const(&q.at_zero(), &res.beta)?;
        gamma_scalar_check(&res, &m, &eig)?;
        checks.extend(
            ["Q(0) = [[0,-1],[1,beta]]", "M^-1 Q phi(M) = Q(0)", "gamma scalar omega^-1"]
                .map(String::from),
        );
        let a = CharSymbol::new(om_inv, eig.lambda_value())?;
        let b = CharSymbol::new(om_inv, eig.lambda_inv_value())?;
        let v = Variant::SplitSum(dualize(&a, k), dualize(&b, k));
        (vec![a, b], v)
    } else {
        let lambda = res.beta;
        let z = solve_z(&res.ubar, &lambda, k, res.mx)?;
        let w = delta_line(&res, &z, &lambda)?;
        checks.extend(["z residual", "phi(delta) = lambda delta", "gamma(delta) = omega^-1 delta"].map(String::from));
        let sub_star = CharSymbol::new(w.omega_exp, w.lambda)?;
        let sub = dualize(&sub_star, k);
        let quot = complete_pair(&sub, k);
        let one = res.field.elem(1);
        let is_pm1 = lambda == one || lambda == one.negate();
        let v = if k as u64 == p + 3 && is_pm1 {
            let ext = extension_data(&res, &z, &lambda)?;
            checks.extend(
                ["Mat(phi) triangular", "Mat(gamma) triangular", "residue criterion", "psi cokernel"]
                    .map(String::from),
            );
            let quot_star = CharSymbol::new(-2, lambda.inverse()?)?;
            if dualize(&quot_star, k) != quot {
                return Err(Error::check(
                    "quotient character",
                    format!("{} vs {}", dualize(&quot_star, k), quot),
                ));
            }
            let v = Variant::NonSplit {
                sub,
                quot,
                ramification: ext.ramification,
                nontrivial: ext.nontrivial,
            };
            extension = Some(ext);
            v
        } else {
            Variant::SplitSum(sub, quot)
        };
        (vec![sub_star, sub_star.inverse().twist(1 - k as i64)], v)
    };
    // det V̄ = ω^{k−1}.
    let chars = variant.characters();
    let det = chars[0].mul(&chars[1]);
    if det != CharSymbol::omega_pow(p, k as i64 - 1) {
        return Err(Error::check("determinant", format!("χ₁χ₂ = {det}, expected ω^{}", k - 1)));
    }
    checks.push("det = omega^(k-1)".into());
    let ap = params.ap_in(&wach.ring)?;
    let mut result = classify(p, k, &ap)?;
    result.variant = variant;
    result.provenance = Provenance::Pipeline;
    result.precisions = Some(Precisions {
        mx: params.mx,
        n_target: params.n_target,
        working_digits: wach.working_digits,
        certified_digits: wach.certified_digits,
    });
    Ok(PipelineRun {
        wach,
        reduced: res,
        vstar,
        extension,
        checks,
        result,
    })
}

fn compare(formula: &ReductionResult, pipeline: &ReductionResult) -> Result<()> {
    let (f, g) = (&formula.variant, &pipeline.variant);
    if !f.same_as(g) {
        return Err(Error::Mismatch(format!(
            "formula {} [{:?}] vs pipeline {} [{:?}]",
            f.describe(),
            f.characters(),
            g.describe(),
            g.characters()
        )));
    }
    Ok(())
}

/// Runs the pipeline and asserts agreement with `classify`. Precision
/// failures are retried once with Mx doubled.
pub fn cross_validate(params: &WachParams) -> Result<(CrossReport, PipelineRun)> {
    match cross_validate_once(params) {
        Err(e) if retryable(&e) => {
            let mut p2 = params.clone();
            p2.mx *= 2;
            let (mut r, run) = cross_validate_once(&p2)?;
            r.retried = true;
            Ok((r, run))
        }
        other => other,
    }
}

pub fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::CheckFailed { .. }
            | Error::Precision(_)
            | Error::NonConvergence(_)
            | Error::Divisibility(_)
            | Error::Integrality(_)
            | Error::TailBound(_)
    )
}

/// Same as [`cross_validate`] but with a prepared context and no retry.
pub fn cross_validate_with(params: &WachParams, ctx: &WachContext) -> Result<(CrossReport, PipelineRun)> {
    let run = run_pipeline(params, ctx)?;
    report_for(params, run)
}

fn cross_validate_once(params: &WachParams) -> Result<(CrossReport, PipelineRun)> {
    let ctx = WachContext::new(params)?;
    cross_validate_with(params, &ctx)
}

fn report_for(params: &WachParams, run: PipelineRun) -> Result<(CrossReport, PipelineRun)> {
    let ap = params.ap_in(&run.wach.ring)?;
    let formula = classify(params.p, params.k, &ap)?;
    compare(&formula, &run.result)?;
    let report = CrossReport {
        matched: true,
        formula: formula.variant.describe(),
        pipeline: run.result.variant.describe(),
        checks: run.checks.clone(),
        precisions: run.result.precisions.clone().expect("pipeline precisions"),
        retried: false,
    };
    Ok((report, run))
}
