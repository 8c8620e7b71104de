//! Wach-module data, its JSON form and the independent identity checks.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::build::WachContext;
use super::params::WachParams;
use crate::error::{Error, Result};
use crate::padic::coeff::Coeff;
use crate::padic::json::{mat_from_json, mat_to_json, SeriesJson};
use crate::padic::ol::{OlElem, OlRing};
use crate::padic::ops::{gamma_of_x, phi_of_x, GammaExp, PowerTable};
use crate::padic::series::Series;
use crate::{OlMat, OlSeries};

/// α, P and the Γ-matrices, reduced to the certified p-adic precision.
#[derive(Debug, Clone)]
pub struct WachData {
    pub params: WachParams,
    /// Ring at `n_target` digits.
    pub ring: OlRing,
    pub alpha: OlSeries,
    pub p_mat: OlMat,
    /// (ε-value of the generator, G_γ).
    pub gammas: Vec<(i64, OlMat)>,
    pub working_digits: u32,
    pub certified_digits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GammaJson {
    gamma: i64,
    matrix: Vec<SeriesJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WachJson {
    params: WachParams,
    alpha: SeriesJson,
    #[serde(rename = "P")]
    p_mat: Vec<SeriesJson>,
    #[serde(rename = "G")]
    gammas: Vec<GammaJson>,
    working_digits: u32,
    certified_digits: u32,
}

impl WachData {
    pub fn to_json(&self) -> serde_json::Value {
        let j = WachJson {
            params: self.params.clone(),
            alpha: SeriesJson::from_series(&self.alpha),
            p_mat: mat_to_json(&self.p_mat),
            gammas: self
                .gammas
                .iter()
                .map(|(a, m)| GammaJson {
                    gamma: *a,
                    matrix: mat_to_json(m),
                })
                .collect(),
            working_digits: self.working_digits,
            certified_digits: self.certified_digits,
        };
        serde_json::to_value(j).expect("wach data serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: WachJson = serde_json::from_value(v.clone())?;
        let ring = j.params.ring(j.params.n_target)?;
        let gammas = j
            .gammas
            .iter()
            .map(|g| Ok((g.gamma, mat_from_json(&g.matrix, &ring)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(WachData {
            alpha: j.alpha.to_series(&ring)?,
            p_mat: mat_from_json(&j.p_mat, &ring)?,
            gammas,
            working_digits: j.working_digits,
            certified_digits: j.certified_digits,
            params: j.params,
            ring,
        })
    }

    pub fn mx(&self) -> i64 {
        self.params.mx
    }

    pub fn gamma_matrix(&self, a: i64) -> Option<&OlMat> {
        self.gammas.iter().find(|(b, _)| *b == a).map(|(_, m)| m)
    }
}

fn reduce(s: &OlSeries, ring: &OlRing) -> Result<OlSeries> {
    s.try_map(ring, |c| c.change_ring(ring))
}

fn reduce_mat(m: &OlMat, ring: &OlRing) -> Result<OlMat> {
    m.try_map(|s| reduce(s, ring))
}

/// Runs the whole construction for `params` using a prepared context.
pub fn build_wach(params: &WachParams, ctx: &WachContext) -> Result<WachData> {
    params.validate()?;
    if !ctx.serves(params) {
        return Err(Error::InvalidInput(
            "the prepared context does not match these parameters".into(),
        ));
    }
    let ap = params.ap_in(&ctx.ring)?;
    ctx.check_slopes(&ap)?;
    let alpha = ctx.build_alpha(&params.ap)?;
    let p_mat = ctx.build_p(&alpha);
    let mut certified = ctx.working;
    let mut sols = Vec::new();
    for (gi, &a) in params.gamma_gens.iter().enumerate() {
        let out = ctx.solve_gamma_matrix(gi, &p_mat)?;
        certified = certified.min(out.valid_digits);
        sols.push((a, out.g));
    }
    let ring = params.ring(params.n_target)?;
    let gammas = sols
        .iter()
        .map(|(a, g)| Ok((*a, reduce_mat(g, &ring)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(WachData {
        params: params.clone(),
        alpha: reduce(&alpha, &ring)?,
        p_mat: reduce_mat(&p_mat, &ring)?,
        gammas,
        working_digits: ctx.working,
        certified_digits: certified,
        ring,
    })
}

/// Result of one identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Lowest X-degree at which the two sides differ.
    pub fail_degree: Option<i64>,
    /// π-adic valuation of the difference at that degree.
    pub fail_pi_level: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WachReport {
    pub checks: Vec<CheckOutcome>,
}

impl WachReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn compare(name: String, lhs: &OlMat, rhs: &OlMat, upto: i64) -> CheckOutcome {
    let diff = lhs.sub(rhs);
    let mut first: Option<(i64, u64)> = None;
    for s in &diff.e {
        let s = s.normalize_shift();
        for n in s.low()..s.end().min(upto) {
            let c = s.coeff(n);
            if c.is_zero() {
                continue;
            }
            let lvl = c.pi_val().unwrap_or(u64::MAX);
            first = match first {
                Some((d, l)) if d < n || (d == n && l <= lvl) => Some((d, l)),
                _ => Some((n, lvl)),
            };
            break;
        }
    }
    CheckOutcome {
        name,
        passed: first.is_none(),
        fail_degree: first.map(|f| f.0),
        fail_pi_level: first.map(|f| f.1),
    }
}

struct Actions {
    phi: PowerTable<OlElem>,
    gammas: Vec<(i64, PowerTable<OlElem>)>,
}

impl Actions {
    fn new(data: &WachData) -> Result<Self> {
        let ring = &data.ring;
        let mx = data.mx();
        let phi = PowerTable::new(&phi_of_x::<OlElem>(ring), mx, 0)?;
        let gammas = data
            .gammas
            .iter()
            .map(|(a, _)| {
                let g = gamma_of_x::<OlElem>(ring, &GammaExp::exact(*a), mx + 2)?;
                Ok((*a, PowerTable::new(&g, mx, 0)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Actions { phi, gammas })
    }

    fn act(t: &PowerTable<OlElem>, m: &OlMat, mx: i64) -> Result<OlMat> {
        m.try_map(|s| t.apply(&s.truncate(mx)))
    }
}

/// Checks P·φ(G) = G·γ(P), the cocycle relation, the fiber at X = 0 and
/// G ≡ 1 mod X, all at the stored precision.
pub fn wach_report(data: &WachData) -> Result<WachReport> {
    let mx = data.mx();
    let ring = &data.ring;
    let acts = Actions::new(data)?;
    let p = &data.p_mat;
    let mut checks = Vec::new();

    let p_unit = OlElem::from_bigint(ring, &BigInt::from(data.params.p));
    let k = data.params.k;
    let ap = data.params.ap_in(ring)?;
    let fiber = OlMat::new(
        Series::zero(ring, 1),
        Series::constant(OlElem::one(ring).negate()),
        Series::constant(p_unit.pow(k - 1)),
        Series::constant(ap),
    );
    checks.push(compare("fiber P(0)".into(), &p.truncate(1), &fiber, 1));

    let mut acted = Vec::new();
    for ((a, g), (_, t)) in data.gammas.iter().zip(&acts.gammas) {
        let lhs = p.mul_to(&Actions::act(&acts.phi, g, mx)?, mx);
        let rhs = g.mul_to(&Actions::act(t, p, mx)?, mx);
        checks.push(compare(format!("commutation gamma={a}"), &lhs, &rhs, mx));
        checks.push(compare(
            format!("G = 1 mod X gamma={a}"),
            &g.truncate(1),
            &OlMat::identity(ring).truncate(1),
            1,
        ));
        acted.push((g, t));
    }
    for i in 0..acted.len() {
        for j in i + 1..acted.len() {
            let (gi, ti) = acted[i];
            let (gj, tj) = acted[j];
            let lhs = gi.mul_to(&Actions::act(ti, gj, mx)?, mx);
            let rhs = gj.mul_to(&Actions::act(tj, gi, mx)?, mx);
            checks.push(compare(
                format!("cocycle gamma={},{}", data.gammas[i].0, data.gammas[j].0),
                &lhs,
                &rhs,
                mx,
            ));
        }
    }
    Ok(WachReport { checks })
}

/// Like [`wach_report`] but turns the first failure into an error.
pub fn verify_wach(data: &WachData) -> Result<WachReport> {
    let r = wach_report(data)?;
    if let Some(f) = r.first_failure() {
        return Err(Error::check(
            f.name.clone(),
            format!(
                "sides differ at X^{} with π-adic valuation {}",
                f.fail_degree.unwrap_or(-1),
                f.fail_pi_level.map_or("∞".to_string(), |l| l.to_string())
            ),
        ));
    }
    Ok(r)
}

/// Adds p^{N−1}·X^degree to entry (0,0) of the `gi`-th Γ-matrix.
pub fn inject_g_fault(data: &WachData, gi: usize, degree: i64) -> Result<WachData> {
    let mut out = data.clone();
    let ring = out.ring.clone();
    let n = data.params.n_target;
    let bump = OlElem::from_bigint(&ring, &BigInt::from(data.params.p).pow(n - 1));
    let (_, g) = out
        .gammas
        .get_mut(gi)
        .ok_or_else(|| Error::InvalidInput(format!("no generator with index {gi}")))?;
    let e = &mut g.e[0];
    *e = e.add(&Series::monomial(bump, degree));
    Ok(out)
}

/// Checks α(0) = a_p and G ≡ G_init mod X^{k−1} against the context that
/// produced `data`.
pub fn initial_report(data: &WachData, ctx: &WachContext) -> Result<Vec<CheckOutcome>> {
    if !ctx.serves(&data.params) {
        return Err(Error::InvalidInput(
            "the context does not match these parameters".into(),
        ));
    }
    let ring = &data.ring;
    let t = data.params.k as i64 - 1;
    let ap = Series::constant(data.params.ap_in(ring)?);
    let zero = Series::zero(ring, 1);
    let mut out = vec![compare(
        "alpha(0) = a_p".into(),
        &OlMat::new(zero.clone(), zero.clone(), zero, data.alpha.truncate(1)),
        &OlMat::new(
            Series::zero(ring, 1),
            Series::zero(ring, 1),
            Series::zero(ring, 1),
            ap,
        ),
        1,
    )];
    for ((a, g), gt) in data.gammas.iter().zip(&ctx.gammas) {
        let init = reduce_mat(&gt.g_init, ring)?.truncate(t);
        out.push(compare(
            format!("G = G_init mod X^(k-1) gamma={a}"),
            &g.truncate(t),
            &init,
            t,
        ));
    }
    Ok(out)
}

/// Rebuilds with Mx and N_target doubled and checks that the original
/// truncations are unchanged.
pub fn uniqueness_check(params: &WachParams) -> Result<CheckOutcome> {
    let base = build_wach(params, &WachContext::new(params)?)?;
    let mut big = params.clone();
    big.mx *= 2;
    big.n_target *= 2;
    big.working_digits = None;
    let fine = build_wach(&big, &WachContext::new(&big)?)?;
    let mx = params.mx;
    let mut worst: Option<CheckOutcome> = None;
    let mut pairs = vec![(base.p_mat.clone(), reduce_mat(&fine.p_mat, &base.ring)?.truncate(mx))];
    for ((_, g), (_, h)) in base.gammas.iter().zip(&fine.gammas) {
        pairs.push((g.clone(), reduce_mat(h, &base.ring)?.truncate(mx)));
    }
    for (a, b) in &pairs {
        let c = compare("uniqueness under precision doubling".into(), a, b, mx);
        if !c.passed {
            worst = Some(c);
            break;
        }
    }
    Ok(worst.unwrap_or(CheckOutcome {
        name: "uniqueness under precision doubling".into(),
        passed: true,
        fail_degree: None,
        fail_pi_level: None,
    }))
}
