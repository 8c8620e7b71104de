//! Reduction of the Wach data modulo the maximal ideal and the module
//! operations φ and γ on coordinate vectors over F_p((X)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::coeff::Coeff;
use crate::padic::fq::{Fq, FqField};
use crate::padic::json::{mat_from_json, mat_to_json, SeriesJson};
use crate::padic::ops::{frobenius_phi, gamma_act_to, GammaExp};
use crate::padic::series::{Series, EXACT};
use crate::wach::WachData;
use crate::{OlSeries, ResMat, ResSeries};

/// Coordinates (x, y) of x·e + y·f.
pub type ResVec = [ResSeries; 2];

/// The Wach data reduced to F_p[[X]].
#[derive(Debug, Clone, PartialEq)]
pub struct ResWach {
    pub p: u64,
    pub k: u32,
    /// X-adic precision of the Γ-matrices.
    pub mx: i64,
    pub field: FqField,
    pub beta: Fq,
    pub alpha_bar: ResSeries,
    /// ᾱ = β·u·X^{p−1}.
    pub ubar: ResSeries,
    pub pbar: ResMat,
    pub gbar: Vec<(i64, ResMat)>,
}

/// Reduction of an integral series modulo π.
pub fn reduce_series(s: &OlSeries, field: &FqField) -> Result<ResSeries> {
    let s = s.normalize_shift();
    if s.shift() > 0 {
        return Err(Error::Integrality(
            "cannot reduce a series with a p-power denominator".into(),
        ));
    }
    Ok(s.map(field, |c| field.elem(c.residue() as i64)))
}

fn reduce_mat(m: &crate::OlMat, field: &FqField) -> Result<ResMat> {
    m.try_map_to(|s| reduce_series(s, field))
}

/// Splits ᾱ = β·u·X^{p−1} with u(0) = 1.
pub fn factor_alpha_bar(alpha_bar: &ResSeries, p: u64, k: u32) -> Result<(Fq, ResSeries)> {
    let v = alpha_bar.valuation();
    if v != Some(p as i64 - 1) {
        return Err(Error::check(
            "shape of alpha bar",
            format!(
                "ᾱ must have X-valuation exactly p−1 = {} (k = {k}), got {:?}",
                p - 1,
                v
            ),
        ));
    }
    let beta = alpha_bar.coeff(p as i64 - 1);
    let u = alpha_bar
        .mul_x_pow(-(p as i64 - 1))
        .scale(&beta.inverse()?);
    Ok((beta, u))
}

impl ResWach {
    /// ω(γ) = ε(γ) mod p.
    pub fn omega(&self, a: i64) -> Fq {
        self.field.elem(a)
    }

    /// φ(x·e + y·f) in coordinates.
    pub fn phi_vec(&self, v: &ResVec) -> Result<ResVec> {
        let px = frobenius_phi(&v[0])?;
        let py = frobenius_phi(&v[1])?;
        let cap = EXACT;
        Ok(self.pbar.mul_vec(&[px, py], cap))
    }

    /// γ_a(x·e + y·f) in coordinates, below X^target.
    pub fn gamma_vec(&self, a: i64, v: &ResVec, target: i64) -> Result<ResVec> {
        let g = self
            .gbar
            .iter()
            .find(|(b, _)| *b == a)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::InvalidInput(format!("no Γ-matrix stored for {a}")))?;
        let ga = GammaExp::exact(a);
        let gx = gamma_act_to(&v[0], &ga, target)?;
        let gy = gamma_act_to(&v[1], &ga, target)?;
        Ok(g.mul_vec(&[gx, gy], target))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = ResWachJson {
            p: self.p,
            k: self.k,
            mx: self.mx,
            beta: self.beta.to_coord_string(),
            alpha_bar: SeriesJson::from_series(&self.alpha_bar),
            ubar: SeriesJson::from_series(&self.ubar),
            pbar: mat_to_json(&self.pbar),
            gbar: self
                .gbar
                .iter()
                .map(|(a, m)| ResGammaJson {
                    gamma: *a,
                    matrix: mat_to_json(m),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("reduced data serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: ResWachJson = serde_json::from_value(v.clone())?;
        let field = FqField::prime_field(j.p);
        Ok(ResWach {
            p: j.p,
            k: j.k,
            mx: j.mx,
            beta: Fq::from_coord_str(&field, &j.beta)?,
            alpha_bar: j.alpha_bar.to_series(&field)?,
            ubar: j.ubar.to_series(&field)?,
            pbar: mat_from_json(&j.pbar, &field)?,
            gbar: j
                .gbar
                .iter()
                .map(|g| Ok((g.gamma, mat_from_json(&g.matrix, &field)?)))
                .collect::<Result<Vec<_>>>()?,
            field,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ResGammaJson {
    gamma: i64,
    matrix: Vec<SeriesJson>,
}

#[derive(Serialize, Deserialize)]
struct ResWachJson {
    p: u64,
    k: u32,
    #[serde(rename = "Mx")]
    mx: i64,
    beta: String,
    alpha_bar: SeriesJson,
    ubar: SeriesJson,
    #[serde(rename = "Pbar")]
    pbar: Vec<SeriesJson>,
    #[serde(rename = "Gbar")]
    gbar: Vec<ResGammaJson>,
}

/// Reduces verified Wach data and factors ᾱ.
pub fn reduce_wach(data: &WachData) -> Result<ResWach> {
    if data.certified_digits == 0 || data.ring.np() == 0 {
        return Err(Error::Precision(
            "reduction needs at least one certified p-adic digit".into(),
        ));
    }
    let p = data.params.p;
    let k = data.params.k;
    let field = FqField::prime_field(p);
    let alpha_bar = reduce_series(&data.alpha, &field)?;
    // q ≡ X^{p−1} mod p, so the lower-left entry is exactly X^{(p−1)(k−1)}.
    let xq = Series::monomial(Fq::one(&field), (p as i64 - 1) * (k as i64 - 1));
    let reduced_q = reduce_series(data.p_mat.get(1, 0), &field)?;
    if !reduced_q.same_value(&xq) {
        return Err(Error::check(
            "reduction of q^{k-1}",
            format!("q^{} mod p differs from X^{}", k - 1, (p - 1) * (k as u64 - 1)),
        ));
    }
    let minus_one = Series::constant(field.elem(-1));
    let pbar = ResMat::new(
        Series::zero(&field, EXACT),
        minus_one,
        xq,
        alpha_bar.as_exact(),
    );
    let gbar = data
        .gammas
        .iter()
        .map(|(a, g)| Ok((*a, reduce_mat(g, &field)?)))
        .collect::<Result<Vec<_>>>()?;
    for (a, g) in &gbar {
        let g0 = g.truncate(1);
        if !g0.same_value(&ResMat::identity(&field).truncate(1)) {
            return Err(Error::check("G mod X", format!("Ḡ_{a} ≢ 1 mod X")));
        }
    }
    let (beta, ubar) = factor_alpha_bar(&alpha_bar, p, k)?;
    let ap = data.params.ap_in(&data.ring)?;
    let ap_over_p = ap.div_p_pow(1).ok_or_else(|| {
        Error::OutOfScope("a_p is not divisible by p".into())
    })?;
    let expected = field.elem(ap_over_p.residue() as i64).times(&field.elem(k as i64 - 1));
    if expected != beta {
        return Err(Error::check(
            "beta = (a_p/p)(k-1)",
            format!("β = {beta} but (a_p/p)(k−1) ≡ {expected}"),
        ));
    }
    Ok(ResWach {
        p,
        k,
        mx: data.params.mx,
        field,
        beta,
        alpha_bar: alpha_bar.as_exact(),
        ubar: ubar.as_exact(),
        pbar,
        gbar,
    })
}

/// Adds X^degree to ᾱ inside P̄ only, leaving β, u and ᾱ untouched, so the
/// φ-check on δ sees a P̄ that no longer matches the data it was built from.
pub fn inject_alpha_fault(res: &ResWach, degree: i64) -> ResWach {
    let mut out = res.clone();
    let bump = ResSeries::monomial(res.field.elem(1), degree);
    out.pbar.e[3] = out.pbar.e[3].add(&bump);
    out
}
