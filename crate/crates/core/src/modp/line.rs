//! The fixed point z and the φ-stable line spanned by δ when k ≥ p+3.

use serde::{Deserialize, Serialize};

use super::reduce::{ResVec, ResWach};
use crate::error::{Error, Result};
use crate::padic::binom::ceil_log;
use crate::padic::coeff::Coeff;
use crate::padic::fq::{Fq, FqField};
use crate::padic::json::SeriesJson;
use crate::padic::ops::frobenius_phi;
use crate::padic::series::Series;
use crate::ResSeries;

/// A rank-one sub-object: φ acts by λ and γ by ω(γ)^{omega_exp}.
#[derive(Debug, Clone, PartialEq)]
pub struct CharWitness {
    pub lambda: Fq,
    /// Exponent of ω, reduced to [0, p−2].
    pub omega_exp: i64,
    /// Coordinates of the generator in the basis (e, f).
    pub witness: ResVec,
    /// X-adic precision at which both eigen-relations were checked.
    pub checked_precision: i64,
}

#[derive(Serialize, Deserialize)]
struct CharWitnessJson {
    lambda: String,
    lambda_field_degree: u8,
    omega_exp: i64,
    witness: Vec<SeriesJson>,
    checked_precision: i64,
}

impl CharWitness {
    pub fn to_json(&self) -> serde_json::Value {
        let j = CharWitnessJson {
            lambda: self.lambda.to_coord_string(),
            lambda_field_degree: self.lambda.field().degree(),
            omega_exp: self.omega_exp,
            witness: self.witness.iter().map(SeriesJson::from_series).collect(),
            checked_precision: self.checked_precision,
        };
        serde_json::to_value(j).expect("witness serializes")
    }

    pub fn from_json(v: &serde_json::Value, p: u64) -> Result<Self> {
        let j: CharWitnessJson = serde_json::from_value(v.clone())?;
        let lf = if j.lambda_field_degree == 2 {
            FqField::quadratic(p)
        } else {
            FqField::prime_field(p)
        };
        let field = FqField::prime_field(p);
        if j.witness.len() != 2 {
            return Err(Error::Parse("witness needs two coordinates".into()));
        }
        Ok(CharWitness {
            lambda: Fq::from_coord_str(&lf, &j.lambda)?,
            omega_exp: j.omega_exp,
            witness: [j.witness[0].to_series(&field)?, j.witness[1].to_series(&field)?],
            checked_precision: j.checked_precision,
        })
    }
}

/// Exponent of X in the φ²-term of the z equation: (p−1)(k−p−2).
pub fn z_exponent(p: u64, k: u32) -> i64 {
    (p as i64 - 1) * (k as i64 - p as i64 - 2)
}

/// The unique z ∈ 1 + X·F_p[[X]] with z = u·φ(z) − λ^{−2}·X^{(p−1)(k−p−2)}·φ²(z),
/// known modulo X^mx.
pub fn solve_z(u: &ResSeries, lambda: &Fq, k: u32, mx: i64) -> Result<ResSeries> {
    let field = *u.ctx();
    let p = field.p();
    if (k as u64) < p + 3 {
        return Err(Error::OutOfScope(format!(
            "the z equation needs k ≥ p+3, got k = {k}"
        )));
    }
    let c = lambda.inverse()?.pow(2);
    let m = z_exponent(p, k);
    let cap = ceil_log(p, mx.max(1) as u64) as usize + 2;
    let mut z = Series::one(&field).truncate(mx);
    for _ in 0..=cap {
        let next = step_z(u, &c, m, &z, mx)?;
        if next.same_value(&z) && next.prec() >= mx {
            let res = z_residual(u, lambda, k, &next, mx)?;
            if !res.is_zero() {
                return Err(Error::check(
                    "z residual",
                    format!("residual has X-valuation {:?}", res.valuation()),
                ));
            }
            return Ok(next);
        }
        z = next;
    }
    Err(Error::NonConvergence(format!(
        "z iteration did not stabilize within {cap} steps"
    )))
}

fn step_z(u: &ResSeries, c: &Fq, m: i64, z: &ResSeries, mx: i64) -> Result<ResSeries> {
    let pz = frobenius_phi(z)?.truncate(mx);
    let ppz = frobenius_phi(&pz)?.truncate(mx);
    Ok(u
        .mul_to(&pz, mx)
        .sub(&ppz.mul_x_pow(m).scale(c).truncate(mx))
        .truncate(mx))
}

/// z − u·φ(z) + λ^{−2}X^m·φ²(z) below X^mx.
pub fn z_residual(u: &ResSeries, lambda: &Fq, k: u32, z: &ResSeries, mx: i64) -> Result<ResSeries> {
    let p = u.ctx().p();
    let c = lambda.inverse()?.pow(2);
    let pz = frobenius_phi(z)?;
    let ppz = frobenius_phi(&pz)?;
    Ok(z
        .sub(&u.mul_to(&pz, mx))
        .add(&ppz.mul_x_pow(z_exponent(p, k)).scale(&c))
        .truncate(mx))
}

/// δ = (−φ(z)/(λX^p), z/X).
pub fn delta_coords(z: &ResSeries, lambda: &Fq) -> Result<ResVec> {
    let p = z.ctx().p() as i64;
    let x = frobenius_phi(z)?
        .mul_x_pow(-p)
        .scale(&lambda.inverse()?.negate());
    Ok([x, z.mul_x_pow(-1)])
}

/// Checks a = b coordinatewise and returns the common precision.
pub(crate) fn check_vec_eq(name: &str, a: &ResVec, b: &ResVec) -> Result<i64> {
    let mut prec = i64::MAX;
    for i in 0..2 {
        let d = a[i].sub(&b[i]);
        if !d.is_zero() {
            return Err(Error::check(
                name,
                format!(
                    "coordinate {i} differs at X^{}",
                    d.valuation().unwrap_or(d.prec())
                ),
            ));
        }
        prec = prec.min(d.prec());
    }
    Ok(prec)
}

pub(crate) fn scale_vec(v: &ResVec, c: &Fq) -> ResVec {
    [v[0].scale(c), v[1].scale(c)]
}

/// The line spanned by δ, checked against φ(δ) = λδ and γ(δ) = ω(γ)^{−1}δ.
pub fn delta_line(res: &ResWach, z: &ResSeries, lambda: &Fq) -> Result<CharWitness> {
    if (res.k as u64) < res.p + 3 {
        return Err(Error::OutOfScope("δ exists for k ≥ p+3".into()));
    }
    // λ = β is not assumed: a wrong λ is caught by the φ-check below.
    let delta = delta_coords(z, lambda)?;
    let phi_d = res.phi_vec(&delta)?;
    let mut prec = check_vec_eq("phi(delta) = lambda delta", &phi_d, &scale_vec(&delta, lambda))?;
    let target = res.mx - res.p as i64;
    for (a, _) in &res.gbar {
        let gd = res.gamma_vec(*a, &delta, target)?;
        let w = res.omega(*a).inverse()?;
        let want = scale_vec(&delta, &w);
        let pr = check_vec_eq(&format!("gamma_{a}(delta) = omega^-1 delta"), &gd, &want)?;
        prec = prec.min(pr);
    }
    Ok(CharWitness {
        lambda: *lambda,
        omega_exp: (-1i64).rem_euclid(res.p as i64 - 1),
        witness: delta,
        checked_precision: prec,
    })
}
