//! The closed-form classification of the reduction of V_{k,a_p}.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::chars::{canonicalize_rho, CharJson, CharSymbol, RhoSymbol};
use crate::error::{Error, Result};
use crate::modp::Ramification;
use crate::padic::coeff::Coeff;
use crate::padic::fq::{Fq, FqField};
use crate::padic::ol::{is_prime, OlElem, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Formula,
    Pipeline,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variant {
    Irreducible(RhoSymbol),
    /// Unordered.
    SplitSum(CharSymbol, CharSymbol),
    NonSplit {
        sub: CharSymbol,
        quot: CharSymbol,
        ramification: Ramification,
        nontrivial: bool,
    },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Irreducible(_) => "irreducible",
            Variant::SplitSum(..) => "split",
            Variant::NonSplit { .. } => "nonsplit",
        }
    }

    /// The two characters of the semisimplification, sorted; empty when
    /// irreducible.
    pub fn characters(&self) -> Vec<CharSymbol> {
        let mut v = match self {
            Variant::Irreducible(_) => vec![],
            Variant::SplitSum(a, b) => vec![*a, *b],
            Variant::NonSplit { sub, quot, .. } => vec![*sub, *quot],
        };
        v.sort();
        v
    }

    pub fn semisimplify(&self) -> Variant {
        match self {
            Variant::NonSplit { sub, quot, .. } => Variant::SplitSum(*sub, *quot),
            v => v.clone(),
        }
    }

    /// Equality with SplitSum unordered.
    pub fn same_as(&self, o: &Variant) -> bool {
        match (self, o) {
            (Variant::SplitSum(..), Variant::SplitSum(..)) => self.characters() == o.characters(),
            (Variant::Irreducible(a), Variant::Irreducible(b)) => {
                canonicalize_rho(a) == canonicalize_rho(b)
            }
            _ => self == o,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Variant::Irreducible(r) => r.to_string(),
            Variant::SplitSum(a, b) => format!("{a} ⊕ {b}"),
            Variant::NonSplit {
                sub,
                quot,
                ramification,
                nontrivial,
            } => format!(
                "0 → {sub} → V̄ → {quot} → 0 ({ramification} ramifiée, {})",
                if *nontrivial { "non-split" } else { "split class" }
            ),
        }
    }
}

/// Inputs echoed in every result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub p: u64,
    pub k: u32,
    /// Coordinates of a_p in 1, π, …, π^{e−1}.
    pub ap: Vec<String>,
    pub eisenstein: String,
    pub val_ap: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precisions {
    #[serde(rename = "Mx")]
    pub mx: i64,
    pub n_target: u32,
    pub working_digits: u32,
    pub certified_digits: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionResult {
    pub variant: Variant,
    pub provenance: Provenance,
    pub parameters: Parameters,
    pub precisions: Option<Precisions>,
    /// λ of the theorem where it applies (val(a_p) = 1).
    pub lambda: Option<Fq>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoJson {
    pub r: u64,
    pub chi: CharJson,
    pub display: String,
    /// The same representation written as ind(ω₂^{k−p}).
    pub closed_form: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionJson {
    pub variant: String,
    pub display: String,
    pub characters: Vec<CharJson>,
    /// ω-exponents as written in the closed form, before reduction mod p−1.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub omega_exp_raw: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<RhoJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sub: Option<CharJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quot: Option<CharJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ramification: Option<Ramification>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nontrivial: Option<bool>,
    pub provenance: Provenance,
    pub parameters: Parameters,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub precisions: Option<Precisions>,
    /// Names of the pipeline assertions that passed.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<String>,
}

impl ReductionResult {
    pub fn to_json(&self) -> ReductionJson {
        let chars = self.variant.characters();
        let k = self.parameters.k as i64;
        let mut j = ReductionJson {
            variant: self.variant.name().into(),
            display: self.variant.describe(),
            characters: chars.iter().map(|c| c.to_json()).collect(),
            omega_exp_raw: vec![],
            rho: None,
            sub: None,
            quot: None,
            ramification: None,
            nontrivial: None,
            provenance: self.provenance,
            parameters: self.parameters.clone(),
            precisions: self.precisions.clone(),
            checks: vec![],
        };
        match &self.variant {
            Variant::Irreducible(r) => {
                j.rho = Some(RhoJson {
                    r: r.r,
                    chi: r.chi.to_json(),
                    display: format!("{r:?}"),
                    closed_form: closed_form_rho(self.parameters.p, self.parameters.k).to_string(),
                });
            }
            Variant::SplitSum(..) => {
                if self.lambda.is_some() {
                    j.omega_exp_raw = raw_exponents(&chars, k, self.parameters.p);
                }
            }
            Variant::NonSplit {
                sub,
                quot,
                ramification,
                nontrivial,
            } => {
                j.sub = Some(sub.to_json());
                j.quot = Some(quot.to_json());
                j.ramification = Some(*ramification);
                j.nontrivial = Some(*nontrivial);
                j.omega_exp_raw = raw_exponents(&chars, k, self.parameters.p);
            }
        }
        j
    }
}

/// The closed-form exponents k−2 and 1 (or 1 and 1 for k = p+2) matched to
/// the reduced characters.
fn raw_exponents(chars: &[CharSymbol], k: i64, p: u64) -> Vec<i64> {
    let m = p as i64 - 1;
    chars
        .iter()
        .map(|c| {
            if (k - 2).rem_euclid(m) == c.omega_exp {
                k - 2
            } else {
                c.omega_exp
            }
        })
        .collect()
}

fn parameters(p: u64, k: u32, ap: &OlElem) -> Parameters {
    Parameters {
        p,
        k,
        ap: ap.to_signed_coords().iter().map(|c| c.to_string()).collect(),
        eisenstein: ap.ring().eis_string(),
        val_ap: match ap.valuation() {
            Valuation::Exact(v) => v.to_string(),
            Valuation::AtLeast(v) => format!(">={v}"),
        },
    }
}

/// ρ(k−p−1, 1) = ind(ω₂^{k−p}) before canonicalization.
pub fn closed_form_rho(p: u64, k: u32) -> RhoSymbol {
    RhoSymbol {
        r: k as u64 - p - 1,
        chi: CharSymbol::trivial(p),
    }
}

/// Checks p, k and val(a_p) against the range of the theorem.
pub fn check_scope(p: u64, k: u32, ap: &OlElem) -> Result<Ratio<i64>> {
    if p < 3 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("p = {p} must be an odd prime")));
    }
    if (k as u64) < p + 2 || (k as u64) > 2 * p - 1 {
        return Err(Error::OutOfScope(format!(
            "k = {k} is outside [p+2, 2p−1] = [{}, {}]",
            p + 2,
            2 * p - 1
        )));
    }
    match ap.valuation() {
        Valuation::Exact(v) if v > Ratio::from_integer(0) && v <= Ratio::from_integer(1) => Ok(v),
        Valuation::Exact(v) if v == Ratio::from_integer(0) => Err(Error::OutOfScope(
            "val(a_p) = 0 is outside this theorem (ordinary case)".into(),
        )),
        v => Err(Error::OutOfScope(format!(
            "val(a_p) {v} > 1 is outside this theorem (covered by prior work)"
        ))),
    }
}

/// λ = (a_p/p)·(k−1) mod p for k ≥ p+3, or the reduction of a_p/p.
pub fn ap_over_p_residue(ap: &OlElem) -> Result<Fq> {
    let f = FqField::prime_field(ap.ring().p());
    let q = ap
        .div_p_pow(1)
        .ok_or_else(|| Error::InvalidInput("a_p is not divisible by p".into()))?;
    let r = f.elem(q.residue() as i64);
    if r.is_zero() {
        return Err(Error::check("lambda nonzero", "a_p/p reduces to 0"));
    }
    Ok(r)
}

/// Closed-form reduction of V_{k,a_p} for p+2 ≤ k ≤ 2p−1, 0 < val(a_p) ≤ 1.
pub fn classify(p: u64, k: u32, ap: &OlElem) -> Result<ReductionResult> {
    if ap.ring().p() != p {
        return Err(Error::RingMismatch);
    }
    let v = check_scope(p, k, ap)?;
    let f = FqField::prime_field(p);
    let params = parameters(p, k, ap);
    let one = Ratio::from_integer(1);
    if v < one {
        // Newton slopes v and k−1−v are distinct, so Frobenius is semisimple.
        if v * 2 >= Ratio::from_integer(k as i64 - 1) {
            return Err(Error::check(
                "frobenius semisimple",
                "Newton slopes of x² − a_p x + p^{k−1} coincide",
            ));
        }
        let rho = closed_form_rho(p, k);
        return Ok(ReductionResult {
            variant: Variant::Irreducible(canonicalize_rho(&rho)),
            provenance: Provenance::Formula,
            parameters: params,
            precisions: None,
            lambda: None,
        });
    }
    let c = ap_over_p_residue(ap)?;
    let (variant, lambda) = if k as u64 == p + 2 {
        let roots = Fq::quadratic_roots(c.negate(), Fq::one(&f));
        let l = roots[0];
        let li = l.inverse()?;
        (
            Variant::SplitSum(CharSymbol::new(1, l)?, CharSymbol::new(1, li)?),
            CharSymbol::new(0, l)?.lambda,
        )
    } else {
        let l = c.times(&f.elem(k as i64 - 1));
        if l.is_zero() {
            return Err(Error::check("lambda nonzero", "(a_p/p)(k−1) ≡ 0 mod p"));
        }
        let li = l.inverse()?;
        let sub = CharSymbol::new(k as i64 - 2, l)?;
        let quot = CharSymbol::new(1, li)?;
        let is_pm1 = l == f.elem(1) || l == f.elem(-1);
        let variant = if k as u64 == p + 3 && is_pm1 {
            Variant::NonSplit {
                sub,
                quot,
                ramification: Ramification::Peu,
                nontrivial: true,
            }
        } else {
            Variant::SplitSum(sub, quot)
        };
        (variant, l)
    };
    Ok(ReductionResult {
        variant,
        provenance: Provenance::Formula,
        parameters: params,
        precisions: None,
        lambda: Some(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ol::EisensteinRing;
    use num_bigint::BigInt;

    fn unram(p: u64, a: i64) -> OlElem {
        OlElem::from_i64(&EisensteinRing::unramified(p, 4).unwrap(), a)
    }

    fn ch(p: u64, e: i64, l: i64) -> CharSymbol {
        CharSymbol::new(e, FqField::prime_field(p).elem(l)).unwrap()
    }

    #[test]
    fn p5_k9_ap5() {
        let r = classify(5, 9, &unram(5, 5)).unwrap();
        assert!(r.variant.same_as(&Variant::SplitSum(ch(5, 3, 3), ch(5, 1, 2))));
    }

    #[test]
    fn p3_k5_ap3_double_root() {
        let r = classify(3, 5, &unram(3, 3)).unwrap();
        assert!(r.variant.same_as(&Variant::SplitSum(ch(3, 1, 2), ch(3, 1, 2))));
    }

    #[test]
    fn ramified_half_valuation_is_irreducible() {
        let ring = EisensteinRing::new(5, vec![BigInt::from(-5), BigInt::from(0), BigInt::from(1)], 4)
            .unwrap();
        let pi = OlElem::uniformizer(&ring);
        let r = classify(5, 7, &pi).unwrap();
        match r.variant {
            Variant::Irreducible(rho) => {
                assert_eq!(rho.r, 1);
                assert_eq!(rho.to_string(), "ind(ω₂^2)");
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn out_of_scope_inputs() {
        assert!(matches!(classify(5, 6, &unram(5, 5)), Err(Error::OutOfScope(_))));
        assert!(matches!(classify(5, 8, &unram(5, 25)), Err(Error::OutOfScope(_))));
        assert!(matches!(classify(5, 8, &unram(5, 2)), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn nonsplit_case() {
        let r = classify(5, 8, &unram(5, 15)).unwrap();
        assert_eq!(r.lambda, Some(FqField::prime_field(5).elem(1)));
        assert!(matches!(r.variant, Variant::NonSplit { .. }));
    }
}
