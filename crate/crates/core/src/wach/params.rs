use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::fq::primitive_root;
use crate::padic::ol::{is_prime, EisensteinRing, OlElem, OlRing, Valuation};
use crate::padic::ops::GammaExp;

/// Inputs of the Wach-module construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WachParams {
    pub p: u64,
    /// Eisenstein polynomial, low degree first.
    #[serde(with = "bigint_vec")]
    pub eisenstein: Vec<BigInt>,
    pub k: u32,
    /// Coordinates of a_p in the basis 1, π, …, π^{e−1}.
    #[serde(with = "bigint_vec")]
    pub ap: Vec<BigInt>,
    /// X-adic target precision.
    pub mx: i64,
    /// p-adic digits certified in the output.
    pub n_target: u32,
    /// ε-values of the chosen generators of Γ.
    pub gamma_gens: Vec<i64>,
    /// Working p-adic digits; `None` selects the default budget.
    pub working_digits: Option<u32>,
}

pub fn default_mx(p: u64, k: u32) -> i64 {
    (4 * (p as i64 - 1)).max(k as i64 + p as i64)
}

pub fn default_gamma_gens(p: u64) -> Vec<i64> {
    vec![1 + p as i64, primitive_root(p) as i64]
}

impl WachParams {
    /// Unramified a_p with default precisions and generators.
    pub fn unramified(p: u64, k: u32, ap: i64) -> Self {
        Self::with_ring_data(
            p,
            vec![BigInt::from(-(p as i64)), BigInt::one()],
            k,
            vec![BigInt::from(ap)],
        )
    }

    pub fn with_ring_data(p: u64, eisenstein: Vec<BigInt>, k: u32, ap: Vec<BigInt>) -> Self {
        WachParams {
            p,
            eisenstein,
            k,
            ap,
            mx: default_mx(p, k),
            n_target: 2,
            gamma_gens: default_gamma_gens(p),
            working_digits: None,
        }
    }

    pub fn e(&self) -> usize {
        self.eisenstein.len() - 1
    }

    /// Default budget N_target + (k−1)(Mx − k + 2): each degree step may lose
    /// k−1 digits to the division by det P(0).
    pub fn budget_digits(&self) -> u32 {
        let steps = (self.mx - self.k as i64 + 2).max(0) as u32;
        self.n_target + (self.k - 1) * steps
    }

    pub fn working(&self) -> u32 {
        self.working_digits.unwrap_or_else(|| self.budget_digits())
    }

    pub fn ring(&self, np: u32) -> Result<OlRing> {
        EisensteinRing::new(self.p, self.eisenstein.clone(), np)
    }

    pub fn ap_in(&self, ring: &OlRing) -> Result<OlElem> {
        OlElem::from_coords(ring, &self.ap)
    }

    pub fn gammas(&self) -> Vec<GammaExp> {
        self.gamma_gens.iter().map(|&a| GammaExp::exact(a)).collect()
    }

    /// Normalized valuation of a_p (val(p) = 1).
    pub fn ap_valuation(&self) -> Result<Valuation> {
        let ring = self.ring(self.n_target.max(4))?;
        Ok(self.ap_in(&ring)?.valuation())
    }

    /// Range, valuation and generator checks for the val(a_p) = 1 pipeline.
    pub fn validate(&self) -> Result<()> {
        let p = self.p;
        if !is_prime(p) || p < 3 {
            return Err(Error::InvalidInput(format!("p = {p} must be an odd prime")));
        }
        let k = self.k as u64;
        if k < p + 2 || k > 2 * p - 1 {
            return Err(Error::OutOfScope(format!(
                "k = {k} is outside [p+2, 2p−1] = [{}, {}]",
                p + 2,
                2 * p - 1
            )));
        }
        match self.ap_valuation()? {
            Valuation::Exact(v) if v == Ratio::one() => {}
            Valuation::Exact(v) if v.is_zero() => {
                return Err(Error::OutOfScope("a_p is a unit (val 0)".into()))
            }
            v => {
                return Err(Error::OutOfScope(format!(
                    "the Wach pipeline needs val(a_p) = 1, got {v}"
                )))
            }
        }
        if self.mx < self.k as i64 {
            return Err(Error::InvalidInput(format!(
                "Mx = {} must be at least k = {}",
                self.mx, self.k
            )));
        }
        if self.n_target == 0 {
            return Err(Error::InvalidInput("N_target must be positive".into()));
        }
        let pi = p as i64;
        let has_one_plus_p = self
            .gamma_gens
            .iter()
            .any(|&a| (a - 1).rem_euclid(pi) == 0 && (a - 1).rem_euclid(pi * pi) != 0);
        let has_prim = self.gamma_gens.iter().any(|&a| {
            let r = a.rem_euclid(pi) as u64;
            r != 0 && (1..p - 1).all(|e| modpow(r, e, p) != 1)
        });
        if !has_one_plus_p || !has_prim {
            return Err(Error::InvalidInput(
                "gamma generators must include 1+p (up to a unit of 1+p²Z_p) and a lift of a primitive root mod p"
                    .into(),
            ));
        }
        Ok(())
    }
}

fn modpow(b: u64, e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    for _ in 0..e {
        r = r * b % m;
    }
    r
}

/// Integer vectors as decimal strings, so arbitrary sizes survive JSON.
mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| t.trim().parse().map_err(D::Error::custom))
            .collect()
    }
}
