//! Characters ω^a·μ_λ and the symbols ρ(r, χ) = ind(ω₂^{r+1}) ⊗ χ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::coeff::Coeff;
use crate::padic::fq::{Fq, FqField};

/// ω^{omega_exp}·μ_λ with ω the mod-p cyclotomic character and μ_λ the
/// unramified character sending Frob_p^{−1} to λ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharSymbol {
    /// Reduced to [0, p−2].
    pub omega_exp: i64,
    /// Kept in F_p whenever it lies there.
    pub lambda: Fq,
}

fn normalize_lambda(l: Fq) -> Fq {
    if l.in_prime_field() && l.field().degree() == 2 {
        FqField::prime_field(l.field().p()).elem(l.coords().0 as i64)
    } else {
        l
    }
}

fn common(a: Fq, b: Fq) -> (Fq, Fq) {
    if a.field() == b.field() {
        (a, b)
    } else {
        let q = FqField::quadratic(a.field().p());
        (a.embed(q), b.embed(q))
    }
}

impl CharSymbol {
    pub fn new(omega_exp: i64, lambda: Fq) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::InvalidInput("μ_λ needs λ ≠ 0".into()));
        }
        let p = lambda.field().p() as i64;
        Ok(CharSymbol {
            omega_exp: omega_exp.rem_euclid(p - 1),
            lambda: normalize_lambda(lambda),
        })
    }

    pub fn trivial(p: u64) -> Self {
        CharSymbol {
            omega_exp: 0,
            lambda: FqField::prime_field(p).elem(1),
        }
    }

    pub fn omega_pow(p: u64, n: i64) -> Self {
        CharSymbol::new(n, FqField::prime_field(p).elem(1)).expect("λ = 1")
    }

    pub fn p(&self) -> u64 {
        self.lambda.field().p()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = common(self.lambda, o.lambda);
        CharSymbol::new(self.omega_exp + o.omega_exp, a.times(&b)).expect("product of units")
    }

    pub fn inverse(&self) -> Self {
        CharSymbol::new(-self.omega_exp, self.lambda.inverse().expect("λ ≠ 0")).expect("unit")
    }

    /// χ·ω^n.
    pub fn twist(&self, n: i64) -> Self {
        CharSymbol::new(self.omega_exp + n, self.lambda).expect("unit")
    }

    /// χ·μ_c.
    pub fn twist_mu(&self, c: &Fq) -> Self {
        let (a, b) = common(self.lambda, *c);
        CharSymbol::new(self.omega_exp, a.times(&b)).expect("unit")
    }

    /// Minimal polynomial of λ over F_p, low degree first.
    pub fn lambda_poly(&self) -> Vec<u64> {
        self.lambda.min_poly()
    }

    pub fn to_json(&self) -> CharJson {
        CharJson {
            omega_exp: self.omega_exp,
            lambda: LambdaJson {
                poly: self.lambda_poly(),
                root_tag: self.lambda.to_coord_string(),
                presentation: if self.lambda.field().degree() == 2 {
                    format!("F_{}[t]/(t^2-{})", self.p(), self.lambda.field().nonresidue())
                } else {
                    format!("F_{}", self.p())
                },
            },
        }
    }

    pub fn from_json(p: u64, j: &CharJson) -> Result<Self> {
        let field = if j.lambda.root_tag.contains(',') {
            FqField::quadratic(p)
        } else {
            FqField::prime_field(p)
        };
        CharSymbol::new(j.omega_exp, Fq::from_coord_str(&field, &j.lambda.root_tag)?)
    }
}

impl fmt::Display for CharSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.omega_exp {
            0 => {}
            1 => write!(f, "ω")?,
            e => write!(f, "ω^{e}")?,
        }
        if self.lambda == self.lambda.field().elem(1) {
            return if self.omega_exp == 0 { write!(f, "1") } else { Ok(()) };
        }
        let l = self.lambda.to_string();
        if l.len() == 1 {
            write!(f, "μ_{l}")
        } else {
            write!(f, "μ_({l})")
        }
    }
}

impl fmt::Debug for CharSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaJson {
    pub poly: Vec<u64>,
    pub root_tag: String,
    pub presentation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharJson {
    pub omega_exp: i64,
    pub lambda: LambdaJson,
}

/// ρ(r, χ) = ind(ω₂^{r+1}) ⊗ χ.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RhoSymbol {
    pub r: u64,
    pub chi: CharSymbol,
}

impl RhoSymbol {
    pub fn new(r: u64, chi: CharSymbol) -> Result<Self> {
        if r > chi.p() - 1 {
            return Err(Error::InvalidInput(format!("r = {r} must lie in [0, p−1]")));
        }
        Ok(RhoSymbol { r, chi })
    }

    fn key(&self) -> (u64, i64, Fq) {
        (self.r, self.chi.omega_exp, self.chi.lambda)
    }

    /// The symbols related by ρ(r,χ) ≃ ρ(r,χμ_{−1}) ≃ ρ(p−1−r, χω^r) ≃ ρ(p−1−r, χω^rμ_{−1}).
    pub fn orbit(&self) -> Vec<RhoSymbol> {
        let p = self.chi.p();
        let m1 = FqField::prime_field(p).elem(-1);
        let r2 = p - 1 - self.r;
        let c2 = self.chi.twist(self.r as i64);
        vec![
            *self,
            RhoSymbol {
                r: self.r,
                chi: self.chi.twist_mu(&m1),
            },
            RhoSymbol { r: r2, chi: c2 },
            RhoSymbol {
                r: r2,
                chi: c2.twist_mu(&m1),
            },
        ]
    }
}

impl fmt::Display for RhoSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ind(ω₂^{})", self.r + 1)?;
        if self.chi != CharSymbol::trivial(self.chi.p()) {
            write!(f, "⊗{}", self.chi)?;
        }
        Ok(())
    }
}

impl fmt::Debug for RhoSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ρ({}, {})", self.r, self.chi)
    }
}

/// Least element of the orbit, ordered by r, then the ω-exponent, then λ.
pub fn canonicalize_rho(rho: &RhoSymbol) -> RhoSymbol {
    rho.orbit()
        .into_iter()
        .min_by_key(|s| s.key())
        .expect("orbit is nonempty")
}

/// The complementary character ω^{k−1}·sub^{−1}.
pub fn complete_pair(sub: &CharSymbol, k: u32) -> CharSymbol {
    sub.inverse().twist(k as i64 - 1)
}

/// Character of V̄ from one of V̄* = V̄(1−k): χ ↦ χ·ω^{k−1}.
pub fn dualize(chi: &CharSymbol, k: u32) -> CharSymbol {
    chi.twist(k as i64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(p: u64, e: i64, l: i64) -> CharSymbol {
        CharSymbol::new(e, FqField::prime_field(p).elem(l)).unwrap()
    }

    #[test]
    fn rho_example_p5() {
        let rho = RhoSymbol::new(3, ch(5, 1, 1)).unwrap();
        let c = canonicalize_rho(&rho);
        assert_eq!(c.r, 1);
        assert_eq!(c.chi, CharSymbol::trivial(5));
    }

    #[test]
    fn mu_minus_one_is_absorbed() {
        let a = RhoSymbol::new(2, ch(7, 3, 2)).unwrap();
        let b = RhoSymbol::new(2, ch(7, 3, -2)).unwrap();
        assert_eq!(canonicalize_rho(&a), canonicalize_rho(&b));
    }

    #[test]
    fn pair_and_dual() {
        let p = 7;
        let k = 9;
        let sub = ch(p, k as i64 - 2, 4);
        assert_eq!(complete_pair(&sub, k), ch(p, 1, 2));
        let vstar = ch(p, -1, 4);
        assert_eq!(dualize(&vstar, k), sub);
        assert_eq!(complete_pair(&ch(p, k as i64 - 1, 1), k), CharSymbol::trivial(p));
    }

    #[test]
    fn display() {
        assert_eq!(ch(5, 7, 3).to_string(), "ω^3μ_3");
        assert_eq!(ch(5, 1, 2).to_string(), "ωμ_2");
        assert_eq!(CharSymbol::trivial(5).to_string(), "1");
        assert_eq!(ch(5, 2, 1).to_string(), "ω^2");
    }
}
