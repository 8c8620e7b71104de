//! Totally ramified p-adic integer rings O_L = Z_p[π]/E(π), truncated at p^Np.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::coeff::Coeff;
use crate::error::{Error, Result};

/// Presentation of O_L by an Eisenstein polynomial, with coefficients kept
/// modulo p^Np.
#[derive(Clone, PartialEq, Eq)]
pub struct EisensteinRing {
    p: u64,
    /// E as integers, low degree first, monic.
    eis: Vec<BigInt>,
    np: u32,
    modulus: BigUint,
    /// π^e = Σ red[i] π^i (mod p^Np).
    red: Vec<BigUint>,
}

pub type OlRing = Arc<EisensteinRing>;

impl fmt::Debug for EisensteinRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O_L(p={}, E={}, Np={})", self.p, self.eis_string(), self.np)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// v_p(n) for a nonzero integer.
pub fn int_p_val(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

impl EisensteinRing {
    /// The unramified case E(π) = π − p.
    pub fn unramified(p: u64, np: u32) -> Result<OlRing> {
        Self::new(p, vec![BigInt::from(-(p as i64)), BigInt::one()], np)
    }

    pub fn new(p: u64, eis: Vec<BigInt>, np: u32) -> Result<OlRing> {
        if !is_prime(p) || p < 3 {
            return Err(Error::InvalidRing(format!("p = {p} must be an odd prime")));
        }
        if np == 0 {
            return Err(Error::InvalidRing("precision Np must be positive".into()));
        }
        if eis.len() < 2 || !eis.last().unwrap().is_one() {
            return Err(Error::InvalidRing("E must be monic of degree >= 1".into()));
        }
        let e = eis.len() - 1;
        let pb = BigInt::from(p);
        for (i, c) in eis[..e].iter().enumerate() {
            if !(c % &pb).is_zero() {
                return Err(Error::InvalidRing(format!(
                    "E is not Eisenstein: coefficient of x^{i} is not divisible by p"
                )));
            }
        }
        if int_p_val(&eis[0], p) != Some(1) {
            return Err(Error::InvalidRing(
                "E is not Eisenstein: constant term must have p-valuation exactly 1".into(),
            ));
        }
        let modulus = BigUint::from(p).pow(np);
        let mi = BigInt::from(modulus.clone());
        let red = eis[..e]
            .iter()
            .map(|c| (-c).mod_floor(&mi).to_biguint().unwrap())
            .collect();
        Ok(Arc::new(EisensteinRing {
            p,
            eis,
            np,
            modulus,
            red,
        }))
    }

    /// Same presentation at a different precision.
    pub fn with_precision(&self, np: u32) -> Result<OlRing> {
        Self::new(self.p, self.eis.clone(), np)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> usize {
        self.eis.len() - 1
    }
    pub fn np(&self) -> u32 {
        self.np
    }
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }
    pub fn eisenstein(&self) -> &[BigInt] {
        &self.eis
    }

    pub fn eis_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, c) in self.eis.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            let body = if i > 0 && c.abs().is_one() {
                mon
            } else if i == 0 {
                c.abs().to_string()
            } else {
                format!("{}*{}", c.abs(), mon)
            };
            let sign = if c.is_negative() { "-" } else { "+" };
            terms.push((sign, body));
        }
        let mut s = String::new();
        for (j, (sign, body)) in terms.into_iter().enumerate() {
            if j == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(sign);
            }
            s.push_str(&body);
        }
        s
    }

    fn reduce_big(&self, x: &BigInt) -> BigUint {
        let m = BigInt::from(self.modulus.clone());
        x.mod_floor(&m).to_biguint().unwrap()
    }
}

/// Element Σ c_i π^i of O_L, 0 ≤ i < e, with c_i in [0, p^Np).
#[derive(Clone)]
pub struct OlElem {
    ring: OlRing,
    c: Vec<BigUint>,
}

impl PartialEq for OlElem {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.c == other.c
    }
}

impl fmt::Debug for OlElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.len() == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "({})", self.to_coord_string())
        }
    }
}

fn same_ring(a: &OlRing, b: &OlRing) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Normalized valuation (val(p) = 1) of an O_L element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Exact(Ratio<i64>),
    /// Indistinguishable from zero at the carried precision.
    AtLeast(Ratio<i64>),
}

impl Valuation {
    pub fn exact(&self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Exact(v) => Some(*v),
            Valuation::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl OlElem {
    pub fn ring(&self) -> &OlRing {
        &self.ring
    }

    pub fn coords(&self) -> &[BigUint] {
        &self.c
    }

    pub fn from_coords(ring: &OlRing, coords: &[BigInt]) -> Result<Self> {
        if coords.len() > ring.e() {
            return Err(Error::InvalidInput(format!(
                "expected at most {} coordinates",
                ring.e()
            )));
        }
        let mut c = vec![BigUint::zero(); ring.e()];
        for (i, x) in coords.iter().enumerate() {
            c[i] = ring.reduce_big(x);
        }
        Ok(OlElem {
            ring: ring.clone(),
            c,
        })
    }

    /// The uniformizer π (equal to p when e = 1).
    pub fn uniformizer(ring: &OlRing) -> Self {
        if ring.e() == 1 {
            return Self::from_i64(ring, ring.p() as i64);
        }
        let mut c = vec![BigUint::zero(); ring.e()];
        c[1] = BigUint::one();
        OlElem {
            ring: ring.clone(),
            c,
        }
    }

    /// Evaluate an integer polynomial in π.
    pub fn from_pi_poly(ring: &OlRing, poly: &[BigInt]) -> Self {
        let pi = Self::uniformizer(ring);
        let mut acc = Self::zero(ring);
        for c in poly.iter().rev() {
            acc = acc.times(&pi).plus(&Self::from_bigint(ring, c));
        }
        acc
    }

    /// Reinterpret at another precision of the same presentation.
    pub fn change_ring(&self, ring: &OlRing) -> Result<Self> {
        if ring.p() != self.ring.p() || ring.eisenstein() != self.ring.eisenstein() {
            return Err(Error::RingMismatch);
        }
        let c = self.c.iter().map(|x| x % ring.modulus()).collect();
        Ok(OlElem {
            ring: ring.clone(),
            c,
        })
    }

    /// π-adic valuation index min_i (e·v_p(c_i) + i), or None if zero.
    pub fn pi_val(&self) -> Option<u64> {
        let e = self.ring.e() as u64;
        self.c
            .iter()
            .enumerate()
            .filter_map(|(i, x)| {
                int_p_val(&BigInt::from(x.clone()), self.ring.p()).map(|v| e * v as u64 + i as u64)
            })
            .min()
    }

    pub fn valuation(&self) -> Valuation {
        let e = self.ring.e() as i64;
        let cap = self.ring.np() as i64;
        match self.pi_val() {
            Some(v) if (v as i64) < cap * e => Valuation::Exact(Ratio::new(v as i64, e)),
            _ => Valuation::AtLeast(Ratio::from_integer(cap)),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.pi_val() == Some(0)
    }

    /// Image in the residue field F_p.
    pub fn residue(&self) -> u64 {
        (&self.c[0] % BigUint::from(self.ring.p())).to_u64().unwrap()
    }

    /// Exact division by p^n when every coordinate is divisible.
    pub fn div_p_pow(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return Some(self.clone());
        }
        let d = BigUint::from(self.ring.p()).pow(n);
        let mut c = Vec::with_capacity(self.c.len());
        for x in &self.c {
            let (q, r) = x.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            c.push(q);
        }
        Some(OlElem {
            ring: self.ring.clone(),
            c,
        })
    }

    pub fn mul_p_pow(&self, n: u32) -> Self {
        let d = BigUint::from(self.ring.p()).pow(n);
        let c = self
            .c
            .iter()
            .map(|x| (x * &d) % self.ring.modulus())
            .collect();
        OlElem {
            ring: self.ring.clone(),
            c,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            n >>= 1;
        }
        acc
    }

    /// Unreduced polynomial product of coordinate vectors, folded by E.
    fn mul_unreduced(ring: &EisensteinRing, a: &[BigUint], b: &[BigUint], acc: &mut [BigUint]) {
        let e = ring.e();
        if e == 1 {
            acc[0] += &a[0] * &b[0];
            return;
        }
        let mut full = vec![BigUint::zero(); 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                full[i + j] += x * y;
            }
        }
        for d in (e..2 * e - 1).rev() {
            let top = std::mem::take(&mut full[d]) % &ring.modulus;
            if top.is_zero() {
                continue;
            }
            for (i, r) in ring.red.iter().enumerate() {
                full[d - e + i] += &top * r;
            }
        }
        for i in 0..e {
            acc[i] += &full[i];
        }
    }

    fn check_ring(&self, other: &Self) {
        assert!(
            same_ring(&self.ring, &other.ring),
            "O_L ring mismatch: {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    pub fn try_plus(&self, other: &Self) -> Result<Self> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        Ok(self.plus(other))
    }

    pub fn try_times(&self, other: &Self) -> Result<Self> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        Ok(self.times(other))
    }

    /// Lift to signed integers in (−p^Np/2, p^Np/2] (e = 1 convenience).
    pub fn to_signed_coords(&self) -> Vec<BigInt> {
        let m = BigInt::from(self.ring.modulus().clone());
        let half = &m / 2;
        self.c
            .iter()
            .map(|x| {
                let x = BigInt::from(x.clone());
                if x > half {
                    x - &m
                } else {
                    x
                }
            })
            .collect()
    }
}

impl Coeff for OlElem {
    type Ctx = OlRing;

    fn ctx(&self) -> &OlRing {
        &self.ring
    }

    fn zero(ctx: &OlRing) -> Self {
        OlElem {
            ring: ctx.clone(),
            c: vec![BigUint::zero(); ctx.e()],
        }
    }

    fn one(ctx: &OlRing) -> Self {
        let mut c = vec![BigUint::zero(); ctx.e()];
        c[0] = BigUint::one() % ctx.modulus();
        OlElem {
            ring: ctx.clone(),
            c,
        }
    }

    fn from_bigint(ctx: &OlRing, n: &BigInt) -> Self {
        let mut c = vec![BigUint::zero(); ctx.e()];
        c[0] = ctx.reduce_big(n);
        OlElem {
            ring: ctx.clone(),
            c,
        }
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn plus(&self, other: &Self) -> Self {
        self.check_ring(other);
        let m = self.ring.modulus();
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| {
                let s = a + b;
                if &s >= m {
                    s - m
                } else {
                    s
                }
            })
            .collect();
        OlElem {
            ring: self.ring.clone(),
            c,
        }
    }

    fn minus(&self, other: &Self) -> Self {
        self.check_ring(other);
        let m = self.ring.modulus();
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(a, b)| if a >= b { a - b } else { m - b + a })
            .collect();
        OlElem {
            ring: self.ring.clone(),
            c,
        }
    }

    fn times(&self, other: &Self) -> Self {
        self.check_ring(other);
        let mut acc = vec![BigUint::zero(); self.ring.e()];
        Self::mul_unreduced(&self.ring, &self.c, &other.c, &mut acc);
        let m = self.ring.modulus();
        OlElem {
            ring: self.ring.clone(),
            c: acc.into_iter().map(|x| x % m).collect(),
        }
    }

    fn negate(&self) -> Self {
        let m = self.ring.modulus();
        let c = self
            .c
            .iter()
            .map(|a| if a.is_zero() { BigUint::zero() } else { m - a })
            .collect();
        OlElem {
            ring: self.ring.clone(),
            c,
        }
    }

    fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit(format!("{self:?} has positive valuation")));
        }
        let p = self.ring.p();
        let r = self.residue();
        let r_inv = BigInt::from(r).modpow(&BigInt::from(p - 2), &BigInt::from(p));
        let mut x = Self::from_bigint(&self.ring, &r_inv);
        let two = Self::from_i64(&self.ring, 2);
        // Newton: each step doubles the number of correct π-adic digits.
        let target = self.ring.np() as usize * self.ring.e();
        let mut digits = 1usize;
        while digits < target {
            x = x.times(&two.minus(&self.times(&x)));
            digits *= 2;
        }
        Ok(x)
    }

    fn prime(ctx: &OlRing) -> u64 {
        ctx.p()
    }

    fn is_residue_field(_: &OlRing) -> bool {
        false
    }

    fn p_digits(ctx: &OlRing) -> u32 {
        ctx.np()
    }

    fn div_p(&self) -> Option<Self> {
        self.div_p_pow(1)
    }

    fn p_val(&self) -> Option<u32> {
        let p = self.ring.p();
        self.c
            .iter()
            .filter_map(|x| int_p_val(&BigInt::from(x.clone()), p))
            .min()
    }

    fn sum_of_products<'a, I>(ctx: &OlRing, pairs: I) -> Self
    where
        I: Iterator<Item = (&'a Self, &'a Self)>,
    {
        let mut acc = vec![BigUint::zero(); ctx.e()];
        for (a, b) in pairs {
            Self::mul_unreduced(ctx, &a.c, &b.c, &mut acc);
        }
        let m = ctx.modulus();
        OlElem {
            ring: ctx.clone(),
            c: acc.into_iter().map(|x| x % m).collect(),
        }
    }

    fn to_coord_string(&self) -> String {
        self.c
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn from_coord_str(ctx: &OlRing, s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("coordinate `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coords(ctx, &coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring2() -> OlRing {
        EisensteinRing::new(5, vec![BigInt::from(-5), BigInt::zero(), BigInt::one()], 6).unwrap()
    }

    #[test]
    fn valuation_of_fifteen() {
        let r = EisensteinRing::unramified(5, 6).unwrap();
        let x = OlElem::from_i64(&r, 15);
        assert_eq!(x.valuation(), Valuation::Exact(Ratio::from_integer(1)));
    }

    #[test]
    fn uniformizer_has_half_valuation() {
        let r = ring2();
        let pi = OlElem::uniformizer(&r);
        assert_eq!(pi.valuation(), Valuation::Exact(Ratio::new(1, 2)));
    }

    #[test]
    fn pi_squared_is_five() {
        let r = ring2();
        let pi = OlElem::uniformizer(&r);
        let sq = pi.times(&pi);
        assert_eq!(sq, OlElem::from_i64(&r, 5));
        assert_eq!(sq.to_coord_string(), "5,0");
    }

    #[test]
    fn zero_reports_lower_bound() {
        let r = EisensteinRing::unramified(3, 4).unwrap();
        assert_eq!(
            OlElem::zero(&r).valuation(),
            Valuation::AtLeast(Ratio::from_integer(4))
        );
        assert_eq!(
            OlElem::from_i64(&r, 81).valuation(),
            Valuation::AtLeast(Ratio::from_integer(4))
        );
    }

    #[test]
    fn inverse_of_non_unit_fails() {
        let r = ring2();
        assert!(matches!(
            OlElem::uniformizer(&r).inverse(),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn inverse_roundtrip() {
        let r = ring2();
        let x = OlElem::from_coords(&r, &[BigInt::from(7), BigInt::from(3)]).unwrap();
        let y = x.inverse().unwrap();
        assert_eq!(x.times(&y), OlElem::one(&r));
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = OlElem::one(&ring2());
        let b = OlElem::one(&EisensteinRing::unramified(5, 6).unwrap());
        assert_eq!(a.try_plus(&b), Err(Error::RingMismatch));
    }

    #[test]
    fn rejects_non_eisenstein() {
        let bad = EisensteinRing::new(5, vec![BigInt::from(-25), BigInt::zero(), BigInt::one()], 4);
        assert!(matches!(bad, Err(Error::InvalidRing(_))));
        assert!(EisensteinRing::unramified(2, 4).is_err());
    }

    #[test]
    fn eisenstein_string() {
        assert_eq!(ring2().eis_string(), "x^2-5");
    }
}
