//! Truncated Laurent series with X-adic precision and a p-power denominator.
//!
//! A `Series` stores `p^{-shift} · Σ c_i X^{low+i}`, known modulo `X^prec`
//! (absolute exponent). Exact series use the `EXACT` sentinel.

use std::fmt;

use num_bigint::BigInt;

use super::coeff::Coeff;
use crate::error::{Error, Result};

pub const EXACT: i64 = i64::MAX / 4;

pub(crate) fn padd(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

pub(crate) fn pmul(a: i64, b: i64) -> i64 {
    if a >= EXACT {
        return EXACT;
    }
    a.saturating_mul(b).min(EXACT)
}

#[derive(Clone, PartialEq)]
pub struct Series<C: Coeff> {
    ctx: C::Ctx,
    low: i64,
    coeffs: Vec<C>,
    prec: i64,
    shift: u32,
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.shift > 0 {
            write!(f, "p^-{}·(", self.shift)?;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}·X^{}", c, self.low + i as i64)?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.shift > 0 {
            write!(f, ")")?;
        }
        if self.prec < EXACT {
            write!(f, " + O(X^{})", self.prec)?;
        }
        Ok(())
    }
}

impl<C: Coeff> Series<C> {
    /// Build and normalize; coefficients at exponents ≥ prec are dropped.
    pub fn new(ctx: &C::Ctx, low: i64, coeffs: Vec<C>, prec: i64) -> Self {
        let mut s = Series {
            ctx: ctx.clone(),
            low,
            coeffs,
            prec: prec.min(EXACT),
            shift: 0,
        };
        s.trim();
        s
    }

    pub fn exact(ctx: &C::Ctx, low: i64, coeffs: Vec<C>) -> Self {
        Self::new(ctx, low, coeffs, EXACT)
    }

    pub fn from_i64s(ctx: &C::Ctx, low: i64, coeffs: &[i64], prec: i64) -> Self {
        let cs = coeffs.iter().map(|&c| C::from_i64(ctx, c)).collect();
        Self::new(ctx, low, cs, prec)
    }

    pub fn from_bigints(ctx: &C::Ctx, low: i64, coeffs: &[BigInt], prec: i64) -> Self {
        let cs = coeffs.iter().map(|c| C::from_bigint(ctx, c)).collect();
        Self::new(ctx, low, cs, prec)
    }

    pub fn zero(ctx: &C::Ctx, prec: i64) -> Self {
        Self::new(ctx, 0, Vec::new(), prec)
    }

    pub fn one(ctx: &C::Ctx) -> Self {
        Self::constant(C::one(ctx))
    }

    pub fn constant(c: C) -> Self {
        let ctx = c.ctx().clone();
        Self::exact(&ctx, 0, vec![c])
    }

    pub fn monomial(c: C, n: i64) -> Self {
        let ctx = c.ctx().clone();
        Self::exact(&ctx, n, vec![c])
    }

    /// The variable X.
    pub fn x(ctx: &C::Ctx) -> Self {
        Self::monomial(C::one(ctx), 1)
    }

    /// The shifted value p^{-shift}·(stored series).
    pub fn with_shift(mut self, shift: u32) -> Self {
        self.shift = shift;
        self
    }

    fn trim(&mut self) {
        if self.prec < EXACT {
            let keep = (self.prec - self.low).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.low = 0;
            }
            Some(i) => {
                if i > 0 {
                    self.coeffs.drain(..i);
                    self.low += i as i64;
                }
                while self.coeffs.last().map_or(false, |c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }
    pub fn low(&self) -> i64 {
        self.low
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn shift(&self) -> u32 {
        self.shift
    }
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }
    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// One past the highest stored exponent.
    pub fn end(&self) -> i64 {
        self.low + self.coeffs.len() as i64
    }

    /// Stored (integral) coefficient of X^n; zero outside the stored range.
    pub fn coeff(&self, n: i64) -> C {
        if n < self.low || n >= self.end() {
            C::zero(&self.ctx)
        } else {
            self.coeffs[(n - self.low) as usize].clone()
        }
    }

    pub fn coeff_ref(&self, n: i64) -> Option<&C> {
        if n < self.low || n >= self.end() {
            None
        } else {
            Some(&self.coeffs[(n - self.low) as usize])
        }
    }

    /// X-adic valuation, or `None` for the zero series.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.low)
    }

    /// Valuation, with the zero series reported at its precision.
    pub fn val_or_prec(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(prec);
        s.trim();
        s
    }

    /// Forget the precision marker (treat the stored polynomial as exact).
    pub fn as_exact(&self) -> Self {
        let mut s = self.clone();
        s.prec = EXACT;
        s
    }

    pub fn map<D: Coeff>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> D) -> Series<D> {
        let mut s = Series::new(ctx, self.low, self.coeffs.iter().map(f).collect(), self.prec);
        s.shift = self.shift;
        s
    }

    pub fn try_map<D: Coeff>(
        &self,
        ctx: &D::Ctx,
        f: impl Fn(&C) -> Result<D>,
    ) -> Result<Series<D>> {
        let cs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        let mut s = Series::new(ctx, self.low, cs, self.prec);
        s.shift = self.shift;
        Ok(s)
    }

    fn p_pow(&self, n: u32) -> C {
        let p = C::from_i64(&self.ctx, C::prime(&self.ctx) as i64);
        let mut acc = C::one(&self.ctx);
        for _ in 0..n {
            acc = acc.times(&p);
        }
        acc
    }

    /// Same value, with shift raised to `shift` (stored coefficients scaled).
    pub fn raise_shift(&self, shift: u32) -> Self {
        assert!(shift >= self.shift);
        if shift == self.shift {
            return self.clone();
        }
        let m = self.p_pow(shift - self.shift);
        let mut s = self.scale(&m);
        s.shift = shift;
        s
    }

    /// Lower the shift as far as the coefficients allow; never changes the value.
    pub fn normalize_shift(&self) -> Self {
        let mut s = self.clone();
        while s.shift > 0 {
            match s.coeffs.iter().map(|c| c.div_p()).collect::<Option<Vec<_>>>() {
                Some(cs) if !C::is_residue_field(&s.ctx) || s.is_zero() => {
                    s.coeffs = cs;
                    s.shift -= 1;
                }
                _ => break,
            }
        }
        s.trim();
        s
    }

    /// The value as an integral series, failing if a denominator remains.
    pub fn into_integral(&self) -> Result<Self> {
        let s = self.normalize_shift();
        if s.shift > 0 {
            return Err(Error::Integrality(format!(
                "series keeps denominator p^{} after normalization",
                s.shift
            )));
        }
        Ok(s)
    }

    /// Exact division of the stored coefficients by p^n (value divided by p^n).
    pub fn div_p_pow(&self, n: u32) -> Result<Self> {
        let mut cs = self.coeffs.clone();
        for _ in 0..n {
            cs = cs
                .iter()
                .map(|c| c.div_p())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Divisibility("coefficient not divisible by p".into()))?;
        }
        let mut s = Series::new(&self.ctx, self.low, cs, self.prec);
        s.shift = self.shift;
        Ok(s)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let s = self.shift.max(other.shift);
        (self.raise_shift(s), other.raise_shift(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        if self.shift != other.shift {
            let (a, b) = self.aligned(other);
            return a.combine(&b, negate);
        }
        let prec = self.prec.min(other.prec);
        if self.is_zero() && other.is_zero() {
            let mut z = Self::zero(&self.ctx, prec);
            z.shift = self.shift;
            return z;
        }
        let lo = match (self.valuation(), other.valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let hi = self.end().max(other.end()).min(prec.max(lo));
        let mut cs = Vec::with_capacity((hi - lo).max(0) as usize);
        for n in lo..hi {
            let a = self.coeff_ref(n);
            let b = other.coeff_ref(n);
            let c = match (a, b, negate) {
                (Some(a), Some(b), false) => a.plus(b),
                (Some(a), Some(b), true) => a.minus(b),
                (Some(a), None, _) => a.clone(),
                (None, Some(b), false) => b.clone(),
                (None, Some(b), true) => b.negate(),
                (None, None, _) => C::zero(&self.ctx),
            };
            cs.push(c);
        }
        let mut s = Series::new(&self.ctx, lo, cs, prec);
        s.shift = self.shift;
        s
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        s.coeffs = s.coeffs.iter().map(|c| c.negate()).collect();
        s
    }

    pub fn scale(&self, c: &C) -> Self {
        let cs = self.coeffs.iter().map(|x| x.times(c)).collect();
        let mut s = Series::new(&self.ctx, self.low, cs, self.prec);
        s.shift = self.shift;
        s
    }

    /// Multiply by X^n (n may be negative); precision moves along.
    pub fn mul_x_pow(&self, n: i64) -> Self {
        let mut s = self.clone();
        if !s.is_zero() {
            s.low += n;
        }
        if s.prec < EXACT {
            s.prec += n;
        }
        s
    }

    /// Product with precision min(a.prec + val b, b.prec + val a).
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_to(other, EXACT)
    }

    /// Product, computing only exponents below `cap`.
    pub fn mul_to(&self, other: &Self, cap: i64) -> Self {
        let va = self.val_or_prec();
        let vb = other.val_or_prec();
        let prec = padd(self.prec, vb).min(padd(other.prec, va)).min(cap);
        let shift = self.shift + other.shift;
        if self.is_zero() || other.is_zero() {
            let mut z = Self::zero(&self.ctx, prec);
            z.shift = shift;
            return z;
        }
        let lo = self.low + other.low;
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let n = if prec >= EXACT {
            full
        } else {
            ((prec - lo).max(0) as usize).min(full)
        };
        let la = self.coeffs.len();
        let lb = other.coeffs.len();
        let mut cs = Vec::with_capacity(n);
        for t in 0..n {
            let i0 = t.saturating_sub(lb - 1);
            let i1 = t.min(la - 1);
            let pairs = (i0..=i1).map(|i| (&self.coeffs[i], &other.coeffs[t - i]));
            cs.push(C::sum_of_products(&self.ctx, pairs));
        }
        let mut s = Series::new(&self.ctx, lo, cs, prec);
        s.shift = shift;
        s
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse. For f = X^v·u the result is known modulo
    /// X^{prec − 2v}; exact non-monomial input needs `inverse_to`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_exact() && !self.is_monomial() {
            return Err(Error::Precision(
                "inverse of an exact non-monomial series needs a target precision".into(),
            ));
        }
        self.inverse_inner()
    }

    /// Inverse known modulo X^target (absolute), if the input allows it.
    pub fn inverse_to(&self, target: i64) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::NotUnit("zero series".into()))?;
        let inv = self.truncate(padd(target, 2 * v)).inverse_inner()?;
        Ok(inv.truncate(target))
    }

    fn inverse_inner(&self) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::NotUnit("zero series".into()))?;
        let lead_inv = self.coeffs[0].inverse()?;
        let prec = if self.is_exact() {
            EXACT
        } else {
            self.prec - 2 * v
        };
        let n = if self.is_exact() {
            1
        } else {
            (prec + v).max(0) as usize
        };
        let u = &self.coeffs;
        let mut b: Vec<C> = Vec::with_capacity(n);
        for t in 0..n {
            if t == 0 {
                b.push(lead_inv.clone());
                continue;
            }
            let hi = t.min(u.len() - 1);
            let pairs = (1..=hi).map(|i| (&u[i], &b[t - i]));
            let s = C::sum_of_products(&self.ctx, pairs);
            b.push(s.times(&lead_inv).negate());
        }
        let mut out = Series::new(&self.ctx, -v, b, prec);
        if self.shift > 0 {
            out = out.scale(&self.p_pow(self.shift));
        }
        Ok(out)
    }

    /// Quotient self/other via the inverse of other.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let inv = if other.is_exact() && !other.is_monomial() {
            let v = other.val_or_prec();
            let target = padd(self.prec, -v - self.val_or_prec());
            if target >= EXACT {
                return Err(Error::Precision(
                    "exact quotient by a non-monomial needs a target precision".into(),
                ));
            }
            other.inverse_to(target)?
        } else {
            other.inverse()?
        };
        Ok(self.mul(&inv))
    }

    pub fn eval0(&self) -> C {
        self.coeff(0)
    }

    /// First exponent where the two values differ below their common precision,
    /// or the common precision if they agree.
    pub fn agreement(&self, other: &Self) -> i64 {
        let d = self.sub(other).normalize_shift();
        d.valuation().unwrap_or(d.prec)
    }

    /// Same value at their common precision.
    pub fn same_value(&self, other: &Self) -> bool {
        let d = self.sub(other);
        d.is_zero()
    }

    /// Polynomial evaluation-free formal derivative.
    pub fn derivative(&self) -> Self {
        let cs: Vec<C> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.times(&C::from_i64(&self.ctx, self.low + i as i64)))
            .collect();
        let mut s = Series::new(&self.ctx, self.low - 1, cs, self.prec.saturating_sub(1));
        s.shift = self.shift;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::fq::FqField;
    use crate::padic::ol::EisensteinRing;
    use crate::{OlSeries, ResSeries};

    #[test]
    fn product_precision_rule() {
        let r = EisensteinRing::unramified(5, 4).unwrap();
        let a = OlSeries::from_i64s(&r, 1, &[1, 2], 10);
        let b = OlSeries::from_i64s(&r, 2, &[3], 7);
        let c = a.mul(&b);
        assert_eq!(c.prec(), 8);
        assert_eq!(c.low(), 3);
    }

    #[test]
    fn inverse_of_one_plus_x() {
        let f = FqField::prime_field(7);
        let s = ResSeries::from_i64s(&f, 0, &[1, 1], 8);
        let inv = s.inverse().unwrap();
        assert_eq!(inv.prec(), 8);
        assert!(inv.mul(&s).same_value(&ResSeries::one(&f)));
    }

    #[test]
    fn laurent_inverse_loses_two_v() {
        let f = FqField::prime_field(5);
        let s = ResSeries::from_i64s(&f, 2, &[1, 3], 10);
        let inv = s.inverse().unwrap();
        assert_eq!(inv.low(), -2);
        assert_eq!(inv.prec(), 6);
    }

    #[test]
    fn shift_normalization_keeps_value() {
        let r = EisensteinRing::unramified(3, 5).unwrap();
        let s = OlSeries::from_i64s(&r, 0, &[9, 3], 4).with_shift(2);
        let n = s.normalize_shift();
        assert_eq!(n.shift(), 1);
        assert_eq!(n.coeff(0), crate::OlElem::from_i64(&r, 3));
        assert!(s.same_value(&n));
    }

    #[test]
    fn zero_series_keeps_precision() {
        let f = FqField::prime_field(3);
        let z = ResSeries::zero(&f, 5);
        assert_eq!(z.val_or_prec(), 5);
        assert_eq!(z.prec(), 5);
    }
}
