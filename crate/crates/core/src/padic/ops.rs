//! Substitution and the operators φ, γ_a, ψ on truncated series.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::binom::{binom_row_mod, ceil_log, DenTable};
use super::coeff::Coeff;
use super::series::{padd, pmul, Series, EXACT};
use crate::error::{Error, Result};

/// ε-value of an element of Γ: an integer lift, optionally only meaningful
/// modulo p^digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaExp {
    pub lift: BigInt,
    pub digits: Option<u32>,
}

impl GammaExp {
    pub fn exact(a: i64) -> Self {
        GammaExp {
            lift: BigInt::from(a),
            digits: None,
        }
    }

    pub fn modular(lift: BigInt, digits: u32) -> Self {
        GammaExp {
            lift,
            digits: Some(digits),
        }
    }

    pub fn times(&self, other: &Self) -> Self {
        let digits = match (self.digits, other.digits) {
            (None, d) | (d, None) => d,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        GammaExp {
            lift: &self.lift * &other.lift,
            digits,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.lift.is_one() && self.digits.is_none()
    }

    /// Reduction mod p.
    pub fn residue(&self, p: u64) -> u64 {
        let pb = BigInt::from(p);
        let r = ((&self.lift % &pb) + &pb) % &pb;
        r.try_into().unwrap()
    }
}

/// Cached powers g^i (and g^{-i}) truncated at a fixed absolute precision.
#[derive(Debug, Clone)]
pub struct PowerTable<C: Coeff> {
    g: Series<C>,
    target: i64,
    pos: Vec<Series<C>>,
    neg: Vec<Series<C>>,
    val: i64,
}

impl<C: Coeff> PowerTable<C> {
    /// Table for substituting into series of valuation ≥ -max_neg, computed
    /// below X^target.
    pub fn new(g: &Series<C>, target: i64, max_neg: usize) -> Result<Self> {
        let val = check_substitutable(g)?;
        if target >= EXACT {
            return Err(Error::Precision("power table needs a finite target".into()));
        }
        let gt = g.truncate(target);
        let count = (target.max(0) / val) as usize + 1;
        let mut pos = Vec::with_capacity(count);
        pos.push(Series::one(g.ctx()).truncate(target));
        for i in 1..count {
            let next = pos[i - 1].mul_to(&gt, target);
            pos.push(next);
        }
        let mut neg = Vec::new();
        if max_neg > 0 {
            if val != 1 {
                return Err(Error::Substitution(
                    "Laurent substitution needs g of X-valuation 1".into(),
                ));
            }
            let inv = g.inverse_to(target)?;
            neg.push(Series::one(g.ctx()).truncate(target));
            for i in 1..=max_neg {
                let next = neg[i - 1].mul_to(&inv, target);
                neg.push(next);
            }
        }
        Ok(PowerTable {
            g: g.clone(),
            target,
            pos,
            neg,
            val,
        })
    }

    pub fn target(&self) -> i64 {
        self.target
    }
    pub fn g(&self) -> &Series<C> {
        &self.g
    }

    /// g^i for i ≥ 0 from the table.
    pub fn power(&self, i: usize) -> Option<&Series<C>> {
        self.pos.get(i)
    }

    /// f(g) with precision min(target, g.prec, f.prec·val(g)) (Laurent terms
    /// inherit the precision of g^{-1}).
    pub fn apply(&self, f: &Series<C>) -> Result<Series<C>> {
        let ctx = f.ctx();
        let mut prec = self.target.min(pmul(f.prec(), self.val));
        if f.is_zero() {
            return Ok(Series::zero(ctx, prec).with_shift(f.shift()));
        }
        let lo = f.low();
        if lo < 0 && (-lo) as usize >= self.neg.len() {
            return Err(Error::Substitution(format!(
                "pole order {} exceeds the table's {}",
                -lo,
                self.neg.len().saturating_sub(1)
            )));
        }
        // Powers needed: exponents in [lo, end) below the f-precision.
        let hi = f.end();
        let mut terms: Vec<(&C, &Series<C>)> = Vec::new();
        for n in lo..hi {
            let c = match f.coeff_ref(n) {
                Some(c) if !c.is_zero() => c,
                _ => continue,
            };
            let pw = if n >= 0 {
                match self.pos.get(n as usize) {
                    Some(s) => s,
                    None => continue, // g^n vanishes below the target
                }
            } else {
                &self.neg[(-n) as usize]
            };
            prec = prec.min(pw.prec());
            terms.push((c, pw));
        }
        // Powers beyond the table are ≡ 0 mod X^target only if val(g^n) ≥ target.
        if hi > 0 && (hi as usize) > self.pos.len() && pmul(self.pos.len() as i64, self.val) < prec {
            return Err(Error::Substitution("power table too short".into()));
        }
        let out_lo = terms
            .iter()
            .map(|(_, s)| s.val_or_prec())
            .min()
            .unwrap_or(prec)
            .min(prec);
        let width = (prec - out_lo).max(0) as usize;
        let mut cs = Vec::with_capacity(width);
        for t in out_lo..prec {
            let pairs = terms
                .iter()
                .filter_map(|(c, s)| s.coeff_ref(t).map(|x| (*c, x)));
            cs.push(C::sum_of_products(ctx, pairs));
        }
        Ok(Series::new(ctx, out_lo, cs, prec).with_shift(f.shift()))
    }
}

fn check_substitutable<C: Coeff>(g: &Series<C>) -> Result<i64> {
    match g.valuation() {
        None => Err(Error::Substitution("cannot substitute the zero series".into())),
        Some(v) if v < 1 => Err(Error::Substitution(
            "substituted series must have X-valuation ≥ 1".into(),
        )),
        Some(v) => Ok(v),
    }
}

fn check_laurent<C: Coeff>(f: &Series<C>, g: &Series<C>, v: i64) -> Result<()> {
    if f.low() < 0 && !f.is_zero() {
        // A monomial c·X^v with c a unit maps X^{−n} to c^{−n}X^{−vn}.
        if g.is_monomial() && g.is_exact() && g.coeffs()[0].inverse().is_ok() {
            return Ok(());
        }
        let unit_lead = g.coeff(1).inverse().is_ok();
        if v != 1 || !unit_lead {
            return Err(Error::Substitution(
                "Laurent f needs g equal to a unit times X".into(),
            ));
        }
    }
    Ok(())
}

/// f(g(X)). Output precision is min(g.prec, f.prec·val(g)); exact inputs give
/// exact output when f is a polynomial.
pub fn substitute<C: Coeff>(f: &Series<C>, g: &Series<C>) -> Result<Series<C>> {
    let v = check_substitutable(g)?;
    check_laurent(f, g, v)?;
    if g.is_monomial() && g.is_exact() {
        return substitute_monomial(f, &g.coeffs()[0], v);
    }
    let target = g.prec().min(pmul(f.prec(), v));
    if target >= EXACT {
        // Exact polynomial composed with an exact polynomial.
        if f.low() < 0 {
            return Err(Error::Precision(
                "exact Laurent substitution needs a target precision".into(),
            ));
        }
        let deg_f = (f.end() - 1).max(0);
        let deg_g = g.end() - 1;
        let table = PowerTable::new(&g.as_exact(), deg_f * deg_g + 1, 0)?;
        return Ok(table.apply(&f.as_exact())?.as_exact());
    }
    PowerTable::new(g, target, (-f.low()).max(0) as usize)?.apply(f)
}

/// Like `substitute` but never computes beyond X^target.
pub fn substitute_to<C: Coeff>(f: &Series<C>, g: &Series<C>, target: i64) -> Result<Series<C>> {
    let v = check_substitutable(g)?;
    check_laurent(f, g, v)?;
    if g.is_monomial() && g.is_exact() {
        return Ok(substitute_monomial(f, &g.coeffs()[0], v)?.truncate(target));
    }
    let t = target.min(g.prec()).min(pmul(f.prec(), v));
    PowerTable::new(g, t, (-f.low()).max(0) as usize)?.apply(f)
}

fn substitute_monomial<C: Coeff>(f: &Series<C>, c: &C, m: i64) -> Result<Series<C>> {
    let ctx = f.ctx();
    let prec = pmul(f.prec(), m);
    if f.is_zero() {
        return Ok(Series::zero(ctx, prec).with_shift(f.shift()));
    }
    let cinv = if f.low() < 0 { Some(c.inverse()?) } else { None };
    let lo = f.low();
    let mut cs = vec![C::zero(ctx); ((f.end() - 1 - lo) * m + 1) as usize];
    for n in lo..f.end() {
        let a = f.coeff(n);
        if a.is_zero() {
            continue;
        }
        let cp = power_signed(c, cinv.as_ref(), n);
        cs[((n - lo) * m) as usize] = a.times(&cp);
    }
    Ok(Series::new(ctx, lo * m, cs, prec).with_shift(f.shift()))
}

fn power_signed<C: Coeff>(c: &C, cinv: Option<&C>, n: i64) -> C {
    let (base, e) = if n >= 0 {
        (c.clone(), n as u64)
    } else {
        (cinv.expect("inverse").clone(), n.unsigned_abs())
    };
    let mut acc = C::one(c.ctx());
    for _ in 0..e {
        acc = acc.times(&base);
    }
    acc
}

/// (1+X)^a − 1 below X^target, with binomials modulo p^{digits}.
pub fn one_plus_x_pow_minus_one<C: Coeff>(
    ctx: &C::Ctx,
    a: &BigInt,
    target: i64,
) -> Series<C> {
    let p = C::prime(ctx);
    let digits = C::p_digits(ctx);
    let count = target.max(1) as usize;
    let row = binom_row_mod(a, count, p, digits);
    let mut cs: Vec<C> = row.iter().map(|b| C::from_bigint(ctx, b)).collect();
    cs[0] = C::zero(ctx);
    let exact_poly = !a.is_negative() && a <= &BigInt::from(count as u64 - 1);
    let prec = if exact_poly { EXACT } else { target };
    Series::new(ctx, 0, cs, prec)
}

/// φ(X) = (1+X)^p − 1 (exactly X^p over a residue field).
pub fn phi_of_x<C: Coeff>(ctx: &C::Ctx) -> Series<C> {
    let p = C::prime(ctx);
    if C::is_residue_field(ctx) {
        return Series::monomial(C::one(ctx), p as i64);
    }
    one_plus_x_pow_minus_one(ctx, &BigInt::from(p), p as i64 + 1)
}

pub fn frobenius_phi<C: Coeff>(f: &Series<C>) -> Result<Series<C>> {
    substitute(f, &phi_of_x(f.ctx()))
}

/// Guard digits needed to act by γ_a below X^target.
pub fn gamma_guard<C: Coeff>(ctx: &C::Ctx, target: i64) -> u32 {
    C::p_digits(ctx) + ceil_log(C::prime(ctx), target.max(1) as u64)
}

/// γ_a(X) = (1+X)^a − 1 below X^target.
pub fn gamma_of_x<C: Coeff>(ctx: &C::Ctx, a: &GammaExp, target: i64) -> Result<Series<C>> {
    if let Some(g) = a.digits {
        let need = gamma_guard::<C>(ctx, target);
        if g < need {
            return Err(Error::Guard { have: g, need });
        }
    }
    let p = BigInt::from(C::prime(ctx));
    if (&a.lift % &p).is_zero() {
        return Err(Error::NotUnit("γ exponent must be a p-adic unit".into()));
    }
    Ok(one_plus_x_pow_minus_one(ctx, &a.lift, target))
}

pub fn gamma_act<C: Coeff>(f: &Series<C>, a: &GammaExp) -> Result<Series<C>> {
    let target = if f.is_exact() {
        // γ of an exact polynomial: degree is preserved only for a ∈ {…}; use
        // the natural finite bound from the stored range.
        if a.lift.is_one() {
            return Ok(f.clone());
        }
        return Err(Error::Precision(
            "γ of an exact series needs a target precision".into(),
        ));
    } else {
        f.prec()
    };
    gamma_act_to(f, a, target)
}

/// γ_a(f) computed below X^target.
pub fn gamma_act_to<C: Coeff>(f: &Series<C>, a: &GammaExp, target: i64) -> Result<Series<C>> {
    let g = gamma_of_x::<C>(f.ctx(), a, padd(target, 2))?;
    let g = g.truncate(padd(target, 2));
    let table = PowerTable::new(&g, target, (-f.low()).max(0) as usize)?;
    table.apply(&f.truncate(target))
}

/// ψ: the i = 0 component in the decomposition over the basis (1+X)^i φ(·).
///
/// Over a residue field ψ(X^{pm+r}) = (−1)^r X^m and Laurent input is fine.
/// Over O_L only power series are accepted.
pub fn psi<C: Coeff>(f: &Series<C>) -> Result<Series<C>> {
    let ctx = f.ctx();
    let p = C::prime(ctx) as i64;
    let low_abs = if f.is_zero() { 0 } else { f.low().min(0).abs() };
    let mut out_prec = if f.is_exact() {
        EXACT
    } else {
        (f.prec() - (p - 1) - low_abs).div_euclid(p)
    };
    if C::is_residue_field(ctx) {
        if out_prec <= 0 {
            return Err(Error::Precision(format!(
                "ψ output precision {out_prec} would be non-positive"
            )));
        }
        if f.is_zero() {
            return Ok(Series::zero(ctx, out_prec).with_shift(f.shift()));
        }
        let lo = f.low().div_euclid(p);
        let hi = (f.end() - 1).div_euclid(p) + 1;
        let mut cs = vec![C::zero(ctx); (hi - lo) as usize];
        for n in f.low()..f.end() {
            let c = f.coeff(n);
            if c.is_zero() {
                continue;
            }
            let m = n.div_euclid(p);
            let r = n.rem_euclid(p);
            let slot = &mut cs[(m - lo) as usize];
            *slot = if r % 2 == 0 { slot.plus(&c) } else { slot.minus(&c) };
        }
        return Ok(Series::new(ctx, lo, cs, out_prec).with_shift(f.shift()));
    }
    if f.low() < 0 && !f.is_zero() {
        return Err(Error::InvalidInput(
            "ψ over O_L is implemented for power series only".into(),
        ));
    }
    if !f.is_exact() {
        let np = C::p_digits(ctx) as i64;
        out_prec = out_prec.min(f.prec().div_euclid(p) - np + 1);
    }
    if out_prec <= 0 {
        return Err(Error::Precision(format!(
            "ψ output precision {out_prec} would be non-positive"
        )));
    }
    if f.is_zero() {
        return Ok(Series::zero(ctx, out_prec).with_shift(f.shift()));
    }
    // Rewrite in T = 1 + X, keep the T^{pm} terms, map T^m back to (1+X)^m.
    let deg = f.end() - 1;
    let n = (deg + 1) as usize;
    let mut t_coeffs = vec![C::zero(ctx); n];
    for j in 0..n {
        let c = f.coeff(j as i64);
        if c.is_zero() {
            continue;
        }
        // X^j = (T − 1)^j = Σ_i binom(j,i) T^i (−1)^{j−i}
        let row = binom_row_mod(&BigInt::from(j), j + 1, p as u64, C::p_digits(ctx));
        for (i, b) in row.iter().enumerate() {
            let mut term = c.times(&C::from_bigint(ctx, b));
            if (j - i) % 2 == 1 {
                term = term.negate();
            }
            t_coeffs[i] = t_coeffs[i].plus(&term);
        }
    }
    let m_max = deg / p;
    let out_len = if out_prec >= EXACT {
        (m_max + 1) as usize
    } else {
        out_prec.min(m_max + 1) as usize
    };
    let mut out = vec![C::zero(ctx); out_len];
    for m in 0..=m_max {
        let c = &t_coeffs[(p * m) as usize];
        if c.is_zero() {
            continue;
        }
        let row = binom_row_mod(&BigInt::from(m), out_len, p as u64, C::p_digits(ctx));
        for (i, b) in row.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            out[i] = out[i].plus(&c.times(&C::from_bigint(ctx, b)));
        }
    }
    Ok(Series::new(ctx, 0, out, out_prec).with_shift(f.shift()))
}

/// q_n = φ^{n−1}(φ(X)/X) = Σ_{i<p} (1+X)^{i·p^{n−1}}, below X^target.
pub fn q_series<C: Coeff>(ctx: &C::Ctx, n: u32, target: i64) -> Series<C> {
    let den = DenTable::new(target.max(1) as usize, C::prime(ctx), C::p_digits(ctx));
    q_series_with(ctx, n, target, &den)
}

/// `q_series` with a shared denominator table of length ≥ target.
pub fn q_series_with<C: Coeff>(ctx: &C::Ctx, n: u32, target: i64, den: &DenTable) -> Series<C> {
    assert!(n >= 1);
    let p = C::prime(ctx);
    let count = target.max(1) as usize;
    assert!(den.len() >= count);
    let step = BigInt::from(p).pow(n - 1);
    let mut acc = vec![BigInt::zero(); count];
    for i in 0..p {
        let row = den.row(&(&step * BigInt::from(i)));
        for (a, b) in acc.iter_mut().zip(row) {
            *a += b;
        }
    }
    let cs = acc.iter().map(|b| C::from_bigint(ctx, b)).collect();
    let degree = ((p - 1) as u128).saturating_mul((p as u128).saturating_pow(n - 1));
    let prec = if (count as u128) > degree { EXACT } else { target };
    Series::new(ctx, 0, cs, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::fq::FqField;
    use crate::padic::ol::EisensteinRing;
    use crate::{OlElem, OlSeries, ResSeries};

    #[test]
    fn square_of_x_plus_x2() {
        let r = EisensteinRing::unramified(5, 4).unwrap();
        let f = OlSeries::from_i64s(&r, 2, &[1], EXACT);
        let g = OlSeries::from_i64s(&r, 1, &[1, 1], EXACT);
        let h = substitute(&f, &g).unwrap();
        assert!(h.same_value(&OlSeries::from_i64s(&r, 2, &[1, 2, 1], EXACT)));
        assert!(h.is_exact());
    }

    #[test]
    fn identity_substitution() {
        let r = EisensteinRing::unramified(5, 4).unwrap();
        let f = OlSeries::from_i64s(&r, 0, &[3, 1, 4, 1, 5], 7);
        let h = substitute(&f, &OlSeries::x(&r)).unwrap();
        assert_eq!(h, f);
    }

    #[test]
    fn phi_of_x_three() {
        let r = EisensteinRing::unramified(3, 4).unwrap();
        let h = frobenius_phi(&OlSeries::x(&r)).unwrap();
        assert!(h.same_value(&OlSeries::from_i64s(&r, 1, &[3, 3, 1], EXACT)));
        let f = FqField::prime_field(3);
        let hb = frobenius_phi(&ResSeries::x(&f)).unwrap();
        assert!(hb.same_value(&ResSeries::monomial(crate::Fq::one(&f), 3)));
        assert!(frobenius_phi(&OlSeries::one(&r)).unwrap().same_value(&OlSeries::one(&r)));
    }

    #[test]
    fn gamma_four_on_x() {
        let r = EisensteinRing::unramified(3, 6).unwrap();
        let x = OlSeries::x(&r).truncate(8);
        let h = gamma_act(&x, &GammaExp::exact(4)).unwrap();
        assert!(h.same_value(&OlSeries::from_i64s(&r, 1, &[4, 6, 4, 1], 8)));
        let inv = gamma_act(&x, &GammaExp::exact(-1)).unwrap();
        assert!(inv.same_value(&OlSeries::from_i64s(&r, 1, &[-1, 1, -1, 1, -1, 1, -1], 8)));
        assert_eq!(gamma_act(&x, &GammaExp::exact(1)).unwrap(), x);
    }

    #[test]
    fn gamma_guard_enforced() {
        let r = EisensteinRing::unramified(3, 6).unwrap();
        let x = OlSeries::x(&r).truncate(30);
        let short = GammaExp::modular(BigInt::from(4), 6);
        assert!(matches!(gamma_act(&x, &short), Err(Error::Guard { .. })));
        let ok = GammaExp::modular(BigInt::from(4), 10);
        assert!(gamma_act(&x, &ok).is_ok());
    }

    #[test]
    fn psi_small_values() {
        let f = FqField::prime_field(5);
        let one = ResSeries::one(&f).truncate(40);
        assert!(psi(&one).unwrap().same_value(&ResSeries::one(&f)));
        let opx = ResSeries::from_i64s(&f, 0, &[1, 1], 40);
        assert!(psi(&opx).unwrap().is_zero());
        let x = ResSeries::x(&f).truncate(40);
        assert!(psi(&x).unwrap().same_value(&ResSeries::from_i64s(&f, 0, &[-1], 40)));
        let r = EisensteinRing::unramified(5, 3).unwrap();
        let xo = OlSeries::x(&r).truncate(40);
        let v = psi(&xo).unwrap();
        assert!(v.same_value(&OlSeries::from_i64s(&r, 0, &[-1], 40)));
    }

    #[test]
    fn psi_rejects_tiny_precision() {
        let f = FqField::prime_field(5);
        let s = ResSeries::from_i64s(&f, 0, &[1, 2], 5);
        assert!(matches!(psi(&s), Err(Error::Precision(_))));
    }

    #[test]
    fn q_one_for_three() {
        let r = EisensteinRing::unramified(3, 5).unwrap();
        let q1 = q_series::<OlElem>(&r, 1, 10);
        assert!(q1.same_value(&OlSeries::from_i64s(&r, 0, &[3, 3, 1], EXACT)));
        assert!(q1.is_exact());
        for n in 1..5 {
            assert_eq!(q_series::<OlElem>(&r, n, 10).eval0(), OlElem::from_i64(&r, 3));
        }
        let f = FqField::prime_field(7);
        let qb = q_series::<crate::Fq>(&f, 1, 20);
        assert!(qb.same_value(&ResSeries::monomial(crate::Fq::one(&f), 6)));
    }
}
