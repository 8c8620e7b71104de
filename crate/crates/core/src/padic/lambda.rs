//! The products λ₊ = Π_{n even} q_n/p and λ₋ = Π_{n odd} q_n/p, and the
//! ratio (λ₋/λ₊)^{k−1}.
//!
//! λ₋ is split as (q₁/p)·λ₋′. The factor q₁/p is the only one carrying a
//! denominator below X^{p(p−1)}; its power is computed exactly over Z.

use num_bigint::BigInt;
use num_traits::Zero;

use super::binom::{ceil_log, DenTable};
use super::ol::{OlElem, OlRing};
use super::ops::q_series_with;
use crate::error::{Error, Result};
use crate::OlSeries;


#[derive(Debug, Clone)]
pub struct LambdaData {
    pub k: u32,
    /// All series are known modulo X^target.
    pub target: i64,
    /// Largest retained factor index.
    pub n_max: u32,
    pub lam_plus: OlSeries,
    /// Π_{n odd ≥ 3} q_n/p.
    pub lam_minus_rest: OlSeries,
    /// (q₁/p)^{k−1}, with its denominator shift.
    pub q1_ratio_pow: OlSeries,
    /// (λ₋/λ₊)^{k−1}, with shift ≤ budget.
    pub ratio: OlSeries,
}

/// Number of factors kept so the first omitted one is ≡ 1 mod (p^Np, X^target).
pub fn n_max(p: u64, np: u32, target: i64) -> u32 {
    np + 1 + ceil_log(p, target.max(1) as u64)
}

/// q₁ = ((1+X)^p − 1)/X over Z.
fn q1_integer(p: u64) -> Vec<BigInt> {
    (1..=p)
        .map(|j| crate::padic::binom::binom_exact(&BigInt::from(p), j))
        .collect()
}

/// (q₁/p)^{m} mod X^target as (numerator over Z, shift).
fn q1_ratio_pow_int(p: u64, m: u32, target: usize) -> (Vec<BigInt>, u32) {
    let q1 = q1_integer(p);
    let mut acc = vec![BigInt::zero(); target];
    acc[0] = BigInt::from(1);
    for _ in 0..m {
        let mut next = vec![BigInt::zero(); target];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in q1.iter().enumerate() {
                if i + j >= target {
                    break;
                }
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    let pb = BigInt::from(p);
    let mut shift = m;
    while shift > 0 && acc.iter().all(|c| (c % &pb).is_zero()) {
        for c in acc.iter_mut() {
            *c /= &pb;
        }
        shift -= 1;
    }
    (acc, shift)
}

/// (q₁/p)^{k−1} modulo X^target over the ring, with its shift.
pub fn q1_ratio_power(ring: &OlRing, k: u32, target: i64) -> OlSeries {
    let (num, shift) = q1_ratio_pow_int(ring.p(), k - 1, target.max(1) as usize);
    OlSeries::from_bigints(ring, 0, &num, target).with_shift(shift)
}

/// q_n/p modulo X^target, failing if the division is not exact there.
fn q_over_p(ring: &OlRing, n: u32, target: i64, den: &DenTable) -> Result<OlSeries> {
    let q = q_series_with::<OlElem>(ring, n, target, den);
    q.div_p_pow(1).map_err(|_| Error::Budget {
        need: 1,
        budget: 0,
    })
}

/// The λ data for weight k modulo X^target at the ring's p-adic precision.
pub fn lambda_data(ring: &OlRing, k: u32, target: i64, budget: u32) -> Result<LambdaData> {
    let p = ring.p();
    if target > (p * (p - 1)) as i64 {
        return Err(Error::Budget {
            need: 2,
            budget,
        });
    }
    let nm = n_max(p, ring.np(), target);
    let den = DenTable::new(target.max(1) as usize, p, ring.np());
    let one = OlSeries::one(ring).truncate(target);
    let mut lam_plus = one.clone();
    let mut lam_minus_rest = one.clone();
    for n in 2..=nm {
        let f = q_over_p(ring, n, target, &den)?;
        if f.same_value(&one) {
            continue;
        }
        if n % 2 == 0 {
            lam_plus = lam_plus.mul_to(&f, target);
        } else {
            lam_minus_rest = lam_minus_rest.mul_to(&f, target);
        }
    }
    let tail = q_over_p(ring, nm + 1, target, &den)?;
    if !tail.same_value(&one) {
        return Err(Error::TailBound(format!(
            "factor q_{}/p differs from 1 below X^{} at {} p-adic digits",
            nm + 1,
            target,
            ring.np()
        )));
    }
    let q1_ratio_pow = q1_ratio_power(ring, k, target);
    let rest = lam_minus_rest
        .mul_to(&lam_plus.inverse()?, target)
        .pow(k - 1)
        .truncate(target);
    let ratio = q1_ratio_pow.mul_to(&rest, target).normalize_shift();
    if ratio.shift() > budget {
        return Err(Error::Budget {
            need: ratio.shift(),
            budget,
        });
    }
    Ok(LambdaData {
        k,
        target,
        n_max: nm,
        lam_plus,
        lam_minus_rest,
        q1_ratio_pow,
        ratio,
    })
}

/// (λ₋/λ₊)^{k−1} modulo X^mx with denominator shift ≤ budget.
pub fn lambda_ratio_power(ring: &OlRing, k: u32, mx: i64, budget: u32) -> Result<OlSeries> {
    let p = ring.p() as u32;
    if k < p + 2 || k > 2 * p - 1 {
        return Err(Error::OutOfScope(format!(
            "weight k = {k} outside [p+2, 2p−1] for p = {p}"
        )));
    }
    Ok(lambda_data(ring, k, mx, budget)?.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ol::EisensteinRing;
    use crate::Coeff;

    #[test]
    fn ratio_shape() {
        let r = EisensteinRing::unramified(5, 6).unwrap();
        let k = 9;
        let ratio = lambda_ratio_power(&r, k, (k - 1) as i64, 2).unwrap();
        assert_eq!(ratio.shift(), 1);
        // Constant term 1: stored coefficient p^shift.
        assert_eq!(ratio.coeff(0), OlElem::from_i64(&r, 5));
        for i in 1..=3 {
            assert!(ratio.coeff(i).div_p().is_some(), "degree {i} must be integral");
        }
        assert!(ratio.coeff(4).div_p().is_none());
    }

    #[test]
    fn target_beyond_second_factor_is_refused() {
        let r = EisensteinRing::unramified(3, 4).unwrap();
        assert!(matches!(lambda_data(&r, 5, 7, 2), Err(Error::Budget { .. })));
    }
}
