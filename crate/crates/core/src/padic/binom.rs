//! Binomial coefficients binom(N, j) modulo p^M for huge or negative N.
//!
//! The p-part and the unit part are tracked separately, so no digits are
//! lost to the division by j!.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// v_p(n) and n / p^{v_p(n)} for n ≠ 0, using squaring steps for large v.
pub fn split_p(n: &BigInt, p: u64) -> (u64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0u64;
    if !(&m % &pb).is_zero() {
        return (0, m);
    }
    // Divide by p^{2^s} while possible, then back off.
    let mut powers = vec![pb.clone()];
    loop {
        let top = powers.last().unwrap();
        let (q, r) = m.div_rem(top);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1u64 << (powers.len() - 1);
        let sq = top * top;
        powers.push(sq);
    }
    powers.pop();
    while let Some(top) = powers.pop() {
        let (q, r) = m.div_rem(&top);
        if r.is_zero() {
            m = q;
            v += 1u64 << powers.len();
        }
    }
    (v, m)
}

/// Unit parts and valuations of 1..count, inverted modulo p^m once.
#[derive(Debug, Clone)]
pub struct DenTable {
    p: u64,
    m: u32,
    modulus: BigInt,
    vals: Vec<u64>,
    inv_units: Vec<BigInt>,
}

impl DenTable {
    pub fn new(count: usize, p: u64, m: u32) -> Self {
        let modulus = BigInt::from(p).pow(m);
        let mut vals = vec![0];
        let mut inv_units = vec![BigInt::one()];
        for t in 1..count.max(1) {
            let (v, u) = split_p(&BigInt::from(t), p);
            vals.push(v);
            inv_units.push(inverse_mod(&u, &modulus));
        }
        DenTable {
            p,
            m,
            modulus,
            vals,
            inv_units,
        }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// binom(n, j) mod p^m for j = 0..len, as residues in [0, p^m).
    pub fn row(&self, n: &BigInt) -> Vec<BigInt> {
        let count = self.vals.len();
        let modulus = &self.modulus;
        let mut out = Vec::with_capacity(count);
        out.push(BigInt::one() % modulus);
        let mut val: u64 = 0;
        let mut unit = BigInt::one();
        for t in 1..count {
            let num = n - BigInt::from(t - 1);
            if num.is_zero() {
                out.resize(count, BigInt::zero());
                return out;
            }
            let (vn, un) = split_p(&num, self.p);
            val = val + vn - self.vals[t];
            unit = (unit * un.mod_floor(modulus)).mod_floor(modulus);
            unit = (unit * &self.inv_units[t]).mod_floor(modulus);
            if val >= self.m as u64 {
                out.push(BigInt::zero());
            } else {
                let pv = BigInt::from(self.p).pow(val as u32);
                out.push((&unit * pv).mod_floor(modulus));
            }
        }
        out
    }
}

/// binom(n, j) mod p^m for j = 0..count, as residues in [0, p^m).
pub fn binom_row_mod(n: &BigInt, count: usize, p: u64, m: u32) -> Vec<BigInt> {
    if count == 0 {
        return Vec::new();
    }
    DenTable::new(count, p, m).row(n)
}

/// Inverse of a unit modulo m via the extended Euclidean algorithm.
pub fn inverse_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.mod_floor(m).extended_gcd(m);
    debug_assert!(g.gcd.is_one(), "not a unit");
    g.x.mod_floor(m)
}

/// Exact binomial coefficient for a (possibly negative) integer top.
pub fn binom_exact(n: &BigInt, j: u64) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..j {
        acc = acc * (n - BigInt::from(t));
        acc /= BigInt::from(t + 1);
    }
    acc
}

pub fn ceil_log(p: u64, x: u64) -> u32 {
    let mut v = 0;
    let mut q: u128 = 1;
    while q < x as u128 {
        q *= p as u128;
        v += 1;
    }
    v
}

pub fn is_negative(n: &BigInt) -> bool {
    n.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn split_large_power() {
        let n = BigInt::from(7) * BigInt::from(5).pow(37);
        assert_eq!(split_p(&n, 5), (37, BigInt::from(7)));
    }

    #[test]
    fn log_ceiling() {
        assert_eq!(ceil_log(3, 1), 0);
        assert_eq!(ceil_log(3, 3), 1);
        assert_eq!(ceil_log(3, 4), 2);
    }

    proptest! {
        #[test]
        fn modular_row_matches_exact(n in -400i64..400, p in prop::sample::select(vec![3u64, 5, 7]), m in 1u32..6) {
            let nb = BigInt::from(n);
            let row = binom_row_mod(&nb, 20, p, m);
            let md = BigInt::from(p).pow(m);
            for (j, r) in row.iter().enumerate() {
                prop_assert_eq!(r.clone(), binom_exact(&nb, j as u64).mod_floor(&md));
            }
        }
    }
}
