//! The residue fields F_p and F_{p²} = F_p[t]/(t² − n), n the least
//! quadratic non-residue.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::coeff::Coeff;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqField {
    p: u64,
    nonres: u64,
    degree: u8,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}[t]/(t^2-{})", self.p, self.nonres)
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Legendre-symbol test for a nonzero residue.
pub fn is_square_mod(a: u64, p: u64) -> bool {
    let a = a % p;
    a == 0 || pow_mod(a, (p - 1) / 2, p) == 1
}

pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    (0..p).find(|x| x * x % p == a)
}

/// Least generator of (Z/p)^×.
pub fn primitive_root(p: u64) -> u64 {
    let n = p - 1;
    let mut primes = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    (2..p)
        .find(|&g| primes.iter().all(|&q| pow_mod(g, n / q, p) != 1))
        .unwrap_or(1)
}

impl FqField {
    pub fn prime_field(p: u64) -> Self {
        FqField {
            p,
            nonres: least_nonresidue(p),
            degree: 1,
        }
    }

    pub fn quadratic(p: u64) -> Self {
        FqField {
            p,
            nonres: least_nonresidue(p),
            degree: 2,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> u8 {
        self.degree
    }
    /// The n with t² = n.
    pub fn nonresidue(&self) -> u64 {
        self.nonres
    }

    pub fn elem(&self, a: i64) -> Fq {
        Fq {
            field: *self,
            a: (a.rem_euclid(self.p as i64)) as u64,
            b: 0,
        }
    }

    /// a + b·t; requires degree 2 when b ≠ 0.
    pub fn elem2(&self, a: i64, b: i64) -> Fq {
        let b = b.rem_euclid(self.p as i64) as u64;
        assert!(self.degree == 2 || b == 0, "t is not in F_p");
        Fq {
            field: *self,
            a: a.rem_euclid(self.p as i64) as u64,
            b,
        }
    }

    pub fn gen_t(&self) -> Fq {
        self.elem2(0, 1)
    }

    /// All elements, in the fixed total order.
    pub fn elements(&self) -> Vec<Fq> {
        let bs = if self.degree == 2 { self.p } else { 1 };
        let mut v = Vec::new();
        for a in 0..self.p {
            for b in 0..bs {
                v.push(Fq {
                    field: *self,
                    a,
                    b,
                });
            }
        }
        v
    }
}

fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&n| !is_square_mod(n, p)).unwrap_or(0)
}

/// a + b·t.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fq {
    field: FqField,
    a: u64,
    b: u64,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "t"),
            (0, b) => write!(f, "{b}t"),
            (a, 1) => write!(f, "{a}+t"),
            (a, b) => write!(f, "{a}+{b}t"),
        }
    }
}

impl PartialOrd for Fq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fq {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.a, self.b).cmp(&(other.a, other.b))
    }
}

impl Fq {
    pub fn field(&self) -> FqField {
        self.field
    }
    pub fn coords(&self) -> (u64, u64) {
        (self.a, self.b)
    }
    pub fn in_prime_field(&self) -> bool {
        self.b == 0
    }

    /// Value as an F_p residue, if it lies in F_p.
    pub fn as_prime(&self) -> Option<u64> {
        (self.b == 0).then_some(self.a)
    }

    /// Re-home into another presentation of the same prime (F_p ⊂ F_{p²}).
    pub fn embed(&self, field: FqField) -> Fq {
        assert_eq!(field.p, self.field.p);
        assert!(field.degree == 2 || self.b == 0, "cannot embed into F_p");
        Fq {
            field,
            a: self.a,
            b: self.b,
        }
    }

    pub fn pow(&self, mut e: u64) -> Fq {
        let mut base = *self;
        let mut acc = Fq::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            e >>= 1;
        }
        acc
    }

    pub fn pow_i(&self, e: i64) -> Result<Fq> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    /// x ↦ x^p.
    pub fn frobenius(&self) -> Fq {
        let p = self.field.p;
        Fq {
            field: self.field,
            a: self.a,
            b: (p - self.b) % p,
        }
    }

    pub fn norm(&self) -> u64 {
        let p = self.field.p as u128;
        let a = self.a as u128;
        let b = self.b as u128;
        let n = self.field.nonres as u128;
        ((a * a % p + p * p - b * b % p * n % p) % p) as u64
    }

    /// Minimal polynomial over F_p, monic, coefficients low degree first.
    pub fn min_poly(&self) -> Vec<u64> {
        let p = self.field.p;
        if self.b == 0 {
            vec![(p - self.a) % p, 1]
        } else {
            let tr = 2 * self.a % p;
            vec![self.norm(), (p - tr) % p, 1]
        }
    }

    /// Roots of x² + c1·x + c0 over F_{p²}, sorted.
    pub fn quadratic_roots(c1: Fq, c0: Fq) -> Vec<Fq> {
        let field = FqField::quadratic(c1.field.p);
        let c1 = c1.embed(field);
        let c0 = c0.embed(field);
        let mut roots: Vec<Fq> = field
            .elements()
            .into_iter()
            .filter(|x| x.times(x).plus(&c1.times(x)).plus(&c0).is_zero())
            .collect();
        roots.sort();
        roots
    }
}

impl Coeff for Fq {
    type Ctx = FqField;

    fn ctx(&self) -> &FqField {
        &self.field
    }

    fn zero(ctx: &FqField) -> Self {
        Fq {
            field: *ctx,
            a: 0,
            b: 0,
        }
    }

    fn one(ctx: &FqField) -> Self {
        Fq {
            field: *ctx,
            a: 1,
            b: 0,
        }
    }

    fn from_bigint(ctx: &FqField, n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(ctx.p)).to_u64().unwrap();
        Fq {
            field: *ctx,
            a: r,
            b: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    fn plus(&self, o: &Self) -> Self {
        debug_assert_eq!(self.field, o.field);
        let p = self.field.p;
        Fq {
            field: self.field,
            a: (self.a + o.a) % p,
            b: (self.b + o.b) % p,
        }
    }

    fn minus(&self, o: &Self) -> Self {
        debug_assert_eq!(self.field, o.field);
        let p = self.field.p;
        Fq {
            field: self.field,
            a: (self.a + p - o.a) % p,
            b: (self.b + p - o.b) % p,
        }
    }

    fn times(&self, o: &Self) -> Self {
        debug_assert_eq!(self.field, o.field);
        let p = self.field.p as u128;
        let (a, b, c, d) = (
            self.a as u128,
            self.b as u128,
            o.a as u128,
            o.b as u128,
        );
        let n = self.field.nonres as u128;
        Fq {
            field: self.field,
            a: ((a * c + b * d % p * n) % p) as u64,
            b: ((a * d + b * c) % p) as u64,
        }
    }

    fn negate(&self) -> Self {
        let p = self.field.p;
        Fq {
            field: self.field,
            a: (p - self.a) % p,
            b: (p - self.b) % p,
        }
    }

    fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotUnit("0 in a residue field".into()));
        }
        let p = self.field.p;
        let ninv = pow_mod(self.norm(), p - 2, p);
        let conj = self.frobenius();
        Ok(Fq {
            field: self.field,
            a: (conj.a as u128 * ninv as u128 % p as u128) as u64,
            b: (conj.b as u128 * ninv as u128 % p as u128) as u64,
        })
    }

    fn prime(ctx: &FqField) -> u64 {
        ctx.p
    }

    fn is_residue_field(_: &FqField) -> bool {
        true
    }

    fn p_digits(_: &FqField) -> u32 {
        1
    }

    fn div_p(&self) -> Option<Self> {
        self.is_zero().then_some(*self)
    }

    fn p_val(&self) -> Option<u32> {
        if self.is_zero() {
            None
        } else {
            Some(0)
        }
    }

    fn to_coord_string(&self) -> String {
        if self.field.degree == 1 {
            self.a.to_string()
        } else {
            format!("{},{}", self.a, self.b)
        }
    }

    fn from_coord_str(ctx: &FqField, s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("residue `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match parts.as_slice() {
            [a] => Ok(ctx.elem(*a)),
            [a, b] if ctx.degree == 2 || *b == 0 => Ok(ctx.elem2(*a, *b)),
            _ => Err(Error::Parse(format!("bad residue `{s}` for {ctx:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root_mod_three() {
        let f = FqField::prime_field(3);
        let roots = Fq::quadratic_roots(f.elem(-1), f.elem(1));
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].as_prime(), Some(2));
    }

    #[test]
    fn roots_leave_prime_field() {
        let f = FqField::prime_field(5);
        let roots = Fq::quadratic_roots(f.elem(-1), f.elem(1));
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| !r.in_prime_field()));
        assert_eq!(roots[0].times(&roots[1]), roots[0].field().elem(1));
        assert_eq!(roots[0].frobenius(), roots[1]);
    }

    #[test]
    fn frobenius_fixes_exactly_prime_field() {
        let f = FqField::quadratic(7);
        for x in f.elements() {
            assert_eq!(x.frobenius(), x.pow(7));
            assert_eq!(x.frobenius() == x, x.in_prime_field());
        }
    }

    #[test]
    fn inverses() {
        let f = FqField::quadratic(11);
        for x in f.elements().into_iter().filter(|x| !x.is_zero()) {
            assert_eq!(x.times(&x.inverse().unwrap()), Fq::one(&f));
        }
        assert!(Fq::zero(&f).inverse().is_err());
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(13), 2);
    }

    #[test]
    fn min_poly_of_t() {
        let f = FqField::quadratic(5);
        assert_eq!(f.nonresidue(), 2);
        assert_eq!(f.gen_t().min_poly(), vec![3, 0, 1]);
    }
}
