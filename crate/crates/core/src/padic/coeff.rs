//! The coefficient-ring abstraction shared by O_L and the residue fields.
//!
//! Elements carry their context (prime, precision, field presentation), so
//! constructors that cannot infer it take an explicit `Ctx`.

use std::fmt::Debug;

use num_bigint::BigInt;

use crate::error::Result;

pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + Sized {
    type Ctx: Clone + PartialEq + Debug + Send + Sync;

    fn ctx(&self) -> &Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_bigint(ctx: &Self::Ctx, n: &BigInt) -> Self;
    fn from_i64(ctx: &Self::Ctx, n: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(n))
    }

    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Result<Self>;

    /// Residue characteristic.
    fn prime(ctx: &Self::Ctx) -> u64;
    /// True for F_p / F_{p^2}; false for p-adic rings.
    fn is_residue_field(ctx: &Self::Ctx) -> bool;
    /// Number of p-adic digits carried (1 for residue fields).
    fn p_digits(ctx: &Self::Ctx) -> u32;

    /// Exact division by p, if the element is divisible by p at the
    /// carried precision. Residue fields only divide zero.
    fn div_p(&self) -> Option<Self>;
    /// Largest v with p^v dividing the element (capped by the precision);
    /// `None` for zero.
    fn p_val(&self) -> Option<u32>;

    /// Σ a_i b_i with a single final reduction where the representation allows.
    fn sum_of_products<'a, I>(ctx: &Self::Ctx, pairs: I) -> Self
    where
        I: Iterator<Item = (&'a Self, &'a Self)>,
        Self: 'a,
    {
        let mut acc = Self::zero(ctx);
        for (a, b) in pairs {
            acc = acc.plus(&a.times(b));
        }
        acc
    }

    /// Comma-separated base-10 coordinates.
    fn to_coord_string(&self) -> String;
    fn from_coord_str(ctx: &Self::Ctx, s: &str) -> Result<Self>;
}
