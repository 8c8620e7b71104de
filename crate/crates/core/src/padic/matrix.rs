//! 2×2 matrices over a truncated series ring.

use super::coeff::Coeff;
use super::series::Series;
use crate::error::Result;

/// Row-major [[a, b], [c, d]].
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<C: Coeff> {
    pub e: [Series<C>; 4],
}

impl<C: Coeff> Mat2<C> {
    pub fn new(a: Series<C>, b: Series<C>, c: Series<C>, d: Series<C>) -> Self {
        Mat2 { e: [a, b, c, d] }
    }

    pub fn identity(ctx: &C::Ctx) -> Self {
        let one = Series::one(ctx);
        let zero = Series::zero(ctx, super::series::EXACT);
        Mat2::new(one.clone(), zero.clone(), zero, one)
    }

    pub fn scalar(c: C) -> Self {
        let ctx = c.ctx().clone();
        let s = Series::constant(c);
        let zero = Series::zero(&ctx, super::series::EXACT);
        Mat2::new(s.clone(), zero.clone(), zero, s)
    }

    pub fn diag(a: Series<C>, d: Series<C>) -> Self {
        let ctx = a.ctx().clone();
        let zero = Series::zero(&ctx, super::series::EXACT);
        Mat2::new(a, zero.clone(), zero, d)
    }

    pub fn ctx(&self) -> &C::Ctx {
        self.e[0].ctx()
    }

    pub fn get(&self, i: usize, j: usize) -> &Series<C> {
        &self.e[2 * i + j]
    }

    pub fn map(&self, f: impl Fn(&Series<C>) -> Series<C>) -> Self {
        Mat2 {
            e: [f(&self.e[0]), f(&self.e[1]), f(&self.e[2]), f(&self.e[3])],
        }
    }

    pub fn try_map(&self, f: impl Fn(&Series<C>) -> Result<Series<C>>) -> Result<Self> {
        Ok(Mat2 {
            e: [f(&self.e[0])?, f(&self.e[1])?, f(&self.e[2])?, f(&self.e[3])?],
        })
    }

    pub fn try_map_to<D: Coeff>(
        &self,
        f: impl Fn(&Series<C>) -> Result<Series<D>>,
    ) -> Result<Mat2<D>> {
        Ok(Mat2 {
            e: [f(&self.e[0])?, f(&self.e[1])?, f(&self.e[2])?, f(&self.e[3])?],
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat2 {
            e: [
                self.e[0].add(&o.e[0]),
                self.e[1].add(&o.e[1]),
                self.e[2].add(&o.e[2]),
                self.e[3].add(&o.e[3]),
            ],
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat2 {
            e: [
                self.e[0].sub(&o.e[0]),
                self.e[1].sub(&o.e[1]),
                self.e[2].sub(&o.e[2]),
                self.e[3].sub(&o.e[3]),
            ],
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_to(o, super::series::EXACT)
    }

    pub fn mul_to(&self, o: &Self, cap: i64) -> Self {
        let m = |a: &Series<C>, b: &Series<C>, c: &Series<C>, d: &Series<C>| {
            a.mul_to(b, cap).add(&c.mul_to(d, cap))
        };
        Mat2 {
            e: [
                m(&self.e[0], &o.e[0], &self.e[1], &o.e[2]),
                m(&self.e[0], &o.e[1], &self.e[1], &o.e[3]),
                m(&self.e[2], &o.e[0], &self.e[3], &o.e[2]),
                m(&self.e[2], &o.e[1], &self.e[3], &o.e[3]),
            ],
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn det(&self) -> Series<C> {
        self.e[0].mul(&self.e[3]).sub(&self.e[1].mul(&self.e[2]))
    }

    /// Adjugate [[d, −b], [−c, a]].
    pub fn adj(&self) -> Self {
        Mat2::new(
            self.e[3].clone(),
            self.e[1].neg(),
            self.e[2].neg(),
            self.e[0].clone(),
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det().inverse()?;
        Ok(self.adj().map(|s| s.mul(&d)))
    }

    pub fn truncate(&self, prec: i64) -> Self {
        self.map(|s| s.truncate(prec))
    }

    pub fn prec(&self) -> i64 {
        self.e.iter().map(|s| s.prec()).min().unwrap()
    }

    /// Matrix of constant terms.
    pub fn at_zero(&self) -> [C; 4] {
        [
            self.e[0].eval0(),
            self.e[1].eval0(),
            self.e[2].eval0(),
            self.e[3].eval0(),
        ]
    }

    /// Smallest exponent at which the two matrices differ, or their common
    /// precision.
    pub fn agreement(&self, o: &Self) -> i64 {
        (0..4).map(|i| self.e[i].agreement(&o.e[i])).min().unwrap()
    }

    pub fn same_value(&self, o: &Self) -> bool {
        (0..4).all(|i| self.e[i].same_value(&o.e[i]))
    }

    /// Coefficient matrix of X^n.
    pub fn coeff_at(&self, n: i64) -> [C; 4] {
        [
            self.e[0].coeff(n),
            self.e[1].coeff(n),
            self.e[2].coeff(n),
            self.e[3].coeff(n),
        ]
    }

    /// Constant matrix with exact entries.
    pub fn from_const(m: &[C; 4]) -> Self {
        Mat2::new(
            Series::constant(m[0].clone()),
            Series::constant(m[1].clone()),
            Series::constant(m[2].clone()),
            Series::constant(m[3].clone()),
        )
    }

    /// Matrix times column vector, below X^cap.
    pub fn mul_vec(&self, v: &[Series<C>; 2], cap: i64) -> [Series<C>; 2] {
        [
            self.e[0].mul_to(&v[0], cap).add(&self.e[1].mul_to(&v[1], cap)),
            self.e[2].mul_to(&v[0], cap).add(&self.e[3].mul_to(&v[1], cap)),
        ]
    }
}

/// Product of constant row-major 2×2 matrices.
pub fn const_mul<C: Coeff>(a: &[C; 4], b: &[C; 4]) -> [C; 4] {
    [
        a[0].times(&b[0]).plus(&a[1].times(&b[2])),
        a[0].times(&b[1]).plus(&a[1].times(&b[3])),
        a[2].times(&b[0]).plus(&a[3].times(&b[2])),
        a[2].times(&b[1]).plus(&a[3].times(&b[3])),
    ]
}

pub fn const_det<C: Coeff>(a: &[C; 4]) -> C {
    a[0].times(&a[3]).minus(&a[1].times(&a[2]))
}

pub fn const_inverse<C: Coeff>(a: &[C; 4]) -> Result<[C; 4]> {
    let d = const_det(a).inverse()?;
    Ok([
        a[3].times(&d),
        a[1].negate().times(&d),
        a[2].negate().times(&d),
        a[0].times(&d),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::fq::FqField;
    use crate::ResSeries;

    #[test]
    fn inverse_roundtrip() {
        let f = FqField::prime_field(5);
        let s = |c: &[i64]| ResSeries::from_i64s(&f, 0, c, 10);
        let m = Mat2::new(s(&[1, 1]), s(&[0, 2]), s(&[3]), s(&[1, 0, 4]));
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).same_value(&Mat2::identity(&f)));
    }
}
