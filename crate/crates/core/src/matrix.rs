//! 2x2 integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `(a b; c d)` with integer entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Mat2 {
        Mat2::from_i64(1, 0, 0, 1)
    }

    /// `z -> -1/z`.
    pub fn s() -> Mat2 {
        Mat2::from_i64(0, -1, 1, 0)
    }

    /// `z -> z + k`.
    pub fn translation(k: &BigInt) -> Mat2 {
        Mat2::new(BigInt::one(), k.clone(), BigInt::zero(), BigInt::one())
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    /// Inverse of a matrix of determinant `+1` or `-1`.
    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if !(det.is_one() || (-&det).is_one()) {
            return Err(Error::NotUnimodular);
        }
        Ok(Mat2 { a: &self.d * &det, b: -&self.b * &det, c: -&self.c * &det, d: &self.a * &det })
    }

    pub fn pow(&self, k: u64) -> Mat2 {
        let mut acc = Mat2::identity();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity()
    }

    /// Entries reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: u64) -> [u64; 4] {
        let mb = BigInt::from(m);
        let r = |x: &BigInt| x.mod_floor(&mb).to_u64().expect("fits");
        [r(&self.a), r(&self.b), r(&self.c), r(&self.d)]
    }

    /// Entries as `i64` when they fit.
    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?, self.d.to_i64()?])
    }

    pub fn is_positive_hyperbolic(&self) -> bool {
        self.trace().abs() > BigInt::from(2)
    }
}

/// Product of matrices given mod `m` as `[a, b, c, d]`.
pub fn mul_mod(x: &[u64; 4], y: &[u64; 4], m: u64) -> [u64; 4] {
    let m = m as u128;
    let f = |p: u64, q: u64, r: u64, s: u64| ((p as u128 * q as u128 + r as u128 * s as u128) % m) as u64;
    [f(x[0], y[0], x[1], y[2]), f(x[0], y[1], x[1], y[3]), f(x[2], y[0], x[3], y[2]), f(x[2], y[1], x[3], y[3])]
}

/// Whether a matrix mod `m` equals `+I` or `-I`.
pub fn is_pm_identity_mod(x: &[u64; 4], m: u64) -> bool {
    if m == 1 {
        return true;
    }
    let one = 1 % m;
    let minus = (m - 1) % m;
    x[1] == 0 && x[2] == 0 && ((x[0] == one && x[3] == one) || (x[0] == minus && x[3] == minus))
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}
