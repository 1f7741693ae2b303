//! Exact arithmetic in the quadratic field `Q(sqrt D)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Sign of `a + b sqrt(d)` for integers, `d > 0` not a square.
pub fn sign_surd(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    use num_bigint::Sign::*;
    match (sa, sb) {
        (NoSign, NoSign) => Ordering::Equal,
        (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
        (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
        (Plus, Minus) => (a * a).cmp(&(b * b * d)),
        (Minus, Plus) => (b * b * d).cmp(&(a * a)),
    }
}

/// Floor of `(a + b sqrt(d)) / l` for integers with `l > 0`, `d > 0` not a square.
pub fn floor_surd(a: &BigInt, b: &BigInt, d: &BigInt, l: &BigInt) -> BigInt {
    debug_assert!(l.is_positive());
    if b.is_zero() {
        return a.div_floor(l);
    }
    let r = isqrt(&(b * b * d));
    if b.is_positive() {
        (a + r).div_floor(l)
    } else {
        (a - r - BigInt::one()).div_floor(l)
    }
}

/// Arithmetic operation selector for [`Surd::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element `p + q sqrt(D)` of `Q(sqrt D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    d: BigInt,
    p: BigRational,
    q: BigRational,
}

fn check_disc(d: &BigInt) -> Result<()> {
    if d.is_zero() || is_square(d) {
        return Err(Error::BadDiscriminant(d.to_string(), "must be a non-square"));
    }
    Ok(())
}

impl Surd {
    pub fn new(d: BigInt, p: BigRational, q: BigRational) -> Result<Surd> {
        check_disc(&d)?;
        Ok(Surd { d, p, q })
    }

    pub fn from_ints(d: i64, p: i64, q: i64) -> Result<Surd> {
        Surd::new(d.into(), BigRational::from_integer(p.into()), BigRational::from_integer(q.into()))
    }

    pub fn rational(d: BigInt, r: BigRational) -> Result<Surd> {
        Surd::new(d, r, BigRational::zero())
    }

    pub fn sqrt_d(d: BigInt) -> Result<Surd> {
        Surd::new(d, BigRational::zero(), BigRational::one())
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    fn same_field(&self, other: &Surd) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DiscriminantMismatch(self.d.to_string(), other.d.to_string()));
        }
        Ok(())
    }

    fn with(&self, p: BigRational, q: BigRational) -> Surd {
        Surd { d: self.d.clone(), p, q }
    }

    pub fn arith(&self, other: &Surd, op: Op) -> Result<Surd> {
        self.same_field(other)?;
        let d = BigRational::from_integer(self.d.clone());
        Ok(match op {
            Op::Add => self.with(&self.p + &other.p, &self.q + &other.q),
            Op::Sub => self.with(&self.p - &other.p, &self.q - &other.q),
            Op::Mul => self.with(
                &self.p * &other.p + &self.q * &other.q * &d,
                &self.p * &other.q + &self.q * &other.p,
            ),
            Op::Div => {
                let n = other.norm();
                if n.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let c = other.conj();
                let num = self.arith(&c, Op::Mul)?;
                self.with(num.p / &n, num.q / &n)
            }
        })
    }

    pub fn try_add(&self, other: &Surd) -> Result<Surd> {
        self.arith(other, Op::Add)
    }

    pub fn try_sub(&self, other: &Surd) -> Result<Surd> {
        self.arith(other, Op::Sub)
    }

    pub fn try_mul(&self, other: &Surd) -> Result<Surd> {
        self.arith(other, Op::Mul)
    }

    pub fn try_div(&self, other: &Surd) -> Result<Surd> {
        self.arith(other, Op::Div)
    }

    pub fn add_rational(&self, r: &BigRational) -> Surd {
        self.with(&self.p + r, self.q.clone())
    }

    pub fn scale(&self, r: &BigRational) -> Surd {
        self.with(&self.p * r, &self.q * r)
    }

    pub fn neg(&self) -> Surd {
        self.with(-&self.p, -&self.q)
    }

    pub fn conj(&self) -> Surd {
        self.with(self.p.clone(), -&self.q)
    }

    pub fn norm(&self) -> BigRational {
        &self.p * &self.p - &self.q * &self.q * BigRational::from_integer(self.d.clone())
    }

    pub fn trace(&self) -> BigRational {
        &self.p * BigRational::from_integer(2.into())
    }

    /// Integers `(a, b, l)` with `l > 0` and `self = (a + b sqrt D) / l`.
    pub fn integral_parts(&self) -> (BigInt, BigInt, BigInt) {
        let l = self.p.denom().lcm(self.q.denom());
        let a = self.p.numer() * (&l / self.p.denom());
        let b = self.q.numer() * (&l / self.q.denom());
        (a, b, l)
    }

    /// Sign of a real element.
    pub fn signum(&self) -> Result<Ordering> {
        if self.d.is_negative() {
            return Err(Error::NotReal);
        }
        let (a, b, _) = self.integral_parts();
        Ok(sign_surd(&a, &b, &self.d))
    }

    pub fn cmp_real(&self, other: &Surd) -> Result<Ordering> {
        self.try_sub(other)?.signum()
    }

    pub fn floor(&self) -> Result<BigInt> {
        if self.d.is_negative() {
            return Err(Error::NotReal);
        }
        let (a, b, l) = self.integral_parts();
        Ok(floor_surd(&a, &b, &self.d, &l))
    }

    /// Ball enclosure with `|error| < 2^-bits * max(1, |x|)`.
    pub fn to_real(&self, bits: u32) -> Result<Real> {
        if self.d.is_negative() {
            return Err(Error::NotReal);
        }
        let mut w = bits + 16 + self.q.numer().bits() as u32 + self.q.denom().bits() as u32;
        loop {
            let root = Real::sqrt_int(&self.d, w);
            let x = Real::from_ratio(&self.p, w).add(&root.mul(&Real::from_ratio(&self.q, w)));
            let mag = x.upper().abs().max(x.lower().abs()).max(BigRational::one());
            let tol = mag / BigRational::from_integer(BigInt::one() << bits);
            if x.radius() < tol {
                return Ok(x);
            }
            w += 32;
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.to_real(60) {
            Ok(r) => r.to_f64(),
            Err(_) => f64::NAN,
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", self.p);
        }
        if self.p.is_zero() {
            return write!(f, "{}*sqrt({})", self.q, self.d);
        }
        let (sign, q) = if self.q.is_negative() { ("-", -&self.q) } else { ("+", self.q.clone()) };
        write!(f, "{} {} {}*sqrt({})", self.p, sign, q, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn golden_ratio_identities() {
        let phi = Surd::new(5.into(), rat(1, 2), rat(1, 2)).unwrap();
        let sq = phi.try_mul(&phi).unwrap();
        assert_eq!(sq, phi.add_rational(&rat(1, 1)));
        assert_eq!(phi.norm(), rat(-1, 1));
        assert_eq!(phi.floor().unwrap(), BigInt::from(1));
        let inv = Surd::from_ints(5, 1, 0).unwrap().try_div(&phi).unwrap();
        assert_eq!(inv, phi.add_rational(&rat(-1, 1)));
    }

    #[test]
    fn errors() {
        assert!(Surd::from_ints(4, 1, 1).is_err());
        let a = Surd::from_ints(5, 1, 1).unwrap();
        let b = Surd::from_ints(8, 1, 1).unwrap();
        assert!(matches!(a.try_add(&b), Err(Error::DiscriminantMismatch(..))));
        let z = Surd::from_ints(5, 0, 0).unwrap();
        assert_eq!(a.try_div(&z), Err(Error::DivisionByZero));
        assert_eq!(Surd::from_ints(-3, 1, 1).unwrap().signum(), Err(Error::NotReal));
    }

    #[test]
    fn to_real_sqrt2() {
        let r = Surd::from_ints(2, 0, 1).unwrap().to_real(100).unwrap();
        assert!(r.to_decimal(30).starts_with("1.414213562373095048801688724209"));
    }

    fn arb_surd(d: i64) -> impl Strategy<Value = Surd> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(move |(a, b, c, e)| Surd::new(d.into(), rat(a, b), rat(c, e)).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_surd(13), y in arb_surd(13), z in arb_surd(13)) {
            let xy = x.try_mul(&y).unwrap();
            prop_assert_eq!(&xy, &y.try_mul(&x).unwrap());
            let lhs = x.try_mul(&y.try_add(&z).unwrap()).unwrap();
            let rhs = xy.try_add(&x.try_mul(&z).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(xy.norm(), x.norm() * y.norm());
            prop_assert_eq!(x.try_add(&y).unwrap().conj(), x.conj().try_add(&y.conj()).unwrap());
            if !y.is_zero() {
                prop_assert_eq!(xy.try_div(&y).unwrap(), x.clone());
            }
        }

        #[test]
        fn sign_and_floor_agree_with_floats(x in arb_surd(7)) {
            let v = x.to_f64();
            let fl = x.floor().unwrap();
            if (v - v.round()).abs() > 1e-9 {
                prop_assert_eq!(fl, BigInt::from(v.floor() as i64));
            }
            if v.abs() > 1e-9 {
                prop_assert_eq!(x.signum().unwrap(), v.partial_cmp(&0.0).unwrap());
            }
        }
    }
}
