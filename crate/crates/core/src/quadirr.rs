//! Real quadratic irrationals `(P + sqrt D)/Q` in a canonical normalization.
//!
//! The normalization ties each irrational to the primitive form it is the
//! first root of: `alpha_Q = (-B + sqrt D)/(2A)` with `P = -B`, `Q = 2A`
//! and `D = B^2 - 4AC`. Two irrationals are equal iff their triples are.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::qforms::Form;
use crate::quadfield::{floor_surd, is_square, Surd};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadIrr {
    p: BigInt,
    q: BigInt,
    d: BigInt,
}

/// Purely periodic tail and preperiod of a continued fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn is_palindromic_period(&self) -> bool {
        palindrome_up_to_rotation(&self.period)
    }
}

/// Whether some rotation of `v` reads the same backwards, i.e. the cyclic
/// word equals its reversal.
pub fn palindrome_up_to_rotation(v: &[BigInt]) -> bool {
    let n = v.len();
    if n == 0 {
        return true;
    }
    let rev: Vec<&BigInt> = v.iter().rev().collect();
    (0..n).any(|k| (0..n).all(|i| v[(i + k) % n] == *rev[i]))
}

/// Height `h = num / sqrt(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Height {
    pub num: BigInt,
    pub d: BigInt,
}

impl Height {
    /// `h <= s` for a rational `s`.
    pub fn le(&self, s: &BigRational) -> bool {
        if !s.is_positive() {
            return false;
        }
        // num^2 den^2 <= numer^2 d
        let lhs = &self.num * &self.num * s.denom() * s.denom();
        let rhs = s.numer() * s.numer() * &self.d;
        lhs <= rhs
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// `h^2` as an exact rational.
    pub fn squared(&self) -> BigRational {
        BigRational::new(&self.num * &self.num, self.d.clone())
    }
}

impl QuadIrr {
    /// `(p + sqrt d)/q` for any integers with `q != 0` and `d > 0` not a square.
    pub fn new(p: BigInt, q: BigInt, d: BigInt) -> Result<QuadIrr> {
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !d.is_positive() || is_square(&d) {
            return Err(Error::BadDiscriminant(d.to_string(), "must be a positive non-square"));
        }
        // q alpha^2 - 2 p alpha + (p^2 - d)/q = 0, scaled by |q|
        let qa = q.abs();
        let c = if q.is_negative() { &d - &p * &p } else { &p * &p - &d };
        let (a, b) = (&q * &qa, BigInt::from(-2) * &p * &qa);
        Ok(QuadIrr::from_form_unchecked(&Form::new(a, b, c).primitive_part().1))
    }

    pub fn from_i64(p: i64, q: i64, d: i64) -> Result<QuadIrr> {
        QuadIrr::new(p.into(), q.into(), d.into())
    }

    fn from_form_unchecked(f: &Form) -> QuadIrr {
        QuadIrr { p: -&f.b, q: BigInt::from(2) * &f.a, d: f.discriminant() }
    }

    /// `alpha_Q = (-B + sqrt D)/(2A)` for an indefinite irreducible form.
    pub fn alpha_of(f: &Form) -> Result<QuadIrr> {
        f.require_indefinite()?;
        Ok(QuadIrr::from_form_unchecked(&f.primitive_part().1))
    }

    /// The primitive form whose first root this is.
    pub fn form(&self) -> Form {
        let a = &self.q / 2;
        let b = -&self.p;
        let c = (&b * &b - &self.d) / (BigInt::from(4) * &a);
        Form::new(a, b, c)
    }

    /// An element `x + y sqrt D` of a real quadratic field with `y != 0`.
    pub fn from_surd(x: &Surd) -> Result<QuadIrr> {
        if x.is_rational() {
            return Err(Error::Hypothesis("rational number is not a quadratic irrational".into()));
        }
        let (a, b, l) = x.integral_parts();
        // (a + b sqrt d)/l = (a + sgn(b) sqrt(b^2 d))/l
        let d2 = &b * &b * x.d();
        if b.is_positive() {
            QuadIrr::new(a, l, d2)
        } else {
            QuadIrr::new(-a, -l, d2)
        }
    }

    pub fn to_surd(&self) -> Surd {
        let q = BigRational::from_integer(self.q.clone());
        Surd::new(self.d.clone(), BigRational::from_integer(self.p.clone()) / &q, BigRational::one() / q)
            .expect("non-square")
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn conj(&self) -> QuadIrr {
        QuadIrr::from_form_unchecked(&self.form().neg())
    }

    /// `h(alpha) = 2 / |alpha - alpha^sigma| = |Q| / sqrt D`.
    pub fn height(&self) -> Height {
        Height { num: self.q.abs(), d: self.d.clone() }
    }

    pub fn floor(&self) -> BigInt {
        if self.q.is_positive() {
            floor_surd(&self.p, &BigInt::one(), &self.d, &self.q)
        } else {
            floor_surd(&-&self.p, &-BigInt::one(), &self.d, &-&self.q)
        }
    }

    pub fn add_int(&self, k: &BigInt) -> QuadIrr {
        QuadIrr { p: &self.p + k * &self.q, q: self.q.clone(), d: self.d.clone() }
    }

    pub fn neg(&self) -> QuadIrr {
        QuadIrr::new(self.p.clone(), -&self.q, self.d.clone()).expect("valid")
    }

    /// Representative of `alpha + m Z` in `[0, m)`.
    pub fn canonical_mod_translation(&self, m: u64) -> QuadIrr {
        let mb = BigInt::from(m.max(1));
        let scaled = QuadIrr { p: self.p.clone(), q: &self.q * &mb, d: self.d.clone() };
        let k = scaled.floor();
        self.add_int(&(-k * mb))
    }

    /// `(a alpha + b)/(c alpha + d)`.
    pub fn mobius(&self, g: &Mat2) -> Result<QuadIrr> {
        let x = self.to_surd();
        let num = x.scale(&BigRational::from_integer(g.a.clone())).add_rational(&BigRational::from_integer(g.b.clone()));
        let den = x.scale(&BigRational::from_integer(g.c.clone())).add_rational(&BigRational::from_integer(g.d.clone()));
        QuadIrr::from_surd(&num.try_div(&den)?)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_surd().to_f64()
    }

    /// Continued fraction expansion; the period is detected by a repeated
    /// state `(P, Q)` of the complete quotients.
    pub fn cf_expand(&self) -> ContinuedFraction {
        let mut p = self.p.clone();
        let mut q = self.q.clone();
        let d = &self.d;
        let mut seen: Vec<(BigInt, BigInt)> = Vec::new();
        let mut quotients = Vec::new();
        loop {
            if let Some(i) = seen.iter().position(|s| s.0 == p && s.1 == q) {
                let period = quotients.split_off(i);
                return ContinuedFraction { preperiod: quotients, period };
            }
            seen.push((p.clone(), q.clone()));
            let a = QuadIrr { p: p.clone(), q: q.clone(), d: d.clone() }.floor();
            let np = &a * &q - &p;
            let nq = (d - &np * &np) / &q;
            quotients.push(a);
            p = np;
            q = nq;
        }
    }
}

/// Whether the irrational and its conjugate lie in one `PGL(2, Z)`-orbit,
/// read off the period of its continued fraction.
pub fn is_reciprocal_irr(alpha: &QuadIrr) -> bool {
    alpha.cf_expand().is_palindromic_period()
}

impl fmt::Display for QuadIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+sqrt({}))/{}", self.p, self.d, self.q)
    }
}

impl FromStr for QuadIrr {
    type Err = Error;

    /// Parses `(P+sqrt(D))/Q`; also accepts `(P-sqrt(D))/Q` and `sqrt(D)`.
    fn from_str(s: &str) -> Result<QuadIrr> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("expected (P+sqrt(D))/Q, got {s:?}"));
        let int = |t: &str| t.parse::<BigInt>().map_err(|_| bad());
        let (body, q) = match compact.rsplit_once('/') {
            Some((b, q)) if b.starts_with('(') && b.ends_with(')') => (&b[1..b.len() - 1], int(q)?),
            Some(_) => return Err(bad()),
            None => (compact.as_str(), BigInt::one()),
        };
        let at = body.find("sqrt(").ok_or_else(bad)?;
        if !body.ends_with(')') {
            return Err(bad());
        }
        let d = int(&body[at + 5..body.len() - 1])?;
        let head = &body[..at];
        let (p, sign) = if head.is_empty() || head == "+" {
            (BigInt::zero(), 1)
        } else if head == "-" {
            (BigInt::zero(), -1)
        } else if let Some(h) = head.strip_suffix('+') {
            (int(h)?, 1)
        } else if let Some(h) = head.strip_suffix('-') {
            (int(h)?, -1)
        } else {
            return Err(bad());
        };
        if sign == 1 {
            QuadIrr::new(p, q, d)
        } else {
            QuadIrr::new(-p, -q, d)
        }
    }
}
