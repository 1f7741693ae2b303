//! Fixed-point ball arithmetic over `BigInt`.
//!
//! A [`Real`] is a pair `(mid, rad)` at precision `p`, standing for every
//! number in `[(mid - rad) / 2^p, (mid + rad) / 2^p]`. Every operation
//! returns a ball that contains the exact result of applying the operation
//! to any members of its inputs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Guard bits used internally by the transcendental routines.
const GUARD: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

fn ceil_shr(x: &BigInt, s: u32) -> BigInt {
    // x >= 0
    let q: BigInt = x >> s;
    if (&q << s) == *x {
        q
    } else {
        q + 1
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Sum of `z^(2j+1)/(2j+1)` for `z = n/d`, with alternating signs if asked.
/// Requires `0 <= n/d <= 1/3`. Returns `(mid, rad)` at precision `w`.
fn odd_series(n: &BigInt, d: &BigInt, alternating: bool, w: u32) -> (BigInt, BigInt) {
    let n2 = n * n;
    let d2 = d * d;
    let mut p = floor_div(&(n << w), d);
    let mut sum = BigInt::zero();
    let mut count = 0u64;
    let mut j = 0u64;
    while !p.is_zero() {
        let term = &p / BigInt::from(2 * j + 1);
        if alternating && j % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        count += 1;
        p = floor_div(&(&p * &n2), &d2);
        j += 1;
    }
    (sum, BigInt::from(3 * count + 3))
}

impl Real {
    pub fn from_int(n: &BigInt, prec: u32) -> Real {
        Real { mid: n << prec, rad: BigInt::zero(), prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Real {
        Real::from_int(&BigInt::from(n), prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Real {
        let num = r.numer() << prec;
        let (q, rem) = num.div_mod_floor(r.denom());
        let rad = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        Real { mid: q, rad, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Change precision; lowering it widens the radius accordingly.
    pub fn with_prec(&self, prec: u32) -> Real {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                Real { mid: &self.mid << s, rad: &self.rad << s, prec }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                let mid = self.mid.clone() >> s;
                let rad = ceil_shr(&self.rad, s) + 1;
                Real { mid, rad, prec }
            }
        }
    }

    fn check(&self, other: &Real) {
        assert_eq!(self.prec, other.prec, "precision mismatch");
    }

    pub fn add(&self, other: &Real) -> Real {
        self.check(other);
        Real { mid: &self.mid + &other.mid, rad: &self.rad + &other.rad, prec: self.prec }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.check(other);
        Real { mid: &self.mid - &other.mid, rad: &self.rad + &other.rad, prec: self.prec }
    }

    pub fn neg(&self) -> Real {
        Real { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, other: &Real) -> Real {
        self.check(other);
        let p = self.prec;
        let m = &self.mid * &other.mid;
        let r = self.mid.abs() * &other.rad + other.mid.abs() * &self.rad + &self.rad * &other.rad;
        let exact = r.is_zero() && (&m >> p << p) == m;
        let mid = m >> p;
        let rad = if exact { BigInt::zero() } else { ceil_shr(&r, p) + 1 };
        Real { mid, rad, prec: p }
    }

    pub fn mul_int(&self, k: &BigInt) -> Real {
        Real { mid: &self.mid * k, rad: &self.rad * k.abs(), prec: self.prec }
    }

    pub fn div_int(&self, k: &BigInt) -> Real {
        assert!(!k.is_zero());
        let ka = k.abs();
        let mid = floor_div(&self.mid, k);
        let rad = ceil_div(&self.rad, &ka) + 1;
        Real { mid, rad, prec: self.prec }
    }

    /// Quotient; `None` if the divisor ball contains zero.
    pub fn div(&self, other: &Real) -> Option<Real> {
        self.check(other);
        let p = self.prec;
        let m2a = other.mid.abs();
        if m2a <= other.rad {
            return None;
        }
        let mid = floor_div(&(&self.mid << p), &other.mid);
        let num = (&m2a * &self.rad + self.mid.abs() * &other.rad) << p;
        let den = &m2a * (&m2a - &other.rad);
        let rad = ceil_div(&num, &den) + 1;
        Some(Real { mid, rad, prec: p })
    }

    /// Square root of a non-negative integer.
    pub fn sqrt_int(n: &BigInt, prec: u32) -> Real {
        assert!(!n.is_negative());
        let scaled = n << (2 * prec);
        let lo = scaled.sqrt();
        let exact = &lo * &lo == scaled;
        let rad = if exact { BigInt::zero() } else { BigInt::one() };
        Real { mid: lo, rad, prec }
    }

    /// Square root; `None` unless the ball is contained in `[0, inf)`.
    pub fn sqrt(&self) -> Option<Real> {
        let lo = &self.mid - &self.rad;
        if lo.is_negative() {
            return None;
        }
        let hi = &self.mid + &self.rad;
        let l = (lo << self.prec).sqrt();
        let h = (hi << self.prec).sqrt() + 1;
        let mid: BigInt = (&l + &h) >> 1;
        let rad = &h - &mid;
        Some(Real { mid, rad, prec: self.prec })
    }

    pub fn ln2(prec: u32) -> Real {
        let w = prec + GUARD;
        let (m, r) = odd_series(&BigInt::one(), &BigInt::from(3), false, w);
        Real { mid: m << 1, rad: r << 1, prec: w }.with_prec(prec)
    }

    pub fn pi(prec: u32) -> Real {
        let w = prec + GUARD;
        let (a, ra) = odd_series(&BigInt::one(), &BigInt::from(5), true, w);
        let (b, rb) = odd_series(&BigInt::one(), &BigInt::from(239), true, w);
        let mid = a * 16 - b * 4;
        let rad = ra * 16 + rb * 4;
        Real { mid, rad, prec: w }.with_prec(prec)
    }

    /// Natural logarithm of the exact fixed-point value `x / 2^w`, `x > 0`.
    fn ln_point(x: &BigInt, w: u32) -> Real {
        let b = x.bits();
        let half = BigInt::one() << (b - 1);
        let n = x - &half;
        let d = x + &half;
        let (m, r) = odd_series(&n, &d, false, w);
        let core = Real { mid: m << 1, rad: r << 1, prec: w };
        let k = b as i64 - 1 - w as i64;
        let l2 = Real::ln2(w);
        core.add(&l2.mul_int(&BigInt::from(k)))
    }

    /// Natural logarithm; `None` unless the ball is strictly positive.
    pub fn ln(&self) -> Option<Real> {
        let lo = &self.mid - &self.rad;
        if !lo.is_positive() {
            return None;
        }
        let hi = &self.mid + &self.rad;
        let w = self.prec + GUARD;
        let a = Real::ln_point(&(lo << GUARD), w);
        let b = Real::ln_point(&(hi << GUARD), w);
        let low = &a.mid - &a.rad;
        let high = &b.mid + &b.rad;
        let mid: BigInt = (&low + &high) >> 1;
        let rad = &high - &mid;
        Some(Real { mid, rad, prec: w }.with_prec(self.prec))
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(&self.mid - &self.rad, BigInt::one() << self.prec)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(&self.mid + &self.rad, BigInt::one() << self.prec)
    }

    /// Radius as an upper bound in absolute terms.
    pub fn radius(&self) -> BigRational {
        BigRational::new(self.rad.clone(), BigInt::one() << self.prec)
    }

    /// True when the radius is at most `2^-bits`.
    pub fn accurate_to(&self, bits: u32) -> bool {
        if bits >= self.prec {
            return self.rad.is_zero();
        }
        self.rad <= BigInt::one() << (self.prec - bits)
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        &self.lower() <= r && r <= &self.upper()
    }

    /// Certain comparison; `None` when the balls overlap.
    pub fn cmp_certain(&self, other: &Real) -> Option<Ordering> {
        if self.upper() < other.lower() {
            Some(Ordering::Less)
        } else if self.lower() > other.upper() {
            Some(Ordering::Greater)
        } else if self.rad.is_zero() && other.rad.is_zero() && self.lower() == other.lower() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Nearest `f64` to the midpoint.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mid.bits();
        let shift = bits.saturating_sub(60).min(self.prec as u64) as u32;
        let m = (&self.mid >> shift).to_f64().unwrap_or(f64::NAN);
        let e = shift as i32 - self.prec as i32;
        m * 2f64.powi(e)
    }

    /// Decimal rendering of the midpoint truncated to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let v = floor_div(&(&self.mid * scale), &(BigInt::one() << self.prec));
        let neg = v.sign() == Sign::Minus;
        let s = v.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.prec as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_decimal(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_and_ln2_digits() {
        let pi = Real::pi(200);
        assert!(pi.accurate_to(190));
        assert!(pi.to_decimal(40).starts_with("3.1415926535897932384626433832795028841971"));
        let l2 = Real::ln2(200);
        assert!(l2.to_decimal(40).starts_with("0.6931471805599453094172321214581765680755"));
    }

    #[test]
    fn ln_contains_known_values() {
        // ln 10 = 2.302585092994045684017991454684364207601...
        let ten = Real::from_i64(10, 128);
        let l = ten.ln().unwrap();
        assert!(l.accurate_to(120));
        assert!(l.to_decimal(36).starts_with("2.302585092994045684017991454684364207"));
        let small = Real::from_ratio(&BigRational::new(1.into(), 7.into()), 128).ln().unwrap();
        assert!((small.to_f64() - (1.0f64 / 7.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn sqrt_and_div() {
        let two = Real::sqrt_int(&BigInt::from(2), 100);
        let sq = two.mul(&two);
        assert!(sq.contains(&BigRational::from_integer(2.into())));
        let q = Real::from_i64(1, 100).div(&Real::from_i64(3, 100)).unwrap();
        assert!(q.contains(&BigRational::new(1.into(), 3.into())));
        let s = Real::from_i64(9, 64).sqrt().unwrap();
        assert!(s.contains(&BigRational::from_integer(3.into())));
    }

    #[test]
    fn precision_changes_keep_enclosure() {
        let x = Real::pi(256).with_prec(53).with_prec(80);
        assert!((x.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(x.lower() < x.upper());
    }
}
