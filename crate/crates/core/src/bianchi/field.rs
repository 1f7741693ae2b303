//! `O_D` for the norm-Euclidean imaginary quadratic fields, and exact
//! arithmetic in `K = Q(sqrt D)` and `Q(sqrt 5, sqrt D)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Discriminants with a norm-Euclidean ring of integers.
pub const SUPPORTED: [i64; 5] = [-3, -4, -7, -8, -11];

pub fn check_supported(d: i64) -> Result<()> {
    if SUPPORTED.contains(&d) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("discriminant {d} (supported: -3, -4, -7, -8, -11)")))
    }
}

/// `omega = (delta + sqrt D)/2` with `delta = D mod 4`, so
/// `omega^2 = delta omega - nw`.
fn params(d: i64) -> (i64, i64) {
    let delta = d.rem_euclid(4);
    (delta, (delta - d) / 4)
}

/// `a + b omega` in `O_D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ImagQuadInt {
    pub d: i64,
    pub a: i64,
    pub b: i64,
}

impl ImagQuadInt {
    pub fn new(d: i64, a: i64, b: i64) -> Result<ImagQuadInt> {
        check_supported(d)?;
        Ok(ImagQuadInt { d, a, b })
    }

    pub(crate) fn raw(d: i64, a: i64, b: i64) -> ImagQuadInt {
        ImagQuadInt { d, a, b }
    }

    pub fn rational(d: i64, a: i64) -> ImagQuadInt {
        ImagQuadInt { d, a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn norm(&self) -> i64 {
        let (delta, nw) = params(self.d);
        self.a * self.a + delta * self.a * self.b + nw * self.b * self.b
    }

    pub fn conj(&self) -> ImagQuadInt {
        let (delta, _) = params(self.d);
        ImagQuadInt { d: self.d, a: self.a + delta * self.b, b: -self.b }
    }

    pub fn add(&self, o: &ImagQuadInt) -> ImagQuadInt {
        ImagQuadInt { d: self.d, a: self.a + o.a, b: self.b + o.b }
    }

    pub fn sub(&self, o: &ImagQuadInt) -> ImagQuadInt {
        ImagQuadInt { d: self.d, a: self.a - o.a, b: self.b - o.b }
    }

    pub fn neg(&self) -> ImagQuadInt {
        ImagQuadInt { d: self.d, a: -self.a, b: -self.b }
    }

    pub fn mul(&self, o: &ImagQuadInt) -> ImagQuadInt {
        let (delta, nw) = params(self.d);
        ImagQuadInt {
            d: self.d,
            a: self.a * o.a - nw * self.b * o.b,
            b: self.a * o.b + self.b * o.a + delta * self.b * o.b,
        }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let (delta, _) = params(self.d);
        let b = self.b as f64;
        (self.a as f64 + b * delta as f64 / 2.0, b * (-self.d as f64).sqrt() / 2.0)
    }

    /// `(q, r)` with `self = q o + r` and `N(r) < N(o)`.
    pub fn div_rem(&self, o: &ImagQuadInt) -> Result<(ImagQuadInt, ImagQuadInt)> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = o.norm();
        let num = self.mul(&o.conj());
        let mut best: Option<(i64, ImagQuadInt, ImagQuadInt)> = None;
        for qa in [num.a.div_euclid(n), num.a.div_euclid(n) + 1] {
            for qb in [num.b.div_euclid(n), num.b.div_euclid(n) + 1] {
                let q = ImagQuadInt { d: self.d, a: qa, b: qb };
                let r = self.sub(&q.mul(o));
                let nr = r.norm();
                if best.as_ref().map_or(true, |(m, _, _)| nr < *m) {
                    best = Some((nr, q, r));
                }
            }
        }
        let (nr, q, r) = best.expect("four candidates");
        debug_assert!(nr < n);
        Ok((q, r))
    }

    pub fn divides(&self, x: &ImagQuadInt) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        x.div_rem(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }
}

/// `(g, s, t)` with `s x + t y = g` a gcd.
pub fn ext_gcd(x: &ImagQuadInt, y: &ImagQuadInt) -> (ImagQuadInt, ImagQuadInt, ImagQuadInt) {
    let zero = ImagQuadInt::rational(x.d, 0);
    let one = ImagQuadInt::rational(x.d, 1);
    let (mut r0, mut r1) = (*x, *y);
    let (mut s0, mut s1) = (one, zero);
    let (mut t0, mut t1) = (zero, one);
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1).expect("nonzero");
        r0 = r1;
        r1 = r;
        let s = s0.sub(&q.mul(&s1));
        s0 = s1;
        s1 = s;
        let t = t0.sub(&q.mul(&t1));
        t0 = t1;
        t1 = t;
    }
    (r0, s0, t0)
}

/// The roots of unity of `O_D`.
pub fn units(d: i64) -> Vec<ImagQuadInt> {
    let u = |a, b| ImagQuadInt::raw(d, a, b);
    match d {
        -4 => vec![u(1, 0), u(0, 1), u(-1, 0), u(0, -1)],
        -3 => vec![u(1, 0), u(0, 1), u(-1, 1), u(-1, 0), u(0, -1), u(1, -1)],
        _ => vec![u(1, 0), u(-1, 0)],
    }
}

pub fn unit_count(d: i64) -> Result<u32> {
    check_supported(d)?;
    Ok(units(d).len() as u32)
}

impl fmt::Display for ImagQuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "w"),
            (0, -1) => write!(f, "-w"),
            (0, b) => write!(f, "{b}*w"),
            (a, 1) => write!(f, "{a}+w"),
            (a, -1) => write!(f, "{a}-w"),
            (a, b) if b > 0 => write!(f, "{a}+{b}*w"),
            (a, b) => write!(f, "{a}{b}*w"),
        }
    }
}

/// Parses `a`, `b*w`, `a+b*w`, `a-w`, ... for a given discriminant.
pub fn parse_int(d: i64, s: &str) -> Result<ImagQuadInt> {
    check_supported(d)?;
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad element {s:?} (expected a+b*w)"));
    if t.is_empty() {
        return Err(bad());
    }
    let mut a = 0i64;
    let mut b = 0i64;
    let mut start = 0;
    let bytes: Vec<char> = t.chars().collect();
    let mut i = 1;
    let mut terms = Vec::new();
    while i <= bytes.len() {
        if i == bytes.len() || bytes[i] == '+' || bytes[i] == '-' {
            terms.push(bytes[start..i].iter().collect::<String>());
            start = i;
        }
        i += 1;
    }
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(r) => (-1, r.to_string()),
            None => (1, term.trim_start_matches('+').to_string()),
        };
        if let Some(coef) = body.strip_suffix('w') {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c: i64 = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| bad())? };
            b += sign * c;
        } else {
            a += sign * body.parse::<i64>().map_err(|_| bad())?;
        }
    }
    Ok(ImagQuadInt { d, a, b })
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `c0 + c1 omega` in `K = Q(sqrt D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KElem {
    pub d: i64,
    pub c0: BigRational,
    pub c1: BigRational,
}

impl KElem {
    pub fn from_int(x: &ImagQuadInt) -> KElem {
        KElem { d: x.d, c0: rat(x.a), c1: rat(x.b) }
    }

    pub fn zero(d: i64) -> KElem {
        KElem { d, c0: BigRational::zero(), c1: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn add(&self, o: &KElem) -> KElem {
        KElem { d: self.d, c0: &self.c0 + &o.c0, c1: &self.c1 + &o.c1 }
    }

    pub fn sub(&self, o: &KElem) -> KElem {
        KElem { d: self.d, c0: &self.c0 - &o.c0, c1: &self.c1 - &o.c1 }
    }

    pub fn neg(&self) -> KElem {
        KElem { d: self.d, c0: -&self.c0, c1: -&self.c1 }
    }

    pub fn mul(&self, o: &KElem) -> KElem {
        let (delta, nw) = params(self.d);
        let p = &self.c1 * &o.c1;
        KElem {
            d: self.d,
            c0: &self.c0 * &o.c0 - &p * rat(nw),
            c1: &self.c0 * &o.c1 + &self.c1 * &o.c0 + p * rat(delta),
        }
    }

    pub fn conj(&self) -> KElem {
        let (delta, _) = params(self.d);
        KElem { d: self.d, c0: &self.c0 + &self.c1 * rat(delta), c1: -&self.c1 }
    }

    pub fn norm(&self) -> BigRational {
        self.mul(&self.conj()).c0
    }

    pub fn inv(&self) -> Result<KElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conj();
        Ok(KElem { d: self.d, c0: c.c0 / &n, c1: c.c1 / n })
    }

    /// Representative modulo `O_D` with both coordinates in `[0, 1)`.
    pub fn frac(&self) -> KElem {
        KElem { d: self.d, c0: &self.c0 - self.c0.floor(), c1: &self.c1 - self.c1.floor() }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let (delta, _) = params(self.d);
        let c0 = self.c0.to_f64().unwrap_or(f64::NAN);
        let c1 = self.c1.to_f64().unwrap_or(f64::NAN);
        (c0 + c1 * delta as f64 / 2.0, c1 * (-self.d as f64).sqrt() / 2.0)
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})+({})*w", self.c0, self.c1)
    }
}

/// `e0 + e1 sqrt 5 + e2 sqrt D + e3 sqrt(5D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiQuadElem {
    pub d: i64,
    pub e: [BigRational; 4],
}

impl BiQuadElem {
    pub fn new(d: i64, e: [BigRational; 4]) -> BiQuadElem {
        BiQuadElem { d, e }
    }

    pub fn rational(d: i64, r: BigRational) -> BiQuadElem {
        BiQuadElem { d, e: [r, BigRational::zero(), BigRational::zero(), BigRational::zero()] }
    }

    /// `(1 + sqrt 5)/2`.
    pub fn phi(d: i64) -> BiQuadElem {
        let h = BigRational::new(BigInt::one(), BigInt::from(2));
        BiQuadElem { d, e: [h.clone(), h, BigRational::zero(), BigRational::zero()] }
    }

    pub fn from_k(x: &KElem) -> BiQuadElem {
        let (delta, _) = params(x.d);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        BiQuadElem {
            d: x.d,
            e: [&x.c0 + &x.c1 * rat(delta) * &half, BigRational::zero(), &x.c1 * half, BigRational::zero()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &BiQuadElem) -> BiQuadElem {
        BiQuadElem { d: self.d, e: std::array::from_fn(|i| &self.e[i] + &o.e[i]) }
    }

    pub fn sub(&self, o: &BiQuadElem) -> BiQuadElem {
        BiQuadElem { d: self.d, e: std::array::from_fn(|i| &self.e[i] - &o.e[i]) }
    }

    pub fn mul(&self, o: &BiQuadElem) -> BiQuadElem {
        let [a0, a1, a2, a3] = &self.e;
        let [b0, b1, b2, b3] = &o.e;
        let (five, d) = (rat(5), rat(self.d));
        BiQuadElem {
            d: self.d,
            e: [
                a0 * b0 + &five * a1 * b1 + &d * a2 * b2 + &five * &d * a3 * b3,
                a0 * b1 + a1 * b0 + &d * (a2 * b3 + a3 * b2),
                a0 * b2 + a2 * b0 + &five * (a1 * b3 + a3 * b1),
                a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
            ],
        }
    }

    /// `sqrt 5 -> -sqrt 5`.
    pub fn conj5(&self) -> BiQuadElem {
        let [a, b, c, d] = self.e.clone();
        BiQuadElem { d: self.d, e: [a, -b, c, -d] }
    }

    /// `sqrt D -> -sqrt D`, which is complex conjugation.
    pub fn conj_d(&self) -> BiQuadElem {
        let [a, b, c, d] = self.e.clone();
        BiQuadElem { d: self.d, e: [a, b, -c, -d] }
    }

    pub fn inv(&self) -> Result<BiQuadElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let w = self.mul(&self.conj5());
        let n = w.mul(&w.conj_d()).e[0].clone();
        let num = self.conj5().mul(&w.conj_d());
        Ok(BiQuadElem { d: self.d, e: std::array::from_fn(|i| &num.e[i] / &n) })
    }

    /// `|z|^2`, an element of `Q(sqrt 5)`.
    pub fn abs_squared(&self) -> BiQuadElem {
        self.mul(&self.conj_d())
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        let (s5, sd) = (5f64.sqrt(), (-self.d as f64).sqrt());
        (f(&self.e[0]) + f(&self.e[1]) * s5, f(&self.e[2]) * sd + f(&self.e[3]) * s5 * sd)
    }
}

/// Kronecker symbol `(d / n)` for `n >= 1`.
pub fn kronecker(d: i64, n: u64) -> i32 {
    let mut n = n;
    let mut result = 1i32;
    while n % 2 == 0 {
        n /= 2;
        match d.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            3 | 5 => result = -result,
            _ => {}
        }
    }
    // Jacobi symbol (d / n), n odd
    let mut a = d.rem_euclid(n as i64) as u64;
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if m % 8 == 3 || m % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

impl FromStr for ImagQuadInt {
    type Err = Error;

    /// `D:a+b*w`.
    fn from_str(s: &str) -> Result<ImagQuadInt> {
        let (d, x) = s.split_once(':').ok_or_else(|| Error::Parse(format!("expected D:a+b*w, got {s:?}")))?;
        let d: i64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad discriminant {d:?}")))?;
        parse_int(d, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_counts() {
        assert_eq!(unit_count(-4).unwrap(), 4);
        assert_eq!(unit_count(-3).unwrap(), 6);
        assert_eq!(unit_count(-7).unwrap(), 2);
        assert!(unit_count(-15).is_err());
        for d in SUPPORTED {
            assert!(units(d).iter().all(|u| u.is_unit()));
        }
    }

    #[test]
    fn omega_squares() {
        let w = |d| ImagQuadInt::raw(d, 0, 1);
        assert_eq!(w(-4).mul(&w(-4)), ImagQuadInt::raw(-4, -1, 0));
        assert_eq!(w(-3).mul(&w(-3)), ImagQuadInt::raw(-3, -1, 1));
        assert_eq!(w(-8).norm(), 2);
        assert_eq!(w(-11).norm(), 3);
    }

    #[test]
    fn parse_and_print() {
        for s in ["0", "3", "w", "-w", "2+w", "1-3*w", "-4*w", "5+2*w"] {
            let x = parse_int(-4, s).unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert_eq!("-7:1+1*w".parse::<ImagQuadInt>().unwrap(), ImagQuadInt::raw(-7, 1, 1));
        assert!(parse_int(-4, "1+i").is_err());
    }

    #[test]
    fn kronecker_values() {
        // chi_{-4}: 1, 0, -1, 0
        assert_eq!((1..=4).map(|n| kronecker(-4, n)).collect::<Vec<_>>(), vec![1, 0, -1, 0]);
        assert_eq!((1..=3).map(|n| kronecker(-3, n)).collect::<Vec<_>>(), vec![1, -1, 0]);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-8, 3), 1);
        assert_eq!(kronecker(-11, 3), 1);
    }

    #[test]
    fn biquad_inverse() {
        let d = -7;
        let x = BiQuadElem::new(d, [rat(1), rat(2), rat(-1), rat(3)]);
        let one = x.mul(&x.inv().unwrap());
        assert_eq!(one, BiQuadElem::rational(d, rat(1)));
    }

    proptest! {
        #[test]
        fn euclidean_division(di in 0usize..5, a in -500i64..500, b in -500i64..500, c in -60i64..60, e in -60i64..60) {
            let d = SUPPORTED[di];
            let x = ImagQuadInt::raw(d, a, b);
            let y = ImagQuadInt::raw(d, c, e);
            prop_assume!(!y.is_zero());
            let (q, r) = x.div_rem(&y).unwrap();
            prop_assert_eq!(q.mul(&y).add(&r), x);
            prop_assert!(r.norm() < y.norm());
        }

        #[test]
        fn gcd_is_bezout(di in 0usize..5, a in -50i64..50, b in -50i64..50, c in -50i64..50, e in -50i64..50) {
            let d = SUPPORTED[di];
            let x = ImagQuadInt::raw(d, a, b);
            let y = ImagQuadInt::raw(d, c, e);
            let (g, s, t) = ext_gcd(&x, &y);
            prop_assert_eq!(s.mul(&x).add(&t.mul(&y)), g);
            if !g.is_zero() {
                prop_assert!(g.divides(&x) && g.divides(&y));
            }
        }

        #[test]
        fn k_field(di in 0usize..5, a in -9i64..9, b in -9i64..9, c in 1i64..9, e in -9i64..9) {
            let d = SUPPORTED[di];
            let x = KElem { d, c0: BigRational::new(a.into(), c.into()), c1: BigRational::new(b.into(), 7.into()) };
            prop_assume!(!x.is_zero());
            let y = KElem::from_int(&ImagQuadInt::raw(d, e, c));
            prop_assert_eq!(x.mul(&x.inv().unwrap()), KElem::from_int(&ImagQuadInt::raw(d, 1, 0)));
            let lhs = BiQuadElem::from_k(&x.mul(&y));
            let rhs = BiQuadElem::from_k(&x).mul(&BiQuadElem::from_k(&y));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
