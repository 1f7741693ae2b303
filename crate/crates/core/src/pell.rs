//! Fundamental solutions of `t^2 - D u^2 = 4` and regulators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::quadfield::{floor_surd, is_square, Surd};
use crate::real::Real;

/// A positive solution `(t, u)` of `t^2 - D u^2 = 4`, standing for the unit
/// `(t + u sqrt D) / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PellSolution {
    pub d: BigInt,
    pub t: BigInt,
    pub u: BigInt,
}

/// The fundamental unit of the order of discriminant `D`, possibly of norm -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub t: BigInt,
    pub u: BigInt,
    /// `+1` or `-1`.
    pub norm: i8,
    /// Length of the period of the continued fraction of `(D mod 2 + sqrt D)/2`.
    pub period: usize,
}

/// Checks that `D` is a positive non-square discriminant (`D = 0, 1 mod 4`).
pub fn validate_discriminant(d: &BigInt) -> Result<()> {
    if !d.is_positive() {
        return Err(Error::BadDiscriminant(d.to_string(), "must be positive"));
    }
    if is_square(d) {
        return Err(Error::BadDiscriminant(d.to_string(), "must not be a square"));
    }
    let r = d.mod_floor(&BigInt::from(4));
    if !(r.is_zero() || r.is_one()) {
        return Err(Error::BadDiscriminant(d.to_string(), "must be 0 or 1 mod 4"));
    }
    Ok(())
}

/// Continued fraction of `(D mod 2 + sqrt D)/2` up to the end of its first
/// period, then the eigenvalue of the period matrix.
pub fn fundamental_unit(d: &BigInt) -> Result<FundamentalUnit> {
    validate_discriminant(d)?;
    let sigma = if d.is_odd() { BigInt::one() } else { BigInt::zero() };
    // (P + sqrt D)/Q, Q | D - P^2; states repeat once the expansion turns periodic
    let mut p = sigma;
    let mut q = BigInt::from(2);
    let mut states: Vec<(BigInt, BigInt)> = Vec::new();
    let mut quotients: Vec<BigInt> = Vec::new();
    let start = loop {
        if let Some(i) = states.iter().position(|s| s.0 == p && s.1 == q) {
            break i;
        }
        states.push((p.clone(), q.clone()));
        let a = if q.is_positive() {
            floor_surd(&p, &BigInt::one(), d, &q)
        } else {
            floor_surd(&-&p, &-BigInt::one(), d, &-&q)
        };
        let np = &a * &q - &p;
        let nq = (d - &np * &np) / &q;
        quotients.push(a);
        p = np;
        q = nq;
    };
    let period = &quotients[start..];
    let (pz, qz) = states[start].clone();
    // M = prod (a 1; 1 0); only the bottom row matters
    let (mut m21, mut m22) = (BigInt::zero(), BigInt::one());
    let (mut m11, mut m12) = (BigInt::one(), BigInt::zero());
    for a in period {
        let n11 = &m11 * a + &m12;
        let n21 = &m21 * a + &m22;
        m12 = std::mem::replace(&mut m11, n11);
        m22 = std::mem::replace(&mut m21, n21);
    }
    let u = BigInt::from(2) * &m21 / &qz;
    let t = BigInt::from(2) * (&m21 * &pz + &m22 * &qz) / &qz;
    let norm = if period.len() % 2 == 0 { 1 } else { -1 };
    debug_assert_eq!(&t * &t - d * &u * &u, BigInt::from(4 * norm as i64));
    Ok(FundamentalUnit { t, u, norm, period: period.len() })
}

/// The fundamental solution `(t, u)` with `t, u > 0` of `t^2 - D u^2 = 4`.
pub fn fundamental_pell4(d: &BigInt) -> Result<PellSolution> {
    let f = fundamental_unit(d)?;
    let (t, u) = if f.norm == 1 {
        (f.t, f.u)
    } else {
        ((&f.t * &f.t + d * &f.u * &f.u) / 2, &f.t * &f.u)
    };
    Ok(PellSolution { d: d.clone(), t, u })
}

/// Whether the order of discriminant `D` has a unit of norm -1.
pub fn has_negative_unit(d: &BigInt) -> Result<bool> {
    Ok(fundamental_unit(d)?.norm == -1)
}

impl PellSolution {
    pub fn new(d: BigInt, t: BigInt, u: BigInt) -> Result<PellSolution> {
        if &t * &t - &d * &u * &u != BigInt::from(4) {
            return Err(Error::NotPellSolution { t: t.to_string(), u: u.to_string(), d: d.to_string() });
        }
        Ok(PellSolution { d, t, u })
    }

    /// `(t + u sqrt D)/2` as a field element.
    pub fn unit(&self) -> Surd {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        Surd::new(self.d.clone(), BigRational::from_integer(self.t.clone()) * &half, BigRational::from_integer(self.u.clone()) * &half)
            .expect("validated discriminant")
    }

    /// Product of the units of two solutions.
    pub fn compose(&self, other: &PellSolution) -> PellSolution {
        let t = (&self.t * &other.t + &self.d * &self.u * &other.u) / 2;
        let u = (&self.t * &other.u + &other.t * &self.u) / 2;
        PellSolution { d: self.d.clone(), t, u }
    }

    /// The solution for the `k`-th power of the unit.
    pub fn power(&self, k: u64) -> PellSolution {
        let mut acc = PellSolution { d: self.d.clone(), t: BigInt::from(2), u: BigInt::zero() };
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    pub fn regulator(&self) -> f64 {
        regulator_bits(self, 60).to_f64()
    }
}

/// `log((t + u sqrt D)/2)` enclosed in a ball of radius at most `2^-bits`.
pub fn regulator_bits(sol: &PellSolution, bits: u32) -> Real {
    let mut w = bits + 32;
    loop {
        let x = sol.unit().to_real(w).expect("real field");
        let l = x.ln().expect("unit exceeds one");
        if l.accurate_to(bits) {
            return l;
        }
        w += 32;
    }
}

/// The smallest power `(t_k, u_k)` of the fundamental solution with `p | u_k`,
/// together with `k`.
pub fn pell_with_divisor(d: &BigInt, p: u64) -> Result<(PellSolution, u64)> {
    if p == 0 {
        return Err(Error::Hypothesis("divisor must be positive".into()));
    }
    let base = fundamental_pell4(d)?;
    let pb = BigInt::from(p);
    let mut cur = base.clone();
    let cap = p.saturating_mul(p).saturating_add(1);
    for k in 1..=cap {
        if (&cur.u % &pb).is_zero() {
            return Ok((cur, k));
        }
        cur = cur.compose(&base);
    }
    Err(Error::IterationCap("pell_with_divisor"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(d: u128, cap: u128) -> Option<(u128, u128)> {
        for u in 1..=cap {
            let v = 4 + d * u * u;
            let t = (v as f64).sqrt() as u128;
            for c in t.saturating_sub(1)..=t + 1 {
                if c * c == v {
                    return Some((c, u));
                }
            }
        }
        None
    }

    fn sol(d: i64) -> (BigInt, BigInt) {
        let s = fundamental_pell4(&d.into()).unwrap();
        (s.t, s.u)
    }

    #[test]
    fn small_discriminants() {
        assert_eq!(sol(5), (3.into(), 1.into()));
        assert_eq!(sol(8), (6.into(), 2.into()));
        assert_eq!(sol(12), (4.into(), 1.into()));
        assert_eq!(sol(13), (11.into(), 3.into()));
        assert_eq!(sol(21), (5.into(), 1.into()));
        assert_eq!(sol(244), (3532638098i64.into(), 226153980i64.into()));
    }

    #[test]
    fn matches_brute_force() {
        for d in 5u64..300 {
            let db = BigInt::from(d);
            if validate_discriminant(&db).is_err() {
                continue;
            }
            let (t, u) = sol(d as i64);
            match brute(d as u128, 100_000) {
                Some((bt, bu)) => assert_eq!((t, u), (bt.into(), bu.into()), "D = {d}"),
                None => assert!(u > BigInt::from(100_000)),
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(fundamental_pell4(&9.into()).is_err());
        assert!(fundamental_pell4(&7.into()).is_err());
        assert!(fundamental_pell4(&(-4).into()).is_err());
        assert!(PellSolution::new(5.into(), 3.into(), 2.into()).is_err());
    }

    #[test]
    fn regulator_of_five() {
        let s = fundamental_pell4(&5.into()).unwrap();
        let r = regulator_bits(&s, 100);
        assert!(r.accurate_to(100));
        assert!(r.to_decimal(25).starts_with("0.9624236501192068949955178"));
        assert_eq!(s.regulator(), 0.9624236501192069);
    }

    #[test]
    fn divisor_powers() {
        let (s, k) = pell_with_divisor(&5.into(), 2).unwrap();
        assert_eq!((k, s.t, s.u), (3, 18.into(), 8.into()));
        let (s, k) = pell_with_divisor(&5.into(), 5).unwrap();
        assert_eq!(k, 5);
        assert!((s.u % 5u32).is_zero());
        assert_eq!(pell_with_divisor(&5.into(), 1).unwrap().1, 1);
    }

    #[test]
    fn negative_units() {
        assert!(has_negative_unit(&5.into()).unwrap());
        assert!(has_negative_unit(&8.into()).unwrap());
        assert!(!has_negative_unit(&12.into()).unwrap());
        assert!(!has_negative_unit(&21.into()).unwrap());
    }

    proptest! {
        #[test]
        fn solution_is_minimal_and_correct(d in 5u64..2000) {
            let db = BigInt::from(d);
            prop_assume!(validate_discriminant(&db).is_ok());
            let s = fundamental_pell4(&db).unwrap();
            prop_assert_eq!(&s.t * &s.t - &db * &s.u * &s.u, BigInt::from(4));
            prop_assert!(s.t.is_positive() && s.u.is_positive());
            let sq = s.power(2);
            prop_assert_eq!(&sq.t * &sq.t - &db * &sq.u * &sq.u, BigInt::from(4));
        }
    }
}
