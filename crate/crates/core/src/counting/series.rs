//! Asymptotic constants and tables of `count / s^k` against them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::prime_factors;
use crate::error::{Error, Result};
use crate::real::Real;

/// Which asymptotic a constant belongs to.
#[derive(Clone, Debug)]
pub enum Theorem {
    /// `Psi_Q(s) ~ 12 R / (pi^2 sqrt D) s`.
    Representations { d: BigInt, regulator: Real },
    /// `Psi_{Q,p}`, with `regulator` the log of the least unit whose
    /// automorph lies in `Gamma(p)`.
    PrincipalRepresentations { d: BigInt, p: u64, regulator: Real },
    /// `Psi_{Q,p,0}`, same convention for `Gamma_0(p)`.
    Hecke0Representations { d: BigInt, p: u64, regulator: Real },
    /// `alpha` in `Gamma . {alpha0, alpha0^sigma}` mod `Z` with
    /// `1/|alpha - alpha^sigma| <= t` (that is `h(alpha) <= 2t`):
    /// `24 R / (pi^2 n0)`.
    QuadraticIrrationals { regulator: Real, n0: u32 },
    /// `12 q_G L / (pi^2 [Gamma:G] n0)`.
    CongruenceOrbits { q_g: u64, log_eigenvalue: Real, index: u64, n0: u32 },
    /// `G . alpha0` alone: `6 q_G L / (pi^2 [Gamma:G])`.
    SingleOrbit { q_g: u64, log_eigenvalue: Real, index: u64 },
    /// Any other leading coefficient, carried through unchanged.
    Given { label: String, value: Real },
}

impl Theorem {
    pub fn tag(&self) -> &str {
        match self {
            Theorem::Representations { .. } => "representations",
            Theorem::PrincipalRepresentations { .. } => "principal-representations",
            Theorem::Hecke0Representations { .. } => "hecke0-representations",
            Theorem::QuadraticIrrationals { .. } => "quadratic-irrationals",
            Theorem::CongruenceOrbits { .. } => "congruence-orbits",
            Theorem::SingleOrbit { .. } => "single-orbit",
            Theorem::Given { label, .. } => label,
        }
    }
}

/// Theorem tags accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremTag {
    Representations,
    PrincipalRepresentations,
    Hecke0Representations,
    QuadraticIrrationals,
    CongruenceOrbits,
    SingleOrbit,
}

impl FromStr for TheoremTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<TheoremTag> {
        Ok(match s {
            "representations" | "psi" => TheoremTag::Representations,
            "principal-representations" | "psi-principal" => TheoremTag::PrincipalRepresentations,
            "hecke0-representations" | "psi-hecke0" => TheoremTag::Hecke0Representations,
            "quadratic-irrationals" | "irrationals" => TheoremTag::QuadraticIrrationals,
            "congruence-orbits" | "orbits" => TheoremTag::CongruenceOrbits,
            "single-orbit" => TheoremTag::SingleOrbit,
            _ => return Err(Error::Unsupported(format!("unknown theorem tag {s:?}"))),
        })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Leading coefficient of the asymptotic, with radius at most `2^-bits`.
pub fn predicted_constant(theorem: &Theorem, bits: u32) -> Result<Real> {
    let mut w = bits + 32;
    loop {
        let v = evaluate(theorem, w)?;
        if v.accurate_to(bits) {
            return Ok(v);
        }
        w += 32;
        if w > bits + 4096 {
            return Err(Error::IterationCap("predicted_constant"));
        }
    }
}

fn int(n: u64, w: u32) -> Real {
    Real::from_int(&BigInt::from(n), w)
}

fn quotient(num: Real, den: Real) -> Result<Real> {
    num.div(&den).ok_or(Error::DivisionByZero)
}

fn evaluate(theorem: &Theorem, w: u32) -> Result<Real> {
    let pi2 = {
        let p = Real::pi(w);
        p.mul(&p)
    };
    let positive = |d: &BigInt| -> Result<Real> {
        if *d <= BigInt::from(0) {
            return Err(Error::BadDiscriminant(d.to_string(), "must be positive"));
        }
        Ok(Real::sqrt_int(d, w))
    };
    match theorem {
        Theorem::Representations { d, regulator } => {
            let num = regulator.with_prec(w).mul_int(&BigInt::from(12));
            quotient(num, pi2.mul(&positive(d)?))
        }
        Theorem::PrincipalRepresentations { d, p, regulator } => {
            let r = regulator.with_prec(w);
            let sd = positive(d)?;
            if *p == 2 {
                return quotient(r.mul_int(&BigInt::from(4)), pi2.mul(&sd));
            }
            if *p < 2 {
                return Err(Error::Hypothesis("level must be at least 2".into()));
            }
            // prod (1 - q^-2)^-1 = prod q^2 / (q^2 - 1)
            let mut num = r.mul_int(&BigInt::from(24));
            let mut den = pi2.mul(&sd).mul_int(&BigInt::from(p * p));
            for q in prime_factors(*p) {
                num = num.mul_int(&BigInt::from(q * q));
                den = den.mul_int(&BigInt::from(q * q - 1));
            }
            quotient(num, den)
        }
        Theorem::Hecke0Representations { d, p, regulator } => {
            if *p < 2 {
                return Err(Error::Hypothesis("level must be at least 2".into()));
            }
            let mut num = regulator.with_prec(w).mul_int(&BigInt::from(12));
            let mut den = pi2.mul(&positive(d)?).mul_int(&BigInt::from(*p));
            for q in prime_factors(*p) {
                num = num.mul_int(&BigInt::from(q));
                den = den.mul_int(&BigInt::from(q + 1));
            }
            quotient(num, den)
        }
        Theorem::QuadraticIrrationals { regulator, n0 } => {
            let num = regulator.with_prec(w).mul_int(&BigInt::from(24));
            quotient(num, pi2.mul(&int(*n0 as u64, w)))
        }
        Theorem::CongruenceOrbits { q_g, log_eigenvalue, index, n0 } => {
            let num = log_eigenvalue.with_prec(w).mul_int(&BigInt::from(12 * q_g));
            quotient(num, pi2.mul(&int(index * *n0 as u64, w)))
        }
        Theorem::SingleOrbit { q_g, log_eigenvalue, index } => {
            let num = log_eigenvalue.with_prec(w).mul_int(&BigInt::from(6 * q_g));
            quotient(num, pi2.mul(&int(*index, w)))
        }
        Theorem::Given { value, .. } => Ok(value.clone()),
    }
}

/// Counts at increasing thresholds, with the constant they should approach.
#[derive(Clone, Debug)]
pub struct CountSeries {
    pub thresholds: Vec<BigRational>,
    pub counts: Vec<u64>,
    pub predicted: Real,
    pub provenance: String,
    /// Growth exponent: counts are compared with `predicted * s^exponent`.
    pub exponent: u32,
}

pub fn run_series<F>(mut counter: F, thresholds: &[BigRational], theorem: &Theorem, exponent: u32) -> Result<CountSeries>
where
    F: FnMut(&BigRational) -> Result<u64>,
{
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Hypothesis("thresholds must increase".into()));
    }
    let mut counts = Vec::with_capacity(thresholds.len());
    for s in thresholds {
        let c = counter(s)?;
        if counts.last().is_some_and(|&l| c < l) {
            return Err(Error::Hypothesis(format!("count decreased at s = {s}")));
        }
        counts.push(c);
    }
    Ok(CountSeries {
        thresholds: thresholds.to_vec(),
        counts,
        predicted: predicted_constant(theorem, 64)?,
        provenance: theorem.to_string(),
        exponent,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub s: String,
    pub count: u64,
    pub ratio: f64,
    pub predicted: f64,
    pub rel_gap: f64,
}

pub fn report(series: &CountSeries) -> Vec<ReportRow> {
    let predicted = series.predicted.to_f64();
    series
        .thresholds
        .iter()
        .zip(&series.counts)
        .map(|(s, &count)| {
            let sf = s.to_f64().unwrap_or(f64::NAN);
            let ratio = count as f64 / sf.powi(series.exponent as i32);
            ReportRow { s: s.to_string(), count, ratio, predicted, rel_gap: (ratio - predicted).abs() / predicted }
        })
        .collect()
}

pub fn report_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "count", "ratio", "predicted", "rel_gap"]).map_err(|e| Error::Parse(e.to_string()))?;
    for r in rows {
        w.serialize((&r.s, r.count, r.ratio, r.predicted, r.rel_gap)).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn report_json(rows: &[ReportRow]) -> String {
    serde_json::to_string_pretty(rows).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pell::{fundamental_pell4, regulator_bits};

    fn reg(d: i64) -> Real {
        regulator_bits(&fundamental_pell4(&BigInt::from(d)).unwrap(), 80)
    }

    #[test]
    fn golden_constants() {
        let c = predicted_constant(&Theorem::Representations { d: 5.into(), regulator: reg(5) }, 60).unwrap();
        assert!((c.to_f64() - 0.5233145).abs() < 1e-6, "{c}");
        let c = predicted_constant(&Theorem::QuadraticIrrationals { regulator: reg(5), n0: 2 }, 60).unwrap();
        assert!((c.to_f64() - 1.1701668).abs() < 1e-6, "{c}");
        let c = predicted_constant(&Theorem::SingleOrbit { q_g: 1, log_eigenvalue: reg(5), index: 1 }, 60).unwrap();
        assert!((c.to_f64() - 0.5850834).abs() < 1e-6, "{c}");
        assert!(c.accurate_to(60));
    }

    #[test]
    fn level_two_constant() {
        let r3 = reg(5).mul_int(&BigInt::from(3));
        let c = predicted_constant(&Theorem::PrincipalRepresentations { d: 5.into(), p: 2, regulator: r3 }, 60).unwrap();
        assert!((c.to_f64() - 0.5233145).abs() < 1e-6);
    }

    #[test]
    fn unknown_tag() {
        assert!("bogus".parse::<TheoremTag>().is_err());
        assert_eq!("psi".parse::<TheoremTag>().unwrap(), TheoremTag::Representations);
    }

    #[test]
    fn floor_counter_gaps_vanish() {
        let one = Theorem::Given { label: "unit".into(), value: Real::from_i64(1, 64) };
        let ts: Vec<BigRational> = [10, 100, 1000, 10000].iter().map(|&n| BigRational::new(BigInt::from(2 * n + 1), BigInt::from(2))).collect();
        let series = run_series(|s| Ok(s.floor().to_integer().to_u64().unwrap()), &ts, &one, 1).unwrap();
        let rows = report(&series);
        assert!(rows.windows(2).all(|w| w[1].rel_gap < w[0].rel_gap));
        assert!(rows.last().unwrap().rel_gap < 1e-3);
        let csv = report_csv(&rows).unwrap();
        assert!(csv.starts_with("s,count,ratio,predicted,rel_gap\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn empty_table() {
        let one = Theorem::Given { label: "unit".into(), value: Real::from_i64(1, 64) };
        let series = run_series(|_| Ok(0), &[], &one, 1).unwrap();
        assert!(report(&series).is_empty());
        assert_eq!(report_json(&[]), "[]");
    }

    #[test]
    fn rejects_unsorted_thresholds() {
        let one = Theorem::Given { label: "unit".into(), value: Real::from_i64(1, 64) };
        let ts = [BigRational::from_integer(3.into()), BigRational::from_integer(2.into())];
        assert!(run_series(|_| Ok(0), &ts, &one, 1).is_err());
    }
}
