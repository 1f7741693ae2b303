//! Orbit counting for the modular group and its congruence subgroups.

pub mod orbit;
pub mod psi;
pub mod series;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::matrix::{is_pm_identity_mod, mul_mod, Mat2};

pub use orbit::{is_group_reciprocal, orbit_count, orbit_count_bfs, orbit_set, orbit_summary, orbit_theorem, CountMode, OrbitSummary};
pub use psi::{count_at, psi, psi_theorem, psi_values, Engine};
pub use series::{predicted_constant, report, report_csv, report_json, run_series, CountSeries, ReportRow, Theorem, TheoremTag};

/// A subgroup of `PSL(2, Z)`: the whole group, `Gamma(p)` or `Gamma_0(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Full,
    Principal(u64),
    Hecke0(u64),
}

/// Distinct prime divisors.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Full => Ok(()),
            GroupSpec::Principal(p) | GroupSpec::Hecke0(p) if *p >= 2 => Ok(()),
            _ => Err(Error::Hypothesis("level must be at least 2".into())),
        }
    }

    /// Modulus of the congruence conditions (1 for the full group).
    pub fn level(&self) -> u64 {
        match self {
            GroupSpec::Full => 1,
            GroupSpec::Principal(p) | GroupSpec::Hecke0(p) => *p,
        }
    }

    /// Index in `PSL(2, Z)`.
    pub fn index(&self) -> u64 {
        match *self {
            GroupSpec::Full => 1,
            GroupSpec::Principal(2) => 6,
            GroupSpec::Principal(p) => {
                let ps = prime_factors(p);
                let num: u64 = ps.iter().map(|q| q * q - 1).product();
                let den: u64 = ps.iter().map(|q| q * q).product();
                p * p * p / den * num / 2
            }
            GroupSpec::Hecke0(p) => {
                let ps = prime_factors(p);
                let num: u64 = ps.iter().map(|q| q + 1).product();
                let den: u64 = ps.iter().product();
                p / den * num
            }
        }
    }

    /// Least `q > 0` with `z -> z + q` in the group.
    pub fn q(&self) -> u64 {
        match *self {
            GroupSpec::Principal(p) => p,
            _ => 1,
        }
    }

    /// Membership of a matrix reduced mod the level, as an element of `PSL(2, Z)`.
    pub fn contains_mod(&self, m: &[u64; 4]) -> bool {
        match *self {
            GroupSpec::Full => true,
            GroupSpec::Principal(p) => is_pm_identity_mod(m, p),
            GroupSpec::Hecke0(_) => m[2] == 0,
        }
    }

    pub fn contains(&self, g: &Mat2) -> bool {
        self.contains_mod(&g.reduce_mod(self.level()))
    }

    /// Whether a coprime bottom row `(c, d)` belongs to some element of the group.
    pub fn admits_row(&self, c: &BigInt, d: &BigInt) -> bool {
        match *self {
            GroupSpec::Full => true,
            GroupSpec::Principal(p) => {
                let pb = BigInt::from(p);
                let dm = d.mod_floor(&pb).to_u64().expect("small");
                c.mod_floor(&pb) == BigInt::from(0) && (dm == 1 % p || dm == p - 1)
            }
            GroupSpec::Hecke0(p) => c.mod_floor(&BigInt::from(p)) == BigInt::from(0),
        }
    }

    /// Smallest `k >= 1` with `g^k` in the group, and the residue of `g^k`.
    pub fn first_power_in(&self, g: &Mat2) -> Result<(u64, [u64; 4])> {
        let n = self.level();
        let base = g.reduce_mod(n);
        let mut cur = base;
        let cap = n.saturating_mul(n).saturating_mul(n) + 1;
        for k in 1..=cap {
            if self.contains_mod(&cur) {
                return Ok((k, cur));
            }
            cur = mul_mod(&cur, &base, n);
        }
        Err(Error::IterationCap("first_power_in"))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Full => write!(f, "full"),
            GroupSpec::Principal(p) => write!(f, "gamma:{p}"),
            GroupSpec::Hecke0(p) => write!(f, "gamma0:{p}"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// `full`, `gamma:p` (or `principal:p`), `gamma0:p` (or `hecke0:p`).
    fn from_str(s: &str) -> Result<GroupSpec> {
        let s = s.trim().to_ascii_lowercase();
        if s == "full" {
            return Ok(GroupSpec::Full);
        }
        let (kind, p) = s.split_once(':').ok_or_else(|| Error::Parse(format!("unknown group {s:?}")))?;
        let p: u64 = p.parse().map_err(|_| Error::Parse(format!("bad level {p:?}")))?;
        let g = match kind {
            "gamma" | "principal" => GroupSpec::Principal(p),
            "gamma0" | "hecke0" => GroupSpec::Hecke0(p),
            _ => return Err(Error::Parse(format!("unknown group {s:?}"))),
        };
        g.validate()?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_and_widths() {
        assert_eq!((GroupSpec::Full.index(), GroupSpec::Full.q()), (1, 1));
        assert_eq!((GroupSpec::Principal(2).index(), GroupSpec::Principal(2).q()), (6, 2));
        assert_eq!(GroupSpec::Principal(3).index(), 12);
        assert_eq!(GroupSpec::Principal(5).index(), 60);
        assert_eq!(GroupSpec::Principal(4).index(), 24);
        assert_eq!(GroupSpec::Principal(6).index(), 72);
        assert_eq!(GroupSpec::Hecke0(2).index(), 3);
        assert_eq!(GroupSpec::Hecke0(4).index(), 6);
        assert_eq!(GroupSpec::Hecke0(6).index(), 12);
        assert_eq!(GroupSpec::Hecke0(7).q(), 1);
    }

    /// Brute-force index: count cosets by enumerating `SL(2, Z/p)` up to sign.
    fn psl_order(p: u64) -> u64 {
        let mut n = 0;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        if (a * d + p * p - b * c) % p == 1 % p {
                            n += 1;
                        }
                    }
                }
            }
        }
        if p == 2 {
            n
        } else {
            n / 2
        }
    }

    #[test]
    fn principal_index_matches_group_order() {
        for p in 2..=9 {
            assert_eq!(GroupSpec::Principal(p).index(), psl_order(p), "p = {p}");
        }
    }

    #[test]
    fn parse_round_trip() {
        for g in [GroupSpec::Full, GroupSpec::Principal(3), GroupSpec::Hecke0(5)] {
            assert_eq!(g.to_string().parse::<GroupSpec>().unwrap(), g);
        }
        assert!("gamma:1".parse::<GroupSpec>().is_err());
        assert!("borel:3".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn row_admissibility_has_completions() {
        // every admissible row completes to a group element
        for p in [2u64, 3, 5, 6] {
            for g in [GroupSpec::Principal(p), GroupSpec::Hecke0(p)] {
                for c in -12i64..=12 {
                    for d in -12i64..=12 {
                        if c.gcd(&d) != 1 {
                            continue;
                        }
                        let (cb, db) = (BigInt::from(c), BigInt::from(d));
                        let m = p as i64;
                        let inside = |a: i64, b: i64| {
                            let r = |x: i64| x.rem_euclid(m) as u64;
                            g.contains_mod(&[r(a), r(b), r(c), r(d)])
                        };
                        let found = (-200i64..=200).any(|a| {
                            if c == 0 {
                                a * d == 1 && (-200i64..=200).any(|b| inside(a, b))
                            } else {
                                (a * d - 1) % c == 0 && inside(a, (a * d - 1) / c)
                            }
                        });
                        assert_eq!(g.admits_row(&cb, &db), found, "{g} row ({c},{d})");
                    }
                }
            }
        }
    }
}
