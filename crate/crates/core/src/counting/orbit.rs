//! Counting `alpha` in `G . {alpha0, alpha0^sigma}` modulo `q_G Z` with
//! `h(alpha) <= s`.
//!
//! For a base point `beta` with primitive form `Q`, `h(delta beta) =
//! 2 |Q(d, -c)| / sqrt D` depends only on the bottom row `(c, d)` of
//! `delta`, and right multiplication by the stabilizer of `beta` moves rows
//! exactly like the automorphs of `Q` move the points `(d, -c)`. So the rows
//! modulo the stabilizer are the sector points of `Q`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use super::psi::SmallForm;
use super::GroupSpec;
use crate::error::{Error, Result};
use crate::matrix::{mul_mod, Mat2};
use crate::pell::regulator_bits;
use crate::quadfield::isqrt;
use crate::quadirr::QuadIrr;

/// Whether both `alpha0` and its conjugate seed the count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Joint,
    Single,
}

impl std::str::FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<CountMode> {
        match s {
            "joint" => Ok(CountMode::Joint),
            "single" => Ok(CountMode::Single),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Largest `N` with `2N / sqrt D <= s`.
pub fn row_bound(d: &BigInt, s: &BigRational) -> Result<u64> {
    if !s.is_positive() {
        return Err(Error::Hypothesis("threshold must be positive".into()));
    }
    let num = s.numer() * s.numer() * d;
    let den = s.denom() * s.denom() * BigInt::from(4);
    isqrt(&(num / den)).to_u64().ok_or(Error::Overflow("row bound"))
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// A matrix of determinant 1 with bottom row `(c, d)`.
pub fn complete_row(c: i128, d: i128) -> Mat2 {
    let (g, x, y) = egcd(d, c);
    debug_assert_eq!(g, 1);
    // x d + y c = 1, so (x, -y; c, d)
    Mat2::from_i64(x as i64, (-y) as i64, c as i64, d as i64)
}

fn orbit_set_rows(alpha0: &QuadIrr, group: &GroupSpec, n: u64, mode: CountMode) -> Result<BTreeSet<QuadIrr>> {
    group.validate()?;
    let bases = match mode {
        CountMode::Joint => vec![alpha0.clone(), alpha0.conj()],
        CountMode::Single => vec![alpha0.clone()],
    };
    let level = group.level();
    let q = group.q();
    let mut out = BTreeSet::new();
    for beta in bases {
        let form = beta.form();
        let sf = SmallForm::new(&form)?;
        let period: Vec<[u64; 4]> = if level > 1 {
            let (ord, _) = GroupSpec::Principal(level).first_power_in(&sf.gamma_big)?;
            let base = sf.gamma_big.reduce_mod(level);
            let mut cur = Mat2::identity().reduce_mod(level);
            (0..ord)
                .map(|_| {
                    let r = cur;
                    cur = mul_mod(&cur, &base, level);
                    r
                })
                .collect()
        } else {
            Vec::new()
        };
        let pts = sf.sector_points(n);
        let found: Vec<Vec<QuadIrr>> = pts
            .par_iter()
            .map(|&(x, y, _)| {
                let delta = complete_row(-y, x);
                let image = QuadIrr::alpha_of(&form.act(&delta.inverse().expect("unimodular"))).expect("indefinite");
                if level == 1 {
                    return vec![image.canonical_mod_translation(1)];
                }
                let dm = delta.reduce_mod(level);
                let mut v = Vec::new();
                for k in 0..q {
                    let tk = [(dm[0] + k * dm[2]) % level, (dm[1] + k * dm[3]) % level, dm[2], dm[3]];
                    if period.iter().any(|g| group.contains_mod(&mul_mod(&tk, g, level))) {
                        v.push(image.add_int(&BigInt::from(k)).canonical_mod_translation(q));
                    }
                }
                v
            })
            .collect();
        out.extend(found.into_iter().flatten());
    }
    Ok(out)
}

/// The canonical values counted by [`orbit_count`].
pub fn orbit_set(alpha0: &QuadIrr, group: &GroupSpec, s: &BigRational, mode: CountMode) -> Result<BTreeSet<QuadIrr>> {
    let n = row_bound(alpha0.d(), s)?;
    orbit_set_rows(alpha0, group, n, mode)
}

/// `Card{alpha in G . {alpha0, alpha0^sigma} mod q_G : h(alpha) <= s}`
/// (only `G . alpha0` in single mode).
pub fn orbit_count(alpha0: &QuadIrr, group: &GroupSpec, s: &BigRational, mode: CountMode) -> Result<u64> {
    Ok(orbit_set(alpha0, group, s, mode)?.len() as u64)
}

/// Whether some element of the group maps `alpha0` to its conjugate.
pub fn is_group_reciprocal(alpha0: &QuadIrr, group: &GroupSpec) -> Result<bool> {
    let a = alpha0.form().a.abs().to_u64().ok_or(Error::Overflow("leading coefficient"))?;
    let set = orbit_set_rows(alpha0, group, a, CountMode::Single)?;
    Ok(set.contains(&alpha0.conj().canonical_mod_translation(group.q())))
}

/// Group data entering the asymptotic constant.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSummary {
    pub count: u64,
    /// Least `k` with `gamma^k` in the group, `gamma` generating the stabilizer.
    pub k: u64,
    /// `k` times the regulator: log of the larger eigenvalue of the
    /// primitive stabilizer element of the group.
    pub log_eigenvalue: f64,
    pub n0: u32,
    pub index: u64,
    pub q: u64,
    /// Predicted `count / s`.
    pub predicted: f64,
}

/// The asymptotic matching [`orbit_count`], with `k` and `n0`.
pub fn orbit_theorem(alpha0: &QuadIrr, group: &GroupSpec, mode: CountMode) -> Result<(super::Theorem, u64, u32)> {
    let sf = SmallForm::new(&alpha0.form())?;
    let (k, _) = group.first_power_in(&sf.gamma_big)?;
    let n0 = if is_group_reciprocal(alpha0, group)? { 2 } else { 1 };
    let reg = regulator_bits(&sf.pell, 80).mul_int(&BigInt::from(k));
    let theorem = match mode {
        CountMode::Joint => super::Theorem::CongruenceOrbits { q_g: group.q(), log_eigenvalue: reg, index: group.index(), n0 },
        CountMode::Single => super::Theorem::SingleOrbit { q_g: group.q(), log_eigenvalue: reg, index: group.index() },
    };
    Ok((theorem, k, n0))
}

pub fn orbit_summary(alpha0: &QuadIrr, group: &GroupSpec, s: &BigRational, mode: CountMode) -> Result<OrbitSummary> {
    let count = orbit_count(alpha0, group, s, mode)?;
    let (theorem, k, n0) = orbit_theorem(alpha0, group, mode)?;
    let log_eigenvalue = match &theorem {
        super::Theorem::CongruenceOrbits { log_eigenvalue, .. } | super::Theorem::SingleOrbit { log_eigenvalue, .. } => log_eigenvalue.to_f64(),
        _ => unreachable!("orbit theorems carry an eigenvalue"),
    };
    let predicted = super::predicted_constant(&theorem, 64)?.to_f64();
    Ok(OrbitSummary { count, k, log_eigenvalue, n0, index: group.index(), q: group.q(), predicted })
}

/// Breadth-first closure of `{alpha0, alpha0^sigma}` mod `Z` under
/// `z -> z + 1` and `z -> -1/z`, keeping only states with `h <= prune`,
/// for at most `depth` inversions; returns the states with `h <= s`.
pub fn orbit_count_bfs(alpha0: &QuadIrr, s: &BigRational, prune: &BigRational, depth: usize) -> Result<BTreeSet<QuadIrr>> {
    let start: Vec<QuadIrr> = [alpha0.clone(), alpha0.conj()]
        .iter()
        .map(|a| a.canonical_mod_translation(1))
        .filter(|a| a.height().le(prune))
        .collect();
    let mut seen: BTreeSet<QuadIrr> = start.iter().cloned().collect();
    let mut frontier = start;
    let inv = Mat2::s();
    let prune_f = prune.to_f64().unwrap_or(f64::INFINITY);
    for _ in 0..depth {
        let mut next = Vec::new();
        for a in &frontier {
            // h(-1/(a + n)) = h(a) |N(a + n)| = |(P + nQ)^2 - D| / (|Q| sqrt D)
            let (p, q, d) = (a.p().to_f64().unwrap(), a.q().to_f64().unwrap(), a.d().to_f64().unwrap());
            let r = (d + prune_f * q.abs() * d.sqrt()).sqrt();
            let (e1, e2) = ((-r - p) / q, (r - p) / q);
            for n in (e1.min(e2).floor() as i64 - 1)..=(e1.max(e2).ceil() as i64 + 1) {
                let b = a.add_int(&BigInt::from(n)).mobius(&inv)?.canonical_mod_translation(1);
                if b.height().le(prune) && seen.insert(b.clone()) {
                    next.push(b);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.into_iter().filter(|a| a.height().le(s)).collect())
}
