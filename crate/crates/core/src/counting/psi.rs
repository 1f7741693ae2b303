//! `Psi_Q(s)`: primitive representations of integers of absolute value at
//! most `s` by an indefinite form, counted modulo automorphs.
//!
//! Two engines produce the same list of orbit representatives.
//!
//! * `Fast` walks the fundamental sector of the full automorph group in the
//!   coordinates `U = 2Ax + (B - sqrt D) y`, `V = 2Ax + (B + sqrt D) y`,
//!   where `UV = 4A Q(x, y)` and the generating automorph scales `V/U` by
//!   `eps^2`.
//! * `Oracle` scans a box, reduces every point to the point of least
//!   Euclidean norm in its orbit, and dedups.
//!
//! Congruence variants split each full orbit into cosets of the restricted
//! automorph group.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use super::{GroupSpec, Theorem};
use crate::error::{Error, Result};
use crate::matrix::{mul_mod, Mat2};
use crate::pell::{regulator_bits, PellSolution};
use crate::qforms::{automorph, Form};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Fast,
    Oracle,
}

type M2 = [i128; 4];

fn to_m2(m: &Mat2) -> Result<M2> {
    let f = |x: &BigInt| x.to_i128().ok_or(Error::Overflow("automorph entries"));
    Ok([f(&m.a)?, f(&m.b)?, f(&m.c)?, f(&m.d)?])
}

fn apply(m: &M2, x: i128, y: i128) -> (i128, i128) {
    (m[0] * x + m[1] * y, m[2] * x + m[3] * y)
}

/// A primitive indefinite form with machine-size coefficients and its
/// fundamental automorph.
#[derive(Clone, Debug)]
pub(crate) struct SmallForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
    pub gamma: M2,
    pub gamma_inv: M2,
    pub gamma_big: Mat2,
    pub eps: f64,
    pub pell: PellSolution,
}

impl SmallForm {
    pub fn new(f: &Form) -> Result<SmallForm> {
        f.require_indefinite()?;
        if !f.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        let lim = BigInt::one() << 40;
        for x in [&f.a, &f.b, &f.c] {
            if x.abs() >= lim {
                return Err(Error::Overflow("form coefficients"));
            }
        }
        let pell = f.fundamental_solution()?;
        let g = automorph(f, &pell.t, &pell.u)?;
        let gi = g.inverse()?;
        let eps = {
            let t = pell.t.to_f64().unwrap_or(f64::INFINITY);
            let u = pell.u.to_f64().unwrap_or(f64::INFINITY);
            let d = f.discriminant().to_f64().expect("small");
            (t + u * d.sqrt()) / 2.0
        };
        if !eps.is_finite() || eps > 1e15 {
            return Err(Error::Overflow("fundamental unit"));
        }
        Ok(SmallForm {
            a: f.a.to_i128().expect("small"),
            b: f.b.to_i128().expect("small"),
            c: f.c.to_i128().expect("small"),
            d: f.discriminant().to_i128().expect("small"),
            gamma: to_m2(&g)?,
            gamma_inv: to_m2(&gi)?,
            gamma_big: g,
            eps,
            pell,
        })
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// `a + b sqrt D > 0`.
    fn surd_positive(&self, a: i128, b: i128) -> bool {
        match (a.signum(), b.signum()) {
            (0, 0) => false,
            (sa, sb) if sa >= 0 && sb >= 0 => true,
            (sa, sb) if sa <= 0 && sb <= 0 => false,
            (1, _) => a * a > b * b * self.d,
            _ => b * b * self.d > a * a,
        }
    }

    /// `|V| >= |U|` iff `m n >= 0` with `m = 2Ax + By`, `n = y`.
    fn ratio_at_least_one(&self, x: i128, y: i128) -> bool {
        let m = 2 * self.a * x + self.b * y;
        m.signum() * y.signum() >= 0
    }

    /// One representative per orbit of `{+-gamma^j}`: `U > 0` and
    /// `1 <= |V/U| < eps^2`.
    pub fn in_sector(&self, x: i128, y: i128) -> bool {
        let m = 2 * self.a * x + self.b * y;
        if !self.surd_positive(m, -y) || !self.ratio_at_least_one(x, y) {
            return false;
        }
        let (x2, y2) = apply(&self.gamma_inv, x, y);
        !self.ratio_at_least_one(x2, y2)
    }

    /// All primitive points of the sector with `|Q| <= s`, sorted.
    pub fn sector_points(&self, s: u64) -> Vec<(i128, i128, u64)> {
        if s == 0 {
            return Vec::new();
        }
        let sd = (self.d as f64).sqrt();
        let umax = (4.0 * (self.a.abs() as f64) * s as f64).sqrt();
        let vmax = umax * self.eps;
        let ymax = ((umax + vmax) / (2.0 * sd)).ceil() as i128 + 1;
        let si = s as i128;
        let two_a = 2.0 * self.a as f64;
        let bf = self.b as f64;
        let mut pts: Vec<(i128, i128, u64)> = (-ymax..=ymax)
            .into_par_iter()
            .flat_map_iter(|y| {
                let yf = y as f64;
                let l = (-bf * yf + yf * sd) / two_a;
                let h = (umax - bf * yf + yf * sd) / two_a;
                let (lo, hi) = if l <= h { (l, h) } else { (h, l) };
                let (lo, hi) = (lo.floor() as i128 - 1, hi.ceil() as i128 + 1);
                (lo..=hi).filter_map(move |x| {
                    let v = self.eval(x, y);
                    if v.abs() > si || x.gcd(&y) != 1 || !self.in_sector(x, y) {
                        return None;
                    }
                    Some((x, y, v.unsigned_abs() as u64))
                })
            })
            .collect();
        pts.sort_unstable();
        pts
    }

    /// Integer intervals of `x` containing every `x` with `|Q(x, y)| <= s`.
    fn hyperbola_ranges(&self, s: u64, y: i128) -> Vec<(i128, i128)> {
        let (a, b) = if self.a > 0 { (self.a as f64, self.b as f64) } else { (-self.a as f64, -self.b as f64) };
        let (d, s, yf) = (self.d as f64, s as f64, y as f64);
        let root = |disc: f64| -> (f64, f64) {
            let r = disc.max(0.0).sqrt();
            ((-b * yf - r) / (2.0 * a), (-b * yf + r) / (2.0 * a))
        };
        let (x1, x2) = root(d * yf * yf + 4.0 * a * s);
        let disc2 = d * yf * yf - 4.0 * a * s;
        let fl = |v: f64| v.floor() as i128 - 1;
        let ce = |v: f64| v.ceil() as i128 + 1;
        if disc2 <= 0.0 {
            vec![(fl(x1), ce(x2))]
        } else {
            let (x3, x4) = root(disc2);
            vec![(fl(x1), ce(x3)), (fl(x4), ce(x2))]
        }
    }

    /// The point of least Euclidean norm in the orbit of `v` under
    /// `<g>` (and `-I` if `with_neg`); ties broken lexicographically.
    pub fn canonical(g: &M2, gi: &M2, with_neg: bool, v: (i128, i128)) -> (i128, i128) {
        let norm = |p: (i128, i128)| p.0 * p.0 + p.1 * p.1;
        let mut cur = v;
        let mut moved = false;
        loop {
            let n = apply(g, cur.0, cur.1);
            if norm(n) < norm(cur) {
                cur = n;
                moved = true;
            } else {
                break;
            }
        }
        if !moved {
            loop {
                let n = apply(gi, cur.0, cur.1);
                if norm(n) < norm(cur) {
                    cur = n;
                } else {
                    break;
                }
            }
        }
        let mut cands = vec![cur];
        for m in [g, gi] {
            let n = apply(m, cur.0, cur.1);
            if norm(n) == norm(cur) {
                cands.push(n);
            }
        }
        if with_neg {
            let negs: Vec<_> = cands.iter().map(|p| (-p.0, -p.1)).collect();
            cands.extend(negs);
        }
        cands.into_iter().max().expect("nonempty")
    }

    /// Orbit representatives under the full automorph group found by the
    /// box scan.
    pub fn box_points(&self, s: u64) -> Vec<(i128, i128, u64)> {
        if s == 0 {
            return Vec::new();
        }
        // box from the sector geometry, widened to the coefficient bound
        let coef = (self.a.abs() + self.b.abs() + self.c.abs()) as f64;
        let sd = (self.d as f64).sqrt();
        let generous = (self.eps * self.eps * (s as f64 * coef).sqrt()).ceil();
        let umax = (4.0 * (self.a.abs() as f64) * s as f64).sqrt();
        let ysec = (1.0 + self.eps) * umax / (2.0 * sd);
        let xsec = ((1.0 + self.eps) * umax / 2.0 + self.b.abs() as f64 * ysec) / (2.0 * self.a.abs() as f64);
        let bound = generous.max(xsec.max(ysec).ceil() + 2.0) as i128;
        let si = s as i128;
        let (g, gi) = (self.gamma, self.gamma_inv);
        let found: BTreeMap<(i128, i128), u64> = (-bound..=bound)
            .into_par_iter()
            .flat_map_iter(|y| {
                self.hyperbola_ranges(s, y)
                    .into_iter()
                    .flat_map(move |(lo, hi)| lo.max(-bound)..=hi.min(bound))
                    .filter_map(move |x| {
                        let v = self.eval(x, y);
                        if v.abs() > si || x.gcd(&y) != 1 {
                            return None;
                        }
                        Some((SmallForm::canonical(&g, &gi, true, (x, y)), v.unsigned_abs() as u64))
                    })
            })
            .collect();
        found.into_iter().map(|((x, y), v)| (x, y, v)).collect()
    }
}

/// The automorphs of `Q` lying in a congruence group.
#[derive(Clone, Debug)]
pub(crate) struct Restricted {
    /// Least `k` with `gamma^k` in the group.
    pub k: u64,
    /// `sign * gamma^k` generates the restricted group acting on points.
    pub sign: i128,
    pub neg_in_group: bool,
}

pub(crate) fn restricted(f: &SmallForm, group: &GroupSpec) -> Result<Restricted> {
    let (k, res) = group.first_power_in(&f.gamma_big)?;
    let p = group.level();
    let (sign, neg) = match group {
        GroupSpec::Full | GroupSpec::Hecke0(_) => (1, true),
        GroupSpec::Principal(2) => (1, true),
        GroupSpec::Principal(_) => (if res[0] == 1 % p { 1 } else { -1 }, false),
    };
    Ok(Restricted { k, sign, neg_in_group: neg })
}

fn in_point_set(group: &GroupSpec, x: i128, y: i128) -> bool {
    match *group {
        GroupSpec::Full => true,
        GroupSpec::Principal(p) => {
            let p = p as i128;
            x.rem_euclid(p) == 1 % p && y.rem_euclid(p) == 0
        }
        GroupSpec::Hecke0(p) => y.rem_euclid(p as i128) == 0,
    }
}

fn check_hypothesis(f: &Form, group: &GroupSpec) -> Result<()> {
    group.validate()?;
    if let GroupSpec::Hecke0(p) = group {
        if f.a.mod_floor(&BigInt::from(*p)) != BigInt::one() {
            return Err(Error::Hypothesis(format!("A = {} is not 1 mod {p}", f.a)));
        }
    }
    Ok(())
}

/// Values `|Q(x)|` of one representative per orbit, sorted, for all orbits
/// with `|Q(x)| <= s`.
pub fn psi_values(form: &Form, s: u64, group: &GroupSpec, engine: Engine) -> Result<Vec<u64>> {
    form.require_indefinite()?;
    let (k, prim) = form.primitive_part();
    check_hypothesis(&prim, group)?;
    let k = k.to_u64().ok_or(Error::Overflow("content"))?;
    let f = SmallForm::new(&prim)?;
    let r = restricted(&f, group)?;
    let s_prim = s / k;
    let mut out = match engine {
        Engine::Fast => fast_values(&f, &r, group, s_prim)?,
        Engine::Oracle => oracle_values(&f, &r, group, s_prim)?,
    };
    for v in out.iter_mut() {
        *v *= k;
    }
    out.sort_unstable();
    Ok(out)
}

/// Coset representatives `f` of the restricted group in `{+-gamma^j}`,
/// reduced mod the level.
fn coset_residues(f: &SmallForm, r: &Restricted, group: &GroupSpec) -> Vec<[u64; 4]> {
    let n = group.level().max(1);
    let base = f.gamma_big.reduce_mod(n);
    let mut cur = Mat2::identity().reduce_mod(n);
    let mut out = Vec::new();
    for _ in 0..r.k {
        out.push(cur);
        if !r.neg_in_group {
            out.push(cur.map(|e| (n - e) % n));
        }
        cur = mul_mod(&cur, &base, n);
    }
    out
}

fn fast_values(f: &SmallForm, r: &Restricted, group: &GroupSpec, s: u64) -> Result<Vec<u64>> {
    let pts = f.sector_points(s);
    if *group == GroupSpec::Full {
        return Ok(pts.into_iter().map(|p| p.2).collect());
    }
    let n = group.level() as i128;
    let cosets = coset_residues(f, r, group);
    let mut out = Vec::new();
    for (x, y, v) in pts {
        let (xm, ym) = (x.rem_euclid(n), y.rem_euclid(n));
        for c in &cosets {
            let c: Vec<i128> = c.iter().map(|&e| e as i128).collect();
            let x2 = (c[0] * xm + c[1] * ym) % n;
            let y2 = (c[2] * xm + c[3] * ym) % n;
            if in_point_set(group, x2, y2) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

fn mat_pow(m: &M2, k: u64) -> Result<M2> {
    let mut acc: M2 = [1, 0, 0, 1];
    for _ in 0..k {
        acc = [
            acc[0].checked_mul(m[0]).and_then(|x| x.checked_add(acc[1].checked_mul(m[2])?)).ok_or(Error::Overflow("power"))?,
            acc[0].checked_mul(m[1]).and_then(|x| x.checked_add(acc[1].checked_mul(m[3])?)).ok_or(Error::Overflow("power"))?,
            acc[2].checked_mul(m[0]).and_then(|x| x.checked_add(acc[3].checked_mul(m[2])?)).ok_or(Error::Overflow("power"))?,
            acc[2].checked_mul(m[1]).and_then(|x| x.checked_add(acc[3].checked_mul(m[3])?)).ok_or(Error::Overflow("power"))?,
        ];
    }
    Ok(acc)
}

fn oracle_values(f: &SmallForm, r: &Restricted, group: &GroupSpec, s: u64) -> Result<Vec<u64>> {
    let reps = f.box_points(s);
    if *group == GroupSpec::Full {
        return Ok(reps.into_iter().map(|p| p.2).collect());
    }
    // reduce every coset point under the restricted generator itself
    let gk = mat_pow(&f.gamma, r.k)?;
    let gik = mat_pow(&f.gamma_inv, r.k)?;
    let gen = gk.map(|e| e * r.sign);
    let gen_inv = gik.map(|e| e * r.sign);
    let mut keys: BTreeSet<(i128, i128)> = BTreeSet::new();
    let mut out = Vec::new();
    for (x, y, v) in reps {
        let mut p = (x, y);
        for _ in 0..r.k {
            for q in [p, (-p.0, -p.1)] {
                if in_point_set(group, q.0, q.1) {
                    let key = SmallForm::canonical(&gen, &gen_inv, r.neg_in_group, q);
                    if keys.insert(key) {
                        out.push(v);
                    }
                }
            }
            p = apply(&f.gamma, p.0, p.1);
        }
    }
    Ok(out)
}

/// `Psi` for the group, computed by the fast engine.
pub fn psi(form: &Form, s: u64, group: &GroupSpec) -> Result<u64> {
    Ok(psi_values(form, s, group, Engine::Fast)?.len() as u64)
}

/// The asymptotic matching [`psi_values`] for this form and group.
pub fn psi_theorem(form: &Form, group: &GroupSpec) -> Result<Theorem> {
    form.require_indefinite()?;
    let (_, prim) = form.primitive_part();
    check_hypothesis(&prim, group)?;
    let f = SmallForm::new(&prim)?;
    let r = restricted(&f, group)?;
    let regulator = regulator_bits(&f.pell, 80).mul_int(&BigInt::from(r.k));
    let d = form.discriminant();
    Ok(match *group {
        GroupSpec::Full => Theorem::Representations { d, regulator },
        GroupSpec::Principal(p) => Theorem::PrincipalRepresentations { d, p, regulator },
        GroupSpec::Hecke0(p) => Theorem::Hecke0Representations { d, p, regulator },
    })
}

/// Number of entries `<= s` in a sorted value list.
pub fn count_at(values: &[u64], s: u64) -> u64 {
    values.partition_point(|&v| v <= s) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn golden() -> Form {
        Form::from_i64(1, -1, -1)
    }

    #[test]
    fn trivial_thresholds() {
        assert_eq!(psi(&golden(), 0, &GroupSpec::Full).unwrap(), 0);
        // +1 and -1 each form one orbit
        assert_eq!(psi(&golden(), 1, &GroupSpec::Full).unwrap(), 2);
    }

    #[test]
    fn golden_eleven() {
        // values +-1, +-5 once each, +-11 twice each (two primes above 11)
        let v = psi_values(&golden(), 11, &GroupSpec::Full, Engine::Oracle).unwrap();
        let f = psi_values(&golden(), 11, &GroupSpec::Full, Engine::Fast).unwrap();
        assert_eq!(v, f);
        assert_eq!(v, vec![1, 1, 5, 5, 11, 11, 11, 11]);
    }

    #[test]
    fn reducible_and_hypothesis_errors() {
        assert!(psi(&Form::from_i64(1, 0, -1), 10, &GroupSpec::Full).is_err());
        assert!(matches!(
            psi(&Form::from_i64(2, 1, -2), 10, &GroupSpec::Hecke0(3)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn imprimitive_forms_scale() {
        let v = psi(&Form::from_i64(3, -3, -3), 33, &GroupSpec::Full).unwrap();
        assert_eq!(v, psi(&golden(), 11, &GroupSpec::Full).unwrap());
    }

    #[test]
    fn congruence_engines_agree() {
        for g in [GroupSpec::Principal(2), GroupSpec::Principal(3), GroupSpec::Hecke0(2), GroupSpec::Hecke0(5)] {
            let a = psi_values(&golden(), 200, &g, Engine::Fast).unwrap();
            let b = psi_values(&golden(), 200, &g, Engine::Oracle).unwrap();
            assert_eq!(a, b, "{g}");
        }
    }

    #[test]
    fn canonical_is_automorph_invariant() {
        let f = SmallForm::new(&Form::from_i64(3, 1, -1)).unwrap();
        for (x, y, _) in f.box_points(60) {
            let c = SmallForm::canonical(&f.gamma, &f.gamma_inv, true, (x, y));
            let moved = apply(&f.gamma, x, y);
            assert_eq!(SmallForm::canonical(&f.gamma, &f.gamma_inv, true, moved), c);
            assert_eq!(SmallForm::canonical(&f.gamma, &f.gamma_inv, true, (-x, -y)), c);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn monotone_and_engines_agree(a in 1i64..4, b in -4i64..5, c in -4i64..0, s in 1u64..80, extra in 0u64..40) {
            let f = Form::from_i64(a, b, c);
            prop_assume!(f.is_indefinite() && f.is_primitive());
            prop_assume!(f.fundamental_solution().unwrap().t <= BigInt::from(100));
            let fast = psi_values(&f, s + extra, &GroupSpec::Full, Engine::Fast).unwrap();
            let oracle = psi_values(&f, s + extra, &GroupSpec::Full, Engine::Oracle).unwrap();
            prop_assert_eq!(&fast, &oracle);
            prop_assert!(count_at(&fast, s) <= count_at(&fast, s + extra));
        }
    }
}
