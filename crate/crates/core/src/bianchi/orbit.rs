//! Counting `Gamma_0(a) . {phi, phi^sigma}` mod `O_D` by complexity.
//!
//! An element of the orbit is written `x + y phi` with `x, y` in `K`; for
//! `gamma = (a b; c d)` one has `gamma phi = (bd - ac + bc)/q + phi/q` with
//! `q = d^2 + cd - c^2 = Q_phi(d, -c)`, so `h = 2|q|/sqrt 5` and
//! `h <= s` iff `N(q) <= 5 s^2 / 4`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use super::field::{check_supported, ext_gcd, units, BiQuadElem, ImagQuadInt, KElem};
use super::fibonacci_k;
use crate::counting::CountMode;
use crate::error::{Error, Result};

const PHI: f64 = 1.618_033_988_749_895;

/// `x + y phi` with `x` reduced mod `O_D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BianchiIrr {
    pub x: KElem,
    pub y: KElem,
}

impl BianchiIrr {
    pub fn phi(d: i64) -> BianchiIrr {
        BianchiIrr { x: KElem::zero(d), y: KElem::from_int(&ImagQuadInt::rational(d, 1)) }
    }

    /// Representative with both `omega`-coordinates of `x` in `[0, 1)`.
    pub fn canonical(&self) -> BianchiIrr {
        BianchiIrr { x: self.x.frac(), y: self.y.clone() }
    }

    /// `phi -> phi^sigma = 1 - phi`.
    pub fn conj5(&self) -> BianchiIrr {
        BianchiIrr { x: self.x.add(&self.y), y: self.y.neg() }
    }

    /// `h^2 = 4 / (5 N(y))`.
    pub fn height_squared(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(4)) / (BigRational::from_integer(BigInt::from(5)) * self.y.norm())
    }

    pub fn height(&self) -> f64 {
        self.height_squared().to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// `h <= s`, exactly.
    pub fn height_le(&self, s: &BigRational) -> bool {
        let n = self.y.norm();
        BigRational::from_integer(BigInt::from(5)) * s * s * n >= BigRational::from_integer(BigInt::from(4))
    }

    pub fn to_biquad(&self) -> BiQuadElem {
        BiQuadElem::from_k(&self.x).add(&BiQuadElem::from_k(&self.y).mul(&BiQuadElem::phi(self.x.d)))
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let (x0, x1) = self.x.to_complex();
        let (y0, y1) = self.y.to_complex();
        (x0 + PHI * y0, x1 + PHI * y1)
    }

    fn conj_complex(&self) -> (f64, f64) {
        self.conj5().to_complex()
    }

    /// `-1/(self + l)`.
    fn invert_shifted(&self, l: &ImagQuadInt) -> BianchiIrr {
        let a = self.x.add(&KElem::from_int(l));
        let b = &self.y;
        let den = a.mul(&a).add(&a.mul(b)).sub(&b.mul(b));
        let inv = den.inv().expect("phi is irrational over K");
        BianchiIrr { x: a.add(b).mul(&inv).neg(), y: b.mul(&inv) }
    }

    fn scale(&self, u: &KElem) -> BianchiIrr {
        BianchiIrr { x: self.x.mul(u), y: self.y.mul(u) }
    }
}

impl fmt::Display for BianchiIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] + [{}]*phi", self.x, self.y)
    }
}

/// `floor(5 s^2 / 4)`, the largest admissible `N(q)`.
pub fn norm_bound(s: &BigRational) -> Result<u64> {
    if !s.is_positive() {
        return Err(Error::Hypothesis("threshold must be positive".into()));
    }
    let num = s.numer() * s.numer() * BigInt::from(5);
    let den = s.denom() * s.denom() * BigInt::from(4);
    (num / den).to_u64().ok_or(Error::Overflow("norm bound"))
}

/// `gamma phi` for the row `(c, d)`, before reduction mod `O_D`.
fn row_alpha(c: &ImagQuadInt, d: &ImagQuadInt) -> BianchiIrr {
    let (g, s, t) = ext_gcd(d, c);
    // s d + t c = g, a unit: a = s/g, b = -t/g
    let gi = g.conj();
    let a = s.mul(&gi);
    let b = t.mul(&gi).neg();
    let q = d.mul(d).add(&c.mul(d)).sub(&c.mul(c));
    let num = b.mul(d).sub(&a.mul(c)).add(&b.mul(c));
    let qi = KElem::from_int(&q).inv().expect("unimodular row");
    BianchiIrr { x: KElem::from_int(&num).mul(&qi), y: qi }
}

/// Canonical `gamma phi`, and `gamma phi^sigma` in joint mode.
fn row_values(c: &ImagQuadInt, d: &ImagQuadInt, mode: CountMode) -> (BianchiIrr, Option<BianchiIrr>) {
    let alpha = row_alpha(c, d);
    let conj = match mode {
        CountMode::Joint => Some(alpha.conj5().canonical()),
        CountMode::Single => None,
    };
    (alpha.canonical(), conj)
}

/// `m` with `phi^m` the modulus scaling of the stabilizer element used to
/// bound the enumeration: `phi^{4k}` from `(2 1; 1 1)^k`, or `phi^{2k'}` from
/// `(i(1 1; 1 0))^{k'}` over `Z[i]`.
fn stabilizer_exponent(d: i64, g: &ImagQuadInt) -> Result<u32> {
    let m = if d == -4 { fibonacci_k(g, false)? } else { 2 * fibonacci_k(g, true)? };
    u32::try_from(m).map_err(|_| Error::Overflow("stabilizer exponent"))
}

/// `O_D` points within `r` of the complex number `(x, y)`.
fn lattice_disc(d: i64, x: f64, y: f64, r: f64) -> Vec<ImagQuadInt> {
    let delta = d.rem_euclid(4) as f64;
    let hb = (-d as f64).sqrt() / 2.0;
    let mut out = Vec::new();
    let r = r * (1.0 + 1e-9) + 1e-9;
    let (b0, b1) = (((y - r) / hb).floor() as i64, ((y + r) / hb).ceil() as i64);
    for b in b0..=b1 {
        let dy = b as f64 * hb - y;
        if dy.abs() > r {
            continue;
        }
        let w = (r * r - dy * dy).max(0.0).sqrt();
        let cx = x - b as f64 * delta / 2.0;
        for a in ((cx - w).floor() as i64)..=((cx + w).ceil() as i64) {
            out.push(ImagQuadInt::raw(d, a, b));
        }
    }
    out
}

/// Every canonical `gamma phi`, `gamma` in `Gamma_0(g)`, with `N(q) <= nmax`.
///
/// With `U = d + phi^sigma c` and `V = d + phi c`, `q = U V`, and the
/// stabilizer element multiplies `|V / U|` by `phi^{2m}`, so each value has
/// a row with `|U|^2 <= |q|` and `|V|^2 <= phi^{2m} |q|`; then
/// `|c| = |V - U|/sqrt 5 <= (phi^m + 1) sqrt M / sqrt 5`, `M = sqrt nmax`.
fn orbit_rows(d: i64, g: &ImagQuadInt, nmax: u64, mode: CountMode) -> Result<BTreeSet<BianchiIrr>> {
    check_supported(d)?;
    if g.is_zero() {
        return Err(Error::Hypothesis("zero ideal".into()));
    }
    let m = stabilizer_exponent(d, g)?;
    let big_m = (nmax as f64).sqrt();
    let cmax = (PHI.powi(m as i32) + 1.0) * big_m.sqrt() / 5f64.sqrt();
    let gabs = (g.norm() as f64).sqrt();
    let ts = lattice_disc(d, 0.0, 0.0, cmax / gabs);
    if ts.len() > 50_000_000 {
        return Err(Error::Overflow("Bianchi enumeration region"));
    }
    let sets: Vec<BTreeSet<BianchiIrr>> = ts
        .par_chunks(256)
        .map(|chunk| {
            let mut set = BTreeSet::new();
            for t in chunk {
                let c = g.mul(t);
                let (cr, ci) = c.to_complex();
                let cabs = (cr * cr + ci * ci).sqrt();
                // |U| <= sqrt M and |U| |U + sqrt 5 c| <= M
                let mut r = big_m.sqrt();
                let far = 5f64.sqrt() * cabs - r;
                if far > 0.0 {
                    r = r.min(big_m / far);
                }
                let pc = PHI - 1.0;
                for dd in lattice_disc(d, pc * cr, pc * ci, r) {
                    let q = dd.mul(&dd).add(&c.mul(&dd)).sub(&c.mul(&c));
                    if q.is_zero() || q.norm() as u64 > nmax {
                        continue;
                    }
                    if !ext_gcd(&c, &dd).0.is_unit() {
                        continue;
                    }
                    let (a, b) = row_values(&c, &dd, mode);
                    set.insert(a);
                    if let Some(b) = b {
                        set.insert(b);
                    }
                }
            }
            set
        })
        .collect();
    let mut out = BTreeSet::new();
    for s in sets {
        out.extend(s);
    }
    Ok(out)
}

/// The canonical values counted by [`bianchi_orbit_count`].
pub fn bianchi_orbit_set(d: i64, g: &ImagQuadInt, s: &BigRational, mode: CountMode) -> Result<BTreeSet<BianchiIrr>> {
    orbit_rows(d, g, norm_bound(s)?, mode)
}

/// `Card{alpha in Gamma_0(g) . {phi, phi^sigma} mod O_D : h(alpha) <= s}`.
pub fn bianchi_orbit_count(d: i64, g: &ImagQuadInt, s: &BigRational, mode: CountMode) -> Result<u64> {
    Ok(bianchi_orbit_set(d, g, s, mode)?.len() as u64)
}

/// Whether `phi^sigma` lies in `Gamma_0(g) . phi` mod `O_D`. Both have
/// `N(q) = 1`, so the orbit at that height decides.
pub fn is_reciprocal(d: i64, g: &ImagQuadInt) -> Result<bool> {
    let set = orbit_rows(d, g, 1, CountMode::Single)?;
    Ok(set.contains(&BianchiIrr::phi(d).conj5().canonical()))
}

/// Breadth-first closure of the seeds under `z -> -1/(z + l)` (`l` in `O_D`)
/// and `z -> u^2 z` in `PSL(2, O_D)`, keeping states with `h <= prune` for at
/// most `depth` rounds; returns the states with `h <= s`.
pub fn bianchi_bfs(d: i64, seeds: &[BianchiIrr], s: &BigRational, prune: &BigRational, depth: usize) -> Result<BTreeSet<BianchiIrr>> {
    check_supported(d)?;
    let prune_f = prune.to_f64().unwrap_or(f64::INFINITY);
    let squares: Vec<KElem> = units(d).iter().map(|u| KElem::from_int(&u.mul(u))).collect();
    let start: Vec<BianchiIrr> = seeds.iter().map(|a| a.canonical()).filter(|a| a.height_le(prune)).collect();
    let mut seen: BTreeSet<BianchiIrr> = start.iter().cloned().collect();
    let mut frontier = start;
    for _ in 0..depth {
        let mut next = Vec::new();
        for a in &frontier {
            let mut push = |b: BianchiIrr| {
                if b.height_le(prune) && seen.insert(b.clone()) {
                    next.push(b);
                }
            };
            for u in &squares {
                push(a.scale(u).canonical());
            }
            // h(-1/(a + l)) = h(a) |a + l| |a^sigma + l| / |y|
            let (y0, y1) = a.y.to_complex();
            let rr = prune_f * 5f64.sqrt() * (y0 * y0 + y1 * y1).sqrt() / 2.0;
            let mut lambdas = BTreeSet::new();
            for (px, py) in [a.to_complex(), a.conj_complex()] {
                lambdas.extend(lattice_disc(d, -px, -py, rr.sqrt()));
            }
            for l in &lambdas {
                push(a.invert_shifted(l).canonical());
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.into_iter().filter(|a| a.height_le(s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bianchi::{predicted_constant, SUPPORTED};
    use proptest::prelude::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn unit_ideal(d: i64) -> ImagQuadInt {
        ImagQuadInt::rational(d, 1)
    }

    #[test]
    fn phi_is_counted() {
        for d in SUPPORTED {
            // 2/sqrt 5 < 9/10
            let set = bianchi_orbit_set(d, &unit_ideal(d), &BigRational::new(9.into(), 10.into()), CountMode::Joint).unwrap();
            assert!(set.contains(&BianchiIrr::phi(d)));
            assert!(set.iter().all(|a| a.height_squared() == BigRational::new(4.into(), 5.into())));
        }
        assert!(bianchi_orbit_count(-4, &unit_ideal(-4), &r(0), CountMode::Joint).is_err());
        assert!(bianchi_orbit_count(-5, &unit_ideal(-4), &r(1), CountMode::Joint).is_err());
    }

    #[test]
    fn bfs_agrees_gaussian() {
        let d = -4;
        let seeds = [BianchiIrr::phi(d), BianchiIrr::phi(d).conj5()];
        for s in 1..=10 {
            let s = r(s);
            let fast = bianchi_orbit_set(d, &unit_ideal(d), &s, CountMode::Joint).unwrap();
            let bfs = bianchi_bfs(d, &seeds, &s, &(&s * r(2)), 12).unwrap();
            assert_eq!(fast, bfs, "s = {s}");
        }
    }

    #[test]
    fn bfs_agrees_other_fields() {
        for d in [-3, -7, -8, -11] {
            let seeds = [BianchiIrr::phi(d), BianchiIrr::phi(d).conj5()];
            let s = r(5);
            let fast = bianchi_orbit_set(d, &unit_ideal(d), &s, CountMode::Joint).unwrap();
            let bfs = bianchi_bfs(d, &seeds, &s, &r(10), 12).unwrap();
            assert_eq!(fast, bfs, "D = {d}");
        }
    }

    #[test]
    fn quadratic_growth() {
        let d = -4;
        let a = bianchi_orbit_count(d, &unit_ideal(d), &r(100), CountMode::Joint).unwrap() as f64;
        let b = bianchi_orbit_count(d, &unit_ideal(d), &r(200), CountMode::Joint).unwrap() as f64;
        assert!((3.3..=4.7).contains(&(b / a)), "{a} {b}");
    }

    #[test]
    fn reciprocity_fixtures() {
        for d in SUPPORTED {
            assert!(is_reciprocal(d, &ImagQuadInt::rational(d, 1)).unwrap());
            assert!(is_reciprocal(d, &ImagQuadInt::rational(d, 2)).unwrap(), "D = {d}");
        }
        // (2i i; -3i -2i) is in Gamma_0(3) and sends phi to phi^sigma
        assert!(is_reciprocal(-4, &ImagQuadInt::rational(-4, 3)).unwrap());
        for d in [-3, -7, -8, -11] {
            assert!(!is_reciprocal(d, &ImagQuadInt::rational(d, 3)).unwrap(), "D = {d}");
        }
    }

    #[test]
    fn count_tracks_constant() {
        for (d, g) in [(-4, 1), (-3, 1), (-7, 1), (-8, 1), (-11, 1), (-4, 2), (-3, 2), (-7, 3), (-4, 3)] {
            let g = ImagQuadInt::rational(d, g);
            let rec = is_reciprocal(d, &g).unwrap();
            let c = predicted_constant(d, &g, rec).unwrap().value;
            let s = 120;
            let n = bianchi_orbit_count(d, &g, &r(s), CountMode::Joint).unwrap() as f64;
            let ratio = n / (c * (s * s) as f64);
            assert!((ratio - 1.0).abs() < 0.05, "D = {d}, g = {g}: {n} vs {}", c * (s * s) as f64);
        }
    }

    #[test]
    fn unit_rows_rotate() {
        // rows (c, d) and (i c, i d) differ by diag(-i, i): z -> -z
        let d = -4;
        let (c, dd) = (ImagQuadInt::raw(d, 2, 1), ImagQuadInt::raw(d, 3, 0));
        let i = ImagQuadInt::raw(d, 0, 1);
        let (a, _) = row_values(&c, &dd, CountMode::Single);
        let (b, _) = row_values(&c.mul(&i), &dd.mul(&i), CountMode::Single);
        assert_ne!(a, b);
        assert_eq!(a.scale(&KElem::from_int(&i.mul(&i))).canonical(), b);
        let (e, _) = row_values(&c.neg(), &dd.neg(), CountMode::Single);
        assert_eq!(a, e);
    }

    fn gaussian() -> impl Strategy<Value = (i64, i64, i64, i64, i64)> {
        (prop::sample::select(SUPPORTED.to_vec()), -30i64..30, -30i64..30, -30i64..30, -30i64..30)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// `|gamma phi - (gamma phi)^sigma|^2 = |phi - phi^sigma|^2 / |q|^2`.
        #[test]
        fn h_law((d, a, b, e, f) in gaussian()) {
            let c = ImagQuadInt::raw(d, a, b);
            let dd = ImagQuadInt::raw(d, e, f);
            prop_assume!(!c.is_zero() || !dd.is_zero());
            prop_assume!(ext_gcd(&c, &dd).0.is_unit());
            let (g, s, t) = ext_gcd(&dd, &c);
            let gi = g.conj();
            let (ga, gb) = (s.mul(&gi), t.mul(&gi).neg());
            let phi = BiQuadElem::phi(d);
            let k = |x: &ImagQuadInt| BiQuadElem::from_k(&KElem::from_int(x));
            let alpha = k(&ga).mul(&phi).add(&k(&gb)).mul(&k(&c).mul(&phi).add(&k(&dd)).inv().unwrap());
            let diff = alpha.sub(&alpha.conj5());
            let lhs = diff.abs_squared();
            let q = dd.mul(&dd).add(&c.mul(&dd)).sub(&c.mul(&c));
            let rhs = BiQuadElem::rational(d, r(5)).mul(&BiQuadElem::rational(d, r(q.norm())).inv().unwrap());
            prop_assert_eq!(lhs, rhs);
            let raw = row_alpha(&c, &dd);
            prop_assert_eq!(raw.to_biquad(), alpha);
            let shift = raw.x.sub(&raw.canonical().x);
            prop_assert!(shift.c0.is_integer() && shift.c1.is_integer());
        }
    }
}
