//! The golden ratio under congruence subgroups `Gamma_0(a)` of the Bianchi
//! groups `PSL(2, O_D)`, for `D` in -3, -4, -7, -8, -11.

pub mod field;
pub mod orbit;

use std::f64::consts::PI;

pub use field::{ext_gcd, kronecker, parse_int, unit_count, units, BiQuadElem, ImagQuadInt, KElem, SUPPORTED};
pub use orbit::{bianchi_bfs, bianchi_orbit_count, bianchi_orbit_set, is_reciprocal, BianchiIrr};

use crate::error::{Error, Result};
use field::check_supported;

/// `sum_{m >= 0} (m + a)^-2` for `0 < a <= 1`: twenty terms, then
/// Euler-Maclaurin with six Bernoulli corrections (remainder below 1e-19).
fn hurwitz2(a: f64) -> f64 {
    const B: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let n = 20;
    let head: f64 = (0..n).map(|m| 1.0 / ((m as f64 + a) * (m as f64 + a))).sum();
    let x = n as f64 + a;
    let mut tail = 1.0 / x + 1.0 / (2.0 * x * x);
    let mut p = x * x * x;
    for b in B {
        tail += b / p;
        p *= x * x;
    }
    head + tail
}

/// `L(2, chi_D)` summed over residues mod `|D|`.
pub fn l2(d: i64) -> f64 {
    let m = d.unsigned_abs();
    let s: f64 = (1..=m).map(|r| kronecker(d, r) as f64 * hurwitz2(r as f64 / m as f64)).sum();
    s / (m * m) as f64
}

/// `zeta_K(2) = zeta(2) L(2, chi_D)`, to `digits` decimal digits (at most 15).
pub fn zeta_k2(d: i64, digits: u32) -> Result<f64> {
    check_supported(d)?;
    if digits > 15 {
        return Err(Error::Unsupported(format!("{digits} digits (double precision evaluation, at most 15)")));
    }
    Ok(PI * PI / 6.0 * l2(d))
}

/// `|D|^{3/2} zeta_K(2) / (4 pi^2)`, the covolume of `PSL(2, O_D)`.
pub fn humbert_covolume(d: i64) -> Result<f64> {
    Ok(humbert_from_zeta(d, zeta_k2(d, 15)?))
}

pub fn humbert_from_zeta(d: i64, zeta: f64) -> f64 {
    (d.unsigned_abs() as f64).powf(1.5) * zeta / (4.0 * PI * PI)
}

/// Least `k >= 1` with the Fibonacci number `F_{2k}` (or `F_k` when not
/// `even_only`) in the ideal generated by `g`.
pub fn fibonacci_k(g: &ImagQuadInt, even_only: bool) -> Result<u64> {
    if g.is_zero() {
        return Err(Error::Hypothesis("zero ideal".into()));
    }
    let n = g.norm() as u64;
    let cap = 2 * (n * n + 1);
    let reduce = |x: ImagQuadInt| x.div_rem(g).expect("nonzero").1;
    let (mut f0, mut f1) = (ImagQuadInt::rational(g.d, 0), reduce(ImagQuadInt::rational(g.d, 1)));
    for i in 1..=cap {
        // f1 = F_i
        if f1.is_zero() && (!even_only || i % 2 == 0) {
            return Ok(if even_only { i / 2 } else { i });
        }
        let next = reduce(f0.add(&f1));
        f0 = f1;
        f1 = next;
    }
    Err(Error::IterationCap("fibonacci_k"))
}

/// Generators of the prime ideals dividing `(g)`, one per ideal.
pub fn prime_divisors(g: &ImagQuadInt) -> Vec<ImagQuadInt> {
    let d = g.d;
    let mut out: Vec<ImagQuadInt> = Vec::new();
    for p in crate::counting::prime_factors(g.norm() as u64) {
        let p = p as i64;
        let mut cands = Vec::new();
        let bmax = (2.0 * ((p as f64) / (-d as f64)).sqrt()) as i64 + 1;
        let amax = (p as f64).sqrt() as i64 + bmax + 1;
        for b in -bmax..=bmax {
            for a in -amax..=amax {
                let x = ImagQuadInt::raw(d, a, b);
                if x.norm() == p {
                    cands.push(x);
                }
            }
        }
        if cands.is_empty() {
            cands.push(ImagQuadInt::rational(d, p));
        }
        for c in cands {
            if c.divides(g) && !out.iter().any(|o| o.norm() == c.norm() && o.divides(&c)) {
                out.push(c);
            }
        }
    }
    out
}

/// `[PSL(2, O_D) : Gamma_0(a)] = N(a) prod (1 + 1/N(p))`.
pub fn hecke_index(g: &ImagQuadInt) -> u64 {
    let mut num = g.norm() as u64;
    let mut den = 1u64;
    for p in prime_divisors(g) {
        let np = p.norm() as u64;
        num *= np + 1;
        den *= np;
    }
    num / den
}

/// Leading coefficient `c` in `count ~ c s^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BianchiConstant {
    pub k: u64,
    pub index: u64,
    pub reciprocal: bool,
    pub zeta: f64,
    pub value: f64,
}

/// `4 pi^2 n_inf L / (n_G n_0 omega_D |D| zeta_K(2))` with `n_inf = omega_D/2`
/// and `L` the log of the modulus of the larger eigenvalue of the primitive
/// stabilizer of `phi` in `Gamma_0(a)`.
pub fn predicted_constant(d: i64, g: &ImagQuadInt, reciprocal: bool) -> Result<BianchiConstant> {
    check_supported(d)?;
    let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let (k, l) = if d == -4 {
        let k = fibonacci_k(g, false)?;
        (k, k as f64 * log_phi)
    } else {
        let k = fibonacci_k(g, true)?;
        (k, 2.0 * k as f64 * log_phi)
    };
    let index = hecke_index(g);
    let zeta = zeta_k2(d, 15)?;
    let n0 = if reciprocal { 2.0 } else { 1.0 };
    let value = 2.0 * PI * PI * l / (index as f64 * n0 * d.unsigned_abs() as f64 * zeta);
    Ok(BianchiConstant { k, index, reciprocal, zeta, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219;

    #[test]
    fn zeta_gaussian() {
        let z = zeta_k2(-4, 12).unwrap();
        assert!((z - PI * PI / 6.0 * CATALAN).abs() < 1e-13);
        assert!((z - 1.5067030099229).abs() < 1e-12);
        assert!(zeta_k2(-5, 10).is_err());
    }

    #[test]
    fn zeta_eisenstein_regression() {
        let z = zeta_k2(-3, 15).unwrap();
        // L(2, chi_-3) = 0.78130241289648...
        assert!((l2(-3) - 0.781_302_412_896_486_3).abs() < 1e-14);
        assert!((z - 1.285_190_955_484_149_3).abs() < 1e-13);
    }

    /// `sum' 1/N(z)^2 / omega_D` over `N(z) <= X`, against the L-series.
    #[test]
    fn lattice_sum_agrees() {
        for d in SUPPORTED {
            let x = 40_000i64;
            let bmax = (2.0 * (x as f64 / -d as f64).sqrt()) as i64 + 1;
            let mut s = 0.0;
            for b in -bmax..=bmax {
                let amax = (x as f64).sqrt() as i64 + bmax;
                for a in -amax..=amax {
                    let n = ImagQuadInt::raw(d, a, b).norm();
                    if n > 0 && n <= x {
                        s += 1.0 / (n as f64 * n as f64);
                    }
                }
            }
            s /= unit_count(d).unwrap() as f64;
            let z = zeta_k2(d, 12).unwrap();
            assert!((s - z).abs() < 1e-3, "D = {d}: {s} vs {z}");
        }
    }

    #[test]
    fn humbert_values() {
        assert!((humbert_covolume(-4).unwrap() - 0.305_321).abs() < 1e-6);
        assert!((humbert_covolume(-3).unwrap() - 0.169_156_9).abs() < 1e-6);
        let z = zeta_k2(-7, 12).unwrap();
        assert!((humbert_from_zeta(-7, 2.0 * z) - 2.0 * humbert_covolume(-7).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn fibonacci_examples() {
        let g = |n| ImagQuadInt::rational(-4, n);
        assert_eq!(fibonacci_k(&g(2), true).unwrap(), 3);
        assert_eq!(fibonacci_k(&g(3), true).unwrap(), 2);
        assert_eq!(fibonacci_k(&g(1), true).unwrap(), 1);
        assert_eq!(fibonacci_k(&g(1), false).unwrap(), 1);
        assert_eq!(fibonacci_k(&g(2), false).unwrap(), 3);
        assert_eq!(fibonacci_k(&g(5), false).unwrap(), 5);
        assert!(fibonacci_k(&g(0), true).is_err());
        // 1 + i divides F_3 = 2
        assert_eq!(fibonacci_k(&ImagQuadInt::raw(-4, 1, 1), false).unwrap(), 3);
    }

    /// `|P^1(O/a)|` by enumerating residue pairs.
    fn projective_line_size(g: &ImagQuadInt) -> u64 {
        let n = g.norm();
        let reps: Vec<ImagQuadInt> = (0..n).flat_map(|a| (0..n).map(move |b| ImagQuadInt::raw(g.d, a, b))).collect();
        let coprime = |x: &ImagQuadInt| ext_gcd(&ext_gcd(x, g).0, g).0.is_unit();
        let unit_count = reps.iter().filter(|x| coprime(x)).count() as u64;
        let mut pairs = 0u64;
        for c in &reps {
            for d in &reps {
                if ext_gcd(&ext_gcd(c, d).0, g).0.is_unit() {
                    pairs += 1;
                }
            }
        }
        // every class appears n times among the reps
        (pairs / (n * n) as u64) / (unit_count / n as u64)
    }

    #[test]
    fn index_matches_projective_line() {
        for d in SUPPORTED {
            for (a, b) in [(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (0, 2)] {
                let g = ImagQuadInt::raw(d, a, b);
                if g.norm() > 9 {
                    continue;
                }
                assert_eq!(hecke_index(&g), projective_line_size(&g), "D = {d}, g = {g}");
            }
        }
    }

    #[test]
    fn constant_for_unit_ideal() {
        let one = ImagQuadInt::rational(-7, 1);
        let c = predicted_constant(-7, &one, false).unwrap();
        let direct = 4.0 * PI * PI * ((1.0 + 5f64.sqrt()) / 2.0).ln() / (7.0 * zeta_k2(-7, 15).unwrap());
        assert!((c.value - direct).abs() < 1e-12);
        assert_eq!((c.k, c.index), (1, 1));
    }
}
