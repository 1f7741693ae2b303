//! Hyperbolic volumes, translation lengths and the constants of the
//! counting asymptotics, plus an equidistribution experiment on the
//! modular surface. Floating point throughout.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qforms::Form;

/// Volume of the unit sphere `S^m` in `R^{m+1}`.
pub fn sphere_volume(m: u32) -> f64 {
    // S_m = 2 pi S_{m-2} / (m - 1)
    let mut v = if m % 2 == 0 { 2.0 } else { 2.0 * PI };
    let mut j = 2 + m % 2;
    while j <= m {
        v *= 2.0 * PI / (j - 1) as f64;
        j += 2;
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeVolume {
    pub quadrature: f64,
    /// `Vol(S_{n-2}) Vol(C) sinh^{n-1}(t) / (n - 1)`, for `k = 1`.
    pub closed_form: Option<f64>,
}

/// Volume of the `t`-neighborhood of a complete totally geodesic
/// `k`-dimensional `C` of volume `vol_c` in hyperbolic `n`-space.
pub fn tube_volume(n: u32, k: u32, vol_c: f64, t: f64) -> Result<TubeVolume> {
    if n < 2 || k >= n {
        return Err(Error::Hypothesis(format!("need 0 <= k < n, n >= 2 (n = {n}, k = {k})")));
    }
    if !(t >= 0.0 && vol_c > 0.0 && t.is_finite() && vol_c.is_finite()) {
        return Err(Error::Hypothesis("need t >= 0 and vol_c > 0".into()));
    }
    let m = (n - k - 1) as i32;
    let e = (n - 1) as i32;
    if t == 0.0 {
        return Ok(TubeVolume { quadrature: 0.0, closed_form: (k == 1).then_some(0.0) });
    }
    // integrand scaled by e^{-(n-1)t}
    let f = |s: f64| s.tanh().powi(m) * ((s - t).exp() * (1.0 + (-2.0 * s).exp()) / 2.0).powi(e);
    let crude = quadrature::double_exponential::integrate(f, 0.0, t, 1e-6).integral;
    let out = quadrature::double_exponential::integrate(f, 0.0, t, (crude.abs() * 1e-13).max(1e-300));
    let quad = sphere_volume(n - k - 1) * vol_c * out.integral * (e as f64 * t).exp();
    let closed_form = (k == 1).then(|| sphere_volume(n - 2) * vol_c * t.sinh().powi(e) / e as f64);
    if let Some(c) = closed_form {
        if (quad - c).abs() > 1e-9 * c.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Hypothesis(format!("quadrature {quad} disagrees with closed form {c}")));
        }
    }
    Ok(TubeVolume { quadrature: quad, closed_form })
}

/// Translation length of a loxodromic or hyperbolic element from its trace;
/// `dim` 2 takes real traces, `dim` 3 complex ones.
pub fn translation_length(trace: Complex64, dim: u32) -> Result<f64> {
    match dim {
        2 => {
            if trace.im != 0.0 {
                return Err(Error::Hypothesis("real trace expected in dimension 2".into()));
            }
            let x = trace.re.abs();
            if x <= 2.0 {
                return Err(Error::Hypothesis(format!("|trace| = {x} <= 2 is not hyperbolic")));
            }
            Ok(2.0 * (x / 2.0).acosh())
        }
        3 => {
            let r = (trace * trace - 4.0).sqrt();
            let l1 = 2.0 * ((trace + r) / 2.0).norm().ln().abs();
            let l2 = 2.0 * ((trace - r) / 2.0).norm().ln().abs();
            if l1 < 1e-12 {
                return Err(Error::Hypothesis("eigenvalues of modulus one".into()));
            }
            debug_assert!((l1 - l2).abs() <= 1e-9 * l1);
            Ok(l1.max(l2))
        }
        _ => Err(Error::Unsupported(format!("dimension {dim}"))),
    }
}

/// Signed distance from the horosphere at height `h` centered at infinity
/// to the geodesic with endpoints `x`, `y`.
pub fn horoball_geodesic_distance(h: f64, x: Complex64, y: Complex64) -> Result<f64> {
    let gap = (y - x).norm();
    if gap == 0.0 || h <= 0.0 {
        return Err(Error::Hypothesis("distinct endpoints and positive height required".into()));
    }
    Ok((2.0 * h / gap).ln())
}

/// Data of a counting problem in a finite-volume hyperbolic `n`-manifold.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeometryParams {
    pub n: u32,
    pub k: u32,
    pub vol_c: f64,
    pub vol_h: Option<f64>,
    pub vol_dh: Option<f64>,
    pub vol_m: f64,
    pub ell0: f64,
    pub a_inf: f64,
    pub n_g0: u32,
}

impl GeometryParams {
    /// `Vol(H)`, from `Vol(dH)/(n - 1)` when not given.
    pub fn cusp_volume(&self) -> Result<f64> {
        let from_boundary = self.vol_dh.map(|b| b / (self.n as f64 - 1.0));
        match (self.vol_h, from_boundary) {
            (Some(h), Some(b)) if (h - b).abs() > 1e-12 * h.abs() => {
                Err(Error::Hypothesis(format!("Vol(H) = {h} but Vol(dH)/(n-1) = {b}")))
            }
            (Some(h), _) | (None, Some(h)) => Ok(h),
            (None, None) => Err(Error::MissingParameter("vol_h or vol_dh")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryTheorem {
    /// Coefficient of `e^{(n-1)t}` for common perpendiculars from a horoball
    /// to a totally geodesic submanifold.
    Perpendiculars,
    /// Coefficient of `t^{n-1}` for the orbit of a hyperbolic fixed point.
    FixedPointOrbit,
}

pub fn counting_constant(p: &GeometryParams, theorem: GeometryTheorem) -> Result<f64> {
    let positive = |v: f64, what: &'static str| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Hypothesis(format!("{what} must be positive")))
        }
    };
    if p.n < 2 {
        return Err(Error::Hypothesis("dimension must be at least 2".into()));
    }
    let vol_m = positive(p.vol_m, "Vol(M)")?;
    match theorem {
        GeometryTheorem::Perpendiculars => {
            if p.k >= p.n {
                return Err(Error::Hypothesis("need k < n".into()));
            }
            let vol_h = positive(p.cusp_volume()?, "Vol(H)")?;
            let vol_c = positive(p.vol_c, "Vol(C)")?;
            Ok(sphere_volume(p.n - p.k - 1) * vol_h * vol_c / (sphere_volume(p.n - 1) * vol_m))
        }
        GeometryTheorem::FixedPointOrbit => {
            let ell0 = positive(p.ell0, "ell0")?;
            let a_inf = positive(p.a_inf, "A_inf")?;
            let n_g0 = positive(p.n_g0 as f64, "n_G0")?;
            let n = p.n as f64;
            Ok(2f64.powi(p.n as i32) * ell0 * sphere_volume(p.n - 2) * a_inf
                / ((n - 1.0) * n_g0 * sphere_volume(p.n - 1) * vol_m))
        }
    }
}

/// `z -> (a z + b)/(c z + d)`.
pub fn mobius(m: [f64; 4], z: Complex64) -> Complex64 {
    (z * m[0] + m[1]) / (z * m[2] + m[3])
}

/// Image of `z` in `{|Re z| <= 1/2, |z| >= 1}` under `PSL(2, Z)`. Points on
/// the vertical edges go to `Re z = -1/2`, points on the unit arc to
/// `Re z <= 0`.
pub fn reduce_to_fundamental_domain(mut z: Complex64) -> Complex64 {
    for _ in 0..10_000 {
        z.re -= z.re.round();
        if z.norm_sqr() < 1.0 {
            z = -z.inv();
        } else {
            break;
        }
    }
    if z.re >= 0.5 {
        z.re -= 1.0;
    }
    if z.norm_sqr() == 1.0 && z.re > 0.0 {
        z = -z.inv();
    }
    z
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquiConfig {
    pub t: f64,
    pub samples: u64,
    pub bins: usize,
    pub ymax: f64,
    pub seed: u64,
    pub one_sided: bool,
}

impl Default for EquiConfig {
    fn default() -> Self {
        EquiConfig { t: 10.0, samples: 1_000_000, bins: 20, ymax: 4.0, seed: 0, one_sided: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinRow {
    pub bin_x: usize,
    pub bin_y: usize,
    pub mass_empirical: f64,
    pub mass_reference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquiResult {
    pub tv: f64,
    /// Samples landing in the truncated domain.
    pub kept: u64,
    pub samples: u64,
    pub rows: Vec<BinRow>,
}

const CHUNK: u64 = 1 << 14;

/// Hyperbolic area of `{|x| <= 1/2, |z| >= 1, y <= ymax}` inside the cell
/// `[x0, x1] x [y0, y1]`.
fn cell_area(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let f = |x: f64| {
        let lo = y0.max((1.0 - x * x).max(0.0).sqrt());
        if lo >= y1 {
            0.0
        } else {
            1.0 / lo - 1.0 / y1
        }
    };
    let mut cuts = vec![x0, x1];
    for r in [(1.0 - y0 * y0).max(0.0).sqrt(), (1.0 - y1 * y1).max(0.0).sqrt()] {
        for c in [-r, r] {
            if c > x0 && c < x1 {
                cuts.push(c);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| quadrature::double_exponential::integrate(f, w[0], w[1], 1e-13).integral).sum()
}

/// Push a uniform sample of unit normal vectors along the closed geodesic of
/// the fundamental automorph of `form` by distance `t`, project to the
/// modular surface and compare with the normalized hyperbolic area on the
/// domain truncated at height `ymax`.
pub fn equidistribution_demo(form: &Form, cfg: &EquiConfig) -> Result<EquiResult> {
    form.require_indefinite()?;
    if cfg.samples == 0 || cfg.bins == 0 {
        return Err(Error::Hypothesis("samples and bins must be positive".into()));
    }
    let s3 = 3f64.sqrt() / 2.0;
    if cfg.ymax.is_nan() || cfg.ymax <= s3 || cfg.t.is_nan() || cfg.t < 0.0 {
        return Err(Error::Hypothesis("need t >= 0 and ymax > sqrt(3)/2".into()));
    }
    let (_, f) = form.primitive_part();
    let pell = f.fundamental_solution()?;
    let d = f.discriminant().to_f64().ok_or(Error::Overflow("discriminant"))?;
    let (a, b) = (f.a.to_f64().unwrap(), f.b.to_f64().unwrap());
    let (r1, r2) = ((-b + d.sqrt()) / (2.0 * a), (-b - d.sqrt()) / (2.0 * a));
    let (center, radius) = ((r1 + r2) / 2.0, (r1 - r2).abs() / 2.0);
    let eps = (pell.t.to_f64().unwrap() + pell.u.to_f64().unwrap() * d.sqrt()) / 2.0;
    let period = 2.0 * eps.ln();
    let nb = cfg.bins;
    let (dx, dy) = (1.0 / nb as f64, (cfg.ymax - s3) / nb as f64);
    let chunks = cfg.samples.div_ceil(CHUNK);
    let (hist, kept) = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(ci);
            let mut h = vec![0u64; nb * nb];
            let mut kept = 0u64;
            let n = CHUNK.min(cfg.samples - ci * CHUNK);
            for _ in 0..n {
                let u = rng.gen::<f64>() * period;
                let side = if cfg.one_sided || rng.gen::<bool>() { 1.0 } else { -1.0 };
                // point at arc length u from the top of the axis
                let z = Complex64::new(center + radius * u.tanh(), radius / u.cosh());
                // Euclidean angle of the unit tangent, then of the normal
                let theta = (-u.sinh()).atan2(1.0) + side * PI / 2.0;
                let phi = theta - PI / 2.0;
                let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
                let w = mobius([c, s, -s, c], Complex64::new(0.0, cfg.t.exp()));
                let w = reduce_to_fundamental_domain(Complex64::new(z.re + z.im * w.re, z.im * w.im));
                if w.im > cfg.ymax {
                    continue;
                }
                let bx = (((w.re + 0.5) / dx) as usize).min(nb - 1);
                let by = (((w.im - s3) / dy).max(0.0) as usize).min(nb - 1);
                h[by * nb + bx] += 1;
                kept += 1;
            }
            (h, kept)
        })
        .reduce(
            || (vec![0u64; nb * nb], 0),
            |(mut h1, k1), (h2, k2)| {
                h1.iter_mut().zip(&h2).for_each(|(x, y)| *x += y);
                (h1, k1 + k2)
            },
        );
    let total = PI / 3.0 - 1.0 / cfg.ymax;
    let mut rows = Vec::with_capacity(nb * nb);
    let mut tv = 0.0;
    for by in 0..nb {
        for bx in 0..nb {
            let x0 = -0.5 + bx as f64 * dx;
            let y0 = s3 + by as f64 * dy;
            let reference = cell_area(x0, x0 + dx, y0, y0 + dy) / total;
            let empirical = if kept == 0 { 0.0 } else { hist[by * nb + bx] as f64 / kept as f64 };
            tv += (empirical - reference).abs();
            rows.push(BinRow { bin_x: bx, bin_y: by, mass_empirical: empirical, mass_reference: reference });
        }
    }
    Ok(EquiResult { tv: tv / 2.0, kept, samples: cfg.samples, rows })
}
