use std::collections::BTreeSet;

use hypercount::bianchi::{self, BianchiIrr, ImagQuadInt};
use hypercount::counting::{self, CountMode, Engine, GroupSpec};
use hypercount::hypgeom::{self, EquiConfig, GeometryParams, GeometryTheorem};
use hypercount::matrix::Mat2;
use hypercount::pell;
use hypercount::qforms::{self, Form};
use hypercount::quadirr::{is_reciprocal_irr, QuadIrr};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::output::render;
use crate::parse::{floor_u64, positive_rational, threshold_list};
use crate::{AsymArgs, AsymKind, BianchiCmd, Cli, Command, CountCmd, EngineArg, EquiArgs, FormCmd, GeomCmd, GeomTheorem, IrrCmd, ModeArg, PellArgs};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// Engines disagreed; `stdout` still carries both results.
    Disagreement { stdout: String, msg: String },
}

impl From<hypercount::Error> for Failure {
    fn from(e: hypercount::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

type Out = Result<String, Failure>;

fn matrix(m: &Mat2) -> [String; 4] {
    [m.a.to_string(), m.b.to_string(), m.c.to_string(), m.d.to_string()]
}

fn form(s: &str) -> Result<Form, Failure> {
    Ok(s.parse::<Form>()?)
}

fn alpha(s: &str) -> Result<QuadIrr, Failure> {
    Ok(s.parse::<QuadIrr>()?)
}

fn group(s: &str) -> Result<GroupSpec, Failure> {
    Ok(s.parse::<GroupSpec>()?)
}

fn mode(m: ModeArg) -> CountMode {
    match m {
        ModeArg::Joint => CountMode::Joint,
        ModeArg::Single => CountMode::Single,
    }
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Joint => "joint",
        ModeArg::Single => "single",
    }
}

fn engine_name(e: EngineArg) -> &'static str {
    match e {
        EngineArg::Fast => "fast",
        EngineArg::Oracle => "oracle",
        EngineArg::Both => "both",
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DivisorOut {
    pub p: String,
    pub k: String,
    pub t: String,
    pub u: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PellOut {
    pub d: String,
    pub t: String,
    pub u: String,
    pub regulator: f64,
    pub negative_unit: bool,
    pub period: usize,
    pub divisor: Option<DivisorOut>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ClassifyOut {
    pub form: String,
    pub discriminant: String,
    pub content: String,
    pub primitive: bool,
    pub indefinite: bool,
    pub irreducible: bool,
    pub kind: String,
    pub reduced: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReduceOut {
    pub form: String,
    pub reduced: String,
    pub matrix: [String; 4],
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EquivalentOut {
    pub form: String,
    pub other: String,
    pub equivalent: bool,
    pub witness: Option<[String; 4]>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AutomorphOut {
    pub form: String,
    pub t: String,
    pub u: String,
    pub matrix: [String; 4],
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AlphaOut {
    pub form: String,
    pub alpha: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CfOut {
    pub alpha: String,
    pub preperiod: Vec<String>,
    pub period: Vec<String>,
    pub palindromic: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct HeightOut {
    pub alpha: String,
    pub h: f64,
    pub h_squared: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReciprocalOut {
    pub alpha: String,
    pub reciprocal: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CanonicalOut {
    pub alpha: String,
    pub q: u64,
    pub canonical: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RepsOut {
    pub form: String,
    pub group: String,
    pub s: String,
    pub engine: String,
    pub count: String,
    pub oracle_count: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OrbitOut {
    pub alpha: String,
    pub group: String,
    pub s: String,
    pub mode: String,
    pub engine: String,
    pub count: String,
    pub oracle_count: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub s: String,
    pub count: String,
    pub ratio: f64,
    pub predicted: f64,
    pub rel_gap: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AsymOut {
    pub kind: String,
    pub input: String,
    pub group: String,
    pub theorem: String,
    pub predicted: f64,
    pub exponent: u32,
    pub rows: Vec<SeriesRow>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EquiRow {
    pub bin_x: usize,
    pub bin_y: usize,
    pub mass_empirical: f64,
    pub mass_reference: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EquiOut {
    pub form: String,
    pub t: f64,
    pub seed: u64,
    pub samples: u64,
    pub kept: u64,
    pub tv: f64,
    pub rows: Vec<EquiRow>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ZetaOut {
    pub d: i64,
    pub digits: u32,
    pub zeta: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VolumeOut {
    pub d: i64,
    pub zeta: f64,
    pub covolume: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FibOut {
    pub d: i64,
    pub ideal: String,
    pub norm: String,
    /// Least `k` with `F_{2k}` in the ideal.
    pub k: String,
    /// Least `k` with `F_k` in the ideal.
    pub k_prime: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct BianchiRow {
    pub s: String,
    pub count: String,
    pub oracle_count: Option<String>,
    pub ratio: f64,
    pub predicted: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct BianchiCountOut {
    pub d: i64,
    pub ideal: String,
    pub mode: String,
    pub count: String,
    pub k_a: String,
    pub index: String,
    pub reciprocal_flag: bool,
    pub predicted_constant: f64,
    pub rows: Vec<BianchiRow>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TubeOut {
    pub n: u32,
    pub k: u32,
    pub vol_c: f64,
    pub t: f64,
    pub quadrature: f64,
    pub closed_form: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ConstantOut {
    pub theorem: String,
    pub value: f64,
}

pub fn dispatch(cli: &Cli) -> Out {
    let f = cli.format;
    match &cli.command {
        Command::Pell(a) => Ok(render("pell", &pell_cmd(a)?, f)?),
        Command::Form(c) => form_cmd(c, cli),
        Command::Irr(c) => irr_cmd(c, cli),
        Command::Count(c) => count_cmd(c, cli),
        Command::Asym(a) => Ok(render("asym", &asym_cmd(a)?, f)?),
        Command::Equi(a) => Ok(render("equi", &equi_cmd(a)?, f)?),
        Command::Bianchi(c) => bianchi_cmd(c, cli),
        Command::Geom(c) => geom_cmd(c, cli),
    }
}

pub fn pell_cmd(a: &PellArgs) -> Result<PellOut, Failure> {
    let d: BigInt = a.d.trim().parse().map_err(|_| format!("bad discriminant {:?}", a.d))?;
    let unit = pell::fundamental_unit(&d)?;
    let sol = pell::fundamental_pell4(&d)?;
    let divisor = match a.p {
        Some(p) => {
            let (s, k) = pell::pell_with_divisor(&d, p)?;
            Some(DivisorOut { p: p.to_string(), k: k.to_string(), t: s.t.to_string(), u: s.u.to_string() })
        }
        None => None,
    };
    Ok(PellOut {
        d: d.to_string(),
        t: sol.t.to_string(),
        u: sol.u.to_string(),
        regulator: sol.regulator(),
        negative_unit: unit.norm == -1,
        period: unit.period,
        divisor,
    })
}

fn form_cmd(c: &FormCmd, cli: &Cli) -> Out {
    let f = cli.format;
    match c {
        FormCmd::Classify(a) => {
            let q = form(&a.form)?;
            let c = q.classify();
            let out = ClassifyOut {
                form: q.to_string(),
                discriminant: c.discriminant.to_string(),
                content: c.content.to_string(),
                primitive: c.primitive,
                indefinite: c.indefinite,
                irreducible: c.irreducible,
                kind: format!("{:?}", c.kind).to_lowercase(),
                reduced: c.reduced,
            };
            Ok(render("form classify", &out, f)?)
        }
        FormCmd::Reduce(a) => {
            let q = form(&a.form)?;
            let (r, m) = q.reduce()?;
            Ok(render("form reduce", &ReduceOut { form: q.to_string(), reduced: r.to_string(), matrix: matrix(&m) }, f)?)
        }
        FormCmd::Equivalent { form: a, other } => {
            let (q1, q2) = (form(&a.form)?, form(other)?);
            let w = qforms::equivalent(&q1, &q2)?;
            let out = EquivalentOut { form: q1.to_string(), other: q2.to_string(), equivalent: w.is_some(), witness: w.as_ref().map(matrix) };
            Ok(render("form equivalent", &out, f)?)
        }
        FormCmd::Automorph { form: a, t, u } => {
            let q = form(&a.form)?;
            let (t, u) = match (t, u) {
                (Some(t), Some(u)) => {
                    let p = |s: &String| s.trim().parse::<BigInt>().map_err(|_| Failure::Usage(format!("bad integer {s:?}")));
                    (p(t)?, p(u)?)
                }
                (None, None) => {
                    let s = q.fundamental_solution()?;
                    (s.t, s.u)
                }
                _ => return Err(Failure::Usage("give both --t and --u, or neither".into())),
            };
            let m = qforms::automorph(&q, &t, &u)?;
            Ok(render("form automorph", &AutomorphOut { form: q.to_string(), t: t.to_string(), u: u.to_string(), matrix: matrix(&m) }, f)?)
        }
        FormCmd::Alpha(a) => {
            let q = form(&a.form)?;
            let al = qforms::alpha_of(&q)?;
            Ok(render("form alpha", &AlphaOut { form: q.to_string(), alpha: al.to_string() }, f)?)
        }
    }
}

fn irr_cmd(c: &IrrCmd, cli: &Cli) -> Out {
    let f = cli.format;
    match c {
        IrrCmd::Cf(a) => {
            let x = alpha(&a.alpha)?;
            let cf = x.cf_expand();
            let strs = |v: &[BigInt]| v.iter().map(|b| b.to_string()).collect::<Vec<_>>();
            let out = CfOut { alpha: x.to_string(), preperiod: strs(&cf.preperiod), period: strs(&cf.period), palindromic: cf.is_palindromic_period() };
            Ok(render("irr cf", &out, f)?)
        }
        IrrCmd::H(a) => {
            let x = alpha(&a.alpha)?;
            let h = x.height();
            Ok(render("irr h", &HeightOut { alpha: x.to_string(), h: h.to_f64(), h_squared: h.squared().to_string() }, f)?)
        }
        IrrCmd::Reciprocal(a) => {
            let x = alpha(&a.alpha)?;
            Ok(render("irr reciprocal", &ReciprocalOut { alpha: x.to_string(), reciprocal: is_reciprocal_irr(&x) }, f)?)
        }
        IrrCmd::Canonical { alpha: a, q } => {
            if *q == 0 {
                return Err(Failure::Usage("--q must be positive".into()));
            }
            let x = alpha(&a.alpha)?;
            Ok(render("irr canonical", &CanonicalOut { alpha: x.to_string(), q: *q, canonical: x.canonical_mod_translation(*q).to_string() }, f)?)
        }
    }
}

fn disagree<T: Serialize>(command: &str, out: &T, cli: &Cli, what: String) -> Failure {
    match render(command, out, cli.format) {
        Ok(stdout) => Failure::Disagreement { stdout, msg: what },
        Err(e) => Failure::Usage(e),
    }
}

fn count_cmd(c: &CountCmd, cli: &Cli) -> Out {
    match c {
        CountCmd::Reps { form: a, s, group: g, engine } => {
            let q = form(&a.form)?;
            let s = positive_rational(s)?;
            let g = group(g)?;
            let n = floor_u64(&s)?;
            let run = |e| counting::psi_values(&q, n, &g, e).map(|v| v.len() as u64);
            let (count, oracle) = match engine {
                EngineArg::Fast => (run(Engine::Fast)?, None),
                EngineArg::Oracle => (run(Engine::Oracle)?, None),
                EngineArg::Both => (run(Engine::Fast)?, Some(run(Engine::Oracle)?)),
            };
            let out = RepsOut {
                form: q.to_string(),
                group: g.to_string(),
                s: s.to_string(),
                engine: engine_name(*engine).into(),
                count: count.to_string(),
                oracle_count: oracle.map(|o| o.to_string()),
            };
            if oracle.is_some_and(|o| o != count) {
                return Err(disagree("count reps", &out, cli, format!("engines disagree: fast {count}, oracle {}", oracle.unwrap_or(0))));
            }
            Ok(render("count reps", &out, cli.format)?)
        }
        CountCmd::Orbit { alpha: a, s, group: g, mode: m, engine } => {
            let x = alpha(&a.alpha)?;
            let s = positive_rational(s)?;
            let g = group(g)?;
            let bfs = || -> Result<u64, Failure> {
                if g != GroupSpec::Full || *m != ModeArg::Joint {
                    return Err(Failure::Usage("the oracle covers the full group in joint mode only".into()));
                }
                let h0 = BigRational::from_integer(x.height().squared().ceil().to_integer() + 1);
                let prune = (&s * BigRational::from_integer(2.into())).max(h0);
                Ok(counting::orbit_count_bfs(&x, &s, &prune, 64)?.len() as u64)
            };
            let fast = || counting::orbit_count(&x, &g, &s, mode(*m));
            let (count, oracle) = match engine {
                EngineArg::Fast => (fast()?, None),
                EngineArg::Oracle => (bfs()?, None),
                EngineArg::Both => (fast()?, Some(bfs()?)),
            };
            let out = OrbitOut {
                alpha: x.to_string(),
                group: g.to_string(),
                s: s.to_string(),
                mode: mode_name(*m).into(),
                engine: engine_name(*engine).into(),
                count: count.to_string(),
                oracle_count: oracle.map(|o| o.to_string()),
            };
            if oracle.is_some_and(|o| o != count) {
                return Err(disagree("count orbit", &out, cli, format!("engines disagree: fast {count}, oracle {}", oracle.unwrap_or(0))));
            }
            Ok(render("count orbit", &out, cli.format)?)
        }
    }
}

fn series_rows(series: &counting::CountSeries) -> Vec<SeriesRow> {
    counting::report(series)
        .into_iter()
        .map(|r| SeriesRow { s: r.s, count: r.count.to_string(), ratio: r.ratio, predicted: r.predicted, rel_gap: r.rel_gap })
        .collect()
}

pub fn asym_cmd(a: &AsymArgs) -> Result<AsymOut, Failure> {
    let ts = threshold_list(&a.s_list)?;
    let g = group(&a.group)?;
    let (input, series) = match a.kind {
        AsymKind::Reps => {
            let q = form(a.form.as_deref().ok_or_else(|| Failure::Usage("--form is required for reps".into()))?)?;
            let top = floor_u64(ts.last().expect("nonempty"))?;
            let values = counting::psi_values(&q, top, &g, Engine::Fast)?;
            let theorem = counting::psi_theorem(&q, &g)?;
            let series = counting::run_series(|s| Ok(counting::count_at(&values, s.floor().to_integer().to_u64().unwrap_or(0))), &ts, &theorem, 1)?;
            (q.to_string(), series)
        }
        AsymKind::Orbit => {
            let x = alpha(a.alpha.as_deref().ok_or_else(|| Failure::Usage("--alpha is required for orbit".into()))?)?;
            let m = mode(a.mode);
            let (theorem, _, _) = counting::orbit_theorem(&x, &g, m)?;
            let series = counting::run_series(|s| counting::orbit_count(&x, &g, s, m), &ts, &theorem, 1)?;
            (x.to_string(), series)
        }
    };
    let kind = match a.kind {
        AsymKind::Reps => "reps",
        AsymKind::Orbit => "orbit",
    };
    Ok(AsymOut {
        kind: kind.into(),
        input,
        group: g.to_string(),
        theorem: series.provenance.clone(),
        predicted: series.predicted.to_f64(),
        exponent: series.exponent,
        rows: series_rows(&series),
    })
}

pub fn equi_cmd(a: &EquiArgs) -> Result<EquiOut, Failure> {
    let q = form(&a.form.form)?;
    let cfg = EquiConfig { t: a.t, samples: a.samples, bins: a.bins, ymax: a.ymax, seed: a.seed, one_sided: a.one_sided };
    let r = hypgeom::equidistribution_demo(&q, &cfg)?;
    Ok(EquiOut {
        form: q.to_string(),
        t: a.t,
        seed: a.seed,
        samples: r.samples,
        kept: r.kept,
        tv: r.tv,
        rows: r
            .rows
            .into_iter()
            .map(|b| EquiRow { bin_x: b.bin_x, bin_y: b.bin_y, mass_empirical: b.mass_empirical, mass_reference: b.mass_reference })
            .collect(),
    })
}

fn ideal(d: i64, s: &str) -> Result<ImagQuadInt, Failure> {
    Ok(bianchi::parse_int(d, s)?)
}

fn bianchi_cmd(c: &BianchiCmd, cli: &Cli) -> Out {
    let f = cli.format;
    match c {
        BianchiCmd::Zeta { field, digits } => {
            let z = bianchi::zeta_k2(field.d, *digits)?;
            Ok(render("bianchi zeta", &ZetaOut { d: field.d, digits: *digits, zeta: z }, f)?)
        }
        BianchiCmd::Volume(field) => {
            let z = bianchi::zeta_k2(field.d, 15)?;
            Ok(render("bianchi volume", &VolumeOut { d: field.d, zeta: z, covolume: bianchi::humbert_from_zeta(field.d, z) }, f)?)
        }
        BianchiCmd::Fib { field, ideal: i } => {
            let g = ideal(field.d, i)?;
            let out = FibOut {
                d: field.d,
                ideal: g.to_string(),
                norm: g.norm().to_string(),
                k: bianchi::fibonacci_k(&g, true)?.to_string(),
                k_prime: bianchi::fibonacci_k(&g, false)?.to_string(),
            };
            Ok(render("bianchi fib", &out, f)?)
        }
        BianchiCmd::Count { field, ideal: i, s, mode: m, engine } => {
            let out = bianchi_count(field.d, i, s, *m, *engine)?;
            if let Some(r) = out.rows.iter().find(|r| r.oracle_count.as_ref().is_some_and(|o| *o != r.count)) {
                let msg = format!("engines disagree at s = {}", r.s);
                return Err(disagree("bianchi count", &out, cli, msg));
            }
            Ok(render("bianchi count", &out, f)?)
        }
    }
}

pub fn bianchi_count(d: i64, i: &str, s: &str, m: ModeArg, engine: EngineArg) -> Result<BianchiCountOut, Failure> {
    let g = ideal(d, i)?;
    let ts = threshold_list(s)?;
    let reciprocal = bianchi::is_reciprocal(d, &g)?;
    let c = bianchi::predicted_constant(d, &g, reciprocal)?;
    // single orbit: half the joint count unless reciprocal
    let predicted = match (m, reciprocal) {
        (ModeArg::Single, false) => c.value / 2.0,
        _ => c.value,
    };
    let seeds: Vec<BianchiIrr> = match m {
        ModeArg::Joint => vec![BianchiIrr::phi(d), BianchiIrr::phi(d).conj5()],
        ModeArg::Single => vec![BianchiIrr::phi(d)],
    };
    let mut rows = Vec::new();
    for t in &ts {
        let count = match engine {
            EngineArg::Oracle => None,
            _ => Some(bianchi::bianchi_orbit_count(d, &g, t, mode(m))?),
        };
        let oracle = match engine {
            EngineArg::Fast => None,
            _ => {
                if g.norm() != 1 {
                    return Err(Failure::Usage("the oracle covers the unit ideal only".into()));
                }
                let prune = t * BigRational::from_integer(2.into());
                let set: BTreeSet<BianchiIrr> = bianchi::bianchi_bfs(d, &seeds, t, &prune, 24)?;
                Some(set.len() as u64)
            }
        };
        let n = count.or(oracle).expect("one engine ran");
        let sf = t.to_f64().unwrap_or(f64::NAN);
        rows.push(BianchiRow {
            s: t.to_string(),
            count: n.to_string(),
            oracle_count: if engine == EngineArg::Both { oracle.map(|o| o.to_string()) } else { None },
            ratio: n as f64 / (sf * sf),
            predicted,
        });
    }
    Ok(BianchiCountOut {
        d,
        ideal: g.to_string(),
        mode: mode_name(m).into(),
        count: rows.last().map(|r| r.count.clone()).unwrap_or_default(),
        k_a: c.k.to_string(),
        index: c.index.to_string(),
        reciprocal_flag: reciprocal,
        predicted_constant: predicted,
        rows,
    })
}

fn geom_cmd(c: &GeomCmd, cli: &Cli) -> Out {
    let f = cli.format;
    match c {
        GeomCmd::Tube { n, k, vol_c, t } => {
            let v = hypgeom::tube_volume(*n, *k, *vol_c, *t)?;
            Ok(render("geom tube", &TubeOut { n: *n, k: *k, vol_c: *vol_c, t: *t, quadrature: v.quadrature, closed_form: v.closed_form }, f)?)
        }
        GeomCmd::Constant { theorem, n, k, vol_c, vol_h, vol_dh, vol_m, ell0, a_inf, n_g0 } => {
            let p = GeometryParams { n: *n, k: *k, vol_c: *vol_c, vol_h: *vol_h, vol_dh: *vol_dh, vol_m: *vol_m, ell0: *ell0, a_inf: *a_inf, n_g0: *n_g0 };
            let (th, name) = match theorem {
                GeomTheorem::Perpendiculars => (GeometryTheorem::Perpendiculars, "perpendiculars"),
                GeomTheorem::FixedPointOrbit => (GeometryTheorem::FixedPointOrbit, "fixed-point-orbit"),
            };
            let value = hypgeom::counting_constant(&p, th)?;
            Ok(render("geom constant", &ConstantOut { theorem: name.into(), value }, f)?)
        }
    }
}
