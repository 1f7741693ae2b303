//! Integral binary quadratic forms `A X^2 + B XY + C Y^2`.
//!
//! Matrices act on the right: `act(Q, g)(X, Y) = Q(aX + bY, cX + dY)`, so
//! `act(act(Q, g), h) = act(Q, g h)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::pell::{fundamental_pell4, PellSolution};
use crate::quadfield::{is_square, isqrt};
use crate::quadirr::QuadIrr;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// Non-square positive discriminant.
    Indefinite,
    PositiveDefinite,
    NegativeDefinite,
    /// Square positive discriminant: the form splits over the rationals.
    Reducible,
    /// Zero discriminant.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub discriminant: BigInt,
    pub content: BigInt,
    pub primitive: bool,
    pub indefinite: bool,
    /// The discriminant is not a perfect square.
    pub irreducible: bool,
    pub kind: FormKind,
    pub reduced: bool,
}

impl Form {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Form {
        Form { a, b, c }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Form {
        Form::new(a.into(), b.into(), c.into())
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// `(k, Q')` with `Q = k Q'` and `Q'` primitive.
    pub fn primitive_part(&self) -> (BigInt, Form) {
        let k = self.content();
        if k.is_zero() {
            return (k, self.clone());
        }
        (k.clone(), Form::new(&self.a / &k, &self.b / &k, &self.c / &k))
    }

    pub fn is_indefinite(&self) -> bool {
        let d = self.discriminant();
        d.is_positive() && !is_square(&d)
    }

    pub fn require_indefinite(&self) -> Result<()> {
        if self.is_indefinite() {
            Ok(())
        } else {
            Err(Error::NotIndefinite(self.to_string()))
        }
    }

    pub fn classify(&self) -> Classification {
        let d = self.discriminant();
        let kind = if d.is_zero() {
            FormKind::Degenerate
        } else if d.is_negative() {
            if self.a.is_positive() || (self.a.is_zero() && self.c.is_positive()) {
                FormKind::PositiveDefinite
            } else {
                FormKind::NegativeDefinite
            }
        } else if is_square(&d) {
            FormKind::Reducible
        } else {
            FormKind::Indefinite
        };
        let content = self.content();
        let reduced = kind == FormKind::Indefinite && self.is_reduced();
        Classification {
            indefinite: d.is_positive(),
            irreducible: !is_square(&d),
            discriminant: d,
            primitive: content.is_one(),
            content,
            kind,
            reduced,
        }
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn act(&self, g: &Mat2) -> Form {
        let a = self.eval(&g.a, &g.c);
        let c = self.eval(&g.b, &g.d);
        let b = BigInt::from(2) * &self.a * &g.a * &g.b
            + &self.b * (&g.a * &g.d + &g.b * &g.c)
            + BigInt::from(2) * &self.c * &g.c * &g.d;
        Form { a, b, c }
    }

    pub fn neg(&self) -> Form {
        Form { a: -&self.a, b: -&self.b, c: -&self.c }
    }

    /// `|sqrt D - 2|A|| < B < sqrt D`.
    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if !d.is_positive() || is_square(&d) {
            return false;
        }
        let s = isqrt(&d);
        let two_a = BigInt::from(2) * self.a.abs();
        // integer x: x < sqrt D iff x <= s, x > sqrt D iff x > s
        self.b.is_positive() && self.b <= s && (&s - &self.b) < two_a && two_a <= &s + &self.b
    }

    /// Translate so that `B` lands in the normal range, returning the shift.
    fn normalize(&self, s_root: &BigInt) -> (Form, BigInt) {
        let aa = self.a.abs();
        let two_a = BigInt::from(2) * &aa;
        let r = if &aa > s_root {
            let r0 = self.b.mod_floor(&two_a);
            if r0 > aa {
                r0 - &two_a
            } else {
                r0
            }
        } else {
            s_root - (s_root - &self.b).mod_floor(&two_a)
        };
        let shift = (&r - &self.b) / (BigInt::from(2) * &self.a);
        let f = self.act(&Mat2::translation(&shift));
        (f, shift)
    }

    /// One reduction step `(A, B, C) -> normalize(C, -B, A)` with its matrix.
    pub fn rho(&self) -> (Form, Mat2) {
        let s_root = isqrt(&self.discriminant());
        let swapped = self.act(&Mat2::s());
        let (f, shift) = swapped.normalize(&s_root);
        let m = Mat2::new(BigInt::zero(), -BigInt::one(), BigInt::one(), shift);
        (f, m)
    }

    /// A reduced form `R` and `M` in `SL(2, Z)` with `act(Q, M) = R`.
    pub fn reduce(&self) -> Result<(Form, Mat2)> {
        self.require_indefinite()?;
        let s_root = isqrt(&self.discriminant());
        let (mut f, shift) = self.normalize(&s_root);
        let mut m = Mat2::translation(&shift);
        let mut steps = 0usize;
        while !f.is_reduced() {
            let (g, step) = f.rho();
            f = g;
            m = m.mul(&step);
            steps += 1;
            if steps > 100_000 {
                return Err(Error::IterationCap("reduce"));
            }
        }
        Ok((f, m))
    }

    /// The cycle of a reduced form under `rho`, each entry with the
    /// cumulative matrix from the start.
    pub fn cycle(&self) -> Result<Vec<(Form, Mat2)>> {
        if !self.is_reduced() {
            return Err(Error::Hypothesis("cycle needs a reduced form".into()));
        }
        let mut out = vec![(self.clone(), Mat2::identity())];
        loop {
            let (last, m) = out.last().expect("nonempty").clone();
            let (next, step) = last.rho();
            if next == *self {
                return Ok(out);
            }
            out.push((next, m.mul(&step)));
            if out.len() > 1_000_000 {
                return Err(Error::IterationCap("cycle"));
            }
        }
    }

    /// `(t, u)` for the discriminant of the primitive part.
    pub fn fundamental_solution(&self) -> Result<PellSolution> {
        self.require_indefinite()?;
        let (_, p) = self.primitive_part();
        fundamental_pell4(&p.discriminant())
    }

    /// `gamma_{Q,t,u}` for the fundamental solution of the primitive part.
    pub fn fundamental_automorph(&self) -> Result<Mat2> {
        let (_, p) = self.primitive_part();
        let sol = p.fundamental_solution()?;
        automorph(&p, &sol.t, &sol.u)
    }

    /// `h(Q)` numerator data: the value `|Q(d, -c)|` for a matrix row.
    pub fn row_value(&self, c: &BigInt, d: &BigInt) -> BigInt {
        self.eval(d, &-c).abs()
    }
}

/// `(-B + sqrt D)/(2A)`.
pub fn alpha_of(q: &Form) -> Result<QuadIrr> {
    QuadIrr::alpha_of(q)
}

/// The primitive form with `A > 0` having `alpha` or `alpha^sigma` as
/// first root.
pub fn form_of(alpha: &QuadIrr) -> Form {
    let f = alpha.form();
    if f.a.is_negative() {
        f.neg()
    } else {
        f
    }
}

/// `((t - B u)/2, -C u; A u, (t + B u)/2)`, an element of `SL(2, Z)`
/// preserving `Q` when `t^2 - D u^2 = 4`.
pub fn automorph(q: &Form, t: &BigInt, u: &BigInt) -> Result<Mat2> {
    let d = q.discriminant();
    if t * t - &d * u * u != BigInt::from(4) {
        return Err(Error::NotPellSolution { t: t.to_string(), u: u.to_string(), d: d.to_string() });
    }
    let bu = &q.b * u;
    Ok(Mat2::new((t - &bu) / 2, -&q.c * u, &q.a * u, (t + &bu) / 2))
}

/// Proper equivalence: a witness `W` in `SL(2, Z)` with `act(q1, W) = q2`.
pub fn equivalent(q1: &Form, q2: &Form) -> Result<Option<Mat2>> {
    q1.require_indefinite()?;
    q2.require_indefinite()?;
    if q1.discriminant() != q2.discriminant() || q1.content() != q2.content() {
        return Ok(None);
    }
    let (r1, m1) = q1.reduce()?;
    let (r2, m2) = q2.reduce()?;
    for (f, n) in r1.cycle()? {
        if f == r2 {
            return Ok(Some(m1.mul(&n).mul(&m2.inverse()?)));
        }
    }
    Ok(None)
}

/// Whether `Q` is properly equivalent to `-Q`.
pub fn is_reciprocal_form(q: &Form) -> Result<bool> {
    Ok(equivalent(q, &q.neg())?.is_some())
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl FromStr for Form {
    type Err = Error;

    /// Parses `"a,b,c"`.
    fn from_str(s: &str) -> Result<Form> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected a,b,c, got {s:?}")));
        }
        let mut v = Vec::with_capacity(3);
        for p in parts {
            v.push(p.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {p:?}")))?);
        }
        let c = v.pop().expect("three");
        let b = v.pop().expect("three");
        let a = v.pop().expect("three");
        Ok(Form { a, b, c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classification_examples() {
        let c = Form::from_i64(1, -1, -1).classify();
        assert!(c.primitive && c.indefinite && c.irreducible);
        assert_eq!(c.discriminant, BigInt::from(5));
        let c = Form::from_i64(2, 0, -2).classify();
        assert_eq!((c.content.clone(), c.primitive, c.indefinite, c.irreducible), (BigInt::from(2), false, true, false));
        assert!(!Form::from_i64(1, 0, 1).classify().indefinite);
    }

    #[test]
    fn form_of_examples() {
        let cases = [("(1+sqrt(5))/2", (1, -1, -1)), ("sqrt(2)", (1, 0, -2)), ("(1+sqrt(5))/4", (4, -2, -1))];
        for (a, (x, y, z)) in cases {
            let alpha: QuadIrr = a.parse().unwrap();
            assert_eq!(form_of(&alpha), Form::from_i64(x, y, z), "{a}");
        }
        // A > 0 normalization picks the conjugate root
        let alpha: QuadIrr = "(1-sqrt(5))/2".parse().unwrap();
        assert_eq!(form_of(&alpha), Form::from_i64(1, -1, -1));
        assert_eq!(alpha_of(&form_of(&alpha)).unwrap(), alpha.conj());
    }

    fn arb_sl2() -> impl Strategy<Value = Mat2> {
        prop::collection::vec((0u8..4, -3i64..4), 1..6).prop_map(|steps| {
            let mut m = Mat2::identity();
            for (k, n) in steps {
                let g = match k {
                    0 => Mat2::translation(&n.into()),
                    1 => Mat2::s(),
                    2 => Mat2::from_i64(1, 0, n, 1),
                    _ => Mat2::s().inverse().unwrap(),
                };
                m = m.mul(&g);
            }
            m
        })
    }

    fn arb_indefinite() -> impl Strategy<Value = Form> {
        (-9i64..10, -9i64..10, -9i64..10)
            .prop_map(|(a, b, c)| Form::from_i64(a, b, c))
            .prop_filter("indefinite", |f| f.is_indefinite())
    }

    #[test]
    fn parse_and_display() {
        let f: Form = "1, -1, -1".parse().unwrap();
        assert_eq!(f, Form::from_i64(1, -1, -1));
        assert_eq!(f.to_string(), "1,-1,-1");
        assert!("1,2".parse::<Form>().is_err());
        assert!("1,x,2".parse::<Form>().is_err());
    }

    #[test]
    fn classification() {
        let c = Form::from_i64(1, -1, -1).classify();
        assert_eq!(c.kind, FormKind::Indefinite);
        assert_eq!(c.discriminant, BigInt::from(5));
        assert!(c.primitive);
        assert_eq!(Form::from_i64(1, 0, 1).classify().kind, FormKind::PositiveDefinite);
        assert_eq!(Form::from_i64(-1, 0, -1).classify().kind, FormKind::NegativeDefinite);
        assert_eq!(Form::from_i64(1, 0, -1).classify().kind, FormKind::Reducible);
        assert_eq!(Form::from_i64(1, 2, 1).classify().kind, FormKind::Degenerate);
        let k = Form::from_i64(2, 2, -2).classify();
        assert!(!k.primitive);
        assert_eq!(k.content, BigInt::from(2));
    }

    #[test]
    fn golden_form_cycle() {
        let f = Form::from_i64(1, -1, -1);
        let (r, m) = f.reduce().unwrap();
        assert!(r.is_reduced());
        assert_eq!(f.act(&m), r);
        assert_eq!(m.det(), BigInt::one());
        assert!(is_reciprocal_form(&f).unwrap());
        assert!(!is_reciprocal_form(&Form::from_i64(1, 0, -3)).unwrap());
    }

    #[test]
    fn automorph_of_golden_form() {
        let f = Form::from_i64(1, -1, -1);
        let g = automorph(&f, &3.into(), &1.into()).unwrap();
        assert_eq!(g, Mat2::from_i64(2, 1, 1, 1));
        assert_eq!(f.act(&g), f);
        assert!(automorph(&f, &3.into(), &2.into()).is_err());
    }

    #[test]
    fn class_number_two() {
        // D = 40 has two proper classes: X^2 - 10Y^2 and 2X^2 - 5Y^2
        let a = Form::from_i64(1, 0, -10);
        let b = Form::from_i64(2, 0, -5);
        assert!(equivalent(&a, &b).unwrap().is_none());
        assert!(equivalent(&a, &Form::from_i64(-1, 0, 10)).unwrap().is_some());
        assert!(equivalent(&a, &Form::from_i64(1, 0, -3)).unwrap().is_none());
    }

    proptest! {
        #[test]
        fn action_is_right_action(f in arb_indefinite(), g in arb_sl2(), h in arb_sl2()) {
            prop_assert_eq!(f.act(&g).act(&h), f.act(&g.mul(&h)));
            prop_assert_eq!(f.act(&g).discriminant(), f.discriminant());
        }

        #[test]
        fn reduction_and_equivalence(f in arb_indefinite(), g in arb_sl2()) {
            let (r, m) = f.reduce().unwrap();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(f.act(&m), r);
            let moved = f.act(&g);
            let w = equivalent(&f, &moved).unwrap();
            prop_assert!(w.is_some());
            let w = w.unwrap();
            prop_assert_eq!(w.det(), BigInt::one());
            prop_assert_eq!(f.act(&w), moved);
        }

        #[test]
        fn fundamental_automorph_fixes(f in arb_indefinite()) {
            let g = f.fundamental_automorph().unwrap();
            prop_assert_eq!(f.act(&g), f.clone());
            prop_assert_eq!(g.det(), BigInt::one());
            prop_assert!(g.trace() > BigInt::from(2));
        }
    }
}
