//! Multiprecision evaluation of staged maps.
//!
//! Deep maps are too ill-conditioned for double precision: intermediate values
//! leave the exponent range and tiny input errors blow up. Coverage searches
//! therefore confirm every hit with arbitrary-precision floats at two
//! precisions.

use num_bigint::BigInt;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::folding::FoldSpec;
use crate::geometry::{AffineMap2, Region};
use crate::pipeline::{Stage, StagedMap};
use crate::poly::SparsePoly;
use crate::rational::Scalar;

pub(crate) fn from_rug(q: &Rational) -> Scalar {
    let n = BigInt::parse_bytes(q.numer().to_string_radix(16).as_bytes(), 16).expect("integer digits");
    let d = BigInt::parse_bytes(q.denom().to_string_radix(16).as_bytes(), 16).expect("integer digits");
    Scalar::new(n, d)
}

pub(crate) fn to_rug(q: &Scalar) -> Rational {
    let n = rug::Integer::from_str_radix(&q.numer().to_str_radix(16), 16).expect("integer digits");
    let d = rug::Integer::from_str_radix(&q.denom().to_str_radix(16), 16).expect("integer digits");
    Rational::from((n, d))
}

/// Sparse polynomial with exact coefficients, evaluated at any precision.
#[derive(Debug, Clone)]
pub(crate) struct PrecisePoly {
    terms: Vec<([u32; 3], Rational)>,
}

impl PrecisePoly {
    pub(crate) fn new(p: &SparsePoly) -> Self {
        PrecisePoly { terms: p.terms().map(|(m, c)| (m.0, to_rug(c))).collect() }
    }

    /// Coefficients, by power of the second variable, of the restriction to
    /// the vertical line through `x`.
    pub(crate) fn slice_at_x(&self, x: &Float, prec: u32) -> Vec<Float> {
        let deg = self.terms.iter().map(|(e, _)| e[1] as usize).max().unwrap_or(0);
        let mut out = vec![Float::with_val(prec, 0); deg + 1];
        for (e, c) in &self.terms {
            out[e[1] as usize] += Float::with_val(prec, x.pow(e[0])) * c;
        }
        out
    }

    pub(crate) fn terms(&self) -> &[([u32; 3], Rational)] {
        &self.terms
    }

    pub(crate) fn eval_exact(&self, pt: &[Rational]) -> Rational {
        let mut acc = Rational::new();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= Rational::from((&pt[v]).pow(k));
                }
            }
            acc += t;
        }
        acc
    }

    pub(crate) fn eval(&self, pt: &[Float], prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 0);
        for (e, c) in &self.terms {
            let mut t = Float::with_val(prec, c);
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= Float::with_val(prec, (&pt[v]).pow(k));
                }
            }
            acc += t;
        }
        acc
    }
}

/// A line functional `a x + b y + c`.
pub(crate) type PreciseLine = [Rational; 3];

pub(crate) fn lines_of(r: &Region) -> Vec<Vec<PreciseLine>> {
    r.parts()
        .iter()
        .map(|s| s.functionals.iter().map(|l| [to_rug(&l.a), to_rug(&l.b), to_rug(&l.c)]).collect())
        .collect()
}

pub(crate) fn eval_line(l: &PreciseLine, x: &Float, y: &Float, prec: u32) -> Float {
    Float::with_val(prec, &l[0] * x) + Float::with_val(prec, &l[1] * y) + &l[2]
}

#[derive(Debug, Clone)]
pub(crate) struct PreciseFold {
    pub(crate) psi: PrecisePoly,
    pub(crate) factors: Vec<PrecisePoly>,
}

impl PreciseFold {
    pub(crate) fn new(spec: &FoldSpec) -> Self {
        PreciseFold {
            psi: PrecisePoly::new(&spec.psi),
            factors: spec.family_prime.iter().map(PrecisePoly::new).collect(),
        }
    }

    /// `1 + psi(x) phi(x, y)`.
    pub(crate) fn inner(&self, x: &Float, y: &Float, prec: u32) -> Float {
        let pt = [x.clone(), y.clone()];
        let mut phi = Float::with_val(prec, 1);
        for f in &self.factors {
            phi *= f.eval(&pt, prec);
        }
        phi * self.psi.eval(&pt, prec) + 1u32
    }

    /// Coefficients of `t -> 1 + psi(x) phi(x, t)`.
    pub(crate) fn inner_slice(&self, x: &Float, prec: u32) -> Vec<Float> {
        let mut acc = self.psi.slice_at_x(x, prec);
        for f in &self.factors {
            let g = f.slice_at_x(x, prec);
            let mut prod = vec![Float::with_val(prec, 0); acc.len() + g.len() - 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in g.iter().enumerate() {
                    prod[i + j] += Float::with_val(prec, a * b);
                }
            }
            acc = prod;
        }
        acc[0] += 1u32;
        acc
    }

    pub(crate) fn apply_exact(&self, x: &Rational, y: &Rational) -> Rational {
        let pt = [x.clone(), y.clone()];
        let mut phi = Rational::from(1);
        for f in &self.factors {
            phi *= f.eval_exact(&pt);
            if phi == 0 {
                return y.clone();
            }
        }
        let q = phi * self.psi.eval_exact(&pt) + 1u32;
        Rational::from(q.square_ref()) * y
    }

    pub(crate) fn apply(&self, x: &Float, y: &Float, prec: u32) -> Float {
        let q = self.inner(x, y, prec);
        Float::with_val(prec, &q * &q) * y
    }
}

#[derive(Debug, Clone)]
pub(crate) enum PreciseStage {
    Base(Vec<PrecisePoly>),
    Affine([Rational; 6]),
    Fold(PreciseFold),
    Lift(Box<PreciseMap>),
}

impl PreciseStage {
    fn apply_exact(&self, p: &[Rational]) -> Vec<Rational> {
        match self {
            PreciseStage::Base(cs) => cs.iter().map(|c| c.eval_exact(p)).collect(),
            PreciseStage::Affine(m) => {
                let row = |a: &Rational, b: &Rational, t: &Rational| {
                    Rational::from(a * &p[0]) + Rational::from(b * &p[1]) + t
                };
                vec![row(&m[0], &m[1], &m[2]), row(&m[3], &m[4], &m[5])]
            }
            PreciseStage::Fold(f) => vec![p[0].clone(), f.apply_exact(&p[0], &p[1])],
            PreciseStage::Lift(inner) => {
                let z = inner.eval_exact_rug(&p[..2]);
                vec![Rational::from(&z[0] + &p[2]), Rational::from(&z[1] + &p[2])]
            }
        }
    }
}

/// Arbitrary-precision evaluator of a staged map.
#[derive(Debug, Clone)]
pub struct PreciseMap {
    pub(crate) stages: Vec<PreciseStage>,
}

pub(crate) fn affine_coeffs(m: &AffineMap2) -> [Rational; 6] {
    [&m.m[0][0], &m.m[0][1], &m.t[0], &m.m[1][0], &m.m[1][1], &m.t[1]].map(to_rug)
}

impl PreciseMap {
    pub fn new(map: &StagedMap) -> Self {
        let stages = map
            .stages
            .iter()
            .map(|s| match s {
                Stage::Base { components, .. } => PreciseStage::Base(components.iter().map(PrecisePoly::new).collect()),
                Stage::Affine { map, .. } => PreciseStage::Affine(affine_coeffs(map)),
                Stage::Fold { spec, .. } => PreciseStage::Fold(PreciseFold::new(spec)),
                Stage::Lift { inner } => PreciseStage::Lift(Box::new(PreciseMap::new(inner))),
            })
            .collect();
        PreciseMap { stages }
    }

    /// Exact image of `p` after each stage, computed with GMP rationals.
    pub fn eval_exact_trace(&self, p: &[Scalar]) -> Vec<Vec<Scalar>> {
        let mut cur: Vec<Rational> = p.iter().map(to_rug).collect();
        let mut out = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            cur = s.apply_exact(&cur);
            out.push(cur.iter().map(from_rug).collect());
        }
        out
    }

    pub fn eval_exact(&self, p: &[Scalar]) -> Vec<Scalar> {
        self.eval_exact_rug(&p.iter().map(to_rug).collect::<Vec<_>>()).iter().map(from_rug).collect()
    }

    fn eval_exact_rug(&self, p: &[Rational]) -> Vec<Rational> {
        let mut cur = p.to_vec();
        for s in &self.stages {
            cur = s.apply_exact(&cur);
        }
        cur
    }

    pub fn eval(&self, p: &[Float], prec: u32) -> Vec<Float> {
        let mut cur: Vec<Float> = p.iter().map(|v| Float::with_val(prec, v)).collect();
        for s in &self.stages {
            cur = match s {
                PreciseStage::Base(cs) => cs.iter().map(|c| c.eval(&cur, prec)).collect(),
                PreciseStage::Affine(m) => apply_affine(m, &cur[0], &cur[1], prec).to_vec(),
                PreciseStage::Fold(f) => {
                    let y = f.apply(&cur[0], &cur[1], prec);
                    vec![cur[0].clone(), y]
                }
                PreciseStage::Lift(inner) => {
                    let z = inner.eval(&cur[..2], prec);
                    vec![Float::with_val(prec, &z[0] + &cur[2]), Float::with_val(prec, &z[1] + &cur[2])]
                }
            };
        }
        cur
    }

    /// Image of an exactly represented `f64` point, provided evaluations at
    /// two precisions agree to within `tol` in every coordinate. Precision is
    /// raised up to `max_prec` until they do.
    pub fn stable_image(&self, p: &[Float], tol: f64, start_prec: u32, max_prec: u32) -> Option<[f64; 2]> {
        let mut prec = start_prec;
        while prec <= max_prec {
            let a = self.eval(p, prec);
            let b = self.eval(p, 2 * prec);
            let close = a.iter().zip(&b).all(|(u, v)| {
                let d = Float::with_val(64, u - v).abs().to_f64();
                d.is_finite() && d <= tol
            });
            if close {
                let (x, y) = (b[0].to_f64(), b[1].to_f64());
                return (x.is_finite() && y.is_finite()).then_some([x, y]);
            }
            prec *= 4;
        }
        None
    }
}

pub(crate) fn apply_affine(m: &[Rational; 6], x: &Float, y: &Float, prec: u32) -> [Float; 2] {
    let row =
        |a: &Rational, b: &Rational, t: &Rational| Float::with_val(prec, a * x) + Float::with_val(prec, b * y) + t;
    [row(&m[0], &m[1], &m[2]), row(&m[3], &m[4], &m[5])]
}
