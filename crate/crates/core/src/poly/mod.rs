//! Sparse polynomials in up to three variables over exact rationals.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic (total degree first, then exponent of `x`, `y`, `z`). Zero
//! coefficients are never stored, so structural equality is polynomial equality.

mod univariate;

pub use univariate::{UniPoly, UnivariateSlice};

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Scalar};

pub const MAX_ARITY: usize = 3;
const VAR_NAMES: [&str; MAX_ARITY] = ["x", "y", "z"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("unsupported arity {0} (expected 1..=3)")]
    BadArity(usize),
    #[error("malformed polynomial: {0}")]
    Malformed(String),
}

/// Exponent vector. Unused trailing slots stay zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u32; MAX_ARITY]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_ARITY]);

    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_ARITY];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    arity: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SparsePoly {
    pub fn zero(arity: usize) -> Self {
        assert!((1..=MAX_ARITY).contains(&arity), "arity {arity} out of range");
        SparsePoly { arity, terms: BTreeMap::new() }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, rational::one())
    }

    pub fn constant(arity: usize, c: Scalar) -> Self {
        let mut p = Self::zero(arity);
        if !c.is_zero() {
            p.terms.insert(Monomial::ONE, c);
        }
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity);
        let mut p = Self::zero(arity);
        p.terms.insert(Monomial::var(i), rational::one());
        p
    }

    pub fn monomial(arity: usize, exps: &[u32], c: Scalar) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(exps_to_monomial(arity, exps), c);
        p
    }

    /// Builds from `(exponents, coefficient)` pairs; repeated exponents accumulate.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        if !(1..=MAX_ARITY).contains(&arity) {
            return Err(PolyError::BadArity(arity));
        }
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            if e.len() != arity {
                return Err(PolyError::Malformed(format!(
                    "exponent tuple of length {} in arity-{} polynomial",
                    e.len(),
                    arity
                )));
            }
            p.add_term(exps_to_monomial(arity, &e), c);
        }
        Ok(p)
    }

    /// Affine linear form `a*x + b*y + c` in two variables.
    pub fn linear2(a: &Scalar, b: &Scalar, c: &Scalar) -> Self {
        let mut p = Self::zero(2);
        p.add_term(Monomial([1, 0, 0]), a.clone());
        p.add_term(Monomial([0, 1, 0]), b.clone());
        p.add_term(Monomial::ONE, c.clone());
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(&exps_to_monomial(self.arity, exps)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn checked_add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.same_arity(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(*m, c.clone());
        }
        Ok(r)
    }

    pub fn checked_sub(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.same_arity(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(*m, -c.clone());
        }
        Ok(r)
    }

    pub fn checked_mul(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.same_arity(other)?;
        let mut r = Self::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, k: &Scalar) -> SparsePoly {
        if k.is_zero() {
            return Self::zero(self.arity);
        }
        SparsePoly { arity: self.arity, terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut acc = Self::one(self.arity);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn same_arity(&self, other: &SparsePoly) -> Result<(), PolyError> {
        if self.arity != other.arity {
            return Err(PolyError::ArityMismatch { left: self.arity, right: other.arity });
        }
        Ok(())
    }

    /// Exact value at `point`, computed as a sum of monomials over cached powers.
    ///
    /// Panics if `point.len() != self.arity()`.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.arity, "evaluation point arity");
        if self.terms.is_empty() {
            return Scalar::zero();
        }
        let powers: Vec<Vec<Scalar>> = (0..self.arity).map(|v| power_table(&point[v], self.degree_in(v))).collect();
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (table, &e) in powers.iter().zip(&m.0) {
                if e > 0 {
                    t *= &table[e as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes must share an arity,
    /// which becomes the arity of the result. Powers of each substitute are computed
    /// once and reused across terms.
    pub fn compose(&self, subs: &[SparsePoly]) -> Result<SparsePoly, PolyError> {
        if subs.len() != self.arity {
            return Err(PolyError::ArityMismatch { left: self.arity, right: subs.len() });
        }
        let out_arity = subs[0].arity;
        for s in subs {
            if s.arity != out_arity {
                return Err(PolyError::ArityMismatch { left: out_arity, right: s.arity });
            }
        }
        let mut powers: Vec<Vec<SparsePoly>> = Vec::with_capacity(self.arity);
        for (v, s) in subs.iter().enumerate() {
            let top = self.degree_in(v) as usize;
            let mut table = vec![SparsePoly::one(out_arity)];
            for e in 1..=top {
                let next = &table[e - 1] * s;
                table.push(next);
            }
            powers.push(table);
        }
        let mut acc = SparsePoly::zero(out_arity);
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(out_arity, c.clone());
            for (v, table) in powers.iter().enumerate() {
                let e = m.0[v] as usize;
                if e > 0 {
                    t = &t * &table[e];
                }
            }
            for (mm, cc) in t.terms {
                acc.add_term(mm, cc);
            }
        }
        Ok(acc)
    }

    /// Fixes the first variable at `r`; the result is univariate in the second.
    pub fn slice_at_x(&self, r: &Scalar) -> UnivariateSlice {
        assert_eq!(self.arity, 2, "slice_at_x needs a bivariate polynomial");
        let top = self.degree_in(0);
        let rp = power_table(r, top);
        let mut coeffs = vec![Scalar::zero(); self.degree_in(1) as usize + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[1] as usize] += c * &rp[m.0[0] as usize];
        }
        UnivariateSlice::new(UniPoly::new(coeffs), r.clone())
    }

    /// Writes the polynomial as `sum_j c_j(x) * y^j` and returns the `c_j`.
    pub fn coefficients_in_y(&self) -> Vec<UniPoly> {
        assert_eq!(self.arity, 2);
        let dy = self.degree_in(1) as usize;
        let dx = self.degree_in(0) as usize;
        let mut rows = vec![vec![Scalar::zero(); dx + 1]; dy + 1];
        for (m, c) in &self.terms {
            rows[m.0[1] as usize][m.0[0] as usize] = c.clone();
        }
        rows.into_iter().map(UniPoly::new).collect()
    }

    /// Views a univariate `SparsePoly` densely.
    pub fn to_uni(&self) -> UniPoly {
        assert_eq!(self.arity, 1);
        let mut coeffs = vec![Scalar::zero(); self.degree() as usize + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[0] as usize] = c.clone();
        }
        UniPoly::new(coeffs)
    }

    /// Embeds a univariate polynomial as a polynomial in variable `var` of an
    /// `arity`-variate ring.
    pub fn from_uni(u: &UniPoly, arity: usize, var: usize) -> SparsePoly {
        let mut p = SparsePoly::zero(arity);
        for (e, c) in u.coeffs().iter().enumerate() {
            p.add_term(Monomial::var(var).pow_scalar(e as u32), c.clone());
        }
        p
    }

    /// Double-precision copy for fast, inexact evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            arity: self.arity,
            max_exp: std::array::from_fn(|v| if v < self.arity { self.degree_in(v) } else { 0 }),
            terms: self.terms.iter().map(|(m, c)| (m.0, rational::to_f64(c))).collect(),
        }
    }

    /// LaTeX rendering, highest terms first.
    pub fn to_latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_monomial(m, self.arity, latex);
            let coeff = if latex && !abs.is_integer() {
                format!("\\frac{{{}}}{{{}}}", abs.numer(), abs.denom())
            } else {
                abs.to_string()
            };
            match (abs.is_one(), mono.is_empty()) {
                (_, true) => out.push_str(&coeff),
                (true, false) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&coeff);
                    out.push_str(if latex { " " } else { "*" });
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

impl Monomial {
    fn pow_scalar(&self, k: u32) -> Monomial {
        Monomial(self.0.map(|e| e * k))
    }
}

fn render_monomial(m: &Monomial, arity: usize, latex: bool) -> String {
    let mut parts = Vec::new();
    for (v, name) in VAR_NAMES.iter().enumerate().take(arity) {
        match m.0[v] {
            0 => {}
            1 => parts.push(name.to_string()),
            e if latex => parts.push(format!("{name}^{{{e}}}")),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join(if latex { " " } else { "*" })
}

fn exps_to_monomial(arity: usize, exps: &[u32]) -> Monomial {
    assert_eq!(exps.len(), arity, "exponent tuple length");
    let mut e = [0; MAX_ARITY];
    e[..arity].copy_from_slice(exps);
    Monomial(e)
}

fn power_table(x: &Scalar, top: u32) -> Vec<Scalar> {
    let mut t = Vec::with_capacity(top as usize + 1);
    t.push(Scalar::one());
    for e in 1..=top as usize {
        let next = &t[e - 1] * x;
        t.push(next);
    }
    t
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&SparsePoly> for &SparsePoly {
            type Output = SparsePoly;
            /// Panics on arity mismatch; use the `checked_*` form to handle it.
            fn $method(self, rhs: &SparsePoly) -> SparsePoly {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: SparsePoly) -> SparsePoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly { arity: self.arity, terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    arity: usize,
    terms: Vec<(Vec<u32>, String)>,
}

impl Serialize for SparsePoly {
    /// `{"arity": n, "terms": [[[e1,..,en], "num/den"], ...]}`, highest monomial first.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            arity: self.arity,
            terms: self.terms.iter().rev().map(|(m, c)| (m.0[..self.arity].to_vec(), rational::to_string(c))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = PolyRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(r.terms.len());
        for (e, c) in r.terms {
            terms.push((e, rational::parse(&c).map_err(D::Error::custom)?));
        }
        SparsePoly::from_terms(r.arity, terms).map_err(D::Error::custom)
    }
}

/// Inexact evaluation copy of a [`SparsePoly`].
#[derive(Debug, Clone)]
pub struct FloatPoly {
    arity: usize,
    max_exp: [u32; MAX_ARITY],
    terms: Vec<([u32; MAX_ARITY], f64)>,
}

impl FloatPoly {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.arity);
        let mut pw = [[1.0f64; 24]; MAX_ARITY];
        let small = self.max_exp.iter().all(|&e| e < 24);
        if small {
            for v in 0..self.arity {
                for e in 1..=self.max_exp[v] as usize {
                    pw[v][e] = pw[v][e - 1] * point[v];
                }
            }
        }
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for v in 0..self.arity {
                let k = e[v] as usize;
                if k > 0 {
                    t *= if small { pw[v][k] } else { point[v].powi(k as i32) };
                }
            }
            acc += t;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn x() -> SparsePoly {
        SparsePoly::var(2, 0)
    }
    fn y() -> SparsePoly {
        SparsePoly::var(2, 1)
    }
    fn k(n: i64) -> SparsePoly {
        SparsePoly::constant(2, int(n))
    }

    /// Oracle: expand a product of polynomials given as explicit term lists,
    /// accumulating in a plain map without going through `SparsePoly::mul`.
    fn schoolbook(a: &[((u32, u32), i64)], b: &[((u32, u32), i64)]) -> BTreeMap<(u32, u32), i64> {
        let mut out = BTreeMap::new();
        for ((ax, ay), ac) in a {
            for ((bx, by), bc) in b {
                *out.entry((ax + bx, ay + by)).or_insert(0) += ac * bc;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn from_table(t: &BTreeMap<(u32, u32), i64>) -> SparsePoly {
        SparsePoly::from_terms(2, t.iter().map(|((a, b), c)| (vec![*a, *b], int(*c)))).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(&(&x() + &y()) + &(&x() - &y()), x().scale(&int(2)));
        let p = &(&x() * &x()) + &(&x() * &y()).scale(&int(2));
        assert_eq!(&p + &SparsePoly::zero(2), p);
        let q = &(&x() * &y()) + &k(3);
        // x^2 + 2xy + xy + 3
        let oracle = from_table(&BTreeMap::from([((2, 0), 1), ((1, 1), 3), ((0, 0), 3)]));
        assert_eq!(&p + &q, oracle);
    }

    #[test]
    fn mul_examples() {
        let lhs = &(&x() + &y()) * &(&x() - &y());
        let oracle = schoolbook(&[((1, 0), 1), ((0, 1), 1)], &[((1, 0), 1), ((0, 1), -1)]);
        assert_eq!(lhs, from_table(&oracle));
        assert_eq!(lhs, &(&x() * &x()) - &(&y() * &y()));
        let p = &(&x() * &y()) + &k(7);
        assert_eq!(&p * &SparsePoly::one(2), p);
        assert!((&p * &SparsePoly::zero(2)).is_zero());
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let err = SparsePoly::var(2, 0).checked_add(&SparsePoly::var(3, 0)).unwrap_err();
        assert_eq!(err, PolyError::ArityMismatch { left: 2, right: 3 });
        assert!(SparsePoly::var(2, 0).checked_mul(&SparsePoly::var(1, 0)).is_err());
    }

    #[test]
    fn compose_examples() {
        let y2 = &y() * &y();
        assert_eq!(y().compose(&[x(), y2.clone()]).unwrap(), y2);
        let xx = &x() * &x();
        assert_eq!((&x() + &y()).compose(&[xx.clone(), y2.clone()]).unwrap(), &xx + &y2);
        let got = (&x() * &y()).compose(&[&x() + &k(1), &y() - &k(1)]).unwrap();
        // direct substitution: (x+1)(y-1) = xy - x + y - 1
        let oracle = from_table(&BTreeMap::from([((1, 1), 1), ((1, 0), -1), ((0, 1), 1), ((0, 0), -1)]));
        assert_eq!(got, oracle);
    }

    fn fold_h() -> SparsePoly {
        // y (1 + x(x-2)(y-1))^2
        let inner = &k(1) + &(&(&x() * &(&x() - &k(2))) * &(&y() - &k(1)));
        &y() * &inner.pow(2)
    }

    #[test]
    fn eval_examples() {
        let h = fold_h();
        assert_eq!(h.eval(&[int(1), int(2)]), int(0));
        assert_eq!(h.eval(&[int(1), int(1)]), int(1));
        assert_eq!(h.eval(&[int(3), int(1)]), int(1));
    }

    #[test]
    fn slice_examples() {
        let s = fold_h().slice_at_x(&int(1));
        // t (2 - t)^2 = 4t - 4t^2 + t^3
        assert_eq!(s.uni().coeffs(), &[int(0), int(4), int(-4), int(1)]);
        let p = &(&x() * &x()) + &y();
        assert_eq!(p.slice_at_x(&int(0)).uni().coeffs(), &[int(0), int(1)]);
        assert_eq!(x().slice_at_x(&int(5)).uni().coeffs(), &[int(5)]);
    }

    #[test]
    fn serialization_is_canonical() {
        let p = &(&x() * &x()).scale(&ratio(1, 2)) + &(&y() - &k(3));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"arity":2,"terms":[[[2,0],"1/2"],[[0,1],"1/1"],[[0,0],"-3/1"]]}"#);
        let back: SparsePoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn grlex_order() {
        let a = Monomial([2, 0, 0]);
        let b = Monomial([0, 3, 0]);
        let c = Monomial([1, 1, 0]);
        assert!(a < b);
        assert!(c < a);
    }

    #[test]
    fn display_and_latex() {
        let p = &(&x() * &x()).scale(&ratio(-1, 2)) + &(&y() + &k(3));
        assert_eq!(p.to_string(), "-1/2*x^2 + y + 3");
        assert_eq!(p.to_latex(), "-\\frac{1}{2} x^{2} + y + 3");
    }

    fn small_poly(arity: usize) -> impl Strategy<Value = SparsePoly> {
        prop::collection::vec((prop::collection::vec(0u32..4, arity), -6i64..7, 1i64..4), 0..6).prop_map(move |ts| {
            SparsePoly::from_terms(arity, ts.into_iter().map(|(e, n, d)| (e, ratio(n, d)))).unwrap()
        })
    }

    fn small_point(arity: usize) -> impl Strategy<Value = Vec<Scalar>> {
        prop::collection::vec((-9i64..10, 1i64..6).prop_map(|(n, d)| ratio(n, d)), arity)
    }

    proptest! {
        #[test]
        fn ring_axioms(p in small_poly(2), q in small_poly(2), r in small_poly(2)) {
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p + &q) - &q, p.clone());
            if !p.is_zero() && !q.is_zero() {
                prop_assert_eq!((&p * &q).degree(), p.degree() + q.degree());
            }
        }

        #[test]
        fn compose_commutes_with_eval(p in small_poly(2), u in small_poly(3), v in small_poly(3), a in small_point(3)) {
            let c = p.compose(&[u.clone(), v.clone()]).unwrap();
            prop_assert_eq!(c.eval(&a), p.eval(&[u.eval(&a), v.eval(&a)]));
            prop_assert!(c.degree() <= p.degree() * u.degree().max(v.degree()).max(1));
        }

        #[test]
        fn slice_matches_eval(p in small_poly(2), r in small_point(1), t in small_point(1)) {
            let s = p.slice_at_x(&r[0]);
            prop_assert_eq!(s.eval(&t[0]), p.eval(&[r[0].clone(), t[0].clone()]));
        }

        #[test]
        fn serde_round_trip(p in small_poly(3)) {
            let s = serde_json::to_string(&p).unwrap();
            let back: SparsePoly = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn float_eval_tracks_exact(p in small_poly(2), a in small_point(2)) {
            let exact = rational::to_f64(&p.eval(&a));
            let fast = p.to_float().eval(&[rational::to_f64(&a[0]), rational::to_f64(&a[1])]);
            prop_assert!((exact - fast).abs() <= 1e-9 * (1.0 + exact.abs()));
        }
    }
}
