//! Folding maps `(x, y) -> (x, y (1 + psi(x) phi(x, y))^2)` over a curtain,
//! and per-fiber certificates for their image.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::geometry::{is_curtain_certified, BasicPolygonalSet, Outline, Point2, Region};
use crate::poly::{FloatPoly, SparsePoly, UniPoly};
use crate::rational::{self, Scalar};

/// Bracket width reached by the root bisection, as a power of two.
pub const BRACKET_BITS: u32 = 40;
/// Number of points of the fiber grid.
pub const FIBER_GRID: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoldError {
    #[error("empty interval: c must be smaller than d")]
    EmptyInterval,
    #[error("input set is not a certified curtain")]
    NotCurtain,
    #[error("fiber at x = {r} is not a ray")]
    NotRay { r: String },
    #[error("fiber origin at x = {r} is not cut out by any retained generator")]
    NoVanishingGenerator { r: String },
    #[error("x = {r} lies outside the projection of the set")]
    OutsideProjection { r: String },
    #[error("fiber x = {r}: {clause}")]
    Contract { r: String, clause: String },
}

impl FoldError {
    pub fn code(&self) -> &'static str {
        match self {
            FoldError::EmptyInterval => "empty_interval",
            FoldError::NotCurtain => "not_curtain",
            FoldError::NotRay { .. } => "fiber_not_ray",
            FoldError::NoVanishingGenerator { .. } => "no_vanishing_generator",
            FoldError::OutsideProjection { .. } => "outside_projection",
            FoldError::Contract { .. } => "certificate_failed",
        }
    }
}

fn contract(r: &Scalar, clause: impl Into<String>) -> FoldError {
    FoldError::Contract { r: rational::to_string(r), clause: clause.into() }
}

/// Which sign convention produced `psi`. `Flipped` negates the prescribed
/// factor and exists only to reproduce the sign variant printed in one step
/// of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiSign {
    #[default]
    Lemma,
    Flipped,
}

/// `]c, d[` with `None` for an infinite end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational::serde_lower")]
    pub c: Option<Scalar>,
    #[serde(with = "rational::serde_upper")]
    pub d: Option<Scalar>,
}

impl Interval {
    pub fn new(c: Option<Scalar>, d: Option<Scalar>) -> Result<Self, FoldError> {
        if let (Some(c), Some(d)) = (&c, &d) {
            if c >= d {
                return Err(FoldError::EmptyInterval);
            }
        }
        Ok(Interval { c, d })
    }

    pub fn contains(&self, r: &Scalar) -> bool {
        self.c.as_ref().is_none_or(|c| r > c) && self.d.as_ref().is_none_or(|d| r < d)
    }
}

/// `(x - c)(x - d)`, `x - d` or `c - x` according to which ends are finite,
/// as a bivariate polynomial in `x`. Negative exactly on `]c, d[`.
pub fn build_psi(interval: &Interval) -> SparsePoly {
    let x = SparsePoly::var(2, 0);
    let k = |v: &Scalar| SparsePoly::constant(2, v.clone());
    match (&interval.c, &interval.d) {
        (Some(c), Some(d)) => (&x - &k(c)) * (&x - &k(d)),
        (None, Some(d)) => &x - &k(d),
        (Some(c), None) => &k(c) - &x,
        // no sign change on the whole line: the fold is the identity
        (None, None) => SparsePoly::constant(2, -Scalar::one()),
    }
}

/// Members of `family` not divisible by `x - r` for any real `r` in `]c, d[`.
pub fn select_family_prime(family: &[SparsePoly], interval: &Interval) -> Vec<SparsePoly> {
    family.iter().filter(|g| !divisible_by_vertical(g, interval)).cloned().collect()
}

fn divisible_by_vertical(g: &SparsePoly, interval: &Interval) -> bool {
    if g.is_zero() {
        return true;
    }
    if g.degree() == 1 {
        let b = g.coeff(&[0, 1]);
        let a = g.coeff(&[1, 0]);
        if !b.is_zero() || a.is_zero() {
            return false;
        }
        let root = -g.coeff(&[0, 0]) / a;
        return interval.contains(&root);
    }
    let content = g.coefficients_in_y().into_iter().fold(UniPoly::new(Vec::new()), |acc, c| acc.gcd(&c));
    if content.is_constant() {
        return false;
    }
    let n = content.count_real_roots(interval.c.as_ref(), interval.d.as_ref());
    n > 0
}

/// One folding stage together with the set it is applied to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub domain: BasicPolygonalSet,
    pub family: Vec<SparsePoly>,
    pub family_prime: Vec<SparsePoly>,
    pub interval: Interval,
    pub psi_sign: PsiSign,
    pub psi: SparsePoly,
    pub phi: SparsePoly,
    pub h: SparsePoly,
}

impl FoldSpec {
    pub fn c(&self) -> Option<&Scalar> {
        self.interval.c.as_ref()
    }

    pub fn d(&self) -> Option<&Scalar> {
        self.interval.d.as_ref()
    }

    /// Exact image of `(x, y)`, using the factored form of `h`.
    pub fn apply(&self, x: &Scalar, y: &Scalar) -> Scalar {
        let pt = [x.clone(), y.clone()];
        let mut phi = Scalar::one();
        for g in &self.family_prime {
            phi *= g.eval(&pt);
            if phi.is_zero() {
                return y.clone();
            }
        }
        let inner = Scalar::one() + self.psi.eval(&pt) * phi;
        y * &inner * &inner
    }

    pub fn compile(&self) -> FloatFold {
        FloatFold { psi: self.psi.to_float(), factors: self.family_prime.iter().map(SparsePoly::to_float).collect() }
    }

    /// `gamma_r(t) = 1 + psi(r) phi(r, t)`.
    pub fn gamma_slice(&self, r: &Scalar) -> UniPoly {
        let psi_r = self.psi.eval(&[r.clone(), Scalar::zero()]);
        self.phi.slice_at_x(r).uni().scale(&psi_r).add(&UniPoly::constant(Scalar::one()))
    }

    pub fn h_slice(&self, r: &Scalar) -> UniPoly {
        self.h.slice_at_x(r).uni().clone()
    }

    /// The set the lemma promises: the domain together with the closed upper
    /// half-strip over `]c, d[` intersected with the domain's projection.
    pub fn declared_image(&self) -> Region {
        let mut parts = vec![self.domain.clone()];
        let (plo, phi) = self.domain.projection_hull();
        let max = |a: Option<Scalar>, b: Option<Scalar>| match (a, b) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let min = |a: Option<Scalar>, b: Option<Scalar>| match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        // an end is open when it comes from the interval, closed when it
        // comes from the projection hull
        let lo_open = match (&self.interval.c, &plo) {
            (Some(c), Some(p)) => c >= p,
            (Some(_), None) => true,
            _ => false,
        };
        let hi_open = match (&self.interval.d, &phi) {
            (Some(d), Some(p)) => d <= p,
            (Some(_), None) => true,
            _ => false,
        };
        let lo = max(self.interval.c.clone(), plo);
        let hi = min(self.interval.d.clone(), phi);
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return Region::Union { parts };
            }
        }
        let up = Point2::ints(0, 1);
        let pt = |x: &Scalar| Point2::new(x.clone(), Scalar::zero());
        let strip = match (&lo, &hi) {
            (Some(a), Some(b)) => {
                let mut s = BasicPolygonalSet::from_outline(Outline::new(up.clone(), vec![pt(a), pt(b)], up), 1);
                if lo_open {
                    s = s.without_edge(0);
                }
                if hi_open {
                    s = s.without_edge(2);
                }
                s
            }
            (Some(a), None) => {
                let s = BasicPolygonalSet::from_outline(Outline::new(up, vec![pt(a)], Point2::ints(1, 0)), 1);
                if lo_open {
                    s.without_edge(0)
                } else {
                    s
                }
            }
            (None, Some(b)) => {
                let s = BasicPolygonalSet::from_outline(Outline::new(Point2::ints(-1, 0), vec![pt(b)], up), 1);
                if hi_open {
                    s.without_edge(1)
                } else {
                    s
                }
            }
            (None, None) => BasicPolygonalSet::from_outline(
                Outline::new(Point2::ints(-1, 0), vec![Point2::origin()], Point2::ints(1, 0)),
                1,
            ),
        };
        parts.push(strip);
        Region::Union { parts }
    }
}

/// Double-precision evaluator for a fold stage.
#[derive(Debug, Clone)]
pub struct FloatFold {
    psi: FloatPoly,
    factors: Vec<FloatPoly>,
}

impl FloatFold {
    pub fn apply(&self, x: f64, y: f64) -> f64 {
        let inner = self.inner(x, y);
        y * inner * inner
    }

    /// `1 + psi(x) phi(x, y)`, whose square scales `y`.
    pub fn inner(&self, x: f64, y: f64) -> f64 {
        let pt = [x, y];
        let phi: f64 = self.factors.iter().map(|g| g.eval(&pt)).product();
        1.0 + self.psi.eval(&pt) * phi
    }
}

/// Abscissae at which the fiber-origin precondition is checked: every critical
/// abscissa of the set and two interior points of each interval between them.
fn probe_abscissae(s: &BasicPolygonalSet) -> Vec<Scalar> {
    let crit = s.critical_abscissae();
    let (lo, hi) = s.projection_hull();
    let mut out = Vec::new();
    let third = |a: &Scalar, b: &Scalar| {
        let step = (b - a) / rational::int(3);
        [a + &step, a + &step + &step]
    };
    let one = Scalar::one();
    let first = crit.first().cloned().unwrap_or_else(Scalar::zero);
    let last = crit.last().cloned().unwrap_or_else(Scalar::zero);
    if lo.is_none() {
        out.push(&first - &one);
        out.push(&first - rational::int(7));
    }
    for w in crit.windows(2) {
        out.extend(third(&w[0], &w[1]));
    }
    out.extend(crit.iter().cloned());
    if hi.is_none() {
        out.push(&last + &one);
        out.push(&last + rational::int(7));
    }
    out.retain(|r| lo.as_ref().is_none_or(|l| r >= l) && hi.as_ref().is_none_or(|h| r <= h));
    out.sort();
    out.dedup();
    out
}

/// Builds the fold of `domain` over `]c, d[` from the defining `family`.
///
/// Checks the curtain condition and that every sampled fiber origin is a zero
/// of some retained generator.
pub fn build_fold_map(
    domain: &BasicPolygonalSet,
    family: Vec<SparsePoly>,
    interval: Interval,
    psi_sign: PsiSign,
) -> Result<FoldSpec, FoldError> {
    if !is_curtain_certified(domain) {
        return Err(FoldError::NotCurtain);
    }
    let family_prime = select_family_prime(&family, &interval);
    for r in probe_abscissae(domain) {
        let Some(f) = domain.fiber(&r) else { continue };
        let Some(lo) = f.lo.filter(|_| f.hi.is_none()) else {
            return Err(FoldError::NotRay { r: rational::to_string(&r) });
        };
        let pt = [r.clone(), lo];
        if !family_prime.iter().any(|g| g.eval(&pt).is_zero()) {
            return Err(FoldError::NoVanishingGenerator { r: rational::to_string(&r) });
        }
    }
    let mut psi = build_psi(&interval);
    if psi_sign == PsiSign::Flipped {
        psi = -psi;
    }
    let phi = family_prime.iter().fold(SparsePoly::one(2), |acc, g| &acc * g);
    let inner = SparsePoly::one(2) + &psi * &phi;
    let h = SparsePoly::var(2, 1) * (&inner * &inner);
    Ok(FoldSpec { domain: domain.clone(), family, family_prime, interval, psi_sign, psi, phi, h })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiberCase {
    /// `r` outside `]c, d[`: the fiber is mapped onto itself.
    Case1,
    /// `r` inside `]c, d[`: the fiber is mapped onto `[0, +inf[`.
    Case2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCertificate {
    #[serde(with = "rational::serde_str")]
    pub r: Scalar,
    pub case: FiberCase,
    #[serde(with = "rational::serde_str")]
    pub s_r: Scalar,
    /// Case 2 only: `gamma_r(lo) > 0 >= gamma_r(hi)` with `s_r < lo < hi`.
    pub bracket: Option<[String; 2]>,
    pub grid_points: usize,
}

/// Geometric grid `s + 2^e`, `e` evenly spaced in `[-20, 10]`, as exact dyadics.
pub fn fiber_grid(s: &Scalar, n: usize) -> Vec<Scalar> {
    (0..n)
        .map(|i| {
            let e = -20.0 + 30.0 * i as f64 / (n.max(2) - 1) as f64;
            s + rational::from_f64(e.exp2()).expect("finite grid offset")
        })
        .collect()
}

/// Per-fiber certificate: checks the image of the fiber `S_r` exactly where
/// the argument needs exactness and on a fiber grid elsewhere.
pub fn certify_fiber(spec: &FoldSpec, r: &Scalar) -> Result<FiberCertificate, FoldError> {
    certify_fiber_with_grid(spec, r, FIBER_GRID)
}

pub fn certify_fiber_with_grid(spec: &FoldSpec, r: &Scalar, grid: usize) -> Result<FiberCertificate, FoldError> {
    let fiber = spec.domain.fiber(r).ok_or_else(|| FoldError::OutsideProjection { r: rational::to_string(r) })?;
    let s_r = match (&fiber.lo, &fiber.hi) {
        (Some(lo), None) => lo.clone(),
        _ => return Err(FoldError::NotRay { r: rational::to_string(r) }),
    };
    let h = spec.h_slice(r);
    let psi_r = spec.psi.eval(&[r.clone(), Scalar::zero()]);
    let ts = fiber_grid(&s_r, grid);
    if !spec.interval.contains(r) {
        if psi_r.is_negative() {
            return Err(contract(r, "psi(r) < 0 outside ]c, d["));
        }
        if h.eval(&s_r) != s_r {
            return Err(contract(r, "h_r(s_r) != s_r"));
        }
        let deg = h.degree().unwrap_or(0);
        if deg.is_multiple_of(2) || !h.leading_coefficient().is_positive() {
            return Err(contract(r, "h_r lacks a positive odd leading term"));
        }
        let excess = h.add(&UniPoly::new(vec![Scalar::zero(), -Scalar::one()]));
        if let Some(t) = ts.iter().find(|t| excess.sign_at(t) < 0) {
            return Err(contract(r, format!("h_r(t) < t at t = {}", rational::to_string(t))));
        }
        return Ok(FiberCertificate {
            r: r.clone(),
            case: FiberCase::Case1,
            s_r,
            bracket: None,
            grid_points: ts.len(),
        });
    }
    let gamma = spec.gamma_slice(r);
    if gamma.eval(&s_r) != Scalar::one() {
        return Err(contract(r, "gamma_r(s_r) != 1"));
    }
    if gamma.is_constant() {
        return Err(contract(r, "gamma_r is constant"));
    }
    if !gamma.leading_coefficient().is_negative() {
        return Err(contract(r, "gamma_r has a nonnegative leading coefficient"));
    }
    let mut hi = s_r.clone().max(Scalar::zero()) + Scalar::one();
    while !gamma.eval(&hi).is_negative() {
        hi = &hi + &hi;
    }
    let mut lo = s_r.clone();
    let width = Scalar::new(1.into(), num_bigint::BigInt::one() << BRACKET_BITS);
    let two = rational::int(2);
    while &hi - &lo > width || lo == s_r {
        let mid = (&lo + &hi) / &two;
        if gamma.eval(&mid).is_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if let Some(t) = ts.iter().find(|t| h.sign_at(t) < 0) {
        return Err(contract(r, format!("h_r < 0 at t = {}", rational::to_string(t))));
    }
    Ok(FiberCertificate {
        r: r.clone(),
        case: FiberCase::Case2,
        s_r,
        bracket: Some([rational::to_string(&lo), rational::to_string(&hi)]),
        grid_points: ts.len(),
    })
}
