//! Exact plane geometry: points, oriented line functionals, affine maps,
//! V-polygons and basic polygonal sets with open or closed faces.

mod placement;
mod polygon;

pub use placement::{
    compute_apex, interior_frame, normalize_step2, relocate_tau1, relocate_tau2, step2_violations, tau1_violations,
    tau2_violations, Tau1Placement,
};
pub use polygon::{is_curtain_certified, BasicPolygonalSet, Fiber, Outline, Region, VPolygon};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::SparsePoly;
use crate::rational::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("parallel unbounded edges: excluded by theorem hypothesis")]
    ParallelUnboundedEdges,
    #[error("polygon is not convex: {0}")]
    NonConvex(String),
    #[error("collinear consecutive edges at vertex {0}")]
    CollinearVertices(usize),
    #[error("degenerate polygon data: {0}")]
    Degenerate(String),
    #[error("affine map is not invertible")]
    Singular,
    #[error("operation needs {needed} edges, polygon has {found}")]
    TooFewEdges { needed: usize, found: usize },
    #[error("placement postcondition failed: {0}")]
    Placement(String),
}

impl GeometryError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            GeometryError::ParallelUnboundedEdges => "parallel_unbounded_edges",
            GeometryError::NonConvex(_) => "non_convex",
            GeometryError::CollinearVertices(_) => "collinear_vertices",
            GeometryError::Degenerate(_) => "degenerate",
            GeometryError::Singular => "singular_affine_map",
            GeometryError::TooFewEdges { .. } => "too_few_edges",
            GeometryError::Placement(_) => "placement_failed",
        }
    }
}

/// A point or a direction vector of the plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point2 {
    pub x: Scalar,
    pub y: Scalar,
}

pub type Vec2 = Point2;

impl Point2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point2 { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Point2::new(rational::int(x), rational::int(y))
    }

    pub fn origin() -> Self {
        Point2::ints(0, 0)
    }

    pub fn add(&self, o: &Point2) -> Point2 {
        Point2::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point2) -> Point2 {
        Point2::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, k: &Scalar) -> Point2 {
        Point2::new(&self.x * k, &self.y * k)
    }

    pub fn neg(&self) -> Point2 {
        Point2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn dot(&self, o: &Point2) -> Scalar {
        &self.x * &o.x + &self.y * &o.y
    }

    /// `self.x * o.y - self.y * o.x`
    pub fn cross(&self, o: &Point2) -> Scalar {
        &self.x * &o.y - &self.y * &o.x
    }

    /// Rotation by a quarter turn counterclockwise.
    pub fn perp(&self) -> Point2 {
        Point2::new(-self.y.clone(), self.x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [rational::to_f64(&self.x), rational::to_f64(&self.y)]
    }

    pub fn coords(&self) -> [Scalar; 2] {
        [self.x.clone(), self.y.clone()]
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::serde_pair::serialize(&[self.x.clone(), self.y.clone()], s)
    }
}

impl<'de> Deserialize<'de> for Point2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = rational::serde_pair::deserialize(d)?;
        Ok(Point2 { x, y })
    }
}

/// `l(x, y) = a x + b y + c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineFunctional {
    #[serde(with = "rational::serde_str")]
    pub a: Scalar,
    #[serde(with = "rational::serde_str")]
    pub b: Scalar,
    #[serde(with = "rational::serde_str")]
    pub c: Scalar,
}

impl LineFunctional {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Self {
        assert!(!(a.is_zero() && b.is_zero()), "line functional with zero gradient");
        LineFunctional { a, b, c }.primitive()
    }

    pub fn ints(a: i64, b: i64, c: i64) -> Self {
        LineFunctional::new(rational::int(a), rational::int(b), rational::int(c))
    }

    /// Functional of the line through `anchor` with direction `dir`, positive on
    /// the left of `dir` when `orientation = 1` and on the right when it is -1.
    pub fn through(anchor: &Point2, dir: &Vec2, orientation: i8) -> Self {
        let s = rational::int(orientation as i64);
        // s * cross(dir, z - anchor)
        let a = -&dir.y * &s;
        let b = &dir.x * &s;
        let c = (&dir.y * &anchor.x - &dir.x * &anchor.y) * &s;
        LineFunctional::new(a, b, c)
    }

    /// Positive multiple with coprime integer coefficients.
    pub fn primitive(self) -> Self {
        let den = [&self.a, &self.b, &self.c].iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let nums: Vec<BigInt> =
            [&self.a, &self.b, &self.c].iter().map(|q| (*q * Scalar::from_integer(den.clone())).to_integer()).collect();
        let g = nums.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
        let to = |n: &BigInt| Scalar::from_integer(n / &g);
        LineFunctional { a: to(&nums[0]), b: to(&nums[1]), c: to(&nums[2]) }
    }

    pub fn eval(&self, p: &Point2) -> Scalar {
        self.eval_xy(&p.x, &p.y)
    }

    pub fn eval_xy(&self, x: &Scalar, y: &Scalar) -> Scalar {
        &self.a * x + &self.b * y + &self.c
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        rational::to_f64(&self.a) * x + rational::to_f64(&self.b) * y + rational::to_f64(&self.c)
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// `l o A`, i.e. the functional `z -> l(A z)`.
    pub fn pull_back(&self, map: &AffineMap2) -> LineFunctional {
        let [[m00, m01], [m10, m11]] = &map.m;
        let [t0, t1] = &map.t;
        LineFunctional::new(
            &self.a * m00 + &self.b * m10,
            &self.a * m01 + &self.b * m11,
            &self.a * t0 + &self.b * t1 + &self.c,
        )
    }

    pub fn to_poly(&self) -> SparsePoly {
        SparsePoly::linear2(&self.a, &self.b, &self.c)
    }
}

impl fmt::Display for LineFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// `z -> M z + t` with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap2 {
    #[serde(rename = "matrix", with = "serde_matrix")]
    pub m: [[Scalar; 2]; 2],
    #[serde(rename = "translation", with = "rational::serde_pair")]
    pub t: [Scalar; 2],
}

mod serde_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[[Scalar; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[String; 2]> =
            m.iter().map(|r| [rational::to_string(&r[0]), rational::to_string(&r[1])]).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[Scalar; 2]; 2], D::Error> {
        use serde::de::Error;
        let rows = <[[String; 2]; 2]>::deserialize(d)?;
        let p = |s: &String| rational::parse(s).map_err(D::Error::custom);
        Ok([[p(&rows[0][0])?, p(&rows[0][1])?], [p(&rows[1][0])?, p(&rows[1][1])?]])
    }
}

impl AffineMap2 {
    pub fn identity() -> Self {
        AffineMap2::from_linear(
            [[rational::one(), rational::zero()], [rational::zero(), rational::one()]],
            Point2::origin(),
        )
    }

    pub fn from_linear(m: [[Scalar; 2]; 2], t: Point2) -> Self {
        AffineMap2 { m, t: [t.x, t.y] }
    }

    /// `(x, y) -> origin + x * e1 + y * e2`
    pub fn from_frame(origin: &Point2, e1: &Vec2, e2: &Vec2) -> Self {
        AffineMap2::from_linear([[e1.x.clone(), e2.x.clone()], [e1.y.clone(), e2.y.clone()]], origin.clone())
    }

    /// `z -> M (z - center)` with `M` given by its two rows.
    pub fn from_rows_centered(row0: &Vec2, row1: &Vec2, center: &Point2) -> Self {
        let lin = AffineMap2::from_linear(
            [[row0.x.clone(), row0.y.clone()], [row1.x.clone(), row1.y.clone()]],
            Point2::origin(),
        );
        let t = lin.apply_linear(&center.neg());
        AffineMap2::from_linear(lin.m, t)
    }

    pub fn det(&self) -> Scalar {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn is_identity(&self) -> bool {
        *self == AffineMap2::identity()
    }

    pub fn apply(&self, p: &Point2) -> Point2 {
        let l = self.apply_linear(p);
        Point2::new(l.x + &self.t[0], l.y + &self.t[1])
    }

    pub fn apply_xy(&self, x: &Scalar, y: &Scalar) -> [Scalar; 2] {
        [&self.m[0][0] * x + &self.m[0][1] * y + &self.t[0], &self.m[1][0] * x + &self.m[1][1] * y + &self.t[1]]
    }

    pub fn apply_linear(&self, v: &Vec2) -> Vec2 {
        Point2::new(&self.m[0][0] * &v.x + &self.m[0][1] * &v.y, &self.m[1][0] * &v.x + &self.m[1][1] * &v.y)
    }

    pub fn inverse(&self) -> Result<AffineMap2, GeometryError> {
        let det = self.det();
        if det.is_zero() {
            return Err(GeometryError::Singular);
        }
        let [[a, b], [c, d]] = &self.m;
        let inv = [[d / &det, -b / &det], [-c / &det, a / &det]];
        let lin = AffineMap2::from_linear(inv, Point2::origin());
        let t = lin.apply_linear(&Point2::new(self.t[0].clone(), self.t[1].clone())).neg();
        Ok(AffineMap2::from_linear(lin.m, t))
    }

    /// `self o inner`
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        let m = |i: usize, j: usize| &self.m[i][0] * &inner.m[0][j] + &self.m[i][1] * &inner.m[1][j];
        let t = self.apply(&Point2::new(inner.t[0].clone(), inner.t[1].clone()));
        AffineMap2::from_linear([[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]], t)
    }

    pub fn orientation(&self) -> i8 {
        rational::sign(&self.det())
    }

    /// Component polynomials in two variables.
    pub fn to_polys(&self) -> [SparsePoly; 2] {
        [
            SparsePoly::linear2(&self.m[0][0], &self.m[0][1], &self.t[0]),
            SparsePoly::linear2(&self.m[1][0], &self.m[1][1], &self.t[1]),
        ]
    }

    pub fn to_f64(&self) -> [f64; 6] {
        [
            rational::to_f64(&self.m[0][0]),
            rational::to_f64(&self.m[0][1]),
            rational::to_f64(&self.t[0]),
            rational::to_f64(&self.m[1][0]),
            rational::to_f64(&self.m[1][1]),
            rational::to_f64(&self.t[1]),
        ]
    }

    pub fn is_positive_det(&self) -> bool {
        self.det().is_positive()
    }
}
