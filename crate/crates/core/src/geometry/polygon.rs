use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AffineMap2, GeometryError, LineFunctional, Point2, Vec2};
use crate::rational::{self, Scalar};

/// Boundary description `[dir_in, p_1, ..., p_k, dir_out]`: a ray from `p_1`
/// with direction `dir_in`, the chain of bounded edges, and a ray from `p_k`
/// with direction `dir_out`. A single vertex with opposite directions is a
/// half-plane whose boundary passes through that vertex.
///
/// This is also the polygon JSON format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outline {
    pub vertices: Vec<Point2>,
    pub dir_in: Vec2,
    pub dir_out: Vec2,
}

impl Outline {
    pub fn new(dir_in: Vec2, vertices: Vec<Point2>, dir_out: Vec2) -> Self {
        Outline { vertices, dir_in, dir_out }
    }

    pub fn is_halfplane(&self) -> bool {
        self.vertices.len() == 1
            && self.dir_in.cross(&self.dir_out).is_zero()
            && self.dir_in.dot(&self.dir_out).is_negative()
    }

    /// Edge count: 1 for a half-plane, otherwise one more than the vertex count.
    pub fn edge_count(&self) -> usize {
        if self.is_halfplane() {
            1
        } else {
            self.vertices.len() + 1
        }
    }

    /// Directions in which the boundary is traversed, from the far end of the
    /// incoming ray to the far end of the outgoing ray.
    pub fn travel_directions(&self) -> Vec<Vec2> {
        let mut d = vec![self.dir_in.neg()];
        for w in self.vertices.windows(2) {
            d.push(w[1].sub(&w[0]));
        }
        d.push(self.dir_out.clone());
        d
    }

    /// Sign of the first non-degenerate turn; +1 when the interior is on the left.
    fn turn_orientation(&self) -> i8 {
        if self.is_halfplane() {
            return 1;
        }
        let d = self.travel_directions();
        d.windows(2).map(|w| rational::sign(&w[0].cross(&w[1]))).find(|s| *s != 0).unwrap_or(1)
    }

    fn edge_functionals(&self, orientation: i8) -> Vec<LineFunctional> {
        if self.is_halfplane() {
            return vec![LineFunctional::through(&self.vertices[0], &self.dir_out, orientation)];
        }
        let d = self.travel_directions();
        let k = self.vertices.len();
        let mut out = Vec::with_capacity(k + 1);
        out.push(LineFunctional::through(&self.vertices[0], &d[0], orientation));
        for i in 0..k - 1 {
            out.push(LineFunctional::through(&self.vertices[i], &d[i + 1], orientation));
        }
        out.push(LineFunctional::through(&self.vertices[k - 1], &d[k], orientation));
        out
    }

    pub fn transform(&self, map: &AffineMap2) -> Outline {
        Outline {
            vertices: self.vertices.iter().map(|p| map.apply(p)).collect(),
            dir_in: map.apply_linear(&self.dir_in),
            dir_out: map.apply_linear(&self.dir_out),
        }
    }

    fn validate(&self) -> Result<i8, GeometryError> {
        if self.vertices.is_empty() {
            return Err(GeometryError::Degenerate("no vertices".into()));
        }
        if self.dir_in.is_zero() || self.dir_out.is_zero() {
            return Err(GeometryError::Degenerate("zero direction vector".into()));
        }
        if self.dir_in.cross(&self.dir_out).is_zero() {
            if self.is_halfplane() {
                return Ok(1);
            }
            return Err(GeometryError::ParallelUnboundedEdges);
        }
        let d = self.travel_directions();
        if let Some(i) = d.iter().position(Point2::is_zero) {
            return Err(GeometryError::Degenerate(format!("repeated vertex before edge {i}")));
        }
        let s = rational::sign(&d[0].cross(&d[1]));
        if s == 0 {
            return Err(GeometryError::CollinearVertices(0));
        }
        for i in 1..d.len() {
            let turn = rational::sign(&d[i - 1].cross(&d[i]));
            if turn == 0 {
                return Err(GeometryError::CollinearVertices(i - 1));
            }
            if turn != s {
                return Err(GeometryError::NonConvex(format!("reflex turn at vertex {i}")));
            }
            if rational::sign(&d[0].cross(&d[i])) != s {
                return Err(GeometryError::NonConvex(format!("boundary winds past a half turn at edge {i}")));
            }
        }
        Ok(s)
    }
}

/// A validated V-polygon (or half-plane): convex, strictly convex at every
/// vertex, unbounded edges not parallel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "Outline")]
pub struct VPolygon {
    outline: Outline,
    orientation: i8,
}

impl From<VPolygon> for Outline {
    fn from(p: VPolygon) -> Outline {
        p.outline
    }
}

impl<'de> Deserialize<'de> for VPolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let o = Outline::deserialize(d)?;
        VPolygon::validate(o).map_err(serde::de::Error::custom)
    }
}

impl VPolygon {
    pub fn validate(outline: Outline) -> Result<VPolygon, GeometryError> {
        let orientation = outline.validate()?;
        Ok(VPolygon { outline, orientation })
    }

    pub fn new(dir_in: Vec2, vertices: Vec<Point2>, dir_out: Vec2) -> Result<VPolygon, GeometryError> {
        VPolygon::validate(Outline::new(dir_in, vertices, dir_out))
    }

    /// The half-plane on the left of `direction` through `base`.
    pub fn halfplane(base: Point2, direction: Vec2) -> Result<VPolygon, GeometryError> {
        VPolygon::new(direction.neg(), vec![base], direction)
    }

    pub fn outline(&self) -> &Outline {
        &self.outline
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.outline.vertices
    }

    pub fn dir_in(&self) -> &Vec2 {
        &self.outline.dir_in
    }

    pub fn dir_out(&self) -> &Vec2 {
        &self.outline.dir_out
    }

    /// +1 when listed counterclockwise (interior on the left of travel).
    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn is_halfplane(&self) -> bool {
        self.outline.is_halfplane()
    }

    pub fn edge_count(&self) -> usize {
        self.outline.edge_count()
    }

    /// One inward-oriented functional per edge, in boundary order.
    pub fn functionals(&self) -> Vec<LineFunctional> {
        self.outline.edge_functionals(self.orientation)
    }

    /// Image under an invertible affine map. Validity is preserved, so no
    /// re-validation happens.
    pub fn transform(&self, map: &AffineMap2) -> VPolygon {
        VPolygon { outline: self.outline.transform(map), orientation: self.orientation * map.orientation() }
    }

    /// The polygon with its last vertex removed and the outgoing ray moved to
    /// the new last vertex.
    pub fn without_last_vertex(&self) -> Result<VPolygon, GeometryError> {
        let mut v = self.outline.vertices.clone();
        v.pop();
        VPolygon::new(self.outline.dir_in.clone(), v, self.outline.dir_out.clone())
    }

    pub fn to_set(&self) -> BasicPolygonalSet {
        BasicPolygonalSet::from_outline(self.outline.clone(), self.orientation)
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.functionals().iter().all(|l| !l.eval(p).is_negative())
    }
}

/// Vertical fiber `{r} x <lo, hi>` of a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub lo: Option<Scalar>,
    pub lo_closed: bool,
    pub hi: Option<Scalar>,
    pub hi_closed: bool,
}

impl Fiber {
    pub fn contains(&self, t: &Scalar) -> bool {
        let above = match &self.lo {
            None => true,
            Some(lo) => t > lo || (self.lo_closed && t == lo),
        };
        let below = match &self.hi {
            None => true,
            Some(hi) => t < hi || (self.hi_closed && t == hi),
        };
        above && below
    }

    /// A ray `<lo, +inf[`.
    pub fn is_ray(&self) -> bool {
        self.lo.is_some() && self.hi.is_none()
    }
}

/// Convex polygonal region cut out by linear inequalities, with any subset of
/// edges and vertices removed. Membership is exact.
///
/// The outline is kept for sampling and drawing; it need not be a V-polygon
/// (strips with parallel sides are allowed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicPolygonalSet {
    pub outline: Outline,
    pub orientation: i8,
    pub functionals: Vec<LineFunctional>,
    pub edge_included: Vec<bool>,
    pub vertex_included: Vec<bool>,
}

impl BasicPolygonalSet {
    /// All faces closed.
    pub fn from_outline(outline: Outline, orientation: i8) -> Self {
        let functionals = outline.edge_functionals(orientation);
        let vertex_included = vec![true; outline.vertices.len()];
        BasicPolygonalSet {
            edge_included: vec![true; functionals.len()],
            functionals,
            vertex_included,
            outline,
            orientation,
        }
    }

    /// Same outline with orientation read off the boundary turns.
    pub fn from_outline_auto(outline: Outline) -> Self {
        let s = outline.turn_orientation();
        BasicPolygonalSet::from_outline(outline, s)
    }

    /// Removes edge `i` (and with it its endpoints).
    pub fn without_edge(mut self, i: usize) -> Self {
        self.edge_included[i] = false;
        if !self.outline.is_halfplane() {
            let k = self.outline.vertices.len();
            if i >= 1 {
                self.vertex_included[i - 1] = false;
            }
            if i < k {
                self.vertex_included[i] = false;
            }
        }
        self
    }

    pub fn without_vertex(mut self, j: usize) -> Self {
        self.vertex_included[j] = false;
        self
    }

    /// Every edge removed: the interior.
    pub fn interior(mut self) -> Self {
        self.edge_included.iter_mut().for_each(|e| *e = false);
        self.vertex_included.iter_mut().for_each(|e| *e = false);
        self
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.contains_xy(&p.x, &p.y)
    }

    pub fn contains_xy(&self, x: &Scalar, y: &Scalar) -> bool {
        for (l, inc) in self.functionals.iter().zip(&self.edge_included) {
            let v = l.eval_xy(x, y);
            if v.is_negative() || (!inc && v.is_zero()) {
                return false;
            }
        }
        for (p, inc) in self.outline.vertices.iter().zip(&self.vertex_included) {
            if !inc && &p.x == x && &p.y == y {
                return false;
            }
        }
        true
    }

    /// Inexact membership with tolerance `eps` on each functional; faces are
    /// treated as closed.
    pub fn contains_f64(&self, x: f64, y: f64, eps: f64) -> bool {
        self.functionals.iter().all(|l| l.eval_f64(x, y) >= -eps)
    }

    pub fn transform(&self, map: &AffineMap2) -> BasicPolygonalSet {
        let inv = map.inverse().expect("transform by a singular affine map");
        BasicPolygonalSet {
            outline: self.outline.transform(map),
            orientation: self.orientation * map.orientation(),
            functionals: self.functionals.iter().map(|l| l.pull_back(&inv)).collect(),
            edge_included: self.edge_included.clone(),
            vertex_included: self.vertex_included.clone(),
        }
    }

    /// The vertical fiber at abscissa `r`, or `None` when empty.
    pub fn fiber(&self, r: &Scalar) -> Option<Fiber> {
        let mut lo: Option<(Scalar, bool)> = None;
        let mut hi: Option<(Scalar, bool)> = None;
        for (l, inc) in self.functionals.iter().zip(&self.edge_included) {
            let base = &l.a * r + &l.c;
            if l.b.is_zero() {
                if base.is_negative() || (!inc && base.is_zero()) {
                    return None;
                }
                continue;
            }
            let bound = -base / &l.b;
            if l.b.is_positive() {
                tighten(&mut lo, bound, *inc, Ordering::Greater);
            } else {
                tighten(&mut hi, bound, *inc, Ordering::Less);
            }
        }
        for (p, inc) in self.outline.vertices.iter().zip(&self.vertex_included) {
            if *inc || &p.x != r {
                continue;
            }
            if let Some((v, closed)) = lo.as_mut() {
                if *v == p.y {
                    *closed = false;
                }
            }
            if let Some((v, closed)) = hi.as_mut() {
                if *v == p.y {
                    *closed = false;
                }
            }
        }
        if let (Some((a, ca)), Some((b, cb))) = (&lo, &hi) {
            if a > b || (a == b && !(*ca && *cb)) {
                return None;
            }
        }
        Some(Fiber {
            lo_closed: lo.as_ref().is_some_and(|v| v.1),
            lo: lo.map(|v| v.0),
            hi_closed: hi.as_ref().is_some_and(|v| v.1),
            hi: hi.map(|v| v.0),
        })
    }

    /// Abscissae where the fiber structure can change: vertex abscissae and the
    /// lines of vertical functionals.
    pub fn critical_abscissae(&self) -> Vec<Scalar> {
        let mut xs: Vec<Scalar> = self.outline.vertices.iter().map(|p| p.x.clone()).collect();
        for l in &self.functionals {
            if l.b.is_zero() {
                xs.push(-&l.c / &l.a);
            }
        }
        xs.sort();
        xs.dedup();
        xs
    }

    /// Closed hull of the projection to the x-axis, `None` meaning unbounded.
    pub fn projection_hull(&self) -> (Option<Scalar>, Option<Scalar>) {
        if self.outline.is_halfplane() {
            let d = &self.outline.dir_out;
            if d.x.is_zero() {
                // vertical boundary line
                let x0 = self.outline.vertices[0].x.clone();
                let inward = self.functionals[0].a.is_positive();
                return if inward { (Some(x0), None) } else { (None, Some(x0)) };
            }
            return (None, None);
        }
        let xs = self.outline.vertices.iter().map(|p| &p.x);
        let mut lo = xs.clone().min().cloned();
        let mut hi = xs.max().cloned();
        for d in [&self.outline.dir_in, &self.outline.dir_out] {
            if d.x.is_negative() {
                lo = None;
            }
            if d.x.is_positive() {
                hi = None;
            }
        }
        (lo, hi)
    }
}

fn tighten(slot: &mut Option<(Scalar, bool)>, bound: Scalar, closed: bool, better: Ordering) {
    match slot {
        None => *slot = Some((bound, closed)),
        Some((v, c)) => match bound.cmp(v) {
            o if o == better => *slot = Some((bound, closed)),
            Ordering::Equal => *c = *c && closed,
            _ => {}
        },
    }
}

/// Lemma-style curtain test: the set lies in `{y >= 0}` and its unbounded
/// directions `(a1, b1)` (incoming) and `(a2, b2)` (outgoing, counterclockwise
/// reading) satisfy `a1 <= 0 <= a2`. A positive answer implies every vertical
/// fiber is empty or a ray.
pub fn is_curtain_certified(s: &BasicPolygonalSet) -> bool {
    let o = &s.outline;
    if o.is_halfplane() {
        // boundary horizontal, interior above, boundary at or above y = 0
        let l = &s.functionals[0];
        return l.a.is_zero() && l.b.is_positive() && !o.vertices[0].y.is_negative();
    }
    if o.vertices.iter().any(|p| p.y.is_negative()) {
        return false;
    }
    if o.dir_in.y.is_negative() || o.dir_out.y.is_negative() {
        return false;
    }
    let (v, w) = if s.orientation >= 0 { (&o.dir_in, &o.dir_out) } else { (&o.dir_out, &o.dir_in) };
    !v.x.is_positive() && !w.x.is_negative()
}

/// Target or intermediate set of a staged map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    /// All of the plane (or space, for arity 3).
    Everything { arity: usize },
    /// `R^2 x ]0, +inf[` inside `R^3`.
    UpperOpenHalfSpace,
    /// Union of basic polygonal sets in the plane.
    Union { parts: Vec<BasicPolygonalSet> },
}

impl Region {
    pub fn single(s: BasicPolygonalSet) -> Self {
        Region::Union { parts: vec![s] }
    }

    pub fn arity(&self) -> usize {
        match self {
            Region::Everything { arity } => *arity,
            Region::UpperOpenHalfSpace => 3,
            Region::Union { .. } => 2,
        }
    }

    pub fn contains(&self, p: &[Scalar]) -> bool {
        match self {
            Region::Everything { arity } => p.len() == *arity,
            Region::UpperOpenHalfSpace => p.len() == 3 && p[2].is_positive(),
            Region::Union { parts } => p.len() == 2 && parts.iter().any(|s| s.contains_xy(&p[0], &p[1])),
        }
    }

    pub fn parts(&self) -> &[BasicPolygonalSet] {
        match self {
            Region::Union { parts } => parts,
            _ => &[],
        }
    }

    pub fn transform(&self, map: &AffineMap2) -> Region {
        match self {
            Region::Union { parts } => Region::Union { parts: parts.iter().map(|s| s.transform(map)).collect() },
            other => other.clone(),
        }
    }

    /// Fiber of a planar union as a list of disjoint-or-touching intervals sorted
    /// by lower end, merged where they overlap.
    pub fn fiber_intervals(&self, r: &Scalar) -> Vec<Fiber> {
        let mut fs: Vec<Fiber> = self.parts().iter().filter_map(|s| s.fiber(r)).collect();
        fs.sort_by(|a, b| match (&a.lo, &b.lo) {
            (None, None) => Ordering::Equal,
            (None, _) => Ordering::Less,
            (_, None) => Ordering::Greater,
            (Some(x), Some(y)) => x.cmp(y).then(b.lo_closed.cmp(&a.lo_closed)),
        });
        let mut out: Vec<Fiber> = Vec::new();
        for f in fs {
            if let Some(last) = out.last_mut() {
                let joins = match (&last.hi, &f.lo) {
                    (None, _) => true,
                    (Some(_), None) => true,
                    (Some(h), Some(l)) => l < h || (l == h && (last.hi_closed || f.lo_closed)),
                };
                if joins {
                    match (&last.hi, &f.hi) {
                        (None, _) => {}
                        (_, None) => {
                            last.hi = None;
                            last.hi_closed = false;
                        }
                        (Some(a), Some(b)) => {
                            if b > a {
                                last.hi = Some(b.clone());
                                last.hi_closed = f.hi_closed;
                            } else if a == b {
                                last.hi_closed |= f.hi_closed;
                            }
                        }
                    }
                    continue;
                }
            }
            out.push(f);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn quadrant() -> VPolygon {
        VPolygon::new(Point2::ints(0, 1), vec![Point2::origin()], Point2::ints(1, 0)).unwrap()
    }

    #[test]
    fn quadrant_is_valid_with_axis_functionals() {
        let q = quadrant();
        assert_eq!(q.edge_count(), 2);
        let fs = q.functionals();
        assert!(fs.contains(&LineFunctional::ints(1, 0, 0)));
        assert!(fs.contains(&LineFunctional::ints(0, 1, 0)));
    }

    #[test]
    fn strip_is_rejected_as_parallel() {
        let e = VPolygon::new(Point2::ints(0, 1), vec![Point2::ints(0, 0), Point2::ints(1, 0)], Point2::ints(0, 1))
            .unwrap_err();
        assert_eq!(e, GeometryError::ParallelUnboundedEdges);
        assert_eq!(e.code(), "parallel_unbounded_edges");
        let e = VPolygon::new(Point2::ints(0, 1), vec![Point2::origin()], Point2::ints(0, 1)).unwrap_err();
        assert_eq!(e, GeometryError::ParallelUnboundedEdges);
    }

    #[test]
    fn reflex_turn_is_rejected() {
        let e = VPolygon::new(
            Point2::ints(-1, 1),
            vec![Point2::ints(0, 0), Point2::ints(1, 1), Point2::ints(2, 0)],
            Point2::ints(1, 1),
        )
        .unwrap_err();
        assert_eq!(e.code(), "non_convex");
    }

    #[test]
    fn collinear_vertices_rejected() {
        let e = VPolygon::new(
            Point2::ints(-1, 1),
            vec![Point2::ints(0, 0), Point2::ints(1, 0), Point2::ints(2, 0)],
            Point2::ints(1, 1),
        )
        .unwrap_err();
        assert_eq!(e.code(), "collinear_vertices");
    }

    #[test]
    fn incoming_ray_along_first_edge_is_collinear() {
        let e = VPolygon::new(Point2::ints(-1, 1), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1))
            .unwrap_err();
        assert_eq!(e, GeometryError::CollinearVertices(0));
    }

    #[test]
    fn clockwise_listing_is_accepted() {
        let ccw = VPolygon::new(Point2::ints(-1, 2), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1))
            .unwrap();
        let cw = VPolygon::new(Point2::ints(2, 1), vec![Point2::ints(1, 0), Point2::ints(0, 1)], Point2::ints(-1, 2))
            .unwrap();
        assert_eq!(ccw.orientation(), 1);
        assert_eq!(cw.orientation(), -1);
        let mut a = ccw.functionals();
        let mut b = cw.functionals();
        a.sort_by_key(|l| format!("{l:?}"));
        b.sort_by_key(|l| format!("{l:?}"));
        assert_eq!(a, b);
    }

    #[test]
    fn halfplane_encoding() {
        let h = VPolygon::halfplane(Point2::origin(), Point2::ints(1, 0)).unwrap();
        assert!(h.is_halfplane());
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.functionals(), vec![LineFunctional::ints(0, 1, 0)]);
    }

    #[test]
    fn curtain_examples() {
        assert!(is_curtain_certified(&quadrant().to_set()));
        // incoming direction pointing right: alpha_1 = 1 > 0
        let p = VPolygon::new(Point2::ints(1, 1), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1));
        if let Ok(p) = p {
            assert!(!is_curtain_certified(&p.to_set()));
        }
        let p = VPolygon::new(Point2::ints(-1, 1), vec![Point2::ints(0, -1), Point2::ints(1, 0)], Point2::ints(0, 1))
            .unwrap();
        assert!(!is_curtain_certified(&p.to_set()));
        let h = VPolygon::halfplane(Point2::ints(0, 1), Point2::ints(1, 0)).unwrap();
        assert!(is_curtain_certified(&h.to_set()));
    }

    #[test]
    fn membership_with_deleted_faces() {
        let s = quadrant().to_set().without_vertex(0);
        assert!(!s.contains(&Point2::origin()));
        assert!(s.contains(&Point2::ints(0, 1)));
        let s = quadrant().to_set().without_edge(0);
        assert!(!s.contains(&Point2::ints(0, 1)));
        assert!(s.contains(&Point2::ints(1, 0)));
        assert!(!s.contains(&Point2::origin()));
    }

    #[test]
    fn fibers() {
        let p = VPolygon::new(Point2::ints(-1, 2), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1))
            .unwrap();
        let s = p.to_set();
        let f = s.fiber(&ratio(1, 2)).unwrap();
        assert_eq!(f.lo, Some(ratio(1, 2)));
        assert!(f.lo_closed && f.hi.is_none());
        let f = s.fiber(&int(-3)).unwrap();
        assert_eq!(f.lo, Some(int(7)));
        let s2 = s.clone().without_vertex(1);
        assert!(!s2.fiber(&int(1)).unwrap().lo_closed);
        let q = quadrant().to_set();
        assert!(q.fiber(&int(-1)).is_none());
        assert_eq!(q.projection_hull(), (Some(int(0)), None));
    }

    #[test]
    fn union_fiber_merges() {
        let strip = BasicPolygonalSet::from_outline_auto(Outline::new(
            Point2::ints(0, 1),
            vec![Point2::ints(0, 0), Point2::ints(2, 0)],
            Point2::ints(0, 1),
        ));
        let upper = VPolygon::halfplane(Point2::ints(0, 5), Point2::ints(1, 0)).unwrap().to_set();
        let r = Region::Union { parts: vec![upper, strip] };
        let f = r.fiber_intervals(&int(1));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].lo, Some(int(0)));
        assert!(f[0].hi.is_none());
        assert_eq!(r.fiber_intervals(&int(3))[0].lo, Some(int(5)));
    }

    #[test]
    fn transform_preserves_membership() {
        let p = VPolygon::new(Point2::ints(-1, 2), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1))
            .unwrap();
        let s = p.to_set().without_vertex(0);
        let a = AffineMap2::from_linear([[int(0), int(1)], [int(1), int(0)]], Point2::ints(3, -2));
        let t = s.transform(&a);
        for x in -3..4 {
            for y in -3..4 {
                let z = Point2::new(ratio(x, 2), ratio(y, 2));
                assert_eq!(s.contains(&z), t.contains(&a.apply(&z)));
            }
        }
        assert!(!t.contains(&a.apply(&Point2::ints(0, 1))));
    }
}
