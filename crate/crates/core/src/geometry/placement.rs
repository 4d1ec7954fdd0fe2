//! Affine placements used by the inductive construction. Each placement is an
//! explicit frame change; the `*_violations` functions restate the required
//! position as exact predicates so callers and tests can check the output.

use num_traits::{One, Signed, Zero};

use super::{AffineMap2, GeometryError, Point2, VPolygon};
use crate::rational::{self, Scalar};

/// Moves a polygon with at least three edges so that the last bounded edge
/// lies on `{y = 0}` with its first endpoint at the origin, the polygon is in
/// `{y >= 0}`, vertex abscissae increase strictly, and
/// `v = (a1, b1)`, `w = (a2, b2)` have `a1 < 0 < a2`, `b1, b2 > 0`.
///
/// Returns the map together with the image polygon, which is listed
/// counterclockwise.
pub fn normalize_step2(p: &VPolygon) -> Result<(AffineMap2, VPolygon), GeometryError> {
    if p.edge_count() <= 2 {
        return Err(GeometryError::TooFewEdges { needed: 3, found: p.edge_count() });
    }
    let s = rational::int(p.orientation() as i64);
    let a = p.dir_in().neg();
    let b = p.dir_out();
    let u = a.perp().sub(&b.perp()).scale(&s);
    let k = p.vertices().len();
    let anchor = &p.vertices()[k - 2];
    let e = p.vertices()[k - 1].sub(anchor);
    let row1 = e.perp().scale(&s);
    let map = AffineMap2::from_rows_centered(&u, &row1, anchor);
    let image = p.transform(&map);
    debug_assert!(step2_violations(&image).is_empty(), "{:?}", step2_violations(&image));
    Ok((map, image))
}

/// Failed conditions of the normalized position produced by [`normalize_step2`].
pub fn step2_violations(p: &VPolygon) -> Vec<String> {
    let mut out = Vec::new();
    let vs = p.vertices();
    let k = vs.len();
    if k < 2 {
        out.push("fewer than two vertices".into());
        return out;
    }
    if p.orientation() != 1 {
        out.push("not counterclockwise".into());
    }
    if !vs[k - 2].is_zero() {
        out.push("second to last vertex is not the origin".into());
    }
    if !vs[k - 1].y.is_zero() || !vs[k - 1].x.is_positive() {
        out.push("last vertex not on the positive x-axis".into());
    }
    if vs.windows(2).any(|w| w[0].x >= w[1].x) {
        out.push("vertex abscissae not strictly increasing".into());
    }
    if !(p.dir_in().x.is_negative() && p.dir_in().y.is_positive()) {
        out.push("incoming direction not in the open second quadrant".into());
    }
    if !(p.dir_out().x.is_positive() && p.dir_out().y.is_positive()) {
        out.push("outgoing direction not in the open first quadrant".into());
    }
    if vs.iter().any(|v| v.y.is_negative()) {
        out.push("vertex below the x-axis".into());
    }
    if p.functionals().iter().any(|l| l.is_vertical()) {
        out.push("vertical edge".into());
    }
    out
}

/// Point of the outgoing ray at the abscissa of the last vertex.
pub fn compute_apex(p: &VPolygon) -> Result<Point2, GeometryError> {
    let vs = p.vertices();
    if vs.len() < 2 {
        return Err(GeometryError::TooFewEdges { needed: 3, found: p.edge_count() });
    }
    let w = p.dir_out();
    if w.x.is_zero() {
        return Err(GeometryError::Degenerate("vertical outgoing direction".into()));
    }
    let base = &vs[vs.len() - 2];
    let t = (&vs[vs.len() - 1].x - &base.x) / &w.x;
    Ok(base.add(&w.scale(&t)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tau1Placement {
    pub map: AffineMap2,
    pub polygon: VPolygon,
    pub apex: Point2,
}

/// Second placement: the last vertex goes to the origin, the outgoing ray onto
/// the positive x-axis, and the apex `q` into the open first quadrant, while
/// the incoming direction keeps a negative abscissa.
pub fn relocate_tau1(p: &VPolygon, q: &Point2) -> Result<Tau1Placement, GeometryError> {
    let v = p.dir_in();
    let w = p.dir_out();
    let row0 = Point2::new(&v.y + Scalar::one(), -v.x.clone());
    let row1 = Point2::new(-w.y.clone(), w.x.clone());
    let last = p.vertices().last().expect("validated polygon has a vertex");
    let map = AffineMap2::from_rows_centered(&row0, &row1, last);
    let polygon = p.transform(&map);
    let apex = map.apply(q);
    let bad = tau1_violations(&polygon, &apex);
    if !bad.is_empty() {
        return Err(GeometryError::Placement(bad.join("; ")));
    }
    Ok(Tau1Placement { map, polygon, apex })
}

pub fn tau1_violations(p: &VPolygon, apex: &Point2) -> Vec<String> {
    let mut out = Vec::new();
    let last = p.vertices().last().expect("validated polygon has a vertex");
    if !last.is_zero() {
        out.push("last vertex is not the origin".into());
    }
    if !(p.dir_out().y.is_zero() && p.dir_out().x.is_positive()) {
        out.push("outgoing ray not along the positive x-axis".into());
    }
    if !(apex.x.is_positive() && apex.y.is_positive()) {
        out.push("apex not in the open first quadrant".into());
    }
    if !p.dir_in().x.is_negative() {
        out.push("incoming direction has nonnegative abscissa".into());
    }
    if p.orientation() != 1 {
        out.push("not counterclockwise".into());
    }
    out
}

/// Third placement: the last vertex stays at the origin, the last bounded edge
/// turns onto the negative x-axis and the outgoing ray onto the positive
/// y-axis, so the polygon sits in `{x <= 0, y >= 0}`.
pub fn relocate_tau2(p: &VPolygon) -> Result<(AffineMap2, VPolygon), GeometryError> {
    let vs = p.vertices();
    let k = vs.len();
    if k < 2 {
        return Err(GeometryError::TooFewEdges { needed: 3, found: p.edge_count() });
    }
    let d1 = vs[k - 2].sub(&vs[k - 1]);
    let w = p.dir_out();
    // frame with columns (d1, w), then onto (-1, 0) and (0, 1)
    let frame = AffineMap2::from_frame(&vs[k - 1], &d1, w);
    let target =
        AffineMap2::from_linear([[-Scalar::one(), Scalar::zero()], [Scalar::zero(), Scalar::one()]], Point2::origin());
    let map = target.compose(&frame.inverse()?);
    let image = p.transform(&map);
    let bad = tau2_violations(&image);
    if !bad.is_empty() {
        return Err(GeometryError::Placement(bad.join("; ")));
    }
    Ok((map, image))
}

pub fn tau2_violations(p: &VPolygon) -> Vec<String> {
    let mut out = Vec::new();
    let vs = p.vertices();
    let k = vs.len();
    if !vs[k - 1].is_zero() {
        out.push("last vertex is not the origin".into());
    }
    if k >= 2 && !(vs[k - 2].y.is_zero() && vs[k - 2].x.is_negative()) {
        out.push("last bounded edge not on the negative x-axis".into());
    }
    if !(p.dir_out().x.is_zero() && p.dir_out().y.is_positive()) {
        out.push("outgoing ray not along the positive y-axis".into());
    }
    if vs.iter().any(|v| v.x.is_positive() || v.y.is_negative())
        || p.dir_in().x.is_positive()
        || p.dir_in().y.is_negative()
    {
        out.push("polygon leaves the second quadrant".into());
    }
    let verticals = p.functionals().iter().filter(|l| l.is_vertical()).count();
    if verticals != 1 {
        out.push(format!("{verticals} vertical edges"));
    }
    out
}

/// Affine map sending the crossing point of the two unbounded edge lines to the
/// origin, the incoming direction to `(0, 1)` and the outgoing one to `(1, 0)`.
/// The image polygon lies in the closed first quadrant with its unbounded
/// edges on the axes.
pub fn interior_frame(p: &VPolygon) -> Result<AffineMap2, GeometryError> {
    if p.is_halfplane() {
        return Err(GeometryError::TooFewEdges { needed: 2, found: 1 });
    }
    let v = p.dir_in();
    let w = p.dir_out();
    let vs = p.vertices();
    let first = &vs[0];
    let last = &vs[vs.len() - 1];
    let cvw = v.cross(w);
    if cvw.is_zero() {
        return Err(GeometryError::ParallelUnboundedEdges);
    }
    let a = last.sub(first).cross(w) / cvw;
    let corner = first.add(&v.scale(&a));
    AffineMap2::from_frame(&corner, w, v).inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn catalog3() -> VPolygon {
        VPolygon::new(Point2::ints(-1, 2), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1)).unwrap()
    }

    fn clockwise4() -> VPolygon {
        VPolygon::new(
            Point2::ints(1, 2),
            vec![Point2::ints(2, 1), Point2::ints(0, 0), Point2::ints(-2, 1)],
            Point2::ints(-1, 2),
        )
        .unwrap()
    }

    #[test]
    fn step2_on_examples() {
        for p in [catalog3(), clockwise4()] {
            let (t, img) = normalize_step2(&p).unwrap();
            assert!(step2_violations(&img).is_empty(), "{:?}", step2_violations(&img));
            assert_eq!(t.inverse().unwrap().compose(&t), AffineMap2::identity());
        }
        assert_eq!(clockwise4().orientation(), -1);
    }

    #[test]
    fn step2_rejects_small_polygons() {
        let q = VPolygon::new(Point2::ints(0, 1), vec![Point2::origin()], Point2::ints(1, 0)).unwrap();
        assert_eq!(normalize_step2(&q).unwrap_err().code(), "too_few_edges");
    }

    #[test]
    fn apex_examples() {
        let mk = |w: (i64, i64), a: i64| {
            VPolygon::new(Point2::ints(-1, 1), vec![Point2::origin(), Point2::ints(a, 0)], Point2::ints(w.0, w.1))
                .unwrap()
        };
        assert_eq!(compute_apex(&mk((1, 2), 3)).unwrap(), Point2::ints(3, 6));
        assert_eq!(compute_apex(&mk((1, 1), 2)).unwrap(), Point2::ints(2, 2));
        assert_eq!(compute_apex(&mk((2, 1), 1)).unwrap(), Point2::new(int(1), ratio(1, 2)));
    }

    #[test]
    fn tau_chain() {
        for p in [catalog3(), clockwise4()] {
            let (_, p0) = normalize_step2(&p).unwrap();
            let q = compute_apex(&p0).unwrap();
            let t1 = relocate_tau1(&p0, &q).unwrap();
            assert!(t1.apex.x.is_positive() && t1.apex.y.is_positive());
            let (t2, p2) = relocate_tau2(&t1.polygon).unwrap();
            assert!(t2.is_positive_det());
            let fs = p2.functionals();
            assert!(fs.contains(&crate::geometry::LineFunctional::ints(0, 1, 0)));
            assert!(fs.contains(&crate::geometry::LineFunctional::ints(-1, 0, 0)));
        }
    }

    #[test]
    fn interior_frame_on_quadrant_is_identity() {
        let q = VPolygon::new(Point2::ints(0, 1), vec![Point2::origin()], Point2::ints(1, 0)).unwrap();
        assert!(interior_frame(&q).unwrap().is_identity());
        let c = interior_frame(&catalog3()).unwrap();
        let img = catalog3().transform(&c);
        assert_eq!(img.dir_in(), &Point2::ints(0, 1));
        assert_eq!(img.dir_out(), &Point2::ints(1, 0));
        assert!(img.vertices().iter().all(|v| !v.x.is_negative() && !v.y.is_negative()));
        assert!(img.vertices()[0].x.is_zero());
        assert!(img.vertices().last().unwrap().y.is_zero());
    }
}
