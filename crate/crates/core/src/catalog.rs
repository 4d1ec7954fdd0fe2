//! Fixed test polygons, one per edge count from 1 to 5, and random curtains.

use rand::seq::index::sample;
use rand::Rng;

use crate::folding::Interval;
use crate::geometry::{Point2, VPolygon};
use crate::rational::{self, Scalar};

fn p(x: i64, y: i64) -> Point2 {
    Point2::ints(x, y)
}

/// Catalog polygon with `n` edges, `1 <= n <= 5`.
pub fn polygon(n: usize) -> VPolygon {
    let (v, verts, w) = match n {
        1 => (p(-1, -1), vec![p(1, -1)], p(1, 1)),
        2 => (p(-1, 1), vec![p(1, 2)], p(2, 1)),
        3 => (p(-1, 2), vec![p(0, 1), p(1, 0)], p(2, 1)),
        4 => (p(-1, 2), vec![p(-1, 1), p(0, 0), p(2, 0)], p(1, 1)),
        5 => (p(-1, 3), vec![p(-2, 3), p(-1, 1), p(0, 0), p(2, 0)], p(1, 2)),
        _ => panic!("no catalog polygon with {n} edges"),
    };
    VPolygon::new(v, verts, w).expect("catalog polygons are valid")
}

pub fn all() -> Vec<VPolygon> {
    (1..=5).map(polygon).collect()
}

/// Bounding box of the vertices grown by `margin`, as `[x0, x1, y0, y1]`.
pub fn window_around(p: &VPolygon, margin: i64) -> [Scalar; 4] {
    let vs = p.vertices();
    let m = Scalar::from_integer(margin.into());
    let xs = vs.iter().map(|v| &v.x);
    let ys = vs.iter().map(|v| &v.y);
    [
        xs.clone().min().expect("vertex") - &m,
        xs.max().expect("vertex") + &m,
        ys.clone().min().expect("vertex") - &m,
        ys.max().expect("vertex") + &m,
    ]
}

/// Random V-polygon in `{y >= 0}` with rays pointing up and to the outside,
/// so that every vertical fiber is empty or an upward ray. One in eight is a
/// horizontal half-plane.
pub fn random_curtain<R: Rng>(rng: &mut R) -> VPolygon {
    if rng.gen_ratio(1, 8) {
        let y0 = rational::ratio(rng.gen_range(0..=8), 2);
        return VPolygon::halfplane(Point2::new(Scalar::from_integer(0.into()), y0), p(1, 0))
            .expect("valid half-plane");
    }
    let k = rng.gen_range(1..=4);
    let slopes: Vec<i64> = loop {
        let mut s: Vec<i64> = sample(rng, 11, k + 1).into_iter().map(|i| i as i64 - 5).collect();
        s.sort();
        if s[0] <= 0 && s[k] >= 0 {
            break s;
        }
    };
    let mut x = rational::int(rng.gen_range(-3..=3));
    let mut y = Scalar::from_integer(0.into());
    let mut verts = vec![Point2::new(x.clone(), y.clone())];
    for s in &slopes[1..k] {
        let dx = rational::ratio(rng.gen_range(1..=6), 2);
        y += &dx * rational::int(*s);
        x += dx;
        verts.push(Point2::new(x.clone(), y.clone()));
    }
    let lowest = verts.iter().map(|v| v.y.clone()).min().expect("vertex");
    let lift = rational::ratio(rng.gen_range(0..=4), 2) - lowest;
    for v in &mut verts {
        v.y += &lift;
    }
    let mut dir_in = p(-1, -slopes[0]);
    let mut dir_out = p(1, slopes[k]);
    match rng.gen_range(0..4) {
        0 => dir_in = p(0, 1),
        1 => dir_out = p(0, 1),
        _ => {}
    }
    VPolygon::new(dir_in, verts, dir_out).expect("strictly increasing slopes give a convex curtain")
}

/// Random `]c, d[` with ends among the half-integers of `[-4, 4]`, either end
/// possibly infinite.
pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let end = |rng: &mut R| rational::ratio(rng.gen_range(-8..=8), 2);
    let (c, d) = match rng.gen_range(0..3) {
        0 => (None, Some(end(rng))),
        1 => (Some(end(rng)), None),
        _ => loop {
            let (a, b) = (end(rng), end(rng));
            if a < b {
                break (Some(a), Some(b));
            }
        },
    };
    Interval::new(c, d).expect("ordered ends")
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::geometry::is_curtain_certified;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_curtains_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let c = random_curtain(&mut rng);
            assert!(is_curtain_certified(&c.to_set()), "{c:?}");
        }
    }

    #[test]
    fn edge_counts() {
        for n in 1..=5 {
            assert_eq!(polygon(n).edge_count(), n);
        }
    }
}
