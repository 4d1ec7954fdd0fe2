use std::f64::consts::{FRAC_PI_2, TAU};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{BasicPolygonalSet, Point2, Region};
use crate::rational::{self, Scalar};

/// Samples are drawn in chunks of this size, each from its own stream, so
/// chunks can be processed in any order.
pub const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Grid,
    Uniform,
    /// Uniform direction, radius `scale * tan(u * pi / 2)`.
    HeavyTailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub count: usize,
    pub scheme: Scheme,
    /// Largest denominator of rational samples.
    pub denominator_bound: u64,
    /// Half-width of the box (uniform, grid) or radial scale (heavy-tailed).
    pub scale: f64,
}

impl SamplePlan {
    pub fn new(seed: u64, count: usize, scheme: Scheme) -> Self {
        SamplePlan { seed, count, scheme, denominator_bound: 1000, scale: 1.0 }
    }

    pub fn heavy(seed: u64, count: usize) -> Self {
        SamplePlan::new(seed, count, Scheme::HeavyTailed)
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_denominator_bound(mut self, d: u64) -> Self {
        self.denominator_bound = d.max(1);
        self
    }

    pub fn chunks(&self) -> usize {
        self.count.div_ceil(CHUNK)
    }

    /// Index range of chunk `c`.
    pub fn chunk_range(&self, c: usize) -> std::ops::Range<usize> {
        c * CHUNK..((c + 1) * CHUNK).min(self.count)
    }

    pub fn rng(&self, chunk: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(chunk as u64);
        r
    }

    /// Double-precision domain point number `i` (grid) or the next random one.
    pub fn f64_point(&self, rng: &mut ChaCha8Rng, i: usize, arity: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        match self.scheme {
            Scheme::Grid => {
                let m = (self.count as f64).powf(1.0 / arity as f64).ceil().max(1.0) as usize;
                let mut k = i;
                for o in out.iter_mut().take(arity) {
                    let j = k % m;
                    k /= m;
                    *o = if m == 1 { 0.0 } else { -self.scale + 2.0 * self.scale * j as f64 / (m - 1) as f64 };
                }
            }
            Scheme::Uniform => {
                for o in out.iter_mut().take(arity) {
                    *o = rng.gen_range(-self.scale..=self.scale);
                }
            }
            Scheme::HeavyTailed => {
                let dir = unit_vector(rng, arity);
                let r = self.scale * (rng.gen::<f64>() * FRAC_PI_2).tan();
                for (o, d) in out.iter_mut().zip(dir).take(arity) {
                    *o = r * d;
                }
            }
        }
        out
    }

    /// Rational domain point: the double-precision point rounded to a random
    /// denominator not exceeding the bound.
    pub fn rational_point(&self, rng: &mut ChaCha8Rng, i: usize, arity: usize) -> Vec<Scalar> {
        let p = self.f64_point(rng, i, arity);
        p[..arity].iter().map(|&x| self.round(rng, x)).collect()
    }

    pub fn round(&self, rng: &mut ChaCha8Rng, x: f64) -> Scalar {
        let den = rng.gen_range(1..=self.denominator_bound);
        let num = rational::from_f64((x * den as f64).round()).unwrap_or_else(rational::zero);
        num / Scalar::from_integer(BigInt::from(den))
    }

    /// Nonnegative heavy-tailed rational magnitude.
    fn magnitude(&self, rng: &mut ChaCha8Rng) -> Scalar {
        let r = self.scale * (rng.gen::<f64>() * FRAC_PI_2).tan();
        let q = self.round(rng, r.min(1e12));
        if rational::sign(&q) < 0 {
            rational::zero()
        } else {
            q
        }
    }

    /// Random rational in `[0, 1]` with a bounded denominator.
    fn unit(&self, rng: &mut ChaCha8Rng) -> Scalar {
        let den = rng.gen_range(1..=self.denominator_bound);
        let num = rng.gen_range(0..=den);
        Scalar::new(BigInt::from(num), BigInt::from(den))
    }

    /// Exact point of `s`, mixing interior points, edge points and vertices.
    /// Gives up after a few rejections (sets with many deleted faces).
    pub fn point_in_set(&self, rng: &mut ChaCha8Rng, s: &BasicPolygonalSet) -> Option<Point2> {
        for _ in 0..32 {
            let p = self.candidate(rng, s);
            if s.contains(&p) {
                return Some(p);
            }
        }
        None
    }

    fn candidate(&self, rng: &mut ChaCha8Rng, s: &BasicPolygonalSet) -> Point2 {
        let o = &s.outline;
        let vs = &o.vertices;
        let mut rays = vec![o.dir_in.clone(), o.dir_out.clone()];
        if o.is_halfplane() {
            let l = &s.functionals[0];
            rays.push(Point2::new(l.a.clone(), l.b.clone()));
        }
        let mode = rng.gen_range(0..20);
        if mode < 2 {
            return vs[rng.gen_range(0..vs.len())].clone();
        }
        if mode < 7 {
            // a point on the boundary
            let e = rng.gen_range(0..vs.len() + 1);
            if e == 0 {
                return vs[0].add(&o.dir_in.scale(&self.magnitude(rng)));
            }
            if e == vs.len() {
                return vs[e - 1].add(&o.dir_out.scale(&self.magnitude(rng)));
            }
            let t = self.unit(rng);
            return vs[e - 1].add(&vs[e].sub(&vs[e - 1]).scale(&t));
        }
        // convex combination of vertices plus a cone element
        let weights: Vec<Scalar> = vs.iter().map(|_| self.unit(rng)).collect();
        let total: Scalar = weights.iter().sum();
        let mut p = if rational::sign(&total) == 0 {
            vs[0].clone()
        } else {
            vs.iter().zip(&weights).fold(Point2::origin(), |acc, (v, w)| acc.add(&v.scale(&(w / &total))))
        };
        for r in &rays {
            p = p.add(&r.scale(&self.magnitude(rng)));
        }
        p
    }

    /// Exact point of a region.
    pub fn point_in_region(&self, rng: &mut ChaCha8Rng, i: usize, r: &Region) -> Option<Vec<Scalar>> {
        match r {
            Region::Everything { arity } => Some(self.rational_point(rng, i, *arity)),
            Region::UpperOpenHalfSpace => {
                let mut p = self.rational_point(rng, i, 3);
                p[2] = self.magnitude(rng);
                if rational::sign(&p[2]) <= 0 {
                    p[2] = self.unit(rng) + Scalar::new(1.into(), BigInt::from(self.denominator_bound + 1));
                }
                Some(p)
            }
            Region::Union { parts } => {
                let s = &parts[rng.gen_range(0..parts.len())];
                self.point_in_set(rng, s).map(|p| vec![p.x, p.y])
            }
        }
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, arity: usize) -> [f64; 3] {
    if arity == 2 {
        let a = rng.gen::<f64>() * TAU;
        return [a.cos(), a.sin(), 0.0];
    }
    loop {
        let v: [f64; 3] = std::array::from_fn(|k| if k < arity { rng.gen_range(-1.0..1.0) } else { 0.0 });
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VPolygon;

    #[test]
    fn same_plan_same_points() {
        let plan = SamplePlan::heavy(7, 100);
        let a: Vec<_> = (0..10).map(|i| plan.rational_point(&mut plan.rng(0), i, 2)).collect();
        let b: Vec<_> = (0..10).map(|i| plan.rational_point(&mut plan.rng(0), i, 2)).collect();
        assert_eq!(a, b);
        assert_ne!(plan.rational_point(&mut plan.rng(0), 0, 2), plan.rational_point(&mut plan.rng(1), 0, 2));
    }

    #[test]
    fn set_samples_are_members() {
        let p = VPolygon::new(Point2::ints(-1, 2), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1))
            .unwrap();
        let s = p.to_set().without_vertex(1).without_edge(0);
        let plan = SamplePlan::heavy(3, 500);
        let mut rng = plan.rng(0);
        let mut on_boundary = 0;
        for _ in 0..500 {
            let q = plan.point_in_set(&mut rng, &s).unwrap();
            assert!(s.contains(&q));
            if s.functionals.iter().any(|l| rational::sign(&l.eval(&q)) == 0) {
                on_boundary += 1;
            }
        }
        assert!(on_boundary > 20);
    }

    #[test]
    fn grid_covers_box() {
        let plan = SamplePlan::new(0, 9, Scheme::Grid).with_scale(2.0);
        let mut rng = plan.rng(0);
        let pts: Vec<_> = (0..9).map(|i| plan.f64_point(&mut rng, i, 2)).collect();
        assert_eq!(pts[0][..2], [-2.0, -2.0]);
        assert_eq!(pts[8][..2], [2.0, 2.0]);
    }
}
