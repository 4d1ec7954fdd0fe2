//! Numerical preimages of staged maps, stage by stage from the last one.
//!
//! Only used to search for domain points whose image lands in a cell that
//! forward sampling missed. A found point counts only after its forward image
//! has been confirmed by [`PreciseMap::stable_image`](super::PreciseMap::stable_image).

use rug::ops::Pow;
use rug::{Float, Rational};

use super::precise::{affine_coeffs, apply_affine, eval_line, lines_of, PreciseFold, PreciseLine};
use crate::geometry::Region;
use crate::pipeline::{Stage, StagedMap};

/// Smallest offset from the bottom of a fiber probed by the scan, relative to
/// the fiber's scale, as a power of two.
const SCAN_FLOOR: i32 = -40;

enum Back {
    Affine([Rational; 6]),
    Fold { f: PreciseFold, source: Vec<Vec<PreciseLine>> },
    Halfplane,
    Quadrant,
    OpenHalfplane,
    OpenHalfplaneFactor,
    Lift { inner: Box<Pullback>, inner_target: Vec<Vec<PreciseLine>> },
    Unknown,
}

/// Stage-by-stage numerical inverse of a staged map.
pub struct Pullback {
    stages: Vec<Back>,
}

impl Pullback {
    pub fn new(map: &StagedMap) -> Self {
        let stages = map
            .stages
            .iter()
            .enumerate()
            .map(|(k, s)| match s {
                Stage::Affine { map, .. } => map.inverse().map_or(Back::Unknown, |i| Back::Affine(affine_coeffs(&i))),
                Stage::Fold { spec, .. } => Back::Fold {
                    f: PreciseFold::new(spec),
                    source: if k == 0 {
                        lines_of(&Region::single(spec.domain.clone()))
                    } else {
                        lines_of(&map.expected_after[k - 1])
                    },
                },
                Stage::Base { name, .. } => match name.as_str() {
                    "halfplane" => Back::Halfplane,
                    "quadrant" => Back::Quadrant,
                    "open_halfplane" => Back::OpenHalfplane,
                    "open_halfplane_factor" => Back::OpenHalfplaneFactor,
                    _ => Back::Unknown,
                },
                Stage::Lift { inner } => Back::Lift {
                    inner_target: inner.target().map(lines_of).unwrap_or_default(),
                    inner: Box::new(Pullback::new(inner)),
                },
            })
            .collect();
        Pullback { stages }
    }

    /// A domain point whose image should be close to `z`, if the search
    /// succeeds at every stage.
    pub fn preimage(&self, z: &[Float], prec: u32) -> Option<Vec<Float>> {
        self.trace(z, prec).ok().and_then(|mut t| t.pop())
    }

    /// Intermediate preimages, last stage first, or the index of the stage
    /// at which the search failed.
    pub fn trace(&self, z: &[Float], prec: u32) -> Result<Vec<Vec<Float>>, usize> {
        let mut cur: Vec<Float> = z.iter().map(|v| Float::with_val(prec, v)).collect();
        let mut out = Vec::with_capacity(self.stages.len());
        for (k, s) in self.stages.iter().enumerate().rev() {
            cur = back(s, &cur, prec).filter(|c| c.iter().all(Float::is_finite)).ok_or(k)?;
            out.push(cur.clone());
        }
        Ok(out)
    }
}

fn nonneg(v: &Float) -> bool {
    v.is_zero() || v.is_sign_positive()
}

fn back(s: &Back, z: &[Float], prec: u32) -> Option<Vec<Float>> {
    match s {
        Back::Affine(m) => Some(apply_affine(m, &z[0], &z[1], prec).to_vec()),
        Back::Fold { f, source } => {
            let r = &z[0];
            source
                .iter()
                .filter_map(|lines| fiber(lines, r, prec))
                .find_map(|(lo, hi)| solve_fold_fiber(f, r, &z[1], lo, hi, prec))
                .map(|t| vec![r.clone(), t])
        }
        Back::Halfplane => nonneg(&z[1]).then(|| vec![z[0].clone(), z[1].clone().sqrt()]),
        Back::Quadrant => (nonneg(&z[0]) && nonneg(&z[1])).then(|| vec![z[0].clone().sqrt(), z[1].clone().sqrt()]),
        Back::OpenHalfplane => open_halfplane_inverse(&z[0], &z[1], prec).map(|[a, b]| vec![a, b]),
        Back::OpenHalfplaneFactor => open_halfplane_inverse(&z[1], &z[2], prec).map(|[a, b]| vec![z[0].clone(), a, b]),
        Back::Lift { inner, inner_target } => {
            // z = w + s (1, 1) with w in the inner target and s > 0
            let mut s_max: Option<Float> = None;
            for set in inner_target {
                let mut part: Option<Float> = None;
                for l in set {
                    let slope = Rational::from(&l[0] + &l[1]);
                    if slope > 0 {
                        let v = eval_line(l, &z[0], &z[1], prec) / &slope;
                        part = Some(match part {
                            Some(p) => p.min(&v),
                            None => v,
                        });
                    }
                }
                let part = part.unwrap_or_else(|| Float::with_val(prec, 2));
                s_max = Some(match s_max {
                    Some(m) => m.max(&part),
                    None => part,
                });
            }
            let s_max = s_max?;
            if s_max <= 0 {
                return None;
            }
            let s = (s_max / 2u32).min(&Float::with_val(prec, 1));
            let w = [Float::with_val(prec, &z[0] - &s), Float::with_val(prec, &z[1] - &s)];
            let w = inner.preimage(&w, prec)?;
            Some(vec![w[0].clone(), w[1].clone(), s])
        }
        Back::Unknown => None,
    }
}

/// Fiber `[lo, hi]` of a set at abscissa `r`, ignoring strictness; `hi` is
/// `None` when unbounded.
fn fiber(lines: &[PreciseLine], r: &Float, prec: u32) -> Option<(Float, Option<Float>)> {
    let mut lo: Option<Float> = None;
    let mut hi: Option<Float> = None;
    for l in lines {
        let v = Float::with_val(prec, &l[0] * r) + &l[2];
        if l[1] == 0 {
            let tol = Float::with_val(prec, 1) >> (prec / 2);
            if v < -tol * (Float::with_val(prec, 1) + v.clone().abs()) {
                return None;
            }
        } else {
            let t = -v / &l[1];
            if l[1] > 0 {
                lo = Some(match lo {
                    Some(p) => p.max(&t),
                    None => t,
                });
            } else {
                hi = Some(match hi {
                    Some(p) => p.min(&t),
                    None => t,
                });
            }
        }
    }
    let lo = lo?;
    if hi.as_ref().is_some_and(|h| *h < lo) {
        return None;
    }
    Some((lo, hi))
}

/// Value and derivative of a polynomial given by its coefficients.
fn horner(c: &[Float], t: &Float, prec: u32) -> (Float, Float) {
    let mut v = Float::with_val(prec, 0);
    let mut d = Float::with_val(prec, 0);
    for a in c.iter().rev() {
        d *= t;
        d += &v;
        v *= t;
        v += a;
    }
    (v, d)
}

/// Height `t` on the fiber over `r` with `h(r, t) = y`, where `h(r, t) =
/// t q(t)^2`. Where the fold flattens the fiber, `h` dips to zero in a narrow
/// well around a root of `q`, so roots of `q` met by the scan serve as bracket
/// ends as well.
fn solve_fold_fiber(f: &PreciseFold, r: &Float, y: &Float, lo: Float, hi: Option<Float>, prec: u32) -> Option<Float> {
    let qc = f.inner_slice(r, prec);
    let q = |t: &Float| horner(&qc, t, prec);
    let g = |t: &Float| {
        let (qv, dq) = q(t);
        let q2 = Float::with_val(prec, qv.square_ref());
        let val = Float::with_val(prec, &q2 * t) - y;
        let der = Float::with_val(prec, &qv * &dq) * t * 2u32 + q2;
        (val, der)
    };
    let g_lo = g(&lo).0;
    if g_lo.is_zero() {
        return Some(lo);
    }
    let mut low = (g_lo < 0).then(|| lo.clone());
    let mut prev = (lo.clone(), q(&lo).0);
    let scale = Float::with_val(prec, lo.clone().abs()).max(&Float::with_val(prec, 1));
    let mut gc: Vec<Float> = vec![Float::with_val(prec, 0); 2 * qc.len()];
    for (i, a) in qc.iter().enumerate() {
        for (j, b) in qc.iter().enumerate() {
            gc[i + j + 1] += Float::with_val(prec, a * b);
        }
    }
    gc[0] -= y;
    let bound = Float::with_val(prec, root_bound(&gc).max(&root_bound(&qc)) * 2u32) + lo.clone().abs() + 1u32;
    let hi = match hi {
        Some(h) => h.min(&bound),
        None => bound,
    };
    let hi = Some(hi);
    let max_exp = 4 * prec as i32 + 64;
    let mut j = SCAN_FLOOR;
    loop {
        let mut t = Float::with_val(prec, &scale * Float::with_val(prec, 2).pow(j)) + &lo;
        let last = match &hi {
            Some(h) if t >= *h => {
                t = h.clone();
                true
            }
            _ => j >= max_exp,
        };
        let qt = q(&t).0;
        if !qt.is_zero() && !prev.1.is_zero() && qt.is_sign_negative() != prev.1.is_sign_negative() {
            let t0 = safe_newton(&q, prev.0.clone(), t.clone(), prev.1.is_sign_positive(), prec);
            if g(&t0).0 <= 0 {
                low = Some(t0);
            }
        }
        if g(&t).0 <= 0 {
            low = Some(t.clone());
        } else if let Some(a) = low.take() {
            return Some(safe_newton(&g, a, t, false, prec));
        }
        if last {
            return None;
        }
        prev = (t, qt);
        j += 1;
    }
}

/// Fujiwara bound on the absolute values of the real roots.
fn root_bound(c: &[Float]) -> Float {
    let prec = c[0].prec();
    let Some(n) = c.iter().rposition(|a| !a.is_zero()) else {
        return Float::with_val(prec, 0);
    };
    let lead = c[n].clone().abs();
    let mut b = Float::with_val(prec, 0);
    for (i, a) in c[..n].iter().enumerate() {
        let ratio = Float::with_val(prec, a.clone().abs() / &lead);
        let k = (n - i) as u32;
        let r = if i == 0 { ratio / 2u32 } else { ratio };
        b = b.max(&r.root(k));
    }
    b * 2u32
}

/// Root of `g` in `[a, b]`, where `g(a) > 0` iff `a_positive` and `g(b)` has
/// the other sign: Newton steps, falling back to bisection whenever a step
/// leaves the bracket. `g` returns the value and the derivative.
fn safe_newton(
    g: &impl Fn(&Float) -> (Float, Float),
    mut a: Float,
    mut b: Float,
    a_positive: bool,
    prec: u32,
) -> Float {
    let mut x = Float::with_val(prec, &a + &b) / 2u32;
    for _ in 0..2 * prec + 32 {
        let (v, d) = g(&x);
        if v.is_zero() {
            return x;
        }
        if (v > 0) == a_positive {
            a = x.clone();
        } else {
            b = x.clone();
        }
        let mid = Float::with_val(prec, &a + &b) / 2u32;
        if mid == a || mid == b {
            break;
        }
        let step = if d.is_zero() { None } else { Some(Float::with_val(prec, &x - Float::with_val(prec, &v / &d))) };
        let inside = |s: &Float| (*s > a && *s < b) || (*s > b && *s < a);
        let next = match step {
            Some(s) if inside(&s) => s,
            _ => mid,
        };
        if next == x {
            break;
        }
        x = next;
    }
    x
}

/// Bisection on `[a, b]` where `g(a) > 0` iff `a_positive`, and `g(b)` has
/// the other sign.
fn bisect(g: &impl Fn(&Float) -> Float, mut a: Float, mut b: Float, a_positive: bool, prec: u32) -> Float {
    for _ in 0..prec + 16 {
        let m = Float::with_val(prec, &a + &b) / 2u32;
        if m == a || m == b {
            break;
        }
        if (g(&m) > 0) == a_positive {
            a = m;
        } else {
            b = m;
        }
    }
    Float::with_val(prec, &a + &b) / 2u32
}

/// Inverse of `(x, y) -> (y (xy - 1), (xy - 1)^2 + x^2)` at `(u, v)`, `v > 0`.
/// With `m = xy - 1` one has `x^2 = v - m^2` and `m (m + 1) = u x`.
fn open_halfplane_inverse(u: &Float, v: &Float, prec: u32) -> Option<[Float; 2]> {
    if *v <= 0 {
        return None;
    }
    let rv = v.clone().sqrt();
    let one = Float::with_val(prec, 1);
    let near_end = |k: u32| Float::with_val(prec, &rv * Float::with_val(prec, &one - Float::with_val(prec, &one >> k)));
    let n = 256u32;
    let mut ms: Vec<Float> = (1..64).rev().map(|k| -near_end(k)).collect();
    ms.extend((1..n).map(|i| Float::with_val(prec, &rv * Float::with_val(prec, 2 * i) / n) - &rv));
    ms.extend((1..64).map(near_end));
    for sigma in [1i32, -1] {
        let x_of = |m: &Float| {
            let d = Float::with_val(prec, v - Float::with_val(prec, m * m));
            d.max(&Float::with_val(prec, 0)).sqrt() * sigma
        };
        let g =
            |m: &Float| Float::with_val(prec, m * Float::with_val(prec, m + 1u32)) - Float::with_val(prec, u * x_of(m));
        let mut prev: Option<(Float, Float)> = None;
        let solution = |m: &Float| {
            let x = x_of(m);
            (!x.is_zero()).then(|| {
                let y = Float::with_val(prec, m + 1u32) / &x;
                [x, y]
            })
        };
        for m in &ms {
            let val = g(m);
            if val.is_zero() {
                if let Some(s) = solution(m) {
                    return Some(s);
                }
            }
            if let Some((pm, pv)) = &prev {
                if !val.is_zero() && !pv.is_zero() && val.is_sign_negative() != pv.is_sign_negative() {
                    if let Some(s) = solution(&bisect(&g, pm.clone(), m.clone(), pv.is_sign_positive(), prec)) {
                        return Some(s);
                    }
                }
            }
            prev = Some((m.clone(), val));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{build_halfplane_map, open_halfplane_map};
    use crate::verify::PreciseMap;

    fn fl(x: f64) -> Float {
        Float::with_val(128, x)
    }

    #[test]
    fn open_halfplane_round_trip() {
        let m = PreciseMap::new(&open_halfplane_map());
        for (u, v) in [(0.0, 1.0), (-5.0, 1.0), (3.0, 0.01), (-7.5, 9.0), (40.0, 0.5), (0.1, 30.0)] {
            let [a, b] = open_halfplane_inverse(&fl(u), &fl(v), 128).unwrap_or_else(|| panic!("{u} {v}"));
            let z = m.eval(&[a, b], 128);
            assert!((z[0].to_f64() - u).abs() < 1e-12 * (1.0 + u.abs()), "{u} {v} {z:?}");
            assert!((z[1].to_f64() - v).abs() < 1e-12 * (1.0 + v), "{u} {v} {z:?}");
        }
    }

    #[test]
    fn halfplane_preimage() {
        let p = Pullback::new(&build_halfplane_map()).preimage(&[fl(2.0), fl(9.0)], 64).unwrap();
        assert_eq!((p[0].to_f64(), p[1].to_f64()), (2.0, 3.0));
    }
}
