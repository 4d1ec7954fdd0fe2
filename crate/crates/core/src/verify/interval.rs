//! Outward-rounded interval enclosures of staged maps.
//!
//! An enclosure that keeps clear of every boundary line decides membership
//! rigorously. Points whose enclosure straddles a line are evaluated exactly.

use rug::float::Round;
use rug::{Float, Rational};

use super::precise::{lines_of, to_rug, PreciseFold, PreciseLine, PreciseMap, PrecisePoly, PreciseStage};
use crate::geometry::Region;
use crate::rational::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct Iv {
    lo: Float,
    hi: Float,
}

impl Iv {
    fn whole(prec: u32) -> Iv {
        Iv {
            lo: Float::with_val(prec, rug::float::Special::NegInfinity),
            hi: Float::with_val(prec, rug::float::Special::Infinity),
        }
    }

    fn checked(lo: Float, hi: Float) -> Iv {
        if lo.is_nan() || hi.is_nan() {
            return Iv::whole(lo.prec());
        }
        Iv { lo, hi }
    }

    pub(crate) fn exact(q: &Rational, prec: u32) -> Iv {
        Iv { lo: Float::with_val_round(prec, q, Round::Down).0, hi: Float::with_val_round(prec, q, Round::Up).0 }
    }

    fn constant(q: &Rational, prec: u32) -> Iv {
        Iv::exact(q, prec)
    }

    fn add(&self, o: &Iv) -> Iv {
        let p = self.lo.prec();
        Iv::checked(
            Float::with_val_round(p, &self.lo + &o.lo, Round::Down).0,
            Float::with_val_round(p, &self.hi + &o.hi, Round::Up).0,
        )
    }

    fn add_q(&self, q: &Rational) -> Iv {
        let p = self.lo.prec();
        Iv::checked(
            Float::with_val_round(p, &self.lo + q, Round::Down).0,
            Float::with_val_round(p, &self.hi + q, Round::Up).0,
        )
    }

    fn mul(&self, o: &Iv) -> Iv {
        let p = self.lo.prec();
        let ends = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in ends {
            let d = Float::with_val_round(p, a * b, Round::Down).0;
            let u = Float::with_val_round(p, a * b, Round::Up).0;
            if d.is_nan() || u.is_nan() {
                return Iv::whole(p);
            }
            lo = Some(match lo {
                Some(l) => l.min(&d),
                None => d,
            });
            hi = Some(match hi {
                Some(h) => h.max(&u),
                None => u,
            });
        }
        Iv { lo: lo.expect("four ends"), hi: hi.expect("four ends") }
    }

    fn scale(&self, q: &Rational) -> Iv {
        let p = self.lo.prec();
        let ends = [
            Float::with_val_round(p, &self.lo * q, Round::Down).0,
            Float::with_val_round(p, &self.lo * q, Round::Up).0,
            Float::with_val_round(p, &self.hi * q, Round::Down).0,
            Float::with_val_round(p, &self.hi * q, Round::Up).0,
        ];
        if ends.iter().any(Float::is_nan) {
            return Iv::whole(p);
        }
        let [a, b, c, d] = ends;
        Iv { lo: a.min(&c), hi: b.max(&d) }
    }

    fn square(&self) -> Iv {
        let p = self.lo.prec();
        let (a, b) = (self.lo.clone().abs(), self.hi.clone().abs());
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        let lo = if self.lo <= 0 && self.hi >= 0 {
            Float::with_val(p, 0)
        } else {
            Float::with_val_round(p, small.square_ref(), Round::Down).0
        };
        Iv::checked(lo, Float::with_val_round(p, large.square_ref(), Round::Up).0)
    }

    fn pow(&self, k: u32) -> Iv {
        match k {
            0 => Iv::constant(&Rational::from(1), self.lo.prec()),
            1 => self.clone(),
            _ if k.is_multiple_of(2) => self.pow(k / 2).square(),
            _ => self.pow(k - 1).mul(self),
        }
    }

    /// `Some(1)` if the interval lies in `]0, +inf[`, `Some(-1)` if in
    /// `]-inf, 0[`, `None` otherwise.
    fn strict_sign(&self) -> Option<i8> {
        if self.lo > 0 {
            Some(1)
        } else if self.hi < 0 {
            Some(-1)
        } else {
            None
        }
    }
}

impl PrecisePoly {
    pub(crate) fn eval_iv(&self, pt: &[Iv], prec: u32) -> Iv {
        let mut acc = Iv::constant(&Rational::new(), prec);
        for (e, c) in self.terms() {
            let mut t: Option<Iv> = None;
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    let f = pt[v].pow(k);
                    t = Some(match t {
                        Some(t) => t.mul(&f),
                        None => f,
                    });
                }
            }
            let term = match t {
                Some(t) => t.scale(c),
                None => Iv::constant(c, prec),
            };
            acc = acc.add(&term);
        }
        acc
    }
}

impl PreciseFold {
    fn apply_iv(&self, x: &Iv, y: &Iv, prec: u32) -> Iv {
        let pt = [x.clone(), y.clone()];
        let mut phi = Iv::constant(&Rational::from(1), prec);
        for f in &self.factors {
            phi = phi.mul(&f.eval_iv(&pt, prec));
        }
        let q = phi.mul(&self.psi.eval_iv(&pt, prec)).add_q(&Rational::from(1));
        q.square().mul(y)
    }
}

impl PreciseMap {
    pub(crate) fn eval_iv(&self, p: &[Iv], prec: u32) -> Vec<Iv> {
        self.eval_iv_trace(p, prec).pop().unwrap_or_else(|| p.to_vec())
    }

    pub(crate) fn eval_iv_trace(&self, p: &[Iv], prec: u32) -> Vec<Vec<Iv>> {
        let mut cur = p.to_vec();
        let mut out = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            cur = match s {
                PreciseStage::Base(cs) => cs.iter().map(|c| c.eval_iv(&cur, prec)).collect(),
                PreciseStage::Affine(m) => {
                    let row = |a: &Rational, b: &Rational, t: &Rational| cur[0].scale(a).add(&cur[1].scale(b)).add_q(t);
                    vec![row(&m[0], &m[1], &m[2]), row(&m[3], &m[4], &m[5])]
                }
                PreciseStage::Fold(f) => vec![cur[0].clone(), f.apply_iv(&cur[0], &cur[1], prec)],
                PreciseStage::Lift(inner) => {
                    let z = inner.eval_iv(&cur[..2], prec);
                    vec![z[0].add(&cur[2]), z[1].add(&cur[2])]
                }
            };
            out.push(cur.clone());
        }
        out
    }
}

/// A region with its boundary lines converted once.
pub(crate) struct Decider<'a> {
    region: &'a Region,
    lines: Vec<Vec<PreciseLine>>,
}

impl<'a> Decider<'a> {
    pub(crate) fn new(region: &'a Region) -> Self {
        Decider { region, lines: lines_of(region) }
    }

    /// Membership of every point of the box `p`, if the enclosure decides
    /// it: `Some(true)` when the box lies strictly inside one part,
    /// `Some(false)` when it lies strictly outside every part.
    pub(crate) fn decide(&self, p: &[Iv]) -> Option<bool> {
        match self.region {
            Region::Everything { arity } => Some(p.len() == *arity),
            Region::UpperOpenHalfSpace => p.get(2).and_then(Iv::strict_sign).map(|s| s > 0),
            Region::Union { .. } => {
                let mut all_out = true;
                for part in &self.lines {
                    let mut inside = true;
                    let mut outside = false;
                    for l in part {
                        match p[0].scale(&l[0]).add(&p[1].scale(&l[1])).add_q(&l[2]).strict_sign() {
                            Some(1) => {}
                            Some(_) => {
                                outside = true;
                                inside = false;
                            }
                            None => inside = false,
                        }
                    }
                    if inside {
                        return Some(true);
                    }
                    all_out &= outside;
                }
                all_out.then_some(false)
            }
        }
    }
}

/// Working precisions tried before falling back to exact arithmetic.
pub(crate) const ENCLOSURE_PRECISIONS: [u32; 3] = [512, 8192, 65536];

/// Exact point as a degenerate box.
pub(crate) fn point_box(p: &[Scalar], prec: u32) -> Vec<Iv> {
    p.iter().map(|q| Iv::exact(&to_rug(q), prec)).collect()
}
