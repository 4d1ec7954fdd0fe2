//! Oracles for staged maps: exact containment (whole chain or stage by
//! stage), grid coverage, fiber certificates of fold stages, and agreement
//! between staged and expanded evaluation.
//!
//! Pass/fail verdicts on containment are exact. Double precision is used only
//! to decide which coverage cells an image point falls in.

mod coverage;
mod interval;
mod precise;
mod pullback;
mod sampling;

pub use coverage::{check_coverage, classify_cells, CellClass, CoverageReport, Window, WindowParseError};
use interval::{point_box, Decider, ENCLOSURE_PRECISIONS};
pub use precise::PreciseMap;
pub use pullback::Pullback;
pub use sampling::{SamplePlan, Scheme, CHUNK};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::folding::{certify_fiber_with_grid, FiberCase, FoldSpec, FIBER_GRID};
use crate::geometry::{BasicPolygonalSet, Region};
use crate::pipeline::{Stage, StagedMap};
use crate::poly::SparsePoly;
use crate::rational::{self, Scalar};

fn strings(p: &[Scalar]) -> Vec<String> {
    p.iter().map(rational::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Stage whose output left its expected set; `None` for whole-map checks.
    pub stage: Option<usize>,
    pub point: Vec<String>,
    pub image: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub samples: usize,
    pub failures: usize,
    /// Samples that could not be drawn from the input set.
    pub skipped: usize,
    pub counterexample: Option<Counterexample>,
}

impl ContainmentReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.samples > 0
    }

    fn merge(mut self, other: ContainmentReport) -> ContainmentReport {
        self.samples += other.samples;
        self.failures += other.failures;
        self.skipped += other.skipped;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        self
    }

    fn empty() -> Self {
        ContainmentReport { samples: 0, failures: 0, skipped: 0, counterexample: None }
    }
}

/// Runs `check` on every sample of every chunk and merges in chunk order.
fn run_chunks<F>(plan: &SamplePlan, check: F) -> ContainmentReport
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, usize) -> Option<Option<Counterexample>> + Sync,
{
    let parts: Vec<ContainmentReport> = (0..plan.chunks())
        .into_par_iter()
        .map(|c| {
            let mut rng = plan.rng(c);
            let mut rep = ContainmentReport::empty();
            for i in plan.chunk_range(c) {
                match check(&mut rng, i) {
                    None => rep.skipped += 1,
                    Some(res) => {
                        rep.samples += 1;
                        if let Some(ce) = res {
                            rep.failures += 1;
                            if rep.counterexample.is_none() {
                                rep.counterexample = Some(ce);
                            }
                        }
                    }
                }
            }
            rep
        })
        .collect();
    parts.into_iter().fold(ContainmentReport::empty(), ContainmentReport::merge)
}

/// Evaluates the whole map exactly at each sampled domain point and checks the
/// image against `target`.
pub fn check_containment(map: &StagedMap, target: &Region, plan: &SamplePlan) -> ContainmentReport {
    let exact = PreciseMap::new(map);
    let decider = Decider::new(target);
    run_chunks(plan, |rng, i| {
        let p = plan.rational_point(rng, i, map.domain_arity);
        let enclosed =
            ENCLOSURE_PRECISIONS.iter().find_map(|&prec| decider.decide(&exact.eval_iv(&point_box(&p, prec), prec)));
        if enclosed == Some(true) {
            return Some(None);
        }
        let z = exact.eval_exact(&p);
        Some((!target.contains(&z)).then(|| Counterexample { stage: None, point: strings(&p), image: strings(&z) }))
    })
}

/// Whether the enclosures of every intermediate image of `p` at some working
/// precision lie strictly inside their expected sets.
fn stages_enclosed(exact: &PreciseMap, deciders: &[Decider], p: &[Scalar]) -> bool {
    ENCLOSURE_PRECISIONS.iter().any(|&prec| {
        let trace = exact.eval_iv_trace(&point_box(p, prec), prec);
        trace.iter().zip(deciders).all(|(z, d)| d.decide(z) == Some(true))
    })
}

/// Like [`check_containment`] but checks every intermediate image against its
/// stage's expected set.
pub fn check_chained_stages(map: &StagedMap, plan: &SamplePlan) -> ContainmentReport {
    let exact = PreciseMap::new(map);
    let deciders: Vec<Decider> = map.expected_after.iter().map(Decider::new).collect();
    run_chunks(plan, |rng, i| {
        let p = plan.rational_point(rng, i, map.domain_arity);
        if stages_enclosed(&exact, &deciders, &p) {
            return Some(None);
        }
        for (k, cur) in exact.eval_exact_trace(&p).into_iter().enumerate() {
            if !map.expected_after[k].contains(&cur) {
                return Some(Some(Counterexample { stage: Some(k), point: strings(&p), image: strings(&cur) }));
            }
        }
        Some(None)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub index: usize,
    pub label: String,
    #[serde(flatten)]
    pub containment: ContainmentReport,
}

/// Stage `k` alone: inputs are drawn exactly from the expected set of stage
/// `k - 1` (the whole domain for `k = 0`), outputs are checked against the
/// expected set of stage `k`.
pub fn check_stage(map: &StagedMap, k: usize, plan: &SamplePlan) -> StageReport {
    let input = if k == 0 { Region::Everything { arity: map.domain_arity } } else { map.expected_after[k - 1].clone() };
    let stage = &map.stages[k];
    let exact = PreciseMap::new(&StagedMap {
        domain_arity: stage.arity_in(),
        stages: vec![stage.clone()],
        expected_after: vec![map.expected_after[k].clone()],
        expanded: None,
    });
    let expected = &map.expected_after[k];
    let deciders = [Decider::new(expected)];
    let containment = run_chunks(plan, |rng, i| {
        let p = plan.point_in_region(rng, i, &input)?;
        if stages_enclosed(&exact, &deciders, &p) {
            return Some(None);
        }
        let z = exact.eval_exact(&p);
        Some((!expected.contains(&z)).then(|| Counterexample {
            stage: Some(k),
            point: strings(&p),
            image: strings(&z),
        }))
    });
    StageReport { index: k, label: stage.label().to_string(), containment }
}

pub fn check_stages(map: &StagedMap, plan: &SamplePlan) -> Vec<StageReport> {
    (0..map.stages.len())
        .map(|k| {
            let mut p = plan.clone();
            p.seed = plan.seed.wrapping_add(k as u64);
            check_stage(map, k, &p)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberFailure {
    pub r: String,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldStageReport {
    pub label: String,
    pub fibers: usize,
    pub case1: usize,
    pub case2: usize,
    pub failures: Vec<FiberFailure>,
    /// Sampled members of the domain at which `phi < 0`.
    pub phi_negative: usize,
}

impl FoldStageReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.phi_negative == 0
    }
}

/// Abscissae of fibers to certify: the critical abscissae of the set, the
/// finite ends of the interval, and random rationals in the projection.
pub fn fiber_abscissae(spec: &FoldSpec, count: usize, seed: u64) -> Vec<Scalar> {
    let s = &spec.domain;
    let (lo, hi) = s.projection_hull();
    let in_hull = |r: &Scalar| lo.as_ref().is_none_or(|l| r >= l) && hi.as_ref().is_none_or(|h| r <= h);
    let mut rs: Vec<Scalar> = s.critical_abscissae();
    rs.extend(spec.c().cloned());
    rs.extend(spec.d().cloned());
    let crit = s.critical_abscissae();
    let span_lo =
        lo.clone().or_else(|| crit.first().map(|c| c - rational::int(10))).unwrap_or_else(|| rational::int(-10));
    let span_hi =
        hi.clone().or_else(|| crit.last().map(|c| c + rational::int(10))).unwrap_or_else(|| rational::int(10));
    let plan = SamplePlan::new(seed, count, Scheme::Uniform);
    let mut rng = plan.rng(0);
    while rs.len() < count.max(crit.len()) {
        let t = Scalar::new(rng.gen_range(0..=1000).into(), 1000.into());
        rs.push(&span_lo + (&span_hi - &span_lo) * t);
    }
    rs.retain(|r| in_hull(r) && s.fiber(r).is_some());
    rs.sort();
    rs.dedup();
    rs
}

pub fn certify_fold_stage(label: &str, spec: &FoldSpec, rs: &[Scalar], phi_plan: &SamplePlan) -> FoldStageReport {
    certify_fold_stage_with_grid(label, spec, rs, phi_plan, FIBER_GRID)
}

pub fn certify_fold_stage_with_grid(
    label: &str,
    spec: &FoldSpec,
    rs: &[Scalar],
    phi_plan: &SamplePlan,
    grid: usize,
) -> FoldStageReport {
    let results: Vec<_> = rs.par_iter().map(|r| (r, certify_fiber_with_grid(spec, r, grid))).collect();
    let mut rep = FoldStageReport {
        label: label.to_string(),
        fibers: rs.len(),
        case1: 0,
        case2: 0,
        failures: Vec::new(),
        phi_negative: 0,
    };
    for (r, res) in results {
        match res {
            Ok(c) if c.case == FiberCase::Case1 => rep.case1 += 1,
            Ok(_) => rep.case2 += 1,
            Err(e) => rep.failures.push(FiberFailure {
                r: rational::to_string(r),
                code: e.code().to_string(),
                message: e.to_string(),
            }),
        }
    }
    rep.phi_negative = count_phi_negative(spec, &spec.domain, phi_plan);
    rep
}

fn count_phi_negative(spec: &FoldSpec, s: &BasicPolygonalSet, plan: &SamplePlan) -> usize {
    let rep = run_chunks(plan, |rng, _| {
        let p = plan.point_in_set(rng, s)?;
        let v = spec.phi.eval(&[p.x.clone(), p.y.clone()]);
        Some((rational::sign(&v) < 0).then(|| Counterexample {
            stage: None,
            point: strings(&[p.x, p.y]),
            image: vec![],
        }))
    });
    rep.failures
}

/// Certifies every fold stage of `map` on `fibers` abscissae each.
pub fn certify_map_folds(map: &StagedMap, fibers: usize, seed: u64, phi_samples: usize) -> Vec<FoldStageReport> {
    map.stages
        .iter()
        .enumerate()
        .filter_map(|(k, s)| match s {
            Stage::Fold { label, spec } => {
                let rs = fiber_abscissae(spec, fibers, seed.wrapping_add(k as u64));
                let plan = SamplePlan::heavy(seed.wrapping_add(k as u64), phi_samples);
                Some(certify_fold_stage(label, spec, &rs, &plan))
            }
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub point: Vec<String>,
    pub staged: Vec<String>,
    pub expanded: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub samples: usize,
    pub mismatches: usize,
    pub witness: Option<Mismatch>,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.samples > 0
    }
}

/// Staged evaluation of the first `prefix` stages against explicit
/// polynomials, exactly, on every sample.
pub fn cross_check_prefix(
    map: &StagedMap,
    prefix: usize,
    expanded: &[SparsePoly],
    plan: &SamplePlan,
) -> CrossCheckReport {
    let rep = run_chunks(plan, |rng, i| {
        let p = plan.rational_point(rng, i, map.domain_arity);
        let staged = map.eval_prefix(&p, prefix);
        let direct: Vec<Scalar> = expanded.iter().map(|e| e.eval(&p)).collect();
        Some((staged != direct).then(|| Counterexample { stage: None, point: strings(&p), image: strings(&direct) }))
    });
    let witness = rep.counterexample.map(|c| {
        let p: Vec<Scalar> = c.point.iter().map(|s| rational::parse(s).expect("own output")).collect();
        Mismatch { staged: strings(&map.eval_prefix(&p, prefix)), point: c.point, expanded: c.image }
    });
    CrossCheckReport { samples: rep.samples, mismatches: rep.failures, witness }
}

pub fn cross_check(map: &StagedMap, expanded: &[SparsePoly], plan: &SamplePlan) -> CrossCheckReport {
    cross_check_prefix(map, map.stages.len(), expanded, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AffineMap2, Point2, VPolygon};
    use crate::pipeline::{build_halfplane_map, build_v_polygon_map, BuildOptions};
    use crate::rational::int;

    #[test]
    fn halfplane_containment_passes() {
        let m = build_halfplane_map();
        let r = check_containment(&m, m.target().unwrap(), &SamplePlan::heavy(1, 2000));
        assert!(r.passed());
        assert_eq!(r.samples, 2000);
    }

    #[test]
    fn identity_map_fails_quadrant_with_witness() {
        let quadrant = VPolygon::new(Point2::ints(0, 1), vec![Point2::origin()], Point2::ints(1, 0)).unwrap();
        let id = StagedMap {
            domain_arity: 2,
            stages: vec![Stage::Affine { label: "id".into(), map: AffineMap2::identity() }],
            expected_after: vec![Region::Everything { arity: 2 }],
            expanded: None,
        };
        let target = Region::single(quadrant.to_set());
        assert!(!target.contains(&[int(-1), int(0)]));
        let r = check_containment(&id, &target, &SamplePlan::heavy(2, 100));
        assert!(!r.passed());
        let w = r.counterexample.unwrap();
        let img: Vec<Scalar> = w.image.iter().map(|s| rational::parse(s).unwrap()).collect();
        assert!(!target.contains(&img));
    }

    #[test]
    fn stage_local_checks_pass_for_n3() {
        let p = crate::catalog::polygon(3);
        let m = build_v_polygon_map(&p, BuildOptions::default()).unwrap();
        for rep in check_stages(&m, &SamplePlan::heavy(5, 300)) {
            assert!(rep.containment.passed(), "{rep:?}");
        }
    }

    #[test]
    fn fold_certificates_example() {
        use crate::folding::{build_fold_map, Interval, PsiSign};
        let s = VPolygon::halfplane(Point2::ints(0, 1), Point2::ints(1, 0)).unwrap().to_set();
        let fam = vec![crate::geometry::LineFunctional::ints(0, 1, -1).to_poly()];
        let spec = build_fold_map(&s, fam, Interval::new(Some(int(0)), Some(int(2))).unwrap(), PsiSign::Lemma).unwrap();
        let rs: Vec<Scalar> =
            [(-1, 1), (1, 2), (1, 1), (3, 2), (3, 1)].iter().map(|&(a, b)| rational::ratio(a, b)).collect();
        let rep = certify_fold_stage("f", &spec, &rs, &SamplePlan::heavy(0, 200));
        assert!(rep.passed(), "{rep:?}");
        assert_eq!((rep.case1, rep.case2), (2, 3));
    }

    #[test]
    fn corrupted_expansion_is_caught() {
        let m = build_halfplane_map();
        let mut e = m.expand(64).unwrap();
        assert!(cross_check(&m, &e, &SamplePlan::heavy(0, 100)).passed());
        e[1] = &e[1] + &SparsePoly::monomial(2, &[0, 2], rational::ratio(1, 1000));
        let r = cross_check(&m, &e, &SamplePlan::heavy(0, 100));
        assert!(!r.passed());
        assert!(r.witness.is_some());
    }
}
