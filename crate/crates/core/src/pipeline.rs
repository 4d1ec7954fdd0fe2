//! Staged polynomial maps and the builders of the inductive construction.
//!
//! A [`StagedMap`] is a chain of elementary stages evaluated one after the
//! other. Each stage records the set its output is expected to land in, which
//! lets the verifier check every step separately.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::folding::{build_fold_map, FloatFold, FoldError, FoldSpec, Interval, PsiSign};
use crate::geometry::{
    compute_apex, interior_frame, normalize_step2, relocate_tau1, relocate_tau2, AffineMap2, BasicPolygonalSet,
    GeometryError, LineFunctional, Outline, Point2, Region, VPolygon,
};
use crate::poly::{FloatPoly, PolyError, SparsePoly};
use crate::rational::{self, Scalar};

pub const DEFAULT_DEGREE_CAP: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("stage {stage}: {source}")]
    Fold { stage: String, source: FoldError },
    #[error("stage {index} expects {expected} inputs but receives {found}")]
    Arity { index: usize, expected: usize, found: usize },
    #[error("expected_after has {found} entries for {stages} stages")]
    ExpectedCount { stages: usize, found: usize },
    #[error("predicted degree {predicted} exceeds the cap {cap}")]
    DegreeCap { predicted: u64, cap: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Geometry(g) => g.code(),
            PipelineError::Fold { source, .. } => source.code(),
            PipelineError::Arity { .. } | PipelineError::ExpectedCount { .. } => "arity_mismatch",
            PipelineError::DegreeCap { .. } => "degree_cap_exceeded",
            PipelineError::Poly(_) => "malformed_polynomial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Stage {
    /// A fixed polynomial map given by its components.
    Base {
        name: String,
        components: Vec<SparsePoly>,
    },
    Affine {
        label: String,
        map: AffineMap2,
    },
    Fold {
        label: String,
        spec: FoldSpec,
    },
    /// `(x, y, t) -> inner(x, y) + t (1, 1)`.
    Lift {
        inner: Box<StagedMap>,
    },
}

impl Stage {
    pub fn label(&self) -> &str {
        match self {
            Stage::Base { name, .. } => name,
            Stage::Affine { label, .. } | Stage::Fold { label, .. } => label,
            Stage::Lift { .. } => "lift",
        }
    }

    pub fn arity_in(&self) -> usize {
        match self {
            Stage::Base { components, .. } => components.first().map_or(0, SparsePoly::arity),
            Stage::Affine { .. } | Stage::Fold { .. } => 2,
            Stage::Lift { .. } => 3,
        }
    }

    pub fn arity_out(&self) -> usize {
        match self {
            Stage::Base { components, .. } => components.len(),
            _ => 2,
        }
    }

    /// Total degree of the stage as a polynomial map.
    pub fn degree(&self) -> u64 {
        match self {
            Stage::Base { components, .. } => components.iter().map(|c| c.degree() as u64).max().unwrap_or(0),
            Stage::Affine { .. } => 1,
            Stage::Fold { spec, .. } => spec.h.degree().max(1) as u64,
            Stage::Lift { inner } => inner.predicted_degree().max(1),
        }
    }

    pub fn apply(&self, p: &[Scalar]) -> Vec<Scalar> {
        match self {
            Stage::Base { components, .. } => components.iter().map(|c| c.eval(p)).collect(),
            Stage::Affine { map, .. } => map.apply_xy(&p[0], &p[1]).to_vec(),
            Stage::Fold { spec, .. } => vec![p[0].clone(), spec.apply(&p[0], &p[1])],
            Stage::Lift { inner } => {
                let z = inner.eval(&p[..2]);
                vec![&z[0] + &p[2], &z[1] + &p[2]]
            }
        }
    }

    /// Component polynomials; lifts expand their inner map under `cap`.
    pub fn components(&self, cap: u64) -> Result<Vec<SparsePoly>, PipelineError> {
        Ok(match self {
            Stage::Base { components, .. } => components.clone(),
            Stage::Affine { map, .. } => map.to_polys().to_vec(),
            Stage::Fold { spec, .. } => vec![SparsePoly::var(2, 0), spec.h.clone()],
            Stage::Lift { inner } => {
                let e = inner.expand(cap)?;
                let xy = [SparsePoly::var(3, 0), SparsePoly::var(3, 1)];
                let t = SparsePoly::var(3, 2);
                vec![e[0].compose(&xy)? + t.clone(), e[1].compose(&xy)? + t]
            }
        })
    }

    fn compile(&self) -> FloatStage {
        match self {
            Stage::Base { components, .. } => FloatStage::Base(components.iter().map(SparsePoly::to_float).collect()),
            Stage::Affine { map, .. } => FloatStage::Affine(map.to_f64()),
            Stage::Fold { spec, .. } => FloatStage::Fold(spec.compile()),
            Stage::Lift { inner } => FloatStage::Lift(Box::new(inner.compile())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagedMap {
    pub domain_arity: usize,
    pub stages: Vec<Stage>,
    /// `expected_after[k]` must contain the image of stage `k`.
    pub expected_after: Vec<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expanded: Option<Vec<SparsePoly>>,
}

impl StagedMap {
    /// Checks that consecutive stages agree on arities; run after loading.
    pub fn check(&self) -> Result<(), PipelineError> {
        if self.expected_after.len() != self.stages.len() {
            return Err(PipelineError::ExpectedCount { stages: self.stages.len(), found: self.expected_after.len() });
        }
        let mut arity = self.domain_arity;
        for (index, s) in self.stages.iter().enumerate() {
            if s.arity_in() != arity {
                return Err(PipelineError::Arity { index, expected: s.arity_in(), found: arity });
            }
            if let Stage::Lift { inner } = s {
                inner.check()?;
                if inner.domain_arity != 2 || inner.arity_out() != 2 {
                    return Err(PipelineError::Arity { index, expected: 2, found: inner.domain_arity });
                }
            }
            if let Stage::Base { components, .. } = s {
                if components.iter().any(|c| c.arity() != arity) {
                    return Err(PipelineError::Arity { index, expected: arity, found: s.arity_in() });
                }
            }
            arity = s.arity_out();
            if self.expected_after[index].arity() != arity {
                return Err(PipelineError::Arity { index, expected: arity, found: self.expected_after[index].arity() });
            }
        }
        Ok(())
    }

    pub fn arity_out(&self) -> usize {
        self.stages.last().map_or(self.domain_arity, Stage::arity_out)
    }

    pub fn target(&self) -> Option<&Region> {
        self.expected_after.last()
    }

    pub fn eval(&self, p: &[Scalar]) -> Vec<Scalar> {
        self.eval_prefix(p, self.stages.len())
    }

    /// Image after the first `k` stages.
    pub fn eval_prefix(&self, p: &[Scalar], k: usize) -> Vec<Scalar> {
        let mut cur = p.to_vec();
        for s in &self.stages[..k] {
            cur = s.apply(&cur);
        }
        cur
    }

    /// Every intermediate image, one per stage.
    pub fn eval_trace(&self, p: &[Scalar]) -> Vec<Vec<Scalar>> {
        let mut cur = p.to_vec();
        let mut out = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            cur = s.apply(&cur);
            out.push(cur.clone());
        }
        out
    }

    /// Product of stage degrees, an upper bound on the expanded degree.
    pub fn predicted_degree(&self) -> u64 {
        self.predicted_prefix_degree(self.stages.len())
    }

    pub fn predicted_prefix_degree(&self, k: usize) -> u64 {
        self.stages[..k].iter().fold(1u64, |acc, s| acc.saturating_mul(s.degree()))
    }

    pub fn expand(&self, cap: u64) -> Result<Vec<SparsePoly>, PipelineError> {
        self.expand_prefix(self.stages.len(), cap)
    }

    /// Composite of the first `k` stages as explicit polynomials.
    pub fn expand_prefix(&self, k: usize, cap: u64) -> Result<Vec<SparsePoly>, PipelineError> {
        let predicted = self.predicted_prefix_degree(k);
        if predicted > cap {
            return Err(PipelineError::DegreeCap { predicted, cap });
        }
        let mut cur: Vec<SparsePoly> = (0..self.domain_arity).map(|i| SparsePoly::var(self.domain_arity, i)).collect();
        for s in &self.stages[..k] {
            let comps = s.components(cap)?;
            cur = comps.iter().map(|c| c.compose(&cur)).collect::<Result<_, _>>()?;
        }
        Ok(cur)
    }

    pub fn compile(&self) -> FloatMap {
        FloatMap { stages: self.stages.iter().map(Stage::compile).collect() }
    }
}

enum FloatStage {
    Base(Vec<FloatPoly>),
    Affine([f64; 6]),
    Fold(FloatFold),
    Lift(Box<FloatMap>),
}

/// Double-precision evaluator for a staged map, used only to pre-filter
/// coverage cells.
pub struct FloatMap {
    stages: Vec<FloatStage>,
}

impl FloatMap {
    /// Evaluates the first `k` stages; coordinates beyond the output arity are
    /// left unspecified.
    pub fn eval_prefix(&self, p: [f64; 3], k: usize) -> [f64; 3] {
        let mut cur = p;
        for s in &self.stages[..k] {
            cur = match s {
                FloatStage::Base(cs) => {
                    let mut out = [0.0; 3];
                    let n = cs.first().map_or(0, |c| c.arity());
                    for (o, c) in out.iter_mut().zip(cs) {
                        *o = c.eval(&cur[..n]);
                    }
                    out
                }
                FloatStage::Affine(m) => {
                    [m[0] * cur[0] + m[1] * cur[1] + m[2], m[3] * cur[0] + m[4] * cur[1] + m[5], 0.0]
                }
                FloatStage::Fold(f) => [cur[0], f.apply(cur[0], cur[1]), 0.0],
                FloatStage::Lift(inner) => {
                    let z = inner.eval([cur[0], cur[1], 0.0]);
                    [z[0] + cur[2], z[1] + cur[2], 0.0]
                }
            };
        }
        cur
    }

    pub fn eval(&self, p: [f64; 3]) -> [f64; 3] {
        self.eval_prefix(p, self.stages.len())
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

fn closed_upper_halfplane() -> BasicPolygonalSet {
    VPolygon::halfplane(Point2::origin(), Point2::ints(1, 0)).expect("valid").to_set()
}

fn closed_quadrant() -> VPolygon {
    VPolygon::new(Point2::ints(0, 1), vec![Point2::origin()], Point2::ints(1, 0)).expect("valid")
}

/// `(x, y) -> (x, y^2)`, onto `{y >= 0}`.
pub fn build_halfplane_map() -> StagedMap {
    let x = SparsePoly::var(2, 0);
    let y = SparsePoly::var(2, 1);
    StagedMap {
        domain_arity: 2,
        stages: vec![Stage::Base { name: "halfplane".into(), components: vec![x, &y * &y] }],
        expected_after: vec![Region::single(closed_upper_halfplane())],
        expanded: None,
    }
}

/// `(x, y) -> (x^2, y^2)`, onto the closed first quadrant.
pub fn build_quadrant_map() -> StagedMap {
    let x = SparsePoly::var(2, 0);
    let y = SparsePoly::var(2, 1);
    StagedMap {
        domain_arity: 2,
        stages: vec![Stage::Base { name: "quadrant".into(), components: vec![&x * &x, &y * &y] }],
        expected_after: vec![Region::single(closed_quadrant().to_set())],
        expanded: None,
    }
}

/// `g(x, y) = (y (xy - 1), (xy - 1)^2 + x^2)`, whose second coordinate never
/// vanishes; image `R x ]0, +inf[`.
pub fn open_halfplane_map() -> StagedMap {
    let [g1, g2] = open_halfplane_components(2, 0, 1);
    let open_upper = closed_upper_halfplane().without_edge(0);
    StagedMap {
        domain_arity: 2,
        stages: vec![Stage::Base { name: "open_halfplane".into(), components: vec![g1, g2] }],
        expected_after: vec![Region::single(open_upper)],
        expanded: None,
    }
}

fn open_halfplane_components(arity: usize, xi: usize, yi: usize) -> [SparsePoly; 2] {
    let x = SparsePoly::var(arity, xi);
    let y = SparsePoly::var(arity, yi);
    let m = &(&x * &y) - &SparsePoly::one(arity);
    [&y * &m, &(&m * &m) + &(&x * &x)]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Sign convention for the fold over `]0, +inf[` in the vertex step.
    pub step4_sign: PsiSign,
}

fn functional_polys(p: &VPolygon) -> Vec<SparsePoly> {
    p.functionals().iter().map(LineFunctional::to_poly).collect()
}

fn fold_stage(
    label: String,
    set: &BasicPolygonalSet,
    family: Vec<SparsePoly>,
    c: Option<Scalar>,
    d: Option<Scalar>,
    sign: PsiSign,
) -> Result<Stage, PipelineError> {
    let fold = |e| PipelineError::Fold { stage: label.clone(), source: e };
    let interval = Interval::new(c, d).map_err(fold)?;
    let spec = build_fold_map(set, family, interval, sign).map_err(fold)?;
    Ok(Stage::Fold { label, spec })
}

struct Chain {
    stages: Vec<Stage>,
    expected: Vec<Region>,
}

impl Chain {
    fn push(&mut self, s: Stage, r: Region) {
        self.stages.push(s);
        self.expected.push(r);
    }

    fn push_affine(&mut self, label: String, map: AffineMap2, r: Region) {
        if !map.is_identity() {
            self.push(Stage::Affine { label, map }, r);
        } else if let Some(last) = self.expected.last_mut() {
            *last = r;
        }
    }
}

/// Polynomial map of the plane onto `p`: the base maps for one or two edges,
/// then three folds and the placements between them for each further edge.
pub fn build_v_polygon_map(p: &VPolygon, opts: BuildOptions) -> Result<StagedMap, PipelineError> {
    let chain = build_chain(p, opts)?;
    Ok(StagedMap { domain_arity: 2, stages: chain.stages, expected_after: chain.expected, expanded: None })
}

fn build_chain(p: &VPolygon, opts: BuildOptions) -> Result<Chain, PipelineError> {
    let n = p.edge_count();
    let target = Region::single(p.to_set());
    if n == 1 {
        let base = build_halfplane_map();
        let mut c = Chain { stages: base.stages, expected: base.expected_after };
        let d = p.dir_out();
        let frame = AffineMap2::from_frame(&p.vertices()[0], d, &d.perp());
        c.push_affine("frame".into(), frame, target);
        return Ok(c);
    }
    if n == 2 {
        let base = build_quadrant_map();
        let mut c = Chain { stages: base.stages, expected: base.expected_after };
        let frame = AffineMap2::from_frame(&p.vertices()[0], p.dir_out(), p.dir_in());
        c.push_affine("frame".into(), frame, target);
        return Ok(c);
    }

    let (tau0, pn) = normalize_step2(p)?;
    let k = pn.vertices().len();
    let p1 = pn.without_last_vertex()?;
    let mut c = build_chain(&p1, opts)?;
    let a = pn.vertices()[k - 1].x.clone();

    // fold the strip over ]0, a[ into place
    let s1 = p1.to_set();
    let up = Point2::ints(0, 1);
    let strip = BasicPolygonalSet::from_outline(
        Outline::new(up.clone(), vec![Point2::origin(), Point2::new(a.clone(), Scalar::zero())], up),
        1,
    )
    .without_edge(0)
    .without_edge(2);
    let q_set = Region::Union { parts: vec![s1.clone(), strip] };
    let f1 =
        fold_stage(format!("f1[n={n}]"), &s1, functional_polys(&p1), Some(Scalar::zero()), Some(a), PsiSign::Lemma)?;
    c.push(f1, q_set.clone());

    let apex = compute_apex(&pn)?;
    let t1 = relocate_tau1(&pn, &apex)?;
    c.push(Stage::Affine { label: format!("tau1[n={n}]"), map: t1.map.clone() }, q_set.transform(&t1.map));

    // cover the region between the outgoing ray and the apex ray
    let pp = &t1.polygon;
    let p2 = VPolygon::new(pp.dir_in().clone(), pp.vertices().to_vec(), t1.apex.clone())?;
    let s2 = p2.to_set().without_edge(p2.edge_count() - 1);
    let f2 = fold_stage(format!("f2[n={n}]"), &s2, functional_polys(&p2), Some(Scalar::zero()), None, opts.step4_sign)?;
    let pp_punctured = pp.to_set().without_vertex(k - 1);
    c.push(f2, Region::single(pp_punctured));

    let (tau2, ppp) = relocate_tau2(pp)?;
    let ppp_punctured = ppp.to_set().without_vertex(k - 1);
    c.push(Stage::Affine { label: format!("tau2[n={n}]"), map: tau2.clone() }, Region::single(ppp_punctured.clone()));

    // cover the last vertex
    let c3 = ppp.vertices()[k - 2].x.clone();
    let f3 = fold_stage(format!("f3[n={n}]"), &ppp_punctured, functional_polys(&ppp), Some(c3), None, PsiSign::Lemma)?;
    c.push(f3, Region::single(ppp.to_set()));

    c.push(Stage::Affine { label: format!("tau2_inv[n={n}]"), map: tau2.inverse()? }, Region::single(pp.to_set()));
    let back = tau0.inverse()?.compose(&t1.map.inverse()?);
    c.push_affine(format!("tau0_inv_tau1_inv[n={n}]"), back, target);
    Ok(c)
}

/// Map `R^3 -> R^2` onto the interior of `p`.
pub fn build_interior_map(p: &VPolygon, opts: BuildOptions) -> Result<StagedMap, PipelineError> {
    let frame = if p.is_halfplane() {
        let d = p.dir_out();
        AffineMap2::from_frame(&p.vertices()[0], d, &d.perp()).inverse()?
    } else {
        interior_frame(p)?
    };
    let placed = p.transform(&frame);
    let inner = build_v_polygon_map(&placed, opts)?;
    let [g1, g2] = open_halfplane_components(3, 1, 2);
    let base = Stage::Base { name: "open_halfplane_factor".into(), components: vec![SparsePoly::var(3, 0), g1, g2] };
    let mut c = Chain { stages: Vec::new(), expected: Vec::new() };
    c.push(base, Region::UpperOpenHalfSpace);
    c.push(Stage::Lift { inner: Box::new(inner) }, Region::single(placed.to_set().interior()));
    c.push_affine("frame_inv".into(), frame.inverse()?, Region::single(p.to_set().interior()));
    Ok(StagedMap { domain_arity: 3, stages: c.stages, expected_after: c.expected, expanded: None })
}

/// Stage count of [`build_v_polygon_map`] for an `n`-edge polygon whose frame
/// map is not the identity.
pub fn stage_count(n: usize) -> usize {
    if n <= 2 {
        2
    } else {
        2 + 7 * (n - 2)
    }
}

/// Stage labels with the exact image of `p` after each stage.
pub fn describe_trace(map: &StagedMap, p: &[Scalar]) -> Vec<(String, Vec<String>)> {
    map.stages
        .iter()
        .zip(map.eval_trace(p))
        .map(|(s, v)| (s.label().to_string(), v.iter().map(rational::to_string).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn pt(x: i64, y: i64) -> Vec<Scalar> {
        vec![int(x), int(y)]
    }

    pub(crate) fn catalog3() -> VPolygon {
        VPolygon::new(Point2::ints(-1, 2), vec![Point2::ints(0, 1), Point2::ints(1, 0)], Point2::ints(2, 1)).unwrap()
    }

    #[test]
    fn base_maps() {
        let h = build_halfplane_map();
        assert_eq!(h.eval(&pt(3, 2)), pt(3, 4));
        assert_eq!(h.eval(&pt(0, -1)), pt(0, 1));
        let q = build_quadrant_map();
        assert_eq!(q.eval(&pt(-2, 3)), pt(4, 9));
        assert_eq!(q.eval(&pt(0, 0)), pt(0, 0));
        assert_eq!(
            h.expand(DEFAULT_DEGREE_CAP).unwrap(),
            match &h.stages[0] {
                Stage::Base { components, .. } => components.clone(),
                _ => unreachable!(),
            }
        );
    }

    #[test]
    fn open_halfplane_example() {
        let g = open_halfplane_map();
        assert_eq!(g.eval(&pt(0, 5)), pt(-5, 1));
    }

    #[test]
    fn halfplane_dispatch() {
        let p = VPolygon::halfplane(Point2::origin(), Point2::ints(1, 0)).unwrap();
        let m = build_v_polygon_map(&p, BuildOptions::default()).unwrap();
        assert_eq!(m, build_halfplane_map());
    }

    #[test]
    fn stage_counts() {
        let m = build_v_polygon_map(&catalog3(), BuildOptions::default()).unwrap();
        assert_eq!(m.stages.len(), 9);
        m.check().unwrap();
        let p4 = VPolygon::new(
            Point2::ints(-1, 2),
            vec![Point2::ints(-1, 1), Point2::ints(0, 0), Point2::ints(2, 0)],
            Point2::ints(1, 1),
        )
        .unwrap();
        let m = build_v_polygon_map(&p4, BuildOptions::default()).unwrap();
        assert_eq!(m.stages.len(), stage_count(4));
    }

    #[test]
    fn vertices_land_in_target() {
        let p = catalog3();
        let m = build_v_polygon_map(&p, BuildOptions::default()).unwrap();
        let target = m.target().unwrap().clone();
        for x in -3..=3 {
            for y in -3..=3 {
                let z = m.eval(&[ratio(x, 2), ratio(y, 3)]);
                assert!(target.contains(&z), "({x}/2, {y}/3) -> {z:?}");
            }
        }
    }

    #[test]
    fn interior_map_on_quadrant() {
        let q = closed_quadrant();
        let m = build_interior_map(&q, BuildOptions::default()).unwrap();
        assert_eq!(m.stages.len(), 2);
        m.check().unwrap();
        // (x, y, t) after the factor is (x, g(y, t)); check the lift directly
        let Stage::Lift { inner } = &m.stages[1] else { panic!() };
        let lift = Stage::Lift { inner: inner.clone() };
        assert_eq!(lift.apply(&[int(1), int(1), ratio(1, 2)]), vec![ratio(3, 2), ratio(3, 2)]);
        let e = m.expand(DEFAULT_DEGREE_CAP).unwrap();
        let z = [int(2), int(-1), int(3)];
        assert_eq!(vec![e[0].eval(&z), e[1].eval(&z)], m.eval(&z));
    }

    #[test]
    fn interior_map_on_halfplane() {
        let p = crate::catalog::polygon(1);
        let m = build_interior_map(&p, BuildOptions::default()).unwrap();
        m.check().unwrap();
        let open = p.to_set().interior();
        for (x, y, t) in [(0, 0, 1), (3, -2, 5), (-1, 4, 1)] {
            let z = m.eval(&[int(x), int(y), ratio(t, 7)]);
            assert!(open.contains_xy(&z[0], &z[1]), "{z:?}");
        }
    }

    #[test]
    fn degree_cap_refusal() {
        let m = build_v_polygon_map(&catalog3(), BuildOptions::default()).unwrap();
        let e = m.expand(DEFAULT_DEGREE_CAP).unwrap_err();
        assert!(matches!(e, PipelineError::DegreeCap { cap: 64, .. }));
        let pre = m.expand_prefix(3, DEFAULT_DEGREE_CAP).unwrap();
        let z = [ratio(1, 3), int(-2)];
        assert_eq!(vec![pre[0].eval(&z), pre[1].eval(&z)], m.eval_prefix(&z, 3));
    }

    #[test]
    fn serde_round_trip() {
        let m = build_v_polygon_map(&catalog3(), BuildOptions::default()).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: StagedMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn float_tracks_exact() {
        let m = build_v_polygon_map(&catalog3(), BuildOptions::default()).unwrap();
        let f = m.compile();
        for (x, y) in [(0.25, -0.5), (-0.75, 0.125), (0.5, 0.5)] {
            let e = m.eval(&[rational::from_f64(x).unwrap(), rational::from_f64(y).unwrap()]);
            let g = f.eval([x, y, 0.0]);
            for i in 0..2 {
                let ev = rational::to_f64(&e[i]);
                assert!((ev - g[i]).abs() <= 1e-6 * (1.0 + ev.abs()), "{ev} vs {}", g[i]);
            }
        }
    }
}
