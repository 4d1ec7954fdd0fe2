use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rug::Float;

use super::precise::PreciseMap;
use super::pullback::Pullback;
use super::SamplePlan;
use crate::geometry::Region;
use crate::pipeline::StagedMap;
use crate::rational::{self, Scalar};

/// Axis-parallel rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(with = "rational::serde_str")]
    pub x0: Scalar,
    #[serde(with = "rational::serde_str")]
    pub x1: Scalar,
    #[serde(with = "rational::serde_str")]
    pub y0: Scalar,
    #[serde(with = "rational::serde_str")]
    pub y1: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("window must be x0,x1,y0,y1 with x0 < x1 and y0 < y1, got {0:?}")]
pub struct WindowParseError(pub String);

impl Window {
    pub fn new(b: [Scalar; 4]) -> Result<Self, WindowParseError> {
        let [x0, x1, y0, y1] = b;
        if x0 >= x1 || y0 >= y1 {
            return Err(WindowParseError(format!("{x0},{x1},{y0},{y1}")));
        }
        Ok(Window { x0, x1, y0, y1 })
    }

    pub fn ints(x0: i64, x1: i64, y0: i64, y1: i64) -> Self {
        Window::new([x0, x1, y0, y1].map(rational::int)).expect("ordered bounds")
    }

    fn to_f64(&self) -> [f64; 4] {
        [&self.x0, &self.x1, &self.y0, &self.y1].map(rational::to_f64)
    }

    /// Exact corner `(i, j)` of the `m x m` cell grid, `0 <= i, j <= m`.
    fn corner(&self, m: usize, i: usize, j: usize) -> [Scalar; 2] {
        let fx = Scalar::new(i.into(), m.into());
        let fy = Scalar::new(j.into(), m.into());
        [&self.x0 + (&self.x1 - &self.x0) * fx, &self.y0 + (&self.y1 - &self.y0) * fy]
    }

    fn center(&self, m: usize, i: usize, j: usize) -> [Scalar; 2] {
        let fx = Scalar::new((2 * i + 1).into(), (2 * m).into());
        let fy = Scalar::new((2 * j + 1).into(), (2 * m).into());
        [&self.x0 + (&self.x1 - &self.x0) * fx, &self.y0 + (&self.y1 - &self.y0) * fy]
    }
}

impl FromStr for Window {
    type Err = WindowParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<Scalar> =
            s.split(',').map(rational::parse).collect::<Result<_, _>>().map_err(|_| WindowParseError(s.to_string()))?;
        let b: [Scalar; 4] = parts.try_into().map_err(|_| WindowParseError(s.to_string()))?;
        Window::new(b).map_err(|_| WindowParseError(s.to_string()))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.to_f64();
        write!(f, "[{a}, {b}] x [{c}, {d}]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    Outside,
    /// Center and all four corners in the target.
    Interior,
    /// Center in the target, some corner not.
    Boundary,
    /// Center in the target and a vertex of the target inside the cell.
    Vertex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub window: Window,
    pub grid: usize,
    pub samples: usize,
    /// Samples whose image landed in the window.
    pub samples_in_window: usize,
    /// Cells whose center lies in the target.
    pub target_cells: usize,
    pub hit_cells: usize,
    pub hit_fraction: f64,
    pub interior_cells: usize,
    pub interior_hits: usize,
    pub boundary_cells: usize,
    pub boundary_hits: usize,
    pub vertex_cells: usize,
    pub vertex_hits: usize,
    /// Cells reached by a double-precision sample whose image did not
    /// survive re-evaluation at higher precision.
    pub unconfirmed: usize,
    /// Cells missed by forward sampling and searched for a preimage.
    pub retried: usize,
    /// Retried cells for which a domain point with image in the cell was found.
    pub recovered: usize,
    /// Centers of target cells that received no image point.
    pub misses: Vec<[f64; 2]>,
}

impl CoverageReport {
    pub fn interior_hit_fraction(&self) -> f64 {
        ratio(self.interior_hits, self.interior_cells)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

/// Classifies every cell of the `m x m` grid by exact membership tests.
pub fn classify_cells(target: &Region, window: &Window, m: usize) -> Vec<CellClass> {
    let inside = |p: &[Scalar; 2]| target.contains(p);
    let corners: Vec<bool> =
        (0..=m).flat_map(|j| (0..=m).map(move |i| (i, j))).map(|(i, j)| inside(&window.corner(m, i, j))).collect();
    let vertices: Vec<[Scalar; 2]> =
        target.parts().iter().flat_map(|s| s.outline.vertices.iter().map(|v| [v.x.clone(), v.y.clone()])).collect();
    let vertex_cells: Vec<(usize, usize)> = vertices
        .iter()
        .filter_map(|v| {
            let fx = (&v[0] - &window.x0) / (&window.x1 - &window.x0) * Scalar::from_integer(m.into());
            let fy = (&v[1] - &window.y0) / (&window.y1 - &window.y0) * Scalar::from_integer(m.into());
            let (i, j) = (fx.floor().to_integer(), fy.floor().to_integer());
            let ok = |k: &num_bigint::BigInt| k.sign() != num_bigint::Sign::Minus && *k <= num_bigint::BigInt::from(m);
            if !ok(&i) || !ok(&j) {
                return None;
            }
            let c = |k: num_bigint::BigInt| usize::try_from(k).expect("bounded").min(m - 1);
            Some((c(i), c(j)))
        })
        .collect();
    (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % m, idx / m);
            if !inside(&window.center(m, i, j)) {
                return CellClass::Outside;
            }
            if vertex_cells.contains(&(i, j)) {
                return CellClass::Vertex;
            }
            let at = |a: usize, b: usize| corners[b * (m + 1) + a];
            if at(i, j) && at(i + 1, j) && at(i, j + 1) && at(i + 1, j + 1) {
                CellClass::Interior
            } else {
                CellClass::Boundary
            }
        })
        .collect()
}

/// Points of a cell, relative to its lower corner in cell units, at which a
/// preimage is searched for.
/// Working precisions, in bits, of successive preimage searches.
const RETRY_PRECISIONS: [u32; 3] = [128, 512, 2048];

/// Largest precision at which a forward image is re-evaluated.
const MAX_PRECISION: u32 = 1 << 15;

const RETRY_OFFSETS: [(f64, f64); 5] = [(0.5, 0.5), (0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];

/// Fraction of target cells in the window that receive at least one image
/// point.
///
/// Samples are mapped in double precision; the first sample reaching a cell
/// counts once its image, re-evaluated at increasing precision until stable,
/// still lies in the cell. Cells left over are retried by searching for a
/// preimage of a few points of the cell, accepted under the same test.
/// Samples in the window, and the first sample per cell as `(cell, point)`.
type ChunkHits = (usize, Vec<(usize, [f64; 3])>);

pub fn check_coverage(
    map: &StagedMap,
    target: &Region,
    window: &Window,
    grid: usize,
    plan: &SamplePlan,
) -> CoverageReport {
    let m = grid.max(1);
    let classes = classify_cells(target, window, m);
    let float = map.compile();
    let [x0, x1, y0, y1] = window.to_f64();
    let (sx, sy) = (m as f64 / (x1 - x0), m as f64 / (y1 - y0));
    let arity = map.domain_arity;
    let in_cell = |z: [f64; 2]| -> Option<usize> {
        let (fx, fy) = ((z[0] - x0) * sx, (z[1] - y0) * sy);
        (fx >= 0.0 && fy >= 0.0 && fx < m as f64 && fy < m as f64).then(|| fy as usize * m + fx as usize)
    };
    // first sample landing in each cell, per chunk
    let chunks: Vec<ChunkHits> = (0..plan.chunks())
        .into_par_iter()
        .map(|c| {
            let mut rng = plan.rng(c);
            let mut cells = Vec::new();
            let mut in_window = 0;
            for i in plan.chunk_range(c) {
                let p = plan.f64_point(&mut rng, i, arity);
                let z = float.eval(p);
                if let Some(idx) = in_cell([z[0], z[1]]) {
                    in_window += 1;
                    cells.push((idx, p));
                }
            }
            cells.sort_by_key(|c| c.0);
            cells.dedup_by_key(|c| c.0);
            (in_window, cells)
        })
        .collect();
    let mut first: Vec<Option<[f64; 3]>> = vec![None; m * m];
    let mut samples_in_window = 0;
    for (n, cells) in chunks {
        samples_in_window += n;
        for (idx, p) in cells {
            first[idx].get_or_insert(p);
        }
    }
    let precise = PreciseMap::new(map);
    let tol = 1e-6 * ((x1 - x0) / m as f64).min((y1 - y0) / m as f64);
    let confirm = |p: &[Float], idx: usize, start: u32| {
        precise.stable_image(p, tol, start, MAX_PRECISION).and_then(in_cell) == Some(idx)
    };
    let to_floats = |p: &[f64]| p.iter().map(|&v| Float::with_val(53, v)).collect::<Vec<_>>();
    let mut hit: Vec<bool> = first
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            p.is_some_and(|p| classes[idx] != CellClass::Outside && confirm(&to_floats(&p[..arity]), idx, 64))
        })
        .collect();
    let unconfirmed = first.iter().zip(&hit).filter(|(f, h)| f.is_some() && !**h).count();
    let missed: Vec<usize> = (0..m * m).filter(|&idx| !hit[idx] && classes[idx] != CellClass::Outside).collect();
    let pullback = Pullback::new(map);
    let schedule: Vec<(u32, (f64, f64))> =
        RETRY_OFFSETS.iter().flat_map(|&o| RETRY_PRECISIONS.iter().map(move |&prec| (prec, o))).collect();
    // Neighbouring cells tend to need the same precision, so each search starts
    // with the attempt that last succeeded. Every attempt is still made before
    // a cell counts as missed, so the outcome does not depend on the order.
    let last_success = AtomicUsize::new(0);
    let recovered: Vec<usize> = missed
        .par_iter()
        .copied()
        .filter(|&idx| {
            let (i, j) = (idx % m, idx / m);
            let start = last_success.load(Ordering::Relaxed);
            let order = std::iter::once(start).chain((0..schedule.len()).filter(|&k| k != start));
            for k in order {
                let (prec, (dx, dy)) = schedule[k];
                let z = to_floats(&[x0 + (i as f64 + dx) / sx, y0 + (j as f64 + dy) / sy]);
                if pullback.preimage(&z, prec).is_some_and(|p| confirm(&p, idx, prec)) {
                    last_success.store(k, Ordering::Relaxed);
                    return true;
                }
            }
            false
        })
        .collect();
    for &idx in &recovered {
        hit[idx] = true;
    }
    let mut rep = CoverageReport {
        unconfirmed,
        retried: missed.len(),
        recovered: recovered.len(),
        window: window.clone(),
        grid: m,
        samples: plan.count,
        samples_in_window,
        target_cells: 0,
        hit_cells: 0,
        hit_fraction: 0.0,
        interior_cells: 0,
        interior_hits: 0,
        boundary_cells: 0,
        boundary_hits: 0,
        vertex_cells: 0,
        vertex_hits: 0,
        misses: Vec::new(),
    };
    for (idx, class) in classes.iter().enumerate() {
        let h = hit[idx] as usize;
        match class {
            CellClass::Outside => continue,
            CellClass::Interior => {
                rep.interior_cells += 1;
                rep.interior_hits += h;
            }
            CellClass::Boundary => {
                rep.boundary_cells += 1;
                rep.boundary_hits += h;
            }
            CellClass::Vertex => {
                rep.vertex_cells += 1;
                rep.vertex_hits += h;
            }
        }
        rep.target_cells += 1;
        rep.hit_cells += h;
        if h == 0 {
            let (i, j) = (idx % m, idx / m);
            rep.misses.push([x0 + (i as f64 + 0.5) / sx, y0 + (j as f64 + 0.5) / sy]);
        }
    }
    rep.hit_fraction = ratio(rep.hit_cells, rep.target_cells);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AffineMap2, Point2, VPolygon};
    use crate::pipeline::{build_halfplane_map, Stage};
    use crate::verify::Scheme;

    #[test]
    fn window_parsing() {
        let w: Window = "-10,10,0,10".parse().unwrap();
        assert_eq!(w, Window::ints(-10, 10, 0, 10));
        assert!("1,0,0,1".parse::<Window>().is_err());
        assert!("1,2,3".parse::<Window>().is_err());
    }

    #[test]
    fn halfplane_covers_window() {
        let m = build_halfplane_map();
        let rep = check_coverage(
            &m,
            m.target().unwrap(),
            &Window::ints(-10, 10, 0, 10),
            50,
            &SamplePlan::new(1, 300_000, Scheme::Uniform).with_scale(10.0),
        );
        assert_eq!(rep.target_cells, 2500);
        assert!(rep.hit_fraction > 0.99, "{}", rep.hit_fraction);
    }

    #[test]
    fn identity_misses_left_half_of_quadrant_window() {
        let quadrant = VPolygon::new(Point2::ints(0, 1), vec![Point2::origin()], Point2::ints(1, 0)).unwrap();
        let id = StagedMap {
            domain_arity: 2,
            stages: vec![Stage::Affine { label: "id".into(), map: AffineMap2::identity() }],
            expected_after: vec![Region::Everything { arity: 2 }],
            expanded: None,
        };
        let target = Region::single(quadrant.to_set());
        let rep = check_coverage(
            &id,
            &target,
            &Window::ints(-5, 5, 0, 5),
            20,
            &SamplePlan::new(0, 10_000, Scheme::Uniform).with_scale(5.0),
        );
        // target cells are exactly those with x > 0, all of them hit
        assert_eq!(rep.target_cells, 200);
        assert!(rep.misses.iter().all(|c| c[0] > 0.0));
        let classes = classify_cells(&target, &Window::ints(-5, 5, 0, 5), 20);
        assert_eq!(classes.iter().filter(|c| **c == CellClass::Outside).count(), 200);
    }
}
