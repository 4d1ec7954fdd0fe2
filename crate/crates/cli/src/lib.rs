//! Commands behind the `polyfold` binary.
//!
//! Every command is a function of a [`RunConfig`]. Outputs are files (or
//! stdout) whose bytes depend on the config alone.

mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use polyfold::catalog;
use polyfold::folding::PsiSign;
use polyfold::geometry::{GeometryError, Outline, Region, VPolygon};
use polyfold::pipeline::{build_interior_map, build_v_polygon_map, BuildOptions, PipelineError, Stage, StagedMap};
use polyfold::poly::SparsePoly;
use polyfold::rational::{self, Scalar};
use polyfold::verify::{
    certify_map_folds, check_containment, check_coverage, check_stages, cross_check, ContainmentReport, CoverageReport,
    CrossCheckReport, FoldStageReport, PreciseMap, SamplePlan, StageReport, Window,
};
use rug::Float;
use serde::{Deserialize, Serialize};

pub use svg::render_svg;

/// Coverage threshold for maps with more than one non-affine stage.
pub const COMPOSED_THRESHOLD: f64 = 0.98;
/// Coverage threshold for maps with a single non-affine stage.
pub const SINGLE_STAGE_THRESHOLD: f64 = 0.99;
/// Whole-map containment is skipped above this predicted degree; the
/// per-stage checks still cover every stage.
pub const WHOLE_MAP_DEGREE_LIMIT: u64 = 10_000;
/// Fibers certified per fold stage.
pub const FIBERS_PER_FOLD: usize = 20;
/// Margin around the vertices for the default coverage window.
pub const WINDOW_MARGIN: i64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Polygon JSON in, staged map JSON out.
    Build,
    /// Staged map in, report out.
    Verify,
    /// Polygon JSON in, staged map of the interior map out.
    Interior,
    /// Staged map in, CSV of image points and an SVG out.
    Plot,
    /// Staged map in, explicit component polynomials out.
    Expand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    /// Target polygon for `verify` and `plot`. Defaults to the last expected
    /// set of the map.
    pub polygon: Option<PathBuf>,
    /// Output file; stdout when absent.
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// Exact containment samples, for the whole map and for each stage.
    pub samples: usize,
    /// Forward samples of the coverage check; ten times `samples` when absent.
    pub coverage_samples: Option<usize>,
    pub window: Option<Window>,
    pub grid: usize,
    pub threshold: Option<f64>,
    pub degree_cap: u64,
    /// Build with the sign printed in the vertex step instead of the one the
    /// folding lemma needs.
    pub paper_step4_sign: bool,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: input.into(),
            polygon: None,
            output: None,
            seed: 0,
            samples: 10_000,
            coverage_samples: None,
            window: None,
            grid: 200,
            threshold: None,
            degree_cap: polyfold::pipeline::DEFAULT_DEGREE_CAP,
            paper_step4_sign: false,
        }
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions { step4_sign: if self.paper_step4_sign { PsiSign::Flipped } else { PsiSign::Lemma } }
    }

    fn coverage_plan(&self) -> SamplePlan {
        SamplePlan::heavy(self.seed, self.coverage_samples.unwrap_or(self.samples.saturating_mul(10)))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("{message}")]
    Usage { code: &'static str, message: String },
}

impl CliError {
    /// Machine-readable reason.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io_error",
            CliError::Parse { .. } => "malformed_input",
            CliError::Geometry(e) => e.code(),
            CliError::Pipeline(e) => e.code(),
            CliError::Usage { code, .. } => code,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "code": self.code(), "message": self.to_string() } }).to_string()
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    /// Primary output when no output file was given.
    pub stdout: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Build => cmd_build(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Interior => cmd_interior(cfg),
        Command::Plot => cmd_plot(cfg),
        Command::Expand => cmd_expand(cfg),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes `contents` to the configured output, or hands it back for stdout.
fn emit(cfg: &RunConfig, contents: String, passed: bool) -> Result<Outcome, CliError> {
    match &cfg.output {
        Some(path) => {
            write(path, &contents)?;
            Ok(Outcome { passed, stdout: None })
        }
        None => Ok(Outcome { passed, stdout: Some(contents) }),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn read_polygon(path: &Path) -> Result<VPolygon, CliError> {
    let outline: Outline = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(VPolygon::validate(outline)?)
}

pub fn read_map(path: &Path) -> Result<StagedMap, CliError> {
    let map: StagedMap = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    map.check()?;
    if map.arity_out() != 2 {
        return Err(CliError::Usage {
            code: "arity_mismatch",
            message: format!("map has {} output coordinates, polygons live in the plane", map.arity_out()),
        });
    }
    Ok(map)
}

fn with_expansion(mut map: StagedMap, cap: u64) -> StagedMap {
    if map.predicted_degree() <= cap {
        map.expanded = map.expand(cap).ok();
    }
    map
}

pub fn cmd_build(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = read_polygon(&cfg.input)?;
    let map = with_expansion(build_v_polygon_map(&p, cfg.build_options())?, cfg.degree_cap);
    emit(cfg, to_json(&map), true)
}

pub fn cmd_interior(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = read_polygon(&cfg.input)?;
    let map = with_expansion(build_interior_map(&p, cfg.build_options())?, cfg.degree_cap);
    emit(cfg, to_json(&map), true)
}

/// The set the map is checked against: the given polygon (its interior for
/// maps from space) or the last expected set.
fn target_region(cfg: &RunConfig, map: &StagedMap) -> Result<Region, CliError> {
    match &cfg.polygon {
        Some(path) => {
            let set = read_polygon(path)?.to_set();
            Ok(Region::single(if map.domain_arity == 3 { set.interior() } else { set }))
        }
        None => map.target().cloned().ok_or_else(|| CliError::Usage {
            code: "missing_target",
            message: "map has no stages and no polygon was given".into(),
        }),
    }
}

/// The configured window, or the vertices of the target grown by the margin.
fn coverage_window(cfg: &RunConfig, target: &Region) -> Result<Window, CliError> {
    if let Some(w) = &cfg.window {
        return Ok(w.clone());
    }
    let vertices: Vec<_> = target.parts().iter().flat_map(|s| s.outline.vertices.iter()).collect();
    if vertices.is_empty() {
        return Err(CliError::Usage {
            code: "missing_window",
            message: "target has no vertices; pass --window".into(),
        });
    }
    let m = rational::int(WINDOW_MARGIN);
    let min =
        |f: fn(&polyfold::geometry::Point2) -> &Scalar| vertices.iter().map(|v| f(v)).min().cloned().expect("vertex");
    let max =
        |f: fn(&polyfold::geometry::Point2) -> &Scalar| vertices.iter().map(|v| f(v)).max().cloned().expect("vertex");
    let b = [min(|v| &v.x) - &m, max(|v| &v.x) + &m, min(|v| &v.y) - &m, max(|v| &v.y) + &m];
    Window::new(b).map_err(|e| CliError::Usage { code: "bad_window", message: e.to_string() })
}

fn default_threshold(map: &StagedMap) -> f64 {
    let nonaffine = map.stages.iter().filter(|s| !matches!(s, Stage::Affine { .. })).count();
    if nonaffine <= 1 {
        SINGLE_STAGE_THRESHOLD
    } else {
        COMPOSED_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub domain_arity: usize,
    pub stages: Vec<String>,
    pub predicted_degree: u64,
}

impl MapSummary {
    fn of(map: &StagedMap) -> Self {
        MapSummary {
            domain_arity: map.domain_arity,
            stages: map.stages.iter().map(|s| s.label().to_string()).collect(),
            predicted_degree: map.predicted_degree(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub map: MapSummary,
    /// `None` when the predicted degree exceeds [`WHOLE_MAP_DEGREE_LIMIT`].
    pub containment: Option<ContainmentReport>,
    pub stages: Vec<StageReport>,
    pub folds: Vec<FoldStageReport>,
    pub threshold: f64,
    pub coverage: CoverageReport,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Runs every oracle on a map already in memory.
pub fn verify_map(cfg: &RunConfig, map: &StagedMap, target: &Region) -> Result<VerifyReport, CliError> {
    let window = coverage_window(cfg, target)?;
    let threshold = cfg.threshold.unwrap_or_else(|| default_threshold(map));
    let plan = SamplePlan::heavy(cfg.seed, cfg.samples);
    let containment = (map.predicted_degree() <= WHOLE_MAP_DEGREE_LIMIT).then(|| check_containment(map, target, &plan));
    let stages = check_stages(map, &plan);
    let folds = certify_map_folds(map, FIBERS_PER_FOLD, cfg.seed, 1000);
    let coverage = check_coverage(map, target, &window, cfg.grid, &cfg.coverage_plan());
    let mut checks = Vec::new();
    if let Some(c) = &containment {
        checks.push(Check { name: "containment".into(), passed: c.passed() });
    }
    for s in &stages {
        checks.push(Check { name: format!("stage {} {}", s.index, s.label), passed: s.containment.passed() });
    }
    for f in &folds {
        checks.push(Check { name: format!("fold certificates {}", f.label), passed: f.passed() });
    }
    checks.push(Check { name: "coverage".into(), passed: coverage.hit_fraction >= threshold });
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        config: cfg.clone(),
        map: MapSummary::of(map),
        containment,
        stages,
        folds,
        threshold,
        coverage,
        checks,
        passed,
    })
}

pub fn misses_csv(rep: &CoverageReport) -> String {
    let mut s = String::from("x,y\n");
    for [x, y] in &rep.misses {
        writeln!(s, "{x},{y}").expect("string write");
    }
    s
}

fn sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let map = read_map(&cfg.input)?;
    let target = target_region(cfg, &map)?;
    let rep = verify_map(cfg, &map, &target)?;
    if let Some(out) = &cfg.output {
        write(&sibling(out, "misses.csv"), &misses_csv(&rep.coverage))?;
    }
    emit(cfg, to_json(&rep), rep.passed)
}

/// Image points of heavy-tailed samples that land in `window`, each
/// confirmed at two precisions.
pub fn image_points(map: &StagedMap, window: &Window, plan: &SamplePlan) -> Vec<[f64; 2]> {
    let float = map.compile();
    let precise = PreciseMap::new(map);
    let b = [&window.x0, &window.x1, &window.y0, &window.y1].map(rational::to_f64);
    let inside = |z: [f64; 2]| z[0] >= b[0] && z[0] <= b[1] && z[1] >= b[2] && z[1] <= b[3];
    let tol = 1e-9 * (b[1] - b[0]).max(b[3] - b[2]);
    let mut out = Vec::new();
    for c in 0..plan.chunks() {
        let mut rng = plan.rng(c);
        for i in plan.chunk_range(c) {
            let p = plan.f64_point(&mut rng, i, map.domain_arity);
            let z = float.eval(p);
            if !(z[0].is_finite() && z[1].is_finite()) {
                continue;
            }
            let p: Vec<Float> = p[..map.domain_arity].iter().map(|&v| Float::with_val(53, v)).collect();
            if let Some(z) = precise.stable_image(&p, tol, 64, 1 << 14) {
                if inside(z) {
                    out.push(z);
                }
            }
        }
    }
    out
}

pub fn cmd_plot(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let map = read_map(&cfg.input)?;
    let target = target_region(cfg, &map)?;
    let window = coverage_window(cfg, &target)?;
    let points = image_points(&map, &window, &SamplePlan::heavy(cfg.seed, cfg.samples));
    let mut csv = String::from("x,y\n");
    for [x, y] in &points {
        writeln!(csv, "{x},{y}").expect("string write");
    }
    if let Some(out) = &cfg.output {
        write(&sibling(out, "svg"), &render_svg(&window, &target, &points))?;
    }
    emit(cfg, csv, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub predicted_degree: u64,
    pub components: Vec<SparsePoly>,
    pub latex: Vec<String>,
    pub cross_check: CrossCheckReport,
}

pub fn cmd_expand(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let map = read_map(&cfg.input)?;
    let components = map.expand(cfg.degree_cap)?;
    let plan = SamplePlan::heavy(cfg.seed, cfg.samples.min(1000));
    let cross_check = cross_check(&map, &components, &plan);
    let passed = cross_check.passed();
    let e = Expansion {
        predicted_degree: map.predicted_degree(),
        latex: components.iter().map(SparsePoly::to_latex).collect(),
        components,
        cross_check,
    };
    emit(cfg, to_json(&e), passed)
}

/// Catalog polygon with `n` edges in the polygon JSON format.
pub fn catalog_json(n: usize) -> String {
    to_json(catalog::polygon(n).outline())
}
