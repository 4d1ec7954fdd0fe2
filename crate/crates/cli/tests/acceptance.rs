//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use polyfold::catalog;
use polyfold::folding::{build_fold_map, FiberCase, PsiSign, BRACKET_BITS};
use polyfold::geometry::{LineFunctional, Region};
use polyfold::pipeline::{
    build_halfplane_map, build_interior_map, build_quadrant_map, build_v_polygon_map, open_halfplane_map, BuildOptions,
    StagedMap, DEFAULT_DEGREE_CAP,
};
use polyfold::rational::{self, Scalar};
use polyfold::verify::{
    certify_fold_stage, check_containment, check_coverage, check_stages, cross_check, fiber_abscissae, SamplePlan,
    Window,
};
use polyfold_cli::{cmd_verify, Command, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GRID: usize = 200;
const SEED: u64 = 20_240_611;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict { passed, detail: detail.into() }
    }
}

fn lemma() -> BuildOptions {
    BuildOptions { step4_sign: PsiSign::Lemma }
}

fn flipped() -> BuildOptions {
    BuildOptions { step4_sign: PsiSign::Flipped }
}

fn window_of(n: usize) -> Window {
    Window::new(catalog::window_around(&catalog::polygon(n), 5)).expect("nonempty window")
}

fn coverage(map: &StagedMap, target: &Region, window: &Window, seed: u64) -> f64 {
    check_coverage(map, target, window, GRID, &SamplePlan::heavy(seed, 1_000_000)).hit_fraction
}

fn base_cases() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, map, window) in [
        ("halfplane", build_halfplane_map(), Window::ints(-10, 10, 0, 10)),
        ("quadrant", build_quadrant_map(), Window::ints(0, 10, 0, 10)),
    ] {
        let target = map.target().expect("one stage").clone();
        let c = check_containment(&map, &target, &SamplePlan::heavy(SEED, 100_000));
        let cov = coverage(&map, &target, &window, SEED);
        ok &= c.passed() && c.samples == 100_000 && cov >= 0.99;
        notes.push(format!("{name}: {} failures / {} samples, coverage {cov:.4}", c.failures, c.samples));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    Verdict::new(ok, format!("{}; {elapsed:.1?} (limit 60s)", notes.join("; ")))
}

/// Twenty distinct abscissae spread over those the verifier would pick.
fn twenty_fibers(spec: &polyfold::folding::FoldSpec, seed: u64) -> Vec<Scalar> {
    let mut count = 20;
    loop {
        let rs = fiber_abscissae(spec, count, seed);
        if rs.len() >= 20 {
            return (0..20).map(|i| rs[i * rs.len() / 20].clone()).collect();
        }
        count *= 2;
    }
}

fn folding_lemma() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let width = Scalar::new(1.into(), num_bigint::BigInt::from(1) << BRACKET_BITS);
    let (mut case1, mut case2, mut failures, mut wide, mut fibers) = (0, 0, 0, 0, 0);
    for i in 0..100u64 {
        let curtain = catalog::random_curtain(&mut rng);
        let interval = catalog::random_interval(&mut rng);
        let family = curtain.functionals().iter().map(LineFunctional::to_poly).collect();
        let spec = match build_fold_map(&curtain.to_set(), family, interval, PsiSign::Lemma) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("curtain {i}: {e}");
                failures += 1;
                continue;
            }
        };
        let rs = twenty_fibers(&spec, SEED + i);
        let rep = certify_fold_stage(&format!("curtain {i}"), &spec, &rs, &SamplePlan::heavy(SEED + i, 1000));
        fibers += rep.fibers;
        case1 += rep.case1;
        case2 += rep.case2;
        failures += rep.failures.len() + rep.phi_negative;
        for r in &rs {
            if let Ok(c) = polyfold::folding::certify_fiber(&spec, r) {
                if c.case == FiberCase::Case2 {
                    let [lo, hi] = c.bracket.expect("case 2 bracket").map(|s| rational::parse(&s).expect("own output"));
                    wide += usize::from(hi - lo > width);
                }
            }
        }
    }
    let elapsed = t.elapsed();
    let ok =
        fibers == 2000 && failures == 0 && wide == 0 && case1 > 0 && case2 > 0 && elapsed < Duration::from_secs(120);
    Verdict::new(
        ok,
        format!(
            "{fibers} fibers: {case1} case 1, {case2} case 2, {failures} failures, {wide} brackets wider than 2^-{BRACKET_BITS}; {elapsed:.1?} (limit 120s)"
        ),
    )
}

/// Final coverage of each lemma build, reused by the sign regression.
fn pipeline(covs: &mut Vec<f64>) -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 1..=5 {
        let p = catalog::polygon(n);
        let map = match build_v_polygon_map(&p, lemma()) {
            Ok(m) => m,
            Err(e) => {
                notes.push(format!("n={n}: build failed: {e}"));
                ok = false;
                covs.push(0.0);
                continue;
            }
        };
        let stages = check_stages(&map, &SamplePlan::heavy(SEED + n as u64, 10_000));
        let bad: Vec<&str> = stages.iter().filter(|s| !s.containment.passed()).map(|s| s.label.as_str()).collect();
        let short = stages.iter().any(|s| s.containment.samples < 10_000);
        let cov = coverage(&map, &Region::single(p.to_set()), &window_of(n), SEED);
        covs.push(cov);
        ok &= bad.is_empty() && !short && cov >= 0.98;
        notes.push(format!("n={n}: {} stages, failing {bad:?}, coverage {cov:.4}", stages.len()));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(600);
    Verdict::new(ok, format!("{}; {elapsed:.1?} (limit 600s)", notes.join("; ")))
}

fn sign_regression(lemma_covs: &[f64]) -> Verdict {
    let mut notes = Vec::new();
    for n in 3..=5 {
        let p = catalog::polygon(n);
        let lemma_cov = lemma_covs.get(n - 1).copied().unwrap_or_else(|| {
            let map = build_v_polygon_map(&p, lemma()).expect("catalog build");
            coverage(&map, &Region::single(p.to_set()), &window_of(n), SEED)
        });
        let map = build_v_polygon_map(&p, flipped()).expect("flipped builds succeed");
        let cov = coverage(&map, &Region::single(p.to_set()), &window_of(n), SEED);
        notes.push(format!("n={n}: flipped {cov:.4} vs lemma {lemma_cov:.4}"));
        if lemma_cov >= 0.98 && cov <= 0.98 - 0.05 {
            return Verdict::new(true, notes.join("; "));
        }
    }
    Verdict::new(false, notes.join("; "))
}

fn interior_map() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    let quadrant = polyfold::geometry::VPolygon::new(
        polyfold::geometry::Point2::ints(0, 1),
        vec![polyfold::geometry::Point2::origin()],
        polyfold::geometry::Point2::ints(1, 0),
    )
    .expect("quadrant");
    for (name, p) in [("quadrant", quadrant), ("n=3", catalog::polygon(3))] {
        let map = build_interior_map(&p, lemma()).expect("interior map");
        let target = Region::single(p.to_set().interior());
        let c = check_containment(&map, &target, &SamplePlan::heavy(SEED, 100_000));
        let window = Window::new(catalog::window_around(&p, 5)).expect("window");
        let cov = coverage(&map, &target, &window, SEED);
        ok &= c.passed() && c.samples == 100_000 && cov >= 0.98;
        notes.push(format!("{name}: {} failures / {} samples, coverage {cov:.4}", c.failures, c.samples));
    }
    let g = open_halfplane_map();
    let target = g.target().expect("one stage").clone();
    let c = check_containment(&g, &target, &SamplePlan::heavy(SEED, 1_000_000));
    let cov = coverage(&g, &target, &Window::ints(-10, 10, 0, 10), SEED);
    ok &= c.passed() && c.samples == 1_000_000 && cov >= 0.99;
    notes.push(format!("open half-plane: {} failures / {} samples, coverage {cov:.4}", c.failures, c.samples));
    Verdict::new(ok, notes.join("; "))
}

fn consistency() -> Verdict {
    let mut maps: Vec<(String, StagedMap)> = vec![
        ("halfplane".into(), build_halfplane_map()),
        ("quadrant".into(), build_quadrant_map()),
        ("open half-plane".into(), open_halfplane_map()),
    ];
    for n in 1..=5 {
        let p = catalog::polygon(n);
        maps.push((format!("n={n}"), build_v_polygon_map(&p, lemma()).expect("catalog build")));
        maps.push((format!("interior n={n}"), build_interior_map(&p, lemma()).expect("interior build")));
    }
    let mut ok = true;
    let mut checked = Vec::new();
    for (name, map) in maps.iter().filter(|(_, m)| m.predicted_degree() <= DEFAULT_DEGREE_CAP) {
        match map.expand(DEFAULT_DEGREE_CAP) {
            Ok(e) => {
                let rep = cross_check(map, &e, &SamplePlan::heavy(SEED, 1000));
                ok &= rep.passed() && rep.samples == 1000;
                checked.push(format!("{name} ({} mismatches)", rep.mismatches));
            }
            Err(err) => {
                ok = false;
                checked.push(format!("{name} (expansion failed: {err})"));
            }
        }
    }
    Verdict::new(ok, format!("{} maps of degree <= {DEFAULT_DEGREE_CAP}: {}", checked.len(), checked.join(", ")))
}

fn determinism() -> Verdict {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("scratch dir");
    let input = dir.join("catalog3_map.json");
    let map = build_v_polygon_map(&catalog::polygon(3), lemma()).expect("catalog build");
    std::fs::write(&input, serde_json::to_string(&map).expect("serializable")).expect("write map");
    let out = dir.join("report.json");
    let mut cfg = RunConfig::new(Command::Verify, &input);
    cfg.samples = 1000;
    cfg.seed = SEED;
    cfg.output = Some(out.clone());
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let _ = std::fs::remove_file(&out);
        if let Err(e) = cmd_verify(&cfg) {
            return Verdict::new(false, format!("verify failed: {e}"));
        }
        bytes.push((
            std::fs::read(&out).expect("report"),
            std::fs::read(out.with_extension("misses.csv")).expect("misses"),
        ));
    }
    let same = bytes[0] == bytes[1];
    Verdict::new(
        same,
        format!("report {} bytes, misses {} bytes, identical: {same}", bytes[0].0.len(), bytes[0].1.len()),
    )
}

/// Criteria to run: the numeric arguments, or all of them.
fn selected() -> Vec<usize> {
    let picked: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if picked.is_empty() {
        (1..=7).collect()
    } else {
        picked
    }
}

fn main() {
    let picked = selected();
    let mut covs = Vec::new();
    let mut all = true;
    let mut report = |k: usize, name: &str, f: &mut dyn FnMut() -> Verdict| {
        if !picked.contains(&k) {
            return;
        }
        let t = Instant::now();
        let v = f();
        all &= v.passed;
        println!("criterion {k} {name}: {} ({:.1?}) {}", if v.passed { "PASS" } else { "FAIL" }, t.elapsed(), v.detail);
    };
    report(1, "base cases", &mut base_cases);
    report(2, "folding lemma", &mut folding_lemma);
    report(3, "pipeline", &mut || pipeline(&mut covs));
    report(4, "sign regression", &mut || sign_regression(&covs));
    report(5, "interior map", &mut interior_map);
    report(6, "consistency", &mut consistency);
    report(7, "determinism", &mut determinism);
    if !all {
        std::process::exit(1);
    }
}
