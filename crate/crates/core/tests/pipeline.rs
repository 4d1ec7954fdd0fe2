use polyfold::catalog;
use polyfold::folding::PsiSign;
use polyfold::geometry::Region;
use polyfold::pipeline::{build_interior_map, build_v_polygon_map, stage_count, BuildOptions, StagedMap};
use polyfold::rational::{self, Scalar};
use polyfold::verify::{check_chained_stages, check_coverage, PreciseMap, Pullback, SamplePlan, Window};
use proptest::prelude::*;
use rug::Float;

fn lemma() -> BuildOptions {
    BuildOptions { step4_sign: PsiSign::Lemma }
}

fn small_rational() -> impl Strategy<Value = Scalar> {
    (-60i64..=60, 1i64..=12).prop_map(|(n, d)| rational::ratio(n, d))
}

#[test]
fn stage_counts_follow_edge_count() {
    for n in 3..=5 {
        let map = build_v_polygon_map(&catalog::polygon(n), lemma()).unwrap();
        assert_eq!(map.stages.len(), stage_count(n));
    }
}

#[test]
fn json_round_trip_preserves_maps() {
    for n in 1..=4 {
        let map = build_v_polygon_map(&catalog::polygon(n), lemma()).unwrap();
        let back: StagedMap = serde_json::from_str(&serde_json::to_string(&map).unwrap()).unwrap();
        assert_eq!(back, map);
    }
}

#[test]
fn chained_stages_hold_for_catalog() {
    for n in 1..=3 {
        let map = build_v_polygon_map(&catalog::polygon(n), lemma()).unwrap();
        let rep = check_chained_stages(&map, &SamplePlan::heavy(n as u64, 500));
        assert!(rep.passed(), "n={n}: {:?}", rep.counterexample);
    }
}

#[test]
fn coverage_report_is_deterministic() {
    let p = catalog::polygon(2);
    let map = build_v_polygon_map(&p, lemma()).unwrap();
    let w = Window::new(catalog::window_around(&p, 5)).unwrap();
    let target = Region::single(p.to_set());
    let plan = SamplePlan::heavy(3, 20_000);
    let a = check_coverage(&map, &target, &w, 40, &plan);
    let b = check_coverage(&map, &target, &w, 40, &plan);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.hit_fraction >= 0.99);
}

#[test]
fn pullback_inverts_catalog_three() {
    let p = catalog::polygon(3);
    let map = build_v_polygon_map(&p, lemma()).unwrap();
    let back = Pullback::new(&map);
    let forward = PreciseMap::new(&map);
    let prec = 512;
    for (x, y) in [(0.5, 1.5), (3.0, 4.0), (-0.5, 2.7), (1.2, 0.3)] {
        let z = [Float::with_val(prec, x), Float::with_val(prec, y)];
        let pre = back.preimage(&z, prec).unwrap_or_else(|| panic!("no preimage of ({x}, {y})"));
        let img = forward.eval(&pre, prec);
        assert!((img[0].to_f64() - x).abs() < 1e-9 && (img[1].to_f64() - y).abs() < 1e-9, "({x}, {y}) -> {img:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn catalog_images_lie_in_polygon(n in 1usize..=3, x in small_rational(), y in small_rational()) {
        let p = catalog::polygon(n);
        let map = build_v_polygon_map(&p, lemma()).unwrap();
        let z = map.eval(&[x, y]);
        prop_assert!(p.to_set().contains_xy(&z[0], &z[1]));
    }

    #[test]
    fn exact_engines_agree(n in 1usize..=3, x in small_rational(), y in small_rational()) {
        let map = build_v_polygon_map(&catalog::polygon(n), lemma()).unwrap();
        let p = [x, y];
        prop_assert_eq!(PreciseMap::new(&map).eval_exact(&p), map.eval(&p));
    }

    #[test]
    fn interior_images_are_strict(x in small_rational(), y in small_rational(), z in small_rational()) {
        let p = catalog::polygon(2);
        let map = build_interior_map(&p, lemma()).unwrap();
        let img = map.eval(&[x, y, z]);
        prop_assert!(p.to_set().interior().contains_xy(&img[0], &img[1]));
    }
}
