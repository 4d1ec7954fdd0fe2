use polyfold::catalog;
use polyfold::folding::{build_fold_map, certify_fiber, FoldSpec, PsiSign};
use polyfold::geometry::LineFunctional;
use polyfold::verify::{fiber_abscissae, SamplePlan, Scheme};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_fold(seed: u64) -> FoldSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let curtain = catalog::random_curtain(&mut rng);
    let interval = catalog::random_interval(&mut rng);
    let family = curtain.functionals().iter().map(LineFunctional::to_poly).collect();
    build_fold_map(&curtain.to_set(), family, interval, PsiSign::Lemma).expect("random curtains fold")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_fiber_is_certified(seed in any::<u64>()) {
        let spec = random_fold(seed);
        for r in fiber_abscissae(&spec, 8, seed) {
            prop_assert!(certify_fiber(&spec, &r).is_ok(), "r = {r}");
        }
    }

    #[test]
    fn fold_lands_in_declared_image(seed in any::<u64>()) {
        let spec = random_fold(seed);
        let image = spec.declared_image();
        let plan = SamplePlan::new(seed, 64, Scheme::HeavyTailed);
        let mut rng = plan.rng(0);
        for _ in 0..64 {
            let Some(p) = plan.point_in_set(&mut rng, &spec.domain) else { continue };
            let z = [p.x.clone(), spec.apply(&p.x, &p.y)];
            prop_assert!(image.contains(&z), "{p:?} -> {z:?}");
        }
    }

    #[test]
    fn fold_fixes_fibers_outside_interval(seed in any::<u64>()) {
        let spec = random_fold(seed);
        for r in fiber_abscissae(&spec, 8, seed) {
            if spec.interval.contains(&r) {
                continue;
            }
            let s = spec.domain.fiber(&r).and_then(|f| f.lo).expect("ray fiber");
            prop_assert_eq!(spec.apply(&r, &s), s);
        }
    }
}

#[test]
fn flipped_sign_fails_some_certificate() {
    let failing = (0..40u64).filter(|&seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curtain = catalog::random_curtain(&mut rng);
        let interval = catalog::random_interval(&mut rng);
        let family = curtain.functionals().iter().map(LineFunctional::to_poly).collect();
        let spec = build_fold_map(&curtain.to_set(), family, interval, PsiSign::Flipped).expect("builds");
        fiber_abscissae(&spec, 8, seed).iter().any(|r| certify_fiber(&spec, r).is_err())
    });
    assert!(failing.count() > 0);
}
