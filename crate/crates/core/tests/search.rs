use std::f64::consts::{PI, SQRT_2};

use littlewood::exponents::TWO_OVER_SQRT_PI;
use littlewood::khinchin::SteinhausMethod;
use littlewood::search::{
    checkpoint_load, checkpoint_save, dimension_sweep, maximize_khinchin_ratio, maximize_ratio, reevaluate,
    KhinchinModel, SearchConfig, SearchResult, Witness,
};
use littlewood::{Error, ExponentPair, ExtExponent, Field};
use proptest::prelude::*;

fn pair(a: f64, b: f64) -> ExponentPair {
    ExponentPair::from_values(a, b).unwrap()
}

fn small(seed: u64, dims: (usize, usize)) -> SearchConfig {
    SearchConfig {
        restarts: 3,
        steps: 30,
        seed,
        dims,
        ..SearchConfig::default()
    }
}

#[test]
fn complex_search_respects_the_sharp_ceiling() {
    let cfg = SearchConfig {
        restarts: 4,
        steps: 60,
        seed: 11,
        dims: (3, 3),
        grid_m: 16,
        ..SearchConfig::default()
    };
    let res = maximize_ratio(Field::Complex, pair(1.0, 2.0), &cfg).unwrap();
    assert_eq!(res.ceiling, TWO_OVER_SQRT_PI);
    assert!(res.best_ratio <= TWO_OVER_SQRT_PI + 1e-6, "{}", res.best_ratio);
    let pessimistic = res.pessimistic_ratio.unwrap();
    assert!(pessimistic <= res.best_ratio);
    assert!(res.ceiling_provenance.contains("lower"));
}

#[test]
fn steinhaus_search_brackets() {
    let cfg = SearchConfig {
        restarts: 3,
        steps: 60,
        seed: 4,
        ..SearchConfig::default()
    };
    let model = KhinchinModel::Steinhaus {
        method: SteinhausMethod::BesselTransform,
    };
    let res = maximize_khinchin_ratio(model, ExtExponent::TWO, 6, &cfg).unwrap();
    assert!(res.best_ratio <= TWO_OVER_SQRT_PI + 1e-6);
    assert!(res.best_ratio >= PI * SQRT_2 / 4.0 - 1e-6, "{}", res.best_ratio);
}

#[test]
fn e_m_search_uses_the_grid_ceiling() {
    let res = maximize_khinchin_ratio(KhinchinModel::Em { m: 4 }, ExtExponent::TWO, 3, &small(2, (1, 1))).unwrap();
    assert!(!res.violates_ceiling());
    assert!(matches!(res.witness, Witness::Coefficients(ref c) if c.len() == 3 && c.field() == Field::Complex));
    let real = maximize_khinchin_ratio(KhinchinModel::Em { m: 2 }, ExtExponent::TWO, 3, &small(2, (1, 1))).unwrap();
    assert!(matches!(real.witness, Witness::Coefficients(ref c) if c.field() == Field::Real));
    assert!((real.ceiling - SQRT_2).abs() < 1e-15);
}

#[test]
fn sweep_covers_every_shape() {
    let results = dimension_sweep(Field::Real, pair(1.5, 1.5), &small(0, (1, 1)), (2, 3)).unwrap();
    let dims: Vec<_> = results.iter().map(|r| r.config.dims).collect();
    assert_eq!(dims, vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]);
    // a single entry has ratio exactly 1
    assert_eq!(results[0].best_ratio, 1.0);
    assert!(results.iter().all(|r| !r.violates_ceiling()));
}

#[test]
fn improvement_log_is_increasing() {
    let res = maximize_ratio(Field::Real, pair(4.0 / 3.0, 4.0 / 3.0), &small(3, (3, 3))).unwrap();
    assert!(!res.improved_at.is_empty());
    assert_eq!(res.restarts_run, 3);
    assert!(res.improved_at.iter().all(|&(r, s)| r < 3 && s <= 30));
}

#[test]
fn checkpoint_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    for field in [Field::Real, Field::Complex] {
        let res = maximize_ratio(field, pair(1.5, 2.0), &small(8, (2, 3))).unwrap();
        checkpoint_save(&res, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        let back = checkpoint_load(&path).unwrap();
        assert_eq!(back, res);
        checkpoint_save(&back, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }
    let text = std::fs::read_to_string(&path).unwrap();
    for cut in [1, text.len() / 3, text.len() - 3] {
        std::fs::write(&path, &text[..cut]).unwrap();
        assert!(matches!(checkpoint_load(&path), Err(Error::Parse { .. })));
    }
    let wrong = text.replacen("\"restarts\": 3", "\"restarts\": \"three\"", 1);
    match SearchResult::from_json(&wrong) {
        Err(Error::Parse { field, .. }) => assert_eq!(field, "config.restarts"),
        other => panic!("{other:?}"),
    }
    assert!(checkpoint_load(&dir.path().join("missing.json")).is_err());
}

#[test]
fn invalid_configurations() {
    let mut cfg = small(0, (2, 2));
    cfg.scale = 0.0;
    assert!(maximize_ratio(Field::Real, pair(2.0, 2.0), &cfg).is_err());
    cfg = small(0, (0, 2));
    assert!(maximize_ratio(Field::Real, pair(2.0, 2.0), &cfg).is_err());
    assert!(matches!(
        maximize_ratio(Field::Real, pair(1.0, 1.2), &small(0, (2, 2))),
        Err(Error::Inadmissible { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn deterministic_and_reproducible(seed in any::<u64>(), inv_a in 0.0..=1.0f64, inv_b in 0.0..=1.0f64, complex in any::<bool>()) {
        let p = ExponentPair::new(
            ExtExponent::from_reciprocal(inv_a).unwrap(),
            ExtExponent::from_reciprocal(inv_b).unwrap(),
        );
        prop_assume!(p.is_admissible());
        let field = if complex { Field::Complex } else { Field::Real };
        let cfg = small(seed, (2, 3));
        let x = maximize_ratio(field, p, &cfg).unwrap();
        let y = maximize_ratio(field, p, &cfg).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert!(!x.violates_ceiling());
        prop_assert_eq!(x.scale_check_failures, 0);
        // the stored witness reproduces the ratio
        let again = reevaluate(&x).unwrap();
        prop_assert!((again - x.best_ratio).abs() <= 1e-12 * x.best_ratio);
        let back = SearchResult::from_json(&x.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn rademacher_search_never_exceeds_ceiling(seed in any::<u64>(), inv_r in 0.0..=0.5f64, n in 1usize..=8) {
        let r = ExtExponent::from_reciprocal(inv_r).unwrap();
        let res = maximize_khinchin_ratio(KhinchinModel::Rademacher, r, n, &small(seed, (1, 1))).unwrap();
        prop_assert!(res.best_ratio <= res.ceiling + 1e-12);
        let again = reevaluate(&res).unwrap();
        prop_assert!((again - res.best_ratio).abs() <= 1e-12 * res.best_ratio);
    }
}
