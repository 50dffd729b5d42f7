use std::f64::consts::{PI, SQRT_2};

use approx::assert_relative_eq;
use littlewood::exponents::{FOUR_OVER_PI, TWO_OVER_SQRT_PI};
use littlewood::khinchin::{
    blei_bound_check, blei_ceiling, circle_mean, e_m_average, em_convergence, khinchin_ratio,
    rademacher_average, rotation_invariance_check, steinhaus_expectation, SteinhausMethod,
};
use littlewood::{CoefficientVector, Error, ExtExponent};
use num_complex::Complex64;
use proptest::prelude::*;

fn e(p: f64) -> ExtExponent {
    ExtExponent::new(p).unwrap()
}

// all 2^N sign patterns
fn rademacher_oracle(a: &[Complex64]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for mask in 0u32..(1 << n) {
        let z: Complex64 = (0..n)
            .map(|j| if mask >> j & 1 == 1 { -a[j] } else { a[j] })
            .sum();
        s += z.norm();
    }
    s / (1u64 << n) as f64
}

// all M^N grid points
fn e_m_oracle(a: &[Complex64], m: usize) -> f64 {
    let n = a.len();
    let total = m.pow(n as u32);
    let mut s = 0.0;
    for idx in 0..total {
        let mut rest = idx;
        let z: Complex64 = a
            .iter()
            .map(|&x| {
                let d = rest % m;
                rest /= m;
                x * Complex64::from_polar(1.0, 2.0 * PI * d as f64 / m as f64)
            })
            .sum();
        s += z.norm();
    }
    s / total as f64
}

fn real_vec(max_len: usize) -> impl Strategy<Value = CoefficientVector> {
    prop::collection::vec(-5.0..5.0f64, 1..=max_len)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x != 0.0))
        .prop_map(|v| CoefficientVector::from_real(&v).unwrap())
}

fn complex_vec(max_len: usize) -> impl Strategy<Value = CoefficientVector> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..=max_len)
        .prop_filter("nonzero", |v| v.iter().any(|&(x, y)| x != 0.0 || y != 0.0))
        .prop_map(|v| CoefficientVector::from_complex(v.into_iter().map(|(x, y)| Complex64::new(x, y)).collect()).unwrap())
}

fn r_exponent() -> impl Strategy<Value = ExtExponent> {
    prop_oneof![
        1 => Just(ExtExponent::INFINITY),
        1 => Just(ExtExponent::TWO),
        4 => (0.0..0.5f64).prop_map(|inv| ExtExponent::from_reciprocal(inv).unwrap()),
    ]
}

#[test]
fn closed_form_examples() {
    let ones = CoefficientVector::from_real(&[1.0, 1.0]).unwrap();
    assert_eq!(rademacher_average(&ones).unwrap().value, 1.0);
    assert_relative_eq!(khinchin_ratio(&ones, e(2.0)).unwrap(), SQRT_2, max_relative = 1e-15);
    for r in [2.0, 2.5, 3.0, 4.0, f64::INFINITY] {
        let want = 2f64.powf(1.0 / r);
        assert!((khinchin_ratio(&ones, e(r)).unwrap() - want).abs() <= 1e-12);
    }
    // (1 + sqrt 2) / 2
    assert_relative_eq!(e_m_average(&ones, 4).unwrap().value, (1.0 + SQRT_2) / 2.0, max_relative = 1e-14);
    // 1/2 (|1 + 1| + |1 - 1|) averaged with the cube roots: (2 + 1 + 1) / 3
    assert_relative_eq!(e_m_average(&ones, 3).unwrap().value, 4.0 / 3.0, max_relative = 1e-14);

    let q = steinhaus_expectation(&ones, &SteinhausMethod::Quadrature { nodes: 256 }).unwrap();
    assert!((q.value - FOUR_OVER_PI).abs() < 1e-8);
    let b = steinhaus_expectation(&ones, &SteinhausMethod::BesselTransform).unwrap();
    assert!((b.value - FOUR_OVER_PI).abs() < 1e-12);
    let l = steinhaus_expectation(&ones, &SteinhausMethod::EmLimit { schedule: vec![64, 128, 256, 512] }).unwrap();
    assert!((l.value - FOUR_OVER_PI).abs() < 1e-4);

    assert_eq!(blei_ceiling(2, e(2.0)).unwrap(), SQRT_2);
    let report = blei_bound_check(&ones, 2, e(2.0)).unwrap();
    assert!(!report.violated);
    assert_relative_eq!(report.ratio, report.ceiling, max_relative = 1e-14);
}

#[test]
fn steinhaus_quadrature_converges_fast() {
    // three equal terms: compare against the Bessel transform
    let c = CoefficientVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
    let reference = steinhaus_expectation(&c, &SteinhausMethod::BesselTransform).unwrap();
    assert!(reference.error_bound.unwrap() < 1e-9);
    let q = steinhaus_expectation(&c, &SteinhausMethod::Quadrature { nodes: 512 }).unwrap();
    assert!((q.value - reference.value).abs() < 1e-8, "{} vs {}", q.value, reference.value);
}

#[test]
fn convergence_report() {
    let ones = CoefficientVector::from_real(&[1.0, 1.0]).unwrap();
    let r = em_convergence(&ones, &[4, 8, 16, 32, 64], FOUR_OVER_PI).unwrap();
    assert_eq!(r.gaps.len(), 5);
    assert!(r.gaps.last().unwrap().1 < r.gaps[0].1);
}

#[test]
fn invalid_inputs() {
    let zero = CoefficientVector::from_real(&[0.0, 0.0]).unwrap();
    assert!(matches!(khinchin_ratio(&zero, e(2.0)), Err(Error::UndefinedRatio(_))));
    let ones = CoefficientVector::from_real(&[1.0, 1.0]).unwrap();
    assert!(khinchin_ratio(&ones, e(1.5)).is_err());
    assert!(e_m_average(&ones, 1).is_err());
    assert!(rotation_invariance_check(&ones, 4, &[0.3, 0.0]).is_err());
    let long = CoefficientVector::from_real(&[1.0; 31]).unwrap();
    assert!(matches!(rademacher_average(&long), Err(Error::Capacity { .. })));
}

#[test]
fn circle_mean_matches_simpson() {
    for (u, v) in [(1.0, 0.3), (2.0, 0.5), (0.1, 3.0), (1.0, 0.0), (0.0, 2.0)] {
        // smooth integrand when u != v: composite Simpson
        let n = 2000;
        let h = 2.0 * PI / n as f64;
        let f = |t: f64| (Complex64::new(u, 0.0) + Complex64::from_polar(v, t)).norm();
        let mut s = f(0.0) + f(2.0 * PI);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let want = s * h / 3.0 / (2.0 * PI);
        assert!((circle_mean(u, v) - want).abs() < 1e-12, "({u}, {v})");
    }
    assert_relative_eq!(circle_mean(1.0, 1.0), FOUR_OVER_PI, max_relative = 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rademacher_matches_oracle(c in complex_vec(10)) {
        let got = rademacher_average(&c).unwrap().value;
        let want = rademacher_oracle(c.values());
        prop_assert!((got - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn e_m_matches_oracle(c in complex_vec(4), m in 2usize..=6) {
        let got = e_m_average(&c, m).unwrap().value;
        let want = e_m_oracle(c.values(), m);
        prop_assert!((got - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn e_2_is_the_rademacher_average(c in real_vec(12)) {
        let x = e_m_average(&c, 2).unwrap().value;
        let y = rademacher_average(&c).unwrap().value;
        prop_assert!((x - y).abs() <= 1e-14 * y);
    }

    #[test]
    fn grid_rotations_leave_e_m_unchanged(c in complex_vec(4), m in 3usize..=8, js in prop::collection::vec(0usize..8, 4)) {
        let shifts: Vec<f64> = js[..c.len()].iter().map(|&j| 2.0 * PI * (j % m) as f64 / m as f64).collect();
        prop_assert!(rotation_invariance_check(&c, m, &shifts).unwrap());
    }

    #[test]
    fn rademacher_ratio_below_ceiling(c in real_vec(12), r in r_exponent()) {
        let ratio = khinchin_ratio(&c, r).unwrap();
        prop_assert!(ratio <= r.reciprocal().exp2() + 1e-12);
    }

    #[test]
    fn blei_ratio_below_ceiling(c in complex_vec(4), m in 3usize..=8, r in r_exponent()) {
        let report = blei_bound_check(&c, m, r).unwrap();
        prop_assert!(!report.violated, "{report:?}");
    }

    #[test]
    fn averages_are_homogeneous(c in complex_vec(5), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        prop_assume!(re != 0.0 || im != 0.0);
        let lambda = Complex64::new(re, im);
        let s = c.scaled(lambda);
        let n = lambda.norm();
        let x = rademacher_average(&s).unwrap().value;
        prop_assert!((x - n * rademacher_average(&c).unwrap().value).abs() <= 1e-12 * x);
        let y = e_m_average(&s, 5).unwrap().value;
        prop_assert!((y - n * e_m_average(&c, 5).unwrap().value).abs() <= 1e-12 * y);
        let z = steinhaus_expectation(&s, &SteinhausMethod::BesselTransform).unwrap().value;
        let w = steinhaus_expectation(&c, &SteinhausMethod::BesselTransform).unwrap().value;
        prop_assert!((z - n * w).abs() <= 1e-9 * z);
    }

    #[test]
    fn steinhaus_methods_agree(c in complex_vec(4)) {
        // the trapezoid dimensions converge only like h^2 log h when the
        // kernel's kink |s| = min |a_n| is crossed
        let q = steinhaus_expectation(&c, &SteinhausMethod::Quadrature { nodes: 128 }).unwrap().value;
        let b = steinhaus_expectation(&c, &SteinhausMethod::BesselTransform).unwrap().value;
        prop_assert!((q - b).abs() <= 1e-5 * b, "{q} vs {b}");
    }

    #[test]
    fn steinhaus_ratio_below_two_over_sqrt_pi(c in complex_vec(6)) {
        let avg = steinhaus_expectation(&c, &SteinhausMethod::BesselTransform).unwrap().value;
        prop_assert!(c.lr_norm(ExtExponent::TWO) / avg <= TWO_OVER_SQRT_PI + 1e-9);
        // and at least the largest modulus
        let max = c.magnitudes().into_iter().fold(0.0, f64::max);
        prop_assert!(avg >= max * (1.0 - 1e-9));
    }
}
