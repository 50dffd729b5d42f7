use approx::assert_relative_eq;
use littlewood::{mixed_norm, random_form, witness_a0, BilinearForm, Distribution, ExponentPair, ExtExponent, Field};
use num_complex::Complex64;
use proptest::prelude::*;

fn pair(a: f64, b: f64) -> ExponentPair {
    ExponentPair::from_values(a, b).unwrap()
}

fn e(p: f64) -> ExtExponent {
    ExtExponent::new(p).unwrap()
}

// naive oracle straight from the definition
fn oracle(form: &BilinearForm, a: f64, b: f64) -> f64 {
    let inner = |k: usize| -> f64 {
        let row = form.row(k).iter().map(|z| z.norm());
        if a.is_infinite() {
            row.fold(0.0, f64::max)
        } else {
            row.map(|x| x.powf(a)).sum::<f64>().powf(1.0 / a)
        }
    };
    let rows = (0..form.rows()).map(inner);
    if b.is_infinite() {
        rows.fold(0.0, f64::max)
    } else {
        rows.map(|x| x.powf(b)).sum::<f64>().powf(1.0 / b)
    }
}

fn form(field: Field) -> impl Strategy<Value = BilinearForm> {
    (1usize..=6, 1usize..=6).prop_flat_map(move |(k, n)| {
        prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), k * n).prop_map(move |v| {
            let entries = v
                .into_iter()
                .map(|(re, im)| match field {
                    Field::Real => Complex64::new(re, 0.0),
                    Field::Complex => Complex64::new(re, im),
                })
                .collect();
            BilinearForm::new(field, k, n, entries).unwrap()
        })
    })
}

fn any_form() -> impl Strategy<Value = BilinearForm> {
    prop_oneof![form(Field::Real), form(Field::Complex)]
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(f64::INFINITY),
        1 => Just(1.0),
        6 => 1.0..20.0f64,
    ]
}

#[test]
fn witness_values() {
    let a0 = witness_a0(Field::Real);
    assert_eq!(a0.real_entries(), vec![1.0, 1.0, 1.0, -1.0]);
    // each row has inner norm 2^(3/4); the outer sum gives 2^(3/2)
    let want = (2.0 * 2f64.powf(0.75 * 4.0 / 3.0)).powf(0.75);
    assert_relative_eq!(want, 2f64.powf(1.5), max_relative = 1e-15);
    assert_relative_eq!(mixed_norm(&a0, pair(4.0 / 3.0, 4.0 / 3.0)).value, want, max_relative = 1e-14);
    assert_eq!(mixed_norm(&a0, pair(f64::INFINITY, f64::INFINITY)).value, 1.0);
    assert_eq!(mixed_norm(&a0, pair(1.0, 1.0)).value, 4.0);
    assert_relative_eq!(mixed_norm(&a0, pair(2.0, 2.0)).value, 2.0, max_relative = 1e-15);
}

#[test]
fn json_round_trip_and_errors() {
    for field in [Field::Real, Field::Complex] {
        let f = random_form(field, 3, 4, Distribution::Gaussian, 7).unwrap();
        let text = f.to_json().unwrap();
        let back = BilinearForm::from_json(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_json().unwrap(), text);
    }
    let bare = r#"{"field":"real","rows":1,"cols":2,"entries":[1.5,-2]}"#;
    assert_eq!(BilinearForm::from_json(bare).unwrap().real_entries(), vec![1.5, -2.0]);
    let short = r#"{"field":"real","rows":2,"cols":2,"entries":[1,2,3]}"#;
    assert!(BilinearForm::from_json(short).is_err());
    let mixed = r#"{"field":"real","rows":1,"cols":1,"entries":[[1,2]]}"#;
    assert!(BilinearForm::from_json(mixed).is_err());
}

#[test]
fn random_forms_are_seeded() {
    let x = random_form(Field::Complex, 4, 4, Distribution::Sign, 3).unwrap();
    assert_eq!(x, random_form(Field::Complex, 4, 4, Distribution::Sign, 3).unwrap());
    assert_ne!(x, random_form(Field::Complex, 4, 4, Distribution::Sign, 4).unwrap());
    assert!(x.entries().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    let s = random_form(Field::Real, 8, 8, Distribution::SparseSign, 3).unwrap();
    assert!(s.entries().iter().all(|z| z.im == 0.0 && [0.0, 1.0].contains(&z.norm())));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_naive_oracle(f in any_form(), a in exponent(), b in exponent()) {
        let got = mixed_norm(&f, ExponentPair::new(e(a), e(b))).value;
        let want = oracle(&f, a, b);
        prop_assert!((got - want).abs() <= 1e-12 * want.max(1e-300), "{got} vs {want}");
    }

    #[test]
    fn decreasing_in_each_exponent(f in any_form(), a in exponent(), b in exponent(), s in exponent(), t in exponent()) {
        let (a1, a2) = if a <= s { (a, s) } else { (s, a) };
        let (b1, b2) = if b <= t { (b, t) } else { (t, b) };
        let n = |x: f64, y: f64| mixed_norm(&f, ExponentPair::new(e(x), e(y))).value;
        let tol = 1e-12 * n(1.0, 1.0);
        prop_assert!(n(a2, b1) <= n(a1, b1) + tol);
        prop_assert!(n(a1, b2) <= n(a1, b1) + tol);
    }

    #[test]
    fn minkowski_transpose(f in any_form(), a in exponent(), b in exponent()) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let lhs = mixed_norm(&f, ExponentPair::new(e(a), e(b))).value;
        let rhs = mixed_norm(&f.transpose(), ExponentPair::new(e(b), e(a))).value;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn equal_exponents_ignore_transposition(f in any_form(), p in exponent()) {
        let x = mixed_norm(&f, ExponentPair::new(e(p), e(p))).value;
        let y = mixed_norm(&f.transpose(), ExponentPair::new(e(p), e(p))).value;
        prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300));
    }

    #[test]
    fn interpolation_between_corners(f in any_form(), inv_a in 0.0..=0.5f64, s in 0.0..=1.0f64) {
        // a in [2, inf], a* its conjugate, b between 1 and a*
        let a = ExtExponent::from_reciprocal(inv_a).unwrap();
        let ac = a.conjugate();
        let n = |x: ExtExponent, y: ExtExponent| mixed_norm(&f, ExponentPair::new(x, y)).value;
        let theta0 = 1.0 - 2.0 * inv_a;
        let bound0 = n(ExtExponent::INFINITY, ExtExponent::ONE).powf(theta0) * n(e(2.0), e(2.0)).powf(1.0 - theta0);
        prop_assert!(n(a, ac) <= bound0 * (1.0 + 1e-12));

        prop_assume!(inv_a > 0.0);
        let inv_b = 1.0 - s * inv_a; // from 1 (b = 1) down to 1 - 1/a (b = a*)
        let b = ExtExponent::from_reciprocal(inv_b).unwrap();
        let theta1 = 1.0 - a.value() * (1.0 - inv_b);
        let bound1 = n(a, ExtExponent::ONE).powf(theta1) * n(a, ac).powf(1.0 - theta1);
        prop_assert!(n(a, b) <= bound1 * (1.0 + 1e-12));
    }

    #[test]
    fn homogeneous(f in any_form(), a in exponent(), b in exponent(), re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let c = match f.field() {
            Field::Real => Complex64::new(re, 0.0),
            Field::Complex => Complex64::new(re, im),
        };
        let p = ExponentPair::new(e(a), e(b));
        let x = mixed_norm(&f.scaled(c), p).value;
        let y = c.norm() * mixed_norm(&f, p).value;
        prop_assert!((x - y).abs() <= 1e-12 * y.max(1e-300));
    }

    #[test]
    fn survives_extreme_magnitudes(f in form(Field::Real), a in exponent(), b in exponent(), k in -250i32..250) {
        let scale = 10f64.powi(k);
        let p = ExponentPair::new(e(a), e(b));
        let x = mixed_norm(&f.scaled(Complex64::new(scale, 0.0)), p).value;
        let y = scale * mixed_norm(&f, p).value;
        prop_assert!(x.is_finite());
        prop_assert!((x - y).abs() <= 1e-12 * y.max(1e-300));
    }
}
