//! The acceptance checks, runnable as a suite.
//!
//! Every check reports a margin: the smallest slack over all samples between
//! an observed quantity and the bound it must respect, with the tolerance
//! already folded in. A check passes iff its margin is `>= 0`. The report
//! holds no timings, so a fixed seed gives a byte-identical report.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exponents::{
    classify_region, real_constant, ExponentPair, ExtExponent, RegionLabel, FOUR_OVER_PI,
    TWO_OVER_SQRT_PI,
};
use crate::forms::{mixed_norm, random_form_with, random_scalar, witness_a0, BilinearForm, Distribution};
use crate::khinchin::{
    blei_ceiling, e_m_average, rademacher_average, steinhaus_expectation, CoefficientVector,
    SteinhausMethod,
};
use crate::opnorm::{complex_norm_bounds, complex_norm_discrete, r_m, real_sup_norm};
use crate::search::{maximize_khinchin_ratio, maximize_ratio, KhinchinModel, SearchConfig, SearchResult, Witness};
use crate::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Reduced sample counts; finishes in well under a minute.
    Fast,
    /// Sample counts as stated in each check's description.
    Full,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            _ => Err(Error::parse("suite", format!("expected `fast` or `full`, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub seed: u64,
    /// Multiplies every ceiling and target value. Anything other than 1 is
    /// fault injection: the affected checks must fail.
    pub ceiling_scale: f64,
}

impl VerifyConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        VerifyConfig {
            suite,
            seed,
            ceiling_scale: 1.0,
        }
    }

    fn count(&self, full: usize, fast: usize) -> usize {
        match self.suite {
            Suite::Full => full,
            Suite::Fast => fast,
        }
    }

    fn rng(&self, check: u64, sample: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (check << 56));
        rng.set_stream(sample as u64);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub samples: usize,
    /// Where the margin was attained.
    pub details: String,
    /// The sample attaining the margin, serialized when the check fails.
    pub witness: Option<Value>,
    /// Extra observations that are reported but not judged.
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub ceiling_scale: f64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    pub fn failed(&self) -> Vec<&CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

pub const CHECK_NAMES: [&str; 10] = [
    "witness-sharpness",
    "real-upper-bound",
    "structural-inequalities",
    "search-recovers-sqrt2",
    "rademacher-khinchin",
    "steinhaus-closed-form",
    "torus-sandwich",
    "blei-khinchin",
    "steinhaus-sharp-point",
    "determinism-round-trips",
];

struct Sample {
    margin: f64,
    label: String,
    witness: Value,
}

impl Sample {
    fn new(margin: f64, label: impl Into<String>, witness: Value) -> Self {
        Sample {
            margin,
            label: label.into(),
            witness,
        }
    }
}

// NaN counts as the worst possible margin
fn worse(x: f64, than: f64) -> bool {
    x.is_nan() || x < than
}

struct Tally {
    id: u32,
    worst: Option<Sample>,
    samples: usize,
    notes: Vec<String>,
}

impl Tally {
    fn new(id: u32) -> Self {
        Tally {
            id,
            worst: None,
            samples: 0,
            notes: Vec::new(),
        }
    }

    fn add(&mut self, s: Sample) {
        self.samples += 1;
        if self.worst.as_ref().is_none_or(|w| worse(s.margin, w.margin)) {
            self.worst = Some(s);
        }
    }

    fn extend(&mut self, samples: Vec<Sample>) {
        for s in samples {
            self.add(s);
        }
    }

    fn finish(self) -> CheckOutcome {
        let name = CHECK_NAMES[self.id as usize - 1].to_string();
        let Some(worst) = self.worst else {
            return CheckOutcome {
                id: self.id,
                name,
                passed: false,
                margin: -1.0,
                samples: 0,
                details: "no samples evaluated".into(),
                witness: None,
                notes: self.notes,
            };
        };
        let passed = worst.margin >= 0.0;
        let (margin, details) = if worst.margin.is_finite() {
            (worst.margin, worst.label)
        } else {
            (-f64::MAX, format!("non-finite margin {}: {}", worst.margin, worst.label))
        };
        CheckOutcome {
            id: self.id,
            name,
            passed,
            margin,
            samples: self.samples,
            details,
            witness: (!passed).then_some(worst.witness),
            notes: self.notes,
        }
    }
}

fn parallel<F>(n: usize, f: F) -> Result<Vec<Sample>>
where
    F: Fn(usize) -> Result<Sample> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

fn form_value(form: &BilinearForm) -> Value {
    serde_json::to_value(form).expect("forms serialize")
}

fn coeff_value(c: &CoefficientVector) -> Value {
    let entries: Vec<[f64; 2]> = c.values().iter().map(|z| [z.re, z.im]).collect();
    json!({ "field": c.field(), "coefficients": entries })
}

fn witness_value(w: &Witness) -> Value {
    match w {
        Witness::Form(f) => form_value(f),
        Witness::Coefficients(c) => coeff_value(c),
    }
}

fn pair(a: f64, b: f64) -> ExponentPair {
    ExponentPair::from_values(a, b).expect("valid exponents")
}

fn exponent(p: f64) -> ExtExponent {
    ExtExponent::new(p).expect("valid exponent")
}

/// Admissible points of the 20 x 20 grid `(1/a, 1/b) = (i/19, j/19)`.
pub fn acceptance_grid() -> Vec<ExponentPair> {
    let mut out = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            let a = ExtExponent::from_reciprocal(i as f64 / 19.0).expect("in [0, 1]");
            let b = ExtExponent::from_reciprocal(j as f64 / 19.0).expect("in [0, 1]");
            let p = ExponentPair::new(a, b);
            if p.is_admissible() {
                out.push(p);
            }
        }
    }
    out
}

fn deficiency_power(p: ExponentPair) -> f64 {
    p.deficiency().exp2()
}

fn check_witness_sharpness(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(1);
    let a0 = witness_a0(Field::Real);
    let a0_norm = real_sup_norm(&a0)?;
    let e11 = BilinearForm::single_entry(Field::Real, 2, 2)?;
    let e11_norm = real_sup_norm(&e11)?;
    let mut regions = std::collections::BTreeSet::new();
    for p in acceptance_grid() {
        let region = classify_region(p);
        regions.insert(region.as_str());
        let target = deficiency_power(p) * cfg.ceiling_scale;
        let ratio = mixed_norm(&a0, p).value / a0_norm;
        tally.add(Sample::new(
            1e-12 - (ratio - target).abs() / target,
            format!("A0 at {p} ({region}): ratio {ratio:.17e}, target {target:.17e}"),
            json!({ "pair": p, "form": form_value(&a0) }),
        ));
        if region == RegionLabel::RII {
            let ceiling = real_constant(p)?.upper * cfg.ceiling_scale;
            let single = mixed_norm(&e11, p).value / e11_norm;
            tally.add(Sample::new(
                1e-12 - (ceiling - 1.0).abs().max((single - ceiling).abs()),
                format!("{p} (RII): ceiling {ceiling:.17e}, single-entry ratio {single:.17e}"),
                json!({ "pair": p, "form": form_value(&e11) }),
            ));
        }
    }
    for needed in ["RI", "RII", "RIII", "RIV"] {
        if !regions.contains(needed) {
            tally.add(Sample::new(-1.0, format!("grid misses region {needed}"), Value::Null));
        }
    }
    Ok(tally.finish())
}

fn check_real_upper_bound(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(2);
    let grid = acceptance_grid();
    let ceilings: Vec<f64> = grid
        .iter()
        .map(|&p| Ok(real_constant(p)?.upper * cfg.ceiling_scale))
        .collect::<Result<_>>()?;
    let per_cell = cfg.count(1000, 200);
    let mut cell = 0u64;
    for &n in &[2usize, 4, 8, 12] {
        for dist in [Distribution::Gaussian, Distribution::Sign] {
            let check = 2 + (cell << 8);
            cell += 1;
            tally.extend(parallel(per_cell, |i| {
                let mut rng = cfg.rng(check, i);
                let form = random_form_with(&mut rng, Field::Real, n, n, dist)?;
                let norm = real_sup_norm(&form)?;
                let (k, margin) = grid
                    .iter()
                    .zip(&ceilings)
                    .map(|(&p, &c)| c + 1e-9 - mixed_norm(&form, p).value / norm)
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (k, m)| if worse(m, acc.1) { (k, m) } else { acc });
                Ok(Sample::new(
                    margin,
                    format!("{n}x{n} {dist:?} sample {i} at {}", grid[k]),
                    json!({ "pair": grid[k], "form": form_value(&form) }),
                ))
            })?);
        }
    }
    Ok(tally.finish())
}

fn structural_margins(form: &BilinearForm, scale: f64) -> Result<Sample> {
    let norm = real_sup_norm(form)?;
    let m = |a: ExtExponent, b: ExtExponent| mixed_norm(form, ExponentPair::new(a, b)).value;
    let one = ExtExponent::ONE;
    let inf = ExtExponent::INFINITY;
    let mut cases: Vec<(f64, String)> = Vec::new();
    for a in [exponent(2.0), exponent(3.0), exponent(4.0), inf] {
        let ac = a.conjugate();
        cases.push((
            a.reciprocal().exp2() * norm * scale + 1e-9 - m(a, one),
            format!("(a, 1) norm <= 2^(1/a) ||A|| at a = {a}"),
        ));
        cases.push((
            norm * scale + 1e-9 - m(a, ac),
            format!("(a, a*) norm <= ||A|| at a = {a}"),
        ));
        let theta0 = 1.0 - 2.0 * a.reciprocal();
        cases.push((
            m(inf, one).powf(theta0) * m(exponent(2.0), exponent(2.0)).powf(1.0 - theta0) * scale
                + 1e-9
                - m(a, ac),
            format!("interpolation between (inf, 1) and (2, 2) at a = {a}"),
        ));
        if !a.is_infinite() {
            for b in [1.0, (1.0 + ac.value()) / 2.0, ac.value()] {
                let b = exponent(b);
                let theta1 = 1.0 - a.value() * (1.0 - b.reciprocal());
                cases.push((
                    m(a, one).powf(theta1) * m(a, ac).powf(1.0 - theta1) * scale + 1e-9 - m(a, b),
                    format!("interpolation between (a, 1) and (a, a*) at (a, b) = ({a}, {b})"),
                ));
            }
        }
    }
    let t = form.transpose();
    let ladder = [one, exponent(4.0 / 3.0), exponent(2.0), exponent(3.0), inf];
    for (i, &a) in ladder.iter().enumerate() {
        for &b in &ladder[i..] {
            let rhs = mixed_norm(&t, ExponentPair::new(b, a)).value;
            cases.push((
                rhs * scale + 1e-9 - m(a, b),
                format!("Minkowski transpose at (a, b) = ({a}, {b})"),
            ));
        }
    }
    let (margin, label) = cases
        .into_iter()
        .fold((f64::INFINITY, String::new()), |acc, c| if worse(c.0, acc.0) { c } else { acc });
    Ok(Sample::new(margin, label, form_value(form)))
}

fn check_structural(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(3);
    let dists = [Distribution::Gaussian, Distribution::Sign, Distribution::SparseSign];
    tally.extend(parallel(cfg.count(1000, 300), |i| {
        let mut rng = cfg.rng(3, i);
        let rows = rng.random_range(1..=8);
        let cols = rng.random_range(1..=8);
        let mut form = random_form_with(&mut rng, Field::Real, rows, cols, dists[i % 3])?;
        if form.is_zero() {
            form = BilinearForm::single_entry(Field::Real, rows, cols)?;
        }
        let mut s = structural_margins(&form, cfg.ceiling_scale)?;
        s.label = format!("sample {i} ({rows}x{cols}): {}", s.label);
        Ok(s)
    })?);
    Ok(tally.finish())
}

fn check_search_sqrt2(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(4);
    let search = SearchConfig {
        restarts: 50,
        steps: 200,
        seed: cfg.seed,
        dims: (2, 2),
        ..SearchConfig::default()
    };
    let res = maximize_ratio(Field::Real, pair(4.0 / 3.0, 4.0 / 3.0), &search)?;
    let target = SQRT_2 * cfg.ceiling_scale;
    let ceiling = res.ceiling * cfg.ceiling_scale;
    tally.add(Sample::new(
        (res.best_ratio - (target - 1e-9)).min(ceiling + 1e-9 - res.best_ratio),
        format!("best ratio {:.17e} against sqrt(2)", res.best_ratio),
        witness_value(&res.witness),
    ));
    Ok(tally.finish())
}

const KHINCHIN_RS: [f64; 5] = [2.0, 2.5, 3.0, 4.0, f64::INFINITY];

fn check_rademacher(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(5);
    let rs: Vec<ExtExponent> = KHINCHIN_RS.iter().map(|&r| exponent(r)).collect();
    let ones = CoefficientVector::from_real(&[1.0, 1.0])?;
    let ones_avg = rademacher_average(&ones)?.value;
    for &r in &rs {
        let target = r.reciprocal().exp2() * cfg.ceiling_scale;
        let ratio = ones.lr_norm(r) / ones_avg;
        tally.add(Sample::new(
            1e-12 - (ratio - target).abs(),
            format!("(1, 1) at r = {r}: ratio {ratio:.17e}"),
            coeff_value(&ones),
        ));
    }
    let dists = [Distribution::Gaussian, Distribution::Sign, Distribution::SparseSign];
    tally.extend(parallel(cfg.count(10_000, 2000), |i| {
        let mut rng = cfg.rng(5, i);
        let n = rng.random_range(1..=16);
        let mut values: Vec<Complex64> = (0..n)
            .map(|_| random_scalar(&mut rng, Field::Real, dists[i % 3]))
            .collect();
        if values.iter().all(|z| z.norm() == 0.0) {
            values[0] = Complex64::new(1.0, 0.0);
        }
        let c = CoefficientVector::new(Field::Real, values)?;
        let avg = rademacher_average(&c)?.value;
        let (k, margin) = rs
            .iter()
            .map(|&r| r.reciprocal().exp2() * cfg.ceiling_scale + 1e-12 - c.lr_norm(r) / avg)
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, m)| if worse(m, acc.1) { (k, m) } else { acc });
        Ok(Sample::new(
            margin,
            format!("random vector {i} (N = {n}) at r = {}", rs[k]),
            coeff_value(&c),
        ))
    })?);
    let search = SearchConfig {
        restarts: cfg.count(20, 5),
        steps: cfg.count(200, 60),
        seed: cfg.seed,
        ..SearchConfig::default()
    };
    for &r in &rs {
        let res = maximize_khinchin_ratio(KhinchinModel::Rademacher, r, 8, &search)?;
        tally.add(Sample::new(
            r.reciprocal().exp2() * cfg.ceiling_scale + 1e-12 - res.best_ratio,
            format!("search at r = {r}, N = 8: best {:.17e}", res.best_ratio),
            witness_value(&res.witness),
        ));
    }
    Ok(tally.finish())
}

fn random_complex_vector(rng: &mut ChaCha8Rng, n: usize) -> Result<CoefficientVector> {
    let mut values: Vec<Complex64> = (0..n)
        .map(|_| random_scalar(rng, Field::Complex, Distribution::Gaussian))
        .collect();
    if values.iter().all(|z| z.norm() == 0.0) {
        values[0] = Complex64::new(1.0, 0.0);
    }
    CoefficientVector::from_complex(values)
}

fn check_steinhaus_closed_form(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(6);
    let ones = CoefficientVector::from_complex(vec![Complex64::new(1.0, 0.0); 2])?;
    let target = FOUR_OVER_PI * cfg.ceiling_scale;
    let quad = SteinhausMethod::Quadrature { nodes: 512 };
    let limit = SteinhausMethod::EmLimit {
        schedule: vec![64, 128, 256, 512],
    };
    let q = steinhaus_expectation(&ones, &quad)?.value;
    tally.add(Sample::new(
        1e-8 - (q - target).abs(),
        format!("(1, 1) by quadrature, Q = 512: {q:.17e}"),
        coeff_value(&ones),
    ));
    let e = steinhaus_expectation(&ones, &limit)?.value;
    tally.add(Sample::new(
        1e-4 - (e - target).abs(),
        format!("(1, 1) by E_M limit, M = 512: {e:.17e}"),
        coeff_value(&ones),
    ));
    let count = cfg.count(20, 4);
    let schedule = match cfg.suite {
        Suite::Full => vec![128, 256, 512],
        Suite::Fast => vec![64, 128],
    };
    let limit = SteinhausMethod::EmLimit { schedule };
    // sequential: each E_M evaluation parallelizes internally
    for i in 0..count {
        let mut rng = cfg.rng(6, i);
        let n = 1 + i % 4;
        let c = random_complex_vector(&mut rng, n)?;
        let q = steinhaus_expectation(&c, &quad)?.value;
        let e = steinhaus_expectation(&c, &limit)?.value;
        tally.add(Sample::new(
            1e-4 * cfg.ceiling_scale - (q - e).abs(),
            format!("random vector {i} (N = {n}): quadrature {q:.17e}, E_M limit {e:.17e}"),
            coeff_value(&c),
        ));
    }
    Ok(tally.finish())
}

const SANDWICH_MS: [usize; 5] = [3, 4, 6, 8, 12];

fn check_torus_sandwich(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(7);
    let a0 = witness_a0(Field::Complex);
    let b = complex_norm_bounds(&a0, 4, false)?;
    let (lo, hi) = (2.0 * SQRT_2, 4.0 * cfg.ceiling_scale);
    tally.add(Sample::new(
        1e-12 - (b.lower - lo).abs().max((b.upper - hi).abs()),
        format!("complex A0 at M = 4: [{:.17e}, {:.17e}]", b.lower, b.upper),
        form_value(&a0),
    ));
    let r24 = r_m(24)?;
    let dists = [Distribution::Gaussian, Distribution::Sign, Distribution::SparseSign];
    tally.extend(parallel(cfg.count(100, 20), |i| {
        let mut rng = cfg.rng(7, i);
        let rows = rng.random_range(1..=4);
        let cols = rng.random_range(1..=4);
        let mut form = random_form_with(&mut rng, Field::Complex, rows, cols, dists[i % 3])?;
        if form.is_zero() {
            form = BilinearForm::single_entry(Field::Complex, rows, cols)?;
        }
        let d24 = complex_norm_discrete(&form, 24)?;
        let tol = 1e-9 * d24;
        let mut worst = (f64::INFINITY, String::new());
        for m in SANDWICH_MS {
            let b = complex_norm_bounds(&form, m, true)?;
            for (margin, what) in [
                (d24 - b.discrete_norm, "discrete M norm <= discrete 24 norm"),
                (b.upper * cfg.ceiling_scale - d24, "discrete 24 norm <= R_M upper bound"),
                (d24 / r24 - b.lower, "refined lower <= discrete 24 norm / R_24"),
                (b.lower - b.discrete_norm, "refined lower >= discrete M norm"),
            ] {
                if worse(margin + tol, worst.0) {
                    worst = (margin + tol, format!("sample {i} ({rows}x{cols}), M = {m}: {what}"));
                }
            }
        }
        Ok(Sample::new(worst.0, worst.1, form_value(&form)))
    })?);
    Ok(tally.finish())
}

const BLEI_MS: [usize; 5] = [2, 3, 4, 8, 16];
const BLEI_RS: [f64; 3] = [2.0, 3.0, f64::INFINITY];

/// Largest search length with `M^(N-1) <= 4096`, capped at 6.
fn blei_search_len(m: usize) -> usize {
    let mut n = 1;
    while n < 6 && (m as u128).pow(n as u32) <= 4096 {
        n += 1;
    }
    n
}

fn check_blei(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(8);
    let rs: Vec<ExtExponent> = BLEI_RS.iter().map(|&r| exponent(r)).collect();
    let ones = CoefficientVector::from_real(&[1.0, 1.0])?;
    let attained = ones.lr_norm(exponent(2.0)) / e_m_average(&ones, 2)?.value;
    let target = blei_ceiling(2, exponent(2.0))? * cfg.ceiling_scale;
    tally.add(Sample::new(
        1e-12 - (attained - target).abs(),
        format!("(1, 1) at M = 2, r = 2: ratio {attained:.17e}"),
        coeff_value(&ones),
    ));
    let per_m = cfg.count(200, 20);
    for (mi, &m) in BLEI_MS.iter().enumerate() {
        let field = if m == 2 { Field::Real } else { Field::Complex };
        let ceilings: Vec<f64> = rs
            .iter()
            .map(|&r| Ok(blei_ceiling(m, r)? * cfg.ceiling_scale))
            .collect::<Result<_>>()?;
        for i in 0..per_m {
            let mut rng = cfg.rng(8 + ((mi as u64) << 8), i);
            let n = 1 + i % 6;
            let mut values: Vec<Complex64> = (0..n)
                .map(|_| random_scalar(&mut rng, field, Distribution::Gaussian))
                .collect();
            if values.iter().all(|z| z.norm() == 0.0) {
                values[0] = Complex64::new(1.0, 0.0);
            }
            let c = CoefficientVector::new(field, values)?;
            let avg = e_m_average(&c, m)?.value;
            for (k, &r) in rs.iter().enumerate() {
                tally.add(Sample::new(
                    ceilings[k] + 1e-9 - c.lr_norm(r) / avg,
                    format!("random vector {i} (N = {n}) at M = {m}, r = {r}"),
                    coeff_value(&c),
                ));
            }
        }
        let search = SearchConfig {
            restarts: cfg.count(10, 2),
            steps: cfg.count(100, 25),
            seed: cfg.seed,
            ..SearchConfig::default()
        };
        let n = blei_search_len(m);
        for (k, &r) in rs.iter().enumerate() {
            let res = maximize_khinchin_ratio(KhinchinModel::Em { m }, r, n, &search)?;
            tally.add(Sample::new(
                ceilings[k] + 1e-9 - res.best_ratio,
                format!("search at M = {m}, r = {r}, N = {n}: best {:.17e}", res.best_ratio),
                witness_value(&res.witness),
            ));
        }
    }
    Ok(tally.finish())
}

fn check_steinhaus_sharp(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(9);
    let ceiling = TWO_OVER_SQRT_PI * cfg.ceiling_scale;
    let floor = PI * SQRT_2 / 4.0;
    let model = KhinchinModel::Steinhaus {
        method: SteinhausMethod::BesselTransform,
    };
    let search = SearchConfig {
        restarts: cfg.count(8, 3),
        steps: cfg.count(120, 60),
        seed: cfg.seed,
        ..SearchConfig::default()
    };
    let r2 = exponent(2.0);
    let mut best: Option<SearchResult> = None;
    for n in [2, 4, 6] {
        let res = maximize_khinchin_ratio(model.clone(), r2, n, &search)?;
        tally.add(Sample::new(
            ceiling + 1e-6 - res.best_ratio,
            format!("search at N = {n}: best {:.17e}", res.best_ratio),
            witness_value(&res.witness),
        ));
        if best.as_ref().is_none_or(|b| res.best_ratio > b.best_ratio) {
            best = Some(res);
        }
    }
    let best = best.expect("three searches ran");
    tally.add(Sample::new(
        best.best_ratio - (floor - 1e-6),
        format!("best searched ratio {:.17e} against pi sqrt(2) / 4", best.best_ratio),
        witness_value(&best.witness),
    ));
    for r in [3.0, 4.0] {
        let res = maximize_khinchin_ratio(model.clone(), exponent(r), 4, &search)?;
        tally.notes.push(format!(
            "exploratory, r = {r}, N = 4: best ratio {:.17e} (no sharp value known; \
             ceiling (4/pi)^(1/r) = {:.17e})",
            res.best_ratio,
            FOUR_OVER_PI.powf(1.0 / r)
        ));
    }
    Ok(tally.finish())
}

fn check_round_trips(cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let mut tally = Tally::new(10);
    let bit_equal = |x: &BilinearForm, y: &BilinearForm| {
        x.field() == y.field()
            && x.rows() == y.rows()
            && x.cols() == y.cols()
            && x.entries().iter().zip(y.entries()).all(|(u, v)| {
                u.re.to_bits() == v.re.to_bits() && u.im.to_bits() == v.im.to_bits()
            })
    };
    for i in 0..cfg.count(200, 50) {
        let mut rng = cfg.rng(10, i);
        let field = if i % 2 == 0 { Field::Real } else { Field::Complex };
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=6);
        let form = random_form_with(&mut rng, field, rows, cols, Distribution::Gaussian)?;
        let text = form.to_json()?;
        let back = BilinearForm::from_json(&text)?;
        let ok = bit_equal(&form, &back) && back.to_json()? == text;
        tally.add(Sample::new(
            if ok { 0.0 } else { -1.0 },
            format!("matrix JSON round trip, sample {i}"),
            form_value(&form),
        ));
    }
    let search = SearchConfig {
        restarts: 4,
        steps: 40,
        seed: cfg.seed,
        dims: (3, 3),
        ..SearchConfig::default()
    };
    for field in [Field::Real, Field::Complex] {
        let p = pair(1.5, 2.0);
        let first = maximize_ratio(field, p, &search)?;
        let second = maximize_ratio(field, p, &search)?;
        let text = first.to_json()?;
        let back = SearchResult::from_json(&text)?;
        let ok = first == second && back == first && back.to_json()? == text;
        tally.add(Sample::new(
            if ok { 0.0 } else { -1.0 },
            format!("{field} search: rerun identical, checkpoint round trip exact"),
            witness_value(&first.witness),
        ));
    }
    Ok(tally.finish())
}

/// Runs one check, `1..=10`.
pub fn run_check(id: u32, cfg: &VerifyConfig) -> Result<CheckOutcome> {
    match id {
        1 => check_witness_sharpness(cfg),
        2 => check_real_upper_bound(cfg),
        3 => check_structural(cfg),
        4 => check_search_sqrt2(cfg),
        5 => check_rademacher(cfg),
        6 => check_steinhaus_closed_form(cfg),
        7 => check_torus_sandwich(cfg),
        8 => check_blei(cfg),
        9 => check_steinhaus_sharp(cfg),
        10 => check_round_trips(cfg),
        _ => Err(Error::InvalidArgument(format!("no check {id}; checks are 1..=10"))),
    }
}

pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if !(cfg.ceiling_scale > 0.0 && cfg.ceiling_scale.is_finite()) {
        return Err(Error::InvalidArgument("ceiling scale must be a positive number".into()));
    }
    let checks = (1..=10).map(|id| run_check(id, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        suite: cfg.suite,
        seed: cfg.seed,
        ceiling_scale: cfg.ceiling_scale,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
