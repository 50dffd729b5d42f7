//! Khinchin-type averages of `|sum_n a_n X_n|`.
//!
//! * Rademacher: `X_n` independent uniform signs, `2^-N sum_{eta} |sum eta_n a_n|`.
//! * `E_M`: `X_n` independent uniform on the `M`-th roots of unity (`E_2` is Rademacher).
//! * Steinhaus: `X_n` independent uniform on the unit circle, the `M -> inf` limit of `E_M`.
//!
//! Every average is invariant under rotating a single coefficient by an
//! angle of the underlying group, so the last coefficient's variable is fixed
//! to `1` and one enumeration dimension is saved.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{ExtExponent, FOUR_OVER_PI, TWO_OVER_SQRT_PI};
use crate::forms::lp_norm;
use crate::opnorm::{r_m, unit_root, RootsOfUnityGrid};
use crate::sum::Compensated;
use crate::Field;

/// Largest `N` accepted by [`rademacher_average`].
pub const RADEMACHER_CAP: usize = 30;

/// Default maximum number of evaluations for `E_M` and quadrature sums.
pub const DEFAULT_AVERAGE_BUDGET: u128 = 1 << 28;

/// Largest `N` accepted by Steinhaus quadrature.
pub const QUADRATURE_MAX_TERMS: usize = 8;

const BLOCK: u64 = 1 << 12;
const SHIFT_TOL: f64 = 1e-12;

/// Coefficients `(a_1, ..., a_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    field: Field,
    values: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(field: Field, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("coefficient vector needs N >= 1".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        if field == Field::Real && values.iter().any(|z| z.im != 0.0) {
            return Err(Error::FieldMismatch(
                "real coefficient vector has a nonzero imaginary part".into(),
            ));
        }
        Ok(CoefficientVector { field, values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(Field::Real, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_complex(values: Vec<Complex64>) -> Result<Self> {
        Self::new(Field::Complex, values)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// `(sum |a_n|^r)^(1/r)`, the maximum modulus for `r = inf`.
    pub fn lr_norm(&self, r: ExtExponent) -> f64 {
        lp_norm(&self.magnitudes(), r)
    }

    pub fn scaled(&self, lambda: Complex64) -> CoefficientVector {
        let field = if lambda.im != 0.0 { Field::Complex } else { self.field };
        CoefficientVector {
            field,
            values: self.values.iter().map(|z| z * lambda).collect(),
        }
    }

    /// `a_n -> a_n e^(i s_n)`.
    pub fn rotated(&self, shifts: &[f64]) -> Result<CoefficientVector> {
        if shifts.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} shifts for {} coefficients",
                shifts.len(),
                self.len()
            )));
        }
        let values = self
            .values
            .iter()
            .zip(shifts)
            .map(|(z, &s)| z * Complex64::from_polar(1.0, s))
            .collect();
        CoefficientVector::new(Field::Complex, values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "model")]
pub enum AverageKind {
    Rademacher,
    #[serde(rename = "e-m")]
    Em { m: usize },
    Steinhaus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AverageMethod {
    Enumeration,
    Quadrature,
    EmLimit,
    /// `int_0^inf (1 - prod_n J0(|a_n| t)) / t^2 dt`.
    BesselTransform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageResult {
    pub value: f64,
    pub kind: AverageKind,
    pub method: AverageMethod,
    pub error_bound: Option<f64>,
}

fn exact(value: f64, kind: AverageKind) -> AverageResult {
    AverageResult {
        value,
        kind,
        method: AverageMethod::Enumeration,
        error_bound: None,
    }
}

/// `2^-N sum_{eta in {-1,1}^N} |sum_j eta_j a_j|`, exactly, by Gray-code
/// enumeration of the `2^(N-1)` patterns with `eta_N = 1`.
pub fn rademacher_average(c: &CoefficientVector) -> Result<AverageResult> {
    let n = c.len();
    if n > RADEMACHER_CAP {
        return Err(Error::Capacity {
            what: "Rademacher enumeration (coefficients)",
            required: n as u128,
            cap: RADEMACHER_CAP as u128,
        });
    }
    let a = c.values();
    let total = 1u64 << (n - 1);
    let blocks = total.div_ceil(BLOCK);
    let sum = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let start = block * BLOCK;
            let end = (start + BLOCK).min(total);
            let gray = start ^ (start >> 1);
            let mut signs: Vec<f64> = (0..n)
                .map(|j| if j < n - 1 && (gray >> j) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let mut s: Complex64 = a.iter().zip(&signs).map(|(x, &e)| x * e).sum();
            let mut acc = Compensated::default();
            acc.add(s.norm());
            for i in start + 1..end {
                let j = i.trailing_zeros() as usize;
                signs[j] = -signs[j];
                s += a[j] * (2.0 * signs[j]);
                acc.add(s.norm());
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Compensated::default(), Compensated::merge);
    Ok(exact(sum.value() / total as f64, AverageKind::Rademacher))
}

/// `sum over free^(M) of kernel(base + sum_j free_j w_j)` with every `w_j`
/// ranging over the `M`-th roots of unity, in mixed-radix order with
/// incremental partial sums.
fn torus_sum(
    free: &[Complex64],
    base: Complex64,
    m: usize,
    kernel: &(impl Fn(Complex64) -> f64 + Sync),
) -> Compensated {
    let roots: Vec<Complex64> = (0..m).map(|j| unit_root(j, m)).collect();
    let total = (m as u64).pow(free.len() as u32);
    let blocks = total.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|block| {
            let start = block * BLOCK;
            let end = (start + BLOCK).min(total);
            let mut rem = start;
            let mut digits: Vec<usize> = free
                .iter()
                .map(|_| {
                    let d = (rem % m as u64) as usize;
                    rem /= m as u64;
                    d
                })
                .collect();
            let mut s = base
                + free
                    .iter()
                    .zip(&digits)
                    .map(|(a, &d)| a * roots[d])
                    .sum::<Complex64>();
            let mut acc = Compensated::default();
            acc.add(kernel(s));
            for _ in start + 1..end {
                for (j, d) in digits.iter_mut().enumerate() {
                    let old = *d;
                    *d = if old + 1 == m { 0 } else { old + 1 };
                    s += free[j] * (roots[*d] - roots[old]);
                    if *d != 0 {
                        break;
                    }
                }
                acc.add(kernel(s));
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Compensated::default(), Compensated::merge)
}

fn check_budget(what: &'static str, m: usize, dims: usize, budget: u128) -> Result<()> {
    let required = (m as u128).checked_pow(dims as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::Capacity {
            what,
            required,
            cap: budget,
        });
    }
    Ok(())
}

/// `E_M = M^-N sum_{beta in Omega_M^N} |sum_n a_n e^(i beta_n)|`, default budget.
pub fn e_m_average(c: &CoefficientVector, m: usize) -> Result<AverageResult> {
    e_m_average_with_budget(c, m, DEFAULT_AVERAGE_BUDGET)
}

pub fn e_m_average_with_budget(
    c: &CoefficientVector,
    m: usize,
    budget: u128,
) -> Result<AverageResult> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("E_M needs M >= 2, got {m}")));
    }
    let (free, last) = c.values().split_at(c.len() - 1);
    check_budget("E_M enumeration (evaluations)", m, free.len(), budget)?;
    let sum = torus_sum(free, last[0], m, &|s: Complex64| {
        (s.re * s.re + s.im * s.im).sqrt()
    });
    let count = (m as f64).powi(free.len() as i32);
    Ok(exact(sum.value() / count, AverageKind::Em { m }))
}

/// Whether `E_M` is unchanged by `a_n -> a_n e^(i s_n)`, `s_n in Omega_M`,
/// to `1e-12` relative.
pub fn rotation_invariance_check(c: &CoefficientVector, m: usize, shifts: &[f64]) -> Result<bool> {
    let grid = RootsOfUnityGrid::new(m)?;
    if let Some(s) = shifts
        .iter()
        .find(|&&s| grid.index_of_angle(s, SHIFT_TOL).is_none())
    {
        return Err(Error::InvalidArgument(format!(
            "shift {s} is not of the form 2 pi j / {m}"
        )));
    }
    let before = e_m_average(c, m)?.value;
    let after = e_m_average(&c.rotated(shifts)?, m)?.value;
    Ok((before - after).abs() <= 1e-12 * before.abs().max(after.abs()))
}

/// How the Steinhaus expectation is computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum SteinhausMethod {
    /// Product trapezoid rule with `nodes` points per angle; the innermost
    /// angle is integrated in closed form. Error estimate from `nodes / 2`.
    Quadrature { nodes: usize },
    /// `E_M` along an increasing schedule; error estimate from the last two.
    EmLimit { schedule: Vec<usize> },
    /// One-dimensional Bessel transform; error bound from the truncated tail.
    BesselTransform,
}

/// `(2 pi)^-N int |sum_n a_n e^(i t_n)| dt_1 ... dt_N`.
pub fn steinhaus_expectation(c: &CoefficientVector, method: &SteinhausMethod) -> Result<AverageResult> {
    match method {
        SteinhausMethod::Quadrature { nodes } => steinhaus_quadrature(c, *nodes),
        SteinhausMethod::EmLimit { schedule } => steinhaus_em_limit(c, schedule),
        SteinhausMethod::BesselTransform => Ok(steinhaus_bessel(c)),
    }
}

/// `(1/2pi) int_0^2pi |u + v e^(i theta)| d theta` for `u, v >= 0`.
///
/// This is the perimeter of the ellipse with semi-axes `u + v` and `|u - v|`
/// divided by `2 pi`, evaluated with the arithmetic-geometric mean.
pub fn circle_mean(u: f64, v: f64) -> f64 {
    let major = u + v;
    let minor = (u - v).abs();
    if major == 0.0 {
        return 0.0;
    }
    let ratio = minor / major;
    if ratio < 1e-4 {
        // E(k) = 1 + k'^2/2 (ln(4/k') - 1/2) + O(k'^4 ln k')
        let log_term = if ratio == 0.0 {
            0.0
        } else {
            ratio * ratio / 2.0 * ((4.0 / ratio).ln() - 0.5)
        };
        return 2.0 * major * (1.0 + log_term) / PI;
    }
    let (mut a, mut b) = (major, minor);
    let mut c2_sum = 0.5 * (major * major - minor * minor);
    let mut weight = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        weight *= 2.0;
        c2_sum += weight * c * c;
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    // perimeter = (2 pi / agm) ((u+v)^2 - sum 2^(n-1) c_n^2)
    (major * major - c2_sum) / a
}

fn steinhaus_quadrature(c: &CoefficientVector, nodes: usize) -> Result<AverageResult> {
    let n = c.len();
    if n > QUADRATURE_MAX_TERMS {
        return Err(Error::Capacity {
            what: "Steinhaus quadrature (coefficients)",
            required: n as u128,
            cap: QUADRATURE_MAX_TERMS as u128,
        });
    }
    if nodes < 2 || !nodes.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs an even node count >= 2, got {nodes}"
        )));
    }
    let kind = AverageKind::Steinhaus;
    // Only moduli matter. The largest term is the fixed base and the smallest
    // is integrated exactly: the kernel has a kink where |s| = inner, which
    // this ordering avoids whenever one term dominates.
    let mut mags: Vec<f64> = c.magnitudes().into_iter().filter(|&x| x > 0.0).collect();
    mags.sort_by(|x, y| x.total_cmp(y));
    let a: Vec<Complex64> = mags.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let n = a.len();
    if n <= 1 {
        return Ok(AverageResult {
            value: mags.first().copied().unwrap_or(0.0),
            kind,
            method: AverageMethod::Quadrature,
            error_bound: Some(0.0),
        });
    }
    // last variable fixed, first integrated exactly, the rest on the grid
    let free = &a[1..n - 1];
    let inner = mags[0];
    check_budget("Steinhaus quadrature (nodes)", nodes, free.len(), DEFAULT_AVERAGE_BUDGET)?;
    let rule = |q: usize| {
        let kernel = |s: Complex64| circle_mean(s.norm(), inner);
        torus_sum(free, a[n - 1], q, &kernel).value() / (q as f64).powi(free.len() as i32)
    };
    let value = rule(nodes);
    let error_bound = if free.is_empty() {
        0.0
    } else {
        (value - rule(nodes / 2)).abs()
    };
    Ok(AverageResult {
        value,
        kind,
        method: AverageMethod::Quadrature,
        error_bound: Some(error_bound),
    })
}

fn steinhaus_em_limit(c: &CoefficientVector, schedule: &[usize]) -> Result<AverageResult> {
    if schedule.len() < 2 {
        return Err(Error::InvalidArgument(
            "E_M schedule needs at least two entries".into(),
        ));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("E_M schedule must be increasing".into()));
    }
    let k = schedule.len();
    let prev = e_m_average(c, schedule[k - 2])?.value;
    let last = e_m_average(c, schedule[k - 1])?.value;
    Ok(AverageResult {
        value: last,
        kind: AverageKind::Steinhaus,
        method: AverageMethod::EmLimit,
        error_bound: Some((last - prev).abs()),
    })
}

// 8-point Gauss-Legendre on [-1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const BESSEL_TAIL_TARGET: f64 = 1e-10;
const BESSEL_MAX_T: f64 = 1e5;

/// `E|sum a_n eps_n| = int_0^inf (1 - prod_n J0(|a_n| t)) / t^2 dt`.
///
/// Only the moduli matter. One or two nonzero terms are evaluated in closed
/// form; otherwise the integral is truncated at `T` and the dropped tail is
/// bounded with `|J0(x)| <= (2 / (pi x))^(1/2)`.
fn steinhaus_bessel(c: &CoefficientVector) -> AverageResult {
    let mut mags: Vec<f64> = c.magnitudes().into_iter().filter(|&x| x > 0.0).collect();
    mags.sort_by(|x, y| y.total_cmp(x));
    let result = |value: f64, bound: f64| AverageResult {
        value,
        kind: AverageKind::Steinhaus,
        method: AverageMethod::BesselTransform,
        error_bound: Some(bound),
    };
    match mags.len() {
        0 => return result(0.0, 0.0),
        1 => return result(mags[0], 0.0),
        2 => return result(circle_mean(mags[0], mags[1]), 0.0),
        _ => {}
    }
    let scale = mags[0];
    for x in &mut mags {
        *x /= scale;
    }
    // tail bound uses the terms large enough for the envelope to kick in early
    let significant: Vec<f64> = mags.iter().copied().filter(|&x| x >= 1e-3).collect();
    let s = significant.len() as f64;
    let envelope: f64 = significant
        .iter()
        .map(|&x| (2.0 / (PI * x)).sqrt())
        .product();
    let t_min = 2.0 / (PI * significant[significant.len() - 1]);
    // envelope * T^-(1 + s/2) / (1 + s/2) <= target
    let t_cut = (envelope / (BESSEL_TAIL_TARGET * (1.0 + s / 2.0)))
        .powf(1.0 / (1.0 + s / 2.0))
        .max(t_min)
        .min(BESSEL_MAX_T);
    let tail_bound = envelope * t_cut.powf(-(1.0 + s / 2.0)) / (1.0 + s / 2.0);

    let freq: f64 = mags.iter().sum();
    let width = (PI / freq).min(1.0);
    let panels = (t_cut / width).ceil() as usize;
    let width = t_cut / panels as f64;
    let integrand = |t: f64| {
        let p: f64 = mags.iter().map(|&x| libm::j0(x * t)).product();
        (1.0 - p) / (t * t)
    };
    let mut acc = Compensated::default();
    for i in 0..panels {
        let mid = (i as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut panel = 0.0;
        for (x, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            panel += w * (integrand(mid - half * x) + integrand(mid + half * x));
        }
        acc.add(panel * half);
    }
    // int_T^inf dt / t^2 = 1 / T; the product part is covered by the bound
    acc.add(1.0 / t_cut);
    result(scale * acc.value(), scale * tail_bound)
}

/// `2^(1/r)`, the optimal Rademacher constant.
pub fn rademacher_ceiling(r: ExtExponent) -> f64 {
    r.reciprocal().exp2()
}

/// `2/sqrt(pi)` at `r = 2`; `(4/pi)^(1/r)` otherwise (not known to be sharp).
pub fn steinhaus_ceiling(r: ExtExponent) -> f64 {
    if r.value() == 2.0 {
        TWO_OVER_SQRT_PI
    } else {
        FOUR_OVER_PI.powf(r.reciprocal())
    }
}

/// `2^(1/r)` for `M = 2`, `(4/pi)^(1/r) / R_M` for `M >= 3`.
pub fn blei_ceiling(m: usize, r: ExtExponent) -> Result<f64> {
    match m {
        0 | 1 => Err(Error::InvalidArgument(format!("need M >= 2, got {m}"))),
        2 => Ok(rademacher_ceiling(r)),
        _ => Ok(FOUR_OVER_PI.powf(r.reciprocal()) / r_m(m)?),
    }
}

fn check_ratio_inputs(c: &CoefficientVector, r: ExtExponent) -> Result<()> {
    if r.value() < 2.0 {
        return Err(Error::InvalidArgument(format!("need r in [2, inf], got {r}")));
    }
    if c.is_zero() {
        return Err(Error::UndefinedRatio("coefficient vector is zero".into()));
    }
    Ok(())
}

/// `(sum |a_n|^r)^(1/r) / Rademacher average`.
pub fn khinchin_ratio(c: &CoefficientVector, r: ExtExponent) -> Result<f64> {
    check_ratio_inputs(c, r)?;
    Ok(c.lr_norm(r) / rademacher_average(c)?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BleiBoundReport {
    pub m: usize,
    pub r: ExtExponent,
    pub ratio: f64,
    pub ceiling: f64,
    pub violated: bool,
    pub witness: Vec<[f64; 2]>,
}

/// `(sum |a_n|^r)^(1/r) / E_M` against its ceiling; flags `ratio > ceiling + 1e-9`.
pub fn blei_bound_check(c: &CoefficientVector, m: usize, r: ExtExponent) -> Result<BleiBoundReport> {
    check_ratio_inputs(c, r)?;
    let ceiling = blei_ceiling(m, r)?;
    let ratio = c.lr_norm(r) / e_m_average(c, m)?.value;
    Ok(BleiBoundReport {
        m,
        r,
        ratio,
        ceiling,
        violated: ratio > ceiling + 1e-9,
        witness: c.values().iter().map(|z| [z.re, z.im]).collect(),
    })
}

/// `|E_M - reference|` along a schedule. Reported, not asserted: only the
/// limit is guaranteed, not monotone approach.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub reference: f64,
    pub gaps: Vec<(usize, f64)>,
    pub monotone: bool,
}

pub fn em_convergence(c: &CoefficientVector, schedule: &[usize], reference: f64) -> Result<ConvergenceReport> {
    let gaps = schedule
        .iter()
        .map(|&m| Ok((m, (e_m_average(c, m)?.value - reference).abs())))
        .collect::<Result<Vec<_>>>()?;
    let monotone = gaps.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(ConvergenceReport {
        reference,
        gaps,
        monotone,
    })
}
