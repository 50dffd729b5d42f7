//! Operator norms `||A|| = sup { |A(x, y)| : |x_k|, |y_j| <= 1 }`.
//!
//! For a fixed `y` the supremum over `x` is `sum_k |sum_j A_kj y_j|`, which is
//! convex in `y`. Over the reals the maximum therefore sits on a vertex of
//! the cube and can be enumerated exactly. Over the complex numbers the
//! maximum over the torus is only bracketed: restricting `y` to the `M`-th
//! roots of unity gives `||A||_M`, and `||A||_M <= ||A|| <= ||A||_M / R_M`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::BilinearForm;
use crate::Field;

/// Default maximum column count for exact real enumeration.
pub const DEFAULT_REAL_CAP: usize = 24;

/// Default maximum number of objective evaluations for torus enumeration.
pub const DEFAULT_COMPLEX_BUDGET: u128 = 100_000_000;

/// Patterns per enumeration block; accumulators are rebuilt from scratch at
/// every block start, which bounds incremental rounding drift.
const BLOCK: u64 = 1 << 12;

const MAX_SWEEPS: usize = 200;
const SWEEP_TOL: f64 = 1e-12;
const ANGLE_TOL: f64 = 1e-12;
const PHASE_SCAN: usize = 256;

/// A vertex of the real cube: every coordinate is `+1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern(pub Vec<i8>);

impl SignPattern {
    fn from_gray(index: u64, len: usize) -> Self {
        let gray = index ^ (index >> 1);
        let mut signs: Vec<i8> = (0..len)
            .map(|j| if (gray >> j) & 1 == 1 { -1 } else { 1 })
            .collect();
        if let Some(last) = signs.last_mut() {
            *last = 1;
        }
        SignPattern(signs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `sum_k |sum_j A_kj y_j|` for real `y`; the supremum over `x` at this `y`.
pub fn real_objective(form: &BilinearForm, y: &[f64]) -> f64 {
    (0..form.rows())
        .map(|k| {
            form.row(k)
                .iter()
                .zip(y)
                .map(|(a, &s)| a * s)
                .sum::<Complex64>()
                .norm()
        })
        .sum()
}

/// `sum_k |sum_j A_kj y_j|` for complex `y`.
pub fn complex_objective(form: &BilinearForm, y: &[Complex64]) -> f64 {
    (0..form.rows())
        .map(|k| {
            form.row(k)
                .iter()
                .zip(y)
                .map(|(a, s)| a * s)
                .sum::<Complex64>()
                .norm()
        })
        .sum()
}

/// Exact real operator norm, enumerating sign vectors with the default cap.
pub fn real_sup_norm(form: &BilinearForm) -> Result<f64> {
    real_sup_norm_capped(form, DEFAULT_REAL_CAP).map(|(v, _)| v)
}

/// Exact real operator norm and a maximizing sign vector.
///
/// Enumerates the `2^(N-1)` patterns with the last sign fixed (`y` and `-y`
/// give the same value) in Gray-code order, so each step flips one sign and
/// updates every row accumulator by `2 A_kj y_j`.
pub fn real_sup_norm_capped(form: &BilinearForm, cap: usize) -> Result<(f64, SignPattern)> {
    if form.field() != Field::Real {
        return Err(Error::FieldMismatch(
            "real_sup_norm needs a real form; use complex_norm_bounds".into(),
        ));
    }
    let n = form.cols();
    if n > cap {
        return Err(Error::Capacity {
            what: "real sign enumeration (columns)",
            required: n as u128,
            cap: cap as u128,
        });
    }
    let rows = form.rows();
    // column-major copy: flipping sign j touches column j only
    let columns: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..rows).map(|k| form.get(k, j).re).collect())
        .collect();
    let total = 1u64 << (n - 1);
    let blocks = total.div_ceil(BLOCK);

    let scan_block = |block: u64| -> (f64, u64) {
        let start = block * BLOCK;
        let end = (start + BLOCK).min(total);
        let mut signs = SignPattern::from_gray(start, n).0;
        let mut acc: Vec<f64> = (0..rows)
            .map(|k| (0..n).map(|j| columns[j][k] * f64::from(signs[j])).sum())
            .collect();
        let value = |acc: &[f64]| acc.iter().map(|x| x.abs()).sum::<f64>();
        let mut best = (value(&acc), start);
        for i in start + 1..end {
            let j = i.trailing_zeros() as usize;
            signs[j] = -signs[j];
            let twice = 2.0 * f64::from(signs[j]);
            for (a, c) in acc.iter_mut().zip(&columns[j]) {
                *a += twice * c;
            }
            let v = value(&acc);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    };

    let (best, index) = (0..blocks)
        .into_par_iter()
        .map(scan_block)
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), pick_best);
    Ok((best, SignPattern::from_gray(index, n)))
}

/// Larger value wins; equal values resolve to the smaller pattern index.
fn pick_best(x: (f64, u64), y: (f64, u64)) -> (f64, u64) {
    if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
        y
    } else {
        x
    }
}

/// Grid size for [`r_m`]; `Infinite` is the full circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridOrder {
    Finite(usize),
    Infinite,
}

impl From<usize> for GridOrder {
    fn from(m: usize) -> Self {
        GridOrder::Finite(m)
    }
}

/// `R_M = [1/2 + 1/2 cos(2 pi / M)]^(1/2)`, for `M >= 3`; `R_inf = 1`.
pub fn r_m(order: impl Into<GridOrder>) -> Result<f64> {
    match order.into() {
        GridOrder::Infinite => Ok(1.0),
        GridOrder::Finite(m) if m < 3 => Err(Error::InvalidArgument(format!(
            "R_M needs M >= 3, got {m}"
        ))),
        GridOrder::Finite(m) => Ok((0.5 + 0.5 * (2.0 * PI / m as f64).cos()).sqrt()),
    }
}

/// The `M`-th roots of unity `exp(2 pi i j / M)` and their angles.
#[derive(Clone, Debug, PartialEq)]
pub struct RootsOfUnityGrid {
    m: usize,
    points: Vec<Complex64>,
    angles: Vec<f64>,
}

impl RootsOfUnityGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("need M >= 2, got {m}")));
        }
        let angles: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let points = (0..m).map(|j| unit_root(j, m)).collect();
        Ok(RootsOfUnityGrid { m, points, angles })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Index `j` with `theta = 2 pi j / M (mod 2 pi)` within `tol`, if any.
    pub fn index_of_angle(&self, theta: f64, tol: f64) -> Option<usize> {
        let turns = theta.rem_euclid(2.0 * PI) * self.m as f64 / (2.0 * PI);
        let nearest = turns.round();
        let err = (turns - nearest).abs() * 2.0 * PI / self.m as f64;
        (err <= tol).then_some(nearest as usize % self.m)
    }
}

/// `exp(2 pi i j / m)`, exact at multiples of a quarter turn.
pub(crate) fn unit_root(j: usize, m: usize) -> Complex64 {
    let j = j % m;
    if (4 * j).is_multiple_of(m) {
        return match 4 * j / m {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)
}

/// `||A||_M` with its maximizing grid point (as indices into the `M` roots).
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMax {
    pub value: f64,
    pub indices: Vec<usize>,
}

/// `||A||_M = max over y in T_M^N of sum_k |sum_j A_kj y_j|`, default budget.
pub fn complex_norm_discrete(form: &BilinearForm, m: usize) -> Result<f64> {
    complex_norm_discrete_with_budget(form, m, DEFAULT_COMPLEX_BUDGET).map(|d| d.value)
}

/// Exact maximum over `T_M^N` with `y_1 = 1` fixed by global-phase invariance,
/// so `M^(N-1)` objective evaluations, enumerated in mixed-radix order.
pub fn complex_norm_discrete_with_budget(
    form: &BilinearForm,
    m: usize,
    budget: u128,
) -> Result<DiscreteMax> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!(
            "torus discretization needs M >= 3, got {m}"
        )));
    }
    let n = form.cols();
    let required = (m as u128).checked_pow((n - 1) as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::Capacity {
            what: "torus enumeration (objective evaluations)",
            required,
            cap: budget,
        });
    }
    let total = required as u64;
    let rows = form.rows();
    let roots: Vec<Complex64> = (0..m).map(|j| unit_root(j, m)).collect();
    let columns: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..rows).map(|k| form.get(k, j)).collect())
        .collect();
    let free = n - 1;
    let digits_of = |mut index: u64| -> Vec<usize> {
        (0..free)
            .map(|_| {
                let d = (index % m as u64) as usize;
                index /= m as u64;
                d
            })
            .collect()
    };

    let scan_block = |block: u64| -> (f64, u64) {
        let start = block * BLOCK;
        let end = (start + BLOCK).min(total);
        let mut digits = digits_of(start);
        let mut acc: Vec<Complex64> = (0..rows)
            .map(|k| {
                let mut s = columns[0][k];
                for (j, &d) in digits.iter().enumerate() {
                    s += columns[j + 1][k] * roots[d];
                }
                s
            })
            .collect();
        let value = |acc: &[Complex64]| {
            acc.iter()
                .map(|z| (z.re * z.re + z.im * z.im).sqrt())
                .sum::<f64>()
        };
        let mut best = (value(&acc), start);
        for i in start + 1..end {
            for (j, d) in digits.iter_mut().enumerate() {
                let old = *d;
                *d = if old + 1 == m { 0 } else { old + 1 };
                let delta = roots[*d] - roots[old];
                for (a, c) in acc.iter_mut().zip(&columns[j + 1]) {
                    *a += c * delta;
                }
                if *d != 0 {
                    break;
                }
            }
            let v = value(&acc);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    };

    let blocks = total.div_ceil(BLOCK);
    let (value, index) = (0..blocks)
        .into_par_iter()
        .map(scan_block)
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), pick_best);
    let mut indices = vec![0];
    indices.extend(digits_of(index));
    Ok(DiscreteMax { value, indices })
}

/// Certified interval for the complex operator norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusNormBounds {
    /// Best certified lower bound: `||A||_M`, or the refined value if larger.
    pub lower: f64,
    /// `||A||_M / R_M`.
    pub upper: f64,
    pub m: usize,
    pub r_m: f64,
    pub discrete_norm: f64,
    /// Angles of the unimodular `y` attaining `lower`.
    pub argmax: Vec<f64>,
}

impl TorusNormBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// `[||A||_M, ||A||_M / R_M]`, optionally with the lower end pushed up by
/// coordinate-wise phase ascent from the best grid point.
pub fn complex_norm_bounds(form: &BilinearForm, m: usize, refine: bool) -> Result<TorusNormBounds> {
    complex_norm_bounds_with_budget(form, m, refine, DEFAULT_COMPLEX_BUDGET)
}

pub fn complex_norm_bounds_with_budget(
    form: &BilinearForm,
    m: usize,
    refine: bool,
    budget: u128,
) -> Result<TorusNormBounds> {
    let r = r_m(m)?;
    let discrete = complex_norm_discrete_with_budget(form, m, budget)?;
    let mut angles: Vec<f64> = discrete
        .indices
        .iter()
        .map(|&d| 2.0 * PI * d as f64 / m as f64)
        .collect();
    let mut lower = discrete.value;
    if refine {
        let (value, refined) = phase_ascent(form, &angles);
        if value > lower {
            lower = value;
            angles = refined;
        }
    }
    Ok(TorusNormBounds {
        lower,
        upper: discrete.value / r,
        m,
        r_m: r,
        discrete_norm: discrete.value,
        argmax: angles,
    })
}

/// Coordinate-wise ascent of `sum_k |sum_j A_kj e^(i phi_j)|` over the phases.
/// Stops after `MAX_SWEEPS` sweeps or once a sweep gains less than `SWEEP_TOL`
/// relative.
pub fn phase_ascent(form: &BilinearForm, start: &[f64]) -> (f64, Vec<f64>) {
    let rows = form.rows();
    let n = form.cols();
    let mut angles = start.to_vec();
    let mut y: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let mut acc: Vec<Complex64> = (0..rows)
        .map(|k| (0..n).map(|j| form.get(k, j) * y[j]).sum())
        .collect();
    let mut value: f64 = acc.iter().map(|z| z.norm()).sum();
    let mut rest = vec![Complex64::new(0.0, 0.0); rows];
    let mut column = vec![Complex64::new(0.0, 0.0); rows];

    for _ in 0..MAX_SWEEPS {
        let before = value;
        for j in 0..n {
            for k in 0..rows {
                column[k] = form.get(k, j);
                rest[k] = acc[k] - column[k] * y[j];
            }
            let Some((theta, v)) = best_phase(&rest, &column) else {
                continue;
            };
            if v > value {
                value = v;
                angles[j] = theta;
                y[j] = Complex64::from_polar(1.0, theta);
                for k in 0..rows {
                    acc[k] = rest[k] + column[k] * y[j];
                }
            }
        }
        if value - before <= SWEEP_TOL * before.abs() {
            break;
        }
    }
    // recompute from scratch so the reported value carries no drift
    let y: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    (complex_objective(form, &y), angles)
}

/// Maximizer over `theta in [0, 2 pi)` of `sum_k |c_k + a_k e^(i theta)|`.
/// Closed form when a single `a_k` is nonzero; otherwise a grid scan followed
/// by golden-section refinement of the best cell. Ties go to the smaller angle.
fn best_phase(c: &[Complex64], a: &[Complex64]) -> Option<(f64, f64)> {
    let f = |theta: f64| -> f64 {
        let w = Complex64::from_polar(1.0, theta);
        c.iter().zip(a).map(|(ck, ak)| (ck + ak * w).norm()).sum()
    };
    let active: Vec<usize> = (0..a.len()).filter(|&k| a[k].norm() > 0.0).collect();
    match active.len() {
        0 => None,
        1 => {
            let k = active[0];
            let theta = if c[k].norm() == 0.0 {
                0.0
            } else {
                (c[k].arg() - a[k].arg()).rem_euclid(2.0 * PI)
            };
            Some((theta, f(theta)))
        }
        _ => {
            let h = 2.0 * PI / PHASE_SCAN as f64;
            let (mut best_t, mut best_v) = (0.0, f(0.0));
            for s in 1..PHASE_SCAN {
                let t = s as f64 * h;
                let v = f(t);
                if v > best_v {
                    best_t = t;
                    best_v = v;
                }
            }
            let t = golden_max(&f, best_t - h, best_t + h, ANGLE_TOL);
            let v = f(t);
            if v > best_v {
                Some((t.rem_euclid(2.0 * PI), v))
            } else {
                Some((best_t, best_v))
            }
        }
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{random_form, witness_a0, Distribution};
    use std::f64::consts::SQRT_2;

    #[test]
    fn witness_real_norm_is_two() {
        let (v, y) = real_sup_norm_capped(&witness_a0(Field::Real), DEFAULT_REAL_CAP).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(y.len(), 2);
    }

    #[test]
    fn identity_norm_is_dimension() {
        for n in 1..=6 {
            let id = BilinearForm::identity(Field::Real, n).unwrap();
            assert_eq!(real_sup_norm(&id).unwrap(), n as f64);
        }
    }

    #[test]
    fn scalar_form_norm_is_modulus() {
        let a = BilinearForm::from_real(1, 1, &[-3.5]).unwrap();
        assert_eq!(real_sup_norm(&a).unwrap(), 3.5);
        let c = BilinearForm::from_complex(1, 1, vec![Complex64::new(3.0, 4.0)]).unwrap();
        for m in [3, 5, 8] {
            assert!((complex_norm_discrete(&c, m).unwrap() - 5.0).abs() < 1e-15);
        }
    }

    #[test]
    fn real_norm_rejects_complex_and_oversized() {
        assert!(matches!(
            real_sup_norm(&witness_a0(Field::Complex)),
            Err(Error::FieldMismatch(_))
        ));
        let wide = BilinearForm::zeros(Field::Real, 1, 25).unwrap();
        match real_sup_norm(&wide) {
            Err(Error::Capacity { cap, required, .. }) => {
                assert_eq!((cap, required), (24, 25));
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn gray_code_matches_direct_evaluation_of_argmax() {
        let a = random_form(Field::Real, 5, 9, Distribution::Gaussian, 5).unwrap();
        let (v, y) = real_sup_norm_capped(&a, 24).unwrap();
        let y: Vec<f64> = y.0.iter().map(|&s| f64::from(s)).collect();
        assert!((real_objective(&a, &y) - v).abs() <= 1e-12 * v);
    }

    #[test]
    fn r_m_examples() {
        assert!((r_m(3).unwrap() - 0.5).abs() < 1e-15);
        assert!((r_m(4).unwrap() - SQRT_2 / 2.0).abs() < 1e-15);
        assert_eq!(r_m(GridOrder::Infinite).unwrap(), 1.0);
        assert!(r_m(2).is_err());
        let mut prev = 0.0;
        for m in 3..200 {
            let r = r_m(m).unwrap();
            assert!(r > prev && r < 1.0);
            prev = r;
        }
    }

    #[test]
    fn grid_points_are_distinct_unit_roots() {
        for m in 2..40 {
            let g = RootsOfUnityGrid::new(m).unwrap();
            for (i, p) in g.points().iter().enumerate() {
                assert!((p.norm() - 1.0).abs() < 1e-15);
                for q in &g.points()[i + 1..] {
                    assert!((p - q).norm() > 1e-9);
                }
            }
        }
        let g = RootsOfUnityGrid::new(8).unwrap();
        assert_eq!(g.index_of_angle(PI / 2.0, 1e-12), Some(2));
        assert_eq!(g.index_of_angle(-PI / 4.0, 1e-12), Some(7));
        assert_eq!(g.index_of_angle(0.3, 1e-12), None);
        assert!(RootsOfUnityGrid::new(1).is_err());
    }

    #[test]
    fn complex_witness_discrete_norm() {
        let a0 = witness_a0(Field::Complex);
        let d = complex_norm_discrete_with_budget(&a0, 4, DEFAULT_COMPLEX_BUDGET).unwrap();
        assert!((d.value - 2.0 * SQRT_2).abs() < 1e-14);
        assert_eq!(d.indices, vec![0, 1]);
    }

    #[test]
    fn complex_witness_bounds() {
        let a0 = witness_a0(Field::Complex);
        let b = complex_norm_bounds(&a0, 4, false).unwrap();
        assert!((b.lower - 2.0 * SQRT_2).abs() < 1e-14);
        assert!((b.upper - 4.0).abs() < 1e-14);

        let b = complex_norm_bounds(&a0, 64, true).unwrap();
        assert!(b.width() < 0.02);
        assert!(b.contains(2.0 * SQRT_2));
    }

    #[test]
    fn zero_form_bounds_vanish() {
        let z = BilinearForm::zeros(Field::Complex, 2, 3).unwrap();
        let b = complex_norm_bounds(&z, 5, true).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
    }

    #[test]
    fn budget_is_enforced() {
        let a = BilinearForm::zeros(Field::Complex, 1, 6).unwrap();
        match complex_norm_discrete_with_budget(&a, 10, 1000) {
            Err(Error::Capacity { required, .. }) => assert_eq!(required, 100_000),
            other => panic!("expected capacity error, got {other:?}"),
        }
        assert!(complex_norm_discrete(&a, 2).is_err());
    }

    #[test]
    fn single_row_closed_form_phase() {
        let a = BilinearForm::from_complex(
            1,
            3,
            vec![
                Complex64::new(1.0, 2.0),
                Complex64::new(-0.5, 0.3),
                Complex64::new(0.1, -2.0),
            ],
        )
        .unwrap();
        // for one row the norm is the l1 norm of the row
        let l1: f64 = a.entries().iter().map(|z| z.norm()).sum();
        let b = complex_norm_bounds(&a, 3, true).unwrap();
        assert!((b.lower - l1).abs() < 1e-12);
        assert!(b.upper >= l1);
    }
}
