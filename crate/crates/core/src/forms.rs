//! Finite bilinear forms `A: K^K x K^N -> K`, stored as `K x N` matrices with
//! `entry[k][j] = A(e_k, e_j)`: rows index the first argument.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponents::{ExponentPair, ExtExponent};
use crate::sum::Compensated;
use crate::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl BilinearForm {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols}: both dimensions must be >= 1")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("entry {i} is not finite")));
        }
        if field == Field::Real {
            if let Some(i) = entries.iter().position(|z| z.im != 0.0) {
                return Err(Error::FieldMismatch(format!(
                    "real form has nonzero imaginary part at entry {i}"
                )));
            }
        }
        Ok(BilinearForm {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let entries = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        BilinearForm::new(Field::Real, rows, cols, entries)
    }

    pub fn from_complex(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        BilinearForm::new(Field::Complex, rows, cols, entries)
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Result<Self> {
        BilinearForm::new(field, rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(field: Field, n: usize) -> Result<Self> {
        let mut form = BilinearForm::zeros(field, n, n)?;
        for k in 0..n {
            form.entries[k * n + k] = Complex64::new(1.0, 0.0);
        }
        Ok(form)
    }

    /// The form with a single entry `1` at `(0, 0)`.
    pub fn single_entry(field: Field, rows: usize, cols: usize) -> Result<Self> {
        let mut form = BilinearForm::zeros(field, rows, cols)?;
        form.entries[0] = Complex64::new(1.0, 0.0);
        Ok(form)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, k: usize, j: usize) -> Complex64 {
        self.entries[k * self.cols + j]
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.entries[k * self.cols..(k + 1) * self.cols]
    }

    /// Real parts in row-major order.
    pub fn real_entries(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> BilinearForm {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for k in 0..self.rows {
                entries.push(self.get(k, j));
            }
        }
        BilinearForm {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Same entries, tagged complex.
    pub fn to_complex(&self) -> BilinearForm {
        BilinearForm {
            field: Field::Complex,
            ..self.clone()
        }
    }

    /// `c * A`. A real form scaled by a non-real `c` becomes complex.
    pub fn scaled(&self, c: Complex64) -> BilinearForm {
        let field = if c.im != 0.0 { Field::Complex } else { self.field };
        BilinearForm {
            field,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * c).collect(),
        }
    }

    /// Applies `f` to every entry; the imaginary part is dropped for real forms.
    pub fn map_entries(&self, mut f: impl FnMut(Complex64) -> Complex64) -> BilinearForm {
        let field = self.field;
        let entries = self
            .entries
            .iter()
            .map(|&z| {
                let w = f(z);
                match field {
                    Field::Real => Complex64::new(w.re, 0.0),
                    Field::Complex => w,
                }
            })
            .collect();
        BilinearForm {
            field,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::parse("matrix", e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormRepr {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Bare(f64),
    Parts(Vec<f64>),
}

impl Serialize for BilinearForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .entries
            .iter()
            .map(|z| match self.field {
                Field::Real => EntryRepr::Parts(vec![z.re]),
                Field::Complex => EntryRepr::Parts(vec![z.re, z.im]),
            })
            .collect();
        FormRepr {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BilinearForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FormRepr::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(repr.entries.len());
        for (i, e) in repr.entries.into_iter().enumerate() {
            let z = match (repr.field, e) {
                (Field::Real, EntryRepr::Bare(x)) => Complex64::new(x, 0.0),
                (Field::Real, EntryRepr::Parts(p)) if p.len() == 1 => Complex64::new(p[0], 0.0),
                (Field::Real, EntryRepr::Parts(_)) => {
                    return Err(D::Error::custom(format!(
                        "entries[{i}]: real entries are [re]; imaginary parts are not allowed"
                    )))
                }
                (Field::Complex, EntryRepr::Parts(p)) if p.len() == 2 => Complex64::new(p[0], p[1]),
                (Field::Complex, _) => {
                    return Err(D::Error::custom(format!(
                        "entries[{i}]: complex entries must be [re, im]"
                    )))
                }
            };
            entries.push(z);
        }
        BilinearForm::new(repr.field, repr.rows, repr.cols, entries)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Value of the mixed norm together with the exponents it was taken at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedNormValue {
    pub value: f64,
    pub pair: ExponentPair,
}

/// `l_p` norm of non-negative values; `p = inf` is the maximum.
/// Values are scaled by their maximum before powering.
pub(crate) fn lp_norm(values: &[f64], p: ExtExponent) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    let p = p.value();
    let sum: Compensated = values.iter().map(|&x| (x / max).powf(p)).collect();
    max * sum.value().powf(1.0 / p)
}

/// `( sum_k ( sum_j |A_kj|^a )^(b/a) )^(1/b)`, with `inf` levels taken as suprema.
pub fn mixed_norm(form: &BilinearForm, pair: ExponentPair) -> MixedNormValue {
    let mut magnitudes = vec![0.0; form.cols];
    let row_norms: Vec<f64> = (0..form.rows)
        .map(|k| {
            for (m, z) in magnitudes.iter_mut().zip(form.row(k)) {
                *m = z.norm();
            }
            lp_norm(&magnitudes, pair.a)
        })
        .collect();
    MixedNormValue {
        value: lp_norm(&row_norms, pair.b),
        pair,
    }
}

/// `A0(x, y) = x1 y1 + x1 y2 + x2 y1 - x2 y2`.
pub fn witness_a0(field: Field) -> BilinearForm {
    let entries = [1.0, 1.0, 1.0, -1.0]
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    BilinearForm::new(field, 2, 2, entries).expect("2x2 witness is well formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    /// Standard normal entries (independent real and imaginary parts in the complex case).
    Gaussian,
    /// Entries in `{-1, 1}` (real) or the fourth roots of unity (complex).
    Sign,
    /// Like `Sign`, but each entry is zero with probability 1/2.
    SparseSign,
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "sign" => Ok(Distribution::Sign),
            "sparse-sign" => Ok(Distribution::SparseSign),
            _ => Err(Error::parse("distribution", format!("unknown distribution `{s}`"))),
        }
    }
}

pub(crate) fn random_scalar<R: Rng + ?Sized>(
    rng: &mut R,
    field: Field,
    distribution: Distribution,
) -> Complex64 {
    let unit = |rng: &mut R| match field {
        Field::Real => {
            if rng.random::<bool>() {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        }
        Field::Complex => Complex64::i().powu(rng.random_range(0..4u32)),
    };
    match distribution {
        Distribution::Gaussian => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = match field {
                Field::Real => 0.0,
                Field::Complex => rng.sample(StandardNormal),
            };
            Complex64::new(re, im)
        }
        Distribution::Sign => unit(rng),
        Distribution::SparseSign => {
            if rng.random::<bool>() {
                Complex64::new(0.0, 0.0)
            } else {
                unit(rng)
            }
        }
    }
}

pub(crate) fn random_form_with<R: Rng + ?Sized>(
    rng: &mut R,
    field: Field,
    rows: usize,
    cols: usize,
    distribution: Distribution,
) -> Result<BilinearForm> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("{rows}x{cols}: both dimensions must be >= 1")));
    }
    let entries = (0..rows * cols)
        .map(|_| random_scalar(rng, field, distribution))
        .collect();
    BilinearForm::new(field, rows, cols, entries)
}

/// A random `rows x cols` form, deterministic in `seed`.
pub fn random_form(
    field: Field,
    rows: usize,
    cols: usize,
    distribution: Distribution,
    seed: u64,
) -> Result<BilinearForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_form_with(&mut rng, field, rows, cols, distribution)
}
