//! Stochastic searches for extremal ratios.
//!
//! Each restart draws a random start, then hill-climbs: propose a move,
//! accept it only if the ratio strictly increases. Moves are Gaussian
//! perturbations of every entry (the step size shrinks by 0.95 after each
//! rejection and resets after an acceptance), zeroing a single entry, or
//! equalizing the moduli of all nonzero entries. The last two reach the
//! sparse, equal-modulus extremizers exactly instead of only approaching them.
//!
//! Restart `i` is seeded with `seed + i`, so results do not depend on how
//! restarts are scheduled across threads.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{complex_constant_bounds, real_constant, ExponentPair, ExtExponent};
use crate::forms::{mixed_norm, random_scalar, BilinearForm, Distribution};
use crate::khinchin::{
    blei_ceiling, e_m_average, rademacher_average, rademacher_ceiling, steinhaus_ceiling,
    steinhaus_expectation, CoefficientVector, SteinhausMethod,
};
use crate::opnorm::{complex_norm_bounds, real_sup_norm};
use crate::Field;

pub const CHECKPOINT_VERSION: u32 = 1;

/// Violations smaller than this are treated as rounding.
pub const CEILING_TOL: f64 = 1e-9;

const ANNEAL: f64 = 0.95;
const MAX_REDRAWS: usize = 100;
const STARTS: [Distribution; 3] = [
    Distribution::Gaussian,
    Distribution::Sign,
    Distribution::SparseSign,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub steps: usize,
    pub scale: f64,
    pub seed: u64,
    /// `(rows, cols)` of searched forms; `cols` is the length of coefficient vectors.
    pub dims: (usize, usize),
    /// Stop starting new restarts after this many seconds. Runs that hit the
    /// budget are not reproducible.
    pub budget_seconds: Option<f64>,
    /// Torus grid used to bound complex operator norms.
    pub grid_m: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 20,
            steps: 200,
            scale: 0.25,
            seed: 0,
            dims: (2, 2),
            budget_seconds: None,
            grid_m: 16,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be >= 1".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidArgument("perturbation scale must be > 0".into()));
        }
        if self.dims.0 == 0 || self.dims.1 == 0 {
            return Err(Error::Shape("search dimensions must be >= 1".into()));
        }
        Ok(())
    }
}

/// Random variables behind a Khinchin-type average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "model")]
pub enum KhinchinModel {
    Rademacher,
    #[serde(rename = "e-m")]
    Em { m: usize },
    Steinhaus { method: SteinhausMethod },
}

/// What a search maximizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Objective {
    /// `mixed_norm(A, (a, b)) / ||A||`.
    MixedRatio { field: Field, pair: ExponentPair },
    /// `(sum |a_n|^r)^(1/r) / average`.
    Khinchin { model: KhinchinModel, r: ExtExponent },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Form(BilinearForm),
    Coefficients(CoefficientVector),
}

impl Witness {
    fn entries(&self) -> &[Complex64] {
        match self {
            Witness::Form(f) => f.entries(),
            Witness::Coefficients(c) => c.values(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub objective: Objective,
    pub config: SearchConfig,
    /// Largest ratio found. For complex forms the denominator is the certified
    /// lower bound of the operator norm, so this over-estimates the true ratio.
    pub best_ratio: f64,
    /// Complex forms only: the ratio with the certified upper bound as
    /// denominator, a valid lower bound for the constant.
    pub pessimistic_ratio: Option<f64>,
    pub witness: Witness,
    pub ceiling: f64,
    pub ceiling_provenance: String,
    pub restarts_run: usize,
    /// `(restart, step)` at which the overall best improved; step 0 is the start point.
    pub improved_at: Vec<(usize, usize)>,
    /// Restarts whose ratio changed under rescaling by more than `1e-12` relative.
    pub scale_check_failures: usize,
}

impl SearchResult {
    /// `best_ratio > ceiling + 1e-9`: either a bug or a counterexample.
    pub fn violates_ceiling(&self) -> bool {
        self.best_ratio > self.ceiling + CEILING_TOL
    }
}

struct Evaluation {
    ratio: f64,
    pessimistic: Option<f64>,
}

/// Evaluates the ratio for the given entries; `None` when the denominator vanishes.
fn evaluate(objective: &Objective, cfg: &SearchConfig, entries: &[Complex64]) -> Result<Option<Evaluation>> {
    match objective {
        Objective::MixedRatio { field, pair } => {
            let (rows, cols) = cfg.dims;
            let form = BilinearForm::new(*field, rows, cols, entries.to_vec())?;
            let num = mixed_norm(&form, *pair).value;
            match field {
                Field::Real => {
                    let den = real_sup_norm(&form)?;
                    Ok((den > 0.0).then(|| Evaluation {
                        ratio: num / den,
                        pessimistic: None,
                    }))
                }
                Field::Complex => {
                    let bounds = complex_norm_bounds(&form, cfg.grid_m, true)?;
                    Ok((bounds.lower > 0.0).then(|| Evaluation {
                        ratio: num / bounds.lower,
                        pessimistic: Some(num / bounds.upper),
                    }))
                }
            }
        }
        Objective::Khinchin { model, r } => {
            let c = CoefficientVector::new(coefficient_field(model), entries.to_vec())?;
            if c.is_zero() {
                return Ok(None);
            }
            let avg = match model {
                KhinchinModel::Rademacher => rademacher_average(&c)?.value,
                KhinchinModel::Em { m } => e_m_average(&c, *m)?.value,
                KhinchinModel::Steinhaus { method } => steinhaus_expectation(&c, method)?.value,
            };
            Ok((avg > 0.0).then(|| Evaluation {
                ratio: c.lr_norm(*r) / avg,
                pessimistic: None,
            }))
        }
    }
}

fn coefficient_field(model: &KhinchinModel) -> Field {
    match model {
        KhinchinModel::Rademacher | KhinchinModel::Em { m: 2 } => Field::Real,
        _ => Field::Complex,
    }
}

fn objective_field(objective: &Objective) -> Field {
    match objective {
        Objective::MixedRatio { field, .. } => *field,
        Objective::Khinchin { model, .. } => coefficient_field(model),
    }
}

fn ceiling(objective: &Objective) -> Result<(f64, String)> {
    match objective {
        Objective::MixedRatio {
            field: Field::Real,
            pair,
        } => {
            let c = real_constant(*pair)?;
            Ok((c.upper, format!("real constant at {pair}: {}", c.provenance)))
        }
        Objective::MixedRatio {
            field: Field::Complex,
            pair,
        } => {
            let c = complex_constant_bounds(*pair)?;
            Ok((
                c.upper,
                format!(
                    "complex constant at {pair}: {}; best_ratio uses the certified lower \
                     norm bound, so it is an upper estimate and is tested against this ceiling",
                    c.provenance
                ),
            ))
        }
        Objective::Khinchin { model, r } => match model {
            KhinchinModel::Rademacher => Ok((
                rademacher_ceiling(*r),
                format!("optimal Rademacher constant 2^(1/r), r = {r}"),
            )),
            KhinchinModel::Em { m } => {
                let text = if *m == 2 {
                    format!("E_2 is the Rademacher average: 2^(1/r), r = {r}")
                } else {
                    format!("(4/pi)^(1/r) / R_M with M = {m}, r = {r}; not known to be sharp")
                };
                Ok((blei_ceiling(*m, *r)?, text))
            }
            KhinchinModel::Steinhaus { .. } => {
                let text = if r.value() == 2.0 {
                    "optimal Steinhaus constant 2/sqrt(pi) at r = 2".to_string()
                } else {
                    format!("(4/pi)^(1/r) with r = {r}; exploratory, no sharp value known")
                };
                Ok((steinhaus_ceiling(*r), text))
            }
        },
    }
}

fn normalize(objective: &Objective, entries: &mut [Complex64]) {
    let norm = match objective {
        Objective::MixedRatio { .. } => entries.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Objective::Khinchin { r, .. } => {
            let mags: Vec<f64> = entries.iter().map(|z| z.norm()).collect();
            crate::forms::lp_norm(&mags, *r)
        }
    };
    if norm > 0.0 {
        for z in entries.iter_mut() {
            *z /= norm;
        }
    }
}

fn propose(rng: &mut ChaCha8Rng, field: Field, current: &[Complex64], scale: f64) -> Vec<Complex64> {
    let mut next = current.to_vec();
    let nonzero: Vec<usize> = (0..next.len()).filter(|&i| next[i].norm() > 0.0).collect();
    let u: f64 = rng.random();
    if u < 0.1 && nonzero.len() > 1 {
        let i = nonzero[rng.random_range(0..nonzero.len())];
        next[i] = Complex64::new(0.0, 0.0);
    } else if u < 0.2 && !nonzero.is_empty() {
        for &i in &nonzero {
            let r = next[i].norm();
            next[i] /= r;
        }
    } else {
        for z in next.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = match field {
                Field::Real => 0.0,
                Field::Complex => rng.sample(StandardNormal),
            };
            *z += Complex64::new(re, im) * scale;
        }
    }
    next
}

struct RestartOutcome {
    restart: usize,
    ratio: f64,
    pessimistic: Option<f64>,
    entries: Vec<Complex64>,
    /// `(step, ratio)` after each accepted improvement.
    trajectory: Vec<(usize, f64)>,
    scale_check_failed: bool,
}

fn run_restart(objective: &Objective, cfg: &SearchConfig, restart: usize) -> Result<Option<RestartOutcome>> {
    let field = objective_field(objective);
    let size = match objective {
        Objective::MixedRatio { .. } => cfg.dims.0 * cfg.dims.1,
        Objective::Khinchin { .. } => cfg.dims.1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let distribution = STARTS[restart % STARTS.len()];

    let mut start = None;
    for _ in 0..MAX_REDRAWS {
        let mut entries: Vec<Complex64> = (0..size)
            .map(|_| random_scalar(&mut rng, field, distribution))
            .collect();
        normalize(objective, &mut entries);
        if let Some(eval) = evaluate(objective, cfg, &entries)? {
            start = Some((entries, eval));
            break;
        }
    }
    let Some((mut current, mut eval)) = start else {
        return Ok(None);
    };

    let scale_check_failed = {
        let lambda = Complex64::new(2.5, 0.0);
        let scaled: Vec<Complex64> = current.iter().map(|z| z * lambda).collect();
        match evaluate(objective, cfg, &scaled)? {
            Some(e) => (e.ratio - eval.ratio).abs() > 1e-12 * eval.ratio,
            None => true,
        }
    };

    let mut trajectory = vec![(0, eval.ratio)];
    let mut scale = cfg.scale;
    for step in 1..=cfg.steps {
        let mut candidate = propose(&mut rng, field, &current, scale);
        normalize(objective, &mut candidate);
        match evaluate(objective, cfg, &candidate)? {
            Some(next) if next.ratio > eval.ratio => {
                current = candidate;
                eval = next;
                trajectory.push((step, eval.ratio));
                scale = cfg.scale;
            }
            _ => scale *= ANNEAL,
        }
    }
    Ok(Some(RestartOutcome {
        restart,
        ratio: eval.ratio,
        pessimistic: eval.pessimistic,
        entries: current,
        trajectory,
        scale_check_failed,
    }))
}

fn run(objective: Objective, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let (ceiling, ceiling_provenance) = ceiling(&objective)?;
    let clock = Instant::now();
    let outcomes: Vec<Option<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            if let Some(limit) = cfg.budget_seconds {
                if clock.elapsed().as_secs_f64() > limit {
                    return Ok(None);
                }
            }
            run_restart(&objective, cfg, restart)
        })
        .collect::<Result<_>>()?;

    let mut best: Option<&RestartOutcome> = None;
    let mut improved_at = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for outcome in outcomes.iter().flatten() {
        for &(step, ratio) in &outcome.trajectory {
            if ratio > running {
                running = ratio;
                improved_at.push((outcome.restart, step));
            }
        }
        if best.is_none_or(|b| outcome.ratio > b.ratio) {
            best = Some(outcome);
        }
    }
    let best = best.ok_or_else(|| {
        Error::UndefinedRatio("no restart produced a form with nonzero denominator".into())
    })?;

    let field = objective_field(&objective);
    let witness = match objective {
        Objective::MixedRatio { .. } => Witness::Form(BilinearForm::new(
            field,
            cfg.dims.0,
            cfg.dims.1,
            best.entries.clone(),
        )?),
        Objective::Khinchin { .. } => {
            Witness::Coefficients(CoefficientVector::new(field, best.entries.clone())?)
        }
    };
    Ok(SearchResult {
        objective,
        config: cfg.clone(),
        best_ratio: best.ratio,
        pessimistic_ratio: best.pessimistic,
        witness,
        ceiling,
        ceiling_provenance,
        restarts_run: outcomes.iter().flatten().count(),
        improved_at,
        scale_check_failures: outcomes
            .iter()
            .flatten()
            .filter(|o| o.scale_check_failed)
            .count(),
    })
}

/// Maximizes `mixed_norm(A, (a, b)) / ||A||` over `cfg.dims` forms.
pub fn maximize_ratio(field: Field, pair: ExponentPair, cfg: &SearchConfig) -> Result<SearchResult> {
    run(Objective::MixedRatio { field, pair }, cfg)
}

/// Maximizes `(sum |a_n|^r)^(1/r) / average` over vectors of length `n`.
/// Rademacher and `E_2` searches use real coefficients, the others complex ones.
pub fn maximize_khinchin_ratio(
    model: KhinchinModel,
    r: ExtExponent,
    n: usize,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    if r.value() < 2.0 {
        return Err(Error::InvalidArgument(format!("need r in [2, inf], got {r}")));
    }
    let cfg = SearchConfig {
        dims: (1, n),
        ..cfg.clone()
    };
    run(Objective::Khinchin { model, r }, &cfg)
}

/// [`maximize_ratio`] for every shape up to `max_dims`, in row-major order.
pub fn dimension_sweep(
    field: Field,
    pair: ExponentPair,
    cfg: &SearchConfig,
    max_dims: (usize, usize),
) -> Result<Vec<SearchResult>> {
    let mut results = Vec::new();
    for rows in 1..=max_dims.0 {
        for cols in 1..=max_dims.1 {
            let cfg = SearchConfig {
                dims: (rows, cols),
                ..cfg.clone()
            };
            results.push(maximize_ratio(field, pair, &cfg)?);
        }
    }
    Ok(results)
}

/// Re-evaluates the stored witness; equals `best_ratio` for an untampered result.
pub fn reevaluate(result: &SearchResult) -> Result<f64> {
    evaluate(&result.objective, &result.config, result.witness.entries())?
        .map(|e| e.ratio)
        .ok_or_else(|| Error::UndefinedRatio("witness has zero denominator".into()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Checkpoint {
    version: u32,
    config: SearchConfig,
    objective: Objective,
    best_ratio: f64,
    pessimistic_ratio: Option<f64>,
    ceiling: f64,
    ceiling_provenance: String,
    witness_kind: WitnessKind,
    witness: BilinearForm,
    restarts_run: usize,
    improved_at: Vec<(usize, usize)>,
    scale_check_failures: usize,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WitnessKind {
    Form,
    Coefficients,
}

impl SearchResult {
    pub fn to_json(&self) -> Result<String> {
        let (witness_kind, witness) = match &self.witness {
            Witness::Form(f) => (WitnessKind::Form, f.clone()),
            Witness::Coefficients(c) => (
                WitnessKind::Coefficients,
                BilinearForm::new(c.field(), 1, c.len(), c.values().to_vec())?,
            ),
        };
        crate::json::to_string(&Checkpoint {
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            objective: self.objective.clone(),
            best_ratio: self.best_ratio,
            pessimistic_ratio: self.pessimistic_ratio,
            ceiling: self.ceiling,
            ceiling_provenance: self.ceiling_provenance.clone(),
            witness_kind,
            witness,
            restarts_run: self.restarts_run,
            improved_at: self.improved_at.clone(),
            scale_check_failures: self.scale_check_failures,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cp: Checkpoint = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::parse(path, e.into_inner().to_string())
        })?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::parse(
                "version",
                format!("unsupported checkpoint version {}", cp.version),
            ));
        }
        let witness = match cp.witness_kind {
            WitnessKind::Form => Witness::Form(cp.witness),
            WitnessKind::Coefficients => Witness::Coefficients(CoefficientVector::new(
                cp.witness.field(),
                cp.witness.entries().to_vec(),
            )?),
        };
        Ok(SearchResult {
            objective: cp.objective,
            config: cp.config,
            best_ratio: cp.best_ratio,
            pessimistic_ratio: cp.pessimistic_ratio,
            witness,
            ceiling: cp.ceiling,
            ceiling_provenance: cp.ceiling_provenance,
            restarts_run: cp.restarts_run,
            improved_at: cp.improved_at,
            scale_check_failures: cp.scale_check_failures,
        })
    }
}

/// Writes the result as a JSON checkpoint (write to a temporary file, then rename).
pub fn checkpoint_save(result: &SearchResult, path: &Path) -> Result<()> {
    crate::json::write_atomic(path, &result.to_json()?)
}

pub fn checkpoint_load(path: &Path) -> Result<SearchResult> {
    SearchResult::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn pair(a: f64, b: f64) -> ExponentPair {
        ExponentPair::from_values(a, b).unwrap()
    }

    #[test]
    fn recovers_littlewood_witness() {
        let cfg = SearchConfig {
            restarts: 50,
            seed: 1,
            ..SearchConfig::default()
        };
        let res = maximize_ratio(Field::Real, pair(4.0 / 3.0, 4.0 / 3.0), &cfg).unwrap();
        assert!(res.best_ratio >= SQRT_2 - 1e-9, "{}", res.best_ratio);
        assert!(!res.violates_ceiling());
        // equal moduli, one sign differing from the others
        let Witness::Form(w) = &res.witness else { panic!() };
        let m = w.max_abs();
        assert!(w.entries().iter().all(|z| (z.norm() - m).abs() < 1e-9 * m));
        let negatives = w.entries().iter().filter(|z| z.re < 0.0).count();
        assert!(negatives % 2 == 1);
    }

    #[test]
    fn region_two_ceiling_is_one() {
        let cfg = SearchConfig {
            restarts: 6,
            steps: 60,
            dims: (4, 4),
            seed: 3,
            ..SearchConfig::default()
        };
        let res = maximize_ratio(Field::Real, pair(3.0, 3.0), &cfg).unwrap();
        assert!(res.best_ratio <= 1.0 + 1e-9);
        let e11 = BilinearForm::single_entry(Field::Real, 4, 4).unwrap();
        let v = mixed_norm(&e11, pair(3.0, 3.0)).value / real_sup_norm(&e11).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn rejects_inadmissible_and_bad_config() {
        let cfg = SearchConfig::default();
        assert!(maximize_ratio(Field::Real, pair(1.0, 1.0), &cfg).is_err());
        let bad = SearchConfig {
            restarts: 0,
            ..SearchConfig::default()
        };
        assert!(maximize_ratio(Field::Real, pair(2.0, 2.0), &bad).is_err());
        assert!(maximize_khinchin_ratio(KhinchinModel::Rademacher, ExtExponent::ONE, 3, &cfg).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = SearchConfig {
            restarts: 4,
            steps: 40,
            seed: 9,
            dims: (3, 3),
            ..SearchConfig::default()
        };
        let p = pair(1.5, 2.5);
        let x = maximize_ratio(Field::Real, p, &cfg).unwrap();
        let y = maximize_ratio(Field::Real, p, &cfg).unwrap();
        assert_eq!(x, y);
        assert_eq!(reevaluate(&x).unwrap(), x.best_ratio);
        assert_eq!(x.scale_check_failures, 0);
    }

    #[test]
    fn rademacher_search_finds_two_equal_coefficients() {
        let cfg = SearchConfig {
            restarts: 12,
            steps: 150,
            seed: 2,
            ..SearchConfig::default()
        };
        let res = maximize_khinchin_ratio(KhinchinModel::Rademacher, ExtExponent::TWO, 8, &cfg).unwrap();
        assert!((res.best_ratio - SQRT_2).abs() < 1e-9, "{}", res.best_ratio);
        let Witness::Coefficients(c) = &res.witness else { panic!() };
        let mags: Vec<f64> = c.magnitudes().into_iter().filter(|&x| x > 1e-9).collect();
        assert_eq!(mags.len(), 2);
        assert!((mags[0] - mags[1]).abs() < 1e-9);

        let res = maximize_khinchin_ratio(KhinchinModel::Rademacher, ExtExponent::INFINITY, 8, &cfg)
            .unwrap();
        assert!((res.best_ratio - 1.0).abs() < 1e-12);
        assert!(!res.violates_ceiling());
    }

    #[test]
    fn checkpoint_round_trip() {
        let cfg = SearchConfig {
            restarts: 3,
            steps: 20,
            seed: 5,
            ..SearchConfig::default()
        };
        let res = maximize_ratio(Field::Real, pair(4.0 / 3.0, 2.0), &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        checkpoint_save(&res, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        assert_eq!(checkpoint_load(&path).unwrap(), res);
        checkpoint_save(&res, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);

        let text = String::from_utf8(first).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(checkpoint_load(&path), Err(Error::Parse { .. })));

        let broken = text.replace("\"best_ratio\"", "\"best_ratio_\"");
        match SearchResult::from_json(&broken) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("best_ratio")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
