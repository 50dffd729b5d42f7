//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a verification check failed, or a search exceeded its ceiling |
//! | 2 | inadmissible exponents |
//! | 3 | an output file could not be written |
//! | 4 | unparseable arguments or input files |
//! | 5 | any other error (capacity exceeded, undefined ratio) |
//!
//! Outputs are byte-for-byte reproducible for identical flags. The default
//! thread count can be set with the `LITTLEWOOD_THREADS` environment variable.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exponents::{classify_region, constant, ExponentPair, ExtExponent, FOUR_OVER_PI, TWO_OVER_SQRT_PI};
use crate::forms::BilinearForm;
use crate::khinchin::{
    e_m_average, rademacher_average, rademacher_ceiling, blei_ceiling, steinhaus_ceiling,
    steinhaus_expectation, CoefficientVector, SteinhausMethod,
};
use crate::opnorm::{complex_norm_bounds, real_sup_norm_capped, DEFAULT_REAL_CAP};
use crate::search::{self, KhinchinModel, SearchConfig, SearchResult};
use crate::verify::{self, Suite, VerifyConfig};
use crate::Field;

pub const THREADS_ENV: &str = "LITTLEWOOD_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;
pub const EXIT_UNWRITABLE: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_OTHER: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "littlewood", version, about = "Sharp constants for the anisotropic Littlewood 4/3 inequality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the optimal constant (or its known interval) at (a, b).
    Constant {
        /// Inner exponent: integer, decimal, p/q or inf.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Outer exponent.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value = "real")]
        field: String,
    },
    /// Write the (1/a, 1/b) region map as CSV and SVG.
    RegionMap {
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long, default_value = "region_map.csv")]
        csv: PathBuf,
        #[arg(long, default_value = "region_map.svg")]
        svg: PathBuf,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, default_value = "fast")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Multiply every ceiling by this factor (fault injection).
        #[arg(long, default_value_t = 1.0)]
        ceiling_scale: f64,
    },
    /// Operator norm of a matrix given as JSON.
    Norm {
        #[arg(long)]
        input: PathBuf,
        /// Treat the matrix as real or complex (defaults to the field in the file).
        #[arg(long)]
        field: Option<String>,
        /// Torus grid order for complex norms.
        #[arg(long = "M", default_value_t = 16)]
        m: usize,
        /// Push the complex lower bound up by phase ascent.
        #[arg(long)]
        refine: bool,
    },
    /// Rademacher, E_M or Steinhaus average of a coefficient vector.
    Khinchin {
        /// Comma-separated coefficients, e.g. `1,1` or `1,0.5-2i`.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, value_enum, default_value_t = ModelArg::Rademacher)]
        model: ModelArg,
        #[arg(long = "M", default_value_t = 4)]
        m: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
        method: MethodArg,
        /// Quadrature nodes per angle.
        #[arg(long = "Q", default_value_t = 256)]
        q: usize,
        /// Increasing list of grid orders for `--method em-limit`.
        #[arg(long, default_value = "64,128,256,512")]
        schedule: String,
        /// Also report (sum |a_n|^r)^(1/r) / average and its ceiling.
        #[arg(long)]
        r: Option<String>,
    },
    /// Hill-climbing search for extremal ratios.
    Search {
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Mixed)]
        objective: ObjectiveArg,
        #[arg(long, default_value = "real")]
        field: String,
        #[arg(long, default_value = "4/3")]
        a: String,
        #[arg(long, default_value = "4/3")]
        b: String,
        /// Exponent of the Khinchin objectives.
        #[arg(long, default_value = "2")]
        r: String,
        #[arg(long = "M", default_value_t = 4)]
        m: usize,
        /// `KxN` for forms; for coefficient vectors only N is used.
        #[arg(long, default_value = "2x2")]
        dims: String,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0.25)]
        scale: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        grid_m: usize,
        /// Stop starting restarts after this many seconds (breaks reproducibility).
        #[arg(long)]
        budget_seconds: Option<f64>,
        /// Search every shape up to `--dims` and print one summary per shape.
        #[arg(long)]
        sweep: bool,
        /// Save the result as a JSON checkpoint.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Print a saved checkpoint instead of searching.
        #[arg(long, conflicts_with = "checkpoint")]
        load: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Rademacher,
    Em,
    Steinhaus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Quadrature,
    EmLimit,
    Bessel,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    Mixed,
    Rademacher,
    Em,
    Steinhaus,
}

/// Maps a library error to the exit code table above.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inadmissible { .. } => EXIT_INADMISSIBLE,
        Error::Io(_) => EXIT_UNWRITABLE,
        Error::Parse { .. }
        | Error::InvalidExponent(_)
        | Error::InvalidArgument(_)
        | Error::Shape(_)
        | Error::FieldMismatch(_) => EXIT_PARSE,
        Error::Capacity { .. } | Error::UndefinedRatio(_) => EXIT_OTHER,
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PARSE,
            };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // fails harmlessly if the pool was already built
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Constant { a, b, field } => cmd_constant(&a, &b, &field, out),
        Command::RegionMap { resolution, csv, svg } => cmd_region_map(resolution, &csv, &svg, out),
        Command::Verify {
            suite,
            seed,
            report,
            ceiling_scale,
        } => {
            let cfg = VerifyConfig {
                suite: suite.parse()?,
                seed,
                ceiling_scale,
            };
            cmd_verify(&cfg, report.as_deref(), out)
        }
        Command::Norm {
            input,
            field,
            m,
            refine,
        } => cmd_norm(&input, field.as_deref(), m, refine, out),
        Command::Khinchin {
            coeffs,
            model,
            m,
            method,
            q,
            schedule,
            r,
        } => cmd_khinchin(&coeffs, model, m, method, q, &schedule, r.as_deref(), out),
        Command::Search {
            objective,
            field,
            a,
            b,
            r,
            m,
            dims,
            restarts,
            steps,
            scale,
            seed,
            grid_m,
            budget_seconds,
            sweep,
            checkpoint,
            load,
        } => {
            if let Some(path) = load {
                let res = search::checkpoint_load(&path)?;
                out.write_all(res.to_json()?.as_bytes())?;
                return Ok(EXIT_OK);
            }
            let dims = parse_dims(&dims)?;
            let cfg = SearchConfig {
                restarts,
                steps,
                scale,
                seed,
                dims,
                budget_seconds,
                grid_m,
            };
            let field: Field = field.parse()?;
            let results = match objective {
                ObjectiveArg::Mixed => {
                    let pair = ExponentPair::new(a.parse()?, b.parse()?);
                    if sweep {
                        search::dimension_sweep(field, pair, &cfg, dims)?
                    } else {
                        vec![search::maximize_ratio(field, pair, &cfg)?]
                    }
                }
                khinchin => {
                    let model = match khinchin {
                        ObjectiveArg::Rademacher => KhinchinModel::Rademacher,
                        ObjectiveArg::Em => KhinchinModel::Em { m },
                        _ => KhinchinModel::Steinhaus {
                            method: SteinhausMethod::BesselTransform,
                        },
                    };
                    let r: ExtExponent = r.parse()?;
                    let lens: Vec<usize> = if sweep { (1..=dims.1).collect() } else { vec![dims.1] };
                    lens.into_iter()
                        .map(|n| search::maximize_khinchin_ratio(model.clone(), r, n, &cfg))
                        .collect::<Result<_>>()?
                }
            };
            cmd_search_output(&results, sweep, checkpoint.as_deref(), out, err)
        }
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::parse("dims", format!("expected `KxN`, got `{s}`"));
    let (k, n) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((k.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

/// Recognizes `1`, `2/sqrt(pi)`, `4/pi`, `2^(p/q)` and `(4/pi)^(p/q)` with
/// `q <= 24`, to within `1e-12`.
pub fn closed_form(x: f64) -> Option<String> {
    const TOL: f64 = 1e-12;
    if (x - 1.0).abs() <= TOL {
        return Some("1".into());
    }
    if (x - TWO_OVER_SQRT_PI).abs() <= TOL {
        return Some("2/sqrt(pi)".into());
    }
    for (base, name) in [(2.0_f64, "2"), (FOUR_OVER_PI, "(4/pi)")] {
        let e = x.ln() / base.ln();
        for q in 1..=24i64 {
            let p = (e * q as f64).round() as i64;
            if p == 0 || gcd(p.unsigned_abs(), q as u64) != 1 {
                continue;
            }
            if (base.powf(p as f64 / q as f64) - x).abs() <= TOL {
                return Some(match (p, q) {
                    (1, 1) if name == "2" => "2".into(),
                    (1, 1) => "4/pi".into(),
                    (p, 1) => format!("{name}^{p}"),
                    (p, q) => format!("{name}^({p}/{q})"),
                });
            }
        }
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn show(x: f64) -> String {
    let digits = crate::json::fmt17(x);
    match closed_form(x) {
        Some(form) => format!("{form} = {digits}"),
        None => digits,
    }
}

fn cmd_constant(a: &str, b: &str, field: &str, out: &mut dyn Write) -> Result<i32> {
    let pair = ExponentPair::new(a.parse()?, b.parse()?);
    let field: Field = field.parse()?;
    let report = constant(pair, field)?;
    writeln!(out, "field: {field}")?;
    writeln!(out, "(a, b) = ({a}, {b})")?;
    writeln!(
        out,
        "region: {} (shared boundaries resolve with priority RII > RIII > RIV > RI)",
        classify_region(pair)
    )?;
    match report.exact {
        Some(x) => writeln!(out, "constant: {}", show(x))?,
        None => writeln!(
            out,
            "constant in [{}, {}]",
            show(report.lower),
            show(report.upper)
        )?,
    }
    writeln!(out, "provenance: {}", report.provenance)?;
    Ok(EXIT_OK)
}

fn cmd_region_map(resolution: usize, csv: &std::path::Path, svg: &std::path::Path, out: &mut dyn Write) -> Result<i32> {
    let rows = crate::region_map::write_region_map(resolution, csv, svg)?;
    writeln!(
        out,
        "wrote {} rows to {} and the figure to {}",
        rows.len(),
        csv.display(),
        svg.display()
    )?;
    Ok(EXIT_OK)
}

fn cmd_verify(cfg: &VerifyConfig, report_path: Option<&std::path::Path>, out: &mut dyn Write) -> Result<i32> {
    let report = verify::run(cfg)?;
    for c in &report.checks {
        writeln!(
            out,
            "{:>2} {:<26} {} margin {}  {}",
            c.id,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            crate::json::fmt17(c.margin),
            c.details
        )?;
        for note in &c.notes {
            writeln!(out, "   note: {note}")?;
        }
    }
    let suite = match cfg.suite {
        Suite::Fast => "fast",
        Suite::Full => "full",
    };
    writeln!(
        out,
        "{suite} suite, seed {}: {}",
        cfg.seed,
        if report.passed { "all checks passed".to_string() } else {
            let names: Vec<&str> = report.failed().iter().map(|c| c.name.as_str()).collect();
            format!("FAILED: {}", names.join(", "))
        }
    )?;
    if let Some(path) = report_path {
        crate::json::write_atomic(path, &report.to_json()?)?;
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_norm(input: &std::path::Path, field: Option<&str>, m: usize, refine: bool, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::parse("input", format!("{}: {e}", input.display())))?;
    let mut form = BilinearForm::from_json(&text)?;
    if let Some(f) = field {
        match (f.parse::<Field>()?, form.field()) {
            (Field::Complex, Field::Real) => form = form.to_complex(),
            (Field::Real, Field::Complex) => {
                return Err(Error::FieldMismatch(
                    "the input matrix is complex; use --field complex".into(),
                ))
            }
            _ => {}
        }
    }
    let value = match form.field() {
        Field::Real => {
            let (norm, signs) = real_sup_norm_capped(&form, DEFAULT_REAL_CAP)?;
            json!({ "field": "real", "norm": norm, "argmax_signs": signs.0 })
        }
        Field::Complex => {
            let b = complex_norm_bounds(&form, m, refine)?;
            json!({
                "field": "complex",
                "M": b.m,
                "refined": refine,
                "lower": b.lower,
                "upper": b.upper,
                "discrete_norm": b.discrete_norm,
                "r_m": b.r_m,
                "argmax_angles": b.argmax,
            })
        }
    };
    out.write_all(crate::json::to_string(&value)?.as_bytes())?;
    Ok(EXIT_OK)
}

/// Parses `x`, `x+yi`, `x-yi`, `yi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::parse("coeffs", format!("cannot parse coefficient `{s}`"));
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_coeffs(s: &str) -> Result<CoefficientVector> {
    let values = s.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    let field = if values.iter().all(|z| z.im == 0.0) {
        Field::Real
    } else {
        Field::Complex
    };
    CoefficientVector::new(field, values)
}

#[allow(clippy::too_many_arguments)]
fn cmd_khinchin(
    coeffs: &str,
    model: ModelArg,
    m: usize,
    method: MethodArg,
    q: usize,
    schedule: &str,
    r: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32> {
    let c = parse_coeffs(coeffs)?;
    let r: Option<ExtExponent> = r.map(str::parse).transpose()?;
    let (result, ceiling) = match model {
        ModelArg::Rademacher => (rademacher_average(&c)?, r.map(|r| Ok(rademacher_ceiling(r)))),
        ModelArg::Em => (e_m_average(&c, m)?, r.map(|r| blei_ceiling(m, r))),
        ModelArg::Steinhaus => {
            let method = match method {
                MethodArg::Quadrature => SteinhausMethod::Quadrature { nodes: q },
                MethodArg::EmLimit => SteinhausMethod::EmLimit {
                    schedule: schedule
                        .split(',')
                        .map(|x| x.trim().parse().map_err(|_| Error::parse("schedule", format!("not an integer: `{x}`"))))
                        .collect::<Result<_>>()?,
                },
                MethodArg::Bessel => SteinhausMethod::BesselTransform,
            };
            (steinhaus_expectation(&c, &method)?, r.map(|r| Ok(steinhaus_ceiling(r))))
        }
    };
    let mut value = serde_json::to_value(&result).map_err(|e| Error::parse("output", e.to_string()))?;
    if let (Some(r), Some(ceiling)) = (r, ceiling) {
        if r.value() < 2.0 {
            return Err(Error::InvalidArgument(format!("need r in [2, inf], got {r}")));
        }
        if result.value == 0.0 {
            return Err(Error::UndefinedRatio("the average is zero".into()));
        }
        value["r"] = serde_json::to_value(r).expect("exponents serialize");
        value["ratio"] = json!(c.lr_norm(r) / result.value);
        value["ceiling"] = json!(ceiling?);
    }
    out.write_all(crate::json::to_string(&value)?.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_search_output(
    results: &[SearchResult],
    sweep: bool,
    checkpoint: Option<&std::path::Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let mut code = EXIT_OK;
    for res in results {
        if res.violates_ceiling() {
            writeln!(
                err,
                "ceiling exceeded: best ratio {} > ceiling {} ({})",
                crate::json::fmt17(res.best_ratio),
                crate::json::fmt17(res.ceiling),
                res.ceiling_provenance
            )?;
            code = EXIT_FAILED;
        }
    }
    if sweep {
        let rows: Vec<_> = results
            .iter()
            .map(|r| {
                json!({
                    "dims": r.config.dims,
                    "best_ratio": r.best_ratio,
                    "pessimistic_ratio": r.pessimistic_ratio,
                    "ceiling": r.ceiling,
                })
            })
            .collect();
        out.write_all(crate::json::to_string(&rows)?.as_bytes())?;
    } else {
        out.write_all(results[0].to_json()?.as_bytes())?;
    }
    if let Some(path) = checkpoint {
        let best = results
            .iter()
            .fold(&results[0], |b, r| if r.best_ratio > b.best_ratio { r } else { b });
        search::checkpoint_save(best, path)?;
    }
    Ok(code)
}
