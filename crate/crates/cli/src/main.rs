use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ifunction::convergence::analyze;
use ifunction::params::reduce;
use ifunction::quadrature::{eval_contour_a, eval_with, EvalResult, MethodChoice};
use ifunction::series::{coincident_pole_series, residue_series_inside, residue_series_outside, Region};
use ifunction::special_cases::{
    from_g_function, from_h_function, lrc_density, SpecialCase,
};
use ifunction::{Error, IFunctionParams};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ifunc", version, about = "Evaluate and analyze I-functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,

    /// Absolute error target.
    #[arg(long, default_value_t = 1e-10, global = true)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Quadrature,
    Series,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    Inside,
    Outside,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence parameters and contour admissibility at z.
    Analyze {
        params: PathBuf,
        /// "re[,im]" or "mag@argdeg".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Value of I(z).
    Eval {
        params: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Abscissa of the integration line (quadrature only).
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
    },
    /// Residue-series expansion, optionally summed at z.
    Series {
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = RegionArg::Inside)]
        region: RegionArg,
        /// Poles per family.
        #[arg(long, default_value_t = 200)]
        terms: usize,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Cancel matching numerator/denominator triples.
    Reduce { params: PathBuf },
    /// Quadrature and series side by side; exit 1 when they disagree.
    Compare {
        params: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Named special cases.
    Special {
        #[command(subcommand)]
        kind: Special,
    },
}

#[derive(Subcommand)]
enum Special {
    /// Free energy of the Gaussian model.
    FreeEnergy {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Feynman integral g(z).
    FeynmanG {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        n: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        /// Normalizing constant.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// One term (ln 1/λ)^{k−1}/Γ(k) of the likelihood-ratio density.
    LrcTerm {
        #[arg(long)]
        order: f64,
        #[arg(long)]
        lambda: f64,
    },
    /// Likelihood-ratio density from caller-supplied constants.
    LrcDensity {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        sample_size: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        k: f64,
        /// Comma-separated B_r coefficients.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<f64>,
        #[arg(long)]
        lambda: f64,
    },
    /// Parameters of an H-function; pairs as "a:alpha,a:alpha".
    HFunction {
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        upper: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        lower: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Parameters of a G-function; shifts comma-separated.
    GFunction {
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
    document: Option<Value>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
            document: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::Domain(_) => 2,
            Error::NoAdmissibleMethod(_)
            | Error::NonConvergent(_)
            | Error::Contour(_)
            | Error::HigherOrderPole(_)
            | Error::ProcedureViolation(_)
            | Error::Precondition(_)
            | Error::UnsupportedOrder(_) => 3,
            Error::Numerical(_) | Error::Singularity { .. } => 4,
        };
        Self {
            code,
            message: e.to_string(),
            document: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => {
            emit(&doc, cli.output);
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(doc) = &f.document {
                emit(doc, cli.output);
            }
            eprintln!("ifunc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

// A closed pipe (`ifunc ... | head`) is not an error worth a panic.
fn emit(doc: &Value, output: Output) {
    let _ = writeln!(io::stdout().lock(), "{}", render(doc, output));
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(Failure::usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    let tol = cli.tol;
    match &cli.command {
        Command::Analyze { params, z } => {
            let p = load(params)?;
            let z = parse_z(z)?;
            to_value(&analyze(&p, z)?)
        }
        Command::Eval {
            params,
            z,
            method,
            sigma,
        } => {
            let p = load(params)?;
            let z = parse_z(z)?;
            let result = match (method, sigma) {
                (MethodArg::Series, Some(_)) | (MethodArg::Auto, Some(_)) => {
                    return Err(Failure::usage("--sigma applies to --method quadrature only"))
                }
                (MethodArg::Quadrature, Some(s)) => {
                    nonzero(z)?;
                    eval_contour_a(&p, z, Some(*s), tol)?
                }
                (MethodArg::Quadrature, None) => eval_with(&p, z, tol, MethodChoice::Quadrature)?,
                (MethodArg::Series, None) => eval_with(&p, z, tol, MethodChoice::Series)?,
                (MethodArg::Auto, None) => eval_with(&p, z, tol, MethodChoice::Auto)?,
            };
            to_value(&result)
        }
        Command::Series {
            params,
            region,
            terms,
            z,
        } => {
            let p = load(params)?;
            let region = match region {
                RegionArg::Inside => Region::Inside,
                RegionArg::Outside => Region::Outside,
            };
            let simple = match region {
                Region::Inside => residue_series_inside(&p, *terms),
                Region::Outside => residue_series_outside(&p, *terms),
            };
            let expansion = match simple {
                Err(Error::HigherOrderPole(_)) => coincident_pole_series(&p, region, *terms)?,
                other => other?,
            };
            let mut doc = to_value(&expansion)?;
            if let Some(z) = z {
                let v = expansion.evaluate(parse_z(z)?, tol)?;
                doc["value"] = json!([v.value.re, v.value.im]);
                doc["abs_error_estimate"] = json!(v.abs_error_estimate);
                doc["terms_used"] = json!(v.terms_used);
            }
            Ok(doc)
        }
        Command::Reduce { params } => to_value(&reduce(&load(params)?)),
        Command::Compare { params, z } => compare(&load(params)?, parse_z(z)?, tol),
        Command::Special { kind } => special(kind, tol),
    }
}

fn compare(p: &IFunctionParams, z: Complex64, tol: f64) -> Result<Value, Failure> {
    nonzero(z)?;
    let q = eval_with(p, z, tol, MethodChoice::Quadrature);
    let s = eval_with(p, z, tol, MethodChoice::Series);
    let side = |r: &Result<EvalResult, Error>| match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let mut doc = json!({ "quadrature": side(&q), "series": side(&s) });
    match (&q, &s) {
        (Ok(a), Ok(b)) => {
            let diff = (a.value - b.value).norm();
            let bound = a.abs_error_estimate + b.abs_error_estimate;
            let agree = diff <= bound;
            doc["difference"] = json!(diff);
            doc["combined_estimate"] = json!(bound);
            doc["agree"] = json!(agree);
            if agree {
                Ok(doc)
            } else {
                Err(Failure {
                    code: 1,
                    message: format!("methods disagree: |Δ| = {diff:e} > {bound:e}"),
                    document: Some(doc),
                })
            }
        }
        _ => Err(Failure {
            code: 3,
            message: "both methods are needed for a comparison".into(),
            document: Some(doc),
        }),
    }
}

fn special(kind: &Special, tol: f64) -> Result<Value, Failure> {
    let case = match *kind {
        Special::FreeEnergy { d, epsilon } => SpecialCase::GaussianFreeEnergy { d, epsilon },
        Special::FeynmanG { tau, n, mu, m, k, z } => SpecialCase::FeynmanG { tau, n, mu, m, k, z },
        Special::LrcTerm { order, lambda } => SpecialCase::LrcDensityTerm { order, lambda },
        Special::LrcDensity {
            p,
            sample_size,
            k,
            ref b,
            lambda,
        } => return to_value(&lrc_density(p, sample_size, k, b, lambda, tol)?),
        Special::HFunction {
            ref upper,
            ref lower,
            m,
            n,
        } => {
            let params = from_h_function(&parse_pairs(upper)?, &parse_pairs(lower)?, m, n)?;
            return to_value(&params);
        }
        Special::GFunction { ref a, ref b, m, n } => {
            let params = from_g_function(&parse_list(a)?, &parse_list(b)?, m, n)?;
            return to_value(&params);
        }
    };
    let result = case.evaluate(tol)?;
    let mut doc = to_value(&result)?;
    doc["case"] = to_value(&case)?;
    doc["params"] = to_value(&case.params()?)?;
    let pre = case.prefactor()?;
    doc["prefactor"] = json!([pre.re, pre.im]);
    let x = case.argument();
    doc["argument"] = json!([x.re, x.im]);
    Ok(doc)
}

fn load(path: &PathBuf) -> Result<IFunctionParams, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let params: IFunctionParams = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("cannot parse {}: {e}", path.display())))?;
    Ok(params.validated()?)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure {
        code: 4,
        message: format!("serialization failed: {e}"),
        document: None,
    })
}

fn nonzero(z: Complex64) -> Result<(), Failure> {
    if z.norm() == 0.0 {
        Err(Failure::usage("z ≠ 0 is required"))
    } else {
        Ok(())
    }
}

/// `"re"`, `"re,im"` or `"mag@argdeg"`. Arguments that are multiples of 90°
/// map to exact axis points so that e.g. `0.5@180` has `arg z = π`.
fn parse_z(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::usage(format!("cannot parse z = {s:?}; expected re[,im] or mag@argdeg"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let z = if let Some((mag, deg)) = s.split_once('@') {
        let (mag, deg) = (num(mag)?, num(deg)?);
        let quarter = deg / 90.0;
        if quarter == quarter.round() {
            match (quarter.round() as i64).rem_euclid(4) {
                0 => Complex64::new(mag, 0.0),
                1 => Complex64::new(0.0, mag),
                2 => Complex64::new(-mag, 0.0),
                _ => Complex64::new(0.0, -mag),
            }
        } else {
            Complex64::from_polar(mag, deg * PI / 180.0)
        }
    } else if let Some((re, im)) = s.split_once(',') {
        Complex64::new(num(re)?, num(im)?)
    } else {
        Complex64::new(num(s)?, 0.0)
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Failure::usage(format!("cannot parse number {t:?}")))
        })
        .collect()
}

fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, alpha) = t
                .split_once(':')
                .ok_or_else(|| Failure::usage(format!("expected a:alpha, got {t:?}")))?;
            let v = parse_list(&format!("{a},{alpha}"))?;
            Ok((v[0], v[1]))
        })
        .collect()
}

fn render(doc: &Value, output: Output) -> String {
    match output {
        Output::Json => serde_json::to_string_pretty(doc).expect("JSON values always serialize"),
        Output::Text => {
            let mut lines = Vec::new();
            flatten("", doc, &mut lines);
            lines.join("\n")
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            if items.len() == 2 && items.iter().all(Value::is_number) {
                out.push(format!("{prefix}: {}", v));
            } else {
                for (i, x) in items.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), x, out);
                }
            }
        }
        _ => out.push(format!("{prefix}: {v}")),
    }
}
