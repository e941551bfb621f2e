//! Contour quadrature along the vertical line `Re s = σ` and the method
//! dispatcher.
//!
//! With `s = σ + it` we have `ds = i dt`, so `I(z) = (2π)^{-1} ∫ f(σ+it) dt`.
//! The line is cut at `±T` where an envelope bound `C|t|^{−κ}e^{−λ|t|}` on the
//! discarded tails drops below `tol/2`; the remaining finite integral is done by
//! globally adaptive Gauss-Kronrod (21 points) to `tol/2`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::convergence::{analyze, Admissibility, ConvergenceReport};
use crate::error::{Error, Result};
use crate::integrand::{exp_or_zero, log_integrand, log_phi_derivative, principal_ln};
use crate::params::{invert, IFunctionParams};
use crate::series::{eval_series, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quadrature,
    Series,
    Specialized,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub sigma: Option<f64>,
    /// `[T_below, T_above]`: truncation points of the two half-lines.
    pub truncation: Option<[f64; 2]>,
    pub nodes: usize,
    pub series_terms: Option<usize>,
    /// For special-case wrappers: the method used on the underlying I-function.
    pub underlying: Option<Method>,
    /// Methods tried and rejected before the one that produced the value.
    pub skipped: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult {
    #[serde(serialize_with = "crate::ser::complex")]
    pub value: Complex64,
    /// Serialized as `null` when infinite (leading-order asymptotics).
    pub abs_error_estimate: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// Hard cap on the truncation point.
pub const MAX_TRUNCATION: f64 = 1e6;
const INITIAL_TRUNCATION: f64 = 8.0;
const MAX_SEGMENTS: usize = 400_000;
const MAX_INITIAL_PANELS: f64 = 100_000.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct QuadratureOptions {
    /// Abscissa of the line; `None` uses the report's default.
    pub sigma: Option<f64>,
    /// Proceed when contour (a) is only marginally admissible.
    pub allow_marginal: bool,
}

pub fn eval_contour_a(
    params: &IFunctionParams,
    z: Complex64,
    sigma: Option<f64>,
    tol: f64,
) -> Result<EvalResult> {
    let opts = QuadratureOptions {
        sigma,
        allow_marginal: false,
    };
    eval_contour_a_with(params, z, tol, &opts)
}

pub fn eval_contour_a_with(
    params: &IFunctionParams,
    z: Complex64,
    tol: f64,
    opts: &QuadratureOptions,
) -> Result<EvalResult> {
    check_tol(tol)?;
    let report = analyze(params, z)?;
    match report.contour_a.status {
        Admissibility::Yes => {}
        Admissibility::Marginal if opts.allow_marginal => {}
        _ if report.strip.is_empty() => {
            return Err(Error::Contour(report.contour_a.reason.clone()));
        }
        _ => return Err(Error::NonConvergent(report.contour_a.reason.clone())),
    }
    let mut warnings = report.warnings.clone();
    let sigma = match opts.sigma {
        Some(s) => {
            if !report.strip.contains(s) {
                return Err(Error::Contour(format!(
                    "σ = {s} does not separate the numerator singularities (strip {:?}..{:?})",
                    report.strip.left, report.strip.right
                )));
            }
            if let Some(half) = report.sigma_half_line {
                if !half.contains(s) {
                    return Err(Error::NonConvergent(format!(
                        "σ = {s} gives ∇ + σμ ≤ 1 on the boundary |arg z| = Δπ/2"
                    )));
                }
            }
            s
        }
        None => report
            .default_sigma
            .ok_or_else(|| Error::Contour("empty σ-strip".into()))?,
    };
    if report.contour_a.status == Admissibility::Marginal {
        warnings.push(format!(
            "contour (a) is only marginally admissible: {}",
            report.contour_a.reason
        ));
    }

    let ln_z = principal_ln(z);
    let line = Line {
        params,
        ln_z,
        sigma,
    };
    let env = Envelope::new(&report, sigma);
    let target = 2.0 * PI * tol;

    let real_symmetric = params
        .upper
        .iter()
        .chain(&params.lower)
        .all(|t| t.a.im == 0.0)
        && z.im == 0.0
        && z.re > 0.0;

    let (t_above, tail_above) = truncate(&line, &env, 1.0, target / 4.0)?;
    let (t_below, tail_below) = if real_symmetric {
        (t_above, tail_above)
    } else {
        truncate(&line, &env, -1.0, target / 4.0)?
    };

    let mut nodes = 0;
    let (value, quad_err) = if real_symmetric {
        let upper = integrate_half_line(&line, 1.0, t_above, target / 4.0, &mut nodes)?;
        if upper.hit_limit {
            warnings.push("segment limit reached before the requested tolerance".into());
        }
        (
            Complex64::new(2.0 * upper.value.re, 0.0),
            2.0 * upper.error,
        )
    } else {
        let up = integrate_half_line(&line, 1.0, t_above, target / 4.0, &mut nodes)?;
        let down = integrate_half_line(&line, -1.0, t_below, target / 4.0, &mut nodes)?;
        if up.hit_limit || down.hit_limit {
            warnings.push("segment limit reached before the requested tolerance".into());
        }
        (up.value + down.value, up.error + down.error)
    };

    let value = value / (2.0 * PI);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Numerical("quadrature produced a non-finite value".into()));
    }
    Ok(EvalResult {
        value,
        abs_error_estimate: (quad_err + tail_above + tail_below) / (2.0 * PI),
        method: Method::Quadrature,
        diagnostics: Diagnostics {
            sigma: Some(sigma),
            truncation: Some([t_below, t_above]),
            nodes,
            warnings,
            ..Default::default()
        },
    })
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// The integrand restricted to the line, `t ↦ φ(σ+it) z^{σ+it}`.
struct Line<'a> {
    params: &'a IFunctionParams,
    ln_z: Complex64,
    sigma: f64,
}

impl Line<'_> {
    fn log_at(&self, t: f64) -> Result<Complex64> {
        log_integrand(self.params, self.ln_z, Complex64::new(self.sigma, t)).map_err(|e| match e {
            Error::Singularity { factor, .. } => Error::Contour(format!(
                "singularity of {factor} on the line Re s = {}",
                self.sigma
            )),
            other => other,
        })
    }

    fn at(&self, t: f64) -> Result<Complex64> {
        Ok(exp_or_zero(self.log_at(t)?))
    }

    /// Local phase velocity `|d/dt arg f|`.
    fn phase_rate(&self, t: f64) -> f64 {
        let d = log_phi_derivative(self.params, Complex64::new(self.sigma, t)) + self.ln_z;
        d.re.abs()
    }
}

/// `|f(σ+it)| ≲ C|t|^{−κ}e^{−λ|t|}` on each half-line.
struct Envelope {
    kappa: f64,
    lambda_above: f64,
    lambda_below: f64,
}

impl Envelope {
    fn new(report: &ConvergenceReport, sigma: f64) -> Self {
        let base = PI * report.delta / 2.0;
        Self {
            kappa: report.nabla + sigma * report.mu,
            lambda_above: base + report.arg_z,
            lambda_below: base - report.arg_z,
        }
    }

    fn lambda(&self, dir: f64) -> f64 {
        if dir > 0.0 {
            self.lambda_above
        } else {
            self.lambda_below
        }
    }

    fn ln_shape(&self, t: f64, lambda: f64) -> f64 {
        -self.kappa * t.ln() - lambda * t
    }

    /// `∫_T^∞ t^{−κ}e^{−λt} dt / (T^{−κ}e^{−λT})`, or `None` if divergent.
    fn tail_factor(&self, t: f64, lambda: f64) -> Option<f64> {
        let k = self.kappa;
        let lam = if lambda.abs() < 1e-12 { 0.0 } else { lambda };
        if lam < 0.0 {
            return None;
        }
        if lam == 0.0 {
            return (k > 1.0).then(|| t / (k - 1.0));
        }
        if k < 0.0 {
            let d = lam + k / t;
            return (d > 0.0).then(|| 1.0 / d);
        }
        let mut f = 1.0 / lam;
        if k > 1.0 {
            f = f.min(t / (k - 1.0));
        }
        Some(f)
    }
}

/// Doubles `T` until the envelope bound on `∫_T^∞ |f|` is below `target`.
/// Returns `(T, bound)` for the half-line in direction `dir`.
fn truncate(line: &Line, env: &Envelope, dir: f64, target: f64) -> Result<(f64, f64)> {
    let lambda = env.lambda(dir);
    let mut t = INITIAL_TRUNCATION;
    loop {
        let factor = env.tail_factor(t, lambda).ok_or_else(|| {
            Error::NonConvergent(format!(
                "envelope |t|^{{−{}}}·e^{{−{}|t|}} is not integrable",
                env.kappa, lambda
            ))
        })?;
        let mut ln_c = f64::NEG_INFINITY;
        for frac in [0.5, 0.75, 1.0] {
            let u = frac * t;
            let lf = line.log_at(dir * u)?.re;
            ln_c = ln_c.max(lf - env.ln_shape(u, lambda));
        }
        let bound = if ln_c == f64::NEG_INFINITY {
            0.0
        } else {
            (ln_c + env.ln_shape(t, lambda)).exp() * factor
        };
        if bound < target {
            return Ok((t, bound));
        }
        if t >= MAX_TRUNCATION {
            return Err(Error::NonConvergent(format!(
                "tail bound {bound:.3e} still exceeds {target:.3e} at the cap T = {MAX_TRUNCATION:e}"
            )));
        }
        t = (2.0 * t).min(MAX_TRUNCATION);
    }
}

struct HalfLine {
    value: Complex64,
    error: f64,
    hit_limit: bool,
}

/// Integrates `u ↦ f(σ + i·dir·u)` over `[0, T]`.
fn integrate_half_line(
    line: &Line,
    dir: f64,
    t_max: f64,
    target: f64,
    nodes: &mut usize,
) -> Result<HalfLine> {
    let mut eval = |u: f64| {
        *nodes += 1;
        line.at(dir * u)
    };
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for (a, b) in initial_panels(line, dir, t_max) {
        let seg = gk21(&mut eval, a, b)?;
        total_err += seg.error;
        heap.push(seg);
    }
    let mut hit_limit = false;
    while total_err > target {
        if heap.len() >= MAX_SEGMENTS {
            hit_limit = true;
            break;
        }
        let worst = heap.pop().expect("nonempty heap");
        if worst.error <= worst.floor || (worst.b - worst.a) <= 1e-12 * worst.b.abs().max(1.0) {
            // roundoff-limited: no further splitting helps
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk21(&mut eval, worst.a, mid)?;
        let right = gk21(&mut eval, mid, worst.b)?;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.value).sum::<Complex64>();
    let error = segs.iter().map(|s| s.error).sum();
    Ok(HalfLine {
        value,
        error,
        hit_limit,
    })
}

/// Breakpoints `0, 1, 2, 4, …` refined so each panel spans at most about one
/// local oscillation.
fn initial_panels(line: &Line, dir: f64, t_max: f64) -> Vec<(f64, f64)> {
    let min_width = t_max / MAX_INITIAL_PANELS;
    let mut out = Vec::new();
    let mut a = 0.0;
    while a < t_max {
        let omega = line.phase_rate(dir * a);
        let mut w = a.max(1.0);
        if omega > 0.0 && omega.is_finite() {
            w = w.min(2.0 * PI / omega);
        }
        let b = (a + w.max(min_width)).min(t_max);
        out.push((a, b));
        a = b;
    }
    out
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_354_200,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], …, XGK[9]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Error level attributable to rounding alone.
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn gk21<F: FnMut(f64) -> Result<Complex64>>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut resk = fc * WGK[10];
    let mut resg = Complex64::new(0.0, 0.0);
    let mut resabs = fc.norm() * WGK[10];
    let mut pairs = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for (k, pair) in pairs.iter_mut().enumerate() {
        let x = h * XGK[k];
        let f1 = f(c - x)?;
        let f2 = f(c + x)?;
        resk += (f1 + f2) * WGK[k];
        resabs += (f1.norm() + f2.norm()) * WGK[k];
        if k % 2 == 1 {
            resg += (f1 + f2) * WG[k / 2];
        }
        *pair = (f1, f2);
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[10];
    for (k, (f1, f2)) in pairs.iter().enumerate() {
        resasc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[k];
    }
    let habs = h.abs();
    resabs *= habs;
    resasc *= habs;
    let mut err = ((resk - resg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    Ok(Segment {
        a,
        b,
        value: resk * h,
        error: err,
        floor,
    })
}

/// Explicit choice of evaluation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Quadrature,
    Series,
}

/// Evaluates `I(z)`, choosing a method automatically.
///
/// Order of preference: residue series when `|z| < min(1, ν)` and the series
/// converges; quadrature on the vertical line when admissible; any residue
/// series that converges; finally the same sequence at `1/z` on the inverted
/// parameters.
pub fn eval(params: &IFunctionParams, z: Complex64, tol: f64) -> Result<EvalResult> {
    eval_with(params, z, tol, MethodChoice::Auto)
}

pub fn eval_with(
    params: &IFunctionParams,
    z: Complex64,
    tol: f64,
    choice: MethodChoice,
) -> Result<EvalResult> {
    let params = params.clone().validated()?;
    check_tol(tol)?;
    if z.norm() == 0.0 || !z.norm().is_finite() {
        return Err(Error::Domain("z ≠ 0 is required".into()));
    }
    match choice {
        MethodChoice::Quadrature => eval_contour_a(&params, z, None, tol),
        MethodChoice::Series => {
            let report = analyze(&params, z)?;
            let mut reasons = Vec::new();
            match series_attempts(&params, z, tol, &report, &mut reasons, false) {
                Some(r) => Ok(r),
                None => Err(Error::NoAdmissibleMethod(reasons)),
            }
        }
        MethodChoice::Auto => {
            let mut reasons = Vec::new();
            if let Some(r) = attempt(&params, z, tol, &mut reasons)? {
                return Ok(r);
            }
            let inv = invert(&params);
            let w = z.inv();
            let mut inv_reasons = Vec::new();
            if let Some(mut r) = attempt(&inv, w, tol, &mut inv_reasons)? {
                r.diagnostics.skipped = reasons;
                r.diagnostics.skipped.extend(inv_reasons);
                r.diagnostics
                    .warnings
                    .push("evaluated on the inverted parameters at 1/z".into());
                return Ok(r);
            }
            reasons.extend(inv_reasons.into_iter().map(|s| format!("at 1/z: {s}")));
            Err(Error::NoAdmissibleMethod(reasons))
        }
    }
}

fn attempt(
    params: &IFunctionParams,
    z: Complex64,
    tol: f64,
    reasons: &mut Vec<String>,
) -> Result<Option<EvalResult>> {
    let report = analyze(params, z)?;
    let small = z.norm() < report.nu.min(1.0);
    if small && report.contour_b.is_yes() {
        if let Some(r) = series_attempt(params, z, tol, Region::Inside, reasons) {
            return Ok(Some(with_skipped(r, reasons)));
        }
    }
    if report.contour_a.is_yes() {
        match eval_contour_a(params, z, None, tol) {
            Ok(r) => return Ok(Some(with_skipped(r, reasons))),
            Err(e) => reasons.push(format!("quadrature: {e}")),
        }
    } else {
        reasons.push(format!("quadrature: {}", report.contour_a.reason));
    }
    Ok(series_attempts(params, z, tol, &report, reasons, small).map(|r| with_skipped(r, reasons)))
}

fn series_attempts(
    params: &IFunctionParams,
    z: Complex64,
    tol: f64,
    report: &ConvergenceReport,
    reasons: &mut Vec<String>,
    inside_tried: bool,
) -> Option<EvalResult> {
    if report.contour_b.is_yes() {
        if !inside_tried {
            if let Some(r) = series_attempt(params, z, tol, Region::Inside, reasons) {
                return Some(r);
            }
        }
    } else {
        reasons.push(format!("inside series: {}", report.contour_b.reason));
    }
    if report.contour_c.is_yes() {
        if let Some(r) = series_attempt(params, z, tol, Region::Outside, reasons) {
            return Some(r);
        }
    } else {
        reasons.push(format!("outside series: {}", report.contour_c.reason));
    }
    None
}

fn series_attempt(
    params: &IFunctionParams,
    z: Complex64,
    tol: f64,
    region: Region,
    reasons: &mut Vec<String>,
) -> Option<EvalResult> {
    match eval_series(params, z, region, tol) {
        Ok(r) => Some(r),
        Err(e) => {
            reasons.push(format!("{} series: {e}", region.name()));
            None
        }
    }
}

fn with_skipped(mut r: EvalResult, reasons: &[String]) -> EvalResult {
    r.diagnostics.skipped = reasons.to_vec();
    r
}
