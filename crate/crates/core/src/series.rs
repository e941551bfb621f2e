//! Residue-series evaluation.
//!
//! Closing the contour to the right picks up the poles of the lower numerator
//! factors `Γ(b_h − β_h s)` at `s = (b_h + r)/β_h` (with a minus sign, the loop
//! is clockwise); closing to the left picks up the poles of the upper numerator
//! factors `Γ(1 − a_h + α_h s)` at `s = (a_h − 1 − r)/α_h`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::convergence::{compute_delta, compute_mu, compute_nabla, compute_nu};
use crate::error::{Error, Result};
use crate::gamma_kernel::{log_gamma_unchecked, nearest_pole};
use crate::integrand::{exp_or_zero, log_phi, principal_ln, SINGULARITY_TOL};
use crate::params::{
    is_near_integer, validate, Factor, FactorKind, IFunctionParams, Violation, INTEGER_TOL,
};
use crate::quadrature::{check_tol, Diagnostics, EvalResult, Method};

/// Terms generated per pole family unless told otherwise.
pub const DEFAULT_TERMS: usize = 200;
/// Largest pole order handled by the Laurent-coefficient path.
pub const MAX_POLE_ORDER: u32 = 6;
/// Two pole locations closer than this are treated as one.
const COINCIDENCE_TOL: f64 = 1e-9;
/// Sample count on the circle used for Laurent coefficients.
const CIRCLE_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Poles to the right, powers `z^{(b+r)/β}`; converges for small `|z|`.
    Inside,
    /// Poles to the left, powers `z^{(a−1−r)/α}`; converges for large `|z|`.
    Outside,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::Inside => "inside",
            Region::Outside => "outside",
        }
    }

    fn pole_kind(&self) -> FactorKind {
        match self {
            Region::Inside => FactorKind::LowerNumerator,
            Region::Outside => FactorKind::UpperNumerator,
        }
    }

    /// Factor kinds whose singular points lie on the residue side.
    fn same_side(&self, kind: FactorKind) -> bool {
        match self {
            Region::Inside => matches!(
                kind,
                FactorKind::LowerNumerator | FactorKind::UpperDenominator
            ),
            Region::Outside => matches!(
                kind,
                FactorKind::UpperNumerator | FactorKind::LowerDenominator
            ),
        }
    }

    /// `−1` for the clockwise loop on the right, `+1` on the left.
    fn orientation(&self) -> f64 {
        match self {
            Region::Inside => -1.0,
            Region::Outside => 1.0,
        }
    }
}

/// One term `coefficient · z^{exponent} · (Ln z)^{log_power}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesTerm {
    #[serde(serialize_with = "crate::ser::complex")]
    pub exponent: Complex64,
    pub log_power: u32,
    #[serde(serialize_with = "crate::ser::complex")]
    pub coefficient: Complex64,
    /// Label of the gamma factor whose pole generated the term.
    pub family: String,
    /// Index of that factor within its group (0-based).
    pub index: usize,
    /// Pole number within the family.
    pub r: u32,
}

impl SeriesTerm {
    pub fn value_at(&self, ln_z: Complex64) -> Complex64 {
        if self.coefficient == Complex64::new(0.0, 0.0) {
            return self.coefficient;
        }
        self.coefficient * (self.exponent * ln_z).exp() * ln_z.powu(self.log_power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Truncation {
    pub terms_per_family: usize,
    /// Largest `|coefficient|` among the terms at the last pole index.
    pub last_term_magnitude: f64,
    /// Pole candidates at the end of the scan that contributed nothing
    /// (cancelled by denominator zeros). A long run means the series is finite.
    pub trailing_empty: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesExpansion {
    pub region: Region,
    pub terms: Vec<SeriesTerm>,
    pub truncation: Truncation,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub terms_used: usize,
}

/// Trailing empty candidates after which a series is taken to terminate.
const FINITE_RUN: usize = 8;
/// Consecutive small terms required before stopping.
const STOP_WINDOW: usize = 3;

impl SeriesExpansion {
    fn empty(region: Region, terms_per_family: usize, warning: &str) -> Self {
        Self {
            region,
            terms: Vec::new(),
            truncation: Truncation {
                terms_per_family,
                last_term_magnitude: 0.0,
                trailing_empty: terms_per_family,
            },
            warnings: vec![warning.to_string()],
        }
    }

    fn families(&self) -> usize {
        let mut labels: Vec<&str> = self.terms.iter().map(|t| t.family.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        labels.len().max(1)
    }

    /// Sums the terms in order of increasing `|z^{exponent}|`, stopping once
    /// the last few are below `tol·|sum|` and shrinking geometrically. The
    /// remainder is bounded by `|t|ρ/(1−ρ)` per family.
    pub fn evaluate(&self, z: Complex64, tol: f64) -> Result<SeriesValue> {
        check_tol(tol)?;
        if z.norm() == 0.0 {
            return Err(Error::Domain("z ≠ 0 is required".into()));
        }
        let ln_z = principal_ln(z);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut recent: Vec<f64> = Vec::new();
        let mut used = 0;
        let mut tail = None;
        let mut i = 0;
        while i < self.terms.len() {
            // terms sharing an exponent (log powers of one pole) form a group
            let s0 = self.terms[i].exponent;
            let mut group = Complex64::new(0.0, 0.0);
            let mut mag = 0.0;
            while i < self.terms.len() && self.terms[i].exponent == s0 {
                let v = self.terms[i].value_at(ln_z);
                group += v;
                mag += v.norm();
                i += 1;
            }
            used = i;
            if !(group.re.is_finite() && group.im.is_finite()) {
                return Err(Error::Numerical(format!(
                    "series term at exponent {s0} is not finite"
                )));
            }
            sum += group;
            abs_sum += mag;
            if mag == 0.0 {
                continue;
            }
            recent.push(mag);
            let n = recent.len();
            if n >= STOP_WINDOW {
                let w = &recent[n - STOP_WINDOW..];
                let rho = w
                    .windows(2)
                    .map(|p| p[1] / p[0])
                    .fold(0.0f64, f64::max);
                if rho < 1.0 && w.iter().all(|&x| x <= tol * sum.norm()) {
                    tail = Some(mag * rho / (1.0 - rho) * self.families() as f64);
                    break;
                }
            }
        }
        let tail = match tail {
            Some(t) => t,
            None if self.terms.is_empty() || self.truncation.trailing_empty >= FINITE_RUN => 0.0,
            None => {
                return Err(Error::NonConvergent(format!(
                    "{} series not converged after {} terms per family (last term {:.3e}, partial sum {:.3e})",
                    self.region.name(),
                    self.truncation.terms_per_family,
                    recent.last().copied().unwrap_or(0.0),
                    sum.norm()
                )))
            }
        };
        Ok(SeriesValue {
            value: sum,
            abs_error_estimate: tail + 16.0 * f64::EPSILON * abs_sum,
            terms_used: used,
        })
    }
}

pub fn residue_series_inside(params: &IFunctionParams, terms: usize) -> Result<SeriesExpansion> {
    simple_series(params, Region::Inside, terms)
}

pub fn residue_series_outside(params: &IFunctionParams, terms: usize) -> Result<SeriesExpansion> {
    simple_series(params, Region::Outside, terms)
}

/// Rejects parameter sets where a pole of one numerator family meets a pole of
/// the other; no contour separates them.
fn check_procedure_hypotheses(params: &IFunctionParams) -> Result<()> {
    let violations = validate(params);
    if violations.is_empty() {
        return Ok(());
    }
    if violations
        .iter()
        .all(|v| matches!(v, Violation::SingularityCoincidence { .. }))
    {
        let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::ProcedureViolation(text.join("; ")));
    }
    Err(Error::InvalidParams(violations))
}

fn pole_factors(params: &IFunctionParams, region: Region) -> Vec<Factor> {
    params
        .factors()
        .filter(|f| f.kind == region.pole_kind())
        .collect()
}

fn simple_series(params: &IFunctionParams, region: Region, terms: usize) -> Result<SeriesExpansion> {
    check_procedure_hypotheses(params)?;
    let families = pole_factors(params, region);
    if families.is_empty() {
        let msg = match region {
            Region::Inside => "no lower poles (m = 0)",
            Region::Outside => "no upper poles (n = 0)",
        };
        return Ok(SeriesExpansion::empty(region, terms, msg));
    }
    for f in &families {
        if (f.triple.exponent - 1.0).abs() > INTEGER_TOL {
            return Err(Error::HigherOrderPole(format!(
                "{} has power {}; its poles are not simple (use quadrature or the coincident-pole series)",
                f.label(),
                f.triple.exponent
            )));
        }
    }
    if let Some((x, y, s)) = first_coincidence(&families, terms) {
        return Err(Error::HigherOrderPole(format!(
            "{s} (poles of {x} and {y} coincide)"
        )));
    }

    let warnings = branch_warnings(params, region);
    let mut out = Vec::with_capacity(families.len() * terms);
    let mut last_mag = 0.0f64;
    for f in &families {
        for r in 0..terms as u32 {
            let s0 = f.singular_point(r);
            let coefficient = simple_residue(params, f, r, s0)?;
            if r as usize + 1 == terms {
                last_mag = last_mag.max(coefficient.norm());
            }
            out.push(SeriesTerm {
                exponent: s0,
                log_power: 0,
                coefficient,
                family: f.label(),
                index: f.index,
                r,
            });
        }
    }
    sort_terms(&mut out, region);
    let trailing_empty = out
        .iter()
        .rev()
        .take_while(|t| t.coefficient == Complex64::new(0.0, 0.0))
        .count();
    Ok(SeriesExpansion {
        region,
        terms: out,
        truncation: Truncation {
            terms_per_family: terms,
            last_term_magnitude: last_mag,
            trailing_empty,
        },
        warnings,
    })
}

/// Residue coefficient at a simple pole `s0` of factor `pole` (power 1):
/// `(−1)^r / (r!·slope)` times every other factor, evaluated in log space.
/// Already carries the loop orientation.
fn simple_residue(params: &IFunctionParams, pole: &Factor, r: u32, s0: Complex64) -> Result<Complex64> {
    let mut ln = Complex64::new(0.0, 0.0);
    for f in params.factors() {
        if f.kind == pole.kind && f.index == pole.index {
            continue;
        }
        let w = f.argument(s0);
        if nearest_pole(w, SINGULARITY_TOL).is_some() {
            if f.is_numerator() {
                let msg = format!(
                    "pole r = {r} of {} at s = {s0} meets a pole of {}",
                    pole.label(),
                    f.label()
                );
                return Err(if f.kind == pole.kind {
                    Error::HigherOrderPole(msg)
                } else {
                    Error::ProcedureViolation(msg)
                });
            }
            return Ok(Complex64::new(0.0, 0.0));
        }
        ln += f.signed_power() * log_gamma_unchecked(w);
    }
    let (_, slope) = pole.linear_map();
    let ln_fact = log_gamma_unchecked(Complex64::new(r as f64 + 1.0, 0.0)).re;
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(exp_or_zero(ln - ln_fact) * (sign / slope.abs()))
}

fn first_coincidence(families: &[Factor], terms: usize) -> Option<(String, String, Complex64)> {
    let mut points: Vec<(Complex64, usize)> = Vec::new();
    for (k, f) in families.iter().enumerate() {
        for r in 0..terms as u32 {
            points.push((f.singular_point(r), k));
        }
    }
    points.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[j].0.re - points[i].0.re > COINCIDENCE_TOL * points[i].0.norm().max(1.0) {
                break;
            }
            if close(points[i].0, points[j].0) {
                let (a, b) = (points[i].1, points[j].1);
                return Some((families[a].label(), families[b].label(), points[i].0));
            }
        }
    }
    None
}

fn close(x: Complex64, y: Complex64) -> bool {
    (x - y).norm() <= COINCIDENCE_TOL * x.norm().max(1.0)
}

/// Non-integer powers on the residue side put branch points among the
/// enclosed singularities; the residue sum then ignores their cut
/// contributions.
fn branch_warnings(params: &IFunctionParams, region: Region) -> Vec<String> {
    params
        .factors()
        .filter(|f| region.same_side(f.kind) && !f.is_numerator() && !f.triple.has_integer_exponent())
        .map(|f| {
            format!(
                "{} has a non-integer power; its branch points lie in the residue region and are not accounted for",
                f.label()
            )
        })
        .collect()
}

fn sort_terms(terms: &mut [SeriesTerm], region: Region) {
    terms.sort_by(|x, y| {
        let by_re = x.exponent.re.total_cmp(&y.exponent.re);
        let by_re = if region == Region::Outside {
            by_re.reverse()
        } else {
            by_re
        };
        by_re
            .then(x.exponent.im.total_cmp(&y.exponent.im))
            .then(x.log_power.cmp(&y.log_power))
    });
}

/// Residue series allowing poles of any order up to six, produced where
/// poles of the same side coincide or carry integer powers above one.
///
/// The order of a candidate pole is the number of numerator poles minus
/// denominator zeros there. Laurent coefficients of `φ` about a pole are taken
/// with the trapezoidal rule on a circle around it, which converges
/// geometrically for analytic periodic integrands.
pub fn coincident_pole_series(
    params: &IFunctionParams,
    region: Region,
    terms: usize,
) -> Result<SeriesExpansion> {
    check_procedure_hypotheses(params)?;
    for f in params.factors() {
        if region.same_side(f.kind) && !f.triple.has_integer_exponent() {
            return Err(Error::Precondition(format!(
                "{} has non-integer power {}; poles become branch points",
                f.label(),
                f.triple.exponent
            )));
        }
    }
    let families = pole_factors(params, region);
    if families.is_empty() {
        let msg = match region {
            Region::Inside => "no lower poles (m = 0)",
            Region::Outside => "no upper poles (n = 0)",
        };
        return Ok(SeriesExpansion::empty(region, terms, msg));
    }

    let mut candidates: Vec<(Complex64, usize, u32)> = Vec::new();
    for (k, f) in families.iter().enumerate() {
        for r in 0..terms as u32 {
            candidates.push((f.singular_point(r), k, r));
        }
    }
    let mut dummy: Vec<SeriesTerm> = candidates
        .iter()
        .map(|&(s, k, r)| SeriesTerm {
            exponent: s,
            log_power: 0,
            coefficient: Complex64::new(0.0, 0.0),
            family: String::new(),
            index: k,
            r,
        })
        .collect();
    sort_terms(&mut dummy, region);
    let mut points: Vec<(Complex64, usize, u32)> = Vec::new();
    for t in dummy {
        if !points.iter().rev().take(64).any(|p| close(p.0, t.exponent)) {
            points.push((t.exponent, t.index, t.r));
        }
    }

    let sign = region.orientation();
    let mut out = Vec::new();
    let mut trailing_empty = 0;
    let mut last_mag = 0.0f64;
    for (s0, k, r) in points {
        let pole = &families[k];
        let (order, contributors) = pole_order(params, s0)?;
        if order <= 0 {
            trailing_empty += 1;
            continue;
        }
        trailing_empty = 0;
        if order as u32 > MAX_POLE_ORDER {
            return Err(Error::UnsupportedOrder(order as u32));
        }
        let mag_before = out.len();
        if order == 1 && contributors == 1 && (pole.triple.exponent - 1.0).abs() <= INTEGER_TOL {
            out.push(SeriesTerm {
                exponent: s0,
                log_power: 0,
                coefficient: simple_residue(params, pole, r, s0)?,
                family: pole.label(),
                index: pole.index,
                r,
            });
        } else {
            let laurent = laurent_principal_part(params, s0, order as usize)?;
            let mut fact = 1.0;
            for (j, c) in laurent.iter().enumerate() {
                if j > 0 {
                    fact *= j as f64;
                }
                out.push(SeriesTerm {
                    exponent: s0,
                    log_power: j as u32,
                    coefficient: *c * (sign / fact),
                    family: pole.label(),
                    index: pole.index,
                    r,
                });
            }
        }
        if r as usize + 1 == terms {
            for t in &out[mag_before..] {
                last_mag = last_mag.max(t.coefficient.norm());
            }
        }
    }
    sort_terms(&mut out, region);
    let mut warnings = Vec::new();
    if out.is_empty() {
        warnings.push("every candidate pole is cancelled by a denominator zero".to_string());
    }
    Ok(SeriesExpansion {
        region,
        terms: out,
        truncation: Truncation {
            terms_per_family: terms,
            last_term_magnitude: last_mag,
            trailing_empty,
        },
        warnings,
    })
}

/// Net pole order of `φ` at `s0` and the number of numerator factors with a
/// pole there.
fn pole_order(params: &IFunctionParams, s0: Complex64) -> Result<(i64, usize)> {
    let mut order = 0i64;
    let mut contributors = 0;
    for f in params.factors() {
        let w = f.argument(s0);
        if nearest_pole(w, COINCIDENCE_TOL * w.norm().max(1.0)).is_none() {
            continue;
        }
        if !f.triple.has_integer_exponent() {
            return Err(Error::ProcedureViolation(format!(
                "branch point of {} (non-integer power) coincides with a pole at s = {s0}",
                f.label()
            )));
        }
        let k = f.triple.exponent.round() as i64;
        if f.is_numerator() {
            order += k;
            contributors += 1;
        } else {
            order -= k;
        }
    }
    Ok((order, contributors))
}

/// `[c_{−1}, c_{−2}, …, c_{−order}]` of `φ(s) = Σ c_k (s − s0)^k`.
fn laurent_principal_part(
    params: &IFunctionParams,
    s0: Complex64,
    order: usize,
) -> Result<Vec<Complex64>> {
    let rho = 0.5 * singularity_distance(params, s0).min(2.0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); order];
    for k in 0..CIRCLE_NODES {
        let theta = 2.0 * PI * k as f64 / CIRCLE_NODES as f64;
        let d = Complex64::from_polar(rho, theta);
        let g = exp_or_zero(log_phi(params, s0 + d).map_err(|e| {
            Error::Numerical(format!("Laurent circle around {s0} hit a singularity: {e}"))
        })?);
        let mut dp = d;
        for c in coeffs.iter_mut() {
            *c += g * dp;
            dp *= d;
        }
    }
    for c in coeffs.iter_mut() {
        *c /= CIRCLE_NODES as f64;
    }
    Ok(coeffs)
}

/// Distance from `s0` to the nearest singularity of `φ` other than `s0`
/// itself: poles of integer-power numerators and branch cuts of
/// non-integer-power factors.
fn singularity_distance(params: &IFunctionParams, s0: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for f in params.factors() {
        let (_, slope) = f.linear_map();
        let w = f.argument(s0);
        let d = if f.triple.has_integer_exponent() {
            if !f.is_numerator() {
                continue;
            }
            let r0 = (-w.re).round().max(0.0);
            let mut d = f64::INFINITY;
            for r in [0.0, (r0 - 1.0).max(0.0), r0, r0 + 1.0] {
                let dist = (w + r).norm();
                if dist > COINCIDENCE_TOL * w.norm().max(1.0) {
                    d = d.min(dist);
                }
            }
            d
        } else if w.re <= 0.0 {
            w.im.abs()
        } else {
            w.norm()
        };
        best = best.min(d / slope.abs());
    }
    best
}

/// Evaluates by residues in the given region: simple poles when possible,
/// otherwise the coincident-pole path.
pub fn eval_series(
    params: &IFunctionParams,
    z: Complex64,
    region: Region,
    tol: f64,
) -> Result<EvalResult> {
    let expansion = match simple_series(params, region, DEFAULT_TERMS) {
        Ok(e) => e,
        Err(Error::HigherOrderPole(_)) => coincident_pole_series(params, region, DEFAULT_TERMS)?,
        Err(e) => return Err(e),
    };
    let v = expansion.evaluate(z, tol)?;
    Ok(EvalResult {
        value: v.value,
        abs_error_estimate: v.abs_error_estimate,
        method: Method::Series,
        diagnostics: Diagnostics {
            series_terms: Some(v.terms_used),
            warnings: expansion.warnings,
            ..Default::default()
        },
    })
}

/// `c = b_j/β_j` minimizing `Re(b_j/β_j)` over `j ≤ m`; `I(z) ∼ z^c` as `z → 0`.
pub fn small_z_order(params: &IFunctionParams) -> Result<Complex64> {
    params
        .lower_numerator()
        .iter()
        .map(|t| t.a / t.alpha)
        .reduce(|best, c| if c.re < best.re { c } else { best })
        .ok_or_else(|| Error::Precondition("m = 0: no lower poles, no small-z order".into()))
}

/// Leading term `A·(Ln Bz)^{∇−1}/(∇−1)!` of the logarithmic expansion valid
/// when `μ = 0` and `∇` is a positive integer, with `B = e^{−iπΔ/2}/ν`.
pub fn procedure1_leading(params: &IFunctionParams, z: Complex64) -> Result<EvalResult> {
    let phase = Complex64::from_polar(1.0, -PI * compute_delta(params) / 2.0);
    procedure1_leading_with(params, z, phase)
}

/// As [`procedure1_leading`] with an explicit phase in `B = phase/ν`.
pub fn procedure1_leading_with(
    params: &IFunctionParams,
    z: Complex64,
    phase: Complex64,
) -> Result<EvalResult> {
    let mut failures = Vec::new();
    if params
        .upper
        .iter()
        .chain(&params.lower)
        .any(|t| t.a.im != 0.0)
    {
        failures.push("all a_j, b_j must be real".to_string());
    }
    let mu = compute_mu(params);
    if mu.abs() > 1e-12 {
        failures.push(format!("μ = {mu} must vanish"));
    }
    let nabla = compute_nabla(params);
    let k = nabla.round();
    if !(k >= 1.0 && (nabla - k).abs() <= 1e-9) {
        failures.push(format!("∇ = {nabla} must be a positive integer"));
    }
    let bz = phase / compute_nu(params) * z;
    if !(bz.re > 0.0 && bz.im.abs() <= 1e-12 * bz.norm()) {
        failures.push(format!("Bz = {bz} must be real and positive"));
    }
    if !failures.is_empty() {
        return Err(Error::Precondition(failures.join("; ")));
    }

    let a = procedure1_constant(params);
    let power = k as i32 - 1;
    let fact: f64 = (1..=power).map(f64::from).product();
    let value = a * bz.re.ln().powi(power) / fact;
    Ok(EvalResult {
        value,
        abs_error_estimate: f64::INFINITY,
        method: Method::Series,
        diagnostics: Diagnostics {
            warnings: vec![
                "leading-order asymptotic: only the first term of the logarithmic series".into(),
            ],
            ..Default::default()
        },
    })
}

/// The constant
/// `A = e^{iπ[Σ_{j≤m} B_j(b_j−½) − Σ_{j>n} A_j(a_j−½)]}
///      · (2π)^{−½(Σ_{j≤m}B_j − Σ_{j>m}B_j + Σ_{j≤n}A_j − Σ_{j>n}A_j)}
///      · Π_j β_j^{B_j(b_j−½)} · Π_j α_j^{A_j(½−a_j)}`.
pub fn procedure1_constant(params: &IFunctionParams) -> Complex64 {
    let phase: f64 = params
        .lower_numerator()
        .iter()
        .map(|t| t.exponent * (t.a.re - 0.5))
        .sum::<f64>()
        - params
            .upper_denominator()
            .iter()
            .map(|t| t.exponent * (t.a.re - 0.5))
            .sum::<f64>();
    let count: f64 = params
        .factors()
        .map(|f| f.signed_power())
        .sum();
    let scale: f64 = params
        .lower
        .iter()
        .map(|t| t.exponent * (t.a.re - 0.5) * t.alpha.ln())
        .sum::<f64>()
        + params
            .upper
            .iter()
            .map(|t| t.exponent * (0.5 - t.a.re) * t.alpha.ln())
            .sum::<f64>();
    // the phase is a multiple of π in exact arithmetic more often than not;
    // reduce it first so that e.g. e^{−3iπ} comes out as exactly −1
    let reduced = phase.rem_euclid(2.0);
    let unit = if is_near_integer(2.0 * reduced, 1e-12) {
        match (2.0 * reduced).round() as i64 {
            0 | 4 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, PI * reduced)
    };
    unit * ((-0.5 * count) * (2.0 * PI).ln() + scale).exp()
}
