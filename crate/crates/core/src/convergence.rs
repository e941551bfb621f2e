//! Convergence parameters `Δ`, `μ`, `∇`, `ν` and contour admissibility.
//!
//! The conditions checked here are sufficient, not necessary: a contour that
//! fails them is reported as "not guaranteed", never as divergent.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{FactorKind, IFunctionParams};

/// Tolerance used for `|arg z| = Δπ/2`, `μ = 0` and `|z| = ν` comparisons.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Admissibility {
    Yes,
    No,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourVerdict {
    pub status: Admissibility,
    pub reason: String,
}

impl ContourVerdict {
    fn new(status: Admissibility, reason: impl Into<String>) -> Self {
        Self {
            status,
            reason: reason.into(),
        }
    }

    pub fn is_yes(&self) -> bool {
        self.status == Admissibility::Yes
    }
}

/// Open interval of abscissae `σ` for a vertical contour. `None` = unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strip {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl Strip {
    pub fn is_empty(&self) -> bool {
        matches!((self.left, self.right), (Some(l), Some(r)) if l >= r)
    }

    pub fn contains(&self, sigma: f64) -> bool {
        self.left.is_none_or(|l| sigma > l) && self.right.is_none_or(|r| sigma < r)
    }

    fn intersect(&self, other: &Strip) -> Strip {
        let max = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) | (None, x) => x,
        };
        let min = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        };
        Strip {
            left: max(self.left, other.left),
            right: min(self.right, other.right),
        }
    }

    /// Midpoint when bounded on both sides, half a unit inside a single bound,
    /// zero when unbounded.
    pub fn pick(&self) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        Some(match (self.left, self.right) {
            (Some(l), Some(r)) => 0.5 * (l + r),
            (Some(l), None) => l + 0.5,
            (None, Some(r)) => r - 0.5,
            (None, None) => 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub delta: f64,
    pub mu: f64,
    pub nabla: f64,
    pub nu: f64,
    /// Principal argument of `z` in `(−π, π]`.
    pub arg_z: f64,
    pub abs_z: f64,
    /// Strip separating the two numerator singularity families.
    pub strip: Strip,
    /// On the boundary `|arg z| = Δπ/2` with `μ ≠ 0`: the σ-range with `∇ + σμ > 1`.
    pub sigma_half_line: Option<Strip>,
    /// Abscissa used by contour quadrature when none is given.
    pub default_sigma: Option<f64>,
    pub contour_a: ContourVerdict,
    pub contour_b: ContourVerdict,
    pub contour_c: ContourVerdict,
    pub warnings: Vec<String>,
}

/// `Δ = Σ_{j≤m} B_jβ_j − Σ_{j>m} B_jβ_j + Σ_{j≤n} A_jα_j − Σ_{j>n} A_jα_j`.
pub fn compute_delta(params: &IFunctionParams) -> f64 {
    params
        .factors()
        .map(|f| {
            let w = f.triple.exponent * f.triple.alpha;
            if f.is_numerator() {
                w
            } else {
                -w
            }
        })
        .sum()
}

/// `μ = Σ_j B_jβ_j − Σ_j A_jα_j`.
pub fn compute_mu(params: &IFunctionParams) -> f64 {
    let lower: f64 = params.lower.iter().map(|t| t.exponent * t.alpha).sum();
    let upper: f64 = params.upper.iter().map(|t| t.exponent * t.alpha).sum();
    lower - upper
}

/// `∇ = Σ_j A_j (Re a_j − 1/2) − Σ_j B_j (Re b_j − 1/2)`.
pub fn compute_nabla(params: &IFunctionParams) -> f64 {
    let upper: f64 = params
        .upper
        .iter()
        .map(|t| t.exponent * (t.a.re - 0.5))
        .sum();
    let lower: f64 = params
        .lower
        .iter()
        .map(|t| t.exponent * (t.a.re - 0.5))
        .sum();
    upper - lower
}

/// `ν = Π_j β_j^{B_jβ_j} / Π_j α_j^{A_jα_j}`, accumulated in log space.
pub fn compute_nu(params: &IFunctionParams) -> f64 {
    let term = |t: &crate::params::GammaTriple| t.exponent * t.alpha * t.alpha.ln();
    let lower: f64 = params.lower.iter().map(term).sum();
    let upper: f64 = params.upper.iter().map(term).sum();
    (lower - upper).exp()
}

/// Principal argument in `(−π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// The open strip `max_j Re(a_j − 1)/α_j < σ < min_j Re(b_j)/β_j` over the
/// numerator groups.
pub fn separating_strip(params: &IFunctionParams) -> Strip {
    let right = params
        .lower_numerator()
        .iter()
        .map(|t| t.a.re / t.alpha)
        .reduce(f64::min);
    let left = params
        .upper_numerator()
        .iter()
        .map(|t| (t.a.re - 1.0) / t.alpha)
        .reduce(f64::max);
    Strip { left, right }
}

/// Extra constraints keeping the line off the branch cuts of denominator
/// factors with non-integer powers (cuts where the gamma argument is ≤ 0).
fn cut_strip(params: &IFunctionParams) -> Strip {
    let mut strip = Strip {
        left: None,
        right: None,
    };
    for f in params.factors() {
        if f.triple.has_integer_exponent() {
            continue;
        }
        let t = f.triple;
        match f.kind {
            FactorKind::LowerDenominator => {
                let bound = (t.a.re - 1.0) / t.alpha;
                strip.left = Some(strip.left.map_or(bound, |l: f64| l.max(bound)));
            }
            FactorKind::UpperDenominator => {
                let bound = t.a.re / t.alpha;
                strip.right = Some(strip.right.map_or(bound, |r: f64| r.min(bound)));
            }
            _ => {}
        }
    }
    strip
}

pub fn analyze(params: &IFunctionParams, z: Complex64) -> Result<ConvergenceReport> {
    if z.norm() == 0.0 || !z.norm().is_finite() {
        return Err(Error::Domain("z must be nonzero and finite".into()));
    }
    let delta = compute_delta(params);
    let mu = compute_mu(params);
    let nabla = compute_nabla(params);
    let nu = compute_nu(params);
    let arg_z = principal_arg(z);
    let abs_z = z.norm();
    let mut warnings = Vec::new();

    let strip = separating_strip(params);
    let cuts = cut_strip(params);
    let mut working = strip.intersect(&cuts);
    if working.is_empty() && !strip.is_empty() {
        warnings.push(
            "contour (a) must cross the branch cut of a denominator factor with non-integer \
             power; values follow the principal log-gamma branch"
                .to_string(),
        );
        working = strip;
    }

    let mu_zero = mu.abs() <= BOUNDARY_TOL;
    let limit = delta * PI / 2.0;
    let mut sigma_half_line = None;

    let contour_a = if strip.is_empty() {
        ContourVerdict::new(
            Admissibility::No,
            "no vertical line separates the numerator singularities",
        )
    } else if delta < -BOUNDARY_TOL {
        ContourVerdict::new(Admissibility::No, format!("Δ = {delta} < 0"))
    } else if arg_z.abs() < limit - BOUNDARY_TOL {
        ContourVerdict::new(Admissibility::Yes, "|arg z| < Δπ/2")
    } else if arg_z.abs() <= limit + BOUNDARY_TOL {
        if mu_zero {
            if nabla > 1.0 + BOUNDARY_TOL {
                ContourVerdict::new(
                    Admissibility::Yes,
                    "|arg z| = Δπ/2, μ = 0 and ∇ > 1: absolutely convergent",
                )
            } else {
                ContourVerdict::new(
                    Admissibility::Marginal,
                    format!("|arg z| = Δπ/2, μ = 0 but ∇ = {nabla} ≤ 1"),
                )
            }
        } else {
            let bound = (1.0 - nabla) / mu;
            let half = if mu > 0.0 {
                Strip {
                    left: Some(bound),
                    right: None,
                }
            } else {
                Strip {
                    left: None,
                    right: Some(bound),
                }
            };
            sigma_half_line = Some(half);
            if strip.intersect(&half).is_empty() {
                ContourVerdict::new(
                    Admissibility::Marginal,
                    "|arg z| = Δπ/2 and no σ in the strip gives ∇ + σμ > 1",
                )
            } else {
                let narrowed = working.intersect(&half);
                working = if narrowed.is_empty() {
                    strip.intersect(&half)
                } else {
                    narrowed
                };
                ContourVerdict::new(
                    Admissibility::Yes,
                    "|arg z| = Δπ/2 with σ chosen so that ∇ + σμ > 1",
                )
            }
        }
    } else {
        ContourVerdict::new(
            Admissibility::No,
            format!("|arg z| = {} exceeds Δπ/2 = {limit}", arg_z.abs()),
        )
    };

    let default_sigma = working.pick();

    let contour_b = if params.q() == 0 {
        ContourVerdict::new(Admissibility::No, "q = 0")
    } else if mu > BOUNDARY_TOL {
        ContourVerdict::new(Admissibility::Yes, "μ > 0")
    } else if mu_zero {
        modulus_verdict(abs_z < nu, abs_z, nu, "<")
    } else {
        ContourVerdict::new(Admissibility::No, format!("μ = {mu} < 0"))
    };

    let contour_c = if params.p() == 0 {
        ContourVerdict::new(Admissibility::No, "p = 0")
    } else if mu < -BOUNDARY_TOL {
        ContourVerdict::new(Admissibility::Yes, "μ < 0")
    } else if mu_zero {
        modulus_verdict(abs_z > nu, abs_z, nu, ">")
    } else {
        ContourVerdict::new(Admissibility::No, format!("μ = {mu} > 0"))
    };

    Ok(ConvergenceReport {
        delta,
        mu,
        nabla,
        nu,
        arg_z,
        abs_z,
        strip,
        sigma_half_line,
        default_sigma,
        contour_a,
        contour_b,
        contour_c,
        warnings,
    })
}

fn modulus_verdict(holds: bool, abs_z: f64, nu: f64, op: &str) -> ContourVerdict {
    if (abs_z - nu).abs() <= BOUNDARY_TOL * nu {
        ContourVerdict::new(Admissibility::Marginal, format!("μ = 0 and |z| = ν = {nu}"))
    } else if holds {
        ContourVerdict::new(Admissibility::Yes, format!("μ = 0 and |z| {op} ν = {nu}"))
    } else {
        ContourVerdict::new(
            Admissibility::No,
            format!("μ = 0 but |z| = {abs_z} is not {op} ν = {nu}"),
        )
    }
}
