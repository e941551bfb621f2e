//! Named functions expressed as I-functions, with independent series oracles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma_kernel::log_gamma;
use crate::params::{GammaTriple, IFunctionParams};
use crate::quadrature::{eval, EvalResult, Method};

/// Fox H-function `H^{m,n}_{p,q}`: every power is 1.
pub fn from_h_function(
    upper: &[(f64, f64)],
    lower: &[(f64, f64)],
    m: usize,
    n: usize,
) -> Result<IFunctionParams> {
    let unit = |list: &[(f64, f64)]| {
        list.iter()
            .map(|&(a, alpha)| GammaTriple::new(a, alpha, 1.0))
            .collect()
    };
    IFunctionParams::new(m, n, unit(upper), unit(lower)).validated()
}

/// Meijer G-function `G^{m,n}_{p,q}`: every slope and power is 1.
pub fn from_g_function(a: &[f64], b: &[f64], m: usize, n: usize) -> Result<IFunctionParams> {
    let pair = |list: &[f64]| list.iter().map(|&x| (x, 1.0)).collect::<Vec<_>>();
    from_h_function(&pair(a), &pair(b), m, n)
}

/// `H̄`-function: unit powers on `lower[1..m]` and `upper[n+1..p]`, free
/// powers on `upper[1..n]` and `lower[m+1..q]`.
pub fn from_h_bar(
    upper_special: &[(f64, f64, f64)],
    upper_plain: &[(f64, f64)],
    lower_plain: &[(f64, f64)],
    lower_special: &[(f64, f64, f64)],
) -> Result<IFunctionParams> {
    let special = |list: &[(f64, f64, f64)]| {
        list.iter()
            .map(|&(a, alpha, e)| GammaTriple::new(a, alpha, e))
            .collect::<Vec<_>>()
    };
    let plain = |list: &[(f64, f64)]| {
        list.iter()
            .map(|&(a, alpha)| GammaTriple::new(a, alpha, 1.0))
            .collect::<Vec<_>>()
    };
    let mut upper = special(upper_special);
    upper.extend(plain(upper_plain));
    let mut lower = plain(lower_plain);
    lower.extend(special(lower_special));
    IFunctionParams::new(lower_plain.len(), upper_special.len(), upper, lower).validated()
}

/// A named function `prefactor · I(argument)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecialCase {
    /// Feynman integral `g(z)` for non-integer `m`; `k` is the caller-supplied
    /// normalizing constant.
    FeynmanG {
        tau: f64,
        n: f64,
        mu: f64,
        m: f64,
        k: f64,
        z: f64,
    },
    /// Free energy `βF` of the Gaussian model in dimension `d`.
    GaussianFreeEnergy { d: f64, epsilon: f64 },
    /// `(ln 1/λ)^{k−1}/Γ(k)` as `I^{1,0}_{1,1}[λ | (1,1,k); (0,1,k)]`.
    LrcDensityTerm { order: f64, lambda: f64 },
}

impl SpecialCase {
    // Negated comparisons so that NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn check_domain(&self) -> Result<()> {
        match *self {
            SpecialCase::FeynmanG { tau, n, mu, m, .. } => {
                let mut bad = Vec::new();
                if !(tau > 0.0) {
                    bad.push("τ > 0");
                }
                if !(tau - mu / 2.0 > 0.0) {
                    bad.push("τ − μ/2 > 0");
                }
                if !(mu > -1.0) {
                    bad.push("μ > −1");
                }
                if !(m > -1.0) {
                    bad.push("m > −1");
                }
                if !(n > 0.0) {
                    bad.push("n > 0");
                }
                if bad.is_empty() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("Feynman g requires {}", bad.join(", "))))
                }
            }
            SpecialCase::GaussianFreeEnergy { d, epsilon } => {
                if d > 0.0 && epsilon > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "free energy requires d > 0 and ε > 0, got d = {d}, ε = {epsilon}"
                    )))
                }
            }
            SpecialCase::LrcDensityTerm { order, lambda } => {
                if !(order > 0.0) {
                    Err(Error::Domain(format!("order must be positive, got {order}")))
                } else if !(lambda > 0.0 && lambda < 1.0) {
                    Err(Error::Domain(format!("λ must lie in (0, 1), got {lambda}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn params(&self) -> Result<IFunctionParams> {
        self.check_domain()?;
        let p = match *self {
            SpecialCase::FeynmanG { tau, n, mu, m, .. } => IFunctionParams::new(
                1,
                3,
                vec![
                    GammaTriple::new(1.0 - tau, 1.0, 1.0),
                    GammaTriple::new(1.0 - tau + mu / 2.0, 1.0, 1.0),
                    GammaTriple::new(1.0 - n, 1.0, 1.0 + m),
                ],
                vec![
                    GammaTriple::new(0.0, 1.0, 1.0),
                    GammaTriple::new(-mu / 2.0, 1.0, 1.0),
                    GammaTriple::new(-n, 1.0, 1.0 + m),
                ],
            ),
            SpecialCase::GaussianFreeEnergy { d, .. } => IFunctionParams::new(
                1,
                2,
                vec![GammaTriple::new(0.0, 1.0, 2.0), GammaTriple::new(-0.5, 1.0, d)],
                vec![GammaTriple::new(0.0, 1.0, 1.0), GammaTriple::new(-1.0, 1.0, 1.0 + d)],
            ),
            SpecialCase::LrcDensityTerm { order, .. } => IFunctionParams::new(
                1,
                0,
                vec![GammaTriple::new(1.0, 1.0, order)],
                vec![GammaTriple::new(0.0, 1.0, order)],
            ),
        };
        p.validated()
    }

    pub fn prefactor(&self) -> Result<Complex64> {
        self.check_domain()?;
        let lg = |x: f64| -> Result<f64> { Ok(log_gamma(Complex64::new(x, 0.0))?.re) };
        let v = match *self {
            SpecialCase::FeynmanG { tau, mu, m, k, .. } => {
                let h = mu / 2.0;
                let ln = -(m + 2.0) * 2f64.ln() + lg(m + 1.0)? + lg(1.0 + h)? + ln_beta(0.5, 0.5 + h)?
                    - PI.ln()
                    - lg(tau)?
                    - lg(tau - h)?;
                k * ln.exp()
            }
            SpecialCase::GaussianFreeEnergy { d, epsilon } => {
                -1.0 / (4.0 * PI.powf(d / 2.0) * (1.0 + epsilon).powi(2))
            }
            SpecialCase::LrcDensityTerm { .. } => 1.0,
        };
        Ok(Complex64::new(v, 0.0))
    }

    /// The I-function argument. Negative reals carry `arg = π`.
    pub fn argument(&self) -> Complex64 {
        let x = match *self {
            SpecialCase::FeynmanG { z, .. } => -z,
            SpecialCase::GaussianFreeEnergy { epsilon, .. } => -(1.0 + epsilon).powi(-2),
            SpecialCase::LrcDensityTerm { lambda, .. } => lambda,
        };
        Complex64::new(x, 0.0)
    }

    pub fn evaluate(&self, tol: f64) -> Result<EvalResult> {
        let params = self.params()?;
        let pre = self.prefactor()?;
        let inner = eval(&params, self.argument(), tol / pre.norm().max(1.0))?;
        let mut diagnostics = inner.diagnostics;
        diagnostics.underlying = Some(inner.method);
        Ok(EvalResult {
            value: pre * inner.value,
            abs_error_estimate: pre.norm() * inner.abs_error_estimate,
            method: Method::Specialized,
            diagnostics,
        })
    }
}

fn ln_beta(x: f64, y: f64) -> Result<f64> {
    let lg = |v: f64| -> Result<f64> { Ok(log_gamma(Complex64::new(v, 0.0))?.re) };
    Ok(lg(x)? + lg(y)? - lg(x + y)?)
}

pub fn feynman_g(tau: f64, n: f64, mu: f64, m: f64, k: f64, z: f64, tol: f64) -> Result<EvalResult> {
    SpecialCase::FeynmanG { tau, n, mu, m, k, z }.evaluate(tol)
}

pub fn gaussian_free_energy(d: f64, epsilon: f64, tol: f64) -> Result<EvalResult> {
    SpecialCase::GaussianFreeEnergy { d, epsilon }.evaluate(tol)
}

pub fn lrc_density_term(order: f64, lambda: f64, tol: f64) -> Result<EvalResult> {
    SpecialCase::LrcDensityTerm { order, lambda }.evaluate(tol)
}

/// `(ln 1/λ)^{k−1}/Γ(k)`.
pub fn lrc_term_closed_form(order: f64, lambda: f64) -> Result<f64> {
    let lg = log_gamma(Complex64::new(order, 0.0))?.re;
    Ok(((order - 1.0) * (1.0 / lambda).ln().ln() - lg).exp())
}

/// `(x)_r` as a direct product.
pub fn pochhammer(x: f64, r: usize) -> f64 {
    (0..r).map(|i| x + i as f64).product()
}

/// Terms of `Σ_r (1)_r [(3/2)_r]^d / [(2)_r]^{1+d} · x^r` with `x = (1+ε)^{−2}`;
/// the free energy is `−x·2^{−d−2}` times their sum. The Pochhammer products
/// are accumulated factor by factor so long sums do not overflow.
pub fn free_energy_terms(d: f64, epsilon: f64, count: usize) -> Vec<f64> {
    let x = (1.0 + epsilon).powi(-2);
    let mut out = Vec::with_capacity(count);
    let mut term = 1.0;
    for r in 0..count {
        out.push(term);
        let k = r as f64;
        term *= (1.0 + k) * ((1.5 + k) / (2.0 + k)).powf(d) / (2.0 + k) * x;
    }
    out
}

pub fn free_energy_series(d: f64, epsilon: f64, count: usize) -> f64 {
    let x = (1.0 + epsilon).powi(-2);
    -x * 2f64.powf(-d - 2.0) * free_energy_terms(d, epsilon, count).iter().sum::<f64>()
}

/// Terms of `Σ_r (τ−μ/2)_r (τ)_r (n+r)^{−(1+m)} / (1+μ/2)_r · z^r/r!`, with
/// the Pochhammer products accumulated factor by factor.
pub fn feynman_g_terms(tau: f64, n: f64, mu: f64, m: f64, z: f64, count: usize) -> Vec<f64> {
    let h = mu / 2.0;
    let mut out = Vec::with_capacity(count);
    let mut ratio = 1.0;
    for r in 0..count {
        let k = r as f64;
        out.push(ratio * (n + k).powf(-(1.0 + m)));
        ratio *= (tau - h + k) * (tau + k) / ((1.0 + h + k) * (1.0 + k)) * z;
    }
    out
}

/// `K·2^{−m−2}Γ(m+1)B(½, ½+μ/2)/π` times the sum of [`feynman_g_terms`].
pub fn feynman_g_series(tau: f64, n: f64, mu: f64, m: f64, k: f64, z: f64, count: usize) -> Result<f64> {
    let lg = log_gamma(Complex64::new(m + 1.0, 0.0))?.re;
    let pre = k * 2f64.powf(-m - 2.0) * (lg + ln_beta(0.5, 0.5 + mu / 2.0)?).exp() / PI;
    Ok(pre * feynman_g_terms(tau, n, mu, m, z, count).iter().sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrcDensity {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub partial_sums: Vec<f64>,
    /// Whether the partial sums are nondecreasing; reported only when every
    /// `B_r ≥ 0`.
    pub monotone: Option<bool>,
}

/// `v = p(p+3)/4`.
pub fn lrc_order(p_dim: u32) -> f64 {
    let p = p_dim as f64;
    p * (p + 3.0) / 4.0
}

/// `K·λ^{N/2−1}(2π)^{p/2} Σ_r B_r · term(v + r, λ)` over the supplied `B_r`.
pub fn lrc_density(
    p_dim: u32,
    sample_size: f64,
    k: f64,
    b: &[f64],
    lambda: f64,
    tol: f64,
) -> Result<LrcDensity> {
    if p_dim == 0 {
        return Err(Error::Domain("dimension p must be positive".into()));
    }
    let v = lrc_order(p_dim);
    let scale = k * lambda.powf(sample_size / 2.0 - 1.0) * (2.0 * PI).powf(p_dim as f64 / 2.0);
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut partial_sums = Vec::with_capacity(b.len());
    for (r, &br) in b.iter().enumerate() {
        let term = lrc_density_term(v + r as f64, lambda, tol)?;
        sum += br * term.value.re;
        err += br.abs() * term.abs_error_estimate;
        partial_sums.push(scale * sum);
    }
    let monotone = b
        .iter()
        .all(|&x| x >= 0.0)
        .then(|| partial_sums.windows(2).all(|w| w[1] >= w[0]));
    Ok(LrcDensity {
        value: scale * sum,
        abs_error_estimate: scale.abs() * err,
        partial_sums,
        monotone,
    })
}
