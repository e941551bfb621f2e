//! The Mellin-Barnes kernel `φ(s)` and the integrand `φ(s) z^s`.
//!
//! Every factor is evaluated as `A · lnΓ(·)` on the principal branch and the
//! logs are summed before a single exponentiation, so magnitudes far outside
//! the `f64` range in individual factors do not overflow.

use num_complex::Complex64;

use crate::convergence::principal_arg;
use crate::error::{Error, Result};
use crate::gamma_kernel::{digamma, log_gamma_unchecked, nearest_pole};
use crate::params::IFunctionParams;

/// Distance of a gamma argument to a nonpositive integer treated as a pole.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// Principal `Log z` with `arg z ∈ (−π, π]`.
pub fn principal_ln(z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), principal_arg(z))
}

/// `ln φ(s)`. A denominator factor at a pole contributes `−∞` (the kernel
/// vanishes there); a numerator factor at a pole is an error.
pub fn log_phi(params: &IFunctionParams, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut vanishes = false;
    for f in params.factors() {
        let w = f.argument(s);
        if nearest_pole(w, SINGULARITY_TOL).is_some() {
            if f.is_numerator() {
                return Err(Error::Singularity {
                    factor: f.label(),
                    arg_re: w.re,
                    arg_im: w.im,
                });
            }
            vanishes = true;
            continue;
        }
        acc += f.signed_power() * log_gamma_unchecked(w);
    }
    if vanishes {
        acc.re = f64::NEG_INFINITY;
    }
    Ok(acc)
}

pub fn phi(params: &IFunctionParams, s: Complex64) -> Result<Complex64> {
    Ok(exp_or_zero(log_phi(params, s)?))
}

/// `ln(φ(s) z^s)` with `ln_z` the chosen logarithm of `z`.
pub fn log_integrand(params: &IFunctionParams, ln_z: Complex64, s: Complex64) -> Result<Complex64> {
    Ok(log_phi(params, s)? + s * ln_z)
}

/// `φ(s) z^s` with the principal `z^s`.
pub fn integrand_at(params: &IFunctionParams, z: Complex64, s: Complex64) -> Result<Complex64> {
    Ok(exp_or_zero(log_integrand(params, principal_ln(z), s)?))
}

/// `d/ds ln φ(s) = Σ ± A·slope·ψ(arg)`, used to estimate the local
/// oscillation rate along the contour.
pub fn log_phi_derivative(params: &IFunctionParams, s: Complex64) -> Complex64 {
    params
        .factors()
        .map(|f| {
            let (_, slope) = f.linear_map();
            f.signed_power() * slope * digamma(f.argument(s))
        })
        .sum()
}

pub(crate) fn exp_or_zero(w: Complex64) -> Complex64 {
    if w.re == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        w.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::GammaTriple;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_kernel_is_gamma() {
        let p = IFunctionParams::new(1, 0, vec![], vec![GammaTriple::new(0.0, 1.0, 1.0)]);
        // φ(s) = Γ(−s); at s = −2.5 this is Γ(2.5).
        let v = phi(&p, c(-2.5, 0.0)).unwrap();
        assert!((v.re - 1.329_340_388_179_137).abs() < 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn numerator_pole_is_error() {
        let p = IFunctionParams::new(1, 0, vec![], vec![GammaTriple::new(0.0, 1.0, 1.0)]);
        assert!(matches!(
            log_phi(&p, c(2.0, 0.0)),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn denominator_pole_gives_zero() {
        // 1/Γ(1 − b + s) with b = 0 vanishes at s = −1.
        let p = IFunctionParams::new(
            0,
            0,
            vec![],
            vec![GammaTriple::new(0.0, 1.0, 1.0)],
        );
        assert_eq!(phi(&p, c(-1.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn log_power_kernel_cancels_to_power_of_ratio() {
        // Γ^k(−s)/Γ^k(1 − s) = (−s)^{−k}.
        let k = 2.5;
        let p = IFunctionParams::new(
            1,
            0,
            vec![GammaTriple::new(1.0, 1.0, k)],
            vec![GammaTriple::new(0.0, 1.0, k)],
        );
        for s in [c(-0.3, 1.0), c(-0.3, -7.0), c(-1.7, 0.2)] {
            let v = phi(&p, s).unwrap();
            let expect = (-s).powf(-k);
            assert!((v - expect).norm() < 1e-13 * expect.norm(), "{s}: {v} vs {expect}");
        }
    }

    #[test]
    fn principal_log_on_negative_axis() {
        assert_eq!(principal_ln(c(-1.0, -0.0)).im, std::f64::consts::PI);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = IFunctionParams::new(
            1,
            1,
            vec![GammaTriple::new(0.3, 1.0, 1.5)],
            vec![GammaTriple::new(0.2, 1.0, 1.0), GammaTriple::new(-0.4, 0.7, 2.3)],
        );
        let s = c(-0.25, 3.0);
        let h = 1e-5;
        let fd = (log_phi(&p, s + h).unwrap() - log_phi(&p, s - h).unwrap()) / (2.0 * h);
        let d = log_phi_derivative(&p, s);
        assert!((fd - d).norm() < 1e-7, "{fd} vs {d}");
    }
}
