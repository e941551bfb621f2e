//! Complex log-gamma on a fixed continuous branch, powered gamma, and the
//! asymptotic magnitude estimates used for contour truncation.
//!
//! `log_gamma` returns the branch of `ln Γ(z)` that is analytic on the plane
//! cut along `(−∞, 0]` and real on the positive axis. On the cut itself the
//! value is the limit from above. For `Re z ≥ 0.5` it is computed from the
//! Stirling series after shifting `|z| ≥ 10` with the recurrence (summing
//! principal logarithms, which never wrap in the right half-plane). For
//! `Re z < 0.5` the reflection formula is used with `ln sin(πz)` written as
//!
//! ```text
//! ln sin(πz) = −iπz + ln(1 − e^{2πiz}) − ln 2 + iπ/2,    Im z ≥ 0,
//! ```
//!
//! which is analytic in the upper half-plane and agrees with the cut-plane
//! branch at `z = 1/2`; the lower half-plane follows from `lnΓ(z̄) = conj lnΓ(z)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_2: f64 = std::f64::consts::LN_2;

/// Below this modulus the argument is shifted up before applying Stirling.
const STIRLING_MIN: f64 = 10.0;

/// `B_{2k} / (2k(2k − 1))` for k = 1..=8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `B_{2k} / (2k)` for k = 1..=8.
const DIGAMMA_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Distance to a nonpositive integer below which `log_gamma` reports a pole.
pub const POLE_TOL: f64 = 1e-13;

/// Continuous-branch `ln Γ(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma of non-finite {z}")));
    }
    if let Some(k) = nearest_pole(z, POLE_TOL) {
        return Err(Error::Singularity {
            factor: format!("Γ (pole at {k})"),
            arg_re: z.re,
            arg_im: z.im,
        });
    }
    Ok(log_gamma_unchecked(z))
}

/// `A · ln Γ(z)`; exponentiating gives the powered gamma `Γ^A(z)`.
pub fn powered_gamma_log(z: Complex64, power: f64) -> Result<Complex64> {
    Ok(log_gamma(z)? * power)
}

/// Returns the nonpositive integer within `tol` of `z`, if any.
pub(crate) fn nearest_pole(z: Complex64, tol: f64) -> Option<i64> {
    let k = z.re.round();
    if k <= 0.0 && (z - k).norm() < tol {
        Some(k as i64)
    } else {
        None
    }
}

pub(crate) fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if z.im < 0.0 {
            return log_gamma_unchecked(z.conj()).conj();
        }
        let i = Complex64::i();
        let w = (2.0 * PI * i * z).exp();
        let ln_sin = -i * PI * z + (1.0 - w).ln() - LN_2 + i * (PI / 2.0);
        return LN_PI - ln_sin - log_gamma_unchecked(1.0 - z);
    }
    if z.norm() >= STIRLING_MIN {
        return stirling(z);
    }
    let shift = (STIRLING_MIN - z.re).ceil().max(0.0) as usize;
    let mut logs = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        logs += (z + k as f64).ln();
    }
    stirling(z + shift as f64) - logs
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    for c in STIRLING_COEFFS.iter().rev() {
        corr = corr * inv2 + c;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + corr * inv
}

/// Complex digamma `ψ(z)`. Used to size quadrature panels from the local
/// phase velocity of the integrand.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if z.im < 0.0 {
            return digamma(z.conj()).conj();
        }
        // ψ(z) = ψ(1 − z) − π cot(πz), cot written to stay bounded for Im z > 0
        let i = Complex64::i();
        let e = (2.0 * PI * i * z).exp();
        let cot = i * (e + 1.0) / (e - 1.0);
        return digamma(1.0 - z) - PI * cot;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < STIRLING_MIN {
        acc -= w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in DIGAMMA_COEFFS.iter().rev() {
        series = series * inv2 + c;
    }
    acc + w.ln() - 0.5 * inv - series * inv2
}

/// Leading-order asymptotic `|Γ(x + iy)| ≈ √(2π) e^{−π|y|/2} |y|^{x − 1/2}`.
pub fn stirling_magnitude(x: f64, y: f64) -> f64 {
    let ay = y.abs();
    (2.0 * PI).sqrt() * (-PI * ay / 2.0).exp() * ay.powf(x - 0.5)
}

/// Truncated expansion
///
/// ```text
/// ln Γ(z + a) ≈ (z + a − 1/2) ln z − z + ln(2π)/2
///               + Σ_{k=1}^{r} (−1)^{k+1} B_{k+1}(a) / (k (k+1) z^k)
/// ```
///
/// with Bernoulli polynomials `B_n(a)`. Valid for `|arg z| ≤ π − ε`, large `|z|`.
pub fn log_gamma_asymptotic(z: Complex64, a: Complex64, r: usize) -> Complex64 {
    let numbers = bernoulli_numbers(r + 1);
    let mut sum = (z + a - 0.5) * z.ln() - z + LN_SQRT_2PI;
    let inv = z.inv();
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 1..=r {
        pow *= inv;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let b = bernoulli_polynomial(k + 1, a, &numbers);
        sum += sign * b * pow / ((k * (k + 1)) as f64);
    }
    sum
}

/// `B_0 … B_n` from `Σ_{j=0}^{k} C(k+1, j) B_j = 0` (so `B_1 = −1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n + 1];
    b[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        let mut binom = 1.0; // C(k+1, 0)
        for (j, bj) in b.iter().enumerate().take(k) {
            acc += binom * bj;
            binom = binom * (k + 1 - j) as f64 / (j + 1) as f64;
        }
        b[k] = -acc / (k + 1) as f64;
    }
    b
}

/// `B_n(x) = Σ_k C(n, k) B_k x^{n−k}`; `numbers` must hold at least `B_0..B_n`.
pub fn bernoulli_polynomial(n: usize, x: Complex64, numbers: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    for (k, bk) in numbers.iter().enumerate().take(n + 1) {
        acc += binom * bk * x.powu((n - k) as u32);
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    acc
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lg(re: f64, im: f64) -> Complex64 {
        log_gamma(c(re, im)).unwrap()
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1.0)
    }

    #[test]
    fn small_integers_and_half() {
        assert!(lg(1.0, 0.0).norm() < 1e-15);
        assert!(lg(2.0, 0.0).norm() < 1e-15);
        assert!((lg(4.0, 0.0) - 6f64.ln()).norm() < 1e-14);
        assert!((lg(0.5, 0.0) - 0.572_364_942_924_700_1).norm() < 1e-14);
        assert_eq!(lg(0.5, 0.0).im, 0.0);
    }

    // Reference values from a 40-digit evaluation of the same branch.
    #[test]
    fn complex_reference_values() {
        let cases = [
            ((2.0, 3.0), (-2.092_851_753_092_733_3, 2.302_396_543_466_867_6)),
            ((0.3, -7.0), (-10.465_674_446_702_919, -6.310_309_647_040_768)),
            ((-2.5, 0.5), (-0.935_085_621_298_277_5, -8.870_962_885_247_459)),
            ((-3.7, -1.2), (-4.500_170_389_095_879, 11.453_541_394_917_542)),
            ((10.0, 100.0), (-112.397_365_549_672_38, 374.989_422_962_229_5)),
            ((0.5, 1e4), (-15_707.044_329_415_762, 82_103.403_723_928_49)),
            ((1e-3, 0.0), (6.907_178_885_383_854, 0.0)),
            ((-0.5, 0.0), (1.265_512_123_484_645_4, -std::f64::consts::PI)),
            ((-1.5, 1e-8), (0.860_047_015_376_480_5, -6.283_185_300_148_02)),
            ((25.0, -0.25), (54.783_454_087_001_25, -0.799_689_964_742_559)),
            ((-40.0, 3.0), (-117.796_536_492_697_13, -116.127_781_784_040_07)),
        ];
        for ((zr, zi), (er, ei)) in cases {
            let got = lg(zr, zi);
            assert!(close(got, c(er, ei), 1e-13), "z = {zr}+{zi}i: {got} vs {er}+{ei}i");
        }
    }

    #[test]
    fn poles_are_reported() {
        for k in [0.0, -1.0, -7.0] {
            assert!(matches!(log_gamma(c(k, 0.0)), Err(Error::Singularity { .. })));
        }
        assert!(log_gamma(c(-1.0, 1e-10)).is_ok());
    }

    #[test]
    fn powered_examples() {
        assert!(powered_gamma_log(c(1.0, 0.0), 7.3).unwrap().norm() < 1e-14);
        assert!(powered_gamma_log(c(2.0, 0.0), 2.0).unwrap().norm() < 1e-14);
        let v = powered_gamma_log(c(0.5, 0.0), 3.5).unwrap();
        assert!((v.re - 3.5 * 0.572_364_942_924_700_1).abs() < 1e-14);
    }

    #[test]
    fn stirling_ratio_tends_to_one() {
        // |Γ(x+iy)| / estimate from 40-digit reference: exactly 1 to 1e-15 for
        // x ∈ {0, 1/2, 1}; for x = 2 it is 1 + 1/(2y²) + …
        for x in [0.0, 0.5, 1.0, 2.0] {
            let mut prev = f64::INFINITY;
            for y in [20.0, 50.0, 100.0] {
                let g = lg(x, y).re.exp();
                let ratio = g / stirling_magnitude(x, y);
                assert!((ratio - 1.0).abs() < 2e-3, "x={x} y={y} ratio={ratio}");
                let dev = (ratio - 1.0).abs();
                assert!(dev <= prev + 1e-12);
                prev = dev;
            }
        }
        let r = lg(2.0, 50.0).re.exp() / stirling_magnitude(2.0, 50.0);
        assert!((r - 1.000_199_980_004).abs() < 1e-10);
        // leading case: exponent of |y| is zero at x = 1/2
        let y: f64 = 37.0;
        assert!((stirling_magnitude(0.5, y) - (2.0 * PI).sqrt() * (-PI * y / 2.0).exp()).abs() < 1e-30);
    }

    #[test]
    fn asymptotic_expansion_matches() {
        let v = log_gamma_asymptotic(c(100.0, 0.0), c(0.0, 0.0), 1);
        assert!((v - lg(100.0, 0.0)).norm() < 1e-6);
        let v = log_gamma_asymptotic(c(50.0, 0.0), c(0.5, 0.0), 2);
        assert!((v - lg(50.5, 0.0)).norm() < 1e-7);
        // r = 0 is the bare leading term
        let z = c(30.0, 4.0);
        let bare = (z - 0.5) * z.ln() - z + LN_SQRT_2PI;
        assert_eq!(log_gamma_asymptotic(z, c(0.0, 0.0), 0), bare);
        // higher order keeps improving at moderate |z|
        let exact = lg(20.3, 1.0);
        let e2 = (log_gamma_asymptotic(c(20.0, 1.0), c(0.3, 0.0), 2) - exact).norm();
        let e6 = (log_gamma_asymptotic(c(20.0, 1.0), c(0.3, 0.0), 6) - exact).norm();
        assert!(e6 < e2 && e6 < 1e-11);
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(8);
        let expect = [1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0, 0.0, -1.0 / 30.0];
        for (x, e) in b.iter().zip(expect) {
            assert!((x - e).abs() < 1e-15);
        }
        let x = c(0.3, 0.2);
        let b2 = bernoulli_polynomial(2, x, &b);
        assert!((b2 - (x * x - x + 1.0 / 6.0)).norm() < 1e-15);
        let b3 = bernoulli_polynomial(3, x, &b);
        assert!((b3 - (x * x * x - 1.5 * x * x + 0.5 * x)).norm() < 1e-15);
        // stirling table agrees with the recurrence
        let b16 = bernoulli_numbers(16);
        for (k, coef) in STIRLING_COEFFS.iter().enumerate() {
            let n = 2 * (k + 1);
            assert!((b16[n] / (n * (n - 1)) as f64 - coef).abs() < 1e-14 * coef.abs());
        }
    }

    #[test]
    fn digamma_matches_log_gamma_derivative() {
        for z in [c(0.7, 0.0), c(3.0, 2.0), c(-2.3, 0.4), c(0.1, -15.0), c(40.0, 1.0)] {
            let h = 1e-5;
            let fd = (log_gamma_unchecked(z + h) - log_gamma_unchecked(z - h)) / (2.0 * h);
            assert!((digamma(z) - fd).norm() < 1e-7 * fd.norm().max(1.0), "{z}");
        }
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(c(1.0, 0.0)).re + euler).abs() < 1e-14);
    }

    #[test]
    fn continuous_along_vertical_line() {
        // Γ(b − βs) on s = σ + it with b − βσ > 0 never touches the cut.
        let (b, beta, sigma) = (0.2, 1.3, -0.4);
        let mut prev = log_gamma_unchecked(c(b - beta * sigma, beta * 60.0));
        let dt = 0.01;
        let mut t = -60.0;
        while t < 60.0 {
            t += dt;
            let cur = log_gamma_unchecked(c(b - beta * sigma, -beta * t));
            // |d lnΓ/dt| ≤ β |ψ| ≤ β (ln|w| + 2)
            let w = c(b - beta * sigma, -beta * t);
            let bound = beta * (w.norm().ln().abs() + 2.0) * dt * 2.0;
            if t > -60.0 + dt {
                assert!((cur - prev).norm() < bound, "jump at t={t}");
            }
            prev = cur;
        }
    }

    proptest! {
        #[test]
        fn recurrence_right_half_plane(re in 0.01f64..30.0, im in -50.0f64..50.0) {
            let z = c(re, im);
            let d = log_gamma_unchecked(z + 1.0) - log_gamma_unchecked(z) - z.ln();
            prop_assert!(d.norm() < 1e-12 * (1.0 + z.norm()));
        }

        #[test]
        fn recurrence_left_half_plane_up_to_2pi_i(re in -30.0f64..0.0, im in 0.05f64..20.0) {
            let z = c(re, im);
            let d = log_gamma_unchecked(z + 1.0) - log_gamma_unchecked(z) - z.ln();
            let k = d.im / (2.0 * PI);
            prop_assert!(d.re.abs() < 1e-10);
            prop_assert!((k - k.round()).abs() < 1e-10);
        }

        #[test]
        fn conjugate_symmetry(re in -20.0f64..20.0, im in 0.01f64..40.0) {
            let z = c(re, im);
            let a = log_gamma_unchecked(z.conj());
            let b = log_gamma_unchecked(z).conj();
            prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
        }

        #[test]
        fn powers_are_linear(re in 0.1f64..10.0, im in -10.0f64..10.0, a in 0.1f64..5.0, b in 0.1f64..5.0) {
            let z = c(re, im);
            let lhs = powered_gamma_log(z, a).unwrap() + powered_gamma_log(z, b).unwrap();
            let rhs = powered_gamma_log(z, a + b).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn reflection_formula_magnitude(re in -8.0f64..0.45, im in -6.0f64..6.0) {
            prop_assume!((re - re.round()).abs() > 1e-3 || im.abs() > 1e-3);
            let z = c(re, im);
            // |Γ(z)Γ(1−z)| = π / |sin πz|
            let lhs = (log_gamma_unchecked(z) + log_gamma_unchecked(1.0 - z)).re;
            let rhs = PI.ln() - (PI * z).sin().norm().ln();
            prop_assert!((lhs - rhs).abs() < 1e-11);
        }
    }
}
