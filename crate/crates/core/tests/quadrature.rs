// Oracle digits are frozen as computed.
#![allow(clippy::excessive_precision)]

use ifunction::quadrature::{eval, eval_contour_a, Method};
use ifunction::{GammaTriple, IFunctionParams};
use num_complex::Complex64;

fn t(a: f64, alpha: f64, e: f64) -> GammaTriple {
    GammaTriple::new(a, alpha, e)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn log_power(k: f64) -> IFunctionParams {
    IFunctionParams::new(1, 0, vec![t(1.0, 1.0, k)], vec![t(0.0, 1.0, k)])
}

/// m=1, n=1 with non-integer powers on both a numerator and a denominator.
fn instance_t() -> IFunctionParams {
    IFunctionParams::new(
        1,
        1,
        vec![t(0.3, 1.0, 1.5)],
        vec![t(0.2, 1.0, 1.0), t(-0.4, 0.7, 2.3)],
    )
}

#[test]
fn mixed_powers_against_reference() {
    // reference values from an independent 30-digit evaluation on Re s = −0.25
    let cases = [
        (0.3, 0.989_823_964_585_843_6),
        (0.7, 0.989_444_554_542_951_8),
        (1.5, 0.868_342_429_385_080_0),
    ];
    for (z, expect) in cases {
        let r = eval_contour_a(&instance_t(), c(z), None, 1e-11).unwrap();
        assert!((r.value.re - expect).abs() < 1e-10, "z={z}: {} vs {expect}", r.value);
        assert!((r.value.re - expect).abs() <= r.abs_error_estimate.max(1e-13));
    }
}

#[test]
fn non_integer_log_power() {
    let gamma = [(2.5, 1.329_340_388_179_137), (3.7, 4.170_651_783_796_604)];
    for (k, g) in gamma {
        for z in [0.1, 0.3, 0.7] {
            let r = eval(&log_power(k), c(z), 1e-8).unwrap();
            assert_eq!(r.method, Method::Quadrature);
            let expect = (1.0 / z).ln().powf(k - 1.0) / g;
            assert!((r.value.re / expect - 1.0).abs() < 1e-6, "k={k} z={z}: {}", r.value);
        }
    }
}

#[test]
fn small_z_reference() {
    let p = IFunctionParams::new(2, 0, vec![], vec![t(0.5, 2.0, 1.0), t(3.0, 1.0, 1.0)]);
    for (z, expect) in [(1e-2, 0.237_093_067_894_900_3), (1e-3, 0.139_860_388_347_917)] {
        let r = eval_contour_a(&p, c(z), None, 1e-12).unwrap();
        assert!((r.value.re - expect).abs() < 1e-11, "{}", r.value);
    }
}
