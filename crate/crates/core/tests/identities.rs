//! Transformation identities checked through quadrature values.

use ifunction::params::{invert, reduce, rescale, shift};
use ifunction::quadrature::{eval_contour_a, EvalResult};
use ifunction::{GammaTriple, IFunctionParams};
use num_complex::Complex64;

fn t(a: f64, alpha: f64, e: f64) -> GammaTriple {
    GammaTriple::new(a, alpha, e)
}

fn instance_t() -> IFunctionParams {
    IFunctionParams::new(
        1,
        1,
        vec![t(0.3, 1.0, 1.5)],
        vec![t(0.2, 1.0, 1.0), t(-0.4, 0.7, 2.3)],
    )
}

fn instance_p() -> IFunctionParams {
    IFunctionParams::new(
        2,
        1,
        vec![t(0.3, 1.0, 1.5), t(0.9, 0.5, 1.2)],
        vec![t(0.2, 1.0, 1.0), t(0.6, 1.3, 0.8), t(-0.4, 0.7, 2.3)],
    )
}

const TOL: f64 = 1e-10;
const ZS: [f64; 3] = [0.3, 0.7, 1.5];

fn quad(p: &IFunctionParams, z: Complex64) -> EvalResult {
    eval_contour_a(p, z, None, TOL).unwrap()
}

fn agree(x: Complex64, ex: f64, y: Complex64, ey: f64, what: &str) {
    assert!(
        (x - y).norm() <= 10.0 * (ex + ey),
        "{what}: {x} vs {y} (estimates {ex:.2e}, {ey:.2e})"
    );
}

#[test]
fn shift_identity() {
    for sigma in [-0.5, 1.0] {
        let q = shift(&instance_t(), Complex64::new(sigma, 0.0));
        for z in ZS {
            let z = Complex64::new(z, 0.0);
            let a = quad(&instance_t(), z);
            let b = quad(&q, z);
            let zs = z.powf(sigma);
            agree(zs * a.value, zs.norm() * a.abs_error_estimate, b.value, b.abs_error_estimate, "shift");
        }
    }
}

#[test]
fn rescale_identity() {
    for c in [0.5, 2.0] {
        let q = rescale(&instance_t(), c).unwrap();
        for z in ZS {
            let z = Complex64::new(z, 0.0);
            let a = quad(&instance_t(), z);
            let b = quad(&q, z.powf(c));
            agree(a.value, a.abs_error_estimate, c * b.value, c * b.abs_error_estimate, "rescale");
        }
    }
}

#[test]
fn inversion_identity() {
    let q = invert(&instance_t());
    for z in ZS {
        let z = Complex64::new(z, 0.0);
        let a = quad(&instance_t(), z);
        let b = quad(&q, z.inv());
        agree(a.value, a.abs_error_estimate, b.value, b.abs_error_estimate, "invert");
    }
}

#[test]
fn permutation_invariance() {
    let p = instance_p();
    // the two lower numerators trade places; every other group has one member
    let mut q = p.clone();
    q.lower.swap(0, 1);
    for z in ZS {
        let z = Complex64::new(z, 0.0);
        let a = quad(&p, z);
        let b = quad(&q, z);
        agree(a.value, a.abs_error_estimate, b.value, b.abs_error_estimate, "permutation");
    }
}

#[test]
fn reductions_preserve_value() {
    let extra = t(0.5, 1.0, 1.7);
    // upper-numerator / lower-denominator pair
    let mut a = instance_t();
    a.upper.insert(0, extra);
    a.n += 1;
    a.lower.push(extra);
    // upper-denominator / lower-numerator pair
    let mut b = instance_t();
    b.upper.push(extra);
    b.lower.insert(0, extra);
    b.m += 1;
    for p in [a, b] {
        let r = reduce(&p);
        assert_eq!(r, instance_t());
        for z in ZS {
            let z = Complex64::new(z, 0.0);
            let x = quad(&p, z);
            let y = quad(&r, z);
            agree(x.value, x.abs_error_estimate, y.value, y.abs_error_estimate, "reduce");
        }
    }
}

#[test]
fn sigma_independence() {
    let p = IFunctionParams::new(1, 0, vec![], vec![t(0.0, 1.0, 1.0)]);
    let z = Complex64::new(1.0, 0.0);
    let a = eval_contour_a(&p, z, Some(-0.3), TOL).unwrap();
    let b = eval_contour_a(&p, z, Some(-2.7), TOL).unwrap();
    agree(a.value, a.abs_error_estimate / 10.0, b.value, b.abs_error_estimate / 10.0, "σ");
}

#[test]
fn halving_tolerance_is_self_consistent() {
    let z = Complex64::new(0.7, 0.0);
    let a = eval_contour_a(&instance_t(), z, None, 1e-8).unwrap();
    let b = eval_contour_a(&instance_t(), z, None, 5e-9).unwrap();
    assert!((a.value - b.value).norm() < a.abs_error_estimate);
}

#[test]
fn realness_for_real_data() {
    for z in ZS {
        let r = quad(&instance_p(), Complex64::new(z, 0.0));
        assert!(r.value.im.abs() <= r.abs_error_estimate);
    }
}
