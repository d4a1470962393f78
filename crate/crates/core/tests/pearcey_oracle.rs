//! Quadrature values against high-precision ray integrals of the defining
//! contour integrals (computed independently with mpmath at 90+ digits).

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use extkp_core::pearcey::{eval, Complex, ContourSpec, Which};

fn close(which: Which, r: u32, z: Complex, expect: Complex, tol: f64) {
    let spec = ContourSpec::new(r).with_tolerance(1e-13);
    let got = eval(which, z, &spec).unwrap();
    let err = (got.value - expect).norm();
    assert!(
        err < tol,
        "{which:?} r={r} z={z}: got {} expected {expect} (err {err:e})",
        got.value
    );
}

#[test]
fn a_on_and_off_the_real_axis() {
    close(
        Which::A,
        2,
        Complex::new(4.0, 0.0),
        Complex::new(0.99682272540997906, 0.0),
        1e-12,
    );
    close(
        Which::A,
        2,
        Complex::from_polar(3.5, 0.4),
        Complex::new(0.99811684083442616, 0.0044015991093685796),
        1e-12,
    );
    close(
        Which::A,
        3,
        Complex::from_polar(5.0, -0.3),
        Complex::new(0.99965928995580419, -0.00086758463866329646),
        1e-12,
    );
    close(
        Which::A,
        3,
        Complex::new(3.0, 0.0),
        Complex::new(0.99299499035535739, 0.0),
        1e-12,
    );
}

#[test]
fn d_inside_its_sector() {
    close(
        Which::D,
        2,
        Complex::from_polar(4.0, -PI / 3.0),
        Complex::new(0.97506433735706262, 0.0),
        1e-12,
    );
    close(
        Which::D,
        3,
        Complex::from_polar(3.0, -PI / 4.0),
        Complex::new(0.97039538496779556, 0.0),
        1e-12,
    );
    close(
        Which::D,
        3,
        Complex::from_polar(4.5, -0.9),
        Complex::new(0.99441096249874129, -0.002710714480574555),
        1e-12,
    );
}

#[test]
fn opposite_detour_adds_the_residue() {
    let z = Complex::from_polar(3.0, -PI / 3.0);
    let saddle = eval(Which::D, z, &ContourSpec::new(2).with_tolerance(1e-12)).unwrap();
    assert!((saddle.value - Complex::new(0.9454528839329637, 0.0)).norm() < 1e-11);
    let spec = ContourSpec::new(2).with_detour(-0.25).with_tolerance(1e-6);
    let opp = eval(Which::D, z, &spec).unwrap();
    let expect = Complex::new(-105540.28507123704, 0.0);
    assert!(
        (opp.value - expect).norm() < 1e-8 * expect.norm(),
        "{}",
        opp.value
    );
}

#[test]
fn a_solves_the_string_equation() {
    // r = 2: S^2 A = z^2 A with S = d/dz - 1/(2z) - z, checked by finite differences
    let spec = ContourSpec::new(2).with_tolerance(1e-13);
    let z0 = Complex::new(3.5, 0.2);
    let h = 1e-2;
    let f = |k: i32| eval(Which::A, z0 + h * f64::from(k), &spec).unwrap().value;
    let (fm2, fm1, f0, f1, f2) = (f(-2), f(-1), f(0), f(1), f(2));
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * f1 - f2) / (12.0 * h);
    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * f1 - f2) / (12.0 * h * h);
    // S = p d/dz + q with p = 1/z, q = -c/z^2 - z, c = 1/2
    let c = 0.5;
    let p = z0.inv();
    let dp = -z0.powi(-2);
    let q = -z0.powi(-2) * c - z0;
    let dq = z0.powi(-3) * (2.0 * c) - 1.0;
    let s2 = p * p * d2 + (p * dp + p * q * 2.0) * d1 + (p * dq + q * q) * f0;
    let res = (s2 - z0 * z0 * f0).norm();
    assert!(res < 1e-6, "residual {res:e}");
}

#[test]
fn node_doubling_stays_within_estimate() {
    for (which, r, z) in [
        (Which::A, 2, Complex::new(4.0, 0.5)),
        (Which::D, 3, Complex::from_polar(3.5, -PI / 4.0)),
    ] {
        let spec = ContourSpec::new(r).with_nodes(32).with_tolerance(1e-10);
        let base = eval(which, z, &spec).unwrap();
        let doubled = eval(which, z, &spec.clone().with_nodes(2 * base.nodes_per_ray)).unwrap();
        assert!((base.value - doubled.value).norm() < base.error_estimate.max(1e-10));
    }
}

#[test]
fn asymptotic_gap_examples() {
    use extkp_core::pearcey::{asym_compare, asym_gap};
    let c = asym_compare(Which::A, Complex::new(5.0, 0.0), 3, &ContourSpec::new(2)).unwrap();
    assert!(c.passes(), "{c:?}");
    let c = asym_compare(Which::A, Complex::new(3.0, 0.0), 1, &ContourSpec::new(4)).unwrap();
    assert!(c.passes(), "{c:?}");

    // K = 0: the distance to 1 shrinks along the ray
    let spec = ContourSpec::new(3);
    let gaps: Vec<f64> = [3.0, 4.0, 5.0, 6.0]
        .iter()
        .map(|rho| asym_gap(Which::D, Complex::from_polar(*rho, -PI / 4.0), 0, &spec).unwrap())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    // |d_1| / 6^4 = 2.0e-3
    assert!(gaps[3] < 2.5e-3);
}

#[test]
fn far_out_values_approach_one() {
    let z = Complex::from_polar(12.0, -PI / 3.0);
    let d = eval(Which::D, z, &ContourSpec::new(2)).unwrap();
    assert!((d.value - 1.0).norm() < 2e-3);
    let a = eval(Which::A, Complex::new(12.0, 0.0), &ContourSpec::new(2)).unwrap();
    assert!((a.value - 1.0).norm() < 2e-4);
}

#[test]
fn sectors_are_enforced() {
    // just across the boundary the expansion no longer describes the integral
    let spec = ContourSpec::new(2);
    assert!(eval(Which::A, Complex::from_polar(4.0, PI / 2.0 - 0.01), &spec).is_ok());
    assert!(eval(Which::A, Complex::from_polar(4.0, PI / 2.0 + 0.01), &spec).is_err());
    assert!(eval(Which::D, Complex::from_polar(4.0, 0.5), &spec).is_ok());
    assert!(eval(Which::D, Complex::from_polar(4.0, 0.55), &spec).is_err());
}

#[test]
fn beyond_the_stokes_lines() {
    // the contour needs the descent paths of several saddles here
    let cases = [
        (
            Which::A,
            2,
            1.4,
            (1.0015495092742606, -0.0029064886176168898),
        ),
        (
            Which::A,
            2,
            -1.45,
            (1.0010897322933486, 0.0030959418678459743),
        ),
        (
            Which::A,
            3,
            0.9,
            (1.0020558483758588, -0.0010247603921664672),
        ),
        (Which::A, 3, -1.0, (1.0014862627248933, 0.00174478823017161)),
        (Which::D, 2, -2.3, (1.0223169361684935, 0.017534732214402)),
        (
            Which::D,
            2,
            0.3,
            (1.0158838680464625, -0.022919385153880486),
        ),
        (
            Which::D,
            3,
            0.1,
            (1.0094772346901442, -0.0041241381315791062),
        ),
        (
            Which::D,
            3,
            -1.2,
            (1.0006278639923976, -0.010087161637530355),
        ),
    ];
    for (which, r, theta, (re, im)) in cases {
        close(
            which,
            r,
            Complex::from_polar(4.0, theta),
            Complex::new(re, im),
            1e-12,
        );
    }
}
