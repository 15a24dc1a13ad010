//! Cross-module checks for the transform layer: literals feeding the
//! transform, boundary reports and their serialized shape, and the
//! consistency of the reflected-kernel transform with the Laplace kernel
//! itself at imaginary-time arguments.

use euclab::cones::Cone;
use euclab::laplace::{
    a_norm, boundary_value_check, check_transform, laplace_transform, parse_functional,
    ANormSpec, PairingForm, TubePoint,
};
use euclab::quad::{integrate_axes, Axis, QuadTol};
use euclab::spaces::parse::parse_test_function;
use euclab::Complex64;

#[test]
fn parsed_functional_reaches_its_boundary_values() {
    let u = parse_functional(
        r#"fn{dim=1, atoms=[{kind=density, tf=tf{dim=1, Q="-w1"},
                             cone=halfspace{dim=1, axis=1}}]}"#,
    )
    .unwrap();
    let f = parse_test_function(r#"tf{dim=1, Q="-w1^2"}"#).unwrap();
    let ys: Vec<Vec<f64>> = [0.5, 0.2, 0.1, 0.05, 0.02, 0.01].iter().map(|&t| vec![t]).collect();
    let report = boundary_value_check(&u, &f, &ys, PairingForm::Standard).unwrap();

    // Independently frozen value of ∫₀^∞ e^{-p}·√π·e^{-p²/4} dp.
    let rhs = report.rows[0].rhs[0];
    assert!((rhs - 1.3432934216467351704).abs() < 1e-8 * rhs);
    assert!(report.tail_monotone, "gaps along the sequence: {:?}",
        report.rows.iter().map(|r| r.gap).collect::<Vec<_>>());
    assert!(report.final_gap < report.rows[0].gap / 10.0);

    // The report rows serialize with exactly the documented fields.
    let row = serde_json::to_value(&report.rows[0]).unwrap();
    let obj = row.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    keys.sort_unstable();
    assert_eq!(keys, vec!["gap", "lhs", "rhs", "y"]);
}

/// The reflected-kernel transform agrees with the Laplace transform of the
/// point mass `δ_p`, evaluated at imaginary-time arguments and integrated
/// against `f` with the `(2π)^{-dn}` normalization — two routes through
/// independently written kernels.
#[test]
fn reflected_kernel_agrees_with_the_point_mass_transform() {
    let tol = QuadTol::new(1e-12, 1e-9);

    // One coordinate, pure time.
    let f1 = parse_test_function(
        r#"tf{dim=1, Q="-w1^2", support="-halfspace{dim=1, axis=1}", flat=-1}"#,
    )
    .unwrap();
    let p1 = [1.0];
    let direct = check_transform(&f1, &p1, 1).unwrap();
    let tube = Cone::halfspace(1, 0).unwrap().negated();
    let u = euclab::laplace::Functional::delta(p1.to_vec(), Cone::halfspace(1, 0).unwrap())
        .unwrap();
    let through_kernel = integrate_axes(
        |xi: &[f64]| {
            let z = TubePoint::new(vec![0.0], vec![xi[0]], tube.clone()).unwrap();
            laplace_transform(&u, &z, PairingForm::Reflected).unwrap() * f1.eval_real(xi)
        },
        &[Axis::ToMinusInf(0.0)],
        tol,
    );
    assert!(through_kernel.converged);
    let through_kernel = through_kernel.value / (2.0 * std::f64::consts::PI);
    assert!(
        (direct - through_kernel).norm() < 1e-6,
        "direct {direct} vs kernel route {through_kernel}"
    );

    // One time and one space coordinate.
    let f2 = euclab::spaces::TestFunction::from_exprs(2, "1", "-w1^2 - w2^2")
        .unwrap()
        .with_support(Cone::halfspace(2, 0).unwrap().negated(), -1.0)
        .unwrap();
    let p2 = [1.0, 0.7];
    let direct = check_transform(&f2, &p2, 2).unwrap();
    let tube2 = Cone::halfspace(2, 0).unwrap().negated();
    let u2 = euclab::laplace::Functional::delta(p2.to_vec(), Cone::halfspace(2, 0).unwrap())
        .unwrap();
    let through_kernel = integrate_axes(
        |xi: &[f64]| {
            let z = TubePoint::new(vec![0.0, xi[1]], vec![xi[0], 0.0], tube2.clone()).unwrap();
            laplace_transform(&u2, &z, PairingForm::Reflected).unwrap() * f2.eval_real(xi)
        },
        &[Axis::ToMinusInf(0.0), Axis::Real],
        tol,
    );
    assert!(through_kernel.converged);
    let norm = (2.0 * std::f64::consts::PI).powi(2);
    let through_kernel = through_kernel.value / norm;
    assert!(
        (direct - through_kernel).norm() < 1e-6,
        "direct {direct} vs kernel route {through_kernel}"
    );
}

/// The transform of a mixed functional is analytic across the tube: the
/// Cauchy–Riemann residual stays below 1e-6 at a grid of interior points,
/// and the boundary-growth norm certifies a finite weighted envelope that
/// fresh off-grid samples respect.
#[test]
fn mixed_transform_is_analytic_with_certified_growth() {
    let u = parse_functional(
        r#"fn{dim=1, atoms=[{kind=point_mass, at=[0.5], cone=halfspace{dim=1, axis=1}},
                            {kind=density, tf=tf{dim=1, Q="-2w1"},
                             cone=halfspace{dim=1, axis=1}}]}"#,
    )
    .unwrap();
    let tube = Cone::halfspace(1, 0).unwrap();
    let v = |z: &[Complex64]| {
        let pt = TubePoint::new(vec![z[0].re], vec![z[0].im], tube.clone()).unwrap();
        laplace_transform(&u, &pt, PairingForm::Standard).unwrap()
    };
    for &x in &[-1.5, 0.0, 2.0] {
        for &y in &[0.3, 1.0, 2.2] {
            let r = euclab::laplace::cauchy_riemann_residual(
                &v,
                &[Complex64::new(x, y)],
                1e-4,
            );
            assert!(r < 1e-6, "residual {r} at ({x}, {y})");
        }
    }

    let spec = ANormSpec::new(0.5, 1, vec![Cone::from_generators(1, &[vec![1.0]]).unwrap()]);
    let norm = a_norm(v, &spec, 0.5, 2.0).unwrap();
    assert!(norm.value.is_finite() && !norm.diverges);
    // Envelope at fresh interior points, with headroom for the truncation.
    for &t in &[0.043, 0.91, 1.7] {
        let z = Complex64::new(0.2, t);
        let envelope = norm.value * (0.5 * z.norm().powi(2) + 0.5 / t).exp();
        let value = v(&[z]).norm();
        assert!(value <= envelope * 1.1, "sample {value} above envelope {envelope} at t={t}");
    }
}
