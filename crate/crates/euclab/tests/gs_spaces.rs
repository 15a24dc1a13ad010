//! Integration tests for the weighted test-function spaces: norm behaviour
//! across scale constants and cones, the splitting construction, and the
//! literal grammar round trip.

use euclab::cones::Cone;
use euclab::spaces::parse::parse_test_function;
use euclab::spaces::{
    cone_norm, decompose, example1_divergence, real_norm, ComplexMap, DecomposeOptions, GSParams,
    TestFunction, TruncationSpec,
};
use euclab::Complex64;

fn quick_trunc() -> TruncationSpec {
    TruncationSpec {
        max_order: 6,
        radius: 6.0,
        points_per_axis: 49,
        contour_nodes: 64,
        ..TruncationSpec::default()
    }
}

/// Larger scale constants can only shrink a weighted supremum: every weight
/// in the defining family decreases pointwise when `A` or `B` grows.
#[test]
fn real_norms_shrink_as_scale_constants_grow() {
    // Gaussian-type decay keeps every sample inside the space at all the
    // scales below (faster-than-Gaussian decay would overload the
    // derivative weights at this regularity index instead).
    let samples = [
        TestFunction::from_exprs(1, "1", "-w1^2").unwrap(),
        TestFunction::from_exprs(1, "w1^2 - 1", "-w1^2").unwrap(),
        TestFunction::from_exprs(1, "1 + w1", "-0.5w1^2 - w1").unwrap(),
    ];
    let trunc = quick_trunc();
    for (i, f) in samples.iter().enumerate() {
        let mut previous = f64::INFINITY;
        for scale in [1.0, 2.0, 4.0] {
            let params = GSParams::new(0.5, 0.5, scale, scale).unwrap();
            let report = real_norm(f, &params, &trunc).unwrap();
            assert!(!report.diverges, "sample {i} at scale {scale}");
            assert!(
                report.log_value <= previous + 1e-9,
                "sample {i}: norm grew from {previous} to {} at scale {scale}",
                report.log_value
            );
            previous = report.log_value;
        }
    }
    // One planar sample at the endpoints of the same scale range.
    let f = TestFunction::from_exprs(2, "w1*w2", "-w1^2 - 0.5w2^2").unwrap();
    let small_trunc = TruncationSpec {
        max_order: 3,
        radius: 5.0,
        points_per_axis: 21,
        contour_nodes: 64,
        ..TruncationSpec::default()
    };
    let coarse = real_norm(&f, &GSParams::new(0.5, 0.5, 1.0, 1.0).unwrap(), &small_trunc).unwrap();
    let fine = real_norm(&f, &GSParams::new(0.5, 0.5, 4.0, 4.0).unwrap(), &small_trunc).unwrap();
    assert!(!coarse.diverges && !fine.diverges);
    assert!(fine.log_value <= coarse.log_value + 1e-9);
}

/// Shrinking the carrier cone weakens the distance penalty nowhere and
/// strengthens it somewhere, so the tube norm is monotone under inclusion.
#[test]
fn cone_norms_are_monotone_under_carrier_inclusion() {
    let f = TestFunction::from_exprs(2, "1", "-w1^2 - w2^2").unwrap();
    let params = GSParams::new(0.5, 0.5, 1.0, 1.0).unwrap();
    let trunc = TruncationSpec {
        radius: 4.0,
        points_per_axis: 17,
        ..TruncationSpec::default()
    };
    let nested = [
        Cone::from_generators(2, &[vec![1.0, -0.2], vec![1.0, 0.2]]).unwrap(),
        Cone::from_generators(2, &[vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap(),
        Cone::halfspace(2, 0).unwrap(),
        Cone::full_space(2),
    ];
    let mut previous = f64::NEG_INFINITY;
    for (i, u) in nested.iter().enumerate() {
        let report = cone_norm(&f, u, &params, &trunc).unwrap();
        assert!(
            report.log_value >= previous - 1e-9,
            "cone {i}: norm fell from {previous} to {}",
            report.log_value
        );
        previous = report.log_value;
    }
}

/// The two splitting fragments recombine to the original function on a
/// dense grid, and both carry stable truncated norms on the enlarged cones.
#[test]
fn splitting_recombines_and_stays_normable() {
    let f = TestFunction::from_exprs(1, "1", "-w1^2").unwrap();
    let params = GSParams::new(0.5, 0.5, 1.0, 1.0).unwrap();
    let u1 = Cone::from_generators(1, &[vec![1.0]]).unwrap();
    let u2 = Cone::from_generators(1, &[vec![-1.0]]).unwrap();
    let options = DecomposeOptions {
        partition_points: 1000,
        partition_radius: 6.0,
        ..DecomposeOptions::default()
    };
    let dec =
        decompose(&f, &Cone::origin(1), None, &u1, &u2, &params, &options).unwrap();
    assert!(
        dec.certificate.partition_sup_error < 1e-9,
        "partition error {}",
        dec.certificate.partition_sup_error
    );
    assert!(!dec.certificate.f1_report.diverges);
    assert!(!dec.certificate.f2_report.diverges);
    assert!(dec.certificate.a_prime >= 2.0 * dec.certificate.a0);
    // Carriage means rapid decay on the named cone: the fragment carried by
    // the positive half-line is negligible deep inside it, and vice versa.
    let far_right = [Complex64::new(4.0, 0.0)];
    let far_left = [Complex64::new(-4.0, 0.0)];
    assert!(dec.f1.eval(&far_right).norm() < 1e-12);
    assert!(dec.f2.eval(&far_left).norm() < 1e-12);
    let sum = dec.f1.eval(&far_right) + dec.f2.eval(&far_right);
    let direct = f.eval(&far_right);
    assert!((sum - direct).norm() < 1e-12);
}

/// The literal grammar reproduces builder-made functions, including support
/// restrictions, and its norms agree with the builder route.
#[test]
fn literal_round_trip_matches_builder_norms() {
    let parsed = parse_test_function(r#"tf{dim=1, P="1", Q="-w1^2"}"#).unwrap();
    let built = TestFunction::from_exprs(1, "1", "-w1^2").unwrap();
    let params = GSParams::new(0.5, 0.5, 4.0, 4.0).unwrap();
    let trunc = quick_trunc();
    let a = real_norm(&parsed, &params, &trunc).unwrap();
    let b = real_norm(&built, &params, &trunc).unwrap();
    assert_eq!(a.log_value, b.log_value);
}

/// The region integral of the borderline-decay exemplar grows with its
/// cutoff and matches the frozen reference at the smallest cutoff.
#[test]
fn divergence_exemplar_grows_with_cutoff() {
    let i1 = example1_divergence(1.0).unwrap();
    assert!((i1 - 2.0893116696096797).abs() < 1e-7 * i1);
    let i3 = example1_divergence(3.0).unwrap();
    assert!(i3 > i1);
}
