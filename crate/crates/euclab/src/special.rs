//! The error function on the complex plane.
//!
//! `erf` is entire, so its defining integral `(2/√π)∫₀^w e^{-t²} dt` is
//! path-independent and can be evaluated by adaptive quadrature along the
//! straight segment from the origin — no rational approximations, no branch
//! bookkeeping. Near the origin a short Maclaurin series is cheaper and
//! exact to machine precision.
//!
//! For large *real* arguments the complement `erfc` is computed directly as
//! a half-line integral, which preserves relative accuracy where
//! `1 - erf(x)` would cancel catastrophically.

use crate::quad::{integrate_axes, integrate_segment, Axis, QuadTol};
use num_complex::Complex64;

const TWO_OVER_SQRT_PI: f64 = 1.128379167095512573896158903121545172;

/// Error function of a complex argument.
pub fn erf(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        return erf_series(w);
    }
    let r = integrate_segment(|t| (-t * t).exp(), Complex64::new(0.0, 0.0), w, QuadTol::new(1e-14, 1e-13));
    r.value * TWO_OVER_SQRT_PI
}

/// Complementary error function `1 - erf(w)` of a complex argument.
///
/// For real `w ≥ 2` the tail integral is evaluated directly so the result
/// keeps relative accuracy deep into the tail.
pub fn erfc(w: Complex64) -> Complex64 {
    if w.im == 0.0 && w.re >= 2.0 {
        return Complex64::new(erfc_real_tail(w.re), 0.0);
    }
    Complex64::new(1.0, 0.0) - erf(w)
}

/// Scaled complementary error function `e^{w²}·erfc(w)`.
///
/// Accurate in relative terms on the closed right half-plane, where the
/// unscaled complement underflows; products of the form
/// `e^{s}·erfc(w)` should be computed as `e^{s-w²}·erfcx(w)` there. For
/// `Re w < 0` the reflection `2e^{w²} − erfcx(-w)` is used and inherits the
/// overflow of `e^{w²}`.
pub fn erfcx(w: Complex64) -> Complex64 {
    if w.re < 0.0 {
        return (w * w).exp() * 2.0 - erfcx(-w);
    }
    if w.norm() >= 8.0 {
        // Asymptotic series 1/(w√π) · Σ (-1)^k (2k-1)!!/(2w²)^k; at |w| ≥ 8
        // the terms drop below machine precision long before they turn.
        let inv = (w * w * 2.0).inv();
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..=40 {
            term = -term * (2 * k - 1) as f64 * inv;
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        return sum / (w * std::f64::consts::PI.sqrt());
    }
    // (2/√π) ∫₀^∞ e^{-2ws-s²} ds: bounded integrand, absolutely convergent
    // for Re w ≥ 0, and the scaling is already built in.
    let r = integrate_axes(
        |s| {
            let s = s[0];
            (-(w * (2.0 * s)) - s * s).exp()
        },
        &[Axis::ToPlusInf(0.0)],
        QuadTol::new(1e-14, 1e-13),
    );
    r.value * TWO_OVER_SQRT_PI
}

/// `erfc` restricted to real arguments, accurate in relative terms on the
/// whole line (tail evaluated as a half-line integral for `x ≥ 2`).
pub fn erfc_real(x: f64) -> f64 {
    if x >= 2.0 {
        erfc_real_tail(x)
    } else {
        1.0 - erf(Complex64::new(x, 0.0)).re
    }
}

fn erfc_real_tail(x: f64) -> f64 {
    // (2/√π) ∫_x^∞ e^{-t²} dt, pulled back by t = x + s with the dominant
    // factor e^{-x²} outside so the quadrature works on an O(1) integrand.
    let r = integrate_axes(
        |s| {
            let s = s[0];
            Complex64::new((-2.0 * x * s - s * s).exp(), 0.0)
        },
        &[Axis::ToPlusInf(0.0)],
        QuadTol::new(1e-300, 1e-13),
    );
    TWO_OVER_SQRT_PI * (-x * x).exp() * r.value.re
}

fn erf_series(w: Complex64) -> Complex64 {
    // erf(w) = (2/√π) Σ_k (-1)^k w^{2k+1} / (k! (2k+1)); |w| < 0.5 needs
    // ~12 terms for full double precision.
    let w2 = w * w;
    let mut term = w;
    let mut sum = w;
    let mut k = 0usize;
    loop {
        k += 1;
        term = -term * w2 / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        sum += contrib;
        if contrib.norm() < 1e-18 * sum.norm().max(1e-30) || k > 40 {
            break;
        }
    }
    sum * TWO_OVER_SQRT_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn matches_c_library_on_the_real_axis() {
        for i in -40..=40 {
            let x = i as f64 * 0.1;
            let ours = erf(Complex64::new(x, 0.0)).re;
            assert!((ours - libm::erf(x)).abs() < 1e-13, "erf({x}): {ours}");
        }
    }

    #[test]
    fn complement_keeps_relative_accuracy_in_the_tail() {
        for &x in &[2.0, 3.0, 5.0, 8.0] {
            let ours = erfc_real(x);
            let reference = libm::erfc(x);
            assert!(
                (ours - reference).abs() <= 1e-11 * reference,
                "erfc({x}): {ours} vs {reference}"
            );
        }
        // mpmath: erfc(5) = 1.53745979442803485e-12
        assert!((erfc_real(5.0) - 1.53745979442803485e-12).abs() < 1e-24);
    }

    #[test]
    fn complex_reference_values() {
        // Reference values computed with 30-digit arbitrary-precision
        // arithmetic, frozen here.
        let cases = [
            (Complex64::new(1.0, 1.0), Complex64::new(1.31615128169794764, 0.19045346923783469)),
            (Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.65042575879754288)),
            (Complex64::new(2.0, -0.5), Complex64::new(1.00350224331303635, -0.00474090303129434)),
            (Complex64::new(-1.5, 0.25), Complex64::new(-0.97707589253715448, 0.02755035046073310)),
            (Complex64::new(0.3, 0.0), Complex64::new(0.32862675945912742, 0.0)),
        ];
        for (w, want) in cases {
            assert!(close(erf(w), want, 1e-12), "erf({w}) = {} ≠ {want}", erf(w));
        }
        let w = Complex64::new(3.0, 0.2);
        let want = Complex64::new(7.00427936900706687e-6, -2.18581085213987307e-5);
        assert!((erfc(w) - want).norm() < 1e-12, "erfc({w}) = {}", erfc(w));
    }

    #[test]
    fn symmetries() {
        let w = Complex64::new(0.7, -1.3);
        assert!(close(erf(-w), -erf(w), 1e-13));
        assert!(close(erf(w.conj()), erf(w).conj(), 1e-13));
    }

    #[test]
    fn scaled_complement_reference_values() {
        // Frozen 40-digit arbitrary-precision values of e^{w²}·erfc(w).
        let cases = [
            (Complex64::new(0.3, 0.0), Complex64::new(0.73459933456765514229, 0.0)),
            (Complex64::new(1.0, 0.0), Complex64::new(0.42758357615580700441, 0.0)),
            (Complex64::new(4.0, 0.0), Complex64::new(0.13699945762506138989, 0.0)),
            (Complex64::new(10.0, 0.0), Complex64::new(0.056140992743822585858, 0.0)),
            (Complex64::new(50.0, 0.0), Complex64::new(0.0112815362653237725, 0.0)),
            (Complex64::new(1.0, 1.0), Complex64::new(0.30474420525691259246, -0.20821893820283162729)),
            (Complex64::new(0.5, 3.0), Complex64::new(0.037126366054692344667, -0.19298375530036208839)),
            (Complex64::new(6.0, 2.0), Complex64::new(0.083993583874545102241, -0.027332489696436355816)),
            (Complex64::new(12.0, 5.0), Complex64::new(0.04001197599345338244, -0.016574109257633697529)),
            (Complex64::new(0.1, 0.1), Complex64::new(0.88847856247564368396, -0.094331651057285101749)),
            (Complex64::new(0.0, 4.0), Complex64::new(1.1253517471925911451e-7, -0.14595358990015278327)),
            (Complex64::new(3.0, -7.0), Complex64::new(0.02979582194988339655, 0.068306545603570442817)),
            (Complex64::new(-1.0, -1.0), Complex64::new(-1.1370378783511973665, 2.0268137918541950181)),
            (Complex64::new(-0.5, 2.0), Complex64::new(-0.12293249482276237412, -0.32755513633331258763)),
        ];
        for (w, want) in cases {
            let got = erfcx(w);
            assert!(
                (got - want).norm() <= 1e-11 * want.norm(),
                "erfcx({w}) = {got} ≠ {want}"
            );
        }
    }

    #[test]
    fn scaled_complement_is_consistent_with_the_complement() {
        // Independent route: erfcx(w)·e^{-w²} must reproduce erfc(w) where
        // the latter is well conditioned.
        for &w in &[
            Complex64::new(0.4, 0.9),
            Complex64::new(1.5, -0.5),
            Complex64::new(2.5, 2.5),
        ] {
            let lhs = erfcx(w) * (-w * w).exp();
            let rhs = erfc(w);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-12), "at {w}");
        }
    }

    #[test]
    fn partition_identity_on_the_line() {
        // erfc(x)/2 + erfc(-x)/2 = 1 exactly in exact arithmetic; here to
        // near machine precision.
        for i in -10..=10 {
            let x = i as f64 * 0.37;
            let total = 0.5 * erfc_real(x) + 0.5 * erfc_real(-x);
            assert!((total - 1.0).abs() < 1e-12, "partition at {x}: {total}");
        }
    }
}
