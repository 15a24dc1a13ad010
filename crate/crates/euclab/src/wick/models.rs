//! Two-point models: analytic evaluators on the tube over the backward
//! cone, with declared growth envelopes and certified bound constants.
//!
//! A model evaluates `𝐰(ζ)` for `ζ = ξ + iη`, `η` interior to the backward
//! cone `𝕍₋ = {η : η⁰ < −|η⃗|₂}`. The shipped families are
//!
//! - the inverse Lorentz square `𝐰(ζ) = c/(−ζ²_L)` (`massless2`), and
//! - the logarithm `𝐰(ζ) = −c·log(−ζ²_L/μ²)` with the principal branch
//!   (`dipole2`, `dipole4`),
//!
//! where `ζ²_L = (ζ⁰)² − Σ_i (ζ^i)²`. On the tube, `−ζ²_L` avoids the
//! closed negative real axis (at a real-valued Lorentz product the real
//! part is forced positive by the cone membership), so both families are
//! analytic there.
//!
//! Each model declares monotone envelopes `w_IR` (growing at infinity) and
//! `w_UV` (growing at zero) and a constant `C` such that
//!
//! ```text
//!   |𝐰(ζ)| ≤ C·(1 + w_IR(2|ζ|) + w_UV(|η|))
//! ```
//!
//! on the tube over its certification subcone `{η : |η⃗|₂ ≤ margin·|η⁰|}`.
//! The constants are measured on dense scans and shipped with headroom;
//! [`TwoPointModel::certify_bound`] re-measures the ratio on a grid and
//! compares against the shipped value. A second declared object is the
//! majorant `𝐰_maj(z, z′)`, entering the square inequality
//!
//! ```text
//!   |𝐰(x − x′ − 2iy)|² ≤ |𝐰_maj(x−iy, x+iy)|·|𝐰_maj(x′−iy, x′+iy)|
//! ```
//!
//! for `y` in the forward cone, which [`TwoPointModel::probe_majorant`]
//! verifies on random samples. For the inverse-square model the majorant
//! is the two-point evaluator itself (the positive-metric free field is
//! its own majorant; the inequality reduces to `|(ξ−2iy)²_L| ≥ 4y²_L`).
//! For the logarithmic model it is the squared log-envelope
//! `c·(π + ln(1+2s) + ln(1+μ²/|(z−z′)²_L|))²` with `s` the larger sup
//! norm of the two arguments.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::WickError;
use crate::util::l2_norm;

/// The analytic shape of a model's evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// `c/(−ζ²_L)`.
    InverseSquare,
    /// `−c·log(−ζ²_L/μ²)`, principal branch.
    Logarithmic,
}

/// A two-point evaluator with declared envelopes and certified constants.
#[derive(Debug, Clone)]
pub struct TwoPointModel {
    pub name: &'static str,
    pub dim: usize,
    pub kind: ModelKind,
    /// Overall scale `c > 0`.
    pub scale: f64,
    /// Squared scale `μ²` of the logarithm's argument.
    pub mu2: f64,
    /// Certified constant of the growth bound on the certification
    /// subcone.
    pub bound_constant: f64,
    /// Certification subcone aperture: `|η⃗|₂ ≤ margin·|η⁰|`.
    pub subcone_margin: f64,
}

/// The Lorentz square `(ζ⁰)² − Σ_{i≥1} (ζ^i)²`.
pub fn lorentz_square(zeta: &[Complex64]) -> Complex64 {
    let mut s = zeta[0] * zeta[0];
    for c in &zeta[1..] {
        s -= c * c;
    }
    s
}

/// Strict membership of the interior of the backward cone
/// `{η : η⁰ < −|η⃗|₂}`.
pub fn backward_cone_interior(eta: &[f64]) -> bool {
    eta[0] < -l2_norm(&eta[1..])
}

/// Result of re-measuring a model's growth bound on its certification
/// grid.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub model: String,
    pub measured_ratio: f64,
    pub declared_constant: f64,
    pub points: usize,
    pub ok: bool,
}

/// Result of sampling the majorant square inequality.
#[derive(Debug, Clone, Serialize)]
pub struct MajorantProbe {
    pub model: String,
    pub samples: usize,
    pub violations: usize,
    /// Smallest right-to-left ratio seen (≥ 1 when the inequality holds).
    pub min_margin: f64,
}

impl TwoPointModel {
    /// The shipped model registry.
    pub fn registry() -> Vec<TwoPointModel> {
        vec![
            TwoPointModel {
                name: "massless2",
                dim: 2,
                kind: ModelKind::InverseSquare,
                scale: 1.0,
                mu2: 1.0,
                bound_constant: 1.0,
                subcone_margin: 0.5,
            },
            TwoPointModel {
                name: "dipole2",
                dim: 2,
                kind: ModelKind::Logarithmic,
                scale: 1.0,
                mu2: 1.0,
                bound_constant: 2.0,
                subcone_margin: 0.5,
            },
            TwoPointModel {
                name: "dipole4",
                dim: 4,
                kind: ModelKind::Logarithmic,
                scale: 1.0,
                mu2: 1.0,
                bound_constant: 2.0,
                subcone_margin: 0.5,
            },
        ]
    }

    /// Looks a model up by its registry name.
    pub fn by_name(name: &str) -> Option<TwoPointModel> {
        TwoPointModel::registry().into_iter().find(|m| m.name == name)
    }

    /// Evaluates `𝐰(ζ)` after checking that `Im ζ` is interior to the
    /// backward cone.
    pub fn eval(&self, zeta: &[Complex64]) -> Result<Complex64, WickError> {
        if zeta.len() != self.dim {
            return Err(WickError::InvalidInput(format!(
                "model {} expects {} components, got {}",
                self.name,
                self.dim,
                zeta.len()
            )));
        }
        let eta: Vec<f64> = zeta.iter().map(|c| c.im).collect();
        if !backward_cone_interior(&eta) {
            return Err(WickError::TubeViolation(format!(
                "imaginary part {eta:?} is not interior to the backward cone"
            )));
        }
        Ok(self.eval_unchecked(zeta))
    }

    /// The evaluator formula without the tube check (used by probes that
    /// construct their arguments inside the tube by design).
    pub fn eval_unchecked(&self, zeta: &[Complex64]) -> Complex64 {
        let q = -lorentz_square(zeta);
        match self.kind {
            ModelKind::InverseSquare => q.inv() * self.scale,
            ModelKind::Logarithmic => -(q / self.mu2).ln() * self.scale,
        }
    }

    /// The infrared envelope `w_IR`, monotone nondecreasing on `[0, ∞)`.
    pub fn w_ir(&self, r: f64) -> f64 {
        match self.kind {
            ModelKind::InverseSquare => 0.0,
            ModelKind::Logarithmic => (1.0 + r).ln(),
        }
    }

    /// The ultraviolet envelope `w_UV`, monotone growing as its argument
    /// approaches zero.
    pub fn w_uv(&self, t: f64) -> f64 {
        match self.kind {
            ModelKind::InverseSquare => 1.0 / (t * t),
            ModelKind::Logarithmic => (1.0 + 1.0 / t).ln(),
        }
    }

    /// The declared majorant value `|𝐰_maj(z, z′)|`.
    pub fn majorant(&self, z: &[Complex64], zp: &[Complex64]) -> f64 {
        let diff: Vec<Complex64> = z.iter().zip(zp).map(|(a, b)| a - b).collect();
        let q = lorentz_square(&diff).norm();
        match self.kind {
            ModelKind::InverseSquare => self.scale / q,
            ModelKind::Logarithmic => {
                let s = z
                    .iter()
                    .chain(zp)
                    .map(|c| c.norm())
                    .fold(0.0f64, f64::max);
                let envelope =
                    std::f64::consts::PI + (1.0 + 2.0 * s).ln() + (1.0 + self.mu2 / q).ln();
                self.scale * envelope * envelope
            }
        }
    }

    /// Re-measures the growth-bound ratio
    /// `|𝐰(ζ)|/(1 + w_IR(2|ζ|) + w_UV(|η|))` over a grid on the tube above
    /// the certification subcone and compares with the declared constant.
    pub fn certify_bound(&self, seed: u64, samples: usize) -> BoundCertificate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let t = 10f64.powf(rng.gen_range(-3.0..1.0));
            let eta = self.random_subcone_point(&mut rng, t);
            let zeta: Vec<Complex64> = eta
                .iter()
                .map(|&e| Complex64::new(rng.gen_range(-20.0..20.0), e))
                .collect();
            let value = self.eval_unchecked(&zeta).norm();
            let z_sup = zeta.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
            let eta_sup = eta.iter().map(|e| e.abs()).fold(0.0f64, f64::max);
            let ratio = value / (1.0 + self.w_ir(2.0 * z_sup) + self.w_uv(eta_sup));
            worst = worst.max(ratio);
        }
        BoundCertificate {
            model: self.name.to_string(),
            measured_ratio: worst,
            declared_constant: self.bound_constant,
            points: samples,
            ok: worst <= self.bound_constant,
        }
    }

    /// Samples the majorant square inequality at random points with `y`
    /// interior to the forward cone.
    pub fn probe_majorant(&self, seed: u64, samples: usize) -> MajorantProbe {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut violations = 0usize;
        let mut min_margin = f64::INFINITY;
        for _ in 0..samples {
            let t = 10f64.powf(rng.gen_range(-2.0..1.0));
            // y in the forward cone interior: y⁰ = t, |y⃗| ≤ 0.95 t.
            let y = {
                let mut v = self.random_subcone_point(&mut rng, t);
                for c in v.iter_mut() {
                    *c = -*c;
                }
                v
            };
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-15.0..15.0)).collect();
            let xp: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-15.0..15.0)).collect();
            let zeta: Vec<Complex64> = (0..self.dim)
                .map(|j| Complex64::new(x[j] - xp[j], -2.0 * y[j]))
                .collect();
            let lhs = self.eval_unchecked(&zeta).norm().powi(2);
            let pair = |a: &[f64]| -> f64 {
                let lower: Vec<Complex64> =
                    (0..self.dim).map(|j| Complex64::new(a[j], -y[j])).collect();
                let upper: Vec<Complex64> =
                    (0..self.dim).map(|j| Complex64::new(a[j], y[j])).collect();
                self.majorant(&lower, &upper)
            };
            let rhs = pair(&x) * pair(&xp);
            let margin = if lhs > 0.0 { rhs / lhs } else { f64::INFINITY };
            min_margin = min_margin.min(margin);
            if rhs < lhs {
                violations += 1;
            }
        }
        MajorantProbe { model: self.name.to_string(), samples, violations, min_margin }
    }

    /// A random point of the certification subcone with `|η⁰| = t`
    /// (backward-cone side: `η⁰ = −t`).
    fn random_subcone_point(&self, rng: &mut ChaCha8Rng, t: f64) -> Vec<f64> {
        let mut eta = vec![0.0; self.dim];
        eta[0] = -t;
        if self.dim > 1 {
            let dir: Vec<f64> = (0..self.dim - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = l2_norm(&dir).max(1e-300);
            let s = rng.gen_range(0.0..self.subcone_margin * 0.95);
            for (slot, d) in eta[1..].iter_mut().zip(&dir) {
                *slot = d / n * s * t;
            }
        }
        eta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::laplace::cauchy_riemann_residual;

    fn frozen_zeta1() -> Vec<Complex64> {
        vec![Complex64::new(0.3, -1.0), Complex64::new(-0.2, 0.2)]
    }

    #[test]
    fn registry_names_resolve() {
        let names: Vec<&str> = TwoPointModel::registry().iter().map(|m| m.name).collect();
        assert_eq!(names, vec!["massless2", "dipole2", "dipole4"]);
        assert_eq!(TwoPointModel::by_name("dipole4").unwrap().dim, 4);
        assert!(TwoPointModel::by_name("massless3").is_none());
    }

    #[test]
    fn evaluators_match_reference_values() {
        // 40-digit reference evaluations at a fixed interior tube point.
        let z = frozen_zeta1();
        let m = TwoPointModel::by_name("massless2").unwrap().eval(&z).unwrap();
        assert_relative_eq!(m.re, 0.8284023668639053467456398, max_relative = 1e-14);
        assert_relative_eq!(m.im, -0.4733727810650887378049647, max_relative = 1e-14);
        let d = TwoPointModel::by_name("dipole2").unwrap().eval(&z).unwrap();
        assert_relative_eq!(d.re, -0.04697280642126391414751411, max_relative = 1e-13);
        assert_relative_eq!(d.im, -0.5191461142465229228662395, max_relative = 1e-13);
    }

    #[test]
    fn tube_violations_are_rejected() {
        let model = TwoPointModel::by_name("dipole2").unwrap();
        // Imaginary part on the cone boundary (lightlike) or outside.
        let boundary = vec![Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)];
        assert!(matches!(model.eval(&boundary), Err(WickError::TubeViolation(_))));
        let outside = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(model.eval(&outside), Err(WickError::TubeViolation(_))));
        let wrong_dim = vec![Complex64::new(0.0, -1.0)];
        assert!(matches!(model.eval(&wrong_dim), Err(WickError::InvalidInput(_))));
    }

    #[test]
    fn growth_bounds_certify_at_the_declared_constants() {
        for model in TwoPointModel::registry() {
            let cert = model.certify_bound(29, 20_000);
            assert!(
                cert.ok,
                "{}: measured {} over declared {}",
                cert.model, cert.measured_ratio, cert.declared_constant
            );
            // The declared constant is meaningfully tight, not arbitrary.
            assert!(cert.measured_ratio > 0.3 * cert.declared_constant);
        }
    }

    #[test]
    fn majorant_inequality_holds_on_samples() {
        for model in TwoPointModel::registry() {
            let probe = model.probe_majorant(31, 20_000);
            assert_eq!(probe.violations, 0, "{}: {:?}", model.name, probe);
            assert!(probe.min_margin >= 1.0);
        }
    }

    #[test]
    fn evaluators_are_analytic_on_the_tube() {
        for model in TwoPointModel::registry() {
            let mut rng = ChaCha8Rng::seed_from_u64(37);
            for _ in 0..50 {
                let t = 10f64.powf(rng.gen_range(-1.0..0.5));
                let eta = model.random_subcone_point(&mut rng, t);
                let z: Vec<Complex64> = eta
                    .iter()
                    .map(|&e| Complex64::new(rng.gen_range(-3.0..3.0), e))
                    .collect();
                let f = |w: &[Complex64]| model.eval_unchecked(w);
                let r = cauchy_riemann_residual(&f, &z, 1e-5);
                assert!(r < 1e-6, "{}: residual {r} at {z:?}", model.name);
            }
        }
    }
}
