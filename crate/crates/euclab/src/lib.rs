//! # euclab — a laboratory for cone-carried functionals
//!
//! This crate is a numerical and combinatorial workbench for analytic
//! functionals carried by closed convex cones and for the weighted spaces of
//! test functions they act on. It provides, as composable library modules:
//!
//! - [`cones`] — polyhedral cone geometry: membership, sup-norm distances,
//!   dual cones, containment certificates, and a small literal grammar for
//!   describing cones in configuration files;
//! - [`spaces`] — test functions of the form `P(w)·exp(Q(w))` (optionally
//!   damped by flat factors), two families of weighted sup-norms over real
//!   and tubular domains, a smooth partition subordinate to a cone cover,
//!   and the flatness estimates that make the partition useful;
//! - [`laplace`] — functionals assembled from point masses and densities on
//!   a cone, their Laplace transforms on tube domains, weighted norms of the
//!   transforms, and boundary-value checks relating the transform back to
//!   the functional;
//! - [`wick`] — the combinatorics of pair-multiplicity profiles (exact
//!   matching counts, profile enumeration), growth conditions on coefficient
//!   sequences, certified majorants for two-point models, and truncated
//!   series evaluation with a rigorous tail bound;
//! - [`euclid`] — the imaginary-time injection, Schwinger-type series
//!   evaluation, a reflected-kernel integral transform, reconstruction
//!   identities connecting the transform to cone-carried functionals, a
//!   chronological-ordering search, and a boost/rotation intertwining check;
//! - [`scenario`] — a configuration-driven runner that binds the modules
//!   into named, seeded, reproducible scenarios emitting CSV tables and
//!   JSON summaries (the `euclab` binary is a thin wrapper around it).
//!
//! Numerical infrastructure lives in [`quad`] (adaptive Gauss–Kronrod
//! quadrature for complex-valued integrands, tensorized over boxes and
//! mapped onto half-lines) and [`special`] (the error function on the
//! complex plane, entire-function evaluation by path integration).
//!
//! Everything is desk-scale: dimensions ≤ 4, a handful of points, truncation
//! orders in the tens. The emphasis is on *checkable* numerics — closed
//! forms, exact integer combinatorics, and independently computed oracles —
//! rather than performance.
//!
//! ## Quick taste
//!
//! ```
//! use euclab::cones::Cone;
//!
//! // The forward light cone in the plane is the polyhedral cone spanned by
//! // the two lightlike generators (1, 1) and (1, -1).
//! let cone = Cone::from_generators(2, &[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
//! assert!(cone.contains(&[2.0, 0.5]));
//! assert!(!cone.contains(&[0.5, 2.0]));
//!
//! // Its dual under the standard pairing is itself (self-duality of the
//! // quadrant rotated by 45 degrees).
//! let dual = cone.dual();
//! assert!(dual.contains(&[2.0, 0.5]));
//! assert!(!dual.contains(&[0.5, 2.0]));
//! ```

pub mod cones;
pub mod euclid;
pub mod guide;
pub mod laplace;
pub mod quad;
pub mod scenario;
pub mod spaces;
pub mod special;
pub mod util;
pub mod wick;

pub use num_complex::Complex64;
