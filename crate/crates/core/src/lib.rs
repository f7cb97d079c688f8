//! Numerical toolkit for upper bounds on the Dirichlet eigenvalue gap
//! `λ₂ − λ₁` of domains in curved spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`spaceform`]: closed-form model geometry of the constant-curvature
//!   space `N^n(k)` (generalized sine, ball volumes, isoperimetric profile).
//! * [`radial`]: radial Dirichlet spectra of geodesic balls by shooting, and
//!   the test-function profile `h = J/z` with its energy density `F`.
//! * [`warped`]: spectra of geodesic disks in rotationally symmetric surfaces.
//! * [`symmetrize`]: distribution functions and decreasing / increasing
//!   symmetrization of sampled functions onto spaceform balls.
//! * [`mesh`]: 2-D domains in spaceform charts, geodesic hulls and the
//!   volume-transfer radius `σ(r)`.
//! * [`fem`]: P1 finite elements for the first two Dirichlet eigenpairs.
//! * [`comparison`]: Faber–Krahn and Chiti comparison checks.
//! * [`gap`]: balancing point, middle inequalities and the final gap bound.
//! * [`harness`]: tolerances, corpus configuration and report emission.

pub mod comparison;
pub mod error;
pub mod fem;
pub mod gap;
pub mod harness;
pub mod mesh;
pub mod numeric;
pub mod ode;
pub mod par;
pub mod radial;
pub mod spaceform;
pub mod symmetrize;
pub mod warped;

pub use error::{Error, Result};
pub use radial::{BallSpectrum, RadialProfile};
pub use spaceform::{CurvaturePair, Spaceform};
