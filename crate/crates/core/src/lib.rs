//! Frequency-domain analysis and damping optimization for a string with
//! distributed internal damping and a single point damper.
//!
//! The crate has four layers:
//!
//! * [`analytic`] - closed-form displacement/output transfer functions for
//!   uniform and boundary forcing, their limiting cases, and a quadrature
//!   cross-check.
//! * [`norms`] - H-infinity and H2 norms of any scalar frequency response,
//!   with resonance-aware peak search and adaptive quadrature.
//! * [`discrete`] - finite-difference semi-discretization, its transfer
//!   function via a tridiagonal-plus-rank-one solve, and a Lyapunov-equation
//!   H2 cross-check.
//! * [`optimize`] - grid sweeps and multi-start Nelder-Mead minimization of
//!   the norms over damper position and viscosity.
//!
//! All types are immutable after construction and all operations are pure
//! functions, safe to call concurrently.

pub mod analytic;
pub mod discrete;
pub mod norms;
pub mod optimize;
pub mod params;
pub mod scaled;

pub use params::{Damper, Forcing, ModelError, StringParams};
