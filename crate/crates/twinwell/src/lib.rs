//! twinwell: spontaneous emission from a two-level atom tunneling in a
//! double-well potential.
//!
//! The library covers three layers of the same physical problem and checks
//! them against each other:
//!
//! * [`closed_form`] - analytic decay rates, the angular overlap factors
//!   d(eta, beta) and a(eta, beta), and the mean tunneling trajectory
//!   `<z(t)>` with its long-time amplitude and phase.
//! * [`bath`] - a brute-force reference: the electromagnetic continuum is
//!   discretized into an (omega, mu) mode grid and the exact
//!   interaction-picture amplitude equations are integrated with no
//!   Markov/Wigner-Weisskopf approximation.
//! * [`field`] - the far-field intensity pattern of the emitted photon,
//!   its post-selected interference fringes, and a direct-quadrature oracle
//!   for the underlying mode integrals.
//!
//! [`wellcheck`] validates the two-level treatment of the external motion by
//! solving a quartic double well and computing photon-recoil leakage out of
//! the ground doublet. [`runner`] and [`config`] provide the `twinwell` CLI
//! on top: INI scenario files in, deterministic CSV out.
//!
//! Scaled units: c = 1 and omega0 = 1 by default, so times are 1/omega0 and
//! lengths c/omega0. [`wellcheck`] and the SI entry points in [`closed_form`]
//! are the only dimensional code paths.

pub mod bath;
pub mod closed_form;
pub mod config;
pub mod error;
pub mod field;
pub mod fit;
pub mod params;
pub mod quadrature;
pub mod runner;
pub mod si;
pub mod wellcheck;

pub use closed_form::Branch;
pub use error::{Error, Result};
pub use params::{InitialExternalState, ModelParams};
