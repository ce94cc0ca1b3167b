//! Steady-state optical response of a ring cavity whose two folding mirrors
//! are nanomechanical oscillators.
//!
//! A strong pump at `omega_c` and a weak probe at `omega_c + delta` drive the
//! cavity. To first order in the probe the intracavity field carries three
//! components (pump, probe and the four-wave-mixing Stokes line at
//! `2 omega_c - omega_p`), each of which has a closed form. This crate
//! evaluates those closed forms and the analysis built on top of them:
//!
//! - [`params`]: physical parameters, single-photon couplings and the
//!   pump-only steady state.
//! - [`response`]: probe and Stokes response coefficients over detuning grids.
//! - [`modes`]: the sextic response denominator, its complex roots, root
//!   tracking across pump-power sweeps, dressed-mode estimates and stability.
//! - [`features`]: peak/dip extraction with half-prominence widths, adaptive
//!   grid refinement and comparison against analytic width formulas.
//! - [`normalcoords`]: relative / center-of-mass mirror coordinates.
//! - [`cli`]: key-value configuration files, run artifacts and the
//!   `spectrum`, `stokes`, `roots`, `features` commands.
//!
//! All detunings and rates are handled internally in units of the reference
//! mechanical frequency `omega_m`.

// NaN-rejecting guards are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod features;
pub mod modes;
pub mod normalcoords;
pub mod params;
pub mod poly;
pub mod response;

pub use error::{Error, Result};
pub use features::{FeatureKind, SpectralFeature};
pub use modes::{DenominatorPoly, RootSet, RootTrajectory};
pub use params::{DriveState, ScaledSystem, SystemParams};
pub use response::{Observable, ResponseModel, ResponsePoint, ResponseSpectrum};

pub use num_complex::Complex64;
