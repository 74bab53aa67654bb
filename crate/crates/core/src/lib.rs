//! Surface-acoustic-wave quantum transducer toolkit.
//!
//! Material catalog, Rayleigh-mode solvers, single-phonon zero-point
//! estimates, groove-mirror cavity budgets, qubit–phonon couplings and a
//! Lindblad engine for cascaded two-node state transfer.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cavity;
pub mod constants;
pub mod couplings;
pub mod dynamics;
pub mod emit;
pub mod error;
pub mod materials;
pub mod poly;
pub mod quad;
pub mod rayleigh;
pub mod zeropoint;

pub use num_complex::Complex64;

pub use cavity::{CavityBudget, MirrorSpec};
pub use couplings::{CoopResult, DqdSpectrum};
pub use dynamics::{DensityMatrix, HamiltonianSpec, HilbertSpec, NoiseSpec, PulseSpec};
pub use error::{Error, Result};
pub use materials::{Catalog, MaterialRecord};
pub use rayleigh::{GeneralModeSolution, PiezoFieldProfile, RayleighSolution};
pub use zeropoint::{ModeGeometry, ZeroPointSet};
