//! Direct and inverse Sturm–Liouville problems with the spectral parameter
//! in the right boundary condition.

// `!(x > limit)` is deliberate throughout: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod forward;
pub mod glm;
pub mod grid;
pub mod io;
pub mod numerics;
pub mod problem;
pub mod synthetic;
pub mod twospectra;

pub use error::{Error, Result};
pub use grid::Grid;
pub use problem::{
    validate_problem, validate_spectral_data, validate_two_spectra, EigenRecord, ProblemCoefficients,
    ProblemInput, ResidualTolerance, SpectralData, SpectralInput, TwoSpectra, TwoSpectraInput,
    ValidationReport,
};
