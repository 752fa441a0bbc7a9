//! Reconstruction from one spectrum and norming constants via the main
//! (Gel'fand–Levitan–Marchenko type) integral equation.

mod kernel;
mod main_eq;
mod recover;

use serde::{Deserialize, Serialize};

pub use kernel::{build_F, series_a, KernelField, KernelKind, TailMode};
pub use main_eq::{solve_all, solve_main_equation, KernelRow, MainEquationSolution, NestedSolver, PIVOT_FLOOR};
pub use recover::{
    chi_from_product, dphi_end_integral, rebuild_phi, recover_boundary_constants, recover_q_h, BoundaryFit, PhiRebuild, QRecovery,
};

use crate::error::Result;
use crate::grid::Grid;
use crate::numerics::DiffScheme;
use crate::problem::{ProblemCoefficients, SpectralData};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionOptions {
    pub grid: Grid,
    pub tail: TailMode,
    pub diff: DiffScheme,
    /// Admissible `|kappa_1 + 1|`.
    pub tol_kappa: f64,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        Self { grid: Grid::default(), tail: TailMode::Truncate, diff: DiffScheme::default(), tol_kappa: 5e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Discrete residual of the main equation, per grid row.
    pub glm_residuals: Vec<f64>,
    pub max_glm_residual: f64,
    pub max_abs_f: f64,
    pub min_pivot: f64,
    pub tail_mode: TailMode,
    pub omega: f64,
    /// `max_x |h + (1/2) int q - K(x,x)|`.
    pub diagonal_consistency: f64,
    pub kappa_residuals: [f64; 2],
    pub rho_pairs: f64,
    /// Index of an eigenvalue within `1e-6 max(1, |H1|)` of the recovered
    /// `H1`. Then `psi(pi, lambda_n) = 0` and formulas dividing by
    /// `H1 - lambda` degenerate; the product forms used here stay finite.
    pub eigenvalue_at_h1: Option<usize>,
}

/// See [`Diagnostics::eigenvalue_at_h1`].
pub fn eigenvalue_at(lambdas: &[f64], h1: f64) -> Option<usize> {
    let tol = 1e-6 * h1.abs().max(1.0);
    lambdas.iter().position(|l| (l - h1).abs() < tol)
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub coefficients: ProblemCoefficients,
    pub kernel: KernelField,
    pub f: KernelField,
    pub boundary: BoundaryFit,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    pub fn kappa(&self) -> [f64; 4] {
        self.boundary.kappa
    }
}

pub fn reconstruct_from_spectral_data(d: &SpectralData, opts: &ReconstructionOptions) -> Result<ReconstructionResult> {
    let f = build_F(d, opts.grid, opts.tail);
    let sol = solve_all(&f)?;
    let qh = recover_q_h(&sol.kernel, opts.diff);
    let chi = chi_from_product(d, opts.tail)?;
    let boundary = recover_boundary_constants(d, &sol.kernel, &chi, opts.tol_kappa)?;
    let coefficients = ProblemCoefficients::new(qh.q, qh.h, boundary.big_h, boundary.h1, boundary.h2)?;
    let diagnostics = Diagnostics {
        max_glm_residual: sol.max_residual(),
        min_pivot: sol.min_pivot(),
        glm_residuals: sol.residuals,
        max_abs_f: f.max_abs(),
        tail_mode: opts.tail,
        omega: d.omega(),
        diagonal_consistency: qh.consistency,
        kappa_residuals: boundary.kappa_residuals,
        rho_pairs: boundary.rho_pairs,
        eigenvalue_at_h1: eigenvalue_at(d.lambdas(), boundary.h1),
    };
    Ok(ReconstructionResult { coefficients, kernel: sol.kernel, f, boundary, diagnostics })
}
