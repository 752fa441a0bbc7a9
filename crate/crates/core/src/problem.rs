//! Problem coefficients, spectral data and their validation.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::asymptotics::estimate_omega;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    /// Breaks a hard invariant; the data cannot be used.
    Error,
    /// Heuristic check failed; fatal only in strict mode.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
    /// Values derived while validating (for example `rho`, estimated `omega`).
    pub derived: Vec<(String, f64)>,
}

impl ValidationReport {
    fn error(&mut self, code: &str, message: impl Into<String>) {
        self.issues.push(Issue { severity: Severity::Error, code: code.into(), message: message.into() });
    }

    fn warn(&mut self, code: &str, message: impl Into<String>) {
        self.issues.push(Issue { severity: Severity::Warning, code: code.into(), message: message.into() });
    }

    fn note(&mut self, key: &str, value: f64) {
        self.derived.push((key.into(), value));
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    /// No hard errors, and in strict mode no warnings either.
    pub fn passes(&self, strict: bool) -> bool {
        self.issues.iter().all(|i| !strict && i.severity == Severity::Warning)
    }

    pub fn derived_value(&self, key: &str) -> Option<f64> {
        self.derived.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    fn into_result(self, context: &str) -> Result<()> {
        let errors: Vec<String> = self
            .issues
            .iter()
            .filter(|i| i.severity == Severity::Error)
            .map(|i| i.message.clone())
            .collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{context}: {}", errors.join("; "))))
        }
    }
}

/// Unvalidated problem description, as read from input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInput {
    pub q: Vec<f64>,
    pub h: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
}

pub fn validate_problem(p: &ProblemInput) -> ValidationReport {
    let mut r = ValidationReport::default();
    let rho = p.big_h * p.h1 - p.h2;
    r.note("rho", rho);
    for (name, v) in [("h", p.h), ("H", p.big_h), ("H1", p.h1), ("H2", p.h2)] {
        if !v.is_finite() {
            r.error("non_finite_coefficient", format!("{name} is not finite"));
        }
    }
    if !(rho > 0.0) {
        r.error("rho_not_positive", format!("rho = H*H1 - H2 = {rho} must be positive"));
    }
    if p.q.len() < 3 {
        r.error("grid_too_small", format!("q needs at least 3 samples, got {}", p.q.len()));
    }
    if let Some(i) = p.q.iter().position(|v| !v.is_finite()) {
        r.error("non_finite_q", format!("q[{i}] is not finite"));
    }
    r
}

/// The boundary value problem `-y'' + q y = lambda y`,
/// `y'(0) = h y(0)`, `lambda (y'(pi) + H y(pi)) = H1 y'(pi) + H2 y(pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemCoefficients {
    grid: Grid,
    q: Vec<f64>,
    h: f64,
    big_h: f64,
    h1: f64,
    h2: f64,
}

impl ProblemCoefficients {
    pub fn new(q: Vec<f64>, h: f64, big_h: f64, h1: f64, h2: f64) -> Result<Self> {
        Self::try_from(ProblemInput { q, h, big_h, h1, h2 })
    }

    /// Samples `q` on a grid with `intervals` cells.
    pub fn from_fn(intervals: usize, q: impl Fn(f64) -> f64, h: f64, big_h: f64, h1: f64, h2: f64) -> Result<Self> {
        let grid = Grid::new(intervals)?;
        Self::new(grid.points().into_iter().map(q).collect(), h, big_h, h1, h2)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn big_h(&self) -> f64 {
        self.big_h
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    pub fn rho(&self) -> f64 {
        self.big_h * self.h1 - self.h2
    }

    /// Same `q` and right boundary condition, different `h`.
    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.q.clone(), h, self.big_h, self.h1, self.h2)
    }

    pub fn potential(&self) -> Potential {
        Potential::new(self.grid, &self.q).expect("q length matches grid by construction")
    }

    /// `int_0^pi q`, trapezoid rule.
    pub fn q_integral(&self) -> f64 {
        let step = self.grid.step();
        let n = self.q.len();
        step * (self.q.iter().sum::<f64>() - 0.5 * (self.q[0] + self.q[n - 1]))
    }

    /// `omega = h + H + (1/2) int q`.
    pub fn omega(&self) -> f64 {
        self.h + self.big_h + 0.5 * self.q_integral()
    }

    pub fn to_input(&self) -> ProblemInput {
        ProblemInput { q: self.q.clone(), h: self.h, big_h: self.big_h, h1: self.h1, h2: self.h2 }
    }
}

impl TryFrom<ProblemInput> for ProblemCoefficients {
    type Error = Error;

    fn try_from(p: ProblemInput) -> Result<Self> {
        validate_problem(&p).into_result("problem coefficients")?;
        let grid = Grid::new(p.q.len() - 1)?;
        Ok(Self { grid, q: p.q, h: p.h, big_h: p.big_h, h1: p.h1, h2: p.h2 })
    }
}

/// Unvalidated spectral data `{lambda_n, gamma_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralInput {
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

/// Thresholds for the heuristic asymptotics test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualTolerance {
    /// Largest admissible share of residual energy in the upper half of indices.
    pub tail_share: f64,
    /// Total residual energy below this is accepted outright.
    pub negligible: f64,
}

impl Default for ResidualTolerance {
    fn default() -> Self {
        Self { tail_share: 0.4, negligible: 1e-10 }
    }
}

/// Residuals `n (s_n - (n-1) - omega/(n pi))` and `n (gamma_n - pi/2)` for `n >= 2`.
pub fn asymptotic_residuals(lambdas: &[f64], gammas: &[f64], omega: f64) -> (Vec<f64>, Vec<f64>) {
    let mut zeta = Vec::new();
    let mut zeta_g = Vec::new();
    for n in 2..lambdas.len().min(gammas.len()) {
        let nf = n as f64;
        let s = lambdas[n].max(0.0).sqrt();
        zeta.push(nf * (s - (nf - 1.0) - omega / (nf * PI)));
        zeta_g.push(nf * (gammas[n] - FRAC_PI_2));
    }
    (zeta, zeta_g)
}

/// Partial l2 sums must not keep growing: the upper half of the indices may
/// carry at most `tail_share` of the total energy.
fn residual_is_decaying(res: &[f64], tol: &ResidualTolerance) -> (bool, f64) {
    let total: f64 = res.iter().map(|v| v * v).sum();
    if total <= tol.negligible {
        return (true, 0.0);
    }
    let tail: f64 = res[res.len() / 2..].iter().map(|v| v * v).sum();
    let share = tail / total;
    (share <= tol.tail_share, share)
}

pub fn validate_spectral_data(d: &SpectralInput, tol: &ResidualTolerance) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = d.lambdas.len();
    if n != d.gammas.len() {
        r.error(
            "length_mismatch",
            format!("{} eigenvalues but {} norming constants", n, d.gammas.len()),
        );
    }
    if n < 3 {
        r.error("too_few_pairs", format!("need at least 3 pairs, got {n}"));
    }
    if let Some(i) = d.lambdas.iter().position(|v| !v.is_finite()) {
        r.error("non_finite_lambda", format!("lambda_{i} is not finite"));
    }
    if let Some(i) = d.gammas.iter().position(|v| !v.is_finite()) {
        r.error("non_finite_gamma", format!("gamma_{i} is not finite"));
    }
    for (i, w) in d.lambdas.windows(2).enumerate() {
        if w[0] == w[1] {
            r.error("not_distinct", format!("lambda_{i} = lambda_{} = {}", i + 1, w[0]));
        } else if w[0] > w[1] {
            r.error("not_increasing", format!("lambda_{i} > lambda_{}", i + 1));
        }
    }
    for (i, &g) in d.gammas.iter().enumerate() {
        if !(g > 0.0) {
            r.error("gamma_not_positive", format!("gamma_{i} = {g} must be positive"));
        }
    }
    if r.issues.iter().any(|i| i.severity == Severity::Error) {
        return r;
    }

    let omega = match d.omega {
        Some(w) => w,
        None => {
            let w = estimate_omega(&d.lambdas);
            r.note("omega_estimated", w);
            w
        }
    };
    r.note("omega", omega);
    if d.lambdas.len() < 6 {
        return r;
    }
    let (zeta, zeta_g) = asymptotic_residuals(&d.lambdas, &d.gammas, omega);
    let (ok, share) = residual_is_decaying(&zeta, tol);
    r.note("eigenvalue_residual_tail_share", share);
    if !ok {
        r.warn(
            "eigenvalue_asymptotics",
            format!("eigenvalue residuals do not decay (tail share {share:.3})"),
        );
    }
    let (ok, share) = residual_is_decaying(&zeta_g, tol);
    r.note("gamma_residual_tail_share", share);
    if !ok {
        r.warn(
            "gamma_asymptotics",
            format!("norming-constant residuals do not decay (tail share {share:.3})"),
        );
    }
    r
}

/// Eigenvalues `lambda_0 < lambda_1 < ...` with positive norming constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    lambdas: Vec<f64>,
    gammas: Vec<f64>,
    omega: f64,
    omega_estimated: bool,
}

impl SpectralData {
    pub fn new(lambdas: Vec<f64>, gammas: Vec<f64>, omega: Option<f64>) -> Result<Self> {
        Self::try_from(SpectralInput { lambdas, gammas, omega })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_estimated(&self) -> bool {
        self.omega_estimated
    }

    /// Index of the last supplied pair.
    pub fn truncation(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn to_input(&self) -> SpectralInput {
        SpectralInput {
            lambdas: self.lambdas.clone(),
            gammas: self.gammas.clone(),
            omega: if self.omega_estimated { None } else { Some(self.omega) },
        }
    }
}

impl TryFrom<SpectralInput> for SpectralData {
    type Error = Error;

    fn try_from(d: SpectralInput) -> Result<Self> {
        let report = validate_spectral_data(&d, &ResidualTolerance::default());
        report.into_result("spectral data")?;
        let omega = d.omega.unwrap_or_else(|| estimate_omega(&d.lambdas));
        Ok(Self { lambdas: d.lambdas, gammas: d.gammas, omega, omega_estimated: d.omega.is_none() })
    }
}

/// Unvalidated pair of spectra for boundary parameters `h` and `h~ = h + sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSpectraInput {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

pub fn validate_two_spectra(d: &TwoSpectraInput) -> ValidationReport {
    let mut r = ValidationReport::default();
    if d.lambdas.len() != d.mus.len() {
        r.error(
            "length_mismatch",
            format!("{} lambdas but {} mus", d.lambdas.len(), d.mus.len()),
        );
    }
    if d.lambdas.len() < 3 {
        r.error("too_few_pairs", format!("need at least 3 pairs, got {}", d.lambdas.len()));
    }
    if d.lambdas.iter().chain(&d.mus).any(|v| !v.is_finite()) {
        r.error("non_finite", "spectra contain non-finite values");
    }
    if let Some(i) = interlacing_violation(&d.lambdas, &d.mus) {
        r.error("not_interlacing", format!("lambda_0 < mu_0 < lambda_1 < ... fails at position {i}"));
    }
    if let Some(s) = d.sigma {
        if !(s > 0.0) {
            r.error("sigma_not_positive", format!("sigma = {s} must be positive"));
        }
    }
    r
}

/// First position in the merged sequence `lambda_0, mu_0, lambda_1, ...` that is
/// not strictly above its predecessor.
pub fn interlacing_violation(lambdas: &[f64], mus: &[f64]) -> Option<usize> {
    let merged: Vec<f64> = lambdas.iter().zip(mus).flat_map(|(&l, &m)| [l, m]).collect();
    merged.windows(2).position(|w| !(w[0] < w[1])).map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpectra {
    lambdas: Vec<f64>,
    mus: Vec<f64>,
    sigma: Option<f64>,
    omega: f64,
}

impl TwoSpectra {
    pub fn new(lambdas: Vec<f64>, mus: Vec<f64>, sigma: Option<f64>) -> Result<Self> {
        Self::try_from(TwoSpectraInput { lambdas, mus, sigma, omega: None })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    /// User-supplied `sigma`, if any.
    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl TryFrom<TwoSpectraInput> for TwoSpectra {
    type Error = Error;

    fn try_from(d: TwoSpectraInput) -> Result<Self> {
        let report = validate_two_spectra(&d);
        if report.issues.iter().any(|i| i.code == "not_interlacing") {
            return Err(Error::Ordering(report.issues[0].message.clone()));
        }
        report.into_result("two spectra")?;
        let omega = d.omega.unwrap_or_else(|| estimate_omega(&d.lambdas));
        Ok(Self { lambdas: d.lambdas, mus: d.mus, sigma: d.sigma, omega })
    }
}

/// Eigenvalue with its eigenfunction data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub lambda: f64,
    /// `(phi(pi), phi'(pi))`.
    pub phi_end: (f64, f64),
    pub gamma: f64,
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_samples: Option<Vec<f64>>,
}

impl EigenRecord {
    /// `A_n = k_n phi(pi, lambda_n)`.
    pub fn a(&self) -> f64 {
        self.k * self.phi_end.0
    }

    /// `B_n = k_n phi'(pi, lambda_n)`.
    pub fn b(&self) -> f64 {
        self.k * self.phi_end.1
    }
}
