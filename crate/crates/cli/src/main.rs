//! `slinv` command-line front end.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use slinv::forward::forward_solve;
use slinv::glm::{reconstruct_from_spectral_data, ReconstructionOptions, TailMode};
use slinv::io;
use slinv::problem::{validate_problem, validate_spectral_data, validate_two_spectra};
use slinv::synthetic::random_problem;
use slinv::twospectra::{reconstruct_from_two_spectra, TwoSpectraOptions};
use slinv::{Error, Grid, ProblemCoefficients, ResidualTolerance, SpectralData, TwoSpectra, ValidationReport};

use report::{Output, RunInfo};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "slinv", version, about = "Direct and inverse Sturm-Liouville problems with an eigenparameter-dependent boundary condition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues, norming constants and k_n of a problem.
    Forward(Common),
    /// Reconstruct a problem from eigenvalues and norming constants.
    InvertSpectral(Common),
    /// Reconstruct a problem from two spectra differing in h.
    InvertTwoSpectra(Common),
    /// Random problem -> spectral data -> reconstruction -> spectrum again.
    Roundtrip(Common),
    /// Check an input file (spectral data, two spectra or problem).
    Validate(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Input JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Highest eigenvalue index used (N + 1 pairs).
    #[arg(long = "N")]
    n: Option<usize>,
    /// Grid cells on [0, pi] [default: 256; roundtrip: max(256, 16 N)].
    #[arg(long = "M")]
    m: Option<usize>,
    /// Spectral tail: truncate, first-order or second-order [default: truncate;
    /// two-spectra and roundtrip: first-order].
    #[arg(long = "tail-mode")]
    tail_mode: Option<TailMode>,
    /// Treat asymptotic warnings as failures.
    #[arg(long)]
    strict: bool,
    /// h~ - h for two-spectra input (estimated if absent).
    #[arg(long)]
    sigma: Option<f64>,
    /// Asymptotic constant omega (estimated if absent).
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "tol-kappa", default_value_t = 5e-2)]
    tol_kappa: f64,
    /// Seed for the roundtrip problem.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Error tagged with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::InvalidInput(_) | Error::Schema { .. } | Error::Ordering(_)) => EXIT_VALIDATION,
            _ => EXIT_NUMERICAL,
        };
        Self { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Forward(c) => forward(&c),
        Command::InvertSpectral(c) => invert_spectral(&c),
        Command::InvertTwoSpectra(c) => invert_two_spectra(&c),
        Command::Roundtrip(c) => roundtrip(&c),
        Command::Validate(c) => validate(&c),
    }
}

fn check_config(c: &Common, needs_input: bool) -> Result<(), Failure> {
    let bad = |msg: String| Failure::from(Error::InvalidInput(msg));
    if let Some(m) = c.m {
        if m < 32 {
            return Err(bad(format!("--M must be at least 32, got {m}")));
        }
    }
    if let Some(n) = c.n {
        if n < 4 {
            return Err(bad(format!("--N must be at least 4, got {n}")));
        }
    }
    if c.out.as_os_str().is_empty() {
        return Err(bad("--out must not be empty".into()));
    }
    if needs_input && c.input.as_ref().is_none_or(|p| p.as_os_str().is_empty()) {
        return Err(bad("--input is required".into()));
    }
    Ok(())
}

fn input(c: &Common) -> &Path {
    c.input.as_deref().expect("checked by check_config")
}

fn output(c: &Common, command: &str) -> Result<Output, Failure> {
    let info = RunInfo::new(command, c.input.as_deref()).context("hashing input")?;
    Ok(Output::create(&c.out, info).context("creating output directory")?)
}

/// Writes the report; a failing report ends the run with exit status 2.
fn gate(out: &Output, report: &ValidationReport, strict: bool) -> Result<(), Failure> {
    out.validation(report, strict)?;
    if report.passes(strict) {
        Ok(())
    } else {
        let msgs: Vec<&str> = report.issues.iter().map(|i| i.message.as_str()).collect();
        Err(Failure { code: EXIT_VALIDATION, error: anyhow::anyhow!("validation failed: {}", msgs.join("; ")) })
    }
}

fn truncate<T: Clone>(v: &[T], n: Option<usize>) -> Result<Vec<T>, Failure> {
    match n {
        None => Ok(v.to_vec()),
        Some(n) if n < v.len() => Ok(v[..=n].to_vec()),
        Some(n) => Err(Error::InvalidInput(format!("--N {n} needs {} pairs, input has {}", n + 1, v.len())).into()),
    }
}

fn reconstruction_options(c: &Common, intervals: usize, default_tail: TailMode) -> Result<ReconstructionOptions, Failure> {
    Ok(ReconstructionOptions {
        grid: Grid::new(intervals)?,
        tail: c.tail_mode.unwrap_or(default_tail),
        tol_kappa: c.tol_kappa,
        ..ReconstructionOptions::default()
    })
}

fn grid_size(c: &Common) -> usize {
    c.m.unwrap_or(Grid::DEFAULT_INTERVALS)
}

fn forward(c: &Common) -> Result<(), Failure> {
    check_config(c, true)?;
    let out = output(c, "forward")?;
    let raw = io::read_problem(input(c))?;
    gate(&out, &validate_problem(&raw), c.strict)?;
    let p = ProblemCoefficients::try_from(raw)?;
    let sol = forward_solve(&p, c.n.unwrap_or(40) + 1)?;
    out.forward(&sol)?;
    Ok(())
}

fn invert_spectral(c: &Common) -> Result<(), Failure> {
    check_config(c, true)?;
    let out = output(c, "invert-spectral")?;
    let mut raw = io::read_spectral_data(input(c))?;
    raw.lambdas = truncate(&raw.lambdas, c.n)?;
    raw.gammas = truncate(&raw.gammas, c.n)?;
    if c.omega.is_some() {
        raw.omega = c.omega;
    }
    gate(&out, &validate_spectral_data(&raw, &ResidualTolerance::default()), c.strict)?;
    let data = SpectralData::try_from(raw)?;
    let opts = reconstruction_options(c, grid_size(c), TailMode::Truncate)?;
    let r = reconstruct_from_spectral_data(&data, &opts)?;
    out.reconstruction(&r, None)?;
    Ok(())
}

fn invert_two_spectra(c: &Common) -> Result<(), Failure> {
    check_config(c, true)?;
    let out = output(c, "invert-two-spectra")?;
    let mut raw = io::read_two_spectra(input(c))?;
    raw.lambdas = truncate(&raw.lambdas, c.n)?;
    raw.mus = truncate(&raw.mus, c.n)?;
    if c.sigma.is_some() {
        raw.sigma = c.sigma;
    }
    if c.omega.is_some() {
        raw.omega = c.omega;
    }
    gate(&out, &validate_two_spectra(&raw), c.strict)?;
    let ts = TwoSpectra::try_from(raw)?;
    let opts = TwoSpectraOptions {
        reconstruction: reconstruction_options(c, grid_size(c), TwoSpectraOptions::default().reconstruction.tail)?,
        verify: true,
    };
    let r = reconstruct_from_two_spectra(&ts, &opts)?;
    out.reconstruction(&r.base, Some(&r))?;
    Ok(())
}

fn roundtrip(c: &Common) -> Result<(), Failure> {
    check_config(c, false)?;
    let out = output(c, "roundtrip")?;
    let n = c.n.unwrap_or(40);
    let count = n + 1;
    // The recovered q carries truncation ripples of wavelength ~ pi/N; the
    // grid has to resolve them before the spectrum can be reproduced.
    let intervals = c.m.unwrap_or(Grid::DEFAULT_INTERVALS.max(16 * n));
    let (p, _) = random_problem(c.seed, intervals)?;
    let sol = forward_solve(&p, count)?;
    let data = sol.spectral_data()?;
    let opts = reconstruction_options(c, intervals, TailMode::FirstOrder)?;
    let r = reconstruct_from_spectral_data(&data, &opts)?;
    let again = forward_solve(&r.coefficients, count)?;
    out.roundtrip(&p, &sol, &r, &again)?;
    Ok(())
}

fn validate(c: &Common) -> Result<(), Failure> {
    check_config(c, true)?;
    let out = output(c, "validate")?;
    let path = input(c);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Schema { context: path.display().to_string(), message: e.to_string() })?;
    let report = if value.get("mus").is_some() {
        validate_two_spectra(&io::read_two_spectra(path)?)
    } else if value.get("gammas").is_some() {
        let mut raw = io::read_spectral_data(path)?;
        if c.omega.is_some() {
            raw.omega = c.omega;
        }
        validate_spectral_data(&raw, &ResidualTolerance::default())
    } else {
        validate_problem(&io::read_problem(path)?)
    };
    gate(&out, &report, c.strict)
}
