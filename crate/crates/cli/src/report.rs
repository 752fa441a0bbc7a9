//! Output artifacts: JSON summaries and CSV grids.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use slinv::forward::ForwardSolution;
use slinv::glm::{Diagnostics, ReconstructionResult};
use slinv::io::write_columns;
use slinv::twospectra::TwoSpectraResult;
use slinv::{EigenRecord, ProblemCoefficients, ValidationReport};

#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input_sha256: Option<String>,
}

impl RunInfo {
    pub fn new(command: &str, input: Option<&Path>) -> Result<Self> {
        let input_sha256 = match input {
            Some(p) => {
                let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
                Some(hex::encode(Sha256::digest(&bytes)))
            }
            None => None,
        };
        Ok(Self { tool: env!("CARGO_BIN_NAME"), version: env!("CARGO_PKG_VERSION"), command: command.into(), input_sha256 })
    }
}

#[derive(Debug, Clone, Serialize)]
struct Coefficients {
    h: f64,
    #[serde(rename = "H")]
    big_h: f64,
    #[serde(rename = "H1")]
    h1: f64,
    #[serde(rename = "H2")]
    h2: f64,
    rho: f64,
}

impl From<&ProblemCoefficients> for Coefficients {
    fn from(p: &ProblemCoefficients) -> Self {
        Self { h: p.h(), big_h: p.big_h(), h1: p.h1(), h2: p.h2(), rho: p.rho() }
    }
}

pub struct Output {
    dir: PathBuf,
    info: RunInfo,
}

impl Output {
    pub fn create(dir: &Path, info: RunInfo) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), info })
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    fn csv(&self, name: &str, header: &[&str], columns: &[&[f64]]) -> Result<()> {
        Ok(write_columns(&self.dir.join(name), header, columns)?)
    }

    pub fn validation(&self, report: &ValidationReport, strict: bool) -> Result<()> {
        #[derive(Serialize)]
        struct V<'a> {
            #[serde(flatten)]
            info: &'a RunInfo,
            strict: bool,
            passed: bool,
            report: &'a ValidationReport,
        }
        self.json("validation.json", &V { info: &self.info, strict, passed: report.passes(strict), report })
    }

    pub fn forward(&self, sol: &ForwardSolution) -> Result<()> {
        #[derive(Serialize)]
        struct F<'a> {
            #[serde(flatten)]
            info: &'a RunInfo,
            coefficients: Coefficients,
            omega: f64,
            records: &'a [EigenRecord],
        }
        #[derive(Serialize)]
        struct S {
            lambdas: Vec<f64>,
            gammas: Vec<f64>,
        }
        let p = &sol.problem;
        self.json(
            "result.json",
            &F { info: &self.info, coefficients: p.into(), omega: p.omega(), records: &sol.records },
        )?;
        self.json("spectral_data.json", &S { lambdas: sol.lambdas(), gammas: sol.gammas() })?;
        let n: Vec<f64> = (0..sol.records.len()).map(|i| i as f64).collect();
        let k: Vec<f64> = sol.records.iter().map(|r| r.k).collect();
        self.csv("spectrum.csv", &["n", "lambda", "gamma", "k"], &[&n, &sol.lambdas(), &sol.gammas(), &k])
    }

    pub fn reconstruction(&self, r: &ReconstructionResult, two: Option<&TwoSpectraResult>) -> Result<()> {
        #[derive(Serialize)]
        struct TwoSpectraPart<'a> {
            sigma: f64,
            h_tilde: f64,
            gammas: &'a [f64],
            check_spectrum: Option<&'a [f64]>,
            max_mu_deviation: Option<f64>,
            check_interlaces: Option<bool>,
        }
        #[derive(Serialize)]
        struct R<'a> {
            #[serde(flatten)]
            info: &'a RunInfo,
            coefficients: Coefficients,
            q: &'static str,
            kappa: [f64; 4],
            diagnostics: &'a Diagnostics,
            #[serde(skip_serializing_if = "Option::is_none")]
            two_spectra: Option<TwoSpectraPart<'a>>,
        }
        let c = &r.coefficients;
        let two_spectra = two.map(|t| TwoSpectraPart {
            sigma: t.sigma,
            h_tilde: t.h_tilde,
            gammas: &t.gammas,
            check_spectrum: t.check_spectrum.as_deref(),
            max_mu_deviation: t.max_mu_deviation,
            check_interlaces: t.check_interlaces,
        });
        self.json(
            "result.json",
            &R {
                info: &self.info,
                coefficients: c.into(),
                q: "q.csv",
                kappa: r.kappa(),
                diagnostics: &r.diagnostics,
                two_spectra,
            },
        )?;
        let grid = c.grid();
        let x = grid.points();
        self.csv("q.csv", &["x", "q"], &[&x, c.q()])?;
        self.csv("k_diag.csv", &["x", "K(x,x)"], &[&x, &r.kernel.diagonal()])?;
        let m = grid.intervals();
        let slice = |j: usize| -> Vec<f64> { (0..=m).map(|i| r.f.get(i, j)).collect() };
        self.csv(
            "f_slices.csv",
            &["x", "F(x,0)", "F(x,pi/2)", "F(x,pi)"],
            &[&x, &slice(0), &slice(m / 2), &slice(m)],
        )
    }

    pub fn roundtrip(
        &self,
        p: &ProblemCoefficients,
        first: &ForwardSolution,
        r: &ReconstructionResult,
        again: &ForwardSolution,
    ) -> Result<()> {
        #[derive(Serialize)]
        struct T<'a> {
            #[serde(flatten)]
            info: &'a RunInfo,
            original: Coefficients,
            recovered: Coefficients,
            kappa: [f64; 4],
            /// `max_n |lambda_n - lambda^_n| / max(1, |lambda_n|)`.
            max_spectrum_deviation: f64,
            max_q_deviation: f64,
            diagnostics: &'a Diagnostics,
        }
        let max_spectrum_deviation = first
            .lambdas()
            .iter()
            .zip(again.lambdas())
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max);
        let max_q_deviation = p.q().iter().zip(r.coefficients.q()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        self.json(
            "roundtrip.json",
            &T {
                info: &self.info,
                original: p.into(),
                recovered: (&r.coefficients).into(),
                kappa: r.kappa(),
                max_spectrum_deviation,
                max_q_deviation,
                diagnostics: &r.diagnostics,
            },
        )?;
        self.reconstruction(r, None)?;
        let x = p.grid().points();
        self.csv("q_compare.csv", &["x", "q_original", "q_recovered"], &[&x, p.q(), r.coefficients.q()])
    }
}
