//! Reconstruction from the spectra of two problems that differ only in `h`.

use rayon::prelude::*;

use crate::asymptotics::{estimate_root_curvature, estimate_shift};
use crate::error::{Error, Result};
use crate::forward::forward_solve;
use crate::glm::{reconstruct_from_spectral_data, ReconstructionOptions, ReconstructionResult, TailMode};
use crate::numerics::ProductEvaluator;
use crate::problem::{interlacing_violation, SpectralData, TwoSpectra};

/// Pairs needed for the asymptotic `sigma` fit.
pub const MIN_PAIRS_FOR_SIGMA: usize = 8;

/// `sigma = h~ - h` from `sqrt(mu_n) - sqrt(lambda_n) ~ sigma/((n-1) pi)`.
pub fn estimate_sigma(ts: &TwoSpectra) -> Result<f64> {
    if ts.lambdas().len() < MIN_PAIRS_FOR_SIGMA {
        return Err(Error::InvalidInput(format!(
            "estimating sigma needs at least {MIN_PAIRS_FOR_SIGMA} pairs, got {}",
            ts.lambdas().len()
        )));
    }
    let sigma = estimate_shift(ts.lambdas(), ts.mus());
    if !(sigma > 0.0) {
        return Err(Error::Ordering(format!("estimated sigma = {sigma} is not positive; spectra swapped?")));
    }
    Ok(sigma)
}

/// User-supplied `sigma` wins over the estimate.
pub fn resolve_sigma(ts: &TwoSpectra) -> Result<f64> {
    match ts.sigma() {
        Some(s) => Ok(s),
        None => estimate_sigma(ts),
    }
}

/// Product forms of `Phi` (roots `lambda_n`) and `Psi` (roots `mu_n`). Model
/// roots beyond the data are shifted by `omega` and `omega + sigma`, plus a
/// `d/m^3` term fitted to each spectrum; without it `gamma_N` is off by about
/// `d log(N)/N^3`.
pub fn characteristic_products(ts: &TwoSpectra, sigma: f64) -> Result<(ProductEvaluator, ProductEvaluator)> {
    let (omega, omega_mu) = (ts.omega(), ts.omega() + sigma);
    let phi = ProductEvaluator::characteristic(ts.lambdas())?
        .with_tail_shift(omega)
        .with_tail_curvature(estimate_root_curvature(ts.lambdas(), omega));
    let psi = ProductEvaluator::characteristic(ts.mus())?
        .with_tail_shift(omega_mu)
        .with_tail_curvature(estimate_root_curvature(ts.mus(), omega_mu));
    Ok((phi, psi))
}

/// `gamma_n = -sigma Phi'(lambda_n) / Psi(lambda_n)`.
pub fn gammas_from_two_spectra(ts: &TwoSpectra) -> Result<SpectralData> {
    let sigma = resolve_sigma(ts)?;
    let (phi, psi) = characteristic_products(ts, sigma)?;
    let gammas = ts
        .lambdas()
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            let g = phi.derivative_at_root(n)? / psi.eval(l);
            let g = -sigma * g.value();
            if !(g > 0.0) {
                return Err(Error::InconsistentData(format!(
                    "gamma_{n} = {g} from two spectra; interlacing or sigma inconsistent"
                )));
            }
            Ok(g)
        })
        .collect::<Result<Vec<f64>>>()?;
    SpectralData::new(ts.lambdas().to_vec(), gammas, Some(ts.omega()))
}

/// `m(lambda) = -Psi(lambda) / Phi(lambda)`.
pub fn m_function(ts: &TwoSpectra, lambda: f64) -> Result<f64> {
    for (n, &l) in ts.lambdas().iter().enumerate() {
        let gap = (lambda - l).abs();
        if gap < 1e-8 * l.abs().max(1.0) {
            return Err(Error::Pole { index: n, lambda, gap });
        }
    }
    let sigma = resolve_sigma(ts)?;
    let (phi, psi) = characteristic_products(ts, sigma)?;
    Ok(-(psi.eval(lambda) / phi.eval(lambda)).value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpectraOptions {
    pub reconstruction: ReconstructionOptions,
    /// Recompute the `h~` spectrum from the recovered coefficients.
    pub verify: bool,
}

impl Default for TwoSpectraOptions {
    /// First-order tail: two spectra of a real problem never follow the
    /// unperturbed model exactly, and the truncated kernel is wrong near `x = pi`.
    fn default() -> Self {
        let reconstruction = ReconstructionOptions { tail: TailMode::FirstOrder, ..ReconstructionOptions::default() };
        Self { reconstruction, verify: true }
    }
}

#[derive(Debug, Clone)]
pub struct TwoSpectraResult {
    pub base: ReconstructionResult,
    pub sigma: f64,
    pub h_tilde: f64,
    pub gammas: Vec<f64>,
    /// Spectrum of the recovered problem with `h~`, if verified.
    pub check_spectrum: Option<Vec<f64>>,
    /// `max_n |tau_n - mu_n| / max(1, |mu_n|)`.
    pub max_mu_deviation: Option<f64>,
    pub check_interlaces: Option<bool>,
}

pub fn reconstruct_from_two_spectra(ts: &TwoSpectra, opts: &TwoSpectraOptions) -> Result<TwoSpectraResult> {
    let sigma = resolve_sigma(ts)?;
    let data = gammas_from_two_spectra(ts)?;
    let base = reconstruct_from_spectral_data(&data, &opts.reconstruction)?;
    let h_tilde = base.coefficients.h() + sigma;
    let (check_spectrum, max_mu_deviation, check_interlaces) = if opts.verify {
        let tilde = base.coefficients.with_h(h_tilde)?;
        let tau = forward_solve(&tilde, ts.mus().len())?.lambdas();
        let dev = tau
            .par_iter()
            .zip(ts.mus())
            .map(|(t, m)| (t - m).abs() / m.abs().max(1.0))
            .reduce(|| 0.0, f64::max);
        let ok = interlacing_violation(ts.lambdas(), &tau).is_none();
        (Some(tau), Some(dev), Some(ok))
    } else {
        (None, None, None)
    };
    Ok(TwoSpectraResult {
        base,
        sigma,
        h_tilde,
        gammas: data.gammas().to_vec(),
        check_spectrum,
        max_mu_deviation,
        check_interlaces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn model(sigma: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let s: Vec<f64> = (0..n).map(|k| k as f64 + 0.2).collect();
        let lambdas = s.iter().map(|v| v * v).collect();
        let mus = s
            .iter()
            .enumerate()
            .map(|(k, v)| if k < 2 { (v + 0.5).powi(2) } else { (v + sigma / ((k - 1) as f64 * PI)).powi(2) })
            .collect();
        (lambdas, mus)
    }

    #[test]
    fn exact_shift_is_recovered() {
        let (l, m) = model(0.8, 30);
        let ts = TwoSpectra::new(l, m, None).unwrap();
        assert!((estimate_sigma(&ts).unwrap() - 0.8).abs() < 1e-10);
    }

    #[test]
    fn swapped_spectra_are_rejected() {
        let (l, m) = model(0.8, 30);
        assert!(matches!(TwoSpectra::new(m, l, None), Err(Error::Ordering(_))));
    }

    #[test]
    fn supplied_sigma_wins() {
        let (l, m) = model(0.8, 30);
        let ts = TwoSpectra::new(l, m, Some(0.5)).unwrap();
        assert_eq!(resolve_sigma(&ts).unwrap(), 0.5);
    }
}
