use std::f64::consts::PI;

use slinv::forward::{forward_solve, ForwardSolution};
use slinv::problem::interlacing_violation;
use slinv::twospectra::{
    estimate_sigma, gammas_from_two_spectra, m_function, reconstruct_from_two_spectra, TwoSpectraOptions,
};
use slinv::{validate_spectral_data, ProblemCoefficients, ResidualTolerance, TwoSpectra};

const COUNT: usize = 41;

fn pair(p: &ProblemCoefficients, h_tilde: f64) -> (ForwardSolution, TwoSpectra) {
    let lam = forward_solve(p, COUNT).unwrap();
    let mu = forward_solve(&p.with_h(h_tilde).unwrap(), COUNT).unwrap();
    let ts = TwoSpectra::new(lam.lambdas(), mu.lambdas(), None).unwrap();
    (lam, ts)
}

fn free_pair() -> (ForwardSolution, TwoSpectra) {
    let p = ProblemCoefficients::from_fn(256, |_| 0.0, 0.0, 0.0, 0.0, -1.0).unwrap();
    pair(&p, 1.0)
}

fn l2(p: &ProblemCoefficients, exact: impl Fn(f64) -> f64) -> f64 {
    let g = p.grid();
    let w = g.trapezoid_weights(g.intervals());
    (0..g.len()).map(|i| w[i] * (p.q()[i] - exact(g.x(i))).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn sigma_from_free_spectra() {
    let (_, ts) = free_pair();
    let sigma = estimate_sigma(&ts).unwrap();
    assert!((sigma - 1.0).abs() < 2e-2, "{sigma}");
}

#[test]
fn synthesized_gammas_match_forward() {
    let (lam, ts) = free_pair();
    let d = gammas_from_two_spectra(&ts).unwrap();
    for (n, (got, want)) in d.gammas().iter().zip(lam.gammas()).enumerate() {
        assert!((got - want).abs() < 1e-3 * want, "gamma_{n}: {got} vs {want}");
    }
    let report = validate_spectral_data(&d.to_input(), &ResidualTolerance::default());
    assert!(report.passes(false), "{report:?}");
}

#[test]
fn synthesized_gammas_approach_half_pi() {
    let (_, ts) = free_pair();
    let g = gammas_from_two_spectra(&ts).unwrap().gammas().to_vec();
    let dev = |n: usize| (g[n] - PI / 2.0).abs();
    let half = (COUNT - 1) / 2;
    assert!(dev(COUNT - 1) < dev(half));
    let early: f64 = (half..half + 5).map(dev).sum();
    let late: f64 = (COUNT - 5..COUNT).map(dev).sum();
    assert!(late < early);
}

#[test]
fn m_decreases_between_first_pole_and_zero() {
    let (_, ts) = free_pair();
    let (l0, m0) = (ts.lambdas()[0], ts.mus()[0]);
    let eps = 1e-3 * (m0 - l0);
    let samples: Vec<f64> = (0..10)
        .map(|i| l0 + eps + (m0 - l0 - 2.0 * eps) * i as f64 / 9.0)
        .map(|l| m_function(&ts, l).unwrap())
        .collect();
    assert!(samples.windows(2).all(|w| w[1] < w[0]), "{samples:?}");
}

#[test]
fn m_has_one_zero_between_poles() {
    let (_, ts) = free_pair();
    for n in 0..10 {
        let (a, b) = (ts.lambdas()[n], ts.lambdas()[n + 1]);
        // clustered toward both poles: mu_0 sits 2.5e-3 above lambda_0 here
        let changes = (1..400)
            .map(|i| a + (b - a) * 0.5 * (1.0 - (PI * i as f64 / 400.0).cos()))
            .map(|l| m_function(&ts, l).unwrap())
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count();
        assert_eq!(changes, 1, "between lambda_{n} and lambda_{}", n + 1);
        let mu = ts.mus()[n];
        assert!(a < mu && mu < b);
    }
}

#[test]
fn free_recovery_is_small() {
    let (_, ts) = free_pair();
    let r = reconstruct_from_two_spectra(&ts, &TwoSpectraOptions::default()).unwrap();
    let c = &r.base.coefficients;
    assert!(l2(c, |_| 0.0) < 5e-2, "{}", l2(c, |_| 0.0));
    assert!(r.h_tilde > c.h());
    assert_eq!(r.check_interlaces, Some(true));
}

#[test]
fn cosine_round_trip() {
    let p = ProblemCoefficients::from_fn(256, |x| (2.0 * x).cos(), 0.3, 1.0, 2.0, 1.0).unwrap();
    let (_, ts) = pair(&p, 1.1);
    let r = reconstruct_from_two_spectra(&ts, &TwoSpectraOptions::default()).unwrap();
    let c = &r.base.coefficients;
    assert!(l2(c, |x| (2.0 * x).cos()) < 5e-2);
    assert!((c.h() - 0.3).abs() < 1e-2);
    assert!((r.h_tilde - 1.1).abs() < 1e-2);
    let tau = r.check_spectrum.as_ref().unwrap();
    assert!(interlacing_violation(ts.lambdas(), tau).is_none());
}

#[test]
fn two_spectra_is_deterministic() {
    let (_, ts) = free_pair();
    let opts = TwoSpectraOptions { verify: false, ..TwoSpectraOptions::default() };
    let a = reconstruct_from_two_spectra(&ts, &opts).unwrap();
    let b = reconstruct_from_two_spectra(&ts, &opts).unwrap();
    assert_eq!(a.base.coefficients.q(), b.base.coefficients.q());
    assert_eq!(a.gammas, b.gammas);
    assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
}
