mod common;

use std::f64::consts::PI;

use common::example_q;
use slinv::forward::{forward_solve, forward_solve_with, norming_constant, ForwardOptions, ForwardSolution};
use slinv::synthetic::random_problem;
use slinv::{validate_spectral_data, ProblemCoefficients, ResidualTolerance};

fn example(intervals: usize) -> ProblemCoefficients {
    ProblemCoefficients::from_fn(intervals, example_q, -2.0 / PI, 0.0, 0.25, -1.0 / (4.0 * PI)).unwrap()
}

fn random(seed: u64, count: usize) -> ForwardSolution {
    forward_solve(&random_problem(seed, 256).unwrap().0, count).unwrap()
}

#[test]
fn example_records() {
    let sol = forward_solve(&example(512), 6).unwrap();
    for (n, r) in sol.records.iter().enumerate() {
        let s = if n == 0 { 0.0 } else if n == 1 { 0.5 } else { (n - 1) as f64 };
        assert!((r.lambda - s * s).abs() < 1e-6, "lambda_{n} = {}", r.lambda);
        let gamma = if n == 0 { PI } else { PI / 2.0 };
        assert!((r.gamma - gamma).abs() < 1e-6, "gamma_{n} = {}", r.gamma);
    }
}

#[test]
fn example_k_is_exact() {
    // phi(pi, m^2) = (-1)^m and A = k phi(pi) = 1/4 - m^2 with m = n - 1
    let sol = forward_solve(&example(512), 12).unwrap();
    for (n, r) in sol.records.iter().enumerate().skip(2) {
        let m = (n - 1) as f64;
        let want = if n % 2 == 0 { 1.0 } else { -1.0 } * (m * m - 0.25);
        assert!((r.k - want).abs() < 1e-6 * want.abs(), "k_{n} = {} vs {want}", r.k);
    }
}

#[test]
fn chi_dot_equals_k_gamma() {
    for seed in [1, 4] {
        let sol = random(seed, 15);
        for (n, r) in sol.records.iter().enumerate() {
            let dot = sol.char_derivative(r.lambda).unwrap();
            let kg = r.k * r.gamma;
            assert!((dot - kg).abs() < 1e-6 * kg.abs(), "seed {seed}, n {n}: {dot} vs {kg}");
        }
    }
}

#[test]
fn psi_is_proportional_to_phi() {
    let sol = random(2, 20);
    for n in [0, 1, 7, 19] {
        assert!(sol.proportionality_residual(n).unwrap() < 1e-6);
    }
}

#[test]
fn orthogonality_with_boundary_term() {
    let sol = random(3, 11);
    let rho = sol.problem.rho();
    for m in 0..11 {
        for n in 0..11 {
            let (km, kn) = (sol.records[m].k, sol.records[n].k);
            let got = sol.inner_product(m, n);
            let want = if m == n { sol.records[n].gamma - rho / (kn * kn) } else { -rho / (km * kn) };
            assert!((got - want).abs() < 1e-5 * want.abs().max(1e-3), "({m},{n}): {got} vs {want}");
        }
    }
}

#[test]
fn a_b_pair_relation() {
    let sol = random(5, 11);
    let rho = sol.problem.rho();
    let r = &sol.records;
    for n in 0..11 {
        for m in 0..11 {
            if n == m {
                continue;
            }
            let lhs = r[n].a() * r[m].b() - r[n].b() * r[m].a();
            let rhs = rho * (r[m].lambda - r[n].lambda);
            assert!((lhs - rhs).abs() < 1e-5 * rhs.abs(), "({n},{m}): {lhs} vs {rhs}");
        }
    }
}

#[test]
fn grid_refinement_moves_eigenvalues_little() {
    let coarse = forward_solve(&example(512), 20).unwrap().lambdas();
    let fine = forward_solve(&example(1024), 20).unwrap().lambdas();
    for (a, b) in coarse.iter().zip(&fine) {
        assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn output_validates() {
    for seed in [1, 6] {
        let d = random(seed, 41).spectral_data().unwrap();
        let report = validate_spectral_data(&d.to_input(), &ResidualTolerance::default());
        assert!(report.passes(true), "{report:?}");
    }
}

#[test]
fn free_norming_constant_matches_fine_quadrature() {
    // q = 0, h = H = H1 = 0, H2 = -1: phi = cos(s x), rho = 1
    let p = ProblemCoefficients::from_fn(64, |_| 0.0, 0.0, 0.0, 0.0, -1.0).unwrap();
    let sol = forward_solve(&p, 4).unwrap();
    let l0 = sol.records[0].lambda;
    let m = 4096;
    let dx = PI / m as f64;
    let phi = |x: f64| slinv::numerics::cos_sqrt(l0, x);
    let body: f64 = (0..=m).map(|i| if i == 0 || i == m { 0.5 } else { 1.0 } * phi(i as f64 * dx).powi(2)).sum::<f64>() * dx;
    let end = slinv::numerics::cos_sqrt_dx(l0, PI);
    let oracle = body + end * end;
    let got = norming_constant(&p, l0).unwrap();
    assert!((got - oracle).abs() < 1e-6 * oracle, "{got} vs {oracle}");
    assert!((sol.records[0].gamma - oracle).abs() < 1e-6 * oracle);
}

#[test]
fn shift_residual_trends_down() {
    let sol = random(2, 41);
    let omega = sol.problem.omega();
    let dev = |n: usize| {
        let s = sol.records[n].lambda.sqrt();
        let m = (n - 1) as f64;
        (m * PI * (s - m) - omega).abs()
    };
    let early: f64 = (10..15).map(dev).sum::<f64>() / 5.0;
    let late: f64 = (36..41).map(dev).sum::<f64>() / 5.0;
    assert!(late < early, "{early} -> {late}");
}

#[test]
fn partial_sums_decay() {
    let p = random_problem(4, 256).unwrap().0;
    let opts = ForwardOptions { keep_samples: true, ..ForwardOptions::default() };
    let sol = forward_solve_with(&p, 81, &opts).unwrap();
    let grid = p.grid();
    // interior points; the series converges pointwise, not uniformly up to pi
    let inner: Vec<usize> = (0..grid.len()).filter(|&i| (0.1 * PI..=0.9 * PI).contains(&grid.x(i))).collect();
    let norm = |count: usize| {
        inner
            .iter()
            .map(|&i| {
                sol.records[..count]
                    .iter()
                    .map(|r| r.phi_samples.as_ref().unwrap()[i] / (r.k * r.gamma))
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    };
    let (a, b, c) = (norm(11), norm(41), norm(81));
    assert!(b < a && c < b, "{a} {b} {c}");
}
