use std::f64::consts::PI;

use proptest::prelude::*;

use slinv::glm::{build_F, recover_q_h, solve_all, TailMode};
use slinv::numerics::{
    cos_sqrt, diff_diagonal, product_integrate, sin_sqrt_over, solve_dense, Cholesky, CubicSpline, DiffScheme, Matrix,
    ProductEvaluator, SignedLog,
};
use slinv::problem::interlacing_violation;
use slinv::{Grid, ProblemCoefficients, SpectralData, TwoSpectra};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

/// Spectral data near the unperturbed model: `s_n = n - 1 + d_n`, `gamma_n`
/// near `pi/2`, and an extra `lambda_0` below.
fn near_model() -> impl Strategy<Value = SpectralData> {
    (
        -0.6f64..0.0,
        0.2f64..0.6,
        prop::collection::vec(-0.05f64..0.05, 14),
        prop::collection::vec(-0.05f64..0.05, 16),
        2.0f64..4.0,
    )
        .prop_map(|(l0, s1, ds, dg, g0)| {
            let mut lambdas = vec![l0, s1 * s1];
            lambdas.extend(ds.iter().enumerate().map(|(k, d)| ((k + 1) as f64 + d).powi(2)));
            let mut gammas = vec![g0];
            gammas.extend(dg.iter().take(lambdas.len() - 1).map(|d| PI / 2.0 + d));
            SpectralData::new(lambdas, gammas, None).unwrap()
        })
}

fn spd(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let mut a = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += (0..n).map(|k| v[i * n + k] * v[j * n + k]).sum::<f64>() / n as f64;
            }
        }
        a
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn f_is_symmetric(d in near_model()) {
        let f = build_F(&d, Grid::new(32).unwrap(), TailMode::FirstOrder);
        for i in 0..=32 {
            for j in 0..=32 {
                prop_assert_eq!(f.get(i, j), f.get(j, i));
            }
        }
    }

    #[test]
    fn main_equation_residual_is_small(d in near_model()) {
        let f = build_F(&d, Grid::new(48).unwrap(), TailMode::Truncate);
        let sol = solve_all(&f).unwrap();
        prop_assert!(sol.max_residual() <= 1e-8 * (1.0 + f.max_abs()));
        prop_assert!(sol.min_pivot() > 1e-6);
    }

    #[test]
    fn diagonal_is_consistent_with_q(d in near_model()) {
        let f = build_F(&d, Grid::new(64).unwrap(), TailMode::Truncate);
        let k = solve_all(&f).unwrap().kernel;
        let rec = recover_q_h(&k, DiffScheme::Centered);
        prop_assert_eq!(rec.h, k.get(0, 0));
        let scale = 1.0 + rec.q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(rec.consistency < 5e-2 * scale, "{}", rec.consistency);
    }

    #[test]
    fn signed_log_tracks_products(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let p = (SignedLog::from_f64(a) * SignedLog::from_f64(b)).value();
        prop_assert!((p - a * b).abs() <= 1e-12 * (a * b).abs());
        if b != 0.0 {
            let q = (SignedLog::from_f64(a) / SignedLog::from_f64(b)).value();
            prop_assert!((q - a / b).abs() <= 1e-12 * (a / b).abs());
        }
    }

    #[test]
    fn trapezoid_weights_integrate_constants(m in 32usize..200, frac in 0.0f64..1.0) {
        let g = Grid::new(m).unwrap();
        let i = (frac * m as f64) as usize;
        let w = g.trapezoid_weights(i);
        prop_assert_eq!(w.len(), i + 1);
        prop_assert!(w.iter().all(|&v| v >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - g.x(i)).abs() < 1e-12);
    }

    #[test]
    fn dense_solve_has_small_residual(a in spd(7), b in prop::collection::vec(-5.0f64..5.0, 7)) {
        let x = solve_dense(a.clone(), &b, 1e-14).unwrap().x;
        let r = a.mul_vec(&x);
        prop_assert!(r.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-10));
    }

    #[test]
    fn cholesky_blocks_agree_with_dense(a in spd(9), n in 1usize..=9) {
        let chol = Cholesky::factor(&a, 1e-14).unwrap();
        let rhs: Vec<f64> = (0..n).map(|k| 1.0 + k as f64).collect();
        let mut block = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                block[(r, c)] = a[(r, c)];
            }
        }
        let dense = solve_dense(block, &rhs, 0.0).unwrap().x;
        let fast = chol.solve_leading(&rhs);
        prop_assert!(dense.iter().zip(&fast).all(|(u, v)| (u - v).abs() < 1e-10));
    }

    #[test]
    fn spline_reproduces_cubics(c in prop::collection::vec(-2.0f64..2.0, 4), x in 0.0f64..3.0) {
        let p = |t: f64| c[0] + t * (c[1] + t * (c[2] + t * c[3]));
        let dp = |t: f64| c[1] + t * (2.0 * c[2] + 3.0 * t * c[3]);
        let values: Vec<f64> = (0..=30).map(|i| p(0.1 * i as f64)).collect();
        let s = CubicSpline::new(0.0, 0.1, &values);
        prop_assert!((s.eval(x) - p(x)).abs() < 1e-10);
        prop_assert!((s.derivative(x) - dp(x)).abs() < 1e-8);
    }

    #[test]
    fn differentiation_is_exact_on_quadratics(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let g = Grid::new(64).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| a + b * x + c * x * x).collect();
        for scheme in [DiffScheme::default(), DiffScheme::Centered] {
            let d = diff_diagonal(&v, g.step(), scheme);
            for (x, dv) in g.points().iter().zip(&d) {
                prop_assert!((dv - (b + 2.0 * c * x)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn product_integration_is_exact_for_lines(a in -2.0f64..2.0, b in -2.0f64..2.0, lambda in -4.0f64..400.0) {
        let g = Grid::new(40).unwrap();
        let samples: Vec<f64> = g.points().iter().map(|t| a + b * t).collect();
        let got = product_integrate(&samples, g.step(), lambda);
        // int_0^pi (a + b t) C(t) dt with C = cos(s t): a S(pi) + b (pi S(pi) - int S)
        let s_of = |t: f64| sin_sqrt_over(lambda, t);
        let int_s = if lambda.abs() < 1e-12 { PI * PI / 2.0 } else { (1.0 - cos_sqrt(lambda, PI)) / lambda };
        let want = a * s_of(PI) + b * (PI * s_of(PI) - int_s);
        prop_assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "{} vs {}", got, want);
    }

    #[test]
    fn product_vanishes_at_roots_and_alternates(d in near_model()) {
        let chi = ProductEvaluator::characteristic(d.lambdas()).unwrap().with_tail_shift(0.3);
        for (n, &l) in d.lambdas().iter().enumerate() {
            prop_assert_eq!(chi.eval(l).value(), 0.0);
            let dot = chi.derivative_at_root(n).unwrap().value();
            // chi < 0 left of lambda_0 and changes sign at each simple root
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert_eq!(dot.signum(), sign);
        }
    }

    #[test]
    fn swapped_spectra_fail_interlacing(d in near_model(), shift in 0.05f64..0.3) {
        let lambdas = d.lambdas().to_vec();
        let mus: Vec<f64> = lambdas.windows(2).map(|w| w[0] + shift * (w[1] - w[0])).collect();
        let lambdas = lambdas[..mus.len()].to_vec();
        prop_assert!(interlacing_violation(&lambdas, &mus).is_none());
        prop_assert!(TwoSpectra::new(lambdas.clone(), mus.clone(), None).is_ok());
        prop_assert!(TwoSpectra::new(mus, lambdas, None).is_err());
    }

    #[test]
    fn nonpositive_rho_is_rejected(big_h in -3.0f64..3.0, h1 in -3.0f64..3.0, extra in 0.0f64..2.0) {
        let h2 = big_h * h1 + extra;
        prop_assert!(ProblemCoefficients::from_fn(32, |_| 0.0, 0.0, big_h, h1, h2).is_err());
    }
}
