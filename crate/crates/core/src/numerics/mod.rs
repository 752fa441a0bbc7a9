//! Shared numerical machinery: quadrature, IVP integration, root finding,
//! dense solves, differentiation and log-space products.

pub mod diff;
pub mod linalg;
pub mod ode;
pub mod product;
pub mod quadrature;
pub mod roots;
pub mod spline;

pub use diff::{diff_diagonal, DiffScheme};
pub use linalg::{solve_dense, weighted_least_squares, Cholesky, DenseSolution, Matrix};
pub use ode::{integrate_ivp, solve_at, Direction, IvpSolution, OdeOptions, Potential};
pub use product::{ProductEvaluator, SignedLog};
pub use quadrature::{product_integrate, QuadratureKind, QuadratureRule};
pub use roots::find_root_bracketed;
pub use spline::CubicSpline;

/// `cos(sqrt(lambda) x)` as an entire function of `lambda`; `cosh` branch for
/// negative `lambda`.
pub fn cos_sqrt(lambda: f64, x: f64) -> f64 {
    if lambda >= 0.0 {
        (lambda.sqrt() * x).cos()
    } else {
        ((-lambda).sqrt() * x).cosh()
    }
}

/// `sin(sqrt(lambda) x) / sqrt(lambda)`, equal to `x` at `lambda = 0`.
pub fn sin_sqrt_over(lambda: f64, x: f64) -> f64 {
    let z = lambda * x * x;
    if z.abs() < 1e-6 {
        // x (1 - z/6 + z^2/120)
        return x * (1.0 - z / 6.0 + z * z / 120.0);
    }
    if lambda > 0.0 {
        let s = lambda.sqrt();
        (s * x).sin() / s
    } else {
        let t = (-lambda).sqrt();
        (t * x).sinh() / t
    }
}

/// `d/dx cos(sqrt(lambda) x) = -lambda * sin(sqrt(lambda) x)/sqrt(lambda)`.
pub fn cos_sqrt_dx(lambda: f64, x: f64) -> f64 {
    -lambda * sin_sqrt_over(lambda, x)
}

/// Principal square root on the `s` scale; negative `lambda` maps to `-sqrt(-lambda)`
/// only through callers that need a real ordering key.
pub fn signed_sqrt(lambda: f64) -> f64 {
    if lambda >= 0.0 {
        lambda.sqrt()
    } else {
        -(-lambda).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entire_cos_is_continuous_through_zero() {
        for &x in &[0.3, 1.0, 3.0] {
            let a = cos_sqrt(1e-12, x);
            let b = cos_sqrt(-1e-12, x);
            assert!((a - b).abs() < 1e-10);
            assert!((cos_sqrt(0.0, x) - 1.0).abs() < 1e-15);
        }
        assert!((cos_sqrt(-1.0, 2.0) - 2f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn sin_over_matches_closed_forms() {
        assert!((sin_sqrt_over(4.0, 1.0) - 2f64.sin() / 2.0).abs() < 1e-15);
        assert!((sin_sqrt_over(-4.0, 1.0) - 2f64.sinh() / 2.0).abs() < 1e-15);
        assert!((sin_sqrt_over(1e-9, 2.0) - 2.0).abs() < 1e-8);
    }
}
