//! Seeded random test problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::problem::ProblemCoefficients;

/// Trigonometric polynomial `a_0 + sum_{j<=3} (a_j cos jx + b_j sin jx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPotential {
    pub a: [f64; 4],
    pub b: [f64; 3],
}

impl TrigPotential {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.a[0];
        for j in 1..=3 {
            let jx = j as f64 * x;
            v += self.a[j] * jx.cos() + self.b[j - 1] * jx.sin();
        }
        v
    }
}

/// Coefficients in `[-2, 2]`, redrawn until `rho > 0.1`.
pub fn random_problem(seed: u64, intervals: usize) -> Result<(ProblemCoefficients, TrigPotential)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = || rng.gen_range(-2.0..=2.0);
    let tq = TrigPotential { a: [u(), u(), u(), u()], b: [u(), u(), u()] };
    let h = u();
    loop {
        let (big_h, h1, h2) = (u(), u(), u());
        if big_h * h1 - h2 > 0.1 {
            let p = ProblemCoefficients::from_fn(intervals, |x| tq.eval(x), h, big_h, h1, h2)?;
            return Ok((p, tq));
        }
    }
}
