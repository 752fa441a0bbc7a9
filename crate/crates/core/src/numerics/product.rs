//! Truncated Hadamard-type products
//!
//!   P(lambda) = c * prod_{j < L} (lambda - r_j) * prod_{j >= L} (r_j - lambda) / m_j^2
//!
//! with model index `m_j = j - L + 1`, completed beyond the last supplied root
//! by model roots. The model roots `m^2` contribute `sin(pi s)/(pi s)` in closed
//! form (`s = sqrt(lambda)`); an optional shift `omega` moves them to
//! `(m + omega/(m pi))^2`, which is summed explicitly over a finite window
//! plus an asymptotic remainder. Everything is accumulated as log-magnitude
//! and sign.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Number of explicitly summed shifted tail factors.
const TAIL_TERMS: usize = 4096;

/// `sign * exp(ln_abs)`; zero is `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { sign: 1.0, ln_abs: 0.0 };
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self { sign: v.signum(), ln_abs: v.abs().ln() }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    fn mul_f64(&mut self, v: f64) {
        if v == 0.0 {
            *self = Self::ZERO;
        } else if self.sign != 0.0 {
            self.sign *= v.signum();
            self.ln_abs += v.abs().ln();
        }
    }
}

impl std::ops::Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, other: SignedLog) -> SignedLog {
        if self.sign == 0.0 || other.sign == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog { sign: self.sign * other.sign, ln_abs: self.ln_abs + other.ln_abs }
        }
    }
}

impl std::ops::Div for SignedLog {
    type Output = SignedLog;

    fn div(self, other: SignedLog) -> SignedLog {
        SignedLog { sign: self.sign * other.sign, ln_abs: self.ln_abs - other.ln_abs }
    }
}

#[derive(Debug, Clone)]
pub struct ProductEvaluator {
    roots: Vec<f64>,
    leading: usize,
    scale: f64,
    tail_shift: f64,
    tail_curvature: f64,
}

impl ProductEvaluator {
    pub const MIN_TRUNCATION: usize = 8;

    pub fn new(roots: Vec<f64>, leading: usize, scale: f64) -> Result<Self> {
        if roots.len() < leading + 1 || roots.len() - 1 < Self::MIN_TRUNCATION {
            return Err(Error::InvalidInput(format!(
                "product needs truncation N >= {} and more roots than leading factors (got {} roots)",
                Self::MIN_TRUNCATION,
                roots.len()
            )));
        }
        if roots.iter().any(|r| !r.is_finite()) || roots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("product roots must be finite and strictly increasing".into()));
        }
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidInput("product scale must be finite and nonzero".into()));
        }
        Ok(Self { roots, leading, scale, tail_shift: 0.0, tail_curvature: 0.0 })
    }

    /// `-pi (lambda - r_0)(lambda - r_1) prod_{n>=2} (r_n - lambda)/(n-1)^2`.
    pub fn characteristic(roots: &[f64]) -> Result<Self> {
        Self::new(roots.to_vec(), 2, -PI)
    }

    /// Shift the model roots beyond the truncation to `(m + omega/(m pi))^2`.
    pub fn with_tail_shift(mut self, omega: f64) -> Self {
        self.tail_shift = omega;
        self
    }

    /// Adds `d/m^3` to the model roots' square roots.
    pub fn with_tail_curvature(mut self, d: f64) -> Self {
        self.tail_curvature = d;
        self
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn tail_shift(&self) -> f64 {
        self.tail_shift
    }

    /// Largest model index covered by supplied roots.
    fn last_model(&self) -> usize {
        self.roots.len() - self.leading
    }

    pub fn eval(&self, lambda: f64) -> SignedLog {
        self.eval_impl(lambda, None)
    }

    /// `P(lambda)` with the factor vanishing at `roots[n]` replaced by its
    /// derivative. Fails if `lambda` hits any other root.
    pub fn eval_without(&self, lambda: f64, n: usize) -> Result<SignedLog> {
        if n >= self.roots.len() {
            return Err(Error::InvalidInput(format!("root index {n} out of range")));
        }
        if let Some(j) = self.roots.iter().enumerate().position(|(j, &r)| j != n && r == lambda) {
            return Err(Error::DegenerateRoot { index: j, lambda });
        }
        Ok(self.eval_impl(lambda, Some(n)))
    }

    /// `P'(r_n)`.
    pub fn derivative_at_root(&self, n: usize) -> Result<SignedLog> {
        let r = *self
            .roots
            .get(n)
            .ok_or_else(|| Error::InvalidInput(format!("root index {n} out of range")))?;
        self.eval_without(r, n)
    }

    fn eval_impl(&self, lambda: f64, skip: Option<usize>) -> SignedLog {
        let mut acc = SignedLog::from_f64(self.scale);
        for (j, &r) in self.roots.iter().take(self.leading).enumerate() {
            acc.mul_f64(if skip == Some(j) { 1.0 } else { lambda - r });
        }

        let last = self.last_model();
        // model index nearest to s whose zero cancels against sin(pi s)
        let nearest = if lambda > 0.25 {
            Some((lambda.sqrt().round() as usize).max(1))
        } else {
            None
        };
        let mut combined = false;
        for (j, &r) in self.roots.iter().enumerate().skip(self.leading) {
            let m = (j - self.leading + 1) as f64;
            acc.mul_f64(if skip == Some(j) { -1.0 } else { r - lambda });
            if nearest == Some(j - self.leading + 1) {
                combined = true;
            } else {
                acc.mul_f64(1.0 / (m * m - lambda));
            }
        }

        // tail: prod_{m > last} (rt_m - lambda) / (m^2 - lambda), rt_m the
        // shifted model root; the m^2 factors telescope into sin(pi s)/(pi s).
        let mut tail_nearest_num = None;
        if self.tail_shift != 0.0 || self.tail_curvature != 0.0 {
            let w = self.tail_shift / PI;
            let d = self.tail_curvature;
            for k in 1..=TAIL_TERMS {
                let m = (last + k) as f64;
                let shifted = (m + w / m + d / (m * m * m)).powi(2);
                if nearest == Some(last + k) {
                    tail_nearest_num = Some(shifted - lambda);
                    continue;
                }
                acc.mul_f64((shifted - lambda) / (m * m - lambda));
            }
            // sum_{m > L} log(1 + (2w + O(1/m^2))/(m^2 - lambda)) ~ 2w/(L + 1/2)
            let l = (last + TAIL_TERMS) as f64;
            acc.ln_abs += 2.0 * w / (l + 0.5);
        }

        match nearest {
            Some(m) if combined || tail_nearest_num.is_some() => {
                acc = acc * sinc_over_model_factor(lambda, m);
                if let Some(num) = tail_nearest_num {
                    acc.mul_f64(num);
                }
            }
            Some(m) if m > last && self.tail_shift == 0.0 && self.tail_curvature == 0.0 => {
                // unshifted model zero beyond the data: plain sinc is stable
                // enough, but keep the combined form for symmetry
                acc = acc * sinc_over_model_factor(lambda, m);
                acc.mul_f64((m * m) as f64 - lambda);
            }
            _ => acc = acc * ln_sinc(lambda),
        }
        acc
    }
}

/// `sin(pi s)/(pi s)` for `s = sqrt(lambda)`, entire in `lambda`.
fn ln_sinc(lambda: f64) -> SignedLog {
    if lambda.abs() < 1e-8 {
        return SignedLog::from_f64(1.0 - PI * PI * lambda / 6.0);
    }
    if lambda > 0.0 {
        let s = lambda.sqrt();
        SignedLog::from_f64((PI * s).sin() / (PI * s))
    } else {
        let t = PI * (-lambda).sqrt();
        // ln(sinh t / t) without overflow
        let ln = if t > 20.0 {
            t - std::f64::consts::LN_2 - t.ln() + (-(2.0 * t)).exp().ln_1p()
        } else {
            (t.sinh() / t).ln()
        };
        SignedLog { sign: 1.0, ln_abs: ln }
    }
}

/// `sin(pi s) / (pi s (m^2 - lambda))` evaluated without cancellation near
/// `s = m`: with `s = m + e`, it equals `-(-1)^m (sin(pi e)/e) / (pi s (s + m))`.
fn sinc_over_model_factor(lambda: f64, m: usize) -> SignedLog {
    let s = lambda.sqrt();
    let mf = m as f64;
    let e = s - mf;
    let sin_over = if e.abs() < 1e-4 {
        PI * (1.0 - (PI * e).powi(2) / 6.0)
    } else {
        (PI * e).sin() / e
    };
    let parity = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    SignedLog::from_f64(-parity * sin_over / (PI * s * (s + mf)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_roots(n: usize) -> Vec<f64> {
        let mut r = vec![0.0, 0.25];
        r.extend((2..=n).map(|k| ((k - 1) * (k - 1)) as f64));
        r
    }

    #[test]
    fn vanishes_at_roots() {
        let p = ProductEvaluator::characteristic(&example_roots(40)).unwrap();
        for &r in p.roots() {
            assert_eq!(p.eval(r).value(), 0.0, "root {r}");
        }
    }

    #[test]
    fn model_roots_give_sinc() {
        let roots: Vec<f64> = (1..=20).map(|n| (n * n) as f64).collect();
        let p = ProductEvaluator::new(roots, 0, 1.0).unwrap();
        let v = p.eval(0.25).value();
        assert!((v - 2.0 / PI).abs() < 1e-14, "{v}");
        // also well beyond the data and between model roots
        for &l in &[-3.0f64, 2.0, 30.5, 500.0] {
            let s: f64 = if l >= 0.0 { l.sqrt() } else { 0.0 };
            let want = if l >= 0.0 {
                (PI * s).sin() / (PI * s)
            } else {
                let t = PI * (-l).sqrt();
                t.sinh() / t
            };
            assert!((p.eval(l).value() - want).abs() < 1e-12 * (1.0 + want.abs()), "lambda {l}");
        }
    }

    #[test]
    fn example_product_is_closed_form() {
        // chi = -pi lambda (lambda - 1/4) sin(pi s)/(pi s)
        let p = ProductEvaluator::characteristic(&example_roots(30)).unwrap();
        for &l in &[-2.0, 0.1, 2.5, 3.999, 17.3, 2000.0] {
            let want = -PI * l * (l - 0.25) * ln_sinc(l).value();
            let got = p.eval(l).value();
            assert!((got - want).abs() <= 1e-11 * (1.0 + want.abs()), "lambda {l}: {got} vs {want}");
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // perturbed spectrum: s_n = n - 1 + 0.3/(n pi) + 0.05/n^2
        let mut roots = vec![-0.4, 0.3];
        roots.extend((2..=200).map(|n| {
            let nf = n as f64;
            (nf - 1.0 + 0.3 / (nf * PI) + 0.05 / (nf * nf)).powi(2)
        }));
        for shift in [0.0, 0.3] {
            let p = ProductEvaluator::characteristic(&roots).unwrap().with_tail_shift(shift);
            for (n, &r) in roots.iter().enumerate().take(11) {
                let d = p.derivative_at_root(n).unwrap().value();
                let h = 1e-6 * r.abs().max(1.0);
                let fd = (p.eval(r + h).value() - p.eval(r - h).value()) / (2.0 * h);
                assert!(((d - fd) / d).abs() < 1e-6, "n {n}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn derivative_sign_alternates() {
        let p = ProductEvaluator::characteristic(&example_roots(20)).unwrap();
        for n in 0..20 {
            let d = p.derivative_at_root(n).unwrap();
            // below lambda_0 the product is negative; each simple root flips it
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(d.sign, want, "n = {n}");
        }
    }

    #[test]
    fn rejects_bad_roots() {
        assert!(ProductEvaluator::characteristic(&[0.0, 1.0, 1.0, 4.0, 9.0, 16.0, 25.0, 36.0, 49.0]).is_err());
        assert!(ProductEvaluator::characteristic(&example_roots(5)).is_err());
    }
}
