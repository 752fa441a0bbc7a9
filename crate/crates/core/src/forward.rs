//! Direct problem: eigenvalues, norming constants and `k_n` by shooting.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{find_root_bracketed, integrate_ivp, solve_at, Direction, OdeOptions, Potential, QuadratureRule};
use crate::problem::{EigenRecord, ProblemCoefficients, SpectralData};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardOptions {
    /// Tolerance for eigenfunction and root-polishing integrations.
    pub ode: OdeOptions,
    /// Looser tolerance used while scanning for sign changes.
    pub scan_tol: f64,
    /// Tolerance for the integrations behind finite-difference derivatives.
    pub derivative_tol: f64,
    /// Root tolerance on the `s = sqrt(lambda)` scale.
    pub root_tol: f64,
    /// Store `phi(., lambda_n)` on the problem grid in each record.
    pub keep_samples: bool,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions { tol: 1e-12, ..OdeOptions::default() },
            scan_tol: 1e-10,
            derivative_tol: 1e-13,
            root_tol: 1e-12,
            keep_samples: false,
        }
    }
}

/// Integrates the two characteristic solutions of one problem.
#[derive(Debug, Clone)]
pub struct Shooter {
    q: Potential,
    h: f64,
    big_h: f64,
    h1: f64,
    h2: f64,
}

impl Shooter {
    pub fn new(p: &ProblemCoefficients) -> Self {
        Self { q: p.potential(), h: p.h(), big_h: p.big_h(), h1: p.h1(), h2: p.h2() }
    }

    pub fn potential(&self) -> &Potential {
        &self.q
    }

    /// `(phi(pi), phi'(pi))` for `phi(0) = 1`, `phi'(0) = h`.
    pub fn phi_end(&self, lambda: f64, opts: &OdeOptions) -> Result<(f64, f64)> {
        Ok(solve_at(&self.q, (1.0, self.h), lambda, 0.0, &[PI], opts)?[0])
    }

    /// `Phi(lambda) = lambda (phi'(pi) + H phi(pi)) - H1 phi'(pi) - H2 phi(pi)`.
    pub fn characteristic(&self, lambda: f64, opts: &OdeOptions) -> Result<f64> {
        let (y, dy) = self.phi_end(lambda, opts)?;
        Ok(self.boundary_form(lambda, y, dy))
    }

    pub fn boundary_form(&self, lambda: f64, y: f64, dy: f64) -> f64 {
        lambda * (dy + self.big_h * y) - self.h1 * dy - self.h2 * y
    }

    /// Central difference with step `1e-5 max(1, |lambda|)`.
    pub fn characteristic_derivative(&self, lambda: f64, opts: &OdeOptions) -> Result<f64> {
        let d = 1e-5 * lambda.abs().max(1.0);
        let fp = self.characteristic(lambda + d, opts)?;
        let fm = self.characteristic(lambda - d, opts)?;
        Ok((fp - fm) / (2.0 * d))
    }

    /// `psi(0, lambda)`, with `psi(pi) = H1 - lambda`, `psi'(pi) = lambda H - H2`.
    pub fn k(&self, lambda: f64, opts: &OdeOptions) -> Result<f64> {
        let (y, _) = solve_at(&self.q, self.psi_terminal(lambda), lambda, PI, &[0.0], opts)?[0];
        if y.abs() < 1e-12 {
            return Err(Error::DegenerateK { lambda, value: y });
        }
        Ok(y)
    }

    pub fn psi_terminal(&self, lambda: f64) -> (f64, f64) {
        (self.h1 - lambda, lambda * self.big_h - self.h2)
    }

    pub fn rho(&self) -> f64 {
        self.big_h * self.h1 - self.h2
    }

    /// `phi(., lambda)` at the (increasing) nodes.
    pub fn phi_at(&self, lambda: f64, nodes: &[f64], opts: &OdeOptions) -> Result<Vec<f64>> {
        let (start, targets) = if nodes.first() == Some(&0.0) { (1, &nodes[1..]) } else { (0, nodes) };
        let mut out = Vec::with_capacity(nodes.len());
        if start == 1 {
            out.push(1.0);
        }
        out.extend(solve_at(&self.q, (1.0, self.h), lambda, 0.0, targets, opts)?.into_iter().map(|v| v.0));
        Ok(out)
    }

    /// Gauss–Legendre rule fine enough for `phi^2` up to frequency `s_max`.
    pub fn rule_for(s_max: f64) -> QuadratureRule {
        let panels = 32usize.max(s_max.max(0.0).ceil() as usize + 16);
        QuadratureRule::gauss_legendre(PI, panels, 10).expect("panel count is positive")
    }

    /// `int phi^2 + (phi'(pi) + H phi(pi))^2 / rho`.
    pub fn norming_constant(&self, lambda: f64, opts: &OdeOptions) -> Result<f64> {
        let rule = Self::rule_for(lambda.max(0.0).sqrt());
        let phi = self.phi_at(lambda, &rule.nodes, opts)?;
        let (y, dy) = self.phi_end(lambda, opts)?;
        Ok(self.gamma_from(&rule, &phi, y, dy))
    }

    fn gamma_from(&self, rule: &QuadratureRule, phi_nodes: &[f64], y: f64, dy: f64) -> f64 {
        let sq: Vec<f64> = phi_nodes.iter().map(|v| v * v).collect();
        rule.apply(&sq) + (dy + self.big_h * y).powi(2) / self.rho()
    }

    /// First `count` zeros of `Phi`.
    pub fn eigenvalues(&self, count: usize, omega: f64, fo: &ForwardOptions) -> Result<Vec<f64>> {
        let scan = OdeOptions { tol: fo.scan_tol, ..fo.ode };
        let f = |lambda: f64| self.characteristic(lambda, &scan);
        let polish = |lo: f64, hi: f64| -> Result<f64> {
            let s = hi.max(0.0).sqrt();
            let tol = fo.root_tol * (2.0 * s).max(1.0);
            find_root_bracketed(|l| self.characteristic(l, &fo.ode), lo, hi, tol)
        };
        let lam = |s: f64| s * s.abs();

        // below lambda_0, Phi < 0
        let min_q = self.q.min().min(0.0);
        let mut c = 3.0
            + 2.0 * self.h.abs()
            + 2.0 * self.big_h.abs()
            + (-min_q).sqrt()
            + self.h1.abs().sqrt()
            + self.h2.abs().sqrt();
        while f(-c * c)? >= 0.0 {
            c *= 2.0;
            if c > 200.0 {
                return Err(Error::MissedRoot {
                    index: 0,
                    detail: "characteristic function not negative far below the spectrum".into(),
                });
            }
        }

        // signed s-scan through the low part of the spectrum
        const DS: f64 = 0.1;
        const OFFSET: f64 = 0.0123;
        let k_lo = (-c / DS).floor() as i64;
        let k_hi = (2.01 / DS).ceil() as i64;
        let mut samples: Vec<(f64, f64)> = Vec::new();
        samples.push((-c, f(-c * c)?));
        for k in k_lo..=k_hi {
            let s = k as f64 * DS + OFFSET;
            if s > -c {
                samples.push((s, f(lam(s))?));
            }
        }
        let samples = refine_touching(samples, &|s| f(lam(s)))?;

        let mut roots = Vec::new();
        for w in samples.windows(2) {
            if roots.len() == count {
                break;
            }
            let ((sa, fa), (sb, fb)) = (w[0], w[1]);
            if fb == 0.0 {
                roots.push(lam(sb));
            } else if fa != 0.0 && fa.signum() != fb.signum() {
                roots.push(polish(lam(sa), lam(sb))?);
            }
        }
        let (mut cur, mut f_cur) = *samples.last().expect("scan is nonempty");

        // contiguous advance, guided by the asymptotics
        const STEP: f64 = 0.125;
        while roots.len() < count {
            let n = roots.len();
            let guess = if n >= 2 {
                let m = (n - 1) as f64;
                m + omega / (m * PI)
            } else {
                cur + 1.0
            };
            let limit = guess.max(cur) + 0.5 + 3.0;
            let mut found = None;
            let mut s = cur;
            while s < limit {
                let next = s + STEP;
                let f_next = f(lam(next))?;
                if f_next == 0.0 || f_next.signum() != f_cur.signum() {
                    found = Some((s, next, f_next));
                    break;
                }
                s = next;
                f_cur = f_next;
            }
            let (a, b, fb) = found.ok_or_else(|| Error::MissedRoot {
                index: n,
                detail: format!("no sign change in s in [{cur:.3}, {limit:.3}]"),
            })?;
            let root = if fb == 0.0 { lam(b) } else { polish(lam(a), lam(b))? };
            let m = n as f64 - 1.0;
            if m >= (2.0 * omega.abs()).max(4.0) && (root.max(0.0).sqrt() - m).abs() > 0.5 {
                return Err(Error::MissedRoot {
                    index: n,
                    detail: format!("root s = {:.6} is far from the expected {m}", root.sqrt()),
                });
            }
            roots.push(root);
            cur = b;
            f_cur = fb;
            if f_cur == 0.0 {
                cur += 1e-3;
                f_cur = f(lam(cur))?;
            }
        }
        if roots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::MissedRoot { index: 0, detail: "eigenvalues not strictly increasing".into() });
        }
        Ok(roots)
    }
}

/// Subdivides around samples where `|f|` dips without changing sign, so that
/// close pairs of roots are separated.
fn refine_touching<F>(samples: Vec<(f64, f64)>, f: &F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut out = Vec::with_capacity(samples.len());
    out.push(samples[0]);
    for i in 1..samples.len() {
        let (s, v) = samples[i];
        let prev = samples[i - 1];
        let dip = i + 1 < samples.len() && {
            let nxt = samples[i + 1];
            v.signum() == prev.1.signum()
                && v.signum() == nxt.1.signum()
                && v.abs() < prev.1.abs()
                && v.abs() < nxt.1.abs()
        };
        if dip {
            let nxt = samples[i + 1];
            const SUB: usize = 16;
            for j in 1..SUB {
                let t = prev.0 + (s - prev.0) * j as f64 / SUB as f64;
                out.push((t, f(t)?));
            }
            out.push((s, v));
            for j in 1..SUB {
                let t = s + (nxt.0 - s) * j as f64 / SUB as f64;
                out.push((t, f(t)?));
            }
        } else {
            out.push((s, v));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

/// `Phi(lambda)` for the problem.
pub fn char_function(p: &ProblemCoefficients, lambda: f64) -> Result<f64> {
    Shooter::new(p).characteristic(lambda, &ForwardOptions::default().ode)
}

/// `Phi'(lambda)` by central differences.
pub fn char_derivative(p: &ProblemCoefficients, lambda: f64) -> Result<f64> {
    let opts = ForwardOptions::default();
    Shooter::new(p).characteristic_derivative(lambda, &OdeOptions { tol: opts.derivative_tol, ..opts.ode })
}

/// The first `count` eigenvalues (`count = N + 1`).
pub fn find_eigenvalues(p: &ProblemCoefficients, count: usize) -> Result<Vec<f64>> {
    if count < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 eigenvalues, got {count}")));
    }
    Shooter::new(p).eigenvalues(count, p.omega(), &ForwardOptions::default())
}

pub fn norming_constant(p: &ProblemCoefficients, lambda: f64) -> Result<f64> {
    Shooter::new(p).norming_constant(lambda, &ForwardOptions::default().ode)
}

pub fn compute_k(p: &ProblemCoefficients, lambda: f64) -> Result<f64> {
    Shooter::new(p).k(lambda, &ForwardOptions::default().ode)
}

/// Spectrum and eigenfunction data of one problem.
#[derive(Debug, Clone)]
pub struct ForwardSolution {
    pub problem: ProblemCoefficients,
    pub records: Vec<EigenRecord>,
    shooter: Shooter,
    options: ForwardOptions,
    rule: QuadratureRule,
    phi_nodes: Vec<Vec<f64>>,
}

impl ForwardSolution {
    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda).collect()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gamma).collect()
    }

    pub fn spectral_data(&self) -> Result<SpectralData> {
        SpectralData::new(self.lambdas(), self.gammas(), None)
    }

    pub fn char_function(&self, lambda: f64) -> Result<f64> {
        self.shooter.characteristic(lambda, &self.options.ode)
    }

    pub fn char_derivative(&self, lambda: f64) -> Result<f64> {
        let opts = OdeOptions { tol: self.options.derivative_tol, ..self.options.ode };
        self.shooter.characteristic_derivative(lambda, &opts)
    }

    /// `int_0^pi phi(t, lambda_m) phi(t, lambda_n) dt`.
    pub fn inner_product(&self, m: usize, n: usize) -> f64 {
        let prod: Vec<f64> = self.phi_nodes[m].iter().zip(&self.phi_nodes[n]).map(|(a, b)| a * b).collect();
        self.rule.apply(&prod)
    }

    /// `max_x |psi - k_n phi| / max_x |psi|` on the problem grid.
    pub fn proportionality_residual(&self, n: usize) -> Result<f64> {
        let r = &self.records[n];
        let q = self.shooter.potential();
        let phi = integrate_ivp(q, (1.0, self.problem.h()), r.lambda, Direction::Forward, &self.options.ode)?;
        let psi = integrate_ivp(q, self.shooter.psi_terminal(r.lambda), r.lambda, Direction::Backward, &self.options.ode)?;
        let scale = psi.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dev = psi.y.iter().zip(&phi.y).fold(0.0f64, |m, (a, b)| m.max((a - r.k * b).abs()));
        Ok(dev / scale)
    }
}

pub fn forward_solve(p: &ProblemCoefficients, count: usize) -> Result<ForwardSolution> {
    forward_solve_with(p, count, &ForwardOptions::default())
}

pub fn forward_solve_with(p: &ProblemCoefficients, count: usize, opts: &ForwardOptions) -> Result<ForwardSolution> {
    if count < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 eigenvalues, got {count}")));
    }
    let shooter = Shooter::new(p);
    let lambdas = shooter.eigenvalues(count, p.omega(), opts)?;
    let s_max = lambdas.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let rule = Shooter::rule_for(s_max);
    let grid_points = p.grid().points();

    let per: Vec<(EigenRecord, Vec<f64>)> = lambdas
        .par_iter()
        .map(|&lambda| -> Result<(EigenRecord, Vec<f64>)> {
            let phi_nodes = shooter.phi_at(lambda, &rule.nodes, &opts.ode)?;
            let (y, dy) = shooter.phi_end(lambda, &opts.ode)?;
            let gamma = shooter.gamma_from(&rule, &phi_nodes, y, dy);
            let k = shooter.k(lambda, &opts.ode)?;
            let phi_samples = if opts.keep_samples {
                Some(shooter.phi_at(lambda, &grid_points, &opts.ode)?)
            } else {
                None
            };
            Ok((EigenRecord { lambda, phi_end: (y, dy), gamma, k, phi_samples }, phi_nodes))
        })
        .collect::<Result<Vec<_>>>()?;
    let (records, phi_nodes): (Vec<_>, Vec<_>) = per.into_iter().unzip();
    if let Some(r) = records.iter().find(|r| !(r.gamma > 0.0)) {
        return Err(Error::InconsistentData(format!("norming constant {} at lambda = {}", r.gamma, r.lambda)));
    }
    Ok(ForwardSolution { problem: p.clone(), records, shooter, options: *opts, rule, phi_nodes })
}
