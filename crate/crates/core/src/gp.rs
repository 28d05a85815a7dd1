//! Gaussian-process regression with a per-point prior mean.
//!
//! The process models the residual between measured performance and a prior
//! prediction `prior(x)`:
//!
//! ```text
//! mu(x)  = prior(x) + k(x)^T K^-1 (P - prior(chi))
//! var(x) = s - k(x)^T K^-1 k(x)
//! K      = [s * m(chi_i, chi_j)] + noise_var * I
//! ```
//!
//! where `m` is the Matérn 5/2 correlation and `s` the signal variance
//! (1 unless a constant-variance prior is requested). A constant `prior`
//! recovers plain Bayesian optimization.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Cholesky;

const SQRT5: f64 = 2.236_067_977_499_79;

/// Matérn 5/2 correlation as a function of the distance `d`.
pub fn matern52_distance(d: f64, rho: f64) -> f64 {
    let r = SQRT5 * d / rho;
    (1.0 + r + r * r / 3.0) * (-r).exp()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `(1 + sqrt5 d/rho + 5 d^2/(3 rho^2)) exp(-sqrt5 d/rho)` with `d` the
/// Euclidean distance between `x1` and `x2`.
pub fn matern52(x1: &[f64], x2: &[f64], rho: f64) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch { expected: x1.len(), actual: x2.len() });
    }
    if rho.is_nan() || rho <= 0.0 {
        return Err(Error::Config(format!("length scale must be positive, got {rho}")));
    }
    Ok(matern52_distance(euclidean(x1, x2), rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    /// Length scale in behavior-space units.
    pub rho: f64,
    /// `k(x, x)`.
    pub signal_var: f64,
}

impl KernelParams {
    pub fn new(rho: f64) -> Self {
        Self { rho, signal_var: 1.0 }
    }

    pub fn eval(&self, x1: &[f64], x2: &[f64]) -> f64 {
        self.signal_var * matern52_distance(euclidean(x1, x2), self.rho)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub chi: Vec<f64>,
    pub measured: f64,
    pub prior_at_chi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub mu: f64,
    pub var: f64,
}

impl Posterior {
    pub fn sigma(&self) -> f64 {
        self.var.sqrt()
    }
}

/// A fitted process. Immutable once built; refit to add observations.
#[derive(Debug, Clone)]
pub struct GpState {
    kernel: KernelParams,
    noise_var: f64,
    observations: Vec<Observation>,
    chol: Cholesky,
    alpha: Vec<f64>,
}

impl GpState {
    pub fn fit(kernel: KernelParams, noise_var: f64, observations: Vec<Observation>) -> Result<Self> {
        if !(kernel.rho > 0.0 && kernel.rho.is_finite()) {
            return Err(Error::Config(format!("length scale must be positive, got {}", kernel.rho)));
        }
        if !(kernel.signal_var > 0.0 && kernel.signal_var.is_finite()) {
            return Err(Error::Config(format!("signal variance must be positive, got {}", kernel.signal_var)));
        }
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::Config(format!("noise variance must be positive, got {noise_var}")));
        }
        if let Some(first) = observations.first() {
            let dims = first.chi.len();
            for o in &observations {
                if o.chi.len() != dims {
                    return Err(Error::DimensionMismatch { expected: dims, actual: o.chi.len() });
                }
                if !(o.measured.is_finite() && o.prior_at_chi.is_finite() && o.chi.iter().all(|v| v.is_finite())) {
                    return Err(Error::Config("observations must be finite".into()));
                }
            }
        }

        let t = observations.len();
        let mut k = vec![0.0; t * t];
        for i in 0..t {
            for j in 0..=i {
                let v = kernel.eval(&observations[i].chi, &observations[j].chi);
                k[i * t + j] = v;
                k[j * t + i] = v;
            }
            k[i * t + i] += noise_var;
        }
        let chol = Cholesky::with_jitter(&k, t).map_err(|jitter| Error::IllConditioned { condition: diag_condition(&k, t), jitter })?;
        let residual: Vec<f64> = observations.iter().map(|o| o.measured - o.prior_at_chi).collect();
        let alpha = chol.solve(&residual);
        Ok(Self { kernel, noise_var, observations, chol, alpha })
    }

    /// A process with no observations: `mu = prior`, `var = k(x, x)`.
    pub fn empty(kernel: KernelParams, noise_var: f64) -> Result<Self> {
        Self::fit(kernel, noise_var, Vec::new())
    }

    pub fn kernel(&self) -> KernelParams {
        self.kernel
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn jitter(&self) -> f64 {
        self.chol.jitter()
    }

    pub fn condition_estimate(&self) -> f64 {
        self.chol.condition_estimate()
    }

    /// Posterior at `x`, whose prior mean is `prior_at_x`.
    pub fn posterior(&self, x: &[f64], prior_at_x: f64) -> Posterior {
        if self.observations.is_empty() {
            return Posterior { mu: prior_at_x, var: self.kernel.signal_var };
        }
        assert_eq!(x.len(), self.observations[0].chi.len(), "query dimension");
        let mut k: Vec<f64> = self.observations.iter().map(|o| self.kernel.eval(x, &o.chi)).collect();
        let mu = prior_at_x + k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
        self.chol.solve_lower(&mut k);
        let var = (self.kernel.signal_var - k.iter().map(|v| v * v).sum::<f64>()).max(0.0);
        Posterior { mu, var }
    }
}

fn diag_condition(k: &[f64], t: usize) -> f64 {
    let diag: Vec<f64> = (0..t).map(|i| k[i * t + i].abs()).collect();
    let hi = diag.iter().cloned().fold(0.0, f64::max);
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}
