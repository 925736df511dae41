//! Exact Gaussian-process posterior inference and marginal-likelihood
//! hyperparameter fitting.
//!
//! The posterior follows the standard noisy-observation update
//!
//! ```text
//! mu(x)     = k(x)' (K + eta^2 I)^-1 y
//! sigma2(x) = k(x, x) - k(x)' (K + eta^2 I)^-1 k(x)
//! ```
//!
//! backed by a Cholesky factorization of the regularized Gram matrix. A
//! small jitter proportional to the signal variance is always added before
//! factorizing, escalating by factors of ten on failure.

use crate::kernels::{Kernel, KernelFamily};
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Initial jitter, as a fraction of the signal variance.
const JITTER_START: f64 = 1e-8;
/// Jitter escalation cap, as a fraction of the signal variance.
const JITTER_MAX: f64 = 1e-2;

/// Fitted GP state. Immutable after construction; cheap to share behind a
/// reference across concurrent readers.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: Kernel,
    x_train: Vec<Vec<f64>>,
    y_train: Vec<f64>,
    eta2: f64,
    chol: Option<Cholesky<f64, Dyn>>,
    alpha: DVector<f64>,
}

/// Factorize `K + (eta2 + jitter) I`, escalating the jitter on failure.
fn factorize(
    kernel: &Kernel,
    gram: &DMatrix<f64>,
    eta2: f64,
) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = gram.nrows();
    let mut jitter = JITTER_START * kernel.signal_variance;
    let limit = JITTER_MAX * kernel.signal_variance;
    loop {
        let mut m = gram.clone();
        for i in 0..n {
            m[(i, i)] += eta2 + jitter;
        }
        if let Some(chol) = Cholesky::new(m) {
            return Ok((chol, jitter));
        }
        jitter *= 10.0;
        if jitter > limit {
            let diag_max = (0..n).map(|i| gram[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::Numerical(format!(
                "Gram factorization failed for n={n} after escalating jitter to {limit:.3e} \
                 (eta2={eta2:.3e}, max diagonal {diag_max:.3e})"
            )));
        }
    }
}

impl GpPosterior {
    /// Fit the posterior on the given data. Empty data yields the prior.
    pub fn fit(kernel: Kernel, x_train: Vec<Vec<f64>>, y_train: Vec<f64>, eta2: f64) -> Result<Self> {
        if x_train.len() != y_train.len() {
            return Err(Error::InvalidInput(format!(
                "{} inputs but {} targets",
                x_train.len(),
                y_train.len()
            )));
        }
        if eta2 < 0.0 || !eta2.is_finite() {
            return Err(Error::InvalidInput(format!(
                "model noise variance must be nonnegative, got {eta2}"
            )));
        }
        if x_train.is_empty() {
            return Ok(Self {
                kernel,
                x_train,
                y_train,
                eta2,
                chol: None,
                alpha: DVector::zeros(0),
            });
        }
        let gram = kernel.matrix(&x_train, &x_train)?;
        let (chol, _) = factorize(&kernel, &gram, eta2)?;
        let alpha = chol.solve(&DVector::from_column_slice(&y_train));
        Ok(Self {
            kernel,
            x_train,
            y_train,
            eta2,
            chol: Some(chol),
            alpha,
        })
    }

    /// Posterior mean and standard deviation at a query point.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        let prior_var = self.kernel.eval(x, x)?;
        let Some(chol) = &self.chol else {
            return Ok((0.0, prior_var.sqrt()));
        };
        let n = self.x_train.len();
        let mut k_vec = DVector::zeros(n);
        for (i, xi) in self.x_train.iter().enumerate() {
            k_vec[i] = self.kernel.eval(xi, x)?;
        }
        let mu = k_vec.dot(&self.alpha);
        let v = chol
            .l_dirty()
            .solve_lower_triangular(&k_vec)
            .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
        let var = prior_var - v.norm_squared();
        // Round-off can push the variance slightly negative; tolerate an
        // amount proportional to the prior scale and reject anything worse.
        let tol = 1e-10 * self.kernel.signal_variance.max(1.0);
        if var < -tol {
            return Err(Error::Numerical(format!(
                "predictive variance {var:.3e} below -{tol:.3e} (n={n})"
            )));
        }
        Ok((mu, var.max(0.0).sqrt()))
    }

    /// Refit with one extra observation appended.
    pub fn extended(&self, x: Vec<f64>, y: f64) -> Result<Self> {
        let mut xs = self.x_train.clone();
        let mut ys = self.y_train.clone();
        xs.push(x);
        ys.push(y);
        Self::fit(self.kernel, xs, ys, self.eta2)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }

    pub fn len(&self) -> usize {
        self.x_train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_train.is_empty()
    }

    pub fn training_inputs(&self) -> &[Vec<f64>] {
        &self.x_train
    }

    pub fn training_targets(&self) -> &[f64] {
        &self.y_train
    }
}

/// Log marginal likelihood of the data under the kernel and noise level.
pub fn log_marginal_likelihood(
    kernel: &Kernel,
    x_train: &[Vec<f64>],
    y_train: &[f64],
    eta2: f64,
) -> Result<f64> {
    if x_train.is_empty() || x_train.len() != y_train.len() {
        return Err(Error::InvalidInput(
            "log marginal likelihood requires nonempty, aligned data".into(),
        ));
    }
    let n = x_train.len();
    let gram = kernel.matrix(x_train, x_train)?;
    let (chol, _) = factorize(kernel, &gram, eta2)?;
    let y = DVector::from_column_slice(y_train);
    let alpha = chol.solve(&y);
    let log_det: f64 = (0..n).map(|i| chol.l_dirty()[(i, i)].ln()).sum::<f64>() * 2.0;
    Ok(-0.5 * y.dot(&alpha) - 0.5 * log_det - 0.5 * (n as f64) * (2.0 * std::f64::consts::PI).ln())
}

/// Deterministic budget for the log-space coordinate search over
/// `(lengthscale, signal variance)`.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Zoom rounds; each round sweeps both axes and then shrinks the windows.
    pub rounds: usize,
    /// Grid points per axis per sweep.
    pub points_per_axis: usize,
    /// Window shrink factor between rounds.
    pub zoom: f64,
    /// Inclusive lengthscale search range.
    pub lengthscale_range: (f64, f64),
    /// Inclusive signal-variance search range.
    pub signal_variance_range: (f64, f64),
    /// Hard floor for the fitted signal variance.
    pub signal_variance_floor: f64,
}

impl SearchBudget {
    /// Default budget for data living in a box with the given diagonal.
    pub fn for_domain(diagonal: f64, y_train: &[f64]) -> Self {
        let n = y_train.len().max(1) as f64;
        let mean = y_train.iter().sum::<f64>() / n;
        let var = y_train.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let var = var.max(1e-6);
        Self {
            rounds: 3,
            points_per_axis: 9,
            zoom: 3.0,
            lengthscale_range: (1e-3 * diagonal, 10.0 * diagonal),
            signal_variance_range: (var * 1e-3, var * 1e3),
            signal_variance_floor: 1e-6,
        }
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo.ln() + hi.ln()).mul_add(0.5, 0.0).exp()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * (i as f64) / ((n - 1) as f64)).exp())
        .collect()
}

/// Fit `(lengthscale, signal_variance)` by maximizing the log marginal
/// likelihood with a derivative-free log-space coordinate search.
///
/// Deterministic given the budget and data; candidates that fail to
/// factorize are skipped. All-constant targets short-circuit to the
/// variance floor.
pub fn fit_hyperparameters(
    family: KernelFamily,
    x_train: &[Vec<f64>],
    y_train: &[f64],
    eta2: f64,
    budget: &SearchBudget,
) -> Result<Kernel> {
    if x_train.len() < 2 || x_train.len() != y_train.len() {
        return Err(Error::InvalidInput(
            "hyperparameter fitting requires at least two aligned data points".into(),
        ));
    }
    let (l_lo, l_hi) = budget.lengthscale_range;
    let (s_lo, s_hi) = budget.signal_variance_range;
    if !(l_lo > 0.0 && l_hi >= l_lo && s_lo > 0.0 && s_hi >= s_lo) {
        return Err(Error::InvalidInput("search ranges must be positive and ordered".into()));
    }

    let spread = y_train.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - y_train.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread == 0.0 {
        let l = (l_lo.ln() + l_hi.ln()).mul_add(0.5, 0.0).exp();
        return Kernel::new(family, l, budget.signal_variance_floor);
    }

    let s_lo = s_lo.max(budget.signal_variance_floor);
    let s_hi = s_hi.max(s_lo);
    let score = |l: f64, s2: f64| -> f64 {
        match Kernel::new(family, l, s2) {
            Ok(k) => log_marginal_likelihood(&k, x_train, y_train, eta2).unwrap_or(f64::NEG_INFINITY),
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let mut cur_l = (l_lo.ln() + l_hi.ln()).mul_add(0.5, 0.0).exp();
    let mut cur_s = (s_lo.ln() + s_hi.ln()).mul_add(0.5, 0.0).exp();
    let mut best = (cur_l, cur_s, score(cur_l, cur_s));
    let mut window_l = l_hi.ln() - l_lo.ln();
    let mut window_s = s_hi.ln() - s_lo.ln();

    for _ in 0..budget.rounds {
        for axis in 0..2 {
            let (lo, hi, window, center) = if axis == 0 {
                (l_lo, l_hi, window_l, cur_l)
            } else {
                (s_lo, s_hi, window_s, cur_s)
            };
            let half = window / 2.0;
            let a = (center.ln() - half).max(lo.ln()).exp();
            let b = (center.ln() + half).min(hi.ln()).exp();
            for cand in log_grid(a, b, budget.points_per_axis) {
                let (l, s2) = if axis == 0 { (cand, cur_s) } else { (cur_l, cand) };
                let v = score(l, s2);
                if v > best.2 {
                    best = (l, s2, v);
                }
            }
            cur_l = best.0;
            cur_s = best.1;
        }
        window_l /= budget.zoom;
        window_s /= budget.zoom;
    }

    if best.2 == f64::NEG_INFINITY {
        return Err(Error::Numerical(
            "every hyperparameter candidate failed to factorize".into(),
        ));
    }
    Kernel::new(family, best.0, best.1.max(budget.signal_variance_floor))
}
