//! Player-side bandit algorithms over a fixed candidate set: GP-UCB and a
//! variance-maximizing elimination rule, plus exploration schedules and a
//! greedy information-gain estimate.

use crate::gp::GpPosterior;
use crate::kernels::Kernel;
use crate::{Error, Result};

/// Exploration-parameter schedule for the confidence width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSchedule {
    /// `beta_t = 0.5 ln(2 t)`, the common empirical choice.
    Practical,
    /// Practical plus a robustness constant.
    Defense { c: f64 },
    /// `beta_t^(1/2) = B + sigma lambda^(-1/2) sqrt(2 (gamma_{t-1} + ln(1/delta)))`.
    Theory {
        rkhs_bound: f64,
        noise_std: f64,
        lambda: f64,
        delta: f64,
    },
}

impl BetaSchedule {
    /// Exploration parameter at round `t >= 1`. `gamma_prev` is the
    /// information-gain estimate after `t - 1` rounds (ignored except by the
    /// theoretical schedule).
    pub fn value(&self, t: usize, gamma_prev: f64) -> Result<f64> {
        if t == 0 {
            return Err(Error::InvalidInput("rounds are 1-based".into()));
        }
        let practical = 0.5 * (2.0 * t as f64).ln();
        match *self {
            Self::Practical => Ok(practical),
            Self::Defense { c } => Ok(practical + c),
            Self::Theory {
                rkhs_bound,
                noise_std,
                lambda,
                delta,
            } => {
                let root = rkhs_bound
                    + noise_std / lambda.sqrt()
                        * (2.0 * (gamma_prev + (1.0 / delta).ln())).sqrt();
                Ok(root * root)
            }
        }
    }
}

/// Greedy lower estimate of the maximum information gain after `t`
/// observations from the candidate set:
/// `max_S (1/2) log det(I + lambda^-1 K_S)` over `|S| = t`.
///
/// The greedy chain is nested across `t`, so one instance can serve a whole
/// run incrementally.
#[derive(Debug, Clone)]
pub struct GreedyInfoGain {
    kernel: Kernel,
    candidates: Vec<Vec<f64>>,
    lambda: f64,
    selected: Vec<usize>,
    /// `cumulative[t]` is the gain after `t` greedy picks; entry 0 is 0.
    cumulative: Vec<f64>,
}

impl GreedyInfoGain {
    pub fn new(kernel: Kernel, candidates: Vec<Vec<f64>>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
        }
        if candidates.is_empty() {
            return Err(Error::InvalidInput("candidate set must be nonempty".into()));
        }
        Ok(Self {
            kernel,
            candidates,
            lambda,
            selected: Vec::new(),
            cumulative: vec![0.0],
        })
    }

    /// Gain after `t` picks, extending the greedy chain as needed.
    pub fn value_at(&mut self, t: usize) -> Result<f64> {
        if t > self.candidates.len() {
            return Err(Error::InvalidInput(format!(
                "cannot pick {t} of {} candidates",
                self.candidates.len()
            )));
        }
        while self.selected.len() < t {
            // Marginal gain of adding x is (1/2) ln(1 + sigma_S^2(x) / lambda)
            // where sigma_S^2 conditions on the picks so far with noise
            // lambda, so the greedy pick maximizes that posterior variance.
            let xs: Vec<Vec<f64>> = self.selected.iter().map(|&i| self.candidates[i].clone()).collect();
            let ys = vec![0.0; xs.len()];
            let post = GpPosterior::fit(self.kernel, xs, ys, self.lambda)?;
            let mut best: Option<(usize, f64)> = None;
            for (i, cand) in self.candidates.iter().enumerate() {
                let (_, sigma) = post.predict(cand)?;
                let var = sigma * sigma;
                if best.map(|(_, v)| var > v).unwrap_or(true) {
                    best = Some((i, var));
                }
            }
            let (idx, var) = best.expect("nonempty candidates");
            self.selected.push(idx);
            let gain = 0.5 * (1.0 + var / self.lambda).ln();
            let total = self.cumulative.last().unwrap() + gain;
            self.cumulative.push(total);
        }
        Ok(self.cumulative[t])
    }
}

/// One-shot greedy information-gain estimate; `t = 0` yields 0.
pub fn empirical_info_gain(
    kernel: Kernel,
    candidates: &[Vec<f64>],
    t: usize,
    lambda: f64,
) -> Result<f64> {
    if t == 0 {
        return Ok(0.0);
    }
    GreedyInfoGain::new(kernel, candidates.to_vec(), lambda)?.value_at(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    GpUcb,
    MaxVarElim,
}

impl Algorithm {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gpucb" => Ok(Self::GpUcb),
            "maxvar" => Ok(Self::MaxVarElim),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Player state threaded through one optimization run.
#[derive(Debug, Clone)]
pub struct PlayerState {
    algorithm: Algorithm,
    posterior: GpPosterior,
    candidates: Vec<Vec<f64>>,
    /// Surviving candidate indices; only consulted by the elimination rule
    /// and monotone nonincreasing over a run.
    active: Vec<usize>,
    round: usize,
}

impl PlayerState {
    pub fn new(
        algorithm: Algorithm,
        kernel: Kernel,
        eta2: f64,
        candidates: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidInput("candidate set must be nonempty".into()));
        }
        let posterior = GpPosterior::fit(kernel, vec![], vec![], eta2)?;
        let active = (0..candidates.len()).collect();
        Ok(Self {
            algorithm,
            posterior,
            candidates,
            active,
            round: 0,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn posterior(&self) -> &GpPosterior {
        &self.posterior
    }

    pub fn candidates(&self) -> &[Vec<f64>] {
        &self.candidates
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Replace the posterior's kernel, refitting on the data seen so far.
    /// Used by online hyperparameter learning.
    pub fn refit_kernel(&mut self, kernel: Kernel) -> Result<()> {
        self.posterior = GpPosterior::fit(
            kernel,
            self.posterior.training_inputs().to_vec(),
            self.posterior.training_targets().to_vec(),
            self.posterior.eta2(),
        )?;
        Ok(())
    }

    /// GP-UCB selection: argmax of `mu + sqrt(beta) sigma` over all
    /// candidates, ties to the lowest index.
    pub fn ucb_select(&self, beta: f64) -> Result<usize> {
        let root_beta = beta.max(0.0).sqrt();
        let mut best: Option<(usize, f64)> = None;
        for (i, cand) in self.candidates.iter().enumerate() {
            let (mu, sigma) = self.posterior.predict(cand)?;
            let score = mu + root_beta * sigma;
            if best.map(|(_, s)| score > s).unwrap_or(true) {
                best = Some((i, score));
            }
        }
        Ok(best.expect("nonempty candidates").0)
    }

    /// Elimination step: drop active candidates whose UCB falls below the
    /// best LCB, then pick the highest-variance survivor (ties to the lowest
    /// index). The LCB maximizer always survives, so the result is nonempty.
    pub fn maxvar_step(&self, beta: f64) -> Result<(usize, Vec<usize>)> {
        let root_beta = beta.max(0.0).sqrt();
        let mut stats = Vec::with_capacity(self.active.len());
        let mut best_lcb = f64::NEG_INFINITY;
        for &i in &self.active {
            let (mu, sigma) = self.posterior.predict(&self.candidates[i])?;
            best_lcb = best_lcb.max(mu - root_beta * sigma);
            stats.push((i, mu, sigma));
        }
        let mut survivors = Vec::with_capacity(stats.len());
        let mut pick: Option<(usize, f64)> = None;
        for &(i, mu, sigma) in &stats {
            if mu + root_beta * sigma >= best_lcb {
                survivors.push(i);
                if pick.map(|(_, s)| sigma > s).unwrap_or(true) {
                    pick = Some((i, sigma));
                }
            }
        }
        let (selected, _) = pick.ok_or_else(|| {
            Error::Numerical("elimination removed every candidate".into())
        })?;
        Ok((selected, survivors))
    }

    /// Select the next candidate index, updating the active set for the
    /// elimination rule.
    pub fn select(&mut self, beta: f64) -> Result<usize> {
        match self.algorithm {
            Algorithm::GpUcb => self.ucb_select(beta),
            Algorithm::MaxVarElim => {
                let (idx, survivors) = self.maxvar_step(beta)?;
                self.active = survivors;
                Ok(idx)
            }
        }
    }

    /// Fold one observation into the posterior and advance the round count.
    pub fn observe(&mut self, x: Vec<f64>, y: f64) -> Result<()> {
        self.posterior = self.posterior.extended(x, y)?;
        self.round += 1;
        Ok(())
    }
}
