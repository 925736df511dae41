//! Experiment configuration: a flat key-value text format with dotted
//! section keys, plus the sweep specification.
//!
//! Example:
//!
//! ```text
//! objective = synthetic1d
//! attack.variant = clipping
//! attack.delta = 17.8
//! kernel.family = matern52
//! seed = 7
//! ```
//!
//! Unknown keys are errors. `#` starts a comment.

use crate::algorithms::Algorithm;
use crate::attacks::BudgetMode;
use crate::kernels::KernelFamily;
use crate::{Error, Result};

/// How the player's kernel hyperparameters are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMode {
    /// Fit once on clean samples drawn before the run.
    Offline,
    /// Refit every round on the (possibly corrupted) observations.
    Online,
    /// Use the configured values as-is.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaKind {
    Practical,
    Theory,
    Defense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    None,
    Random,
    Clipping,
    SubtractionRnd,
    SubtractionSq,
    Aggressive,
    AggressiveTransition,
}

impl AttackKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "random" => Ok(Self::Random),
            "clipping" => Ok(Self::Clipping),
            "subtraction_rnd" => Ok(Self::SubtractionRnd),
            "subtraction_sq" => Ok(Self::SubtractionSq),
            "aggressive" => Ok(Self::Aggressive),
            "aggressive_transition" => Ok(Self::AggressiveTransition),
            other => Err(Error::Config(format!("unknown attack variant `{other}`"))),
        }
    }
}

/// One subtraction bump: center coordinates, support width, and the height
/// as a fraction of the attack's peak.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpConfig {
    pub center: Vec<f64>,
    pub width: f64,
    pub height_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackSettings {
    pub kind: AttackKind,
    pub delta: f64,
    pub h_max: f64,
    pub mu_a: f64,
    pub sigma_a: f64,
    pub transition_w: f64,
    pub bumps: Vec<BumpConfig>,
}

impl Default for AttackSettings {
    fn default() -> Self {
        Self {
            kind: AttackKind::None,
            delta: 0.0,
            h_max: 0.0,
            mu_a: 0.0,
            sigma_a: 0.0,
            transition_w: 0.0,
            bumps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicSettings {
    pub enabled: bool,
    pub fraction: f64,
    pub patience: usize,
}

impl Default for DynamicSettings {
    fn default() -> Self {
        Self {
            enabled: false,
            fraction: 0.1,
            patience: 3,
        }
    }
}

/// Full description of one reproducible run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: String,
    pub region_centroid: Option<Vec<f64>>,
    pub region_lengths: Option<Vec<f64>>,
    pub kernel_family: KernelFamily,
    pub fit_mode: FitMode,
    pub fixed_lengthscale: f64,
    pub fixed_signal_variance: f64,
    pub noise_sigma: f64,
    pub eta2: f64,
    pub algorithm: Algorithm,
    pub beta_kind: BetaKind,
    pub defense_c: f64,
    pub theory_b: f64,
    pub lambda: f64,
    pub delta_prob: f64,
    pub attack: AttackSettings,
    pub budget_mode: BudgetMode,
    pub budget_cap: f64,
    pub dynamic: DynamicSettings,
    pub n_init: Option<usize>,
    pub horizon: Option<usize>,
    pub grid_points: Option<usize>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            objective: "synthetic1d".into(),
            region_centroid: None,
            region_lengths: None,
            kernel_family: KernelFamily::Matern52,
            fit_mode: FitMode::Offline,
            fixed_lengthscale: 1.0,
            fixed_signal_variance: 1.0,
            noise_sigma: 0.01,
            eta2: 1e-4,
            algorithm: Algorithm::GpUcb,
            beta_kind: BetaKind::Practical,
            defense_c: 0.0,
            theory_b: 1.0,
            lambda: 1.0,
            delta_prob: 0.1,
            attack: AttackSettings::default(),
            budget_mode: BudgetMode::Unconstrained,
            budget_cap: f64::INFINITY,
            dynamic: DynamicSettings::default(),
            n_init: None,
            horizon: None,
            grid_points: None,
            seed: 0,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a nonnegative integer")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(Error::Config(format!("key `{key}`: `{other}` is not a boolean"))),
    }
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_f64(key, s))
        .collect::<Result<Vec<f64>>>()
        .and_then(|xs| {
            if xs.is_empty() {
                Err(Error::Config(format!("key `{key}`: empty list")))
            } else {
                Ok(xs)
            }
        })
}

/// Bump list syntax: semicolon-separated bumps, each a comma-separated
/// number list `c_0,..,c_{d-1},width,height_scale`.
fn parse_bumps(v: &str) -> Result<Vec<BumpConfig>> {
    let mut out = Vec::new();
    for part in v.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let nums = parse_f64_list("attack.bumps", part)?;
        if nums.len() < 3 {
            return Err(Error::Config(
                "each bump needs center coordinates, a width, and a height scale".into(),
            ));
        }
        let (center, rest) = nums.split_at(nums.len() - 2);
        out.push(BumpConfig {
            center: center.to_vec(),
            width: rest[0],
            height_scale: rest[1],
        });
    }
    if out.is_empty() {
        return Err(Error::Config("attack.bumps: empty bump list".into()));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Assign one dotted key. Shared by the file parser and sweep overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "objective" => self.objective = value.to_string(),
            "region.centroid" => self.region_centroid = Some(parse_f64_list(key, value)?),
            "region.lengths" => self.region_lengths = Some(parse_f64_list(key, value)?),
            "kernel.family" => self.kernel_family = KernelFamily::parse(value)?,
            "kernel.fit" => {
                self.fit_mode = match value {
                    "offline" => FitMode::Offline,
                    "online" => FitMode::Online,
                    "fixed" => FitMode::Fixed,
                    other => return Err(Error::Config(format!("unknown fit mode `{other}`"))),
                }
            }
            "kernel.lengthscale" => self.fixed_lengthscale = parse_f64(key, value)?,
            "kernel.signal_variance" => self.fixed_signal_variance = parse_f64(key, value)?,
            "noise.sigma" => self.noise_sigma = parse_f64(key, value)?,
            "model.eta2" => self.eta2 = parse_f64(key, value)?,
            "algorithm" => self.algorithm = Algorithm::parse(value)?,
            "beta" => {
                self.beta_kind = match value {
                    "practical" => BetaKind::Practical,
                    "theory" => BetaKind::Theory,
                    "defense" => BetaKind::Defense,
                    other => return Err(Error::Config(format!("unknown beta schedule `{other}`"))),
                }
            }
            "beta.defense_c" => self.defense_c = parse_f64(key, value)?,
            "beta.b" => self.theory_b = parse_f64(key, value)?,
            "beta.lambda" => self.lambda = parse_f64(key, value)?,
            "beta.delta" => self.delta_prob = parse_f64(key, value)?,
            "attack.variant" => self.attack.kind = AttackKind::parse(value)?,
            "attack.delta" => self.attack.delta = parse_f64(key, value)?,
            "attack.h_max" => self.attack.h_max = parse_f64(key, value)?,
            "attack.mu_a" => self.attack.mu_a = parse_f64(key, value)?,
            "attack.sigma_a" => self.attack.sigma_a = parse_f64(key, value)?,
            "attack.transition_w" => self.attack.transition_w = parse_f64(key, value)?,
            "attack.bumps" => self.attack.bumps = parse_bumps(value)?,
            "budget.mode" => {
                self.budget_mode = match value {
                    "unconstrained" => BudgetMode::Unconstrained,
                    "capped" => BudgetMode::Capped,
                    other => return Err(Error::Config(format!("unknown budget mode `{other}`"))),
                }
            }
            "budget.cap" => self.budget_cap = parse_f64(key, value)?,
            "dynamic.enabled" => self.dynamic.enabled = parse_bool(key, value)?,
            "dynamic.f" => self.dynamic.fraction = parse_f64(key, value)?,
            "dynamic.k" => self.dynamic.patience = parse_usize(key, value)?,
            "n_init" => self.n_init = Some(parse_usize(key, value)?),
            "horizon" => self.horizon = Some(parse_usize(key, value)?),
            "grid.points" => self.grid_points = Some(parse_usize(key, value)?),
            "seed" => {
                self.seed = value
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("key `seed`: `{value}` is not a u64")))?
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            cfg.set(key.trim(), value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_string(),
            source,
        })?;
        Self::parse_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.horizon {
            if t == 0 {
                return Err(Error::Config("horizon must be at least 1".into()));
            }
        }
        if let Some(n) = self.n_init {
            if n == 0 {
                return Err(Error::Config("n_init must be at least 1".into()));
            }
        }
        if self.noise_sigma < 0.0 || self.eta2 < 0.0 {
            return Err(Error::Config("noise parameters must be nonnegative".into()));
        }
        match (&self.region_centroid, &self.region_lengths) {
            (Some(c), Some(l)) if c.len() != l.len() => {
                return Err(Error::Config("region centroid/lengths dimension mismatch".into()))
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::Config(
                    "region override needs both region.centroid and region.lengths".into(),
                ))
            }
            _ => {}
        }
        Ok(())
    }

    /// Initial uniform draws: 10 in low dimension, 50 otherwise.
    pub fn effective_n_init(&self, dim: usize) -> usize {
        self.n_init.unwrap_or(if dim <= 2 { 10 } else { 50 })
    }

    /// Optimization rounds: 100 in low dimension, 250 otherwise.
    pub fn effective_horizon(&self, dim: usize) -> usize {
        self.horizon.unwrap_or(if dim <= 2 { 100 } else { 250 })
    }

    /// Candidate-set size: per-dimension count for tensor grids in one or
    /// two dimensions, total count of uniform draws above that.
    pub fn effective_grid_points(&self, dim: usize) -> usize {
        self.grid_points.unwrap_or(match dim {
            1 => 512,
            2 => 64,
            _ => 4096,
        })
    }
}

/// A hyperparameter-axis sweep: the base config, the dotted key to vary,
/// its values, and the seeds each value is run under.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    pub param: String,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl SweepSpec {
    pub fn new(base: ExperimentConfig, param: &str, values: Vec<f64>, seeds: Vec<u64>) -> Result<Self> {
        if values.is_empty() || seeds.is_empty() {
            return Err(Error::Config("sweep needs at least one value and one seed".into()));
        }
        // Reject unknown parameter keys up front.
        let mut probe = base.clone();
        probe.set(param, &format!("{}", values[0]))?;
        Ok(Self {
            base,
            param: param.to_string(),
            values,
            seeds,
        })
    }

    /// Config for one sweep cell.
    pub fn cell_config(&self, theta: f64, seed: u64) -> Result<ExperimentConfig> {
        let mut cfg = self.base.clone();
        cfg.set(&self.param, &format!("{theta}"))?;
        cfg.seed = seed;
        Ok(cfg)
    }
}
