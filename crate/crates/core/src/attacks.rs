//! Adversary-side perturbation policies, budget accounting, dynamic
//! hyperparameter adaptation, and the numerical attack-condition checks
//! with their budget bounds.
//!
//! Every policy turns the pair `(x_t, f(x_t))` into an additive corruption
//! `c_t`; the harness adds observation noise afterwards, so the adversary
//! never sees `z_t`.

use crate::algorithms::BetaSchedule;
use crate::bumps::{BumpProfile, BumpSpec, ConvolutionSide, ConvolvedBump};
use crate::objectives::{maximum_over_region_points, tensor_grid, Objective, TargetRegion};
use crate::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Whether the total corruption is capped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetMode {
    Unconstrained,
    Capped,
}

/// Running account of corruption spent, `sum |c_t|`.
#[derive(Debug, Clone)]
pub struct BudgetLedger {
    mode: BudgetMode,
    cap: f64,
    spent: f64,
}

impl BudgetLedger {
    pub fn unconstrained() -> Self {
        Self {
            mode: BudgetMode::Unconstrained,
            cap: f64::INFINITY,
            spent: 0.0,
        }
    }

    pub fn capped(cap: f64) -> Result<Self> {
        if !(cap >= 0.0) {
            return Err(Error::InvalidInput(format!("budget cap must be nonnegative, got {cap}")));
        }
        Ok(Self {
            mode: BudgetMode::Capped,
            cap,
            spent: 0.0,
        })
    }

    /// Apply a requested corruption, truncating its magnitude to the
    /// remaining budget when capped, and account for what was applied.
    pub fn gate(&mut self, c_requested: f64) -> f64 {
        let applied = match self.mode {
            BudgetMode::Unconstrained => c_requested,
            BudgetMode::Capped => {
                let remaining = (self.cap - self.spent).max(0.0);
                c_requested.signum() * c_requested.abs().min(remaining)
            }
        };
        self.spent += applied.abs();
        applied
    }

    pub fn spent(&self) -> f64 {
        self.spent
    }

    pub fn mode(&self) -> BudgetMode {
        self.mode
    }
}

/// Online adaptation of a scalar aggressiveness hyperparameter: shrink by a
/// fraction after `patience` consecutive in-target pulls, grow by the same
/// fraction on any out-of-target pull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicState {
    theta: f64,
    fraction: f64,
    patience: usize,
    streak: usize,
}

impl DynamicState {
    pub fn new(theta0: f64, fraction: f64, patience: usize) -> Result<Self> {
        if !(theta0 > 0.0) {
            return Err(Error::InvalidInput(format!("initial theta must be positive, got {theta0}")));
        }
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidInput(format!(
                "update fraction must lie in (0, 1), got {fraction}"
            )));
        }
        if patience == 0 {
            return Err(Error::InvalidInput("patience must be at least 1".into()));
        }
        Ok(Self {
            theta: theta0,
            fraction,
            patience,
            streak: 0,
        })
    }

    pub fn update(&mut self, pulled_in_target: bool) {
        if pulled_in_target {
            self.streak += 1;
            if self.streak >= self.patience {
                self.theta -= self.fraction * self.theta;
                self.streak = 0;
            }
        } else {
            self.streak = 0;
            self.theta += self.fraction * self.theta;
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn streak(&self) -> usize {
        self.streak
    }
}

#[derive(Debug, Clone)]
enum AttackVariant {
    None,
    Random {
        mean: f64,
        std: f64,
    },
    /// `f~ = min(f, clip_value - delta)` outside the region.
    Clipping {
        delta: f64,
        clip_value: f64,
    },
    /// `f~ = f - h_max * sum(scaled bumps)`; bump heights are unit scales.
    Subtraction {
        bumps: Vec<BumpSpec>,
        h_max: f64,
    },
    /// `f~ = f - h_max` outside the region.
    Aggressive {
        h_max: f64,
    },
    /// Aggressive with a continuous ramp across the region boundary; `ramp`
    /// has unit plateau on the region inset by the transition width.
    AggressiveTransition {
        h_max: f64,
        ramp: ConvolvedBump,
    },
}

/// An adversary policy: the variant's static shape plus optional dynamic
/// adaptation and the adversary's own random stream. Single-owner state
/// inside one run loop.
#[derive(Debug, Clone)]
pub struct AttackPolicy {
    variant: AttackVariant,
    dynamic: Option<DynamicState>,
    rng: Option<ChaCha8Rng>,
}

impl AttackPolicy {
    pub fn none() -> Self {
        Self {
            variant: AttackVariant::None,
            dynamic: None,
            rng: None,
        }
    }

    /// Gaussian baseline drawing from a dedicated adversary stream.
    pub fn random(mean: f64, std: f64, rng: ChaCha8Rng) -> Result<Self> {
        if !(std >= 0.0) {
            return Err(Error::InvalidInput(format!("sigma_a must be nonnegative, got {std}")));
        }
        Ok(Self {
            variant: AttackVariant::Random { mean, std },
            dynamic: None,
            rng: Some(rng),
        })
    }

    /// Clipping with a precomputed in-region reference value `f(x~*)`.
    pub fn clipping(delta: f64, clip_value: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidInput(format!("delta must be nonnegative, got {delta}")));
        }
        Ok(Self {
            variant: AttackVariant::Clipping { delta, clip_value },
            dynamic: None,
            rng: None,
        })
    }

    /// Clipping whose reference value is the objective's maximum over the
    /// supplied candidate points that fall inside the region, so player and
    /// attacker share one discretization.
    pub fn clipping_from_candidates(
        obj: &Objective,
        region: &TargetRegion,
        delta: f64,
        candidates: &[Vec<f64>],
    ) -> Result<Self> {
        let (_, clip_value) =
            maximum_over_region_points(obj, region, candidates.iter().map(|p| p.as_slice()))?;
        Self::clipping(delta, clip_value)
    }

    /// Subtraction built from `(center, width, height_scale)` triples; the
    /// realized bump height is `height_scale * h_max`. Supports must stay
    /// clear of the protected region.
    pub fn subtraction(
        profile: BumpProfile,
        bumps: Vec<BumpSpec>,
        h_max: f64,
        region: &TargetRegion,
    ) -> Result<Self> {
        if !(h_max >= 0.0) {
            return Err(Error::InvalidInput(format!("h_max must be nonnegative, got {h_max}")));
        }
        if bumps.is_empty() {
            return Err(Error::Config("subtraction needs at least one bump".into()));
        }
        let mut shaped = Vec::with_capacity(bumps.len());
        for b in bumps {
            let b = BumpSpec::new(b.center, b.width, b.height, profile)?;
            if b.support_intersects(region) {
                return Err(Error::Config(format!(
                    "bump at {:?} (width {}) overlaps the protected region",
                    b.center, b.width
                )));
            }
            shaped.push(b);
        }
        Ok(Self {
            variant: AttackVariant::Subtraction { bumps: shaped, h_max },
            dynamic: None,
            rng: None,
        })
    }

    pub fn aggressive(h_max: f64) -> Result<Self> {
        if !(h_max >= 0.0) {
            return Err(Error::InvalidInput(format!("h_max must be nonnegative, got {h_max}")));
        }
        Ok(Self {
            variant: AttackVariant::Aggressive { h_max },
            dynamic: None,
            rng: None,
        })
    }

    /// Aggressive with a transition band of the given width just inside the
    /// region boundary.
    pub fn aggressive_transition(
        h_max: f64,
        transition_w: f64,
        region: &TargetRegion,
    ) -> Result<Self> {
        if !(h_max >= 0.0) {
            return Err(Error::InvalidInput(format!("h_max must be nonnegative, got {h_max}")));
        }
        let inner = region.shrunk(transition_w).map_err(|_| {
            Error::Config(format!(
                "transition width {transition_w} too large for region extents {:?}",
                region.lengths()
            ))
        })?;
        let ramp = ConvolvedBump::new(inner, transition_w, 1.0, ConvolutionSide::Inside)
            .map_err(|e| Error::Config(format!("transition ramp construction failed: {e}")))?;
        Ok(Self {
            variant: AttackVariant::AggressiveTransition { h_max, ramp },
            dynamic: None,
            rng: None,
        })
    }

    /// Enable dynamic adaptation of the policy's scalar hyperparameter
    /// (clipping delta or subtraction peak), seeded from its current value.
    pub fn with_dynamic(mut self, fraction: f64, patience: usize) -> Result<Self> {
        let theta0 = match &self.variant {
            AttackVariant::Clipping { delta, .. } => *delta,
            AttackVariant::Subtraction { h_max, .. }
            | AttackVariant::Aggressive { h_max }
            | AttackVariant::AggressiveTransition { h_max, .. } => *h_max,
            AttackVariant::None | AttackVariant::Random { .. } => {
                return Err(Error::Config(
                    "dynamic adaptation needs an attack with a scalar aggressiveness".into(),
                ))
            }
        };
        self.dynamic = Some(DynamicState::new(theta0, fraction, patience)?);
        Ok(self)
    }

    /// Current scalar aggressiveness: the dynamic value when enabled,
    /// otherwise the configured constant.
    pub fn aggressiveness(&self) -> f64 {
        if let Some(d) = &self.dynamic {
            return d.theta();
        }
        match &self.variant {
            AttackVariant::Clipping { delta, .. } => *delta,
            AttackVariant::Subtraction { h_max, .. }
            | AttackVariant::Aggressive { h_max }
            | AttackVariant::AggressiveTransition { h_max, .. } => *h_max,
            AttackVariant::None | AttackVariant::Random { .. } => 0.0,
        }
    }

    pub fn dynamic(&self) -> Option<&DynamicState> {
        self.dynamic.as_ref()
    }

    /// Whether the corruption at a point is a deterministic function of
    /// `(x, f(x))`; false only for the random baseline.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self.variant, AttackVariant::Random { .. })
    }

    /// Corruption requested at the queried point, before budget gating.
    pub fn perturbation(&mut self, region: &TargetRegion, x: &[f64], f_x: f64) -> f64 {
        if let AttackVariant::Random { mean, std } = self.variant {
            let rng = self.rng.as_mut().expect("random policy carries its stream");
            let u: f64 = StandardNormal.sample(rng);
            return mean + std * u;
        }
        self.deterministic_shift(region, x, f_x)
            .expect("non-random variants are deterministic")
    }

    /// Deterministic corruption for the non-random variants, usable for
    /// whole-grid condition checks without touching any random stream.
    pub fn deterministic_shift(&self, region: &TargetRegion, x: &[f64], f_x: f64) -> Option<f64> {
        let theta = self.aggressiveness();
        match &self.variant {
            AttackVariant::None => Some(0.0),
            AttackVariant::Random { .. } => None,
            AttackVariant::Clipping { clip_value, .. } => {
                if region.contains(x) {
                    Some(0.0)
                } else {
                    Some(((clip_value - theta) - f_x).min(0.0))
                }
            }
            AttackVariant::Subtraction { bumps, .. } => {
                let total: f64 = bumps.iter().map(|b| b.eval(x)).sum();
                Some(-(theta * total))
            }
            AttackVariant::Aggressive { .. } => {
                if region.contains(x) {
                    Some(0.0)
                } else {
                    Some(-theta)
                }
            }
            AttackVariant::AggressiveTransition { ramp, .. } => {
                Some(-(theta * (1.0 - ramp.eval(x))))
            }
        }
    }

    /// Fold the player's latest pull into the dynamic state, if enabled.
    pub fn update_dynamic(&mut self, pulled_in_target: bool) {
        if let Some(d) = &mut self.dynamic {
            d.update(pulled_in_target);
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match &self.variant {
            AttackVariant::None => "none",
            AttackVariant::Random { .. } => "random",
            AttackVariant::Clipping { .. } => "clipping",
            AttackVariant::Subtraction { bumps, .. } => match bumps[0].profile {
                BumpProfile::SmoothBump => "subtraction_rnd",
                BumpProfile::Indicator => "subtraction_sq",
            },
            AttackVariant::Aggressive { .. } => "aggressive",
            AttackVariant::AggressiveTransition { .. } => "aggressive_transition",
        }
    }
}

/// Clipping policy whose reference value comes from a fresh tensor grid
/// intersected with the region.
pub fn build_clipping_policy(
    obj: &Objective,
    region: &TargetRegion,
    delta: f64,
    resolution: &[usize],
) -> Result<AttackPolicy> {
    let grid = tensor_grid(obj.domain(), resolution)?;
    AttackPolicy::clipping_from_candidates(obj, region, delta, &grid)
}

/// Numerical report on the sufficient attack conditions over aligned grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// Every `delta`-optimal point of the perturbed function lies in the
    /// region and is unperturbed there.
    pub holds_i: bool,
    /// Worst-case suboptimality margin of out-of-region points under the
    /// perturbed function (positive means all are suboptimal by that much).
    pub holds_ii_gap: f64,
    /// Largest pointwise perturbation magnitude.
    pub b0: f64,
}

/// Check the sufficient conditions on aligned grids of the original and
/// perturbed function values.
pub fn verify_attack_conditions(
    f: &[f64],
    f_tilde: &[f64],
    in_region: &[bool],
    delta: f64,
) -> ConditionReport {
    assert!(
        f.len() == f_tilde.len() && f.len() == in_region.len() && !f.is_empty(),
        "grids must be aligned and nonempty"
    );
    let max_tilde = f_tilde.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut holds_i = true;
    let mut gap = f64::INFINITY;
    let mut b0 = 0.0f64;
    for i in 0..f.len() {
        let perturbation = (f[i] - f_tilde[i]).abs();
        b0 = b0.max(perturbation);
        if f_tilde[i] >= max_tilde - delta && (!in_region[i] || perturbation > 1e-9) {
            holds_i = false;
        }
        if !in_region[i] {
            gap = gap.min(max_tilde - f_tilde[i]);
        }
    }
    ConditionReport {
        holds_i,
        holds_ii_gap: gap,
        b0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Bound for the confidence-bound player; uses the horizon's beta.
    Ucb,
    /// Bound for the elimination player; uses the per-round beta.
    Elim,
}

/// Budget bound derived from the count of suboptimal pulls a non-robust
/// player can make.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetBound {
    pub c1: f64,
    pub n_max: usize,
    /// `b0 * n_max`.
    pub budget: f64,
}

/// Largest `N <= horizon` satisfying the suboptimal-pull inequality, scaled
/// by the per-pull ceiling `b0`. `gamma(t)` supplies the information-gain
/// curve with `gamma(0) = 0`.
pub fn corollary_budget_bound(
    delta: f64,
    horizon: usize,
    b0: f64,
    schedule: &BetaSchedule,
    gamma: &dyn Fn(usize) -> f64,
    lambda: f64,
    which: BoundKind,
) -> Result<BudgetBound> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    let c1 = (8.0 / lambda) / (1.0 + 1.0 / lambda).ln();
    let beta_horizon = schedule.value(horizon, gamma(horizon - 1))?;
    let mut n_max = 0usize;
    for n in 1..=horizon {
        let threshold = match which {
            BoundKind::Ucb => c1 * gamma(n) * beta_horizon / (delta * delta),
            BoundKind::Elim => {
                let beta_n = schedule.value(n, gamma(n - 1))?;
                4.0 * c1 * gamma(n) * beta_n / (delta * delta)
            }
        };
        if (n as f64) <= threshold {
            n_max = n;
        }
    }
    Ok(BudgetBound {
        c1,
        n_max,
        budget: b0 * n_max as f64,
    })
}
