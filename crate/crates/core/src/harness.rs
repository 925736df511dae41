//! The corrupted bandit game loop, offline/online kernel fitting, and
//! hyperparameter sweeps.
//!
//! Every run is deterministic given its config and seed: each stochastic
//! component (initial points, observation noise, the adversary's draws,
//! candidate sampling, fit-pool sampling) owns a separate counter-mode
//! stream derived from the seed, so unused components never perturb the
//! others.

use crate::algorithms::{BetaSchedule, GreedyInfoGain, PlayerState};
use crate::attacks::{AttackPolicy, BudgetLedger, BudgetMode};
use crate::bumps::{BumpProfile, BumpSpec};
use crate::config::{AttackKind, BetaKind, ExperimentConfig, FitMode, SweepSpec};
use crate::gp::{fit_hyperparameters, SearchBudget};
use crate::kernels::Kernel;
use crate::metrics::{
    cumulative_regret, efficient_hyperparameter, normalized_cost, success_rate,
    HyperparameterResult, RunTrace, TraceStep,
};
use crate::objectives::{tensor_grid, Objective, TargetRegion};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

const STREAM_INIT: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_ADVERSARY: u64 = 3;
const STREAM_CANDIDATES: u64 = 4;
const STREAM_FIT_POOL: u64 = 5;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Resolve the configured objective, applying any region override.
pub fn objective_from_config(cfg: &ExperimentConfig) -> Result<Objective> {
    let obj = Objective::by_name(&cfg.objective)?;
    match (&cfg.region_centroid, &cfg.region_lengths) {
        (Some(c), Some(l)) => obj.with_region(TargetRegion::new(c.clone(), l.clone())?),
        _ => Ok(obj),
    }
}

/// Candidate set shared by the player and the attacker: an inclusive tensor
/// grid in one or two dimensions, seeded uniform draws above that.
pub fn build_candidates(cfg: &ExperimentConfig, obj: &Objective) -> Result<Vec<Vec<f64>>> {
    let dim = obj.dim();
    let n = cfg.effective_grid_points(dim);
    if n == 0 {
        return Err(Error::Config("grid.points must be positive".into()));
    }
    if dim <= 2 {
        tensor_grid(obj.domain(), &vec![n; dim])
    } else {
        let mut rng = stream(cfg.seed, STREAM_CANDIDATES);
        Ok((0..n)
            .map(|_| {
                obj.domain()
                    .iter()
                    .map(|&(lo, hi)| rng.random_range(lo..=hi))
                    .collect()
            })
            .collect())
    }
}

pub fn beta_schedule(cfg: &ExperimentConfig) -> BetaSchedule {
    match cfg.beta_kind {
        BetaKind::Practical => BetaSchedule::Practical,
        BetaKind::Defense => BetaSchedule::Defense { c: cfg.defense_c },
        BetaKind::Theory => BetaSchedule::Theory {
            rkhs_bound: cfg.theory_b,
            noise_std: cfg.noise_sigma,
            lambda: cfg.lambda,
            delta: cfg.delta_prob,
        },
    }
}

/// Build the configured attack against the given objective and candidate
/// set, wiring in the adversary's stream and dynamic adaptation.
pub fn build_attack_policy(
    cfg: &ExperimentConfig,
    obj: &Objective,
    region: &TargetRegion,
    candidates: &[Vec<f64>],
) -> Result<AttackPolicy> {
    let a = &cfg.attack;
    let policy = match a.kind {
        AttackKind::None => AttackPolicy::none(),
        AttackKind::Random => {
            AttackPolicy::random(a.mu_a, a.sigma_a, stream(cfg.seed, STREAM_ADVERSARY))?
        }
        AttackKind::Clipping => {
            AttackPolicy::clipping_from_candidates(obj, region, a.delta, candidates)?
        }
        AttackKind::SubtractionRnd | AttackKind::SubtractionSq => {
            let profile = if a.kind == AttackKind::SubtractionRnd {
                BumpProfile::SmoothBump
            } else {
                BumpProfile::Indicator
            };
            let bumps = a
                .bumps
                .iter()
                .map(|b| BumpSpec::new(b.center.clone(), b.width, b.height_scale, profile))
                .collect::<Result<Vec<_>>>()?;
            AttackPolicy::subtraction(profile, bumps, a.h_max, region)?
        }
        AttackKind::Aggressive => AttackPolicy::aggressive(a.h_max)?,
        AttackKind::AggressiveTransition => {
            AttackPolicy::aggressive_transition(a.h_max, a.transition_w, region)?
        }
    };
    if cfg.dynamic.enabled {
        policy.with_dynamic(cfg.dynamic.fraction, cfg.dynamic.patience)
    } else {
        Ok(policy)
    }
}

/// Offline protocol: fit hyperparameters on clean function samples drawn
/// before the run. Low dimensions take 100 points off an even grid; higher
/// dimensions take 500 grid points plus 500 unconstrained uniform draws.
fn offline_fit(cfg: &ExperimentConfig, obj: &Objective) -> Result<Kernel> {
    let dim = obj.dim();
    let mut rng = stream(cfg.seed, STREAM_FIT_POOL);
    let pool_resolution: Vec<usize> = match dim {
        1 => vec![4097],
        2 => vec![257, 257],
        d => vec![6; d],
    };
    let pool = tensor_grid(obj.domain(), &pool_resolution)?;
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let grid_count = if dim <= 2 { 100 } else { 500 };
    let picks = rand::seq::index::sample(&mut rng, pool.len(), grid_count.min(pool.len()));
    for i in picks.iter() {
        xs.push(pool[i].clone());
    }
    if dim > 2 {
        for _ in 0..500 {
            xs.push(
                obj.domain()
                    .iter()
                    .map(|&(lo, hi)| rng.random_range(lo..=hi))
                    .collect(),
            );
        }
    }
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| obj.eval(x))
        .collect::<Result<Vec<f64>>>()?;
    let budget = SearchBudget::for_domain(obj.domain_diagonal(), &ys);
    fit_hyperparameters(cfg.kernel_family, &xs, &ys, cfg.eta2, &budget)
}

/// Refit hyperparameters on whatever the player has observed so far.
fn online_refit(cfg: &ExperimentConfig, obj: &Objective, player: &mut PlayerState) -> Result<()> {
    let xs = player.posterior().training_inputs();
    let ys = player.posterior().training_targets();
    if xs.len() < 2 {
        return Ok(());
    }
    let budget = SearchBudget::for_domain(obj.domain_diagonal(), ys);
    let kernel = fit_hyperparameters(cfg.kernel_family, xs, ys, cfg.eta2, &budget)?;
    player.refit_kernel(kernel)
}

fn at_round<T>(r: Result<T>, t: usize) -> Result<T> {
    r.map_err(|e| match e {
        Error::Numerical(msg) => Error::Numerical(format!("round {t}: {msg}")),
        other => other,
    })
}

/// Play one full corrupted run: seeded initial draws observed through the
/// attack-plus-noise channel, kernel setup per the fit mode, then the
/// select/perturb/observe loop. Bit-identical traces for identical configs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let obj = objective_from_config(cfg)?;
    let dim = obj.dim();
    let region = obj.region().clone();
    let n_init = cfg.effective_n_init(dim);
    let horizon = cfg.effective_horizon(dim);

    let candidates = build_candidates(cfg, &obj)?;
    let mut policy = build_attack_policy(cfg, &obj, &region, &candidates)?;
    let mut ledger = match cfg.budget_mode {
        BudgetMode::Unconstrained => BudgetLedger::unconstrained(),
        BudgetMode::Capped => BudgetLedger::capped(cfg.budget_cap)?,
    };

    let kernel = match cfg.fit_mode {
        FitMode::Fixed => Kernel::new(
            cfg.kernel_family,
            cfg.fixed_lengthscale,
            cfg.fixed_signal_variance,
        )?,
        FitMode::Offline => offline_fit(cfg, &obj)?,
        // Placeholder until the initial observations are in.
        FitMode::Online => Kernel::new(cfg.kernel_family, obj.domain_diagonal() / 10.0, 1.0)?,
    };
    let mut player = PlayerState::new(cfg.algorithm, kernel, cfg.eta2, candidates)?;

    let mut init_rng = stream(cfg.seed, STREAM_INIT);
    let mut noise_rng = stream(cfg.seed, STREAM_NOISE);
    let mut steps: Vec<TraceStep> = Vec::with_capacity(n_init + horizon);

    let channel = |x: Vec<f64>,
                       t: usize,
                       player: &mut PlayerState,
                       policy: &mut AttackPolicy,
                       ledger: &mut BudgetLedger,
                       noise_rng: &mut ChaCha8Rng,
                       steps: &mut Vec<TraceStep>|
     -> Result<bool> {
        let f_x = obj.eval(&x)?;
        let c = ledger.gate(policy.perturbation(&region, &x, f_x));
        let u: f64 = StandardNormal.sample(noise_rng);
        let z = cfg.noise_sigma * u;
        let y = f_x + c + z;
        let in_target = region.contains(&x);
        at_round(player.observe(x.clone(), y), t)?;
        steps.push(TraceStep {
            t,
            x,
            f_x,
            c,
            z,
            y,
            in_target,
        });
        Ok(in_target)
    };

    for i in 0..n_init {
        let x: Vec<f64> = obj
            .domain()
            .iter()
            .map(|&(lo, hi)| init_rng.random_range(lo..=hi))
            .collect();
        channel(x, i + 1, &mut player, &mut policy, &mut ledger, &mut noise_rng, &mut steps)?;
    }

    if cfg.fit_mode == FitMode::Online {
        at_round(online_refit(cfg, &obj, &mut player), n_init)?;
    }

    let schedule = beta_schedule(cfg);
    let mut info_gain = if cfg.beta_kind == BetaKind::Theory {
        Some(GreedyInfoGain::new(
            *player.posterior().kernel(),
            player.candidates().to_vec(),
            cfg.lambda,
        )?)
    } else {
        None
    };

    for t in 1..=horizon {
        let gamma_prev = match &mut info_gain {
            Some(g) => at_round(g.value_at((t - 1).min(player.candidates().len())), t)?,
            None => 0.0,
        };
        let beta = schedule.value(t, gamma_prev)?;
        let idx = at_round(player.select(beta), t)?;
        let x = player.candidates()[idx].clone();
        let in_target = channel(
            x,
            n_init + t,
            &mut player,
            &mut policy,
            &mut ledger,
            &mut noise_rng,
            &mut steps,
        )?;
        policy.update_dynamic(in_target);
        if cfg.fit_mode == FitMode::Online {
            at_round(online_refit(cfg, &obj, &mut player), t)?;
        }
    }

    Ok(RunTrace {
        run_id: format!("{}-s{}", cfg.objective, cfg.seed),
        steps,
        f_min: obj.f_min(),
        f_max: obj.f_max(),
        f_star: obj.f_star(),
    })
}

/// End-of-run measurements for one sweep cell; `error` is set and the
/// metrics are NaN when the run failed.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub theta: f64,
    pub seed: u64,
    pub success_rate: f64,
    pub normalized_cost: f64,
    pub regret: f64,
    pub error: Option<String>,
}

/// Seed-averaged measurements for one hyperparameter value.
#[derive(Debug, Clone, Copy)]
pub struct ThetaSummary {
    pub theta: f64,
    pub success_rate: f64,
    pub normalized_cost: f64,
    pub regret: f64,
    pub runs_ok: usize,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub cells: Vec<SweepCell>,
    pub averages: Vec<ThetaSummary>,
    pub efficient_theta: Option<f64>,
}

/// Run every `(theta, seed)` cell (concurrently; results are keyed, so the
/// schedule does not matter), average per theta, and pick the most
/// efficient hyperparameter. Individual failures are recorded per cell and
/// never abort the sweep.
pub fn run_sweep(spec: &SweepSpec) -> SweepSummary {
    let mut jobs: Vec<(f64, u64)> = Vec::new();
    for &theta in &spec.values {
        for &seed in &spec.seeds {
            jobs.push((theta, seed));
        }
    }
    let cells: Vec<SweepCell> = jobs
        .par_iter()
        .map(|&(theta, seed)| {
            let outcome = spec
                .cell_config(theta, seed)
                .and_then(|cfg| run_experiment(&cfg))
                .and_then(|trace| {
                    let t = trace.len();
                    Ok((
                        success_rate(&trace, t)?,
                        normalized_cost(&trace, t)?,
                        cumulative_regret(&trace, t),
                    ))
                });
            match outcome {
                Ok((sr, cost, regret)) => SweepCell {
                    theta,
                    seed,
                    success_rate: sr,
                    normalized_cost: cost,
                    regret,
                    error: None,
                },
                Err(e) => SweepCell {
                    theta,
                    seed,
                    success_rate: f64::NAN,
                    normalized_cost: f64::NAN,
                    regret: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let mut averages = Vec::with_capacity(spec.values.len());
    for &theta in &spec.values {
        let ok: Vec<&SweepCell> = cells
            .iter()
            .filter(|c| c.theta == theta && c.error.is_none())
            .collect();
        let n = ok.len();
        if n == 0 {
            averages.push(ThetaSummary {
                theta,
                success_rate: f64::NAN,
                normalized_cost: f64::NAN,
                regret: f64::NAN,
                runs_ok: 0,
            });
            continue;
        }
        let mean = |f: fn(&SweepCell) -> f64| ok.iter().map(|c| f(c)).sum::<f64>() / n as f64;
        averages.push(ThetaSummary {
            theta,
            success_rate: mean(|c| c.success_rate),
            normalized_cost: mean(|c| c.normalized_cost),
            regret: mean(|c| c.regret),
            runs_ok: n,
        });
    }

    let entries: Vec<HyperparameterResult> = averages
        .iter()
        .filter(|a| a.runs_ok > 0)
        .map(|a| HyperparameterResult {
            theta: a.theta,
            success_rate: a.success_rate,
            normalized_cost: a.normalized_cost,
        })
        .collect();
    let efficient_theta = efficient_hyperparameter(&entries).ok();

    SweepSummary {
        cells,
        averages,
        efficient_theta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.objective = "synthetic1d".into();
        cfg.n_init = Some(4);
        cfg.horizon = Some(6);
        cfg.grid_points = Some(65);
        cfg.fit_mode = FitMode::Fixed;
        cfg.fixed_lengthscale = 0.15;
        cfg.fixed_signal_variance = 60.0;
        cfg.seed = 11;
        cfg
    }

    #[test]
    fn clean_noiseless_run_observes_exact_values() {
        let mut cfg = quick_config();
        cfg.noise_sigma = 0.0;
        let trace = run_experiment(&cfg).unwrap();
        assert_eq!(trace.len(), 10);
        for s in &trace.steps {
            assert_eq!(s.c, 0.0);
            assert_eq!(s.z, 0.0);
            assert_eq!(s.y, s.f_x);
        }
    }

    #[test]
    fn identical_configs_give_identical_traces() {
        let cfg = quick_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trace_respects_the_observation_identity() {
        let mut cfg = quick_config();
        cfg.attack.kind = AttackKind::Aggressive;
        cfg.attack.h_max = 5.0;
        let trace = run_experiment(&cfg).unwrap();
        for s in &trace.steps {
            assert_eq!(s.y, s.f_x + s.c + s.z);
            assert_eq!(s.in_target, s.c == 0.0);
        }
    }

    #[test]
    fn unused_adversary_parameters_do_not_shift_the_trace() {
        // The noise and init streams are independent of the adversary
        // stream, so an inert attack config leaves the trace untouched.
        let mut a = quick_config();
        a.attack.kind = AttackKind::None;
        a.attack.mu_a = 0.0;
        a.attack.sigma_a = 0.0;
        let mut b = a.clone();
        b.attack.mu_a = 99.0;
        b.attack.sigma_a = 3.0;
        assert_eq!(run_experiment(&a).unwrap(), run_experiment(&b).unwrap());
    }

    #[test]
    fn aggressive_cost_accounting_is_exact() {
        let mut cfg = quick_config();
        cfg.horizon = Some(20);
        cfg.attack.kind = AttackKind::Aggressive;
        cfg.attack.h_max = 19.0;
        let trace = run_experiment(&cfg).unwrap();
        let t = trace.len();
        let misses = trace.steps.iter().filter(|s| !s.in_target).count();
        let cost = normalized_cost(&trace, t).unwrap() * (trace.f_max - trace.f_min);
        assert!((cost - 19.0 * misses as f64).abs() < 1e-9, "{cost} vs {misses}");
    }

    #[test]
    fn capped_budget_is_respected_end_to_end() {
        let mut cfg = quick_config();
        cfg.attack.kind = AttackKind::Aggressive;
        cfg.attack.h_max = 10.0;
        cfg.budget_mode = BudgetMode::Capped;
        cfg.budget_cap = 25.0;
        let trace = run_experiment(&cfg).unwrap();
        let total: f64 = trace.steps.iter().map(|s| s.c.abs()).sum();
        assert!(total <= 25.0 + 1e-9, "{total}");
    }

    #[test]
    fn online_refits_interpolate_clean_observations() {
        let mut cfg = quick_config();
        cfg.fit_mode = FitMode::Online;
        cfg.noise_sigma = 0.0;
        cfg.eta2 = 0.0;
        cfg.n_init = Some(5);
        cfg.horizon = Some(5);
        let trace = run_experiment(&cfg).unwrap();
        // Rebuild the final posterior exactly as the run left it.
        let obj = objective_from_config(&cfg).unwrap();
        let xs: Vec<Vec<f64>> = trace.steps.iter().map(|s| s.x.clone()).collect();
        let ys: Vec<f64> = trace.steps.iter().map(|s| s.y).collect();
        let budget = SearchBudget::for_domain(obj.domain_diagonal(), &ys);
        let kernel =
            fit_hyperparameters(cfg.kernel_family, &xs, &ys, cfg.eta2, &budget).unwrap();
        let post = crate::gp::GpPosterior::fit(kernel, xs.clone(), ys.clone(), 0.0).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            let (mu, _) = post.predict(x).unwrap();
            assert!((mu - y).abs() < 1e-4, "mean {mu} vs target {y}");
        }
    }

    #[test]
    fn sweep_single_cell_matches_a_direct_run() {
        let mut base = quick_config();
        base.attack.kind = AttackKind::Aggressive;
        let spec = SweepSpec::new(base.clone(), "attack.h_max", vec![7.0], vec![3]).unwrap();
        let summary = run_sweep(&spec);
        assert_eq!(summary.cells.len(), 1);
        let cell = &summary.cells[0];
        assert!(cell.error.is_none());

        let cfg = spec.cell_config(7.0, 3).unwrap();
        let trace = run_experiment(&cfg).unwrap();
        let t = trace.len();
        assert_eq!(cell.success_rate, success_rate(&trace, t).unwrap());
        assert_eq!(cell.normalized_cost, normalized_cost(&trace, t).unwrap());
        assert_eq!(cell.regret, cumulative_regret(&trace, t));
        // Averages over a single seed are the cell values.
        assert_eq!(summary.averages[0].success_rate, cell.success_rate);
        assert_eq!(summary.efficient_theta, Some(7.0));
    }

    #[test]
    fn sweep_averages_are_arithmetic_means() {
        let mut base = quick_config();
        base.attack.kind = AttackKind::Aggressive;
        let spec = SweepSpec::new(base, "attack.h_max", vec![5.0], vec![1, 2, 3]).unwrap();
        let summary = run_sweep(&spec);
        let mean: f64 = summary
            .cells
            .iter()
            .map(|c| c.success_rate)
            .sum::<f64>() / 3.0;
        assert!((summary.averages[0].success_rate - mean).abs() < 1e-12);
    }

    #[test]
    fn sweep_reproduces_the_efficiency_pick() {
        let mut base = quick_config();
        base.horizon = Some(15);
        base.attack.kind = AttackKind::Aggressive;
        let spec =
            SweepSpec::new(base, "attack.h_max", vec![0.5, 6.0, 19.0], vec![1, 2]).unwrap();
        let summary = run_sweep(&spec);
        let entries: Vec<HyperparameterResult> = summary
            .averages
            .iter()
            .map(|a| HyperparameterResult {
                theta: a.theta,
                success_rate: a.success_rate,
                normalized_cost: a.normalized_cost,
            })
            .collect();
        assert_eq!(
            summary.efficient_theta,
            Some(efficient_hyperparameter(&entries).unwrap())
        );
    }

    #[test]
    fn sweep_records_failures_without_aborting() {
        let mut base = quick_config();
        base.attack.kind = AttackKind::Clipping;
        // A region far outside the candidate grid makes the clipping
        // construction fail for every cell.
        base.region_centroid = Some(vec![0.99999999]);
        base.region_lengths = Some(vec![1e-12]);
        let spec = SweepSpec::new(base, "attack.delta", vec![1.0], vec![1]).unwrap();
        let summary = run_sweep(&spec);
        assert!(summary.cells[0].error.is_some());
        assert!(summary.cells[0].success_rate.is_nan());
        assert_eq!(summary.averages[0].runs_ok, 0);
        assert_eq!(summary.efficient_theta, None);
    }
}
