use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use gpbandit::algorithms::GreedyInfoGain;
use gpbandit::attacks::{corollary_budget_bound, verify_attack_conditions, BoundKind};
use gpbandit::config::{ExperimentConfig, SweepSpec};
use gpbandit::emit::{write_scatter_svg, write_summary_csv, write_trace_csv};
use gpbandit::harness::{
    beta_schedule, build_attack_policy, build_candidates, objective_from_config, run_experiment,
    run_sweep,
};
use gpbandit::metrics::{cumulative_regret, normalized_cost, success_rate};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "gpbandit", about = "GP-bandit reward-poisoning experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded experiment and write its trace CSV.
    Run {
        #[arg(long)]
        config: String,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for trace.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one hyperparameter over a list of values and seeds.
    Sweep {
        #[arg(long)]
        config: String,
        /// Dotted config key to vary, e.g. attack.delta.
        #[arg(long)]
        param: String,
        /// Comma-separated hyperparameter values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Output directory for summary.csv and scatter.svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the suboptimal-pull budget bounds for a given gap and shift.
    Bound {
        #[arg(long)]
        config: String,
        /// Suboptimality gap of the perturbed function.
        #[arg(long)]
        delta: f64,
        /// Per-pull perturbation ceiling.
        #[arg(long)]
        b0: f64,
    },
    /// Print the attack-condition report for the configured attack.
    Verify {
        #[arg(long)]
        config: String,
        /// Optimality slack used by the condition check.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, seed, out } => run_cmd(&config, seed, out),
        Command::Sweep {
            config,
            param,
            values,
            seeds,
            out,
        } => sweep_cmd(&config, &param, values, seeds, out),
        Command::Bound { config, delta, b0 } => bound_cmd(&config, delta, b0),
        Command::Verify { config, delta } => verify_cmd(&config, delta),
    }
}

fn load(config: &str) -> anyhow::Result<ExperimentConfig> {
    ExperimentConfig::from_file(config).with_context(|| format!("loading config `{config}`"))
}

fn run_cmd(config: &str, seed: Option<u64>, out: Option<PathBuf>) -> anyhow::Result<()> {
    let mut cfg = load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let trace = run_experiment(&cfg)?;
    let t = trace.len();
    println!(
        "run {}: steps={} success_rate={:.4} norm_cost={:.4} regret={:.4}",
        trace.run_id,
        t,
        success_rate(&trace, t)?,
        normalized_cost(&trace, t)?,
        cumulative_regret(&trace, t),
    );
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("trace.csv");
        write_trace_csv(&trace, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn sweep_cmd(
    config: &str,
    param: &str,
    values: Vec<f64>,
    seeds: Vec<u64>,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let base = load(config)?;
    let spec = SweepSpec::new(base, param, values, seeds)?;
    let summary = run_sweep(&spec);
    println!("theta        success   cost      regret    runs");
    for avg in &summary.averages {
        println!(
            "{:<12.5} {:<9.4} {:<9.4} {:<9.3} {}",
            avg.theta, avg.success_rate, avg.normalized_cost, avg.regret, avg.runs_ok
        );
    }
    for cell in summary.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!(
            "cell theta={} seed={} failed: {}",
            cell.theta,
            cell.seed,
            cell.error.as_deref().unwrap_or("")
        );
    }
    match summary.efficient_theta {
        Some(theta) => println!("most efficient {param} = {theta}"),
        None => println!("no successful cells; efficiency undefined"),
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        let csv = dir.join("summary.csv");
        write_summary_csv(&summary, &csv)?;
        let svg = dir.join("scatter.svg");
        write_scatter_svg(&summary, &format!("{param} sweep"), &svg)?;
        println!("wrote {} and {}", csv.display(), svg.display());
    }
    Ok(())
}

fn bound_cmd(config: &str, delta: f64, b0: f64) -> anyhow::Result<()> {
    let cfg = load(config)?;
    let obj = objective_from_config(&cfg)?;
    let horizon = cfg.effective_horizon(obj.dim());
    let candidates = build_candidates(&cfg, &obj)?;
    let kernel = gpbandit::kernels::Kernel::new(
        cfg.kernel_family,
        cfg.fixed_lengthscale,
        cfg.fixed_signal_variance,
    )?;
    let mut curve = GreedyInfoGain::new(kernel, candidates.clone(), cfg.lambda)?;
    let cap = candidates.len();
    let mut gains = vec![0.0; horizon + 1];
    for (t, slot) in gains.iter_mut().enumerate() {
        *slot = curve.value_at(t.min(cap))?;
    }
    let gamma = |t: usize| gains[t.min(horizon)];
    let schedule = beta_schedule(&cfg);
    let ucb = corollary_budget_bound(delta, horizon, b0, &schedule, &gamma, cfg.lambda, BoundKind::Ucb)?;
    let elim =
        corollary_budget_bound(delta, horizon, b0, &schedule, &gamma, cfg.lambda, BoundKind::Elim)?;
    println!("C1 = {:.6}", ucb.c1);
    println!("gamma_T = {:.6} (greedy estimate, T = {horizon})", gamma(horizon));
    println!("confidence-bound player: N_max = {}  budget <= {:.6}", ucb.n_max, ucb.budget);
    println!("elimination player:      N_max = {}  budget <= {:.6}", elim.n_max, elim.budget);
    Ok(())
}

fn verify_cmd(config: &str, delta: f64) -> anyhow::Result<()> {
    let cfg = load(config)?;
    let obj = objective_from_config(&cfg)?;
    let region = obj.region().clone();
    let candidates = build_candidates(&cfg, &obj)?;
    let policy = build_attack_policy(&cfg, &obj, &region, &candidates)?;
    if !policy.is_deterministic() {
        bail!("the random baseline has no deterministic perturbed function to verify");
    }
    let mut f = Vec::with_capacity(candidates.len());
    let mut f_tilde = Vec::with_capacity(candidates.len());
    let mut mask = Vec::with_capacity(candidates.len());
    for x in &candidates {
        let v = obj.eval(x)?;
        let c = policy
            .deterministic_shift(&region, x, v)
            .expect("deterministic policy");
        f.push(v);
        f_tilde.push(v + c);
        mask.push(region.contains(x));
    }
    let report = verify_attack_conditions(&f, &f_tilde, &mask, delta);
    println!("attack = {}", policy.variant_name());
    println!("grid points = {}", candidates.len());
    println!("holds_i (delta-optimal set confined and unperturbed) = {}", report.holds_i);
    println!("holds_ii_gap (out-of-region suboptimality margin) = {:.6}", report.holds_ii_gap);
    println!("B0 (max perturbation magnitude) = {:.6}", report.b0);
    Ok(())
}
