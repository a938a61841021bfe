//! Command-line front end: `run`, `reproduce`, and `validate`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{parse_config_with_overrides, ConfigError, ExperimentConfig};
use crate::cris::StrategyKind;
use crate::pla::det_curve;
use crate::report::{det_csv, gnuplot_index, scores_csv, summary_csv, SummaryRow};
use crate::sim::{run_experiment, AttackerSpec, ExperimentPlan, PlaMode, ReferenceMode};

#[derive(Debug, Parser)]
#[command(
    name = "cris-pla",
    version,
    about = "Monte Carlo simulator for physical-layer authentication over a color-selective reconfigurable surface"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment plans described by a configuration file.
    Run {
        /// Configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Override configuration values, e.g. --set sim.trials=1000.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Override the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (defaults to the configured one).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (falls back to CRIS_SIM_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Regenerate one published detection-error figure grid.
    Reproduce {
        /// Which figure grid to regenerate.
        figure: Figure,
        /// Trial budget per plan.
        #[arg(long, default_value = "desk")]
        scale: Scale,
        /// Optional configuration file for a custom scene.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: out).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a configuration file and print the resolved settings.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

/// The four published figure grids: one strategy each, both array sizes,
/// five passive positions plus the line-of-sight attacker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub fn strategy(self) -> StrategyKind {
        match self {
            Figure::Fig4 => StrategyKind::FixedCyclic,
            Figure::Fig5 => StrategyKind::StaticRandom,
            Figure::Fig6 => StrategyKind::DynamicRandom,
            Figure::Fig7 => StrategyKind::RandomPermutation,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// 2,000 trials per plan.
    Desk,
    /// 20,000 trials per plan.
    Full,
}

impl Scale {
    pub fn trials(self) -> usize {
        match self {
            Scale::Desk => 2_000,
            Scale::Full => 20_000,
        }
    }
}

/// Command failures, split by exit code: 2 for configuration problems,
/// 3 for runtime failures.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, overrides, seed, out, threads } => {
            with_thread_pool(threads, || cmd_run(&config, &overrides, seed, out.as_deref()))
        }
        Command::Reproduce { figure, scale, config, overrides, seed, out, threads } => {
            with_thread_pool(threads, || {
                cmd_reproduce(figure, scale, config.as_deref(), &overrides, seed, out.as_deref())
            })
        }
        Command::Validate { config, overrides } => cmd_validate(&config, &overrides),
    }
}

/// Runs `f` inside a dedicated thread pool when a worker count is requested
/// via `--threads` or `CRIS_SIM_THREADS`. Results do not depend on the
/// choice; only wall time does.
fn with_thread_pool<T>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError>
where
    T: Send,
{
    let threads = match threads {
        Some(n) => Some(n),
        None => match std::env::var("CRIS_SIM_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                CliError::Config(format!("CRIS_SIM_THREADS must be a positive integer, got '{v}'"))
            })?),
            Err(_) => None,
        },
    };
    match threads {
        Some(n) if n >= 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Runtime(format!("cannot build thread pool: {e}")))?;
            pool.install(f)
        }
        Some(_) => Err(CliError::Config("--threads must be >= 1".into())),
        None => f(),
    }
}

fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse_config_with_overrides(&text, overrides)?;
    config.validate()?;
    Ok(config)
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn cmd_run(
    config_path: &Path,
    overrides: &[String],
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = load_config(config_path, overrides)?;
    let mut plans = config
        .resolve_plans()
        .map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(seed) = seed {
        for plan in &mut plans {
            plan.master_seed = seed;
        }
    }

    let out_dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.output.directory));
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut summary = Vec::with_capacity(plans.len());
    let mut failures = Vec::new();
    for plan in &plans {
        let plan_id = plan.plan_id();
        let start = std::time::Instant::now();
        let result = run_experiment(plan).and_then(|samples| {
            let det = det_curve(&samples, plan.n_thresholds)?;
            Ok((samples, det))
        });
        match result {
            Ok((samples, det)) => {
                let runtime_s = start.elapsed().as_secs_f64();
                write_file(&out_dir.join(format!("scores_{plan_id}.csv")), &scores_csv(&samples))?;
                write_file(&out_dir.join(format!("det_{plan_id}.csv")), &det_csv(&det))?;
                let eer = det.eer().eer;
                println!(
                    "plan {plan_id} scenario={} n={} attacker={} eer={eer:.4} time={runtime_s:.2}s",
                    plan.strategy.label(),
                    plan.n_elements(),
                    plan.attacker.label(),
                );
                summary.push(SummaryRow {
                    plan_id,
                    scenario: plan.strategy.label().to_string(),
                    n_elements: plan.n_elements(),
                    attacker: plan.attacker.label(),
                    eer,
                    runtime_s,
                });
            }
            Err(e) => {
                eprintln!("plan {plan_id} failed: {e}");
                failures.push((plan_id, e));
            }
        }
    }
    write_file(&out_dir.join("summary.csv"), &summary_csv(&summary))?;

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("{} of {} plans failed", failures.len(), plans.len())))
    }
}

/// The plan grid behind one figure: both array sizes, every configured
/// passive position, and the line-of-sight attacker, all at the genie
/// reference for a like-for-like cross-scenario comparison.
pub fn figure_plans(
    figure: Figure,
    scale: Scale,
    config: &ExperimentConfig,
    seed: Option<u64>,
    trials_override: Option<usize>,
) -> Result<Vec<(String, String, ExperimentPlan)>, CliError> {
    let strategy = figure.strategy();
    let pla_mode = if strategy.is_dynamic() {
        PlaMode::ChallengeResponse
    } else {
        PlaMode::SingleConfiguration
    };
    let base_plans = config
        .resolve_plans()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let template = base_plans
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Config("configuration resolves to no plans".into()))?;

    let mut attackers: Vec<(String, AttackerSpec)> = config
        .attack
        .positions
        .iter()
        .map(|p| {
            (
                format!("x{:.2}", p[0]),
                AttackerSpec::Passive { position: crate::geometry::Vec3::new(p[0], p[1], p[2]) },
            )
        })
        .collect();
    attackers.push((
        "los".to_string(),
        AttackerSpec::Los {
            position: crate::geometry::Vec3::new(
                config.attack.los_position[0],
                config.attack.los_position[1],
                config.attack.los_position[2],
            ),
            split: crate::attack::SplitPolicy::Equal,
        },
    ));

    let mut out = Vec::new();
    for (rows, cols) in [(40usize, 24usize), (50, 30)] {
        for (tag, attacker) in &attackers {
            let mut plan = template.clone();
            plan.scene.grid.rows = rows;
            plan.scene.grid.cols = cols;
            plan.strategy = strategy;
            plan.pla_mode = pla_mode;
            plan.reference = ReferenceMode::Genie;
            plan.attacker = *attacker;
            plan.trials = trials_override.unwrap_or_else(|| scale.trials());
            if let Some(seed) = seed {
                plan.master_seed = seed;
            }
            let n = rows * cols;
            let file = format!("det_{}_n{n}_{tag}.csv", figure.label());
            let title = format!("N={n} {tag}");
            out.push((file, title, plan));
        }
    }
    Ok(out)
}

fn cmd_reproduce(
    figure: Figure,
    scale: Scale,
    config_path: Option<&Path>,
    overrides: &[String],
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = match config_path {
        Some(path) => load_config(path, overrides)?,
        None => {
            let config = parse_config_with_overrides("schema_version = 1\n", overrides)?;
            config.validate()?;
            config
        }
    };
    // An explicit sim.trials override takes precedence over the scale.
    let trials_override = overrides
        .iter()
        .any(|o| o.trim_start().starts_with("sim.trials"))
        .then_some(config.sim.trials);

    let plans = figure_plans(figure, scale, &config, seed, trials_override)?;
    let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut index_entries = Vec::with_capacity(plans.len());
    for (file, title, plan) in &plans {
        let samples = run_experiment(plan).map_err(|e| CliError::Runtime(e.to_string()))?;
        let det = det_curve(&samples, plan.n_thresholds).map_err(|e| CliError::Runtime(e.to_string()))?;
        write_file(&out_dir.join(file), &det_csv(&det))?;
        println!(
            "{} n={} attacker={} eer={:.4}",
            file,
            plan.n_elements(),
            plan.attacker.label(),
            det.eer().eer
        );
        index_entries.push((file.clone(), title.clone()));
    }
    write_file(
        &out_dir.join(format!("{}_index.gp", figure.label())),
        &gnuplot_index(figure.label(), &index_entries),
    )?;
    Ok(())
}

fn cmd_validate(config_path: &Path, overrides: &[String]) -> Result<(), CliError> {
    let config = load_config(config_path, overrides)?;
    println!("# resolved configuration");
    print!("{}", config.to_toml());
    Ok(())
}
