//! Command-line front end: builds a config from an optional JSON file plus
//! flag overrides, runs one experiment and writes its report.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use quantmix::experiments::{
    run_bahadur_experiment, run_bootstrap_consistency_experiment, run_clt_experiment, run_inconsistency_experiment,
    run_lrvar_experiment, run_strong_consistency_experiment, run_zrho_experiment, ExperimentReport, McConfig,
    SimulateConfig, ZRhoConfig,
};
use quantmix::{generate, BlockLengthSchedule, DistributionModel, PowerLocalModel, ProcessKind, ProcessSpec};
use serde::de::DeserializeOwned;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("hypothesis red flag: {0}")]
    RedFlag(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::RedFlag(_) => 3,
            Self::Runtime(_) => 1,
        }
    }
}

impl From<quantmix::Error> for CliError {
    fn from(e: quantmix::Error) -> Self {
        use quantmix::Error as E;
        match e {
            E::DegenerateLongRunVariance { .. } => Self::RedFlag(e.to_string()),
            E::Io(_) => Self::Runtime(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "quantmix", version, about = "Quantiles of dependent data: limit laws and the circular block bootstrap")]
pub struct Cli {
    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one path and write it as CSV.
    Simulate(SimulateArgs),
    /// Distance of the scaled sample quantile to its limit law along n.
    Clt(McArgs),
    /// Size of the scaled Bahadur remainder, plain and bootstrap.
    Bahadur(McArgs),
    /// Bootstrap contrast D_n for a marginal with rho = 1.
    BootConsistency(BootConsistencyArgs),
    /// Bootstrap contrast D_n for a marginal with rho != 1.
    Inconsistency(McArgs),
    /// Draws from the random sup distance Z_rho.
    Zrho(ZRhoArgs),
    /// Monte Carlo long-run variance of sqrt(n) F_n(t_p) at each n.
    Lrvar(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// JSON config (fields of McConfig); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated, strictly increasing sample sizes (n_grid).
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Local exponent: switches the marginal to the power model with t_p = 0.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Local coefficient M of the power model (default 0.5).
    #[arg(long)]
    pub m: Option<f64>,
    /// AR(1) coefficient of the Gaussian copula process.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Quantile level p.
    #[arg(long)]
    pub p: Option<f64>,
    /// Block-length schedule: fixed:L, power:C,GAMMA or dyadic:C,GAMMA.
    #[arg(long)]
    pub block: Option<String>,
    /// Data replicates R.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Bootstrap resamples B (plan.B).
    #[arg(long)]
    pub resamples: Option<usize>,
    /// Base seed; also used as the bootstrap plan seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Path length of the long-run variance oracle (lrvar_n).
    #[arg(long)]
    pub lrvar_n: Option<usize>,
    /// Paths used by the long-run variance oracle (lrvar_replicates).
    #[arg(long)]
    pub lrvar_replicates: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BootConsistencyArgs {
    /// Use one fixed data path and its prefixes instead of independent replicates.
    #[arg(long)]
    pub single_stream: bool,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct ZRhoArgs {
    /// JSON config (fields of ZRhoConfig); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Coefficient M (m_coef).
    #[arg(long)]
    pub m: Option<f64>,
    /// Long-run standard deviation (sigma_lr).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Number of outer draws of W_2.
    #[arg(long)]
    pub count: Option<usize>,
    /// Number of inner draws of W_1.
    #[arg(long)]
    pub inner_count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON config (fields of SimulateConfig); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Path length.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Parses `fixed:L`, `power:C,GAMMA` or `dyadic:C,GAMMA`.
pub fn parse_block(spec: &str) -> CliResult<BlockLengthSchedule> {
    let bad = || CliError::Config(format!("--block expects fixed:L, power:C,GAMMA or dyadic:C,GAMMA, got `{spec}`"));
    let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
    let nums: Vec<&str> = args.split(',').collect();
    let float = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let schedule = match (kind, nums.as_slice()) {
        ("fixed", [l]) => BlockLengthSchedule::fixed(l.trim().parse().map_err(|_| bad())?)?,
        ("power", [c, g]) => BlockLengthSchedule::power(float(c)?, float(g)?)?,
        ("dyadic" | "dyadic_power", [c, g]) => BlockLengthSchedule::dyadic_power(float(c)?, float(g)?)?,
        _ => return Err(bad()),
    };
    Ok(schedule)
}

/// Applies `--phi`, `--rho` and `--m` to a process.
fn override_process(process: &ProcessSpec, phi: Option<f64>, rho: Option<f64>, m: Option<f64>, p: f64) -> CliResult<ProcessSpec> {
    let mut kind = process.kind().clone();
    if let Some(phi) = phi {
        kind = ProcessKind::GaussAr1 { phi };
    }
    let mut marginal = *process.marginal();
    if rho.is_some() || m.is_some() {
        let (rho0, m0) = match marginal {
            DistributionModel::PowerLocal(pm) => (pm.rho(), pm.m_coef()),
            DistributionModel::Gaussian(_) => (1.0, 0.5),
        };
        marginal = PowerLocalModel::new(rho.unwrap_or(rho0), m.unwrap_or(m0), 0.0, p)?.into();
    }
    Ok(ProcessSpec::new(kind, marginal)?)
}

/// The McConfig for `args`: file values, then flag overrides, then validation.
pub fn resolve_mc(args: &McArgs) -> CliResult<McConfig> {
    let mut cfg: McConfig = load(args.config.as_deref())?;
    if let Some(grid) = &args.n_grid {
        cfg.n_grid = grid.clone();
    }
    if let Some(p) = args.p {
        cfg.p = p;
    }
    cfg.process = override_process(&cfg.process, args.phi, args.rho, args.m, cfg.p)?;
    if let Some(b) = &args.block {
        cfg.plan.schedule = parse_block(b)?;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(b) = args.resamples {
        cfg.plan.num_resamples = b;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
        cfg.plan.seed = s;
    }
    if let Some(n) = args.lrvar_n {
        cfg.lrvar_n = n;
    }
    if let Some(r) = args.lrvar_replicates {
        cfg.lrvar_replicates = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn resolve_zrho(args: &ZRhoArgs) -> CliResult<ZRhoConfig> {
    let mut cfg: ZRhoConfig = load(args.config.as_deref())?;
    cfg.rho = args.rho.unwrap_or(cfg.rho);
    cfg.m_coef = args.m.unwrap_or(cfg.m_coef);
    cfg.sigma_lr = args.sigma.unwrap_or(cfg.sigma_lr);
    cfg.count = args.count.unwrap_or(cfg.count);
    cfg.inner_count = args.inner_count.unwrap_or(cfg.inner_count);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.validate()?;
    Ok(cfg)
}

pub fn resolve_simulate(args: &SimulateArgs) -> CliResult<SimulateConfig> {
    let mut cfg: SimulateConfig = load(args.config.as_deref())?;
    let p = match cfg.process.marginal() {
        DistributionModel::PowerLocal(pm) => pm.p(),
        DistributionModel::Gaussian(_) => 0.5,
    };
    cfg.process = override_process(&cfg.process, args.phi, args.rho, args.m, p)?;
    cfg.n = args.n.unwrap_or(cfg.n);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.validate()?;
    Ok(cfg)
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Runtime(format!("cannot write output: {e}"));
    match path {
        Some(p) => fs::write(p, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

fn emit(report: &ExperimentReport, out: &OutputArgs) -> CliResult<()> {
    for line in report.summary_lines() {
        eprintln!("{line}");
    }
    eprintln!("{}: {:.2}s", report.experiment, report.metadata.wall_time_secs);
    let text = match out.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()? + "\n",
    };
    write_output(out.output.as_deref(), &text)
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            if t == 0 {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            b = b.num_threads(t);
        }
        b.build().map_err(|e| CliError::Runtime(e.to_string()))?
    };
    pool.install(|| dispatch(&cli.command))
}

fn dispatch(command: &Command) -> CliResult<()> {
    match command {
        Command::Simulate(args) => {
            let cfg = resolve_simulate(args)?;
            let sample = generate(&cfg.process, cfg.n, cfg.seed)?;
            let mut buf = Vec::new();
            sample.write_csv(&cfg.process, &mut buf)?;
            eprintln!("simulated {} values of {}", cfg.n, cfg.process.id());
            write_output(args.output.as_deref(), &String::from_utf8_lossy(&buf))
        }
        Command::Clt(a) => emit(&run_clt_experiment(&resolve_mc(a)?)?, &a.out),
        Command::Bahadur(a) => emit(&run_bahadur_experiment(&resolve_mc(a)?)?, &a.out),
        Command::BootConsistency(a) => {
            let cfg = resolve_mc(&a.mc)?;
            let report = if a.single_stream {
                run_strong_consistency_experiment(&cfg)?
            } else {
                run_bootstrap_consistency_experiment(&cfg)?
            };
            emit(&report, &a.mc.out)
        }
        Command::Inconsistency(a) => emit(&run_inconsistency_experiment(&resolve_mc(a)?)?, &a.out),
        Command::Zrho(a) => emit(&run_zrho_experiment(&resolve_zrho(a)?)?, &a.out),
        Command::Lrvar(a) => emit(&run_lrvar_experiment(&resolve_mc(a)?)?, &a.out),
    }
}
