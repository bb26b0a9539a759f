use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use copyro::config::RunConfig;

mod commands;
mod output;

#[derive(Debug)]
pub enum CliError {
    /// Bad input, flags or configuration: exit 1.
    User(String),
    /// Numerical or other internal failure: exit 2.
    Internal(String),
}

impl From<copyro::Error> for CliError {
    fn from(e: copyro::Error) -> Self {
        use copyro::Error as E;
        let internal = |e: &E| {
            let mut e = e;
            while let E::Fold { source, .. } = e {
                e = source;
            }
            matches!(
                e,
                E::NotPositiveDefinite { .. }
                    | E::DivergedTraining { .. }
                    | E::SolverNotConverged { .. }
                    | E::DegenerateMatrix
            )
        };
        if internal(&e) {
            CliError::Internal(e.to_string())
        } else {
            CliError::User(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "copyro",
    version,
    about = "Surrogate models and swarm optimisation for co-pyrolysis yields"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set pso.swarm_size=50`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dataset and report every invalid row.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Five-number summaries and means of every column.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the feature pipeline and export normalised PCA scores.
    Features {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write loadings and explained variance here.
        #[arg(long)]
        loadings: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Spearman correlation matrix of raw inputs and yields.
    Correlate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Molar O/C, N/C and effective H/C of each feedstock.
    Ratios {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one model per yield and save the bundle as JSON.
    Train {
        #[arg(long)]
        input: PathBuf,
        /// gpr, elm, mlp, svr or gam.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Use default hyperparameters instead of PSO tuning.
        #[arg(long)]
        no_tune: bool,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// k-fold cross-validation of one or more model kinds.
    Cv {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated kinds, or `all`.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Per-fold metrics as flat CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Fit the feature pipeline on all records instead of per fold.
        #[arg(long)]
        fit_on_all: bool,
        /// Also report metrics in yield percent.
        #[arg(long)]
        raw_metrics: bool,
        #[arg(long)]
        no_tune: bool,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// PSO hyperparameter search for one model kind and one yield.
    Tune {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: Option<String>,
        /// oil, char or syngas.
        #[arg(long, default_value = "oil")]
        output: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Multi-objective search for high-oil operating points.
    Optimize {
        /// Trained model bundle from `train`.
        #[arg(long)]
        model: PathBuf,
        /// CSV with `column,lo,hi` rows overriding the training ranges.
        #[arg(long)]
        bounds: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predicted yields over a grid of two raw inputs.
    Contour {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// `lo:hi`, default the training range.
        #[arg(long)]
        x_range: Option<String>,
        #[arg(long)]
        y_range: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        /// 20 comma-separated raw inputs; default the training medians.
        #[arg(long)]
        fixed: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic dataset with a known oil-yield optimum.
    Synth {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        noise_sd: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args, Clone, Copy)]
pub struct PipelineArgs {
    /// Skip z-scoring before PCA.
    #[arg(long)]
    pub no_standardize: bool,
    #[arg(long)]
    pub variance_threshold: Option<f64>,
}

fn resolve_config(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut config = match &global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    for item in &global.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::User(format!("--set expects KEY=VALUE, got `{item}`")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(threads) = global.threads {
        config.threads = threads;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = resolve_config(&cli.global)?;
    if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    commands::dispatch(cli.command, config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}
