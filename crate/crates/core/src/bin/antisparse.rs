use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use antisparse::dictgen::{generate_dictionary, generate_observation, write_matrix_csv, write_vector_csv, DictionaryKind, DictionaryVariant};
use antisparse::experiments::{
    exp_detection, exp_opcount, exp_profile, solve_once, write_detection_csv, write_opcount_csv, write_profile_csv,
    BenchSolver, ConfigLayer, Experiment, ExperimentConfig, InstanceSource, SolveRequest,
};

#[derive(Parser)]
#[command(name = "antisparse", version, about = "Safe squeezing experiments for l-infinity penalized least squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print a JSON report.
    Solve {
        #[command(flatten)]
        opts: Opts,
        /// Dictionary CSV (row-major, "m,n" header); requires --y.
        #[arg(long, requires = "y")]
        a: Option<PathBuf>,
        /// Observation CSV ("m,1" header); requires --a.
        #[arg(long, requires = "a")]
        y: Option<PathBuf>,
    },
    /// Detection rate of the ST1 and GAP sphere tests.
    ExpDetection(Opts),
    /// Multiplications to converge along a decreasing lambda grid.
    ExpOpcount(Opts),
    /// Performance profiles under a multiplication budget.
    ExpProfile(Opts),
    /// Write A.csv and y.csv for one generated instance into --out.
    Gen(Opts),
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// Dictionary kinds (comma separated): gaussian, uniform, dct, toeplitz.
    #[arg(long, value_delimiter = ',', value_parser = parse_variant)]
    dict: Option<Vec<DictionaryVariant>>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Values of lambda / lambda_max (comma separated).
    #[arg(long, value_delimiter = ',')]
    lambda_ratio: Option<Vec<f64>>,
    /// Sphere radius inflations for exp-detection (comma separated).
    #[arg(long, value_delimiter = ',')]
    r0_grid: Option<Vec<f64>>,
    /// Multiplication budget per run.
    #[arg(long)]
    budget: Option<u64>,
    /// Dual-gap tolerance (overrides per-solver defaults).
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Solvers (comma separated): fitra, fw, pgs, fws.
    #[arg(long, value_delimiter = ',', value_parser = parse_solver)]
    solver: Option<Vec<BenchSolver>>,
    /// Output file (experiments, solve) or directory (gen); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: number of processors).
    #[arg(long)]
    threads: Option<usize>,
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<DictionaryVariant, String> {
    s.parse().map_err(|e: antisparse::Error| e.to_string())
}

fn parse_solver(s: &str) -> Result<BenchSolver, String> {
    s.parse().map_err(|e: antisparse::Error| e.to_string())
}

impl Opts {
    fn resolve(&self, experiment: Experiment) -> antisparse::Result<ExperimentConfig> {
        let file = self.config.as_deref().map(ConfigLayer::from_toml_file).transpose()?;
        let cli = ConfigLayer {
            dict: self.dict.clone(),
            m: self.m,
            n: self.n,
            trials: self.trials,
            seed: self.seed,
            lambda_ratio: self.lambda_ratio.clone(),
            r0_grid: self.r0_grid.clone(),
            budget: self.budget,
            gap_tol: self.gap_tol,
            solver: self.solver.clone(),
            out: self.out.clone(),
            threads: self.threads,
        };
        ExperimentConfig::resolve(experiment, file, cli)
    }
}

fn output(path: Option<&Path>) -> antisparse::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn single<T: Copy>(values: &[T], what: &str) -> antisparse::Result<T> {
    match values {
        [v] => Ok(*v),
        _ => Err(antisparse::Error::InvalidArgument(format!("expected exactly one {what}, got {}", values.len()))),
    }
}

fn run(cli: Cli) -> antisparse::Result<()> {
    match cli.command {
        Command::Solve { opts, a, y } => {
            let cfg = opts.resolve(Experiment::Solve)?;
            let solver = single(&cfg.solvers, "solver")?;
            let source = match (a, y) {
                (Some(a), Some(y)) => InstanceSource::Files { a, y },
                _ => InstanceSource::Generated { dict: single(&cfg.dicts, "dictionary kind")?, m: cfg.m, n: cfg.n, seed: cfg.seed },
            };
            let request = SolveRequest {
                source,
                lambda_ratio: single(&cfg.lambda_ratios, "lambda ratio")?,
                solver,
                gap_tol: cfg.gap_tol_for(solver),
                budget: Some(cfg.budget),
            };
            let report = solve_once(&request)?;
            let mut out = output(cfg.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            out.flush()?;
        }
        Command::ExpDetection(opts) => {
            let cfg = opts.resolve(Experiment::Detection)?;
            let rows = exp_detection(&cfg)?;
            let mut out = output(cfg.out.as_deref())?;
            write_detection_csv(&mut out, &rows)?;
            out.flush()?;
        }
        Command::ExpOpcount(opts) => {
            let cfg = opts.resolve(Experiment::Opcount)?;
            let rows = exp_opcount(&cfg)?;
            let mut out = output(cfg.out.as_deref())?;
            write_opcount_csv(&mut out, &rows)?;
            out.flush()?;
        }
        Command::ExpProfile(opts) => {
            let cfg = opts.resolve(Experiment::Profile)?;
            let rows = exp_profile(&cfg)?;
            let mut out = output(cfg.out.as_deref())?;
            write_profile_csv(&mut out, &rows)?;
            out.flush()?;
        }
        Command::Gen(opts) => {
            let cfg = opts.resolve(Experiment::Solve)?;
            let dir = cfg
                .out
                .clone()
                .ok_or_else(|| antisparse::Error::InvalidArgument("gen needs --out DIR".into()))?;
            fs::create_dir_all(&dir)?;
            let kind = DictionaryKind::new(single(&cfg.dicts, "dictionary kind")?, cfg.seed);
            let a = generate_dictionary(kind, cfg.m, cfg.n)?;
            let y = generate_observation(cfg.seed, cfg.m)?;
            let mut fa = BufWriter::new(File::create(dir.join("A.csv"))?);
            write_matrix_csv(&mut fa, &a)?;
            fa.flush()?;
            let mut fy = BufWriter::new(File::create(dir.join("y.csv"))?);
            write_vector_csv(&mut fy, &y)?;
            fy.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
