//! Experiment configuration: defaults, TOML files and command-line overrides.
//!
//! Every field of [`ConfigLayer`] is optional; [`ExperimentConfig::resolve`]
//! stacks the defaults of an experiment, a config-file layer and a
//! command-line layer, later layers winning.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dictgen::DictionaryVariant;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Detection,
    Opcount,
    Profile,
    Solve,
}

/// The four benchmarked solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchSolver {
    /// Accelerated proximal gradient on the full problem.
    Fitra,
    /// Frank-Wolfe without squeezing.
    Fw,
    /// Projected gradient with dynamic GAP squeezing.
    Pgs,
    /// Frank-Wolfe with dynamic GAP squeezing.
    Fws,
}

impl BenchSolver {
    pub const ALL: [BenchSolver; 4] = [Self::Fitra, Self::Fw, Self::Pgs, Self::Fws];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fitra => "fitra",
            Self::Fw => "fw",
            Self::Pgs => "pgs",
            Self::Fws => "fws",
        }
    }

    /// Convergence tolerance used by the operation-count experiment.
    pub fn default_gap_tol(self) -> f64 {
        match self {
            Self::Fitra | Self::Pgs => 1e-7,
            Self::Fw | Self::Fws => 1e-4,
        }
    }
}

impl FromStr for BenchSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fitra" => Ok(Self::Fitra),
            "fw" => Ok(Self::Fw),
            "pgs" => Ok(Self::Pgs),
            "fws" => Ok(Self::Fws),
            other => Err(Error::InvalidArgument(format!("unknown solver {other:?}"))),
        }
    }
}

/// One layer of optional settings, as read from TOML or the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub dict: Option<Vec<DictionaryVariant>>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub lambda_ratio: Option<Vec<f64>>,
    pub r0_grid: Option<Vec<f64>>,
    pub budget: Option<u64>,
    pub gap_tol: Option<f64>,
    pub solver: Option<Vec<BenchSolver>>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl ConfigLayer {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |span| text[..span.start].matches('\n').count() + 1);
            Error::Parse { line, msg: e.message().to_string() }
        })
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `other` replace those of `self`.
    pub fn overridden_by(self, other: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            dict: other.dict.or(self.dict),
            m: other.m.or(self.m),
            n: other.n.or(self.n),
            trials: other.trials.or(self.trials),
            seed: other.seed.or(self.seed),
            lambda_ratio: other.lambda_ratio.or(self.lambda_ratio),
            r0_grid: other.r0_grid.or(self.r0_grid),
            budget: other.budget.or(self.budget),
            gap_tol: other.gap_tol.or(self.gap_tol),
            solver: other.solver.or(self.solver),
            out: other.out.or(self.out),
            threads: other.threads.or(self.threads),
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dicts: Vec<DictionaryVariant>,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    /// Trial `t` uses seed `seed + t` for both dictionary and observation.
    pub seed: u64,
    pub lambda_ratios: Vec<f64>,
    pub r0_grid: Vec<f64>,
    pub budget: u64,
    /// Overrides every solver's tolerance when set.
    pub gap_tol: Option<f64>,
    pub solvers: Vec<BenchSolver>,
    pub out: Option<PathBuf>,
    /// Worker count; `None` uses the number of processors.
    pub threads: Option<usize>,
}

/// Eight log-spaced ratios from 0.9 down to 0.1.
pub fn default_opcount_grid() -> Vec<f64> {
    let (lo, hi) = (0.1f64.ln(), 0.9f64.ln());
    let mut grid: Vec<f64> = (0..8).map(|k| (hi - (hi - lo) * k as f64 / 7.0).exp()).collect();
    grid[0] = 0.9;
    grid[7] = 0.1;
    grid
}

pub fn default_r0_grid() -> Vec<f64> {
    vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0]
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let lambda_ratios = match experiment {
            Experiment::Detection => vec![0.2, 0.5, 0.8],
            Experiment::Opcount => default_opcount_grid(),
            Experiment::Profile => vec![0.3, 0.8],
            Experiment::Solve => vec![0.5],
        };
        let (dicts, solvers) = match experiment {
            Experiment::Detection => (DictionaryVariant::ALL.to_vec(), Vec::new()),
            Experiment::Solve => (vec![DictionaryVariant::Gaussian], vec![BenchSolver::Pgs]),
            _ => (vec![DictionaryVariant::Gaussian], BenchSolver::ALL.to_vec()),
        };
        Self {
            experiment,
            dicts,
            m: 50,
            n: 75,
            trials: if experiment == Experiment::Solve { 1 } else { 20 },
            seed: 0,
            lambda_ratios,
            r0_grid: default_r0_grid(),
            // opcount measures cost to converge; its budget is only a runaway guard
            budget: if experiment == Experiment::Opcount { 10_000_000_000 } else { 10_000_000 },
            gap_tol: None,
            solvers,
            out: None,
            threads: None,
        }
    }

    /// Defaults, then `file`, then `cli`.
    pub fn resolve(experiment: Experiment, file: Option<ConfigLayer>, cli: ConfigLayer) -> Result<Self> {
        let layer = file.unwrap_or_default().overridden_by(cli);
        let mut cfg = Self::defaults(experiment);
        if let Some(v) = layer.dict {
            cfg.dicts = v;
        }
        cfg.m = layer.m.unwrap_or(cfg.m);
        cfg.n = layer.n.unwrap_or(cfg.n);
        cfg.trials = layer.trials.unwrap_or(cfg.trials);
        cfg.seed = layer.seed.unwrap_or(cfg.seed);
        if let Some(v) = layer.lambda_ratio {
            cfg.lambda_ratios = v;
        }
        if let Some(v) = layer.r0_grid {
            cfg.r0_grid = v;
        }
        cfg.budget = layer.budget.unwrap_or(cfg.budget);
        cfg.gap_tol = layer.gap_tol.or(cfg.gap_tol);
        if let Some(v) = layer.solver {
            cfg.solvers = v;
        }
        cfg.out = layer.out.or(cfg.out);
        cfg.threads = layer.threads.or(cfg.threads);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.m == 0 || self.n == 0 {
            return bad(format!("dimensions must be positive, got {}x{}", self.m, self.n));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.dicts.is_empty() {
            return bad("at least one dictionary kind is required".into());
        }
        if self.lambda_ratios.is_empty() {
            return bad("at least one lambda ratio is required".into());
        }
        // a single solve may ask for λ ≥ λmax and get the zero solution
        let upper = if self.experiment == Experiment::Solve { f64::INFINITY } else { 1.0 };
        if let Some(r) = self.lambda_ratios.iter().find(|r| !(**r > 0.0 && **r < upper)) {
            return bad(format!("lambda ratios must lie in (0, 1), got {r}"));
        }
        if self.experiment == Experiment::Opcount && self.lambda_ratios.windows(2).any(|w| w[1] >= w[0]) {
            return bad("the operation-count lambda grid must be strictly decreasing".into());
        }
        if let Some(r) = self.r0_grid.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return bad(format!("r0 values must be finite and nonnegative, got {r}"));
        }
        if self.budget == 0 {
            return bad("budget must be positive".into());
        }
        if let Some(t) = self.gap_tol.filter(|t| !(*t > 0.0 && t.is_finite())) {
            return bad(format!("gap tolerance must be positive, got {t}"));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if self.experiment != Experiment::Detection && self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        Ok(())
    }

    pub fn gap_tol_for(&self, solver: BenchSolver) -> f64 {
        self.gap_tol.unwrap_or_else(|| solver.default_gap_tol())
    }
}
