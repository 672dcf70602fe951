//! JSON run configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use nehari_core::minimizer::MinimizerConfig;
use nehari_core::{ProblemParams, RadialGrid};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ProblemParams,
    /// Defaults to `r_max = 30, N = 4096` for `n = 1` and `20, 2048` otherwise.
    #[serde(default)]
    pub grid: Option<GridSettings>,
    #[serde(default)]
    pub minimizer: MinimizerConfig,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub r_max: f64,
    pub num_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    B,
    Omega,
    Q,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::B => "b",
            SweepVariable::Omega => "omega",
            SweepVariable::Q => "q",
        }
    }

    pub fn apply(&self, p: &ProblemParams, value: f64) -> ProblemParams {
        let mut p = *p;
        match self {
            SweepVariable::B => p.b = value,
            SweepVariable::Omega => p.omega = value,
            SweepVariable::Q => p.q = value,
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepSpec {
    /// Lattice values in axis order; `count = 1` yields `start` only.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let s = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + s * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + s * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub directory: PathBuf,
    /// Write the `r,u,v` profile of each solve.
    pub profile: bool,
    /// Write the JSON report of each solve.
    pub report: bool,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            profile: true,
            report: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|source| CliError::ParseConfig {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked before solving, including the
    /// admissibility of every sweep lattice point.
    pub fn validate(&self) -> CliResult<()> {
        self.minimizer.validate().map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        for p in self.points() {
            if let Err(e) = p.validated() {
                return Err(CliError::InvalidConfig(format!("{e} at {}", describe(&p))));
            }
        }
        if let Some(g) = &self.grid {
            RadialGrid::new(self.params.n, g.r_max, g.num_points).map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        }
        if let Some(s) = &self.sweep {
            if s.count == 0 {
                return Err(CliError::InvalidConfig("sweep count must be at least 1".into()));
            }
            if !(s.start.is_finite() && s.stop.is_finite()) {
                return Err(CliError::InvalidConfig("sweep bounds must be finite".into()));
            }
            if s.spacing == Spacing::Log && !(s.start > 0.0 && s.stop > 0.0) {
                return Err(CliError::InvalidConfig("log spacing needs positive bounds".into()));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> CliResult<Arc<RadialGrid>> {
        let (r_max, num_points) = match self.grid {
            Some(g) => (g.r_max, g.num_points),
            None => RadialGrid::default_size(self.params.n),
        };
        Ok(Arc::new(RadialGrid::new(self.params.n, r_max, num_points)?))
    }

    /// The base point, or every sweep lattice point.
    pub fn points(&self) -> Vec<ProblemParams> {
        match &self.sweep {
            None => vec![self.params],
            Some(s) => s.values().into_iter().map(|v| s.variable.apply(&self.params, v)).collect(),
        }
    }
}

pub fn describe(p: &ProblemParams) -> String {
    format!("n={}, q={}, b={}, omega={}", p.n, p.q, p.b, p.omega)
}
