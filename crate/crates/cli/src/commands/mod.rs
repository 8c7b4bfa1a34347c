pub mod cantor;
pub mod functionals;
pub mod lip;
pub mod realline;
pub mod space;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use fractalkit::lipschitz::SampledFunction;
use fractalkit::measure::CoverConfig;
use fractalkit::metric::{FiniteMetricSpace, SetFamily, SubsetRef};

use crate::input;
use crate::report::Report;

pub const EXACT_LIMIT_VAR: &str = "FRACTALKIT_EXACT_LIMIT";

/// A point cloud CSV, or a distance matrix CSV with `--matrix`.
#[derive(Args, Debug, Clone)]
pub struct SpaceInput {
    /// Point cloud CSV (one point per line) or, with --matrix, a square distance matrix
    #[arg(long)]
    pub input: PathBuf,
    /// Read --input as an explicit distance matrix
    #[arg(long)]
    pub matrix: bool,
}

impl SpaceInput {
    pub fn load(&self, report: &mut Report) -> Result<FiniteMetricSpace> {
        let text = report.read(&self.input)?;
        report.param("input", self.input.display().to_string());
        report.param("matrix", self.matrix);
        input::space_from_text(&text, self.matrix, &self.input.display().to_string())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Greedy,
    Grid,
}

impl Mode {
    pub fn config(self) -> Result<CoverConfig> {
        let base = match self {
            Mode::Exact => CoverConfig::exact(),
            Mode::Greedy => CoverConfig::greedy(),
            Mode::Grid => CoverConfig::grid(),
        };
        match std::env::var(EXACT_LIMIT_VAR) {
            Ok(v) => {
                let limit: usize = v
                    .trim()
                    .parse()
                    .with_context(|| format!("{EXACT_LIMIT_VAR}={v:?} is not a nonnegative integer"))?;
                Ok(base.with_exact_limit(limit))
            }
            Err(std::env::VarError::NotPresent) => Ok(base),
            Err(e) => bail!("{EXACT_LIMIT_VAR}: {e}"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Greedy => "greedy",
            Mode::Grid => "grid",
        }
    }

    pub fn warn_if_approximate(self, report: &mut Report) {
        if self != Mode::Exact {
            report.warn(format!(
                "{} mode: values are witnessed upper bounds, not exact finite-cover infima",
                self.name()
            ));
        }
    }
}

pub fn load_subset(report: &mut Report, path: &Option<PathBuf>, space: &FiniteMetricSpace) -> Result<SubsetRef> {
    match path {
        Some(p) => {
            let text = report.read(p)?;
            report.param("subset", p.display().to_string());
            input::json(&text, &p.display().to_string())
        }
        None => Ok(space.all()),
    }
}

pub fn load_family(report: &mut Report, path: &Path) -> Result<SetFamily> {
    let text = report.read(path)?;
    input::json(&text, &path.display().to_string())
}

pub fn load_sampled(report: &mut Report, path: &Path) -> Result<SampledFunction> {
    let text = report.read(path)?;
    let what = path.display().to_string();
    SampledFunction::from_pairs(input::indexed_values(&text, &what)?)
        .with_context(|| format!("{what}: invalid function"))
}
