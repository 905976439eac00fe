//! Run configuration read from TOML.

use std::path::{Path, PathBuf};

use hslab_core::constsearch::{Bounds, SearchSpace};
use hslab_core::funcspace::{tensorize, Family, TrialFunction1D, TrialFunctionND};
use hslab_core::inequalities::{CaseId, InequalityCase};
use hslab_core::quadrature::QuadOptions;
use hslab_core::rational::{frac, int, serde_rational, Rational};
use hslab_core::sharpness::{DivergenceRule, Setting};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Identity,
    Check,
    Sharpness,
    Estimate,
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Identity => "identity",
            Command::Check => "check",
            Command::Sharpness => "sharpness",
            Command::Estimate => "estimate",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Leave the timestamp out so repeated runs compare byte for byte.
    #[serde(default)]
    pub comparison: bool,
    #[serde(default)]
    pub quadrature: QuadConfig,
    #[serde(default)]
    pub identity: IdentityConfig,
    #[serde(default)]
    pub check: CheckConfig,
    #[serde(default)]
    pub sharpness: SharpnessConfig,
    #[serde(default)]
    pub estimate: EstimateConfig,
}

/// Quadrature knobs; unset fields keep the library defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graded_panels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_panels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_level: Option<u32>,
}

impl QuadConfig {
    pub fn options(&self) -> Result<QuadOptions, CliError> {
        let d = QuadOptions::default();
        let o = QuadOptions {
            tol: self.tol.unwrap_or(d.tol),
            order: self.order.unwrap_or(d.order),
            grading_ratio: self.grading_ratio.unwrap_or(d.grading_ratio),
            graded_panels: self.graded_panels.unwrap_or(d.graded_panels),
            uniform_panels: self.uniform_panels.unwrap_or(d.uniform_panels),
            max_level: self.max_level.unwrap_or(d.max_level),
        };
        o.validate()
            .map_err(|e| CliError::Usage(format!("[quadrature] {e}")))?;
        Ok(o)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    pub k_max: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig {
            k_max: 8,
            n_max: 4,
            trials: 100,
            seed: 7,
        }
    }
}

/// A tensor trial: vertical factor on x_n, transverse factors on the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialSpec {
    pub vertical: Family,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transverse: Vec<Family>,
}

impl TrialSpec {
    pub fn build(&self) -> hslab_core::Result<TrialFunctionND> {
        let v = TrialFunction1D::from_family(self.vertical.clone())?;
        let t = self
            .transverse
            .iter()
            .map(|f| TrialFunction1D::from_family(f.clone()))
            .collect::<hslab_core::Result<Vec<_>>>()?;
        let n = t.len() + 1;
        tensorize(v, t, n)
    }

    fn bumps(lo: f64, hi: f64, half_width: f64, degree: u32, n: usize) -> Self {
        TrialSpec {
            vertical: Family::PolyBump {
                a: lo,
                b: hi,
                degree,
            },
            transverse: (1..n)
                .map(|_| Family::PolyBump {
                    a: -half_width,
                    b: half_width,
                    degree,
                })
                .collect(),
        }
    }

    /// A bump in the lower half of the unit vertical range with enough
    /// derivatives for the case.
    pub fn default_for(case: &InequalityCase) -> Self {
        let order = match case.id {
            CaseId::Classical1 => 1,
            CaseId::Second2 => 2,
            _ => case.m.unwrap_or(2),
        };
        let n = case.n.unwrap_or(1).max(1) as usize;
        Self::bumps(0.1, 0.4, 0.3, order + 4, n)
    }

    pub fn default_sweep(setting: Setting, n: usize) -> Self {
        match setting {
            Setting::Prop33 => Self::bumps(0.05, 0.1, 0.1, 6, n),
            Setting::Prop32 => Self::bumps(0.4, 0.6, 0.1, 6, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckCase {
    pub case: InequalityCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<TrialSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub cases: Vec<CheckCase>,
    /// Largest relative change allowed when the tolerance shrinks tenfold.
    pub stability: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        let strip = InequalityCase::main_thm(2, 2, 1, int(2), int(2), int(1));
        let pq_violating = InequalityCase::main_thm(3, 2, 1, int(2), int(8), int(1));
        CheckConfig {
            cases: vec![
                CheckCase {
                    case: strip,
                    trial: None,
                },
                CheckCase {
                    case: pq_violating,
                    trial: None,
                },
                CheckCase {
                    case: InequalityCase::one_d(2, 1, int(2), int(0)),
                    trial: None,
                },
            ],
            stability: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub setting: Setting,
    pub case: InequalityCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<TrialSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticalConfig {
    pub enabled: bool,
    pub p: f64,
    pub alpha_grid: Vec<f64>,
    pub eps_cut: f64,
    /// ε runs over 10^{−from} .. 10^{−to}.
    pub eps_decades: (i32, i32),
}

impl Default for CriticalConfig {
    fn default() -> Self {
        CriticalConfig {
            enabled: true,
            p: 2.0,
            alpha_grid: vec![1.0, 0.8, 0.6, 0.5, 0.45, 0.4, 0.3],
            eps_cut: 0.01,
            eps_decades: (3, 10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CancelingConfig {
    pub enabled: bool,
    #[serde(with = "serde_rational")]
    pub p: Rational,
    pub m: u32,
    pub k: u32,
    pub alpha_log: f64,
    pub eps_cut: f64,
    pub eps_decades: (i32, i32),
    pub family_alpha_grid: Vec<f64>,
    pub family_eps_cut: f64,
    /// Largest relative change of the family maximum when the cutoff halves.
    pub family_tolerance: f64,
}

impl Default for CancelingConfig {
    fn default() -> Self {
        CancelingConfig {
            enabled: true,
            p: int(2),
            m: 2,
            k: 1,
            alpha_log: 0.5,
            eps_cut: 0.01,
            eps_decades: (3, 10),
            family_alpha_grid: vec![0.25, 0.5, 0.75, 1.0],
            family_eps_cut: 0.1,
            family_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessConfig {
    pub lambda_grid: Vec<f64>,
    pub sweeps: Vec<SweepConfig>,
    pub critical: CriticalConfig,
    pub canceling: CancelingConfig,
    pub rule: DivergenceRule,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        let mut sweeps = Vec::new();
        for r in [int(0), frac(1, 2), int(1), frac(3, 2), int(2)] {
            sweeps.push(SweepConfig {
                setting: Setting::Prop33,
                case: InequalityCase::main_thm(2, 2, 1, int(2), int(2), r),
                trial: None,
            });
        }
        for q in [4, 6, 8] {
            sweeps.push(SweepConfig {
                setting: Setting::Prop32,
                case: InequalityCase::main_thm(3, 2, 1, int(2), int(q), int(1)),
                trial: None,
            });
        }
        SharpnessConfig {
            lambda_grid: vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            sweeps,
            critical: CriticalConfig::default(),
            canceling: CancelingConfig::default(),
            rule: DivergenceRule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    pub case: InequalityCase,
    pub space: SearchSpace,
    pub tol: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            case: InequalityCase::one_d(2, 1, int(2), int(0)),
            space: SearchSpace::bump_1d(3, Bounds::new(0.01, 1.0), Bounds::new(0.1, 10.0), 200, 7),
            tol: 1e-6,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Usage(format!("cannot serialize config: {e}")))
    }
}

/// Parses "2,4,8,16".
pub fn parse_lambda_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let grid = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("lambda grid entry {t:?} is not a number")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    check_lambda_grid(&grid)?;
    Ok(grid)
}

pub fn check_lambda_grid(grid: &[f64]) -> Result<(), CliError> {
    if grid.len() < 4 {
        return Err(CliError::Usage(format!(
            "lambda grid needs at least 4 points, got {}",
            grid.len()
        )));
    }
    if grid[0] <= 1.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Usage(
            "lambda grid must be strictly increasing and above 1".into(),
        ));
    }
    Ok(())
}
