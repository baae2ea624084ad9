//! Run configuration: command-line flags layered over an optional TOML
//! file whose keys are the flag names.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use fibwalk::{AnglePair, Complex64, InitialCondition, SpinorField, WalkModel};
use serde::{Deserialize, Serialize};

use crate::angle::parse_angle;
use crate::error::CliError;

pub const DEFAULT_SIZE: usize = 2048;
pub const DEFAULT_STEPS: usize = 800;
pub const DEFAULT_WIDTH: f64 = 20.0;
pub const DEFAULT_STRIDE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Standard,
    FibCoin,
    FibStep,
}

impl FromStr for ModelKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "standard" => Ok(Self::Standard),
            "fib-coin" => Ok(Self::FibCoin),
            "fib-step" => Ok(Self::FibStep),
            other => Err(CliError::Usage(format!(
                "unknown model '{other}' (expected standard, fib-coin or fib-step)"
            ))),
        }
    }
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Standard => "standard",
            ModelKind::FibCoin => "fib-coin",
            ModelKind::FibStep => "fib-step",
        }
    }

    pub fn fib(&self) -> Option<fibwalk::FibModel> {
        match self {
            ModelKind::Standard => None,
            ModelKind::FibCoin => Some(fibwalk::FibModel::Coin),
            ModelKind::FibStep => Some(fibwalk::FibModel::Step),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitSpec {
    Gaussian { width_sites: f64 },
    Delta { site: usize },
}

impl FromStr for InitSpec {
    type Err = CliError;

    /// `gaussian`, `gaussian:<width>`, or `delta:<site>`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("invalid init '{s}'"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("gaussian", None) => Ok(Self::Gaussian {
                width_sites: DEFAULT_WIDTH,
            }),
            ("gaussian", Some(w)) => {
                let width_sites: f64 = w.parse().map_err(|_| bad())?;
                if width_sites.is_nan() || width_sites < 1.0 {
                    return Err(CliError::Usage(
                        "gaussian width must be at least 1 site".into(),
                    ));
                }
                Ok(Self::Gaussian { width_sites })
            }
            ("delta", Some(m)) => Ok(Self::Delta {
                site: m.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Options shared by every subcommand. All optional so that a config file
/// can fill the gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CommonArgs {
    /// standard, fib-coin or fib-step
    #[arg(long)]
    pub model: Option<String>,
    /// Angle alpha (theta for the standard walk); accepts e.g. pi/4
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "angle_literal")]
    pub alpha: Option<String>,
    /// Angle beta; accepts e.g. pi/8
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "angle_literal")]
    pub beta: Option<String>,
    /// Lattice size n (dx = 2π/n)
    #[arg(long)]
    pub size: Option<usize>,
    /// Number of translation steps
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// gaussian[:width_sites] or delta:site
    #[arg(long)]
    pub init: Option<String>,
    /// Snapshot stride in steps
    #[arg(long)]
    pub stride: Option<usize>,
    /// Reserved; the walks are deterministic
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with the same keys as the flags; flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Config files may give angles as strings ("pi/4") or bare numbers.
fn angle_literal<'de, D: serde::Deserializer<'de>>(de: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Lit {
        Text(String),
        Float(f64),
        Int(i64),
    }
    Ok(Some(match Lit::deserialize(de)? {
        Lit::Text(s) => s,
        Lit::Float(x) => format!("{x:?}"),
        Lit::Int(i) => i.to_string(),
    }))
}

impl CommonArgs {
    fn overlay(self, file: CommonArgs) -> CommonArgs {
        CommonArgs {
            model: self.model.or(file.model),
            alpha: self.alpha.or(file.alpha),
            beta: self.beta.or(file.beta),
            size: self.size.or(file.size),
            steps: self.steps.or(file.steps),
            output_dir: self.output_dir.or(file.output_dir),
            init: self.init.or(file.init),
            stride: self.stride.or(file.stride),
            seed: self.seed.or(file.seed),
            config: self.config,
        }
    }
}

/// Reads a TOML config file. Unknown top-level keys are rejected except
/// those listed in `extra`, which are returned for the caller.
pub fn load_file(path: &Path, extra: &[&str]) -> Result<(CommonArgs, toml::Table), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    let mut rest = toml::Table::new();
    for key in extra {
        if let Some(v) = table.remove(*key) {
            rest.insert(key.to_string(), v);
        }
    }
    let common: CommonArgs = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    Ok((common, rest))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: ModelKind,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_literal: String,
    pub beta_literal: String,
    pub n: usize,
    pub steps: usize,
    pub init: InitSpec,
    pub snapshot_stride: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Resolves flags, then the config file, then defaults.
    pub fn resolve(args: CommonArgs, extra: &[&str]) -> Result<(Self, toml::Table), CliError> {
        let (merged, rest) = match &args.config {
            Some(path) => {
                let (file, rest) = load_file(path, extra)?;
                (args.overlay(file), rest)
            }
            None => (args, toml::Table::new()),
        };
        let model: ModelKind = merged.model.as_deref().unwrap_or("fib-coin").parse()?;
        let alpha_literal = merged.alpha.unwrap_or_else(|| "pi/4".into());
        let beta_literal = merged.beta.unwrap_or_else(|| "pi/8".into());
        let alpha = parse_angle(&alpha_literal)?;
        let beta = parse_angle(&beta_literal)?;
        let n = merged.size.unwrap_or(DEFAULT_SIZE);
        if n < 16 {
            return Err(CliError::Usage("size must be at least 16".into()));
        }
        let steps = merged.steps.unwrap_or(DEFAULT_STEPS);
        let snapshot_stride = merged.stride.unwrap_or(DEFAULT_STRIDE);
        if snapshot_stride == 0 {
            return Err(CliError::Usage("stride must be positive".into()));
        }
        let init: InitSpec = match merged.init {
            Some(s) => s.parse()?,
            None => InitSpec::Gaussian {
                width_sites: DEFAULT_WIDTH,
            },
        };
        Ok((
            Self {
                model,
                alpha,
                beta,
                alpha_literal,
                beta_literal,
                n,
                steps,
                init,
                snapshot_stride,
                seed: merged.seed.unwrap_or(0),
                output_dir: merged.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            },
            rest,
        ))
    }

    pub fn angles(&self) -> Result<AnglePair, CliError> {
        Ok(AnglePair::new(self.alpha, self.beta)?)
    }

    pub fn walk_model(&self) -> Result<WalkModel, CliError> {
        Ok(match self.model {
            ModelKind::Standard => WalkModel::Standard { theta: self.alpha },
            ModelKind::FibCoin => WalkModel::FibCoin(self.angles()?),
            ModelKind::FibStep => WalkModel::FibStep(self.angles()?),
        })
    }

    pub fn initial_field(&self) -> Result<(SpinorField, InitialCondition), CliError> {
        Ok(match self.init {
            InitSpec::Gaussian { width_sites } => (
                SpinorField::default_gaussian(self.n, width_sites)?,
                InitialCondition::Gaussian {
                    center: (self.n / 2) as f64,
                    width_sites,
                },
            ),
            InitSpec::Delta { site } => {
                if site >= self.n {
                    return Err(CliError::Usage(format!(
                        "delta site {site} outside lattice of {}",
                        self.n
                    )));
                }
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let spin = [Complex64::new(s, 0.0), Complex64::new(0.0, s)];
                (
                    SpinorField::delta(self.n, site, spin)?,
                    InitialCondition::Delta { site },
                )
            }
        })
    }
}
