//! Job configuration files.
//!
//! A config is TOML. It holds either a single job at top level or a list of
//! jobs under `[[jobs]]`:
//!
//! ```toml
//! matrix = [[1, 1]]
//! mode = "float"
//!
//! [distribution.poisson]
//! lambdas = [1.0, 2.0]
//!
//! [[queries]]
//! k = [5]
//! s = [1, 0]
//! pmf = true
//! ```
//!
//! Probabilities may be written as numbers or as strings (`"1/3"`,
//! `"0.25"`); both are read as exact rationals by literal decimal expansion.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::coefficient::{parse_rational, CoefficientMode, Rational};
use crate::distributions::DistributionSpec;
use crate::lattice::{ExponentVector, TransformMatrix};
use crate::query::ConditionalQuery;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
pub enum OutputFormat {
    #[default]
    #[serde(rename = "human")]
    Human,
    #[serde(rename = "json", alias = "json-like", alias = "machine-readable")]
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(OutputFormat::Human),
            "json" | "json-like" | "machine-readable" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format {other:?}, expected \"human\" or \"json\"")),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Number {
    fn to_rational(&self) -> Result<Rational, String> {
        match self {
            Number::Text(s) => parse_rational(s).map_err(|e| e.to_string()),
            Number::Int(i) => Ok(Rational::from_integer((*i).into())),
            Number::Float(f) if f.is_finite() => {
                parse_rational(&format!("{f}")).map_err(|e| e.to_string())
            }
            Number::Float(f) => Err(format!("{f} is not a finite number")),
        }
    }

    fn to_f64(&self) -> Result<f64, String> {
        match self {
            Number::Text(s) => {
                let q = parse_rational(s).map_err(|e| e.to_string())?;
                Ok(crate::coefficient::Coefficient::to_f64(&q))
            }
            Number::Int(i) => Ok(*i as f64),
            Number::Float(f) => Ok(*f),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    x: Vec<u64>,
    p: Number,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawDistribution {
    Poisson {
        lambdas: Vec<Number>,
    },
    Multinomial {
        #[serde(rename = "N")]
        trials: u64,
        probs: Vec<Number>,
    },
    Table {
        entries: Vec<RawEntry>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    k: Vec<u64>,
    s: Option<Vec<u64>>,
    support_bounds: Option<Vec<u64>>,
    #[serde(default)]
    pmf: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    name: Option<String>,
    mode: Option<CoefficientMode>,
    output: Option<OutputFormat>,
    matrix: Vec<Vec<u64>>,
    distribution: RawDistribution,
    #[serde(default)]
    queries: Vec<RawQuery>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMulti {
    output: Option<OutputFormat>,
    jobs: Vec<RawJob>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuerySpec {
    pub query: ConditionalQuery,
    /// Whether the conditional pmf should be listed.
    pub pmf: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub name: Option<String>,
    pub matrix: TransformMatrix,
    pub distribution: DistributionSpec,
    pub queries: Vec<QuerySpec>,
    pub mode: CoefficientMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub jobs: Vec<JobConfig>,
    pub output: OutputFormat,
}

impl Config {
    /// Parses and validates a config. Parse errors carry the line and column
    /// from the TOML reader; validation errors name the offending field.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let (raw_jobs, output, prefix_jobs) = if table.contains_key("jobs") {
            let multi: RawMulti =
                toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
            (multi.jobs, multi.output, true)
        } else {
            let job: RawJob = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
            let output = job.output;
            (vec![job], output, false)
        };
        if raw_jobs.is_empty() {
            return Err(invalid("jobs", "no jobs given"));
        }
        let jobs = raw_jobs
            .into_iter()
            .enumerate()
            .map(|(i, raw)| {
                let prefix = if prefix_jobs { format!("jobs[{i}].") } else { String::new() };
                JobConfig::from_raw(raw, &prefix)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Config {
            jobs,
            output: output.unwrap_or_default(),
        })
    }

    /// Forces every job into `mode`, revalidating each job.
    pub fn with_mode(mut self, mode: CoefficientMode) -> Result<Config, ConfigError> {
        let multi = self.jobs.len() > 1;
        for (i, job) in self.jobs.iter_mut().enumerate() {
            job.mode = mode;
            let prefix = if multi { format!("jobs[{i}].") } else { String::new() };
            job.check_mode(&prefix)?;
        }
        Ok(self)
    }
}

impl JobConfig {
    fn from_raw(raw: RawJob, prefix: &str) -> Result<JobConfig, ConfigError> {
        let field = |name: &str| format!("{prefix}{name}");
        let matrix = TransformMatrix::new(raw.matrix).map_err(|e| invalid(field("matrix"), e))?;

        let distribution = match raw.distribution {
            RawDistribution::Poisson { lambdas } => {
                let lambdas = lambdas
                    .iter()
                    .enumerate()
                    .map(|(r, l)| l.to_f64().map_err(|e| invalid(field(&format!("distribution.poisson.lambdas[{r}]")), e)))
                    .collect::<Result<Vec<_>, _>>()?;
                DistributionSpec::poisson(lambdas)
            }
            RawDistribution::Multinomial { trials, probs } => {
                let probs = probs
                    .iter()
                    .enumerate()
                    .map(|(r, p)| {
                        p.to_rational()
                            .map_err(|e| invalid(field(&format!("distribution.multinomial.probs[{r}]")), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                DistributionSpec::multinomial(trials, probs)
            }
            RawDistribution::Table { entries } => {
                let mut map = BTreeMap::new();
                for (i, entry) in entries.iter().enumerate() {
                    let p = entry
                        .p
                        .to_rational()
                        .map_err(|e| invalid(field(&format!("distribution.table.entries[{i}].p")), e))?;
                    let x = ExponentVector::new(entry.x.clone());
                    if map.insert(x.clone(), p).is_some() {
                        return Err(invalid(
                            field(&format!("distribution.table.entries[{i}].x")),
                            format!("duplicate entry {x}"),
                        ));
                    }
                }
                DistributionSpec::table(map)
            }
        }
        .map_err(|e| invalid(field("distribution"), e))?;

        if distribution.dimension() != matrix.cols() {
            return Err(invalid(
                field("distribution"),
                format!(
                    "dimension {} does not match the {} columns of the matrix",
                    distribution.dimension(),
                    matrix.cols()
                ),
            ));
        }

        let queries = raw
            .queries
            .into_iter()
            .enumerate()
            .map(|(i, q)| {
                let d = matrix.cols();
                let mut query = ConditionalQuery::new(q.k, q.s.unwrap_or_else(|| vec![0; d]));
                if let Some(b) = q.support_bounds {
                    query = query.with_support_bounds(b);
                }
                query
                    .validate(&matrix)
                    .map_err(|e| invalid(field(&format!("queries[{i}]")), e))?;
                Ok(QuerySpec { query, pmf: q.pmf })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;

        let mode = raw.mode.unwrap_or(match distribution {
            DistributionSpec::Poisson { .. } => CoefficientMode::Float,
            _ => CoefficientMode::Exact,
        });
        let job = JobConfig {
            name: raw.name,
            matrix,
            distribution,
            queries,
            mode,
        };
        job.check_mode(prefix)?;
        Ok(job)
    }

    fn check_mode(&self, prefix: &str) -> Result<(), ConfigError> {
        if self.mode == CoefficientMode::Exact {
            if let DistributionSpec::Poisson { .. } = self.distribution {
                return Err(invalid(
                    format!("{prefix}mode"),
                    "exact mode is not available for Poisson distributions: \
                     the pmf e^{-λ} λ^j / j! is not rational; use mode = \"float\"",
                ));
            }
        }
        self.distribution
            .validate_for(self.mode)
            .map_err(|e| invalid(format!("{prefix}distribution"), e))
    }
}
