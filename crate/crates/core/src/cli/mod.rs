//! Batch front end: run the queries of a [`Config`] and collect a [`Report`].

mod config;
mod report;

pub use config::{Config, ConfigError, JobConfig, OutputFormat, QuerySpec};
pub use report::{ErrorInfo, JobReport, QueryRow, Report};

use rayon::prelude::*;

use crate::coefficient::{Coefficient, CoefficientMode, Rational};
use crate::conditioning::{
    closed_form_moment, conditional_factorial_moment, conditional_pmf, probability_of_y,
};
use crate::error::Error;
use crate::oracle::{fiber_size, oracle_conditional_moment};

pub const DEFAULT_MAX_PMF_ROWS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    /// Also compute the brute-force oracle value for every moment.
    pub verify: bool,
    /// Largest fiber for which a requested pmf is listed.
    pub max_pmf_rows: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            verify: false,
            max_pmf_rows: DEFAULT_MAX_PMF_ROWS,
        }
    }
}

/// Runs every job. Queries within a job are evaluated in parallel; rows come
/// back in config order.
pub fn run(config: &Config, options: &RunOptions) -> Report {
    let jobs = config
        .jobs
        .iter()
        .enumerate()
        .map(|(i, job)| match job.mode {
            CoefficientMode::Exact => run_job::<Rational>(i, job, options),
            CoefficientMode::Float => run_job::<f64>(i, job, options),
        })
        .collect();
    Report { jobs }
}

fn run_job<C: Coefficient>(index: usize, job: &JobConfig, options: &RunOptions) -> JobReport {
    let rows = job
        .queries
        .par_iter()
        .enumerate()
        .map(|(qi, spec)| run_query::<C>(qi, job, spec, options))
        .collect();
    JobReport {
        job_index: index,
        name: job.name.clone(),
        distribution: job.distribution.kind().to_string(),
        mode: job.mode,
        rows,
    }
}

fn run_query<C: Coefficient>(
    index: usize,
    job: &JobConfig,
    spec: &QuerySpec,
    options: &RunOptions,
) -> QueryRow {
    let query = &spec.query;
    let mut row = QueryRow::new(index, query);
    let fail = |mut row: QueryRow, e: Error| {
        row.error = Some(ErrorInfo::from(&e));
        row
    };

    let size = match fiber_size(&job.distribution, &job.matrix, query) {
        Ok(n) => n,
        Err(e) => return fail(row, e),
    };
    row.fiber_size = Some(size);

    let prob_y: C = match probability_of_y(&job.distribution, &job.matrix, query) {
        Ok(p) => p,
        Err(e) => return fail(row, e),
    };
    row.prob_y = Some(prob_y.to_report_string());

    let generic: C = match conditional_factorial_moment(&job.distribution, &job.matrix, query) {
        Ok(v) => v,
        Err(e) => return fail(row, e),
    };
    row.moment_generic = Some(generic.to_report_string());

    let mut checks = Vec::new();
    match closed_form_moment::<C>(&job.distribution, &job.matrix, query) {
        Some(Ok(v)) => {
            row.moment_closed_form = Some(v.to_report_string());
            checks.push(v);
        }
        Some(Err(e)) => return fail(row, e),
        None => {}
    }
    if options.verify {
        match oracle_conditional_moment::<C>(&job.distribution, &job.matrix, query) {
            Ok(v) => {
                row.moment_oracle = Some(v.to_report_string());
                checks.push(v);
            }
            Err(e) => return fail(row, e),
        }
    }
    if !checks.is_empty() {
        row.agree = Some(checks.iter().all(|v| v.approx_eq(&generic)));
    }

    if spec.pmf {
        if size > options.max_pmf_rows {
            row.pmf_omitted = Some(format!(
                "fiber has {size} points, above the limit of {}",
                options.max_pmf_rows
            ));
        } else {
            match conditional_pmf::<C>(&job.distribution, &job.matrix, query) {
                Ok(pmf) => {
                    row.pmf = Some(
                        pmf.iter()
                            .map(|(j, p)| (j.as_slice().to_vec(), p.to_report_string()))
                            .collect(),
                    )
                }
                Err(e) => return fail(row, e),
            }
        }
    }
    row
}
