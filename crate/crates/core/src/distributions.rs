//! Probability generating functions for independent Poisson vectors,
//! multinomial vectors and arbitrary finite joint pmf tables.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::coefficient::{Coefficient, CoefficientMode, Rational};
use crate::error::{Error, Result};
use crate::lattice::{ExponentVector, TruncationSpec};
use crate::series::TruncatedSeries;

/// Allowed deviation of a float-mode probability mass from one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Distribution of the nonnegative integer random vector `X`.
#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec {
    /// Independent `X_r ~ Poisson(λ_r)`.
    Poisson { lambdas: Vec<f64> },
    /// `X ~ Multinomial(N; p_1, …, p_d)`.
    Multinomial { trials: u64, probs: Vec<Rational> },
    /// An explicit finite joint pmf.
    Table {
        entries: BTreeMap<ExponentVector, Rational>,
    },
}

fn mass_close_to_one(mass: &Rational) -> bool {
    let dev = (mass - <Rational as Coefficient>::one()).abs();
    ToPrimitive::to_f64(&dev).is_some_and(|d| d <= MASS_TOLERANCE)
}

impl DistributionSpec {
    pub fn poisson(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidDistribution("poisson: no rates given".into()));
        }
        if let Some((r, l)) = lambdas.iter().enumerate().find(|(_, l)| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "poisson: rate {r} is {l}, must be positive and finite"
            )));
        }
        Ok(DistributionSpec::Poisson { lambdas })
    }

    pub fn multinomial(trials: u64, probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("multinomial: no probabilities given".into()));
        }
        if let Some((r, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| Signed::is_negative(*p) || **p > <Rational as Coefficient>::one())
        {
            return Err(Error::InvalidDistribution(format!(
                "multinomial: probability {r} is {p}, must lie in [0, 1]"
            )));
        }
        let mass: Rational = probs.iter().sum();
        if !mass_close_to_one(&mass) {
            return Err(Error::InvalidDistribution(format!(
                "multinomial: probabilities sum to {mass}, not 1"
            )));
        }
        Ok(DistributionSpec::Multinomial { trials, probs })
    }

    pub fn table(entries: BTreeMap<ExponentVector, Rational>) -> Result<Self> {
        let Some(first) = entries.keys().next() else {
            return Err(Error::InvalidDistribution("table: no entries".into()));
        };
        let d = first.len();
        if d == 0 {
            return Err(Error::InvalidDistribution("table: zero-dimensional entries".into()));
        }
        for (j, p) in &entries {
            if j.len() != d {
                return Err(Error::InvalidDistribution(format!(
                    "table: entry {j} has dimension {}, expected {d}",
                    j.len()
                )));
            }
            if Signed::is_negative(p) {
                return Err(Error::InvalidDistribution(format!(
                    "table: entry {j} has negative probability {p}"
                )));
            }
        }
        let mass: Rational = entries.values().sum();
        if !mass_close_to_one(&mass) {
            return Err(Error::InvalidDistribution(format!(
                "table: probabilities sum to {mass}, not 1"
            )));
        }
        Ok(DistributionSpec::Table { entries })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DistributionSpec::Poisson { .. } => "poisson",
            DistributionSpec::Multinomial { .. } => "multinomial",
            DistributionSpec::Table { .. } => "table",
        }
    }

    /// Dimension `d` of `X`.
    pub fn dimension(&self) -> usize {
        match self {
            DistributionSpec::Poisson { lambdas } => lambdas.len(),
            DistributionSpec::Multinomial { probs, .. } => probs.len(),
            DistributionSpec::Table { entries } => entries.keys().next().map_or(0, |j| j.len()),
        }
    }

    /// Checks the mode-dependent invariants: Poisson has no exact form and
    /// exact-mode masses must equal one exactly.
    pub fn validate_for(&self, mode: CoefficientMode) -> Result<()> {
        if mode == CoefficientMode::Float {
            return Ok(());
        }
        let mass: Rational = match self {
            DistributionSpec::Poisson { .. } => {
                return Err(Error::ExactModeUnsupported(
                    "the Poisson distribution (its pmf involves exp(-λ))",
                ))
            }
            DistributionSpec::Multinomial { probs, .. } => probs.iter().sum(),
            DistributionSpec::Table { entries } => entries.values().sum(),
        };
        if num_traits::One::is_one(&mass) {
            Ok(())
        } else {
            Err(Error::InvalidDistribution(format!(
                "{}: probabilities sum to {mass}, exact mode requires exactly 1",
                self.kind()
            )))
        }
    }

    /// Per-coordinate bound of the support, if finite: `N` for multinomial,
    /// the largest value seen for a table, `None` for Poisson.
    pub fn natural_support_bounds(&self) -> Option<ExponentVector> {
        match self {
            DistributionSpec::Poisson { .. } => None,
            DistributionSpec::Multinomial { trials, probs } => {
                Some(ExponentVector::new(
                    probs.iter().map(|p| if p.is_zero() { 0 } else { *trials }).collect(),
                ))
            }
            DistributionSpec::Table { entries } => Some(
                entries
                    .iter()
                    .filter(|(_, p)| !p.is_zero())
                    .fold(ExponentVector::zeros(self.dimension()), |acc, (j, _)| {
                        acc.componentwise_max(j)
                    }),
            ),
        }
    }

    /// Whether `P(X = j) > 0` (structurally, independent of rounding).
    pub fn in_support(&self, j: &ExponentVector) -> bool {
        if j.len() != self.dimension() {
            return false;
        }
        match self {
            DistributionSpec::Poisson { .. } => true,
            DistributionSpec::Multinomial { trials, probs } => {
                j.iter().sum::<u64>() == *trials
                    && j.iter().zip(probs).all(|(&x, p)| x == 0 || !p.is_zero())
            }
            DistributionSpec::Table { entries } => entries.get(j).is_some_and(|p| !p.is_zero()),
        }
    }

    /// Default box: for Poisson `⌈λ + 10√λ + 20⌉` per variable, which leaves
    /// a neglected tail below `1e-12`; the support box otherwise.
    pub fn default_truncation(&self) -> TruncationSpec {
        match self {
            DistributionSpec::Poisson { lambdas } => TruncationSpec::new(
                lambdas
                    .iter()
                    .map(|l| (l + 10.0 * l.sqrt() + 20.0).ceil() as u64)
                    .collect::<Vec<_>>(),
            ),
            _ => TruncationSpec::new(
                self.natural_support_bounds()
                    .expect("finite families have support bounds"),
            ),
        }
    }

    /// The p.g.f. of `X`. Poisson is truncated to `trunc` (or the default
    /// box); the finite families are exact polynomials and ignore `trunc`.
    pub fn pgf<C: Coefficient>(&self, trunc: Option<&TruncationSpec>) -> Result<TruncatedSeries<C>> {
        self.validate_for(C::MODE)?;
        match self {
            DistributionSpec::Poisson { lambdas } => {
                let default;
                let trunc = match trunc {
                    Some(t) => t,
                    None => {
                        default = self.default_truncation();
                        &default
                    }
                };
                poisson_pgf(lambdas, trunc)
            }
            DistributionSpec::Multinomial { trials, probs } => multinomial_pgf(*trials, probs),
            DistributionSpec::Table { entries } => table_pgf(entries),
        }
    }

    /// Polynomial with coefficient one on every support point inside `bounds`.
    pub fn support_indicator(&self, bounds: &ExponentVector) -> Result<TruncatedSeries<Rational>> {
        let points: Vec<ExponentVector> = match self {
            DistributionSpec::Poisson { .. } => box_points(bounds),
            DistributionSpec::Multinomial { .. } => box_points(bounds)
                .into_iter()
                .filter(|j| self.in_support(j))
                .collect(),
            DistributionSpec::Table { entries } => entries
                .iter()
                .filter(|(j, p)| !p.is_zero() && j.le_componentwise(bounds))
                .map(|(j, _)| j.clone())
                .collect(),
        };
        TruncatedSeries::polynomial(self.dimension(), points.into_iter().map(|j| (j, <Rational as Coefficient>::one())))
    }
}

fn box_points(bounds: &ExponentVector) -> Vec<ExponentVector> {
    let mut out = vec![Vec::with_capacity(bounds.len())];
    for &b in bounds.iter() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(ExponentVector::new).collect()
}

/// `∏_r exp(λ_r (t_r − 1))`, truncated to `trunc`. Float mode only.
pub fn poisson_pgf<C: Coefficient>(lambdas: &[f64], trunc: &TruncationSpec) -> Result<TruncatedSeries<C>> {
    if C::MODE == CoefficientMode::Exact {
        return Err(Error::ExactModeUnsupported(
            "the Poisson distribution (its pmf involves exp(-λ))",
        ));
    }
    if trunc.num_vars() != lambdas.len() {
        return Err(Error::DimensionMismatch {
            context: "poisson_pgf truncation",
            expected: lambdas.len(),
            actual: trunc.num_vars(),
        });
    }
    if let Some(l) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::InvalidDistribution(format!("poisson: rate {l} must be positive")));
    }
    let mut pgf = TruncatedSeries::one(trunc.clone());
    for (r, &lambda) in lambdas.iter().enumerate() {
        let rate = C::from_f64(lambda)?;
        let exponent = TruncatedSeries::linear_combine(
            &rate,
            &TruncatedSeries::variable(r, trunc.clone())?,
            &rate.neg(),
            &TruncatedSeries::one(trunc.clone()),
        )?;
        pgf = pgf.mul(&exponent.exp_truncated()?)?;
    }
    Ok(pgf)
}

/// `(p_1 t_1 + … + p_d t_d)^N` as an exact polynomial.
pub fn multinomial_pgf<C: Coefficient>(trials: u64, probs: &[Rational]) -> Result<TruncatedSeries<C>> {
    let d = probs.len();
    let linear = TruncatedSeries::polynomial(
        d,
        probs
            .iter()
            .enumerate()
            .map(|(r, p)| (ExponentVector::unit(d, r), C::from_rational(p))),
    )?
    .retruncate(TruncationSpec::uniform(d, trials))?;
    linear.pow(trials)
}

/// `Σ_j P(X = j) t^j` for a finite table.
pub fn table_pgf<C: Coefficient>(
    entries: &BTreeMap<ExponentVector, Rational>,
) -> Result<TruncatedSeries<C>> {
    let d = entries.keys().next().map_or(0, |j| j.len());
    if let Some((j, p)) = entries.iter().find(|(_, p)| Signed::is_negative(*p)) {
        return Err(Error::InvalidDistribution(format!(
            "table: entry {j} has negative probability {p}"
        )));
    }
    TruncatedSeries::polynomial(
        d,
        entries.iter().map(|(j, p)| (j.clone(), C::from_rational(p))),
    )
}

/// Upper bound on the probability mass outside the box `trunc` for
/// independent Poisson variables: `Σ_r P(X_r > b_r)`.
pub fn poisson_tail_bound(lambdas: &[f64], trunc: &TruncationSpec) -> f64 {
    lambdas
        .iter()
        .enumerate()
        .map(|(r, &lambda)| poisson_upper_tail(lambda, trunc.bound(r)))
        .sum()
}

/// `P(X > bound)` for `X ~ Poisson(λ)`, summed term by term from
/// `bound + 1` so small tails keep full relative precision.
fn poisson_upper_tail(lambda: f64, bound: u64) -> f64 {
    let first = bound + 1;
    let ln_fact: f64 = (2..=first).map(|i| (i as f64).ln()).sum();
    let mut term = (-lambda + first as f64 * lambda.ln() - ln_fact).exp();
    let mut sum = 0.0;
    let mut j = first;
    loop {
        sum += term;
        j += 1;
        term *= lambda / j as f64;
        if term == 0.0 || (term < sum * 1e-17 && (j as f64) > lambda) {
            break;
        }
    }
    sum
}
