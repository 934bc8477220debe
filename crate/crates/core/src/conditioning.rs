//! Conditional distribution of `X` given `Y = A X = k`, and conditional
//! factorial moments
//!
//! ```text
//! E[X_1^{(s_1)} ⋯ X_d^{(s_d)} | Y = k]
//!     = [z^k] ∂_t^s G_X(t_1 z^{A e_1}, …, t_d z^{A e_d}) |_{t=1}
//!       / [z^k] G_X(z^{A e_1}, …, z^{A e_d})
//! ```
//!
//! The generic pipeline evaluates this through the series machinery. The
//! Poisson and multinomial closed forms are separate routes to the same
//! number.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coefficient::{Coefficient, Rational};
use crate::distributions::{poisson_pgf, DistributionSpec};
use crate::error::{Error, Result};
use crate::lattice::{check_len, ExponentVector, TransformMatrix, TruncationSpec};
use crate::query::ConditionalQuery;
use crate::series::TruncatedSeries;
use crate::transform::{joint_pgf, monomial_substitute};

/// The box `[0, b]` that contains every fiber point of positive
/// probability: per coordinate the least of the fiber bound `B_r`, the
/// query's support bound and the distribution's own support bound.
fn fiber_box(dist: &DistributionSpec, a: &TransformMatrix, query: &ConditionalQuery) -> Result<ExponentVector> {
    let fiber = a.fiber_bounds(&query.k)?;
    let natural = dist.natural_support_bounds();
    (0..a.cols())
        .map(|r| {
            [
                fiber[r],
                query.support_bounds.as_ref().map(|b| b[r]),
                natural.as_ref().map(|b| b[r]),
            ]
            .into_iter()
            .flatten()
            .min()
            .ok_or(Error::UnboundedFiber { var: r })
        })
        .collect::<Result<Vec<_>>>()
        .map(ExponentVector::new)
}

fn check_inputs(dist: &DistributionSpec, a: &TransformMatrix, query: &ConditionalQuery) -> Result<()> {
    query.validate(a)?;
    check_len("distribution dimension (columns of A)", a.cols(), dist.dimension())
}

/// p.g.f. of `X` restricted to the fiber box, as a polynomial.
///
/// Restricting `X` to the box changes no quantity conditioned on `Y = k`,
/// since every fiber point of positive probability lies inside it. It makes
/// the infinite Poisson case finite without approximation in the fiber
/// directions.
fn restricted_pgf<C: Coefficient>(
    dist: &DistributionSpec,
    bounds: &ExponentVector,
) -> Result<TruncatedSeries<C>> {
    dist.validate_for(C::MODE)?;
    let trunc = TruncationSpec::new(bounds.clone());
    let pgf = match dist {
        DistributionSpec::Poisson { lambdas } => poisson_pgf(lambdas, &trunc)?,
        _ => dist.pgf::<C>(None)?.retruncate(trunc)?,
    };
    Ok(pgf.into_finite_support())
}

fn classify_zero(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    k: &ExponentVector,
    bounds: &ExponentVector,
) -> Result<Error> {
    let indicator = dist.support_indicator(bounds)?;
    let hits = monomial_substitute(&indicator, a, &TruncationSpec::new(k.clone()))?;
    Ok(if hits.extract_coefficient(k)?.is_zero() {
        Error::EmptyFiber
    } else {
        Error::ZeroProbability
    })
}

struct Prepared<C> {
    gx: TruncatedSeries<C>,
    bounds: ExponentVector,
    prob_y: C,
}

fn prepare<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<Prepared<C>> {
    check_inputs(dist, a, query)?;
    let bounds = fiber_box(dist, a, query)?;
    let gx = restricted_pgf::<C>(dist, &bounds)?;
    let gy = monomial_substitute(&gx, a, &TruncationSpec::new(query.k.clone()))?;
    let prob_y = gy.extract_coefficient(&query.k)?;
    if prob_y.is_exact_zero() {
        return Err(classify_zero(dist, a, &query.k, &bounds)?);
    }
    Ok(Prepared { gx, bounds, prob_y })
}

/// `G_Y` truncated to the box `[0, k]`.
pub fn pgf_of_y<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    k: &ExponentVector,
) -> Result<TruncatedSeries<C>> {
    let query = ConditionalQuery::distribution(k.clone(), a.cols());
    pgf_of_y_for_query(dist, a, &query)
}

/// As [`pgf_of_y`], honouring the query's support bounds.
pub fn pgf_of_y_for_query<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<TruncatedSeries<C>> {
    check_inputs(dist, a, query)?;
    let bounds = fiber_box(dist, a, query)?;
    let gx = restricted_pgf::<C>(dist, &bounds)?;
    monomial_substitute(&gx, a, &TruncationSpec::new(query.k.clone()))
}

/// `P(Y = k)`, failing with `EmptyFiber` / `ZeroProbability` when it vanishes.
pub fn probability_of_y<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<C> {
    prepare::<C>(dist, a, query).map(|p| p.prob_y)
}

/// `{ j ↦ P(X = j | Y = k) }` over the fiber points of positive probability,
/// read off as `[z^k] G_{X,Y}(t; z) / [z^k] G_Y(z)`.
pub fn conditional_pmf<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<BTreeMap<ExponentVector, C>> {
    let prep = prepare::<C>(dist, a, query)?;
    let ztrunc = TruncationSpec::new(query.k.clone());
    let joint = joint_pgf(&prep.gx, a, &TruncationSpec::new(prep.bounds.clone()), &ztrunc)?;
    let conditional = joint.coefficient_of_tail(a.cols(), &query.k)?;
    conditional
        .terms()
        .map(|(j, p)| Ok((j.clone(), p.checked_div(&prep.prob_y)?)))
        .collect()
}

/// Conditional factorial moment through the generic series pipeline:
/// joint p.g.f., `t`-derivatives, `t = 1`, then `[z^k]`, divided by
/// `[z^k] G_Y`.
///
/// When `k − A s` has a negative entry every surviving term of the
/// differentiated joint p.g.f. lies outside the `z`-box, so the result is
/// exactly zero without special-casing.
pub fn conditional_factorial_moment<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<C> {
    let prep = prepare::<C>(dist, a, query)?;
    let ztrunc = TruncationSpec::new(query.k.clone());
    // The t-box must admit the derivative orders; G_X has finite support so
    // widening it is free.
    let ttrunc = TruncationSpec::new(prep.bounds.componentwise_max(&query.s));
    let mut joint = joint_pgf(&prep.gx, a, &ttrunc, &ztrunc)?;
    for (r, &order) in query.s.iter().enumerate() {
        joint = joint.partial_derivative(r, order)?;
    }
    let at_ones = joint.evaluate_leading(&vec![C::one(); a.cols()])?;
    let numerator = at_ones.extract_coefficient(&query.k)?;
    numerator.checked_div(&prep.prob_y)
}

/// Closed form for independent Poissons:
/// `∏_r λ_r^{s_r} · [z^{k − A s}] G_Y / [z^k] G_Y`, and `0` whenever some
/// `k_i − Σ_r a_ir s_r < 0`.
///
/// Only `G_Y` is needed. Zero columns of `A` contribute the factor
/// `exp(λ_r (1 − 1)) = 1` to `G_Y` and are dropped from it, so no support
/// bound is required; `query.support_bounds` is ignored and the result is
/// always the untruncated value.
pub fn poisson_conditional_moment(
    lambdas: &[f64],
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<f64> {
    let dist = DistributionSpec::poisson(lambdas.to_vec())?;
    check_inputs(&dist, a, query)?;
    let active: Vec<usize> = (0..a.cols()).filter(|&r| !a.is_zero_column(r)).collect();
    let ztrunc = TruncationSpec::new(query.k.clone());

    let gy: TruncatedSeries<f64> = if active.is_empty() {
        TruncatedSeries::one(ztrunc.clone())
    } else {
        let sub_a = TransformMatrix::new(
            (0..a.rows())
                .map(|i| active.iter().map(|&r| a.get(i, r)).collect())
                .collect(),
        )?;
        let sub_lambdas: Vec<f64> = active.iter().map(|&r| lambdas[r]).collect();
        let bounds: Vec<u64> = sub_a
            .fiber_bounds(&query.k)?
            .into_iter()
            .map(|b| b.expect("active columns are nonzero"))
            .collect();
        let gx = poisson_pgf::<f64>(&sub_lambdas, &TruncationSpec::new(bounds.clone()))?;
        let gy = monomial_substitute(&gx, &sub_a, &ztrunc)?;
        if gy.extract_coefficient(&query.k)? == 0.0 {
            let sub_dist = DistributionSpec::poisson(sub_lambdas)?;
            return Err(classify_zero(&sub_dist, &sub_a, &query.k, &ExponentVector::new(bounds))?);
        }
        gy
    };
    let prob_y = gy.extract_coefficient(&query.k)?;
    if prob_y == 0.0 {
        return Err(Error::EmptyFiber);
    }

    let shift = a.monomial_image(&query.s)?;
    let Some(shifted) = query.k.checked_sub(&shift) else {
        return Ok(0.0);
    };
    let rate_factor: f64 = lambdas
        .iter()
        .zip(query.s.iter())
        .map(|(&l, &s)| l.pow(s))
        .product();
    Ok(rate_factor * gy.extract_coefficient(&shifted)? / prob_y)
}

/// Closed form for `X ~ Multinomial(N; p)`:
///
/// ```text
/// N! ∏ p_r^{s_r} / (N − |s|)!
///   · Σ_{|j| = N − |s|, A (j + s) = k} multinomial(N − |s|; j) ∏ p_r^{j_r}
///   / P(Y = k)
/// ```
///
/// Both sums run over compositions of `N − |s|` (resp. `N`) directly; no
/// series are built. Zero when `|s| > N`.
pub fn multinomial_conditional_moment<C: Coefficient>(
    trials: u64,
    probs: &[Rational],
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<C> {
    let dist = DistributionSpec::multinomial(trials, probs.to_vec())?;
    dist.validate_for(C::MODE)?;
    check_inputs(&dist, a, query)?;
    let d = a.cols();
    let probs_c: Vec<C> = probs.iter().map(C::from_rational).collect();

    let within = |j: &ExponentVector| {
        query
            .support_bounds
            .as_ref()
            .is_none_or(|b| j.le_componentwise(b))
    };

    let prob_y = composition_sum(trials, d, &probs_c, |j| {
        Ok(within(j) && a.monomial_image(j)? == query.k)
    })?;
    if prob_y.is_exact_zero() {
        let mut reachable = false;
        for_each_composition(trials, d, &mut |j| {
            if within(j) && dist.in_support(j) && a.monomial_image(j)? == query.k {
                reachable = true;
            }
            Ok(())
        })?;
        return Err(if reachable { Error::ZeroProbability } else { Error::EmptyFiber });
    }

    let order = query.total_order().ok_or(Error::Overflow("moment order"))?;
    if order > trials {
        return Ok(C::zero());
    }
    let remaining = trials - order;
    let fiber_sum = composition_sum(remaining, d, &probs_c, |j| {
        let shifted = j.checked_add(&query.s)?;
        Ok(within(&shifted) && a.monomial_image(&shifted)? == query.k)
    })?;

    let falling: BigInt = ((remaining + 1)..=trials).fold(BigInt::one(), |acc, x| acc * x);
    let prefactor = probs_c
        .iter()
        .zip(query.s.iter())
        .fold(C::from_bigint(&falling), |acc, (p, &s)| acc.mul(&p.pow(s)));
    prefactor.mul(&fiber_sum).checked_div(&prob_y)
}

/// `Σ multinomial(n; j) ∏ p_r^{j_r}` over compositions `j` of `n` into `d`
/// parts accepted by `keep`.
fn composition_sum<C, F>(n: u64, d: usize, probs: &[C], mut keep: F) -> Result<C>
where
    C: Coefficient,
    F: FnMut(&ExponentVector) -> Result<bool>,
{
    let mut total = C::zero();
    let n_fact = factorial(n);
    for_each_composition(n, d, &mut |j| {
        if keep(j)? {
            let denom = j.iter().fold(BigInt::one(), |acc, &x| acc * factorial(x));
            let coeff = C::from_rational(&Rational::new(n_fact.clone(), denom));
            let weight = probs
                .iter()
                .zip(j.iter())
                .fold(coeff, |acc, (p, &x)| acc.mul(&p.pow(x)));
            total = total.add(&weight);
        }
        Ok(())
    })?;
    Ok(total)
}

fn for_each_composition<F>(n: u64, d: usize, f: &mut F) -> Result<()>
where
    F: FnMut(&ExponentVector) -> Result<()>,
{
    fn go<F>(remaining: u64, slot: usize, parts: &mut Vec<u64>, f: &mut F) -> Result<()>
    where
        F: FnMut(&ExponentVector) -> Result<()>,
    {
        if slot + 1 == parts.len() {
            parts[slot] = remaining;
            return f(&ExponentVector::new(parts.clone()));
        }
        for x in 0..=remaining {
            parts[slot] = x;
            go(remaining - x, slot + 1, parts, f)?;
        }
        Ok(())
    }
    if d == 0 {
        return Ok(());
    }
    go(n, 0, &mut vec![0; d], f)
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// The family-specific closed form, when one exists for `dist`.
pub fn closed_form_moment<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Option<Result<C>> {
    match dist {
        DistributionSpec::Poisson { lambdas } => {
            Some(poisson_conditional_moment(lambdas, a, query).and_then(C::from_f64))
        }
        DistributionSpec::Multinomial { trials, probs } => {
            Some(multinomial_conditional_moment(*trials, probs, a, query))
        }
        DistributionSpec::Table { .. } => None,
    }
}
