//! Brute-force ground truth.
//!
//! Enumerates the lattice fiber `{j ∈ ℕ^d : A j = k}` by depth-first search
//! and sums pmf values evaluated directly from the distribution parameters.
//! Nothing here touches generating functions, so agreement with the series
//! pipeline is meaningful evidence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::coefficient::Coefficient;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::lattice::{check_len, ExponentVector, TransformMatrix};
use crate::query::ConditionalQuery;

/// All `j` with `A j = k` (and `j ≤ support_bounds` if given), in
/// lexicographic order.
///
/// Coordinate `r` ranges over `0..=min(B_r, support_bounds_r)` where `B_r` is
/// derived from the residual `k − A (j_1, …, j_{r-1}, 0, …)`.
pub fn enumerate_fiber(
    a: &TransformMatrix,
    k: &ExponentVector,
    support_bounds: Option<&ExponentVector>,
) -> Result<Vec<ExponentVector>> {
    check_len("enumerate_fiber k", a.rows(), k.len())?;
    if let Some(b) = support_bounds {
        check_len("enumerate_fiber support_bounds", a.cols(), b.len())?;
    }
    for r in 0..a.cols() {
        if a.is_zero_column(r) && support_bounds.is_none() {
            return Err(Error::UnboundedFiber { var: r });
        }
    }

    // reachable[r][i]: some column ≥ r has a positive entry in row i.
    let d = a.cols();
    let m = a.rows();
    let mut reachable = vec![vec![false; m]; d + 1];
    for r in (0..d).rev() {
        reachable[r] = (0..m).map(|i| reachable[r + 1][i] || a.get(i, r) > 0).collect();
    }

    let mut out = Vec::new();
    let mut point = vec![0u64; d];
    let mut residual = k.as_slice().to_vec();
    dfs(a, support_bounds, &reachable, 0, &mut point, &mut residual, &mut out);
    Ok(out)
}

fn dfs(
    a: &TransformMatrix,
    support_bounds: Option<&ExponentVector>,
    reachable: &[Vec<bool>],
    r: usize,
    point: &mut Vec<u64>,
    residual: &mut Vec<u64>,
    out: &mut Vec<ExponentVector>,
) {
    if residual.iter().enumerate().any(|(i, &x)| x > 0 && !reachable[r][i]) {
        return;
    }
    if r == a.cols() {
        out.push(ExponentVector::new(point.clone()));
        return;
    }
    let column_bound = (0..a.rows())
        .filter(|&i| a.get(i, r) > 0)
        .map(|i| residual[i] / a.get(i, r))
        .min();
    let upper = match (column_bound, support_bounds.map(|b| b[r])) {
        (Some(c), Some(s)) => c.min(s),
        (Some(c), None) => c,
        (None, Some(s)) => s,
        (None, None) => unreachable!("zero columns are bounded before the search"),
    };
    for x in 0..=upper {
        point[r] = x;
        for (i, res) in residual.iter_mut().enumerate() {
            *res -= a.get(i, r) * x;
        }
        dfs(a, support_bounds, reachable, r + 1, point, residual, out);
        for (i, res) in residual.iter_mut().enumerate() {
            *res += a.get(i, r) * x;
        }
    }
    point[r] = 0;
}

/// `P(X = j)` straight from the distribution parameters.
pub fn pmf<C: Coefficient>(dist: &DistributionSpec, j: &ExponentVector) -> Result<C> {
    check_len("pmf point", dist.dimension(), j.len())?;
    match dist {
        DistributionSpec::Poisson { lambdas } => {
            let p: f64 = lambdas
                .iter()
                .zip(j.iter())
                .map(|(&lambda, &x)| (1..=x).fold((-lambda).exp(), |acc, i| acc * lambda / i as f64))
                .product();
            match C::MODE {
                crate::coefficient::CoefficientMode::Float => C::from_f64(p),
                crate::coefficient::CoefficientMode::Exact => Err(Error::ExactModeUnsupported(
                    "the Poisson distribution (its pmf involves exp(-λ))",
                )),
            }
        }
        DistributionSpec::Multinomial { trials, probs } => {
            if j.iter().sum::<u64>() != *trials {
                return Ok(C::zero());
            }
            let mut coeff = factorial(*trials);
            for &x in j.iter() {
                coeff /= factorial(x);
            }
            let weight = probs
                .iter()
                .zip(j.iter())
                .fold(C::one(), |acc, (p, &x)| acc.mul(&C::from_rational(p).pow(x)));
            Ok(C::from_bigint(&coeff).mul(&weight))
        }
        DistributionSpec::Table { entries } => Ok(entries
            .get(j)
            .map_or_else(C::zero, C::from_rational)),
    }
}

fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `j (j−1) ⋯ (j−s+1)`.
pub fn falling_factorial<C: Coefficient>(j: u64, s: u64) -> C {
    if s > j {
        return C::zero();
    }
    (0..s).fold(C::one(), |acc, i| acc.mul(&C::from_u64(j - i)))
}

fn effective_bounds(dist: &DistributionSpec, query: &ConditionalQuery) -> Option<ExponentVector> {
    match (&query.support_bounds, dist.natural_support_bounds()) {
        (Some(user), Some(natural)) => Some(user.componentwise_min(&natural)),
        (Some(user), None) => Some(user.clone()),
        (None, natural) => natural,
    }
}

/// Fiber points paired with their probabilities, plus `P(Y = k)`.
fn weighted_fiber<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<(Vec<(ExponentVector, C)>, C)> {
    query.validate(a)?;
    check_len("distribution dimension", a.cols(), dist.dimension())?;
    let bounds = effective_bounds(dist, query);
    let fiber = enumerate_fiber(a, &query.k, bounds.as_ref())?;
    let mut total = C::zero();
    let mut weighted = Vec::with_capacity(fiber.len());
    for j in fiber {
        let p: C = pmf(dist, &j)?;
        total = total.add(&p);
        weighted.push((j, p));
    }
    if total.is_exact_zero() {
        return Err(if weighted.iter().any(|(j, _)| dist.in_support(j)) {
            Error::ZeroProbability
        } else {
            Error::EmptyFiber
        });
    }
    Ok((weighted, total))
}

/// `Σ_{A j = k} ∏_r j_r^{(s_r)} P(X = j) / Σ_{A j = k} P(X = j)`.
pub fn oracle_conditional_moment<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<C> {
    let (weighted, total) = weighted_fiber::<C>(dist, a, query)?;
    let numerator = weighted.iter().fold(C::zero(), |acc, (j, p)| {
        let ff = j
            .iter()
            .zip(query.s.iter())
            .fold(C::one(), |f, (&x, &s)| f.mul(&falling_factorial::<C>(x, s)));
        acc.add(&ff.mul(p))
    });
    numerator.checked_div(&total)
}

/// `P(X = j | Y = k)` for every fiber point of positive probability.
pub fn oracle_conditional_pmf<C: Coefficient>(
    dist: &DistributionSpec,
    a: &TransformMatrix,
    query: &ConditionalQuery,
) -> Result<BTreeMap<ExponentVector, C>> {
    let (weighted, total) = weighted_fiber::<C>(dist, a, query)?;
    weighted
        .into_iter()
        .filter(|(_, p)| !p.is_exact_zero())
        .map(|(j, p)| Ok((j, p.checked_div(&total)?)))
        .collect()
}

/// Number of lattice points in the (support-bounded) fiber.
pub fn fiber_size(dist: &DistributionSpec, a: &TransformMatrix, query: &ConditionalQuery) -> Result<usize> {
    query.validate(a)?;
    let bounds = effective_bounds(dist, query);
    Ok(enumerate_fiber(a, &query.k, bounds.as_ref())?.len())
}
