//! Sparse truncated multivariate formal power series.
//!
//! A [`TruncatedSeries`] stores the nonzero coefficients of
//! `Σ_e c_e x^e` for exponents `e` inside a box `[0, bounds]`. Every
//! coefficient inside the box is exact; everything outside the box is
//! unknown, unless the series is flagged as having finite support, in which
//! case everything outside the box is known to be zero (a polynomial).
//!
//! Invariants:
//! - every stored exponent lies inside the truncation box
//! - no stored coefficient is negligible (exact zero, or `|c| < 1e-300`)
//! - every stored exponent has length `num_vars`

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::lattice::{check_len, ExponentVector, TruncationSpec};

#[derive(Clone, Debug)]
pub struct TruncatedSeries<C> {
    trunc: TruncationSpec,
    terms: BTreeMap<ExponentVector, C>,
    finite_support: bool,
}

// Equality is on values: the box and the stored terms. Whether the support
// is known to be finite is bookkeeping and does not take part.
impl<C: PartialEq> PartialEq for TruncatedSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && self.terms == other.terms
    }
}

fn accumulate<C: Coefficient>(terms: &mut BTreeMap<ExponentVector, C>, e: ExponentVector, c: C) {
    match terms.entry(e) {
        Entry::Vacant(v) => {
            if !c.is_negligible() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            let sum = o.get().add(&c);
            if sum.is_negligible() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn zero(trunc: TruncationSpec) -> Self {
        TruncatedSeries {
            trunc,
            terms: BTreeMap::new(),
            finite_support: false,
        }
    }

    pub fn constant(c: C, trunc: TruncationSpec) -> Self {
        let mut s = Self::zero(trunc);
        let origin = ExponentVector::zeros(s.num_vars());
        accumulate(&mut s.terms, origin, c);
        s
    }

    pub fn one(trunc: TruncationSpec) -> Self {
        Self::constant(C::one(), trunc)
    }

    /// `c · x^e`; the term is dropped if `e` falls outside the box.
    pub fn monomial(c: C, e: ExponentVector, trunc: TruncationSpec) -> Result<Self> {
        Self::from_terms(trunc, [(e, c)])
    }

    /// The coordinate function `x_var`.
    pub fn variable(var: usize, trunc: TruncationSpec) -> Result<Self> {
        let n = trunc.num_vars();
        if var >= n {
            return Err(Error::DimensionMismatch {
                context: "variable index",
                expected: n,
                actual: var,
            });
        }
        Self::monomial(C::one(), ExponentVector::unit(n, var), trunc)
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated
    /// exponents accumulate; exponents outside the box are dropped.
    pub fn from_terms<I>(trunc: TruncationSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, C)>,
    {
        let mut s = Self::zero(trunc);
        for (e, c) in terms {
            check_len("series term", s.num_vars(), e.len())?;
            if s.trunc.contains(&e) {
                accumulate(&mut s.terms, e, c);
            }
        }
        Ok(s)
    }

    /// A polynomial: the box is the componentwise maximum of the support and
    /// every coefficient outside it is known to vanish.
    pub fn polynomial<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, C)>,
    {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            check_len("polynomial term", num_vars, e.len())?;
            accumulate(&mut map, e, c);
        }
        let bounds = map
            .keys()
            .fold(ExponentVector::zeros(num_vars), |acc, e| acc.componentwise_max(e));
        Ok(TruncatedSeries {
            trunc: TruncationSpec::new(bounds),
            terms: map,
            finite_support: true,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.trunc.num_vars()
    }

    pub fn truncation(&self) -> &TruncationSpec {
        &self.trunc
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True if every coefficient outside the truncation box is known to be zero.
    pub fn has_finite_support(&self) -> bool {
        self.finite_support
    }

    /// Declares every coefficient outside the box to be zero, turning the
    /// series into the polynomial formed by its retained terms.
    pub fn into_finite_support(mut self) -> Self {
        self.finite_support = true;
        self
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<ExponentVector, C> {
        self.terms
    }

    pub fn get(&self, e: &ExponentVector) -> Option<&C> {
        self.terms.get(e)
    }

    /// Moves the series to a new box. Shrinking always succeeds; growing a
    /// variable's bound requires finite support.
    pub fn retruncate(&self, trunc: TruncationSpec) -> Result<Self> {
        check_len("retruncate", self.num_vars(), trunc.num_vars())?;
        if !self.finite_support {
            for var in 0..self.num_vars() {
                if trunc.bound(var) > self.trunc.bound(var) {
                    return Err(Error::InsufficientTruncation {
                        var,
                        required: trunc.bound(var),
                        available: self.trunc.bound(var),
                    });
                }
            }
        }
        let terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .filter(|(e, _)| trunc.contains(e))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        let finite_support = self.finite_support && terms.len() == self.terms.len();
        Ok(TruncatedSeries {
            trunc,
            terms,
            finite_support,
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        check_len("series arithmetic", self.num_vars(), other.num_vars())?;
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch);
        }
        Ok(())
    }

    pub fn scale(&self, alpha: &C) -> Self {
        let mut out = Self::zero(self.trunc.clone());
        for (e, c) in &self.terms {
            accumulate(&mut out.terms, e.clone(), c.mul(alpha));
        }
        out.finite_support = self.finite_support;
        out
    }

    /// `α S + β T`, termwise; cancelled terms are removed.
    pub fn linear_combine(alpha: &C, s: &Self, beta: &C, t: &Self) -> Result<Self> {
        s.check_compatible(t)?;
        let mut out = s.scale(alpha);
        for (e, c) in &t.terms {
            accumulate(&mut out.terms, e.clone(), c.mul(beta));
        }
        out.finite_support = s.finite_support && t.finite_support;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::linear_combine(&C::one(), self, &C::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::linear_combine(&C::one(), self, &C::one().neg(), other)
    }

    /// Truncated product: the sparse convolution with every exponent outside
    /// the common box discarded.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.trunc.clone());
        let mut dropped = false;
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.checked_add(e2)?;
                if self.trunc.contains(&e) {
                    accumulate(&mut out.terms, e, c1.mul(c2));
                } else {
                    dropped = true;
                }
            }
        }
        out.finite_support = self.finite_support && other.finite_support && !dropped;
        Ok(out)
    }

    /// `self^n` by binary powering.
    pub fn pow(&self, mut n: u64) -> Result<Self> {
        let mut result = Self::one(self.trunc.clone());
        result.finite_support = true;
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Truncated exponential.
    ///
    /// With `S = c + S₀` (`S₀` without constant term) this is
    /// `exp(c) · Σ_{n ≤ n_max} S₀ⁿ / n!` where `n_max` is the sum of the
    /// bounds; higher powers of `S₀` vanish in the box. In exact mode a
    /// nonzero constant term is rejected since `exp(c)` is transcendental.
    pub fn exp_truncated(&self) -> Result<Self> {
        let origin = ExponentVector::zeros(self.num_vars());
        let (constant, rest) = match self.terms.get(&origin) {
            Some(c) => {
                let mut rest = self.clone();
                rest.terms.remove(&origin);
                (c.clone(), rest)
            }
            None => (C::zero(), self.clone()),
        };
        let factor = constant.exp().ok_or(Error::ExactExpOfConstant)?;

        let n_max = self
            .trunc
            .bounds()
            .iter()
            .try_fold(0u64, |acc, &b| acc.checked_add(b))
            .ok_or(Error::Overflow("exp degree bound"))?;

        let mut sum = Self::one(self.trunc.clone());
        let mut power = Self::one(self.trunc.clone());
        for n in 1..=n_max {
            let inv_n = C::one().checked_div(&C::from_u64(n))?;
            power = power.mul(&rest)?.scale(&inv_n);
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power)?;
        }
        let mut out = sum.scale(&factor);
        out.finite_support = rest.is_zero();
        Ok(out)
    }

    /// `∂^order / ∂x_var^order`. The bound in `var` drops by `order`.
    ///
    /// Fails with [`Error::TruncationExhausted`] when `order` exceeds the bound
    /// of a series without finite support, since no coefficient of the
    /// result would be known.
    pub fn partial_derivative(&self, var: usize, order: u64) -> Result<Self> {
        let n = self.num_vars();
        if var >= n {
            return Err(Error::DimensionMismatch {
                context: "variable index",
                expected: n,
                actual: var,
            });
        }
        if order == 0 {
            return Ok(self.clone());
        }
        let bound = self.trunc.bound(var);
        if order > bound && !self.finite_support {
            return Err(Error::TruncationExhausted { var, order, bound });
        }
        let mut bounds = self.trunc.bounds().clone().into_vec();
        bounds[var] = bound.saturating_sub(order);
        let mut out = Self::zero(TruncationSpec::new(bounds));
        out.finite_support = self.finite_support;
        for (e, c) in &self.terms {
            let ev = e[var];
            if ev < order {
                continue;
            }
            let factor = (0..order).fold(C::one(), |acc, i| acc.mul(&C::from_u64(ev - i)));
            let mut shifted = e.clone().into_vec();
            shifted[var] = ev - order;
            accumulate(&mut out.terms, ExponentVector::new(shifted), c.mul(&factor));
        }
        Ok(out)
    }

    /// The coefficient of `x^e`. Asking outside the box is an error, because
    /// the true coefficient is unknown there, unless the support is finite.
    pub fn extract_coefficient(&self, e: &ExponentVector) -> Result<C> {
        check_len("extract_coefficient", self.num_vars(), e.len())?;
        if !self.trunc.contains(e) && !self.finite_support {
            return Err(Error::OutsideTruncation {
                exponent: e.clone().into_vec(),
                bounds: self.trunc.bounds().clone().into_vec(),
            });
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(C::zero))
    }

    /// `Σ c_e ∏ point_i^{e_i}` over the retained terms.
    pub fn evaluate(&self, point: &[C]) -> Result<C> {
        check_len("evaluate", self.num_vars(), point.len())?;
        Ok(self.terms.iter().fold(C::zero(), |acc, (e, c)| {
            acc.add(&c.mul(&monomial_value(e.as_slice(), point)))
        }))
    }

    /// Substitutes values for the first `point.len()` variables, returning a
    /// series in the remaining ones.
    pub fn evaluate_leading(&self, point: &[C]) -> Result<Self> {
        let split = point.len();
        if split > self.num_vars() {
            return Err(Error::DimensionMismatch {
                context: "evaluate_leading",
                expected: self.num_vars(),
                actual: split,
            });
        }
        let (_, tail_bounds) = self.trunc.bounds().split_at(split);
        let mut out = Self::zero(TruncationSpec::new(tail_bounds));
        out.finite_support = self.finite_support;
        for (e, c) in &self.terms {
            let (head, tail) = e.split_at(split);
            accumulate(
                &mut out.terms,
                tail,
                c.mul(&monomial_value(head.as_slice(), point)),
            );
        }
        Ok(out)
    }

    /// For variables split as `(x; y)` at `split`, the coefficient of `y^e`
    /// as a series in `x`.
    pub fn coefficient_of_tail(&self, split: usize, e: &ExponentVector) -> Result<Self> {
        if split > self.num_vars() {
            return Err(Error::DimensionMismatch {
                context: "coefficient_of_tail",
                expected: self.num_vars(),
                actual: split,
            });
        }
        let (head_bounds, tail_bounds) = self.trunc.bounds().split_at(split);
        check_len("coefficient_of_tail", tail_bounds.len(), e.len())?;
        if !e.le_componentwise(&tail_bounds) && !self.finite_support {
            return Err(Error::OutsideTruncation {
                exponent: e.clone().into_vec(),
                bounds: tail_bounds.into_vec(),
            });
        }
        let mut out = Self::zero(TruncationSpec::new(head_bounds));
        out.finite_support = self.finite_support;
        for (exp, c) in &self.terms {
            let (head, tail) = exp.split_at(split);
            if &tail == e {
                accumulate(&mut out.terms, head, c.clone());
            }
        }
        Ok(out)
    }

    /// Sum of all retained coefficients, i.e. the value at the all-ones point.
    pub fn coefficient_sum(&self) -> C {
        self.terms.values().fold(C::zero(), |acc, c| acc.add(c))
    }

    /// Applies `f` to every exponent, accumulating colliding images; images
    /// outside `trunc` are dropped. The result has finite support when the
    /// input does and nothing was dropped.
    pub(crate) fn map_exponents<F>(&self, trunc: TruncationSpec, mut f: F) -> Result<Self>
    where
        F: FnMut(&ExponentVector) -> Result<ExponentVector>,
    {
        let mut out = Self::zero(trunc);
        let mut dropped = false;
        for (e, c) in &self.terms {
            let image = f(e)?;
            check_len("mapped exponent", out.num_vars(), image.len())?;
            if out.trunc.contains(&image) {
                accumulate(&mut out.terms, image, c.clone());
            } else {
                dropped = true;
            }
        }
        out.finite_support = self.finite_support && !dropped;
        Ok(out)
    }

    /// Serialized form: `(exponent, coefficient)` pairs in lexicographic
    /// order, coefficients as `"num/den"` or shortest round-trip decimals.
    pub fn to_pairs(&self) -> Vec<(Vec<u64>, String)> {
        self.terms
            .iter()
            .map(|(e, c)| (e.as_slice().to_vec(), c.to_lossless_string()))
            .collect()
    }
}

fn monomial_value<C: Coefficient>(exponents: &[u64], point: &[C]) -> C {
    exponents
        .iter()
        .zip(point)
        .filter(|(&k, _)| k > 0)
        .fold(C::one(), |acc, (&k, x)| acc.mul(&x.pow(k)))
}

impl<C: Coefficient> Serialize for TruncatedSeries<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&(e.as_slice(), c.to_lossless_string()))?;
        }
        seq.end()
    }
}
