//! Exponent vectors, the transform matrix `A` and truncation boxes.
//!
//! Exponents are `u64` and every arithmetic step on them is checked: an
//! overflow is reported as [`Error::Overflow`], never wrapped or saturated.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point in `ℕⁿ`: the exponents of a monomial, or the value of a
/// random vector.
///
/// Ordering is lexicographic, which is also the canonical ordering of terms
/// in every serialized series.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u64>);

impl ExponentVector {
    pub fn new(entries: Vec<u64>) -> Self {
        ExponentVector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        ExponentVector(vec![0; len])
    }

    /// The vector with a one in position `var` and zeros elsewhere.
    pub fn unit(len: usize, var: usize) -> Self {
        let mut e = vec![0; len];
        e[var] = 1;
        ExponentVector(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `self ≤ other`.
    pub fn le_componentwise(&self, other: &ExponentVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_add(&self, other: &ExponentVector) -> Result<ExponentVector> {
        check_len("exponent addition", self.len(), other.len())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow("exponent sum")))
            .collect::<Result<Vec<_>>>()
            .map(ExponentVector)
    }

    /// Componentwise difference, or `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &ExponentVector) -> Option<ExponentVector> {
        if self.len() != other.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(ExponentVector)
    }

    pub fn componentwise_max(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn componentwise_min(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// Concatenation `(self, other)`; used for the `(t; z)` variable layout.
    pub fn concat(&self, other: &ExponentVector) -> ExponentVector {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ExponentVector(v)
    }

    /// Splits into `(self[..at], self[at..])`.
    pub fn split_at(&self, at: usize) -> (ExponentVector, ExponentVector) {
        let (a, b) = self.0.split_at(at);
        (ExponentVector(a.to_vec()), ExponentVector(b.to_vec()))
    }
}

impl From<Vec<u64>> for ExponentVector {
    fn from(v: Vec<u64>) -> Self {
        ExponentVector(v)
    }
}

impl<const N: usize> From<[u64; N]> for ExponentVector {
    fn from(v: [u64; N]) -> Self {
        ExponentVector(v.to_vec())
    }
}

impl Index<usize> for ExponentVector {
    type Output = u64;

    fn index(&self, i: usize) -> &u64 {
        &self.0[i]
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Per-variable maximum retained degree of a truncated series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncationSpec {
    bounds: ExponentVector,
}

impl TruncationSpec {
    pub fn new(bounds: impl Into<ExponentVector>) -> Self {
        TruncationSpec {
            bounds: bounds.into(),
        }
    }

    /// The same bound for each of `num_vars` variables.
    pub fn uniform(num_vars: usize, bound: u64) -> Self {
        TruncationSpec::new(vec![bound; num_vars])
    }

    pub fn bounds(&self) -> &ExponentVector {
        &self.bounds
    }

    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn bound(&self, var: usize) -> u64 {
        self.bounds[var]
    }

    pub fn contains(&self, e: &ExponentVector) -> bool {
        e.le_componentwise(&self.bounds)
    }

    pub fn concat(&self, other: &TruncationSpec) -> TruncationSpec {
        TruncationSpec::new(self.bounds.concat(&other.bounds))
    }

    /// Number of lattice points in the box, or `None` on overflow.
    pub fn box_size(&self) -> Option<u64> {
        self.bounds
            .iter()
            .try_fold(1u64, |acc, &b| acc.checked_mul(b.checked_add(1)?))
    }
}

/// The nonnegative integer `m × d` matrix defining `Y = A X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransformMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
    zero_columns: Vec<bool>,
}

impl TransformMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidMatrix("matrix has no rows".into()));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::InvalidMatrix("matrix has no columns".into()));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
        let entries: Vec<u64> = rows.into_iter().flatten().collect();
        let zero_columns = (0..d)
            .map(|r| (0..m).all(|i| entries[i * d + r] == 0))
            .collect();
        Ok(TransformMatrix {
            rows: m,
            cols: d,
            entries,
            zero_columns,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        TransformMatrix::new(
            (0..n)
                .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
                .collect(),
        )
    }

    /// The `1 × d` matrix of ones, so that `Y = X₁ + … + X_d`.
    pub fn ones_row(d: usize) -> Result<Self> {
        TransformMatrix::new(vec![vec![1; d]])
    }

    /// Number of rows `m` (dimension of `Y`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns `d` (dimension of `X`).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, r: usize) -> u64 {
        self.entries[i * self.cols + r]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero_column(&self, r: usize) -> bool {
        self.zero_columns[r]
    }

    pub fn has_zero_column(&self) -> bool {
        self.zero_columns.iter().any(|&z| z)
    }

    /// Column `r` as an exponent vector: the image of the unit vector `e_r`.
    pub fn column(&self, r: usize) -> ExponentVector {
        ExponentVector::new((0..self.rows).map(|i| self.get(i, r)).collect())
    }

    /// Computes `A j` with checked arithmetic.
    pub fn monomial_image(&self, j: &ExponentVector) -> Result<ExponentVector> {
        check_len("monomial_image", self.cols, j.len())?;
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(j.iter()).try_fold(0u64, |acc, (&a, &x)| {
                    a.checked_mul(x)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::Overflow("monomial image"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(ExponentVector)
    }

    /// For each column `r`, the largest `j_r` compatible with `A j ≤ k`:
    /// `min over rows i with a_ir > 0 of ⌊k_i / a_ir⌋`, or `None` when the
    /// column is zero and `j_r` is unconstrained.
    pub fn fiber_bounds(&self, k: &ExponentVector) -> Result<Vec<Option<u64>>> {
        check_len("fiber_bounds", self.rows, k.len())?;
        Ok((0..self.cols)
            .map(|r| {
                (0..self.rows)
                    .filter(|&i| self.get(i, r) > 0)
                    .map(|i| k[i] / self.get(i, r))
                    .min()
            })
            .collect())
    }

    /// `A b` for a box bound `b`: the smallest `z`-box containing the image
    /// of every point of `[0, b]`.
    pub fn image_box(&self, bounds: &TruncationSpec) -> Result<TruncationSpec> {
        self.monomial_image(bounds.bounds()).map(TruncationSpec::new)
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        })
    }
}
