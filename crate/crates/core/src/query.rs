use crate::error::Result;
use crate::lattice::{check_len, ExponentVector, TransformMatrix};

/// A request for `E[X_1^{(s_1)} ⋯ X_d^{(s_d)} | Y = k]`.
///
/// `support_bounds`, when present, restricts `X` to the box
/// `[0, support_bounds]`; it is required for zero columns of `A` under an
/// infinite-support distribution.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConditionalQuery {
    pub k: ExponentVector,
    pub s: ExponentVector,
    pub support_bounds: Option<ExponentVector>,
}

impl ConditionalQuery {
    pub fn new(k: impl Into<ExponentVector>, s: impl Into<ExponentVector>) -> Self {
        ConditionalQuery {
            k: k.into(),
            s: s.into(),
            support_bounds: None,
        }
    }

    /// The zeroth moment, i.e. a plain conditioning query.
    pub fn distribution(k: impl Into<ExponentVector>, d: usize) -> Self {
        ConditionalQuery::new(k, ExponentVector::zeros(d))
    }

    pub fn with_support_bounds(mut self, bounds: impl Into<ExponentVector>) -> Self {
        self.support_bounds = Some(bounds.into());
        self
    }

    pub fn validate(&self, a: &TransformMatrix) -> Result<()> {
        check_len("query k (rows of A)", a.rows(), self.k.len())?;
        check_len("query s (columns of A)", a.cols(), self.s.len())?;
        if let Some(b) = &self.support_bounds {
            check_len("query support_bounds (columns of A)", a.cols(), b.len())?;
        }
        Ok(())
    }

    /// `Σ_r s_r`, or `None` on overflow.
    pub fn total_order(&self) -> Option<u64> {
        self.s.iter().try_fold(0u64, |acc, &x| acc.checked_add(x))
    }
}
