//! Monomial substitution `t_r ↦ ∏_i z_i^{a_ir}` and the joint p.g.f. of
//! `(X, Y = A X)`.
//!
//! Substituting into `G_b` sends every term `b_j t^j` to `b_j z^{A j}`, so the
//! coefficient of `z^k` in the result is the fiber sum `Σ_{A j = k} b_j`.
//!
//! When the input is truncated, the substitution is only truthful inside the
//! output box if every `j` that can land there was retained. For a `z`-box
//! with bounds `k*` that means `j_r ≤ min_{i: a_ir > 0} ⌊k*_i / a_ir⌋` must be
//! covered for each column; a zero column puts no bound on `j_r`, so the
//! input must have finite support.

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::lattice::{check_len, TransformMatrix, TruncationSpec};
use crate::series::TruncatedSeries;

/// Degree in each input variable that the input series must cover for a
/// substitution into the `z`-box `ztrunc`; `None` for zero columns.
pub fn required_input_bounds(a: &TransformMatrix, ztrunc: &TruncationSpec) -> Result<Vec<Option<u64>>> {
    a.fiber_bounds(ztrunc.bounds())
}

fn check_coverage<C: Coefficient>(g: &TruncatedSeries<C>, required: &[Option<u64>]) -> Result<()> {
    if g.has_finite_support() {
        return Ok(());
    }
    for (var, req) in required.iter().enumerate() {
        let available = g.truncation().bound(var);
        match *req {
            None => return Err(Error::UnboundedFiber { var }),
            Some(required) if available < required => {
                return Err(Error::InsufficientTruncation {
                    var,
                    required,
                    available,
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// `G_c(z) = G_b(∏_i z_i^{a_i1}, …, ∏_i z_i^{a_id})`, truncated to `ztrunc`.
pub fn monomial_substitute<C: Coefficient>(
    g: &TruncatedSeries<C>,
    a: &TransformMatrix,
    ztrunc: &TruncationSpec,
) -> Result<TruncatedSeries<C>> {
    check_len("monomial_substitute input variables", a.cols(), g.num_vars())?;
    check_len("monomial_substitute output variables", a.rows(), ztrunc.num_vars())?;
    check_coverage(g, &required_input_bounds(a, ztrunc)?)?;
    g.map_exponents(ztrunc.clone(), |j| a.monomial_image(j))
}

/// `G_{X,Y}(t; z) = G_X(t_1 ∏_i z_i^{a_i1}, …, t_d ∏_i z_i^{a_id})`, with
/// variables ordered `(t_1, …, t_d, z_1, …, z_m)` and truncated to the box
/// `(ttrunc, ztrunc)`.
pub fn joint_pgf<C: Coefficient>(
    g: &TruncatedSeries<C>,
    a: &TransformMatrix,
    ttrunc: &TruncationSpec,
    ztrunc: &TruncationSpec,
) -> Result<TruncatedSeries<C>> {
    check_len("joint_pgf input variables", a.cols(), g.num_vars())?;
    check_len("joint_pgf t-box", a.cols(), ttrunc.num_vars())?;
    check_len("joint_pgf z-box", a.rows(), ztrunc.num_vars())?;
    // Terms beyond the t-box are discarded anyway, so only min(B_r, ttrunc_r)
    // has to be covered.
    let required: Vec<Option<u64>> = required_input_bounds(a, ztrunc)?
        .into_iter()
        .enumerate()
        .map(|(r, b)| Some(b.map_or(ttrunc.bound(r), |b| b.min(ttrunc.bound(r)))))
        .collect();
    check_coverage(g, &required)?;
    g.map_exponents(ttrunc.concat(ztrunc), |j| {
        let image = a.monomial_image(j)?;
        Ok(j.concat(&image))
    })
}
