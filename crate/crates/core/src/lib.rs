//! Multivariate generating functions of linear transformations of
//! multi-indexed sequences, and the conditional distributions and factorial
//! moments of `X` given `Y = A X` that they yield.
//!
//! For a nonnegative integer matrix `A`, substituting `t_r ↦ ∏_i z_i^{a_ir}`
//! into the generating function of a sequence `b` gives the generating
//! function of its fiber sums `c_k = Σ_{A j = k} b_j`. Applied to a
//! probability generating function this yields the law of `Y = A X`, and the
//! joint p.g.f. of `(X, Y)` yields conditional factorial moments by
//! differentiation and coefficient extraction.
//!
//! Modules:
//! - [`lattice`]: exponent vectors, the matrix `A`, truncation boxes
//! - [`coefficient`]: exact rational and `f64` coefficient rings
//! - [`series`]: sparse truncated multivariate power series
//! - [`transform`]: monomial substitution and the joint p.g.f.
//! - [`distributions`]: Poisson, multinomial and table p.g.f.s
//! - [`conditioning`]: conditional pmfs and factorial moments
//! - [`oracle`]: brute-force fiber enumeration
//! - [`cli`]: job configuration and reports for the command-line tool

pub mod cli;
pub mod coefficient;
pub mod conditioning;
pub mod distributions;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod query;
pub mod series;
pub mod transform;

pub use coefficient::{Coefficient, CoefficientMode, Rational};
pub use distributions::DistributionSpec;
pub use error::{Error, Result};
pub use lattice::{ExponentVector, TransformMatrix, TruncationSpec};
pub use query::ConditionalQuery;
pub use series::TruncatedSeries;
