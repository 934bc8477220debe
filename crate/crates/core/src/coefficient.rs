//! The two coefficient rings: exact rationals and `f64`.
//!
//! A series carries one coefficient type for its whole lifetime, so the two
//! modes can never mix. Exact mode is used for multinomial and table
//! distributions and for every oracle-equivalence check; float mode is needed
//! for Poisson, whose pmf involves `e^{-λ}`.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Magnitude below which a float coefficient is treated as underflowed and
/// dropped from storage.
pub const FLOAT_PURGE_THRESHOLD: f64 = 1e-300;

/// Relative tolerance for float-mode comparisons.
pub const FLOAT_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientMode {
    Exact,
    Float,
}

impl FromStr for CoefficientMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(CoefficientMode::Exact),
            "float" => Ok(CoefficientMode::Float),
            other => Err(format!("unknown mode {other:?}, expected \"exact\" or \"float\"")),
        }
    }
}

pub trait Coefficient: Clone + Debug + PartialEq + Send + Sync + 'static {
    const MODE: CoefficientMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(n: u64) -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    fn from_rational(q: &Rational) -> Self;

    /// Converts a real parameter. Exact mode expands the shortest decimal
    /// representation of `x` literally, so `0.1` becomes `1/10`.
    fn from_f64(x: f64) -> Result<Self>;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn checked_div(&self, other: &Self) -> Result<Self>;
    fn pow(&self, n: u64) -> Self;

    /// `exp(self)`, or `None` when the result is not representable.
    fn exp(&self) -> Option<Self>;

    /// True if the value must not be stored in a sparse series.
    fn is_negligible(&self) -> bool;

    fn is_exact_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// Equality for tests and agreement flags: exact equality in exact mode,
    /// relative tolerance [`FLOAT_RELATIVE_TOLERANCE`] in float mode.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Lossless text: `"num/den"` or the shortest round-trip decimal.
    fn to_lossless_string(&self) -> String;

    /// Report text: `"num/den"` or 12 significant digits.
    fn to_report_string(&self) -> String;
}

impl Coefficient for Rational {
    const MODE: CoefficientMode = CoefficientMode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_u64(n: u64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        Rational::from_integer(n.clone())
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::ParseNumber(format!("{x}")));
        }
        parse_rational(&format!("{x}"))
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / other)
        }
    }

    fn pow(&self, n: u64) -> Self {
        Pow::pow(self, n)
    }

    fn exp(&self) -> Option<Self> {
        self.is_zero().then(One::one)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn to_lossless_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn to_report_string(&self) -> String {
        self.to_lossless_string()
    }
}

impl Coefficient for f64 {
    const MODE: CoefficientMode = CoefficientMode::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn from_bigint(n: &BigInt) -> Self {
        ToPrimitive::to_f64(n).unwrap_or(f64::NAN)
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Result<Self> {
        Ok(x)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn checked_div(&self, other: &Self) -> Result<Self> {
        if *other == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / other)
        }
    }

    fn pow(&self, n: u64) -> Self {
        match i32::try_from(n) {
            Ok(n) => self.powi(n),
            Err(_) => self.powf(n as f64),
        }
    }

    fn exp(&self) -> Option<Self> {
        Some(f64::exp(*self))
    }

    fn is_negligible(&self) -> bool {
        self.abs() < FLOAT_PURGE_THRESHOLD
    }

    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn approx_eq(&self, other: &Self) -> bool {
        relative_eq(*self, *other, FLOAT_RELATIVE_TOLERANCE)
    }

    fn to_lossless_string(&self) -> String {
        format!("{self:?}")
    }

    fn to_report_string(&self) -> String {
        format_significant(*self, 12)
    }
}

/// `|a - b| ≤ tol · max(|a|, |b|)`, with exact zeros comparing equal only to
/// values below the purge threshold.
pub fn relative_eq(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs());
    if scale < FLOAT_PURGE_THRESHOLD {
        return true;
    }
    (a - b).abs() <= tol * scale
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that round-trips the rounded value.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x:?}");
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x);
    format!("{rounded:?}")
}

/// Parses `"p/q"`, an integer, or a decimal literal (optionally with an
/// exponent) into an exact rational. Decimals are expanded literally.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let err = || Error::ParseNumber(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let magnitude = u32::try_from(scale.unsigned_abs()).map_err(|_| err())?;
    if scale >= 0 {
        value *= Pow::pow(&ten, magnitude);
    } else {
        value /= Pow::pow(&ten, magnitude);
    }
    Ok(if negative { -value } else { value })
}
