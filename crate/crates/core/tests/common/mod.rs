//! Random instance generators shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use linmgf::oracle::enumerate_fiber;
use linmgf::{Coefficient, ExponentVector, Rational, TransformMatrix, TruncatedSeries, TruncationSpec};
use num_bigint::BigInt;
use rand::Rng;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

pub fn ev(e: &[u64]) -> ExponentVector {
    ExponentVector::new(e.to_vec())
}

/// All exponent vectors in the box `[0, bounds]`, in lexicographic order.
pub fn box_points(bounds: &[u64]) -> Vec<ExponentVector> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=b).map(move |x| {
                    let mut v = p.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(ExponentVector::new).collect()
}

pub fn random_rational<R: Rng>(rng: &mut R, nonnegative: bool) -> Rational {
    let lo = if nonnegative { 0 } else { -6 };
    q(rng.gen_range(lo..=6), rng.gen_range(1..=6))
}

/// A random matrix with entries in `0..=max_entry` and no zero column.
pub fn random_matrix<R: Rng>(rng: &mut R, m: usize, d: usize, max_entry: u64) -> TransformMatrix {
    let mut rows: Vec<Vec<u64>> = (0..m)
        .map(|_| (0..d).map(|_| rng.gen_range(0..=max_entry)).collect())
        .collect();
    for r in 0..d {
        if rows.iter().all(|row| row[r] == 0) {
            let i = rng.gen_range(0..m);
            rows[i][r] = rng.gen_range(1..=max_entry.max(1));
        }
    }
    TransformMatrix::new(rows).unwrap()
}

/// A random finite-support sequence on `[0, degree]^d` with about `terms`
/// nonzero entries.
pub fn random_sequence<R: Rng>(
    rng: &mut R,
    d: usize,
    degree: u64,
    terms: usize,
    nonnegative: bool,
) -> BTreeMap<ExponentVector, Rational> {
    let mut out = BTreeMap::new();
    for _ in 0..terms {
        let e: Vec<u64> = (0..d).map(|_| rng.gen_range(0..=degree)).collect();
        let c = random_rational(rng, nonnegative);
        if c != <Rational as Coefficient>::zero() {
            out.insert(ExponentVector::new(e), c);
        }
    }
    out
}

/// Random probability vector of length `d` with denominators up to 12.
pub fn random_probs<R: Rng>(rng: &mut R, d: usize) -> Vec<Rational> {
    let weights: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=4)).collect();
    let weights = if weights.iter().all(|&w| w == 0) {
        vec![1; d]
    } else {
        weights
    };
    let total: i64 = weights.iter().sum();
    weights.iter().map(|&w| q(w, total)).collect()
}

/// Normalised random pmf table on `[0, degree]^d`.
pub fn random_table<R: Rng>(rng: &mut R, d: usize, degree: u64, terms: usize) -> BTreeMap<ExponentVector, Rational> {
    let mut seq = random_sequence(rng, d, degree, terms, true);
    if seq.is_empty() {
        seq.insert(ExponentVector::zeros(d), q(1, 1));
    }
    let total = seq.values().fold(<Rational as Coefficient>::zero(), |a, b| a + b);
    seq.values_mut().for_each(|p| *p = &*p / &total);
    seq
}

/// `c_k = Σ_{A j = k} b_j` for every `k` in the box, by enumerating fibers.
pub fn direct_fiber_sum(
    b: &BTreeMap<ExponentVector, Rational>,
    a: &TransformMatrix,
    ztrunc: &TruncationSpec,
    support_bounds: &ExponentVector,
) -> BTreeMap<ExponentVector, Rational> {
    let mut out = BTreeMap::new();
    for k in box_points(ztrunc.bounds().as_slice()) {
        let mut sum = <Rational as Coefficient>::zero();
        for j in enumerate_fiber(a, &k, Some(support_bounds)).unwrap() {
            if let Some(c) = b.get(&j) {
                sum += c;
            }
        }
        if sum != <Rational as Coefficient>::zero() {
            out.insert(k, sum);
        }
    }
    out
}

pub fn poly(d: usize, b: &BTreeMap<ExponentVector, Rational>) -> TruncatedSeries<Rational> {
    TruncatedSeries::polynomial(d, b.iter().map(|(e, c)| (e.clone(), c.clone()))).unwrap()
}

pub fn falling(x: u64, s: u64) -> u64 {
    (0..s).map(|i| x.saturating_sub(i)).product()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= tol * scale.max(1e-300) || (a - b).abs() <= tol * 1e-3
}
