mod common;

use std::collections::BTreeMap;

use common::*;
use linmgf::conditioning::{
    conditional_factorial_moment, conditional_pmf, multinomial_conditional_moment, pgf_of_y,
    poisson_conditional_moment,
};
use linmgf::distributions::poisson_pgf;
use linmgf::oracle::{enumerate_fiber, oracle_conditional_moment, oracle_conditional_pmf};
use linmgf::transform::{joint_pgf, monomial_substitute};
use linmgf::{
    Coefficient, ConditionalQuery, DistributionSpec, ExponentVector, Rational, TransformMatrix,
    TruncatedSeries, TruncationSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn zero() -> Rational {
    <Rational as Coefficient>::zero()
}

fn one() -> Rational {
    <Rational as Coefficient>::one()
}

/// Three exact series sharing a random box of dimension ≤ 3.
fn series_triple() -> impl Strategy<Value = [TruncatedSeries<Rational>; 3]> {
    (1usize..=3, any::<u64>()).prop_map(|(d, seed)| {
        let mut r = rng(seed);
        let bounds: Vec<u64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, 0..=4)).collect();
        let trunc = TruncationSpec::new(bounds);
        let mut make = || {
            let seq = random_sequence(&mut r, d, 4, 6, false);
            TruncatedSeries::from_terms(trunc.clone(), seq).unwrap()
        };
        [make(), make(), make()]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn mul_is_commutative_and_associative([s, t, u] in series_triple()) {
        prop_assert_eq!(s.mul(&t).unwrap(), t.mul(&s).unwrap());
        let left = s.mul(&t).unwrap().mul(&u).unwrap();
        let right = s.mul(&t.mul(&u).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn mul_distributes_over_add([s, t, u] in series_triple()) {
        let left = s.mul(&t.add(&u).unwrap()).unwrap();
        let right = s.mul(&t).unwrap().add(&s.mul(&u).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn one_and_zero_are_identities([s, _t, _u] in series_triple()) {
        let trunc = s.truncation().clone();
        prop_assert_eq!(s.mul(&TruncatedSeries::one(trunc.clone())).unwrap(), s.clone());
        prop_assert_eq!(s.add(&TruncatedSeries::zero(trunc.clone())).unwrap(), s.clone());
        prop_assert!(s.sub(&s).unwrap().is_zero());
    }

    /// `[t^e] ∂_r^n S = (e_r + n)^{(n)} [t^{e + n u_r}] S`.
    #[test]
    fn derivative_matches_shifted_extraction([s, _t, _u] in series_triple(), var in 0usize..3, n in 0u64..4) {
        let var = var % s.num_vars();
        // Orders past the bound have no retained coefficients to speak of.
        let n = n % (s.truncation().bound(var) + 1);
        let ds = s.partial_derivative(var, n).unwrap();
        for e in box_points(ds.truncation().bounds().as_slice()) {
            let mut shifted = e.clone().into_vec();
            shifted[var] += n;
            let expect = s.extract_coefficient(&ExponentVector::new(shifted)).unwrap()
                * Rational::from_integer(falling(e[var] + n, n).into());
            prop_assert_eq!(ds.extract_coefficient(&e).unwrap(), expect);
        }
    }

    /// With no constant term `exp` is exact in rational arithmetic.
    #[test]
    fn exp_of_negation_is_inverse_exact([s, _t, _u] in series_triple()) {
        let origin = ExponentVector::zeros(s.num_vars());
        let s = s.sub(&TruncatedSeries::constant(s.extract_coefficient(&origin).unwrap(), s.truncation().clone())).unwrap();
        let e = s.exp_truncated().unwrap();
        let inv = s.scale(&(-one())).exp_truncated().unwrap();
        prop_assert_eq!(e.mul(&inv).unwrap(), TruncatedSeries::one(s.truncation().clone()));
    }

    #[test]
    fn exp_of_negation_is_inverse_float(d in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let bounds: Vec<u64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, 0..=5)).collect();
        let trunc = TruncationSpec::new(bounds);
        let terms = random_sequence(&mut r, d, 5, 5, false)
            .into_iter()
            .map(|(e, c)| (e, c.to_f64() / 2.0));
        let s: TruncatedSeries<f64> = TruncatedSeries::from_terms(trunc.clone(), terms).unwrap();
        let prod = s.exp_truncated().unwrap().mul(&s.scale(&-1.0).exp_truncated().unwrap()).unwrap();
        for e in box_points(trunc.bounds().as_slice()) {
            let want = if e.is_zero() { 1.0 } else { 0.0 };
            let got = prod.extract_coefficient(&e).unwrap();
            prop_assert!((got - want).abs() <= 1e-9, "{:?}: {}", e, got);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Substitution collects each input coefficient on the image of its
    /// exponent: it matches summing over every fiber directly.
    #[test]
    fn substitution_equals_direct_fiber_sum(d in 1usize..=3, m in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let b = random_sequence(&mut r, d, 6, 8, false);
        let g = poly(d, &b);
        let zb: Vec<u64> = (0..m).map(|_| rand::Rng::gen_range(&mut r, 0..=8)).collect();
        let ztrunc = TruncationSpec::new(zb);
        let got = monomial_substitute(&g, &a, &ztrunc).unwrap();
        let want = direct_fiber_sum(&b, &a, &ztrunc, &ExponentVector::new(vec![6; d]));
        prop_assert_eq!(got.into_terms(), want);
    }

    #[test]
    fn substitution_preserves_mass(d in 1usize..=3, m in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let b = random_sequence(&mut r, d, 6, 8, false);
        let g = poly(d, &b);
        let image = a.image_box(g.truncation()).unwrap();
        let c = monomial_substitute(&g, &a, &image).unwrap();
        prop_assert_eq!(c.coefficient_sum(), g.coefficient_sum());
    }

    #[test]
    fn joint_at_unit_t_is_substitution(d in 1usize..=3, m in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let b = random_sequence(&mut r, d, 4, 8, false);
        let g = poly(d, &b);
        let zb: Vec<u64> = (0..m).map(|_| rand::Rng::gen_range(&mut r, 0..=6)).collect();
        let ztrunc = TruncationSpec::new(zb);
        let joint = joint_pgf(&g, &a, g.truncation(), &ztrunc).unwrap();
        let at_one = joint.evaluate_leading(&vec![one(); d]).unwrap();
        prop_assert_eq!(at_one, monomial_substitute(&g, &a, &ztrunc).unwrap());
    }

    #[test]
    fn fiber_enumeration_matches_box_scan(d in 1usize..=3, m in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let k: Vec<u64> = (0..m).map(|_| rand::Rng::gen_range(&mut r, 0..=6)).collect();
        let k = ExponentVector::new(k);
        let got = enumerate_fiber(&a, &k, None).unwrap();
        let want: Vec<ExponentVector> = box_points(&vec![6; d])
            .into_iter()
            .filter(|j| a.monomial_image(j).unwrap() == k)
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn sum_fiber_has_stars_and_bars_size(d in 1usize..=4, k in 0u64..=8) {
        let a = TransformMatrix::ones_row(d).unwrap();
        let n = enumerate_fiber(&a, &ev(&[k]), None).unwrap().len() as u64;
        prop_assert_eq!(n, binomial(k + d as u64 - 1, d as u64 - 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multinomial_closed_form_generic_and_oracle_agree(d in 1usize..=3, m in 1usize..=2, trials in 0u64..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let probs = random_probs(&mut r, d);
        let dist = DistributionSpec::multinomial(trials, probs.clone()).unwrap();
        // Pick an attainable k from a random support point.
        let mut j = vec![0u64; d];
        for _ in 0..trials {
            let nz: Vec<usize> = (0..d).filter(|&i| probs[i] != zero()).collect();
            j[nz[rand::Rng::gen_range(&mut r, 0..nz.len())]] += 1;
        }
        let k = a.monomial_image(&ExponentVector::new(j)).unwrap();
        let s: Vec<u64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, 0..=2)).collect();
        let query = ConditionalQuery::new(k, s);
        let closed: Rational = multinomial_conditional_moment(trials, &probs, &a, &query).unwrap();
        let generic: Rational = conditional_factorial_moment(&dist, &a, &query).unwrap();
        let oracle: Rational = oracle_conditional_moment(&dist, &a, &query).unwrap();
        prop_assert_eq!(&closed, &generic);
        prop_assert_eq!(&generic, &oracle);
    }

    #[test]
    fn conditional_pmf_sums_to_one_and_matches_oracle(d in 1usize..=3, m in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let table = random_table(&mut r, d, 3, 6);
        let j = table.keys().next().unwrap().clone();
        let k = a.monomial_image(&j).unwrap();
        let dist = DistributionSpec::table(table).unwrap();
        let query = ConditionalQuery::distribution(k, d);
        let pmf: BTreeMap<ExponentVector, Rational> = conditional_pmf(&dist, &a, &query).unwrap();
        let total = pmf.values().fold(zero(), |acc, p| acc + p);
        prop_assert_eq!(total, one());
        prop_assert_eq!(pmf, oracle_conditional_pmf(&dist, &a, &query).unwrap());
    }

    #[test]
    fn multinomial_pmf_lives_on_the_simplex(d in 1usize..=3, trials in 0u64..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let probs = random_probs(&mut r, d);
        let g: TruncatedSeries<Rational> = DistributionSpec::multinomial(trials, probs).unwrap().pgf(None).unwrap();
        prop_assert_eq!(g.evaluate(&vec![one(); d]).unwrap(), one());
        for (e, c) in g.terms() {
            prop_assert_eq!(e.iter().sum::<u64>(), trials);
            prop_assert!(*c > zero());
        }
    }

    #[test]
    fn poisson_closed_form_generic_and_oracle_agree(d in 1usize..=3, m in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let lambdas: Vec<f64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, 0.2..4.0)).collect();
        let k: Vec<u64> = (0..m).map(|_| rand::Rng::gen_range(&mut r, 0..=6)).collect();
        let s: Vec<u64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, 0..=2)).collect();
        let dist = DistributionSpec::poisson(lambdas.clone()).unwrap();
        let query = ConditionalQuery::new(k, s);
        match oracle_conditional_moment::<f64>(&dist, &a, &query) {
            Ok(oracle) => {
                let closed = poisson_conditional_moment(&lambdas, &a, &query).unwrap();
                let generic: f64 = conditional_factorial_moment(&dist, &a, &query).unwrap();
                prop_assert!(rel_close(closed, generic, 1e-9), "{} vs {}", closed, generic);
                prop_assert!(rel_close(generic, oracle, 1e-9), "{} vs {}", generic, oracle);
            }
            Err(e) => {
                prop_assert_eq!(e.kind(), "EmptyFiber");
                prop_assert_eq!(conditional_factorial_moment::<f64>(&dist, &a, &query).unwrap_err().kind(), "EmptyFiber");
            }
        }
    }

    /// Independent Poissons conditioned on their sum are multinomial with
    /// probabilities proportional to the rates.
    #[test]
    fn poisson_given_sum_is_multinomial(d in 2usize..=3, k in 0u64..=8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambdas: Vec<f64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, 0.2..5.0)).collect();
        let total: f64 = lambdas.iter().sum();
        let a = TransformMatrix::ones_row(d).unwrap();
        let dist = DistributionSpec::poisson(lambdas.clone()).unwrap();
        let pmf: BTreeMap<ExponentVector, f64> =
            conditional_pmf(&dist, &a, &ConditionalQuery::distribution(vec![k], d)).unwrap();
        prop_assert_eq!(pmf.len() as u64, binomial(k + d as u64 - 1, d as u64 - 1));
        for (j, p) in &pmf {
            let mut coef = 1.0;
            let mut left = k;
            for (r, &x) in j.iter().enumerate() {
                coef *= binomial(left, x) as f64 * (lambdas[r] / total).powi(x as i32);
                left -= x;
            }
            prop_assert!((p - coef).abs() <= 1e-9, "{:?}: {} vs {}", j, p, coef);
        }
    }

    /// Conditioning on `X` itself pins it to `k`.
    #[test]
    fn conditioning_on_x_itself(d in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let trials = rand::Rng::gen_range(&mut r, 1..=5);
        let probs = random_probs(&mut r, d);
        let dist = DistributionSpec::multinomial(trials, probs.clone()).unwrap();
        let g: TruncatedSeries<Rational> = dist.pgf(None).unwrap();
        let k = g.terms().next().unwrap().0.clone();
        let a = TransformMatrix::identity(d).unwrap();
        let s: Vec<u64> = (0..d).map(|_| rand::Rng::gen_range(&mut r, 0..=3)).collect();
        let want: u64 = k.iter().zip(&s).map(|(&x, &n)| falling(x, n)).product();
        let query = ConditionalQuery::new(k.clone(), s);
        let got: Rational = conditional_factorial_moment(&dist, &a, &query).unwrap();
        prop_assert_eq!(got, Rational::from_integer(want.into()));
        let pmf: BTreeMap<ExponentVector, Rational> =
            conditional_pmf(&dist, &a, &ConditionalQuery::distribution(k.clone(), d)).unwrap();
        prop_assert_eq!(pmf, BTreeMap::from([(k, one())]));
    }

    #[test]
    fn poisson_pgf_coefficients_are_log_concave(lambda in 0.1f64..20.0) {
        let g: TruncatedSeries<f64> = poisson_pgf(&[lambda], &TruncationSpec::new(vec![30])).unwrap();
        let c = |j: u64| g.extract_coefficient(&ev(&[j])).unwrap();
        for j in 1..30 {
            prop_assert!(c(j) * c(j) >= c(j - 1) * c(j + 1) * (1.0 - 1e-12));
        }
    }

    /// The marginal of `Y` as a coefficient table agrees with summing
    /// conditional-free fiber masses.
    #[test]
    fn pgf_of_y_matches_fiber_masses(d in 1usize..=3, m in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d, 2);
        let table = random_table(&mut r, d, 3, 6);
        let dist = DistributionSpec::table(table.clone()).unwrap();
        let k: Vec<u64> = (0..m).map(|_| rand::Rng::gen_range(&mut r, 0..=5)).collect();
        let k = ExponentVector::new(k);
        let gy: TruncatedSeries<Rational> = pgf_of_y(&dist, &a, &k).unwrap();
        let ztrunc = TruncationSpec::new(k.clone());
        let want = direct_fiber_sum(&table, &a, &ztrunc, &ExponentVector::new(vec![3; d]));
        prop_assert_eq!(gy.into_terms(), want);
    }
}

#[test]
fn vanishing_rule_is_exact_zero() {
    let a = TransformMatrix::ones_row(2).unwrap();
    let dist = DistributionSpec::poisson(vec![1.0, 1.0]).unwrap();
    let query = ConditionalQuery::new(vec![1], vec![2, 0]);
    assert_eq!(poisson_conditional_moment(&[1.0, 1.0], &a, &query).unwrap(), 0.0);
    assert_eq!(conditional_factorial_moment::<f64>(&dist, &a, &query).unwrap(), 0.0);
}
