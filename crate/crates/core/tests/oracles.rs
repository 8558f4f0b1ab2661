//! Cross-module checks through the public API, each against an independent
//! oracle (enumeration, simulation or a hand computation).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use ctasep::continuum::{p_exact, p_mc};
use ctasep::count::{
    count_all_mlqs, count_all_mlqs_explicit, g_pi_brute, g_w0_formula, lgv_brute, lgv_count,
    mlq_census, w0, w0_path_spec, PositionVector, DEFAULT_MLQ_CAP,
};
use ctasep::markov::{stationary_direct, stationary_for_type};
use ctasep::rs::enumerate_patterns;
use ctasep::{det_fraction_free, Permutation, Rational, RationalMatrix, RingWord, TypeVector};

fn census_law(t: &TypeVector) -> HashMap<RingWord, Rational> {
    let z = count_all_mlqs(t);
    mlq_census(t, DEFAULT_MLQ_CAP)
        .unwrap()
        .into_iter()
        .map(|(w, c)| (w, Rational::new(BigInt::from(c), z.clone())))
        .collect()
}

#[test]
fn stationary_law_is_the_mlq_projection() {
    for (m, sites) in [
        (vec![1, 1], 3),
        (vec![1, 1], 5),
        (vec![2, 1], 5),
        (vec![1, 2], 5),
        (vec![1, 1, 1], 5),
    ] {
        let t = TypeVector::new(m.clone(), sites).unwrap();
        let law = census_law(&t);
        let d = stationary_for_type(&t).unwrap();
        assert_eq!(d.len(), law.len(), "m={m:?} N={sites}");
        for (w, p) in d.iter() {
            assert_eq!(&law[w], p, "m={m:?} N={sites} u={w}");
        }
    }
}

#[test]
fn lumped_and_direct_solves_agree() {
    let t = TypeVector::new(vec![1, 1, 1], 4).unwrap();
    let a = stationary_for_type(&t).unwrap();
    let b = stationary_direct(&t).unwrap();
    for (w, p) in a.iter() {
        assert_eq!(&b.get(w), p);
    }
}

#[test]
fn three_site_two_species_by_hand() {
    // balance for the two rotation classes gives 2:1
    let t = TypeVector::new(vec![1, 1], 3).unwrap();
    let d = stationary_for_type(&t).unwrap();
    for k in 0..3 {
        assert_eq!(
            d.get(&".12".parse::<RingWord>().unwrap().rotate(k)),
            Rational::new(2.into(), 9.into())
        );
        assert_eq!(
            d.get(&".21".parse::<RingWord>().unwrap().rotate(k)),
            Rational::new(1.into(), 9.into())
        );
    }
}

#[test]
fn mlq_totals_match_binomial_products() {
    for (m, sites) in [(vec![1, 1], 4), (vec![2, 1, 1], 6), (vec![1, 1, 1, 1], 6)] {
        let t = TypeVector::new(m, sites).unwrap();
        let explicit = count_all_mlqs_explicit(&t, DEFAULT_MLQ_CAP).unwrap();
        assert_eq!(BigInt::from(explicit), count_all_mlqs(&t));
    }
}

#[test]
fn reverse_permutation_count_three_ways() {
    for b in PositionVector::all(3, 6) {
        let by_paths = lgv_count(&w0_path_spec(&b));
        assert_eq!(BigInt::from(lgv_brute(&w0_path_spec(&b))), by_paths);
        assert_eq!(g_w0_formula(&b).unwrap(), by_paths);
        assert_eq!(
            BigInt::from(g_pi_brute(&w0(3), &b).unwrap()),
            by_paths,
            "{:?}",
            b.positions()
        );
    }
}

#[test]
fn continuum_law_agrees_with_simulation() {
    let exact = p_exact(3).unwrap();
    let est = p_mc(3, 200_000, 5).unwrap();
    for pi in Permutation::all(3) {
        let (mean, se) = est[&pi];
        let p = exact.get(&pi).to_f64().unwrap();
        assert!(
            (mean - p).abs() < 5.0 * se + 1e-9,
            "{pi}: {mean} vs {p} (se {se})"
        );
    }
    assert!(exact.total().is_one());
}

#[test]
fn pattern_counts_are_catalan() {
    let sizes: Vec<usize> = (1..=6)
        .map(|n| enumerate_patterns(n).unwrap().len())
        .collect();
    assert_eq!(sizes, vec![1, 2, 5, 14, 42, 132]);
}

fn laplace_det(m: &[Vec<i64>]) -> i64 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * laplace_det(&minor)
        })
        .sum()
}

proptest! {
    #[test]
    fn bareiss_matches_cofactor_expansion(n in 1usize..5, seed in prop::collection::vec(-6i64..7, 16)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 4 + j]).collect()).collect();
        let d = det_fraction_free(&RationalMatrix::from_integers(&rows));
        prop_assert_eq!(d, Rational::from_integer(BigInt::from(laplace_det(&rows))));
    }
}
