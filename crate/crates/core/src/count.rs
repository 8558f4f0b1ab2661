//! Exact counting of discrete multiline queues by their labeled bottom row,
//! determinant formulas for special bottom words, and nonintersecting
//! lattice paths.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_cap, Error, Result};
use crate::linalg::det_bareiss;
use crate::mlq::for_each_bottom_with_top;
use crate::primitives::{binomial, factorial, for_each_subset, Permutation, RingWord, TypeVector};

/// Largest number of MLQs enumerated explicitly.
pub const DEFAULT_MLQ_CAP: u128 = 50_000_000;

/// Increasing positions `b_1 < ... < b_n` on a ring of `N` sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PositionVector {
    b: Vec<usize>,
    sites: usize,
}

impl PositionVector {
    pub fn new(b: Vec<usize>, sites: usize) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidInput("empty position vector".into()));
        }
        if b.windows(2).any(|p| p[0] >= p[1]) || b.iter().any(|&x| x >= sites) {
            return Err(Error::InvalidInput(format!(
                "positions {b:?} not increasing in 0..{sites}"
            )));
        }
        Ok(Self { b, sites })
    }

    pub fn positions(&self) -> &[usize] {
        &self.b
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// All increasing `n`-tuples in `0..N`.
    pub fn all(n: usize, sites: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for_each_subset(sites, n, |s| {
            out.push(Self {
                b: s.to_vec(),
                sites,
            })
        });
        out
    }
}

/// `prod_i C(N, M_i)`.
pub fn count_all_mlqs(t: &TypeVector) -> BigInt {
    (1..=t.classes())
        .map(|i| binomial(t.sites() as i64, t.cumulative(i) as i64))
        .product()
}

fn top_rows(t: &TypeVector) -> Vec<Vec<usize>> {
    let mut tops = Vec::new();
    for_each_subset(t.sites(), t.cumulative(1), |s| tops.push(s.to_vec()));
    tops
}

/// Counts MLQs of type `t` by walking every row choice.
pub fn count_all_mlqs_explicit(t: &TypeVector, cap: u128) -> Result<u128> {
    check_cap(
        "MLQ enumeration",
        count_all_mlqs(t).try_into().unwrap_or(u128::MAX),
        cap,
    )?;
    Ok(top_rows(t)
        .par_iter()
        .map(|top| {
            let mut c = 0u128;
            for_each_bottom_with_top(t, top, None, |_, _| c += 1);
            c
        })
        .sum())
}

/// Number of MLQs of type `t` projecting to each word.
pub fn mlq_census(t: &TypeVector, cap: u128) -> Result<HashMap<RingWord, u64>> {
    check_cap(
        "MLQ enumeration",
        count_all_mlqs(t).try_into().unwrap_or(u128::MAX),
        cap,
    )?;
    let n = t.sites();
    Ok(top_rows(t)
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<RingWord, u64>, top| {
            for_each_bottom_with_top(t, top, None, |pos, labels| {
                *acc.entry(RingWord::from_placement(n, pos, labels))
                    .or_default() += 1;
            });
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        }))
}

/// `G_pi(b; N)` for every `pi` and `b` at once, for `m = (1, ..., 1)`.
#[derive(Debug, Clone)]
pub struct GCensus {
    n: usize,
    sites: usize,
    counts: HashMap<(Vec<u8>, Vec<usize>), u64>,
}

impl GCensus {
    pub fn new(n: usize, sites: usize, cap: u128) -> Result<Self> {
        let t = TypeVector::permutation(n, sites)?;
        let words = mlq_census(&t, cap)?;
        let counts = words
            .into_iter()
            .map(|(w, c)| ((w.particle_labels(), w.particle_positions()), c))
            .collect();
        Ok(Self { n, sites, counts })
    }

    pub fn classes(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn get(&self, pi: &Permutation, b: &PositionVector) -> u64 {
        self.counts
            .get(&(pi.entries().to_vec(), b.positions().to_vec()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Number of MLQs with `N = b.sites()` and type `(1, ..., 1)` whose bottom
/// row carries `pi` at positions `b`, by enumeration.
pub fn g_pi_brute(pi: &Permutation, b: &PositionVector) -> Result<u64> {
    if pi.len() != b.len() {
        return Err(Error::ArityMismatch(pi.len(), b.len()));
    }
    let t = TypeVector::permutation(pi.len(), b.sites())?;
    let upper: BigInt = (1..t.classes())
        .map(|i| binomial(t.sites() as i64, i as i64))
        .product();
    check_cap(
        "MLQ enumeration",
        upper.try_into().unwrap_or(u128::MAX),
        DEFAULT_MLQ_CAP,
    )?;
    let want = pi.entries();
    Ok(top_rows(&t)
        .par_iter()
        .map(|top| {
            let mut c = 0u64;
            for_each_bottom_with_top(&t, top, Some(b.positions()), |_, labels| {
                if labels == want {
                    c += 1;
                }
            });
            c
        })
        .sum())
}

/// `det{ C(b_i + j - 1 - s_i, j - 1 - s_i) }` with row shifts `s_i`.
fn shifted_binomial_det(b: &[usize], shift: impl Fn(usize) -> i64) -> BigInt {
    let n = b.len();
    let rows = (0..n)
        .map(|i| {
            let s = shift(i);
            (0..n)
                .map(|j| binomial(b[i] as i64 + j as i64 - s, j as i64 - s))
                .collect()
        })
        .collect();
    det_bareiss(rows)
}

/// `det{ C(b_i + j - 1, j - 1) }`.
pub fn g_w0_det(b: &PositionVector) -> BigInt {
    shifted_binomial_det(b.positions(), |_| 0)
}

/// `prod_{k<l} (b_l - b_k) / prod_{d<n} d!`; errors when the division is
/// not exact.
pub fn g_w0_product(b: &PositionVector) -> Result<BigInt> {
    let p = b.positions();
    let mut num = BigInt::one();
    for l in 0..p.len() {
        for k in 0..l {
            num *= BigInt::from(p[l] - p[k]);
        }
    }
    let den: BigInt = (1..p.len() as u64).map(factorial).product();
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::Mismatch(format!(
            "Vandermonde product not divisible at {p:?}"
        )));
    }
    Ok(q)
}

/// `G_{w_0}(b; N)` via the binomial determinant, cross-checked against the
/// product form.
pub fn g_w0_formula(b: &PositionVector) -> Result<BigInt> {
    let d = g_w0_det(b);
    let p = g_w0_product(b)?;
    if d != p {
        return Err(Error::Mismatch(format!(
            "determinant {d} != product {p} at {:?}",
            b.positions()
        )));
    }
    Ok(d)
}

/// `w_0 = n (n-1) ... 1`.
pub fn w0(n: usize) -> Permutation {
    Permutation::reverse(n)
}

/// `s_{k_1} ... s_{k_r} w_0`.
pub fn s_w0(n: usize, ks: &[usize]) -> Permutation {
    ks.iter().rev().fold(w0(n), |p, &k| p.left_mul_simple(k))
}

/// The matrix `A_k`: rows `n-k+1..n` are shifted by one.
pub fn a_k_det(k: usize, b: &PositionVector) -> BigInt {
    let n = b.len();
    shifted_binomial_det(b.positions(), |i| i64::from(i + 1 > n - k))
}

/// `C(N,k) det A_k - G_{w_0}(b)`.
pub fn g_skw0_formula(k: usize, b: &PositionVector) -> Result<BigInt> {
    let n = b.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..{n}")));
    }
    Ok(binomial(b.sites() as i64, k as i64) * a_k_det(k, b) - g_w0_formula(b)?)
}

/// Checks `n > k_1 > k_2 + 1 > ... > k_r + r - 1 > r - 1`.
pub fn check_admissible(n: usize, ks: &[usize]) -> Result<()> {
    let r = ks.len();
    let shifted: Vec<usize> = ks.iter().enumerate().map(|(i, &k)| k + i).collect();
    let ok = r > 0
        && shifted[0] < n
        && shifted.windows(2).all(|w| w[0] > w[1])
        && shifted[r - 1] > r - 1;
    if ok {
        Ok(())
    } else {
        Err(Error::Inadmissible(ks.to_vec()))
    }
}

/// Determinant of `A_S`: row `i` (1-based) is shifted by the
/// `(n+1-i)`-th part of the conjugate of `(k_s)_{s in S}`.
pub fn a_s_det(ks: &[usize], subset: &[usize], b: &PositionVector) -> BigInt {
    let n = b.len();
    let conj = |i: usize| subset.iter().filter(|&&s| ks[s] >= i).count() as i64;
    shifted_binomial_det(b.positions(), |row| conj(n - row))
}

/// The inclusion-exclusion sum over `S` of `(-1)^|S| prod C(N,k_s) det A_S`,
/// multiplied by `(-1)^r` so that `r = 1` gives the one-reflection formula.
pub fn g_sw0_formula(ks: &[usize], b: &PositionVector) -> Result<BigInt> {
    let n = b.len();
    check_admissible(n, ks)?;
    let r = ks.len();
    let big_n = b.sites() as i64;
    let mut acc = BigInt::zero();
    for mask in 0u32..(1 << r) {
        let subset: Vec<usize> = (0..r).filter(|&s| mask >> s & 1 == 1).collect();
        let weight: BigInt = subset
            .iter()
            .map(|&s| binomial(big_n, ks[s] as i64))
            .product();
        let term = weight * a_s_det(ks, &subset, b);
        if subset.len().is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(if r.is_multiple_of(2) { acc } else { -acc })
}

/// A lattice point `(row, column)`; paths step right or down.
pub type Point = (i64, i64);

/// Start and end points of a family of lattice paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathFamilySpec {
    pub starts: Vec<Point>,
    pub ends: Vec<Point>,
}

impl PathFamilySpec {
    pub fn new(starts: Vec<Point>, ends: Vec<Point>) -> Result<Self> {
        if starts.len() != ends.len() {
            return Err(Error::ArityMismatch(starts.len(), ends.len()));
        }
        Ok(Self { starts, ends })
    }
}

/// Right/down paths from `a` to `b`.
pub fn path_count(a: Point, b: Point) -> BigInt {
    let (dr, dc) = (b.0 - a.0, b.1 - a.1);
    if dr < 0 || dc < 0 {
        return BigInt::zero();
    }
    binomial(dr + dc, dr)
}

/// Determinant of the path-count matrix.
pub fn lgv_count(spec: &PathFamilySpec) -> BigInt {
    let rows = spec
        .starts
        .iter()
        .map(|&s| spec.ends.iter().map(|&e| path_count(s, e)).collect())
        .collect();
    det_bareiss(rows)
}

fn all_paths(a: Point, b: Point, cur: &mut Vec<Point>, out: &mut Vec<Vec<Point>>) {
    let p = *cur.last().unwrap_or(&a);
    if p == b {
        out.push(cur.clone());
        return;
    }
    for next in [(p.0 + 1, p.1), (p.0, p.1 + 1)] {
        if next.0 <= b.0 && next.1 <= b.1 {
            cur.push(next);
            all_paths(a, b, cur, out);
            cur.pop();
        }
    }
}

/// Families of pairwise vertex-disjoint paths joining `starts[i]` to
/// `ends[i]`, by enumeration.
pub fn lgv_brute(spec: &PathFamilySpec) -> u64 {
    let families: Vec<Vec<Vec<Point>>> = spec
        .starts
        .iter()
        .zip(&spec.ends)
        .map(|(&s, &e)| {
            let mut out = Vec::new();
            if e.0 >= s.0 && e.1 >= s.1 {
                all_paths(s, e, &mut vec![s], &mut out);
            }
            out
        })
        .collect();
    fn go(families: &[Vec<Vec<Point>>], used: &mut Vec<Point>) -> u64 {
        let Some((first, rest)) = families.split_first() else {
            return 1;
        };
        let mut total = 0;
        for path in first {
            if path.iter().any(|p| used.contains(p)) {
                continue;
            }
            let mark = used.len();
            used.extend_from_slice(path);
            total += go(rest, used);
            used.truncate(mark);
        }
        total
    }
    go(&families, &mut Vec::new())
}

/// Paths realizing `G_{w_0}(b; N)`: start `(r, 0)` for rows `r = n..1`,
/// end `(n, b_i)`.
pub fn w0_path_spec(b: &PositionVector) -> PathFamilySpec {
    let n = b.len() as i64;
    let starts = (0..n).map(|i| (n - i, 0)).collect();
    let ends = b.positions().iter().map(|&x| (n, x as i64)).collect();
    PathFamilySpec { starts, ends }
}

/// Outcome of comparing a formula with enumeration over many inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct Comparison {
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub witness: String,
    pub expected: String,
    pub got: String,
}

impl Comparison {
    pub fn record(
        &mut self,
        witness: impl FnOnce() -> String,
        expected: impl ToString,
        got: impl ToString,
    ) {
        self.checked += 1;
        let (e, g) = (expected.to_string(), got.to_string());
        if e != g {
            self.mismatches.push(Mismatch {
                witness: witness(),
                expected: e,
                got: g,
            });
        }
    }

    pub fn is_match(&self) -> bool {
        self.mismatches.is_empty() && self.checked > 0
    }

    pub fn merge(&mut self, other: Comparison) {
        self.checked += other.checked;
        self.mismatches.extend(other.mismatches);
    }
}

fn compare_formula(
    census: &GCensus,
    pi: &Permutation,
    formula: impl Fn(&PositionVector) -> Result<BigInt>,
) -> Result<Comparison> {
    let mut c = Comparison::default();
    for b in PositionVector::all(census.classes(), census.sites()) {
        let f = formula(&b)?;
        c.record(
            || format!("b={:?} N={}", b.positions(), b.sites()),
            census.get(pi, &b),
            f,
        );
    }
    Ok(c)
}

/// `G_{w_0}` determinant against enumeration for every `b`.
pub fn check_w0(census: &GCensus) -> Result<Comparison> {
    compare_formula(census, &w0(census.classes()), g_w0_formula)
}

/// `G_{s_k w_0}` formula against enumeration for every `b`.
pub fn check_skw0(census: &GCensus, k: usize) -> Result<Comparison> {
    compare_formula(census, &s_w0(census.classes(), &[k]), |b| {
        g_skw0_formula(k, b)
    })
}

/// `G_{s_{k_1}...s_{k_r} w_0}` formula against enumeration for every `b`.
pub fn check_sw0(census: &GCensus, ks: &[usize]) -> Result<Comparison> {
    check_admissible(census.classes(), ks)?;
    compare_formula(census, &s_w0(census.classes(), ks), |b| {
        g_sw0_formula(ks, b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::stationary_for_type;
    use crate::primitives::Rational;
    use proptest::prelude::*;

    fn pv(b: &[usize], n: usize) -> PositionVector {
        PositionVector::new(b.to_vec(), n).unwrap()
    }

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn total_counts() {
        let t = TypeVector::new(vec![1, 1], 4).unwrap();
        assert_eq!(count_all_mlqs(&t), BigInt::from(24));
        assert_eq!(count_all_mlqs_explicit(&t, 1000).unwrap(), 24);
        let t = TypeVector::new(vec![1], 5).unwrap();
        assert_eq!(count_all_mlqs(&t), BigInt::from(5));
        let t = TypeVector::new(vec![1, 1, 1], 5).unwrap();
        assert_eq!(count_all_mlqs(&t), BigInt::from(500));
        assert_eq!(count_all_mlqs_explicit(&t, 1000).unwrap(), 500);
        assert!(count_all_mlqs_explicit(&t, 100).is_err());
    }

    #[test]
    fn two_row_examples() {
        assert_eq!(g_pi_brute(&perm("12"), &pv(&[0, 1], 4)).unwrap(), 3);
        assert_eq!(g_pi_brute(&perm("21"), &pv(&[0, 1], 4)).unwrap(), 1);
        for sites in 2..=6 {
            for b in PositionVector::all(2, sites) {
                let (b1, b2) = (b.positions()[0] as u64, b.positions()[1] as u64);
                assert_eq!(g_pi_brute(&perm("12"), &b).unwrap(), sites as u64 - b2 + b1);
                assert_eq!(g_pi_brute(&perm("21"), &b).unwrap(), b2 - b1);
            }
        }
    }

    #[test]
    fn census_sums_to_total() {
        let census = GCensus::new(2, 4, DEFAULT_MLQ_CAP).unwrap();
        assert_eq!(census.total(), 24);
        let census = GCensus::new(3, 5, DEFAULT_MLQ_CAP).unwrap();
        assert_eq!(census.total(), 500);
        let b = pv(&[0, 2, 3], 5);
        assert_eq!(
            census.get(&perm("321"), &b),
            g_pi_brute(&perm("321"), &b).unwrap()
        );
    }

    #[test]
    fn w0_examples() {
        assert_eq!(g_w0_formula(&pv(&[0, 2], 4)).unwrap(), BigInt::from(2));
        assert_eq!(g_w0_formula(&pv(&[0, 1, 2], 4)).unwrap(), BigInt::one());
        assert_eq!(g_pi_brute(&perm("321"), &pv(&[0, 1, 2], 4)).unwrap(), 1);
        for n in 1..=4 {
            for sites in n..=10 {
                for b in PositionVector::all(n, sites) {
                    assert_eq!(g_w0_det(&b), g_w0_product(&b).unwrap());
                }
            }
        }
    }

    #[test]
    fn reflected_words() {
        assert_eq!(s_w0(2, &[1]), perm("12"));
        assert_eq!(s_w0(3, &[1]), perm("312"));
        assert_eq!(s_w0(3, &[2]), perm("231"));
        assert_eq!(s_w0(4, &[3, 1]), perm("3412"));
    }

    #[test]
    fn skw0_example() {
        let b = pv(&[0, 1], 4);
        assert_eq!(a_k_det(1, &b), BigInt::one());
        assert_eq!(g_skw0_formula(1, &b).unwrap(), BigInt::from(3));
        assert!(g_skw0_formula(2, &b).is_err());
    }

    #[test]
    fn many_reflections_reduce_to_one() {
        for sites in 3..=7 {
            for b in PositionVector::all(3, sites) {
                for k in 1..3 {
                    assert_eq!(
                        g_sw0_formula(&[k], &b).unwrap(),
                        g_skw0_formula(k, &b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn empty_subset_is_vandermonde() {
        for b in PositionVector::all(4, 7) {
            assert_eq!(a_s_det(&[3, 1], &[], &b), g_w0_det(&b));
        }
    }

    #[test]
    fn admissibility() {
        assert!(check_admissible(4, &[3, 1]).is_ok());
        assert!(check_admissible(4, &[2, 1]).is_err());
        assert!(check_admissible(4, &[4]).is_err());
        assert!(check_admissible(6, &[5, 3, 1]).is_ok());
        assert!(check_admissible(6, &[5, 3, 2]).is_err());
        assert!(check_admissible(4, &[]).is_err());
    }

    #[test]
    fn one_reflection_theorem_small() {
        for sites in 3..=6 {
            let census = GCensus::new(3, sites, DEFAULT_MLQ_CAP).unwrap();
            assert!(check_w0(&census).unwrap().is_match());
            for k in 1..=2 {
                let c = check_skw0(&census, k).unwrap();
                assert!(c.is_match(), "N={sites} k={k}: {:?}", c.mismatches);
            }
        }
    }

    #[test]
    fn stationary_law_is_mlq_projection() {
        for (m, sites) in [(vec![1, 1], 4), (vec![2, 1], 5), (vec![1, 1, 1], 5)] {
            let t = TypeVector::new(m, sites).unwrap();
            let census = mlq_census(&t, DEFAULT_MLQ_CAP).unwrap();
            let z = count_all_mlqs(&t);
            let pi = stationary_for_type(&t).unwrap();
            for (w, p) in pi.iter() {
                let g = census.get(w).copied().unwrap_or(0);
                assert_eq!(*p, Rational::new(g.into(), z.clone()), "{w}");
            }
        }
    }

    #[test]
    fn lgv_examples() {
        let one = PathFamilySpec::new(vec![(0, 0)], vec![(1, 2)]).unwrap();
        assert_eq!(lgv_count(&one), BigInt::from(3));
        assert_eq!(lgv_brute(&one), 3);
        let w0 = PathFamilySpec::new(vec![(2, 0), (1, 0)], vec![(2, 0), (2, 2)]).unwrap();
        assert_eq!(w0, w0_path_spec(&pv(&[0, 2], 4)));
        assert_eq!(lgv_count(&w0), BigInt::from(2));
        assert_eq!(lgv_brute(&w0), 2);
        let blocked = PathFamilySpec::new(vec![(0, 0), (0, 2)], vec![(1, 0), (1, 1)]).unwrap();
        assert_eq!(lgv_count(&blocked), BigInt::zero());
        assert_eq!(lgv_brute(&blocked), 0);
        assert!(PathFamilySpec::new(vec![(0, 0)], vec![]).is_err());
    }

    #[test]
    fn lgv_paths_match_w0_counts() {
        for n in 1..=3 {
            for b in PositionVector::all(n, 6) {
                let spec = w0_path_spec(&b);
                assert_eq!(lgv_count(&spec), g_w0_det(&b));
                assert_eq!(BigInt::from(lgv_brute(&spec)), g_w0_det(&b));
            }
        }
    }

    proptest! {
        #[test]
        fn lgv_determinant_counts_disjoint_families(
            rows in proptest::sample::subsequence((0i64..5).collect::<Vec<_>>(), 1..=3),
            cols in proptest::sample::subsequence((0i64..5).collect::<Vec<_>>(), 3),
        ) {
            // starts on column 0 from the bottom up, ends on row 4 left to right
            let k = rows.len();
            let starts: Vec<Point> = rows.iter().rev().map(|&r| (r, 0)).collect();
            let ends: Vec<Point> = cols[..k].iter().map(|&c| (4, c)).collect();
            let spec = PathFamilySpec::new(starts, ends).unwrap();
            prop_assert_eq!(lgv_count(&spec), BigInt::from(lgv_brute(&spec)));
        }
    }
}
