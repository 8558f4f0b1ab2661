//! The continuous limit: arrangements of continuous multiline queues,
//! permutation probabilities `p_pi`, density polynomials `g_pi`, and
//! two-point correlations `c_{i,j}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{check_cap, Error, Result};
use crate::mlq::Arrangement;
use crate::poly::{vandermonde, Bound, MultiPoly, OperatorExpr};
use crate::primitives::{
    binomial, factorial, multinomial, next_permutation, rational_to_string, Permutation, Rational,
};

/// Largest number of arrangements enumerated exhaustively (n = 5).
pub const DEFAULT_ARRANGEMENT_CAP: u128 = 40_000_000;

const MAX_ROWS: usize = 8;
const MAX_BOXES: usize = 36;

/// Number of boxes `C(n+1, 2)`.
pub fn box_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// `B! / (1! 2! ... n!)`.
pub fn arrangement_count(n: usize) -> BigInt {
    multinomial(&(1..=n as u64).collect::<Vec<_>>())
}

/// Bottom-row labels of the arrangement `order` (rows `1..=n`, row `r`
/// holding `r` boxes), in slot order, together with the bottom-row slots.
///
/// Allocation-free version of the labeling procedure; slots are distinct so
/// "weakly to the right" means the next slot cyclically.
pub fn label_order(order: &[u8], n: usize) -> ([u8; MAX_ROWS], [u8; MAX_ROWS]) {
    debug_assert!(n <= MAX_ROWS && order.len() <= MAX_BOXES);
    let mut prev_pos = [0u8; MAX_ROWS];
    let mut prev_lab = [0u8; MAX_ROWS];
    let mut pl = 0;
    for (s, &r) in order.iter().enumerate() {
        if r == 1 {
            prev_pos[pl] = s as u8;
            prev_lab[pl] = 1;
            pl += 1;
        }
    }
    for row in 2..=n as u8 {
        let mut cur_pos = [0u8; MAX_ROWS];
        let mut cl = 0;
        for (s, &r) in order.iter().enumerate() {
            if r == row {
                cur_pos[cl] = s as u8;
                cl += 1;
            }
        }
        // boxes of the row above in (label, position) order
        let mut idx = [0usize; MAX_ROWS];
        for (i, x) in idx.iter_mut().enumerate().take(pl) {
            *x = i;
        }
        idx[..pl].sort_unstable_by_key(|&i| (prev_lab[i], prev_pos[i]));
        let mut cur_lab = [0u8; MAX_ROWS];
        for &i in &idx[..pl] {
            let p = prev_pos[i];
            let mut j = cur_pos[..cl].iter().position(|&c| c >= p).unwrap_or(0);
            while cur_lab[j] != 0 {
                j = (j + 1) % cl;
            }
            cur_lab[j] = prev_lab[i];
        }
        for l in cur_lab.iter_mut().take(cl) {
            if *l == 0 {
                *l = row;
            }
        }
        prev_pos = cur_pos;
        prev_lab = cur_lab;
        pl = cl;
    }
    (prev_lab, prev_pos)
}

/// Number of upper-row boxes in each of the `n + 1` gaps cut by the bottom
/// row: before the first bottom box, between consecutive ones, after the last.
fn gap_counts(order: &[u8], n: usize) -> [u8; MAX_ROWS + 1] {
    let mut k = [0u8; MAX_ROWS + 1];
    let mut g = 0;
    for &r in order {
        if r as usize == n {
            g += 1;
        } else {
            k[g] += 1;
        }
    }
    k
}

fn pack(v: &[u8]) -> u64 {
    v.iter().fold(0u64, |acc, &x| (acc << 5) | x as u64)
}

fn unpack(mut code: u64, len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    for x in v.iter_mut().rev() {
        *x = (code & 31) as u8;
        code >>= 5;
    }
    v
}

/// Distinct prefixes of the sorted multiset `items` of length `len`, each
/// with the sorted remainder.
fn split_by_prefix(items: &[u8], len: usize) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut out = Vec::new();
    fn go(prefix: &mut Vec<u8>, rest: &[u8], len: usize, out: &mut Vec<(Vec<u8>, Vec<u8>)>) {
        if prefix.len() == len || rest.is_empty() {
            out.push((prefix.clone(), rest.to_vec()));
            return;
        }
        let mut last = None;
        for i in 0..rest.len() {
            if Some(rest[i]) == last {
                continue;
            }
            last = Some(rest[i]);
            let mut r = rest.to_vec();
            let x = r.remove(i);
            prefix.push(x);
            go(prefix, &r, len, out);
            prefix.pop();
        }
    }
    go(&mut Vec::new(), items, len, &mut out);
    out
}

/// Calls `f` on every distinct arrangement for `n`, partitioned by prefix
/// and folded in parallel; partial results are merged in prefix order.
fn fold_arrangements<T, F, M>(n: usize, init: impl Fn() -> T + Sync, visit: F, merge: M) -> T
where
    T: Send,
    F: Fn(&mut T, &[u8]) + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let items: Vec<u8> = Arrangement::first_standard(n).order().to_vec();
    let prefixes = split_by_prefix(&items, 4.min(items.len()));
    let parts: Vec<T> = prefixes
        .into_par_iter()
        .map(|(prefix, mut rest)| {
            let mut acc = init();
            let mut buf = prefix.clone();
            buf.extend_from_slice(&rest);
            loop {
                buf[prefix.len()..].copy_from_slice(&rest);
                visit(&mut acc, &buf);
                if !next_permutation(&mut rest) {
                    break;
                }
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init(), merge)
}

/// Visits every distinct arrangement for `n` in lexicographic order.
pub fn enumerate_arrangements(n: usize, cap: u128, mut f: impl FnMut(&Arrangement)) -> Result<()> {
    check_cap(
        "arrangements",
        arrangement_count(n).to_u128().unwrap_or(u128::MAX),
        cap,
    )?;
    let mut items: Vec<u8> = Arrangement::first_standard(n).order().to_vec();
    loop {
        f(&Arrangement::new(items.clone()).expect("standard multiset"));
        if !next_permutation(&mut items) {
            return Ok(());
        }
    }
}

/// Exhaustive statistics of all arrangements for one `n`, with the origin
/// cut at the start of the slot sequence.
#[derive(Debug, Clone)]
pub struct ArrangementCensus {
    n: usize,
    total: u64,
    /// packed permutation -> count
    per_perm: HashMap<u64, u64>,
    /// packed permutation -> packed gap counts -> count
    per_gaps: HashMap<u64, HashMap<u64, u64>>,
    /// `pair_at[(a * n + i) * n + j]`: letters `a`, `a+1` (cyclically) are `i+1`, `j+1`
    pair_at: Vec<u64>,
}

impl ArrangementCensus {
    pub fn compute(n: usize, cap: u128) -> Result<Self> {
        if n == 0 || n > MAX_ROWS {
            return Err(Error::InvalidInput(format!(
                "n = {n} outside 1..={MAX_ROWS}"
            )));
        }
        check_cap(
            "arrangements",
            arrangement_count(n).to_u128().unwrap_or(u128::MAX),
            cap,
        )?;
        struct Acc {
            total: u64,
            per_gaps: HashMap<u64, HashMap<u64, u64>>,
            pair_at: Vec<u64>,
        }
        let acc = fold_arrangements(
            n,
            || Acc {
                total: 0,
                per_gaps: HashMap::new(),
                pair_at: vec![0; n * n * n],
            },
            |acc, order| {
                let (labels, _) = label_order(order, n);
                let gaps = gap_counts(order, n);
                acc.total += 1;
                *acc.per_gaps
                    .entry(pack(&labels[..n]))
                    .or_default()
                    .entry(pack(&gaps[..=n]))
                    .or_default() += 1;
                for a in 0..n {
                    let i = labels[a] as usize - 1;
                    let j = labels[(a + 1) % n] as usize - 1;
                    acc.pair_at[(a * n + i) * n + j] += 1;
                }
            },
            |mut x, y| {
                x.total += y.total;
                for (p, m) in y.per_gaps {
                    let slot = x.per_gaps.entry(p).or_default();
                    for (g, c) in m {
                        *slot.entry(g).or_default() += c;
                    }
                }
                for (a, b) in x.pair_at.iter_mut().zip(y.pair_at) {
                    *a += b;
                }
                x
            },
        );
        let per_perm = acc
            .per_gaps
            .iter()
            .map(|(p, m)| (*p, m.values().sum()))
            .collect();
        Ok(Self {
            n,
            total: acc.total,
            per_perm,
            per_gaps: acc.per_gaps,
            pair_at: acc.pair_at,
        })
    }

    /// Shared census for `n <= 5`, computed once per process.
    pub fn cached(n: usize) -> Result<&'static Self> {
        static CACHE: [OnceLock<ArrangementCensus>; 6] = [
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
        ];
        if n == 0 || n > 5 {
            return Err(Error::InvalidInput(format!(
                "cached census covers n in 1..=5, got {n}"
            )));
        }
        if let Some(c) = CACHE[n].get() {
            return Ok(c);
        }
        let c = Self::compute(n, DEFAULT_ARRANGEMENT_CAP)?;
        Ok(CACHE[n].get_or_init(|| c))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Arrangements whose bottom row reads `pi` from the origin.
    pub fn count(&self, pi: &Permutation) -> u64 {
        self.per_perm.get(&pack(pi.entries())).copied().unwrap_or(0)
    }

    /// `(gap counts, multiplicity)` for arrangements labeling to `pi`.
    pub fn gap_profile(&self, pi: &Permutation) -> Vec<(Vec<u8>, u64)> {
        let mut v: Vec<(Vec<u8>, u64)> = self
            .per_gaps
            .get(&pack(pi.entries()))
            .map(|m| {
                m.iter()
                    .map(|(g, c)| (unpack(*g, self.n + 1), *c))
                    .collect()
            })
            .unwrap_or_default();
        v.sort();
        v
    }

    /// Number of arrangements with letters `a`, `a+1` (0-based, cyclic)
    /// equal to `i`, `j` (1-based labels).
    pub fn pair_count_at(&self, a: usize, i: usize, j: usize) -> u64 {
        let n = self.n;
        self.pair_at[(a * n + (i - 1)) * n + (j - 1)]
    }

    /// Arrangements in which `j` is the cyclic successor of `i`.
    pub fn successor_count(&self, i: usize, j: usize) -> u64 {
        (0..self.n).map(|a| self.pair_count_at(a, i, j)).sum()
    }
}

/// Probabilities `p_pi` of the bottom permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermDist {
    pub n: usize,
    pub probs: BTreeMap<Permutation, Rational>,
}

impl PermDist {
    pub fn get(&self, pi: &Permutation) -> Rational {
        self.probs.get(pi).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.probs.values().sum()
    }
}

impl Serialize for PermDist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = self
            .probs
            .iter()
            .map(|(p, r)| (p.to_string(), rational_to_string(r)))
            .collect();
        m.serialize(s)
    }
}

/// Exact `p_pi` for every permutation of size `n <= 5`.
pub fn p_exact(n: usize) -> Result<PermDist> {
    let c = ArrangementCensus::cached(n)?;
    let total = BigInt::from(c.total());
    let probs = Permutation::all(n)
        .into_iter()
        .map(|pi| {
            let p = Rational::new(BigInt::from(c.count(&pi)), total.clone());
            (pi, p)
        })
        .collect();
    Ok(PermDist { n, probs })
}

/// `p_pi` with the bottom word read from every origin slot, averaged; used
/// to confirm that the origin-0 census is rotation invariant.
pub fn p_all_origins(n: usize, cap: u128) -> Result<PermDist> {
    let b = box_count(n);
    let mut counts: BTreeMap<Permutation, u64> = BTreeMap::new();
    let mut total = 0u64;
    enumerate_arrangements(n, cap, |a| {
        for s in 0..b {
            let rotated = a.rotate(s);
            let (labels, _) = label_order(rotated.order(), n);
            let pi = Permutation::new(labels[..n].to_vec()).expect("labels form a permutation");
            *counts.entry(pi).or_default() += 1;
            total += 1;
        }
    })?;
    let probs = Permutation::all(n)
        .into_iter()
        .map(|pi| {
            let c = counts.get(&pi).copied().unwrap_or(0);
            (pi, Rational::new(c.into(), total.into()))
        })
        .collect();
    Ok(PermDist { n, probs })
}

/// `1 / prod_{k=1}^{n-1} C(2k+1, k+1)`.
pub fn p_w0_formula(n: usize) -> Rational {
    let den: BigInt = (1..n as i64).map(|k| binomial(2 * k + 1, k + 1)).product();
    Rational::new(BigInt::one(), den)
}

/// `n! * prod_{i<n} i!`: the density of a labeled continuous MLQ per unit
/// of ordered placement volume.
fn density_constant(n: usize) -> BigInt {
    (1..n as u64).map(factorial).product::<BigInt>() * factorial(n as u64)
}

/// Length of gap `g` as a polynomial: `q_1`, `q_{g+1} - q_g`, `1 - q_n`.
fn gap_poly(n: usize, g: usize) -> MultiPoly {
    match g {
        0 => MultiPoly::var(n, 1),
        g if g == n => &MultiPoly::one(n) - &MultiPoly::var(n, n),
        g => &MultiPoly::var(n, g + 1) - &MultiPoly::var(n, g),
    }
}

/// Density `g_pi(q_1, ..., q_n)` of the bottom boxes at `q_1 < ... < q_n`
/// with labels `pi` read left to right.
pub fn g_poly(pi: &Permutation) -> Result<MultiPoly> {
    let n = pi.len();
    let census = ArrangementCensus::cached(n)?;
    Ok(g_poly_from(census, pi))
}

/// `g_pi` from a precomputed census.
pub fn g_poly_from(census: &ArrangementCensus, pi: &Permutation) -> MultiPoly {
    let n = census.n();
    let gaps: Vec<MultiPoly> = (0..=n).map(|g| gap_poly(n, g)).collect();
    let mut powers: HashMap<(usize, u8), MultiPoly> = HashMap::new();
    let mut out = MultiPoly::zero(n);
    for (kvec, count) in census.gap_profile(pi) {
        let mut term = MultiPoly::one(n);
        let mut den = BigInt::one();
        for (g, &k) in kvec.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let p = powers
                .entry((g, k))
                .or_insert_with(|| gaps[g].pow(k as u32));
            term = &term * p;
            den *= factorial(k as u64);
        }
        out = &out + &term.scale(&Rational::new(BigInt::from(count), den));
    }
    out.scale(&Rational::from_integer(density_constant(n)))
}

/// `g_pi` for every permutation of size `n`.
pub fn g_all(n: usize) -> Result<BTreeMap<Permutation, MultiPoly>> {
    let census = ArrangementCensus::cached(n)?;
    Ok(Permutation::all(n)
        .into_par_iter()
        .map(|pi| {
            let g = g_poly_from(census, &pi);
            (pi, g)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}

/// `n! * prod_{k<l} (q_l - q_k)`.
pub fn g_w0_closed(n: usize) -> MultiPoly {
    vandermonde(n).scale(&Rational::from_integer(factorial(n as u64)))
}

/// Result of testing `g_target = op(g_base)`.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorCheck {
    pub target: String,
    pub base: String,
    pub operator: String,
    pub holds: bool,
    /// `g_target - op(g_base)` when nonzero.
    pub residual: Option<MultiPoly>,
}

pub fn check_operator_identity(
    target: &Permutation,
    op: &OperatorExpr,
    base: &Permutation,
) -> Result<OperatorCheck> {
    if target.len() != base.len() {
        return Err(Error::ArityMismatch(target.len(), base.len()));
    }
    let lhs = g_poly(target)?;
    let rhs = op.apply(&g_poly(base)?)?;
    let diff = &lhs - &rhs;
    Ok(OperatorCheck {
        target: target.to_string(),
        base: base.to_string(),
        operator: op.to_string(),
        holds: diff.is_zero(),
        residual: (!diff.is_zero()).then_some(diff),
    })
}

/// The operator `prod_s ((1/k_s!) d^{k_s}/dq_{n-k_s+1}..dq_n - 1)` that is
/// conjectured to send `g_{w_0}` to `g_{s_{k_1}...s_{k_r} w_0}`.
pub fn reflection_operator(n: usize, ks: &[usize]) -> OperatorExpr {
    ks.iter().fold(OperatorExpr::identity(), |acc, &k| {
        acc.compose(&OperatorExpr::one_away(n, k))
    })
}

/// Cyclic rotation classes of permutations of size `n`, each listed from its
/// lexicographically smallest member.
pub fn cyclic_classes(n: usize) -> Vec<Vec<Permutation>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for p in Permutation::all(n) {
        if seen.contains(&p) {
            continue;
        }
        let class: Vec<Permutation> = (0..n).map(|k| p.rotate(k)).collect();
        seen.extend(class.iter().cloned());
        out.push(class);
    }
    out
}

/// Harmonicity of `g_pi` per cyclic class.
#[derive(Debug, Clone, Serialize)]
pub struct HarmonicCensus {
    pub n: usize,
    pub classes: usize,
    pub harmonic_classes: usize,
    /// representative -> harmonic
    pub by_class: BTreeMap<String, bool>,
    /// classes whose members disagree (expected empty)
    pub inconsistent: Vec<String>,
}

pub fn harmonic_census(n: usize) -> Result<HarmonicCensus> {
    let all = g_all(n)?;
    let mut by_class = BTreeMap::new();
    let mut inconsistent = Vec::new();
    let classes = cyclic_classes(n);
    for class in &classes {
        let flags: Vec<bool> = class.iter().map(|p| all[p].is_harmonic()).collect();
        if flags.iter().any(|&f| f != flags[0]) {
            inconsistent.push(class[0].to_string());
        }
        by_class.insert(class[0].to_string(), flags[0]);
    }
    Ok(HarmonicCensus {
        n,
        classes: classes.len(),
        harmonic_classes: by_class.values().filter(|&&h| h).count(),
        by_class,
        inconsistent,
    })
}

/// Checks that the top-degree part of `g_u` is `(-1)^{l(w_0) - l(u)} g_{w_0}`.
pub fn leading_part_matches(u: &Permutation, g: &MultiPoly) -> bool {
    let n = u.len();
    let top = g_w0_closed(n);
    let d = top.degree().unwrap_or(0);
    let sign = (n * (n - 1) / 2 - u.length()).is_multiple_of(2);
    let expect = if sign { top } else { -&top };
    g.degree() == Some(d) && g.homogeneous_part(d) == expect
}

/// Two-point correlation table with rows summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrTable {
    pub n: usize,
    entries: Vec<Vec<Rational>>,
}

impl CorrTable {
    pub fn from_entries(entries: Vec<Vec<Rational>>) -> Self {
        Self {
            n: entries.len(),
            entries,
        }
    }

    /// `c_{i,j}`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i - 1][j - 1]
    }

    pub fn rows_sum_to_one(&self) -> bool {
        self.entries
            .iter()
            .all(|r| r.iter().sum::<Rational>().is_one())
    }
}

impl Serialize for CorrTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(rational_to_string).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Exact `c_{i,j}` for `n <= 5`: the probability that `j` is the cyclic
/// successor of `i`.
pub fn correlations_exact(n: usize) -> Result<CorrTable> {
    let c = ArrangementCensus::cached(n)?;
    correlations_from(c)
}

pub fn correlations_from(c: &ArrangementCensus) -> Result<CorrTable> {
    let n = c.n();
    let total = BigInt::from(c.total());
    let entries = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| Rational::new(c.successor_count(i, j).into(), total.clone()))
                .collect()
        })
        .collect();
    Ok(CorrTable::from_entries(entries))
}

/// `n * P(w_a = i, w_{a+1} = j)` for a fixed letter index `a` (0-based).
/// Not rotation invariant: which particle comes first after the origin is
/// biased by the spacing. Its average over `a` is the correlation table.
pub fn correlations_at(c: &ArrangementCensus, a: usize) -> CorrTable {
    let n = c.n();
    let total = BigInt::from(c.total());
    let entries = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| Rational::new(BigInt::from(c.pair_count_at(a, i, j)) * n, total.clone()))
                .collect()
        })
        .collect();
    CorrTable::from_entries(entries)
}

/// Successor correlations with the origin cut moved `shift` slots to the
/// right in every arrangement.
pub fn correlations_with_origin(n: usize, shift: usize, cap: u128) -> Result<CorrTable> {
    let mut counts = vec![vec![0u64; n]; n];
    let mut total = 0u64;
    enumerate_arrangements(n, cap, |a| {
        let (labels, _) = label_order(a.rotate(shift).order(), n);
        for s in 0..n {
            counts[labels[s] as usize - 1][labels[(s + 1) % n] as usize - 1] += 1;
        }
        total += 1;
    })?;
    Ok(CorrTable::from_entries(
        counts
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| Rational::new(c.into(), total.into()))
                    .collect()
            })
            .collect(),
    ))
}

/// Monte Carlo estimate of a correlation table.
#[derive(Debug, Clone, Serialize)]
pub struct CorrEstimate {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `[i-1][j-1] -> (estimate, stderr)`
    pub entries: Vec<Vec<(f64, f64)>>,
}

impl CorrEstimate {
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        self.entries[i - 1][j - 1]
    }
}

/// Number of independent sampling streams; fixed so results do not depend
/// on the thread count.
pub const MC_STREAMS: u64 = 64;

/// Samples uniform arrangements and reads off cyclic successors.
pub fn correlations_mc(n: usize, samples: u64, seed: u64) -> Result<CorrEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    if !(2..=MAX_ROWS).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "n = {n} outside 2..={MAX_ROWS}"
        )));
    }
    let counts: Vec<Vec<u64>> = (0..MC_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let share = samples / MC_STREAMS + u64::from(stream < samples % MC_STREAMS);
            let mut order = Arrangement::first_standard(n).order().to_vec();
            let mut counts = vec![0u64; n * n];
            for _ in 0..share {
                order.shuffle(&mut rng);
                let (labels, _) = label_order(&order, n);
                for a in 0..n {
                    let i = labels[a] as usize - 1;
                    let j = labels[(a + 1) % n] as usize - 1;
                    counts[i * n + j] += 1;
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; n * n];
    for c in counts {
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    let s = samples as f64;
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let p = total[i * n + j] as f64 / s;
                    (p, (p * (1.0 - p) / s).sqrt())
                })
                .collect()
        })
        .collect();
    Ok(CorrEstimate {
        n,
        samples,
        seed,
        entries,
    })
}

/// Monte Carlo estimate of `p_pi` for sizes beyond exhaustive reach.
pub fn p_mc(n: usize, samples: u64, seed: u64) -> Result<BTreeMap<Permutation, (f64, f64)>> {
    if samples == 0 || n == 0 || n > MAX_ROWS {
        return Err(Error::InvalidInput(
            "need samples > 0 and n in range".into(),
        ));
    }
    let parts: Vec<HashMap<u64, u64>> = (0..MC_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let share = samples / MC_STREAMS + u64::from(stream < samples % MC_STREAMS);
            let mut order = Arrangement::first_standard(n).order().to_vec();
            let mut counts = HashMap::new();
            for _ in 0..share {
                order.shuffle(&mut rng);
                let (labels, _) = label_order(&order, n);
                *counts.entry(pack(&labels[..n])).or_insert(0u64) += 1;
            }
            counts
        })
        .collect();
    let mut total: BTreeMap<u64, u64> = BTreeMap::new();
    for p in parts {
        for (k, v) in p {
            *total.entry(k).or_default() += v;
        }
    }
    let s = samples as f64;
    Ok(total
        .into_iter()
        .map(|(k, c)| {
            let p = c as f64 / s;
            (
                Permutation::new(unpack(k, n)).expect("labels"),
                (p, (p * (1.0 - p) / s).sqrt()),
            )
        })
        .collect())
}

fn c2(x: i64) -> BigInt {
    binomial(x, 2)
}

fn frac(num: impl Into<BigInt>, den: BigInt) -> Rational {
    Rational::new(num.into(), den)
}

/// Conjectured closed form of `c_{i,j}(n)`.
pub fn conj_correlation(i: usize, j: usize, n: usize) -> Result<Rational> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::InvalidInput(format!(
            "no correlation c_({i},{j}) for n = {n}"
        )));
    }
    let (i, j, n) = (i as i64, j as i64, n as i64);
    Ok(if i + 1 < j {
        frac(n, c2(n + j))
    } else if i + 1 == j {
        frac(n, c2(n + j)) + frac(n * i, c2(n + i))
    } else if i < n {
        frac(n, c2(n + j)) - frac(n, c2(n + i))
    } else {
        frac(n * (j + 1), c2(n + j)) - frac(n * (j - 1), c2(n + j - 1)) - frac(n, c2(2 * n))
    })
}

/// Full conjectured table (zero diagonal).
pub fn conj_table(n: usize) -> Result<CorrTable> {
    let entries = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    if i == j {
                        Ok(Rational::zero())
                    } else {
                        conj_correlation(i, j, n)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrTable::from_entries(entries))
}

/// `c_{2,1} = 4/((n+1)(n+2))`.
pub fn c21_closed(n: usize) -> Rational {
    frac(4, BigInt::from((n + 1) * (n + 2)))
}

/// `c_{1,2} = 4/(n+2)`.
pub fn c12_closed(n: usize) -> Rational {
    frac(4, BigInt::from(n + 2))
}

/// `c_{n,n-1} = 3/((2n-1)(2n-3))`.
pub fn c_n_nminus1_closed(n: usize) -> Rational {
    frac(3, BigInt::from((2 * n - 1) * (2 * n - 3)))
}

/// `integral_0^1 2n (1-y)^2 y^(n-1) dy`.
pub fn c21_integral(n: usize) -> Rational {
    let y = MultiPoly::var(1, 1);
    let one_minus = &MultiPoly::one(1) - &y;
    let f = (&one_minus.pow(2) * &y.pow(n as u32 - 1))
        .scale(&Rational::from_integer(BigInt::from(2 * n)));
    f.integrate_var(
        1,
        Bound::Const(Rational::zero()),
        Bound::Const(Rational::one()),
    )
    .coeff(&[0])
}

/// `SYT_{n-2,n-2,i} = (2n-4+i)! (n-i)(n-i-1) / (i! n! (n-1)!)`.
pub fn syt_three_columns(n: usize, i: usize) -> Rational {
    let num = factorial((2 * n - 4 + i) as u64) * BigInt::from((n - i) * (n - i - 1));
    let den = factorial(i as u64) * factorial(n as u64) * factorial(n as u64 - 1);
    Rational::new(num, den)
}

/// `(3n-3) sum_i SYT_{n-2,n-2,i} / multinomial(3n-3; n, n-1, n-2)`,
/// checked against `3/((2n-1)(2n-3))`.
pub fn c_n_nminus1_syt(n: usize) -> Result<Rational> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("n = {n} < 3")));
    }
    let sum: Rational = (0..=n - 2).map(|i| syt_three_columns(n, i)).sum();
    let m = multinomial(&[n as u64, n as u64 - 1, n as u64 - 2]);
    let v = sum * Rational::from_integer(BigInt::from(3 * n - 3)) / Rational::from_integer(m);
    if v != c_n_nminus1_closed(n) {
        return Err(Error::Mismatch(format!("SYT sum gives {v} at n = {n}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlq::label_arrangement;
    use crate::primitives::{int, rat};

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn arrangement_counts() {
        for (n, want) in [(1, 1u64), (2, 3), (3, 60), (4, 12600)] {
            let mut c = 0u64;
            enumerate_arrangements(n, DEFAULT_ARRANGEMENT_CAP, |_| c += 1).unwrap();
            assert_eq!(c, want);
            assert_eq!(arrangement_count(n), BigInt::from(want));
            assert_eq!(ArrangementCensus::cached(n).unwrap().total(), want);
        }
        assert_eq!(arrangement_count(5), BigInt::from(37_837_800u64));
        assert!(enumerate_arrangements(6, DEFAULT_ARRANGEMENT_CAP, |_| {}).is_err());
    }

    #[test]
    fn fast_labeler_matches_reference() {
        for n in 1..=4 {
            enumerate_arrangements(n, DEFAULT_ARRANGEMENT_CAP, |a| {
                let (fast, _) = label_order(a.order(), n);
                assert_eq!(
                    &fast[..n],
                    label_arrangement(a).as_slice(),
                    "{:?}",
                    a.order()
                );
            })
            .unwrap();
        }
    }

    #[test]
    fn prefix_split_covers_everything() {
        let items = Arrangement::first_standard(3).order().to_vec();
        let total = fold_arrangements(3, || 0u64, |c, _| *c += 1, |a, b| a + b);
        assert_eq!(total, 60);
        assert_eq!(split_by_prefix(&items, 1).len(), 3);
    }

    #[test]
    fn permutation_probabilities() {
        let d = p_exact(2).unwrap();
        assert_eq!(d.get(&perm("21")), rat(1, 3));
        assert_eq!(d.get(&perm("12")), rat(2, 3));
        assert_eq!(p_exact(3).unwrap().get(&perm("321")), rat(1, 30));
        for n in 1..=4 {
            assert!(p_exact(n).unwrap().total().is_one());
        }
    }

    #[test]
    fn origin_cut_is_irrelevant() {
        for n in 2..=4 {
            assert_eq!(
                p_all_origins(n, DEFAULT_ARRANGEMENT_CAP).unwrap(),
                p_exact(n).unwrap()
            );
        }
    }

    #[test]
    fn reverse_permutation_formula() {
        assert_eq!(p_w0_formula(2), rat(1, 3));
        assert_eq!(p_w0_formula(3), rat(1, 30));
        assert_eq!(p_w0_formula(4), rat(1, 1050));
        for n in 2..=4 {
            assert_eq!(
                p_exact(n).unwrap().get(&Permutation::reverse(n)),
                p_w0_formula(n)
            );
        }
    }

    #[test]
    fn density_examples() {
        let q = |i| MultiPoly::var(2, i);
        assert_eq!(g_poly(&perm("21")).unwrap(), (&q(2) - &q(1)).scale(&int(2)));
        let g12 = (&(&MultiPoly::one(2) - &q(2)) + &q(1)).scale(&int(2));
        assert_eq!(g_poly(&perm("12")).unwrap(), g12);
        for n in 1..=4 {
            assert_eq!(g_poly(&Permutation::reverse(n)).unwrap(), g_w0_closed(n));
        }
    }

    #[test]
    fn densities_integrate_to_probabilities() {
        for n in 1..=4 {
            let p = p_exact(n).unwrap();
            let g = g_all(n).unwrap();
            let mut total = Rational::zero();
            for (pi, poly) in &g {
                let integral = poly.integrate_ordered_simplex();
                assert_eq!(integral, p.get(pi), "{pi}");
                total += integral;
            }
            assert!(total.is_one());
        }
    }

    #[test]
    fn known_operator_identities() {
        let cases = [
            ("4312", "d4 - 1", "4321"),
            ("4231", "1/2*d3*d4 - 1", "4321"),
            ("3421", "1/6*d2*d3*d4 - 1", "4321"),
            ("132", "1 + d1 + 1/2*d1^2", "321"),
            ("1432", "-1 - d1 - 1/2*d1^2 - 1/6*d1^3", "4321"),
            ("4132", "1 - d3 - d4 + 1/2*d3*d4", "4321"),
            ("4213", "1 - d4 + 1/2*d4^2", "4321"),
            ("3412", "1 - 1/6*d2*d3*d4 - d4 + 1/6*d2*d3*d4^2", "4321"),
        ];
        for (t, op, b) in cases {
            let r = check_operator_identity(&perm(t), &op.parse().unwrap(), &perm(b)).unwrap();
            assert!(
                r.holds,
                "g_{t} != ({op}) g_{b}: {:?}",
                r.residual.map(|p| p.to_string())
            );
        }
    }

    #[test]
    fn reflection_operators_for_n4() {
        for k in 1..4 {
            let r = check_operator_identity(
                &crate::count::s_w0(4, &[k]),
                &reflection_operator(4, &[k]),
                &Permutation::reverse(4),
            )
            .unwrap();
            assert!(r.holds, "k={k}");
        }
        let composed = reflection_operator(4, &[3, 1]);
        assert_eq!(
            composed,
            "1 - 1/6*d2*d3*d4 - d4 + 1/6*d2*d3*d4^2".parse().unwrap()
        );
    }

    #[test]
    fn small_harmonicity_and_leading_parts() {
        for n in 2..=4 {
            let h = harmonic_census(n).unwrap();
            assert_eq!(h.harmonic_classes, h.classes);
            assert!(h.inconsistent.is_empty());
            for (u, g) in g_all(n).unwrap() {
                assert!(leading_part_matches(&u, &g), "{u}");
            }
        }
    }

    #[test]
    fn correlation_examples() {
        let c2 = correlations_exact(2).unwrap();
        assert_eq!(c2.get(1, 2), &int(1));
        assert_eq!(c2.get(2, 1), &int(1));
        let c3 = correlations_exact(3).unwrap();
        assert_eq!(c3.get(2, 1), &rat(1, 5));
        assert_eq!(c3.get(1, 2), &rat(4, 5));
        assert_eq!(c3.get(3, 2), &rat(1, 5));
        // the letter right after the origin is biased
        let c = ArrangementCensus::cached(2).unwrap();
        assert_eq!(correlations_at(c, 0).get(1, 2), &rat(4, 3));
        for n in 2..=4 {
            let t = correlations_exact(n).unwrap();
            assert!(t.rows_sum_to_one());
            for shift in 0..box_count(n) {
                assert_eq!(
                    correlations_with_origin(n, shift, DEFAULT_ARRANGEMENT_CAP).unwrap(),
                    t
                );
            }
            let c = ArrangementCensus::cached(n).unwrap();
            let mut avg = vec![vec![Rational::zero(); n]; n];
            for a in 0..n {
                let at = correlations_at(c, a);
                for i in 1..=n {
                    for j in 1..=n {
                        avg[i - 1][j - 1] += at.get(i, j) / Rational::from_integer(BigInt::from(n));
                    }
                }
            }
            assert_eq!(CorrTable::from_entries(avg), t);
        }
    }

    #[test]
    fn conjectured_values() {
        assert_eq!(conj_correlation(3, 1, 6).unwrap(), rat(5, 42));
        assert_eq!(conj_correlation(1, 2, 6).unwrap(), rat(1, 2));
        assert_eq!(conj_correlation(6, 1, 6).unwrap(), rat(37, 77));
        assert_eq!(conj_correlation(6, 5, 6).unwrap(), rat(1, 33));
        assert!(conj_correlation(2, 2, 6).is_err());
        for n in 2..=8 {
            assert!(conj_table(n).unwrap().rows_sum_to_one(), "n={n}");
        }
        for n in 3..=8 {
            assert_eq!(conj_correlation(2, 1, n).unwrap(), c21_closed(n));
            assert_eq!(conj_correlation(1, 2, n).unwrap(), c12_closed(n));
            assert_eq!(
                conj_correlation(n, n - 1, n).unwrap(),
                c_n_nminus1_closed(n)
            );
        }
    }

    #[test]
    fn conjecture_matches_exact_small() {
        for n in 2..=4 {
            assert_eq!(
                correlations_exact(n).unwrap(),
                conj_table(n).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn integral_route() {
        for n in 1..=10 {
            assert_eq!(c21_integral(n), c21_closed(n));
        }
    }

    #[test]
    fn syt_route() {
        assert_eq!(syt_three_columns(3, 0), int(1));
        assert_eq!(c_n_nminus1_syt(3).unwrap(), rat(1, 5));
        assert_eq!(c_n_nminus1_syt(6).unwrap(), rat(1, 33));
        for n in 3..=12 {
            assert!(c_n_nminus1_syt(n).is_ok());
        }
    }

    #[test]
    fn monte_carlo_tracks_exact_small() {
        let exact = correlations_exact(3).unwrap();
        let est = correlations_mc(3, 200_000, 9).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                let (m, se) = est.get(i, j);
                let e = exact.get(i, j).to_f64().unwrap();
                assert!((m - e).abs() <= 3.0 * se + 1e-12, "({i},{j}) {m} vs {e}");
            }
        }
        let again = correlations_mc(3, 200_000, 9).unwrap();
        assert_eq!(again.entries, est.entries);
    }
}
