//! Exact-arithmetic primitives and ring/permutation carriers shared by every
//! other module.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// `p/q` (or `p` when `q == 1`), the wire format used by every emitter.
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: impl Into<BigInt>) -> Rational {
    Rational::from_integer(p.into())
}

/// Serde adapter writing a rational as its `p/q` string.
pub mod rational_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Binomial coefficient `C(a, b)`.
///
/// Zero when `b < 0`, and when `b > a >= 0`. For negative `a` the
/// falling-factorial extension `a(a-1)...(a-b+1)/b!` is used.
pub fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || (a >= 0 && b > a) {
        return BigInt::zero();
    }
    let b = if a >= 0 && b > a - b { a - b } else { b };
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= BigInt::from(a - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient for machine-sized arguments (`b > a` gives 0).
pub fn binomial_u128(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Multinomial coefficient `(sum parts)! / prod(part!)`.
pub fn multinomial(parts: &[u64]) -> BigInt {
    let total: u64 = parts.iter().sum();
    parts
        .iter()
        .fold(factorial(total), |acc, &p| acc / factorial(p))
}

/// Class counts `m = (m_1..m_n)` of particles together with the ring size `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeVector {
    m: Vec<usize>,
    sites: usize,
}

impl TypeVector {
    pub fn new(m: Vec<usize>, sites: usize) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidType("no particle classes".into()));
        }
        if m.contains(&0) {
            return Err(Error::InvalidType(format!("zero class count in {m:?}")));
        }
        if m.len() > u8::MAX as usize - 1 {
            return Err(Error::InvalidType("too many classes".into()));
        }
        let total: usize = m.iter().sum();
        if total > sites {
            return Err(Error::InvalidType(format!(
                "{total} particles do not fit on {sites} sites"
            )));
        }
        Ok(Self { m, sites })
    }

    /// `m = (1, ..., 1)` with `n` classes.
    pub fn permutation(n: usize, sites: usize) -> Result<Self> {
        Self::new(vec![1; n], sites)
    }

    pub fn counts(&self) -> &[usize] {
        &self.m
    }

    /// Number of classes `n`.
    pub fn classes(&self) -> usize {
        self.m.len()
    }

    /// Ring size `N`.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Cumulative count `M_i = m_1 + ... + m_i` (1-based `i`, `M_0 = 0`).
    pub fn cumulative(&self, i: usize) -> usize {
        self.m[..i].iter().sum()
    }

    pub fn particles(&self) -> usize {
        self.cumulative(self.classes())
    }

    /// Number of words of this type: `N! / (prod m_i! * vacancies!)`.
    pub fn state_count(&self) -> u128 {
        let mut acc = 1u128;
        let mut free = self.sites as u64;
        for &c in &self.m {
            acc *= binomial_u128(free, c as u64);
            free -= c as u64;
        }
        acc
    }
}

/// Contents of one ring site.
///
/// Orders particles by label, with a vacancy above every label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Particle(u8),
    Vacant,
}

impl Site {
    pub fn label(self) -> Option<u8> {
        match self {
            Site::Particle(l) => Some(l),
            Site::Vacant => None,
        }
    }

    pub fn is_vacant(self) -> bool {
        self == Site::Vacant
    }

    /// Label in the "vacancy is class `n+1`" view.
    pub fn as_class(self, classes: usize) -> u8 {
        self.label().unwrap_or(classes as u8 + 1)
    }
}

/// Labeled particle configuration on a ring of `N` sites.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingWord {
    sites: Vec<Site>,
}

impl RingWord {
    pub fn new(sites: Vec<Site>) -> Self {
        Self { sites }
    }

    pub fn vacant(len: usize) -> Self {
        Self {
            sites: vec![Site::Vacant; len],
        }
    }

    /// Builds a word from labels where `0` marks a vacancy.
    pub fn from_labels(labels: &[u8]) -> Self {
        Self {
            sites: labels
                .iter()
                .map(|&l| {
                    if l == 0 {
                        Site::Vacant
                    } else {
                        Site::Particle(l)
                    }
                })
                .collect(),
        }
    }

    /// Places `labels[i]` at `positions[i]` on an otherwise vacant ring.
    pub fn from_placement(len: usize, positions: &[usize], labels: &[u8]) -> Self {
        let mut w = Self::vacant(len);
        for (&p, &l) in positions.iter().zip(labels) {
            w.sites[p] = Site::Particle(l);
        }
        w
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn get(&self, i: usize) -> Site {
        self.sites[i % self.sites.len()]
    }

    pub fn set(&mut self, i: usize, s: Site) {
        let n = self.sites.len();
        self.sites[i % n] = s;
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.sites.swap(i, j);
    }

    /// Cyclic shift to the left: site `k` becomes site `0`.
    pub fn rotate(&self, k: usize) -> Self {
        let mut sites = self.sites.clone();
        if !sites.is_empty() {
            sites.rotate_left(k % self.sites.len());
        }
        Self { sites }
    }

    /// Positions holding particles, increasing.
    pub fn particle_positions(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !self.sites[i].is_vacant())
            .collect()
    }

    /// Labels read left to right, vacancies skipped.
    pub fn particle_labels(&self) -> Vec<u8> {
        self.sites.iter().filter_map(|s| s.label()).collect()
    }

    /// Number of particles per class `1..=classes`.
    pub fn class_counts(&self, classes: usize) -> Vec<usize> {
        let mut c = vec![0; classes];
        for l in self.particle_labels() {
            if (l as usize) <= classes && l > 0 {
                c[l as usize - 1] += 1;
            }
        }
        c
    }

    pub fn has_type(&self, t: &TypeVector) -> bool {
        self.len() == t.sites()
            && self
                .particle_labels()
                .iter()
                .all(|&l| l >= 1 && (l as usize) <= t.classes())
            && self.class_counts(t.classes()) == t.counts()
    }

    /// Every word of type `t`, in lexicographic order of site sequences.
    pub fn enumerate(t: &TypeVector) -> Vec<RingWord> {
        let mut alphabet: Vec<Site> = Vec::with_capacity(t.sites());
        for (i, &c) in t.counts().iter().enumerate() {
            alphabet.extend(std::iter::repeat_n(Site::Particle(i as u8 + 1), c));
        }
        alphabet.extend(std::iter::repeat_n(Site::Vacant, t.sites() - t.particles()));
        let mut out = Vec::with_capacity(t.state_count() as usize);
        for_each_multiset_permutation(&mut alphabet, |w| out.push(RingWord::new(w.to_vec())));
        out
    }
}

impl fmt::Display for RingWord {
    /// Labels are written as digits and vacancies as `.`; words with a label
    /// of 10 or more are comma separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self
            .sites
            .iter()
            .any(|s| matches!(s, Site::Particle(l) if *l >= 10));
        for (i, s) in self.sites.iter().enumerate() {
            if wide && i > 0 {
                f.write_str(",")?;
            }
            match s {
                Site::Particle(l) => write!(f, "{l}")?,
                Site::Vacant => f.write_str(".")?,
            }
        }
        Ok(())
    }
}

impl FromStr for RingWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<String> = if s.contains(',') {
            s.split(',').map(|t| t.trim().to_string()).collect()
        } else {
            s.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| c.to_string())
                .collect()
        };
        let sites = tokens
            .iter()
            .map(|t| match t.as_str() {
                "." | "_" | "0" => Ok(Site::Vacant),
                t => t
                    .parse::<u8>()
                    .map(Site::Particle)
                    .map_err(|_| Error::Parse(format!("bad site {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RingWord::new(sites))
    }
}

/// Lexicographically smallest rotation of `w` and the left-shift achieving it.
pub fn cyclic_canonical(w: &RingWord) -> (RingWord, usize) {
    let mut best = w.clone();
    let mut offset = 0;
    for k in 1..w.len() {
        let r = w.rotate(k);
        if r < best {
            best = r;
            offset = k;
        }
    }
    (best, offset)
}

/// Visits every distinct permutation of `items` in lexicographic order.
/// `items` is sorted first and restored to sorted order afterwards.
pub fn for_each_multiset_permutation<T: Ord + Clone, F: FnMut(&[T])>(items: &mut [T], mut f: F) {
    items.sort();
    loop {
        f(items);
        if !next_permutation(items) {
            break;
        }
    }
}

/// Advances to the next lexicographic permutation; returns false (and sorts
/// ascending) after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `f` with every `k`-subset of `0..n` as an increasing slice, in
/// lexicographic order.
pub fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A permutation of `{1..n}` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    entries: Vec<u8>,
}

impl Permutation {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n + 1];
        for &e in &entries {
            let e = e as usize;
            if e == 0 || e > n || seen[e] {
                return Err(Error::InvalidInput(format!(
                    "{entries:?} is not a permutation"
                )));
            }
            seen[e] = true;
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: (1..=n as u8).collect(),
        }
    }

    /// The reverse permutation `n(n-1)...1`.
    pub fn reverse(n: usize) -> Self {
        Self {
            entries: (1..=n as u8).rev().collect(),
        }
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Left multiplication by the simple transposition `s_k`: swaps the
    /// values `k` and `k+1`.
    pub fn left_mul_simple(&self, k: usize) -> Self {
        let k = k as u8;
        Self {
            entries: self
                .entries
                .iter()
                .map(|&e| {
                    if e == k {
                        k + 1
                    } else if e == k + 1 {
                        k
                    } else {
                        e
                    }
                })
                .collect(),
        }
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        let e = &self.entries;
        (0..e.len())
            .map(|i| (i + 1..e.len()).filter(|&j| e[i] > e[j]).count())
            .sum()
    }

    /// Rotation: entry `k` moves to the front.
    pub fn rotate(&self, k: usize) -> Self {
        let mut entries = self.entries.clone();
        if !entries.is_empty() {
            entries.rotate_left(k % self.entries.len());
        }
        Self { entries }
    }

    /// All permutations of size `n`, lexicographically.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut v: Vec<u8> = (1..=n as u8).collect();
        let mut out = Vec::new();
        for_each_multiset_permutation(&mut v, |p| {
            out.push(Permutation {
                entries: p.to_vec(),
            })
        });
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.entries.len() >= 10 { "," } else { "" };
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad entry {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            s.trim()
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad entry {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Permutation::new(entries)
    }
}

impl TryFrom<Vec<u8>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Permutation::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(5, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(-1, -1), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        // (-2)(-3)/2
        assert_eq!(binomial(-2, 2), BigInt::from(3));
    }

    #[test]
    fn pascal_rule_up_to_60() {
        for a in 1..=60i64 {
            for b in 1..a {
                assert_eq!(binomial(a, b), binomial(a - 1, b - 1) + binomial(a - 1, b));
            }
            assert_eq!(
                BigInt::from(binomial_u128(a as u64, a as u64 / 2)),
                binomial(a, a / 2)
            );
        }
    }

    #[test]
    fn canonical_rotation_examples() {
        let w: RingWord = "21.".parse().unwrap();
        let (c, k) = cyclic_canonical(&w);
        assert_eq!(c.to_string(), "1.2");
        assert_eq!(k, 1);
        let w: RingWord = "123".parse().unwrap();
        assert_eq!(cyclic_canonical(&w), (w.clone(), 0));
        let w = RingWord::vacant(3);
        assert_eq!(cyclic_canonical(&w), (w.clone(), 0));
    }

    #[test]
    fn canonical_rotation_is_rotation_invariant() {
        for n in 1..=8 {
            for classes in 1..=3usize.min(n) {
                let t = TypeVector::permutation(classes, n).unwrap();
                for w in RingWord::enumerate(&t) {
                    let (c, off) = cyclic_canonical(&w);
                    assert_eq!(w.rotate(off), c);
                    assert_eq!(cyclic_canonical(&c).0, c);
                    for k in 0..n {
                        assert_eq!(cyclic_canonical(&w.rotate(k)).0, c);
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let t = TypeVector::new(vec![2, 1], 5).unwrap();
        let words = RingWord::enumerate(&t);
        assert_eq!(words.len() as u128, t.state_count());
        assert_eq!(words.len(), 30);
        assert!(words.windows(2).all(|p| p[0] < p[1]));
        assert!(words.iter().all(|w| w.has_type(&t)));
    }

    #[test]
    fn subsets_enumerated_in_order() {
        let mut all = Vec::new();
        for_each_subset(5, 2, |s| all.push(s.to_vec()));
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[9], vec![3, 4]);
        let mut count = 0;
        for_each_subset(4, 0, |s| {
            assert!(s.is_empty());
            count += 1
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn permutation_parse_and_simple_reflections() {
        let w0 = Permutation::reverse(4);
        assert_eq!(w0.to_string(), "4321");
        assert_eq!(w0.left_mul_simple(1).to_string(), "4312");
        assert_eq!(w0.left_mul_simple(1).left_mul_simple(3).to_string(), "3412");
        assert_eq!(
            "4,3,1,2".parse::<Permutation>().unwrap(),
            w0.left_mul_simple(1)
        );
        assert!("112".parse::<Permutation>().is_err());
        assert_eq!(w0.length(), 6);
        assert_eq!(Permutation::all(4).len(), 24);
    }

    #[test]
    fn rational_wire_format() {
        assert_eq!(rational_to_string(&rat(6, 4)), "3/2");
        assert_eq!(rational_to_string(&rat(4, 2)), "2");
        assert_eq!(parse_rational("37/77").unwrap(), rat(37, 77));
        assert!(parse_rational("x").is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..30).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in small_rat(), b in small_rat(), c in small_rat()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            let s = &a + &b;
            prop_assert!(s.denom() > &BigInt::zero());
            prop_assert_eq!(s.clone(), Rational::new(s.numer().clone(), s.denom().clone()));
        }
    }
}
