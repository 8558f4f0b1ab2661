//! Linking patterns, the Temperley–Lieb action on them, and the chain that
//! applies a random `k`-subset of generators per step.
//!
//! Points are numbered `1..=2n` around a circle; generator `e_i` joins `i`
//! with `i+1` (cyclically, so `e_{2n}` joins `2n` with `1`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{check_cap, Error, Result};
use crate::linalg::RationalMatrix;
use crate::markov::{cyclic_firing_order, stationary_exact};
use crate::primitives::{binomial_u128, for_each_subset, rational_to_string, Rational};

/// Largest `n` accepted by [`enumerate_patterns`].
pub const MAX_PATTERN_N: usize = 8;

/// A fixed-point-free non-crossing involution of `1..=2n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkingPattern {
    // 0-based partner table
    partner: Vec<u8>,
}

impl LinkingPattern {
    /// Builds a pattern from 1-based pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let len = 2 * pairs.len();
        let mut partner = vec![u8::MAX; len];
        for &(a, b) in pairs {
            if a == b || a == 0 || b == 0 || a > len || b > len {
                return Err(Error::InvalidInput(format!("bad pair ({a}, {b})")));
            }
            for (x, y) in [(a, b), (b, a)] {
                if partner[x - 1] != u8::MAX {
                    return Err(Error::InvalidInput(format!("point {x} matched twice")));
                }
                partner[x - 1] = (y - 1) as u8;
            }
        }
        let p = Self { partner };
        if !p.is_noncrossing() {
            return Err(Error::InvalidInput(format!("{p} is crossing")));
        }
        Ok(p)
    }

    /// `n`, half the number of points.
    pub fn size(&self) -> usize {
        self.partner.len() / 2
    }

    /// `L(i)` for 1-based `i`.
    pub fn partner(&self, i: usize) -> usize {
        self.partner[i - 1] as usize + 1
    }

    /// Sorted pairs `(i, L(i))` with `i < L(i)`, 1-based.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len())
            .filter(|&i| i < self.partner[i] as usize)
            .map(|i| (i + 1, self.partner[i] as usize + 1))
            .collect()
    }

    pub fn is_noncrossing(&self) -> bool {
        let pairs = self.pairs();
        pairs
            .iter()
            .all(|&(a, c)| pairs.iter().all(|&(b, d)| !(a < b && b < c && c < d)))
    }

    /// Number of pairs `(a, b)` nested directly or indirectly inside other
    /// pairs, counted over all pairs.
    pub fn nesting(&self) -> usize {
        let pairs = self.pairs();
        pairs
            .iter()
            .map(|&(a, b)| pairs.iter().filter(|&&(c, d)| c < a && b < d).count())
            .sum()
    }
}

impl fmt::Display for LinkingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self
            .pairs()
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

impl FromStr for LinkingPattern {
    type Err = Error;

    /// Parses `{1-4,2-3,5-6}` (braces optional).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let pairs = s
            .split(',')
            .map(|p| {
                let (a, b) = p
                    .split_once('-')
                    .ok_or_else(|| Error::Parse(format!("expected a-b, got {p:?}")))?;
                let a = a
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("{a:?}: {e}")))?;
                let b = b
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("{b:?}: {e}")))?;
                Ok((a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(&pairs)
    }
}

impl Serialize for LinkingPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinkingPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(usize, usize)>::deserialize(d)?;
        Self::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// All non-crossing perfect matchings of `1..=2n`, sorted.
pub fn enumerate_patterns(n: usize) -> Result<Vec<LinkingPattern>> {
    if n > MAX_PATTERN_N {
        return Err(Error::CapExceeded {
            what: "linking patterns",
            size: n as u128,
            cap: MAX_PATTERN_N as u128,
        });
    }
    // matchings of lo..hi: lo pairs with j, inside and outside are independent
    fn matchings(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
        if lo >= hi {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for j in (lo + 1..hi).step_by(2) {
            let outside = matchings(j + 1, hi);
            for inner in matchings(lo + 1, j) {
                for rest in &outside {
                    let mut m = vec![(lo, j)];
                    m.extend_from_slice(&inner);
                    m.extend_from_slice(rest);
                    out.push(m);
                }
            }
        }
        out
    }
    let mut pats: Vec<LinkingPattern> = matchings(0, 2 * n)
        .into_iter()
        .map(|m| {
            let mut partner = vec![0u8; 2 * n];
            for (a, b) in m {
                partner[a] = b as u8;
                partner[b] = a as u8;
            }
            LinkingPattern { partner }
        })
        .collect();
    pats.sort();
    Ok(pats)
}

/// `e_i L` for 1-based `i`, cyclic in `1..=2n`.
pub fn apply_e(l: &LinkingPattern, i: usize) -> LinkingPattern {
    let len = l.partner.len();
    let a = (i + len - 1) % len;
    let b = (a + 1) % len;
    if l.partner[a] as usize == b {
        return l.clone();
    }
    let (pa, pb) = (l.partner[a] as usize, l.partner[b] as usize);
    let mut partner = l.partner.clone();
    partner[a] = b as u8;
    partner[b] = a as u8;
    partner[pa] = pb as u8;
    partner[pb] = pa as u8;
    LinkingPattern { partner }
}

/// Applies generators right to left: `word = [i_1, ..., i_r]` gives
/// `e_{i_1} ... e_{i_r} L`.
pub fn apply_word(l: &LinkingPattern, word: &[usize]) -> LinkingPattern {
    word.iter()
        .rev()
        .fold(l.clone(), |acc, &i| apply_e(&acc, i))
}

/// Order in which the generators of `s` act: `e_i` before `e_{i+1}`. When
/// `s` is everything the cycle is read from `1`.
pub fn firing_order(n: usize, s: &[usize]) -> Vec<usize> {
    let zero: Vec<usize> = s.iter().map(|&i| i - 1).collect();
    cyclic_firing_order(&zero, 2 * n, 0)
        .into_iter()
        .map(|i| i + 1)
        .collect()
}

/// `e_S L`.
pub fn apply_e_set(l: &LinkingPattern, s: &[usize]) -> LinkingPattern {
    firing_order(l.size(), s)
        .into_iter()
        .fold(l.clone(), |acc, i| apply_e(&acc, i))
}

/// A random order of `s` in which `e_i` still precedes `e_{i+1}`.
/// `s` must not contain every index.
pub fn random_admissible_order<R: Rng + ?Sized>(n: usize, s: &[usize], rng: &mut R) -> Vec<usize> {
    let len = 2 * n;
    let mut pending: Vec<usize> = s.to_vec();
    let mut order = Vec::with_capacity(s.len());
    while !pending.is_empty() {
        let ready: Vec<usize> = pending
            .iter()
            .copied()
            .filter(|&i| !pending.contains(&((i + len - 2) % len + 1)))
            .collect();
        let pick = *ready.choose(rng).expect("constraint graph is acyclic");
        pending.retain(|&i| i != pick);
        order.push(pick);
    }
    order
}

/// Transition matrix of the chain applying `e_S` for a uniform `k`-subset
/// `S` of `1..=2n`, on the sorted patterns.
pub fn rs_transition_matrix(n: usize, k: usize) -> Result<(Vec<LinkingPattern>, RationalMatrix)> {
    if k == 0 || k > 2 * n {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside 1..={}",
            2 * n
        )));
    }
    let pats = enumerate_patterns(n)?;
    let subsets = binomial_u128(2 * n as u64, k as u64);
    check_cap("generator subsets", subsets, 1 << 20)?;
    let index: BTreeMap<&LinkingPattern, usize> =
        pats.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut m = RationalMatrix::zeros(pats.len(), pats.len());
    let w = Rational::new(1.into(), (subsets as i64).into());
    for (row, l) in pats.iter().enumerate() {
        for_each_subset(2 * n, k, |s| {
            let s1: Vec<usize> = s.iter().map(|&i| i + 1).collect();
            m.add_to(row, index[&apply_e_set(l, &s1)], &w);
        });
    }
    Ok((pats, m))
}

/// Exact stationary law of a chain on linking patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDist {
    pub n: usize,
    pub entries: Vec<(LinkingPattern, Rational)>,
}

impl PatternDist {
    pub fn get(&self, l: &LinkingPattern) -> Rational {
        self.entries
            .iter()
            .find(|(p, _)| p == l)
            .map(|(_, q)| q.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Entries with the largest and the smallest probability.
    pub fn extremes(&self) -> (Vec<&LinkingPattern>, Vec<&LinkingPattern>) {
        let max = self.entries.iter().map(|(_, p)| p).max();
        let min = self.entries.iter().map(|(_, p)| p).min();
        let pick = |v: Option<&Rational>| {
            self.entries
                .iter()
                .filter(|(_, p)| Some(p) == v)
                .map(|(l, _)| l)
                .collect()
        };
        (pick(max), pick(min))
    }
}

impl Serialize for PatternDist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .entries
            .iter()
            .map(|(l, p)| (l.to_string(), rational_to_string(p)))
            .collect();
        map.serialize(s)
    }
}

/// Stationary law of the `k`-chain; errors if it is not unique.
pub fn rs_stationary(n: usize, k: usize) -> Result<PatternDist> {
    let (pats, m) = rs_transition_matrix(n, k)?;
    let pi = stationary_exact(&m)?;
    Ok(PatternDist {
        n,
        entries: pats.into_iter().zip(pi).collect(),
    })
}

/// Outcome for `k = 2n`, where every generator acts and the step is
/// deterministic.
#[derive(Debug, Clone, Serialize)]
pub struct FullSetReport {
    pub n: usize,
    /// Whether the `k = 1` law is invariant under the full-set step.
    pub invariant: bool,
    /// Whether the full-set chain has a unique stationary law.
    pub unique: bool,
}

pub fn rs_full_set_report(n: usize) -> Result<FullSetReport> {
    let base = rs_stationary(n, 1)?;
    let (_, m) = rs_transition_matrix(n, 2 * n)?;
    let pi: Vec<Rational> = base.entries.iter().map(|(_, p)| p.clone()).collect();
    let invariant = m.left_mul(&pi) == pi && pi.iter().sum::<Rational>().is_one();
    let unique = stationary_exact(&m).is_ok();
    Ok(FullSetReport {
        n,
        invariant,
        unique,
    })
}
