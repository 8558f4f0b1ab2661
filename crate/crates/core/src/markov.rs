//! The multi-type TASEP on a ring: single-particle and `k`-subset dynamics,
//! exact transition matrices and stationary distributions, and a Monte Carlo
//! estimator.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::linalg::{stationary_vector, RationalMatrix};
use crate::mlq::last_row_step;
use crate::primitives::{
    binomial_u128, cyclic_canonical, for_each_subset, parse_rational, rational_to_string, Rational,
    RingWord, Site, TypeVector,
};

/// Largest state space for which dense exact matrices are built.
pub const DEFAULT_STATE_CAP: u128 = 20_000;

/// One TASEP move: the particle at `site` tries to jump to the site on its
/// left, which it does if that site is vacant or holds a larger label.
pub fn tasep_step(w: &RingWord, site: usize) -> Result<RingWord> {
    let n = w.len();
    let Site::Particle(mover) = w.get(site) else {
        return Err(Error::VacantSite(site));
    };
    let left = (site + n - 1) % n;
    let mut out = w.clone();
    match w.get(left) {
        Site::Vacant => out.swap(site % n, left),
        Site::Particle(l) if l > mover => out.swap(site % n, left),
        _ => {}
    }
    Ok(out)
}

fn ring_in_place(w: &mut RingWord, site: usize) {
    let n = w.len();
    if let Site::Particle(mover) = w.get(site) {
        let left = (site + n - 1) % n;
        match w.get(left) {
            Site::Vacant => w.swap(site, left),
            Site::Particle(l) if l > mover => w.swap(site, left),
            _ => {}
        }
    }
}

/// Firing order for a set of cyclically indexed positions in which `i` must
/// precede `i+1` whenever both are present.
///
/// Repeatedly fires the lowest pending index whose predecessor is not
/// pending. When every position is present the constraints form a cycle;
/// the cycle is then cut before `cut`.
pub fn cyclic_firing_order(subset: &[usize], len: usize, cut: usize) -> Vec<usize> {
    let mut pending = vec![false; len];
    for &i in subset {
        pending[i % len] = true;
    }
    let mut order = Vec::with_capacity(subset.len());
    let total = pending.iter().filter(|&&p| p).count();
    if total == len {
        return (0..len).map(|i| (i + cut) % len).collect();
    }
    while order.len() < total {
        let next = (0..len)
            .find(|&i| pending[i] && !pending[(i + len - 1) % len])
            .expect("acyclic constraints always have a source");
        pending[next] = false;
        order.push(next);
    }
    order
}

/// Rings the TASEP bell at every site of `subset`; of two neighbouring
/// sites the left one rings first.
///
/// If every site rings, the cycle starts at the first site holding the
/// weakest content (a vacancy if there is one, else the largest label),
/// whose own bell cannot move anything.
pub fn k_tasep_step(w: &RingWord, subset: &[usize]) -> RingWord {
    let weakest = w.sites().iter().max().copied();
    let cut = weakest
        .and_then(|m| w.sites().iter().position(|&x| x == m))
        .unwrap_or(0);
    let mut out = w.clone();
    for s in cyclic_firing_order(subset, w.len(), cut) {
        ring_in_place(&mut out, s);
    }
    out
}

/// Words of one type in lexicographic order with an index.
#[derive(Debug, Clone)]
pub struct StateSpace {
    words: Vec<RingWord>,
    index: HashMap<RingWord, usize>,
}

impl StateSpace {
    pub fn new(t: &TypeVector, cap: u128) -> Result<Self> {
        check_cap("state space", t.state_count(), cap)?;
        let words = RingWord::enumerate(t);
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(Self { words, index })
    }

    pub fn words(&self) -> &[RingWord] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &RingWord) -> Option<usize> {
        self.index.get(w).copied()
    }
}

/// Builds a row-stochastic matrix on `space` from a per-state list of
/// equally likely successors.
fn uniform_choice_matrix<F>(space: &StateSpace, successors: F) -> RationalMatrix
where
    F: Fn(&RingWord) -> Vec<RingWord> + Sync,
{
    let rows: Vec<Vec<(usize, usize, usize)>> = space
        .words
        .par_iter()
        .map(|w| {
            let next = successors(w);
            let total = next.len();
            let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
            for v in next {
                *tally
                    .entry(space.index_of(&v).expect("dynamics preserve the type"))
                    .or_default() += 1;
            }
            tally.into_iter().map(|(j, c)| (j, c, total)).collect()
        })
        .collect();
    let mut m = RationalMatrix::zeros(space.len(), space.len());
    for (i, row) in rows.into_iter().enumerate() {
        for (j, c, total) in row {
            m.set(
                i,
                j,
                Rational::new((c as i64).into(), (total as i64).into()),
            );
        }
    }
    m
}

/// Transition matrix of the `m`-TASEP: a uniformly chosen particle attempts
/// one jump.
pub fn transition_matrix(t: &TypeVector) -> Result<(StateSpace, RationalMatrix)> {
    transition_matrix_capped(t, DEFAULT_STATE_CAP)
}

pub fn transition_matrix_capped(t: &TypeVector, cap: u128) -> Result<(StateSpace, RationalMatrix)> {
    let space = StateSpace::new(t, cap)?;
    let m = uniform_choice_matrix(&space, |w| {
        w.particle_positions()
            .into_iter()
            .map(|p| tasep_step(w, p).expect("occupied"))
            .collect()
    });
    Ok((space, m))
}

/// Transition matrix of the `k`-TASEP: a uniform `k`-subset of sites rings.
pub fn k_transition_matrix(t: &TypeVector, k: usize) -> Result<(StateSpace, RationalMatrix)> {
    if k == 0 || k > t.sites() {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside 1..={}",
            t.sites()
        )));
    }
    check_cap(
        "subset choices",
        binomial_u128(t.sites() as u64, k as u64),
        1 << 20,
    )?;
    let space = StateSpace::new(t, DEFAULT_STATE_CAP)?;
    let m = uniform_choice_matrix(&space, |w| {
        let mut out = Vec::new();
        for_each_subset(w.len(), k, |s| out.push(k_tasep_step(w, s)));
        out
    });
    Ok((space, m))
}

/// Stochastic operator of the process of the last row: a uniformly random
/// row of as many boxes as particles is labeled from the current word.
pub fn last_row_matrix(t: &TypeVector) -> Result<(StateSpace, RationalMatrix)> {
    let space = StateSpace::new(t, DEFAULT_STATE_CAP)?;
    let m = uniform_choice_matrix(&space, |w| {
        let mut out = Vec::new();
        for_each_subset(w.len(), t.particles(), |boxes| {
            out.push(last_row_step(w, boxes).expect("box count equals particle count"))
        });
        out
    });
    Ok((space, m))
}

/// Exact stationary row vector of a row-stochastic matrix.
pub fn stationary_exact(p: &RationalMatrix) -> Result<Vec<Rational>> {
    stationary_vector(p)
}

/// Exact stationary distribution over words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StationaryDist {
    entries: BTreeMap<RingWord, Rational>,
}

impl StationaryDist {
    pub fn from_vector(space: &StateSpace, pi: Vec<Rational>) -> Self {
        Self {
            entries: space.words.iter().cloned().zip(pi).collect(),
        }
    }

    pub fn get(&self, w: &RingWord) -> Rational {
        self.entries.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RingWord, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    /// Values in state-space order.
    pub fn to_vector(&self, space: &StateSpace) -> Vec<Rational> {
        space.words.iter().map(|w| self.get(w)).collect()
    }
}

impl Serialize for StationaryDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = self
            .entries
            .iter()
            .map(|(w, p)| (w.to_string(), rational_to_string(p)))
            .collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StationaryDist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, String>::deserialize(d)?;
        let mut entries = BTreeMap::new();
        for (k, v) in m {
            let w: RingWord = k.parse().map_err(serde::de::Error::custom)?;
            entries.insert(w, parse_rational(&v).map_err(serde::de::Error::custom)?);
        }
        Ok(Self { entries })
    }
}

/// Exact stationary distribution of the `m`-TASEP on the full state space,
/// solving `pi P = pi` directly.
pub fn stationary_direct(t: &TypeVector) -> Result<StationaryDist> {
    let (space, p) = transition_matrix(t)?;
    Ok(StationaryDist::from_vector(&space, stationary_exact(&p)?))
}

/// Exact stationary distribution of a rotation-equivariant chain given by its
/// full transition matrix, solved on the quotient by cyclic rotation.
///
/// The stationary law of an irreducible chain that commutes with rotation is
/// rotation invariant, so the lumped chain on orbits determines it.
pub fn stationary_rotation_lumped(
    space: &StateSpace,
    p: &RationalMatrix,
) -> Result<StationaryDist> {
    let mut orbit_of = vec![usize::MAX; space.len()];
    let mut reps: Vec<usize> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut canon_index: HashMap<RingWord, usize> = HashMap::new();
    for (i, w) in space.words.iter().enumerate() {
        let (c, _) = cyclic_canonical(w);
        let o = *canon_index.entry(c).or_insert_with(|| {
            reps.push(i);
            sizes.push(0);
            reps.len() - 1
        });
        orbit_of[i] = o;
        sizes[o] += 1;
    }
    let k = reps.len();
    let mut q = RationalMatrix::zeros(k, k);
    for (a, &rep) in reps.iter().enumerate() {
        for (j, v) in p.row(rep).iter().enumerate() {
            if !v.is_zero() {
                q.add_to(a, orbit_of[j], v);
            }
        }
    }
    let lumped = stationary_vector(&q)?;
    let pi = (0..space.len())
        .map(|i| &lumped[orbit_of[i]] / Rational::from_integer((sizes[orbit_of[i]] as i64).into()))
        .collect();
    Ok(StationaryDist::from_vector(space, pi))
}

/// Exact stationary distribution of the `m`-TASEP, solved on rotation orbits.
pub fn stationary_for_type(t: &TypeVector) -> Result<StationaryDist> {
    let (space, p) = transition_matrix(t)?;
    stationary_rotation_lumped(&space, &p)
}

/// Checks `pi P = pi` exactly.
pub fn is_stationary(pi: &[Rational], p: &RationalMatrix) -> bool {
    p.left_mul(pi) == pi && pi.iter().sum::<Rational>().is_one()
}

/// Empirical estimate of the stationary distribution.
#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub samples: u64,
    pub chains: usize,
    /// word -> (frequency, standard error from batch means)
    pub entries: BTreeMap<String, (f64, f64)>,
}

pub struct McConfig {
    pub burn_in: u64,
    pub samples: u64,
    pub seed: u64,
    /// Independent chains, each on its own stream of the master seed.
    pub chains: usize,
    pub batches_per_chain: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            burn_in: 10_000,
            samples: 1_000_000,
            seed: 0,
            chains: 8,
            batches_per_chain: 10,
        }
    }
}

/// Random-particle TASEP simulation with per-chain counter-based streams.
pub fn mc_stationary(t: &TypeVector, cfg: &McConfig) -> Result<McEstimate> {
    if cfg.samples == 0 || cfg.chains == 0 || cfg.batches_per_chain == 0 {
        return Err(Error::InvalidInput(
            "samples, chains and batches must be positive".into(),
        ));
    }
    let start = {
        let mut sites = Vec::with_capacity(t.sites());
        for (i, &c) in t.counts().iter().enumerate() {
            sites.extend(std::iter::repeat_n(Site::Particle(i as u8 + 1), c));
        }
        sites.resize(t.sites(), Site::Vacant);
        RingWord::new(sites)
    };
    let per_chain: Vec<u64> = (0..cfg.chains)
        .map(|c| {
            cfg.samples / cfg.chains as u64
                + u64::from((c as u64) < cfg.samples % cfg.chains as u64)
        })
        .collect();
    let batches: Vec<Vec<HashMap<RingWord, u64>>> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64);
            let mut w = start.clone();
            let positions = |w: &RingWord| w.particle_positions();
            let step = |w: &mut RingWord, rng: &mut ChaCha8Rng| {
                let pos = positions(w);
                let p = pos[rng.random_range(0..pos.len())];
                ring_in_place(w, p);
            };
            for _ in 0..cfg.burn_in {
                step(&mut w, &mut rng);
            }
            let n = per_chain[c];
            let nb = cfg.batches_per_chain as u64;
            let mut out = vec![HashMap::new(); cfg.batches_per_chain];
            for s in 0..n {
                step(&mut w, &mut rng);
                let b = ((s * nb) / n.max(1)) as usize;
                *out[b].entry(w.clone()).or_default() += 1;
            }
            out
        })
        .collect();
    let mut totals: BTreeMap<RingWord, u64> = BTreeMap::new();
    for chain in &batches {
        for b in chain {
            for (w, c) in b {
                *totals.entry(w.clone()).or_default() += c;
            }
        }
    }
    let batch_sizes: Vec<u64> = batches
        .iter()
        .flat_map(|chain| chain.iter().map(|b| b.values().sum::<u64>()))
        .collect();
    let nb = batch_sizes.len() as f64;
    let mut entries = BTreeMap::new();
    for (w, &c) in &totals {
        let mean = c as f64 / cfg.samples as f64;
        let freqs: Vec<f64> = batches
            .iter()
            .flat_map(|chain| chain.iter())
            .zip(&batch_sizes)
            .map(|(b, &size)| *b.get(w).unwrap_or(&0) as f64 / size.max(1) as f64)
            .collect();
        let var = freqs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (nb - 1.0).max(1.0);
        entries.insert(w.to_string(), (mean, (var / nb).sqrt()));
    }
    Ok(McEstimate {
        samples: cfg.samples,
        chains: cfg.chains,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::rat;
    use num_traits::ToPrimitive;

    fn w(s: &str) -> RingWord {
        s.parse().unwrap()
    }

    #[test]
    fn single_step_examples() {
        assert_eq!(tasep_step(&w("231"), 2).unwrap(), w("213"));
        assert_eq!(tasep_step(&w("231"), 1).unwrap(), w("231"));
        // wrap-around: the left neighbour of site 0 is site 2
        assert_eq!(tasep_step(&w("1.2"), 0).unwrap(), w("2.1"));
        assert_eq!(tasep_step(&w("1.2"), 1), Err(Error::VacantSite(1)));
        assert_eq!(tasep_step(&w(".1"), 1).unwrap(), w("1."));
    }

    #[test]
    fn steps_conserve_labels() {
        for sites in 2..=6 {
            let t = TypeVector::new(vec![1, 2, 1], sites.max(4)).unwrap();
            for word in RingWord::enumerate(&t) {
                for p in word.particle_positions() {
                    assert!(tasep_step(&word, p).unwrap().has_type(&t));
                }
            }
        }
    }

    #[test]
    fn matrix_examples() {
        let t = TypeVector::new(vec![1], 2).unwrap();
        let (space, p) = transition_matrix(&t).unwrap();
        assert_eq!(space.words(), &[w("1."), w(".1")]);
        assert_eq!(p, RationalMatrix::from_integers(&[vec![0, 1], vec![1, 0]]));

        let t = TypeVector::new(vec![1, 1], 2).unwrap();
        let (space, p) = transition_matrix(&t).unwrap();
        let i = space.index_of(&w("21")).unwrap();
        let j = space.index_of(&w("12")).unwrap();
        assert_eq!(p.get(i, j), &rat(1, 2));
        assert_eq!(p.get(i, i), &rat(1, 2));
    }

    #[test]
    fn generated_matrices_are_stochastic() {
        for (m, n) in [(vec![1, 1], 4), (vec![2, 1], 5), (vec![1, 1, 1], 5)] {
            let t = TypeVector::new(m, n).unwrap();
            assert!(transition_matrix(&t).unwrap().1.is_row_stochastic());
            for k in 1..=n {
                assert!(k_transition_matrix(&t, k).unwrap().1.is_row_stochastic());
            }
            assert!(last_row_matrix(&t).unwrap().1.is_row_stochastic());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let t = TypeVector::permutation(4, 9).unwrap();
        assert!(matches!(
            transition_matrix_capped(&t, 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn stationary_single_particle_is_uniform() {
        let t = TypeVector::new(vec![1], 3).unwrap();
        let d = stationary_direct(&t).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|(_, p)| *p == rat(1, 3)));
    }

    #[test]
    fn direct_and_lumped_solvers_agree() {
        for (m, n) in [
            (vec![1, 1], 4),
            (vec![2, 1], 5),
            (vec![1, 1, 1], 5),
            (vec![1, 2], 4),
        ] {
            let t = TypeVector::new(m, n).unwrap();
            let (space, p) = transition_matrix(&t).unwrap();
            let direct = stationary_exact(&p).unwrap();
            assert!(is_stationary(&direct, &p));
            assert!(direct.iter().all(|x| *x > Rational::zero()));
            let lumped = stationary_rotation_lumped(&space, &p).unwrap();
            assert_eq!(lumped.to_vector(&space), direct);
        }
    }

    #[test]
    fn firing_order_respects_left_before_right() {
        assert_eq!(cyclic_firing_order(&[0, 1], 4, 0), vec![0, 1]);
        assert_eq!(cyclic_firing_order(&[3, 0], 4, 0), vec![3, 0]);
        assert_eq!(cyclic_firing_order(&[0, 2], 5, 0), vec![0, 2]);
        assert_eq!(cyclic_firing_order(&[0, 1, 2, 3], 4, 0), vec![0, 1, 2, 3]);
        assert_eq!(cyclic_firing_order(&[0, 1, 2, 3], 4, 2), vec![2, 3, 0, 1]);
    }

    #[test]
    fn single_bell_is_a_tasep_step() {
        let t = TypeVector::new(vec![1, 1, 1], 5).unwrap();
        for word in RingWord::enumerate(&t) {
            for s in 0..5 {
                let expect = if word.get(s).is_vacant() {
                    word.clone()
                } else {
                    tasep_step(&word, s).unwrap()
                };
                assert_eq!(k_tasep_step(&word, &[s]), expect);
            }
        }
    }

    #[test]
    fn non_adjacent_bells_commute() {
        for sites in 5..=6 {
            let t = TypeVector::new(vec![1, 1, 1], sites).unwrap();
            for word in RingWord::enumerate(&t) {
                for a in 0..sites {
                    for b in 0..sites {
                        let adjacent = (a + 1) % sites == b || (b + 1) % sites == a;
                        if a == b || adjacent {
                            continue;
                        }
                        let mut x = word.clone();
                        ring_in_place(&mut x, a);
                        ring_in_place(&mut x, b);
                        let mut y = word.clone();
                        ring_in_place(&mut y, b);
                        ring_in_place(&mut y, a);
                        assert_eq!(x, y);
                    }
                }
            }
        }
    }

    #[test]
    fn every_k_fixes_the_stationary_law() {
        for (n, sites) in [(2, 4), (3, 4), (3, 5)] {
            let t = TypeVector::permutation(n, sites).unwrap();
            let base = stationary_for_type(&t).unwrap();
            for k in 1..=sites {
                let (space, p) = k_transition_matrix(&t, k).unwrap();
                assert!(
                    is_stationary(&base.to_vector(&space), &p),
                    "n={n} N={sites} k={k}"
                );
            }
        }
    }

    #[test]
    fn full_ring_bell_is_deterministic() {
        let t = TypeVector::permutation(3, 4).unwrap();
        let (_, p) = k_transition_matrix(&t, 4).unwrap();
        assert!(matches!(stationary_exact(&p), Err(Error::Reducible(_))));
        // the vacancy at site 3 fires first, then 0, 1, 2
        assert_eq!(k_tasep_step(&w("321."), &[0, 1, 2, 3]), w("21.3"));
    }

    #[test]
    fn last_row_operator_fixes_the_stationary_law() {
        for (m, sites) in [(vec![1, 1], 4), (vec![1, 1, 1], 5)] {
            let t = TypeVector::new(m, sites).unwrap();
            let base = stationary_for_type(&t).unwrap();
            let (space, p) = last_row_matrix(&t).unwrap();
            assert!(is_stationary(&base.to_vector(&space), &p));
        }
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let t = TypeVector::new(vec![1, 1], 4).unwrap();
        let exact = stationary_for_type(&t).unwrap();
        let cfg = McConfig {
            samples: 400_000,
            seed: 3,
            ..Default::default()
        };
        let est = mc_stationary(&t, &cfg).unwrap();
        for (word, p) in exact.iter() {
            let (f, se) = est.entries[&word.to_string()];
            let p = p.to_f64().unwrap();
            assert!(
                (f - p).abs() < 3.0 * se + 1e-9,
                "{word}: {f} vs {p} (se {se})"
            );
        }
        let again = mc_stationary(&t, &cfg).unwrap();
        assert_eq!(format!("{:?}", again.entries), format!("{:?}", est.entries));
    }

    #[test]
    fn monte_carlo_single_particle_uniform() {
        let t = TypeVector::new(vec![1], 3).unwrap();
        let est = mc_stationary(
            &t,
            &McConfig {
                samples: 90_000,
                seed: 1,
                ..Default::default()
            },
        )
        .unwrap();
        for (_, (f, se)) in est.entries {
            assert!((f - 1.0 / 3.0).abs() < 3.0 * se + 1e-9);
        }
    }
}
