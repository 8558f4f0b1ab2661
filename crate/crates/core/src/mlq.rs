//! Discrete and continuous multiline queues, the row-by-row labeling
//! procedure, bully paths, and the process of the last row.
//!
//! Rows are numbered `1..=n` from the top. Positions are `0..N` on a ring;
//! a box labeled `k` claims the first free box of the next row weakly to its
//! right, cyclically.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{for_each_subset, RingWord, TypeVector};

/// An unlabeled multiline queue of type `m` on `N` columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteMLQ {
    ty: TypeVector,
    rows: Vec<Vec<usize>>,
}

impl DiscreteMLQ {
    pub fn new(ty: TypeVector, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != ty.classes() {
            return Err(Error::InvalidInput(format!(
                "{} rows given for {} classes",
                rows.len(),
                ty.classes()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let want = ty.cumulative(i + 1);
            if row.len() != want {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} boxes, expected {want}",
                    i + 1,
                    row.len()
                )));
            }
            if row.windows(2).any(|p| p[0] >= p[1]) || row.iter().any(|&p| p >= ty.sites()) {
                return Err(Error::InvalidInput(format!(
                    "row {} must be strictly increasing within 0..{}",
                    i + 1,
                    ty.sites()
                )));
            }
        }
        Ok(Self { ty, rows })
    }

    pub fn type_vector(&self) -> &TypeVector {
        &self.ty
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn sites(&self) -> usize {
        self.ty.sites()
    }
}

/// Order in which boxes sharing a label are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieOrder {
    #[default]
    LeftFirst,
    RightFirst,
}

/// The trajectory of one label from the row where it is created down to the
/// bottom row, one box per row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BullyPath {
    pub class: u8,
    /// `(row, position)` with 1-based rows.
    pub cells: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMLQ {
    base: DiscreteMLQ,
    labels: Vec<Vec<u8>>,
    paths: Vec<BullyPath>,
}

impl LabeledMLQ {
    pub fn base(&self) -> &DiscreteMLQ {
        &self.base
    }

    /// Labels per row, aligned with the row positions.
    pub fn labels(&self) -> &[Vec<u8>] {
        &self.labels
    }

    pub fn paths(&self) -> &[BullyPath] {
        &self.paths
    }
}

/// Labels `next` from the labeled row above. Returns the labels of `next`
/// and, for each box above, the index of the box it claimed.
///
/// `prev_labels` must use classes below `new_label`; unclaimed boxes receive
/// `new_label`.
pub fn label_next_row(
    prev_pos: &[usize],
    prev_labels: &[u8],
    next_pos: &[usize],
    new_label: u8,
    tie: TieOrder,
) -> Result<(Vec<u8>, Vec<usize>)> {
    if next_pos.len() < prev_pos.len() {
        return Err(Error::InvalidInput(format!(
            "{} boxes cannot absorb {} labels",
            next_pos.len(),
            prev_pos.len()
        )));
    }
    let mut order: Vec<usize> = (0..prev_pos.len()).collect();
    match tie {
        TieOrder::LeftFirst => order.sort_by_key(|&b| (prev_labels[b], prev_pos[b])),
        TieOrder::RightFirst => {
            order.sort_by_key(|&b| (prev_labels[b], std::cmp::Reverse(prev_pos[b])))
        }
    }
    let mut labels = vec![0u8; next_pos.len()];
    let mut claims = vec![0usize; prev_pos.len()];
    let len = next_pos.len();
    for b in order {
        let start = next_pos.partition_point(|&p| p < prev_pos[b]);
        let target = (0..len)
            .map(|s| (start + s) % len)
            .find(|&j| labels[j] == 0)
            .expect("free box exists while unclaimed labels remain");
        labels[target] = prev_labels[b];
        claims[b] = target;
    }
    for l in labels.iter_mut().filter(|l| **l == 0) {
        *l = new_label;
    }
    Ok((labels, claims))
}

/// Runs the labeling procedure with the default left-to-right tie order.
pub fn label_mlq(q: &DiscreteMLQ) -> LabeledMLQ {
    label_mlq_with(q, TieOrder::LeftFirst)
}

pub fn label_mlq_with(q: &DiscreteMLQ, tie: TieOrder) -> LabeledMLQ {
    let n = q.rows.len();
    let mut labels: Vec<Vec<u8>> = Vec::with_capacity(n);
    let mut claims: Vec<Vec<usize>> = Vec::with_capacity(n);
    labels.push(vec![1; q.rows[0].len()]);
    for i in 1..n {
        let (l, c) = label_next_row(&q.rows[i - 1], &labels[i - 1], &q.rows[i], i as u8 + 1, tie)
            .expect("row sizes validated at construction");
        labels.push(l);
        claims.push(c);
    }
    let mut paths = Vec::new();
    for (r, row_labels) in labels.iter().enumerate().take(n) {
        let class = r as u8 + 1;
        for (b, &l) in row_labels.iter().enumerate() {
            if l != class {
                continue;
            }
            let mut cells = vec![(r + 1, q.rows[r][b])];
            let mut idx = b;
            for (below, c) in claims.iter().enumerate().skip(r) {
                idx = c[idx];
                cells.push((below + 2, q.rows[below + 1][idx]));
            }
            paths.push(BullyPath { class, cells });
        }
    }
    LabeledMLQ {
        base: q.clone(),
        labels,
        paths,
    }
}

/// The labeled bottom row as a ring word.
pub fn bottom_word(l: &LabeledMLQ) -> RingWord {
    let n = l.base.rows.len();
    RingWord::from_placement(l.base.sites(), &l.base.rows[n - 1], &l.labels[n - 1])
}

/// One step of the process of the last row: the particles of `u` act as the
/// labeled row above the new row of `boxes`. Boxes not claimed by a particle
/// receive the next unused class.
pub fn last_row_step(u: &RingWord, boxes: &[usize]) -> Result<RingWord> {
    let pos = u.particle_positions();
    let labels = u.particle_labels();
    if boxes.windows(2).any(|p| p[0] >= p[1]) || boxes.iter().any(|&b| b >= u.len()) {
        return Err(Error::InvalidInput(
            "boxes must be increasing ring positions".into(),
        ));
    }
    let new_label = labels.iter().copied().max().unwrap_or(0) + 1;
    let (l, _) = label_next_row(&pos, &labels, boxes, new_label, TieOrder::LeftFirst)?;
    Ok(RingWord::from_placement(u.len(), boxes, &l))
}

/// Visits the bottom row (positions, labels) of every MLQ of type `t` whose
/// first row is `top`. When `bottom` is given, the last row is pinned to it.
pub fn for_each_bottom_with_top<F: FnMut(&[usize], &[u8])>(
    t: &TypeVector,
    top: &[usize],
    bottom: Option<&[usize]>,
    mut visit: F,
) {
    let n = t.classes();
    let labels = vec![1u8; top.len()];
    if n == 1 {
        if bottom.is_none_or(|b| b == top) {
            visit(top, &labels);
        }
        return;
    }
    descend(t, 1, top, &labels, bottom, &mut visit);
}

fn descend<F: FnMut(&[usize], &[u8])>(
    t: &TypeVector,
    row: usize,
    prev_pos: &[usize],
    prev_labels: &[u8],
    bottom: Option<&[usize]>,
    visit: &mut F,
) {
    let n = t.classes();
    let size = t.cumulative(row + 1);
    let last = row + 1 == n;
    let mut handle = |pos: &[usize]| {
        let (labels, _) = label_next_row(
            prev_pos,
            prev_labels,
            pos,
            row as u8 + 1,
            TieOrder::LeftFirst,
        )
        .expect("row sizes are increasing");
        if last {
            visit(pos, &labels);
        } else {
            descend(t, row + 1, pos, &labels, bottom, visit);
        }
    };
    match (last, bottom) {
        (true, Some(b)) => handle(b),
        _ => for_each_subset(t.sites(), size, |pos| handle(pos)),
    }
}

/// Visits the bottom row of every MLQ of type `t`.
pub fn for_each_bottom<F: FnMut(&[usize], &[u8])>(t: &TypeVector, mut visit: F) {
    for_each_subset(t.sites(), t.cumulative(1), |top| {
        for_each_bottom_with_top(t, top, None, &mut visit)
    });
}

/// Relative cyclic order of the boxes of a continuous MLQ, read from the
/// origin: entry `s` is the row of the `s`-th box.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrangement {
    order: Vec<u8>,
}

impl Arrangement {
    /// Validates that row `i` appears `M_i` times with `M_1 < M_2 < ...`.
    pub fn new(order: Vec<u8>) -> Result<Self> {
        let rows = order.iter().copied().max().unwrap_or(0) as usize;
        if rows == 0 {
            return Err(Error::InvalidInput("empty arrangement".into()));
        }
        let mut counts = vec![0usize; rows];
        for &r in &order {
            if r == 0 {
                return Err(Error::InvalidInput("rows are 1-based".into()));
            }
            counts[r as usize - 1] += 1;
        }
        if counts[0] == 0 || counts.windows(2).any(|c| c[0] >= c[1]) {
            return Err(Error::InvalidInput(format!(
                "row counts {counts:?} are not increasing"
            )));
        }
        Ok(Self { order })
    }

    /// The sorted multiset `{1, 2,2, 3,3,3, ...}` of `C(n+1,2)` boxes.
    pub fn first_standard(n: usize) -> Self {
        let order = (1..=n as u8)
            .flat_map(|r| std::iter::repeat_n(r, r as usize))
            .collect();
        Self { order }
    }

    pub fn order(&self) -> &[u8] {
        &self.order
    }

    pub fn rows(&self) -> usize {
        self.order.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rows()];
        for &r in &self.order {
            counts[r as usize - 1] += 1;
        }
        counts
    }

    /// Cyclic shift of the origin by `k` slots.
    pub fn rotate(&self, k: usize) -> Self {
        let mut order = self.order.clone();
        order.rotate_left(k % self.order.len());
        Self { order }
    }

    /// The discrete MLQ on `N = |order|` columns with one box per slot.
    pub fn materialize(&self) -> DiscreteMLQ {
        let counts = self.row_counts();
        let m: Vec<usize> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c - if i == 0 { 0 } else { counts[i - 1] })
            .collect();
        let ty = TypeVector::new(m, self.order.len()).expect("validated arrangement");
        let rows = (1..=self.rows() as u8)
            .map(|r| {
                (0..self.order.len())
                    .filter(|&s| self.order[s] == r)
                    .collect()
            })
            .collect();
        DiscreteMLQ::new(ty, rows).expect("validated arrangement")
    }
}

/// Labels of the bottom-row boxes of a continuous MLQ, read left to right
/// from the origin. For the standard type this is a permutation.
pub fn label_arrangement(a: &Arrangement) -> Vec<u8> {
    bottom_word(&label_mlq(&a.materialize())).particle_labels()
}

/// Uniformly random interleaving of the standard multiset of size `n`.
pub fn sample_arrangement<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Arrangement {
    let mut a = Arrangement::first_standard(n);
    a.order.shuffle(rng);
    a
}

#[derive(Serialize, Deserialize)]
struct MlqWire {
    #[serde(rename = "N")]
    sites: usize,
    m: Vec<usize>,
    rows: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paths: Option<Vec<BullyPath>>,
}

impl Serialize for DiscreteMLQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MlqWire {
            sites: self.sites(),
            m: self.ty.counts().to_vec(),
            rows: self.rows.clone(),
            labels: None,
            paths: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMLQ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MlqWire::deserialize(d)?;
        let ty = TypeVector::new(w.m, w.sites).map_err(serde::de::Error::custom)?;
        DiscreteMLQ::new(ty, w.rows).map_err(serde::de::Error::custom)
    }
}

impl Serialize for LabeledMLQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MlqWire {
            sites: self.base.sites(),
            m: self.base.ty.counts().to_vec(),
            rows: self.base.rows.clone(),
            labels: Some(self.labels.clone()),
            paths: Some(self.paths.clone()),
        }
        .serialize(s)
    }
}

impl RingWord {
    /// Positions and labels split out, for feeding the labeling routine.
    pub fn as_row(&self) -> (Vec<usize>, Vec<u8>) {
        (self.particle_positions(), self.particle_labels())
    }
}

impl From<&LabeledMLQ> for RingWord {
    fn from(l: &LabeledMLQ) -> Self {
        bottom_word(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::Permutation;
    use rand::SeedableRng;

    fn mlq(m: Vec<usize>, n: usize, rows: Vec<Vec<usize>>) -> DiscreteMLQ {
        DiscreteMLQ::new(TypeVector::new(m, n).unwrap(), rows).unwrap()
    }

    fn figure_one() -> DiscreteMLQ {
        // columns 1..8 shifted to 0..7
        mlq(
            vec![2, 1, 1],
            8,
            vec![vec![3, 4], vec![0, 2, 4], vec![1, 5, 6, 7]],
        )
    }

    #[test]
    fn labels_figure_one() {
        let l = label_mlq(&figure_one());
        assert_eq!(l.labels()[0], vec![1, 1]);
        assert_eq!(l.labels()[1], vec![1, 2, 1]);
        assert_eq!(l.labels()[2], vec![1, 1, 2, 3]);
        let w = bottom_word(&l);
        assert_eq!(w.to_string(), ".1...123");
    }

    #[test]
    fn bully_paths_of_figure_one() {
        let l = label_mlq(&figure_one());
        let ones: Vec<_> = l.paths().iter().filter(|p| p.class == 1).collect();
        assert_eq!(ones.len(), 2);
        assert_eq!(ones[0].cells, vec![(1, 3), (2, 4), (3, 5)]);
        assert_eq!(ones[1].cells, vec![(1, 4), (2, 0), (3, 1)]);
        let two = l.paths().iter().find(|p| p.class == 2).unwrap();
        assert_eq!(two.cells, vec![(2, 2), (3, 6)]);
        let three = l.paths().iter().find(|p| p.class == 3).unwrap();
        assert_eq!(three.cells, vec![(3, 7)]);
        for p in l.paths() {
            assert_eq!(p.cells.last().unwrap().0, 3);
        }
    }

    #[test]
    fn small_labelings() {
        let l = label_mlq(&mlq(vec![1], 4, vec![vec![3]]));
        assert_eq!(l.labels()[0], vec![1]);
        let l = label_mlq(&mlq(vec![1], 2, vec![vec![0]]));
        assert_eq!(bottom_word(&l).to_string(), "1.");
        let l = label_mlq(&mlq(vec![1, 1], 3, vec![vec![0], vec![1, 2]]));
        assert_eq!(l.labels()[1], vec![1, 2]);
        assert_eq!(bottom_word(&l).to_string(), ".12");
    }

    #[test]
    fn malformed_rows_rejected() {
        let t = TypeVector::new(vec![1, 1], 4).unwrap();
        assert!(DiscreteMLQ::new(t.clone(), vec![vec![0], vec![1]]).is_err());
        assert!(DiscreteMLQ::new(t.clone(), vec![vec![0], vec![2, 1]]).is_err());
        assert!(DiscreteMLQ::new(t.clone(), vec![vec![0], vec![1, 4]]).is_err());
        assert!(DiscreteMLQ::new(t, vec![vec![0]]).is_err());
    }

    #[test]
    fn label_counts_and_tie_order_independence() {
        for sites in 1..=6 {
            for m in [
                vec![1],
                vec![1, 1],
                vec![2, 1],
                vec![1, 2],
                vec![1, 1, 1],
                vec![2, 1, 1],
            ] {
                let Ok(t) = TypeVector::new(m, sites) else {
                    continue;
                };
                let mut count = 0u64;
                for_each_subset(sites, t.cumulative(1), |r1| {
                    let rows1 = r1.to_vec();
                    enumerate_rest(&t, vec![rows1], &mut |rows| {
                        let q = DiscreteMLQ::new(t.clone(), rows.to_vec()).unwrap();
                        let a = label_mlq_with(&q, TieOrder::LeftFirst);
                        let b = label_mlq_with(&q, TieOrder::RightFirst);
                        assert_eq!(a.labels(), b.labels());
                        for (i, row) in a.labels().iter().enumerate() {
                            for j in 1..=i + 1 {
                                let c = row.iter().filter(|&&l| l as usize == j).count();
                                assert_eq!(c, t.counts()[j - 1]);
                            }
                        }
                        count += 1;
                    });
                });
                let total: u128 = (1..=t.classes())
                    .map(|i| crate::primitives::binomial_u128(sites as u64, t.cumulative(i) as u64))
                    .product();
                assert_eq!(count as u128, total);
            }
        }
    }

    fn enumerate_rest(t: &TypeVector, rows: Vec<Vec<usize>>, f: &mut dyn FnMut(&[Vec<usize>])) {
        if rows.len() == t.classes() {
            f(&rows);
            return;
        }
        let size = t.cumulative(rows.len() + 1);
        for_each_subset(t.sites(), size, |r| {
            let mut next = rows.clone();
            next.push(r.to_vec());
            enumerate_rest(t, next, f);
        });
    }

    #[test]
    fn fast_bottom_enumeration_matches_full_labeling() {
        let t = TypeVector::new(vec![1, 2, 1], 5).unwrap();
        let mut fast = Vec::new();
        for_each_bottom(&t, |p, l| fast.push(RingWord::from_placement(5, p, l)));
        let mut slow = Vec::new();
        for_each_subset(5, 1, |r1| {
            enumerate_rest(&t, vec![r1.to_vec()], &mut |rows| {
                slow.push(bottom_word(&label_mlq(
                    &DiscreteMLQ::new(t.clone(), rows.to_vec()).unwrap(),
                )))
            })
        });
        assert_eq!(fast, slow);
    }

    #[test]
    fn arrangement_examples() {
        let a = Arrangement::new(vec![2, 1, 2]).unwrap();
        assert_eq!(label_arrangement(&a), vec![2, 1]);
        let a = Arrangement::new(vec![1, 2, 2]).unwrap();
        assert_eq!(label_arrangement(&a), vec![1, 2]);
        let fig3 = Arrangement::new(vec![3, 1, 2, 2, 3, 1, 3, 2, 3]).unwrap();
        assert_eq!(label_arrangement(&fig3), vec![3, 1, 2, 1]);
        assert!(Arrangement::new(vec![1, 1, 2]).is_err());
        assert!(Arrangement::new(vec![2, 2]).is_err());
    }

    #[test]
    fn materialized_arrangements_agree_with_direct_labeling() {
        for n in 1..=4 {
            let mut items = Arrangement::first_standard(n).order().to_vec();
            crate::primitives::for_each_multiset_permutation(&mut items, |o| {
                let a = Arrangement::new(o.to_vec()).unwrap();
                let labels = label_arrangement(&a);
                assert!(Permutation::new(labels.clone()).is_ok());
                let q = a.materialize();
                assert_eq!(bottom_word(&label_mlq(&q)).particle_labels(), labels);
            });
        }
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = sample_arrangement(4, &mut r1);
            assert_eq!(a, sample_arrangement(4, &mut r2));
            assert_eq!(a.row_counts(), vec![1, 2, 3, 4]);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_arrangement(1, &mut rng).order(), &[1]);
    }

    #[test]
    fn sampling_is_uniform_for_two_rows() {
        // chi-square with 2 degrees of freedom, 0.1% critical value 13.8
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let samples = 30_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..samples {
            *counts
                .entry(sample_arrangement(2, &mut rng))
                .or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 3);
        let expect = samples as f64 / 3.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        assert!(chi2 < 13.8, "chi2 = {chi2}");
    }

    #[test]
    fn last_row_examples() {
        // figure 4, columns 1..9 shifted to 0..8
        let u = RingWord::from_placement(9, &[0, 2, 7, 8], &[4, 2, 3, 1]);
        let out = last_row_step(&u, &[1, 4, 5, 7]).unwrap();
        assert_eq!(
            out,
            RingWord::from_placement(9, &[1, 4, 5, 7], &[1, 2, 4, 3])
        );

        let u = RingWord::from_placement(3, &[1], &[1]);
        assert_eq!(last_row_step(&u, &[1]).unwrap(), u);

        let u: RingWord = "12".parse().unwrap();
        assert_eq!(last_row_step(&u, &[0, 1]).unwrap(), u);

        assert!(last_row_step(&u, &[0]).is_err());
    }

    #[test]
    fn json_shape() {
        let q = figure_one();
        let v = serde_json::to_value(&q).unwrap();
        assert_eq!(v["N"], 8);
        assert_eq!(v["m"], serde_json::json!([2, 1, 1]));
        let back: DiscreteMLQ = serde_json::from_value(v).unwrap();
        assert_eq!(back, q);
        let l = serde_json::to_value(label_mlq(&q)).unwrap();
        assert_eq!(l["labels"][2], serde_json::json!([1, 1, 2, 3]));
        assert!(l["paths"].is_array());
    }
}
