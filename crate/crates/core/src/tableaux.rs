//! Partitions and Young tableaux: hook-content and Jacobi–Trudi counts,
//! brute-force SSYT enumeration, the bijection between MLQs whose bottom row
//! starts with a descending run and SSYT, the initial-prefix probability,
//! and Gelfand–Tsetlin pattern counts.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::count::{g_w0_formula, PositionVector};
use crate::error::{check_cap, Error, Result};
use crate::linalg::det_bareiss;
use crate::markov::StationaryDist;
use crate::mlq::{for_each_bottom, label_mlq, DiscreteMLQ, LabeledMLQ};
use crate::primitives::{binomial, factorial, int, Rational, Site, TypeVector};

/// Largest number of tableaux produced by [`ssyt_brute`].
pub const DEFAULT_SSYT_CAP: u128 = 2_000_000;

/// Largest number of MLQs walked by [`fw_brute`].
pub const DEFAULT_FW_CAP: u128 = 20_000_000;

/// An integer partition with positive, weakly decreasing parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Trailing zeros are dropped; any other zero or increase is an error.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.contains(&0) || parts.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::InvalidInput(format!("{parts:?} is not a partition")));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// The partition whose column lengths are `cols`.
    pub fn from_conjugate(cols: Vec<usize>) -> Result<Self> {
        Ok(Self::new(cols)?.conjugate())
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Self {
        let width = self.part(0);
        let parts = (0..width)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count())
            .collect();
        Self { parts }
    }

    /// Cells `(i, j)`, 0-based, in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i, j)))
    }

    /// Hook length of cell `(i, j)`.
    pub fn hook(&self, i: usize, j: usize) -> usize {
        let conj = self.conjugate();
        self.parts[i] + conj.parts[j] - i - j - 1
    }

    /// All partitions fitting in a `rows x cols` box, including the empty one.
    pub fn all_in_box(rows: usize, cols: usize) -> Vec<Self> {
        fn rec(rows: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            out.push(Partition { parts: cur.clone() });
            if cur.len() == rows {
                return;
            }
            for p in 1..=max {
                cur.push(p);
                rec(rows, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(rows, cols, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

/// A filling of a Young diagram, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tableau {
    rows: Vec<Vec<u32>>,
}

impl Tableau {
    /// Row lengths must form a partition. Entries are not checked.
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        Partition::new(rows.iter().map(Vec::len).collect())?;
        Ok(Self { rows })
    }

    /// Builds a tableau from its columns (left to right, each read top down).
    pub fn from_columns(cols: &[Vec<u32>]) -> Result<Self> {
        let shape = Partition::from_conjugate(cols.iter().map(Vec::len).collect())?;
        let rows = (0..shape.len())
            .map(|i| (0..shape.part(i)).map(|j| cols[j][i]).collect())
            .collect();
        Ok(Self { rows })
    }

    pub fn shape(&self) -> Partition {
        Partition {
            parts: self.rows.iter().map(Vec::len).collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        let width = self.rows.first().map_or(0, Vec::len);
        (0..width)
            .map(|j| {
                self.rows
                    .iter()
                    .take_while(|r| r.len() > j)
                    .map(|r| r[j])
                    .collect()
            })
            .collect()
    }

    pub fn max_entry(&self) -> u32 {
        self.rows.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Rows weakly increase, columns strictly increase, entries positive.
    pub fn is_semistandard(&self) -> bool {
        let rows_ok = self.rows.iter().all(|r| r.windows(2).all(|p| p[0] <= p[1]));
        let cols_ok = self
            .columns()
            .iter()
            .all(|c| c.windows(2).all(|p| p[0] < p[1]));
        rows_ok && cols_ok && self.rows.iter().flatten().all(|&e| e >= 1)
    }

    /// Semistandard and uses each of `1..=|shape|` once.
    pub fn is_standard(&self) -> bool {
        let mut seen: Vec<u32> = self.rows.iter().flatten().copied().collect();
        seen.sort_unstable();
        self.is_semistandard() && seen.iter().enumerate().all(|(i, &e)| e as usize == i + 1)
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.max_entry() < 10 { "" } else { "," };
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(sep))
            .collect();
        f.write_str(&rows.join("/"))
    }
}

/// `prod_{cells} (t + c) / h`.
pub fn ssyt_count_hook_content(lam: &Partition, t: u64) -> BigInt {
    let conj = lam.conjugate();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (i, j) in lam.cells() {
        num *= BigInt::from(t as i64 + j as i64 - i as i64);
        den *= BigInt::from(lam.parts[i] + conj.parts[j] - i - j - 1);
    }
    let (q, r) = num.div_rem(&den);
    assert!(
        r.is_zero(),
        "hook-content quotient is not an integer for {lam} at t = {t}"
    );
    q
}

/// Number of standard Young tableaux by the hook length formula.
pub fn syt_count(lam: &Partition) -> BigInt {
    let den: BigInt = lam
        .cells()
        .map(|(i, j)| BigInt::from(lam.hook(i, j)))
        .product();
    factorial(lam.size() as u64) / den
}

/// The two dual Jacobi–Trudi determinants `det C(t, l'_i - i + j)` and
/// `det C(t + j - 1, l'_i - i + j)`.
pub fn jacobi_trudi_dets(lam: &Partition, t: u64) -> (BigInt, BigInt) {
    let conj = lam.conjugate();
    let k = conj.len();
    let t = t as i64;
    let entry = |i: usize, j: usize| conj.parts[i] as i64 - i as i64 + j as i64;
    let plain = (0..k)
        .map(|i| (0..k).map(|j| binomial(t, entry(i, j))).collect())
        .collect();
    let shifted = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| binomial(t + j as i64, entry(i, j)))
                .collect()
        })
        .collect();
    (det_bareiss(plain), det_bareiss(shifted))
}

/// SSYT count through both Jacobi–Trudi determinants, checked against each
/// other and the hook-content product.
pub fn ssyt_count_jacobi_trudi(lam: &Partition, t: u64) -> Result<BigInt> {
    let (a, b) = jacobi_trudi_dets(lam, t);
    let h = ssyt_count_hook_content(lam, t);
    if a != b || a != h {
        return Err(Error::Mismatch(format!(
            "SSYT count for {lam}, t = {t}: det {a}, shifted det {b}, hook-content {h}"
        )));
    }
    Ok(a)
}

/// Every SSYT of shape `lam` with entries in `1..=t`.
pub fn ssyt_brute(lam: &Partition, t: u64, cap: u128) -> Result<Vec<Tableau>> {
    let expected = ssyt_count_hook_content(lam, t);
    check_cap(
        "SSYT enumeration",
        expected.try_into().unwrap_or(u128::MAX),
        cap,
    )?;
    let cells: Vec<(usize, usize)> = lam.cells().collect();
    let mut rows: Vec<Vec<u32>> = lam.parts.iter().map(|&p| vec![0; p]).collect();
    let mut out = Vec::new();
    fill(&cells, 0, t as u32, &mut rows, &mut out);
    Ok(out)
}

fn fill(cells: &[(usize, usize)], k: usize, t: u32, rows: &mut [Vec<u32>], out: &mut Vec<Tableau>) {
    let Some(&(i, j)) = cells.get(k) else {
        out.push(Tableau {
            rows: rows.to_vec(),
        });
        return;
    };
    let lo_row = if j > 0 { rows[i][j - 1] } else { 1 };
    let lo_col = if i > 0 { rows[i - 1][j] + 1 } else { 1 };
    for v in lo_row.max(lo_col)..=t {
        rows[i][j] = v;
        fill(cells, k + 1, t, rows, out);
    }
    rows[i][j] = 0;
}

fn check_decreasing(xs: &[usize], sites: usize) -> Result<()> {
    if xs.windows(2).any(|p| p[0] <= p[1]) || xs.iter().any(|&x| x == 0 || x > sites) {
        return Err(Error::InvalidInput(format!(
            "prefix {xs:?} must be strictly decreasing within 1..={sites}"
        )));
    }
    Ok(())
}

/// Probability that a stationary word of the `(1, ..., 1)`-TASEP on `N`
/// sites starts with `xs = (x_n, ..., x_2)`:
/// `det{ C(x_{i+1}, j - 1) } / prod_{i<n} C(N, i)`.
pub fn f_pi_initial(xs: &[usize], sites: usize) -> Result<Rational> {
    check_decreasing(xs, sites)?;
    let k = xs.len();
    // row i holds x_{i+1}, which is xs[k - 1 - i]
    let rows = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| binomial(xs[k - 1 - i] as i64, j as i64))
                .collect()
        })
        .collect();
    let den: BigInt = (1..=k).map(|i| binomial(sites as i64, i as i64)).product();
    Ok(Rational::new(det_bareiss(rows), den))
}

/// Sums a stationary distribution of the `(1, ..., 1)`-TASEP over the words
/// starting with `xs`.
pub fn prefix_probability(dist: &StationaryDist, xs: &[usize]) -> Rational {
    dist.iter()
        .filter(|(w, _)| {
            xs.iter()
                .enumerate()
                .all(|(j, &x)| w.get(j).label() == Some(x as u8))
        })
        .fold(Rational::zero(), |acc, (_, p)| acc + p)
}

/// `G_{w_0}(b) / prod_{i<n} C(N, i)` with `b_i = x_{i+1} - 1`: the
/// probability that labels `1..n-1` of an `(n-1)`-class word sit at
/// positions `x_2 - 1 < ... < x_n - 1` in reverse order.
pub fn g_w0_probability(xs: &[usize], sites: usize) -> Result<Rational> {
    check_decreasing(xs, sites)?;
    let b: Vec<usize> = xs.iter().rev().map(|&x| x - 1).collect();
    let k = b.len();
    let g = g_w0_formula(&PositionVector::new(b, sites)?)?;
    let z: BigInt = (1..=k).map(|i| binomial(sites as i64, i as i64)).product();
    Ok(Rational::new(g, z))
}

/// A composition `m = (m_1, ..., m_n)` of `N` with `n >= 2`; the last class
/// plays the role of vacancies.
fn check_composition(m: &[usize]) -> Result<(usize, usize)> {
    if m.len() < 2 || m.contains(&0) {
        return Err(Error::InvalidType(format!(
            "{m:?} must have at least two positive parts"
        )));
    }
    Ok((m.len(), m.iter().sum()))
}

fn cumulative(m: &[usize]) -> Vec<usize> {
    let mut acc = vec![0];
    for &x in m {
        acc.push(acc.last().unwrap() + x);
    }
    acc
}

/// The shape `lambda` with `lambda'_i = M_{n-i} - (n-i-1)` and the entry
/// bound `t = N - n + 1`.
pub fn fw_shape(m: &[usize]) -> Result<(Partition, usize)> {
    let (n, sites) = check_composition(m)?;
    let cm = cumulative(m);
    let cols: Vec<usize> = (1..n).map(|i| cm[n - i] - (n - i - 1)).collect();
    Ok((Partition::from_conjugate(cols)?, sites + 1 - n))
}

/// `F_w` via the prefix probabilities: `prod_i C(N, M_i)` times the sum of
/// `f_pi_initial` over `x_i` in `(M_{i-1}, M_i]`.
pub fn fw_route_a(m: &[usize]) -> Result<BigInt> {
    let (n, sites) = check_composition(m)?;
    let cm = cumulative(m);
    let mut total = Rational::zero();
    let mut xs = vec![0usize; n - 1];
    // xs[0] = x_n, ..., xs[n-2] = x_2; x_i ranges over (M_{i-1}, M_i]
    fn rec(
        d: usize,
        n: usize,
        cm: &[usize],
        sites: usize,
        xs: &mut [usize],
        total: &mut Rational,
    ) -> Result<()> {
        if d == n - 1 {
            *total += f_pi_initial(xs, sites)?;
            return Ok(());
        }
        let i = n - d;
        for x in cm[i - 1] + 1..=cm[i] {
            xs[d] = x;
            rec(d + 1, n, cm, sites, xs, total)?;
        }
        Ok(())
    }
    rec(0, n, &cm, sites, &mut xs, &mut total)?;
    let z: BigInt = (1..=n)
        .map(|i| binomial(sites as i64, cm[i] as i64))
        .product();
    let value = total * int(z);
    if !value.is_integer() {
        return Err(Error::Mismatch(format!(
            "F_w route A is not an integer: {value}"
        )));
    }
    Ok(value.to_integer())
}

/// `F_w` as the number of SSYT of [`fw_shape`].
pub fn fw_route_b(m: &[usize]) -> Result<BigInt> {
    let (lam, t) = fw_shape(m)?;
    Ok(ssyt_count_hook_content(&lam, t as u64))
}

fn descending_prefix(sites: &[Site], n: usize) -> bool {
    sites[0].is_vacant() && (1..n - 1).all(|j| sites[j].label() == Some((n - j) as u8))
}

/// `F_w` by walking every MLQ of type `(m_1, ..., m_{n-1})` on `N` sites.
pub fn fw_brute(m: &[usize], cap: u128) -> Result<u64> {
    let (n, sites) = check_composition(m)?;
    let t = TypeVector::new(m[..n - 1].to_vec(), sites)?;
    let total: BigInt = (1..n)
        .map(|i| binomial(sites as i64, t.cumulative(i) as i64))
        .product();
    check_cap(
        "MLQ enumeration",
        total.try_into().unwrap_or(u128::MAX),
        cap,
    )?;
    let mut count = 0u64;
    for_each_bottom(&t, |pos, labels| {
        let mut row = vec![Site::Vacant; sites];
        for (&p, &l) in pos.iter().zip(labels) {
            row[p] = Site::Particle(l);
        }
        if descending_prefix(&row, n) {
            count += 1;
        }
    });
    Ok(count)
}

fn big_as_string<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Both closed routes for `F_w`, which must agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FwCount {
    pub m: Vec<usize>,
    pub sites: usize,
    pub shape: Partition,
    pub conjugate: Partition,
    pub t: usize,
    #[serde(serialize_with = "big_as_string")]
    pub value: BigInt,
}

pub fn fw_count(m: &[usize]) -> Result<FwCount> {
    let (lam, t) = fw_shape(m)?;
    let a = fw_route_a(m)?;
    let b = fw_route_b(m)?;
    if a != b {
        return Err(Error::Mismatch(format!(
            "F_w{m:?}: route A {a}, route B {b}"
        )));
    }
    Ok(FwCount {
        m: m.to_vec(),
        sites: m.iter().sum(),
        conjugate: lam.conjugate(),
        shape: lam,
        t,
        value: a,
    })
}

/// Forced boxes of row `r` (1-based) when the bottom row starts with the
/// descending run: positions `n-r ..= n-2`.
fn forced(n: usize, r: usize) -> std::ops::RangeInclusive<usize> {
    (n - r)..=(n - 2)
}

/// Maps an MLQ whose bottom row reads `n (n-1) ... 2` from site 0 (site 0
/// vacant) to the tableau of distances `z = N - p` of its free boxes. Row
/// `n - i` of the MLQ becomes column `i` of the tableau.
pub fn mlq_to_ssyt(l: &LabeledMLQ) -> Result<Tableau> {
    let q = l.base();
    let n = q.rows().len() + 1;
    let sites = q.sites();
    let bottom = crate::mlq::bottom_word(l);
    if !descending_prefix(bottom.sites(), n) {
        return Err(Error::InvalidInput(format!(
            "bottom row {bottom} does not start with the descending run"
        )));
    }
    for path in l.paths() {
        if path.cells.windows(2).any(|c| c[1].1 < c[0].1) {
            return Err(Error::InvalidInput(format!(
                "bully path of class {} wraps",
                path.class
            )));
        }
    }
    let mut cols = vec![Vec::new(); n - 1];
    for (r0, row) in q.rows().iter().enumerate() {
        let r = r0 + 1;
        let f = forced(n, r);
        if r > 1 && !f.clone().all(|p| row.contains(&p)) {
            return Err(Error::InvalidInput(format!("row {r} misses a forced box")));
        }
        let mut z: Vec<u32> = row
            .iter()
            .filter(|p| r == 1 || !f.contains(p))
            .map(|&p| (sites - p) as u32)
            .collect();
        z.sort_unstable();
        cols[n - 1 - r] = z;
    }
    Tableau::from_columns(&cols)
}

/// Inverse of [`mlq_to_ssyt`] for the composition `m` of `N`.
pub fn ssyt_to_mlq(tab: &Tableau, m: &[usize]) -> Result<DiscreteMLQ> {
    let (n, sites) = check_composition(m)?;
    let (lam, t) = fw_shape(m)?;
    if tab.shape() != lam || !tab.is_semistandard() || tab.max_entry() as usize > t {
        return Err(Error::InvalidInput(format!(
            "tableau {tab} is not an SSYT of shape {lam} with entries at most {t}"
        )));
    }
    let cols = tab.columns();
    let rows = (1..n)
        .map(|r| {
            let mut row: Vec<usize> = cols[n - 1 - r]
                .iter()
                .map(|&z| sites - z as usize)
                .collect();
            if r > 1 {
                row.extend(forced(n, r));
            }
            row.sort_unstable();
            row
        })
        .collect();
    DiscreteMLQ::new(TypeVector::new(m[..n - 1].to_vec(), sites)?, rows)
}

/// Convenience: label then map.
pub fn discrete_mlq_to_ssyt(q: &DiscreteMLQ) -> Result<Tableau> {
    mlq_to_ssyt(&label_mlq(q))
}

/// Brute count and closed form for Gelfand–Tsetlin patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GtCount {
    pub n: usize,
    pub brute: u64,
    #[serde(with = "crate::primitives::rational_serde")]
    pub formula: Rational,
    #[serde(rename = "match")]
    pub agrees: bool,
}

/// Largest `n` for the linear-extension count.
pub const GT_MAX_N: usize = 6;

/// Linear extensions of the triangular array with rows of length `1..=n`
/// where row `i` strictly interlaces row `i + 1`.
pub fn gt_pattern_count_brute(n: usize) -> Result<u64> {
    if n == 0 || n > GT_MAX_N {
        return Err(Error::InvalidInput(format!(
            "n = {n} outside 1..={GT_MAX_N}"
        )));
    }
    let mut idx = vec![Vec::new(); n + 1];
    let mut size = 0;
    for (i, row) in idx.iter_mut().enumerate().skip(1) {
        *row = (size..size + i).collect();
        size += i;
    }
    let mut preds = vec![0u32; size];
    for i in 1..=n {
        for j in 0..i {
            let e = idx[i][j];
            if j > 0 {
                preds[e] |= 1 << idx[i][j - 1];
            }
            if i < n {
                preds[e] |= 1 << idx[i + 1][j];
                preds[idx[i + 1][j + 1]] |= 1 << e;
            }
        }
    }
    let full = (1u32 << size) - 1;
    let mut ways = vec![0u64; 1 << size];
    ways[0] = 1;
    for mask in 0..=full {
        let w = ways[mask as usize];
        if w == 0 {
            continue;
        }
        for (e, &p) in preds.iter().enumerate() {
            if mask & (1 << e) == 0 && p & mask == p {
                ways[(mask | (1 << e)) as usize] += w;
            }
        }
    }
    Ok(ways[full as usize])
}

/// `C(n+1, 2)! * prod_{i<n} i! / prod_{i<n} (2i+1)!`.
pub fn gt_pattern_count_formula(n: usize) -> Rational {
    let top = factorial((n * (n + 1) / 2) as u64);
    let num: BigInt = (1..n as u64).map(factorial).product();
    let den: BigInt = (1..n as u64).map(|i| factorial(2 * i + 1)).product();
    Rational::new(top * num, den)
}

pub fn gt_pattern_count(n: usize) -> Result<GtCount> {
    let brute = gt_pattern_count_brute(n)?;
    let formula = gt_pattern_count_formula(n);
    Ok(GtCount {
        n,
        brute,
        agrees: formula == int(brute),
        formula,
    })
}

/// The two hook-content products for `F_w` that differ by adding a row on
/// top of `lambda'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowAdditionCheck {
    pub m: Vec<usize>,
    #[serde(with = "crate::primitives::rational_serde")]
    pub lhs: Rational,
    #[serde(with = "crate::primitives::rational_serde")]
    pub rhs: Rational,
    pub holds: bool,
}

fn hook_content_product(lam: &Partition, t: i64) -> Rational {
    lam.cells()
        .map(|(i, j)| {
            Rational::new(
                BigInt::from(t + j as i64 - i as i64),
                BigInt::from(lam.hook(i, j)),
            )
        })
        .fold(Rational::one(), |a, b| a * b)
}

/// Checks `prod_lambda (N-n+1+c)/h = prod_i (l'_i+n-i)/(N+1-i) * prod_mu (N-n+2+c)/h`
/// where `mu'_i = lambda'_i + 1`.
pub fn hook_content_row_addition_check(m: &[usize]) -> Result<RowAdditionCheck> {
    let (n, sites) = check_composition(m)?;
    let (lam, _) = fw_shape(m)?;
    let conj = lam.conjugate();
    let mu = Partition::from_conjugate(conj.parts.iter().map(|c| c + 1).collect())?;
    let lhs = hook_content_product(&lam, sites as i64 - n as i64 + 1);
    let pref = (1..n).fold(Rational::one(), |acc, i| {
        acc * Rational::new(
            BigInt::from(conj.part(i - 1) + n - i),
            BigInt::from(sites + 1 - i),
        )
    });
    let rhs = pref * hook_content_product(&mu, sites as i64 - n as i64 + 2);
    Ok(RowAdditionCheck {
        m: m.to_vec(),
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// All compositions of `total` into exactly `parts` positive parts.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if left > 0 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for x in 1..left {
            cur.push(x);
            rec(left - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}
