//! Exact dense linear algebra: fraction-free determinants and stationary
//! vectors of rational stochastic matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::primitives::Rational;

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| {
            Rational::from_integer(BigInt::from(rows[i][j]))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Rational) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.rows == self.cols
            && self.data.iter().all(|x| !x.is_negative())
            && self.row_sums().iter().all(|s| s.is_one())
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o += vi * a;
                }
            }
        }
        out
    }

    /// Scales every row to integers; returns the integer rows and the
    /// per-row scale factors.
    fn to_integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut rows = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let l = self
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            rows.push(
                self.row(i)
                    .iter()
                    .map(|x| x.numer() * (&l / x.denom()))
                    .collect(),
            );
            scales.push(l);
        }
        (rows, scales)
    }
}

/// Determinant of a square rational matrix by fraction-free elimination.
pub fn det_fraction_free(m: &RationalMatrix) -> Rational {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let (rows, scales) = m.to_integer_rows();
    let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    Rational::new(det_bareiss(rows), scale)
}

/// Bareiss determinant of an integer matrix; every intermediate division is
/// exact.
pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let pivot = &pivot_row[k];
        for row in tail.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let v = &row[j] * pivot - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot.clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Determinant of an integer matrix given as nested `i64`-convertible rows.
pub fn det_integer(rows: &[Vec<BigInt>]) -> BigInt {
    det_bareiss(rows.to_vec())
}

/// Fraction-free row echelon form. Returns the pivot columns.
fn echelon(a: &mut [Vec<BigInt>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = &pivot_row[c];
        for row in tail.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let v = &row[j] * pivot - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot.clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact stationary row vector `pi` of a row-stochastic matrix: `pi P = pi`,
/// `sum(pi) = 1`.
///
/// Fails with [`Error::Reducible`] when the solution space is not
/// one-dimensional.
pub fn stationary_vector(p: &RationalMatrix) -> Result<Vec<Rational>> {
    let n = p.rows();
    if n != p.cols() {
        return Err(Error::InvalidInput(
            "transition matrix is not square".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // (P^T - I) pi^T = 0, rows scaled to integers
    let t = RationalMatrix::from_fn(n, n, |i, j| {
        let v = p.get(j, i).clone();
        if i == j {
            v - Rational::one()
        } else {
            v
        }
    });
    let (mut a, _) = t.to_integer_rows();
    let pivots = echelon(&mut a);
    let nullity = n - pivots.len();
    if nullity != 1 {
        return Err(Error::Reducible(nullity));
    }
    let free = (0..n)
        .find(|c| !pivots.contains(c))
        .expect("one free column");
    let mut x = vec![Rational::zero(); n];
    x[free] = Rational::one();
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut acc = Rational::zero();
        for j in c + 1..n {
            if !a[r][j].is_zero() && !x[j].is_zero() {
                acc += &x[j] * Rational::from_integer(a[r][j].clone());
            }
        }
        x[c] = -acc / Rational::from_integer(a[r][c].clone());
    }
    let total: Rational = x.iter().sum();
    if total.is_zero() {
        return Err(Error::Mismatch("stationary vector sums to zero".into()));
    }
    Ok(x.into_iter().map(|v| v / &total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{int, rat};

    /// Cofactor expansion along the first row.
    fn det_cofactor(m: &[Vec<i64>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let term = BigInt::from(m[0][j]) * det_cofactor(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det_fraction_free(&RationalMatrix::identity(3)), int(1));
        let m = RationalMatrix::from_integers(&[vec![1, 0], vec![1, 2]]);
        assert_eq!(det_fraction_free(&m), int(2));
        let m = RationalMatrix::from_fn(2, 2, |i, j| rat((i + 1) as i64, (j + 2) as i64));
        // (1/2)(2/3) - (1/3)(2/2)
        assert_eq!(det_fraction_free(&m), Rational::zero());
        let m = RationalMatrix::from_integers(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(det_fraction_free(&m), int(-1));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1..=5);
            let m: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-4..=4)).collect())
                .collect();
            let big: Vec<Vec<BigInt>> = m
                .iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect();
            assert_eq!(det_integer(&big), det_cofactor(&m), "{m:?}");
        }
    }

    #[test]
    fn stationary_of_two_state_chain() {
        let p = RationalMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => rat(1, 2),
            (0, 1) => rat(1, 2),
            (1, 0) => rat(1, 3),
            _ => rat(2, 3),
        });
        let pi = stationary_vector(&p).unwrap();
        assert_eq!(pi, vec![rat(2, 5), rat(3, 5)]);
        assert_eq!(p.left_mul(&pi), pi);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let p = RationalMatrix::identity(3);
        assert_eq!(stationary_vector(&p), Err(Error::Reducible(3)));
    }
}
