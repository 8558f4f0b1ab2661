//! Sparse multivariate polynomials over the rationals, constant-coefficient
//! differential operators, and exact integration over the ordered simplex.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{parse_rational, rational_to_string, Rational};

pub type Exponents = Vec<u32>;

/// A polynomial in `q_1..q_n` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: HashMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: HashMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable `q_i`, 1-based.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i - 1] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ArityMismatch(nvars, e.len()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in lexicographic exponent order.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(Error::ArityMismatch(self.nvars, other.nvars))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.nvars), |acc, _| &acc * self)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// `d^order / dq_var^order`, 1-based `var`.
    pub fn partial_derivative(&self, var: usize, order: u32) -> Self {
        let v = var - 1;
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] < order {
                continue;
            }
            let falling: u64 = (0..order).map(|t| (e[v] - t) as u64).product();
            let mut ne = e.clone();
            ne[v] -= order;
            out.add_term(ne, c * Rational::from_integer(BigInt::from(falling)));
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        (1..=self.nvars).fold(Self::zero(self.nvars), |acc, i| {
            &acc + &self.partial_derivative(i, 2)
        })
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch(self.nvars, point.len()));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = point
                    .iter()
                    .zip(e)
                    .map(|(x, &k)| x.powi(k as i32))
                    .product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }

    /// Integrates `q_var` from `lower` to `upper`, where each bound is either
    /// a constant or another variable.
    pub fn integrate_var(&self, var: usize, lower: Bound, upper: Bound) -> Self {
        let v = var - 1;
        let mut anti = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[v] += 1;
            anti.add_term(ne, c / Rational::from_integer(BigInt::from(e[v] + 1)));
        }
        &anti.substitute(v, &upper) - &anti.substitute(v, &lower)
    }

    fn substitute(&self, v: usize, b: &Bound) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[v];
            let mut ne = e.clone();
            ne[v] = 0;
            match b {
                Bound::Const(x) => {
                    let mut f = c.clone();
                    for _ in 0..k {
                        f *= x;
                    }
                    out.add_term(ne, f);
                }
                Bound::Var(w) => {
                    ne[w - 1] += k;
                    out.add_term(ne, c.clone());
                }
            }
        }
        out
    }

    /// `integral over 0 < q_1 < ... < q_n < 1`, innermost variable first.
    pub fn integrate_ordered_simplex(&self) -> Rational {
        let n = self.nvars;
        let mut p = self.clone();
        for i in 1..=n {
            let upper = if i < n {
                Bound::Var(i + 1)
            } else {
                Bound::Const(Rational::one())
            };
            p = p.integrate_var(i, Bound::Const(Rational::zero()), upper);
        }
        p.coeff(&vec![0; n])
    }
}

/// Integration limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Const(Rational),
    /// 1-based variable index.
    Var(usize),
}

/// `integral_lo^hi p(y) dy` for a polynomial in one variable.
pub fn integrate_interval(p: &MultiPoly, lo: &Rational, hi: &Rational) -> Result<Rational> {
    if p.nvars() != 1 {
        return Err(Error::ArityMismatch(1, p.nvars()));
    }
    Ok(
        p.integrate_var(1, Bound::Const(lo.clone()), Bound::Const(hi.clone()))
            .coeff(&[0]),
    )
}

impl<'a> Add for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &'a MultiPoly) -> MultiPoly {
        self.try_add(o).expect("polynomials in different rings")
    }
}

impl<'a> Sub for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &'a MultiPoly) -> MultiPoly {
        self.try_sub(o).expect("polynomials in different rings")
    }
}

impl<'a> Mul for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &'a MultiPoly) -> MultiPoly {
        self.try_mul(o).expect("polynomials in different rings")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

/// `prod_{k<l} (q_l - q_k)`.
pub fn vandermonde(n: usize) -> MultiPoly {
    let mut p = MultiPoly::one(n);
    for l in 1..=n {
        for k in 1..l {
            p = &p * &(&MultiPoly::var(n, l) - &MultiPoly::var(n, k));
        }
    }
    p
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms = self.sorted_terms();
        terms.reverse();
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("q{}", i + 1)
                    } else {
                        format!("q{}^{k}", i + 1)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", rational_to_string(&mag))?;
            } else if mag.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", rational_to_string(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    vars: Vec<String>,
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    coef: String,
    exps: Vec<u32>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyWire {
            vars: (1..=self.nvars).map(|i| format!("q{i}")).collect(),
            terms: self
                .sorted_terms()
                .into_iter()
                .map(|(e, c)| TermWire {
                    coef: rational_to_string(c),
                    exps: e.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PolyWire::deserialize(d)?;
        let terms = w
            .terms
            .into_iter()
            .map(|t| Ok((t.exps, parse_rational(&t.coef)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        MultiPoly::from_terms(w.vars.len(), terms).map_err(serde::de::Error::custom)
    }
}

/// A finite linear combination of constant-coefficient differential
/// monomials `c * prod_i d^{e_i}/dq_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl OperatorExpr {
    pub fn identity() -> Self {
        Self::scalar(Rational::one())
    }

    pub fn scalar(c: Rational) -> Self {
        let mut op = Self::default();
        op.add_term(Vec::new(), c);
        op
    }

    /// `d^order/dq_var^order`, 1-based `var`.
    pub fn partial(var: usize, order: u32) -> Self {
        let mut e = vec![0; var];
        e[var - 1] = order;
        let mut op = Self::default();
        op.add_term(e, Rational::one());
        op
    }

    /// `(1/k!) d^k / dq_{n-k+1} ... dq_n - 1`.
    pub fn one_away(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        for x in e.iter_mut().skip(n - k) {
            *x = 1;
        }
        let fact: BigInt = (1..=k as u64).map(BigInt::from).product();
        let mut op = Self::default();
        op.add_term(e, Rational::new(BigInt::one(), fact));
        op.add_term(Vec::new(), -Rational::one());
        op
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, mut e: Vec<u32>, c: Rational) {
        while e.last() == Some(&0) {
            e.pop();
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::default();
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    /// Operator product (the operators commute).
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let len = ea.len().max(eb.len());
                let e = (0..len)
                    .map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Highest variable index referenced.
    pub fn max_var(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn apply(&self, p: &MultiPoly) -> Result<MultiPoly> {
        if self.max_var() > p.nvars() {
            return Err(Error::ArityMismatch(self.max_var(), p.nvars()));
        }
        let mut out = MultiPoly::zero(p.nvars());
        for (e, c) in &self.terms {
            let mut d = p.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    d = d.partial_derivative(i + 1, k);
                }
            }
            out = &out + &d.scale(c);
        }
        Ok(out)
    }
}

/// Applies `op` to `p`.
pub fn apply_operator(op: &OperatorExpr, p: &MultiPoly) -> Result<MultiPoly> {
    op.apply(p)
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let ds: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("d{}", i + 1)
                    } else {
                        format!("d{}^{k}", i + 1)
                    }
                })
                .collect();
            if ds.is_empty() {
                write!(f, "{}", rational_to_string(&mag))?;
            } else if mag.is_one() {
                f.write_str(&ds.join("*"))?;
            } else {
                write!(f, "{}*{}", rational_to_string(&mag), ds.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Parses sums like `1 - 1/6*d2*d3*d4 - d4 + 1/2*d1^2`. A factor `dI^K`
/// stands for `K` derivatives in `q_I`; juxtaposed parenthesized groups are
/// composed, e.g. `(d4 - 1)(1/6*d2*d3*d4 - 1)`.
impl FromStr for OperatorExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('(') {
            let mut acc = OperatorExpr::identity();
            let mut rest = s;
            while !rest.is_empty() {
                let body = rest
                    .strip_prefix('(')
                    .ok_or_else(|| Error::Parse(format!("expected '(' in {rest:?}")))?;
                let close = body
                    .find(')')
                    .ok_or_else(|| Error::Parse("unbalanced parenthesis".into()))?;
                acc = acc.compose(&parse_sum(&body[..close])?);
                rest = body[close + 1..]
                    .trim_start()
                    .trim_start_matches('*')
                    .trim_start();
            }
            return Ok(acc);
        }
        parse_sum(s)
    }
}

fn parse_sum(s: &str) -> Result<OperatorExpr> {
    let mut out = OperatorExpr::default();
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty operator".into()));
    }
    let mut term = String::new();
    let mut sign = Rational::one();
    let flush = |term: &str, sign: &Rational, out: &mut OperatorExpr| -> Result<()> {
        if term.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {s:?}")));
        }
        let (e, c) = parse_product(term)?;
        out.add_term(e, c * sign);
        Ok(())
    };
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            flush(&term, &sign, &mut out)?;
            term.clear();
            sign = if ch == '-' {
                -Rational::one()
            } else {
                Rational::one()
            };
        } else if (ch == '+' || ch == '-') && i == 0 {
            sign = if ch == '-' {
                -Rational::one()
            } else {
                Rational::one()
            };
        } else {
            term.push(ch);
        }
    }
    flush(&term, &sign, &mut out)?;
    Ok(out)
}

fn parse_product(term: &str) -> Result<(Vec<u32>, Rational)> {
    let mut coef = Rational::one();
    let mut e: Vec<u32> = Vec::new();
    for factor in term.split('*') {
        if let Some(d) = factor.strip_prefix('d') {
            let (var, pow) = match d.split_once('^') {
                Some((v, k)) => (
                    v,
                    k.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad power in {factor:?}")))?,
                ),
                None => (d, 1),
            };
            let var: usize = var
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable in {factor:?}")))?;
            if var == 0 {
                return Err(Error::Parse("variables are 1-based".into()));
            }
            if e.len() < var {
                e.resize(var, 0);
            }
            e[var - 1] += pow;
        } else {
            coef *= parse_rational(factor)?;
        }
    }
    Ok((e, coef))
}
