//! Exact multivariate polynomials over the rationals in the variables
//! `q_{-1}, q_{-2}, ...` (variable `k` is `q_{-k-1}`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::C64;

/// Exponent vector; trailing zeros are trimmed so equal monomials compare equal.
type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    /// The indeterminate `q_{-k-1}`.
    pub fn var(k: usize) -> Self {
        let mut m = vec![0; k + 1];
        m[k] = 1;
        let mut p = Self::zero();
        p.add_term(m, BigRational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let m = trim(m);
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    /// Coefficient of the monomial with the given exponents.
    pub fn coefficient(&self, exponents: &[u32]) -> BigRational {
        self.terms
            .get(&trim(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = Self::zero();
        for (m, a) in &self.terms {
            p.add_term(m.clone(), a * c);
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (m, a) in &other.terms {
            p.add_term(m.clone(), a.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                let n = ma.len().max(mb.len());
                let m = (0..n)
                    .map(|k| ma.get(k).copied().unwrap_or(0) + mb.get(k).copied().unwrap_or(0))
                    .collect();
                p.add_term(m, a * b);
            }
        }
        p
    }

    /// Degree under `deg q_{-k-1} = k + 1`; `None` for the zero polynomial.
    pub fn weighted_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| weight_of(m)).max()
    }

    /// True when every monomial has the same weighted degree.
    pub fn is_weighted_homogeneous(&self) -> bool {
        let mut weights = self.terms.keys().map(|m| weight_of(m));
        match weights.next() {
            None => true,
            Some(w) => weights.all(|x| x == w),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    /// Evaluates at `values[k] = q_{-k-1}`; missing variables count as zero.
    pub fn eval(&self, values: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let c = C64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                m.iter().enumerate().fold(c, |acc, (k, &e)| {
                    if e == 0 {
                        acc
                    } else {
                        acc * values.get(k).copied().unwrap_or_default().powu(e)
                    }
                })
            })
            .sum()
    }

    /// Monomials in graded lexicographic order: total degree descending,
    /// then larger exponent of `q_{-1}` first, then of `q_{-2}`, and so on.
    pub fn sorted_terms(&self) -> Vec<(&[u32], &BigRational)> {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|(a, _), (b, _)| grlex_descending(a, b));
        terms
    }
}

fn weight_of(m: &[u32]) -> u32 {
    m.iter().enumerate().map(|(k, &e)| (k as u32 + 1) * e).sum()
}

fn grlex_descending(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| {
        let n = a.len().max(b.len());
        for k in 0..n {
            let (x, y) = (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
            if x != y {
                return y.cmp(&x);
            }
        }
        Ordering::Equal
    })
}

fn format_monomial(m: &[u32]) -> String {
    m.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, &e)| {
            if e == 1 {
                format!("q_{{-{}}}", k + 1)
            } else {
                format!("q_{{-{}}}^{e}", k + 1)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = format_monomial(m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}
