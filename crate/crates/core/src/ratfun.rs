//! Rational functions of one complex variable stored as a polynomial part
//! plus principal parts at finitely many poles.
//!
//! All objects here (connections, opers, separated operators) are sums of
//! simple and low-order poles, so products and derivatives stay exact in
//! this representation: the principal part of a product at a pole is read
//! off from truncated Laurent expansions of the factors, and the polynomial
//! part from their expansions at infinity.

use serde::{Deserialize, Serialize};

use crate::linalg::{horner, C64, ZERO};

/// `sum_k coeffs[k] / (t - center)^(k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalPart {
    pub center: C64,
    pub coeffs: Vec<C64>,
}

impl PrincipalPart {
    fn order(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RationalFunction {
    /// Ascending coefficients of the polynomial part.
    pub polynomial: Vec<C64>,
    pub parts: Vec<PrincipalPart>,
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn trim(v: &mut Vec<C64>) {
    while v.last() == Some(&ZERO) {
        v.pop();
    }
}

impl RationalFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn polynomial(mut coeffs: Vec<C64>) -> Self {
        trim(&mut coeffs);
        Self { polynomial: coeffs, parts: Vec::new() }
    }

    /// `coeff / (t - center)^order` with `order >= 1`.
    pub fn pole(center: C64, order: usize, coeff: C64) -> Self {
        assert!(order >= 1);
        let mut coeffs = vec![ZERO; order];
        coeffs[order - 1] = coeff;
        Self { polynomial: Vec::new(), parts: vec![PrincipalPart { center, coeffs }] }
    }

    /// `sum_i residues[i] / (t - centers[i])`.
    pub fn simple_poles(centers: &[C64], residues: &[C64]) -> Self {
        centers
            .iter()
            .zip(residues)
            .fold(Self::zero(), |acc, (&z, &r)| acc.add(&Self::pole(z, 1, r)))
    }

    pub fn centers(&self) -> impl Iterator<Item = C64> + '_ {
        self.parts.iter().map(|p| p.center)
    }

    fn part(&self, center: C64) -> Option<&PrincipalPart> {
        self.parts.iter().find(|p| p.center == center)
    }

    /// Coefficient of `(t - center)^(-order)` in the principal part.
    pub fn pole_coefficient(&self, center: C64, order: usize) -> C64 {
        assert!(order >= 1);
        self.part(center)
            .and_then(|p| p.coeffs.get(order - 1).copied())
            .unwrap_or(ZERO)
    }

    pub fn residue(&self, center: C64) -> C64 {
        self.pole_coefficient(center, 1)
    }

    /// Largest coefficient modulus in the principal part at `center`.
    pub fn principal_magnitude(&self, center: C64) -> f64 {
        self.part(center)
            .map(|p| p.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max))
            .unwrap_or(0.0)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.polynomial
            .iter()
            .chain(self.parts.iter().flat_map(|p| p.coeffs.iter()))
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, t: C64) -> C64 {
        let mut acc = horner(&self.polynomial, t);
        for p in &self.parts {
            let inv = (t - p.center).inv();
            let mut pow = inv;
            for &c in &p.coeffs {
                acc += c * pow;
                pow *= inv;
            }
        }
        acc
    }

    pub fn scale(&self, alpha: C64) -> Self {
        let mut out = self.clone();
        out.polynomial.iter_mut().for_each(|c| *c *= alpha);
        for p in &mut out.parts {
            p.coeffs.iter_mut().for_each(|c| *c *= alpha);
        }
        out.normalize();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        if out.polynomial.len() < other.polynomial.len() {
            out.polynomial.resize(other.polynomial.len(), ZERO);
        }
        for (a, b) in out.polynomial.iter_mut().zip(&other.polynomial) {
            *a += b;
        }
        for p in &other.parts {
            match out.parts.iter_mut().find(|q| q.center == p.center) {
                Some(q) => {
                    if q.coeffs.len() < p.coeffs.len() {
                        q.coeffs.resize(p.coeffs.len(), ZERO);
                    }
                    for (a, b) in q.coeffs.iter_mut().zip(&p.coeffs) {
                        *a += b;
                    }
                }
                None => out.parts.push(p.clone()),
            }
        }
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn derivative(&self) -> Self {
        let polynomial = self
            .polynomial
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let mut coeffs = vec![ZERO; p.order() + 1];
                for (k, &c) in p.coeffs.iter().enumerate() {
                    // d/dt c (t-a)^{-(k+1)} = -(k+1) c (t-a)^{-(k+2)}
                    coeffs[k + 1] = -c * (k + 1) as f64;
                }
                PrincipalPart { center: p.center, coeffs }
            })
            .collect();
        let mut out = Self { polynomial, parts };
        out.normalize();
        out
    }

    /// Laurent coefficients at `a` for exponents `lo..=hi` (index 0 is `lo`).
    pub fn laurent_at(&self, a: C64, lo: i64, hi: i64) -> Vec<C64> {
        let len = (hi - lo + 1).max(0) as usize;
        let mut out = vec![ZERO; len];
        let mut put = |exp: i64, v: C64| {
            if exp >= lo && exp <= hi {
                out[(exp - lo) as usize] += v;
            }
        };
        if hi >= 0 {
            for (k, c) in taylor_shift(&self.polynomial, a).into_iter().enumerate() {
                put(k as i64, c);
            }
        }
        for p in &self.parts {
            if p.center == a {
                for (k, &c) in p.coeffs.iter().enumerate() {
                    put(-(k as i64 + 1), c);
                }
            } else if hi >= 0 {
                let d = a - p.center;
                let dinv = d.inv();
                for (k, &c) in p.coeffs.iter().enumerate() {
                    let order = k + 1;
                    // (s + d)^{-order} = sum_n (-1)^n C(order+n-1, n) d^{-order-n} s^n
                    let mut dpow = dinv.powu(order as u32);
                    for n in 0..=(hi as usize) {
                        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                        put(n as i64, c * dpow * sign * binomial(order + n - 1, n));
                        dpow *= dinv;
                    }
                }
            }
        }
        out
    }

    /// Coefficients of the expansion in `u = 1/t` for exponents `lo..=hi`.
    fn expansion_at_infinity(&self, lo: i64, hi: i64) -> Vec<C64> {
        let len = (hi - lo + 1).max(0) as usize;
        let mut out = vec![ZERO; len];
        let mut put = |exp: i64, v: C64| {
            if exp >= lo && exp <= hi {
                out[(exp - lo) as usize] += v;
            }
        };
        for (d, &c) in self.polynomial.iter().enumerate() {
            put(-(d as i64), c);
        }
        for p in &self.parts {
            for (k, &c) in p.coeffs.iter().enumerate() {
                let order = k + 1;
                // (t - a)^{-order} = u^order sum_n C(order+n-1, n) a^n u^n
                let mut apow = C64::new(1.0, 0.0);
                let mut n = 0usize;
                while (order + n) as i64 <= hi {
                    put((order + n) as i64, c * apow * binomial(order + n - 1, n));
                    apow *= p.center;
                    n += 1;
                }
            }
        }
        out
    }

    fn degree(&self) -> usize {
        self.polynomial.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut centers: Vec<C64> = self.centers().collect();
        for c in other.centers() {
            if !centers.contains(&c) {
                centers.push(c);
            }
        }
        let mut parts = Vec::new();
        for a in centers {
            let pf = self.part(a).map_or(0, PrincipalPart::order) as i64;
            let pg = other.part(a).map_or(0, PrincipalPart::order) as i64;
            let total = pf + pg;
            if total == 0 {
                continue;
            }
            let f = self.laurent_at(a, -pf, pg - 1);
            let g = other.laurent_at(a, -pg, pf - 1);
            let mut coeffs = vec![ZERO; total as usize];
            for (i, &fi) in f.iter().enumerate() {
                let ei = i as i64 - pf;
                for (j, &gj) in g.iter().enumerate() {
                    let e = ei + j as i64 - pg;
                    if e < 0 {
                        coeffs[(-e - 1) as usize] += fi * gj;
                    }
                }
            }
            parts.push(PrincipalPart { center: a, coeffs });
        }
        let polynomial = self.product_polynomial_part(other, self.degree() as i64, other.degree() as i64);
        let mut out = Self { polynomial, parts };
        out.normalize();
        out
    }

    fn product_polynomial_part(&self, other: &Self, df: i64, dg: i64) -> Vec<C64> {
        let f = self.expansion_at_infinity(-df, dg);
        let g = other.expansion_at_infinity(-dg, df);
        let mut poly = vec![ZERO; (df + dg + 1) as usize];
        for (i, &fi) in f.iter().enumerate() {
            let ei = i as i64 - df;
            for (j, &gj) in g.iter().enumerate() {
                let e = ei + j as i64 - dg;
                if e <= 0 {
                    poly[(-e) as usize] += fi * gj;
                }
            }
        }
        poly
    }

    fn normalize(&mut self) {
        trim(&mut self.polynomial);
        for p in &mut self.parts {
            trim(&mut p.coeffs);
        }
        self.parts.retain(|p| !p.coeffs.is_empty());
    }
}

/// Coefficients of `p(a + s)` in powers of `s`.
pub fn taylor_shift(coeffs: &[C64], a: C64) -> Vec<C64> {
    let mut c = coeffs.to_vec();
    let n = c.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let next = c[j + 1];
            c[j] += a * next;
        }
    }
    c
}
