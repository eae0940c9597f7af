//! q-deformed Miura transformation and the TQ relation on a geometric lattice.
//!
//! Lattice points are `z_k = z0 q^k`. The shift `D_q f(z) = f(z q^{-2})`
//! moves two steps down the lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{horner, C64};

/// Values of `Lambda` below this size (or above its inverse) are treated
/// as zeros (poles) on the lattice.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMiuraData {
    pub q: C64,
    /// Ascending coefficients of the numerator of `Lambda`.
    pub numerator: Vec<C64>,
    /// Ascending coefficients of the denominator of `Lambda`.
    pub denominator: Vec<C64>,
    pub z0: C64,
    pub length: usize,
}

impl QMiuraData {
    pub fn lambda(&self, z: C64) -> C64 {
        horner(&self.numerator, z) / horner(&self.denominator, z)
    }

    pub fn point(&self, k: i64) -> C64 {
        self.z0 * self.q.powi(k as i32)
    }

    /// `Lambda` on lattice points `-1 ..= L`, checked for zeros and poles.
    fn lattice_lambda(&self) -> Result<Vec<C64>> {
        (-1..=self.length as i64)
            .map(|k| {
                let z = self.point(k);
                let num = horner(&self.numerator, z);
                let den = horner(&self.denominator, z);
                let size = self.numerator.iter().chain(&self.denominator).map(|c| c.norm()).fold(0.0, f64::max)
                    * (1.0 + z.norm()).powi(self.numerator.len().max(self.denominator.len()) as i32);
                if num.norm() <= SINGULAR_THRESHOLD * size || den.norm() <= SINGULAR_THRESHOLD * size {
                    return Err(Error::LatticeSingularity { index: k });
                }
                Ok(num / den)
            })
            .collect()
    }

    /// `ell(z) = Lambda(q z) + 1/Lambda(z/q)`.
    pub fn ell(&self, z: C64) -> C64 {
        self.lambda(self.q * z) + self.lambda(z / self.q).inv()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TqReport {
    pub q_values: Vec<C64>,
    /// `max_k |Q(z_k q^2) + Q(z_k q^-2) - ell(z_k) Q(z_k)| / max_k |Q(z_k)|`.
    pub relative_residual: f64,
    pub points_checked: usize,
}

/// Builds `Q` on the lattice from the first-order relation
/// `Q(z q) = Lambda(z) Q(z / q)` and evaluates the second-order TQ relation.
pub fn qmiura_tq(data: &QMiuraData, seeds: [C64; 2]) -> Result<TqReport> {
    if data.length < 4 {
        return Err(Error::InvalidProblem("lattice length must be at least 4".into()));
    }
    let lam = data.lattice_lambda()?;
    // lam[k + 1] = Lambda(z_k)
    let at = |k: usize| lam[k + 1];
    let n = data.length;
    let mut q = vec![seeds[0], seeds[1]];
    for k in 1..n - 1 {
        q.push(at(k) * q[k - 1]);
    }
    let mut residual: f64 = 0.0;
    let mut checked = 0;
    for k in 2..n - 2 {
        let ell = at(k + 1) + at(k - 1).inv();
        let r = q[k - 2] + q[k + 2] - ell * q[k];
        residual = residual.max(r.norm());
        checked += 1;
    }
    let size = q.iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(TqReport { q_values: q, relative_residual: residual / size, points_checked: checked })
}

/// Compares `D_q^2 - ell D_q + 1` with `(D_q - Lambda(zq))(D_q - Lambda(zq)^{-1})`
/// applied to a lattice function `f` (values at `z_0 .. z_{L-1}`); returns
/// the largest deviation relative to `max |f|` over points where both sides are defined.
pub fn operator_identity_deviation(data: &QMiuraData, f: &[C64]) -> Result<f64> {
    let lam = data.lattice_lambda()?;
    let at = |k: usize| lam[k + 1];
    let n = f.len().min(data.length);
    let mut worst: f64 = 0.0;
    for k in 4..n {
        let ell = at(k + 1) + at(k - 1).inv();
        let lhs = f[k - 4] - ell * f[k - 2] + f[k];
        // g = (D_q - Lambda(zq)^{-1}) f, so g_j = f_{j-2} - f_j / Lambda(z_{j+1})
        let g = |j: usize| f[j - 2] - f[j] / at(j + 1);
        let rhs = g(k - 2) - at(k + 1) * g(k);
        worst = worst.max((lhs - rhs).norm());
    }
    let size = f.iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(worst / size)
}
