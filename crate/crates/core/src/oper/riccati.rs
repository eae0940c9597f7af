//! Formal Riccati recursion `q = chi^2/4 - chi'/2` at a regular singular
//! point and the resonance obstruction polynomials `P_m`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::poly::{rational, Polynomial};

/// Default truncation depth of local series.
pub const DEFAULT_DEPTH: usize = 16;
/// Obstructions below this value count as vanishing.
pub const OBSTRUCTION_TOLERANCE: f64 = 1e-12;
/// Distance from an integer below which `chi_0` counts as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// Coefficients `a_0, a_{-1}, ..., a_{-K}` of a local series; `coeffs[k]` is `a_{-k}`.
///
/// For a potential the convention is `q(t) = sum_n q_n t^{-n-2}`, for a
/// connection `chi(t) = sum_n chi_n t^{-n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSeries {
    pub coeffs: Vec<C64>,
}

impl LocalSeries {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn depth(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of index `n <= 0`; zero beyond the stored depth.
    pub fn get(&self, n: i64) -> C64 {
        assert!(n <= 0, "local series are indexed by n <= 0");
        self.coeffs.get((-n) as usize).copied().unwrap_or(ZERO)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub m: usize,
    /// `chi_{-m-1}` is a free parameter; the representative `0` is taken.
    pub obstruction: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiBranch {
    pub chi: LocalSeries,
    pub resonance: Option<Resonance>,
}

fn inner_sum(chi: &[C64], n: i64) -> C64 {
    // sum over i + j = n with i, j < 0
    let k = (-n) as usize;
    (1..k).map(|a| chi[a] * chi[k - a]).sum()
}

/// Solves the recursion downward from `chi_0` on one branch.
fn run_branch(q: &LocalSeries, chi0: C64, depth: usize) -> Result<RiccatiBranch> {
    let mut chi = vec![ZERO; depth + 1];
    chi[0] = chi0;
    let m_round = chi0.re.round();
    let resonant_m = if m_round >= 0.0 && (chi0 - C64::new(m_round, 0.0)).norm() < RESONANCE_TOLERANCE {
        Some(m_round as usize)
    } else {
        None
    };
    let mut resonance = None;
    for k in 1..=depth {
        let n = -(k as i64);
        let rhs = q.get(n) - inner_sum(&chi, n) * 0.25;
        if resonant_m == Some(k - 1) {
            let obstruction = -rhs;
            let scale = q.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
            if obstruction.norm() > OBSTRUCTION_TOLERANCE * scale {
                return Err(Error::ResonanceObstruction { m: k - 1, value: obstruction });
            }
            resonance = Some(Resonance { m: k - 1, obstruction });
            chi[k] = ZERO;
            continue;
        }
        let divisor = (chi0 + (n + 1) as f64) * 0.5;
        chi[k] = rhs / divisor;
    }
    Ok(RiccatiBranch { chi: LocalSeries::new(chi), resonance })
}

/// Both formal solutions `chi` of `chi^2/4 - chi'/2 = q`, from the roots
/// `chi_0 = -1 +- sqrt(1 + 4 q_0)`. Each branch either succeeds or reports
/// its resonance obstruction.
pub fn riccati_branches(q: &LocalSeries, depth: usize) -> Vec<Result<RiccatiBranch>> {
    let disc = (C64::new(1.0, 0.0) + q.get(0) * 4.0).sqrt();
    let roots = [C64::new(-1.0, 0.0) + disc, C64::new(-1.0, 0.0) - disc];
    if disc.norm() < RESONANCE_TOLERANCE {
        return vec![run_branch(q, roots[0], depth)];
    }
    roots.iter().map(|&r| run_branch(q, r, depth)).collect()
}

/// `chi^2/4 - chi'/2` coefficientwise, to the depth of `chi`.
pub fn series_miura(chi: &LocalSeries) -> LocalSeries {
    let depth = chi.depth();
    let coeffs = (0..=depth)
        .map(|k| {
            let n = -(k as i64);
            let square: C64 = (0..=k).map(|a| chi.coeffs[a] * chi.coeffs[k - a]).sum();
            square * 0.25 + chi.coeffs[k] * ((n + 1) as f64 * 0.5)
        })
        .collect();
    LocalSeries::new(coeffs)
}

/// Obstruction polynomial for the resonant branch `chi_0 = m`, normalized
/// so that `q_{-m-1}` has coefficient `+1`.
pub fn pm_polynomial(m: usize) -> Polynomial {
    let quarter = Polynomial::constant(rational(1, 4));
    let mut chi: Vec<Polynomial> = vec![Polynomial::constant(BigRational::from_integer((m as i64).into()))];
    for k in 1..=m + 1 {
        let n = -(k as i64);
        let inner = (1..k).fold(Polynomial::zero(), |acc, a| acc.add(&chi[a].mul(&chi[k - a])));
        let rhs = Polynomial::var(k - 1).sub(&quarter.mul(&inner));
        if k == m + 1 {
            return rhs;
        }
        // chi_n (m + n + 1)/2 = rhs
        let divisor = rational(m as i64 + n + 1, 2);
        debug_assert!(!divisor.is_zero());
        chi.push(rhs.scale(&(BigRational::from_integer(1.into()) / divisor)));
    }
    unreachable!("loop returns at k = m + 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_potential() {
        let q = LocalSeries::new(vec![ZERO; 9]);
        let branches: Vec<_> = riccati_branches(&q, 8).into_iter().map(|b| b.unwrap()).collect();
        assert_eq!(branches.len(), 2);
        assert_eq!(branches[0].chi.coeffs[0], ZERO);
        assert_eq!(branches[1].chi.coeffs[0], c(-2.0, 0.0));
        for b in &branches {
            assert!(b.chi.coeffs[1..].iter().all(|&x| x == ZERO));
        }
        // chi_0 = 0 is resonant with m = 0, and q_{-1} = 0 is unobstructed.
        assert_eq!(branches[0].resonance.as_ref().unwrap().m, 0);
    }

    #[test]
    fn first_resonance_by_hand() {
        let q_1 = c(0.3, 0.2);
        let q_2 = c(-0.1, 0.4);
        let q = LocalSeries::new(vec![c(0.75, 0.0), q_1, q_2, ZERO]);
        let branches = riccati_branches(&q, 3);
        match &branches[0] {
            Err(Error::ResonanceObstruction { m: 1, value }) => {
                let chi_1 = q_1 * 2.0;
                assert!((value - (chi_1 * chi_1 * 0.25 - q_2)).norm() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        // Non-resonant branch chi_0 = -3 succeeds.
        let b = branches[1].as_ref().unwrap();
        assert!((b.chi.coeffs[0] - c(-3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn roundtrip_on_generic_series() {
        let coeffs: Vec<C64> = (0..=16).map(|k| c(0.3 / (k + 1) as f64, 0.1 * k as f64 - 0.5)).collect();
        let q = LocalSeries::new(coeffs);
        for b in riccati_branches(&q, 16) {
            let back = series_miura(&b.unwrap().chi);
            for (a, b) in back.coeffs.iter().zip(&q.coeffs) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn low_obstruction_polynomials() {
        assert_eq!(pm_polynomial(0).to_string(), "q_{-1}");
        let p1 = pm_polynomial(1);
        assert_eq!(p1.to_string(), "-q_{-1}^2 + q_{-2}");
        for m in 0..=6 {
            let p = pm_polynomial(m);
            assert_eq!(p.weighted_degree(), Some(m as u32 + 1));
            assert!(p.is_weighted_homogeneous());
            let mut e = vec![0; m + 1];
            e[m] = 1;
            assert!(p.coefficient(&e).is_one());
        }
    }

    #[test]
    fn pm_matches_numeric_obstruction() {
        for m in 0..=4usize {
            let qs: Vec<C64> = (1..=m + 1).map(|k| c(0.2 * k as f64 - 0.3, 0.15 * (k % 3) as f64)).collect();
            let mut coeffs = vec![c((m * (m + 2)) as f64 / 4.0, 0.0)];
            coeffs.extend(qs.iter().cloned());
            let q = LocalSeries::new(coeffs);
            let value = match &riccati_branches(&q, m + 1)[0] {
                Err(Error::ResonanceObstruction { value, .. }) => *value,
                other => panic!("expected an obstruction, got {other:?}"),
            };
            let p = pm_polynomial(m).eval(&qs);
            assert!((p + value).norm() < 1e-12, "m = {m}");
        }
    }
}
