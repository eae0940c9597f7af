//! Opers on the punctured sphere and the Miura transformation.
//!
//! A projective connection `d^2 - q(t)` and a third-order oper
//! `d^3 - q1(t) d - q2(t)` are built either from their pole data or by
//! expanding a product of first-order factors `(d - chi_1)...(d - chi_n)`.

pub mod qmiura;
pub mod riccati;
pub mod sl3;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaudin::{casimir_half, GaudinProblem};
use crate::linalg::{C64, ZERO};
use crate::ratfun::RationalFunction;
use crate::repcore::{Algebra, Weight};

pub use qmiura::{operator_identity_deviation, qmiura_tq, QMiuraData, TqReport};
pub use riccati::{pm_polynomial, riccati_branches, series_miura, LocalSeries, RiccatiBranch};
pub use sl3::{sl3_factorization_check, sl3_oracle_match, sl3_sector, Sl3FactorizationReport, Sl3OracleMatch};

/// Relative tolerance of the residue-sum condition.
pub const RESIDUE_SUM_TOLERANCE: f64 = 1e-12;

/// `q(t) = sum_i c_i/(t - z_i)^2 + mu_i/(t - z_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveOper {
    pub z: Vec<C64>,
    pub c: Vec<C64>,
    pub mu: Vec<C64>,
}

impl ProjectiveOper {
    pub fn new(z: Vec<C64>, c: Vec<C64>, mu: Vec<C64>) -> Result<Self> {
        check_residue_sum(&mu)?;
        Ok(Self { z, c, mu })
    }

    pub fn potential(&self) -> RationalFunction {
        let mut q = RationalFunction::zero();
        for ((&z, &c), &mu) in self.z.iter().zip(&self.c).zip(&self.mu) {
            q = q.add(&RationalFunction::pole(z, 2, c)).add(&RationalFunction::pole(z, 1, mu));
        }
        q
    }

    /// `sum_i (c_i + z_i mu_i)`, which equals `lambda_inf(lambda_inf+2)/4`
    /// when `q` has a regular singularity of weight `lambda_inf` at infinity.
    pub fn infinity_value(&self) -> C64 {
        self.z.iter().zip(&self.c).zip(&self.mu).map(|((z, c), mu)| c + z * mu).sum()
    }
}

/// `rho = d^3 - q1 d - q2` with
/// `q1 = sum c1_i/(t-z_i)^2 + mu_i/(t-z_i)` and
/// `q2 = sum c2_i/(t-z_i)^3 + nu_i/(t-z_i)^2 + kappa_i/(t-z_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrderOper {
    pub z: Vec<C64>,
    pub c1: Vec<C64>,
    pub mu: Vec<C64>,
    pub c2: Vec<C64>,
    pub nu: Vec<C64>,
    pub kappa: Vec<C64>,
}

impl ThirdOrderOper {
    pub fn q1(&self) -> RationalFunction {
        let mut q = RationalFunction::zero();
        for (i, &z) in self.z.iter().enumerate() {
            q = q
                .add(&RationalFunction::pole(z, 2, self.c1[i]))
                .add(&RationalFunction::pole(z, 1, self.mu[i]));
        }
        q
    }

    pub fn q2(&self) -> RationalFunction {
        let mut q = RationalFunction::zero();
        for (i, &z) in self.z.iter().enumerate() {
            q = q
                .add(&RationalFunction::pole(z, 3, self.c2[i]))
                .add(&RationalFunction::pole(z, 2, self.nu[i]))
                .add(&RationalFunction::pole(z, 1, self.kappa[i]));
        }
        q
    }

    /// Reads the pole data at `z` off expanded coefficient functions.
    pub fn from_coefficients(z: &[C64], q1: &RationalFunction, q2: &RationalFunction) -> Self {
        Self {
            z: z.to_vec(),
            c1: z.iter().map(|&a| q1.pole_coefficient(a, 2)).collect(),
            mu: z.iter().map(|&a| q1.residue(a)).collect(),
            c2: z.iter().map(|&a| q2.pole_coefficient(a, 3)).collect(),
            nu: z.iter().map(|&a| q2.pole_coefficient(a, 2)).collect(),
            kappa: z.iter().map(|&a| q2.residue(a)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Oper {
    Projective(ProjectiveOper),
    ThirdOrder(ThirdOrderOper),
}

fn check_residue_sum(mu: &[C64]) -> Result<()> {
    let sum: C64 = mu.iter().sum();
    let scale = mu.iter().map(|m| m.norm()).fold(1.0, f64::max);
    if sum.norm() > RESIDUE_SUM_TOLERANCE * scale {
        return Err(Error::ResidueSum(sum));
    }
    Ok(())
}

/// Diagonal entries of an sl3 weight, as in `omega_1 = diag(2/3, -1/3, -1/3)`.
pub fn sl3_diagonal(w: Weight) -> [f64; 3] {
    match w {
        Weight::Sl3(a, b) => Weight::sl3_diagonal(a as f64, b as f64),
        Weight::Sl2(l) => [l as f64 / 2.0, -(l as f64) / 2.0, 0.0],
    }
}

/// Simple root `alpha_c` as a diagonal matrix.
pub fn sl3_simple_root(color: usize) -> Result<[f64; 3]> {
    match color {
        1 => Ok([1.0, -1.0, 0.0]),
        2 => Ok([0.0, 1.0, -1.0]),
        c => Err(Error::UnsupportedColor(c)),
    }
}

/// Values `(c1, c2)` of the order-2 and order-3 central elements on the
/// Verma module with diagonal weight `a`, read off the expansion of
/// `(d - a_1/t)(d - a_2/t)(d - a_3/t)`.
pub fn sl3_central_values(a: [f64; 3]) -> (f64, f64) {
    let [a1, a2, a3] = a;
    let e2 = a1 * a2 + a1 * a3 + a2 * a3;
    let c1 = -e2 - a2 - 2.0 * a3;
    let c2 = a1 * a2 * a3 + 2.0 * a2 * a3 + a1 * a3 + 2.0 * a3;
    (c1, c2)
}

/// Oper with prescribed residues: `c_i = lambda_i(lambda_i+2)/4` for sl2,
/// central values of the site weights for sl3 (with `nu = kappa = 0`).
pub fn build_oper(problem: &GaudinProblem, mu: &[C64]) -> Result<Oper> {
    problem.validate()?;
    if mu.len() != problem.sites() {
        return Err(Error::InvalidProblem(format!("{} residues for {} sites", mu.len(), problem.sites())));
    }
    check_residue_sum(mu)?;
    match problem.algebra() {
        Algebra::Sl2 => {
            let c = problem.weights.iter().map(|&w| C64::new(casimir_half(w), 0.0)).collect();
            Ok(Oper::Projective(ProjectiveOper::new(problem.z.clone(), c, mu.to_vec())?))
        }
        Algebra::Sl3 => {
            let (c1, c2): (Vec<_>, Vec<_>) = problem
                .weights
                .iter()
                .map(|&w| {
                    let (a, b) = sl3_central_values(sl3_diagonal(w));
                    (C64::new(a, 0.0), C64::new(b, 0.0))
                })
                .unzip();
            let n = problem.sites();
            Ok(Oper::ThirdOrder(ThirdOrderOper {
                z: problem.z.clone(),
                c1,
                mu: mu.to_vec(),
                c2,
                nu: vec![ZERO; n],
                kappa: vec![ZERO; n],
            }))
        }
    }
}

/// Diagonal connection with components `chi_1 .. chi_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiuraConnection {
    pub components: Vec<RationalFunction>,
}

impl MiuraConnection {
    pub fn order(&self) -> usize {
        self.components.len()
    }

    /// sl2 connection `chi_1 = -chi_2 = chi/2` with
    /// `chi = sum lambda_i/(t - z_i) - sum 2/(t - w_j)`.
    pub fn sl2(z: &[C64], kappa: &[f64], roots: &[C64]) -> Self {
        let chi = crate::bethe::connection(z, kappa, roots).scale(C64::new(0.5, 0.0));
        Self { components: vec![chi.clone(), chi.scale(C64::new(-1.0, 0.0))] }
    }

    /// sl3 connection `chi_k = sum (lambda_i)_k/(t - z_i) - sum (alpha_{c_j})_k/(t - w_j)`.
    pub fn sl3(z: &[C64], weights: &[Weight], roots: &[C64], colors: &[usize]) -> Result<Self> {
        let mut components = vec![RationalFunction::zero(); 3];
        for (&zi, &w) in z.iter().zip(weights) {
            let d = sl3_diagonal(w);
            for k in 0..3 {
                components[k] = components[k].add(&RationalFunction::pole(zi, 1, C64::new(d[k], 0.0)));
            }
        }
        for (&wj, &c) in roots.iter().zip(colors) {
            let alpha = sl3_simple_root(c)?;
            for k in 0..3 {
                components[k] = components[k].add(&RationalFunction::pole(wj, 1, C64::new(-alpha[k], 0.0)));
            }
        }
        Ok(Self { components })
    }

    pub fn trace(&self) -> RationalFunction {
        self.components.iter().fold(RationalFunction::zero(), |acc, c| acc.add(c))
    }
}

/// Lower coefficients `a_0 .. a_{n-1}` of
/// `(d - chi_1)...(d - chi_n) = d^n + sum_k a_k d^k`.
pub fn compose_first_order(components: &[RationalFunction]) -> Vec<RationalFunction> {
    // coeffs[k] multiplies d^k; the leading 1 is kept implicit in `len`.
    let n = components.len();
    let mut coeffs: Vec<RationalFunction> = vec![RationalFunction::constant(C64::new(1.0, 0.0))];
    for chi in components.iter().rev() {
        // (d - chi) (sum a_k d^k) = sum a_k' d^k + a_k d^{k+1} - chi a_k d^k
        let mut next = vec![RationalFunction::zero(); coeffs.len() + 1];
        for (k, a) in coeffs.iter().enumerate() {
            next[k] = next[k].add(&a.derivative()).sub(&chi.mul(a));
            next[k + 1] = next[k + 1].add(a);
        }
        coeffs = next;
    }
    coeffs.truncate(n);
    coeffs
}

/// Expanded oper from a Miura connection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiuraExpansion {
    /// `q` for order 2, `[q1, q2]` for order 3; generally the negated
    /// coefficients of `d^{n-2}, ..., d^0`.
    pub potentials: Vec<RationalFunction>,
}

impl MiuraExpansion {
    pub fn q(&self) -> &RationalFunction {
        &self.potentials[0]
    }

    pub fn q1(&self) -> &RationalFunction {
        &self.potentials[0]
    }

    pub fn q2(&self) -> &RationalFunction {
        &self.potentials[1]
    }
}

/// Expands `(d - chi_1)...(d - chi_n)` into `d^n - sum_k q_k d^{n-2-k}`.
pub fn miura_expand(connection: &MiuraConnection) -> Result<MiuraExpansion> {
    let n = connection.order();
    if n < 2 {
        return Err(Error::InvalidProblem("Miura connections need at least two components".into()));
    }
    let trace = connection.trace();
    let scale = connection
        .components
        .iter()
        .map(|c| c.max_coefficient())
        .fold(1.0, f64::max);
    let defect = trace.max_coefficient();
    if defect > 1e-12 * scale {
        return Err(Error::NotTraceless(defect));
    }
    let coeffs = compose_first_order(&connection.components);
    let potentials = (0..n - 1)
        .map(|k| coeffs[n - 2 - k].scale(C64::new(-1.0, 0.0)))
        .collect();
    Ok(MiuraExpansion { potentials })
}
