//! Gaudin hamiltonians, the generating operator `S(t)`, and an exact
//! diagonalization oracle on singular-vector sectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_cmp, eigenvalues, smallest_singular_vector, vec_norm, CMatrix, CVector, SparseMatrix, C64, ONE};
use crate::repcore::{singular_vectors, Algebra, Generator, TensorSpace, TensorVector, Weight};

/// Relative separation below which two marked points count as equal.
pub const POINT_SEPARATION: f64 = 1e-12;
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;
pub const MAX_COMBINATION_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaudinProblem {
    pub z: Vec<C64>,
    pub weights: Vec<Weight>,
}

impl GaudinProblem {
    pub fn new(z: Vec<C64>, weights: Vec<Weight>) -> Result<Self> {
        let p = Self { z, weights };
        p.validate()?;
        Ok(p)
    }

    pub fn sl2(z: &[C64], weights: &[u32]) -> Result<Self> {
        Self::new(z.to_vec(), weights.iter().map(|&l| Weight::Sl2(l)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.z.is_empty() {
            return Err(Error::InvalidProblem("at least one site is required".into()));
        }
        if self.z.len() != self.weights.len() {
            return Err(Error::InvalidProblem(format!(
                "{} points but {} weights",
                self.z.len(),
                self.weights.len()
            )));
        }
        let algebra = self.weights[0].algebra();
        if self.weights.iter().any(|w| w.algebra() != algebra) {
            return Err(Error::InvalidProblem("sites mix sl2 and sl3 weights".into()));
        }
        if self.z.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidProblem("marked points must be finite".into()));
        }
        let scale = self.length_scale();
        for i in 0..self.z.len() {
            for j in i + 1..self.z.len() {
                let distance = (self.z[i] - self.z[j]).norm();
                if distance <= POINT_SEPARATION * scale {
                    return Err(Error::CoincidingPoints { i: i + 1, j: j + 1, distance });
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> Algebra {
        self.weights[0].algebra()
    }

    pub fn sites(&self) -> usize {
        self.z.len()
    }

    pub fn centroid(&self) -> C64 {
        self.z.iter().sum::<C64>() / self.z.len() as f64
    }

    /// `max_i |z_i - centroid|`, or 1 when all points coincide with it.
    pub fn length_scale(&self) -> f64 {
        let c = self.centroid();
        let r = self.z.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
        if r > 0.0 {
            r
        } else {
            1.0
        }
    }

    /// Sum of the sl2 highest weights.
    pub fn total_weight(&self) -> Result<u32> {
        self.weights
            .iter()
            .map(|w| w.sl2_value().ok_or(Error::UnsupportedAlgebra("sl3")))
            .sum()
    }

    pub fn sl2_weights(&self) -> Result<Vec<u32>> {
        self.weights
            .iter()
            .map(|w| w.sl2_value().ok_or(Error::UnsupportedAlgebra("sl3")))
            .collect()
    }

    pub fn tensor_space(&self) -> Result<TensorSpace> {
        TensorSpace::from_weights(&self.weights)
    }

    /// Double-pole coefficients `c_i` of `S(t)`.
    pub fn double_pole_coefficients(&self) -> Vec<f64> {
        self.weights.iter().map(|&w| casimir_half(w)).collect()
    }
}

/// Half the quadratic Casimir on the irrep of weight `w`:
/// `lambda(lambda+2)/4` for sl2, `(n1^2 + n1 n2 + n2^2 + 3 n1 + 3 n2)/3` for sl3.
pub fn casimir_half(w: Weight) -> f64 {
    match w {
        Weight::Sl2(l) => {
            let l = l as f64;
            l * (l + 2.0) / 4.0
        }
        Weight::Sl3(a, b) => {
            let (a, b) = (a as f64, b as f64);
            (a * a + a * b + b * b + 3.0 * a + 3.0 * b) / 3.0
        }
    }
}

/// The Gaudin hamiltonians together with their formal structure
/// `H_i = sum_{j != i} w_ij Omega^(ij)`, where `w_ji = -w_ij` bit for bit.
#[derive(Debug, Clone)]
pub struct GaudinOperators {
    pub space: TensorSpace,
    /// `Omega^(ij)` for `i < j`, indexed as `(i, j, matrix)`.
    pub casimirs: Vec<(usize, usize, SparseMatrix)>,
    /// Per site, the pairs `(j, w_ij)`.
    pub pair_coefficients: Vec<Vec<(usize, C64)>>,
    pub hamiltonians: Vec<SparseMatrix>,
}

impl GaudinOperators {
    pub fn on_space(problem: &GaudinProblem, space: TensorSpace) -> Result<Self> {
        problem.validate()?;
        let n = problem.sites();
        let mut casimirs = Vec::new();
        let mut pair_coefficients = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                let w = (problem.z[i] - problem.z[j]).inv();
                pair_coefficients[i].push((j, w));
                pair_coefficients[j].push((i, -w));
                casimirs.push((i, j, space.casimir_pair(i, j)));
            }
        }
        let dim = space.dim();
        let hamiltonians = (0..n)
            .map(|i| {
                casimirs
                    .iter()
                    .filter(|(a, b, _)| *a == i || *b == i)
                    .fold(SparseMatrix::zeros(dim, dim), |acc, (a, b, omega)| {
                        let other = if *a == i { *b } else { *a };
                        let w = pair_coefficients[i].iter().find(|(j, _)| *j == other).unwrap().1;
                        acc.add_scaled(omega, w)
                    })
            })
            .collect();
        Ok(Self { space, casimirs, pair_coefficients, hamiltonians })
    }

    /// True when every pair coefficient appears with exactly opposite signs
    /// in the two hamiltonians it enters, so that `sum_i H_i = 0` as a
    /// formal combination of the `Omega^(ij)`.
    pub fn formal_sum_vanishes(&self) -> bool {
        self.pair_coefficients.iter().enumerate().all(|(i, pairs)| {
            pairs.iter().all(|&(j, w)| {
                self.pair_coefficients[j]
                    .iter()
                    .any(|&(k, v)| k == i && v == -w)
            })
        })
    }

    /// `max_i ||H_i||_inf`.
    pub fn spectral_scale(&self) -> f64 {
        self.hamiltonians.iter().map(|h| h.norm_inf()).fold(0.0, f64::max)
    }
}

/// `H_i = sum_{j != i} Omega^(ij) / (z_i - z_j)` on the tensor product of site irreps.
pub fn hamiltonians(problem: &GaudinProblem) -> Result<GaudinOperators> {
    problem.validate()?;
    GaudinOperators::on_space(problem, problem.tensor_space()?)
}

/// `S(t) = sum_i c_i/(t - z_i)^2 + sum_i H_i/(t - z_i)`.
pub fn s_operator(problem: &GaudinProblem, ops: &GaudinOperators, t: C64) -> Result<SparseMatrix> {
    let scale = problem.length_scale();
    if problem.z.iter().any(|&z| (t - z).norm() <= POINT_SEPARATION * scale) {
        return Err(Error::Singularity(t));
    }
    let dim = ops.space.dim();
    let c = problem.double_pole_coefficients();
    let double: C64 = problem.z.iter().zip(&c).map(|(&z, &ci)| ci / ((t - z) * (t - z))).sum();
    let mut s = SparseMatrix::identity(dim).scale(double);
    for (h, &z) in ops.hamiltonians.iter().zip(&problem.z) {
        s = s.add_scaled(h, (t - z).inv());
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub sector: Weight,
    pub dimension: usize,
    /// Joint eigenvalue tuples `(mu_1, ..., mu_N)`, sorted lexicographically.
    pub eigenvalues: Vec<Vec<C64>>,
    pub eigenvectors: Vec<TensorVector>,
    /// `max_i ||H_i v - mu_i v|| / ||v||` per eigenvector.
    pub residuals: Vec<f64>,
    pub spectral_scale: f64,
    pub attempts: usize,
}

fn to_columns(vectors: &[TensorVector]) -> CMatrix {
    let dim = vectors[0].len();
    CMatrix::from_fn(dim, vectors.len(), |r, c| vectors[c].0[r])
}

fn min_gap(values: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

/// Lexicographic order on eigenvalue tuples, treating components closer
/// than `tol` as equal.
pub fn tuple_cmp(a: &[C64], b: &[C64], tol: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).norm() > tol {
            return canonical_cmp(*x, *y, tol);
        }
    }
    std::cmp::Ordering::Equal
}

/// Joint spectrum of the hamiltonians on the singular vectors of weight `sector`.
pub fn diagonalize_sector(problem: &GaudinProblem, sector: Weight, seed: u64) -> Result<SpectrumReport> {
    let ops = hamiltonians(problem)?;
    diagonalize_sector_with(problem, &ops, sector, seed)
}

pub fn diagonalize_sector_with(
    problem: &GaudinProblem,
    ops: &GaudinOperators,
    sector: Weight,
    seed: u64,
) -> Result<SpectrumReport> {
    let basis = singular_vectors(&ops.space, sector)?;
    if basis.is_empty() {
        return Err(Error::EmptySector(sector.to_string()));
    }
    let b = to_columns(&basis);
    let bh = b.adjoint();
    let restricted: Vec<CMatrix> = ops
        .hamiltonians
        .iter()
        .map(|h| &bh * (h.to_dense() * &b))
        .collect();
    let k = basis.len();
    let scale = ops.spectral_scale().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut attempts = 0;
    let (combination, values) = loop {
        attempts += 1;
        let coeffs: Vec<C64> = (0..problem.sites())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let m = restricted
            .iter()
            .zip(&coeffs)
            .fold(CMatrix::zeros(k, k), |acc, (r, &c)| acc + r * c);
        let values = eigenvalues(&m)?;
        let weight: f64 = coeffs.iter().map(|c| c.norm()).sum();
        if min_gap(&values) > DEGENERACY_THRESHOLD * scale * weight {
            break (m, values);
        }
        if attempts >= MAX_COMBINATION_ATTEMPTS {
            return Err(Error::DegenerateCombination { attempts });
        }
    };

    let mut entries: Vec<(Vec<C64>, TensorVector, f64)> = values
        .iter()
        .map(|&theta| {
            let shifted = &combination - CMatrix::identity(k, k) * theta;
            let (_, v) = smallest_singular_vector(&shifted);
            let mu: Vec<C64> = restricted.iter().map(|r| rayleigh(r, &v)).collect();
            let psi = &b * &v;
            let psi: Vec<C64> = psi.iter().cloned().collect();
            let norm = vec_norm(&psi);
            let residual = ops
                .hamiltonians
                .iter()
                .zip(&mu)
                .map(|(h, &m)| {
                    let hv = h.matvec(&psi);
                    let diff: Vec<C64> = hv.iter().zip(&psi).map(|(a, b)| a - b * m).collect();
                    vec_norm(&diff) / norm
                })
                .fold(0.0, f64::max);
            (mu, TensorVector(psi), residual)
        })
        .collect();
    let tol = 1e-9 * scale;
    entries.sort_by(|a, b| tuple_cmp(&a.0, &b.0, tol));

    Ok(SpectrumReport {
        sector,
        dimension: k,
        eigenvalues: entries.iter().map(|e| e.0.clone()).collect(),
        eigenvectors: entries.iter().map(|e| e.1.clone()).collect(),
        residuals: entries.iter().map(|e| e.2).collect(),
        spectral_scale: scale,
        attempts,
    })
}

fn rayleigh(m: &CMatrix, v: &CVector) -> C64 {
    let mv = m * v;
    let num: C64 = v.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum();
    let den: C64 = v.iter().map(|a| a.conj() * a).sum();
    num / den
}

/// Total generator `sum_i g^(i)` on the problem's tensor space.
pub fn total_generator(ops: &GaudinOperators, g: Generator) -> SparseMatrix {
    ops.space.total_operator(g)
}

/// `||A v - mu v|| / ||v||`.
pub fn eigen_residual(a: &SparseMatrix, v: &[C64], mu: C64) -> f64 {
    let av = a.matvec(v);
    let diff: Vec<C64> = av.iter().zip(v).map(|(x, y)| x - y * mu).collect();
    vec_norm(&diff) / vec_norm(v)
}

/// Sum of all hamiltonians, materialized.
pub fn hamiltonian_sum(ops: &GaudinOperators) -> SparseMatrix {
    let dim = ops.space.dim();
    ops.hamiltonians
        .iter()
        .fold(SparseMatrix::zeros(dim, dim), |acc, h| acc.add_scaled(h, ONE))
}
