//! Separation of variables in genus zero.
//!
//! A one-form `sum_i X_i/(t - z_i) dt` is determined by its zeros `y_j`
//! and the scale `r = sum_i X_i`; in these coordinates the Gaudin
//! eigenproblem becomes one second-order equation per `y_j`.

use serde::{Deserialize, Serialize};

use crate::bethe::{bethe_vector_on, BetheConfiguration, BetheSystem};
use crate::error::{Error, Result};
use crate::gaudin::{hamiltonians, s_operator, GaudinProblem, POINT_SEPARATION};
use crate::linalg::{canonical_cmp, circle_samples, inner, poly_mul, polynomial_roots, SparseMatrix, C64, ONE, ZERO};
use crate::ratfun::RationalFunction;
use crate::repcore::{verma_truncated, Generator, TensorSpace};

/// Relative size of `sum X_i` below which the transition degenerates.
pub const DEGENERATE_LEADING: f64 = 1e-12;
pub const SEPARATED_SAMPLES: usize = 50;
pub const SEPARATED_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueCoordinates {
    pub x: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedCoordinates {
    pub y: Vec<C64>,
    pub r: C64,
}

/// Ascending coefficients of `sum_i X_i prod_{k != i} (t - z_k)`.
pub fn numerator(x: &[C64], z: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; z.len().max(1)];
    for (i, &xi) in x.iter().enumerate() {
        let term = z
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .fold(vec![xi], |acc, (_, &zk)| poly_mul(&acc, &[-zk, ONE]));
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
    }
    out
}

pub fn to_separated(x: &ResidueCoordinates, z: &[C64]) -> Result<SeparatedCoordinates> {
    if x.x.len() != z.len() || z.is_empty() {
        return Err(Error::InvalidProblem("one residue per marked point is required".into()));
    }
    let r: C64 = x.x.iter().sum();
    let size = x.x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if r.norm() <= DEGENERATE_LEADING * size || size == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient(r.norm()));
    }
    let mut y = polynomial_roots(&numerator(&x.x, z))?;
    y.sort_by(|a, b| canonical_cmp(*a, *b, 1e-12));
    Ok(SeparatedCoordinates { y, r })
}

/// Partial fractions: `X_i = r prod_j (z_i - y_j) / prod_{k != i} (z_i - z_k)`.
pub fn from_separated(sep: &SeparatedCoordinates, z: &[C64]) -> Result<ResidueCoordinates> {
    if sep.y.len() + 1 != z.len() {
        return Err(Error::InvalidProblem(format!("{} separated points for {} marked points", sep.y.len(), z.len())));
    }
    let scale = spread(z);
    for (j, y) in sep.y.iter().enumerate() {
        for (i, zi) in z.iter().enumerate() {
            if (y - zi).norm() <= POINT_SEPARATION * scale {
                return Err(Error::Collision(format!("y_{} hits z_{}", j + 1, i + 1)));
            }
        }
    }
    let x = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let num: C64 = sep.y.iter().map(|y| zi - y).product();
            let den: C64 = z.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, zk)| zi - zk).product();
            sep.r * num / den
        })
        .collect();
    Ok(ResidueCoordinates { x })
}

fn spread(z: &[C64]) -> f64 {
    let c = z.iter().sum::<C64>() / z.len().max(1) as f64;
    let r = z.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
    if r > 0.0 {
        r
    } else {
        1.0
    }
}

/// Which local exponent the gauge factor of `nabla` removes at each site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationGauge {
    /// `kappa_i = lambda_i`: products over roots of the finite-dimensional Bethe equations.
    #[default]
    FiniteDimensional,
    /// `kappa_i = -lambda_i - 2`: the Fourier-transformed (Verma) picture.
    Verma,
}

impl SeparationGauge {
    pub fn kappa(self, lambda: u32) -> f64 {
        match self {
            Self::FiniteDimensional => lambda as f64,
            Self::Verma => -(lambda as f64) - 2.0,
        }
    }
}

/// The separated operator `nabla^2 - V` with `nabla = d - a/2`,
/// `a = sum kappa_i/(y - z_i)` and `V = sum c_i/(y-z_i)^2 + mu_i/(y-z_i)`,
/// written as `d^2 + A d + B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedOperator {
    pub a: RationalFunction,
    pub b: RationalFunction,
    pub potential: RationalFunction,
}

impl SeparatedOperator {
    pub fn new(problem: &GaudinProblem, mu: &[C64], gauge: SeparationGauge) -> Result<Self> {
        let weights = problem.sl2_weights()?;
        if mu.len() != weights.len() {
            return Err(Error::InvalidProblem("one eigenvalue per site is required".into()));
        }
        let kappa: Vec<C64> = weights.iter().map(|&l| C64::new(gauge.kappa(l), 0.0)).collect();
        let a = RationalFunction::simple_poles(&problem.z, &kappa);
        let mut potential = RationalFunction::zero();
        for ((&z, &l), &m) in problem.z.iter().zip(&weights).zip(mu) {
            let c = C64::new(l as f64 * (l as f64 + 2.0) / 4.0, 0.0);
            potential = potential.add(&RationalFunction::pole(z, 2, c)).add(&RationalFunction::pole(z, 1, m));
        }
        // nabla^2 = d^2 - a d + a^2/4 - a'/2
        let b = a
            .mul(&a)
            .scale(C64::new(0.25, 0.0))
            .sub(&a.derivative().scale(C64::new(0.5, 0.0)))
            .sub(&potential);
        Ok(Self { a: a.scale(-ONE), b, potential })
    }

    /// Applies the operator to a polynomial.
    pub fn apply(&self, psi: &[C64]) -> RationalFunction {
        let p = RationalFunction::polynomial(psi.to_vec());
        let dp = p.derivative();
        p.derivative().derivative().add(&self.a.mul(&dp)).add(&self.b.mul(&p))
    }

    /// Potential left after removing the first-order term:
    /// `d^2 + A d + B = g (d^2 - q) g^{-1}` with `q = A^2/4 + A'/2 - B`.
    pub fn degauged_potential(&self) -> RationalFunction {
        self.a
            .mul(&self.a)
            .scale(C64::new(0.25, 0.0))
            .add(&self.a.derivative().scale(C64::new(0.5, 0.0)))
            .sub(&self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedReport {
    pub gauge: SeparationGauge,
    pub samples: Vec<C64>,
    /// `sup |residual(y)| / (1 + |psi(y)|)` over the samples.
    pub max_residual: f64,
    /// Largest coefficient of the residual as a rational function.
    pub max_coefficient: f64,
    /// Largest coefficient of `degauged potential - q`.
    pub degauge_defect: f64,
    pub pass: bool,
}

/// Checks that `psi(y) = prod_j (y - w_j)` solves the separated equation
/// with eigenvalues `mu`.
pub fn separated_residual(problem: &GaudinProblem, mu: &[C64], roots: &[C64], gauge: SeparationGauge) -> Result<SeparatedReport> {
    problem.validate()?;
    let scale = problem.length_scale();
    for (j, w) in roots.iter().enumerate() {
        if problem.z.iter().any(|z| (w - z).norm() <= POINT_SEPARATION * scale) {
            return Err(Error::Collision(format!("root {} hits a marked point", j + 1)));
        }
    }
    let op = SeparatedOperator::new(problem, mu, gauge)?;
    let psi = roots.iter().fold(vec![ONE], |acc, &w| poly_mul(&acc, &[-w, ONE]));
    let residual = op.apply(&psi);
    let samples = circle_samples(problem.centroid(), 1.5 * scale, SEPARATED_SAMPLES, &problem.z, 0.1 * scale);
    let max_residual = samples
        .iter()
        .map(|&y| {
            let p = crate::linalg::horner(&psi, y);
            residual.eval(y).norm() / (1.0 + p.norm())
        })
        .fold(0.0, f64::max);
    let degauge_defect = op.degauged_potential().sub(&op.potential).max_coefficient();
    Ok(SeparatedReport {
        gauge,
        samples,
        max_residual,
        max_coefficient: residual.max_coefficient(),
        degauge_defect,
        pass: max_residual < SEPARATED_TOLERANCE,
    })
}

/// Order of the quadratic term in the Sklyanin identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// `f(t) e(t)`, for which the identity holds.
    #[default]
    FE,
    /// `e(t) f(t)`, which differs by `sum h_i/(t - z_i)^2`.
    EF,
}

/// `S(t) - (f(t)e(t) + h(t)^2/4 - h'(t)/2)` relative to `S(t)`, maximized
/// over the samples in the infinity norm.
pub fn sklyanin_identity(problem: &GaudinProblem, samples: &[C64], ordering: Ordering) -> Result<f64> {
    let ops = hamiltonians(problem)?;
    let space = &ops.space;
    let gens = |g: Generator| (0..space.sites()).map(|i| space.site_operator(i, g)).collect::<Vec<_>>();
    let (e, f, h) = (gens(Generator::E), gens(Generator::F), gens(Generator::H));
    let dim = space.dim();
    let current = |ops: &[SparseMatrix], weights: &dyn Fn(C64) -> C64| {
        ops.iter()
            .zip(&problem.z)
            .fold(SparseMatrix::zeros(dim, dim), |acc, (m, &z)| acc.add_scaled(m, weights(z)))
    };
    let mut worst: f64 = 0.0;
    for &t in samples {
        let s = s_operator(problem, &ops, t)?;
        let pole = |z: C64| (t - z).inv();
        let (et, ft, ht) = (current(&e, &pole), current(&f, &pole), current(&h, &pole));
        let dht = current(&h, &|z: C64| -((t - z) * (t - z)).inv());
        let quad = match ordering {
            Ordering::FE => ft.mul(&et),
            Ordering::EF => et.mul(&ft),
        };
        let rhs = quad
            .add_scaled(&ht.mul(&ht), C64::new(0.25, 0.0))
            .add_scaled(&dht, C64::new(-0.5, 0.0));
        let dev = s.add_scaled(&rhs, -ONE).norm_inf();
        worst = worst.max(dev / s.norm_inf().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionalityReport {
    pub cutoff: usize,
    /// `c` minimizing `|B - c Psi|`.
    pub constant: C64,
    /// `(-1)^{m(N-1)} / prod_{i,j} (w_j - z_i)`.
    pub predicted_constant: C64,
    /// `|B - c Psi| / |B|`.
    pub deviation: f64,
    pub bethe_norm: f64,
}

/// Tensor coordinates of `prod_j r prod_l (y_l - w_j)` as a polynomial in
/// `X_1 .. X_N`. Each factor is the linear form
/// `(-1)^{N-1} sum_i X_i prod_{k != i} (w_j - z_k)`, read off the
/// coefficients of the numerator (the elementary symmetric functions of `y`
/// times `r`), so no roots are needed.
pub fn product_solution(space: &TensorSpace, z: &[C64], roots: &[C64]) -> Vec<C64> {
    let n = z.len();
    let sign = if n % 2 == 1 { ONE } else { -ONE };
    let mut v = space.vacuum().0;
    for &w in roots {
        let form: Vec<C64> = (0..n)
            .map(|i| sign * z.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, zk)| w - zk).product::<C64>())
            .collect();
        let mut next = vec![ZERO; v.len()];
        for (idx, &val) in v.iter().enumerate() {
            if val == ZERO {
                continue;
            }
            let multi = space.multi_index(idx);
            for (i, &a) in form.iter().enumerate() {
                let mut up = multi.clone();
                up[i] += 1;
                if up[i] < space.rep(i).dim {
                    next[space.index(&up)] += a * val;
                }
            }
        }
        v = next;
    }
    v
}

/// Compares the product-form separated solution with the Bethe vector in the
/// truncated Verma tensor product.
pub fn verma_proportionality(problem: &GaudinProblem, config: &BetheConfiguration, cutoff: usize) -> Result<ProportionalityReport> {
    let weights = problem.sl2_weights()?;
    let m = config.roots.len();
    if cutoff < m + 2 {
        return Err(Error::TruncationOverflow { needed: m + 2, cutoff });
    }
    if let Some(msg) = BetheSystem::for_problem(problem).collision(&config.roots) {
        return Err(Error::Collision(msg));
    }
    let space = TensorSpace::new(weights.iter().map(|&l| verma_truncated(l, cutoff)).collect());
    let bethe = bethe_vector_on(&space, &problem.z, &config.roots).0;
    let psi = product_solution(&space, &problem.z, &config.roots);
    let pp = inner(&psi, &psi);
    let constant = if pp.norm() > 0.0 { inner(&psi, &bethe) / pp } else { ZERO };
    let bethe_norm = crate::linalg::vec_norm(&bethe);
    let diff: Vec<C64> = bethe.iter().zip(&psi).map(|(b, p)| b - constant * p).collect();
    let deviation = crate::linalg::vec_norm(&diff) / bethe_norm.max(f64::MIN_POSITIVE);
    let n = problem.sites();
    let sign = if (m * (n - 1)) % 2 == 0 { ONE } else { -ONE };
    let denom: C64 = config.roots.iter().flat_map(|w| problem.z.iter().map(move |z| w - z)).product();
    Ok(ProportionalityReport { cutoff, constant, predicted_constant: sign / denom, deviation, bethe_norm })
}
