//! Bethe ansatz equations for sl2 and sl3 Gaudin models: residuals, a
//! multi-start Newton solver, Bethe vectors, eigenvalue extraction and
//! completeness audits against exact diagonalization.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaudin::{diagonalize_sector_with, eigen_residual, hamiltonians, tuple_cmp, GaudinOperators, GaudinProblem};
use crate::linalg::{canonical_cmp, vec_norm, CMatrix, C64, ZERO};
use crate::ratfun::RationalFunction;
use crate::repcore::{Algebra, Generator, TensorSpace, TensorVector, Weight};

/// Relative distance below which roots collide with each other or with `z_i`.
pub const ROOT_SEPARATION: f64 = 1e-10;
pub const CONVERGENCE_TOLERANCE: f64 = 1e-12;
pub const DEDUP_TOLERANCE: f64 = 1e-8;
pub const EIGEN_TOLERANCE: f64 = 1e-9;
pub const MATCH_TOLERANCE: f64 = 1e-7;
pub const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheConfiguration {
    pub roots: Vec<C64>,
    /// Simple-root label (1 or 2) of each root; all 1 for sl2.
    pub colors: Vec<usize>,
    /// `max_j |F_j|` times the problem length scale.
    pub residual: f64,
}

impl BetheConfiguration {
    pub fn sl2(roots: Vec<C64>) -> Self {
        let colors = vec![1; roots.len()];
        Self { roots, colors, residual: f64::NAN }
    }

    pub fn colored(roots: Vec<C64>, colors: Vec<usize>) -> Self {
        Self { roots, colors, residual: f64::NAN }
    }

    pub fn magnons(&self) -> usize {
        self.roots.len()
    }

    /// Sorts roots by `(Re, Im, color)`.
    pub fn canonicalize(&mut self, tol: f64) {
        let mut pairs: Vec<(C64, usize)> = self.roots.iter().cloned().zip(self.colors.iter().cloned()).collect();
        pairs.sort_by(|a, b| {
            if (a.0 - b.0).norm() <= tol {
                a.1.cmp(&b.1)
            } else {
                canonical_cmp(a.0, b.0, tol)
            }
        });
        self.roots = pairs.iter().map(|p| p.0).collect();
        self.colors = pairs.iter().map(|p| p.1).collect();
    }

    /// True when the two configurations agree up to permutations of
    /// equal-color roots, with greedy matching within `tol`.
    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        if self.roots.len() != other.roots.len() {
            return false;
        }
        let mut used = vec![false; other.roots.len()];
        for (w, c) in self.roots.iter().zip(&self.colors) {
            let hit = other
                .roots
                .iter()
                .zip(&other.colors)
                .enumerate()
                .filter(|(k, (v, d))| !used[*k] && *d == c && (w - *v).norm() <= tol)
                .min_by(|a, b| (w - a.1 .0).norm().total_cmp(&(w - b.1 .0).norm()));
            match hit {
                Some((k, _)) => used[k] = true,
                None => return false,
            }
        }
        true
    }
}

/// Coefficient data of a Bethe system
/// `F_j = sum_i a[c_j][i]/(w_j - z_i) - sum_{l != j} G[c_l][c_j]/(w_j - w_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetheSystem {
    pub z: Vec<C64>,
    /// `site_coefficients[c][i]`: pairing of site weight `i` with simple root `c`.
    pub site_coefficients: Vec<Vec<f64>>,
    pub gram: Vec<Vec<f64>>,
    pub scale: f64,
}

impl BetheSystem {
    pub fn for_problem(problem: &GaudinProblem) -> Self {
        let (site_coefficients, gram) = match problem.algebra() {
            Algebra::Sl2 => (
                vec![problem.weights.iter().map(|w| w.labels()[0] as f64).collect()],
                vec![vec![2.0]],
            ),
            Algebra::Sl3 => (
                (0..2)
                    .map(|c| problem.weights.iter().map(|w| w.labels()[c] as f64).collect())
                    .collect(),
                vec![vec![2.0, -1.0], vec![-1.0, 2.0]],
            ),
        };
        Self { z: problem.z.clone(), site_coefficients, gram, scale: problem.length_scale() }
    }

    /// sl2 system whose site weights are the Verma highest weights `-lambda_i - 2`.
    pub fn verma(problem: &GaudinProblem) -> Result<Self> {
        let weights = problem.sl2_weights()?;
        Ok(Self {
            z: problem.z.clone(),
            site_coefficients: vec![weights.iter().map(|&l| -(l as f64) - 2.0).collect()],
            gram: vec![vec![2.0]],
            scale: problem.length_scale(),
        })
    }

    pub fn colors(&self) -> usize {
        self.gram.len()
    }

    fn check_colors(&self, colors: &[usize]) -> Result<()> {
        for &c in colors {
            if c == 0 || c > self.colors() {
                return Err(Error::UnsupportedColor(c));
            }
        }
        Ok(())
    }

    /// Describes the first root that hits a site or another root, if any.
    pub fn collision(&self, roots: &[C64]) -> Option<String> {
        let tol = ROOT_SEPARATION * self.scale;
        for (j, w) in roots.iter().enumerate() {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Some(format!("root {} is not finite", j + 1));
            }
            for (i, z) in self.z.iter().enumerate() {
                if (w - z).norm() <= tol {
                    return Some(format!("root {} hits z_{}", j + 1, i + 1));
                }
            }
            for (l, v) in roots.iter().enumerate().skip(j + 1) {
                if (w - v).norm() <= tol {
                    return Some(format!("roots {} and {} coincide", j + 1, l + 1));
                }
            }
        }
        None
    }

    pub fn residuals(&self, roots: &[C64], colors: &[usize]) -> Result<Vec<C64>> {
        if roots.len() != colors.len() {
            return Err(Error::InvalidProblem(format!("{} roots but {} colors", roots.len(), colors.len())));
        }
        self.check_colors(colors)?;
        if let Some(msg) = self.collision(roots) {
            return Err(Error::Collision(msg));
        }
        Ok(self.raw_residuals(roots, colors))
    }

    fn raw_residuals(&self, roots: &[C64], colors: &[usize]) -> Vec<C64> {
        roots
            .iter()
            .zip(colors)
            .enumerate()
            .map(|(j, (&w, &c))| {
                let a = &self.site_coefficients[c - 1];
                let sites: C64 = self.z.iter().zip(a).map(|(&z, &ai)| ai / (w - z)).sum();
                let others: C64 = roots
                    .iter()
                    .zip(colors)
                    .enumerate()
                    .filter(|(l, _)| *l != j)
                    .map(|(_, (&v, &d))| self.gram[d - 1][c - 1] / (w - v))
                    .sum();
                sites - others
            })
            .collect()
    }

    fn jacobian(&self, roots: &[C64], colors: &[usize]) -> CMatrix {
        let m = roots.len();
        let mut jac = CMatrix::zeros(m, m);
        for j in 0..m {
            let (w, c) = (roots[j], colors[j]);
            let a = &self.site_coefficients[c - 1];
            let mut diag: C64 = self.z.iter().zip(a).map(|(&z, &ai)| -ai / ((w - z) * (w - z))).sum();
            for l in 0..m {
                if l == j {
                    continue;
                }
                let g = self.gram[colors[l] - 1][c - 1];
                let d2 = (w - roots[l]) * (w - roots[l]);
                diag += g / d2;
                jac[(j, l)] = -g / d2;
            }
            jac[(j, j)] = diag;
        }
        jac
    }

    /// Scaled residual norm `max_j |F_j| * scale`.
    pub fn norm(&self, residuals: &[C64]) -> f64 {
        residuals.iter().map(|r| r.norm()).fold(0.0, f64::max) * self.scale
    }

    fn merit(residuals: &[C64]) -> f64 {
        residuals.iter().map(|r| r.norm_sqr()).sum()
    }

    /// Weights `p_j = prod_i (w_j - z_i) / scale^N`. Newton runs on
    /// `G_j = p_j F_j`, which has the same finite zeros as `F` but does not
    /// decay when roots drift to infinity.
    fn weights(&self, roots: &[C64]) -> Vec<C64> {
        roots
            .iter()
            .map(|&w| self.z.iter().fold(C64::new(1.0, 0.0), |acc, &z| acc * (w - z) / self.scale))
            .collect()
    }

    fn weighted(&self, roots: &[C64], f: &[C64]) -> Vec<C64> {
        self.weights(roots).iter().zip(f).map(|(p, x)| p * x).collect()
    }

    fn newton(&self, mut roots: Vec<C64>, colors: &[usize], centroid: C64, params: &SolverParams) -> StartOutcome {
        if self.collision(&roots).is_some() {
            return StartOutcome::Collision;
        }
        let mut f = self.raw_residuals(&roots, colors);
        for _ in 0..params.max_iterations {
            let mut jac = self.jacobian(&roots, colors);
            if self.norm(&f) < params.tolerance {
                // Non-isolated solutions (identically vanishing equations) are discarded.
                if !jac.lu().is_invertible() {
                    return StartOutcome::Stalled;
                }
                return StartOutcome::Converged(roots, self.norm(&f));
            }
            // J_G = diag(p) (J_F + diag(F_j sum_i 1/(w_j - z_i)))
            let p = self.weights(&roots);
            for j in 0..roots.len() {
                let log_derivative: C64 = self.z.iter().map(|&z| (roots[j] - z).inv()).sum();
                jac[(j, j)] += f[j] * log_derivative;
                for l in 0..roots.len() {
                    jac[(j, l)] *= p[j];
                }
            }
            let g = self.weighted(&roots, &f);
            let rhs = nalgebra::DVector::from_iterator(g.len(), g.iter().map(|x| -x));
            let Some(step) = jac.lu().solve(&rhs) else {
                return StartOutcome::Stalled;
            };
            let current = Self::merit(&g);
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<C64> = roots.iter().zip(step.iter()).map(|(w, d)| w + d * t).collect();
                if self.collision(&trial).is_none() {
                    let ft = self.raw_residuals(&trial, colors);
                    if Self::merit(&self.weighted(&trial, &ft)) < current {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
                t *= 0.5;
            }
            let Some((next, fn_)) = accepted else {
                break;
            };
            roots = next;
            f = fn_;
            if roots.iter().any(|w| (w - centroid).norm() > params.divergence_radius * self.scale) {
                return StartOutcome::Diverged;
            }
        }
        let norm = self.norm(&f);
        if norm < params.tolerance && self.jacobian(&roots, colors).lu().is_invertible() {
            StartOutcome::Converged(roots, norm)
        } else {
            StartOutcome::Stalled
        }
    }
}

enum StartOutcome {
    Converged(Vec<C64>, f64),
    Collision,
    Diverged,
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Random starts; defaults to `64 * m`.
    pub starts: Option<usize>,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Iterates farther than this many length scales from the centroid are abandoned.
    pub divergence_radius: f64,
    /// Root colors for sl3; ignored for sl2.
    pub colors: Option<Vec<usize>>,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            starts: None,
            seed: 0,
            tolerance: CONVERGENCE_TOLERANCE,
            max_iterations: 100,
            divergence_radius: 1e3,
            colors: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub starts: usize,
    pub converged: usize,
    pub collisions: usize,
    pub diverged: usize,
    pub stalled: usize,
    pub distinct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub configurations: Vec<BetheConfiguration>,
    pub diagnostics: SolveDiagnostics,
}

/// Residuals `F_j` of the Bethe equations for the problem's algebra.
pub fn residuals(problem: &GaudinProblem, config: &BetheConfiguration) -> Result<Vec<C64>> {
    BetheSystem::for_problem(problem).residuals(&config.roots, &config.colors)
}

/// Fills in the scaled residual norm of a configuration.
pub fn with_residual(problem: &GaudinProblem, mut config: BetheConfiguration) -> Result<BetheConfiguration> {
    let system = BetheSystem::for_problem(problem);
    let r = system.residuals(&config.roots, &config.colors)?;
    config.residual = system.norm(&r);
    Ok(config)
}

fn resolve_colors(problem: &GaudinProblem, m: usize, params: &SolverParams) -> Result<Vec<usize>> {
    match problem.algebra() {
        Algebra::Sl2 => Ok(vec![1; m]),
        Algebra::Sl3 => {
            let colors = params
                .colors
                .clone()
                .ok_or_else(|| Error::InvalidProblem("sl3 roots need a color sequence".into()))?;
            if colors.len() != m {
                return Err(Error::InvalidProblem(format!("{} colors for {m} roots", colors.len())));
            }
            Ok(colors)
        }
    }
}

/// Multi-start damped Newton search for solutions with `m` roots.
pub fn solve(problem: &GaudinProblem, m: usize, params: &SolverParams) -> Result<SolveOutcome> {
    problem.validate()?;
    let colors = resolve_colors(problem, m, params)?;
    let system = BetheSystem::for_problem(problem);
    system.check_colors(&colors)?;
    solve_system(&system, &colors, params)
}

pub fn solve_system(system: &BetheSystem, colors: &[usize], params: &SolverParams) -> Result<SolveOutcome> {
    let m = colors.len();
    if m == 0 {
        let config = BetheConfiguration { roots: Vec::new(), colors: Vec::new(), residual: 0.0 };
        let diagnostics = SolveDiagnostics { distinct: 1, ..Default::default() };
        return Ok(SolveOutcome { configurations: vec![config], diagnostics });
    }
    let centroid = system.z.iter().sum::<C64>() / system.z.len() as f64;
    let radius = 2.0 * system.scale;
    let random_starts = params.starts.unwrap_or(64 * m);

    // Midpoint-seeded starts first, then random ones; each has its own stream.
    let mut midpoints = Vec::new();
    for i in 0..system.z.len() {
        for j in i + 1..system.z.len() {
            midpoints.push((system.z[i] + system.z[j]) * 0.5);
        }
    }
    let total = midpoints.len() + random_starts;
    let outcomes: Vec<StartOutcome> = (0..total)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(k as u64);
            let roots: Vec<C64> = if k < midpoints.len() {
                let jitter = 0.1 * system.scale;
                (0..m).map(|_| midpoints[k] + random_in_disc(&mut rng, jitter)).collect()
            } else {
                (0..m).map(|_| centroid + random_in_disc(&mut rng, radius)).collect()
            };
            system.newton(roots, colors, centroid, params)
        })
        .collect();

    let mut diagnostics = SolveDiagnostics { starts: total, ..Default::default() };
    let tol = DEDUP_TOLERANCE * system.scale;
    let mut found: Vec<BetheConfiguration> = Vec::new();
    for outcome in outcomes {
        match outcome {
            StartOutcome::Converged(roots, residual) => {
                diagnostics.converged += 1;
                let mut config = BetheConfiguration { roots, colors: colors.to_vec(), residual };
                config.canonicalize(tol);
                if !found.iter().any(|f| f.same_as(&config, tol)) {
                    found.push(config);
                }
            }
            StartOutcome::Collision => diagnostics.collisions += 1,
            StartOutcome::Diverged => diagnostics.diverged += 1,
            StartOutcome::Stalled => diagnostics.stalled += 1,
        }
    }
    found.sort_by(|a, b| config_cmp(a, b, tol));
    diagnostics.distinct = found.len();
    Ok(SolveOutcome { configurations: found, diagnostics })
}

fn config_cmp(a: &BetheConfiguration, b: &BetheConfiguration, tol: f64) -> std::cmp::Ordering {
    for ((x, c), (y, d)) in a.roots.iter().zip(&a.colors).zip(b.roots.iter().zip(&b.colors)) {
        if (x - y).norm() > tol {
            return canonical_cmp(*x, *y, tol);
        }
        if c != d {
            return c.cmp(d);
        }
    }
    a.roots.len().cmp(&b.roots.len())
}

fn random_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    C64::from_polar(r, theta)
}

/// `f(w_1) ... f(w_m) |0>` with `f(w) = sum_i f^(i)/(w - z_i)`, on any sl2
/// tensor space (finite-dimensional or truncated Verma).
pub fn bethe_vector_on(space: &TensorSpace, z: &[C64], roots: &[C64]) -> TensorVector {
    let lowering: Vec<_> = (0..space.sites()).map(|i| space.site_operator(i, Generator::F)).collect();
    let mut v = space.vacuum().0;
    for &w in roots.iter().rev() {
        let mut next = vec![ZERO; v.len()];
        for (f, &zi) in lowering.iter().zip(z) {
            let fv = f.matvec(&v);
            let c = (w - zi).inv();
            for (a, b) in next.iter_mut().zip(fv) {
                *a += b * c;
            }
        }
        v = next;
    }
    TensorVector(v)
}

pub fn bethe_vector(problem: &GaudinProblem, config: &BetheConfiguration) -> Result<TensorVector> {
    if problem.algebra() != Algebra::Sl2 {
        return Err(Error::UnsupportedAlgebra("sl3 Bethe vectors"));
    }
    let system = BetheSystem::for_problem(problem);
    if let Some(msg) = system.collision(&config.roots) {
        return Err(Error::Collision(msg));
    }
    Ok(bethe_vector_on(&problem.tensor_space()?, &problem.z, &config.roots))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvaluePackage {
    pub mu: Vec<C64>,
    pub sector: Weight,
    pub z: Vec<C64>,
    /// Double-pole coefficients `c_i` read off `q`.
    pub c: Vec<C64>,
    /// Largest deviation of a double-pole coefficient from `lambda_i(lambda_i+2)/4`.
    pub double_pole_defect: f64,
    /// `|lambda_inf(lambda_inf+2)/4 - sum_i (c_i + z_i mu_i)|`.
    pub infinity_defect: f64,
    /// Largest residue of `q` at a root (zero when the Bethe equations hold).
    pub root_residue: f64,
    pub bethe_residual: f64,
    /// False when the Bethe residual is above `1e-10`.
    pub eigen: bool,
}

/// `chi(t) = sum_i kappa_i/(t - z_i) - sum_j 2/(t - w_j)`.
pub fn connection(z: &[C64], kappa: &[f64], roots: &[C64]) -> RationalFunction {
    let sites = RationalFunction::simple_poles(z, &kappa.iter().map(|&k| C64::new(k, 0.0)).collect::<Vec<_>>());
    let wells = RationalFunction::simple_poles(roots, &vec![C64::new(-2.0, 0.0); roots.len()]);
    sites.add(&wells)
}

/// `q = chi^2/4 - chi'/2`.
pub fn projective_potential(chi: &RationalFunction) -> RationalFunction {
    chi.mul(chi).scale(C64::new(0.25, 0.0)).sub(&chi.derivative().scale(C64::new(0.5, 0.0)))
}

/// Eigenvalues `mu_i` of `H_i` from the residues of `q` at `z_i`.
pub fn eigenvalues_from_roots(problem: &GaudinProblem, config: &BetheConfiguration) -> Result<EigenvaluePackage> {
    let weights = problem.sl2_weights()?;
    let kappa: Vec<f64> = weights.iter().map(|&l| l as f64).collect();
    let system = BetheSystem::for_problem(problem);
    let r = system.residuals(&config.roots, &config.colors)?;
    let total: u32 = weights.iter().sum();
    let m = config.roots.len() as i64;
    let lambda_inf = total as i64 - 2 * m;
    let package = eigen_package(problem, &kappa, &config.roots, lambda_inf as f64)?;
    let bethe_residual = system.norm(&r);
    Ok(EigenvaluePackage {
        sector: Weight::Sl2(lambda_inf.max(0) as u32),
        bethe_residual,
        eigen: bethe_residual < 1e-10 && lambda_inf >= 0,
        ..package
    })
}

/// Shared core of the eigenvalue formula for arbitrary site weights `kappa`.
pub fn eigen_package(problem: &GaudinProblem, kappa: &[f64], roots: &[C64], lambda_inf: f64) -> Result<EigenvaluePackage> {
    let chi = connection(&problem.z, kappa, roots);
    let q = projective_potential(&chi);
    let mu: Vec<C64> = problem.z.iter().map(|&z| q.residue(z)).collect();
    let c: Vec<C64> = problem.z.iter().map(|&z| q.pole_coefficient(z, 2)).collect();
    let double_pole_defect = c
        .iter()
        .zip(kappa)
        .map(|(ci, k)| (ci - k * (k + 2.0) / 4.0).norm())
        .fold(0.0, f64::max);
    let sum: C64 = c.iter().zip(&mu).zip(&problem.z).map(|((ci, mi), zi)| ci + zi * mi).sum();
    let infinity_defect = (sum - lambda_inf * (lambda_inf + 2.0) / 4.0).norm();
    let root_residue = roots.iter().map(|&w| q.residue(w).norm()).fold(0.0, f64::max);
    Ok(EigenvaluePackage {
        mu,
        sector: Weight::Sl2(lambda_inf.max(0.0) as u32),
        z: problem.z.clone(),
        c,
        double_pole_defect,
        infinity_defect,
        root_residue,
        bethe_residual: f64::NAN,
        eigen: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub residual: f64,
    pub pass: bool,
    pub mu: Vec<C64>,
    pub vector_norm: f64,
    pub bethe_residual: f64,
}

pub fn verify_eigen(problem: &GaudinProblem, config: &BetheConfiguration) -> Result<VerifyReport> {
    let ops = hamiltonians(problem)?;
    verify_eigen_with(problem, &ops, config)
}

pub fn verify_eigen_with(problem: &GaudinProblem, ops: &GaudinOperators, config: &BetheConfiguration) -> Result<VerifyReport> {
    let package = eigenvalues_from_roots(problem, config)?;
    let psi = bethe_vector_on(&ops.space, &problem.z, &config.roots);
    let norm = psi.norm();
    let weights = problem.sl2_weights()?;
    let natural: f64 = config
        .roots
        .iter()
        .map(|w| problem.z.iter().zip(&weights).map(|(z, &l)| l as f64 / (w - z).norm()).sum::<f64>())
        .product();
    if !(norm > 1e-12 * natural) {
        return Err(Error::ZeroVector);
    }
    let residual = ops
        .hamiltonians
        .iter()
        .zip(&package.mu)
        .map(|(h, &mu)| eigen_residual(h, psi.as_slice(), mu))
        .fold(0.0, f64::max);
    Ok(VerifyReport {
        residual,
        pass: residual < EIGEN_TOLERANCE,
        mu: package.mu,
        vector_norm: norm,
        bethe_residual: package.bethe_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorAudit {
    pub m: usize,
    pub sector: Weight,
    pub dimension: usize,
    pub solutions: usize,
    pub verified: usize,
    pub matched: usize,
    pub worst_residual: f64,
    pub unmatched_oracle: Vec<Vec<C64>>,
    pub configurations: Vec<BetheConfiguration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub sectors: Vec<SectorAudit>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditParams {
    pub solver: SolverParams,
    pub dimension_cap: usize,
}

impl Default for AuditParams {
    fn default() -> Self {
        Self { solver: SolverParams::default(), dimension_cap: 4096 }
    }
}

/// Solves every sector and matches Bethe eigenvalues against the oracle.
pub fn completeness_audit(problem: &GaudinProblem, params: &AuditParams) -> Result<CompletenessReport> {
    problem.validate()?;
    let weights = problem.sl2_weights()?;
    let dim: usize = weights.iter().map(|&l| l as usize + 1).product();
    if dim > params.dimension_cap {
        return Err(Error::InvalidProblem(format!(
            "tensor dimension {dim} exceeds the audit cap {}",
            params.dimension_cap
        )));
    }
    let ops = hamiltonians(problem)?;
    let total: u32 = weights.iter().sum();
    let mut sectors = Vec::new();
    for m in 0..=(total / 2) as usize {
        let sector = Weight::Sl2(total - 2 * m as u32);
        let oracle = match diagonalize_sector_with(problem, &ops, sector, params.solver.seed) {
            Ok(report) => Some(report),
            Err(Error::EmptySector(_)) => None,
            Err(e) => return Err(e),
        };
        let dimension = oracle.as_ref().map_or(0, |o| o.dimension);
        let outcome = solve(problem, m, &params.solver)?;
        let tol = MATCH_TOLERANCE * ops.spectral_scale().max(1.0);
        let mut unmatched: Vec<Vec<C64>> = oracle.map(|o| o.eigenvalues).unwrap_or_default();
        let mut verified = 0;
        let mut matched = 0;
        let mut worst: f64 = 0.0;
        for config in &outcome.configurations {
            let Ok(report) = verify_eigen_with(problem, &ops, config) else {
                continue;
            };
            worst = worst.max(report.residual);
            if !report.pass {
                continue;
            }
            verified += 1;
            let hit = unmatched.iter().position(|t| {
                t.iter().zip(&report.mu).all(|(a, b)| (a - b).norm() <= tol)
            });
            if let Some(k) = hit {
                unmatched.remove(k);
                matched += 1;
            }
        }
        unmatched.sort_by(|a, b| tuple_cmp(a, b, tol));
        sectors.push(SectorAudit {
            m,
            sector,
            dimension,
            solutions: outcome.configurations.len(),
            verified,
            matched,
            worst_residual: worst,
            unmatched_oracle: unmatched,
            configurations: outcome.configurations,
        });
    }
    let complete = sectors.iter().all(|s| s.matched == s.dimension);
    Ok(CompletenessReport { sectors, complete })
}

/// Gram matrix of a family of vectors, normalized to unit diagonal.
pub fn normalized_gram(vectors: &[TensorVector]) -> CMatrix {
    let n = vectors.len();
    DMatrix::from_fn(n, n, |i, j| {
        let a = vectors[i].as_slice();
        let b = vectors[j].as_slice();
        crate::linalg::inner(a, b) / (vec_norm(a) * vec_norm(b))
    })
}

/// `|det|` of the normalized Gram matrix (1 for orthogonal, 0 for dependent families).
pub fn gram_determinant(vectors: &[TensorVector]) -> f64 {
    if vectors.is_empty() {
        return 1.0;
    }
    normalized_gram(vectors).determinant().norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn midpoint_solves_two_spins() {
        let z = [c(0.2, 0.1), c(-0.8, 1.5)];
        let p = GaudinProblem::sl2(&z, &[1, 1]).unwrap();
        let conf = BetheConfiguration::sl2(vec![(z[0] + z[1]) * 0.5]);
        assert!(residuals(&p, &conf).unwrap()[0].norm() < 1e-15);
        let p = GaudinProblem::sl2(&z, &[1, 2]).unwrap();
        let conf = BetheConfiguration::sl2(vec![(z[0] * 2.0 + z[1]) / 3.0]);
        assert!(residuals(&p, &conf).unwrap()[0].norm() < 1e-14);
    }

    #[test]
    fn collision_is_rejected() {
        let z = [c(0.0, 0.0), c(1.0, 0.0)];
        let p = GaudinProblem::sl2(&z, &[1, 1]).unwrap();
        let conf = BetheConfiguration::sl2(vec![z[0]]);
        assert!(matches!(residuals(&p, &conf), Err(Error::Collision(_))));
    }

    #[test]
    fn empty_sl3_configuration() {
        let p = GaudinProblem::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![Weight::Sl3(1, 0); 2]).unwrap();
        let conf = BetheConfiguration::colored(vec![], vec![]);
        assert!(residuals(&p, &conf).unwrap().is_empty());
        let bad = BetheConfiguration::colored(vec![c(0.5, 0.0)], vec![3]);
        assert!(matches!(residuals(&p, &bad), Err(Error::UnsupportedColor(3))));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = GaudinProblem::new(
            vec![c(0.0, 0.0), c(1.0, 0.3), c(-0.4, 1.1)],
            vec![Weight::Sl3(1, 0), Weight::Sl3(0, 1), Weight::Sl3(1, 1)],
        )
        .unwrap();
        let s = BetheSystem::for_problem(&p);
        let roots = vec![c(0.3, 0.4), c(0.5, -0.2), c(-0.1, 0.6)];
        let colors = vec![1, 2, 1];
        let jac = s.jacobian(&roots, &colors);
        let h = 1e-6;
        for l in 0..3 {
            let mut plus = roots.clone();
            plus[l] += h;
            let mut minus = roots.clone();
            minus[l] -= h;
            let fp = s.raw_residuals(&plus, &colors);
            let fm = s.raw_residuals(&minus, &colors);
            for j in 0..3 {
                let fd = (fp[j] - fm[j]) / (2.0 * h);
                assert!((fd - jac[(j, l)]).norm() < 1e-6 * (1.0 + fd.norm()));
            }
        }
    }

    #[test]
    fn solver_finds_quadratic_roots() {
        let z = [c(0.0, 0.0), c(1.0, 0.2), c(0.3, 1.4)];
        let p = GaudinProblem::sl2(&z, &[1, 1, 1]).unwrap();
        let out = solve(&p, 1, &SolverParams::default()).unwrap();
        assert_eq!(out.configurations.len(), 2);
        let s1: C64 = z.iter().sum();
        let s2 = z[0] * z[1] + z[0] * z[2] + z[1] * z[2];
        for conf in &out.configurations {
            let w = conf.roots[0];
            assert!((w * w * 3.0 - s1 * 2.0 * w + s2).norm() < 1e-10);
            assert!(conf.residual < 1e-12);
        }
    }

    #[test]
    fn vacuum_is_eigen() {
        let z = [c(0.0, 0.0), c(1.0, 0.2), c(0.3, 1.4)];
        let p = GaudinProblem::sl2(&z, &[1, 2, 1]).unwrap();
        let conf = with_residual(&p, BetheConfiguration::sl2(vec![])).unwrap();
        let rep = verify_eigen(&p, &conf).unwrap();
        assert!(rep.residual < 1e-14);
        let pkg = eigenvalues_from_roots(&p, &conf).unwrap();
        let lam = [1.0, 2.0, 1.0];
        for i in 0..3 {
            let expected: C64 = (0..3)
                .filter(|&j| j != i)
                .map(|j| lam[i] * lam[j] / (2.0 * (z[i] - z[j])))
                .sum();
            assert!((pkg.mu[i] - expected).norm() < 1e-13);
        }
        assert!(pkg.infinity_defect < 1e-12);
    }

    #[test]
    fn singlet_bethe_vector() {
        let z = [c(0.0, 0.0), c(2.0, 0.0)];
        let p = GaudinProblem::sl2(&z, &[1, 1]).unwrap();
        let v = bethe_vector(&p, &BetheConfiguration::sl2(vec![c(1.0, 0.0)])).unwrap();
        // basis (x0 x0, x0 x1, x1 x0, x1 x1)
        assert_eq!(v.0[0], ZERO);
        assert_eq!(v.0[3], ZERO);
        assert!((v.0[1] + v.0[2]).norm() < 1e-15);
        assert!(v.0[1].norm() > 0.5);
    }

    #[test]
    fn perturbed_root_fails_verification() {
        let z = [c(0.0, 0.0), c(1.0, 0.2), c(0.3, 1.4)];
        let p = GaudinProblem::sl2(&z, &[1, 1, 1]).unwrap();
        let out = solve(&p, 1, &SolverParams::default()).unwrap();
        let mut conf = out.configurations[0].clone();
        assert!(verify_eigen(&p, &conf).unwrap().residual < 1e-10);
        conf.roots[0] += 1e-3;
        let rep = verify_eigen(&p, &conf).unwrap();
        assert!(rep.residual > 1e-6 && !rep.pass);
    }

    #[test]
    fn small_audits_are_complete() {
        let z = [c(0.0, 0.0), c(1.0, 0.2), c(0.3, 1.4)];
        let p = GaudinProblem::sl2(&z, &[1, 1, 1]).unwrap();
        let rep = completeness_audit(&p, &AuditParams::default()).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.sectors[1].dimension, 2);
        assert_eq!(rep.sectors[1].matched, 2);
    }

    #[test]
    fn sl3_midpoint() {
        let p = GaudinProblem::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![Weight::Sl3(1, 0); 2]).unwrap();
        let params = SolverParams { colors: Some(vec![1]), ..Default::default() };
        let out = solve(&p, 1, &params).unwrap();
        assert_eq!(out.configurations.len(), 1);
        assert!((out.configurations[0].roots[0] - c(0.5, 0.0)).norm() < 1e-12);
        // a lone color-2 root sees no site charge: the equation vanishes identically
        let params = SolverParams { colors: Some(vec![2]), ..Default::default() };
        assert!(solve(&p, 1, &params).unwrap().configurations.is_empty());
    }
}
