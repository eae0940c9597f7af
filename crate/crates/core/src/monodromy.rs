//! Monodromy of second- and third-order Fuchsian equations by integrating
//! the companion system along lassos from a common base point.
//!
//! Loops are counterclockwise. With `Y(base) = I`, the transfer matrix of a
//! path is `Y(end)`, so a path `a` followed by `b` has matrix `T_b T_a`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bethe::{eigenvalues_from_roots, BetheConfiguration};
use crate::error::{Error, Result};
use crate::gaudin::GaudinProblem;
use crate::linalg::{circle_samples, polynomial_roots, CMatrix, C64, ONE, ZERO};
use crate::ode::{Dopri5, IntegrationStats};
use crate::oper::{sl3_central_values, Oper, ProjectiveOper};
use crate::ratfun::RationalFunction;
use crate::repcore::{Algebra, Weight};

/// Default tolerance of the projective-triviality verdict.
pub const TRIVIALITY_TOLERANCE: f64 = 1e-6;
/// Determinants further than this from 1 are flagged.
pub const DETERMINANT_TOLERANCE: f64 = 1e-9;
/// Default lasso radius as a fraction of the distance to the nearest other point.
pub const RADIUS_FACTOR: f64 = 0.5;

/// `phi^(n) = sum_k coefficients[k] phi^(k)`, `n = coefficients.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearOde {
    pub coefficients: Vec<RationalFunction>,
}

impl LinearOde {
    /// `phi'' = q phi`.
    pub fn second_order(q: RationalFunction) -> Self {
        Self { coefficients: vec![q, RationalFunction::zero()] }
    }

    /// `phi''' = q1 phi' + q2 phi`.
    pub fn third_order(q1: RationalFunction, q2: RationalFunction) -> Self {
        Self { coefficients: vec![q2, q1, RationalFunction::zero()] }
    }

    pub fn from_oper(oper: &Oper) -> Self {
        match oper {
            Oper::Projective(p) => Self::second_order(p.potential()),
            Oper::ThirdOrder(t) => Self::third_order(t.q1(), t.q2()),
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn companion(&self, t: C64) -> CMatrix {
        let n = self.order();
        let mut a = CMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = ONE;
        }
        for (k, c) in self.coefficients.iter().enumerate() {
            a[(n - 1, k)] = c.eval(t);
        }
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Segment { from: C64, to: C64 },
    Arc { center: C64, start: C64, turns: f64 },
}

impl Piece {
    /// Point and velocity at parameter `s` in `[0, 1]`.
    fn at(&self, s: f64) -> (C64, C64) {
        match *self {
            Piece::Segment { from, to } => (from + (to - from) * s, to - from),
            Piece::Arc { center, start, turns } => {
                let rot = C64::from_polar(1.0, std::f64::consts::TAU * turns * s);
                let t = center + (start - center) * rot;
                (t, C64::new(0.0, std::f64::consts::TAU * turns) * (t - center))
            }
        }
    }

    fn clearance(&self, p: C64) -> f64 {
        match *self {
            Piece::Segment { from, to } => segment_distance(p, from, to),
            Piece::Arc { center, start, .. } => ((p - center).norm() - (start - center).norm()).abs(),
        }
    }
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

fn lasso(base: C64, center: C64, radius: f64) -> Vec<Piece> {
    let dir = (base - center) / (base - center).norm();
    let touch = center + dir * radius;
    vec![
        Piece::Segment { from: base, to: touch },
        Piece::Arc { center, start: touch, turns: 1.0 },
        Piece::Segment { from: touch, to: base },
    ]
}

/// Integrates an arbitrary first-order system `dy/dt = g(t, y)` along the
/// pieces, splitting arcs into `density` sub-arcs.
fn integrate_path<G>(g: &G, pieces: &[Piece], y0: Vec<C64>, solver: &Dopri5, density: usize, stats: &mut IntegrationStats) -> Result<Vec<C64>>
where
    G: Fn(C64, &[C64]) -> Vec<C64>,
{
    let mut y = y0;
    for piece in pieces {
        let parts = match piece {
            Piece::Segment { .. } => 1,
            Piece::Arc { .. } => density.max(1),
        };
        for k in 0..parts {
            let (s0, s1) = (k as f64 / parts as f64, (k + 1) as f64 / parts as f64);
            let rhs = |s: f64, y: &[C64]| {
                let (t, dt) = piece.at(s);
                g(t, y).into_iter().map(|v| v * dt).collect()
            };
            y = solver.integrate(rhs, s0, s1, y, stats).map_err(|e| match e {
                Error::StepUnderflow(s) => Error::StepUnderflow(piece.at(s.re).0),
                other => other,
            })?;
        }
    }
    Ok(y)
}

fn transport(ode: &LinearOde, pieces: &[Piece], solver: &Dopri5, density: usize) -> Result<(CMatrix, IntegrationStats)> {
    let n = ode.order();
    let g = |t: C64, y: &[C64]| {
        let a = ode.companion(t);
        let m = CMatrix::from_column_slice(n, n, y);
        (a * m).as_slice().to_vec()
    };
    let mut stats = IntegrationStats::default();
    let y0 = CMatrix::identity(n, n).as_slice().to_vec();
    let y = integrate_path(&g, pieces, y0, solver, density, &mut stats)?;
    Ok((CMatrix::from_column_slice(n, n, &y), stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub base: C64,
    pub target: usize,
    pub radius: f64,
    /// Number of sub-arcs the circle is integrated in.
    pub density: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub order: usize,
    /// Row-major entries.
    pub entries: Vec<Vec<C64>>,
    pub error_estimate: f64,
    /// `|det M - 1|` relative to `max(1, max |M_ij|)^n`, the size of the
    /// products that cancel in the determinant.
    pub det_defect: f64,
    pub steps: usize,
}

impl TransferMatrix {
    pub fn from_matrix(m: &CMatrix, stats: IntegrationStats) -> Self {
        Self {
            order: m.nrows(),
            entries: (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect(),
            error_estimate: stats.error_estimate,
            det_defect: det_defect(m),
            steps: stats.accepted + stats.rejected,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.order, self.order, |r, c| self.entries[r][c])
    }
}

fn det_defect(m: &CMatrix) -> f64 {
    let size = m.iter().map(|x| x.norm()).fold(1.0, f64::max);
    (m.determinant() - ONE).norm() / size.powi(m.nrows() as i32)
}

/// Checks that the lasso around `points[target]` keeps `radius/2` away from
/// every other point.
fn check_lasso(points: &[C64], target: usize, base: C64, radius: f64) -> Result<()> {
    let center = points[target];
    if (base - center).norm() <= radius {
        return Err(Error::ContourTooClose { index: target, distance: (base - center).norm() });
    }
    let pieces = lasso(base, center, radius);
    for (j, &p) in points.iter().enumerate() {
        if j == target {
            continue;
        }
        let d = pieces.iter().map(|piece| piece.clearance(p)).fold(f64::INFINITY, f64::min);
        if d < radius / 2.0 {
            return Err(Error::ContourTooClose { index: j, distance: d });
        }
    }
    Ok(())
}

/// Transfer matrix of the lasso around `singularities[spec.target]`.
pub fn loop_monodromy(ode: &LinearOde, singularities: &[C64], spec: &ContourSpec, solver: &Dopri5) -> Result<TransferMatrix> {
    if spec.target >= singularities.len() || !(spec.radius > 0.0) {
        return Err(Error::InvalidProblem("contour target or radius out of range".into()));
    }
    check_lasso(singularities, spec.target, spec.base, spec.radius)?;
    let pieces = lasso(spec.base, singularities[spec.target], spec.radius);
    let (m, stats) = transport(ode, &pieces, solver, spec.density)?;
    Ok(TransferMatrix::from_matrix(&m, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveVerdict {
    pub trivial: bool,
    /// The `n`-th root of unity closest to the matrix.
    pub scalar: C64,
    /// Largest entry of `M - scalar I`.
    pub distance: f64,
}

/// Whether `m` is a scalar `n`-th root of unity times the identity.
pub fn projective_trivial(m: &CMatrix, tol: f64) -> ProjectiveVerdict {
    let n = m.nrows();
    let mut best = ProjectiveVerdict { trivial: false, scalar: ONE, distance: f64::INFINITY };
    for k in 0..n {
        let omega = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
        let d = (m - CMatrix::identity(n, n) * omega).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if d < best.distance {
            best = ProjectiveVerdict { trivial: false, scalar: omega, distance: d };
        }
    }
    best.trivial = best.distance < tol;
    best
}

/// Base point and lasso radii shared by all loops of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPlan {
    pub base: C64,
    pub radii: Vec<f64>,
    /// Direction of the ray that starts the loop around all singularities.
    pub theta0: f64,
    pub big_radius: f64,
}

fn wrap_angle(x: f64) -> f64 {
    x.rem_euclid(std::f64::consts::TAU)
}

/// Grid search around the centroid for the base point with the largest
/// relative clearance. `avoid` lists further points (not singular for the
/// equation) that lassos must also keep away from.
pub fn plan_contours(singularities: &[C64], avoid: &[C64], radius_factor: f64) -> Result<ContourPlan> {
    if singularities.is_empty() {
        return Err(Error::InvalidProblem("no singularities to encircle".into()));
    }
    let n = singularities.len();
    let points: Vec<C64> = singularities.iter().chain(avoid).cloned().collect();
    let centroid = singularities.iter().sum::<C64>() / n as f64;
    let scale = points.iter().map(|z| (z - centroid).norm()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let nearest = |k: usize| {
        points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, p)| (p - points[k]).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let mut best: Option<(f64, ContourPlan)> = None;
    for i in -4..=4 {
        for j in -4..=4 {
            let base = centroid + C64::new(i as f64 + 0.37, j as f64 + 0.23) * (0.375 * scale);
            let mut radii = Vec::with_capacity(n);
            let mut margin = f64::INFINITY;
            for k in 0..n {
                let r = radius_factor * nearest(k).min((base - points[k]).norm());
                radii.push(r);
                for (l, p) in points.iter().enumerate() {
                    if l == k {
                        continue;
                    }
                    let d = lasso(base, points[k], r).iter().map(|piece| piece.clearance(*p)).fold(f64::INFINITY, f64::min);
                    margin = margin.min(d / (r / 2.0));
                }
                if points.len() == 1 {
                    margin = margin.min(2.0);
                }
            }
            let plan = ContourPlan { base, radii, theta0: 0.0, big_radius: 0.0 };
            if best.as_ref().map_or(true, |(m, _)| margin > *m) {
                best = Some((margin, plan));
            }
        }
    }
    let (margin, mut plan) = best.expect("grid is non-empty");
    if margin < 1.0 {
        return Err(Error::BranchCut(format!("best base point clearance ratio {margin:.3}")));
    }
    let mut angles: Vec<f64> = singularities.iter().map(|z| wrap_angle((z - plan.base).arg())).collect();
    angles.sort_by(f64::total_cmp);
    let mut theta0 = angles[0] + std::f64::consts::PI;
    let mut widest = 0.0;
    for k in 0..angles.len() {
        let next = if k + 1 < angles.len() { angles[k + 1] } else { angles[0] + std::f64::consts::TAU };
        if next - angles[k] > widest {
            widest = next - angles[k];
            theta0 = wrap_angle(angles[k] + widest / 2.0);
        }
    }
    plan.theta0 = theta0;
    plan.big_radius = 2.0 * points.iter().map(|z| (z - plan.base).norm()).fold(0.0, f64::max) + scale;
    Ok(plan)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyOptions {
    pub tolerance: f64,
    pub radius_factor: f64,
    pub density: usize,
    /// Extra points the contours keep away from.
    pub avoid: Vec<C64>,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self { tolerance: TRIVIALITY_TOLERANCE, radius_factor: RADIUS_FACTOR, density: 8, avoid: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopResult {
    pub center: Option<C64>,
    pub radius: f64,
    pub transfer: TransferMatrix,
    pub verdict: ProjectiveVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub plan: ContourPlan,
    /// One loop per singularity, in input order.
    pub loops: Vec<LoopResult>,
    /// The loop around infinity, the inverse of a large circle around all singularities.
    pub infinity: LoopResult,
    /// Singularity indices in counterclockwise order starting from `theta0`.
    pub order: Vec<usize>,
    /// `max |T_inf T_{k_n} ... T_{k_1} - I|` entrywise, relative to the
    /// largest entries of the two factors (at least 1).
    pub pi1_defect: f64,
    pub max_det_defect: f64,
    pub all_trivial: bool,
}

pub fn monodromy_report(ode: &LinearOde, singularities: &[C64], options: &MonodromyOptions) -> Result<MonodromyReport> {
    let plan = plan_contours(singularities, &options.avoid, options.radius_factor)?;
    let solver = Dopri5::default();
    let loops: Vec<LoopResult> = (0..singularities.len())
        .into_par_iter()
        .map(|k| {
            let pieces = lasso(plan.base, singularities[k], plan.radii[k]);
            let (m, stats) = transport(ode, &pieces, &solver, options.density)?;
            Ok(LoopResult {
                center: Some(singularities[k]),
                radius: plan.radii[k],
                verdict: projective_trivial(&m, options.tolerance),
                transfer: TransferMatrix::from_matrix(&m, stats),
            })
        })
        .collect::<Result<_>>()?;

    let far = plan.base + C64::from_polar(plan.big_radius, plan.theta0);
    let big = [
        Piece::Segment { from: plan.base, to: far },
        Piece::Arc { center: plan.base, start: far, turns: 1.0 },
        Piece::Segment { from: far, to: plan.base },
    ];
    let (t_big, stats) = transport(ode, &big, &solver, 4 * options.density)?;
    let n = ode.order();
    let t_inf = t_big
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Linalg("singular transfer matrix".into()))?;
    let mut order: Vec<usize> = (0..singularities.len()).collect();
    let rel = |k: usize| wrap_angle((singularities[k] - plan.base).arg() - plan.theta0);
    order.sort_by(|&a, &b| rel(a).total_cmp(&rel(b)));
    let mut product = CMatrix::identity(n, n);
    for &k in &order {
        product = loops[k].transfer.matrix() * product;
    }
    let entry_max = |m: &CMatrix| m.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let size = entry_max(&t_inf) * entry_max(&product);
    let pi1_defect = (&t_inf * &product - CMatrix::identity(n, n)).iter().map(|x| x.norm()).fold(0.0, f64::max) / size;
    let mut infinity_transfer = TransferMatrix::from_matrix(&t_inf, stats);
    infinity_transfer.det_defect = det_defect(&t_big);
    let infinity = LoopResult {
        center: None,
        radius: plan.big_radius,
        verdict: projective_trivial(&t_inf, options.tolerance),
        transfer: infinity_transfer,
    };
    let max_det_defect = loops
        .iter()
        .chain(std::iter::once(&infinity))
        .map(|l| l.transfer.det_defect)
        .fold(0.0, f64::max);
    let all_trivial = loops.iter().all(|l| l.verdict.trivial) && infinity.verdict.trivial;
    Ok(MonodromyReport { plan, loops, infinity, order, pi1_defect, max_det_defect, all_trivial })
}

/// Monodromy of the projective oper attached to an sl2 Bethe configuration.
pub fn bethe_monodromy(problem: &GaudinProblem, config: &BetheConfiguration, options: &MonodromyOptions) -> Result<MonodromyReport> {
    let package = eigenvalues_from_roots(problem, config)?;
    let oper = ProjectiveOper::new(problem.z.clone(), package.c, package.mu)?;
    monodromy_report(&LinearOde::second_order(oper.potential()), &problem.z, options)
}

/// Closed-form solutions `phi = prod (t-z_i)^{-lambda_i/2} prod (t-w_j)` and
/// `phi int phi^{-2}` of the projective oper of an sl2 Bethe configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSolutions {
    pub z: Vec<C64>,
    pub lambda: Vec<f64>,
    pub roots: Vec<C64>,
    pub potential: RationalFunction,
}

impl ExplicitSolutions {
    /// Principal-branch value of `phi`.
    pub fn phi(&self, t: C64) -> C64 {
        let a: C64 = self.z.iter().zip(&self.lambda).map(|(z, l)| (t - z).powf(-l / 2.0)).product();
        a * self.roots.iter().map(|w| t - w).product::<C64>()
    }

    /// `phi'/phi = -chi/2`.
    pub fn log_derivative(&self, t: C64) -> C64 {
        let a: C64 = self.z.iter().zip(&self.lambda).map(|(z, l)| -l / 2.0 / (t - z)).sum();
        a + self.roots.iter().map(|w| (t - w).inv()).sum::<C64>()
    }

    /// `(d^2 - q) phi / phi = L^2 + L' - q` with `L = phi'/phi`.
    pub fn ode_residual(&self, t: C64) -> C64 {
        let l = self.log_derivative(t);
        let dl: C64 = self.z.iter().zip(&self.lambda).map(|(z, lam)| lam / 2.0 / ((t - z) * (t - z))).sum::<C64>()
            - self.roots.iter().map(|w| ((t - w) * (t - w)).inv()).sum::<C64>();
        l * l + dl - self.potential.eval(t)
    }

    /// Integrates `(log phi, int phi^{-2})` along a path.
    fn continue_along(&self, pieces: &[Piece], log_phi: C64, integral: C64, stats: &mut IntegrationStats) -> Result<(C64, C64)> {
        let g = |t: C64, y: &[C64]| vec![self.log_derivative(t), (-2.0 * y[0]).exp()];
        let y = integrate_path(&g, pieces, vec![log_phi, integral], &Dopri5::default(), 8, stats)?;
        Ok((y[0], y[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitLoop {
    pub center: C64,
    /// `phi -> epsilon phi` along the loop.
    pub epsilon: C64,
    /// Period of `phi^{-2}` along the loop.
    pub period: C64,
    /// Deviation of `epsilon [[1, period], [0, 1]]` from the loop matrix
    /// rewritten in the basis `(phi, phi int phi^{-2})`.
    pub agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitReport {
    pub samples: Vec<C64>,
    /// `max |(d^2 - q) phi| / |phi|`, times the squared length scale.
    pub max_ode_residual: f64,
    pub max_wronskian_defect: f64,
    pub loops: Vec<ExplicitLoop>,
    pub max_agreement: f64,
}

pub const EXPLICIT_SAMPLES: usize = 20;

pub fn explicit_solutions(problem: &GaudinProblem, config: &BetheConfiguration) -> Result<(ExplicitSolutions, ExplicitReport)> {
    let package = eigenvalues_from_roots(problem, config)?;
    let weights = problem.sl2_weights()?;
    let oper = ProjectiveOper::new(problem.z.clone(), package.c, package.mu)?;
    let sol = ExplicitSolutions {
        z: problem.z.clone(),
        lambda: weights.iter().map(|&l| l as f64).collect(),
        roots: config.roots.clone(),
        potential: oper.potential(),
    };
    let scale = problem.length_scale();
    let poles: Vec<C64> = problem.z.iter().chain(&config.roots).cloned().collect();
    let exclusion = 0.1 * scale;
    let samples = circle_samples(problem.centroid(), 1.5 * scale, EXPLICIT_SAMPLES, &poles, exclusion);
    let max_ode_residual = samples.iter().map(|&t| sol.ode_residual(t).norm() * scale * scale).fold(0.0, f64::max);

    let plan = plan_contours(&problem.z, &config.roots, RADIUS_FACTOR)?;
    let base = plan.base;
    let log0 = sol.phi(base).ln();
    let phi0 = log0.exp();
    let dphi0 = sol.log_derivative(base) * phi0;

    let mut stats = IntegrationStats::default();
    let mut max_wronskian_defect: f64 = 0.0;
    for &t in &samples {
        let path = clear_path(base, t, problem.centroid(), scale, &poles, exclusion)?;
        let (lp, integral) = sol.continue_along(&path, log0, ZERO, &mut stats)?;
        let phi = lp.exp();
        let dphi = sol.log_derivative(t) * phi;
        let phi2 = phi * integral;
        let dphi2 = dphi * integral + phi.inv();
        max_wronskian_defect = max_wronskian_defect.max((phi * dphi2 - dphi * phi2 - ONE).norm());
    }

    let ode = LinearOde::second_order(sol.potential.clone());
    let solver = Dopri5::default();
    let w = CMatrix::from_row_slice(2, 2, &[phi0, ZERO, dphi0, phi0.inv()]);
    let w_inv = w.clone().try_inverse().ok_or_else(|| Error::Linalg("singular Wronskian matrix".into()))?;
    let loops: Vec<ExplicitLoop> = (0..problem.sites())
        .map(|k| {
            let pieces = lasso(base, problem.z[k], plan.radii[k]);
            let mut st = IntegrationStats::default();
            let (lp, period) = sol.continue_along(&pieces, log0, ZERO, &mut st)?;
            let epsilon = (lp - log0).exp();
            let pair = CMatrix::from_row_slice(2, 2, &[epsilon, epsilon * period, ZERO, epsilon]);
            let (t, _) = transport(&ode, &pieces, &solver, 8)?;
            let conj = &w_inv * t * &w;
            let agreement = (conj - pair).iter().map(|x| x.norm()).fold(0.0, f64::max);
            Ok(ExplicitLoop { center: problem.z[k], epsilon, period, agreement })
        })
        .collect::<Result<_>>()?;
    let max_agreement = loops.iter().map(|l| l.agreement).fold(0.0, f64::max);
    Ok((sol, ExplicitReport { samples, max_ode_residual, max_wronskian_defect, loops, max_agreement }))
}

/// A straight path, or a detour through a point far outside, that keeps
/// `exclusion` away from all poles.
fn clear_path(from: C64, to: C64, centroid: C64, scale: f64, poles: &[C64], exclusion: f64) -> Result<Vec<Piece>> {
    let ok = |a: C64, b: C64| poles.iter().all(|&p| segment_distance(p, a, b) >= exclusion);
    if ok(from, to) {
        return Ok(vec![Piece::Segment { from, to }]);
    }
    let reach = poles.iter().map(|p| (p - centroid).norm()).fold(scale, f64::max) + 2.0 * exclusion;
    for k in 0..16 {
        let via = centroid + C64::from_polar(2.0 * reach, (to - centroid).arg() + std::f64::consts::TAU * k as f64 / 16.0);
        let via_base = centroid + C64::from_polar(2.0 * reach, (from - centroid).arg());
        for (a, b) in [(via, via), (via_base, via)] {
            if ok(from, a) && ok(b, to) {
                let mut path = vec![Piece::Segment { from, to: a }];
                if a != b {
                    let turns = wrap_angle((b - centroid).arg() - (a - centroid).arg()) / std::f64::consts::TAU;
                    path.push(Piece::Arc { center: centroid, start: a, turns });
                }
                path.push(Piece::Segment { from: b, to });
                return Ok(path);
            }
        }
    }
    Err(Error::BranchCut(format!("no clear path from {from} to {to}")))
}

/// `q(t) = m(m+2)/(4t^2) + sum_k q_{-k} t^{k-2}` for `qs = [q_{-1}, q_{-2}, ...]`:
/// a regular singularity at 0 with exponent difference `m + 1` and the given
/// local coefficients; the polynomial tail only matters away from 0.
pub fn resonant_potential(m: usize, qs: &[C64]) -> RationalFunction {
    let m = m as f64;
    let mut q = RationalFunction::pole(ZERO, 2, C64::new(m * (m + 2.0) / 4.0, 0.0));
    if let Some(&first) = qs.first() {
        q = q.add(&RationalFunction::pole(ZERO, 1, first));
    }
    if qs.len() > 1 {
        q = q.add(&RationalFunction::polynomial(qs[1..].to_vec()));
    }
    q
}

/// Projective verdict for the loop around 0 of `d^2 - resonant_potential(m, qs)`.
pub fn resonant_local_monodromy(m: usize, qs: &[C64], tol: f64) -> Result<(TransferMatrix, ProjectiveVerdict)> {
    let ode = LinearOde::second_order(resonant_potential(m, qs));
    let spec = ContourSpec { base: C64::new(0.8, 0.6), target: 0, radius: 0.5, density: 8 };
    let t = loop_monodromy(&ode, &[ZERO], &spec, &Dopri5::default())?;
    let verdict = projective_trivial(&t.matrix(), tol);
    Ok((t, verdict))
}

/// Roots of the indicial equation `s(s-1)(s-2) - c1 s - c2 = 0` at a pole
/// of `d^3 - q1 d - q2` with leading coefficients `c1`, `c2`.
pub fn indicial_roots(c1: C64, c2: C64) -> Result<Vec<C64>> {
    polynomial_roots(&[-c2, C64::new(2.0, 0.0) - c1, C64::new(-3.0, 0.0), ONE])
}

/// Local exponents of the sl3 oper at a site of highest weight `(n1, n2)`:
/// `a_3`, `a_2 + 1`, `a_1 + 2` with `a` the diagonal form of the weight.
pub fn sl3_local_exponents(w: Weight) -> Result<[f64; 3]> {
    if w.algebra() != Algebra::Sl3 {
        return Err(Error::UnsupportedAlgebra("sl2 weight for sl3 exponents"));
    }
    let l = w.labels();
    let (n1, n2) = (l[0] as f64, l[1] as f64);
    Ok([(-n1 - 2.0 * n2) / 3.0, (n2 - n1) / 3.0 + 1.0, (2.0 * n1 + n2) / 3.0 + 2.0])
}

/// Largest distance between the closed-form exponents and the indicial roots
/// computed from the central values of the weight.
pub fn sl3_exponent_defect(w: Weight) -> Result<f64> {
    let a = crate::oper::sl3_diagonal(w);
    let (c1, c2) = sl3_central_values(a);
    let mut roots = indicial_roots(C64::new(c1, 0.0), C64::new(c2, 0.0))?;
    let expected = sl3_local_exponents(w)?;
    let mut worst: f64 = 0.0;
    for e in expected {
        let (k, d) = roots
            .iter()
            .enumerate()
            .map(|(k, r)| (k, (r - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three roots");
        worst = worst.max(d);
        roots.remove(k);
    }
    Ok(worst)
}
