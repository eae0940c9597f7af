//! Subcommand bodies. Each returns the result payload, its checks and any
//! CSV tables; `main` turns those into a report and an exit code.

use std::path::Path;

use gaudinlab::bethe::{
    completeness_audit, eigen_package, eigenvalues_from_roots, solve, verify_eigen_with, with_residual, AuditParams,
    BetheConfiguration, SolverParams, EIGEN_TOLERANCE, MATCH_TOLERANCE,
};
use gaudinlab::gaudin::{diagonalize_sector, hamiltonians, GaudinProblem};
use gaudinlab::linalg::circle_samples;
use gaudinlab::monodromy::{
    bethe_monodromy, explicit_solutions, monodromy_report, LinearOde, MonodromyOptions, DETERMINANT_TOLERANCE,
};
use gaudinlab::oper::{
    pm_polynomial, qmiura_tq, riccati_branches, series_miura, sl3_factorization_check, sl3_oracle_match, LocalSeries,
    Oper, QMiuraData,
};
use gaudinlab::repcore::Algebra;
use gaudinlab::sov::{
    separated_residual, sklyanin_identity, verma_proportionality, Ordering, SeparationGauge, SEPARATED_TOLERANCE,
};
use gaudinlab::{Error, C64};
use serde_json::{json, Value};

use crate::input::{self, ProblemFile};
use crate::report::{Check, Table};
use crate::CliError;

pub const BETHE_RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const SKLYANIN_TOLERANCE: f64 = 1e-11;
pub const PROPORTIONALITY_TOLERANCE: f64 = 1e-10;
pub const TQ_TOLERANCE: f64 = 1e-12;
pub const RICCATI_TOLERANCE: f64 = 1e-12;
pub const EXPLICIT_RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Eigenvalue shift used to confirm the separated check can fail.
pub const PERTURBATION: f64 = 1e-3;
pub const PERTURBED_FLOOR: f64 = 1e-6;
const SKLYANIN_SAMPLES: usize = 5;

#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub seed: Option<u64>,
    /// `(path, contents)` of every file read.
    pub inputs: Vec<(String, String)>,
    /// Plain text for stdout in place of the JSON report.
    pub text: Option<String>,
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

struct Loaded {
    file: ProblemFile,
    problem: GaudinProblem,
    inputs: Vec<(String, String)>,
}

fn load(problem: &Path) -> Result<Loaded, CliError> {
    let text = input::read(problem)?;
    let (file, p) = input::load_problem(problem, &text)?;
    Ok(Loaded { file, problem: p, inputs: vec![(problem.display().to_string(), text)] })
}

fn load_with_roots(problem: &Path, roots: &Path) -> Result<(Loaded, Vec<BetheConfiguration>), CliError> {
    let mut loaded = load(problem)?;
    let text = input::read(roots)?;
    let configs = input::load_roots(roots, &text, loaded.problem.algebra())?;
    loaded.inputs.push((roots.display().to_string(), text));
    let configs = configs
        .into_iter()
        .map(|c| with_residual(&loaded.problem, c))
        .collect::<gaudinlab::Result<Vec<_>>>()?;
    Ok((loaded, configs))
}

fn solver_params(file: &ProblemFile, starts: Option<usize>, seed: u64, colors: Option<Vec<usize>>) -> SolverParams {
    let mut p = SolverParams { seed, colors, ..SolverParams::default() };
    p.starts = starts.or(file.solver.starts);
    if let Some(t) = file.solver.tolerance {
        p.tolerance = t;
    }
    if let Some(n) = file.solver.max_iterations {
        p.max_iterations = n;
    }
    p
}

pub fn spectrum(problem: &Path, sector: &str, seed: u64) -> Result<Outcome, CliError> {
    let l = load(problem)?;
    let sector = input::parse_weight(sector, l.problem.algebra())?;
    let rep = diagonalize_sector(&l.problem, sector, seed)?;
    let tol = EIGEN_TOLERANCE * rep.spectral_scale.max(1.0);
    let worst = rep.residuals.iter().cloned().fold(0.0, f64::max);
    let mut checks = vec![Check::below("eigen_residual", worst, tol)];
    if let Some(mu) = &l.file.mu {
        let distance = rep
            .eigenvalues
            .iter()
            .map(|t| t.iter().zip(mu).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::below("mu_in_spectrum", distance, MATCH_TOLERANCE * rep.spectral_scale.max(1.0)));
    }
    let tables = (0..l.problem.sites())
        .map(|i| Table {
            name: format!("eigenvalues_site{}", i + 1),
            rows: rep.eigenvalues.iter().zip(&rep.residuals).enumerate().map(|(k, (t, &r))| (k, t[i], r)).collect(),
        })
        .collect();
    let result = json!({
        "sector": rep.sector,
        "dimension": rep.dimension,
        "eigenvalues": rep.eigenvalues,
        "residuals": rep.residuals,
        "spectral_scale": rep.spectral_scale,
        "attempts": rep.attempts,
    });
    Ok(Outcome { result, checks, tables, seed: Some(seed), inputs: l.inputs, text: None })
}

fn roots_table(configs: &[BetheConfiguration]) -> Table {
    let rows = configs
        .iter()
        .flat_map(|c| c.roots.iter().map(move |&w| (w, c.residual)))
        .enumerate()
        .map(|(k, (w, r))| (k, w, r))
        .collect();
    Table { name: "roots".into(), rows }
}

pub fn solve_roots(problem: &Path, m: usize, starts: Option<usize>, seed: u64, colors: Option<&str>) -> Result<Outcome, CliError> {
    let l = load(problem)?;
    let colors = colors.map(input::parse_colors).transpose()?;
    if l.problem.algebra() == Algebra::Sl3 && colors.is_none() {
        return Err(CliError::Input("sl3 problems need --colors".into()));
    }
    let params = solver_params(&l.file, starts, seed, colors);
    let out = solve(&l.problem, m, &params)?;
    let worst = out.configurations.iter().map(|c| c.residual).fold(0.0, f64::max);
    let checks = vec![Check::below("max_bethe_residual", worst, BETHE_RESIDUAL_TOLERANCE)];
    Ok(Outcome {
        tables: vec![roots_table(&out.configurations)],
        result: json!({ "m": m, "configurations": out.configurations, "diagnostics": out.diagnostics }),
        checks,
        seed: Some(seed),
        inputs: l.inputs,
        text: None,
    })
}

pub fn verify(problem: &Path, roots: &Path) -> Result<Outcome, CliError> {
    let (l, configs) = load_with_roots(problem, roots)?;
    let ops = hamiltonians(&l.problem)?;
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for (k, c) in configs.iter().enumerate() {
        let rep = match verify_eigen_with(&l.problem, &ops, c) {
            Err(Error::ZeroVector) => {
                checks.push(Check::flag(format!("config{k}.nonzero_vector"), false));
                reports.push(json!({ "configuration": c, "error": Error::ZeroVector.to_string() }));
                continue;
            }
            r => r?,
        };
        checks.push(Check::below(format!("config{k}.eigen_residual"), rep.residual, EIGEN_TOLERANCE));
        for &mu in &rep.mu {
            rows.push((rows.len(), mu, rep.residual));
        }
        reports.push(json!({ "configuration": c, "report": rep }));
    }
    Ok(Outcome {
        result: json!({ "verifications": reports }),
        checks,
        tables: vec![Table { name: "eigenvalues".into(), rows }],
        inputs: l.inputs,
        ..Outcome::default()
    })
}

pub fn audit(problem: &Path, seed: u64) -> Result<Outcome, CliError> {
    let l = load(problem)?;
    let params = AuditParams { solver: solver_params(&l.file, None, seed, None), ..AuditParams::default() };
    let rep = completeness_audit(&l.problem, &params)?;
    let mut checks: Vec<Check> = rep
        .sectors
        .iter()
        .map(|s| Check::flag(format!("m{}.matched {}/{}", s.m, s.matched, s.dimension), s.matched == s.dimension))
        .collect();
    checks.push(Check::flag("complete", rep.complete));
    let all: Vec<BetheConfiguration> = rep.sectors.iter().flat_map(|s| s.configurations.clone()).collect();
    Ok(Outcome {
        result: to_value(&rep),
        checks,
        tables: vec![roots_table(&all)],
        seed: Some(seed),
        inputs: l.inputs,
        text: None,
    })
}

pub fn pm(m: usize) -> Outcome {
    let p = pm_polynomial(m);
    let text = p.to_string();
    Outcome {
        result: json!({
            "m": m,
            "polynomial": text,
            "weighted_degree": p.weighted_degree(),
            "terms": p.num_terms(),
        }),
        checks: vec![Check::flag("weighted_homogeneous", p.is_weighted_homogeneous())],
        text: Some(text),
        ..Outcome::default()
    }
}

pub fn riccati(q: &Path, depth: usize) -> Result<Outcome, CliError> {
    let text = input::read(q)?;
    let coeffs = input::load_series(q, &text)?;
    if coeffs.is_empty() {
        return Err(CliError::Input(format!("{}: empty series", q.display())));
    }
    let series = LocalSeries::new(coeffs);
    let mut checks = Vec::new();
    let mut branches = Vec::new();
    for (k, branch) in riccati_branches(&series, depth).into_iter().enumerate() {
        match branch {
            Ok(b) => {
                let back = series_miura(&b.chi);
                let err = back
                    .coeffs
                    .iter()
                    .zip(&series.coeffs)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                checks.push(Check::below(format!("branch{k}.roundtrip"), err, RICCATI_TOLERANCE));
                branches.push(json!({ "chi": b.chi.coeffs, "resonance": b.resonance, "roundtrip_error": err }));
            }
            Err(Error::ResonanceObstruction { m, value }) => {
                branches.push(json!({ "obstructed": { "m": m, "value": value } }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome {
        result: json!({ "depth": depth, "branches": branches }),
        checks,
        inputs: vec![(q.display().to_string(), text)],
        ..Outcome::default()
    })
}

pub fn monodromy(problem: &Path, roots: &Path, tol: f64) -> Result<Outcome, CliError> {
    let (l, configs) = load_with_roots(problem, roots)?;
    let options = MonodromyOptions { tolerance: tol, ..MonodromyOptions::default() };
    let mut checks = Vec::new();
    let mut results = Vec::new();
    for (k, c) in configs.iter().enumerate() {
        let (report, explicit) = match l.problem.algebra() {
            Algebra::Sl2 => {
                let report = bethe_monodromy(&l.problem, c, &options)?;
                let (_, explicit) = explicit_solutions(&l.problem, c)?;
                checks.push(Check::below(format!("config{k}.explicit_agreement"), explicit.max_agreement, tol));
                checks.push(Check::below(
                    format!("config{k}.explicit_ode_residual"),
                    explicit.max_ode_residual,
                    EXPLICIT_RESIDUAL_TOLERANCE,
                ));
                (report, Some(explicit))
            }
            Algebra::Sl3 => {
                let fact = sl3_factorization_check(&l.problem, c)?;
                let ode = LinearOde::from_oper(&Oper::ThirdOrder(fact.oper));
                let opts = MonodromyOptions { avoid: c.roots.clone(), ..options.clone() };
                (monodromy_report(&ode, &l.problem.z, &opts)?, None)
            }
        };
        let worst = report
            .loops
            .iter()
            .chain(std::iter::once(&report.infinity))
            .map(|lp| lp.verdict.distance)
            .fold(0.0, f64::max);
        checks.push(Check::below(format!("config{k}.loop_distance"), worst, tol));
        checks.push(Check::below(format!("config{k}.pi1_defect"), report.pi1_defect, tol));
        checks.push(Check::below(format!("config{k}.det_defect"), report.max_det_defect, DETERMINANT_TOLERANCE));
        results.push(json!({ "configuration": c, "monodromy": report, "explicit": explicit }));
    }
    Ok(Outcome { result: json!({ "tolerance": tol, "results": results }), checks, inputs: l.inputs, ..Outcome::default() })
}

pub fn sov(problem: &Path, roots: &Path, cutoff: Option<usize>, gauge: SeparationGauge) -> Result<Outcome, CliError> {
    let (l, configs) = load_with_roots(problem, roots)?;
    let p = &l.problem;
    let weights = p.sl2_weights()?;
    let scale = p.length_scale();
    let samples = circle_samples(p.centroid(), 1.5 * scale, SKLYANIN_SAMPLES, &p.z, 0.1 * scale);
    let sklyanin = sklyanin_identity(p, &samples, Ordering::FE)?;
    let mut checks = vec![Check::below("sklyanin_identity", sklyanin, SKLYANIN_TOLERANCE)];
    let mut results = Vec::new();
    for (k, c) in configs.iter().enumerate() {
        let mu = match gauge {
            SeparationGauge::FiniteDimensional => eigenvalues_from_roots(p, c)?.mu,
            SeparationGauge::Verma => {
                let kappa: Vec<f64> = weights.iter().map(|&w| gauge.kappa(w)).collect();
                eigen_package(p, &kappa, &c.roots, 0.0)?.mu
            }
        };
        let sep = separated_residual(p, &mu, &c.roots, gauge)?;
        checks.push(Check::below(format!("config{k}.separated_residual"), sep.max_residual, SEPARATED_TOLERANCE));
        let mut shifted = mu.clone();
        if shifted.len() >= 2 {
            shifted[0] += PERTURBATION;
            shifted[1] -= PERTURBATION;
        }
        let perturbed = separated_residual(p, &shifted, &c.roots, gauge)?;
        checks.push(Check::above(format!("config{k}.perturbed_residual"), perturbed.max_residual, PERTURBED_FLOOR));
        let cut = cutoff.or(l.file.solver.depth).unwrap_or(c.roots.len() + 2);
        let prop = verma_proportionality(p, c, cut)?;
        checks.push(Check::below(format!("config{k}.proportionality"), prop.deviation, PROPORTIONALITY_TOLERANCE));
        let constant_error = (prop.constant - prop.predicted_constant).norm() / prop.predicted_constant.norm();
        checks.push(Check::below(format!("config{k}.constant"), constant_error, PROPORTIONALITY_TOLERANCE));
        results.push(json!({
            "configuration": c,
            "mu": mu,
            "separated": sep,
            "perturbed_residual": perturbed.max_residual,
            "proportionality": prop,
        }));
    }
    Ok(Outcome {
        result: json!({ "gauge": gauge, "sklyanin_deviation": sklyanin, "sklyanin_samples": samples, "results": results }),
        checks,
        inputs: l.inputs,
        ..Outcome::default()
    })
}

pub fn sl3(problem: &Path, roots: &Path, seed: u64) -> Result<Outcome, CliError> {
    let (l, configs) = load_with_roots(problem, roots)?;
    let mut checks = Vec::new();
    let mut results = Vec::new();
    for (k, c) in configs.iter().enumerate() {
        let fact = sl3_factorization_check(&l.problem, c)?;
        let oracle = sl3_oracle_match(&l.problem, &fact, &c.colors, seed)?;
        checks.push(Check::below(format!("config{k}.bethe_residual"), c.residual, BETHE_RESIDUAL_TOLERANCE));
        checks.push(Check::below(
            format!("config{k}.root_residue"),
            fact.max_root_residue,
            gaudinlab::oper::sl3::FACTORIZATION_TOLERANCE,
        ));
        checks.push(Check::flag(format!("config{k}.oracle_match"), oracle.matched));
        results.push(json!({ "configuration": c, "factorization": fact, "oracle": oracle }));
    }
    Ok(Outcome { result: json!({ "results": results }), checks, seed: Some(seed), inputs: l.inputs, text: None, tables: vec![] })
}

pub struct TqArgs<'a> {
    pub num: &'a str,
    pub den: &'a str,
    pub q: &'a str,
    pub lattice: usize,
    pub z0: &'a str,
}

pub fn tq(args: &TqArgs) -> Result<Outcome, CliError> {
    let data = QMiuraData {
        q: input::parse_complex(args.q)?,
        numerator: input::parse_coefficients(args.num)?,
        denominator: input::parse_coefficients(args.den)?,
        z0: input::parse_complex(args.z0)?,
        length: args.lattice,
    };
    if data.q.norm() == 0.0 || data.z0.norm() == 0.0 {
        return Err(CliError::Input("q and z0 must be nonzero".into()));
    }
    let rep = qmiura_tq(&data, [C64::new(1.0, 0.0), C64::new(0.3, -0.2)])?;
    let rows = rep.q_values.iter().enumerate().map(|(k, &v)| (k, v, rep.relative_residual)).collect();
    Ok(Outcome {
        checks: vec![Check::below("tq_residual", rep.relative_residual, TQ_TOLERANCE)],
        result: json!({ "data": data, "report": rep }),
        tables: vec![Table { name: "q_values".into(), rows }],
        ..Outcome::default()
    })
}
