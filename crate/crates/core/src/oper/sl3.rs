//! sl3 opers from colored Bethe roots: the third-order Miura expansion and
//! the cancellation of its poles at the roots.

use serde::{Deserialize, Serialize};

use crate::bethe::{BetheConfiguration, BetheSystem, MATCH_TOLERANCE};
use crate::error::{Error, Result};
use crate::gaudin::{diagonalize_sector_with, hamiltonians, GaudinProblem};
use crate::linalg::C64;
use crate::repcore::{Algebra, Weight};

use super::{miura_expand, MiuraConnection, ThirdOrderOper};

/// Principal parts at a root below this size count as cancelled.
pub const FACTORIZATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootResidues {
    pub root: C64,
    pub color: usize,
    /// Largest principal-part coefficient of `q1` at the root.
    pub q1: f64,
    /// Largest principal-part coefficient of `q2` at the root.
    pub q2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sl3FactorizationReport {
    pub oper: ThirdOrderOper,
    pub roots: Vec<RootResidues>,
    pub max_root_residue: f64,
    pub bethe_residuals: Vec<C64>,
    /// `max_j |res_{w_j} q1 + F_j|`: the simple pole of `q1` at a root is
    /// minus the corresponding Bethe equation.
    pub bethe_agreement: f64,
    pub factorizes: bool,
}

/// Expands the diagonal connection of colored roots into a third-order
/// oper and measures whether its poles at the roots cancel.
pub fn sl3_factorization_check(problem: &GaudinProblem, config: &BetheConfiguration) -> Result<Sl3FactorizationReport> {
    problem.validate()?;
    if problem.algebra() != Algebra::Sl3 {
        return Err(Error::UnsupportedAlgebra("sl2 in the sl3 factorization check"));
    }
    if let Some(&c) = config.colors.iter().find(|&&c| c != 1 && c != 2) {
        return Err(Error::UnsupportedColor(c));
    }
    let system = BetheSystem::for_problem(problem);
    let bethe_residuals = system.residuals(&config.roots, &config.colors)?;
    let conn = MiuraConnection::sl3(&problem.z, &problem.weights, &config.roots, &config.colors)?;
    let expansion = miura_expand(&conn)?;
    let (q1, q2) = (expansion.q1(), expansion.q2());
    let scale = problem.length_scale();
    let roots: Vec<RootResidues> = config
        .roots
        .iter()
        .zip(&config.colors)
        .map(|(&w, &color)| RootResidues {
            root: w,
            color,
            q1: q1.principal_magnitude(w) * scale,
            q2: q2.principal_magnitude(w) * scale * scale,
        })
        .collect();
    let max_root_residue = roots.iter().map(|r| r.q1.max(r.q2)).fold(0.0, f64::max);
    let bethe_agreement = config
        .roots
        .iter()
        .zip(&bethe_residuals)
        .map(|(&w, f)| (q1.residue(w) + f).norm() * scale)
        .fold(0.0, f64::max);
    Ok(Sl3FactorizationReport {
        oper: ThirdOrderOper::from_coefficients(&problem.z, q1, q2),
        roots,
        max_root_residue,
        bethe_residuals,
        bethe_agreement,
        factorizes: max_root_residue < FACTORIZATION_TOLERANCE,
    })
}

/// Highest weight of the sector reached by lowering the total weight once
/// per root along the simple root of its color.
pub fn sl3_sector(problem: &GaudinProblem, colors: &[usize]) -> Result<Weight> {
    let mut labels = [0i64; 2];
    for w in &problem.weights {
        let l = w.labels();
        labels[0] += l[0];
        labels[1] += l[1];
    }
    for &c in colors {
        // alpha_1 = (2, -1), alpha_2 = (-1, 2) in Dynkin labels.
        match c {
            1 => {
                labels[0] -= 2;
                labels[1] += 1;
            }
            2 => {
                labels[0] += 1;
                labels[1] -= 2;
            }
            other => return Err(Error::UnsupportedColor(other)),
        }
    }
    if labels.iter().any(|&l| l < 0) {
        return Err(Error::InvalidProblem(format!("roots lower past a dominant weight: ({}, {})", labels[0], labels[1])));
    }
    Ok(Weight::Sl3(labels[0] as u32, labels[1] as u32))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sl3OracleMatch {
    pub sector: Weight,
    pub oracle_dimension: usize,
    /// `min` over oracle tuples of `max_i |mu_i - oracle_i|`.
    pub distance: f64,
    pub matched: bool,
}

/// Compares the `q1` residues of a factorization report with the joint
/// spectrum of the Gaudin hamiltonians on the corresponding sector.
pub fn sl3_oracle_match(problem: &GaudinProblem, report: &Sl3FactorizationReport, colors: &[usize], seed: u64) -> Result<Sl3OracleMatch> {
    let sector = sl3_sector(problem, colors)?;
    let ops = hamiltonians(problem)?;
    let spectrum = diagonalize_sector_with(problem, &ops, sector, seed)?;
    let distance = spectrum
        .eigenvalues
        .iter()
        .map(|t| t.iter().zip(&report.oper.mu).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    Ok(Sl3OracleMatch {
        sector,
        oracle_dimension: spectrum.dimension,
        distance,
        matched: distance <= MATCH_TOLERANCE * ops.spectral_scale().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{solve, SolverParams};
    use crate::oper::{sl3_central_values, sl3_diagonal};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn defining_pair() -> GaudinProblem {
        GaudinProblem::new(vec![c(0.0, 0.0), c(1.0, 0.5)], vec![Weight::Sl3(1, 0); 2]).unwrap()
    }

    #[test]
    fn vacuum_factorizes_with_central_values() {
        let p = defining_pair();
        let rep = sl3_factorization_check(&p, &BetheConfiguration::colored(vec![], vec![])).unwrap();
        assert!(rep.factorizes);
        let (c1, c2) = sl3_central_values(sl3_diagonal(Weight::Sl3(1, 0)));
        for i in 0..2 {
            assert!((rep.oper.c1[i] - c1).norm() < 1e-14);
            assert!((rep.oper.c2[i] - c2).norm() < 1e-14);
        }
        // Vacuum eigenvalue of H_1 on Sym^2: (omega_1, omega_1)/(z_1 - z_2).
        assert!((rep.oper.mu[0] - (2.0 / 3.0) / (p.z[0] - p.z[1])).norm() < 1e-14);
    }

    #[test]
    fn solved_roots_factorize_and_perturbed_do_not() {
        let p = defining_pair();
        let params = SolverParams { colors: Some(vec![1]), ..Default::default() };
        let conf = solve(&p, 1, &params).unwrap().configurations.remove(0);
        let rep = sl3_factorization_check(&p, &conf).unwrap();
        assert!(rep.factorizes, "{rep:?}");
        assert!(rep.bethe_agreement < 1e-12);
        let mut bad = conf.clone();
        bad.roots[0] += 1e-3;
        let rep = sl3_factorization_check(&p, &bad).unwrap();
        assert!(!rep.factorizes);
        assert!(rep.max_root_residue > 1e-6);
        assert!(rep.bethe_agreement < 1e-10);
    }

    #[test]
    fn two_colors() {
        // (1,0) (1,0) (1,0): the singlet needs one root of each color.
        let p = GaudinProblem::new(vec![c(0.0, 0.0), c(1.0, 0.3), c(-0.4, 1.1)], vec![Weight::Sl3(1, 0); 3]).unwrap();
        let params = SolverParams { colors: Some(vec![1, 1, 2]), ..Default::default() };
        let out = solve(&p, 3, &params).unwrap();
        assert!(!out.configurations.is_empty());
        for conf in &out.configurations {
            let rep = sl3_factorization_check(&p, conf).unwrap();
            assert!(rep.factorizes, "{rep:?}");
        }
    }

    #[test]
    fn residues_match_the_oracle() {
        let p = defining_pair();
        let vacuum = BetheConfiguration::colored(vec![], vec![]);
        let rep = sl3_factorization_check(&p, &vacuum).unwrap();
        let m = sl3_oracle_match(&p, &rep, &[], 3).unwrap();
        assert_eq!(m.sector, Weight::Sl3(2, 0));
        assert!(m.matched, "{m:?}");
        let params = SolverParams { colors: Some(vec![1]), ..Default::default() };
        let conf = solve(&p, 1, &params).unwrap().configurations.remove(0);
        let rep = sl3_factorization_check(&p, &conf).unwrap();
        let m = sl3_oracle_match(&p, &rep, &conf.colors, 3).unwrap();
        assert_eq!(m.sector, Weight::Sl3(0, 1));
        assert!(m.matched, "{m:?}");
        assert!(matches!(sl3_sector(&p, &[2]), Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn non_simple_colors_rejected() {
        let p = defining_pair();
        let conf = BetheConfiguration::colored(vec![c(0.5, 0.0)], vec![3]);
        assert!(matches!(sl3_factorization_check(&p, &conf), Err(Error::UnsupportedColor(3))));
    }
}
