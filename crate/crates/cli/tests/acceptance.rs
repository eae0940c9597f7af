//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use gaudinlab::bethe::{completeness_audit, eigenvalues_from_roots, solve, verify_eigen, AuditParams, BetheConfiguration, SolverParams};
use gaudinlab::gaudin::{diagonalize_sector, hamiltonian_sum, hamiltonians, GaudinProblem};
use gaudinlab::monodromy::{bethe_monodromy, resonant_local_monodromy, MonodromyOptions};
use gaudinlab::oper::{
    pm_polynomial, qmiura_tq, riccati_branches, series_miura, sl3_factorization_check, sl3_oracle_match, LocalSeries,
    QMiuraData,
};
use gaudinlab::repcore::Weight;
use gaudinlab::sov::{separated_residual, sklyanin_identity, verma_proportionality, Ordering, SeparationGauge};
use gaudinlab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_complex(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    c(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gaudinlab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gaudinlab")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf8 report"))
}

fn problem_json(p: &GaudinProblem) -> String {
    let sites: Vec<Value> = p
        .z
        .iter()
        .zip(&p.weights)
        .map(|(z, w)| serde_json::json!({ "z": [z.re, z.im], "weight": w }))
        .collect();
    serde_json::json!({ "algebra": p.algebra(), "sites": sites }).to_string()
}

fn write_problem(dir: &Path, name: &str, p: &GaudinProblem) -> String {
    let path = dir.join(name);
    std::fs::write(&path, problem_json(p)).unwrap();
    path.display().to_string()
}

/// The three desk-scale sl2 problems.
fn desk_problems() -> Vec<(&'static str, GaudinProblem)> {
    vec![
        ("N=2 (1,1)", GaudinProblem::sl2(&[c(0.0, 0.0), c(1.0, 0.0)], &[1, 1]).unwrap()),
        ("N=3 (1,1,1)", GaudinProblem::sl2(&[c(0.0, 0.0), c(1.0, 0.3), c(-0.4, 0.9)], &[1, 1, 1]).unwrap()),
        ("N=2 (2,2)", GaudinProblem::sl2(&[c(0.0, 0.0), c(1.0, 0.0)], &[2, 2]).unwrap()),
    ]
}

fn random_problem(rng: &mut ChaCha8Rng, max_sites: usize, max_weight: u32) -> GaudinProblem {
    let n = rng.gen_range(2..=max_sites);
    let mut z: Vec<C64> = Vec::new();
    while z.len() < n {
        let p = random_complex(rng, 2.0);
        if z.iter().all(|q| (p - q).norm() > 0.2) {
            z.push(p);
        }
    }
    let w: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
    GaudinProblem::sl2(&z, &w).unwrap()
}

fn commuting_family() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = random_problem(&mut rng, 4, 3);
        let ops = hamiltonians(&p).map_err(|e| e.to_string())?;
        let hs = &ops.hamiltonians;
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                worst = worst.max(hs[i].commutator(&hs[j]).frobenius() / (hs[i].frobenius() * hs[j].frobenius()));
            }
        }
        ensure(ops.formal_sum_vanishes(), || "pair coefficients do not cancel".into())?;
        let sum = hamiltonian_sum(&ops).max_abs();
        ensure(sum < 1e-12 * ops.spectral_scale(), || format!("|sum H_i| = {sum:e}"))?;
    }
    ensure(worst < 1e-11, || format!("max relative commutator {worst:e}"))?;
    Ok(format!("20 problems, max relative commutator {worst:.1e}"))
}

/// Configurations of every sector from `bethe solve`, filtered to residual
/// below 1e-12 and checked with verify_eigen.
fn bethe_eigenvectors(dir: &Path, verified: &mut Vec<(GaudinProblem, BetheConfiguration)>) -> Outcome {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (k, (name, p)) in desk_problems().into_iter().enumerate() {
        let file = write_problem(dir, &format!("desk{k}.json"), &p);
        let total: u32 = p.sl2_weights().unwrap().iter().sum();
        for m in 0..=(total / 2) as usize {
            let m_arg = m.to_string();
            let (code, stdout) = gaudinlab(&["bethe", "solve", "--problem", &file, "--m", &m_arg, "--seed", "5"]);
            ensure(code == 0, || format!("{name}: bethe solve --m {m} exited {code}"))?;
            let report: Value = serde_json::from_str(&stdout).map_err(|e| e.to_string())?;
            let configs: Vec<BetheConfiguration> =
                serde_json::from_value(report["result"]["configurations"].clone()).map_err(|e| e.to_string())?;
            for conf in configs.into_iter().filter(|c| c.residual < 1e-12) {
                let r = verify_eigen(&p, &conf).map_err(|e| format!("{name}: {e}"))?;
                ensure(r.residual < 1e-9, || format!("{name} m={m}: eigen residual {:e}", r.residual))?;
                worst = worst.max(r.residual);
                count += 1;
                verified.push((p.clone(), conf));
            }
        }
    }
    ensure(count > 0, || "no configurations".into())?;
    Ok(format!("{count} configurations verified, max residual {worst:.1e}"))
}

fn completeness() -> Outcome {
    let expected: [&[(usize, usize)]; 3] = [&[(0, 1), (1, 1)], &[(0, 1), (1, 2)], &[(0, 1), (1, 1), (2, 1)]];
    let mut lines = Vec::new();
    for ((name, p), expected) in desk_problems().into_iter().zip(expected) {
        let params = AuditParams { solver: SolverParams { seed: 3, ..SolverParams::default() }, ..AuditParams::default() };
        let audit = completeness_audit(&p, &params).map_err(|e| e.to_string())?;
        ensure(audit.complete, || format!("{name}: audit incomplete"))?;
        for &(m, dim) in expected {
            let s = audit.sectors.iter().find(|s| s.m == m).ok_or_else(|| format!("{name}: no sector m={m}"))?;
            ensure(s.dimension == dim && s.matched == dim, || {
                format!("{name} m={m}: dimension {} matched {} expected {dim}", s.dimension, s.matched)
            })?;
            // Independent eigenvalue agreement at 1e-7.
            let oracle = diagonalize_sector(&p, s.sector, 3).map_err(|e| e.to_string())?;
            let mut unmatched = oracle.eigenvalues.clone();
            for conf in &s.configurations {
                let mu = eigenvalues_from_roots(&p, conf).map_err(|e| e.to_string())?.mu;
                if let Some(k) = unmatched
                    .iter()
                    .position(|t| t.iter().zip(&mu).all(|(a, b)| (a - b).norm() < 1e-7))
                {
                    unmatched.remove(k);
                }
            }
            ensure(unmatched.is_empty(), || format!("{name} m={m}: {} oracle states unmatched at 1e-7", unmatched.len()))?;
        }
        lines.push(format!("{name} ok"));
    }
    Ok(lines.join(", "))
}

fn trivial_monodromy(verified: &[(GaudinProblem, BetheConfiguration)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pi1: f64 = 0.0;
    for (p, conf) in verified {
        let rep = bethe_monodromy(p, conf, &MonodromyOptions::default()).map_err(|e| e.to_string())?;
        for l in rep.loops.iter().chain(std::iter::once(&rep.infinity)) {
            worst = worst.max(l.verdict.distance);
            ensure(l.verdict.scalar.im.abs() < 1e-12, || format!("loop scalar {} is not real", l.verdict.scalar))?;
        }
        pi1 = pi1.max(rep.pi1_defect);
    }
    ensure(worst < 1e-6, || format!("loop distance from +-I {worst:e}"))?;
    ensure(pi1 < 1e-6, || format!("pi_1 defect {pi1:e}"))?;
    Ok(format!("{} configurations, max distance {worst:.1e}, pi_1 defect {pi1:.1e}", verified.len()))
}

/// A random regular series: the tail `q_{-k}` is bounded by `2^{-k}` (regular
/// on a disk of radius 2) and both branches `chi_0` keep at least 0.25 from
/// every non-negative integer.
fn regular_series(rng: &mut ChaCha8Rng, depth: usize) -> LocalSeries {
    let near_resonant = |x: C64| x.re > -0.25 && (x - c(x.re.round(), 0.0)).norm() < 0.25;
    loop {
        let chi0 = random_complex(rng, 2.0);
        if near_resonant(chi0) || near_resonant(c(-2.0, 0.0) - chi0) {
            continue;
        }
        let mut coeffs = vec![chi0 * (chi0 + 2.0) / 4.0];
        coeffs.extend((1..=depth as i32).map(|k| random_complex(rng, 0.5f64.powi(k))));
        return LocalSeries::new(coeffs);
    }
}

fn miura_riccati() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let q = regular_series(&mut rng, 16);
        let branches = riccati_branches(&q, 16);
        ensure(branches.len() == 2, || "expected two branches".into())?;
        for b in branches {
            let b = b.map_err(|e| e.to_string())?;
            let back = series_miura(&b.chi);
            for (x, y) in back.coeffs.iter().zip(&q.coeffs) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    ensure(worst < 1e-12, || format!("roundtrip error {worst:e}"))?;

    let p0 = pm_polynomial(0);
    ensure(p0.to_string() == "q_{-1}" && p0 == gaudinlab::poly::Polynomial::var(0), || format!("P_0 = {p0}"))?;
    for m in 0..=6 {
        let p = pm_polynomial(m);
        ensure(p.is_weighted_homogeneous() && p.weighted_degree() == Some(m as u32 + 1), || {
            format!("P_{m} has weighted degree {:?}", p.weighted_degree())
        })?;
    }

    let mut agreements = Vec::new();
    for m in 0..=3 {
        let pm = pm_polynomial(m);
        let mut agree = 0;
        for k in 0..10 {
            let mut qs: Vec<C64> = (0..=m).map(|_| random_complex(&mut rng, 1.0)).collect();
            let vanishing = k % 2 == 0;
            if vanishing {
                // P_m is linear in q_{-m-1} with coefficient 1.
                let value = pm.eval(&qs);
                qs[m] -= value;
            }
            let verdict = resonant_local_monodromy(m, &qs, 1e-6).map_err(|e| e.to_string())?.1;
            if verdict.trivial == vanishing {
                agree += 1;
            }
        }
        agreements.push(format!("m={m}: {agree}/10"));
        ensure(agree == 10, || agreements.join(", "))?;
    }
    Ok(format!("roundtrip {worst:.1e}, P_0 exact, degrees ok, verdicts {}", agreements.join(" ")))
}

fn separation(verified: &[(GaudinProblem, BetheConfiguration)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sklyanin: f64 = 0.0;
    for _ in 0..10 {
        let p = random_problem(&mut rng, 4, 2);
        let samples: Vec<C64> = (0..4)
            .map(|_| loop {
                let t = random_complex(&mut rng, 3.0);
                if p.z.iter().all(|z| (t - z).norm() > 0.1) {
                    break t;
                }
            })
            .collect();
        sklyanin = sklyanin.max(sklyanin_identity(&p, &samples, Ordering::FE).map_err(|e| e.to_string())?);
    }
    ensure(sklyanin < 1e-11, || format!("Sklyanin deviation {sklyanin:e}"))?;

    let (mut worst, mut floor) = (0.0f64, f64::INFINITY);
    for (p, conf) in verified {
        let mu = eigenvalues_from_roots(p, conf).map_err(|e| e.to_string())?.mu;
        let rep = separated_residual(p, &mu, &conf.roots, SeparationGauge::default()).map_err(|e| e.to_string())?;
        worst = worst.max(rep.max_residual);
        let mut shifted = mu.clone();
        shifted[0] += 1e-3;
        shifted[1] -= 1e-3;
        let perturbed = separated_residual(p, &shifted, &conf.roots, SeparationGauge::default()).map_err(|e| e.to_string())?;
        floor = floor.min(perturbed.max_residual);
    }
    ensure(worst < 1e-9, || format!("separated residual {worst:e}"))?;
    ensure(floor > 1e-6, || format!("perturbed residual only {floor:e}"))?;

    let dimer = &desk_problems()[0].1;
    let mut deviation: f64 = 0.0;
    for m in 0..=1 {
        for conf in solve(dimer, m, &SolverParams::default()).map_err(|e| e.to_string())?.configurations {
            let rep = verma_proportionality(dimer, &conf, m + 2).map_err(|e| e.to_string())?;
            deviation = deviation.max(rep.deviation);
        }
    }
    ensure(deviation < 1e-10, || format!("Verma proportionality deviation {deviation:e}"))?;
    Ok(format!(
        "Sklyanin {sklyanin:.1e}, separated {worst:.1e}, perturbed >= {floor:.1e}, proportionality {deviation:.1e}"
    ))
}

fn sl3_pipeline() -> Outcome {
    let p = GaudinProblem::new(vec![c(0.0, 0.0), c(1.0, 0.5)], vec![Weight::Sl3(1, 0), Weight::Sl3(1, 0)]).unwrap();
    let mut sectors = Vec::new();
    let (mut residue, mut distance) = (0.0f64, 0.0f64);
    for colors in [vec![], vec![1]] {
        let params = SolverParams { colors: Some(colors.clone()), seed: 2, ..SolverParams::default() };
        let out = solve(&p, colors.len(), &params).map_err(|e| e.to_string())?;
        ensure(out.configurations.len() == 1, || format!("colors {colors:?}: {} solutions", out.configurations.len()))?;
        for conf in &out.configurations {
            let fact = sl3_factorization_check(&p, conf).map_err(|e| e.to_string())?;
            residue = residue.max(fact.max_root_residue);
            let m = sl3_oracle_match(&p, &fact, &conf.colors, 2).map_err(|e| e.to_string())?;
            ensure(m.oracle_dimension == 1, || format!("sector {} has dimension {}", m.sector, m.oracle_dimension))?;
            distance = distance.max(m.distance);
            sectors.push(m.sector.to_string());
        }
    }
    ensure(residue < 1e-10, || format!("root residue {residue:e}"))?;
    ensure(distance < 1e-7, || format!("oracle distance {distance:e}"))?;
    Ok(format!("sectors {}, root residue {residue:.1e}, oracle distance {distance:.1e}", sectors.join(" ")))
}

fn tq_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for _ in 0..10 {
        let dn = rng.gen_range(1..=3);
        let dd = rng.gen_range(1..=3);
        let numerator: Vec<C64> = (0..=dn).map(|_| random_complex(&mut rng, 1.0)).collect();
        let denominator: Vec<C64> = (0..=dd).map(|_| random_complex(&mut rng, 1.0)).collect();
        for modulus in [0.5, 0.7, 0.9] {
            let q = C64::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU));
            let data = QMiuraData { q, numerator: numerator.clone(), denominator: denominator.clone(), z0: c(0.7, 0.4), length: 32 };
            let rep = qmiura_tq(&data, [c(1.0, 0.0), c(0.3, -0.2)]).map_err(|e| e.to_string())?;
            worst = worst.max(rep.relative_residual);
            count += 1;
        }
    }
    ensure(worst < 1e-12, || format!("relative residual {worst:e}"))?;
    Ok(format!("{count} runs, max relative residual {worst:.1e}"))
}

fn strip_timing(report: &str) -> Result<String, String> {
    let mut v: Value = serde_json::from_str(report).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("timing");
    Ok(v.to_string())
}

fn determinism(dir: &Path) -> Outcome {
    let file = write_problem(dir, "determinism.json", &desk_problems()[1].1);
    let args = ["bethe", "audit", "--problem", file.as_str(), "--seed", "11"];
    let (c1, a) = gaudinlab(&args);
    let (c2, b) = gaudinlab(&args);
    ensure(c1 == 0 && c2 == 0, || format!("exit codes {c1}, {c2}"))?;
    let lines = |s: &str| s.lines().filter(|l| !l.contains("wall_seconds")).map(str::to_owned).collect::<Vec<_>>();
    ensure(lines(&a) == lines(&b), || "raw reports differ outside timing".into())?;
    ensure(strip_timing(&a)? == strip_timing(&b)?, || "reports differ".into())?;
    Ok(format!("{} bytes identical outside timing", a.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut verified = Vec::new();
    let mut failures = 0;
    let mut run = |n: usize, name: &str, limit: f64, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|d| {
            if secs < limit {
                Ok(d)
            } else {
                Err(format!("{d}; took {secs:.1} s, limit {limit} s"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {n} {name}: {detail} ({secs:.2} s)"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {n} {name}: {detail} ({secs:.2} s)");
            }
        }
    };
    run(1, "commuting family", 10.0, &mut commuting_family);
    run(2, "Bethe roots give eigenvectors", 30.0, &mut || bethe_eigenvectors(dir.path(), &mut verified));
    run(3, "completeness at desk scale", 60.0, &mut completeness);
    run(4, "trivial monodromy", 60.0, &mut || trivial_monodromy(&verified));
    run(5, "Miura and Riccati", 120.0, &mut miura_riccati);
    run(6, "separation of variables", 30.0, &mut || separation(&verified));
    run(7, "sl3 pipeline", 60.0, &mut sl3_pipeline);
    run(8, "TQ identity", 5.0, &mut tq_identity);
    run(9, "determinism", f64::INFINITY, &mut || determinism(dir.path()));
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
