//! Embedded Dormand-Prince 5(4) integrator for complex first-order systems
//! `y'(s) = f(s, y)` on a real parameter interval.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, max_steps: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Sum of the local error estimates of accepted steps (max norm).
    pub error_estimate: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Dopri5 {
    /// Integrates from `s0` to `s1` (either direction). On step underflow
    /// the error carries the parameter value `s` as its real part.
    pub fn integrate<F>(&self, f: F, s0: f64, s1: f64, y0: Vec<C64>, stats: &mut IntegrationStats) -> Result<Vec<C64>>
    where
        F: Fn(f64, &[C64]) -> Vec<C64>,
    {
        let span = s1 - s0;
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let n = y0.len();
        let mut s = s0;
        let mut y = y0;
        let mut h = span / 64.0;
        let mut k1 = f(s, &y);
        let mut steps = 0;
        let min_step = 1e-14 * span.abs();
        while (s1 - s) * dir > 0.0 {
            if steps >= self.max_steps {
                return Err(Error::StepLimit(self.max_steps));
            }
            steps += 1;
            if (s + h - s1) * dir > 0.0 {
                h = s1 - s;
            }
            let mut k: Vec<Vec<C64>> = Vec::with_capacity(7);
            k.push(k1.clone());
            for stage in 1..7 {
                let yi: Vec<C64> = (0..n)
                    .map(|i| y[i] + (0..stage).map(|j| k[j][i] * (A[stage][j] * h)).sum::<C64>())
                    .collect();
                k.push(f(s + C[stage] * h, &yi));
            }
            // The seventh stage is evaluated at the fifth-order solution.
            let y_new: Vec<C64> = (0..n)
                .map(|i| y[i] + (0..6).map(|j| k[j][i] * (A[6][j] * h)).sum::<C64>())
                .collect();
            let mut err: f64 = 0.0;
            for i in 0..n {
                let e: C64 = (0..7).map(|j| k[j][i] * (E[j] * h)).sum();
                let sc = self.atol + self.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / sc);
            }
            if err <= 1.0 {
                s += h;
                stats.accepted += 1;
                let scale = y_new.iter().map(|v| v.norm()).fold(0.0, f64::max);
                stats.error_estimate += err * (self.atol + self.rtol * scale);
                y = y_new;
                k1 = k.swap_remove(6);
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= if err <= 1.0 { factor } else { factor.min(1.0) };
            if h.abs() < min_step && (s1 - s) * dir > min_step {
                return Err(Error::StepUnderflow(C64::new(s, 0.0)));
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_on_unit_interval() {
        let lam = C64::new(-0.3, 2.0);
        let mut stats = IntegrationStats::default();
        let y = Dopri5::default()
            .integrate(|_, y| vec![y[0] * lam], 0.0, 1.0, vec![C64::new(1.0, 0.0)], &mut stats)
            .unwrap();
        assert!((y[0] - lam.exp()).norm() < 1e-11);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn backward_integration() {
        let mut stats = IntegrationStats::default();
        let y = Dopri5::default()
            .integrate(|s, _| vec![C64::new(s.cos(), 0.0)], 2.0, 0.0, vec![C64::new(0.0, 0.0)], &mut stats)
            .unwrap();
        assert!((y[0].re + 2f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn step_limit() {
        let solver = Dopri5 { max_steps: 3, ..Default::default() };
        let mut stats = IntegrationStats::default();
        let r = solver.integrate(|_, y| vec![y[0] * 50.0], 0.0, 1.0, vec![C64::new(1.0, 0.0)], &mut stats);
        assert!(matches!(r, Err(Error::StepLimit(3))));
    }
}
