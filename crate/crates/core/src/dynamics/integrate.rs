//! Dormand–Prince 5(4) integrator for complex state vectors.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step relative to the integration span.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-11,
            h_min: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (fifth minus fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` through the increasing `grid`, calling `observe`
/// at every grid point (including the first). Steps never straddle a grid
/// point, so discontinuities in `f` should be listed in the grid.
pub fn dopri5<F, O>(
    mut f: F,
    y0: &[Complex64],
    grid: &[f64],
    tol: Tolerance,
    mut observe: O,
) -> Result<(Vec<Complex64>, StepStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    O: FnMut(f64, &[Complex64]),
{
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "time grid must be finite and non-decreasing".into(),
        ));
    }
    let n = y0.len();
    let z = Complex64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut k: [Vec<Complex64>; 7] = std::array::from_fn(|_| vec![z; n]);
    let mut tmp = vec![z; n];
    let mut y_new = vec![z; n];
    let mut stats = StepStats::default();

    let mut t = grid[0];
    observe(t, &y);
    f(t, &y, &mut k[0]);
    stats.rhs_evals += 1;
    let span = grid[grid.len() - 1] - t;
    let mut h = initial_step(&y, &k[0], tol, span);

    for &t_next in &grid[1..] {
        while t < t_next {
            if stats.accepted + stats.rejected >= tol.max_steps {
                return Err(Error::Integration(format!("step budget exhausted at t = {t:.6e}")));
            }
            let remaining = t_next - t;
            let last = h >= remaining;
            let hs = if last { remaining } else { h };

            for i in 0..n {
                tmp[i] = y[i] + k[0][i] * (hs * A21);
            }
            f(t + C2 * hs, &tmp, &mut k[1]);
            for i in 0..n {
                tmp[i] = y[i] + (k[0][i] * A31 + k[1][i] * A32) * hs;
            }
            f(t + C3 * hs, &tmp, &mut k[2]);
            for i in 0..n {
                tmp[i] = y[i] + (k[0][i] * A41 + k[1][i] * A42 + k[2][i] * A43) * hs;
            }
            f(t + C4 * hs, &tmp, &mut k[3]);
            for i in 0..n {
                tmp[i] = y[i] + (k[0][i] * A51 + k[1][i] * A52 + k[2][i] * A53 + k[3][i] * A54) * hs;
            }
            f(t + C5 * hs, &tmp, &mut k[4]);
            for i in 0..n {
                tmp[i] = y[i] + (k[0][i] * A61 + k[1][i] * A62 + k[2][i] * A63 + k[3][i] * A64 + k[4][i] * A65) * hs;
            }
            f(t + hs, &tmp, &mut k[5]);
            for i in 0..n {
                y_new[i] = y[i] + (k[0][i] * B1 + k[2][i] * B3 + k[3][i] * B4 + k[4][i] * B5 + k[5][i] * B6) * hs;
            }
            f(t + hs, &y_new, &mut k[6]);
            stats.rhs_evals += 6;

            let mut err = 0.0f64;
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * hs;
                let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                let r = e.norm() / sc;
                if r.is_nan() {
                    err = f64::NAN;
                    break;
                }
                err = err.max(r);
            }
            if !err.is_finite() {
                return Err(Error::Integration(format!("non-finite state at t = {t:.6e}")));
            }

            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { t_next } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a step shortened to hit the grid says nothing about the natural size
                h = if last { h.max(hs * fac) } else { hs * fac };
            } else {
                stats.rejected += 1;
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h < tol.h_min * span {
                    return Err(Error::Integration(format!("step size underflow at t = {t:.6e}")));
                }
            }
        }
        observe(t, &y);
    }
    Ok((y, stats))
}

fn initial_step(y: &[Complex64], dy: &[Complex64], tol: Tolerance, span: f64) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for (a, b) in y.iter().zip(dy) {
        let sc = tol.atol + tol.rtol * a.norm();
        d0 = d0.max(a.norm() / sc);
        d1 = d1.max(b.norm() / sc);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    if span > 0.0 {
        h.min(span)
    } else {
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        let lam = Complex64::new(-0.7, 3.0);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let mut seen = Vec::new();
        let (y, stats) = dopri5(
            |_, y, dy| dy[0] = lam * y[0],
            &[Complex64::new(1.0, 0.0)],
            &grid,
            Tolerance::default(),
            |t, y| seen.push((t, y[0])),
        )
        .unwrap();
        assert_eq!(seen.len(), grid.len());
        for (t, v) in &seen {
            let exact = (lam * *t).exp();
            assert!((v - exact).norm() < 1e-7, "t = {t}");
        }
        assert!((y[0] - (lam * 5.0).exp()).norm() < 1e-7);
        assert!(stats.accepted > 10 && stats.rhs_evals == 1 + 6 * (stats.accepted + stats.rejected));
    }

    #[test]
    fn rejects_bad_grid() {
        let r = dopri5(
            |_, _, _| {},
            &[Complex64::new(1.0, 0.0)],
            &[1.0, 0.0],
            Tolerance::default(),
            |_, _| {},
        );
        assert!(r.is_err());
    }

    #[test]
    fn step_underflow_on_blowup() {
        let tol = Tolerance {
            h_min: 1e-6,
            ..Tolerance::default()
        };
        let r = dopri5(
            |_, y, dy| dy[0] = y[0] * y[0] * y[0].norm(),
            &[Complex64::new(1.0, 0.0)],
            &[0.0, 2.0],
            tol,
            |_, _| {},
        );
        assert!(matches!(r, Err(Error::Integration(_))));
    }
}
