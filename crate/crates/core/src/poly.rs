//! Polynomial roots via companion-matrix eigenvalues with Newton polishing.
//!
//! Coefficients are in ascending order: `c[0] + c[1] x + … + c[n] xⁿ`.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

const NEWTON_STEPS: usize = 5;

pub fn eval(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

pub fn eval_real(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn eval_with_derivative(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

/// Multiplies two polynomials.
pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

pub fn scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|&x| x * s).collect()
}

fn trim(c: &[Complex64]) -> &[Complex64] {
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut n = c.len();
    while n > 0 && c[n - 1].norm() <= 1e-14 * scale {
        n -= 1;
    }
    &c[..n]
}

/// Coefficients of `p(x + s)`.
pub fn taylor_shift(c: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut out = c.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = out[j + 1];
            out[j] += s * next;
        }
    }
    out
}

fn companion_eigenvalues(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let eig = Schur::try_new(comp, f64::EPSILON, 500)?.eigenvalues()?;
    Some(eig.iter().copied().collect())
}

/// All complex roots of the polynomial, Newton-polished.
///
/// Spectra symmetric about the origin (e.g. `x² − 1`) can stall unshifted
/// QR; those retry on a shifted copy of the polynomial.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = trim(coeffs);
    if c.is_empty() {
        return Err(Error::Solver("zero polynomial".into()));
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let radius = 1.0 + c[..n].iter().map(|a| (a / c[n]).norm()).fold(0.0, f64::max);
    let shifts = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.137, 0.071) * radius,
        Complex64::new(-0.093, 0.211) * radius,
    ];
    for s in shifts {
        let shifted = taylor_shift(c, s);
        if let Some(eig) = companion_eigenvalues(&shifted) {
            return Ok(eig.into_iter().map(|z| polish(c, z + s)).collect());
        }
    }
    Err(Error::Solver("companion eigenvalues did not converge".into()))
}

fn polish(c: &[Complex64], mut x: Complex64) -> Complex64 {
    for _ in 0..NEWTON_STEPS {
        let (p, dp) = eval_with_derivative(c, x);
        if dp.norm() == 0.0 {
            break;
        }
        let next = x - p / dp;
        if eval(c, next).norm() > p.norm() {
            break;
        }
        x = next;
    }
    x
}

/// Real roots of a real polynomial, ascending.
pub fn real_roots(coeffs: &[f64]) -> Result<Vec<f64>> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut out: Vec<f64> = roots(&c)?
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-9 * z.norm().max(1e-300))
        .map(|z| polish_real(coeffs, z.re))
        .collect();
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

fn polish_real(c: &[f64], mut x: f64) -> f64 {
    for _ in 0..NEWTON_STEPS {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        if dp == 0.0 {
            break;
        }
        let next = x - p / dp;
        if eval_real(c, next).abs() > p.abs() {
            break;
        }
        x = next;
    }
    x
}
