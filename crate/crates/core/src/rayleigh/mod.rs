//! Rayleigh surface waves on the (001) face of cubic crystals.
//!
//! Depth is measured into the crystal; partial waves decay as `e^{-q k z}`.
//! Along [110] the sagittal problem reduces to a real cubic in
//! `X = ρc²/c11`; arbitrary in-plane directions go through the full 3×3
//! Christoffel system (see [`general`]).

mod general;
mod piezo;

pub use general::{boundary_det, default_window, isotropic_rayleigh_ratio, solve_general, GeneralModeSolution};
pub use piezo::{piezo_profile, PiezoFieldProfile};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::materials::MaterialRecord;
use crate::poly;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayleighSolution {
    pub v_s: f64,
    #[serde(rename = "X")]
    pub x: f64,
    pub q: Complex64,
    pub gamma: Complex64,
    pub phi: f64,
    pub material_name: String,
    c11: f64,
    c12: f64,
    c44: f64,
}

/// Dimensionless [110] coefficients `(a, b, r)` with `a = c11/c44`.
fn cubic_params(c11: f64, c12: f64, c44: f64) -> (f64, f64, f64) {
    let cp = c11_prime(c11, c12, c44);
    (c11 / c44, (c11 * cp - c12 * c12) / (c11 * c11), cp / c11)
}

fn c11_prime(c11: f64, c12: f64, c44: f64) -> f64 {
    0.5 * (c11 + c12 + 2.0 * c44)
}

/// Ascending coefficients of `(1 − aX)(b − X)² − X²(r − X)`.
fn velocity_cubic(c11: f64, c12: f64, c44: f64) -> [f64; 4] {
    let (a, b, r) = cubic_params(c11, c12, c44);
    [b * b, -2.0 * b - a * b * b, 1.0 + 2.0 * a * b - r, 1.0 - a]
}

fn relative_residual(c: &[f64], x: f64) -> f64 {
    let scale: f64 = c
        .iter()
        .enumerate()
        .map(|(i, a)| a.abs() * x.abs().powi(i as i32))
        .sum();
    poly::eval_real(c, x).abs() / scale
}

/// Secular quadratic in `Q = q²` at `ρc² = rc2`, ascending coefficients.
fn secular_coeffs(c11: f64, c12: f64, c44: f64, rc2: f64) -> [f64; 3] {
    let cp = c11_prime(c11, c12, c44);
    let s = c12 + c44;
    [
        (cp - rc2) * (c44 - rc2),
        -(cp - rc2) * c11 - c44 * (c44 - rc2) + s * s,
        c44 * c11,
    ]
}

fn elastic(m: &MaterialRecord) -> Result<(f64, f64, f64)> {
    m.elastic().ok_or_else(|| Error::MissingElastic(m.name.clone()))
}

/// Positive real roots `X` of the [110] velocity cubic, ascending.
pub fn x_roots_110(m: &MaterialRecord) -> Result<Vec<f64>> {
    let (c11, c12, c44) = elastic(m)?;
    let cubic = velocity_cubic(c11, c12, c44);
    let xs: Vec<f64> = poly::real_roots(&cubic)?.into_iter().filter(|&x| x > 0.0).collect();
    if xs.is_empty() {
        return Err(Error::Solver(format!("no positive real velocity root for {}", m.name)));
    }
    Ok(xs)
}

/// All phase-velocity branches along [110], ascending [m/s].
pub fn velocity_branches_110(m: &MaterialRecord) -> Result<Vec<f64>> {
    let (c11, _, _) = elastic(m)?;
    Ok(x_roots_110(m)?
        .into_iter()
        .map(|x| (x * c11 / m.density).sqrt())
        .collect())
}

/// Decay roots `q` (principal square roots of the secular roots in `q²`).
pub fn secular_roots_110(m: &MaterialRecord, x: f64) -> Result<[Complex64; 2]> {
    let (c11, c12, c44) = elastic(m)?;
    let c = secular_coeffs(c11, c12, c44, x * c11);
    let cc: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let r = poly::roots(&cc)?;
    if r.len() != 2 {
        return Err(Error::Solver("degenerate secular equation".into()));
    }
    Ok([r[0].sqrt(), r[1].sqrt()])
}

/// Surface-wave solution on the lowest branch with strictly decaying roots.
pub fn solve_110(m: &MaterialRecord) -> Result<RayleighSolution> {
    let (c11, c12, c44) = elastic(m)?;
    for x in x_roots_110(m)? {
        let roots = secular_roots_110(m, x)?;
        let Some(q) = roots
            .into_iter()
            .filter(|q| q.re > 1e-9)
            .max_by(|a, b| a.im.total_cmp(&b.im))
        else {
            continue;
        };
        let rc2 = x * c11;
        let gamma = (c12 + c44) * q / (c44 - c11 * q * q - rc2);
        let denom = gamma - q;
        if denom.norm() < 1e-12 * q.norm() {
            return Err(Error::Solver("degenerate case γ = q in phase relation".into()));
        }
        let ratio = -(gamma.conj() - q.conj()) / denom;
        let phi = (-ratio.arg() / 2.0).rem_euclid(std::f64::consts::PI);
        return Ok(RayleighSolution {
            v_s: (rc2 / m.density).sqrt(),
            x,
            q,
            gamma,
            phi,
            material_name: m.name.clone(),
            c11,
            c12,
            c44,
        });
    }
    Err(Error::RootSelection(format!(
        "no [110] branch of {} has a root with Re q > 0",
        m.name
    )))
}

impl RayleighSolution {
    pub fn alpha(&self) -> f64 {
        self.q.re
    }

    pub fn beta(&self) -> f64 {
        self.q.im
    }

    /// Relative residual of the velocity cubic at `X`.
    pub fn cubic_residual(&self) -> f64 {
        relative_residual(&velocity_cubic(self.c11, self.c12, self.c44), self.x)
    }

    /// Relative residual of the secular equation at `(X, q)`.
    pub fn secular_residual(&self) -> f64 {
        let c = secular_coeffs(self.c11, self.c12, self.c44, self.x * self.c11);
        let qq = self.q * self.q;
        let p = c[0] + c[1] * qq + c[2] * qq * qq;
        let scale = c[0].abs() + c[1].abs() * qq.norm() + c[2].abs() * qq.norm_sqr();
        p.norm() / scale
    }

    /// `|e^{-2iφ} + (γ*−q*)/(γ−q)|`.
    pub fn phase_residual(&self) -> f64 {
        let lhs = Complex64::from_polar(1.0, -2.0 * self.phi);
        (lhs + (self.gamma.conj() - self.q.conj()) / (self.gamma - self.q)).norm()
    }

    /// Stress-free boundary matrix (rows T_zx, T_zz; columns q, q*), scaled by c11.
    pub fn boundary_matrix(&self) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        let r44 = self.c44 / self.c11;
        let r12 = self.c12 / self.c11;
        let (q, g) = (self.q, self.gamma);
        let (qc, gc) = (q.conj(), g.conj());
        [
            [r44 * (g - q), r44 * (gc - qc)],
            [i * (r12 + q * g), i * (r12 + qc * gc)],
        ]
    }

    pub fn boundary_det(&self) -> f64 {
        let b = self.boundary_matrix();
        (b[0][0] * b[1][1] - b[0][1] * b[1][0]).norm()
    }

    /// Depth profiles `(χ₀, ζ₀)` at `s = kz`: the amplitudes of `u_x'` and `u_z`
    /// in units of `U`.
    pub fn profile(&self, s: f64) -> (f64, f64) {
        let e = (-self.q * s - Complex64::i() * self.phi).exp();
        (2.0 * e.re, 2.0 * (self.gamma * e).re)
    }

    /// Normalization integral `∫₀^40 (χ₀² + ζ₀²) ds`.
    pub fn depth_norm_integral(&self) -> Result<f64> {
        crate::quad::integrate(
            |s| {
                let (a, b) = self.profile(s);
                a * a + b * b
            },
            0.0,
            40.0,
            1e-9,
            1e-14,
        )
    }
}

/// Physical displacement `(u_x', u_z)` in units of `U` at depth `kz`,
/// position `kx` and phase `ωt`.
pub fn displacement_110(sol: &RayleighSolution, kz: f64, kx: f64, t_phase: f64) -> (f64, f64) {
    let (chi, zeta) = sol.profile(kz);
    let theta = kx - t_phase;
    (chi * theta.cos(), zeta * theta.sin())
}

/// Field decay `e^{-kd}` into the vacuum above the surface.
pub fn vacuum_decay(k: f64, d: f64) -> f64 {
    (-k * d).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocitySource {
    /// Tabulated surface velocity for a standard cut.
    Measured,
    /// Lowest [110] Rayleigh branch.
    Rayleigh110,
    /// Bulk shear velocity; overestimates v_s, so U₀ comes out conservative.
    ShearFallback,
}

/// Phase velocity used for zero-point and cavity estimates.
pub fn phase_velocity(m: &MaterialRecord) -> Result<(f64, VelocitySource)> {
    if let Some(v) = m.saw_velocity {
        return Ok((v, VelocitySource::Measured));
    }
    if m.elastic().is_some() {
        return Ok((solve_110(m)?.v_s, VelocitySource::Rayleigh110));
    }
    match m.shear_velocity {
        Some(v) => Ok((v, VelocitySource::ShearFallback)),
        None => Err(Error::MissingVelocity(m.name.clone())),
    }
}
