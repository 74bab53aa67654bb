//! Piezoelectric potential accompanying a [110] Rayleigh wave, to first
//! order in the electromechanical coupling.
//!
//! Inside the crystal the potential is `(e14/ε)·U·F(kz)` with
//! `F(s) = 2|A1| e^{-αs} cos(βs + φ + ξ) + A3 e^{-s}`; above the surface it
//! continues as `F(0) e^{-k|z|}`.

use num_complex::Complex64;
use serde::Serialize;

use super::RayleighSolution;
use crate::constants::EPS0;
use crate::error::{Error, Result};
use crate::materials::MaterialRecord;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiezoFieldProfile {
    #[serde(rename = "A1")]
    pub a1: Complex64,
    #[serde(rename = "A3")]
    pub a3: f64,
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub phi: f64,
    pub k: f64,
    /// `e14/ε` in V per metre of displacement amplitude; multiply by `U`
    /// for the potential scale.
    pub phi0_scale: f64,
    pub eps_rel: f64,
}

pub fn piezo_profile(m: &MaterialRecord, sol: &RayleighSolution, k: f64) -> Result<PiezoFieldProfile> {
    if !m.is_piezoelectric() {
        return Err(Error::NotPiezoelectric(m.name.clone()));
    }
    let eps_r = m.eps_min();
    let (q, g, phi) = (sol.q, sol.gamma, sol.phi);
    let a1 = (g - 2.0 * q) / (q * q - 1.0);
    let rot = Complex64::from_polar(1.0, -phi);
    let a3 = -2.0 / (eps_r + 1.0) * (eps_r * phi.cos() + eps_r * (a1 * q * rot).re + (a1 * rot).re);
    Ok(PiezoFieldProfile {
        a1,
        a3,
        alpha: q.re,
        beta: q.im,
        xi: -a1.arg(),
        phi,
        k,
        phi0_scale: m.e14 / (eps_r * EPS0),
        eps_rel: eps_r,
    })
}

impl PiezoFieldProfile {
    /// Dimensionless potential profile at `s = kz`; negative `s` is the vacuum side.
    pub fn f(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.vacuum_amplitude() * s.exp();
        }
        2.0 * self.a1.norm() * (-self.alpha * s).exp() * (self.beta * s + self.phi + self.xi).cos()
            + self.a3 * (-s).exp()
    }

    /// Interior `F(0)`, evaluated from the closed form.
    pub fn surface_value(&self) -> f64 {
        2.0 * self.a1.norm() * (self.phi + self.xi).cos() + self.a3
    }

    /// Amplitude of the vacuum-side field `F(0) e^{kz}` (z < 0).
    pub fn vacuum_amplitude(&self) -> f64 {
        2.0 * (self.a1 * Complex64::from_polar(1.0, -self.phi)).re + self.a3
    }

    /// Potential per unit displacement at depth `z` [V/m].
    pub fn potential_per_u(&self, z: f64) -> f64 {
        self.phi0_scale * self.f(self.k * z)
    }
}
