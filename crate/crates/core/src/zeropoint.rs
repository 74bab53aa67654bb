//! Single-phonon zero-point amplitudes of a surface mode.
//!
//! All quantities scale as `A^{-1/2}` with the effective mode area `A`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{EPS0, HBAR, MICRON};
use crate::error::{Error, Result};
use crate::materials::{Catalog, MaterialRecord};
use crate::rayleigh::{phase_velocity, RayleighSolution, VelocitySource};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeGeometry {
    /// Effective mode area [m²].
    pub area: f64,
    /// Wave number [1/m].
    pub k: f64,
    pub l_trans: Option<f64>,
    pub l_c: Option<f64>,
}

impl Default for ModeGeometry {
    /// `A = 1 µm²`, `k = 2π/µm`.
    fn default() -> Self {
        Self {
            area: MICRON * MICRON,
            k: 2.0 * PI / MICRON,
            l_trans: None,
            l_c: None,
        }
    }
}

impl ModeGeometry {
    pub fn new(area: f64, k: f64) -> Result<Self> {
        let g = Self {
            area,
            k,
            l_trans: None,
            l_c: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Rectangular mode `A = L_trans·L_c`.
    pub fn from_lengths(l_trans: f64, l_c: f64, k: f64) -> Result<Self> {
        let g = Self {
            area: l_trans * l_c,
            k,
            l_trans: Some(l_trans),
            l_c: Some(l_c),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0 && self.area.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mode area must be > 0, got {}",
                self.area
            )));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "wave number must be > 0, got {}",
                self.k
            )));
        }
        if let (Some(lt), Some(lc)) = (self.l_trans, self.l_c) {
            if ((lt * lc - self.area) / self.area).abs() > 1e-12 {
                return Err(Error::InvalidArgument("area differs from L_trans·L_c".into()));
            }
        }
        Ok(())
    }

    pub fn area_um2(&self) -> f64 {
        self.area / (MICRON * MICRON)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum U0Method {
    /// `√(ħ/2ρv_sA)`.
    Simple,
    /// Simple estimate scaled by the depth-normalization factor `√(Ω_r/δ)`.
    Normalized,
    /// From the classical energy density `kU²H`.
    EnergyDensity,
    /// `C√(2ħ/ρv_sA)` with a tabulated normalization constant.
    Literature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroPointSet {
    pub material: String,
    pub method: U0Method,
    #[serde(rename = "U0")]
    pub u0: f64,
    pub s0: f64,
    /// Potential bounds [V]: smallest e with largest ε, largest e with smallest ε.
    pub phi0: Option<(f64, f64)>,
    pub xi0: Option<(f64, f64)>,
    #[serde(rename = "B0")]
    pub b0: Option<f64>,
    pub v_s: f64,
    pub velocity_source: VelocitySource,
}

impl ZeroPointSet {
    /// The shear-velocity fallback overestimates `v_s`, so `U₀` is a lower bound.
    pub fn conservative(&self) -> bool {
        self.velocity_source == VelocitySource::ShearFallback
    }
}

fn simple(density: f64, v_s: f64, area: f64) -> f64 {
    (HBAR / (2.0 * density * v_s * area)).sqrt()
}

pub fn u0_simple(m: &MaterialRecord, geom: &ModeGeometry) -> Result<f64> {
    let (v, _) = phase_velocity(m)?;
    Ok(simple(m.density, v, geom.area))
}

/// Depth-normalization parameter `δ = Ω_r·∫(χ₀² + ζ₀²) d(kz) / 2`.
///
/// The factor 1/2 is the in-plane average of the cos²/sin² standing-wave
/// factors.
pub fn normalization_delta(sol: &RayleighSolution) -> Result<f64> {
    Ok(sol.alpha() * sol.depth_norm_integral()? / 2.0)
}

/// Returns `(U₀, δ)` with `U₀ = √(Ω_r/δ)·√(ħ/2ρv_sA)`, using the solver's `v_s`.
pub fn u0_normalized(m: &MaterialRecord, geom: &ModeGeometry, sol: &RayleighSolution) -> Result<(f64, f64)> {
    let delta = normalization_delta(sol)?;
    let factor = (sol.alpha() / delta).sqrt();
    Ok((factor * simple(m.density, sol.v_s, geom.area), delta))
}

/// `U₀ = √(ħv_s/(HA))` for a mode with energy density `kU²H` per unit area.
pub fn u0_energy_density(geom: &ModeGeometry, h: f64, v_s: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "energy-density factor must be > 0, got {h}"
        )));
    }
    Ok((HBAR * v_s / (h * geom.area)).sqrt())
}

/// `U₀ = C√(2ħ/(ρv_sA))`.
pub fn u0_literature(m: &MaterialRecord, geom: &ModeGeometry, c: f64) -> Result<f64> {
    let (v, _) = phase_velocity(m)?;
    Ok(c * (2.0 * HBAR / (m.density * v * geom.area)).sqrt())
}

/// Zero-point set from the simple `U₀` estimate.
pub fn zero_point_set(m: &MaterialRecord, geom: &ModeGeometry) -> Result<ZeroPointSet> {
    geom.validate()?;
    let (v, source) = phase_velocity(m)?;
    Ok(derived_set(
        m,
        geom,
        simple(m.density, v, geom.area),
        U0Method::Simple,
        v,
        source,
    ))
}

/// Strain, potential, field and magnetic amplitudes for a given `U₀`.
pub fn derived_set(
    m: &MaterialRecord,
    geom: &ModeGeometry,
    u0: f64,
    method: U0Method,
    v_s: f64,
    velocity_source: VelocitySource,
) -> ZeroPointSet {
    let s0 = geom.k * u0;
    let phi0 = m.is_piezoelectric().then(|| {
        (
            m.e14.abs() / (m.eps_max() * EPS0) * u0,
            m.e_upper().abs() / (m.eps_min() * EPS0) * u0,
        )
    });
    ZeroPointSet {
        material: m.name.clone(),
        method,
        u0,
        s0,
        phi0,
        xi0: phi0.map(|(lo, hi)| (geom.k * lo, geom.k * hi)),
        b0: m.h15.map(|h| h * s0),
        v_s,
        velocity_source,
    }
}

/// One row of the zero-point table, in display units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroPointRow {
    pub material: String,
    pub u0_fm: f64,
    pub s0_1e9: f64,
    pub phi0_min_uv: Option<f64>,
    pub phi0_max_uv: Option<f64>,
    pub xi0_min_v_per_m: Option<f64>,
    pub xi0_max_v_per_m: Option<f64>,
    pub b0_ut: Option<f64>,
    pub v_s: f64,
    pub velocity_source: VelocitySource,
    /// `conservative` when the shear-velocity fallback was used.
    pub flag: String,
}

impl From<&ZeroPointSet> for ZeroPointRow {
    fn from(z: &ZeroPointSet) -> Self {
        let flag = if z.conservative() { "conservative" } else { "" };
        Self {
            material: z.material.clone(),
            u0_fm: z.u0 * 1e15,
            s0_1e9: z.s0 * 1e9,
            phi0_min_uv: z.phi0.map(|p| p.0 * 1e6),
            phi0_max_uv: z.phi0.map(|p| p.1 * 1e6),
            xi0_min_v_per_m: z.xi0.map(|p| p.0),
            xi0_max_v_per_m: z.xi0.map(|p| p.1),
            b0_ut: z.b0.map(|b| b * 1e6),
            v_s: z.v_s,
            velocity_source: z.velocity_source,
            flag: flag.into(),
        }
    }
}

/// Materials of the zero-point table, in display order.
pub const TABLE_MATERIALS: [&str; 6] = ["GaAs", "LiNbO3", "Quartz", "Terfenol-D", "CoFe2O4", "Diamond"];

/// Regenerates the zero-point table; materials missing from the catalog are skipped.
pub fn zero_point_table(cat: &Catalog, geom: &ModeGeometry) -> Result<Vec<ZeroPointSet>> {
    TABLE_MATERIALS
        .iter()
        .filter_map(|n| cat.get(n).ok())
        .map(|m| zero_point_set(m, geom))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rayleigh::solve_110;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gaas_simple_estimate() {
        let cat = Catalog::builtin();
        let g = ModeGeometry::default();
        let z = zero_point_set(cat.get("GaAs").unwrap(), &g).unwrap();
        // Independent evaluation with the Rayleigh velocity.
        let v = solve_110(cat.get("GaAs").unwrap()).unwrap().v_s;
        let want = (1.054_571_817e-34 / (2.0 * 5307.0 * v * 1e-12)).sqrt();
        assert!(rel(z.u0, want) < 1e-14);
        assert!(rel(z.u0, 1.86e-15) < 0.01);
        assert!(rel(z.s0, 11.7e-9) < 0.05);
        let (lo, hi) = z.phi0.unwrap();
        assert_eq!(lo, hi);
        assert!(rel(lo, 3.1e-6) < 0.05);
        assert!(rel(z.xi0.unwrap().0, 19.2) < 0.05);
        assert!(z.b0.is_none());
    }

    #[test]
    fn quadrupled_area_halves_u0() {
        let cat = Catalog::builtin();
        let m = cat.get("Diamond").unwrap();
        let a = u0_simple(m, &ModeGeometry::default()).unwrap();
        let b = u0_simple(m, &ModeGeometry::new(4e-12, 2.0 * PI / MICRON).unwrap()).unwrap();
        assert!(rel(a / b, 2.0) < 1e-14);
        assert!(rel(a, 1.17e-15) < 0.02);
    }

    #[test]
    fn normalization_factors() {
        let cat = Catalog::builtin();
        let g = ModeGeometry::default();
        for (name, factor, delta) in [("GaAs", 0.64, 1.2), ("Diamond", 1.17, 0.44)] {
            let m = cat.get(name).unwrap();
            let sol = solve_110(m).unwrap();
            let (u0, d) = u0_normalized(m, &g, &sol).unwrap();
            assert!(rel((sol.alpha() / d).sqrt(), factor) < 0.03, "{name}");
            assert!(rel(d, delta) < 0.05, "{name}: δ = {d}");
            let plain = simple(m.density, sol.v_s, g.area);
            assert!(rel(u0 / plain, (sol.alpha() / d).sqrt()) < 1e-14);
        }
    }

    #[test]
    fn energy_density_and_literature_forms() {
        let cat = Catalog::builtin();
        let m = cat.get("GaAs").unwrap();
        let g = ModeGeometry::default();
        let v = phase_velocity(m).unwrap().0;
        let ed = u0_energy_density(&g, 28.2e10, v).unwrap();
        assert!(rel(ed, 1.05e-15) < 0.03);
        let lit = u0_literature(m, &g, 0.45).unwrap();
        assert!(rel(lit, 1.7e-15) < 0.03);
        let simple = u0_simple(m, &g).unwrap();
        assert!(simple / ed < 2.0 && ed / simple < 2.0);
        let big = ModeGeometry::new(1e6 * 1e-12, g.k).unwrap();
        let u_big = u0_energy_density(&big, 28.2e10, v).unwrap();
        assert!(u_big > 0.5e-18 && u_big < 5e-18);
        assert!(u0_energy_density(&g, 0.0, v).is_err());
    }

    #[test]
    fn piezoelectric_bounds_span_tensor_range() {
        let cat = Catalog::builtin();
        let g = ModeGeometry::default();
        let z = zero_point_set(cat.get("LiNbO3").unwrap(), &g).unwrap();
        let (lo, hi) = z.phi0.unwrap();
        assert!(rel(lo, 0.9e-6) < 0.05 && rel(hi, 25.8e-6) < 0.05);
        let (xlo, xhi) = z.xi0.unwrap();
        assert!(rel(xlo, g.k * lo) < 1e-15 && rel(xhi, g.k * hi) < 1e-15);
        let q = zero_point_set(cat.get("Quartz").unwrap(), &g).unwrap();
        assert!(rel(q.u0, 2.75e-15) < 0.05);
        assert!(rel(q.phi0.unwrap().1, 12.0e-6) < 0.05);
    }

    #[test]
    fn piezomagnetic_rows_are_conservative() {
        let cat = Catalog::builtin();
        let g = ModeGeometry::default();
        for (name, b0) in [("Terfenol-D", 2.3e-6), ("CoFe2O4", 6.3e-6)] {
            let z = zero_point_set(cat.get(name).unwrap(), &g).unwrap();
            assert!(z.conservative());
            assert!(z.phi0.is_none());
            assert!(rel(z.b0.unwrap(), b0) < 0.05, "{name}");
        }
    }

    #[test]
    fn geometry_invariants() {
        let g = ModeGeometry::from_lengths(3e-6, 40e-6, 1e6).unwrap();
        assert!(rel(g.area, 1.2e-10) < 1e-15);
        assert!(ModeGeometry::new(0.0, 1.0).is_err());
        let bad = ModeGeometry {
            area: 1.0,
            k: 1.0,
            l_trans: Some(2.0),
            l_c: Some(2.0),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn table_has_all_rows() {
        let t = zero_point_table(&Catalog::builtin(), &ModeGeometry::default()).unwrap();
        assert_eq!(t.len(), 6);
        let rows: Vec<ZeroPointRow> = t.iter().map(ZeroPointRow::from).collect();
        let csv = crate::emit::csv_string(&rows).unwrap();
        assert!(csv.starts_with("material,u0_fm,s0_1e9,"));
        assert_eq!(csv.lines().count(), 7);
    }
}
