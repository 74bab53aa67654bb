//! Groove-grating Bragg resonators: mirror reflectivity, effective length
//! and the loss budget `Q⁻¹ = Q_r⁻¹ + Q_bk⁻¹ + Q_m⁻¹`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::materials::MaterialRecord;
use crate::rayleigh::phase_velocity;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MirrorSpec {
    /// Number of grooves per mirror.
    pub n: usize,
    pub h_over_lambda: f64,
    pub w_over_p: f64,
    pub material_name: String,
}

impl MirrorSpec {
    pub fn new(material: &MaterialRecord, n: usize, h_over_lambda: f64, w_over_p: f64) -> Result<Self> {
        let s = Self {
            n,
            h_over_lambda,
            w_over_p,
            material_name: material.name.clone(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidArgument("mirror needs at least one groove".into()));
        }
        if !(self.h_over_lambda > 0.0 && self.h_over_lambda < 0.2) {
            return Err(Error::InvalidArgument(format!(
                "groove depth h/λ must lie in (0, 0.2), got {}",
                self.h_over_lambda
            )));
        }
        if !(self.w_over_p > 0.0 && self.w_over_p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "groove fill w/p must lie in (0, 1), got {}",
                self.w_over_p
            )));
        }
        Ok(())
    }
}

/// Loss channels beyond the mirror, bulk conversion and material terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossConfig {
    /// Diffraction-limited Q; infinite for a laterally confined mode.
    pub q_diffraction: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            q_diffraction: f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CavityBudget {
    pub n: usize,
    pub h_over_lambda: f64,
    pub f_c: f64,
    pub lambda_c: f64,
    pub r_s: f64,
    #[serde(rename = "R_total")]
    pub r_total: f64,
    #[serde(rename = "L_p")]
    pub l_p: f64,
    #[serde(rename = "L_c")]
    pub l_c: f64,
    pub n_eff: f64,
    #[serde(rename = "Q_r")]
    pub q_r: f64,
    #[serde(rename = "Q_bk")]
    pub q_bk: f64,
    #[serde(rename = "Q_m")]
    pub q_m: f64,
    #[serde(rename = "Q_d")]
    pub q_d: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub kappa_gd: f64,
    pub kappa_bd: f64,
    pub kappa: f64,
    pub ratio_gd_bd: f64,
    pub mode_spacing_rel: f64,
    pub bandwidth_rel: f64,
    #[serde(rename = "A")]
    pub area: f64,
}

impl CavityBudget {
    pub fn omega_c(&self) -> f64 {
        2.0 * PI * self.f_c
    }

    /// Residual of `Q⁻¹ = ΣQ_i⁻¹`, relative to `Q⁻¹`.
    pub fn additivity_residual(&self) -> f64 {
        let sum = 1.0 / self.q_r + 1.0 / self.q_bk + 1.0 / self.q_m + 1.0 / self.q_d;
        (sum - 1.0 / self.q).abs() * self.q
    }

    /// Largest relative residual among the linewidth identities.
    pub fn kappa_residual(&self) -> f64 {
        let w = self.omega_c();
        let bd = w / self.q_bk + w / self.q_m + w / self.q_d;
        [
            (self.kappa - self.kappa_gd - self.kappa_bd) / self.kappa,
            (self.kappa_gd - w / self.q_r) / self.kappa_gd,
            (self.kappa_bd - bd) / self.kappa_bd,
        ]
        .iter()
        .fold(0.0, |a: f64, r| a.max(r.abs()))
    }
}

/// Bragg center frequency `f_c = v_s/2p`.
pub fn center_frequency(m: &MaterialRecord, pitch: f64) -> Result<f64> {
    if !(pitch > 0.0) {
        return Err(Error::InvalidArgument(format!("pitch must be > 0, got {pitch}")));
    }
    Ok(phase_velocity(m)?.0 / (2.0 * pitch))
}

/// Single-groove reflectivity `|r_s| = C₁(h/λ)sin(πw/p) + C₂(h/λ)²cos(πw/p)`.
pub fn groove_reflection(m: &MaterialRecord, mirror: &MirrorSpec) -> Result<f64> {
    let (Some(c1), Some(c2)) = (m.mirror_c1, m.mirror_c2) else {
        return Err(Error::MissingMirrorCoefficients(m.name.clone()));
    };
    let h = mirror.h_over_lambda;
    let a = PI * mirror.w_over_p;
    // cos(π/2) is not exactly zero in floating point.
    let cos = if mirror.w_over_p == 0.5 { 0.0 } else { a.cos() };
    Ok((c1 * h * a.sin() + c2 * h * h * cos).abs())
}

/// Full loss budget for two identical mirrors separated by a gap `d` [m],
/// with lateral aperture `l_trans` [m].
pub fn budget(m: &MaterialRecord, mirror: &MirrorSpec, d: f64, l_trans: f64, f_c: f64) -> Result<CavityBudget> {
    budget_with(m, mirror, d, l_trans, f_c, &LossConfig::default())
}

pub fn budget_with(
    m: &MaterialRecord,
    mirror: &MirrorSpec,
    d: f64,
    l_trans: f64,
    f_c: f64,
    losses: &LossConfig,
) -> Result<CavityBudget> {
    mirror.validate()?;
    if !(d >= 0.0) {
        return Err(Error::InvalidArgument(format!("mirror gap must be ≥ 0, got {d}")));
    }
    if !(f_c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "center frequency must be > 0, got {f_c}"
        )));
    }
    let cb = m
        .bulk_cb
        .ok_or_else(|| Error::MissingMirrorCoefficients(m.name.clone()))?;
    let r_s = groove_reflection(m, mirror)?;
    if r_s == 0.0 {
        return Err(Error::DegenerateMirror);
    }
    let (v_s, _) = phase_velocity(m)?;
    Ok(assemble(mirror, r_s, cb, m.qm_f(), v_s, d, l_trans, f_c, losses))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    mirror: &MirrorSpec,
    r_s: f64,
    cb: f64,
    qm_f: f64,
    v_s: f64,
    d: f64,
    l_trans: f64,
    f_c: f64,
    losses: &LossConfig,
) -> CavityBudget {
    let n = mirror.n as f64;
    let h = mirror.h_over_lambda;
    let lambda_c = v_s / f_c;
    let r_total = (n * r_s).tanh();
    let l_p = ((n - 1.0) * r_s).tanh() * lambda_c / (4.0 * r_s);
    let l_c = d + 2.0 * l_p;
    let n_eff = l_c / lambda_c;
    // 1 − tanh²(x) = cosh⁻²(x), without cancellation for long gratings.
    let q_r = 2.0 * PI * n_eff * (n * r_s).cosh().powi(2);
    let q_bk = 2.0 * PI * n_eff / (cb * h * h);
    let q_m = qm_f / (f_c * 1e-9);
    let q_d = losses.q_diffraction;
    let q = 1.0 / (1.0 / q_r + 1.0 / q_bk + 1.0 / q_m + 1.0 / q_d);
    let w = 2.0 * PI * f_c;
    let kappa_gd = w / q_r;
    let kappa_bd = w / q_bk + w / q_m + w / q_d;
    CavityBudget {
        n: mirror.n,
        h_over_lambda: h,
        f_c,
        lambda_c,
        r_s,
        r_total,
        l_p,
        l_c,
        n_eff,
        q_r,
        q_bk,
        q_m,
        q_d,
        q,
        kappa_gd,
        kappa_bd,
        kappa: kappa_gd + kappa_bd,
        ratio_gd_bd: kappa_gd / kappa_bd,
        mode_spacing_rel: lambda_c / (2.0 * l_c),
        bandwidth_rel: 2.0 * r_s / PI,
        area: l_trans * l_c,
    }
}

/// Fixed geometry shared by sweep and design searches. Lengths are in units
/// of the center wavelength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepGeometry {
    pub d_over_lambda: f64,
    pub w_over_p: f64,
    pub l_trans_over_lambda: f64,
}

impl Default for SweepGeometry {
    fn default() -> Self {
        Self {
            d_over_lambda: 5.25,
            w_over_p: 0.5,
            l_trans_over_lambda: 1.0,
        }
    }
}

/// Budget for each groove depth in `h_grid` at fixed `n`.
pub fn q_sweep(
    m: &MaterialRecord,
    n: usize,
    h_grid: &[f64],
    geom: &SweepGeometry,
    f_c: f64,
) -> Result<Vec<CavityBudget>> {
    let lambda = phase_velocity(m)?.0 / f_c;
    h_grid
        .iter()
        .map(|&h| {
            let spec = MirrorSpec::new(m, n, h, geom.w_over_p)?;
            budget(
                m,
                &spec,
                geom.d_over_lambda * lambda,
                geom.l_trans_over_lambda * lambda,
                f_c,
            )
        })
        .collect()
}

/// Uniform grid `step, 2·step, …, max`.
pub fn depth_grid(step: f64, max: f64) -> Vec<f64> {
    let n = (max / step).round() as usize;
    (1..=n).map(|i| i as f64 * step).collect()
}

/// Smallest depth at which bulk conversion is the dominant loss channel.
pub fn bulk_onset(sweep: &[CavityBudget]) -> Option<f64> {
    sweep
        .iter()
        .find(|b| b.q_bk <= b.q_r && b.q_bk <= b.q_m && b.q_bk <= b.q_d)
        .map(|b| b.h_over_lambda)
}

/// One row of a Q sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub h_over_lambda: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Q_r")]
    pub q_r: f64,
    #[serde(rename = "Q_bk")]
    pub q_bk: f64,
    #[serde(rename = "Q_m")]
    pub q_m: f64,
    pub ratio_gd_bd: f64,
    #[serde(rename = "R_total")]
    pub r_total: f64,
}

impl From<&CavityBudget> for SweepRow {
    fn from(b: &CavityBudget) -> Self {
        Self {
            h_over_lambda: b.h_over_lambda,
            q: b.q,
            q_r: b.q_r,
            q_bk: b.q_bk,
            q_m: b.q_m,
            ratio_gd_bd: b.ratio_gd_bd,
            r_total: b.r_total,
        }
    }
}

/// Search grid for [`design_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct DesignGrid {
    pub n_max: usize,
    pub h_step: f64,
    pub h_max: f64,
}

impl Default for DesignGrid {
    fn default() -> Self {
        Self {
            n_max: 1000,
            h_step: 1e-4,
            h_max: 0.1,
        }
    }
}

/// Smallest-`N` design with `Q ≥ target_q` and `κ_gd/κ_bd ≥ min_ratio`;
/// ties go to the shallower groove.
pub fn design_search(
    m: &MaterialRecord,
    f_c: f64,
    target_q: f64,
    min_ratio: f64,
    geom: &SweepGeometry,
    grid: &DesignGrid,
) -> Result<(MirrorSpec, CavityBudget)> {
    if !(target_q > 0.0 && min_ratio > 0.0) {
        return Err(Error::InvalidArgument("design targets must be positive".into()));
    }
    let cb = m
        .bulk_cb
        .ok_or_else(|| Error::MissingMirrorCoefficients(m.name.clone()))?;
    let v_s = phase_velocity(m)?.0;
    let lambda = v_s / f_c;
    let hs = depth_grid(grid.h_step, grid.h_max);
    let losses = LossConfig::default();
    let mut best: Option<(f64, CavityBudget)> = None;
    for n in 1..=grid.n_max {
        for &h in &hs {
            let spec = MirrorSpec::new(m, n, h, geom.w_over_p)?;
            let r_s = groove_reflection(m, &spec)?;
            if r_s == 0.0 {
                continue;
            }
            let b = assemble(
                &spec,
                r_s,
                cb,
                m.qm_f(),
                v_s,
                geom.d_over_lambda * lambda,
                geom.l_trans_over_lambda * lambda,
                f_c,
                &losses,
            );
            if b.q >= target_q && b.ratio_gd_bd >= min_ratio {
                return Ok((spec, b));
            }
            let score = (b.q / target_q).min(b.ratio_gd_bd / min_ratio);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, b));
            }
        }
    }
    let b = best
        .map(|(_, b)| b)
        .ok_or_else(|| Error::InvalidArgument("empty design grid".into()))?;
    Err(Error::Infeasible {
        n: b.n,
        h: b.h_over_lambda,
        q: b.q,
        ratio: b.ratio_gd_bd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::Catalog;

    fn linbo3() -> MaterialRecord {
        Catalog::builtin().get("LiNbO3").unwrap().clone()
    }

    fn budget_at(n: usize, h: f64, d_over_lambda: f64) -> CavityBudget {
        let m = linbo3();
        let lambda = 3488.0 / 3e9;
        let spec = MirrorSpec::new(&m, n, h, 0.5).unwrap();
        budget(&m, &spec, d_over_lambda * lambda, lambda, 3e9).unwrap()
    }

    #[test]
    fn center_frequency_examples() {
        let cat = Catalog::builtin();
        let f = center_frequency(cat.get("LiNbO3").unwrap(), 0.5813e-6).unwrap();
        assert!((f / 3e9 - 1.0).abs() < 1e-3);
        let f2 = center_frequency(cat.get("LiNbO3").unwrap(), 2.0 * 0.5813e-6).unwrap();
        assert!((f / f2 - 2.0).abs() < 1e-14);
        let g = center_frequency(cat.get("GaAs").unwrap(), 0.4797e-6).unwrap();
        assert!((g / 3e9 - 1.0).abs() < 2e-3);
    }

    #[test]
    fn groove_reflection_values() {
        let m = linbo3();
        let r = groove_reflection(&m, &MirrorSpec::new(&m, 100, 0.02, 0.5).unwrap()).unwrap();
        assert!((r - 0.67 * 0.02).abs() < 1e-15);
        let tiny = groove_reflection(&m, &MirrorSpec::new(&m, 100, 1e-9, 0.3).unwrap()).unwrap();
        assert!(tiny < 1e-9);
        // Away from w/p = 1/2 the stored-energy term contributes.
        let r3 = groove_reflection(&m, &MirrorSpec::new(&m, 1, 0.02, 0.3).unwrap()).unwrap();
        let want = 0.67 * 0.02 * (0.3 * PI).sin() + 42.0 * 4e-4 * (0.3 * PI).cos();
        assert!((r3 - want).abs() < 1e-15);
        let gaas = Catalog::builtin().get("GaAs").unwrap().clone();
        assert!(matches!(
            groove_reflection(&gaas, &MirrorSpec::new(&gaas, 1, 0.02, 0.5).unwrap()),
            Err(Error::MissingMirrorCoefficients(_))
        ));
    }

    #[test]
    fn hundred_groove_budget() {
        let b = budget_at(100, 0.02, 5.25);
        assert!((b.q / 1e3 - 1.0).abs() < 0.1, "Q = {}", b.q);
        assert!(b.ratio_gd_bd >= 20.0);
        assert!(b.additivity_residual() < 1e-12);
        assert!(b.kappa_residual() < 1e-12);
        assert!(b.mode_spacing_rel > b.bandwidth_rel);
    }

    #[test]
    fn effective_lengths() {
        let long = budget_at(300, 0.02, 5.25);
        assert!((long.n_eff - 42.0).abs() < 2.0, "{}", long.n_eff);
        let short = budget_at(300, 0.02, 0.75);
        assert!((short.n_eff - 38.0).abs() < 2.0, "{}", short.n_eff);
        assert!((long.area - long.lambda_c * long.l_c).abs() < 1e-24);
    }

    #[test]
    fn reflectivity_increases_with_groove_count() {
        let mut last = 0.0;
        for n in [1, 10, 50, 100, 200, 300] {
            let b = budget_at(n, 0.01, 5.25);
            assert!(b.r_total > last && b.r_total < 1.0);
            last = b.r_total;
        }
    }

    #[test]
    fn sweep_regimes_and_onset() {
        let m = linbo3();
        let grid = depth_grid(1e-4, 0.1);
        let geom = SweepGeometry::default();
        let s300 = q_sweep(&m, 300, &grid, &geom, 3e9).unwrap();
        let onset = bulk_onset(&s300).unwrap();
        assert!((onset - 0.025).abs() <= 0.005, "onset {onset}");
        for w in s300.windows(2) {
            assert!(w[1].ratio_gd_bd < w[0].ratio_gd_bd);
        }
        let s100 = q_sweep(&m, 100, &grid, &geom, 3e9).unwrap();
        for (a, b) in s100.iter().zip(&s300) {
            if b.q_r < b.q_bk && b.q_r < b.q_m {
                assert!(a.q <= b.q);
            }
        }
        for b in s100.iter().chain(&s300).filter(|b| b.r_s <= 0.05) {
            assert!(b.mode_spacing_rel > b.bandwidth_rel);
        }
    }

    #[test]
    fn design_search_targets() {
        let m = linbo3();
        let geom = SweepGeometry::default();
        let grid = DesignGrid::default();
        let (spec, b) = design_search(&m, 3e9, 1e3, 20.0, &geom, &grid).unwrap();
        assert!(spec.n <= 100);
        assert!((spec.h_over_lambda - 0.02).abs() < 0.002);
        assert!(b.q >= 1e3 && b.ratio_gd_bd >= 20.0);
        let (one, _) = design_search(&m, 3e9, 1.0, 20.0, &geom, &grid).unwrap();
        assert_eq!((one.n, one.h_over_lambda), (1, 1e-4));
        let small = DesignGrid { n_max: 50, ..grid };
        match design_search(&m, 3e9, 1e3, 1e6, &geom, &small) {
            Err(Error::Infeasible { .. }) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn invalid_mirrors_rejected() {
        let m = linbo3();
        assert!(MirrorSpec::new(&m, 0, 0.02, 0.5).is_err());
        assert!(MirrorSpec::new(&m, 10, 0.0, 0.5).is_err());
        assert!(MirrorSpec::new(&m, 10, 0.02, 1.0).is_err());
    }
}
