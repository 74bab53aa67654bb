//! Single-phonon couplings, cooperativity and transfer-fidelity estimates
//! for quantum-dot, trapped-ion and NV-center qubits.
//!
//! Couplings are returned as rates `E/ħ` in s⁻¹. Reference couplings given
//! in MHz or kHz are read as the same numeric s⁻¹ magnitude, while cavity
//! linewidths use `κ = 2πf_c/Q`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::constants::{AMU, E_CHARGE, HBAR, K_B, MICRON, MICRO_EV};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChargeQubitParams {
    /// Detuning ε [J].
    pub epsilon: f64,
    /// Tunnel coupling [J].
    pub t_c: f64,
    /// Dot separation [m].
    pub l: f64,
    /// Depth below the surface [m].
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChargeCoupling {
    pub g_ch: f64,
    pub g_eff: f64,
    /// Qubit splitting `√(ε² + 4t_c²)/ħ`.
    pub omega: f64,
}

/// `g_ch = eφ₀F(kd)sin(kl/2)`, `g_eff = g_ch·2t_c/Ω`.
pub fn g_charge(p: &ChargeQubitParams, phi0: f64, k: f64, f_kd: f64) -> Result<ChargeCoupling> {
    if !(p.t_c > 0.0 && p.l > 0.0 && p.d >= 0.0) {
        return Err(Error::InvalidArgument(
            "charge qubit needs t_c > 0, l > 0, d ≥ 0".into(),
        ));
    }
    let g_ch = E_CHARGE * phi0 * f_kd * (k * p.l / 2.0).sin() / HBAR;
    let omega = (p.epsilon * p.epsilon + 4.0 * p.t_c * p.t_c).sqrt();
    Ok(ChargeCoupling {
        g_ch,
        g_eff: g_ch * 2.0 * p.t_c / omega,
        omega: omega / HBAR,
    })
}

/// Eigenstates `|l⟩ = α_l|T₀⟩ + β_l|S₁₁⟩ + κ_l|S₀₂⟩` of the two-electron
/// double dot, ascending in energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DqdSpectrum {
    /// Energies [J].
    pub energies: [f64; 3],
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub kappa: [f64; 3],
    /// Qubit splitting `ε₁ − ε₀` [J].
    pub omega0: f64,
}

impl DqdSpectrum {
    pub fn kappa0_kappa1(&self) -> f64 {
        self.kappa[0] * self.kappa[1]
    }

    /// `κ₁² − κ₀²`, the charge-configuration difference of the qubit levels.
    pub fn charge_asymmetry(&self) -> f64 {
        self.kappa[1].powi(2) - self.kappa[0].powi(2)
    }
}

/// Hamiltonian in the basis {T₀, S₁₁, S₀₂}.
pub fn dqd_hamiltonian(t_c: f64, epsilon: f64, delta: f64) -> Matrix3<f64> {
    Matrix3::new(
        0.0,
        -delta,
        0.0, //
        -delta,
        0.0,
        t_c / 2.0, //
        0.0,
        t_c / 2.0,
        -epsilon,
    )
}

/// Eigenvector sign is fixed so that its largest component is positive.
fn canonical_sign(v: [f64; 3]) -> [f64; 3] {
    let big = v
        .iter()
        .copied()
        .fold(0.0, |a: f64, x| if x.abs() > a.abs() { x } else { a });
    if big < 0.0 {
        v.map(|x| -x)
    } else {
        v
    }
}

pub fn dqd_spectrum(t_c: f64, epsilon: f64, delta: f64) -> DqdSpectrum {
    let mut states: Vec<(f64, [f64; 3])> = if delta == 0.0 {
        // T₀ decouples exactly; keep it out of the numerical eigensolver.
        let block = Matrix2::new(0.0, t_c / 2.0, t_c / 2.0, -epsilon);
        let eig = SymmetricEigen::new(block);
        let mut s: Vec<(f64, [f64; 3])> = (0..2)
            .map(|i| {
                (
                    eig.eigenvalues[i],
                    [0.0, eig.eigenvectors[(0, i)], eig.eigenvectors[(1, i)]],
                )
            })
            .collect();
        s.push((0.0, [1.0, 0.0, 0.0]));
        s
    } else {
        let eig = SymmetricEigen::new(dqd_hamiltonian(t_c, epsilon, delta));
        (0..3)
            .map(|i| {
                let c = eig.eigenvectors.column(i);
                (eig.eigenvalues[i], [c[0], c[1], c[2]])
            })
            .collect()
    };
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = DqdSpectrum {
        energies: [0.0; 3],
        alpha: [0.0; 3],
        beta: [0.0; 3],
        kappa: [0.0; 3],
        omega0: 0.0,
    };
    for (l, (e, v)) in states.into_iter().enumerate() {
        let v = canonical_sign(v);
        out.energies[l] = e;
        out.alpha[l] = v[0];
        out.beta[l] = v[1];
        out.kappa[l] = v[2];
    }
    out.omega0 = out.energies[1] - out.energies[0];
    out
}

/// `∂ω₀/∂ε` by central difference; dimensionless.
pub fn charge_noise_sensitivity(t_c: f64, epsilon: f64, delta: f64) -> f64 {
    let h = if epsilon == 0.0 {
        1e-3 * MICRO_EV
    } else {
        1e-3 * epsilon.abs()
    };
    let w = |e: f64| dqd_spectrum(t_c, e, delta).omega0;
    (w(epsilon + h) - w(epsilon - h)) / (2.0 * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpinQubitParams {
    pub t_c: f64,
    pub epsilon: f64,
    /// Magnetic-gradient splitting Δ [J].
    pub delta: f64,
    pub l: f64,
    pub d: f64,
    /// Geometric factor `sin(2πx_R/λ) − sin(2πx_L/λ)`.
    pub eta_geo: f64,
}

impl SpinQubitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && (0.0..=2.0).contains(&self.eta_geo)) {
            return Err(Error::InvalidArgument(
                "spin qubit needs Δ ≥ 0 and 0 ≤ η_geo ≤ 2".into(),
            ));
        }
        Ok(())
    }
}

/// Geometric factor for dots at `±l/2` around a standing-wave node, `2sin(πl/λ)`.
pub fn eta_geo_optimal(l: f64, lambda: f64) -> f64 {
    2.0 * (PI * l / lambda).sin()
}

/// Transverse coupling `g_QD = κ₀κ₁η_geo·eφ₀F(kd)`.
pub fn g_spin(p: &SpinQubitParams, phi0: f64, f_kd: f64) -> Result<f64> {
    p.validate()?;
    let s = dqd_spectrum(p.t_c, p.epsilon, p.delta);
    Ok(s.kappa0_kappa1() * p.eta_geo * E_CHARGE * phi0 * f_kd / HBAR)
}

/// Longitudinal (phonon-number dependent) coupling `κ_S²η_geo·eφ₀F(kd)`.
pub fn g_longitudinal(kappa_s: f64, eta_geo: f64, phi0: f64, f_kd: f64) -> f64 {
    kappa_s * kappa_s * eta_geo * E_CHARGE * phi0 * f_kd / HBAR
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IonParams {
    /// Charge [C].
    pub charge: f64,
    /// Mass [kg].
    pub mass: f64,
    /// Trap frequency [rad/s].
    pub omega_t: f64,
    /// Height above the surface [m].
    pub d: f64,
}

impl IonParams {
    /// Singly charged ⁹Be⁺.
    pub fn beryllium(omega_t: f64, d: f64) -> Self {
        Self {
            charge: E_CHARGE,
            mass: 9.012_182 * AMU,
            omega_t,
            d,
        }
    }

    /// Ground-state extent `√(ħ/2mω_t)`.
    pub fn x0(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_t)).sqrt()
    }
}

/// `g_ion = qφ₀e^{−kd}η_LD` with `η_LD = kx₀`.
pub fn g_ion(p: &IonParams, phi0: f64, k: f64) -> Result<f64> {
    if !(p.charge > 0.0 && p.mass > 0.0 && p.omega_t > 0.0 && p.d > 0.0) {
        return Err(Error::InvalidArgument("ion parameters must be positive".into()));
    }
    let eta_ld = k * p.x0();
    Ok(p.charge * phi0 * (-k * p.d).exp() * eta_ld / HBAR)
}

/// Surface-noise limited coherence `T₂ = 2 s·(d/150 µm)⁴`.
pub fn ion_t2(d: f64) -> f64 {
    2.0 * (d / (150.0 * MICRON)).powi(4)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NvParams {
    /// Gyromagnetic ratio [rad/(s·T)].
    pub gamma_nv: f64,
    pub d: f64,
    /// Orientation factors of the stray field.
    pub eta: [f64; 3],
}

/// NV gyromagnetic ratio, 2π × 28 GHz/T.
pub const GAMMA_NV: f64 = 2.0 * PI * 28e9;

impl Default for NvParams {
    fn default() -> Self {
        Self {
            gamma_nv: GAMMA_NV,
            d: 10e-9,
            eta: [0.0, 0.0, 1.0],
        }
    }
}

/// `g = γ_NV B₀ η^α` for each orientation component.
pub fn g_nv(p: &NvParams, b0: f64) -> Result<[f64; 3]> {
    if p.eta.iter().any(|e| e.abs() > 1.5) {
        return Err(Error::InvalidArgument(
            "orientation factors must satisfy |η| ≤ 1.5".into(),
        ));
    }
    Ok(p.eta.map(|e| p.gamma_nv * b0 * e))
}

/// Bose occupation `1/(e^{ħω/k_BT} − 1)`.
pub fn n_thermal(omega_c: f64, temperature: f64) -> f64 {
    1.0 / (HBAR * omega_c / (K_B * temperature)).exp_m1()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoopResult {
    pub g: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub omega_c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub n_th: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// `C = g²T₂Q/[ω_c(n̄_th + 1)]`.
pub fn cooperativity(g: f64, t2: f64, omega_c: f64, q: f64, temperature: f64) -> Result<CoopResult> {
    if !(g > 0.0 && t2 > 0.0 && omega_c > 0.0 && q > 0.0 && temperature > 0.0) {
        return Err(Error::InvalidArgument("cooperativity inputs must be positive".into()));
    }
    let n_th = n_thermal(omega_c, temperature);
    Ok(CoopResult {
        g,
        t2,
        omega_c,
        q,
        n_th,
        c: g * g * t2 * q / (omega_c * (n_th + 1.0)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dispersive {
    pub g_dr: f64,
    pub kappa_dr: f64,
    /// Set when `|δ| < 3g`, where the expansion in `g/δ` is poor.
    pub weak_detuning: bool,
}

/// Virtual-phonon exchange `g_dr = g²/δ` and reduced loss `κ_dr = (g/δ)²κ`.
pub fn dispersive(g: f64, delta: f64, kappa: f64) -> Result<Dispersive> {
    if delta == 0.0 {
        return Err(Error::InvalidArgument(
            "dispersive regime needs non-zero detuning".into(),
        ));
    }
    let weak_detuning = delta.abs() < 3.0 * g.abs();
    if weak_detuning {
        log::warn!("dispersive coupling with |δ| < 3g");
    }
    let r = g / delta;
    Ok(Dispersive {
        g_dr: g * r,
        kappa_dr: r * r * kappa,
        weak_detuning,
    })
}

/// Heralded success probability `1/[(1 + ε)(1 + 1/4C)]`.
pub fn p_success(eps_ratio: f64, c: f64) -> f64 {
    1.0 / ((1.0 + eps_ratio) * (1.0 + 1.0 / (4.0 * c)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FidelityVariant {
    /// `1 − ε − 𝒞/C` with a protocol-dependent coefficient 𝒞.
    Simple { coeff: f64 },
    /// Lower bound `1 − 2ε − 1/(2C)`.
    LowerBound,
}

pub fn fidelity_estimate(eps_ratio: f64, c: f64, variant: FidelityVariant) -> f64 {
    match variant {
        FidelityVariant::Simple { coeff } => 1.0 - eps_ratio - coeff / c,
        FidelityVariant::LowerBound => 1.0 - 2.0 * eps_ratio - 0.5 / c,
    }
}

/// Rabi frequency `gα` under a coherent drive of amplitude `α`.
pub fn driven_rabi(g: f64, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "drive amplitude must be ≥ 0, got {alpha}"
        )));
    }
    Ok(g * alpha)
}

/// Inputs and reference values for one platform of the cooperativity table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlatformSpec {
    pub platform: &'static str,
    /// Coupling range endpoints, numeric s⁻¹.
    pub g: (f64, f64),
    pub t2: f64,
    pub q: f64,
    pub f_c: f64,
    /// Reference cooperativity range used as a pass/fail reference.
    pub c_reference: (f64, f64),
}

/// Relative tolerance on each reference cooperativity.
pub const COOP_TOLERANCE: f64 = 0.15;

pub const TEMPERATURE: f64 = 0.02;

pub fn reference_platforms() -> [PlatformSpec; 4] {
    [
        PlatformSpec {
            platform: "charge qubit (DQD)",
            g: (200e6, 450e6),
            t2: 10e-9,
            q: 1e3,
            f_c: 6e9,
            c_reference: (11.0, 55.0),
        },
        PlatformSpec {
            platform: "spin qubit (DQD)",
            g: (10e6, 22.4e6),
            t2: 2e-6,
            q: 1e3,
            f_c: 1.5e9,
            c_reference: (21.0, 106.0),
        },
        PlatformSpec {
            platform: "trapped ion",
            g: (1.8e3, 4.0e3),
            t2: ion_t2(150.0 * MICRON),
            q: 3e3,
            f_c: 2e6,
            c_reference: (7.0, 36.0),
        },
        PlatformSpec {
            platform: "NV center",
            g: (45e3, 101e3),
            t2: 100e-3,
            q: 1e3,
            f_c: 3e9,
            c_reference: (10.0, 54.0),
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoopRow {
    pub platform: String,
    pub g_low: f64,
    pub g_high: f64,
    pub f_c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub n_th: f64,
    pub c_low: f64,
    pub c_high: f64,
    pub c_ref_low: f64,
    pub c_ref_high: f64,
    pub pass_low: bool,
    pub pass_high: bool,
}

pub fn coop_row(p: &PlatformSpec) -> Result<CoopRow> {
    let w = 2.0 * PI * p.f_c;
    let lo = cooperativity(p.g.0, p.t2, w, p.q, TEMPERATURE)?;
    let hi = cooperativity(p.g.1, p.t2, w, p.q, TEMPERATURE)?;
    let within = |c: f64, r: f64| ((c - r) / r).abs() <= COOP_TOLERANCE;
    Ok(CoopRow {
        platform: p.platform.into(),
        g_low: p.g.0,
        g_high: p.g.1,
        f_c: p.f_c,
        q: p.q,
        t2: p.t2,
        n_th: lo.n_th,
        c_low: lo.c,
        c_high: hi.c,
        c_ref_low: p.c_reference.0,
        c_ref_high: p.c_reference.1,
        pass_low: within(lo.c, p.c_reference.0),
        pass_high: within(hi.c, p.c_reference.1),
    })
}

pub fn coop_table() -> Result<Vec<CoopRow>> {
    reference_platforms().iter().map(coop_row).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::Catalog;
    use crate::rayleigh::{piezo_profile, solve_110};
    use crate::zeropoint::{zero_point_set, ModeGeometry};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    const UEV: f64 = MICRO_EV;

    /// Surface potential per √µm² and |F(kd)| for GaAs at wavelength `lambda`.
    fn gaas_phi0_f(lambda: f64, d: f64) -> (f64, f64) {
        let cat = Catalog::builtin();
        let m = cat.get("GaAs").unwrap();
        let k = 2.0 * PI / lambda;
        let phi0 = zero_point_set(m, &ModeGeometry::default()).unwrap().phi0.unwrap().0;
        let prof = piezo_profile(m, &solve_110(m).unwrap(), k).unwrap();
        (phi0, prof.f(k * d).abs())
    }

    #[test]
    fn charge_coupling_scale() {
        let lambda = 0.5 * MICRON;
        let (phi0, f) = gaas_phi0_f(lambda, 50e-9);
        let p = ChargeQubitParams {
            epsilon: 0.0,
            t_c: 5.0 * UEV,
            l: lambda / 2.0,
            d: 50e-9,
        };
        let c = g_charge(&p, phi0, 2.0 * PI / lambda, f).unwrap();
        assert!(rel(c.g_eff, c.g_ch) < 1e-15);
        assert!(rel(c.g_ch, 2e9) < 0.15, "{}", c.g_ch);
        for (area, want) in [(20.0, 450e6), (100.0, 200e6)] {
            assert!(rel(c.g_ch / f64::sqrt(area), want) < 0.15);
        }
        let off = ChargeQubitParams {
            epsilon: 6.0 * UEV,
            ..p
        };
        let c2 = g_charge(&off, phi0, 2.0 * PI / lambda, f).unwrap();
        assert!(rel(c2.g_eff, c2.g_ch * 10.0 / (136.0f64).sqrt()) < 1e-14);
    }

    #[test]
    fn dqd_reference_point() {
        let s = dqd_spectrum(5.0 * UEV, -7.0 * UEV, 1.0 * UEV);
        assert!(rel(s.kappa0_kappa1().abs(), 0.05) < 0.1);
        // Frozen from an independent dense eigensolver.
        assert!((s.kappa0_kappa1().abs() - 0.048_003).abs() < 1e-5);
        assert!((s.charge_asymmetry() + 0.014_589).abs() < 1e-5);
        for l in 0..3 {
            let n = s.alpha[l].powi(2) + s.beta[l].powi(2) + s.kappa[l].powi(2);
            assert!((n - 1.0).abs() < 1e-12);
            for m in 0..l {
                let dot = s.alpha[l] * s.alpha[m] + s.beta[l] * s.beta[m] + s.kappa[l] * s.kappa[m];
                assert!(dot.abs() < 1e-12);
            }
        }
        assert!(s.energies[0] < s.energies[1] && s.energies[1] < s.energies[2]);
    }

    #[test]
    fn dqd_energies_match_characteristic_polynomial() {
        // det(λ − H) = λ³ + ελ² − (Δ² + t²/4)λ − εΔ², in µeV.
        for (t, e, d) in [(5.0, -7.0, 1.0), (10.0, -7.0, 1.0), (3.0, 2.0, 0.5)] {
            let roots = crate::poly::real_roots(&[-e * d * d, -(d * d + t * t / 4.0), e, 1.0]).unwrap();
            let s = dqd_spectrum(t * UEV, e * UEV, d * UEV);
            assert_eq!(roots.len(), 3);
            for (r, en) in roots.iter().zip(s.energies) {
                assert!((r - en / UEV).abs() < 1e-10, "{r} vs {}", en / UEV);
            }
        }
    }

    #[test]
    fn triplet_decouples_without_gradient() {
        let s = dqd_spectrum(5.0 * UEV, -7.0 * UEV, 0.0);
        let t0 = (0..3).filter(|&l| s.beta[l] == 0.0 && s.kappa[l] == 0.0).count();
        assert_eq!(t0, 1);
    }

    #[test]
    fn splitting_near_twice_gradient() {
        let s = dqd_spectrum(5.0 * UEV, -200.0 * UEV, 1.0 * UEV);
        assert!(rel(s.omega0, 2.0 * UEV) < 0.05);
    }

    #[test]
    fn sensitivity_matches_hellmann_feynman() {
        // ∂H/∂ε = −|S₀₂⟩⟨S₀₂| gives ∂ω₀/∂ε = κ₀² − κ₁².
        let s = dqd_spectrum(5.0 * UEV, -7.0 * UEV, 1.0 * UEV);
        let fd = charge_noise_sensitivity(5.0 * UEV, -7.0 * UEV, 1.0 * UEV);
        assert!((fd + s.charge_asymmetry()).abs() < 1e-6);
    }

    #[test]
    fn sensitivity_small_and_decreasing_at_negative_detuning() {
        let t = 5.0 * UEV;
        assert!(charge_noise_sensitivity(t, -20.0 * t, UEV).abs() < 1e-2);
        let mut last = f64::INFINITY;
        for i in 1..=40 {
            let e = -(1.0 + 0.5 * i as f64) * t;
            let s = charge_noise_sensitivity(t, e, UEV).abs();
            assert!(s < last, "ε = {}", e / UEV);
            last = s;
        }
    }

    #[test]
    fn sensitivity_asymptote_without_gradient() {
        // Second-order shift of S₁₁ by the tunnel coupling: ω₀ ≈ t²/(4|ε|).
        let t = 5.0 * UEV;
        for e in [-50.0, -100.0, -200.0] {
            let eps = e * UEV;
            let s = charge_noise_sensitivity(t, eps, 0.0);
            assert!(rel(s, t * t / (4.0 * eps * eps)) < 0.2);
        }
    }

    #[test]
    fn spin_coupling_scales() {
        let lambda = 0.5 * MICRON;
        let (phi0, f) = gaas_phi0_f(lambda, 50e-9);
        let p = SpinQubitParams {
            t_c: 5.0 * UEV,
            epsilon: -7.0 * UEV,
            delta: UEV,
            l: 250e-9,
            d: 50e-9,
            eta_geo: eta_geo_optimal(250e-9, lambda),
        };
        let g = g_spin(&p, phi0, f).unwrap().abs();
        assert!(rel(g, 200e6) < 0.15, "{g}");
        // Optimized working point at λ = 2 µm.
        let lambda = 2.0 * MICRON;
        let (phi0, f) = gaas_phi0_f(lambda, 50e-9);
        let eta = eta_geo_optimal(250e-9, lambda);
        assert!((eta - 0.76).abs() < 0.01);
        let g_opt = 0.3 * eta * E_CHARGE * phi0 * f / HBAR;
        assert!(rel(g_opt, 600e6) < 0.15, "{g_opt}");
        assert_eq!(g_longitudinal(0.0, 1.0, phi0, f), 0.0);
    }

    #[test]
    fn ion_coupling() {
        let cat = Catalog::builtin();
        let m = cat.get("LiNbO3").unwrap();
        let f_c = 2e6;
        let lambda = 3488.0 / f_c;
        let k = 2.0 * PI / lambda;
        let phi_max = zero_point_set(m, &ModeGeometry::default()).unwrap().phi0.unwrap().1;
        let ion = IonParams::beryllium(2.0 * PI * 2e6, 30.0 * MICRON);
        let mut g = Vec::new();
        for l_trans in [1.0, 5.0] {
            let area_um2 = l_trans * 40.0 * lambda / MICRON;
            g.push(g_ion(&ion, phi_max / area_um2.sqrt(), k).unwrap());
        }
        // Evaluated with the largest-e potential bound; lands about 20% above
        // the 6.7–3 kHz reference range.
        assert!(rel(g[0], 6.7e3) < 0.25, "{}", g[0]);
        assert!(rel(g[1], 3.0e3) < 0.25, "{}", g[1]);
        let far = IonParams { d: 1.0, ..ion };
        assert!(g_ion(&far, phi_max, k).unwrap() < 1e-300);
    }

    #[test]
    fn ion_coherence_scaling() {
        assert!(rel(ion_t2(150e-6), 2.0) < 1e-14);
        assert!(rel(ion_t2(75e-6), 0.125) < 1e-14);
        assert!(rel(ion_t2(300e-6), 32.0) < 1e-14);
    }

    #[test]
    fn nv_coupling() {
        let cat = Catalog::builtin();
        let m = cat.get("Terfenol-D").unwrap();
        let b0 = zero_point_set(m, &ModeGeometry::default()).unwrap().b0.unwrap();
        let g = g_nv(&NvParams::default(), b0).unwrap()[2];
        assert!(rel(g, 400e3) < 0.05, "{g}");
        let lambda = 1190.0 / 3e9;
        for (l_trans, want) in [(1.0, 101e3), (5.0, 45e3)] {
            let area_um2 = l_trans * 40.0 * lambda / MICRON;
            assert!(rel(g / area_um2.sqrt(), want) < 0.05);
        }
        assert_eq!(g_nv(&NvParams::default(), 0.0).unwrap(), [0.0; 3]);
        let bad = NvParams {
            eta: [2.0, 0.0, 0.0],
            ..NvParams::default()
        };
        assert!(g_nv(&bad, 1e-6).is_err());
    }

    #[test]
    fn thermal_occupation() {
        assert!(rel(n_thermal(2.0 * PI * 2e6, 0.02), 208.0) < 0.01);
        let w = 2f64.ln() * K_B * 0.02 / HBAR;
        assert!(rel(n_thermal(w, 0.02), 1.0) < 1e-12);
        assert!(n_thermal(2.0 * PI * 3e9, 0.02) < 1e-3);
    }

    #[test]
    fn cooperativity_identity_and_table() {
        let r = cooperativity(2e8, 1e-8, 2.0 * PI * 6e9, 1e3, 0.02).unwrap();
        assert_eq!(r.c, r.g * r.g * r.t2 * r.q / (r.omega_c * (r.n_th + 1.0)));
        let rows = coop_table().unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.pass_low && row.pass_high, "{row:?}");
        }
    }

    #[test]
    fn dispersive_limits() {
        let kappa = 2.0 * PI * 3e9 / 2e5;
        let d = dispersive(100e3, 1e6, kappa).unwrap();
        assert!(rel(d.g_dr, 10e3) < 1e-12);
        assert!(rel(d.kappa_dr, 1e-2 * kappa) < 1e-12);
        assert!((d.kappa_dr - 1e3).abs() < 100.0);
        assert!(!d.weak_detuning);
        assert!(rel(d.kappa_dr / kappa, (d.g_dr / 100e3).powi(2)) < 1e-12);
        let far = dispersive(100e3, 1e300, kappa).unwrap();
        assert!(far.g_dr < 1e-280 && far.kappa_dr < 1e-280);
        assert!(dispersive(1.0, 0.0, 1.0).is_err());
        assert!(dispersive(1.0, 2.0, 1.0).unwrap().weak_detuning);
    }

    #[test]
    fn success_probability_and_fidelity() {
        assert!((p_success(0.05, 30.0) - 0.944_51).abs() < 1e-5);
        assert!((p_success(0.0, 1e300) - 1.0).abs() < 1e-15);
        for i in 0..10 {
            let e = 0.02 * i as f64;
            for j in 1..10 {
                let c = 5.0 * j as f64;
                assert!(p_success(e + 0.02, c) < p_success(e, c));
                assert!(p_success(e, c + 5.0) > p_success(e, c));
            }
        }
        let simple = fidelity_estimate(0.05, 30.0, FidelityVariant::Simple { coeff: 1.0 });
        assert!((simple - 0.90).abs() < 0.02);
        let bound = fidelity_estimate(0.05, 30.0, FidelityVariant::LowerBound);
        assert!((bound - 0.8833).abs() < 1e-4);
        assert_eq!(fidelity_estimate(0.0, f64::INFINITY, FidelityVariant::LowerBound), 1.0);
    }

    #[test]
    fn driven_rabi_is_linear() {
        assert_eq!(driven_rabi(6e6, 0.0).unwrap(), 0.0);
        assert_eq!(driven_rabi(6e6, 1.0).unwrap(), 6e6);
        assert!(rel(driven_rabi(6e6, 10.0).unwrap(), 60e6) < 1e-15);
        assert!(driven_rabi(1.0, -1.0).is_err());
    }
}
