//! Model-reduction checks: full double dot vs Jaynes–Cummings, adiabatic
//! elimination of a bad cavity, and the Hahn-echo sequence.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::integrate::{dopri5, Tolerance};
use super::lindblad::{build_liouvillian, integrate, linspace, DephasingOp, HamiltonianSpec, NoiseSpec};
use super::ops::{annihilation, c, ket_bra, lowering, number, s_z, TensorLayout};
use super::state::{DensityMatrix, HilbertSpec};
use crate::constants::{HBAR, MICRO_EV};
use crate::couplings::{dqd_spectrum, p_success};
use crate::error::{Error, Result};

/// Single double-dot node; energies in µeV with ħ = 1, so times are in ħ/µeV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullVsJcParams {
    pub t_c: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// η_geo·e·φ₀ [µeV].
    pub coupling: f64,
    /// Cavity decay rate for κD[a]; `None` means g_QD/2.
    pub kappa: Option<f64>,
    pub fock_cutoff: usize,
    /// Run length in units of 1/g_QD.
    pub duration: f64,
    pub points: usize,
    pub tol: Tolerance,
}

impl Default for FullVsJcParams {
    fn default() -> Self {
        Self {
            t_c: 10.0,
            epsilon: -7.0,
            delta: 1.0,
            coupling: 5.2e-2,
            kappa: None,
            fock_cutoff: 2,
            duration: 20.0,
            points: 801,
            tol: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullVsJcRow {
    pub t: f64,
    pub sz_full: f64,
    pub sz_jc: f64,
    pub n_full: f64,
    pub n_jc: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FullVsJcReport {
    /// Effective JC coupling |κ₀κ₁|·coupling [µeV].
    pub g_qd: f64,
    /// The same in s⁻¹.
    pub g_qd_per_s: f64,
    pub omega0: f64,
    pub kappa: f64,
    pub sup_sz_diff: f64,
    pub max_leakage: f64,
    pub rows: Vec<FullVsJcRow>,
}

/// Runs both models from the excited qubit and cavity vacuum.
pub fn full_vs_jc_single_node(p: &FullVsJcParams) -> Result<FullVsJcReport> {
    let spec = dqd_spectrum(p.t_c, p.epsilon, p.delta);
    let g_qd = spec.kappa0_kappa1().abs() * p.coupling;
    if !(g_qd > 0.0) {
        return Err(Error::InvalidArgument(
            "double dot has no charge matrix element between qubit levels".into(),
        ));
    }
    let kappa = p.kappa.unwrap_or(g_qd / 2.0);
    let noise = NoiseSpec::cavity_only(kappa, 0.0);
    let grid = linspace(0.0, p.duration / g_qd, p.points);

    let full_space = HilbertSpec::single(3, p.fock_cutoff);
    let full_h = HamiltonianSpec::FullDqd {
        t_c: p.t_c,
        epsilon: p.epsilon,
        delta: p.delta,
        coupling: p.coupling,
    };
    let lf = build_liouvillian(&full_h, &noise, &full_space)?;
    let lay_f = full_space.layout();
    let sz_f = lay_f.embed(&[(0, &s_z(3))]);
    let n_f = lay_f.embed(&[(1, &number(p.fock_cutoff))]);
    let leak = lay_f.embed(&[(0, &ket_bra(3, 2, 2))]);
    let rho_f = excited_vacuum(&full_space)?;
    let mut full_rows = Vec::with_capacity(grid.len());
    integrate(&rho_f, &grid, &lf, p.tol, |t, rho| {
        full_rows.push((t, rho.expect(&sz_f), rho.expect(&n_f), rho.expect(&leak)));
    })?;

    let jc_space = HilbertSpec::single(2, p.fock_cutoff);
    let lj = build_liouvillian(&HamiltonianSpec::Jc { g: g_qd, detuning: 0.0 }, &noise, &jc_space)?;
    let lay_j = jc_space.layout();
    let sz_j = lay_j.embed(&[(0, &s_z(2))]);
    let n_j = lay_j.embed(&[(1, &number(p.fock_cutoff))]);
    let mut jc_rows = Vec::with_capacity(grid.len());
    integrate(&excited_vacuum(&jc_space)?, &grid, &lj, p.tol, |_, rho| {
        jc_rows.push((rho.expect(&sz_j), rho.expect(&n_j)));
    })?;

    let rows: Vec<FullVsJcRow> = full_rows
        .iter()
        .zip(&jc_rows)
        .map(|(f, j)| FullVsJcRow {
            t: f.0,
            sz_full: f.1,
            sz_jc: j.0,
            n_full: f.2,
            n_jc: j.1,
            leakage: f.3,
        })
        .collect();
    let sup = rows.iter().map(|r| (r.sz_full - r.sz_jc).abs()).fold(0.0, f64::max);
    let max_leak = rows.iter().map(|r| r.leakage).fold(0.0, f64::max);
    Ok(FullVsJcReport {
        g_qd,
        g_qd_per_s: g_qd * MICRO_EV / HBAR,
        omega0: spec.omega0,
        kappa,
        sup_sz_diff: sup,
        max_leakage: max_leak,
        rows,
    })
}

fn excited_vacuum(space: &HilbertSpec) -> Result<DensityMatrix> {
    let psi = space.product_state(&[vec![c(0.0), c(1.0)]], &[0])?;
    Ok(DensityMatrix::from_pure(&psi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticReport {
    /// 4g²/κ
    pub kappa_tilde: f64,
    /// κ̃ + Γ_deph
    pub gamma_eff: f64,
    /// sup |p₁(t) − e^{−κ̃t}| over the run.
    pub sup_p1: f64,
    /// sup |ρ₁₀(t) − ρ₁₀(0)e^{−γ_eff t/2}|.
    pub sup_rho10: f64,
    /// Probability that the first jump of the full model is a mirror emission.
    pub p_gd_jump_resolved: f64,
    /// κ̃_gd/γ_eff
    pub p_gd_analytic: f64,
    /// Long-time weight of ρ_gd from the reduced rate equations.
    pub p_gd_rate_equation: f64,
    /// Closed-form success probability at ε = κ_bd/κ_gd, C = g²/(κΓ).
    pub p_success_formula: f64,
    pub bad_cavity: bool,
}

/// Compares the qubit-cavity master equation with rate κD[a], κ = κ_gd + κ_bd,
/// and dephasing Γ·D[|1⟩⟨1|] against its bad-cavity reduction.
pub fn adiabatic_elimination_check(g: f64, kappa_gd: f64, kappa_bd: f64, gamma_deph: f64) -> Result<AdiabaticReport> {
    if !(g > 0.0 && kappa_gd > 0.0 && kappa_bd >= 0.0 && gamma_deph >= 0.0) {
        return Err(Error::InvalidArgument("need g, κ_gd > 0 and κ_bd, Γ ≥ 0".into()));
    }
    let kappa = kappa_gd + kappa_bd;
    let bad_cavity = kappa >= 20.0 * g;
    if !bad_cavity {
        log::warn!(
            "adiabatic elimination outside the bad-cavity regime: κ/g = {:.1}",
            kappa / g
        );
    }
    let kt = 4.0 * g * g / kappa;
    let kt_gd = kt * kappa_gd / kappa;
    let gamma_eff = kt + gamma_deph;
    let tol = Tolerance::default();

    let space = HilbertSpec::single(2, 1);
    let noise = NoiseSpec {
        gamma_deph,
        dephasing: DephasingOp::Projector,
        ..NoiseSpec::cavity_only(kappa_gd, kappa_bd)
    };
    let l = build_liouvillian(&HamiltonianSpec::Jc { g, detuning: 0.0 }, &noise, &space)?;
    let layout = space.layout();
    let grid = linspace(0.0, 6.0 / kt.min(gamma_eff), 601);

    let p1_op = layout.embed(&[(0, &ket_bra(2, 1, 1))]);
    let mut sup_p1 = 0.0f64;
    integrate(&excited_vacuum(&space)?, &grid, &l, tol, |t, rho| {
        sup_p1 = sup_p1.max((rho.expect(&p1_op) - (-kt * t).exp()).abs());
    })?;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::from_pure(&space.product_state(&[vec![c(h), c(h)]], &[0])?);
    let mut sup_rho10 = 0.0f64;
    integrate(&plus, &grid, &l, tol, |t, rho| {
        let q = rho.reduce(&layout, 0);
        let exact = 0.5 * (-0.5 * gamma_eff * t).exp();
        sup_rho10 = sup_rho10.max((q[(1, 0)] - c(exact)).norm());
    })?;

    // no-jump amplitudes (c_e, c_a) with the good-channel emission accumulated
    let keff_e = 0.5 * gamma_deph;
    let keff_a = 0.5 * kappa;
    let mi = Complex64::new(0.0, -1.0);
    let t_end = 40.0 / gamma_eff.min(kappa);
    let (y, _) = dopri5(
        |_, y, dy| {
            dy[0] = mi * g * y[1] - y[0] * keff_e;
            dy[1] = mi * g * y[0] - y[1] * keff_a;
            dy[2] = c(kappa_gd * y[1].norm_sqr());
        },
        &[c(1.0), c(0.0), c(0.0)],
        &[0.0, t_end],
        Tolerance { atol: 1e-14, ..tol },
        |_, _| {},
    )?;
    let p_gd_jump_resolved = y[2].re;

    // reduced model: no-jump weight decays at γ_eff, mirror jumps at κ̃_gd
    let t_end = 40.0 / gamma_eff;
    let (z, _) = dopri5(
        |_, y, dy| {
            dy[0] = -y[0] * gamma_eff;
            dy[1] = y[0] * kt_gd;
        },
        &[c(1.0), c(0.0)],
        &[0.0, t_end],
        Tolerance { atol: 1e-14, ..tol },
        |_, _| {},
    )?;
    let coop = if gamma_deph > 0.0 {
        g * g / (kappa * gamma_deph)
    } else {
        f64::INFINITY
    };
    Ok(AdiabaticReport {
        kappa_tilde: kt,
        gamma_eff,
        sup_p1,
        sup_rho10,
        p_gd_jump_resolved,
        p_gd_analytic: kt_gd / gamma_eff,
        p_gd_rate_equation: z[1].re,
        p_success_formula: p_success(kappa_bd / kappa_gd, coop),
        bad_cavity,
    })
}

fn echo_operators(g: f64, delta: f64, cutoff: usize) -> [DMatrix<Complex64>; 5] {
    let layout = TensorLayout::new(vec![2, cutoff + 1]);
    let a = layout.embed(&[(1, &annihilation(cutoff))]).to_dense();
    let sm = layout.embed(&[(0, &lowering(2))]).to_dense();
    let sp = sm.adjoint();
    let sz = layout.embed(&[(0, &s_z(2))]).to_dense();
    let ad = a.adjoint();
    let jc = &sp * &a + &sm * &ad;
    let anti = &sm * &a + &sp * &ad;
    let d = c(delta);
    let gg = c(g);
    let h1 = &sz * d + &jc * gg;
    let h2 = -&sz * d + &anti * gg;
    let h3 = -&sz * d - &anti * gg;
    let h4 = h1.clone();
    let heff = jc * c(0.5 * g);
    [h1, h2, h3, h4, heff]
}

fn propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    (h * Complex64::new(0.0, -t)).exp()
}

fn echo_block(g: f64, delta: f64, tau: f64, cutoff: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let [h1, h2, h3, h4, heff] = echo_operators(g, delta, cutoff);
    let u = propagator(&h4, tau) * propagator(&h3, tau) * propagator(&h2, tau) * propagator(&h1, tau);
    (u, propagator(&heff, 4.0 * tau))
}

pub const ECHO_CUTOFF: usize = 3;

/// Frobenius norm of U₄U₃U₂U₁ − exp(−i4τH_eff), H_eff = (g/2)(S⁺a + S⁻a†),
/// where the four intervals are separated by π pulses about x, z and y.
pub fn hahn_echo_check(tau: f64, delta: f64, g: f64) -> Result<f64> {
    if !(tau > 0.0) || tau * delta.abs().max(g.abs()) >= 0.1 {
        return Err(Error::InvalidArgument(format!(
            "echo interval needs τ·max(|δ|, g) < 0.1, got {:.3}",
            tau * delta.abs().max(g.abs())
        )));
    }
    let (u, target) = echo_block(g, delta, tau, ECHO_CUTOFF);
    Ok((u - target).norm())
}

/// Coupling inferred from the first minimum of the excited-state population
/// under repeated echo blocks, starting from |1⟩|0⟩.
pub fn echo_effective_coupling(tau: f64, delta: f64, g: f64) -> Result<f64> {
    hahn_echo_check(tau, delta, g)?;
    let (u, _) = echo_block(g, delta, tau, ECHO_CUTOFF);
    let layout = TensorLayout::new(vec![2, ECHO_CUTOFF + 1]);
    let start = layout.index(&[1, 0]);
    let mut psi = nalgebra::DVector::<Complex64>::zeros(layout.total());
    psi[start] = c(1.0);
    let pe = |v: &nalgebra::DVector<Complex64>| {
        (0..=ECHO_CUTOFF)
            .map(|n| v[layout.index(&[1, n])].norm_sqr())
            .sum::<f64>()
    };
    let mut pops = vec![pe(&psi)];
    let limit = (10.0 / (g * tau)).ceil() as usize + 10;
    for _ in 0..limit {
        psi = &u * psi;
        pops.push(pe(&psi));
        let k = pops.len() - 1;
        if k >= 2 && pops[k - 1] <= pops[k - 2] && pops[k - 1] < pops[k] {
            // parabola through the last three samples
            let (a, b, cc) = (pops[k - 2], pops[k - 1], pops[k]);
            let shift = 0.5 * (a - cc) / (a - 2.0 * b + cc);
            let t_min = 4.0 * tau * ((k - 1) as f64 + shift);
            return Ok(std::f64::consts::FRAC_PI_2 / t_min);
        }
    }
    Err(Error::Solver(
        "no population minimum found within the echo sequence".into(),
    ))
}
