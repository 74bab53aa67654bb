//! Invariant suite behind `sawqed validate`.

use std::f64::consts::FRAC_PI_4;

use sawqed::cavity::{budget, MirrorSpec};
use sawqed::constants::MICRO_EV;
use sawqed::couplings::{coop_table, dqd_spectrum, p_success};
use sawqed::dynamics::transfer::DEFAULT_HORIZON;
use sawqed::dynamics::{
    adiabatic_elimination_check, hahn_echo_check, transfer_run, HilbertSpec, NoiseSpec, Protocol, QubitState,
    TransferConfig, TransferPulses,
};
use sawqed::rayleigh::{default_window, solve_110, solve_general};
use sawqed::Catalog;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: sawqed::Result<(bool, String)>) -> Check {
    match outcome {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn general_theta(cat: &Catalog) -> sawqed::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for name in ["GaAs", "Diamond"] {
        let m = cat.get(name)?;
        let v = solve_110(m)?.v_s;
        let window = default_window(m).ok_or_else(|| sawqed::Error::MissingElastic(name.into()))?;
        let g = solve_general(m, FRAC_PI_4, window)?;
        worst = worst.max(((g.c - v) / v).abs());
    }
    Ok((worst < 1e-3, format!("max relative deviation {worst:.2e}")))
}

fn cavity_additivity(cat: &Catalog) -> sawqed::Result<(bool, String)> {
    let m = cat.get("LiNbO3")?;
    let mut worst: f64 = 0.0;
    for (n, h) in [(50, 0.01), (100, 0.02), (300, 0.03)] {
        let spec = MirrorSpec::new(m, n, h, 0.5)?;
        let lambda = sawqed::rayleigh::phase_velocity(m)?.0 / 3e9;
        let b = budget(m, &spec, 5.25 * lambda, lambda, 3e9)?;
        worst = worst.max(b.additivity_residual()).max(b.kappa_residual());
    }
    Ok((worst < 1e-12, format!("max residual {worst:.2e}")))
}

fn dqd_orthonormal() -> sawqed::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (t, e, d) in [(5.0, -7.0, 1.0), (10.0, -7.0, 1.0), (3.0, 2.0, 0.5), (5.0, -50.0, 0.2)] {
        let s = dqd_spectrum(t * MICRO_EV, e * MICRO_EV, d * MICRO_EV);
        for l in 0..3 {
            for k in 0..=l {
                let dot = s.alpha[l] * s.alpha[k] + s.beta[l] * s.beta[k] + s.kappa[l] * s.kappa[k];
                let want = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
}

fn transfer_invariants() -> sawqed::Result<(bool, String)> {
    let pulses = TransferPulses::new(Protocol::Optimal, 1.0, DEFAULT_HORIZON)?;
    let noise = NoiseSpec {
        gamma_deph: 0.03,
        ..NoiseSpec::cavity_only(1.0, 0.05)
    };
    let cfg = TransferConfig {
        space: HilbertSpec::cascaded(1),
        ..TransferConfig::default()
    };
    let r = transfer_run(&pulses, &noise, [0.02, -0.01], &QubitState::minus(), &cfg)?;
    let inv = r.invariants;
    Ok((
        inv.holds(),
        format!(
            "trace {:.1e}, hermiticity {:.1e}, min eigenvalue {:.1e}",
            inv.max_trace_error, inv.max_hermiticity_error, inv.min_eigenvalue
        ),
    ))
}

fn noise_free_transfer() -> sawqed::Result<(bool, String)> {
    let pulses = TransferPulses::new(Protocol::Optimal, 1.0, DEFAULT_HORIZON)?;
    let cfg = TransferConfig {
        space: HilbertSpec::cascaded(1),
        ..TransferConfig::default()
    };
    let r = transfer_run(
        &pulses,
        &NoiseSpec::cavity_only(1.0, 0.0),
        [0.0, 0.0],
        &QubitState::minus(),
        &cfg,
    )?;
    Ok((r.fidelity >= 0.999, format!("F = {:.6}", r.fidelity)))
}

fn cutoff_independence() -> sawqed::Result<(bool, String)> {
    let pulses = TransferPulses::new(Protocol::Optimal, 1.0, DEFAULT_HORIZON)?;
    let noise = NoiseSpec {
        gamma_deph: 0.02,
        ..NoiseSpec::cavity_only(1.0, 0.05)
    };
    let f = |cutoff| {
        let cfg = TransferConfig {
            space: HilbertSpec::cascaded(cutoff),
            ..TransferConfig::default()
        };
        transfer_run(&pulses, &noise, [0.01, -0.02], &QubitState::minus(), &cfg).map(|r| r.fidelity)
    };
    let d = (f(1)? - f(2)?).abs();
    Ok((d < 1e-8, format!("|F(1) - F(2)| = {d:.1e}")))
}

fn adiabatic() -> sawqed::Result<(bool, String)> {
    let r = adiabatic_elimination_check(1.0, 50.0, 0.0, 0.0)?;
    let sup = r.sup_p1.max(r.sup_rho10);
    Ok((sup < 1e-2, format!("sup-norm {sup:.2e} at κ = 50g")))
}

fn success_formula() -> sawqed::Result<(bool, String)> {
    let r = adiabatic_elimination_check(1.0, 47.5, 2.5, 0.004)?;
    let d = (r.p_gd_rate_equation - r.p_success_formula).abs();
    let monotone = [1.0, 2.0, 5.0, 20.0]
        .windows(2)
        .all(|w| p_success(0.05, w[1]) > p_success(0.05, w[0]));
    Ok((d < 1e-6 && monotone, format!("|Δp| = {d:.1e}")))
}

fn echo() -> sawqed::Result<(bool, String)> {
    let ratio = hahn_echo_check(0.02, 0.7, 1.0)? / hahn_echo_check(0.01, 0.7, 1.0)?;
    Ok(((3.5..=4.5).contains(&ratio), format!("error ratio {ratio:.3}")))
}

fn coop() -> sawqed::Result<(bool, String)> {
    let rows = coop_table()?;
    let passed = rows
        .iter()
        .map(|r| r.pass_low as usize + r.pass_high as usize)
        .sum::<usize>();
    Ok((
        passed == 2 * rows.len(),
        format!("{passed}/{} endpoints within tolerance", 2 * rows.len()),
    ))
}

pub fn run_suite(cat: &Catalog) -> Vec<Check> {
    vec![
        check("general-theta solver matches [110] closed form", general_theta(cat)),
        check("cavity loss additivity", cavity_additivity(cat)),
        check("double-dot eigenvectors orthonormal", dqd_orthonormal()),
        check("cooperativity table", coop()),
        check("density-matrix invariants", transfer_invariants()),
        check("noise-free transfer fidelity", noise_free_transfer()),
        check("Fock-cutoff independence", cutoff_independence()),
        check("adiabatic elimination", adiabatic()),
        check("success-probability formula", success_formula()),
        check("Hahn-echo second-order error", echo()),
    ]
}
