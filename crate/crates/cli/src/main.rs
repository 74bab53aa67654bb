//! `sawqed`: regenerates SAW transducer tables and figure data as CSV/JSON.

mod units;
mod validate;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sawqed::cavity::{self, DesignGrid, MirrorSpec, SweepGeometry, SweepRow};
use sawqed::constants::MICRON;
use sawqed::couplings::{self, ChargeQubitParams, IonParams, NvParams, SpinQubitParams};
use sawqed::dynamics::transfer::{TrajectoryRow, DEFAULT_HORIZON};
use sawqed::dynamics::{
    mc_transfer, transfer_trajectory, HilbertSpec, NoiseSpec, Protocol, QubitState, TransferConfig, TransferPulses,
};
use sawqed::emit::{csv_string, json_string};
use sawqed::materials::load_catalog;
use sawqed::rayleigh::{default_window, phase_velocity, piezo_profile, solve_110, solve_general};
use sawqed::zeropoint::{zero_point_set, zero_point_table, ModeGeometry, ZeroPointRow};
use sawqed::{Catalog, MaterialRecord};

const CATALOG_ENV: &str = "SAWQED_CATALOG";

#[derive(Parser)]
#[command(name = "sawqed", version, about = "SAW quantum-transducer calculator")]
#[command(
    after_help = "Set SAWQED_CATALOG to a JSON file of material records to extend or override the built-in catalog."
)]
struct Cli {
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the material catalog.
    #[command(subcommand)]
    Materials(MaterialsCmd),
    /// Surface-mode solver.
    #[command(subcommand)]
    Mode(ModeCmd),
    /// Zero-point displacement, strain, potential and field amplitudes.
    #[command(subcommand)]
    Zeropoint(ZeropointCmd),
    /// Groove-mirror cavity budgets.
    #[command(subcommand)]
    Cavity(CavityCmd),
    /// Single-phonon coupling rates for each qubit platform.
    #[command(subcommand)]
    Couple(CoupleCmd),
    /// Cooperativity estimates.
    #[command(subcommand)]
    Coop(CoopCmd),
    /// Master-equation state transfer between two cavities.
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// Runs the invariant suite; prints PASS/FAIL lines and exits 2 on any failure.
    Validate,
}

#[derive(Subcommand)]
enum MaterialsCmd {
    /// Names of all catalog materials, one per line.
    List,
    /// Full record of one material as JSON.
    Show { name: String },
}

#[derive(Subcommand)]
enum ModeCmd {
    /// Surface-wave velocity, decay constants and partial-wave amplitudes as
    /// JSON. Without --theta this is the closed-form [110] solution with the
    /// piezoelectric depth profile, the data behind the Rayleigh-constant
    /// and potential-profile tables.
    Solve {
        #[arg(long)]
        material: String,
        /// Propagation angle from [100] in the (001) plane, in degrees (45 is [110]).
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Wavelength for the piezoelectric profile.
        #[arg(long, default_value = "1um", value_parser = units::length)]
        wavelength: f64,
        /// Depth samples of the profile, in units of the wavelength, written as a table.
        #[arg(long, default_value_t = 0)]
        profile_points: usize,
    },
}

#[derive(Subcommand)]
enum ZeropointCmd {
    /// Zero-point table (U0, s0, φ0, ξ0, B0) as CSV for the six reference
    /// materials.
    Table {
        /// Mode area, e.g. 1um2.
        #[arg(long, default_value = "1um2", value_parser = units::area)]
        area: f64,
        /// Wave number in 1/m; defaults to 2π/µm.
        #[arg(long)]
        k: Option<f64>,
    },
}

#[derive(Args, Clone)]
struct CavityGeometryArgs {
    #[arg(long, default_value = "LiNbO3")]
    material: String,
    /// Center frequency, e.g. 3GHz.
    #[arg(long, default_value = "3GHz", value_parser = units::frequency)]
    f_c: f64,
    /// Mirror separation in wavelengths.
    #[arg(long, default_value_t = 5.25)]
    d_over_lambda: f64,
    /// Groove fill factor.
    #[arg(long, default_value_t = 0.5)]
    w_over_p: f64,
    /// Transverse aperture in wavelengths.
    #[arg(long, default_value_t = 1.0)]
    l_trans_over_lambda: f64,
}

impl CavityGeometryArgs {
    fn sweep_geometry(&self) -> SweepGeometry {
        SweepGeometry {
            d_over_lambda: self.d_over_lambda,
            w_over_p: self.w_over_p,
            l_trans_over_lambda: self.l_trans_over_lambda,
        }
    }
}

#[derive(Subcommand)]
enum CavityCmd {
    /// Full loss budget (Q contributions, linewidths, cavity length) for one
    /// mirror design, as JSON.
    Budget {
        #[command(flatten)]
        geom: CavityGeometryArgs,
        /// Grooves per mirror.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Groove depth h/λ.
        #[arg(long, default_value_t = 0.02)]
        h: f64,
    },
    /// Q against groove depth as CSV, the data of the Q-versus-depth curve;
    /// the bulk-conversion onset goes to stderr.
    Sweep {
        #[command(flatten)]
        geom: CavityGeometryArgs,
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 0.0005)]
        h_step: f64,
        #[arg(long, default_value_t = 0.05)]
        h_max: f64,
    },
    /// Smallest mirror meeting a Q target and a minimum κ_gd/κ_bd, as JSON.
    Design {
        #[command(flatten)]
        geom: CavityGeometryArgs,
        #[arg(long, default_value_t = 1000.0)]
        target_q: f64,
        #[arg(long, default_value_t = 20.0)]
        min_ratio: f64,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        #[arg(long, default_value_t = 0.0005)]
        h_step: f64,
        #[arg(long, default_value_t = 0.1)]
        h_max: f64,
    },
}

#[derive(Args)]
struct ModeArgs {
    /// Mode area, e.g. 20um2.
    #[arg(long, default_value = "1um2", value_parser = units::area)]
    area: f64,
}

#[derive(Subcommand)]
enum CoupleCmd {
    /// Charge-qubit coupling g_ch and g_eff in a GaAs double dot.
    Charge {
        #[arg(long, default_value = "GaAs")]
        material: String,
        #[arg(long, default_value = "0.5um", value_parser = units::length)]
        wavelength: f64,
        #[command(flatten)]
        mode: ModeArgs,
        /// Tunnel coupling, e.g. 5ueV.
        #[arg(long, default_value = "5ueV", value_parser = units::energy)]
        t_c: f64,
        #[arg(long, default_value = "0ueV", value_parser = units::energy, allow_hyphen_values = true)]
        epsilon: f64,
        /// Dot separation; defaults to half the wavelength.
        #[arg(long, value_parser = units::length)]
        l: Option<f64>,
        /// Dot depth below the surface.
        #[arg(long, default_value = "50nm", value_parser = units::length)]
        d: f64,
    },
    /// Singlet-triplet spin-qubit coupling from the three-level double-dot spectrum.
    Spin {
        #[arg(long, default_value = "GaAs")]
        material: String,
        #[arg(long, default_value = "0.5um", value_parser = units::length)]
        wavelength: f64,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, default_value = "5ueV", value_parser = units::energy)]
        t_c: f64,
        #[arg(long, default_value = "-7ueV", value_parser = units::energy, allow_hyphen_values = true)]
        epsilon: f64,
        /// Magnetic-gradient splitting.
        #[arg(long, default_value = "1ueV", value_parser = units::energy)]
        delta: f64,
        #[arg(long, default_value = "250nm", value_parser = units::length)]
        l: f64,
        #[arg(long, default_value = "50nm", value_parser = units::length)]
        d: f64,
        /// Geometric factor; defaults to the node-centered optimum 2sin(πl/λ).
        #[arg(long)]
        eta_geo: Option<f64>,
    },
    /// Trapped-ion (⁹Be⁺) coupling above a piezoelectric substrate.
    Ion {
        #[arg(long, default_value = "LiNbO3")]
        material: String,
        #[arg(long, default_value = "2MHz", value_parser = units::frequency)]
        f_c: f64,
        #[command(flatten)]
        mode: ModeArgs,
        /// Trap frequency.
        #[arg(long, default_value = "2MHz", value_parser = units::frequency)]
        trap: f64,
        /// Ion height above the surface.
        #[arg(long, default_value = "30um", value_parser = units::length)]
        d: f64,
    },
    /// NV-center coupling to the stray field of a piezomagnetic film.
    Nv {
        #[arg(long, default_value = "Terfenol-D")]
        material: String,
        #[command(flatten)]
        mode: ModeArgs,
    },
}

#[derive(Subcommand)]
enum CoopCmd {
    /// Cooperativity table for the four qubit platforms as CSV, with a
    /// pass flag per reference endpoint.
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum PulseKind {
    Const,
    Optimal,
}

#[derive(Subcommand)]
enum TransferCmd {
    /// Transfer fidelity of (|0⟩ − |1⟩)/√2 between two cascaded nodes, as
    /// JSON. Rates are given relative to κ_gd; with --sigma > 0 the fidelity
    /// is averaged over quasi-static detunings, the data behind the
    /// fidelity-versus-loss and fidelity-versus-noise curves.
    Run {
        #[arg(long, value_enum, default_value = "optimal")]
        pulse: PulseKind,
        /// Intrinsic loss κ_bd/κ_gd.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Detuning spread σ_nuc/κ_gd.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Markovian dephasing Γ/κ_gd.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Monte Carlo runs; defaults to 1 without detuning noise and 100 with it.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Absolute κ_gd in s⁻¹; results depend only on the ratios.
        #[arg(long, default_value_t = 1.0)]
        kappa_gd: f64,
        /// Fock cutoff per cavity.
        #[arg(long, default_value_t = 2)]
        cutoff: usize,
        /// Also write the noise-free-detuning trajectory as CSV to this path.
        #[arg(long, value_name = "PATH")]
        trajectory: Option<PathBuf>,
    },
}

fn catalog() -> Result<Catalog> {
    match std::env::var_os(CATALOG_ENV) {
        Some(p) => load_catalog(&p).with_context(|| format!("cannot load {CATALOG_ENV}={}", p.to_string_lossy())),
        None => Ok(Catalog::builtin()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> Result<String> {
    Ok(json_string(v)?)
}

fn material<'a>(cat: &'a Catalog, name: &str) -> Result<&'a MaterialRecord> {
    Ok(cat.get(name)?)
}

fn materials(cmd: &MaterialsCmd, cat: &Catalog) -> Result<String> {
    match cmd {
        MaterialsCmd::List => Ok(cat.names().iter().map(|n| format!("{n}\n")).collect()),
        MaterialsCmd::Show { name } => {
            let one = Catalog::new(vec![material(cat, name)?.clone()])?;
            let mut s = one.to_json()?;
            if !s.ends_with('\n') {
                s.push('\n');
            }
            Ok(s)
        }
    }
}

fn mode(cmd: &ModeCmd, cat: &Catalog) -> Result<String> {
    let ModeCmd::Solve {
        material: name,
        theta,
        wavelength,
        profile_points,
    } = cmd;
    let m = material(cat, name)?;
    if let Some(deg) = theta {
        let window = default_window(m).with_context(|| format!("material '{name}' lacks elastic constants"))?;
        let g = solve_general(m, deg.to_radians(), window)?;
        return json_text(&json!({ "material": name, "theta_deg": deg, "solution": g }));
    }
    let sol = solve_110(m)?;
    let k = 2.0 * PI / wavelength;
    let profile = if m.is_piezoelectric() {
        Some(piezo_profile(m, &sol, k)?)
    } else {
        None
    };
    let depth: Vec<Value> = match &profile {
        Some(p) if *profile_points > 1 => (0..*profile_points)
            .map(|i| {
                let s = 2.0 * PI * i as f64 / (*profile_points - 1) as f64;
                json!({ "kz": s, "F": p.f(s) })
            })
            .collect(),
        _ => Vec::new(),
    };
    json_text(&json!({
        "material": name,
        "direction": "[110]",
        "solution": sol,
        "piezo_profile": profile,
        "depth_profile": depth,
    }))
}

fn zeropoint(cmd: &ZeropointCmd, cat: &Catalog) -> Result<String> {
    let ZeropointCmd::Table { area, k } = cmd;
    let geom = ModeGeometry::new(*area, k.unwrap_or(2.0 * PI / MICRON))?;
    let rows: Vec<ZeroPointRow> = zero_point_table(cat, &geom)?.iter().map(ZeroPointRow::from).collect();
    Ok(csv_string(&rows)?)
}

fn cavity_cmd(cmd: &CavityCmd, cat: &Catalog) -> Result<String> {
    match cmd {
        CavityCmd::Budget { geom, n, h } => {
            let m = material(cat, &geom.material)?;
            let lambda = phase_velocity(m)?.0 / geom.f_c;
            let spec = MirrorSpec::new(m, *n, *h, geom.w_over_p)?;
            let b = cavity::budget(
                m,
                &spec,
                geom.d_over_lambda * lambda,
                geom.l_trans_over_lambda * lambda,
                geom.f_c,
            )?;
            json_text(&json!({ "mirror": spec, "budget": b, "L_c_over_lambda": b.l_c / lambda }))
        }
        CavityCmd::Sweep { geom, n, h_step, h_max } => {
            if !(*h_step > 0.0 && h_max >= h_step) {
                bail!("--h-step must be positive and no larger than --h-max");
            }
            let m = material(cat, &geom.material)?;
            let grid = cavity::depth_grid(*h_step, *h_max);
            let sweep = cavity::q_sweep(m, *n, &grid, &geom.sweep_geometry(), geom.f_c)?;
            match cavity::bulk_onset(&sweep) {
                Some(h) => eprintln!("bulk-conversion onset: h/λ = {h:.4}"),
                None => eprintln!("bulk-conversion onset: not reached below h/λ = {h_max}"),
            }
            let rows: Vec<SweepRow> = sweep.iter().map(SweepRow::from).collect();
            Ok(csv_string(&rows)?)
        }
        CavityCmd::Design {
            geom,
            target_q,
            min_ratio,
            n_max,
            h_step,
            h_max,
        } => {
            let m = material(cat, &geom.material)?;
            let grid = DesignGrid {
                n_max: *n_max,
                h_step: *h_step,
                h_max: *h_max,
            };
            let (spec, b) = cavity::design_search(m, geom.f_c, *target_q, *min_ratio, &geom.sweep_geometry(), &grid)?;
            json_text(&json!({ "mirror": spec, "budget": b }))
        }
    }
}

// Surface potential bounds (min, max) and |F(kd)| for a mode of the given area.
fn potential(m: &MaterialRecord, area: f64, k: f64, depth: f64) -> Result<((f64, f64), f64)> {
    let zp = zero_point_set(m, &ModeGeometry::new(area, k)?)?;
    let phi0 = zp
        .phi0
        .with_context(|| format!("material '{}' is not piezoelectric", m.name))?;
    let f = piezo_profile(m, &solve_110(m)?, k)?.f(k * depth).abs();
    Ok((phi0, f))
}

fn couple(cmd: &CoupleCmd, cat: &Catalog) -> Result<String> {
    match cmd {
        CoupleCmd::Charge {
            material: name,
            wavelength,
            mode,
            t_c,
            epsilon,
            l,
            d,
        } => {
            let m = material(cat, name)?;
            let k = 2.0 * PI / wavelength;
            let (phi0, f) = potential(m, mode.area, k, *d)?;
            let p = ChargeQubitParams {
                epsilon: *epsilon,
                t_c: *t_c,
                l: l.unwrap_or(wavelength / 2.0),
                d: *d,
            };
            let c = couplings::g_charge(&p, phi0.0, k, f)?;
            json_text(&json!({ "material": name, "params": p, "phi0": phi0.0, "F_kd": f, "coupling": c }))
        }
        CoupleCmd::Spin {
            material: name,
            wavelength,
            mode,
            t_c,
            epsilon,
            delta,
            l,
            d,
            eta_geo,
        } => {
            let m = material(cat, name)?;
            let k = 2.0 * PI / wavelength;
            let (phi0, f) = potential(m, mode.area, k, *d)?;
            let eta = eta_geo.unwrap_or_else(|| couplings::eta_geo_optimal(*l, *wavelength));
            let p = SpinQubitParams {
                t_c: *t_c,
                epsilon: *epsilon,
                delta: *delta,
                l: *l,
                d: *d,
                eta_geo: eta,
            };
            let g = couplings::g_spin(&p, phi0.0, f)?;
            let s = couplings::dqd_spectrum(*t_c, *epsilon, *delta);
            json_text(&json!({
                "material": name,
                "params": p,
                "phi0": phi0.0,
                "F_kd": f,
                "kappa0_kappa1": s.kappa0_kappa1(),
                "charge_noise_sensitivity": couplings::charge_noise_sensitivity(*t_c, *epsilon, *delta),
                "spectrum": s,
                "g_QD": g,
            }))
        }
        CoupleCmd::Ion {
            material: name,
            f_c,
            mode,
            trap,
            d,
        } => {
            let m = material(cat, name)?;
            let k = 2.0 * PI * f_c / phase_velocity(m)?.0;
            let zp = zero_point_set(m, &ModeGeometry::new(mode.area, k)?)?;
            let phi0 = zp
                .phi0
                .with_context(|| format!("material '{name}' is not piezoelectric"))?
                .1;
            let p = IonParams::beryllium(2.0 * PI * trap, *d);
            let g = couplings::g_ion(&p, phi0, k)?;
            json_text(&json!({
                "material": name,
                "params": p,
                "phi0": phi0,
                "lamb_dicke": k * p.x0(),
                "T2": couplings::ion_t2(*d),
                "g_ion": g,
            }))
        }
        CoupleCmd::Nv { material: name, mode } => {
            let m = material(cat, name)?;
            let zp = zero_point_set(m, &ModeGeometry::new(mode.area, 2.0 * PI / MICRON)?)?;
            let b0 = zp
                .b0
                .with_context(|| format!("material '{name}' is not piezomagnetic"))?;
            let p = NvParams::default();
            let g = couplings::g_nv(&p, b0)?;
            json_text(&json!({ "material": name, "params": p, "B0": b0, "g": g }))
        }
    }
}

fn transfer(cmd: &TransferCmd) -> Result<String> {
    let TransferCmd::Run {
        pulse,
        eps,
        sigma,
        gamma,
        runs,
        seed,
        kappa_gd,
        cutoff,
        trajectory,
    } = cmd;
    for (name, v) in [("--eps", eps), ("--sigma", sigma), ("--gamma", gamma)] {
        if !(*v >= 0.0 && v.is_finite()) {
            bail!("{name} must be a finite ratio ≥ 0, got {v}");
        }
    }
    if !(*kappa_gd > 0.0 && kappa_gd.is_finite()) {
        bail!("--kappa-gd must be positive, got {kappa_gd}");
    }
    let protocol = match pulse {
        PulseKind::Optimal => Protocol::Optimal,
        PulseKind::Const => Protocol::Constant,
    };
    let kappa = *kappa_gd;
    let pulses = TransferPulses::new(protocol, kappa, DEFAULT_HORIZON / kappa)?;
    let noise = NoiseSpec {
        gamma_deph: gamma * kappa,
        sigma_nuc: sigma * kappa,
        seed: *seed,
        ..NoiseSpec::cavity_only(kappa, eps * kappa)
    };
    let cfg = TransferConfig {
        space: HilbertSpec::cascaded(*cutoff),
        ..TransferConfig::default()
    };
    let n_runs = runs.unwrap_or(if *sigma > 0.0 { 100 } else { 1 });
    let psi0 = QubitState::minus();
    let mc = mc_transfer(&pulses, &noise, n_runs, &psi0, &cfg)?;
    let (reference, rows) = transfer_trajectory(&pulses, &noise, [0.0, 0.0], &psi0, &cfg)?;
    if let Some(path) = trajectory {
        let rows: Vec<TrajectoryRow> = rows;
        std::fs::write(path, csv_string(&rows)?).with_context(|| format!("cannot write {}", path.display()))?;
    }
    json_text(&json!({
        "protocol": protocol,
        "kappa_gd": kappa,
        "eps": eps,
        "sigma": sigma,
        "gamma": gamma,
        "fock_cutoff": cutoff,
        "n_runs": mc.n_runs,
        "seed": mc.seed,
        "F_mean": mc.f_mean,
        "F_stderr": mc.f_stderr,
        "F_zero_detuning": reference.fidelity,
        "invariants": reference.invariants,
        "invariants_hold": reference.invariants.holds(),
        "per_run": mc.per_run,
    }))
}

enum Outcome {
    Done,
    ValidationFailed,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let out = cli.out.as_deref();
    if let Some(parent) = out.and_then(Path::parent) {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            bail!("output directory {} does not exist", parent.display());
        }
    }
    let cat = catalog()?;
    let text = match &cli.cmd {
        Command::Materials(c) => materials(c, &cat)?,
        Command::Mode(c) => mode(c, &cat)?,
        Command::Zeropoint(c) => zeropoint(c, &cat)?,
        Command::Cavity(c) => cavity_cmd(c, &cat)?,
        Command::Couple(c) => couple(c, &cat)?,
        Command::Coop(CoopCmd::Table) => csv_string(&couplings::coop_table()?)?,
        Command::Transfer(c) => transfer(c)?,
        Command::Validate => {
            let checks = validate::run_suite(&cat);
            let mut text = String::new();
            for c in &checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
            }
            emit(out, &text)?;
            return Ok(if checks.iter().all(|c| c.pass) {
                Outcome::Done
            } else {
                Outcome::ValidationFailed
            });
        }
    };
    emit(out, &text)?;
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(2),
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
