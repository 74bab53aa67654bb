//! Coupling pulses g(t) and the time-symmetric wavepacket construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampled pulse on a uniform grid, linearly interpolated and held constant
/// beyond the end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampled {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.values.len() - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.t0 + self.dt * i as f64).collect()
    }

    fn value(&self, t: f64) -> f64 {
        let n = self.values.len();
        let x = (t - self.t0) / self.dt;
        if x <= 0.0 {
            return self.values[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= n {
            return self.values[n - 1];
        }
        let f = x - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            t0: -self.t_end(),
            dt: self.dt,
            values,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("pulse has no samples".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite() && self.t0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "pulse dt must be positive, got {}",
                self.dt
            )));
        }
        if let Some(v) = self.values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "pulse sample {v} is not a finite non-negative value"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseSpec {
    /// `amplitude` on [t_on, t_off), zero elsewhere; either end may be infinite.
    Constant {
        amplitude: f64,
        t_on: f64,
        t_off: f64,
    },
    /// Output of [`optimal_pulse`]: emits a sech-shaped, time-symmetric wavepacket.
    SymmetricWavepacket(Sampled),
    Samples(Sampled),
}

impl PulseSpec {
    pub fn zero() -> Self {
        PulseSpec::Constant {
            amplitude: 0.0,
            t_on: f64::NEG_INFINITY,
            t_off: f64::INFINITY,
        }
    }

    pub fn constant_from(amplitude: f64, t_on: f64) -> Self {
        PulseSpec::Constant {
            amplitude,
            t_on,
            t_off: f64::INFINITY,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            PulseSpec::Constant { amplitude, t_on, t_off } => {
                if t >= *t_on && t < *t_off {
                    *amplitude
                } else {
                    0.0
                }
            }
            PulseSpec::SymmetricWavepacket(s) | PulseSpec::Samples(s) => s.value(t),
        }
    }

    /// g(-t).
    pub fn time_reversed(&self) -> Self {
        match self {
            PulseSpec::Constant { amplitude, t_on, t_off } => PulseSpec::Constant {
                amplitude: *amplitude,
                t_on: -*t_off,
                t_off: -*t_on,
            },
            PulseSpec::SymmetricWavepacket(s) => PulseSpec::SymmetricWavepacket(s.reversed()),
            PulseSpec::Samples(s) => PulseSpec::Samples(s.reversed()),
        }
    }

    /// Finite times where the pulse is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            PulseSpec::Constant { t_on, t_off, .. } => [*t_on, *t_off].into_iter().filter(|t| t.is_finite()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn samples(&self) -> Option<&Sampled> {
        match self {
            PulseSpec::SymmetricWavepacket(s) | PulseSpec::Samples(s) => Some(s),
            PulseSpec::Constant { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PulseSpec::Constant { amplitude, t_on, t_off } => {
                if !(*amplitude >= 0.0 && amplitude.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "pulse amplitude {amplitude} must be ≥ 0"
                    )));
                }
                if t_on.is_nan() || t_off.is_nan() || t_on > t_off {
                    return Err(Error::InvalidArgument("pulse window must satisfy t_on ≤ t_off".into()));
                }
                Ok(())
            }
            PulseSpec::SymmetricWavepacket(s) | PulseSpec::Samples(s) => s.validate(),
        }
    }
}

/// Fraction of the wavepacket emitted at which the inversion stops.
pub const EMISSION_CUTOFF: f64 = 0.999;
/// Amplitude cap in units of κ_gd.
pub const AMPLITUDE_CAP: f64 = 10.0;
/// Sample spacing in units of 1/κ_gd.
pub const SAMPLE_STEP: f64 = 0.01;

/// Target output amplitude for a unit excitation: flux E² integrates to one
/// and is symmetric in t.
pub fn target_amplitude(kappa: f64, t: f64) -> f64 {
    0.5 * kappa.sqrt() / (0.5 * kappa * t).cosh()
}

/// Coupling g₁(t) on [-horizon, horizon] that makes a cavity with amplitude
/// decay κ (Lindblad rate 2κ) emit the sech wavepacket, and its time reverse g₂.
///
/// With real amplitudes c_e (qubit) and -i·A (cavity) the no-jump equations
/// give Ȧ = g c_e − κA and c_e² = 1 − A² − P, where P is the emitted fraction.
/// Given the target A = E/√(2κ), both are evaluated on the sample grid and
/// solved for g. P starts from the target mass emitted before −horizon.
pub fn optimal_pulse(kappa_gd: f64, horizon: f64) -> Result<(PulseSpec, PulseSpec)> {
    if !(kappa_gd > 0.0 && kappa_gd.is_finite()) {
        return Err(Error::InvalidArgument(format!("κ_gd must be positive, got {kappa_gd}")));
    }
    if !(horizon * kappa_gd >= 10.0 - 1e-12) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "pulse horizon must be at least 10/κ_gd, got {:.3}/κ_gd",
            horizon * kappa_gd
        )));
    }
    let dt = SAMPLE_STEP / kappa_gd;
    let steps = (2.0 * horizon / dt).round() as usize;
    let t0 = -horizon;
    let ts: Vec<f64> = (0..=steps).map(|i| t0 + dt * i as f64).collect();
    let amp: Vec<f64> = ts
        .iter()
        .map(|&t| target_amplitude(kappa_gd, t) / (2.0 * kappa_gd).sqrt())
        .collect();
    let flux: Vec<f64> = amp.iter().map(|a| 2.0 * kappa_gd * a * a).collect();

    let cap = AMPLITUDE_CAP * kappa_gd;
    let mut values = Vec::with_capacity(ts.len());
    let mut emitted = 0.5 * (1.0 - (0.5 * kappa_gd * horizon).tanh());
    let mut held: Option<f64> = None;
    let mut capped = 0usize;
    for i in 0..ts.len() {
        if i > 0 {
            emitted += 0.5 * dt * (flux[i - 1] + flux[i]);
        }
        if let Some(g) = held {
            values.push(g);
            continue;
        }
        let da = if i == 0 {
            (amp[1] - amp[0]) / dt
        } else if i == ts.len() - 1 {
            (amp[i] - amp[i - 1]) / dt
        } else {
            (amp[i + 1] - amp[i - 1]) / (2.0 * dt)
        };
        let ce2 = 1.0 - amp[i] * amp[i] - emitted;
        let mut g = if ce2 > 0.0 {
            (da + kappa_gd * amp[i]) / ce2.sqrt()
        } else {
            cap
        };
        if g > cap {
            g = cap;
            capped += 1;
        }
        values.push(g.max(0.0));
        if emitted >= EMISSION_CUTOFF {
            held = Some(values[i]);
        }
    }
    if capped > 0 {
        log::warn!("optimal pulse: {capped} samples capped at {AMPLITUDE_CAP}κ_gd");
    }
    let g1 = PulseSpec::SymmetricWavepacket(Sampled { t0, dt, values });
    let g2 = g1.time_reversed();
    Ok((g1, g2))
}
