//! CODATA constants in SI units.

pub const HBAR: f64 = 1.054_571_817e-34;
pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const K_B: f64 = 1.380_649e-23;
pub const AMU: f64 = 1.660_539_066_60e-27;

/// One micro-electronvolt in joules.
pub const MICRO_EV: f64 = 1e-6 * E_CHARGE;
pub const MICRON: f64 = 1e-6;
pub const NM: f64 = 1e-9;
/// Catalog unit for elastic constants, 10¹⁰ N/m².
pub const ELASTIC_UNIT: f64 = 1e10;

/// Angular frequency of an energy in joules.
pub fn energy_to_rate(e: f64) -> f64 {
    e / HBAR
}
