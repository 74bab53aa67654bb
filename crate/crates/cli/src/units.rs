//! Quantities with unit suffixes, parsed into SI.

use anyhow::{anyhow, bail, Result};

use sawqed::constants::MICRO_EV;

// Splits "1.5e3 kHz" into ("1.5e3", "kHz"); an 'e' followed by a digit or
// sign is an exponent, not a unit.
fn split(s: &str) -> (&str, &str) {
    let s = s.trim();
    let is_exponent = |i: usize, ch: char| {
        matches!(ch, 'e' | 'E') && i > 0 && s[i + 1..].starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+')
    };
    let idx = s
        .char_indices()
        .find(|&(i, ch)| ch.is_alphabetic() && !is_exponent(i, ch))
        .map_or(s.len(), |(i, _)| i);
    (s[..idx].trim(), s[idx..].trim())
}

fn parse_with(s: &str, what: &str, units: &[(&str, f64)]) -> Result<f64> {
    let (num, unit) = split(s);
    let v: f64 = num.parse().map_err(|_| anyhow!("cannot read {what} '{s}'"))?;
    if unit.is_empty() {
        return Ok(v);
    }
    match units.iter().find(|(u, _)| *u == unit) {
        Some((_, scale)) => Ok(v * scale),
        None => {
            let known: Vec<&str> = units.iter().map(|u| u.0).collect();
            bail!("unknown {what} unit '{unit}' in '{s}'; use one of {}", known.join(", "))
        }
    }
}

/// Hz, kHz, MHz or GHz; bare numbers are Hz.
pub fn frequency(s: &str) -> Result<f64> {
    parse_with(s, "frequency", &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)])
}

/// nm, um, µm, mm or m; bare numbers are metres.
pub fn length(s: &str) -> Result<f64> {
    parse_with(
        s,
        "length",
        &[("nm", 1e-9), ("um", 1e-6), ("µm", 1e-6), ("mm", 1e-3), ("m", 1.0)],
    )
}

/// µeV, ueV, meV or eV; bare numbers are µeV. Returned in joules.
pub fn energy(s: &str) -> Result<f64> {
    let v = parse_with(s, "energy", &[("ueV", 1.0), ("µeV", 1.0), ("meV", 1e3), ("eV", 1e6)])?;
    Ok(v * MICRO_EV)
}

/// Area in µm²; accepts um2, um^2, µm² or a bare number.
pub fn area(s: &str) -> Result<f64> {
    let v = parse_with(
        s,
        "area",
        &[("um2", 1.0), ("um^2", 1.0), ("µm2", 1.0), ("µm²", 1.0), ("µm^2", 1.0)],
    )?;
    Ok(v * 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(frequency("3GHz").unwrap(), 3e9);
        assert_eq!(frequency("2.5 MHz").unwrap(), 2.5e6);
        assert_eq!(frequency("1e9").unwrap(), 1e9);
        assert_eq!(frequency("1.5e3kHz").unwrap(), 1.5e6);
        assert!((length("50nm").unwrap() - 50e-9).abs() < 1e-22);
        assert!((length("0.5µm").unwrap() - 0.5e-6).abs() < 1e-20);
        assert!((length("30um").unwrap() - 30e-6).abs() < 1e-18);
        assert!((energy("10ueV").unwrap() - 10.0 * MICRO_EV).abs() < 1e-35);
        assert!((energy("-7").unwrap() + 7.0 * MICRO_EV).abs() < 1e-35);
        assert!((area("2um2").unwrap() - 2e-12).abs() < 1e-25);
        assert!(frequency("3 parsecs").is_err());
        assert!(length("fast").is_err());
    }
}
