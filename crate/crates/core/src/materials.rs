//! Material constants catalog.
//!
//! Records are stored in SI units. The JSON catalog format uses 10¹⁰ N/m²
//! for the elastic constants and SI for everything else.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::ELASTIC_UNIT;
use crate::error::{Error, Result};

/// Default material-loss bound Q·f in GHz.
pub const DEFAULT_QM_F_PRODUCT: f64 = 1e5;

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialRecord {
    pub name: String,
    /// Elastic stiffness [N/m²]; absent for records that only carry a velocity.
    pub c11: Option<f64>,
    pub c12: Option<f64>,
    pub c44: Option<f64>,
    /// Mass density [kg/m³].
    pub density: f64,
    /// Piezoelectric coefficient [C/m²]. For anisotropic crystals this is the
    /// smallest non-zero tensor element; `e_max` holds the largest.
    pub e14: f64,
    pub e_max: Option<f64>,
    /// Relative permittivity bounds (min, max); equal for cubic crystals.
    pub eps_rel: (f64, f64),
    /// Piezomagnetic coefficient [T per unit strain].
    pub h15: Option<f64>,
    /// Measured SAW phase velocity for a standard cut [m/s].
    pub saw_velocity: Option<f64>,
    /// Bulk shear velocity [m/s], used when no surface velocity is known.
    pub shear_velocity: Option<f64>,
    pub mirror_c1: Option<f64>,
    pub mirror_c2: Option<f64>,
    pub bulk_cb: Option<f64>,
    pub qm_f_product: Option<f64>,
    /// Only rough estimates are possible (no elastic tensor available).
    pub estimate_only: bool,
}

impl MaterialRecord {
    pub fn is_piezoelectric(&self) -> bool {
        self.e14 != 0.0
    }

    pub fn elastic(&self) -> Option<(f64, f64, f64)> {
        Some((self.c11?, self.c12?, self.c44?))
    }

    pub fn eps_min(&self) -> f64 {
        self.eps_rel.0
    }

    pub fn eps_max(&self) -> f64 {
        self.eps_rel.1
    }

    pub fn e_upper(&self) -> f64 {
        self.e_max.unwrap_or(self.e14)
    }

    pub fn qm_f(&self) -> f64 {
        self.qm_f_product.unwrap_or(DEFAULT_QM_F_PRODUCT)
    }

    /// Bulk shear velocity √(c44/ρ), or the tabulated fallback.
    pub fn bulk_shear_velocity(&self) -> Option<f64> {
        match self.c44 {
            Some(c44) => Some((c44 / self.density).sqrt()),
            None => self.shear_velocity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |field: &'static str, reason: String| Error::Validation {
            record: self.name.clone(),
            field,
            reason,
        };
        if self.name.trim().is_empty() {
            return Err(fail("name", "empty".into()));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(fail("density", format!("must be > 0, got {}", self.density)));
        }
        match (self.c11, self.c12, self.c44) {
            (None, None, None) => {}
            (Some(c11), Some(c12), Some(c44)) => {
                if !(c44 > 0.0 && c44.is_finite()) {
                    return Err(fail("c44", format!("must be > 0, got {c44}")));
                }
                if !(c11 > c12.abs() && c11.is_finite()) {
                    return Err(fail("c11", format!("must exceed |c12| = {}", c12.abs())));
                }
            }
            _ => {
                return Err(fail("c11", "c11, c12 and c44 must be given together".into()));
            }
        }
        if !self.e14.is_finite() {
            return Err(fail("e14", "not finite".into()));
        }
        if let Some(e) = self.e_max {
            if !(e.is_finite() && e.abs() >= self.e14.abs()) {
                return Err(fail("e_max", format!("must be ≥ |e14|, got {e}")));
            }
        }
        let (lo, hi) = self.eps_rel;
        if !(lo >= 1.0 && hi >= lo && hi.is_finite()) {
            return Err(fail("eps_rel", format!("need 1 ≤ min ≤ max, got ({lo}, {hi})")));
        }
        if let Some(h) = self.h15 {
            if !(h >= 0.0 && h.is_finite()) {
                return Err(fail("h15", format!("must be ≥ 0, got {h}")));
            }
        }
        for (field, v) in [
            ("saw_velocity", self.saw_velocity),
            ("shear_velocity", self.shear_velocity),
            ("qm_f_product", self.qm_f_product),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(fail(field, format!("must be > 0, got {v}")));
                }
            }
        }
        for (field, v) in [
            ("mirror_C1", self.mirror_c1),
            ("mirror_C2", self.mirror_c2),
            ("bulk_Cb", self.bulk_cb),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(fail(field, format!("must be ≥ 0, got {v}")));
                }
            }
        }
        if self.c44.is_none() && self.saw_velocity.is_none() && self.shear_velocity.is_none() {
            return Err(fail(
                "shear_velocity",
                "no elastic constants and no velocity given".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Permittivity {
    Scalar(f64),
    Bounds([f64; 2]),
}

/// On-disk form of a record (elastic constants in 10¹⁰ N/m²).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c11: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c12: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c44: Option<f64>,
    density: f64,
    #[serde(default)]
    e14: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e_max: Option<f64>,
    eps_rel: Permittivity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h15: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    saw_velocity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shear_velocity: Option<f64>,
    #[serde(rename = "mirror_C1", default, skip_serializing_if = "Option::is_none")]
    mirror_c1: Option<f64>,
    #[serde(rename = "mirror_C2", default, skip_serializing_if = "Option::is_none")]
    mirror_c2: Option<f64>,
    #[serde(rename = "bulk_Cb", default, skip_serializing_if = "Option::is_none")]
    bulk_cb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    qm_f_product: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    estimate_only: bool,
}

impl From<RecordFile> for MaterialRecord {
    fn from(f: RecordFile) -> Self {
        let si = |c: Option<f64>| c.map(|c| c * ELASTIC_UNIT);
        let eps_rel = match f.eps_rel {
            Permittivity::Scalar(e) => (e, e),
            Permittivity::Bounds([lo, hi]) => (lo, hi),
        };
        MaterialRecord {
            name: f.name,
            c11: si(f.c11),
            c12: si(f.c12),
            c44: si(f.c44),
            density: f.density,
            e14: f.e14,
            e_max: f.e_max,
            eps_rel,
            h15: f.h15,
            saw_velocity: f.saw_velocity,
            shear_velocity: f.shear_velocity,
            mirror_c1: f.mirror_c1,
            mirror_c2: f.mirror_c2,
            bulk_cb: f.bulk_cb,
            qm_f_product: f.qm_f_product,
            estimate_only: f.estimate_only,
        }
    }
}

impl From<&MaterialRecord> for RecordFile {
    fn from(r: &MaterialRecord) -> Self {
        let unit = |c: Option<f64>| c.map(|c| c / ELASTIC_UNIT);
        let eps_rel = if r.eps_rel.0 == r.eps_rel.1 {
            Permittivity::Scalar(r.eps_rel.0)
        } else {
            Permittivity::Bounds([r.eps_rel.0, r.eps_rel.1])
        };
        RecordFile {
            name: r.name.clone(),
            c11: unit(r.c11),
            c12: unit(r.c12),
            c44: unit(r.c44),
            density: r.density,
            e14: r.e14,
            e_max: r.e_max,
            eps_rel,
            h15: r.h15,
            saw_velocity: r.saw_velocity,
            shear_velocity: r.shear_velocity,
            mirror_c1: r.mirror_c1,
            mirror_c2: r.mirror_c2,
            bulk_cb: r.bulk_cb,
            qm_f_product: r.qm_f_product,
            estimate_only: r.estimate_only,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    records: Vec<MaterialRecord>,
}

impl Catalog {
    pub fn new(records: Vec<MaterialRecord>) -> Result<Self> {
        for r in &records {
            r.validate()?;
        }
        Ok(Catalog { records })
    }

    pub fn builtin() -> Self {
        Catalog {
            records: builtin_catalog(),
        }
    }

    pub fn records(&self) -> &[MaterialRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.name.as_str()).collect()
    }

    /// Exact, case-sensitive lookup.
    pub fn get(&self, name: &str) -> Result<&MaterialRecord> {
        self.records
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::MaterialNotFound {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    /// Inserts or replaces by name, keeping catalog order for replaced entries.
    pub fn upsert(&mut self, record: MaterialRecord) -> Result<()> {
        record.validate()?;
        match self.records.iter_mut().find(|r| r.name == record.name) {
            Some(slot) => *slot = record,
            None => self.records.push(record),
        }
        Ok(())
    }

    /// Merges user records over this catalog; user entries shadow by name.
    pub fn merged(mut self, user: Vec<MaterialRecord>) -> Result<Self> {
        for r in user {
            self.upsert(r)?;
        }
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let file: Vec<RecordFile> = self.records.iter().map(RecordFile::from).collect();
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

pub fn get<'a>(catalog: &'a Catalog, name: &str) -> Result<&'a MaterialRecord> {
    catalog.get(name)
}

/// Parses a JSON array of records and validates each one.
pub fn parse_records(text: &str) -> Result<Vec<MaterialRecord>> {
    let file: Vec<RecordFile> = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let records: Vec<MaterialRecord> = file.into_iter().map(MaterialRecord::from).collect();
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

/// Built-in catalog with the user file merged on top.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog> {
    let text = std::fs::read_to_string(path)?;
    Catalog::builtin().merged(parse_records(&text)?)
}

fn cubic(name: &str, c11: f64, c12: f64, c44: f64, density: f64, e14: f64, eps: f64) -> MaterialRecord {
    MaterialRecord {
        name: name.into(),
        c11: Some(c11 * ELASTIC_UNIT),
        c12: Some(c12 * ELASTIC_UNIT),
        c44: Some(c44 * ELASTIC_UNIT),
        density,
        e14,
        e_max: None,
        eps_rel: (eps, eps),
        h15: None,
        saw_velocity: None,
        shear_velocity: None,
        mirror_c1: None,
        mirror_c2: None,
        bulk_cb: None,
        qm_f_product: None,
        estimate_only: false,
    }
}

fn velocity_only(name: &str, density: f64, velocity: f64) -> MaterialRecord {
    MaterialRecord {
        name: name.into(),
        c11: None,
        c12: None,
        c44: None,
        density,
        e14: 0.0,
        e_max: None,
        eps_rel: (1.0, 1.0),
        h15: None,
        saw_velocity: Some(velocity),
        shear_velocity: None,
        mirror_c1: None,
        mirror_c2: None,
        bulk_cb: None,
        qm_f_product: None,
        estimate_only: false,
    }
}

pub fn builtin_catalog() -> Vec<MaterialRecord> {
    let gaas = cubic("GaAs", 12.26, 5.71, 6.00, 5307.0, 0.157, 11.0);
    let algaas = cubic("Al0.3Ga0.7As", 12.41, 5.72, 5.99, 4880.0, 0.145, 12.0);
    let diamond = cubic("Diamond", 107.9, 12.4, 57.8, 3515.0, 0.0, 5.7);

    // Y-Z cut; e and ε bounds span the non-zero tensor elements.
    let linbo3 = MaterialRecord {
        e14: 0.2,
        e_max: Some(3.7),
        eps_rel: (29.0, 44.0),
        mirror_c1: Some(0.67),
        mirror_c2: Some(42.0),
        bulk_cb: Some(8.7),
        ..velocity_only("LiNbO3", 4700.0, 3488.0)
    };

    // ST cut. The density reproduces the tabulated ρ·v_s of the
    // zero-point estimates; crystalline α-quartz is 2648 kg/m³.
    let quartz = MaterialRecord {
        e14: 0.0406,
        e_max: Some(0.171),
        eps_rel: (4.43, 4.63),
        bulk_cb: Some(10.0),
        ..velocity_only("Quartz", 2200.0, 3158.0)
    };

    let terfenol = MaterialRecord {
        h15: Some(167.0),
        saw_velocity: None,
        shear_velocity: Some(1190.0),
        estimate_only: true,
        ..velocity_only("Terfenol-D", 9250.0, 1190.0)
    };

    let cofe2o4 = MaterialRecord {
        h15: Some(550.0),
        saw_velocity: None,
        shear_velocity: Some(3020.0),
        estimate_only: true,
        ..velocity_only("CoFe2O4", 5290.0, 3020.0)
    };

    vec![gaas, algaas, diamond, linbo3, quartz, terfenol, cofe2o4]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaas_constants_in_si() {
        let cat = Catalog::builtin();
        let g = cat.get("GaAs").unwrap();
        assert_eq!(g.c11, Some(12.26e10));
        assert_eq!(g.e14, 0.157);
        assert_eq!(g.density, 5307.0);
    }

    #[test]
    fn diamond_is_not_piezoelectric() {
        let cat = Catalog::builtin();
        assert!(!cat.get("Diamond").unwrap().is_piezoelectric());
    }

    #[test]
    fn linbo3_mirror_coefficients() {
        let cat = Catalog::builtin();
        let l = cat.get("LiNbO3").unwrap();
        assert_eq!(l.mirror_c1, Some(0.67));
        assert_eq!(l.mirror_c2, Some(42.0));
        assert_eq!(l.bulk_cb, Some(8.7));
    }

    #[test]
    fn lookup_is_case_sensitive() {
        let cat = Catalog::builtin();
        let err = cat.get("gaas").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("GaAs"), "{msg}");
        assert_eq!(cat.get("Quartz").unwrap().saw_velocity, Some(3158.0));
    }

    #[test]
    fn builtin_records_validate() {
        for r in builtin_catalog() {
            r.validate().unwrap();
        }
    }

    #[test]
    fn piezomagnetic_records_are_estimate_only() {
        let cat = Catalog::builtin();
        for name in ["Terfenol-D", "CoFe2O4"] {
            let r = cat.get(name).unwrap();
            assert!(r.estimate_only);
            assert!(r.elastic().is_none());
            assert!(r.h15.unwrap() > 0.0);
        }
    }

    #[test]
    fn negative_density_names_field() {
        let text = r#"[{"name": "X", "c11": 10, "c12": 4, "c44": 3, "density": -1, "e14": 0, "eps_rel": 10}]"#;
        let err = parse_records(text).unwrap_err();
        assert!(err.to_string().contains("density"), "{err}");
    }

    #[test]
    fn unknown_field_rejected_with_line() {
        let text = "[\n{\"name\": \"X\", \"density\": 1000, \"saw_velocity\": 3000,\n \"eps_rel\": 2, \"colour\": 1}]";
        match parse_records(text).unwrap_err() {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("colour"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn permittivity_pair_and_scalar() {
        let text = r#"[{"name": "A", "density": 1000, "saw_velocity": 3000, "eps_rel": [3, 5]},
                       {"name": "B", "density": 1000, "saw_velocity": 3000, "eps_rel": 4}]"#;
        let r = parse_records(text).unwrap();
        assert_eq!(r[0].eps_rel, (3.0, 5.0));
        assert_eq!(r[1].eps_rel, (4.0, 4.0));
    }

    #[test]
    fn partial_elastic_constants_rejected() {
        let text = r#"[{"name": "X", "c11": 10, "density": 1000, "eps_rel": 2}]"#;
        assert!(parse_records(text).is_err());
    }
}
