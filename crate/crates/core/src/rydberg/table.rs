use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pair channels with a dipolar exchange coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DipoleChannel {
    /// `|↑0⟩ ↔ |0↑⟩`
    UpFlat,
    /// `|↓0⟩ ↔ |0↓⟩`
    DownFlat,
    /// `|↑↓⟩, |↓↑⟩ ↔ |00⟩`
    FlatFlat,
}

/// Pair channels with a van der Waals shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VdwChannel {
    UpFlat,
    DownFlat,
    UpUp,
    DownDown,
    FlatFlat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleCoefficients {
    pub up0: f64,
    pub down0: f64,
    #[serde(rename = "00")]
    pub flat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdwCoefficients {
    pub up0: f64,
    pub down0: f64,
    pub upup: f64,
    pub downdown: f64,
    #[serde(rename = "00")]
    pub flat: f64,
}

/// Förster-resonance data. `c6` is a product of two dipole matrix elements
/// (energy² · length⁶), and `detuning` the pair-state defect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForsterCoefficients {
    pub c6: f64,
    pub detuning: f64,
}

/// Unit strings carried alongside the coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableUnits {
    #[serde(default = "default_c3_unit")]
    pub c3: String,
    #[serde(default = "default_c6_unit")]
    pub c6: String,
    #[serde(default = "default_forster_c6_unit")]
    pub forster_c6: String,
    #[serde(default = "default_detuning_unit")]
    pub forster_detuning: String,
}

fn default_c3_unit() -> String {
    "GHz um^3".into()
}
fn default_c6_unit() -> String {
    "GHz um^6".into()
}
fn default_forster_c6_unit() -> String {
    "GHz^2 um^6".into()
}
fn default_detuning_unit() -> String {
    "MHz".into()
}

impl Default for TableUnits {
    fn default() -> Self {
        Self {
            c3: default_c3_unit(),
            c6: default_c6_unit(),
            forster_c6: default_forster_c6_unit(),
            forster_detuning: default_detuning_unit(),
        }
    }
}

fn canonical_unit(s: &str) -> String {
    s.replace('µ', "u").replace('μ', "u").replace(['*', '·', ' '], "")
}

fn energy_scale(prefix: &str, field: &str, raw: &str) -> Result<f64> {
    match prefix {
        "GHz" => Ok(1e3),
        "MHz" => Ok(1.0),
        "kHz" => Ok(1e-3),
        _ => Err(Error::Config(format!("{field}: unsupported unit {raw:?}"))),
    }
}

fn parse_unit(raw: &str, field: &str, length_power: u32, energy_power: u32) -> Result<f64> {
    let c = canonical_unit(raw);
    let suffix = format!("um^{length_power}");
    let energy = c
        .strip_suffix(&suffix)
        .ok_or_else(|| Error::Config(format!("{field}: expected a unit of energy^{energy_power}·um^{length_power}, got {raw:?}")))?;
    let (prefix, power) = match energy.split_once('^') {
        Some((p, e)) => (p, e.parse::<u32>().map_err(|_| Error::Config(format!("{field}: bad exponent in {raw:?}")))?),
        None => (energy, 1),
    };
    if power != energy_power {
        return Err(Error::Config(format!("{field}: expected energy^{energy_power}, got {raw:?}")));
    }
    Ok(energy_scale(prefix, field, raw)?.powi(energy_power as i32))
}

impl TableUnits {
    /// Factors converting table values to MHz·µm³, MHz·µm⁶, MHz²·µm⁶ and MHz.
    pub fn scales(&self) -> Result<UnitScales> {
        let detuning = energy_scale(&canonical_unit(&self.forster_detuning), "units.forster_detuning", &self.forster_detuning)?;
        Ok(UnitScales {
            c3: parse_unit(&self.c3, "units.c3", 3, 1)?,
            c6: parse_unit(&self.c6, "units.c6", 6, 1)?,
            forster_c6: parse_unit(&self.forster_c6, "units.forster_c6", 6, 2)?,
            forster_detuning: detuning,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitScales {
    pub c3: f64,
    pub c6: f64,
    pub forster_c6: f64,
    pub forster_detuning: f64,
}

/// Interaction coefficients for one atomic species and level choice.
/// Positive values are repulsive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionTable {
    #[serde(default)]
    pub species: String,
    #[serde(default)]
    pub units: TableUnits,
    pub c3: DipoleCoefficients,
    pub c6: VdwCoefficients,
    #[serde(default)]
    pub forster: Option<ForsterCoefficients>,
}

impl InteractionTable {
    /// ⁸⁷Rb, |81S₁/₂⟩, |80P₁/₂⟩, |80S₁/₂⟩ (adiabatic-control model).
    pub fn rb87() -> Self {
        Self {
            species: "87Rb 81S1/2 / 80P1/2 / 80S1/2".into(),
            units: TableUnits::default(),
            c3: DipoleCoefficients { up0: -26.363, down0: -28.711, flat: -27.512 },
            c6: VdwCoefficients { up0: 3883.332, down0: 2766.837, upup: 4648.377, downdown: 3878.318, flat: 1484.518 },
            forster: None,
        }
    }

    /// ¹³³Cs, |81S₁/₂⟩, |80P₃/₂⟩, |80S₁/₂⟩ (fine-tuning model).
    pub fn cs133() -> Self {
        Self {
            species: "133Cs 81S1/2 / 80P3/2 / 80S1/2".into(),
            units: TableUnits::default(),
            c3: DipoleCoefficients { up0: 13.369, down0: 13.966, flat: 16.763 },
            c6: VdwCoefficients { up0: 621.365, down0: 480.496, upup: 3157.912, downdown: 3656.713, flat: -437.895 },
            forster: Some(ForsterCoefficients { c6: 420.38, detuning: -223.2 }),
        }
    }

    /// All coefficients zero, no Förster data.
    pub fn zero() -> Self {
        Self {
            species: "zero".into(),
            units: TableUnits::default(),
            c3: DipoleCoefficients { up0: 0.0, down0: 0.0, flat: 0.0 },
            c6: VdwCoefficients { up0: 0.0, down0: 0.0, upup: 0.0, downdown: 0.0, flat: 0.0 },
            forster: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.units.scales()?;
        let all = [
            ("c3.up0", self.c3.up0),
            ("c3.down0", self.c3.down0),
            ("c3.00", self.c3.flat),
            ("c6.up0", self.c6.up0),
            ("c6.down0", self.c6.down0),
            ("c6.upup", self.c6.upup),
            ("c6.downdown", self.c6.downdown),
            ("c6.00", self.c6.flat),
        ];
        if let Some((name, _)) = all.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Data(format!("{name} is not finite")));
        }
        if let Some(f) = &self.forster {
            if !f.c6.is_finite() || !f.detuning.is_finite() {
                return Err(Error::Data("forster coefficients must be finite".into()));
            }
        }
        Ok(())
    }

    /// `C3` in MHz·µm³.
    pub fn c3_mhz(&self, channel: DipoleChannel) -> Result<f64> {
        let v = match channel {
            DipoleChannel::UpFlat => self.c3.up0,
            DipoleChannel::DownFlat => self.c3.down0,
            DipoleChannel::FlatFlat => self.c3.flat,
        };
        Ok(v * self.units.scales()?.c3)
    }

    /// `C6` in MHz·µm⁶.
    pub fn c6_mhz(&self, channel: VdwChannel) -> Result<f64> {
        let v = match channel {
            VdwChannel::UpFlat => self.c6.up0,
            VdwChannel::DownFlat => self.c6.down0,
            VdwChannel::UpUp => self.c6.upup,
            VdwChannel::DownDown => self.c6.downdown,
            VdwChannel::FlatFlat => self.c6.flat,
        };
        Ok(v * self.units.scales()?.c6)
    }

    /// Förster `C6` in MHz²·µm⁶ and detuning in MHz, when present.
    pub fn forster_mhz(&self) -> Result<Option<(f64, f64)>> {
        let s = self.units.scales()?;
        Ok(self.forster.as_ref().map(|f| (f.c6 * s.forster_c6, f.detuning * s.forster_detuning)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_units() {
        let s = TableUnits::default().scales().unwrap();
        assert_eq!(s.c3, 1e3);
        assert_eq!(s.c6, 1e3);
        assert_eq!(s.forster_c6, 1e6);
        assert_eq!(s.forster_detuning, 1.0);
    }

    #[test]
    fn unit_spellings() {
        let u = TableUnits {
            c3: "MHz·µm^3".into(),
            c6: "GHz*um^6".into(),
            forster_c6: "MHz^2 μm^6".into(),
            forster_detuning: "GHz".into(),
        };
        let s = u.scales().unwrap();
        assert_eq!((s.c3, s.c6, s.forster_c6, s.forster_detuning), (1.0, 1e3, 1.0, 1e3));
    }

    #[test]
    fn bad_units() {
        let mut u = TableUnits::default();
        u.c3 = "GHz um^6".into();
        assert!(u.scales().is_err());
        let mut u = TableUnits::default();
        u.forster_c6 = "GHz um^6".into();
        assert!(u.scales().is_err());
        let mut u = TableUnits::default();
        u.c6 = "eV um^6".into();
        assert!(u.scales().is_err());
    }

    #[test]
    fn fixture_values() {
        let rb = InteractionTable::rb87();
        assert_eq!(rb.c3_mhz(DipoleChannel::FlatFlat).unwrap(), -27512.0);
        assert!(rb.forster_mhz().unwrap().is_none());
        let cs = InteractionTable::cs133();
        assert_eq!(cs.c6.flat, -437.895);
        let (c6, d) = cs.forster_mhz().unwrap().unwrap();
        assert!((c6 - 420.38e6).abs() < 1e-6);
        assert_eq!(d, -223.2);
    }
}
