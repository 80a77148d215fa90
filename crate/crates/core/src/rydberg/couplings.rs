use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::geometry::{cos_sin_deg, Geometry};
use super::table::{DipoleChannel, InteractionTable, VdwChannel};
use crate::error::{domain, Error, Result};

/// Sign applied to the dipolar exchange matrix elements.
///
/// `Negative` puts `−J` on `|↑0⟩⟨0↑|` and friends. That is the sign of the
/// exchange pairs inside the Motzkin projector, and with it the ⁸⁷Rb
/// ground energies for N = 2, 3, 4 come out at −51.2, −73.5 and −110.9 MHz.
/// `Literal` uses `+J`; N = 2 is unchanged but N = 3, 4 give −62.6 and
/// −95.3 MHz.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExchangeSign {
    #[default]
    Negative,
    Literal,
}

impl ExchangeSign {
    pub fn factor(self) -> f64 {
        match self {
            ExchangeSign::Negative => -1.0,
            ExchangeSign::Literal => 1.0,
        }
    }
}

/// How a Hamiltonian in MHz turns into a propagator phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseConvention {
    /// `exp(-i H t)`: 1 MHz × 1 µs is one radian.
    #[default]
    Plain,
    /// `exp(-2πi H t)`: energies are read as ordinary frequencies.
    Angular,
}

impl PhaseConvention {
    pub fn scale(self) -> f64 {
        match self {
            PhaseConvention::Plain => 1.0,
            PhaseConvention::Angular => TAU,
        }
    }
}

/// Model-level conventions layered on top of the tabulated coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelOptions {
    pub kappa_dip: f64,
    pub kappa_vdw: f64,
    pub exchange_sign: ExchangeSign,
    /// Drop pairs farther apart than this many µm.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interaction_cutoff_um: Option<f64>,
    pub phase_convention: PhaseConvention,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            kappa_dip: 0.5,
            kappa_vdw: 1.0,
            exchange_sign: ExchangeSign::Negative,
            interaction_cutoff_um: None,
            phase_convention: PhaseConvention::Plain,
        }
    }
}

impl ModelOptions {
    pub fn validate(&self) -> Result<()> {
        if !self.kappa_dip.is_finite() || !self.kappa_vdw.is_finite() {
            return Err(Error::Config("model.kappa_dip and model.kappa_vdw must be finite".into()));
        }
        if let Some(c) = self.interaction_cutoff_um {
            if !(c > 0.0) {
                return Err(Error::Config("model.interaction_cutoff_um must be positive".into()));
            }
        }
        Ok(())
    }

    /// Whether the pair `(i, j)` lies within the interaction cutoff.
    pub fn includes_pair(&self, geometry: &Geometry, i: usize, j: usize) -> bool {
        self.interaction_cutoff_um.is_none_or(|c| geometry.distance(i, j) <= c * (1.0 + 1e-12))
    }
}

fn check_pair(geometry: &Geometry, i: usize, j: usize) -> Result<()> {
    if i == j {
        return Err(domain(format!("pair coupling needs two distinct sites, got {i} twice")));
    }
    let n = geometry.n_sites;
    if i >= n || j >= n {
        return Err(domain(format!("site pair ({i}, {j}) outside a chain of {n} sites")));
    }
    Ok(())
}

/// `κ_dip · C3 (1 − 3cos²θ_ij) / a_ij³` in MHz, before the exchange sign.
pub fn pair_dipole_coupling(
    table: &InteractionTable,
    geometry: &Geometry,
    options: &ModelOptions,
    i: usize,
    j: usize,
    channel: DipoleChannel,
) -> Result<f64> {
    check_pair(geometry, i, j)?;
    let a = geometry.distance(i, j);
    let c = geometry.cos_angle(i, j);
    Ok(options.kappa_dip * table.c3_mhz(channel)? * (1.0 - 3.0 * c * c) / (a * a * a))
}

/// `κ_vdw · C6 / a_ij⁶` in MHz.
pub fn pair_vdw_shift(
    table: &InteractionTable,
    geometry: &Geometry,
    options: &ModelOptions,
    i: usize,
    j: usize,
    channel: VdwChannel,
) -> Result<f64> {
    check_pair(geometry, i, j)?;
    let a = geometry.distance(i, j);
    Ok(options.kappa_vdw * table.c6_mhz(channel)? / a.powi(6))
}

/// Förster-mediated coupling shared by the `|↑↓⟩`/`|↓↑⟩` diagonal and the
/// `|↑↓⟩⟨↓↑|` exchange.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForsterCoupling {
    pub diagonal: f64,
    pub off_diagonal: f64,
    /// The table carries no Förster data; both couplings are zero.
    pub missing_data: bool,
}

/// `9 sin²θ cos²θ · C6_F / (a⁶ Δ)` in MHz.
pub fn pair_forster(table: &InteractionTable, geometry: &Geometry, i: usize, j: usize) -> Result<ForsterCoupling> {
    check_pair(geometry, i, j)?;
    let Some((c6, delta)) = table.forster_mhz()? else {
        return Ok(ForsterCoupling { diagonal: 0.0, off_diagonal: 0.0, missing_data: true });
    };
    if delta == 0.0 {
        return Err(Error::Numerical("Förster detuning is zero: coupling is singular".into()));
    }
    let a = geometry.distance(i, j);
    let c = geometry.cos_angle(i, j);
    let s2 = geometry.sin2_angle(i, j);
    let v = 9.0 * s2 * c * c * c6 / (a.powi(6) * delta);
    Ok(ForsterCoupling { diagonal: v, off_diagonal: v, missing_data: false })
}

/// `1 − 3cos²θ` for a bare angle, exact where the cosine is.
pub fn dipolar_angle_factor(theta_deg: f64) -> f64 {
    let (c, _) = cos_sin_deg(theta_deg);
    1.0 - 3.0 * c * c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb(a: f64) -> (InteractionTable, Geometry, ModelOptions) {
        (InteractionTable::rb87(), Geometry::chain(2, a, 35.1), ModelOptions::default())
    }

    #[test]
    fn rb_flat_channel() {
        let (t, g, o) = rb(7.0);
        // -27.512e3 * (1 - 3 cos²35.1°) / 343 / 2
        let c = 35.1f64.to_radians().cos();
        let expected = 0.5 * -27512.0 * (1.0 - 3.0 * c * c) / 343.0;
        let j = pair_dipole_coupling(&t, &g, &o, 0, 1, DipoleChannel::FlatFlat).unwrap();
        assert!((j - expected).abs() < 1e-12);
        assert!((j - 40.4).abs() < 0.1);
        let v = pair_vdw_shift(&t, &g, &o, 0, 1, VdwChannel::FlatFlat).unwrap();
        assert!((v - 12.62).abs() < 0.01);
    }

    #[test]
    fn magic_angle_and_scaling() {
        let (t, _, o) = rb(7.0);
        let magic = (1.0f64 / 3.0).sqrt().acos().to_degrees();
        let g = Geometry::chain(2, 7.0, magic);
        for ch in [DipoleChannel::UpFlat, DipoleChannel::DownFlat, DipoleChannel::FlatFlat] {
            assert!(pair_dipole_coupling(&t, &g, &o, 0, 1, ch).unwrap().abs() < 1e-6);
        }
        let (_, g1, _) = rb(7.0);
        let (_, g2, _) = rb(14.0);
        let j1 = pair_dipole_coupling(&t, &g1, &o, 0, 1, DipoleChannel::UpFlat).unwrap();
        let j2 = pair_dipole_coupling(&t, &g2, &o, 0, 1, DipoleChannel::UpFlat).unwrap();
        assert_eq!(j2, j1 / 8.0);
        let v1 = pair_vdw_shift(&t, &g1, &o, 0, 1, VdwChannel::UpUp).unwrap();
        let v2 = pair_vdw_shift(&t, &g2, &o, 0, 1, VdwChannel::UpUp).unwrap();
        assert_eq!(v2, v1 / 64.0);
    }

    #[test]
    fn forster_cases() {
        let cs = InteractionTable::cs133();
        for theta in [0.0, 90.0] {
            let f = pair_forster(&cs, &Geometry::chain(2, 8.69, theta), 0, 1).unwrap();
            assert_eq!(f.diagonal, 0.0);
        }
        let f = pair_forster(&cs, &Geometry::chain(2, 8.69, 9.376), 0, 1).unwrap();
        assert!(f.diagonal < 0.0 && f.diagonal.is_finite());
        assert_eq!(f.diagonal, f.off_diagonal);
        let rb = pair_forster(&InteractionTable::rb87(), &Geometry::chain(2, 7.0, 35.1), 0, 1).unwrap();
        assert!(rb.missing_data && rb.diagonal == 0.0);
        let mut zero_delta = cs.clone();
        zero_delta.forster.as_mut().unwrap().detuning = 0.0;
        assert!(pair_forster(&zero_delta, &Geometry::chain(2, 8.69, 30.0), 0, 1).is_err());
    }

    #[test]
    fn bad_pairs() {
        let (t, g, o) = rb(7.0);
        assert!(pair_dipole_coupling(&t, &g, &o, 1, 1, DipoleChannel::UpFlat).is_err());
        assert!(pair_vdw_shift(&t, &g, &o, 0, 2, VdwChannel::UpFlat).is_err());
    }
}
