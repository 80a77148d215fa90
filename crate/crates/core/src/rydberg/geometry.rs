use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atom positions and the quantisation-axis orientation.
///
/// Without explicit positions the atoms sit on the x axis at multiples of
/// `spacing_um`. The quantisation axis lies in the x–y plane at `theta_deg`
/// from the x axis, so every pair of a uniform chain sees the same angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub n_sites: usize,
    pub spacing_um: f64,
    pub theta_deg: f64,
    /// Explicit `[x, y, z]` positions in µm; override the uniform chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions_um: Option<Vec<[f64; 3]>>,
}

/// Cosine and sine of an angle in degrees, exact at multiples of 90°.
pub(crate) fn cos_sin_deg(deg: f64) -> (f64, f64) {
    let quarter = deg / 90.0;
    if quarter.fract() == 0.0 {
        return match (quarter as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
    }
    let r = deg.to_radians();
    (r.cos(), r.sin())
}

impl Geometry {
    pub fn chain(n_sites: usize, spacing_um: f64, theta_deg: f64) -> Self {
        Self { n_sites, spacing_um, theta_deg, positions_um: None }
    }

    pub fn with_sites(&self, n_sites: usize) -> Self {
        Self { n_sites, positions_um: None, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::Config("geometry.n_sites must be positive".into()));
        }
        if !(self.spacing_um > 0.0 && self.spacing_um.is_finite()) {
            return Err(Error::Config("geometry.spacing_um must be positive".into()));
        }
        if !self.theta_deg.is_finite() {
            return Err(Error::Config("geometry.theta_deg must be finite".into()));
        }
        if let Some(p) = &self.positions_um {
            if p.len() != self.n_sites {
                return Err(Error::Config(format!(
                    "geometry.positions_um has {} entries for {} sites",
                    p.len(),
                    self.n_sites
                )));
            }
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    if self.pair_vector(i, j).iter().all(|&x| x == 0.0) {
                        return Err(Error::Config(format!("geometry.positions_um: sites {i} and {j} coincide")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn position(&self, i: usize) -> [f64; 3] {
        match &self.positions_um {
            Some(p) => p[i],
            None => [i as f64 * self.spacing_um, 0.0, 0.0],
        }
    }

    fn pair_vector(&self, i: usize, j: usize) -> [f64; 3] {
        let (a, b) = (self.position(i), self.position(j));
        [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
    }

    /// `a_ij` in µm.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let d = self.pair_vector(i, j);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// `cos θ_ij` between the pair axis and the quantisation axis.
    pub fn cos_angle(&self, i: usize, j: usize) -> f64 {
        let d = self.pair_vector(i, j);
        let (c, s) = cos_sin_deg(self.theta_deg);
        if self.positions_um.is_none() {
            // Collinear chain: the pair axis is ±x.
            return c;
        }
        (d[0] * c + d[1] * s) / self.distance(i, j)
    }

    /// `sin² θ_ij`, computed without cancellation for small angles.
    pub fn sin2_angle(&self, i: usize, j: usize) -> f64 {
        if self.positions_um.is_none() {
            let (_, s) = cos_sin_deg(self.theta_deg);
            return s * s;
        }
        let c = self.cos_angle(i, j);
        (1.0 - c * c).max(0.0)
    }

    /// Copy with every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let positions_um = self.positions_um.as_ref().map(|p| p.iter().map(|x| [x[0] * s, x[1] * s, x[2] * s]).collect());
        Self { spacing_um: self.spacing_um * s, positions_um, ..self.clone() }
    }
}
