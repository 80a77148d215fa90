//! TOML run configuration.
//!
//! A run file carries the interaction table verbatim, the array geometry,
//! model conventions and one section per pipeline. Every section except
//! `interactions` and `geometry` has defaults. Unknown keys are rejected
//! and errors name the offending field path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::ProtocolSettings;
use crate::error::{Error, Result};
use crate::grape::{ControlMode, GrapeSettings};
use crate::rydberg::{DetuningPlan, Geometry, InteractionTable, Level, ModelOptions};
use crate::spectra::{LanczosOptions, DEFAULT_DENSE_CAP};

const RB87_ADIABATIC: &str = include_str!("../fixtures/rb87_adiabatic.toml");
const CS133_FINETUNE: &str = include_str!("../fixtures/cs133_finetune.toml");

/// Names of the run files shipped with the crate.
pub const FIXTURES: [&str; 2] = ["rb87_adiabatic", "cs133_finetune"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub spacing_um: f64,
    pub theta_deg: f64,
    /// Explicit positions; only usable for runs with exactly this many sites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions_um: Option<Vec<[f64; 3]>>,
}

impl GeometryConfig {
    pub fn for_sites(&self, n: usize) -> Result<Geometry> {
        let g = Geometry { n_sites: n, spacing_um: self.spacing_um, theta_deg: self.theta_deg, positions_um: self.positions_um.clone() };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub n_values: Vec<usize>,
    /// Largest dimension diagonalised densely.
    pub dense_cap: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self { n_values: vec![2, 3, 4], dense_cap: DEFAULT_DENSE_CAP }
    }
}

/// Where the protocol's initial state comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// GRAPE preparation up to `grape_max_sites`, solver ground state above.
    #[default]
    Auto,
    Grape,
    Ground,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningTarget {
    pub site: usize,
    pub level: Level,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub n_values: Vec<usize>,
    pub durations_us: Vec<f64>,
    pub delta_max_mhz: f64,
    pub omega_mhz: f64,
    /// Zero-based `(site, level)` targets; the two edge penalties when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_targets: Option<Vec<DetuningTarget>>,
    pub dt_max_us: f64,
    pub output_points: usize,
    pub initial: InitialState,
    pub grape_max_sites: usize,
    /// Interaction scale the ramp rate is compared with, in MHz.
    pub adiabatic_scale_mhz: f64,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        let s = ProtocolSettings::default();
        Self {
            n_values: vec![2, 3, 4],
            durations_us: s.durations_us,
            delta_max_mhz: s.delta_max_mhz,
            omega_mhz: s.omega_mhz,
            detuning_targets: None,
            dt_max_us: s.dt_max_us,
            output_points: s.output_points,
            initial: InitialState::Auto,
            grape_max_sites: 3,
            adiabatic_scale_mhz: 35.0,
        }
    }
}

impl ProtocolSection {
    pub fn settings(&self) -> ProtocolSettings {
        let plan = match &self.detuning_targets {
            None => DetuningPlan::Edges,
            Some(t) => DetuningPlan::Custom(t.iter().map(|d| (d.site, d.level)).collect()),
        };
        ProtocolSettings {
            durations_us: self.durations_us.clone(),
            delta_max_mhz: self.delta_max_mhz,
            omega_mhz: self.omega_mhz,
            plan,
            dt_max_us: self.dt_max_us,
            output_points: self.output_points,
        }
    }

    pub fn uses_grape(&self, n: usize) -> bool {
        match self.initial {
            InitialState::Auto => n <= self.grape_max_sites,
            InitialState::Grape => true,
            InitialState::Ground => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrapeSection {
    pub n_values: Vec<usize>,
    pub n_slices: usize,
    pub duration_us: f64,
    pub mode: ControlMode,
    pub omega_bounds: (f64, f64),
    pub delta_bounds: (f64, f64),
    pub max_iter: usize,
    pub target_fidelity: f64,
    pub gradient_tol: f64,
    pub init_spread: f64,
}

impl Default for GrapeSection {
    fn default() -> Self {
        let s = GrapeSettings::default();
        Self {
            n_values: vec![2, 3],
            n_slices: s.n_slices,
            duration_us: s.duration_us,
            mode: s.mode,
            omega_bounds: s.omega_bounds,
            delta_bounds: s.delta_bounds,
            max_iter: s.max_iter,
            target_fidelity: s.target_fidelity,
            gradient_tol: s.gradient_tol,
            init_spread: s.init_spread,
        }
    }
}

impl GrapeSection {
    pub fn settings(&self) -> GrapeSettings {
        GrapeSettings {
            n_slices: self.n_slices,
            duration_us: self.duration_us,
            mode: self.mode,
            omega_bounds: self.omega_bounds,
            delta_bounds: self.delta_bounds,
            max_iter: self.max_iter,
            target_fidelity: self.target_fidelity,
            gradient_tol: self.gradient_tol,
            init_spread: self.init_spread,
        }
    }
}

/// State families for entanglement studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    /// Equal superposition of Motzkin paths.
    Ideal,
    /// Final state of the adiabatic protocol.
    Effective,
    /// Ground state of the Rydberg Hamiltonian.
    RydbergGround,
}

impl StateFamily {
    pub fn name(self) -> &'static str {
        match self {
            StateFamily::Ideal => "ideal",
            StateFamily::Effective => "effective",
            StateFamily::RydbergGround => "rydberg_ground",
        }
    }
}

impl std::str::FromStr for StateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(StateFamily::Ideal),
            "effective" => Ok(StateFamily::Effective),
            "rydberg_ground" | "ground" => Ok(StateFamily::RydbergGround),
            _ => Err(Error::Config(format!("unknown state family {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSection {
    pub n_values: Vec<usize>,
    pub families: Vec<StateFamily>,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            n_values: vec![2, 4, 6, 8],
            families: vec![StateFamily::Ideal, StateFamily::Effective, StateFamily::RydbergGround],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntanglementSection {
    pub n_values: Vec<usize>,
    pub state: StateFamily,
    /// Subsystem size; half the chain (rounded down) when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_a: Option<usize>,
}

impl Default for EntanglementSection {
    fn default() -> Self {
        Self { n_values: vec![4], state: StateFamily::Ideal, n_a: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub lifetime_us: f64,
    pub protocol_time_us: f64,
}

impl Default for BudgetSection {
    fn default() -> Self {
        Self { lifetime_us: 620.0, protocol_time_us: 30.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub interactions: InteractionTable,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub model: ModelOptions,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub grape: GrapeSection,
    #[serde(default)]
    pub solver: LanczosOptions,
    #[serde(default)]
    pub scaling: ScalingSection,
    #[serde(default)]
    pub entanglement: EntanglementSection,
    #[serde(default)]
    pub budget: BudgetSection,
}

impl RunConfig {
    /// Parse and validate a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("{path}: {}", e.into_inner().message()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// One of the shipped run files, by name.
    pub fn fixture(name: &str) -> Result<Self> {
        match name {
            "rb87_adiabatic" => Self::from_toml_str(RB87_ADIABATIC),
            "cs133_finetune" => Self::from_toml_str(CS133_FINETUNE),
            _ => Err(Error::Config(format!("unknown fixture {name:?}; available: {}", FIXTURES.join(", ")))),
        }
    }

    pub fn fixture_source(name: &str) -> Option<&'static str> {
        match name {
            "rb87_adiabatic" => Some(RB87_ADIABATIC),
            "cs133_finetune" => Some(CS133_FINETUNE),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.interactions.validate().map_err(|e| match e {
            Error::Data(m) => Error::Config(format!("interactions: {m}")),
            other => other,
        })?;
        if !(self.geometry.spacing_um > 0.0 && self.geometry.spacing_um.is_finite()) {
            return Err(Error::Config("geometry.spacing_um: must be positive".into()));
        }
        if !self.geometry.theta_deg.is_finite() {
            return Err(Error::Config("geometry.theta_deg: must be finite".into()));
        }
        self.model.validate()?;
        self.grape.settings().validate()?;
        if self.protocol.durations_us.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Config("protocol.durations_us: every duration must be positive".into()));
        }
        if !(self.protocol.dt_max_us > 0.0) {
            return Err(Error::Config("protocol.dt_max_us: must be positive".into()));
        }
        if self.solver.krylov_dim < 2 || !(self.solver.tol > 0.0) {
            return Err(Error::Config("solver: krylov_dim must be at least 2 and tol positive".into()));
        }
        Ok(())
    }

    /// The exact configuration as TOML, for `config.resolved`.
    pub fn resolved_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("cannot serialise config: {e}")))
    }
}
