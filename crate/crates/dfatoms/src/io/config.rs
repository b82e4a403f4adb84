//! Run configuration documents (`dfatoms-config/1`).

use serde::{Deserialize, Serialize};

use crate::dirac_fock::{Hamiltonian, Problem, ScfControls, ShellSpec};
use crate::error::{Error, Result};
use crate::projector::MaxMinControls;
use crate::radial::{Channel, NuclearModel, NuclearShape, RadialGrid};
use crate::SPEED_OF_LIGHT;

pub const CONFIG_SCHEMA: &str = "dfatoms-config/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Hf,
    LimitStudy,
    Projected,
    Maxmin,
    FockMin,
    ProjectorIteration,
    OracleSommerfeld,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Hf => "hf",
            Mode::LimitStudy => "limit-study",
            Mode::Projected => "projected",
            Mode::Maxmin => "maxmin",
            Mode::FockMin => "fock-min",
            Mode::ProjectorIteration => "projector-iteration",
            Mode::OracleSommerfeld => "oracle-sommerfeld",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| Error::Config {
            path: "mode".into(),
            message: format!("unknown mode `{s}`"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellEntry {
    pub n: u32,
    pub kappa: i32,
    /// Occupation.
    pub w: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonrelShellEntry {
    pub n: u32,
    pub l: u32,
    pub w: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Defaults to `1e-4/Z`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    pub r_max: f64,
    pub size: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            r_min: None,
            r_max: 40.0,
            size: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorChoice {
    #[default]
    Free,
    MeanField,
    File,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectorSpec {
    pub source: ProjectorChoice,
    /// Projector document, required for `source = "file"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Embed the projectors used in the report.
    pub export: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

fn config_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

fn point() -> NuclearShape {
    NuclearShape::Point
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "config_schema")]
    pub schema: String,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(default = "point")]
    pub nuclear: NuclearShape,
    #[serde(default)]
    pub shells: Vec<ShellEntry>,
    #[serde(default)]
    pub nonrel_shells: Vec<NonrelShellEntry>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub scf: ScfControls,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_factors: Option<Vec<f64>>,
    #[serde(default)]
    pub projector: ProjectorSpec,
    #[serde(default)]
    pub maxmin: MaxMinControls,
    /// Channel and principal number for the Sommerfeld oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Accept one partially filled relativistic shell and run the open-shell
    /// experiment (`projector-iteration` only).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub open_shell: bool,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and checks a configuration document. Unknown keys are rejected,
/// defaults (including the grid's `r_min`) are resolved so that the result
/// echoes exactly what runs, and `N < Z + 1` is enforced here.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_error(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
    })?;
    if cfg.schema != CONFIG_SCHEMA {
        return Err(config_error("schema", format!("expected `{CONFIG_SCHEMA}`, got `{}`", cfg.schema)));
    }
    if !(cfg.z > 0.0) || !cfg.z.is_finite() {
        return Err(config_error("Z", format!("nuclear charge must be positive, got {}", cfg.z)));
    }
    if !(cfg.c > 0.0) || !cfg.c.is_finite() {
        return Err(config_error("c", format!("speed of light must be positive, got {}", cfg.c)));
    }
    if cfg.grid.r_min.is_none() {
        cfg.grid.r_min = Some(1e-4 / cfg.z);
    }
    let n_rel: usize = cfg.shells.iter().map(|s| s.w).sum();
    let n_nr: usize = cfg.nonrel_shells.iter().map(|s| s.w).sum();
    for (i, s) in cfg.shells.iter().enumerate() {
        let ch = Channel::dirac(s.kappa).map_err(|e| config_error(format!("shells[{i}].kappa"), e.to_string()))?;
        let cap = ch.capacity();
        let partial = cfg.open_shell && s.w > 0 && s.w < cap;
        if s.w != cap && !(n_rel == 1 && s.w == 1) && !partial {
            return Err(config_error(
                format!("shells[{i}].w"),
                format!("occupation must equal 2|κ| = {cap} for kappa = {}, got {}", s.kappa, s.w),
            ));
        }
    }
    if cfg.open_shell {
        let partial = cfg.shells.iter().filter(|s| Channel::dirac(s.kappa).map_or(false, |c| c.capacity() != s.w)).count();
        if partial != 1 || n_rel < 2 {
            return Err(config_error("open_shell", format!("needs exactly one partially filled shell among several electrons, got {partial}")));
        }
    }
    for (i, s) in cfg.nonrel_shells.iter().enumerate() {
        let cap = Channel::Schrodinger(s.l).capacity();
        if s.w != cap && !(n_nr == 1 && s.w == 1) {
            return Err(config_error(
                format!("nonrel_shells[{i}].w"),
                format!("occupation must equal 2(2l+1) = {cap} for l = {}, got {}", s.l, s.w),
            ));
        }
    }
    for (key, n) in [("shells", n_rel), ("nonrel_shells", n_nr)] {
        if n as f64 >= cfg.z + 1.0 {
            return Err(config_error(key, format!("N = {n} violates N < Z + 1 with Z = {}", cfg.z)));
        }
    }
    if let Some(f) = &cfg.c_factors {
        if f.is_empty() || f.iter().any(|v| !(*v >= 1.0)) || f.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_error("c_factors", "factors must be ≥ 1 and strictly ascending"));
        }
    }
    if cfg.projector.source == ProjectorChoice::File && cfg.projector.path.is_none() {
        return Err(config_error("projector.path", "source `file` needs a path"));
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn electron_count(&self) -> usize {
        if self.shells.is_empty() {
            self.nonrel_shells.iter().map(|s| s.w).sum()
        } else {
            self.shells.iter().map(|s| s.w).sum()
        }
    }

    pub fn nuclear_model(&self) -> Result<NuclearModel> {
        NuclearModel::new(self.z, self.nuclear)
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::exponential(self.grid.r_min.unwrap_or(1e-4 / self.z), self.grid.r_max, self.grid.size)
    }

    /// The Dirac-Fock problem of the relativistic shell list.
    pub fn dirac_problem(&self) -> Result<Problem> {
        if self.shells.is_empty() {
            return Err(config_error("shells", "this mode needs relativistic shells"));
        }
        let shells = self
            .shells
            .iter()
            .map(|s| {
                Ok(ShellSpec {
                    n: s.n,
                    channel: Channel::dirac(s.kappa)?,
                    occupation: s.w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let build = if self.open_shell { Problem::open_shell } else { Problem::new };
        build(
            self.nuclear_model()?,
            Hamiltonian::Dirac { c: self.c },
            self.grid()?,
            shells,
            self.scf,
        )
    }

    /// The Hartree-Fock problem: `nonrel_shells` if given, otherwise the
    /// relativistic shells merged by `(n, ℓ)`.
    pub fn schrodinger_problem(&self) -> Result<Problem> {
        if self.nonrel_shells.is_empty() {
            return crate::nonrel::nonrelativistic_problem(&self.dirac_problem()?);
        }
        let shells = self
            .nonrel_shells
            .iter()
            .map(|s| ShellSpec {
                n: s.n,
                channel: Channel::Schrodinger(s.l),
                occupation: s.w,
            })
            .collect();
        Problem::new(
            self.nuclear_model()?,
            Hamiltonian::Schrodinger,
            self.grid()?,
            shells,
            self.scf,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }
}
