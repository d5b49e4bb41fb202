//! JSON run configuration.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use singmap::{
    circle_loop, excursion, long_jump_path, pole_vault_path, IntegrationOptions, PathSpec, ProblemSpec, Side, VaultSpec,
};

use crate::error::CliError;

pub type Pair = [f64; 2];

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub path: Option<PathConfig>,
    #[serde(default)]
    pub options: IntegrationOptions,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub campaign_id: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub name: String,
    pub y0: Vec<Pair>,
    #[serde(default)]
    pub t0: Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    LongJump,
    PoleVault,
    Loop,
}

/// Either explicit `vertices` or a generator `kind` with its parameters.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub vertices: Option<Vec<Pair>>,
    pub kind: Option<PathKind>,
    /// long_jump, pole_vault
    pub t_target: Option<f64>,
    /// long_jump; default 0.3
    pub offset: Option<f64>,
    /// pole_vault; taken from the atlas when absent
    pub poles: Option<Vec<f64>>,
    /// pole_vault, loop
    pub radius: Option<f64>,
    pub chords: Option<usize>,
    /// pole_vault
    pub side: Option<Side>,
    /// loop
    pub center: Option<Pair>,
    /// loop; radians, default pi
    pub start_angle: Option<f64>,
    /// loop; reach the circle from here and come back
    pub base: Option<Pair>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub steps_csv: Option<PathBuf>,
    pub estimates_csv: Option<PathBuf>,
    pub atlas_json: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.problem.name != "painleve1" {
            return Err(CliError::Config(format!(
                "unknown problem {:?}; the built-in problem is \"painleve1\"",
                self.problem.name
            )));
        }
        if self.problem.y0.len() != 2 {
            return Err(CliError::Config(format!(
                "painleve1 needs 2 initial values, got {}",
                self.problem.y0.len()
            )));
        }
        if self
            .problem
            .y0
            .iter()
            .chain([&self.problem.t0])
            .flatten()
            .any(|x| !x.is_finite())
        {
            return Err(CliError::Config("initial data must be finite".into()));
        }
        self.options.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(p) = &self.path {
            match (&p.vertices, p.kind) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Config("path gives both vertices and a generator kind".into()))
                }
                (None, None) => {
                    return Err(CliError::Config(
                        "path needs either vertices or a generator kind".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn problem(&self) -> ProblemSpec {
        ProblemSpec {
            label: self.problem.name.clone(),
            t0: complex(self.problem.t0),
            y0: self.problem.y0.iter().copied().map(complex).collect(),
        }
    }

    /// Builds the route. `atlas_poles` supplies vault positions when the
    /// config lists none; it is only called for a pole_vault without poles.
    pub fn build_path(
        &self,
        atlas_poles: impl FnOnce(f64) -> Result<Vec<f64>, CliError>,
    ) -> Result<PathSpec, CliError> {
        let p = self
            .path
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no path".into()))?;
        let path = match (&p.vertices, p.kind) {
            (Some(v), _) => PathSpec::new(v.iter().copied().map(complex).collect()),
            (None, Some(PathKind::LongJump)) => {
                long_jump_path(require(p.t_target, "t_target")?, p.offset.unwrap_or(0.3))
            }
            (None, Some(PathKind::PoleVault)) => {
                let t = require(p.t_target, "t_target")?;
                let poles = match &p.poles {
                    Some(poles) => poles.clone(),
                    None => atlas_poles(t)?,
                };
                pole_vault_path(&vault_spec(poles, p), t)
            }
            (None, Some(PathKind::Loop)) => {
                let lp = circle_loop(
                    complex(require(p.center, "center")?),
                    require(p.radius, "radius")?,
                    p.chords.unwrap_or(12),
                    p.start_angle.unwrap_or(PI),
                );
                match (lp, p.base) {
                    (Ok(lp), Some(base)) => excursion(complex(base), &lp),
                    (lp, _) => lp,
                }
            }
            (None, None) => unreachable!("validated"),
        }
        .map_err(|e| CliError::Config(format!("invalid path: {e}")))?;
        self.check_start(&path)?;
        Ok(path)
    }

    pub fn check_start(&self, path: &PathSpec) -> Result<(), CliError> {
        let t0 = complex(self.problem.t0);
        if path.start() != t0 {
            return Err(CliError::Config(format!(
                "path starts at {} but the initial data are given at {t0}",
                path.start()
            )));
        }
        Ok(())
    }
}

pub fn vault_spec(poles: Vec<f64>, p: &PathConfig) -> VaultSpec {
    let default = VaultSpec::default();
    VaultSpec {
        poles,
        radius: p.radius.unwrap_or(default.radius),
        chords: p.chords.unwrap_or(default.chords),
        side: p.side.unwrap_or(default.side),
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("path generator needs `{name}`")))
}
