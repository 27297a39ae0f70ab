use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::concentration::{GridConfig, SweepConfig};
use crate::error::{Error, Result};
use crate::exponents::{check_admissible, AdmissibleExponents};
use crate::field::{make_grid, CoefficientSpec, Grid};
use crate::groundstate::{Algorithm, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Solve,
    Sweep,
    Selftest,
}

/// Box half width given either directly or as a multiple of `pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub half_width_pi: Option<f64>,
    pub samples: usize,
}

impl GridSpec {
    pub fn half_width(&self) -> Result<f64> {
        match (self.half_width, self.half_width_pi) {
            (Some(l), None) => Ok(l),
            (None, Some(k)) => Ok(k * PI),
            _ => Err(Error::Config("grid needs exactly one of half_width, half_width_pi".into())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventSpec {
    /// Absorption parameter; default `max(1e-3, (pi/L)^2)`.
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub p: CoefficientSpec,
    pub q: CoefficientSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSpec {
    pub eps: f64,
    /// Every listed algorithm runs; energies are cross-checked.
    pub algorithms: Vec<Algorithm>,
    /// Relative energy agreement required between algorithms.
    pub agreement_tol: f64,
}

impl Default for SolveSpec {
    fn default() -> Self {
        SolveSpec {
            eps: 1.0,
            algorithms: vec![Algorithm::ProjectedGradient, Algorithm::FixedPoint],
            agreement_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default = "one")]
    pub multistart_count: usize,
    #[serde(default)]
    pub transplant_check: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub mode: Option<Mode>,
    pub dimension: usize,
    pub p: f64,
    pub q: f64,
    pub grid: GridSpec,
    #[serde(default)]
    pub resolvent: ResolventSpec,
    pub coefficients: Coefficients,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub solve: SolveSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self, mode: Mode) -> Result<AdmissibleExponents> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if let Some(m) = self.mode {
            if m != mode {
                return Err(Error::Config(format!("config is for mode {m:?}, command is {mode:?}")));
            }
        }
        let e = check_admissible(self.dimension, self.p, self.q)?;
        self.grid()?;
        if let Some(d) = self.resolvent.delta {
            if !(d > 0.0) {
                return Err(Error::Config("resolvent.delta must be positive".into()));
            }
        }
        self.coefficients.p.validate(self.dimension)?;
        self.coefficients.q.validate(self.dimension)?;
        self.solver.validate()?;
        match mode {
            Mode::Solve => {
                if !(self.solve.eps > 0.0) || self.solve.algorithms.is_empty() {
                    return Err(Error::Config("solve needs eps > 0 and at least one algorithm".into()));
                }
            }
            Mode::Sweep => {
                self.sweep_config()?.validate()?;
            }
            Mode::Selftest => {}
        }
        Ok(e)
    }

    pub fn grid(&self) -> Result<Grid> {
        make_grid(self.dimension, self.grid.half_width()?, self.grid.samples)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let s = self.sweep.as_ref().ok_or_else(|| Error::Config("sweep mode needs a `sweep` section".into()))?;
        Ok(SweepConfig {
            dimension: self.dimension,
            p: self.p,
            q: self.q,
            eps_list: s.eps_list.clone(),
            p_coefficient: self.coefficients.p.clone(),
            q_coefficient: self.coefficients.q.clone(),
            rho: s.rho,
            grid: GridConfig { half_width: self.grid.half_width()?, samples: self.grid.samples },
            delta: self.resolvent.delta,
            solver: self.solver.clone(),
            multistart_count: s.multistart_count,
            seed: self.seed,
            transplant_check: s.transplant_check,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "schema_version": 1,
        "dimension": 3, "p": 5, "q": 5,
        "grid": {"half_width_pi": 8, "samples": 64},
        "coefficients": {"p": {"kind": "constant", "value": 1}, "q": {"kind": "constant", "value": 1}}
    }"#;

    #[test]
    fn minimal_config_parses() {
        let c = RunConfig::from_json(BASE).unwrap();
        c.validate(Mode::Solve).unwrap();
        assert!((c.grid().unwrap().spacing() - PI / 4.0).abs() < 1e-15);
        assert_eq!(c.solve.algorithms.len(), 2);
        assert!(matches!(c.validate(Mode::Sweep), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = BASE.replace("\"seed\"", "x").replace("\"dimension\"", "\"colour\": 1, \"dimension\"");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config(_))));
        let text = BASE.replace("\"samples\": 64", "\"samples\": 64, \"extra\": true");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config(_))));
    }

    #[test]
    fn inadmissible_exponents_carry_reason() {
        let c = RunConfig::from_json(&BASE.replace("\"p\": 5, \"q\": 5", "\"p\": 6, \"q\": 6")).unwrap();
        match c.validate(Mode::Solve) {
            Err(Error::RegionViolation(r)) => assert_eq!(r.code(), "hyperbola-low"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mode_mismatch_rejected() {
        let c =
            RunConfig::from_json(&BASE.replace("\"schema_version\": 1", "\"schema_version\": 1, \"mode\": \"sweep\""))
                .unwrap();
        assert!(matches!(c.validate(Mode::Solve), Err(Error::Config(_))));
        let c = RunConfig::from_json(&BASE.replace("\"schema_version\": 1", "\"schema_version\": 2")).unwrap();
        assert!(matches!(c.validate(Mode::Solve), Err(Error::Config(_))));
    }
}
