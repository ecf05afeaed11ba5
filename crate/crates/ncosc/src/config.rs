//! Run configuration: one JSON document per invocation.

use std::path::PathBuf;

use ncosc_core::irrep::{make_irrep, IrrepClass, IrrepParams, IrrepSpec, MGrid, MWindow};
use ncosc_core::lie::SUBSPACE_TOL;
use ncosc_core::nc::NCParams;
use ncosc_core::spectra::convergence::{SectorProblem, Truncation, MIN_RUNGS};
use ncosc_core::HalfInt;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_T_GRID: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
pub const DEFAULT_LEVELS: usize = 10;
/// Spacing of the default `n_max` ladder.
pub const DEFAULT_LADDER_STEP: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    AlgebraCheck,
    Levi,
    Spectrum,
    PerturbSmall,
    PerturbLarge,
    DiracEquivalence,
    Converge,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::Levi => "levi",
            Command::Spectrum => "spectrum",
            Command::PerturbSmall => "perturb-small",
            Command::PerturbLarge => "perturb-large",
            Command::DiracEquivalence => "dirac-equivalence",
            Command::Converge => "converge",
        }
    }

    fn needs_sector(self) -> bool {
        matches!(
            self,
            Command::Spectrum | Command::PerturbSmall | Command::PerturbLarge | Command::Converge
        )
    }

    pub fn has_table(self) -> bool {
        self.needs_sector()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Irrep class data. The window is taken from `truncation.window`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrrepConfig {
    pub class: IrrepClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<HalfInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<MGrid>,
}

impl IrrepConfig {
    pub fn build(&self, window: MWindow) -> Result<IrrepSpec, CliError> {
        let params = match self.class {
            IrrepClass::DiscretePlus | IrrepClass::DiscreteMinus => {
                if self.lambda.is_some() || self.grid.is_some() {
                    return invalid("discrete irreps take `k`, not `lambda`/`grid`");
                }
                IrrepParams::K(self.k.ok_or_else(|| validation("discrete irreps need `k`"))?)
            }
            IrrepClass::Continuous => {
                if self.k.is_some() {
                    return invalid("continuous irreps take `lambda` and `grid`, not `k`");
                }
                IrrepParams::Lambda {
                    lambda: self.lambda.ok_or_else(|| validation("continuous irreps need `lambda`"))?,
                    grid: self.grid.ok_or_else(|| validation("continuous irreps need `grid`"))?,
                }
            }
        };
        Ok(make_irrep(self.class, params, window)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub n_max: u32,
    pub window: MWindow,
    /// `n_max` values of the convergence ladder, ascending and ending at
    /// `n_max`. Defaults to `n_max − 4, n_max − 2, n_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<u32>>,
}

impl TruncationConfig {
    pub fn rungs(&self) -> Result<Vec<Truncation>, CliError> {
        let ns = match &self.ladder {
            Some(ns) => ns.clone(),
            None => {
                let span = DEFAULT_LADDER_STEP * (MIN_RUNGS as u32 - 1);
                if self.n_max < span {
                    return invalid("default ladder needs n_max >= 4; give `truncation.ladder`");
                }
                (0..MIN_RUNGS as u32)
                    .map(|i| self.n_max - span + DEFAULT_LADDER_STEP * i)
                    .collect()
            }
        };
        if ns.len() < MIN_RUNGS {
            return invalid("truncation.ladder needs at least 3 rungs");
        }
        if ns.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("truncation.ladder must be strictly increasing");
        }
        if ns.last() != Some(&self.n_max) {
            return invalid("truncation.ladder must end at n_max");
        }
        Ok(ns.into_iter().map(|n| Truncation::new(n, self.window)).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Pass/fail thresholds reported by `algebra-check` and `levi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub jacobi: f64,
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            jacobi: 1e-12,
            subspace: SUBSPACE_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<NCParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irrep: Option<IrrepConfig>,
    /// Sector label `j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<HalfInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// `perturb-small` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    /// `perturb-small` only: number of tracked levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// `algebra-check` and `levi`: structure-constant file to analyse
    /// instead of the algebra built from `params`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<PathBuf>,
    /// `spectrum` and `dirac-equivalence`: write the Hamiltonian as
    /// `row col re im` triples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export_operator: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        for (name, v) in [("jacobi", self.tolerances.jacobi), ("subspace", self.tolerances.subspace)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Validation(format!("tolerances.{name} must be positive")));
            }
        }
        let cmd = self.command;
        let p = match (cmd, self.algebra.is_some()) {
            (Command::AlgebraCheck | Command::Levi, true) => None,
            _ => Some(self.params.ok_or_else(|| need(cmd, "params"))?),
        };
        if let Some(p) = p {
            match cmd {
                // the algebra is defined for any real θ, κ
                Command::AlgebraCheck | Command::Levi => {
                    if !(p.theta.is_finite() && p.kappa.is_finite()) {
                        return invalid("params.theta and params.kappa must be finite");
                    }
                }
                _ => p.validate()?,
            }
        }
        if self.algebra.is_some() && !matches!(cmd, Command::AlgebraCheck | Command::Levi) {
            return Err(CliError::Validation(format!("`algebra` is not used by {}", cmd.name())));
        }
        if cmd.needs_sector() {
            self.irrep.ok_or_else(|| need(cmd, "irrep"))?;
            self.sector.ok_or_else(|| need(cmd, "sector"))?;
            self.truncation.as_ref().ok_or_else(|| need(cmd, "truncation"))?.rungs()?;
        }
        if cmd == Command::DiracEquivalence {
            let t = self.truncation.as_ref().ok_or_else(|| need(cmd, "truncation"))?;
            let nc = p.is_some_and(|p| p.theta != 0.0 || p.kappa != 0.0);
            if nc && self.irrep.is_none() {
                return invalid("noncommutative dirac-equivalence needs `irrep`");
            }
            if nc {
                self.irrep.expect("checked").build(t.window)?;
            }
        }
        if let Some(t) = &self.truncation {
            if let Some(irrep) = &self.irrep {
                irrep.build(t.window)?;
            }
        }
        if self.t_grid.is_some() || self.levels.is_some() {
            if cmd != Command::PerturbSmall {
                return Err(CliError::Validation(format!("`t_grid`/`levels` are not used by {}", cmd.name())));
            }
            if let Some(ts) = &self.t_grid {
                if ts.is_empty() || ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                    return invalid("t_grid must be non-empty and positive");
                }
            }
            if self.levels == Some(0) {
                return invalid("levels must be positive");
            }
        }
        if self.export_operator.is_some() && !matches!(cmd, Command::Spectrum | Command::DiracEquivalence) {
            return Err(CliError::Validation(format!("`export_operator` is not used by {}", cmd.name())));
        }
        if self.output.format == Format::Csv && !cmd.has_table() {
            return Err(CliError::Validation(format!("{} has no csv form", cmd.name())));
        }
        Ok(())
    }

    /// The sector problem and its ladder. Call after [`RunConfig::validate`].
    pub fn sector_problem(&self) -> Result<(SectorProblem, Vec<Truncation>), CliError> {
        let cmd = self.command;
        let t = self.truncation.as_ref().ok_or_else(|| need(cmd, "truncation"))?;
        let irrep = self.irrep.ok_or_else(|| need(cmd, "irrep"))?.build(t.window)?;
        let params = self.params.ok_or_else(|| need(cmd, "params"))?;
        let j = self.sector.ok_or_else(|| need(cmd, "sector"))?;
        Ok((SectorProblem::new(params, irrep, j), t.rungs()?))
    }
}

fn validation(msg: &str) -> CliError {
    CliError::Validation(msg.to_owned())
}

fn invalid<T>(msg: &str) -> Result<T, CliError> {
    Err(validation(msg))
}

fn need(cmd: Command, field: &str) -> CliError {
    CliError::Validation(format!("{} needs `{field}`", cmd.name()))
}
