//! Command dispatch and report rendering.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use ncosc_core::dirac::{conserved_rotation_generator, landau_equivalence_check, oscillator, LandauEquivalence, SpinorBasis};
use ncosc_core::lie::{deformed_heisenberg, levi_decompose, LeviReport, LieAlgebra};
use ncosc_core::spectra::convergence::{convergence_study, ConvergenceReport};
use ncosc_core::spectra::large_z::{large_z_check, LargeZReport};
use ncosc_core::spectra::pt::pt_small_z;
use ncosc_core::spectra::report::{spectrum_report, SpectrumReport};
use ncosc_core::spectra::scaling::{residual_scaling, ScalingReport};
use ncosc_core::{Error as CoreError, HalfInt, SparseMatrix};
use serde::Serialize;

use crate::config::{Command, Format, RunConfig, DEFAULT_LEVELS, DEFAULT_T_GRID};
use crate::error::CliError;
use crate::formats::{write_triples, StructureConstants};

/// One line of the flat table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub t: f64,
    pub j: HalfInt,
    pub level_index: usize,
    #[serde(rename = "E_exact")]
    pub e_exact: Option<f64>,
    #[serde(rename = "E_pt")]
    pub e_pt: f64,
    pub residual: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraCheckReport {
    pub dim: usize,
    pub labels: Vec<String>,
    pub jacobi_residual: f64,
    pub tolerance: f64,
    pub passes: bool,
    pub structure_constants: StructureConstants,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeviRun {
    #[serde(flatten)]
    pub report: LeviReport,
    pub tolerance: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracRun {
    pub noncommutative: bool,
    pub sign: f64,
    pub message: String,
    #[serde(flatten)]
    pub equivalence: LandauEquivalence,
    /// `c` in `J = 1 ⊗ (L₀ + s₀) + c σ₃ ⊗ 1`.
    pub conserved_spin_coefficient: f64,
}

/// The result of one command.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    AlgebraCheck(AlgebraCheckReport),
    Levi(LeviRun),
    Spectrum(SpectrumReport),
    PerturbSmall(ScalingReport),
    PerturbLarge(LargeZReport),
    DiracEquivalence(DiracRun),
    Converge(ConvergenceReport),
}

/// A report plus what the driver needs to write it.
pub struct Outcome {
    pub report: Report,
    pub rows: Option<Vec<CsvRow>>,
    pub operator: Option<SparseMatrix>,
    pub summary: String,
}

impl Outcome {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.report)
                    .map_err(|e| CliError::Numerical(format!("report is not serializable: {e}")))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let rows = self
                    .rows
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("this command has no csv form".into()))?;
                csv_text(rows)
            }
        }
    }
}

pub fn csv_text(rows: &[CsvRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Runs the analysis named by `cfg.command`. Writes nothing.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::AlgebraCheck => algebra_check(cfg),
        Command::Levi => levi(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::PerturbSmall => perturb_small(cfg),
        Command::PerturbLarge => perturb_large(cfg),
        Command::DiracEquivalence => dirac(cfg),
        Command::Converge => converge(cfg),
    }
}

/// Executes `cfg` and writes the report (to stdout without an output path)
/// and any operator export. Returns the one-line summary.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let out = execute(cfg)?;
    let text = out.render(cfg.output.format)?;
    match &cfg.output.path {
        Some(p) => write_file(p, &text)?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("stdout", e))?,
    }
    if let (Some(p), Some(op)) = (&cfg.export_operator, &out.operator) {
        write_file(p, &write_triples(op))?;
    }
    Ok(out.summary)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn algebra(cfg: &RunConfig) -> Result<LieAlgebra, CliError> {
    match &cfg.algebra {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
            StructureConstants::from_json(&text)?.to_algebra()
        }
        None => {
            let p = cfg.params.expect("validated");
            Ok(deformed_heisenberg(p.theta, p.kappa))
        }
    }
}

fn algebra_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alg = algebra(cfg)?;
    let jacobi_residual = alg.jacobi_residual();
    let tolerance = cfg.tolerances.jacobi;
    let passes = jacobi_residual <= tolerance;
    let summary = format!(
        "algebra-check: dim {}, jacobi residual {jacobi_residual:.3e} ({})",
        alg.dim(),
        pass_word(passes)
    );
    Ok(Outcome {
        report: Report::AlgebraCheck(AlgebraCheckReport {
            dim: alg.dim(),
            labels: alg.labels().to_vec(),
            jacobi_residual,
            tolerance,
            passes,
            structure_constants: StructureConstants::from_algebra(&alg),
        }),
        rows: None,
        operator: None,
        summary,
    })
}

fn levi(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alg = algebra(cfg)?;
    let report = levi_decompose(&alg)?.report;
    let tolerance = cfg.tolerances.subspace;
    let passes = report.passes(tolerance);
    let summary = format!(
        "levi: radical {} + complement {} ({})",
        report.radical_dim,
        report.complement_dim,
        pass_word(passes)
    );
    Ok(Outcome {
        report: Report::Levi(LeviRun {
            report,
            tolerance,
            passes,
        }),
        rows: None,
        operator: None,
        summary,
    })
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (problem, ladder) = cfg.sector_problem()?;
    let rep = spectrum_report(&problem, &ladder)?;
    let rows = rep
        .levels
        .iter()
        .map(|l| CsvRow {
            t: 1.0,
            j: rep.j,
            level_index: l.index,
            e_exact: Some(l.energy),
            e_pt: l.small_z.total,
            residual: Some(l.small_z_residual),
            converged: l.converged,
        })
        .collect();
    let operator = match cfg.export_operator {
        Some(_) => {
            let finest = ladder.last().expect("validated ladder");
            Some(problem.hamiltonian(&problem.basis(finest)?)?.as_sparse().clone())
        }
        None => None,
    };
    let summary = format!(
        "spectrum: {} levels, {} converged",
        rep.levels.len(),
        rep.converged().count()
    );
    Ok(Outcome {
        report: Report::Spectrum(rep),
        rows: Some(rows),
        operator,
        summary,
    })
}

fn converge(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (problem, ladder) = cfg.sector_problem()?;
    let study = convergence_study(&problem, &ladder)?;
    let finest = ladder.last().expect("validated ladder");
    let irrep = problem.irrep.with_window(finest.window)?;
    let mut rows = Vec::with_capacity(study.levels.len());
    for (i, l) in study.levels.iter().enumerate() {
        let pt = pt_small_z(&problem.params, &irrep, &l.label)?;
        rows.push(CsvRow {
            t: 1.0,
            j: problem.j,
            level_index: i,
            e_exact: Some(l.energy),
            e_pt: pt.total,
            residual: Some((l.energy - pt.total).abs()),
            converged: l.converged,
        });
    }
    let n_conv = study.levels.iter().filter(|l| l.converged).count();
    if n_conv == 0 {
        return Err(CoreError::NoConvergence("no level converged on the ladder").into());
    }
    let summary = format!("converge: {n_conv} of {} levels converged", study.levels.len());
    Ok(Outcome {
        report: Report::Converge(study),
        rows: Some(rows),
        operator: None,
        summary,
    })
}

fn perturb_small(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (problem, ladder) = cfg.sector_problem()?;
    let t_grid = cfg.t_grid.clone().unwrap_or_else(|| DEFAULT_T_GRID.to_vec());
    let levels = cfg.levels.unwrap_or(DEFAULT_LEVELS);
    let rep = residual_scaling(&problem, &ladder, &t_grid, levels)?;
    let mut rows = Vec::new();
    for (i, l) in rep.levels.iter().enumerate() {
        for (k, &t) in rep.t_grid.iter().enumerate() {
            rows.push(CsvRow {
                t,
                j: problem.j,
                level_index: i,
                e_exact: l.exact[k],
                e_pt: l.printed[k],
                residual: l.residual[k],
                converged: l.converged_at[k],
            });
        }
    }
    let summary = match rep.min_slope {
        Some(s) => format!("perturb-small: {} levels, min slope {s:.3}", rep.levels.len()),
        None => format!("perturb-small: {} levels, no slope fitted", rep.levels.len()),
    };
    Ok(Outcome {
        report: Report::PerturbSmall(rep),
        rows: Some(rows),
        operator: None,
        summary,
    })
}

fn perturb_large(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (problem, ladder) = cfg.sector_problem()?;
    let rep = large_z_check(&problem, &ladder)?;
    let rows = rep
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| CsvRow {
            t: 1.0,
            j: problem.j,
            level_index: i,
            e_exact: Some(l.exact),
            e_pt: l.e0,
            residual: Some(l.relative_error),
            converged: true,
        })
        .collect();
    let summary = format!(
        "perturb-large: {} levels, max relative error {:.3e}, gap ratio {:.1}",
        rep.levels.len(),
        rep.max_relative_error,
        rep.gap_ratio
    );
    Ok(Outcome {
        report: Report::PerturbLarge(rep),
        rows: Some(rows),
        operator: None,
        summary,
    })
}

fn dirac(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params.expect("validated");
    let t = cfg.truncation.as_ref().expect("validated");
    let noncommutative = params.theta != 0.0 || params.kappa != 0.0;
    let basis = if noncommutative {
        SpinorBasis::noncommutative(t.n_max, cfg.irrep.expect("validated").build(t.window)?)
    } else {
        SpinorBasis::commutative(t.n_max)
    };
    let equivalence = landau_equivalence_check(&params, &basis)?;
    let sign = equivalence.sign().ok_or(CoreError::NoSignMatch)?;
    let h = oscillator(&params, &basis)?;
    let c = conserved_rotation_generator(&h, &basis)?;
    let message = format!("exact match, sign = {sign:+}");
    let summary = format!("dirac-equivalence: {message}");
    Ok(Outcome {
        report: Report::DiracEquivalence(DiracRun {
            noncommutative,
            sign,
            message,
            equivalence,
            conserved_spin_coefficient: c,
        }),
        rows: None,
        operator: cfg.export_operator.as_ref().map(|_| h.as_sparse().clone()),
        summary,
    })
}

fn pass_word(passes: bool) -> &'static str {
    if passes {
        "pass"
    } else {
        "FAIL"
    }
}
