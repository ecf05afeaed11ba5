//! One sector's spectrum with convergence flags and both perturbative
//! predictions per level.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::irrep::IrrepSpec;
use crate::nc::{NCParams, TensorState};
use crate::spectra::convergence::{convergence_study, SectorProblem, Truncation};
use crate::spectra::pt::{pt_large_z, pt_small_z, LargeZ, SmallZ};
use crate::{HalfInt, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReportLevel {
    pub index: usize,
    /// Dominant basis state on the finest rung.
    pub label: TensorState,
    pub energy: f64,
    pub converged: bool,
    pub small_z: SmallZ,
    pub large_z: LargeZ,
    /// `|E − E_total|` against the small-`|z|` series.
    pub small_z_residual: f64,
    /// `|E − ℰ⁽⁰⁾| / |ℰ⁽⁰⁾|`.
    pub large_z_relative_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectrumReport {
    pub params: NCParams,
    /// `z = θMω + iκ`.
    pub z: Complex64,
    pub irrep: IrrepSpec,
    pub j: HalfInt,
    pub truncation: Truncation,
    /// Finest-rung eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub converged_mask: Vec<bool>,
    pub levels: Vec<ReportLevel>,
}

impl SpectrumReport {
    pub fn converged(&self) -> impl Iterator<Item = &ReportLevel> {
        self.levels.iter().filter(|l| l.converged)
    }
}

/// Runs the convergence study and attaches the perturbative values.
pub fn spectrum_report(problem: &SectorProblem, ladder: &[Truncation]) -> Result<SpectrumReport> {
    let study = convergence_study(problem, ladder)?;
    let finest = *ladder.last().expect("ladder checked by convergence_study");
    let irrep = problem.irrep.with_window(finest.window)?;
    let p = &problem.params;
    let mut levels = Vec::with_capacity(study.levels.len());
    let mut eigenvalues = Vec::with_capacity(study.levels.len());
    for (index, row) in study.levels.iter().enumerate() {
        let energy = row.energy;
        eigenvalues.push(energy);
        let small_z = pt_small_z(p, &irrep, &row.label)?;
        let large_z = pt_large_z(p, &irrep, &row.label)?;
        levels.push(ReportLevel {
            index,
            label: row.label,
            energy,
            converged: row.converged,
            small_z,
            large_z,
            small_z_residual: (energy - small_z.total).abs(),
            large_z_relative_error: (energy - large_z.e0).abs() / large_z.e0.abs(),
        });
    }
    Ok(SpectrumReport {
        params: *p,
        z: p.z(),
        irrep,
        j: problem.j,
        truncation: finest,
        eigenvalues,
        converged_mask: study.converged_mask(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irrep::MWindow;

    #[test]
    fn commutative_sector_is_the_oscillator_ladder() {
        let irrep = IrrepSpec::discrete_plus(HalfInt::ONE, 20).unwrap();
        let p = SectorProblem::new(NCParams::commutative(1.0, 1.0).unwrap(), irrep, HalfInt::ONE);
        let w = MWindow::new(HalfInt::ONE, HalfInt::from_int(8));
        let ladder: Vec<Truncation> = [4, 5, 6].iter().map(|&n| Truncation::new(n, w)).collect();
        let rep = spectrum_report(&p, &ladder).unwrap();
        assert!(rep.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for l in rep.converged() {
            assert_eq!(l.energy, (l.label.n() + 1) as f64);
            assert_eq!(l.small_z_residual, 0.0);
        }
        assert!(rep.converged().count() > 5);
    }
}
