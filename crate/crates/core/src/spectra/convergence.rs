//! Sector problems on a truncation ladder.
//!
//! Levels are identified across truncations by eigenvector overlap, not by
//! their position in the sorted spectrum: refining the truncation inserts new
//! levels anywhere above the ground state. Coarser eigenvectors are embedded
//! in the finest basis through their state labels.

use alloc::vec::Vec;

use crate::irrep::{IrrepSpec, MWindow};
use crate::linalg::CVec;
use crate::nc::{build_hamiltonian, NCParams, SectorBasis, TensorState};
use crate::operator::HermitianOperator;
use crate::spectra::eigen::{lowest_eigenpairs, EigenPairs};
use crate::{Error, HalfInt, Result};

/// Successive truncations must agree to this relative tolerance.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Largest weight a converged level may keep on boundary states.
pub const EDGE_WEIGHT_TOL: f64 = 1e-6;
pub const MIN_RUNGS: usize = 3;

/// Fock cutoff and irrep window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Truncation {
    pub n_max: u32,
    pub window: MWindow,
}

impl Truncation {
    pub fn new(n_max: u32, window: MWindow) -> Self {
        Truncation { n_max, window }
    }
}

/// `Ĥ` restricted to the sector `j` of one irrep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorProblem {
    pub params: NCParams,
    pub irrep: IrrepSpec,
    pub j: HalfInt,
}

impl SectorProblem {
    pub fn new(params: NCParams, irrep: IrrepSpec, j: HalfInt) -> Self {
        SectorProblem { params, irrep, j }
    }

    /// `(θ, κ) → (tθ, tκ)`.
    pub fn scaled(&self, t: f64) -> Self {
        SectorProblem {
            params: self.params.scaled(t),
            ..*self
        }
    }

    pub fn basis(&self, truncation: &Truncation) -> Result<SectorBasis> {
        let irrep = self.irrep.with_window(truncation.window)?;
        SectorBasis::sector(&irrep, self.j, truncation.n_max)
    }

    pub fn hamiltonian(&self, basis: &SectorBasis) -> Result<HermitianOperator> {
        build_hamiltonian(&self.params, basis)
    }

    pub fn solve(&self, truncation: &Truncation) -> Result<Solved> {
        let basis = self.basis(truncation)?;
        let h = self.hamiltonian(&basis)?;
        let pairs = lowest_eigenpairs(&h, basis.dim())?;
        Ok(Solved { basis, pairs })
    }
}

/// A diagonalized sector.
#[derive(Clone, Debug)]
pub struct Solved {
    pub basis: SectorBasis,
    pub pairs: EigenPairs,
}

/// An eigenvector's dominant basis state and where its weight sits.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelLabel {
    pub state: TensorState,
    pub weight: f64,
    pub edge_weight: f64,
    pub on_edge: bool,
}

/// Boundary states: the top Fock shell, and window ends where the irrep goes on.
pub fn edge_states(basis: &SectorBasis) -> Vec<bool> {
    let irrep = basis.irrep();
    let w = irrep.window();
    basis
        .states()
        .iter()
        .map(|s| {
            s.n() == basis.n_max()
                || (irrep.truncated_below() && s.m == w.min)
                || (irrep.truncated_above() && s.m == w.max)
        })
        .collect()
}

pub fn label_vector(basis: &SectorBasis, edge: &[bool], v: &CVec) -> LevelLabel {
    let mut best = (0, 0.0);
    let mut edge_weight = 0.0;
    for (i, c) in v.iter().enumerate() {
        let w = c.norm_sqr();
        if w > best.1 {
            best = (i, w);
        }
        if edge[i] {
            edge_weight += w;
        }
    }
    LevelLabel {
        state: basis.states()[best.0],
        weight: best.1,
        edge_weight,
        on_edge: edge[best.0],
    }
}

impl Solved {
    pub fn labels(&self) -> Vec<LevelLabel> {
        let edge = edge_states(&self.basis);
        self.pairs.vectors.iter().map(|v| label_vector(&self.basis, &edge, v)).collect()
    }
}

/// One level followed across the ladder.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelRow {
    pub label: TensorState,
    /// Finest-rung eigenvalue.
    pub energy: f64,
    /// Energy on each rung, `None` where no level there overlaps this one.
    pub energies: Vec<Option<f64>>,
    /// `|E_last − E_previous| / max(1, |E_last|)`.
    pub last_change: Option<f64>,
    pub edge_weight: f64,
    pub on_edge: bool,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceReport {
    pub rungs: Vec<Truncation>,
    /// Levels of the finest rung, ascending in energy.
    pub levels: Vec<LevelRow>,
}

impl ConvergenceReport {
    pub fn converged_mask(&self) -> Vec<bool> {
        self.levels.iter().map(|l| l.converged).collect()
    }

    /// The lowest level whose dominant state is `label`.
    pub fn level(&self, label: &TensorState) -> Option<&LevelRow> {
        self.levels.iter().find(|l| &l.label == label)
    }

    /// Finest-rung energy of a level.
    pub fn energy(&self, label: &TensorState) -> Option<f64> {
        self.level(label).and_then(|l| *l.energies.last()?)
    }
}

/// Squared overlap needed to identify a level on two rungs.
const MATCH_OVERLAP: f64 = 0.5;
/// Levels closer than this (relative) are treated as one degenerate level
/// when matching.
const DEGENERATE_TOL: f64 = 1e-10;

/// The energy on `rung` of the level whose finest-rung vector is `v`.
///
/// Overlap is summed over a degenerate group so that an arbitrary rotation
/// inside it does not break the identification.
fn matched_energy(rung: &Solved, embed: &[Option<usize>], v: &CVec) -> Option<f64> {
    let overlaps: Vec<f64> = rung
        .pairs
        .vectors
        .iter()
        .map(|u| {
            u.iter()
                .zip(embed)
                .filter_map(|(c, k)| k.map(|k| c.conj() * v[k]))
                .sum::<num_complex::Complex64>()
                .norm_sqr()
        })
        .collect();
    let (best, _) = overlaps
        .iter()
        .enumerate()
        .fold((0, -1.0), |a, (k, &o)| if o > a.1 { (k, o) } else { a });
    let e = rung.pairs.values[best];
    let tol = DEGENERATE_TOL * e.abs().max(1.0);
    let weight: f64 = rung
        .pairs
        .values
        .iter()
        .zip(&overlaps)
        .filter(|(x, _)| (*x - e).abs() <= tol)
        .map(|(_, o)| o)
        .sum();
    (weight > MATCH_OVERLAP).then_some(e)
}

/// Solves `problem` on every rung and classifies the finest rung's levels.
///
/// A level is converged when it is found on the last two rungs with
/// energies agreeing to [`CONVERGENCE_TOL`], its dominant state is not a
/// boundary state and its boundary weight is below [`EDGE_WEIGHT_TOL`].
pub fn convergence_study(problem: &SectorProblem, ladder: &[Truncation]) -> Result<ConvergenceReport> {
    if ladder.len() < MIN_RUNGS {
        return Err(Error::ShortLadder {
            needed: MIN_RUNGS,
            got: ladder.len(),
        });
    }
    let solved: Vec<Solved> = ladder.iter().map(|tr| problem.solve(tr)).collect::<Result<_>>()?;
    let last = ladder.len() - 1;
    let finest = &solved[last];
    let finest_labels = finest.labels();
    let embeds: Vec<Vec<Option<usize>>> = solved
        .iter()
        .map(|s| s.basis.states().iter().map(|st| finest.basis.index_of(st)).collect())
        .collect();
    let levels = finest_labels
        .iter()
        .zip(&finest.pairs.values)
        .zip(&finest.pairs.vectors)
        .map(|((lab, &e), v)| {
            let energies: Vec<Option<f64>> = (0..last)
                .map(|r| matched_energy(&solved[r], &embeds[r], v))
                .chain(core::iter::once(Some(e)))
                .collect();
            let last_change = energies[last - 1].map(|a| (e - a).abs() / e.abs().max(1.0));
            let converged = last_change.is_some_and(|d| d <= CONVERGENCE_TOL)
                && !lab.on_edge
                && lab.edge_weight <= EDGE_WEIGHT_TOL;
            LevelRow {
                label: lab.state,
                energy: e,
                energies,
                last_change,
                edge_weight: lab.edge_weight,
                on_edge: lab.on_edge,
                converged,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        rungs: ladder.to_vec(),
        levels,
    })
}
