//! Exact-minus-perturbative residuals along `z → tz`.
//!
//! Exact levels are paired with perturbative labels by adiabatic
//! continuation: the eigenvectors are followed by overlap from a small `t`,
//! where each is close to a single basis state, up through the grid.

use alloc::vec::Vec;

use crate::linalg::{dot, fit_slope, CVec};
use crate::nc::TensorState;
use crate::spectra::convergence::{
    edge_states, label_vector, SectorProblem, Truncation, CONVERGENCE_TOL, EDGE_WEIGHT_TOL, MIN_RUNGS,
};
use crate::spectra::eigen::lowest_eigenpairs;
use crate::spectra::pt::{closed_form_small_z, corrected_small_z};
use crate::{Error, Result};

/// Eigenvalue gaps below this multiple of the eigensolver tolerance make
/// overlap tracking unreliable.
pub const GAP_FACTOR: f64 = 10.0;
const EIGEN_TOL: f64 = 1e-10;
/// Minimum squared overlap accepted when following a level one step.
const MIN_OVERLAP: f64 = 0.5;
const MAX_BISECTIONS: usize = 8;
/// The continuation starts this many times below the first grid point.
const START_FACTOR: f64 = 64.0;
/// Fewest converged grid points a level needs for a slope.
pub const MIN_FIT_POINTS: usize = 3;
/// The fit uses at most this many of a level's smallest converged `t`.
pub const MAX_FIT_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaledLevel {
    pub label: TensorState,
    /// `m·l` of the label.
    pub ml: f64,
    /// Exact energy per grid point, `None` where that `t` was dropped.
    pub exact: Vec<Option<f64>>,
    pub converged_at: Vec<bool>,
    /// Printed closed form `ω(n + 1) + κm − (|z|²/2M)·m·l`.
    pub printed: Vec<f64>,
    pub residual: Vec<Option<f64>>,
    /// Residual against `ω(n + 1) + κm + (|z|²/2M)·m·l`.
    pub corrected_residual: Vec<Option<f64>>,
    pub slope: Option<f64>,
    pub corrected_slope: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingReport {
    pub t_grid: Vec<f64>,
    /// Grid points removed for near-degenerate tracking.
    pub dropped: Vec<f64>,
    /// The requested number of lowest converged levels, ascending at the first `t`.
    pub levels: Vec<ScaledLevel>,
    /// Smallest log-log slope of the printed-form residual over `levels`.
    pub min_slope: Option<f64>,
    pub min_corrected_slope: Option<f64>,
    /// Largest printed-form residual at the first grid point.
    pub max_residual_first: Option<f64>,
    pub max_corrected_residual_first: Option<f64>,
}

struct Tracker<'a> {
    problem: &'a SectorProblem,
    truncation: &'a Truncation,
}

struct Snapshot {
    values: Vec<f64>,
    vectors: Vec<CVec>,
}

impl Tracker<'_> {
    fn solve(&self, t: f64) -> Result<Snapshot> {
        let p = self.problem.scaled(t);
        let basis = p.basis(self.truncation)?;
        let h = p.hamiltonian(&basis)?;
        let pairs = lowest_eigenpairs(&h, basis.dim())?;
        Ok(Snapshot {
            values: pairs.values,
            vectors: pairs.vectors,
        })
    }

    /// For each tracked vector, the index of its continuation in `next`.
    fn matching(prev: &[CVec], next: &Snapshot) -> Option<Vec<usize>> {
        let mut taken = alloc::vec![false; next.vectors.len()];
        let mut out = Vec::with_capacity(prev.len());
        for v in prev {
            let (k, o) = next
                .vectors
                .iter()
                .enumerate()
                .map(|(k, w)| (k, dot(v, w).norm_sqr()))
                .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
            if o < MIN_OVERLAP || taken[k] {
                return None;
            }
            taken[k] = true;
            out.push(k);
        }
        Some(out)
    }

    /// Follows `prev` (at `t_from`) to `t_to`, bisecting on failure.
    fn step(&self, prev: &[CVec], t_from: f64, t_to: f64, depth: usize) -> Result<(Snapshot, Vec<usize>)> {
        let next = self.solve(t_to)?;
        if let Some(m) = Self::matching(prev, &next) {
            return Ok((next, m));
        }
        if depth >= MAX_BISECTIONS {
            return Err(Error::LevelMatchingAmbiguity { t: t_to });
        }
        let mid = libm::sqrt(t_from * t_to);
        let (snap, m) = self.step(prev, t_from, mid, depth + 1)?;
        let moved: Vec<CVec> = m.iter().map(|&k| snap.vectors[k].clone()).collect();
        self.step(&moved, mid, t_to, depth + 1)
    }
}

/// Labels and per-grid-point energies of the `tracked` lowest levels.
struct Tracked {
    labels: Vec<TensorState>,
    energies: Vec<Vec<Option<f64>>>,
    /// Boundary weight of each level at each grid point.
    edge_weights: Vec<Vec<f64>>,
    dropped: Vec<f64>,
}

fn track(problem: &SectorProblem, truncation: &Truncation, t_grid: &[f64], tracked: usize) -> Result<Tracked> {
    let tracker = Tracker { problem, truncation };
    let t0 = t_grid[0] / START_FACTOR;
    let start = tracker.solve(t0)?;
    let basis = problem.scaled(t0).basis(truncation)?;
    let edge = edge_states(&basis);
    let count = tracked.min(start.values.len());
    let labels: Vec<TensorState> = start.vectors[..count]
        .iter()
        .map(|v| label_vector(&basis, &edge, v).state)
        .collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::LevelMatchingAmbiguity { t: t0 });
        }
    }
    let mut vectors: Vec<CVec> = start.vectors[..count].to_vec();
    let mut t_prev = t0;
    let mut energies = alloc::vec![Vec::with_capacity(t_grid.len()); count];
    let mut edge_weights = alloc::vec![Vec::with_capacity(t_grid.len()); count];
    let mut dropped = Vec::new();
    for &t in t_grid {
        // geometric steps of at most a factor of two
        let mut cur = t_prev;
        let mut last: Option<(Snapshot, Vec<usize>)> = None;
        while cur < t {
            let nxt = (2.0 * cur).min(t);
            let (snap, m) = tracker.step(&vectors, cur, nxt, 0)?;
            vectors = m.iter().map(|&k| snap.vectors[k].clone()).collect();
            last = Some((snap, m));
            cur = nxt;
        }
        t_prev = t;
        let (snap, m) = match last {
            Some(x) => x,
            None => {
                let snap = tracker.solve(t)?;
                let m = Tracker::matching(&vectors, &snap).ok_or(Error::LevelMatchingAmbiguity { t })?;
                (snap, m)
            }
        };
        let near_crossing = m.iter().any(|&k| {
            let e = snap.values[k];
            let tol = GAP_FACTOR * EIGEN_TOL * e.abs().max(1.0);
            (k > 0 && e - snap.values[k - 1] < tol) || (k + 1 < snap.values.len() && snap.values[k + 1] - e < tol)
        });
        if near_crossing {
            dropped.push(t);
        }
        for (i, &k) in m.iter().enumerate() {
            energies[i].push((!near_crossing).then_some(snap.values[k]));
            edge_weights[i].push(label_vector(&basis, &edge, &snap.vectors[k]).edge_weight);
        }
    }
    Ok(Tracked {
        labels,
        energies,
        edge_weights,
        dropped,
    })
}

fn slope_of(t_grid: &[f64], r: &[Option<f64>], points: &[usize]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter_map(|&k| r[k].filter(|&r| r > 0.0).map(|r| (libm::log(t_grid[k]), libm::log(r))))
        .unzip();
    fit_slope(&x, &y)
}

/// Scales `(θ, κ)` by each `t`, follows the levels, and fits `log r` against
/// `log t` for the `levels` lowest converged levels.
///
/// Every rung of `ladder` is tracked separately. A level is converged at a
/// grid point when its energies on the two finest rungs agree to
/// [`CONVERGENCE_TOL`] and its boundary weight is below [`EDGE_WEIGHT_TOL`].
/// Each level's slope uses the first [`MAX_FIT_POINTS`] grid points at which
/// it is converged; a level counts as converged when that includes the first
/// grid point and at least [`MIN_FIT_POINTS`] points in all.
pub fn residual_scaling(problem: &SectorProblem, ladder: &[Truncation], t_grid: &[f64], levels: usize) -> Result<ScalingReport> {
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("t grid must be positive and increasing"));
    }
    if ladder.len() < MIN_RUNGS {
        return Err(Error::ShortLadder {
            needed: MIN_RUNGS,
            got: ladder.len(),
        });
    }
    let count = 4 * levels + 10;
    let coarse = track(problem, &ladder[ladder.len() - 2], t_grid, count)?;
    let fine = track(problem, &ladder[ladder.len() - 1], t_grid, count)?;
    let finest_basis = problem.basis(&ladder[ladder.len() - 1])?;
    let edge = edge_states(&finest_basis);
    let params: Vec<_> = t_grid.iter().map(|&t| problem.params.scaled(t)).collect();

    let mut rows: Vec<ScaledLevel> = Vec::new();
    for (i, label) in fine.labels.iter().enumerate() {
        let exact = &fine.energies[i];
        let label_on_edge = finest_basis.index_of(label).is_none_or(|k| edge[k]);
        let previous = coarse.labels.iter().position(|l| l == label).map(|c| &coarse.energies[c]);
        let converged_at: Vec<bool> = (0..t_grid.len())
            .map(|k| {
                let (Some(e), Some(prev)) = (exact[k], previous) else { return false };
                let Some(p) = prev[k] else { return false };
                !label_on_edge
                    && (e - p).abs() / e.abs().max(1.0) <= CONVERGENCE_TOL
                    && fine.edge_weights[i][k] <= EDGE_WEIGHT_TOL
            })
            .collect();
        let printed: Vec<f64> = params.iter().map(|p| closed_form_small_z(p, label)).collect();
        let corrected: Vec<f64> = params.iter().map(|p| corrected_small_z(p, label)).collect();
        let residual: Vec<Option<f64>> = exact.iter().zip(&printed).map(|(e, p)| e.map(|e| (e - p).abs())).collect();
        let corrected_residual: Vec<Option<f64>> = exact.iter().zip(&corrected).map(|(e, p)| e.map(|e| (e - p).abs())).collect();
        let fit_points: Vec<usize> = (0..t_grid.len()).filter(|&k| converged_at[k]).take(MAX_FIT_POINTS).collect();
        let converged = converged_at[0] && fit_points.len() >= MIN_FIT_POINTS;
        rows.push(ScaledLevel {
            label: *label,
            ml: label.m.to_f64() * label.l() as f64,
            slope: slope_of(t_grid, &residual, &fit_points),
            corrected_slope: slope_of(t_grid, &corrected_residual, &fit_points),
            exact: exact.clone(),
            converged_at,
            printed,
            residual,
            corrected_residual,
            converged,
        });
    }
    rows.retain(|r| r.converged);
    rows.sort_by(|a, b| a.exact[0].unwrap().total_cmp(&b.exact[0].unwrap()));
    rows.truncate(levels);

    let min_of = |f: &dyn Fn(&ScaledLevel) -> Option<f64>| -> Option<f64> {
        rows.iter().map(f).try_fold(f64::INFINITY, |acc, x| x.map(|x| acc.min(x)))
    };
    let max_of = |f: &dyn Fn(&ScaledLevel) -> Option<f64>| -> Option<f64> {
        rows.iter().map(f).try_fold(0.0f64, |acc, x| x.map(|x| acc.max(x)))
    };
    let mut dropped = fine.dropped;
    dropped.extend(coarse.dropped);
    dropped.sort_by(f64::total_cmp);
    dropped.dedup();
    Ok(ScalingReport {
        t_grid: t_grid.to_vec(),
        dropped,
        min_slope: if rows.is_empty() { None } else { min_of(&|r| r.slope) },
        min_corrected_slope: if rows.is_empty() { None } else { min_of(&|r| r.corrected_slope) },
        max_residual_first: if rows.is_empty() { None } else { max_of(&|r| r.residual[0]) },
        max_corrected_residual_first: if rows.is_empty() { None } else { max_of(&|r| r.corrected_residual[0]) },
        levels: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irrep::{IrrepSpec, MWindow};
    use crate::nc::NCParams;
    use crate::HalfInt;

    fn setup() -> (SectorProblem, Vec<Truncation>) {
        let irrep = IrrepSpec::discrete_plus(HalfInt::ONE, 24).unwrap();
        let params = NCParams::new(1.0, 1.0, 0.05, 0.05).unwrap();
        let w = MWindow::new(HalfInt::ONE, HalfInt::from_int(24));
        let ladder = [10, 12, 14].iter().map(|&n| Truncation::new(n, w)).collect();
        (SectorProblem::new(params, irrep, HalfInt::ONE), ladder)
    }

    #[test]
    fn rejects_bad_grid() {
        let (p, l) = setup();
        assert!(residual_scaling(&p, &l, &[1.0, 1.0], 3).is_err());
        assert!(residual_scaling(&p, &l, &[0.0, 1.0], 3).is_err());
    }

    #[test]
    fn corrected_sign_scales_cubically_at_small_t() {
        let (p, l) = setup();
        let rep = residual_scaling(&p, &l, &[0.125, 0.25, 0.5, 1.0], 6).unwrap();
        assert_eq!(rep.levels.len(), 6);
        assert!(rep.dropped.is_empty());
        for lvl in &rep.levels {
            let s = lvl.corrected_slope.unwrap();
            assert!(s > 2.8, "{:?} corrected slope {s}", lvl.label);
            if lvl.ml != 0.0 {
                let s = lvl.slope.unwrap();
                assert!((s - 2.0).abs() < 0.1, "{:?} printed slope {s}", lvl.label);
            }
        }
    }

    #[test]
    fn labels_follow_dominant_states() {
        let (p, l) = setup();
        let rep = residual_scaling(&p, &l, &[0.5, 1.0, 2.0], 4).unwrap();
        let labels: Vec<TensorState> = rep.levels.iter().map(|r| r.label).collect();
        assert_eq!(labels[0], TensorState::new(0, 0, HalfInt::ONE));
        assert_eq!(labels[1], TensorState::new(1, 0, HalfInt::from_int(2)));
    }
}
