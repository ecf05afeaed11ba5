//! Large-`|z|` regime: levels grouped into `m`-clusters separated by
//! `~|z|²/2M`, with spacing `~ω` inside a cluster.

use alloc::vec::Vec;

use crate::nc::TensorState;
use crate::spectra::convergence::{convergence_study, SectorProblem, Truncation};
use crate::spectra::pt::pt_large_z;
use crate::{Error, HalfInt, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LargeZLevel {
    pub label: TensorState,
    pub exact: f64,
    pub e0: f64,
    pub relative_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cluster {
    pub m: HalfInt,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    /// Largest spacing between consecutive levels of the cluster.
    pub max_spacing: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LargeZReport {
    /// Converged levels, ascending.
    pub levels: Vec<LargeZLevel>,
    pub max_relative_error: f64,
    /// `max_relative_error / (ω/M)`.
    pub c: f64,
    /// Clusters ordered by energy.
    pub clusters: Vec<Cluster>,
    pub intra_gap: f64,
    pub inter_gap: f64,
    pub gap_ratio: f64,
    pub lowest_cluster_m: Option<HalfInt>,
    /// Smallest `m²` among the sector's basis states.
    pub minimal_m2: f64,
    pub lowest_has_minimal_m2: bool,
}

/// Compares the converged levels of `problem` with the large-`|z|` leading
/// energies and measures the cluster structure.
///
/// Requires `ω/M ≤ 10⁻²` and `|z|²/2M ≥ 100ω`.
pub fn large_z_check(problem: &SectorProblem, ladder: &[Truncation]) -> Result<LargeZReport> {
    let p = &problem.params;
    if p.omega / p.mass > 1e-2 {
        return Err(Error::InvalidParameter("large-|z| check needs omega/M <= 1e-2"));
    }
    if p.z_abs2() / (2.0 * p.mass) < 100.0 * p.omega {
        return Err(Error::InvalidParameter("large-|z| check needs |z|^2/2M >= 100 omega"));
    }
    let study = convergence_study(problem, ladder)?;
    let finest = ladder.last().expect("ladder checked by convergence_study");
    let basis = problem.basis(finest)?;
    let mut levels = Vec::new();
    for row in study.levels.iter().filter(|l| l.converged) {
        let exact = row.energy;
        let e0 = pt_large_z(p, &problem.irrep, &row.label)?.e0;
        levels.push(LargeZLevel {
            label: row.label,
            exact,
            e0,
            relative_error: (exact - e0).abs() / e0.abs(),
        });
    }
    let max_relative_error = levels.iter().map(|l| l.relative_error).fold(0.0, f64::max);

    let mut clusters: Vec<Cluster> = Vec::new();
    for l in &levels {
        match clusters.iter_mut().find(|c| c.m == l.label.m) {
            Some(c) => {
                c.count += 1;
                c.min = c.min.min(l.exact);
                c.max = c.max.max(l.exact);
            }
            None => clusters.push(Cluster {
                m: l.label.m,
                count: 1,
                min: l.exact,
                max: l.exact,
                max_spacing: 0.0,
            }),
        }
    }
    for c in clusters.iter_mut() {
        let mut es: Vec<f64> = levels.iter().filter(|l| l.label.m == c.m).map(|l| l.exact).collect();
        es.sort_by(f64::total_cmp);
        c.max_spacing = es.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    }
    clusters.sort_by(|a, b| a.min.total_cmp(&b.min));
    let intra_gap = clusters.iter().map(|c| c.max_spacing).fold(0.0, f64::max);
    let inter_gap = clusters
        .windows(2)
        .map(|w| w[1].min - w[0].max)
        .fold(f64::INFINITY, f64::min);
    let minimal_m2 = basis
        .states()
        .iter()
        .map(|s| s.m.to_f64() * s.m.to_f64())
        .fold(f64::INFINITY, f64::min);
    let lowest_cluster_m = clusters.first().map(|c| c.m);
    Ok(LargeZReport {
        max_relative_error,
        c: max_relative_error / (p.omega / p.mass),
        gap_ratio: inter_gap / intra_gap,
        lowest_has_minimal_m2: lowest_cluster_m.is_some_and(|m| m.to_f64() * m.to_f64() == minimal_m2),
        lowest_cluster_m,
        minimal_m2,
        intra_gap,
        inter_gap,
        clusters,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irrep::{IrrepSpec, MWindow};
    use crate::nc::NCParams;
    use num_complex::Complex64;

    fn problem(omega: f64) -> SectorProblem {
        let zr = libm::sqrt(2.0 - 0.01);
        let params = NCParams::from_z(1.0, omega, Complex64::new(zr, 0.1)).unwrap();
        let irrep = IrrepSpec::discrete_plus(HalfInt::ONE, 16).unwrap();
        SectorProblem::new(params, irrep, HalfInt::ONE)
    }

    fn ladder() -> Vec<Truncation> {
        let w = MWindow::new(HalfInt::ONE, HalfInt::from_int(16));
        [20, 24, 28].iter().map(|&n| Truncation::new(n, w)).collect()
    }

    #[test]
    fn preconditions() {
        assert!(large_z_check(&problem(0.1), &ladder()).is_err());
    }

    #[test]
    fn clusters_and_leading_order() {
        let rep = large_z_check(&problem(1e-3), &ladder()).unwrap();
        assert!(!rep.levels.is_empty());
        assert!(rep.max_relative_error <= 5e-3, "{}", rep.max_relative_error);
        assert!(rep.gap_ratio >= 10.0, "{}", rep.gap_ratio);
        assert!(rep.lowest_has_minimal_m2);
        assert_eq!(rep.lowest_cluster_m, Some(HalfInt::ONE));
    }

    #[test]
    fn error_shrinks_with_omega() {
        let a = large_z_check(&problem(1e-3), &ladder()).unwrap();
        let b = large_z_check(&problem(1e-4), &ladder()).unwrap();
        assert!(b.max_relative_error < a.max_relative_error);
    }
}
