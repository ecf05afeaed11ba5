use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{sl2r, LieAlgebra, Subspace};
use crate::linalg::{self, CVec, Signature, RANK_TOL};
use crate::{Error, Result};

/// Tolerance for subspace membership and bracket closure.
pub const SUBSPACE_TOL: f64 = 1e-10;

/// Complement tried before the projection fallback.
pub const DEFAULT_COMPLEMENT_LABELS: [&str; 3] = ["s0", "s1", "s2"];

fn brackets_of(alg: &LieAlgebra, a: &[CVec], b: &[CVec]) -> Result<Vec<CVec>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(alg.bracket(x, y)?);
        }
    }
    Ok(out)
}

// Distances are measured against the largest structure constant, so that
// brackets which vanish up to rounding do not register as escaping.
fn worst_residual(alg: &LieAlgebra, target: &Subspace, vs: &[CVec]) -> f64 {
    vs.iter().map(|v| target.distance(v)).fold(0.0, f64::max) / alg.scale()
}

/// `[ℌ, ℌ]`: span of all brackets of basis elements.
pub fn derived_subalgebra(alg: &LieAlgebra) -> Subspace {
    derived_of(alg, &Subspace::full(alg.dim())).expect("full space has the right dimension")
}

/// `[S, S]` for a subspace `S`.
pub fn derived_of(alg: &LieAlgebra, sub: &Subspace) -> Result<Subspace> {
    let b = sub.basis();
    let mut vs = Vec::new();
    for (i, x) in b.iter().enumerate() {
        for y in &b[i + 1..] {
            vs.push(alg.bracket(x, y)?);
        }
    }
    Ok(Subspace::span(alg.dim(), &vs))
}

/// Largest distance of `[u, v]` from `sub` over basis pairs, relative to
/// [`LieAlgebra::scale`].
pub fn closure_residual(alg: &LieAlgebra, sub: &Subspace) -> Result<f64> {
    let vs = brackets_of(alg, sub.basis(), sub.basis())?;
    Ok(worst_residual(alg, sub, &vs))
}

/// Whether the derived series of the whole algebra terminates.
pub fn is_solvable(alg: &LieAlgebra) -> bool {
    is_solvable_subalgebra(alg, &Subspace::full(alg.dim())).expect("full space is closed")
}

/// Whether the derived series of the subalgebra `sub` reaches zero within
/// `dim + 1` steps.
pub fn is_solvable_subalgebra(alg: &LieAlgebra, sub: &Subspace) -> Result<bool> {
    let residual = closure_residual(alg, sub)?;
    if residual > SUBSPACE_TOL {
        return Err(Error::NotSubalgebra { residual });
    }
    let mut cur = sub.clone();
    for _ in 0..=sub.dim() {
        if cur.dim() == 0 {
            return Ok(true);
        }
        let next = derived_of(alg, &cur)?;
        if next.dim() == cur.dim() {
            return Ok(false);
        }
        cur = next;
    }
    Ok(cur.dim() == 0)
}

/// `SR(ℌ) = {x : Tr(ad_x ad_y) = 0 ∀ y ∈ [ℌ, ℌ]}`.
///
/// Solved as the null space of `K α = 0` with
/// `K[j][i] = Tr(ad_{ξ_i} ad_{d_j})` over a basis `d_j` of the derived algebra.
pub fn solvable_radical(alg: &LieAlgebra) -> Result<Subspace> {
    if is_solvable(alg) {
        return Err(Error::Solvable);
    }
    let n = alg.dim();
    let derived = derived_subalgebra(alg);
    let gram = alg.killing_matrix();
    let mut k = DMatrix::<Complex64>::zeros(derived.dim(), n);
    for (j, d) in derived.basis().iter().enumerate() {
        let gd = &gram * nalgebra::DVector::from_column_slice(d);
        for i in 0..n {
            k[(j, i)] = gd[i];
        }
    }
    let ns = linalg::null_space(&k, RANK_TOL);
    Ok(Subspace::span(n, &ns))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ComplementSource {
    /// The labelled candidate span was accepted as is.
    Candidate,
    /// The terminal (perfect) term of the derived series.
    DerivedSeries,
}

/// Numerical evidence for `ℌ = 𝒮 ⊕ SR(ℌ)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LeviReport {
    pub algebra_dim: usize,
    pub derived_dim: usize,
    pub radical_dim: usize,
    pub complement_dim: usize,
    pub complement_source: ComplementSource,
    /// `[R, R] ⊆ R`
    pub radical_closure_residual: f64,
    /// `[ℌ, R] ⊆ R`
    pub radical_ideal_residual: f64,
    /// `max |Tr(ad_r ad_d)|` over radical and derived basis vectors.
    pub radical_killing_residual: f64,
    /// `[𝒮, 𝒮] ⊆ 𝒮`
    pub complement_closure_residual: f64,
    /// `[𝒮, 𝒮]` spans all of `𝒮`
    pub complement_perfect: bool,
    /// `[𝒮, R] ⊆ R`
    pub cross_residual: f64,
    pub complement_signature: Signature,
    pub sl2r_fingerprint: bool,
}

impl LeviReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.radical_closure_residual <= tol
            && self.radical_ideal_residual <= tol
            && self.complement_closure_residual <= tol
            && self.cross_residual <= tol
            && self.complement_perfect
            && self.radical_dim + self.complement_dim == self.algebra_dim
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeviDecomposition {
    pub radical: Subspace,
    pub complement: Subspace,
    pub report: LeviReport,
}

/// Levi decomposition trying `s0, s1, s2` as the complement first.
pub fn levi_decompose(alg: &LieAlgebra) -> Result<LeviDecomposition> {
    let labels: Vec<&str> = DEFAULT_COMPLEMENT_LABELS
        .iter()
        .copied()
        .filter(|l| alg.index_of(l).is_ok())
        .collect();
    levi_decompose_with(alg, &labels)
}

fn acceptable(alg: &LieAlgebra, radical: &Subspace, s: &Subspace) -> Result<bool> {
    Ok(s.dim() == alg.dim() - radical.dim()
        && s.meets_trivially(radical)
        && closure_residual(alg, s)? <= SUBSPACE_TOL
        && derived_of(alg, s)?.dim() == s.dim())
}

/// Levi decomposition with an explicit candidate complement (basis labels).
///
/// An empty or unsuitable candidate falls back to the perfect term
/// `ℌ^(∞)` of the derived series, accepted when it is transversal to the
/// radical with complementary dimension.
pub fn levi_decompose_with(alg: &LieAlgebra, candidate: &[&str]) -> Result<LeviDecomposition> {
    let n = alg.dim();
    let radical = solvable_radical(alg)?;
        let cand_vecs = candidate
        .iter()
        .map(|l| alg.basis_vector(l))
        .collect::<Result<Vec<_>>>()?;
    let cand = Subspace::span(n, &cand_vecs);

    let (complement, source) = if !candidate.is_empty() && acceptable(alg, &radical, &cand)? {
        (cand, ComplementSource::Candidate)
    } else {
        // terminal term of the derived series
        let mut s = Subspace::full(n);
        loop {
            let next = derived_of(alg, &s)?;
            if next.dim() == s.dim() {
                break;
            }
            s = next;
        }
        if !acceptable(alg, &radical, &s)? {
            return Err(Error::NoComplement);
        }
        (s, ComplementSource::DerivedSeries)
    };

    let derived = derived_subalgebra(alg);
    let all = Subspace::full(n);
    let mut killing = 0.0f64;
    for r in radical.basis() {
        for d in derived.basis() {
            killing = killing.max(alg.killing_pairing(r, d)?.norm());
        }
    }

    let restricted = alg.restrict(&complement)?;
    let complement_signature = linalg::signature(&restricted.killing_matrix(), RANK_TOL);
    let reference = linalg::signature(&sl2r().killing_matrix(), RANK_TOL);

    let report = LeviReport {
        algebra_dim: n,
        derived_dim: derived.dim(),
        radical_dim: radical.dim(),
        complement_dim: complement.dim(),
        complement_source: source,
        radical_closure_residual: closure_residual(alg, &radical)?,
        radical_ideal_residual: worst_residual(alg, &radical, &brackets_of(alg, all.basis(), radical.basis())?),
        radical_killing_residual: killing,
        complement_closure_residual: closure_residual(alg, &complement)?,
        complement_perfect: derived_of(alg, &complement)?.dim() == complement.dim(),
        cross_residual: worst_residual(alg, &radical, &brackets_of(alg, complement.basis(), radical.basis())?),
        complement_signature,
        sl2r_fingerprint: complement.dim() == 3 && complement_signature == reference,
    };
    Ok(LeviDecomposition {
        radical,
        complement,
        report,
    })
}
