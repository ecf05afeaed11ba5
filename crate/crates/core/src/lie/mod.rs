//! Finite-dimensional Lie algebras as structure-constant tensors.
//!
//! An algebra of dimension `n` is stored as a dense `n × n × n` complex tensor
//! `c` with `[ξ_i, ξ_j] = Σ_k c[i][j][k] ξ_k`. Physical generators are
//! Hermitian, so their brackets carry an explicit factor of `i`; that factor
//! lives inside the tensor.

mod canonical;
mod levi;

pub use canonical::{b_matrix, canonical_check, canonical_residuals, metric, CanonicalResiduals, Mat3};
pub use levi::{
    closure_residual, derived_of, derived_subalgebra, is_solvable, is_solvable_subalgebra,
    levi_decompose, levi_decompose_with, solvable_radical, ComplementSource, LeviDecomposition,
    LeviReport, DEFAULT_COMPLEMENT_LABELS, SUBSPACE_TOL,
};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{self, CVec, RANK_TOL};
use crate::{Error, Result};

/// Minkowski metric η = diag(1, −1, −1); it is its own inverse.
pub const ETA: [f64; 3] = [1.0, -1.0, -1.0];

/// Levi-Civita symbol with ε₀₁₂ = +1.
pub fn levi_civita(mu: usize, nu: usize, rho: usize) -> f64 {
    match (mu, nu, rho) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    c: Vec<Complex64>,
}

impl LieAlgebra {
    /// Builds an algebra from `(i, j, k, c_ijk)` entries.
    ///
    /// Each entry also fixes `c_jik = −c_ijk`. Listing both orderings is
    /// allowed as long as they agree; a conflict or a nonzero `c_iik` is
    /// rejected.
    pub fn from_structure_constants<I>(labels: Vec<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, Complex64)>,
    {
        let n = labels.len();
        let mut c = vec![ZERO; n * n * n];
        let mut set = vec![false; n * n * n];
        let at = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        for (i, j, k, v) in entries {
            if i >= n || j >= n || k >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i.max(j).max(k) + 1,
                });
            }
            if i == j {
                if v != ZERO {
                    return Err(Error::NotAntisymmetric { i, j, k });
                }
                continue;
            }
            for (idx, val) in [(at(i, j, k), v), (at(j, i, k), -v)] {
                if set[idx] && c[idx] != val {
                    return Err(Error::NotAntisymmetric { i, j, k });
                }
                c[idx] = val;
                set[idx] = true;
            }
        }
        Ok(LieAlgebra { labels, c })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn basis_vector(&self, label: &str) -> Result<CVec> {
        Ok(linalg::unit(self.dim(), self.index_of(label)?))
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Complex64 {
        let n = self.dim();
        self.c[(i * n + j) * n + k]
    }

    /// `max |c_ijk|`, or 1 for an abelian algebra.
    pub fn scale(&self) -> f64 {
        let m = self.c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            1.0
        } else {
            m
        }
    }

    /// Nonzero `c_ijk` with `i < j`, in lexicographic order.
    pub fn nonzero_constants(&self) -> impl Iterator<Item = (usize, usize, usize, Complex64)> + '_ {
        let n = self.dim();
        (0..n).flat_map(move |i| {
            (i + 1..n).flat_map(move |j| {
                (0..n).filter_map(move |k| {
                    let v = self.structure_constant(i, j, k);
                    (v != ZERO).then_some((i, j, k, v))
                })
            })
        })
    }

    fn check_len(&self, v: &[Complex64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `[x, y] = Σ_ij x_i y_j c[i][j][·]`.
    pub fn bracket(&self, x: &[Complex64], y: &[Complex64]) -> Result<CVec> {
        self.check_len(x)?;
        self.check_len(y)?;
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for i in 0..n {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == ZERO {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.structure_constant(i, j, k);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad_x = [x, ·]` acting on coefficient vectors.
    pub fn adjoint_matrix(&self, x: &[Complex64]) -> Result<DMatrix<Complex64>> {
        self.check_len(x)?;
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |k, j| {
            (0..n).map(|i| x[i] * self.structure_constant(i, j, k)).sum()
        }))
    }

    /// Killing pairing `Tr(ad_x ∘ ad_y)`.
    pub fn killing_pairing(&self, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        let ax = self.adjoint_matrix(x)?;
        let ay = self.adjoint_matrix(y)?;
        Ok((ax * ay).trace())
    }

    /// Gram matrix of the Killing form on the given vectors.
    pub fn killing_gram(&self, vectors: &[CVec]) -> Result<DMatrix<Complex64>> {
        let ads = vectors
            .iter()
            .map(|v| self.adjoint_matrix(v))
            .collect::<Result<Vec<_>>>()?;
        let m = vectors.len();
        Ok(DMatrix::from_fn(m, m, |a, b| (&ads[a] * &ads[b]).trace()))
    }

    /// Gram matrix of the Killing form on the standard basis.
    pub fn killing_matrix(&self) -> DMatrix<Complex64> {
        let basis: Vec<CVec> = (0..self.dim()).map(|i| linalg::unit(self.dim(), i)).collect();
        self.killing_gram(&basis).expect("basis vectors have the right length")
    }

    /// `max_{ijk} ‖[[ξ_i,ξ_j],ξ_k] + [[ξ_j,ξ_k],ξ_i] + [[ξ_k,ξ_i],ξ_j]‖`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        // (ξ_i, ξ_j, ξ_k) ↦ Σ_l c_ij^l c_lk^m
        let double = |i: usize, j: usize, k: usize, m: usize| -> Complex64 {
            (0..n)
                .map(|l| self.structure_constant(i, j, l) * self.structure_constant(l, k, m))
                .sum()
        };
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut sq = 0.0;
                    for m in 0..n {
                        let v = double(i, j, k, m) + double(j, k, i, m) + double(k, i, j, m);
                        sq += v.norm_sqr();
                    }
                    worst = worst.max(libm::sqrt(sq));
                }
            }
        }
        worst
    }

    /// The subalgebra `sub` as an algebra in its own (orthonormal) basis.
    pub fn restrict(&self, sub: &Subspace) -> Result<LieAlgebra> {
        let residual = closure_residual(self, sub)?;
        if residual > SUBSPACE_TOL {
            return Err(Error::NotSubalgebra { residual });
        }
        let d = sub.dim();
        let labels = (0..d).map(|a| format!("u{a}")).collect();
        let mut entries = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                let br = self.bracket(&sub.basis()[a], &sub.basis()[b])?;
                for (c, u) in sub.basis().iter().enumerate() {
                    let coef = linalg::dot(u, &br);
                    if coef.norm() > 0.0 {
                        entries.push((a, b, c, coef));
                    }
                }
            }
        }
        LieAlgebra::from_structure_constants(labels, entries)
    }
}

fn labels_of(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Index layout of [`deformed_heisenberg`]: `1, x0..x2, p0..p2, s0..s2`.
pub mod idx {
    pub const ONE: usize = 0;
    pub const fn x(mu: usize) -> usize {
        1 + mu
    }
    pub const fn p(mu: usize) -> usize {
        4 + mu
    }
    pub const fn s(mu: usize) -> usize {
        7 + mu
    }
}

/// Writes `coef · ε_{μνρ} s^ρ` (index raised with η) into the `s` slots.
fn eps_s(coef: Complex64, mu: usize, nu: usize) -> impl Iterator<Item = (usize, Complex64)> {
    (0..3).filter_map(move |rho| {
        let e = levi_civita(mu, nu, rho) * ETA[rho];
        (e != 0.0).then(|| (idx::s(rho), coef * e))
    })
}

/// The deformed Heisenberg algebra on `(1, x̂_μ, p̂_μ, ŝ_μ)`, μ = 0, 1, 2:
///
/// ```text
/// [x̂_μ, x̂_ν] = −iθ² ε_{μνρ} ŝ^ρ      [p̂_μ, p̂_ν] = −iκ² ε_{μνρ} ŝ^ρ
/// [x̂_μ, p̂_ν] = i(η_{μν} 1 − κθ ε_{μνρ} ŝ^ρ)
/// [x̂_μ, ŝ_ν] = −iθ ε_{μνρ} ŝ^ρ        [p̂_μ, ŝ_ν] = −iκ ε_{μνρ} ŝ^ρ
/// [ŝ_μ, ŝ_ν] = −i ε_{μνρ} ŝ^ρ
/// ```
pub fn deformed_heisenberg(theta: f64, kappa: f64) -> LieAlgebra {
    let i = Complex64::new(0.0, 1.0);
    let mut entries = Vec::new();
    for mu in 0..3 {
        for nu in 0..3 {
            if mu < nu {
                for (k, v) in eps_s(-i * theta * theta, mu, nu) {
                    entries.push((idx::x(mu), idx::x(nu), k, v));
                }
                for (k, v) in eps_s(-i * kappa * kappa, mu, nu) {
                    entries.push((idx::p(mu), idx::p(nu), k, v));
                }
                for (k, v) in eps_s(-i, mu, nu) {
                    entries.push((idx::s(mu), idx::s(nu), k, v));
                }
            }
            if mu == nu {
                entries.push((idx::x(mu), idx::p(nu), idx::ONE, i * ETA[mu]));
            }
            for (k, v) in eps_s(-i * kappa * theta, mu, nu) {
                entries.push((idx::x(mu), idx::p(nu), k, v));
            }
            for (k, v) in eps_s(-i * theta, mu, nu) {
                entries.push((idx::x(mu), idx::s(nu), k, v));
            }
            for (k, v) in eps_s(-i * kappa, mu, nu) {
                entries.push((idx::p(mu), idx::s(nu), k, v));
            }
        }
    }
    let labels = labels_of(&["1", "x0", "x1", "x2", "p0", "p1", "p2", "s0", "s1", "s2"]);
    LieAlgebra::from_structure_constants(labels, entries).expect("entries are antisymmetric")
}

/// sl(2,R) alone, `[s_μ, s_ν] = −i ε_{μνρ} s^ρ`, labels `s0, s1, s2`.
pub fn sl2r() -> LieAlgebra {
    sl2r_labelled(["s0", "s1", "s2"])
}

/// sl(2,R) with custom labels.
pub fn sl2r_labelled(names: [&str; 3]) -> LieAlgebra {
    let i = Complex64::new(0.0, 1.0);
    let mut entries = Vec::new();
    for mu in 0..3 {
        for nu in mu + 1..3 {
            for (k, v) in eps_s(-i, mu, nu) {
                entries.push((mu, nu, k - idx::s(0), v));
            }
        }
    }
    LieAlgebra::from_structure_constants(labels_of(&names), entries).expect("antisymmetric")
}

/// The abelian algebra of dimension `n`, labels `a0, a1, ...`.
pub fn abelian(n: usize) -> LieAlgebra {
    let labels = (0..n).map(|k| format!("a{k}")).collect();
    LieAlgebra::from_structure_constants(labels, core::iter::empty()).expect("no entries")
}

/// `a ⊕ b` with `[a, b] = 0`; indices of `b` are shifted by `a.dim()`.
pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
    let off = a.dim();
    let labels = a.labels.iter().chain(b.labels.iter()).cloned().collect();
    let entries = a
        .nonzero_constants()
        .chain(b.nonzero_constants().map(|(i, j, k, v)| (i + off, j + off, k + off, v)));
    LieAlgebra::from_structure_constants(labels, entries).expect("antisymmetric")
}

/// A linear subspace of an algebra, kept as an orthonormal basis.
///
/// Whenever the span is closed under complex conjugation the stored basis is
/// real, so Killing Gram matrices built on it are real symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    parent_dim: usize,
    basis: Vec<CVec>,
}

impl Subspace {
    pub fn span(parent_dim: usize, vectors: &[CVec]) -> Self {
        let basis = linalg::orthonormal_basis(parent_dim, vectors, RANK_TOL);
        let basis = linalg::realify(parent_dim, &basis, RANK_TOL).unwrap_or(basis);
        Subspace { parent_dim, basis }
    }

    pub fn zero(parent_dim: usize) -> Self {
        Subspace {
            parent_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(parent_dim: usize) -> Self {
        let basis = (0..parent_dim).map(|i| linalg::unit(parent_dim, i)).collect();
        Subspace { parent_dim, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }

    pub fn basis(&self) -> &[CVec] {
        &self.basis
    }

    pub fn project(&self, v: &[Complex64]) -> CVec {
        let mut out = vec![ZERO; self.parent_dim];
        for u in &self.basis {
            let c = linalg::dot(u, v);
            for (o, x) in out.iter_mut().zip(u) {
                *o += c * x;
            }
        }
        out
    }

    /// `‖v − Pv‖`.
    pub fn distance(&self, v: &[Complex64]) -> f64 {
        let p = self.project(v);
        let diff: CVec = v.iter().zip(&p).map(|(a, b)| a - b).collect();
        linalg::norm(&diff)
    }

    /// `‖v − Pv‖ / ‖v‖`, zero for the zero vector.
    pub fn residual(&self, v: &[Complex64]) -> f64 {
        let nv = linalg::norm(v);
        if nv == 0.0 {
            return 0.0;
        }
        self.distance(v) / nv
    }

    pub fn contains(&self, v: &[Complex64], tol: f64) -> bool {
        self.residual(v) <= tol
    }

    /// `true` if `self ∩ other = {0}`.
    pub fn meets_trivially(&self, other: &Subspace) -> bool {
        let all: Vec<CVec> = self.basis.iter().chain(&other.basis).cloned().collect();
        linalg::orthonormal_basis(self.parent_dim, &all, RANK_TOL).len() == self.dim() + other.dim()
    }

    /// `self ⊆ other` up to `tol`.
    pub fn is_within(&self, other: &Subspace, tol: f64) -> bool {
        self.basis.iter().all(|v| other.contains(v, tol))
    }

    /// Orthogonal complement in the parent space.
    pub fn orthogonal_complement(&self) -> Subspace {
        let rows = DMatrix::from_fn(self.dim(), self.parent_dim, |r, c| self.basis[r][c].conj());
        let ns = linalg::null_space(&rows, RANK_TOL);
        Subspace::span(self.parent_dim, &ns)
    }
}
