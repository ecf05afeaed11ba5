//! Lowest eigenpairs of Hermitian operators.
//!
//! Below [`DENSE_LIMIT`] the operator is densified, reduced to tridiagonal
//! form with nalgebra's Householder routine and finished with implicit QL
//! (nalgebra's own QR sweep loses accuracy on graded spectra). Above it a
//! thick-restart Lanczos iteration with full reorthogonalization is used. Either way every returned pair is checked
//! against `‖Hv − Ev‖ ≤ RESIDUAL_TOL · ‖v‖`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricTridiagonal};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, norm, CVec};
use crate::operator::{HermitianOperator, SparseMatrix};
use crate::{Error, Result};

pub const DENSE_LIMIT: usize = 2000;
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Hermiticity accepted by the solvers.
pub const HERMITIAN_TOL: f64 = 1e-12;

const LANCZOS_SEED: u64 = 0x5eed_1a2c;
const LANCZOS_TOL: f64 = 1e-10;
const MAX_RESTARTS: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPairs {
    /// Ascending; ties keep the solver's column order.
    pub values: Vec<f64>,
    pub vectors: Vec<CVec>,
    /// `max_i ‖Hv_i − E_i v_i‖ / max(1, |E_i|)`.
    pub max_residual: f64,
}

fn check_hermitian(op: &SparseMatrix) -> Result<()> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch {
            expected: op.nrows(),
            found: op.ncols(),
        });
    }
    let residual = op.hermiticity_residual();
    if residual > HERMITIAN_TOL * op.max_abs().max(1.0) {
        return Err(Error::NonHermitian { residual });
    }
    Ok(())
}

fn pair_residual(op: &SparseMatrix, e: f64, v: &[Complex64]) -> f64 {
    let hv = op.matvec(v);
    let r2: f64 = hv.iter().zip(v).map(|(h, x)| (h - x * e).norm_sqr()).sum();
    libm::sqrt(r2) / norm(v)
}

fn sorted_pairs(values: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// off-diagonal `e[i]` between `i` and `i + 1`), rotating the columns of `z`.
/// Returns `false` if some eigenvalue needed more than 60 sweeps.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut DMatrix<Complex64>) -> bool {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (mut left, mut right) = z.columns_range_pair_mut(i, i + 1);
                for (zi, zj) in left.iter_mut().zip(right.iter_mut()) {
                    let f = *zj;
                    *zj = *zi * s + f * c;
                    *zi = *zi * c - f * s;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    true
}

/// Full eigendecomposition of a dense Hermitian matrix: Householder
/// tridiagonalization (nalgebra) followed by implicit QL.
fn hermitian_eigen(a: DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok((vec![0.0; n], DMatrix::identity(n, n)));
    }
    if n == 1 {
        return Ok((vec![a[(0, 0)].re], DMatrix::identity(1, 1)));
    }
    let (mut q, d, off) = SymmetricTridiagonal::new(a / Complex64::new(scale, 0.0)).unpack();
    let mut d: Vec<f64> = d.iter().copied().collect();
    let mut e: Vec<f64> = off.iter().copied().collect();
    e.push(0.0);
    if !tridiagonal_ql(&mut d, &mut e, &mut q) {
        return Err(Error::NoConvergence("tridiagonal QL iteration limit"));
    }
    Ok((d.into_iter().map(|x| x * scale).collect(), q))
}

fn dense(op: &SparseMatrix, count: usize) -> Result<EigenPairs> {
    let (values, vecs) = hermitian_eigen(op.to_dense())?;
    let order = sorted_pairs(&values, count);
    let vectors: Vec<CVec> = order
        .iter()
        .map(|&i| vecs.column(i).iter().copied().collect())
        .collect();
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let max_residual = values
        .iter()
        .zip(&vectors)
        .map(|(&e, v)| pair_residual(op, e, v))
        .fold(0.0, f64::max);
    Ok(EigenPairs {
        values,
        vectors,
        max_residual,
    })
}

/// Orthogonalizes `w` against `basis` twice; returns its remaining norm.
fn orthogonalize(w: &mut CVec, basis: &[CVec]) -> f64 {
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, w);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= vi * c;
            }
        }
    }
    norm(w)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn lanczos(op: &SparseMatrix, count: usize) -> Result<EigenPairs> {
    let n = op.nrows();
    let keep = (count + 10).min(n);
    let max_basis = (2 * keep + 40).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut basis: Vec<CVec> = Vec::new();
    let mut images: Vec<CVec> = Vec::new();

    let mut next = random_vector(&mut rng, n);
    // a single Krylov sequence sees one copy of each degenerate level, so
    // convergence is only accepted once a fresh random direction leaves the
    // wanted Ritz values unchanged
    let mut confirmed: Option<Vec<f64>> = None;
    for _ in 0..MAX_RESTARTS {
        // Krylov expansion from `next`
        while basis.len() < max_basis {
            let mut w = next;
            let mut nw = orthogonalize(&mut w, &basis);
            if nw < 1e-12 {
                // invariant subspace reached; continue with a fresh direction
                w = random_vector(&mut rng, n);
                nw = orthogonalize(&mut w, &basis);
                if nw < 1e-12 {
                    break;
                }
            }
            for x in w.iter_mut() {
                *x /= nw;
            }
            let hw = op.matvec(&w);
            next = hw.clone();
            basis.push(w);
            images.push(hw);
        }

        // Rayleigh-Ritz on the current basis
        let k = basis.len();
        let t = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
        let (values, ritz_vectors) = hermitian_eigen(t)?;
        let order = sorted_pairs(&values, keep.min(k));
        let combine = |src: &[CVec], y: &[Complex64]| -> CVec {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (col, &c) in src.iter().zip(y) {
                for (o, x) in out.iter_mut().zip(col) {
                    *o += x * c;
                }
            }
            out
        };
        let mut ritz = Vec::with_capacity(order.len());
        let mut worst: Option<(f64, CVec)> = None;
        for (rank, &i) in order.iter().enumerate() {
            let y: Vec<Complex64> = ritz_vectors.column(i).iter().copied().collect();
            let v = combine(&basis, &y);
            let hv = combine(&images, &y);
            let e = values[i];
            if rank < count {
                let r: CVec = hv.iter().zip(&v).map(|(h, x)| h - x * e).collect();
                let rn = norm(&r) / e.abs().max(1.0);
                if rn > LANCZOS_TOL && worst.as_ref().is_none_or(|(w, _)| rn > *w) {
                    worst = Some((rn, r));
                }
            }
            ritz.push(v);
        }
        let vals: Vec<f64> = order.iter().take(count).map(|&i| values[i]).collect();
        let stable = confirmed.as_ref().is_some_and(|prev| {
            prev.iter()
                .zip(&vals)
                .all(|(a, b)| (a - b).abs() <= LANCZOS_TOL * a.abs().max(1.0))
        });
        if worst.is_none() && !stable {
            confirmed = Some(vals.clone());
            worst = Some((0.0, random_vector(&mut rng, n)));
        }
        match worst {
            None => {
                let vecs: Vec<CVec> = ritz.into_iter().take(count).collect();
                let max_residual = vals
                    .iter()
                    .zip(&vecs)
                    .map(|(&e, v)| pair_residual(op, e, v))
                    .fold(0.0, f64::max);
                return Ok(EigenPairs {
                    values: vals,
                    vectors: vecs,
                    max_residual,
                });
            }
            Some((_, r)) => {
                // thick restart: keep the wanted Ritz vectors, continue from a residual
                // fresh images keep rounding from accumulating across restarts
                images = ritz.iter().map(|v| op.matvec(v)).collect();
                basis = ritz;
                next = r;
                if basis.len() >= max_basis {
                    basis.truncate(max_basis - 1);
                    images.truncate(max_basis - 1);
                }
            }
        }
    }
    Err(Error::NoConvergence("Lanczos restart limit reached"))
}

/// The `count` lowest eigenpairs (all of them if `count ≥ dim`).
pub fn lowest_eigenpairs(op: &HermitianOperator, count: usize) -> Result<EigenPairs> {
    lowest_eigenpairs_sparse(op.as_sparse(), count)
}

/// As [`lowest_eigenpairs`], for a matrix not yet known to be Hermitian.
pub fn lowest_eigenpairs_sparse(op: &SparseMatrix, count: usize) -> Result<EigenPairs> {
    check_hermitian(op)?;
    let n = op.nrows();
    let count = count.min(n);
    if n == 0 || count == 0 {
        return Ok(EigenPairs {
            values: Vec::new(),
            vectors: Vec::new(),
            max_residual: 0.0,
        });
    }
    let pairs = if n <= DENSE_LIMIT { dense(op, count)? } else { lanczos(op, count)? };
    if pairs.max_residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence("eigenpair residual above tolerance"));
    }
    Ok(pairs)
}

/// The `count` lowest eigenvalues, ascending.
pub fn eigenvalues(op: &HermitianOperator, count: usize) -> Result<Vec<f64>> {
    Ok(lowest_eigenpairs(op, count)?.values)
}

/// All eigenvalues of a dense-sized operator, ascending.
pub fn dense_eigenvalues(op: &HermitianOperator) -> Result<Vec<f64>> {
    eigenvalues(op, op.dim())
}

/// Forces the Lanczos path regardless of size; used to cross-check the two solvers.
pub fn lanczos_eigenpairs(op: &HermitianOperator, count: usize) -> Result<EigenPairs> {
    let pairs = lanczos(op.as_sparse(), count.min(op.dim()))?;
    if pairs.max_residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence("eigenpair residual above tolerance"));
    }
    Ok(pairs)
}
