//! Small dense helpers shared by the Lie-algebra and spectral code.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Relative singular-value cutoff used for ranks and null spaces.
pub const RANK_TOL: f64 = 1e-9;

pub type CVec = Vec<Complex64>;

pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    libm::sqrt(x.iter().map(|a| a.norm_sqr()).sum())
}

pub fn unit(dim: usize, i: usize) -> CVec {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

fn columns_matrix(dim: usize, vectors: &[CVec]) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, vectors.len(), |r, c| vectors[c][r])
}

/// Orthonormal basis of `span(vectors)`, rank decided by `σ > rel_tol·σ_max`.
pub fn orthonormal_basis(dim: usize, vectors: &[CVec], rel_tol: f64) -> Vec<CVec> {
    if vectors.is_empty() || dim == 0 {
        return Vec::new();
    }
    let m = columns_matrix(dim, vectors);
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Vec::new();
    }
    let mut keep: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rel_tol * smax)
        .map(|(i, &s)| (s, i))
        .collect();
    keep.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keep.iter()
        .map(|&(_, i)| u.column(i).iter().copied().collect())
        .collect()
}

/// Basis of `{x : A x = 0}` with the same relative cutoff.
pub fn null_space(a: &DMatrix<Complex64>, rel_tol: f64) -> Vec<CVec> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    // pad to at least n rows so the SVD returns a full right basis
    let rows = a.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= rel_tol * smax)
        .map(|(i, _)| v_t.row(i).iter().map(|z| z.conj()).collect())
        .collect()
}

/// A real orthonormal basis for the same span, if the span is closed under
/// complex conjugation.
pub fn realify(dim: usize, basis: &[CVec], rel_tol: f64) -> Option<Vec<CVec>> {
    let mut parts = Vec::with_capacity(2 * basis.len());
    for v in basis {
        parts.push(v.iter().map(|z| Complex64::new(z.re, 0.0)).collect::<CVec>());
        parts.push(v.iter().map(|z| Complex64::new(z.im, 0.0)).collect::<CVec>());
    }
    let real = orthonormal_basis(dim, &parts, rel_tol);
    if real.len() != basis.len() {
        return None;
    }
    // normalise sign: first significant entry positive
    Some(
        real.into_iter()
            .map(|mut v| {
                let lead = v.iter().find(|z| z.norm() > 1e-12).map(|z| z.re).unwrap_or(1.0);
                if lead < 0.0 {
                    v.iter_mut().for_each(|z| *z = -*z);
                }
                v
            })
            .collect(),
    )
}

/// Inertia of a Hermitian form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn is_nondegenerate(&self) -> bool {
        self.zero == 0
    }

    /// Same inertia up to an overall sign of the form.
    pub fn matches_up_to_sign(&self, other: &Signature) -> bool {
        self.zero == other.zero
            && ((self.positive, self.negative) == (other.positive, other.negative)
                || (self.positive, self.negative) == (other.negative, other.positive))
    }
}

/// Signature of the Hermitian part of `gram`.
pub fn signature(gram: &DMatrix<Complex64>, rel_tol: f64) -> Signature {
    if gram.nrows() == 0 {
        return Signature::default();
    }
    let herm = (gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let scale = eig.eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let mut s = Signature::default();
    for &e in eig.eigenvalues.iter() {
        if scale == 0.0 || e.abs() <= rel_tol * scale {
            s.zero += 1;
        } else if e > 0.0 {
            s.positive += 1;
        } else {
            s.negative += 1;
        }
    }
    s
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rank_of_dependent_vectors() {
        let v = [vec![c(1.0), c(0.0), c(1.0)], vec![c(2.0), c(0.0), c(2.0)], vec![c(0.0), c(1.0), c(0.0)]];
        assert_eq!(orthonormal_basis(3, &v, RANK_TOL).len(), 2);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // x + y + z = 0 in C^3
        let a = DMatrix::from_row_slice(1, 3, &[c(1.0), c(1.0), c(1.0)]);
        let ns = null_space(&a, RANK_TOL);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s: Complex64 = v.iter().sum();
            assert!(s.norm() < 1e-14);
        }
    }

    #[test]
    fn imaginary_span_has_real_basis() {
        let i = Complex64::new(0.0, 1.0);
        let v = vec![vec![i, i * 2.0, c(0.0)]];
        let b = orthonormal_basis(3, &v, RANK_TOL);
        let r = realify(3, &b, RANK_TOL).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].iter().all(|z| z.im == 0.0));
        assert!((r[0][1].re - 2.0 / 5.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|t| t.ln()).collect();
        let y: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|t| (3.0 * t.powi(3)).ln()).collect();
        assert!((fit_slope(&x, &y).unwrap() - 3.0).abs() < 1e-12);
    }
}
