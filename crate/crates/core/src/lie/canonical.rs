//! Canonical transformations of the Heisenberg and sl(2,R) parts.

use nalgebra::Matrix3;

use super::{levi_civita, ETA};

pub type Mat3 = Matrix3<f64>;

/// η = diag(1, −1, −1).
pub fn metric() -> Mat3 {
    Mat3::from_diagonal(&nalgebra::Vector3::from(ETA))
}

/// `(B^σ)_{μν} = ε_{μνρ} η^{ρσ}`.
pub fn b_matrix(sigma: usize) -> Mat3 {
    Mat3::from_fn(|mu, nu| levi_civita(mu, nu, sigma) * ETA[sigma])
}

/// Frobenius norms of `Ω η Ωᵗ − η` and of `Ω̃ᵗ B^σ − B^σ Ω̃` for σ = 0, 1, 2.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CanonicalResiduals {
    pub metric: f64,
    pub intertwiner: [f64; 3],
}

impl CanonicalResiduals {
    pub fn within(&self, tol: f64) -> bool {
        self.metric <= tol && self.intertwiner.iter().all(|&r| r <= tol)
    }
}

pub fn canonical_residuals(omega: &Mat3, omega_tilde: &Mat3) -> CanonicalResiduals {
    let eta = metric();
    let metric = (omega * eta * omega.transpose() - eta).norm();
    let intertwiner = [0, 1, 2].map(|s| {
        let b = b_matrix(s);
        (omega_tilde.transpose() * b - b * omega_tilde).norm()
    });
    CanonicalResiduals { metric, intertwiner }
}

pub fn canonical_check(omega: &Mat3, omega_tilde: &Mat3, tol: f64) -> bool {
    canonical_residuals(omega, omega_tilde).within(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    // loop transcription, independent of nalgebra products
    fn brute_intertwiner(w: &[[f64; 3]; 3], sigma: usize) -> f64 {
        let eta = [1.0, -1.0, -1.0];
        let eps = |a: usize, b: usize, c: usize| -> f64 {
            let p = [a, b, c];
            if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] {
                return 0.0;
            }
            let inv = (p[0] > p[1]) as i32 + (p[0] > p[2]) as i32 + (p[1] > p[2]) as i32;
            if inv % 2 == 0 { 1.0 } else { -1.0 }
        };
        let mut sq = 0.0;
        for mu in 0..3 {
            for nu in 0..3 {
                let mut v = 0.0;
                for a in 0..3 {
                    v += w[a][mu] * eps(a, nu, sigma) * eta[sigma];
                    v -= eps(mu, a, sigma) * eta[sigma] * w[a][nu];
                }
                sq += v * v;
            }
        }
        sq.sqrt()
    }

    #[test]
    fn identity_is_canonical() {
        assert!(canonical_check(&Mat3::identity(), &Mat3::identity(), 1e-14));
    }

    #[test]
    fn b_matrices_are_antisymmetric() {
        for s in 0..3 {
            let b = b_matrix(s);
            assert_eq!(b, -b.transpose());
        }
        assert_eq!(b_matrix(0)[(1, 2)], 1.0);
        assert_eq!(b_matrix(1)[(2, 0)], -1.0);
    }

    #[test]
    fn spatial_reflection() {
        let d = metric();
        let r = canonical_residuals(&d, &d);
        assert_eq!(r.metric, 0.0);
        let w = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        for s in 0..3 {
            assert!((r.intertwiner[s] - brute_intertwiner(&w, s)).abs() < 1e-15);
        }
        // reflection commutes with B^0 only
        assert_eq!(r.intertwiner[0], 0.0);
        assert!((r.intertwiner[1] - 8f64.sqrt()).abs() < 1e-15);
        assert!((r.intertwiner[2] - 8f64.sqrt()).abs() < 1e-15);
        assert!(!canonical_check(&d, &d, 1e-10));
        assert!(canonical_check(&d, &Mat3::identity(), 1e-14));
    }

    #[test]
    fn boost_preserves_metric() {
        let (c, s) = (0.3f64.cosh(), 0.3f64.sinh());
        let boost = Mat3::new(c, s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        assert!(canonical_residuals(&boost, &Mat3::identity()).metric < 1e-14);
    }

    #[test]
    fn scramble_fails() {
        let m = Mat3::new(0.3, 2.0, -1.0, 0.7, 0.1, 0.4, -1.2, 0.5, 0.9);
        assert!(!canonical_check(&m, &m, 1e-6));
    }
}
