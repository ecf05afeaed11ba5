//! The planar Dirac oscillator `H = α_i(p_i − iωβx_i) + Mβ` and its
//! noncommutative extension.
//!
//! Spinor index is the outermost tensor factor: a state index is
//! `spin · orbital_dim + orbital`. The orbital space is the Fock space, or
//! `Fock ⊗ irrep` once the Bopp shift `x → x + θs`, `p → p + κs` is applied.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fock::FockBasis;
use crate::irrep::IrrepSpec;
use crate::nc::{bopp_shift, NCParams};
use crate::operator::{HermitianOperator, SparseMatrix};
use crate::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat2(a: [[Complex64; 2]; 2]) -> SparseMatrix {
    SparseMatrix::from_triples(2, 2, (0..2).flat_map(|r| (0..2).map(move |k| (r, k, a[r][k]))))
}

pub fn sigma1() -> SparseMatrix {
    mat2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn sigma2() -> SparseMatrix {
    mat2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn sigma3() -> SparseMatrix {
    mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

/// `α₁ = −σ₁`, `α₂ = −σ₂`, `β = σ₃`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracMatrices {
    pub alpha: [SparseMatrix; 2],
    pub beta: SparseMatrix,
}

pub fn dirac_matrices() -> DiracMatrices {
    DiracMatrices {
        alpha: [sigma1().scale_re(-1.0), sigma2().scale_re(-1.0)],
        beta: sigma3(),
    }
}

/// `γ⁰ = σ₃`, `γ¹ = −iσ₂`, `γ² = iσ₁`.
pub fn gamma_matrices() -> [SparseMatrix; 3] {
    [sigma3(), sigma2().scale(c(0.0, -1.0)), sigma1().scale(c(0.0, 1.0))]
}

fn anticommutator(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    a.mul(b).add(&b.mul(a))
}

/// Largest deviation from `{α_i, α_j} = 2δ_ij`, `{α_i, β} = 0`, `β² = 1`.
pub fn clifford_residual() -> f64 {
    let d = dirac_matrices();
    let id = SparseMatrix::identity(2);
    let mut r = d.beta.mul(&d.beta).sub(&id).max_abs();
    for i in 0..2 {
        r = r.max(anticommutator(&d.alpha[i], &d.beta).max_abs());
        for j in 0..2 {
            let target = if i == j { id.scale_re(2.0) } else { SparseMatrix::zeros(2, 2) };
            r = r.max(anticommutator(&d.alpha[i], &d.alpha[j]).sub(&target).max_abs());
        }
    }
    r
}

/// Largest deviation from `{γ^μ, γ^ν} = 2g^{μν}`, `g = diag(1, −1, −1)`.
pub fn gamma_residual() -> f64 {
    let g = gamma_matrices();
    let eta = [1.0, -1.0, -1.0];
    let mut r = 0.0f64;
    for mu in 0..3 {
        for nu in 0..3 {
            let target = if mu == nu { SparseMatrix::identity(2).scale_re(2.0 * eta[mu]) } else { SparseMatrix::zeros(2, 2) };
            r = r.max(anticommutator(&g[mu], &g[nu]).sub(&target).max_abs());
        }
    }
    r
}

/// The sign `e` with `α₁β = i e α₂` (and then `α₂β = −i e α₁`), or `None`
/// if neither sign holds.
pub fn alpha_beta_epsilon() -> Option<f64> {
    let d = dirac_matrices();
    let lhs1 = d.alpha[0].mul(&d.beta);
    let lhs2 = d.alpha[1].mul(&d.beta);
    [1.0, -1.0].into_iter().find(|&e| {
        lhs1.sub(&d.alpha[1].scale(c(0.0, e))).max_abs() == 0.0
            && lhs2.sub(&d.alpha[0].scale(c(0.0, -e))).max_abs() == 0.0
    })
}

/// Orbital part of a spinor basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorBasis {
    fock: FockBasis,
    irrep: Option<IrrepSpec>,
}

impl SpinorBasis {
    pub fn commutative(n_max: u32) -> Self {
        SpinorBasis {
            fock: FockBasis::new(n_max),
            irrep: None,
        }
    }

    /// Spinor ⊗ Fock ⊗ irrep window.
    pub fn noncommutative(n_max: u32, irrep: IrrepSpec) -> Self {
        SpinorBasis {
            fock: FockBasis::new(n_max),
            irrep: Some(irrep),
        }
    }

    pub fn fock(&self) -> &FockBasis {
        &self.fock
    }

    pub fn irrep(&self) -> Option<&IrrepSpec> {
        self.irrep.as_ref()
    }

    pub fn orbital_dim(&self) -> usize {
        self.fock.dim() * self.irrep.map_or(1, |s| s.dim())
    }

    pub fn dim(&self) -> usize {
        2 * self.orbital_dim()
    }

    /// `(spin, orbital)` of a state index; spin 0 is `σ₃ = +1`.
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.orbital_dim(), i % self.orbital_dim())
    }
}

/// Orbital `X_i`, `P_i` (Bopp-shifted when the basis carries an irrep).
#[derive(Clone, Debug)]
struct Orbital {
    x: [SparseMatrix; 2],
    p: [SparseMatrix; 2],
}

fn fock_scale(params: &NCParams) -> f64 {
    // the Fock length needs a positive scale; at ω = 0 fall back to M
    if params.omega > 0.0 {
        params.mass * params.omega
    } else {
        params.mass
    }
}

fn orbital(params: &NCParams, basis: &SpinorBasis) -> Result<Orbital> {
    params.validate_allowing_zero_omega()?;
    let mw = fock_scale(params);
    match basis.irrep {
        None => {
            if params.theta != 0.0 || params.kappa != 0.0 {
                return Err(Error::InvalidParameter("commutative basis needs theta = kappa = 0"));
            }
            let ps = basis.fock.phase_space(mw)?;
            Ok(Orbital {
                x: [ps.x1.into_sparse(), ps.x2.into_sparse()],
                p: [ps.p1.into_sparse(), ps.p2.into_sparse()],
            })
        }
        Some(irrep) => {
            let b = bopp_shift(&basis.fock, &irrep, mw, params.theta, params.kappa)?;
            Ok(Orbital { x: b.x, p: b.p })
        }
    }
}

/// `Σ_i α_i ⊗ P_i + Σ_i C_i ⊗ X_i + M β ⊗ 1`, summed in that order.
fn assemble(orb: &Orbital, x_coeff: &[SparseMatrix; 2], mass: f64) -> Result<HermitianOperator> {
    let d = dirac_matrices();
    let n = orb.x[0].nrows();
    let mut h = SparseMatrix::zeros(2 * n, 2 * n);
    for i in 0..2 {
        h = h.add(&d.alpha[i].kron(&orb.p[i]));
    }
    for i in 0..2 {
        h = h.add(&x_coeff[i].kron(&orb.x[i]));
    }
    h = h.add(&d.beta.scale_re(mass).kron(&SparseMatrix::identity(n)));
    HermitianOperator::try_new(h, 0.0)
}

/// Spinor coefficient of `X_i` in the oscillator form: `−iω α_i β`.
pub fn oscillator_coefficients(omega: f64) -> [SparseMatrix; 2] {
    let d = dirac_matrices();
    [0, 1].map(|i| d.alpha[i].mul(&d.beta).scale(c(0.0, -omega)))
}

/// Spinor coefficient of `X_j` in `−α_i eA_i` for the symmetric gauge
/// `eA_i = −s ω ε_ij X_j` (that is, `eB = 2ω` up to the sign `s`), with
/// `ε₁₂ = +1`. Collected per `X_j` so the sum order matches the oscillator.
pub fn landau_coefficients(omega: f64, sign: f64) -> [SparseMatrix; 2] {
    let d = dirac_matrices();
    let eps = [[0.0, 1.0], [-1.0, 0.0]];
    [0, 1].map(|j| {
        let mut m = SparseMatrix::zeros(2, 2);
        for i in 0..2 {
            if eps[i][j] != 0.0 {
                m = m.add(&d.alpha[i].scale_re(sign * omega * eps[i][j]));
            }
        }
        m
    })
}

/// `α_i(p_i − iωβx_i) + Mβ` with `θ = κ = 0`.
pub fn dirac_oscillator(params: &NCParams, basis: &SpinorBasis) -> Result<HermitianOperator> {
    if basis.irrep.is_some() {
        return Err(Error::InvalidParameter("commutative oscillator needs a commutative basis"));
    }
    let orb = orbital(params, basis)?;
    assemble(&orb, &oscillator_coefficients(params.omega), params.mass)
}

/// The oscillator with `x_i → x_i + θs_i`, `p_i → p_i + κs_i`.
pub fn nc_dirac_oscillator(params: &NCParams, basis: &SpinorBasis) -> Result<HermitianOperator> {
    if basis.irrep.is_none() {
        return Err(Error::InvalidParameter("noncommutative oscillator needs an irrep"));
    }
    let orb = orbital(params, basis)?;
    assemble(&orb, &oscillator_coefficients(params.omega), params.mass)
}

/// Either oscillator, depending on the basis.
pub fn oscillator(params: &NCParams, basis: &SpinorBasis) -> Result<HermitianOperator> {
    let orb = orbital(params, basis)?;
    assemble(&orb, &oscillator_coefficients(params.omega), params.mass)
}

/// `α_i(p_i − eA_i) + Mβ` in the symmetric gauge with `eB = 2ω`.
pub fn landau_hamiltonian(params: &NCParams, basis: &SpinorBasis, sign: f64) -> Result<HermitianOperator> {
    let orb = orbital(params, basis)?;
    assemble(&orb, &landau_coefficients(params.omega, sign), params.mass)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandauEquivalence {
    /// `e` in `α₁β = i e α₂`.
    pub alpha_beta_epsilon: f64,
    /// Signs `s ∈ {+1, −1}` for which the matrices are identical.
    pub matching_signs: Vec<f64>,
    /// `max |H_osc − H_Landau|` for `s = +1` and `s = −1`.
    pub max_difference: [f64; 2],
    pub dim: usize,
}

impl LandauEquivalence {
    /// The unique matching sign, if exactly one matched.
    pub fn sign(&self) -> Option<f64> {
        (self.matching_signs.len() == 1).then(|| self.matching_signs[0])
    }
}

/// Compares the oscillator with the Landau form for both gauge signs.
pub fn landau_equivalence_check(params: &NCParams, basis: &SpinorBasis) -> Result<LandauEquivalence> {
    let e = alpha_beta_epsilon().ok_or(Error::NoSignMatch)?;
    let orb = orbital(params, basis)?;
    let h = assemble(&orb, &oscillator_coefficients(params.omega), params.mass)?;
    let mut matching = Vec::new();
    let mut diff = [0.0; 2];
    for (k, s) in [1.0, -1.0].into_iter().enumerate() {
        let l = assemble(&orb, &landau_coefficients(params.omega, s), params.mass)?;
        diff[k] = h.sub(&l).max_abs();
        if h == l {
            matching.push(s);
        }
    }
    if matching.is_empty() {
        return Err(Error::NoSignMatch);
    }
    Ok(LandauEquivalence {
        alpha_beta_epsilon: e,
        matching_signs: matching,
        max_difference: diff,
        dim: basis.dim(),
    })
}

/// `J = 1 ⊗ (L₀ + s₀) + c σ₃ ⊗ 1`.
pub fn rotation_generator(basis: &SpinorBasis, c_spin: f64) -> HermitianOperator {
    let fock = &basis.fock;
    let orbital: Vec<f64> = match basis.irrep {
        None => fock.states().iter().map(|&(a, b)| b as f64 - a as f64).collect(),
        Some(irrep) => fock
            .states()
            .iter()
            .flat_map(|&(a, b)| irrep.ms().into_iter().map(move |m| b as f64 - a as f64 + m.to_f64()))
            .collect(),
    };
    let d: Vec<f64> = [c_spin, -c_spin]
        .iter()
        .flat_map(|&s| orbital.iter().map(move |&o| o + s))
        .collect();
    HermitianOperator::diagonal(&d)
}

/// The spin coefficient `c ∈ {+½, −½}` for which `J` commutes exactly with `h`.
pub fn conserved_rotation_generator(h: &HermitianOperator, basis: &SpinorBasis) -> Result<f64> {
    [0.5, -0.5]
        .into_iter()
        .find(|&cs| h.commutator(&rotation_generator(basis, cs)).max_abs() == 0.0)
        .ok_or(Error::NoConservedGenerator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::eigen::dense_eigenvalues;
    use crate::HalfInt;

    #[test]
    fn clifford_and_gamma_relations_are_exact() {
        assert_eq!(clifford_residual(), 0.0);
        assert_eq!(gamma_residual(), 0.0);
        let d = dirac_matrices();
        // α_i = γ⁰γ^i
        let g = gamma_matrices();
        assert_eq!(g[0].mul(&g[1]).sub(&d.alpha[0]).max_abs(), 0.0);
        assert_eq!(g[0].mul(&g[2]).sub(&d.alpha[1]).max_abs(), 0.0);
    }

    #[test]
    fn epsilon_sign_from_hand_arithmetic() {
        // α₁β = −σ₁σ₃ = −(−iσ₂) = iσ₂ = −iα₂, so e = −1
        assert_eq!(alpha_beta_epsilon(), Some(-1.0));
    }

    #[test]
    fn commutative_oscillator_matches_landau_for_one_sign() {
        let p = NCParams::commutative(1.0, 0.7).unwrap();
        let basis = SpinorBasis::commutative(6);
        let rep = landau_equivalence_check(&p, &basis).unwrap();
        assert_eq!(rep.matching_signs, [1.0]);
        assert!(rep.max_difference[1] > 0.1);
    }

    #[test]
    fn zero_frequency_matches_both_signs() {
        let p = NCParams { mass: 1.0, omega: 0.0, theta: 0.0, kappa: 0.0 };
        let basis = SpinorBasis::commutative(4);
        let rep = landau_equivalence_check(&p, &basis).unwrap();
        assert_eq!(rep.matching_signs, [1.0, -1.0]);
        // vacuum block is Mβ
        let h = dirac_oscillator(&p, &basis).unwrap();
        let n = basis.orbital_dim();
        assert_eq!(h.get(0, 0), c(1.0, 0.0));
        assert_eq!(h.get(n, n), c(-1.0, 0.0));
        assert_eq!(h.get(0, n), c(0.0, 0.0));
    }

    #[test]
    fn nc_reduces_to_commutative_at_zero_deformation() {
        let p = NCParams::commutative(1.0, 0.5).unwrap();
        let irrep = IrrepSpec::discrete_plus(HalfInt::ONE, 4).unwrap();
        let nc = nc_dirac_oscillator(&p, &SpinorBasis::noncommutative(3, irrep)).unwrap();
        let com = dirac_oscillator(&p, &SpinorBasis::commutative(3)).unwrap();
        // spin ⊗ fock ⊗ irrep = (spin ⊗ fock) ⊗ irrep
        let expected = com.kron(&HermitianOperator::diagonal(&[1.0; 4]));
        assert!(nc.sub(&expected).max_abs() < 1e-15);
    }

    #[test]
    fn nc_equivalence_persists() {
        let p = NCParams::new(1.0, 0.6, 0.1, 0.1).unwrap();
        let irrep = IrrepSpec::discrete_plus(HalfInt::ONE, 6).unwrap();
        let basis = SpinorBasis::noncommutative(4, irrep);
        let rep = landau_equivalence_check(&p, &basis).unwrap();
        assert_eq!(rep.matching_signs, [1.0]);
    }

    #[test]
    fn rotation_generator_spin_coefficient() {
        let p = NCParams::commutative(1.0, 0.8).unwrap();
        let basis = SpinorBasis::commutative(5);
        let h = dirac_oscillator(&p, &basis).unwrap();
        let c0 = conserved_rotation_generator(&h, &basis).unwrap();
        assert_eq!(c0, 0.5);
        let other = h.commutator(&rotation_generator(&basis, -c0)).max_abs();
        assert!(other > 0.1);
        let irrep = IrrepSpec::discrete_plus(HalfInt::ONE, 5).unwrap();
        let nb = SpinorBasis::noncommutative(4, irrep);
        let pn = NCParams::new(1.0, 0.8, 0.3, 0.2).unwrap();
        let hn = nc_dirac_oscillator(&pn, &nb).unwrap();
        assert_eq!(conserved_rotation_generator(&hn, &nb).unwrap(), c0);
    }

    #[test]
    fn mass_reflection_pairs_the_spectrum() {
        // σ₃ H(M) σ₃ = −H(−M)
        let basis = SpinorBasis::commutative(5);
        let hp = dirac_oscillator(&NCParams::commutative(1.0, 0.3).unwrap(), &basis).unwrap();
        let orb = orbital(&NCParams::commutative(1.0, 0.3).unwrap(), &basis).unwrap();
        let hm = assemble(&orb, &oscillator_coefficients(0.3), -1.0).unwrap();
        let mut a = dense_eigenvalues(&hp).unwrap();
        let mut b: Vec<f64> = dense_eigenvalues(&hm).unwrap().iter().map(|x| -x).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn nonrelativistic_ladder() {
        // ω/M = 1e-3: low positive levels sit at M + O(ω) and are evenly spaced
        let (m, w) = (1.0, 1e-3);
        let basis = SpinorBasis::commutative(14);
        let h = dirac_oscillator(&NCParams::commutative(m, w).unwrap(), &basis).unwrap();
        let ev = dense_eigenvalues(&h).unwrap();
        let mut pos: Vec<f64> = ev.into_iter().filter(|&e| e > 0.0).collect();
        pos.sort_by(f64::total_cmp);
        let mut levels: Vec<f64> = Vec::new();
        for e in pos {
            if levels.last().is_none_or(|&l| e - l > 1e-3 * w) {
                levels.push(e);
            }
        }
        assert!((levels[0] - m).abs() < 10.0 * w);
        let gaps: Vec<f64> = levels.windows(2).take(4).map(|p| p[1] - p[0]).collect();
        for pair in gaps.windows(2) {
            assert!((pair[1] - pair[0]).abs() < 10.0 * w * w / m, "{gaps:?}");
        }
        for g in &gaps {
            assert!((g - 2.0 * w).abs() < 0.1 * w, "{gaps:?}");
        }
    }
}
