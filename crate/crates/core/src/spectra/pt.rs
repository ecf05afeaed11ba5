//! Perturbative energies of the shifted oscillator.
//!
//! Small `|z|`: `Ĥ = H₀ + V` with `H₀` the diagonal part (see
//! [`unperturbed_energy`]) and `V` the four hops `a†s₊`, `a s₋`, `b†s₋`,
//! `b s₊`. Large `|z|`: the same diagonal, now read as the leading term with
//! relative corrections of order `ω/M`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::irrep::IrrepSpec;
use crate::nc::{coupling_part, diagonal_part, unperturbed_energy, NCParams, SectorBasis, TensorState};
use crate::{Error, Result};

/// Relative tolerance for the closed-form collapse of `E⁽⁰⁾ + E⁽²⁾`.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Energies are equal for degeneracy purposes within this absolute window.
const DEGENERACY_TOL: f64 = 1e-12;

fn check_state(irrep: &IrrepSpec, s: &TensorState) -> Result<()> {
    if irrep.supports(s.m) {
        Ok(())
    } else {
        Err(Error::InvalidQuantumNumbers {
            n_a: s.n_a,
            n_b: s.n_b,
            m: s.m,
        })
    }
}

/// Printed small-`|z|` series through second order.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmallZ {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub total: f64,
    /// `ω(n + 1) + κm − (|z|²/2M)·m·l`.
    pub closed_form: f64,
}

impl SmallZ {
    pub fn identity_residual(&self) -> f64 {
        (self.total - self.closed_form).abs()
    }
}

/// `ω(n_a + n_b + 1) + κm − (|z|²/2M)·m·l`.
pub fn closed_form_small_z(params: &NCParams, s: &TensorState) -> f64 {
    let m = s.m.to_f64();
    params.omega * (s.n() + 1) as f64 + params.kappa * m - params.z_abs2() / (2.0 * params.mass) * m * s.l() as f64
}

/// `E⁽⁰⁾`, `E⁽¹⁾ = 0`, `E⁽²⁾ = −(|z|²/2M)(m² − λ) − (|z|²/2M)·m·l` and their sum.
///
/// The sum is checked against [`closed_form_small_z`]; the `(m² − λ)` terms
/// cancel, so any mismatch beyond rounding is a bug.
pub fn pt_small_z(params: &NCParams, irrep: &IrrepSpec, s: &TensorState) -> Result<SmallZ> {
    check_state(irrep, s)?;
    let lambda = irrep.lambda();
    let m = s.m.to_f64();
    let g = params.z_abs2() / (2.0 * params.mass);
    let e0 = unperturbed_energy(params, lambda, s);
    let e2 = -g * (m * m - lambda) - g * m * s.l() as f64;
    let out = SmallZ {
        e0,
        e1: 0.0,
        e2,
        total: e0 + e2,
        closed_form: closed_form_small_z(params, s),
    };
    let scale = e0.abs().max(e2.abs()).max(1.0);
    assert!(
        out.identity_residual() <= IDENTITY_TOL * scale,
        "E0 + E2 does not collapse: {out:?}"
    );
    Ok(out)
}

/// Leading small-`|z|` energy with the second-order sign obtained from the
/// hop sum: `ω(n + 1) + κm + (|z|²/2M)·m·l`.
pub fn corrected_small_z(params: &NCParams, s: &TensorState) -> f64 {
    let m = s.m.to_f64();
    params.omega * (s.n() + 1) as f64 + params.kappa * m + params.z_abs2() / (2.0 * params.mass) * m * s.l() as f64
}

/// Second-order shift from the four hop amplitudes in closed form, with
/// denominators `E⁽⁰⁾(s) − E⁽⁰⁾(s')` taken from [`unperturbed_energy`].
/// To leading order in `|z|` and at `κ = 0` this is
/// `−(|z|²/2M)(m² − λ) + (|z|²/2M)·m·l`.
pub fn second_order_closed_form(params: &NCParams, lambda: f64, s: &TensorState) -> f64 {
    let m = s.m.to_f64();
    let (na, nb) = (s.n_a as f64, s.n_b as f64);
    let up = m * m + m - lambda;
    let down = m * m - m - lambda;
    let pref = params.z_abs2() * params.omega / (4.0 * params.mass);
    let e = unperturbed_energy(params, lambda, s);
    let hop = |weight: f64, da: i64, db: i64, dm: i64| -> f64 {
        if weight <= 0.0 {
            return 0.0;
        }
        let t = TensorState::new((s.n_a as i64 + da) as u32, (s.n_b as i64 + db) as u32, s.m + dm);
        pref * weight / (e - unperturbed_energy(params, lambda, &t))
    };
    // a†s₊, a s₋, b†s₋, b s₊
    hop((na + 1.0) * up, 1, 0, 1) + hop(na * down, -1, 0, -1) + hop((nb + 1.0) * down, 0, 1, -1) + hop(nb * up, 0, -1, 1)
}

/// Large-`|z|` leading energy and the expected relative correction scale.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LargeZ {
    pub e0: f64,
    /// `ω/M`.
    pub relative_correction_bound: f64,
}

/// `ℰ⁽⁰⁾ = (|z|²/2M)(m² − λ) + κm + ω(n_a + n_b + 1)`.
pub fn pt_large_z(params: &NCParams, irrep: &IrrepSpec, s: &TensorState) -> Result<LargeZ> {
    check_state(irrep, s)?;
    Ok(LargeZ {
        e0: unperturbed_energy(params, irrep.lambda(), s),
        relative_correction_bound: params.omega / params.mass,
    })
}

/// `⟨s|V|s⟩` from the assembled coupling.
pub fn first_order(params: &NCParams, basis: &SectorBasis, index: usize) -> Result<f64> {
    Ok(coupling_part(params, basis)?.get(index, index).re)
}

/// Rayleigh-Schrödinger second order from the assembled `H₀` and `V`,
/// summing over every non-degenerate state of `basis`.
pub fn second_order_sum(params: &NCParams, basis: &SectorBasis, index: usize) -> Result<f64> {
    let h0 = diagonal_part(params, basis)?.diagonal_re();
    let v = coupling_part(params, basis)?;
    let e = h0[index];
    Ok(v.row(index)
        .filter(|&(k, _)| (h0[k] - e).abs() > DEGENERACY_TOL)
        .map(|(k, vk)| vk.norm_sqr() / (e - h0[k]))
        .sum())
}

/// Third order `Σ V_nk V_kl V_ln / ((E_n − E_k)(E_n − E_l))`; the `V_nn`
/// term is absent because `V` has no diagonal.
pub fn third_order_sum(params: &NCParams, basis: &SectorBasis, index: usize) -> Result<f64> {
    let h0 = diagonal_part(params, basis)?.diagonal_re();
    let v = coupling_part(params, basis)?;
    let e = h0[index];
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, v_nk) in v.row(index) {
        if (h0[k] - e).abs() <= DEGENERACY_TOL {
            continue;
        }
        for (l, v_kl) in v.row(k) {
            if (h0[l] - e).abs() <= DEGENERACY_TOL {
                continue;
            }
            let v_ln = v.get(l, index);
            sum += v_nk * v_kl * v_ln / ((e - h0[k]) * (e - h0[l]));
        }
    }
    Ok(sum.re)
}

/// Second-order effective Hamiltonian on the degenerate `H₀` eigenspace of
/// `index`: `W_ab = Σ_k V_ak V_kb / (E − E_k)` over `k` outside the eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveCoupling {
    pub states: Vec<TensorState>,
    pub matrix: Vec<Vec<Complex64>>,
    pub max_off_diagonal: f64,
}

pub fn effective_second_order(params: &NCParams, basis: &SectorBasis, index: usize) -> Result<EffectiveCoupling> {
    let h0 = diagonal_part(params, basis)?.diagonal_re();
    let v = coupling_part(params, basis)?;
    let e = h0[index];
    let block: Vec<usize> = (0..basis.dim()).filter(|&k| (h0[k] - e).abs() <= DEGENERACY_TOL).collect();
    let mut matrix = Vec::with_capacity(block.len());
    let mut max_off = 0.0f64;
    for (ia, &a) in block.iter().enumerate() {
        let mut row = Vec::with_capacity(block.len());
        for (ib, &b) in block.iter().enumerate() {
            let w: Complex64 = v
                .row(a)
                .filter(|&(k, _)| (h0[k] - e).abs() > DEGENERACY_TOL)
                .map(|(k, v_ak)| v_ak * v.get(k, b) / (e - h0[k]))
                .sum();
            if ia != ib {
                max_off = max_off.max(w.norm());
            }
            row.push(w);
        }
        matrix.push(row);
    }
    Ok(EffectiveCoupling {
        states: block.iter().map(|&k| basis.states()[k]).collect(),
        matrix,
        max_off_diagonal: max_off,
    })
}
