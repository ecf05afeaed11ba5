//! The noncommutative Schrödinger oscillator on `Fock ⊗ irrep`.
//!
//! With `z = θMω + iκ`,
//!
//! ```text
//! 2MĤ = 2Mω(N + 1) + 2Mκ s₀ + |z|²(s₀² − s²)
//!       + √(Mω)(z a†s₊ + z̄ a s₋ + z b†s₋ + z̄ b s₊)
//! ```
//!
//! `Ĥ` commutes with `M₀ = L₀ + s₀`, whose eigenvalue is
//! `j = n_b − n_a + m`, so it is assembled one `j` sector at a time.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fock::FockBasis;
use crate::irrep::IrrepSpec;
use crate::operator::{HermitianBuilder, HermitianOperator, SparseMatrix};
use crate::{Error, HalfInt, Result};

/// Mass, frequency and the two deformation scales (ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NCParams {
    pub mass: f64,
    pub omega: f64,
    pub theta: f64,
    pub kappa: f64,
}

impl NCParams {
    pub fn new(mass: f64, omega: f64, theta: f64, kappa: f64) -> Result<Self> {
        let p = NCParams {
            mass,
            omega,
            theta,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn commutative(mass: f64, omega: f64) -> Result<Self> {
        Self::new(mass, omega, 0.0, 0.0)
    }

    /// Parameters for a given `z` at fixed `M`, `ω`.
    pub fn from_z(mass: f64, omega: f64, z: Complex64) -> Result<Self> {
        if !(mass > 0.0 && omega > 0.0) {
            return Err(Error::InvalidParameter("mass and omega must be positive"));
        }
        Self::new(mass, omega, z.re / (mass * omega), z.im)
    }

    /// `M > 0`, `ω > 0`, `θ, κ ≥ 0`, all finite.
    pub fn validate(&self) -> Result<()> {
        self.validate_allowing_zero_omega()?;
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParameter("omega must be positive"));
        }
        Ok(())
    }

    /// As [`validate`](Self::validate) but accepting `ω = 0`.
    pub fn validate_allowing_zero_omega(&self) -> Result<()> {
        let finite = [self.mass, self.omega, self.theta, self.kappa]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("parameters must be finite"));
        }
        if !(self.mass > 0.0) {
            return Err(Error::InvalidParameter("mass must be positive"));
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter("omega must be nonnegative"));
        }
        if self.theta < 0.0 || self.kappa < 0.0 {
            return Err(Error::InvalidParameter("theta and kappa must be nonnegative"));
        }
        Ok(())
    }

    /// `z = θMω + iκ`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.theta * self.mass * self.omega, self.kappa)
    }

    /// `|z|² = (θMω)² + κ²`.
    pub fn z_abs2(&self) -> f64 {
        self.z().norm_sqr()
    }

    /// `(θ, κ) → (tθ, tκ)`, hence `z → tz`.
    pub fn scaled(&self, t: f64) -> Self {
        NCParams {
            theta: self.theta * t,
            kappa: self.kappa * t,
            ..*self
        }
    }
}

/// `|n_a, n_b⟩ ⊗ |λ, m⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TensorState {
    pub n_a: u32,
    pub n_b: u32,
    pub m: HalfInt,
}

impl TensorState {
    pub fn new(n_a: u32, n_b: u32, m: HalfInt) -> Self {
        TensorState { n_a, n_b, m }
    }

    pub fn n(&self) -> u32 {
        self.n_a + self.n_b
    }

    /// `l = n_b − n_a`.
    pub fn l(&self) -> i64 {
        self.n_b as i64 - self.n_a as i64
    }

    /// `j = l + m`.
    pub fn j(&self) -> HalfInt {
        self.m + self.l()
    }

    fn shifted(&self, da: i64, db: i64, dm: i64) -> Option<TensorState> {
        Some(TensorState {
            n_a: u32::try_from(self.n_a as i64 + da).ok()?,
            n_b: u32::try_from(self.n_b as i64 + db).ok()?,
            m: self.m + dm,
        })
    }
}

/// An enumerated set of tensor states: one `j` sector or the full product.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBasis {
    irrep: IrrepSpec,
    j: Option<HalfInt>,
    n_max: u32,
    states: Vec<TensorState>,
    index: BTreeMap<TensorState, usize>,
}

impl SectorBasis {
    fn from_states(irrep: IrrepSpec, j: Option<HalfInt>, n_max: u32, states: Vec<TensorState>) -> Self {
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        SectorBasis {
            irrep,
            j,
            n_max,
            states,
            index,
        }
    }

    /// States with `n_b − n_a + m = j`, `n_a + n_b ≤ n_max` and `m` in the
    /// irrep window, in Fock order.
    pub fn sector(irrep: &IrrepSpec, j: HalfInt, n_max: u32) -> Result<Self> {
        if !irrep.grid().contains(j) {
            return Err(Error::SectorParity(j));
        }
        let states: Vec<TensorState> = FockBasis::new(n_max)
            .states()
            .iter()
            .map(|&(n_a, n_b)| TensorState::new(n_a, n_b, j - (n_b as i64 - n_a as i64)))
            .filter(|s| irrep.index_of(s.m).is_some())
            .collect();
        if states.is_empty() {
            return Err(Error::EmptySector);
        }
        Ok(Self::from_states(*irrep, Some(j), n_max, states))
    }

    /// The whole truncated product, Fock index slow and `m` fast, matching
    /// `fock_operator.kron(irrep_operator)`.
    pub fn full(irrep: &IrrepSpec, n_max: u32) -> Self {
        let ms = irrep.ms();
        let states = FockBasis::new(n_max)
            .states()
            .iter()
            .flat_map(|&(n_a, n_b)| ms.iter().map(move |&m| TensorState::new(n_a, n_b, m)))
            .collect();
        Self::from_states(*irrep, None, n_max, states)
    }

    /// All `j` with a nonempty sector, ascending.
    pub fn sector_labels(irrep: &IrrepSpec, n_max: u32) -> Vec<HalfInt> {
        let w = irrep.window();
        let lo = w.min - n_max as i64;
        let hi = w.max + n_max as i64;
        let count = (hi - lo).twice() / 2 + 1;
        (0..count)
            .map(|i| lo + i)
            .filter(|&j| Self::sector(irrep, j, n_max).is_ok())
            .collect()
    }

    pub fn irrep(&self) -> &IrrepSpec {
        &self.irrep
    }

    /// `None` for the full product basis.
    pub fn j(&self) -> Option<HalfInt> {
        self.j
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[TensorState] {
        &self.states
    }

    pub fn index_of(&self, s: &TensorState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Whether the untruncated problem has this state (in the same sector).
    pub fn admits(&self, s: &TensorState) -> bool {
        self.irrep.supports(s.m) && self.j.is_none_or(|j| s.j() == j)
    }

    /// States whose neighbours under every hop of `Ĥ` are either kept or
    /// absent from the untruncated problem, with `margin` spare ladder steps.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        let m = margin as i64;
        (0..self.dim())
            .filter(|&i| {
                let s = self.states[i];
                if s.n() as i64 + m > self.n_max as i64 {
                    return false;
                }
                (-m..=m).all(|dm| {
                    let t = TensorState::new(s.n_a, s.n_b, s.m + dm);
                    !self.irrep.supports(t.m) || self.irrep.index_of(t.m).is_some()
                })
            })
            .collect()
    }
}

/// Which of `z`, `z̄` goes with the raising hops `a†s₊`, `b†s₋`.
///
/// The two choices are complex conjugates of each other and have identical
/// spectra; [`Coupling::Literal`] is the frozen convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Coupling {
    /// `z a†s₊ + z̄ a s₋ + z b†s₋ + z̄ b s₊`
    #[default]
    Literal,
    /// `z̄ a†s₊ + z a s₋ + z̄ b†s₋ + z b s₊`
    Conjugated,
}

#[derive(Clone, Copy)]
struct Parts {
    diagonal: bool,
    coupling: bool,
}

/// `E⁽⁰⁾ = ω(n_a + n_b + 1) + κm + (|z|²/2M)(m² − λ)`.
pub fn unperturbed_energy(params: &NCParams, lambda: f64, s: &TensorState) -> f64 {
    let m = s.m.to_f64();
    params.omega * (s.n() + 1) as f64 + params.kappa * m + params.z_abs2() / (2.0 * params.mass) * (m * m - lambda)
}

fn assemble(params: &NCParams, basis: &SectorBasis, coupling: Coupling, parts: Parts) -> Result<HermitianOperator> {
    params.validate()?;
    let irrep = basis.irrep();
    let lambda = irrep.lambda();
    let z = match coupling {
        Coupling::Literal => params.z(),
        Coupling::Conjugated => params.z().conj(),
    };
    let pref = libm::sqrt(params.mass * params.omega) / (2.0 * params.mass);
    let mut b = HermitianBuilder::new(basis.dim());
    for (i, s) in basis.states().iter().enumerate() {
        if parts.diagonal {
            b.add_diagonal(i, unperturbed_energy(params, lambda, s));
        }
        if !parts.coupling {
            continue;
        }
        // a†s₊ : (n_a, n_b, m) → (n_a+1, n_b, m+1)
        if let Some(t) = s.shifted(1, 0, 1).and_then(|t| basis.index_of(&t)) {
            let amp = libm::sqrt((s.n_a + 1) as f64) * irrep.raise_amplitude(s.m)?;
            b.add_pair(t, i, z * (pref * amp));
        }
        // b†s₋ : (n_a, n_b, m) → (n_a, n_b+1, m−1)
        if let Some(t) = s.shifted(0, 1, -1).and_then(|t| basis.index_of(&t)) {
            let amp = libm::sqrt((s.n_b + 1) as f64) * irrep.lower_amplitude(s.m)?;
            b.add_pair(t, i, z * (pref * amp));
        }
    }
    Ok(b.build())
}

/// `Ĥ` on `basis` (a sector or the full product).
pub fn build_hamiltonian(params: &NCParams, basis: &SectorBasis) -> Result<HermitianOperator> {
    build_hamiltonian_with(params, basis, Coupling::Literal)
}

pub fn build_hamiltonian_with(params: &NCParams, basis: &SectorBasis, coupling: Coupling) -> Result<HermitianOperator> {
    assemble(
        params,
        basis,
        coupling,
        Parts {
            diagonal: true,
            coupling: true,
        },
    )
}

/// The diagonal part `H₀`, whose eigenvalues are [`unperturbed_energy`].
pub fn diagonal_part(params: &NCParams, basis: &SectorBasis) -> Result<HermitianOperator> {
    assemble(
        params,
        basis,
        Coupling::Literal,
        Parts {
            diagonal: true,
            coupling: false,
        },
    )
}

/// The hopping part `V = Ĥ − H₀`.
pub fn coupling_part(params: &NCParams, basis: &SectorBasis) -> Result<HermitianOperator> {
    assemble(
        params,
        basis,
        Coupling::Literal,
        Parts {
            diagonal: false,
            coupling: true,
        },
    )
}

/// `M₀ = L₀ + s₀`, diagonal with entries `j`.
pub fn m0_matrix(basis: &SectorBasis) -> HermitianOperator {
    let d: Vec<f64> = basis.states().iter().map(|s| s.j().to_f64()).collect();
    HermitianOperator::diagonal(&d)
}

/// Largest `|op_rc|` between states of different `j`.
pub fn cross_sector_coupling(op: &SparseMatrix, basis: &SectorBasis) -> f64 {
    let st = basis.states();
    op.triples()
        .filter(|&(r, c, _)| st[r].j() != st[c].j())
        .map(|(_, _, v)| v.norm())
        .fold(0.0, f64::max)
}

/// `X̂_i = x_i ⊗ 1 + θ 1 ⊗ s_i`, `P̂_i = p_i ⊗ 1 + κ 1 ⊗ s_i` on the full product.
#[derive(Clone, Debug, PartialEq)]
pub struct BoppShift {
    pub x: [SparseMatrix; 2],
    pub p: [SparseMatrix; 2],
}

/// `m_omega` fixes the Fock length `1/√(Mω)`.
pub fn bopp_shift(fock: &FockBasis, irrep: &IrrepSpec, m_omega: f64, theta: f64, kappa: f64) -> Result<BoppShift> {
    let ps = fock.phase_space(m_omega)?;
    let id_f = SparseMatrix::identity(fock.dim());
    let id_s = SparseMatrix::identity(irrep.dim());
    let s = [irrep.s1(), irrep.s2()];
    let shift = |orb: &SparseMatrix, gen: &SparseMatrix, c: f64| orb.kron(&id_s).add(&id_f.kron(gen).scale_re(c));
    Ok(BoppShift {
        x: [shift(&ps.x1, &s[0], theta), shift(&ps.x2, &s[1], theta)],
        p: [shift(&ps.p1, &s[0], kappa), shift(&ps.p2, &s[1], kappa)],
    })
}

/// `[(P̂² + M²ω² X̂²)/(2M)] + κ s₀` from matrix products on the full product
/// basis. Agrees with [`build_hamiltonian`] on rows away from both truncations.
pub fn bopp_hamiltonian(params: &NCParams, fock: &FockBasis, irrep: &IrrepSpec) -> Result<SparseMatrix> {
    params.validate()?;
    let bs = bopp_shift(fock, irrep, params.mass * params.omega, params.theta, params.kappa)?;
    let sq = |m: &SparseMatrix| m.mul(m);
    let p2 = sq(&bs.p[0]).add(&sq(&bs.p[1]));
    let x2 = sq(&bs.x[0]).add(&sq(&bs.x[1]));
    let mw2 = params.mass * params.omega * params.omega;
    let s0 = SparseMatrix::identity(fock.dim()).kron(irrep.s0().as_sparse());
    Ok(p2
        .scale_re(0.5 / params.mass)
        .add(&x2.scale_re(0.5 * mw2))
        .add(&s0.scale_re(params.kappa)))
}

/// One recursion coefficient `⟨row| 2MĤ |neighbour⟩` (energy term dropped).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecursionTerm {
    pub neighbor: TensorState,
    pub coefficient: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RecursionIssue {
    /// The printed neighbour has a different `j`; the `b` terms carry
    /// `m ± 1` where the sector constraint forces `m ∓ 1`.
    SectorConstraintViolated,
    /// The printed coefficient is the complex conjugate of the matrix
    /// element, i.e. the printed row is a column of `2MĤ`.
    Conjugated,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecursionFlag {
    pub issue: RecursionIssue,
    pub printed: TensorState,
    pub resolved: TensorState,
}

/// Literal and resolved forms of the five-term recursion for one row.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionRow {
    pub state: TensorState,
    /// `2Mω(N+1) + 2Mκm + |z|²(m² − λ)`
    pub diagonal: f64,
    /// The four hop terms exactly as transcribed, targets included.
    pub printed: Vec<RecursionTerm>,
    /// Neighbours moved into the sector; coefficients as printed.
    pub relabelled: Vec<RecursionTerm>,
    pub index_flags: Vec<RecursionFlag>,
}

/// The four-neighbour recursion, transcribed term by term:
///
/// ```text
/// {2Mω(n_a+n_b+1) − 2M(E − κm) + z̄z(m² − λ)} C[n_a, n_b, m]
///   + z √(Mω) √(n_a+1) √(m(m+1) − λ) C[n_a+1, n_b, m+1]
///   + z̄ √(Mω) √(n_a)   √((m−1)m − λ) C[n_a−1, n_b, m−1]
///   + z √(Mω) √(n_b+1) √(m(m−1) − λ) C[n_a, n_b+1, m+1]
///   + z̄ √(Mω) √(n_b)   √((m+1)m − λ) C[n_a, n_b−1, m−1]
/// ```
///
/// It uses no matrix assembly. Terms whose neighbour would leave the sector
/// are moved to the unique in-sector neighbour with the same Fock part and
/// flagged.
pub fn recursion_row(params: &NCParams, basis: &SectorBasis, state: &TensorState) -> Result<RecursionRow> {
    params.validate()?;
    if basis.index_of(state).is_none() {
        return Err(Error::InvalidQuantumNumbers {
            n_a: state.n_a,
            n_b: state.n_b,
            m: state.m,
        });
    }
    let (na, nb, m) = (state.n_a as f64, state.n_b as f64, state.m.to_f64());
    let lambda = basis.irrep().lambda();
    let (z, zb) = (params.z(), params.z().conj());
    let root = |x: f64| libm::sqrt(x.max(0.0));
    let smw = libm::sqrt(params.mass * params.omega);
    let m_mass = params.mass;

    let diagonal = 2.0 * m_mass * params.omega * (na + nb + 1.0) + 2.0 * m_mass * params.kappa * m + params.z_abs2() * (m * m - lambda);

    let candidates = [
        ((1, 0, 1), z * smw * root(na + 1.0) * root(m * (m + 1.0) - lambda)),
        ((-1, 0, -1), zb * smw * root(na) * root((m - 1.0) * m - lambda)),
        ((0, 1, 1), z * smw * root(nb + 1.0) * root(m * (m - 1.0) - lambda)),
        ((0, -1, -1), zb * smw * root(nb) * root((m + 1.0) * m - lambda)),
    ];
    let mut printed = Vec::new();
    let mut relabelled = Vec::new();
    let mut index_flags = Vec::new();
    for ((da, db, dm), c) in candidates {
        let Some(t) = state.shifted(da, db, dm) else { continue };
        printed.push(RecursionTerm {
            neighbor: t,
            coefficient: c,
        });
        let target = if t.j() == state.j() {
            t
        } else {
            // keep the Fock part, solve the constraint for m
            let fixed = TensorState::new(t.n_a, t.n_b, state.j() - t.l());
            index_flags.push(RecursionFlag {
                issue: RecursionIssue::SectorConstraintViolated,
                printed: t,
                resolved: fixed,
            });
            fixed
        };
        relabelled.push(RecursionTerm {
            neighbor: target,
            coefficient: c,
        });
    }
    Ok(RecursionRow {
        state: *state,
        diagonal,
        printed,
        relabelled,
        index_flags,
    })
}

/// Comparison of the assembled `2MĤ` against [`recursion_row`] on interior
/// states.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecursionReport {
    pub rows_checked: usize,
    /// Largest `|⟨r|2MĤ|c⟩ − resolved coefficient|`, diagonal included.
    pub max_deviation: f64,
    /// Same, against the relabelled coefficients without conjugation.
    pub max_deviation_unconjugated: f64,
    pub index_discrepancy: bool,
    pub conjugation_discrepancy: bool,
    /// One representative flag per issue.
    pub examples: Vec<RecursionFlag>,
}

impl RecursionReport {
    pub fn agrees(&self, tol: f64) -> bool {
        self.rows_checked > 0 && self.max_deviation <= tol
    }
}

fn row_deviation(h2m: &SparseMatrix, basis: &SectorBasis, r: usize, diag: f64, terms: &[RecursionTerm], conj: bool) -> f64 {
    let mut expected: BTreeMap<usize, Complex64> = BTreeMap::new();
    expected.insert(r, Complex64::new(diag, 0.0));
    for t in terms {
        if let Some(c) = basis.index_of(&t.neighbor) {
            let v = if conj { t.coefficient.conj() } else { t.coefficient };
            *expected.entry(c).or_default() += v;
        }
    }
    let mut dev = 0.0f64;
    for (c, v) in h2m.row(r) {
        let e = expected.remove(&c).unwrap_or_default();
        dev = dev.max((v - e).norm());
    }
    expected.values().fold(dev, |d, v| d.max(v.norm()))
}

pub fn check_recursion(params: &NCParams, basis: &SectorBasis) -> Result<RecursionReport> {
    let h2m = build_hamiltonian(params, basis)?
        .into_sparse()
        .scale_re(2.0 * params.mass);
    let mut rep = RecursionReport {
        rows_checked: 0,
        max_deviation: 0.0,
        max_deviation_unconjugated: 0.0,
        index_discrepancy: false,
        conjugation_discrepancy: false,
        examples: Vec::new(),
    };
    let mut first_conj: Option<RecursionFlag> = None;
    for r in basis.interior(1) {
        let s = basis.states()[r];
        let row = recursion_row(params, basis, &s)?;
        let dev = row_deviation(&h2m, basis, r, row.diagonal, &row.relabelled, true);
        let dev_plain = row_deviation(&h2m, basis, r, row.diagonal, &row.relabelled, false);
        rep.rows_checked += 1;
        rep.max_deviation = rep.max_deviation.max(dev);
        rep.max_deviation_unconjugated = rep.max_deviation_unconjugated.max(dev_plain);
        if let Some(f) = row.index_flags.first() {
            if !rep.index_discrepancy {
                rep.examples.push(*f);
            }
            rep.index_discrepancy = true;
        }
        if first_conj.is_none() {
            if let Some(t) = row.relabelled.iter().find(|t| t.coefficient.im != 0.0) {
                first_conj = Some(RecursionFlag {
                    issue: RecursionIssue::Conjugated,
                    printed: t.neighbor,
                    resolved: t.neighbor,
                });
            }
        }
    }
    let scale = 1.0 + h2m.max_abs();
    if rep.max_deviation_unconjugated > 1e-12 * scale && rep.max_deviation <= 1e-12 * scale {
        rep.conjugation_discrepancy = true;
        rep.examples.extend(first_conj);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irrep::MGrid;
    use alloc::vec;
    use proptest::prelude::*;

    fn h(x: f64) -> HalfInt {
        HalfInt::from_f64(x).unwrap()
    }

    fn k1(len: usize) -> IrrepSpec {
        IrrepSpec::discrete_plus(HalfInt::ONE, len).unwrap()
    }

    #[test]
    fn params_validation_and_z() {
        let p = NCParams::new(2.0, 0.5, 0.3, 0.4).unwrap();
        assert_eq!(p.z(), Complex64::new(0.3, 0.4));
        assert!((p.z_abs2() - 0.25).abs() < 1e-15);
        assert!(NCParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(NCParams::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(NCParams::new(1.0, 1.0, -0.1, 0.0).is_err());
        let q = NCParams::from_z(2.0, 0.5, Complex64::new(0.3, 0.4)).unwrap();
        assert!((q.theta - 0.3).abs() < 1e-15 && q.kappa == 0.4);
        assert_eq!(p.scaled(2.0).z(), Complex64::new(0.6, 0.8));
    }

    #[test]
    fn sector_enumeration_against_brute_force() {
        // k = 1, j = 1, n_max = 1, window [1, 20]
        let irrep = k1(20);
        let sec = SectorBasis::sector(&irrep, h(1.0), 1).unwrap();
        let mut brute = Vec::new();
        for na in 0..=1u32 {
            for nb in 0..=(1 - na) {
                for mi in 1..=20i64 {
                    let s = TensorState::new(na, nb, HalfInt::from_int(mi));
                    if s.j() == h(1.0) {
                        brute.push(s);
                    }
                }
            }
        }
        brute.sort();
        let mut got = sec.states().to_vec();
        got.sort();
        assert_eq!(got, brute);
        assert_eq!(got, vec![TensorState::new(0, 0, h(1.0)), TensorState::new(1, 0, h(2.0))]);
    }

    #[test]
    fn sector_errors() {
        let irrep = k1(5);
        assert_eq!(SectorBasis::sector(&irrep, h(0.5), 3).unwrap_err(), Error::SectorParity(h(0.5)));
        assert_eq!(SectorBasis::sector(&irrep, h(-10.0), 3).unwrap_err(), Error::EmptySector);
    }

    #[test]
    fn sectors_partition_the_product() {
        for irrep in [k1(6), IrrepSpec::continuous(-1.0, MGrid::Integer, h(-4.0), h(4.0)).unwrap()] {
            let n_max = 5;
            let full = SectorBasis::full(&irrep, n_max);
            let mut total = 0;
            for j in SectorBasis::sector_labels(&irrep, n_max) {
                let sec = SectorBasis::sector(&irrep, j, n_max).unwrap();
                assert!(sec.states().iter().all(|s| s.j() == j));
                total += sec.dim();
            }
            assert_eq!(total, full.dim());
            assert_eq!(full.dim(), FockBasis::count(n_max) * irrep.dim());
        }
    }

    #[test]
    fn commutative_limit_is_diagonal() {
        let p = NCParams::commutative(1.3, 0.7).unwrap();
        let sec = SectorBasis::sector(&k1(10), h(2.0), 6).unwrap();
        let hm = build_hamiltonian(&p, &sec).unwrap();
        for (r, c, v) in hm.triples() {
            assert_eq!(r, c);
            let s = sec.states()[r];
            assert!((v.re - 0.7 * (s.n() + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn raising_matrix_element() {
        let p = NCParams::new(1.5, 0.8, 0.2, 0.3).unwrap();
        let irrep = k1(12);
        let sec = SectorBasis::sector(&irrep, h(3.0), 6).unwrap();
        let hm = build_hamiltonian(&p, &sec).unwrap();
        let from = TensorState::new(1, 2, h(2.0));
        let to = TensorState::new(2, 2, h(3.0));
        let (r, c) = (sec.index_of(&to).unwrap(), sec.index_of(&from).unwrap());
        // √(Mω) z √(n_a+1) √(m(m+1) − λ), λ = 0
        let expected = (p.mass * p.omega).sqrt() * p.z() * 2f64.sqrt() * 6f64.sqrt();
        assert!((hm.get(r, c) * (2.0 * p.mass) - expected).norm() < 1e-14);
        assert_eq!(hm.hermiticity_residual(), 0.0);
    }

    #[test]
    fn coupling_conventions_are_conjugate() {
        let p = NCParams::new(1.0, 1.0, 0.3, 0.2).unwrap();
        let sec = SectorBasis::sector(&k1(10), h(1.0), 5).unwrap();
        let a = build_hamiltonian_with(&p, &sec, Coupling::Literal).unwrap();
        let b = build_hamiltonian_with(&p, &sec, Coupling::Conjugated).unwrap();
        let conj = SparseMatrix::from_triples(a.dim(), a.dim(), a.triples().map(|(r, c, v)| (r, c, v.conj())));
        assert_eq!(conj, *b.as_sparse());
    }

    #[test]
    fn parts_sum_to_the_hamiltonian() {
        let p = NCParams::new(1.0, 1.0, 0.3, 0.2).unwrap();
        let sec = SectorBasis::sector(&k1(10), h(1.0), 5).unwrap();
        let full = build_hamiltonian(&p, &sec).unwrap();
        let sum = diagonal_part(&p, &sec).unwrap().add(&coupling_part(&p, &sec).unwrap());
        assert!(full.sub(&sum).max_abs() < 1e-15);
        assert!(coupling_part(&p, &sec).unwrap().diagonal_entries().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn m0_is_j_times_identity_and_commutes() {
        let p = NCParams::new(1.0, 1.0, 0.4, 0.7).unwrap();
        let sec = SectorBasis::sector(&k1(10), h(2.0), 5).unwrap();
        let m0 = m0_matrix(&sec);
        assert!(m0.diagonal_re().iter().all(|&x| x == 2.0));
        let hm = build_hamiltonian(&p, &sec).unwrap();
        assert_eq!(hm.commutator(&m0).max_abs(), 0.0);
    }

    #[test]
    fn full_product_is_block_diagonal() {
        let p = NCParams::new(1.0, 1.0, 0.4, 0.7).unwrap();
        for irrep in [k1(8), IrrepSpec::continuous(-2.0, MGrid::HalfInteger, h(-3.5), h(3.5)).unwrap()] {
            let full = SectorBasis::full(&irrep, 5);
            let hm = build_hamiltonian(&p, &full).unwrap();
            assert_eq!(cross_sector_coupling(&hm, &full), 0.0);
            assert_eq!(hm.commutator(&m0_matrix(&full)).max_abs(), 0.0);
            // each sector block equals the sector assembly
            for j in SectorBasis::sector_labels(&irrep, 5) {
                let sec = SectorBasis::sector(&irrep, j, 5).unwrap();
                let hs = build_hamiltonian(&p, &sec).unwrap();
                for (r, c, v) in hs.triples() {
                    let fr = full.index_of(&sec.states()[r]).unwrap();
                    let fc = full.index_of(&sec.states()[c]).unwrap();
                    assert_eq!(hm.get(fr, fc), v);
                }
            }
        }
    }

    #[test]
    fn bopp_route_agrees_on_interior() {
        let p = NCParams::new(1.3, 0.9, 0.35, 0.25).unwrap();
        for irrep in [k1(10), IrrepSpec::continuous(-1.0, MGrid::Integer, h(-5.0), h(5.0)).unwrap()] {
            let fock = FockBasis::new(7);
            let full = SectorBasis::full(&irrep, 7);
            let direct = build_hamiltonian(&p, &full).unwrap();
            let bopp = bopp_hamiltonian(&p, &fock, &irrep).unwrap();
            let rows = full.interior(2);
            assert!(!rows.is_empty());
            let dev = bopp.sub(&direct).max_abs_in_rows(&rows);
            assert!(dev < 1e-12, "{dev}");
        }
    }

    #[test]
    fn recursion_diagonal_and_commutative_limit() {
        let p = NCParams::new(1.2, 0.9, 0.1, 0.3).unwrap();
        let irrep = k1(12);
        let sec = SectorBasis::sector(&irrep, h(1.0), 6).unwrap();
        let s = TensorState::new(1, 1, h(1.0));
        let row = recursion_row(&p, &sec, &s).unwrap();
        let expected = 2.0 * 1.2 * 0.9 * 3.0 + 2.0 * 1.2 * 0.3 * 1.0 + p.z_abs2() * (1.0 - 0.0);
        assert!((row.diagonal - expected).abs() < 1e-14);

        let p0 = NCParams::commutative(1.2, 0.9).unwrap();
        let row0 = recursion_row(&p0, &sec, &s).unwrap();
        assert!(row0.printed.iter().all(|t| t.coefficient.norm() == 0.0));
        assert!((row0.diagonal / (2.0 * 1.2) - 0.9 * 3.0).abs() < 1e-15);
    }

    #[test]
    fn recursion_neighbours_are_within_the_hop_set() {
        let p = NCParams::new(1.0, 1.0, 0.2, 0.2).unwrap();
        let sec = SectorBasis::sector(&k1(12), h(2.0), 6).unwrap();
        let s = TensorState::new(2, 1, h(3.0));
        let row = recursion_row(&p, &sec, &s).unwrap();
        let allowed = [(1, 0, 1), (-1, 0, -1), (0, 1, -1), (0, -1, 1)].map(|(a, b, m)| s.shifted(a, b, m).unwrap());
        for t in &row.relabelled {
            assert!(allowed.contains(&t.neighbor));
            assert_eq!(t.neighbor.j(), s.j());
        }
        // both b-terms violate the constraint as transcribed
        assert_eq!(row.index_flags.len(), 2);
        assert!(row.index_flags.iter().all(|f| f.issue == RecursionIssue::SectorConstraintViolated));
        assert!(row.index_flags.iter().all(|f| f.printed.n_a == s.n_a));
    }

    #[test]
    fn recursion_oracle_matches_assembly_after_resolution() {
        let p = NCParams::new(1.0, 1.0, 0.3, 0.4).unwrap();
        let sec = SectorBasis::sector(&k1(16), h(1.0), 8).unwrap();
        let rep = check_recursion(&p, &sec).unwrap();
        assert!(rep.agrees(1e-12), "{rep:?}");
        assert!(rep.index_discrepancy);
        assert!(rep.conjugation_discrepancy);
        // with κ = 0, z is real and the conjugation is invisible
        let real = NCParams::new(1.0, 1.0, 0.3, 0.0).unwrap();
        let rep = check_recursion(&real, &sec).unwrap();
        assert!(rep.agrees(1e-12) && !rep.conjugation_discrepancy);
    }

    proptest! {
        #[test]
        fn every_sector_state_satisfies_the_constraint(twice_j in -6i64..20, n_max in 0u32..8) {
            let irrep = k1(12);
            let j = HalfInt::from_twice(2 * twice_j);
            if let Ok(sec) = SectorBasis::sector(&irrep, j, n_max) {
                for s in sec.states() {
                    prop_assert_eq!(s.j(), j);
                    prop_assert!(s.n() <= n_max);
                }
            }
        }

        #[test]
        fn hermitian_by_construction(t in 0.0f64..2.0, k in 0.0f64..2.0, jj in 0i64..6) {
            let p = NCParams::new(1.0, 1.0, t, k).unwrap();
            let irrep = IrrepSpec::continuous(-1.5, MGrid::Integer, h(-6.0), h(6.0)).unwrap();
            let sec = SectorBasis::sector(&irrep, HalfInt::from_int(jj), 6).unwrap();
            prop_assert_eq!(build_hamiltonian(&p, &sec).unwrap().hermiticity_residual(), 0.0);
        }
    }
}
