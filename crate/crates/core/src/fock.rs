//! Two-mode Fock space `|n_a, n_b⟩` of the planar oscillator.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::operator::{HermitianOperator, SparseMatrix};
use crate::{Error, Result};

/// States with `n_a + n_b ≤ n_max`, ordered by shell and then by `n_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    n_max: u32,
    states: Vec<(u32, u32)>,
}

impl FockBasis {
    pub fn new(n_max: u32) -> Self {
        let mut states = Vec::with_capacity(Self::count(n_max));
        for n in 0..=n_max {
            for na in 0..=n {
                states.push((na, n - na));
            }
        }
        FockBasis { n_max, states }
    }

    /// `(n_max + 1)(n_max + 2)/2`.
    pub fn count(n_max: u32) -> usize {
        let n = n_max as usize;
        (n + 1) * (n + 2) / 2
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[(u32, u32)] {
        &self.states
    }

    pub fn index_of(&self, n_a: u32, n_b: u32) -> Option<usize> {
        let n = n_a + n_b;
        (n <= self.n_max).then(|| Self::count(n) - (n as usize + 1) + n_a as usize)
    }

    /// Indices of states below the top shell, where `[a, a†] = 1` holds.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.states[i].0 + self.states[i].1 < self.n_max)
            .collect()
    }

    fn diag(&self, f: impl Fn(u32, u32) -> f64) -> HermitianOperator {
        let d: Vec<f64> = self.states.iter().map(|&(a, b)| f(a, b)).collect();
        HermitianOperator::diagonal(&d)
    }

    pub fn number(&self) -> HermitianOperator {
        self.diag(|a, b| (a + b) as f64)
    }

    /// `ω(a†a + b†b + 1)`.
    pub fn h0(&self, omega: f64) -> Result<HermitianOperator> {
        if !(omega > 0.0) {
            return Err(Error::InvalidParameter("omega must be positive"));
        }
        Ok(self.diag(|a, b| omega * (a + b + 1) as f64))
    }

    /// `b†b − a†a`.
    pub fn l0(&self) -> HermitianOperator {
        self.diag(|a, b| b as f64 - a as f64)
    }

    pub fn ladders(&self) -> Ladders {
        let lower = |which_a: bool| {
            let triples = self.states.iter().enumerate().filter_map(|(c, &(na, nb))| {
                let (n, target) = if which_a {
                    (na, (na.checked_sub(1)?, nb))
                } else {
                    (nb, (na, nb.checked_sub(1)?))
                };
                let r = self.index_of(target.0, target.1)?;
                Some((r, c, Complex64::new(libm::sqrt(n as f64), 0.0)))
            });
            SparseMatrix::from_triples(self.dim(), self.dim(), triples)
        };
        let a = lower(true);
        let b = lower(false);
        Ladders {
            a_dag: a.adjoint(),
            b_dag: b.adjoint(),
            a,
            b,
        }
    }

    /// Planar position and momentum for the length scale `1/√(Mω)`.
    pub fn phase_space(&self, m_omega: f64) -> Result<PhaseSpace> {
        if !(m_omega > 0.0) {
            return Err(Error::InvalidParameter("M·omega must be positive"));
        }
        Ok(PhaseSpace::from_ladders(&self.ladders(), m_omega))
    }
}

/// Truncated ladder operators; the daggered ones map the top shell to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Ladders {
    pub a: SparseMatrix,
    pub a_dag: SparseMatrix,
    pub b: SparseMatrix,
    pub b_dag: SparseMatrix,
}

/// `x₁, x₂, p₁, p₂` in terms of the circular modes `a`, `b`:
///
/// ```text
/// x₁ = (a + a† + b + b†)/(2√(Mω))     p₁ = (i√(Mω)/2)(a† − a + b† − b)
/// x₂ = −i(a − a† + b† − b)/(2√(Mω))   p₂ = −(√(Mω)/2)(a + a† − b − b†)
/// ```
///
/// With these, `x₁p₂ − x₂p₁ = b†b − a†a` and
/// `(p² + M²ω²x²)/(2M) = ω(a†a + b†b + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpace {
    pub x1: HermitianOperator,
    pub x2: HermitianOperator,
    pub p1: HermitianOperator,
    pub p2: HermitianOperator,
}

impl PhaseSpace {
    pub fn from_ladders(l: &Ladders, m_omega: f64) -> Self {
        let r = libm::sqrt(m_omega);
        let herm = |m: SparseMatrix| HermitianOperator::try_new(m, 0.0).expect("exactly Hermitian");
        let x1 = l.a.add(&l.a_dag).add(&l.b).add(&l.b_dag).scale_re(0.5 / r);
        let x2 = l
            .a
            .sub(&l.a_dag)
            .add(&l.b_dag)
            .sub(&l.b)
            .scale(Complex64::new(0.0, -0.5 / r));
        let p1 = l
            .a_dag
            .sub(&l.a)
            .add(&l.b_dag)
            .sub(&l.b)
            .scale(Complex64::new(0.0, 0.5 * r));
        let p2 = l.a.add(&l.a_dag).sub(&l.b).sub(&l.b_dag).scale_re(-0.5 * r);
        PhaseSpace {
            x1: herm(x1),
            x2: herm(x2),
            p1: herm(p1),
            p2: herm(p2),
        }
    }

    pub fn x(&self, i: usize) -> &HermitianOperator {
        [&self.x1, &self.x2][i]
    }

    pub fn p(&self, i: usize) -> &HermitianOperator {
        [&self.p1, &self.p2][i]
    }
}
