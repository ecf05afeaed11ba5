//! Truncated unitary irreps of sl(2,R).
//!
//! States `|λ, m⟩` are labelled by the s₀ eigenvalue `m`, and the ladder
//! operators act as
//!
//! ```text
//! s₀|λ,m⟩ = m|λ,m⟩,    s±|λ,m⟩ = √(m(m±1) − λ) |λ,m±1⟩
//! ```
//!
//! with real nonnegative amplitudes. A window `[m_min, m_max]` keeps finitely
//! many states; operator identities hold only away from truncated edges.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::operator::{HermitianOperator, SparseMatrix};
use crate::{Error, HalfInt, Result};

/// Default number of ladder steps a state must keep from a truncated edge.
pub const DEFAULT_MARGIN: usize = 2;

/// Radicands in `(−CLAMP, 0)` are treated as exact zeros.
const CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum IrrepClass {
    /// Lowest weight `k`, `m ∈ {k, k+1, ...}`.
    DiscretePlus,
    /// Highest weight `−k`, `m ∈ {−k, −k−1, ...}`.
    DiscreteMinus,
    /// `λ < −1/4`, `m` on the full integer or half-integer grid.
    Continuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MGrid {
    Integer,
    HalfInteger,
}

impl MGrid {
    pub fn of(m: HalfInt) -> MGrid {
        if m.is_integer() {
            MGrid::Integer
        } else {
            MGrid::HalfInteger
        }
    }

    pub fn contains(self, m: HalfInt) -> bool {
        MGrid::of(m) == self
    }
}

/// Class-specific data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IrrepParams {
    /// Discrete classes; `λ = k(k−1)`.
    K(HalfInt),
    /// Continuous class.
    Lambda { lambda: f64, grid: MGrid },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MWindow {
    pub min: HalfInt,
    pub max: HalfInt,
}

impl MWindow {
    pub fn new(min: HalfInt, max: HalfInt) -> Self {
        MWindow { min, max }
    }

    pub fn len(&self) -> usize {
        if self.max < self.min {
            0
        } else {
            ((self.max - self.min).twice() / 2 + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, m: HalfInt) -> bool {
        self.min <= m && m <= self.max && m.same_grid(self.min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IrrepSpec {
    class: IrrepClass,
    k: Option<HalfInt>,
    lambda: f64,
    grid: MGrid,
    window: MWindow,
}

/// Validates the class data and clips the window to the irrep's support.
pub fn make_irrep(class: IrrepClass, params: IrrepParams, window: MWindow) -> Result<IrrepSpec> {
    if window.max < window.min {
        return Err(Error::InvalidIrrep("empty window"));
    }
    let (k, lambda, grid, window) = match (class, params) {
        (IrrepClass::DiscretePlus | IrrepClass::DiscreteMinus, IrrepParams::K(k)) => {
            if k < HalfInt::HALF {
                return Err(Error::InvalidIrrep("k must be at least 1/2"));
            }
            let kf = k.to_f64();
            let grid = MGrid::of(k);
            for m in [window.min, window.max] {
                if !grid.contains(m) {
                    return Err(Error::WindowOffGrid(m));
                }
            }
            let clipped = if class == IrrepClass::DiscretePlus {
                if window.max < k {
                    return Err(Error::WindowOutsideSupport);
                }
                MWindow::new(window.min.max(k), window.max)
            } else {
                if window.min > -k {
                    return Err(Error::WindowOutsideSupport);
                }
                MWindow::new(window.min, window.max.min(-k))
            };
            (Some(k), kf * (kf - 1.0), grid, clipped)
        }
        (IrrepClass::Continuous, IrrepParams::Lambda { lambda, grid }) => {
            if !(lambda < -0.25) {
                return Err(Error::LambdaOutOfRange(lambda));
            }
            for m in [window.min, window.max] {
                if !grid.contains(m) {
                    return Err(Error::WindowOffGrid(m));
                }
            }
            (None, lambda, grid, window)
        }
        _ => return Err(Error::InvalidIrrep("parameters do not match the class")),
    };
    let spec = IrrepSpec {
        class,
        k,
        lambda,
        grid,
        window,
    };
    for m in spec.ms().into_iter().take(spec.dim().saturating_sub(1)) {
        spec.raise_amplitude(m)?;
    }
    Ok(spec)
}

impl IrrepSpec {
    /// Discrete⁺ irrep with weight `k` and the `len` lowest states.
    pub fn discrete_plus(k: HalfInt, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidIrrep("empty window"));
        }
        make_irrep(
            IrrepClass::DiscretePlus,
            IrrepParams::K(k),
            MWindow::new(k, k + (len as i64 - 1)),
        )
    }

    pub fn continuous(lambda: f64, grid: MGrid, min: HalfInt, max: HalfInt) -> Result<Self> {
        make_irrep(
            IrrepClass::Continuous,
            IrrepParams::Lambda { lambda, grid },
            MWindow::new(min, max),
        )
    }

    /// Same irrep on another window.
    pub fn with_window(&self, window: MWindow) -> Result<Self> {
        let params = match self.k {
            Some(k) => IrrepParams::K(k),
            None => IrrepParams::Lambda {
                lambda: self.lambda,
                grid: self.grid,
            },
        };
        make_irrep(self.class, params, window)
    }

    /// Window widened by `below` and `above` steps, clipped to the support.
    pub fn widened(&self, below: usize, above: usize) -> Result<Self> {
        self.with_window(MWindow::new(
            self.window.min - below as i64,
            self.window.max + above as i64,
        ))
    }

    pub fn class(&self) -> IrrepClass {
        self.class
    }

    pub fn k(&self) -> Option<HalfInt> {
        self.k
    }

    /// The Casimir value.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn grid(&self) -> MGrid {
        self.grid
    }

    pub fn window(&self) -> MWindow {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.window.len()
    }

    pub fn ms(&self) -> Vec<HalfInt> {
        (0..self.dim() as i64).map(|i| self.window.min + i).collect()
    }

    pub fn index_of(&self, m: HalfInt) -> Option<usize> {
        self.window
            .contains(m)
            .then(|| ((m - self.window.min).twice() / 2) as usize)
    }

    /// Whether `m` belongs to the (untruncated) irrep.
    pub fn supports(&self, m: HalfInt) -> bool {
        self.grid.contains(m)
            && match (self.class, self.k) {
                (IrrepClass::DiscretePlus, Some(k)) => m >= k,
                (IrrepClass::DiscreteMinus, Some(k)) => m <= -k,
                _ => true,
            }
    }

    /// Whether the irrep continues below the window.
    pub fn truncated_below(&self) -> bool {
        self.supports(self.window.min - 1)
    }

    /// Whether the irrep continues above the window.
    pub fn truncated_above(&self) -> bool {
        self.supports(self.window.max + 1)
    }

    /// `√(m(m+1) − λ)`, the amplitude of `s₊` from `m` (and of `s₋` back).
    pub fn raise_amplitude(&self, m: HalfInt) -> Result<f64> {
        let mf = m.to_f64();
        let radicand = mf * (mf + 1.0) - self.lambda;
        if radicand >= 0.0 {
            Ok(libm::sqrt(radicand))
        } else if radicand > -CLAMP {
            Ok(0.0)
        } else {
            Err(Error::InvalidIrrepWindow { m, radicand })
        }
    }

    /// `√(m(m−1) − λ)`, the amplitude of `s₋` from `m`.
    pub fn lower_amplitude(&self, m: HalfInt) -> Result<f64> {
        self.raise_amplitude(m - 1)
    }

    /// Indices of states at least `margin` ladder steps away from every
    /// truncated edge. Edges where the irrep itself ends do not count.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        let lo = if self.truncated_below() { margin } else { 0 };
        let hi = if self.truncated_above() { margin } else { 0 };
        let n = self.dim();
        if n < lo + hi + 1 {
            return Vec::new();
        }
        (lo..n - hi).collect()
    }

    pub fn s0(&self) -> HermitianOperator {
        let d: Vec<f64> = self.ms().iter().map(|m| m.to_f64()).collect();
        HermitianOperator::diagonal(&d)
    }

    fn ladder(&self, raise: bool) -> SparseMatrix {
        let ms = self.ms();
        let n = ms.len();
        let triples = (0..n.saturating_sub(1)).map(|i| {
            let a = self
                .raise_amplitude(ms[i])
                .expect("amplitudes validated at construction");
            let (r, c) = if raise { (i + 1, i) } else { (i, i + 1) };
            (r, c, Complex64::new(a, 0.0))
        });
        SparseMatrix::from_triples(n, n, triples)
    }

    pub fn s_plus(&self) -> SparseMatrix {
        self.ladder(true)
    }

    pub fn s_minus(&self) -> SparseMatrix {
        self.ladder(false)
    }

    /// `s₁ = (s₊ + s₋)/2`.
    pub fn s1(&self) -> HermitianOperator {
        let m = self.s_plus().add(&self.s_minus()).scale_re(0.5);
        HermitianOperator::try_new(m, 0.0).expect("exactly Hermitian")
    }

    /// `s₂ = (s₊ − s₋)/(2i)`.
    pub fn s2(&self) -> HermitianOperator {
        let m = self
            .s_plus()
            .sub(&self.s_minus())
            .scale(Complex64::new(0.0, -0.5));
        HermitianOperator::try_new(m, 0.0).expect("exactly Hermitian")
    }

    /// `s₀² − (s₊s₋ + s₋s₊)/2`, equal to `λ` on interior states.
    pub fn casimir(&self) -> SparseMatrix {
        let s0 = self.s0();
        let (sp, sm) = (self.s_plus(), self.s_minus());
        s0.mul(&s0)
            .sub(&sp.mul(&sm).add(&sm.mul(&sp)).scale_re(0.5))
    }
}
