//! Truncated two-boson-mode ⊗ qubit Hilbert space and its elementary
//! operators.
//!
//! Tensor ordering is fixed as mode1 ⊗ mode2 ⊗ qubit; the flat index of
//! |n1, n2, q⟩ is `(n1·(n_max_2+1) + n2)·qdim + q`. Qubit convention:
//! index 0 is |g⟩, σ₃ = |e⟩⟨e| - |g⟩⟨g| = diag(-1, +1).

use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::{c64, dagger, kron, CMatrix, CVector};
use crate::{PfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QubitLevel {
    G,
    E,
}

impl QubitLevel {
    pub fn index(self) -> usize {
        match self {
            QubitLevel::G => 0,
            QubitLevel::E => 1,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(QubitLevel::G),
            1 => Ok(QubitLevel::E),
            _ => Err(PfError::InvalidArgument(format!("qubit index {i}"))),
        }
    }
}

/// One basis ket |n1, n2⟩ or |n1, n2, q⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub n1: usize,
    pub n2: usize,
    pub q: Option<QubitLevel>,
}

/// Truncation of the two-mode ⊗ qubit space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpaceConfig {
    pub n_max_1: usize,
    pub n_max_2: usize,
    pub include_qubit: bool,
}

impl SpaceConfig {
    pub fn new(n_max_1: usize, n_max_2: usize, include_qubit: bool) -> Result<Self> {
        if n_max_1 < 1 || n_max_2 < 1 {
            return Err(PfError::InvalidArgument(format!(
                "mode truncations must be at least 1, got ({n_max_1}, {n_max_2})"
            )));
        }
        Ok(SpaceConfig {
            n_max_1,
            n_max_2,
            include_qubit,
        })
    }

    pub fn with_qubit(n_max_1: usize, n_max_2: usize) -> Result<Self> {
        Self::new(n_max_1, n_max_2, true)
    }

    pub fn two_mode(n_max_1: usize, n_max_2: usize) -> Result<Self> {
        Self::new(n_max_1, n_max_2, false)
    }

    pub fn qdim(&self) -> usize {
        if self.include_qubit {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        (self.n_max_1 + 1) * (self.n_max_2 + 1) * self.qdim()
    }

    pub fn flat_index(&self, label: BasisLabel) -> Result<usize> {
        if label.n1 > self.n_max_1 || label.n2 > self.n_max_2 {
            return Err(PfError::InvalidArgument(format!(
                "occupation ({}, {}) outside truncation ({}, {})",
                label.n1, label.n2, self.n_max_1, self.n_max_2
            )));
        }
        let q = match (self.include_qubit, label.q) {
            (true, Some(q)) => q.index(),
            (false, None) => 0,
            (true, None) => {
                return Err(PfError::InvalidArgument(
                    "label is missing the qubit level".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(PfError::InvalidArgument(
                    "label carries a qubit level but the space has none".into(),
                ))
            }
        };
        Ok((label.n1 * (self.n_max_2 + 1) + label.n2) * self.qdim() + q)
    }

    pub fn label(&self, index: usize) -> Result<BasisLabel> {
        if index >= self.dim() {
            return Err(PfError::InvalidArgument(format!(
                "index {index} outside dimension {}",
                self.dim()
            )));
        }
        let q = index % self.qdim();
        let rest = index / self.qdim();
        let n2 = rest % (self.n_max_2 + 1);
        let n1 = rest / (self.n_max_2 + 1);
        Ok(BasisLabel {
            n1,
            n2,
            q: if self.include_qubit {
                Some(QubitLevel::from_index(q)?)
            } else {
                None
            },
        })
    }

    /// Unit vector for one basis label.
    pub fn basis_state(&self, label: BasisLabel) -> Result<CVector> {
        let mut v = CVector::zeros(self.dim());
        v[self.flat_index(label)?] = c64(1.0, 0.0);
        Ok(v)
    }

    pub fn require_qubit(&self) -> Result<()> {
        if self.include_qubit {
            Ok(())
        } else {
            Err(PfError::Contract(
                "operation needs the qubit factor but the space has none".into(),
            ))
        }
    }
}

/// Single-mode lowering matrix a|n⟩ = √n |n-1⟩ on dimension n_max+1.
fn lowering(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = c64((n as f64).sqrt(), 0.0);
    }
    a
}

fn embed(cfg: &SpaceConfig, m1: &CMatrix, m2: &CMatrix, mq: Option<&CMatrix>) -> Result<CMatrix> {
    let k = kron(m1, m2)?;
    match (cfg.include_qubit, mq) {
        (true, Some(q)) => kron(&k, q),
        (true, None) => kron(&k, &CMatrix::identity(2, 2)),
        (false, None) => Ok(k),
        (false, Some(_)) => Err(PfError::Contract(
            "operation needs the qubit factor but the space has none".into(),
        )),
    }
}

/// Annihilation operator of the chosen mode (1 or 2), identity elsewhere.
pub fn annihilation(mode: u8, cfg: &SpaceConfig) -> Result<CMatrix> {
    let i1 = CMatrix::identity(cfg.n_max_1 + 1, cfg.n_max_1 + 1);
    let i2 = CMatrix::identity(cfg.n_max_2 + 1, cfg.n_max_2 + 1);
    match mode {
        1 => embed(cfg, &lowering(cfg.n_max_1), &i2, None),
        2 => embed(cfg, &i1, &lowering(cfg.n_max_2), None),
        _ => Err(PfError::InvalidArgument(format!("mode index {mode}"))),
    }
}

pub fn creation(mode: u8, cfg: &SpaceConfig) -> Result<CMatrix> {
    Ok(dagger(&annihilation(mode, cfg)?))
}

/// Number operator a†a of the chosen mode, built directly as the exact
/// integer diagonal rather than as a matrix product, so conservation laws
/// against it hold without (√n)² rounding.
pub fn number(mode: u8, cfg: &SpaceConfig) -> Result<CMatrix> {
    if mode != 1 && mode != 2 {
        return Err(PfError::InvalidArgument(format!("mode index {mode}")));
    }
    let dim = cfg.dim();
    let mut d = CVector::zeros(dim);
    for i in 0..dim {
        let l = cfg.label(i)?;
        let n = if mode == 1 { l.n1 } else { l.n2 };
        d[i] = c64(n as f64, 0.0);
    }
    Ok(CMatrix::from_diagonal(&d))
}

pub fn identity(cfg: &SpaceConfig) -> CMatrix {
    CMatrix::identity(cfg.dim(), cfg.dim())
}

/// Pauli matrix on the qubit factor, axis 1, 2, or 3, embedded in the full
/// space. σ₃ = diag(-1, +1) in the (g, e) ordering.
pub fn qubit_pauli(axis: u8, cfg: &SpaceConfig) -> Result<CMatrix> {
    cfg.require_qubit()?;
    let m: CMatrix = match axis {
        1 => CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]),
        2 => CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., 1.), c64(0., -1.), c64(0., 0.)]),
        3 => CMatrix::from_diagonal(&CVector::from_vec(vec![c64(-1., 0.), c64(1., 0.)])),
        _ => return Err(PfError::InvalidArgument(format!("Pauli axis {axis}"))),
    };
    let i1 = CMatrix::identity(cfg.n_max_1 + 1, cfg.n_max_1 + 1);
    let i2 = CMatrix::identity(cfg.n_max_2 + 1, cfg.n_max_2 + 1);
    embed(cfg, &i1, &i2, Some(&m))
}

/// Qubit raising operator |e⟩⟨g| embedded in the full space.
pub fn qubit_raise(cfg: &SpaceConfig) -> Result<CMatrix> {
    cfg.require_qubit()?;
    let mut m = CMatrix::zeros(2, 2);
    m[(1, 0)] = c64(1.0, 0.0);
    let i1 = CMatrix::identity(cfg.n_max_1 + 1, cfg.n_max_1 + 1);
    let i2 = CMatrix::identity(cfg.n_max_2 + 1, cfg.n_max_2 + 1);
    embed(cfg, &i1, &i2, Some(&m))
}

/// Qubit lowering operator |g⟩⟨e| embedded in the full space.
pub fn qubit_lower(cfg: &SpaceConfig) -> Result<CMatrix> {
    Ok(dagger(&qubit_raise(cfg)?))
}

/// Total excitation N = a₁†a₁ + a₂†a₂ + (σ₃+1)/2, diagonal with eigenvalue
/// n1 + n2 + (q == e).
pub fn total_excitation(cfg: &SpaceConfig) -> Result<CMatrix> {
    cfg.require_qubit()?;
    let dim = cfg.dim();
    let mut d = CVector::zeros(dim);
    for i in 0..dim {
        let l = cfg.label(i)?;
        let q = l.q.map_or(0, QubitLevel::index);
        d[i] = c64((l.n1 + l.n2 + q) as f64, 0.0);
    }
    Ok(CMatrix::from_diagonal(&d))
}

/// Two-mode parity exp(iπ(a₁†a₁ + a₂†a₂)), diagonal with entries
/// (-1)^(n1+n2); squares to the identity.
pub fn two_mode_parity(cfg: &SpaceConfig) -> Result<CMatrix> {
    let dim = cfg.dim();
    let mut d = CVector::zeros(dim);
    for i in 0..dim {
        let l = cfg.label(i)?;
        d[i] = c64(if (l.n1 + l.n2) % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Ok(CMatrix::from_diagonal(&d))
}

/// Diagonal of an operator that is a function of the basis label, as a real
/// vector. Used for fast expectation values of diagonal observables.
pub fn diagonal_observable<F: Fn(&BasisLabel) -> f64>(cfg: &SpaceConfig, f: F) -> Result<Vec<f64>> {
    (0..cfg.dim()).map(|i| Ok(f(&cfg.label(i)?))).collect()
}

pub fn expectation_diag(diag: &[f64], psi: &CVector) -> f64 {
    diag.iter()
        .zip(psi.iter())
        .map(|(d, z)| d * z.norm_sqr())
        .sum()
}

pub fn expectation(op: &CMatrix, psi: &CVector) -> Complex64 {
    psi.dotc(&(op * psi))
}
