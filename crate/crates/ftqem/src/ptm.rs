//! Pauli transfer matrices.
//!
//! Entries are `R_ij = (1/d) Tr[P_i E(P_j)]` in base-4 big-endian (I, X, Y, Z)
//! order, so that `R(E_B ∘ E_A) = R(E_B) R(E_A)` and a state vector
//! `|ρ⟩⟩_i = Tr[P_i ρ]` evolves as `R |ρ⟩⟩`. Observables are rows
//! `⟨⟨O|_j = (1/d) Tr[O P_j]`, giving `Tr[O ρ] = ⟨⟨O|ρ⟩⟩`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli_trace, CMat};
use crate::pauli::PauliString;

pub const MAX_DENSE_QUBITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub n: usize,
    pub m: DMatrix<f64>,
}

impl TransferMatrix {
    pub fn identity(n: usize) -> Self {
        let d = 1 << (2 * n);
        TransferMatrix {
            n,
            m: DMatrix::identity(d, d),
        }
    }

    pub fn from_matrix(n: usize, m: DMatrix<f64>) -> Result<Self> {
        let d = 1 << (2 * n);
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Dimension(format!(
                "PTM for {n} qubits must be {d}x{d}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(TransferMatrix { n, m })
    }

    pub fn diagonal(n: usize, diag: &[f64]) -> Self {
        TransferMatrix {
            n,
            m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn transpose(&self) -> Self {
        TransferMatrix {
            n: self.n,
            m: self.m.transpose(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .m
            .clone()
            .try_inverse()
            .ok_or(Error::Singular(0.0))?;
        Ok(TransferMatrix { n: self.n, m: inv })
    }

    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        (&self.m - &other.m).abs().max()
    }

    pub fn scaled(&self, s: f64) -> Self {
        TransferMatrix {
            n: self.n,
            m: &self.m * s,
        }
    }

    pub fn add(&self, other: &TransferMatrix) -> Self {
        TransferMatrix {
            n: self.n,
            m: &self.m + &other.m,
        }
    }

    /// Largest off-diagonal magnitude.
    pub fn off_diagonal_mass(&self) -> f64 {
        let d = self.dim();
        let mut best: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    best = best.max(self.m[(i, j)].abs());
                }
            }
        }
        best
    }

    pub fn kron(&self, other: &TransferMatrix) -> Self {
        TransferMatrix {
            n: self.n + other.n,
            m: self.m.kronecker(&other.m),
        }
    }
}

/// PTM of a map given by Kraus operators (a single unitary is the one-element case).
pub fn ptm_of_channel(kraus: &[CMat], n: usize) -> Result<TransferMatrix> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Dimension(format!(
            "dense PTM construction limited to {MAX_DENSE_QUBITS} qubits"
        )));
    }
    let dim = 1usize << n;
    if kraus.is_empty() {
        return Err(Error::Dimension("no Kraus operators".into()));
    }
    for k in kraus {
        if !k.is_square() {
            return Err(Error::Dimension("non-square operator".into()));
        }
        if k.nrows() != dim {
            return Err(Error::Dimension(format!(
                "operator dimension {} is not 2^{n}",
                k.nrows()
            )));
        }
    }
    let d4 = dim * dim;
    let mut m = DMatrix::zeros(d4, d4);
    for j in 0..d4 {
        let pj = crate::linalg::pauli_matrix(&PauliString::from_index(n, j));
        let mut out = CMat::zeros(dim, dim);
        for k in kraus {
            out += k * &pj * k.adjoint();
        }
        for i in 0..d4 {
            m[(i, j)] = pauli_trace(n, i, &out).re / dim as f64;
        }
    }
    Ok(TransferMatrix { n, m })
}

pub fn ptm_of_unitary(u: &CMat, n: usize) -> Result<TransferMatrix> {
    ptm_of_channel(std::slice::from_ref(u), n)
}

/// `a ∘ b` (apply `b` first).
pub fn ptm_compose(a: &TransferMatrix, b: &TransferMatrix) -> Result<TransferMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::SizeMismatch(a.dim(), b.dim()));
    }
    Ok(TransferMatrix {
        n: a.n,
        m: &a.m * &b.m,
    })
}

pub fn ptm_apply(m: &TransferMatrix, v: &DVector<f64>) -> Result<DVector<f64>> {
    if m.dim() != v.len() {
        return Err(Error::SizeMismatch(m.dim(), v.len()));
    }
    Ok(&m.m * v)
}

pub fn expectation(row: &DVector<f64>, m: &TransferMatrix, col: &DVector<f64>) -> Result<f64> {
    if row.len() != m.dim() || col.len() != m.dim() {
        return Err(Error::SizeMismatch(row.len(), col.len()));
    }
    Ok(row.dot(&(&m.m * col)))
}

/// `|ρ⟩⟩_i = Tr[P_i ρ]`.
pub fn state_vector(rho: &CMat, n: usize) -> DVector<f64> {
    let d4 = 1 << (2 * n);
    DVector::from_fn(d4, |i, _| pauli_trace(n, i, rho).re)
}

/// `⟨⟨O|_j = (1/d) Tr[O P_j]`.
pub fn observable_row(o: &CMat, n: usize) -> DVector<f64> {
    let d4 = 1 << (2 * n);
    let d = (1 << n) as f64;
    DVector::from_fn(d4, |j, _| pauli_trace(n, j, o).re / d)
}

/// Pure-state density matrix |ψ⟩⟨ψ|.
pub fn projector(psi: &[crate::linalg::C64]) -> CMat {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}

/// Row for a (signed) Pauli observable: a unit vector at its index.
pub fn pauli_row(p: &PauliString) -> DVector<f64> {
    let mut r = DVector::zeros(1 << (2 * p.n()));
    r[p.index()] = p.sign() as f64;
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::*;
    use crate::pauli::Pauli;

    #[test]
    fn identity_unitary() {
        let m = ptm_of_unitary(&CMat::identity(4, 4), 2).unwrap();
        assert!(m.max_abs_diff(&TransferMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn hadamard_swaps_x_z_and_negates_y() {
        let m = ptm_of_unitary(&hadamard(), 1).unwrap();
        let mut want = DMatrix::zeros(4, 4);
        want[(0, 0)] = 1.0;
        want[(3, 1)] = 1.0;
        want[(1, 3)] = 1.0;
        want[(2, 2)] = -1.0;
        assert!((m.m - want).abs().max() < 1e-14);
    }

    #[test]
    fn depolarizing_diagonal() {
        let p: f64 = 0.03;
        let mut kraus = vec![CMat::identity(2, 2) * c((1.0 - p).sqrt(), 0.0)];
        for q in [Pauli::X, Pauli::Y, Pauli::Z] {
            kraus.push(pauli1(q) * c((p / 3.0).sqrt(), 0.0));
        }
        let m = ptm_of_channel(&kraus, 1).unwrap();
        let f = 1.0 - 4.0 * p / 3.0;
        assert!(m.max_abs_diff(&TransferMatrix::diagonal(1, &[1.0, f, f, f])) < 1e-14);
    }

    #[test]
    fn hadamard_expectations() {
        let rho = projector(&[ONE, ZERO]);
        let v = state_vector(&rho, 1);
        let m = ptm_of_unitary(&hadamard(), 1).unwrap();
        let z = observable_row(&pauli1(Pauli::Z), 1);
        let x = observable_row(&pauli1(Pauli::X), 1);
        assert!(expectation(&z, &m, &v).unwrap().abs() < 1e-14);
        assert!((expectation(&x, &m, &v).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert!(ptm_of_channel(&[CMat::identity(3, 3)], 1).is_err());
        assert!(ptm_of_channel(&[CMat::zeros(2, 4)], 1).is_err());
        let a = TransferMatrix::identity(1);
        let b = TransferMatrix::identity(2);
        assert!(ptm_compose(&a, &b).is_err());
    }
}
