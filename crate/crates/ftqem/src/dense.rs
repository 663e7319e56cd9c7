//! Exact small-system simulation: pure state vectors (n ≤ 14) and density operators
//! stored as real Pauli vectors (n ≤ 8).
//!
//! Qubit 0 is the most significant bit of a basis-state index, matching the
//! Kronecker order used everywhere else.

use nalgebra::DVector;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat, ONE, ZERO};
use crate::pauli::{Pauli, PauliString};
use crate::ptm::TransferMatrix;
use crate::quasiprob::{BasisAction, OpId, QuasiDecomposition, BASIS16};

pub const MAX_PURE_QUBITS: usize = 14;
pub const MAX_MIXED_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amp: Vec<C64>,
}

fn bitpos(n: usize, q: usize) -> usize {
    n - 1 - q
}

impl StateVector {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_PURE_QUBITS {
            return Err(Error::Dimension(format!("pure-state cap is {MAX_PURE_QUBITS} qubits")));
        }
        let mut amp = vec![ZERO; 1 << n];
        amp[0] = ONE;
        Ok(StateVector { n, amp })
    }

    pub fn from_amplitudes(amp: Vec<C64>) -> Result<Self> {
        let n = amp.len().trailing_zeros() as usize;
        if amp.len() != 1 << n || n > MAX_PURE_QUBITS {
            return Err(Error::Dimension("amplitude count must be 2^n".into()));
        }
        Ok(StateVector { n, amp })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(Error::Invalid(format!("qubit {q} out of range")));
            }
            if qubits[..i].contains(&q) {
                return Err(Error::Invalid("qubits must be distinct".into()));
            }
        }
        Ok(())
    }

    /// Applies a 2ᵏ×2ᵏ matrix to `qubits` (first listed qubit is the most significant factor).
    pub fn apply_unitary(&mut self, u: &CMat, qubits: &[usize]) -> Result<()> {
        self.check_qubits(qubits)?;
        let k = qubits.len();
        if u.nrows() != 1 << k || u.ncols() != 1 << k {
            return Err(Error::Dimension("matrix size does not match qubit count".into()));
        }
        self.apply_unchecked(u, qubits);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, u: &CMat, qubits: &[usize]) {
        let k = qubits.len();
        let masks: Vec<usize> = qubits.iter().map(|&q| 1 << bitpos(self.n, q)).collect();
        let all: usize = masks.iter().sum();
        let sub = 1 << k;
        let offsets: Vec<usize> = (0..sub)
            .map(|s| {
                (0..k)
                    .filter(|&j| (s >> (k - 1 - j)) & 1 == 1)
                    .map(|j| masks[j])
                    .sum()
            })
            .collect();
        let mut buf = vec![ZERO; sub];
        for base in 0..self.amp.len() {
            if base & all != 0 {
                continue;
            }
            for s in 0..sub {
                buf[s] = self.amp[base + offsets[s]];
            }
            for r in 0..sub {
                let mut acc = ZERO;
                for s in 0..sub {
                    acc += u[(r, s)] * buf[s];
                }
                self.amp[base + offsets[r]] = acc;
            }
        }
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch(p.n(), self.n));
        }
        let (xb, zb, ny) = crate::linalg::pauli_bits(self.n, p.unsigned().index());
        // P|c⟩ = i^{phase + #Y} (−1)^{|c ∧ z|} |c ⊕ x⟩
        let phase = crate::linalg::I.powi((p.phase() as u32 + ny) as i32 % 4);
        let old = self.amp.clone();
        for (r, a) in old.iter().enumerate() {
            let sign = if (r & zb).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            self.amp[r ^ xb] = a * phase * sign;
        }
        Ok(())
    }

    /// ⟨ψ|P|ψ⟩ (real part; exact for Hermitian P).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        let mut t = self.clone();
        t.apply_pauli(p)?;
        Ok(self
            .amp
            .iter()
            .zip(&t.amp)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }

    /// Projects onto the `sign` eigenspace of `P` without renormalising; returns the
    /// probability of that branch.
    pub fn project(&mut self, p: &PauliString, sign: i8) -> Result<f64> {
        let mut t = self.clone();
        t.apply_pauli(p)?;
        let s = sign as f64;
        for (a, b) in self.amp.iter_mut().zip(&t.amp) {
            *a = (*a + b * s) * 0.5;
        }
        Ok(self.norm_sqr())
    }

    pub fn normalize(&mut self) {
        let nrm = self.norm_sqr().sqrt();
        if nrm > 0.0 {
            self.amp.iter_mut().for_each(|a| *a /= nrm);
        }
    }

    /// Projective measurement of a Hermitian Pauli with collapse.
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        let e = self.expectation(p)?;
        let p_plus = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
        let outcome = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        self.project(p, outcome)?;
        self.normalize();
        Ok(outcome)
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<i8> {
        let p = PauliString::single(self.n, q, Pauli::Z);
        self.measure(&p, rng)
    }

    /// Appends a qubit in state `psi` as the new last qubit.
    pub fn append_qubit(&mut self, psi: [C64; 2]) -> Result<()> {
        if self.n + 1 > MAX_PURE_QUBITS {
            return Err(Error::Dimension("pure-state cap exceeded".into()));
        }
        let mut amp = Vec::with_capacity(self.amp.len() * 2);
        for a in &self.amp {
            amp.push(a * psi[0]);
            amp.push(a * psi[1]);
        }
        self.amp = amp;
        self.n += 1;
        Ok(())
    }

    /// Removes qubit `q`, which must already be in a computational-basis state.
    pub fn discard_measured(&mut self, q: usize, value: bool) {
        let bp = bitpos(self.n, q);
        let mut amp = Vec::with_capacity(self.amp.len() / 2);
        for (r, a) in self.amp.iter().enumerate() {
            if ((r >> bp) & 1 == 1) == value {
                amp.push(*a);
            }
        }
        self.amp = amp;
        self.n -= 1;
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }
}

/// Full matrix of `u` acting on `qubits` of an `n`-qubit register.
pub fn embed(n: usize, u: &CMat, qubits: &[usize]) -> CMat {
    let d = 1 << n;
    let mut out = CMat::zeros(d, d);
    for col in 0..d {
        let mut amp = vec![ZERO; d];
        amp[col] = ONE;
        let mut s = StateVector { n, amp };
        s.apply_unchecked(u, qubits);
        for r in 0..d {
            out[(r, col)] = s.amp[r];
        }
    }
    out
}

/// Density operator as a Pauli vector `v_i = Tr[P_i ρ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliVectorState {
    n: usize,
    v: DVector<f64>,
}

impl PauliVectorState {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_MIXED_QUBITS {
            return Err(Error::Dimension(format!("mixed-state cap is {MAX_MIXED_QUBITS} qubits")));
        }
        let mut v = DVector::zeros(1 << (2 * n));
        // |0⟩⟨0|^{⊗n}: every string over {I, Z} has trace 1
        for i in 0..v.len() {
            if (0..n).all(|q| matches!((i >> (2 * q)) & 3, 0 | 3)) {
                v[i] = 1.0;
            }
        }
        Ok(PauliVectorState { n, v })
    }

    pub fn from_pure(s: &StateVector) -> Result<Self> {
        if s.n > MAX_MIXED_QUBITS {
            return Err(Error::Dimension("mixed-state cap exceeded".into()));
        }
        let d4 = 1 << (2 * s.n);
        let v = DVector::from_fn(d4, |i, _| {
            s.expectation(&PauliString::from_index(s.n, i)).expect("sizes match")
        });
        Ok(PauliVectorState { n: s.n, v })
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn trace(&self) -> f64 {
        self.v[0]
    }

    /// Applies a PTM acting on `qubits` (in that order).
    pub fn apply_linear_map(&mut self, m: &TransferMatrix, qubits: &[usize]) -> Result<()> {
        let k = qubits.len();
        if m.n != k {
            return Err(Error::Dimension("PTM size does not match qubit count".into()));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n || qubits[..i].contains(&q) {
                return Err(Error::Invalid("bad qubit list".into()));
            }
        }
        let n = self.n;
        let shifts: Vec<usize> = qubits.iter().map(|&q| 2 * (n - 1 - q)).collect();
        let all: usize = shifts.iter().map(|s| 3 << s).sum();
        let sub = 1 << (2 * k);
        let offsets: Vec<usize> = (0..sub)
            .map(|s| {
                (0..k)
                    .map(|j| ((s >> (2 * (k - 1 - j))) & 3) << shifts[j])
                    .sum()
            })
            .collect();
        let mut buf = vec![0.0; sub];
        for base in 0..self.v.len() {
            if base & all != 0 {
                continue;
            }
            for s in 0..sub {
                buf[s] = self.v[base + offsets[s]];
            }
            for r in 0..sub {
                self.v[base + offsets[r]] = (0..sub).map(|s| m.m[(r, s)] * buf[s]).sum();
            }
        }
        Ok(())
    }

    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch(p.n(), self.n));
        }
        Ok(p.sign() as f64 * self.v[p.index()])
    }

    /// Samples a Pauli measurement and collapses (renormalised).
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        let tr = self.trace();
        let e = self.expectation(p)? / tr;
        let outcome: i8 = if rng.gen::<f64>() < (1.0 + e) / 2.0 { 1 } else { -1 };
        let s = outcome as f64 * p.sign() as f64;
        let pu = p.unsigned();
        let old = self.v.clone();
        for i in 0..old.len() {
            let q = PauliString::from_index(self.n, i);
            if q.anticommutes_unchecked(&pu) {
                self.v[i] = 0.0;
            } else {
                let prod = q.mul(&pu).expect("same size");
                // QP = i^k R with k even for commuting Hermitian strings
                let sgn = if prod.phase() == 0 { 1.0 } else { -1.0 };
                self.v[i] = 0.5 * (old[i] + s * sgn * old[prod.unsigned().index()]);
            }
        }
        let t = self.v[0];
        self.v /= t;
        Ok(outcome)
    }
}

/// Realises one basis element of a sampled decomposition term on a pure state.
/// Returns the weight (1 for unitary elements, 0/1 for projective ones).
pub fn apply_basis_element<R: Rng + ?Sized>(
    st: &mut StateVector,
    id: u8,
    qubit: usize,
    rng: &mut R,
) -> Result<f64> {
    let b = &BASIS16[id as usize];
    match b.action {
        BasisAction::Unitary => {
            st.apply_unitary(&b.matrix, &[qubit])?;
            Ok(1.0)
        }
        BasisAction::Project { proj, sign, after } => {
            let p = PauliString::single(st.n, qubit, proj);
            let outcome = st.measure(&p, rng)?;
            if after != Pauli::I {
                st.apply_pauli(&PauliString::single(st.n, qubit, after))?;
            }
            Ok(if outcome == sign { 1.0 } else { 0.0 })
        }
    }
}

/// Samples a term of `dec` (single-qubit, over the basis or Paulis), applies it to
/// `qubit`, and returns (term index, sgn(η)·weight). Projective elements are realised
/// by a physical measurement of σ; the run is kept with weight 1 on the selected
/// eigenvalue and 0 otherwise, which reproduces the trace-decreasing map in mean.
pub fn mitigation_weight_sampler<R: Rng + ?Sized>(
    st: &mut StateVector,
    dec: &QuasiDecomposition,
    sampler: &crate::quasiprob::CumulativeSampler,
    qubit: usize,
    rng: &mut R,
) -> Result<(usize, f64)> {
    let i = sampler.sample(rng);
    let t = &dec.terms[i];
    let w = match &t.op {
        OpId::Basis(ids) => {
            if ids.len() != 1 {
                return Err(Error::Invalid("single-qubit decomposition expected".into()));
            }
            apply_basis_element(st, ids[0], qubit, rng)?
        }
        OpId::Pauli(p) => {
            if p.n() != 1 {
                return Err(Error::Invalid("single-qubit decomposition expected".into()));
            }
            st.apply_pauli(&PauliString::single(st.n, qubit, p.get(0)))?;
            1.0
        }
    };
    Ok((i, t.eta.signum() * w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, pauli_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn apply_pauli_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let amp: Vec<C64> = (0..8).map(|_| linalg::c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        for idx in 0..64 {
            for ph in 0..4 {
                let p = PauliString::from_index(3, idx).with_phase(ph);
                let mut s = StateVector::from_amplitudes(amp.clone()).unwrap();
                s.apply_pauli(&p).unwrap();
                let want = pauli_matrix(&p) * DVector::from_column_slice(&amp);
                for r in 0..8 {
                    assert!((want[r] - s.amp[r]).norm() < 1e-12, "{p}");
                }
            }
        }
    }

    #[test]
    fn embed_matches_kron() {
        let h = linalg::hadamard();
        let id = CMat::identity(2, 2);
        let full = embed(2, &h, &[1]);
        assert!((full - linalg::kron(&id, &h)).iter().all(|z| z.norm() < 1e-12));
        let cx10 = embed(2, &linalg::cnot(), &[1, 0]);
        // control on qubit 1 (least significant): |01⟩ → |11⟩
        assert!((cx10[(3, 1)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn hadamard_measurement_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shots = 100_000;
        let mut plus = 0;
        for _ in 0..shots {
            let mut s = StateVector::new(1).unwrap();
            s.apply_unitary(&linalg::hadamard(), &[0]).unwrap();
            if s.measure_z(0, &mut rng).unwrap() == 1 {
                plus += 1;
            }
        }
        let f = plus as f64 / shots as f64;
        assert!((f - 0.5).abs() < 3.0 * (0.25 / shots as f64).sqrt() + 1e-3);
    }

    #[test]
    fn pauli_vector_initial_state() {
        let st = PauliVectorState::new(2).unwrap();
        let pure = PauliVectorState::from_pure(&StateVector::new(2).unwrap()).unwrap();
        assert!((st.vector() - pure.vector()).abs().max() < 1e-14);
    }

    #[test]
    fn caps() {
        assert!(StateVector::new(15).is_err());
        assert!(PauliVectorState::new(9).is_err());
    }
}
