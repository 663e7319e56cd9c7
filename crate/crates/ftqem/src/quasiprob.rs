//! Quasi-probability decompositions of inverse noise maps.
//!
//! Stochastic Pauli channels are inverted diagonally in the Pauli-transfer picture:
//! with `c(g, k) = ±1` the commutation sign, the PTM diagonal is
//! `λ_k = Σ_g p_g c(g, k)` and the inverse coefficients are
//! `η_g = 4⁻ⁿ Σ_k c(g, k) / λ_k`. Both directions are the same fast transform.
//! General single-qubit maps are solved exactly over a fixed 16-element basis.

use nalgebra::{DMatrix, DVector};
use once_cell::sync::Lazy;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, pauli1, CMat, I};
use crate::pauli::{Pauli, PauliString};
use crate::ptm::{ptm_of_channel, TransferMatrix};

pub const SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub n: usize,
    /// Probability per Pauli, indexed by basis index.
    pub probs: Vec<f64>,
}

impl PauliChannel {
    pub fn identity(n: usize) -> Self {
        let mut probs = vec![0.0; 1 << (2 * n)];
        probs[0] = 1.0;
        PauliChannel { n, probs }
    }

    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << (2 * n) {
            return Err(Error::SizeMismatch(probs.len(), 1 << (2 * n)));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Invalid("negative probability".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("probabilities sum to {s}")));
        }
        Ok(PauliChannel { n, probs })
    }

    /// Single-qubit channel from (p_X, p_Y, p_Z).
    pub fn xyz(px: f64, py: f64, pz: f64) -> Result<Self> {
        Self::new(1, vec![1.0 - px - py - pz, px, py, pz])
    }

    /// `(1−p)ρ + (p/3)(XρX + YρY + ZρZ)`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::xyz(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn p_err(&self) -> f64 {
        self.probs[1..].iter().sum()
    }

    pub fn prob(&self, p: &PauliString) -> f64 {
        self.probs[p.index()]
    }

    /// Channel with every error probability multiplied by `s` (identity takes the rest).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let mut probs: Vec<f64> = self.probs.iter().map(|&p| p * s).collect();
        probs[0] = 0.0;
        let e: f64 = probs.iter().sum();
        probs[0] = 1.0 - e;
        Self::new(self.n, probs)
    }

    /// PTM diagonal `λ_k`.
    pub fn ptm_diagonal(&self) -> Vec<f64> {
        let mut v = self.probs.clone();
        sign_transform(self.n, &mut v);
        v
    }

    pub fn ptm(&self) -> TransferMatrix {
        TransferMatrix::diagonal(self.n, &self.ptm_diagonal())
    }

    /// Recovers probabilities from a PTM diagonal.
    pub fn from_ptm_diagonal(n: usize, diag: &[f64]) -> Vec<f64> {
        let mut v = diag.to_vec();
        sign_transform(n, &mut v);
        let scale = 1.0 / (1u64 << (2 * n)) as f64;
        v.iter_mut().for_each(|x| *x *= scale);
        v
    }

    pub fn kron(&self, other: &PauliChannel) -> PauliChannel {
        let mut probs = Vec::with_capacity(self.probs.len() * other.probs.len());
        for a in &self.probs {
            for b in &other.probs {
                probs.push(a * b);
            }
        }
        PauliChannel {
            n: self.n + other.n,
            probs,
        }
    }

    pub fn sampler(&self) -> CumulativeSampler {
        CumulativeSampler::new(&self.probs)
    }
}

const C1: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// In-place `v_k ← Σ_g c(g, k) v_g`, factorised qubit by qubit.
pub fn sign_transform(n: usize, v: &mut [f64]) {
    assert_eq!(v.len(), 1 << (2 * n));
    for q in 0..n {
        let stride = 1 << (2 * (n - 1 - q));
        let block = stride * 4;
        for start in (0..v.len()).step_by(block) {
            for off in 0..stride {
                let idx = [
                    start + off,
                    start + off + stride,
                    start + off + 2 * stride,
                    start + off + 3 * stride,
                ];
                let x = [v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]];
                for (r, &i) in idx.iter().enumerate() {
                    v[i] = (0..4).map(|k| C1[r][k] * x[k]).sum();
                }
            }
        }
    }
}

/// An implementable operation in a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OpId {
    Pauli(PauliString),
    /// One basis-element id (0..16) per qubit.
    Basis(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub eta: f64,
    pub op: OpId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiDecomposition {
    pub n: usize,
    pub terms: Vec<Term>,
    pub gamma: f64,
}

impl QuasiDecomposition {
    pub fn new(n: usize, terms: Vec<Term>) -> Self {
        let gamma = terms.iter().map(|t| t.eta.abs()).sum();
        QuasiDecomposition { n, terms, gamma }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(
            n,
            vec![Term {
                eta: 1.0,
                op: OpId::Pauli(PauliString::identity(n)),
            }],
        )
    }

    pub fn probs(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.eta.abs() / self.gamma).collect()
    }

    pub fn signs(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.eta.signum()).collect()
    }

    pub fn is_pauli_only(&self) -> bool {
        self.terms.iter().all(|t| matches!(t.op, OpId::Pauli(_)))
    }

    pub fn sampler(&self) -> CumulativeSampler {
        CumulativeSampler::new(&self.probs())
    }

    /// `Σ η_i R(B_i)`.
    pub fn ptm(&self) -> TransferMatrix {
        let d = 1 << (2 * self.n);
        let mut m = DMatrix::zeros(d, d);
        for t in &self.terms {
            m += op_ptm(&t.op).m * t.eta;
        }
        TransferMatrix { n: self.n, m }
    }
}

pub fn qem_cost(dec: &QuasiDecomposition) -> f64 {
    dec.gamma
}

pub fn sampling_overhead(dec: &QuasiDecomposition) -> f64 {
    dec.gamma * dec.gamma
}

/// First-order approximation `1 + 2 p_dec`.
pub fn first_order_cost(p_dec: f64) -> f64 {
    1.0 + 2.0 * p_dec
}

/// Closed-form γ of the inverse of a single-qubit Pauli channel.
pub fn gamma_closed_form_1q(px: f64, py: f64, pz: f64) -> f64 {
    0.5 * (-1.0
        + 1.0 / (1.0 - 2.0 * (py + pz))
        + 1.0 / (1.0 - 2.0 * (pz + px))
        + 1.0 / (1.0 - 2.0 * (px + py)))
}

pub fn invert_pauli_channel(ch: &PauliChannel) -> Result<QuasiDecomposition> {
    invert_ptm_diagonal(ch.n, &ch.ptm_diagonal())
}

/// Pauli quasi-probability inverse of a diagonal PTM (physical or not).
pub fn invert_ptm_diagonal(n: usize, lam: &[f64]) -> Result<QuasiDecomposition> {
    if let Some(&bad) = lam.iter().find(|l| l.abs() < SINGULAR_TOL) {
        return Err(Error::Singular(bad));
    }
    let mut eta: Vec<f64> = lam.iter().map(|l| 1.0 / l).collect();
    sign_transform(n, &mut eta);
    let scale = 1.0 / (1u64 << (2 * n)) as f64;
    let terms = eta
        .iter()
        .enumerate()
        .filter(|(g, e)| *g == 0 || e.abs() > 0.0)
        .map(|(g, &e)| Term {
            eta: e * scale,
            op: OpId::Pauli(PauliString::from_index(n, g)),
        })
        .collect();
    Ok(QuasiDecomposition::new(n, terms))
}

/// What a basis element does to a state, for samplers that must realise it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisAction {
    /// Unitary conjugation by the stored matrix.
    Unitary,
    /// Project onto the `sign` eigenspace of `proj`, then apply `after` (I if none).
    Project { proj: Pauli, sign: i8, after: Pauli },
}

pub struct BasisElement {
    pub label: &'static str,
    pub matrix: CMat,
    pub action: BasisAction,
    pub ptm: TransferMatrix,
}

const LABELS: [&str; 16] = [
    "I", "X", "Y", "Z", "(I+iX)/r2", "(I+iY)/r2", "(I+iZ)/r2", "(I+X)/2", "(I+Y)/2", "(I+Z)/2",
    "(X+Y)/r2", "(Y+Z)/r2", "(Z+X)/r2", "(X+iY)/2", "(Y+iZ)/2", "(Z+iX)/2",
];

fn build_basis16() -> Vec<BasisElement> {
    let sig = [Pauli::X, Pauli::Y, Pauli::Z];
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let id = CMat::identity(2, 2);
    let mut out = Vec::with_capacity(16);
    let mut push = |k: usize, m: CMat, action: BasisAction| {
        let ptm = ptm_of_channel(std::slice::from_ref(&m), 1).expect("2x2");
        out.push(BasisElement {
            label: LABELS[k],
            matrix: m,
            action,
            ptm,
        });
    };
    push(0, id.clone(), BasisAction::Unitary);
    for (j, &s) in sig.iter().enumerate() {
        push(1 + j, pauli1(s), BasisAction::Unitary);
    }
    for (j, &s) in sig.iter().enumerate() {
        push(4 + j, (&id + pauli1(s) * I) * c(r2, 0.0), BasisAction::Unitary);
    }
    for (j, &s) in sig.iter().enumerate() {
        push(
            7 + j,
            (&id + pauli1(s)) * c(0.5, 0.0),
            BasisAction::Project {
                proj: s,
                sign: 1,
                after: Pauli::I,
            },
        );
    }
    for j in 0..3 {
        let m = (pauli1(sig[j]) + pauli1(sig[(j + 1) % 3])) * c(r2, 0.0);
        push(10 + j, m, BasisAction::Unitary);
    }
    for j in 0..3 {
        // (σ_j + iσ_{j+1})/2 = σ_j (I − σ_{j+2})/2
        let m = (pauli1(sig[j]) + pauli1(sig[(j + 1) % 3]) * I) * c(0.5, 0.0);
        push(
            13 + j,
            m,
            BasisAction::Project {
                proj: sig[(j + 2) % 3],
                sign: -1,
                after: sig[j],
            },
        );
    }
    out
}

pub static BASIS16: Lazy<Vec<BasisElement>> = Lazy::new(build_basis16);

static BASIS_SOLVER: Lazy<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> = Lazy::new(|| {
    let mut a = DMatrix::zeros(16, 16);
    for (k, b) in BASIS16.iter().enumerate() {
        for (e, v) in b.ptm.m.iter().enumerate() {
            a[(e, k)] = *v;
        }
    }
    a.lu()
});

/// Exact coefficients of a 4×4 target map over the 16-element basis.
pub fn decompose_inverse_1q(target: &TransferMatrix) -> Result<QuasiDecomposition> {
    if target.dim() != 4 {
        return Err(Error::Dimension("single-qubit PTM expected".into()));
    }
    let det = target.m.determinant();
    if det.abs() < SINGULAR_TOL {
        return Err(Error::Singular(det));
    }
    let b = DVector::from_iterator(16, target.m.iter().cloned());
    let eta = BASIS_SOLVER
        .solve(&b)
        .ok_or(Error::Singular(0.0))?;
    let terms: Vec<Term> = eta
        .iter()
        .enumerate()
        .map(|(k, &e)| Term {
            eta: e,
            op: OpId::Basis(vec![k as u8]),
        })
        .collect();
    let dec = QuasiDecomposition::new(1, terms);
    let resid = dec.ptm().max_abs_diff(target);
    if resid > 1e-10 {
        return Err(Error::Invalid(format!("basis solve residual {resid:.2e}")));
    }
    Ok(dec)
}

/// Converts a Pauli-only single-qubit decomposition to basis ids (I,X,Y,Z are elements 0..4).
fn as_basis_ids(op: &OpId) -> Vec<u8> {
    match op {
        OpId::Basis(v) => v.clone(),
        OpId::Pauli(p) => (0..p.n()).map(|q| p.get(q).index() as u8).collect(),
    }
}

/// Kronecker product of decompositions; γ multiplies.
pub fn tensor_decomposition(parts: &[QuasiDecomposition]) -> Result<QuasiDecomposition> {
    if parts.is_empty() {
        return Err(Error::Invalid("empty decomposition list".into()));
    }
    let all_pauli = parts.iter().all(|d| d.is_pauli_only());
    let mut acc: Vec<(f64, Vec<u8>)> = vec![(1.0, vec![])];
    for d in parts {
        let mut next = Vec::with_capacity(acc.len() * d.terms.len());
        for (e, ids) in &acc {
            for t in &d.terms {
                if t.eta == 0.0 {
                    continue;
                }
                let mut v = ids.clone();
                v.extend(as_basis_ids(&t.op));
                next.push((e * t.eta, v));
            }
        }
        acc = next;
    }
    let n = parts.iter().map(|d| d.n).sum();
    let terms = acc
        .into_iter()
        .map(|(eta, ids)| Term {
            eta,
            op: if all_pauli {
                OpId::Pauli(PauliString::from_paulis(
                    &ids.iter().map(|&i| Pauli::from_index(i as usize)).collect::<Vec<_>>(),
                ))
            } else {
                OpId::Basis(ids)
            },
        })
        .collect();
    Ok(QuasiDecomposition::new(n, terms))
}

/// PTM of one implementable operation.
pub fn op_ptm(op: &OpId) -> TransferMatrix {
    match op {
        OpId::Pauli(p) => {
            let d = 1 << (2 * p.n());
            let diag: Vec<f64> = (0..d)
                .map(|k| {
                    let pk = PauliString::from_index(p.n(), k);
                    if p.anticommutes_unchecked(&pk) {
                        -1.0
                    } else {
                        1.0
                    }
                })
                .collect();
            TransferMatrix::diagonal(p.n(), &diag)
        }
        OpId::Basis(ids) => {
            let mut m = TransferMatrix {
                n: 0,
                m: DMatrix::from_element(1, 1, 1.0),
            };
            for &k in ids {
                m = m.kron(&BASIS16[k as usize].ptm);
            }
            m
        }
    }
}

/// Sampling by inverse CDF over a fixed table.
#[derive(Debug, Clone)]
pub struct CumulativeSampler {
    cdf: Vec<f64>,
}

impl CumulativeSampler {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(cdf.len().saturating_sub(1));
        for v in cdf.iter_mut().skip(last) {
            *v = f64::INFINITY;
        }
        CumulativeSampler { cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_channel() {
        let d = invert_pauli_channel(&PauliChannel::identity(1)).unwrap();
        assert!((d.gamma - 1.0).abs() < 1e-15);
        assert!((d.terms[0].eta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_one_percent() {
        let ch = PauliChannel::xyz(0.01, 0.01, 0.01).unwrap();
        let d = invert_pauli_channel(&ch).unwrap();
        let closed = 0.5 * (-1.0 + 3.0 / (1.0 - 0.04));
        assert!((d.gamma - closed).abs() < 1e-14);
        assert!((d.gamma - 1.0625).abs() < 1e-12);
        let inv = ch.ptm().inverse().unwrap();
        assert!(d.ptm().max_abs_diff(&inv) < 1e-12);
        assert!((sampling_overhead(&d) - 1.0625f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_transform() {
        let (px, py, pz) = (1.8e-4, 1.96e-6, 1.8e-4);
        let d = invert_pauli_channel(&PauliChannel::xyz(px, py, pz).unwrap()).unwrap();
        assert!((d.gamma - gamma_closed_form_1q(px, py, pz)).abs() < 1e-14);
    }

    #[test]
    fn singular_channel() {
        let ch = PauliChannel::xyz(0.5, 0.0, 0.0).unwrap();
        assert!(matches!(invert_pauli_channel(&ch), Err(Error::Singular(_))));
    }

    #[test]
    fn basis_rank_16() {
        let mut a = DMatrix::zeros(16, 16);
        for (k, b) in BASIS16.iter().enumerate() {
            for (e, v) in b.ptm.m.iter().enumerate() {
                a[(e, k)] = *v;
            }
        }
        assert_eq!(a.rank(1e-9), 16);
    }

    #[test]
    fn basis_matches_pauli_inverse() {
        let ch = PauliChannel::xyz(0.02, 0.005, 0.01).unwrap();
        let pd = invert_pauli_channel(&ch).unwrap();
        let bd = decompose_inverse_1q(&ch.ptm().inverse().unwrap()).unwrap();
        for k in 0..16 {
            let want = if k < 4 { pd.terms[k].eta } else { 0.0 };
            assert!((bd.terms[k].eta - want).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn basis_actions_consistent_with_matrices() {
        for b in BASIS16.iter() {
            if let BasisAction::Project { proj, sign, after } = b.action {
                let p = (CMat::identity(2, 2) + pauli1(proj) * c(sign as f64, 0.0)) * c(0.5, 0.0);
                let m = pauli1(after) * p;
                assert!((m - &b.matrix).iter().all(|z| z.norm() < 1e-12), "{}", b.label);
            }
        }
    }

    #[test]
    fn tensor_gamma_multiplies() {
        let d = invert_pauli_channel(&PauliChannel::depolarizing(0.03).unwrap()).unwrap();
        let t = tensor_decomposition(&[d.clone(), d.clone()]).unwrap();
        assert!((t.gamma - d.gamma * d.gamma).abs() < 1e-14);
        assert!(t.is_pauli_only());
        let ch = PauliChannel::depolarizing(0.03).unwrap();
        let two = ch.kron(&ch);
        let prod = t.ptm().m * two.ptm().m;
        assert!((prod - DMatrix::<f64>::identity(16, 16)).abs().max() < 1e-12);
    }

    #[test]
    fn sampler_respects_zero_entries() {
        let s = CumulativeSampler::new(&[0.0, 1.0, 0.0]);
        let mut rng = rand::thread_rng();
        for _ in 0..100 {
            assert_eq!(s.sample(&mut rng), 1);
        }
    }
}
