//! Logical gate set tomography in the measurement (A_out) gauge.
//!
//! Fiducial states are {|0⟩, |1⟩, |+⟩, |+y⟩}^⊗n and fiducial observables the
//! Paulis {I, X, Y, Z}^⊗n. With `A_in` the matrix of prepared state vectors and
//! `A_out` the matrix of measured observable rows, the experiment yields
//! `g = A_out A_in` and `G̃ = A_out G A_in`. The estimate `G_est = G̃ g⁻¹ =
//! A_out G A_out⁻¹` is exact up to the gauge `A_out`, which is diagonal whenever
//! the measurement noise is a stochastic Pauli channel, so the noise of a
//! Clifford estimate stays Pauli-diagonal and its inverse needs Pauli
//! recoveries only.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::pauli::{Pauli, PauliString};
use crate::ptm::{ptm_of_unitary, TransferMatrix};
use crate::quasiprob::{invert_ptm_diagonal, OpId, PauliChannel, QuasiDecomposition};
use crate::rng::{lane, shot_rng};
use crate::stats::Moments;

/// Largest Gram condition number accepted before inversion.
pub const MAX_GRAM_CONDITION: f64 = 1e6;

/// Largest off-diagonal entry tolerated in an extracted noise PTM.
pub const MAX_OFF_DIAGONAL: f64 = 0.05;

const FIDUCIAL_1Q: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, -1.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 1.0, 0.0],
];

#[derive(Debug, Clone, PartialEq)]
pub struct FiducialSet {
    pub n: usize,
    /// Column j is the Pauli vector of preparation j.
    pub states: DMatrix<f64>,
    /// Row i is the Pauli row of observable i.
    pub observables: DMatrix<f64>,
}

impl FiducialSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(Error::Invalid("fiducial sets support 1..=3 qubits".into()));
        }
        let one = DMatrix::from_fn(4, 4, |i, j| FIDUCIAL_1Q[j][i]);
        let mut states = DMatrix::from_element(1, 1, 1.0);
        for _ in 0..n {
            states = states.kronecker(&one);
        }
        let d = 1 << (2 * n);
        Ok(FiducialSet {
            n,
            states,
            observables: DMatrix::identity(d, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.states.nrows()
    }

    pub fn is_independent(&self) -> bool {
        self.states.rank(1e-9) == self.dim() && self.observables.rank(1e-9) == self.dim()
    }
}

/// Stochastic Pauli noise on preparation (after) and measurement (before).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpamModel {
    pub prep: PauliChannel,
    pub meas: PauliChannel,
}

impl SpamModel {
    pub fn none(n: usize) -> Self {
        SpamModel {
            prep: PauliChannel::identity(n),
            meas: PauliChannel::identity(n),
        }
    }

    pub fn a_in(&self, f: &FiducialSet) -> DMatrix<f64> {
        self.prep.ptm().m * &f.states
    }

    pub fn a_out(&self, f: &FiducialSet) -> DMatrix<f64> {
        &f.observables * self.meas.ptm().m
    }
}

/// A gate under test: its ideal unitary and the true stochastic Pauli noise after it.
#[derive(Debug, Clone)]
pub struct GstGate {
    pub name: String,
    pub unitary: CMat,
    pub noise: PauliChannel,
}

impl GstGate {
    pub fn ideal_ptm(&self) -> Result<TransferMatrix> {
        ptm_of_unitary(&self.unitary, self.noise.n)
    }

    pub fn true_ptm(&self) -> Result<TransferMatrix> {
        Ok(TransferMatrix {
            n: self.noise.n,
            m: self.noise.ptm().m * self.ideal_ptm()?.m,
        })
    }
}

/// Measured matrices with per-entry binomial standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawGst {
    pub n: usize,
    pub shots: u64,
    pub gram: DMatrix<f64>,
    pub gram_se: DMatrix<f64>,
    pub gate: DMatrix<f64>,
    pub gate_se: DMatrix<f64>,
    /// Entries fixed without sampling (identity observable or structural zeros).
    pub fixed_entries: usize,
}

fn is_signed_permutation(m: &DMatrix<f64>) -> bool {
    m.row_iter().all(|r| {
        let nz: Vec<f64> = r.iter().copied().filter(|x| x.abs() > 1e-9).collect();
        nz.len() == 1 && (nz[0].abs() - 1.0).abs() < 1e-9
    })
}

fn sample_matrix<R: Rng + ?Sized>(
    exact: &DMatrix<f64>,
    structure: &DMatrix<f64>,
    clifford: bool,
    shots: u64,
    rng: &mut R,
    fixed: &mut usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (r, c) = exact.shape();
    let mut est = DMatrix::zeros(r, c);
    let mut se = DMatrix::zeros(r, c);
    for j in 0..c {
        for i in 0..r {
            if i == 0 {
                // identity observable: always +1 for trace-preserving SPAM
                est[(i, j)] = exact[(i, j)];
                *fixed += 1;
                continue;
            }
            if clifford && structure[(i, j)].abs() < 1e-12 {
                *fixed += 1;
                continue;
            }
            let p_plus = ((1.0 + exact[(i, j)]) / 2.0).clamp(0.0, 1.0);
            let k = Binomial::new(shots, p_plus)
                .map_err(|e| Error::Invalid(e.to_string()))?
                .sample(rng);
            let v = 2.0 * k as f64 / shots as f64 - 1.0;
            est[(i, j)] = v;
            se[(i, j)] = ((1.0 - v * v).max(0.0) / shots as f64).sqrt();
        }
    }
    Ok((est, se))
}

/// Simulates the GST experiments for one gate. `shots == 0` returns the exact
/// (infinite-shot) matrices.
pub fn measure_raw<R: Rng + ?Sized>(
    gate: &GstGate,
    fid: &FiducialSet,
    shots: u64,
    rng: &mut R,
    spam: &SpamModel,
) -> Result<RawGst> {
    let a_in = spam.a_in(fid);
    let a_out = spam.a_out(fid);
    let g = &a_out * &a_in;
    let ideal = gate.ideal_ptm()?;
    let gt = &a_out * gate.true_ptm()?.m * &a_in;
    let d = fid.dim();
    if shots == 0 {
        return Ok(RawGst {
            n: fid.n,
            shots,
            gram: g,
            gram_se: DMatrix::zeros(d, d),
            gate: gt,
            gate_se: DMatrix::zeros(d, d),
            fixed_entries: 2 * d * d,
        });
    }
    let clifford = is_signed_permutation(&ideal.m);
    let g_struct = &fid.observables * &fid.states;
    let gt_struct = &fid.observables * &ideal.m * &fid.states;
    let mut fixed = 0;
    let (gram, gram_se) = sample_matrix(&g, &g_struct, clifford, shots, rng, &mut fixed)?;
    let (gate_m, gate_se) = sample_matrix(&gt, &gt_struct, clifford, shots, rng, &mut fixed)?;
    Ok(RawGst {
        n: fid.n,
        shots,
        gram,
        gram_se,
        gate: gate_m,
        gate_se,
        fixed_entries: fixed,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GstEstimate {
    pub n: usize,
    pub gram: DMatrix<f64>,
    pub gram_condition: f64,
    /// `G̃ g⁻¹`.
    pub gate: DMatrix<f64>,
    /// Column j: estimated Pauli vector of preparation j (column j of g).
    pub states: DMatrix<f64>,
    /// Row i: estimated observable i (the ideal Pauli row in this gauge).
    pub observables: DMatrix<f64>,
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn estimate_gateset(raw: &RawGst) -> Result<GstEstimate> {
    let cond = condition_number(&raw.gram);
    if !(cond <= MAX_GRAM_CONDITION) {
        return Err(Error::Singular(1.0 / cond));
    }
    let inv = raw.gram.clone().try_inverse().ok_or(Error::Singular(0.0))?;
    let d = raw.gram.nrows();
    Ok(GstEstimate {
        n: raw.n,
        gram: raw.gram.clone(),
        gram_condition: cond,
        gate: &raw.gate * inv,
        states: raw.gram.clone(),
        observables: DMatrix::identity(d, d),
    })
}

impl GstEstimate {
    /// `⟨⟨O_i| G_k … G_1 |ρ_j⟩⟩` from estimated quantities.
    pub fn sequence_expectation(&self, gates: &[&DMatrix<f64>], obs: usize, prep: usize) -> f64 {
        let mut v: DVector<f64> = self.states.column(prep).into_owned();
        for g in gates {
            v = *g * v;
        }
        (self.observables.row(obs) * v)[(0, 0)]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractedChannel {
    pub probs: Vec<f64>,
    /// Diagonal of `G_est G₀⁻¹`.
    pub diagonal: Vec<f64>,
    pub off_diagonal: f64,
    /// Set when a negative estimate was clipped to zero.
    pub clipped: bool,
}

impl ExtractedChannel {
    pub fn channel(&self, n: usize) -> Result<PauliChannel> {
        PauliChannel::new(n, self.probs.clone())
    }
}

/// Noise map `G_est G₀⁻¹`, read as a stochastic Pauli channel.
pub fn extract_pauli_probs(est: &DMatrix<f64>, ideal: &TransferMatrix) -> Result<ExtractedChannel> {
    let inv = ideal.m.clone().try_inverse().ok_or(Error::Singular(0.0))?;
    let noise = TransferMatrix {
        n: ideal.n,
        m: est * inv,
    };
    let off = noise.off_diagonal_mass();
    if off > MAX_OFF_DIAGONAL {
        return Err(Error::NotPauli(off));
    }
    let diagonal: Vec<f64> = noise.m.diagonal().iter().copied().collect();
    let mut probs = PauliChannel::from_ptm_diagonal(ideal.n, &diagonal);
    let mut clipped = false;
    for p in probs.iter_mut().skip(1) {
        if *p < 0.0 {
            *p = 0.0;
            clipped = true;
        }
    }
    let err: f64 = probs[1..].iter().sum();
    probs[0] = 1.0 - err;
    Ok(ExtractedChannel {
        probs,
        diagonal,
        off_diagonal: off,
        clipped,
    })
}

/// Standard errors of extracted probabilities by parametric bootstrap over the
/// binomial entry estimates.
pub fn bootstrap_pauli_se<R: Rng + ?Sized>(
    raw: &RawGst,
    ideal: &TransferMatrix,
    reps: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let resample = |m: &DMatrix<f64>, se: &DMatrix<f64>, rng: &mut R| -> Result<DMatrix<f64>> {
        let mut out = m.clone();
        for (k, v) in out.iter_mut().enumerate() {
            // row 0 and structural zeros were never sampled
            if k % m.nrows() != 0 && (se[k] > 0.0 || *v != 0.0) {
                let p = ((1.0 + *v) / 2.0).clamp(0.0, 1.0);
                let c = Binomial::new(raw.shots, p)
                    .map_err(|e| Error::Invalid(e.to_string()))?
                    .sample(rng);
                *v = 2.0 * c as f64 / raw.shots as f64 - 1.0;
            }
        }
        Ok(out)
    };
    let d = ideal.dim();
    let mut acc = vec![Moments::default(); d];
    for _ in 0..reps {
        let r = RawGst {
            gram: resample(&raw.gram, &raw.gram_se, rng)?,
            gate: resample(&raw.gate, &raw.gate_se, rng)?,
            ..raw.clone()
        };
        let est = estimate_gateset(&r)?;
        let noise = &est.gate * ideal.m.clone().try_inverse().ok_or(Error::Singular(0.0))?;
        let diag: Vec<f64> = noise.diagonal().iter().copied().collect();
        let probs = PauliChannel::from_ptm_diagonal(ideal.n, &diag);
        for (m, p) in acc.iter_mut().zip(probs) {
            m.push(p);
        }
    }
    Ok(acc.iter().map(|m| m.sd()).collect())
}

/// Shots per GST entry for relative accuracy `r` on error rates of order `eps`:
/// `c (r eps)⁻²` in general and `c r⁻² eps⁻¹` for Clifford targets.
pub fn sample_count_for_accuracy(r: f64, eps: f64, clifford: bool, c: f64) -> Result<u64> {
    if !(r > 0.0 && eps > 0.0 && c > 0.0) {
        return Err(Error::Invalid("r, eps and c must be positive".into()));
    }
    let n = if clifford {
        c / (r * r * eps)
    } else {
        c / (r * r * eps * eps)
    };
    Ok(n.ceil() as u64)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpamPecReport {
    pub ideal: f64,
    pub unmitigated_mean: f64,
    pub unmitigated_se: f64,
    pub mitigated_mean: f64,
    pub mitigated_se: f64,
    pub gamma: f64,
    pub pauli_only: bool,
    pub shots: u64,
}

impl SpamPecReport {
    pub fn mitigated_z(&self) -> f64 {
        if self.mitigated_se > 0.0 {
            (self.mitigated_mean - self.ideal).abs() / self.mitigated_se
        } else if (self.mitigated_mean - self.ideal).abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

struct PauliSampler {
    n: usize,
    table: Vec<(PauliString, f64)>,
    sampler: crate::quasiprob::CumulativeSampler,
    gamma: f64,
}

impl PauliSampler {
    fn from_channel(ch: &PauliChannel) -> Self {
        let table = (0..ch.probs.len())
            .map(|k| (PauliString::from_index(ch.n, k), 1.0))
            .collect();
        PauliSampler {
            n: ch.n,
            table,
            sampler: ch.sampler(),
            gamma: 1.0,
        }
    }

    fn from_decomposition(dec: &QuasiDecomposition) -> Result<Self> {
        let table = dec
            .terms
            .iter()
            .map(|t| match &t.op {
                OpId::Pauli(p) => Ok((p.clone(), t.eta.signum())),
                OpId::Basis(_) => Err(Error::Invalid("Pauli-only decomposition expected".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliSampler {
            n: dec.n,
            table,
            sampler: dec.sampler(),
            gamma: dec.gamma,
        })
    }

    fn apply<R: Rng + ?Sized>(&self, st: &mut StateVector, rng: &mut R) -> Result<f64> {
        let (p, s) = &self.table[self.sampler.sample(rng)];
        if !p.is_identity() {
            st.apply_pauli(p)?;
        }
        debug_assert_eq!(p.n(), self.n);
        Ok(*s)
    }
}

/// GST-built PEC on a single-qubit circuit prepared in |0⟩ and read in Z, with
/// stochastic-Pauli SPAM. The gate recoveries invert `G_est G₀⁻¹`; a preparation
/// correction maps the estimated |0⟩ onto the ideal one. In the A_out gauge no
/// measurement correction is needed.
pub fn spam_free_pec_check(
    gates: &[GstGate],
    circuit: &[usize],
    spam: &SpamModel,
    gst_shots: u64,
    shots: u64,
    seed: u64,
) -> Result<SpamPecReport> {
    if spam.prep.n != 1 || gates.iter().any(|g| g.noise.n != 1) {
        return Err(Error::Invalid("the PEC check runs on one qubit".into()));
    }
    let fid = FiducialSet::new(1)?;
    let mut rng = shot_rng(seed, lane::AUX, u64::MAX);
    let mut recoveries = Vec::with_capacity(gates.len());
    let mut states = None;
    for g in gates {
        let raw = measure_raw(g, &fid, gst_shots, &mut rng, spam)?;
        let est = estimate_gateset(&raw)?;
        let ideal = g.ideal_ptm()?;
        let noise = &est.gate * ideal.m.clone().try_inverse().ok_or(Error::Singular(0.0))?;
        let diag: Vec<f64> = noise.diagonal().iter().copied().collect();
        recoveries.push(invert_ptm_diagonal(1, &diag)?);
        states.get_or_insert(est.states.clone());
    }
    let states = states.ok_or_else(|| Error::Invalid("no gates".into()))?;
    // estimated |0⟩ has Z component z; the X-flip inverse diag(1, 1, 1/z, 1/z) restores it
    let z = states[(3, 0)];
    let prep_fix = invert_ptm_diagonal(1, &[1.0, 1.0, z, z])?;
    let pauli_only = recoveries.iter().all(|d| d.is_pauli_only()) && prep_fix.is_pauli_only();
    let rec: Vec<PauliSampler> = recoveries
        .iter()
        .map(PauliSampler::from_decomposition)
        .collect::<Result<_>>()?;
    let fix = PauliSampler::from_decomposition(&prep_fix)?;
    let noise: Vec<PauliSampler> = gates.iter().map(|g| PauliSampler::from_channel(&g.noise)).collect();
    let prep_noise = PauliSampler::from_channel(&spam.prep);
    let meas_noise = PauliSampler::from_channel(&spam.meas);
    let mut gamma = fix.gamma;
    for &k in circuit {
        gamma *= rec.get(k).ok_or_else(|| Error::Invalid(format!("gate {k} out of range")))?.gamma;
    }

    let mut ideal_v = DVector::from_column_slice(&FIDUCIAL_1Q[0]);
    for &k in circuit {
        ideal_v = gates[k].ideal_ptm()?.m * ideal_v;
    }
    let ideal = ideal_v[3];
    let z_op = PauliString::single(1, 0, Pauli::Z);

    let mut un = Moments::default();
    let mut mit = Moments::default();
    for s in 0..shots {
        for mitigate in [false, true] {
            let mut nr = shot_rng(seed, lane::NOISE, s);
            let mut qr = shot_rng(seed, lane::QEM, s);
            let mut mr = shot_rng(seed, lane::AUX, s);
            let mut st = StateVector::new(1)?;
            let mut sign = 1.0;
            prep_noise.apply(&mut st, &mut nr)?;
            if mitigate {
                sign *= fix.apply(&mut st, &mut qr)?;
            }
            for &k in circuit {
                st.apply_unitary(&gates[k].unitary, &[0])?;
                noise[k].apply(&mut st, &mut nr)?;
                if mitigate {
                    sign *= rec[k].apply(&mut st, &mut qr)?;
                }
            }
            meas_noise.apply(&mut st, &mut nr)?;
            let out = st.measure(&z_op, &mut mr)? as f64;
            if mitigate {
                mit.push(gamma * sign * out);
            } else {
                un.push(out);
            }
        }
    }
    Ok(SpamPecReport {
        ideal,
        unmitigated_mean: un.mean,
        unmitigated_se: un.se(),
        mitigated_mean: mit.mean,
        mitigated_se: mit.se(),
        gamma,
        pauli_only,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gate(u: CMat, noise: PauliChannel) -> GstGate {
        GstGate {
            name: "g".into(),
            unitary: u,
            noise,
        }
    }

    fn spam(pp: f64, pm: f64) -> SpamModel {
        SpamModel {
            prep: PauliChannel::xyz(pp, 0.3 * pp, 0.5 * pp).unwrap(),
            meas: PauliChannel::xyz(pm, 0.2 * pm, 0.7 * pm).unwrap(),
        }
    }

    #[test]
    fn fiducials_are_independent() {
        assert!(FiducialSet::new(1).unwrap().is_independent());
        assert!(FiducialSet::new(2).unwrap().is_independent());
    }

    #[test]
    fn noiseless_analytic_estimate_is_ideal() {
        let fid = FiducialSet::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = gate(linalg::hadamard(), PauliChannel::identity(1));
        let raw = measure_raw(&g, &fid, 0, &mut rng, &SpamModel::none(1)).unwrap();
        let est = estimate_gateset(&raw).unwrap();
        assert!((&est.gate - g.ideal_ptm().unwrap().m).abs().max() < 1e-12);
        let ex = extract_pauli_probs(&est.gate, &g.ideal_ptm().unwrap()).unwrap();
        assert!(ex.probs[1..].iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn spam_only_estimate_is_a_diagonal_similarity() {
        let fid = FiducialSet::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sp = spam(0.02, 0.03);
        let g = gate(linalg::hadamard(), PauliChannel::identity(1));
        let raw = measure_raw(&g, &fid, 0, &mut rng, &sp).unwrap();
        let est = estimate_gateset(&raw).unwrap();
        let a_out = sp.a_out(&fid);
        let want = &a_out * g.ideal_ptm().unwrap().m * a_out.clone().try_inverse().unwrap();
        assert!((&est.gate - want).abs().max() < 1e-12);
        // Gram matrix is the product of the two diagonal SPAM actions
        assert!((&raw.gram - &a_out * sp.a_in(&fid)).abs().max() < 1e-12);
    }

    #[test]
    fn sequence_identity_in_the_analytic_path() {
        let fid = FiducialSet::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sp = spam(0.02, 0.01);
        let gs = [
            gate(linalg::hadamard(), PauliChannel::xyz(0.01, 0.002, 0.003).unwrap()),
            gate(linalg::s_gate(), PauliChannel::xyz(0.0, 0.001, 0.02).unwrap()),
        ];
        let ests: Vec<GstEstimate> = gs
            .iter()
            .map(|g| estimate_gateset(&measure_raw(g, &fid, 0, &mut rng, &sp).unwrap()).unwrap())
            .collect();
        let seq = [0usize, 1, 1, 0, 1];
        for prep in 0..4 {
            for obs in 0..4 {
                let mats: Vec<&DMatrix<f64>> = seq.iter().map(|&k| &ests[k].gate).collect();
                let got = ests[0].sequence_expectation(&mats, obs, prep);
                let mut v = sp.a_in(&fid).column(prep).into_owned();
                for &k in &seq {
                    v = gs[k].true_ptm().unwrap().m * v;
                }
                let want = (sp.a_out(&fid).row(obs) * v)[(0, 0)];
                assert!((got - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_gram_is_rejected() {
        let raw = RawGst {
            n: 1,
            shots: 0,
            gram: DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 1e-8, 1.0, 1.0])),
            gram_se: DMatrix::zeros(4, 4),
            gate: DMatrix::identity(4, 4),
            gate_se: DMatrix::zeros(4, 4),
            fixed_entries: 0,
        };
        assert!(estimate_gateset(&raw).is_err());
    }

    #[test]
    fn sample_count_formulas() {
        let g = sample_count_for_accuracy(0.1, 1e-3, false, 1.0).unwrap();
        let c = sample_count_for_accuracy(0.1, 1e-3, true, 1.0).unwrap();
        assert!(((c as f64 / g as f64) - 1e-3).abs() < 1e-6);
        let c2 = sample_count_for_accuracy(0.05, 1e-3, true, 1.0).unwrap();
        assert_eq!(c2, 4 * c);
    }

    #[test]
    fn recovers_known_pauli_probabilities() {
        let fid = FiducialSet::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let truth = PauliChannel::xyz(1e-3, 3e-4, 5e-4).unwrap();
        let g = gate(linalg::hadamard(), truth.clone());
        let sp = SpamModel {
            prep: PauliChannel::depolarizing(0.005).unwrap(),
            meas: PauliChannel::depolarizing(0.005).unwrap(),
        };
        let shots = sample_count_for_accuracy(0.2, 1e-3, true, 1.0).unwrap();
        let raw = measure_raw(&g, &fid, shots, &mut rng, &sp).unwrap();
        assert!(raw.fixed_entries > 0);
        let est = estimate_gateset(&raw).unwrap();
        let ideal = g.ideal_ptm().unwrap();
        let ex = extract_pauli_probs(&est.gate, &ideal).unwrap();
        let se = bootstrap_pauli_se(&raw, &ideal, 200, &mut rng).unwrap();
        assert!((ex.probs[1] - 1e-3).abs() <= 3.0 * se[1], "{} ± {}", ex.probs[1], se[1]);
    }

    #[test]
    fn spam_free_pec_is_unbiased() {
        let gs = vec![
            gate(linalg::hadamard(), PauliChannel::xyz(0.01, 0.005, 0.02).unwrap()),
            gate(linalg::s_gate(), PauliChannel::xyz(0.02, 0.0, 0.01).unwrap()),
        ];
        let sp = SpamModel {
            prep: PauliChannel::xyz(0.02, 0.0, 0.0).unwrap(),
            meas: PauliChannel::xyz(0.02, 0.0, 0.0).unwrap(),
        };
        let rep = spam_free_pec_check(&gs, &[0, 1, 1, 0], &sp, 0, 50_000, 3).unwrap();
        assert!(rep.pauli_only);
        assert!((rep.ideal + 1.0).abs() < 1e-12);
        assert!(rep.mitigated_z() < 5.0, "{rep:?}");
        assert!(rep.unmitigated_mean > rep.ideal + 5.0 * rep.unmitigated_se);
    }
}
