//! Pauli frame with probabilistic-error-cancellation bookkeeping.
//!
//! The device (backend) runs the uncorrected process; the frame `F` records the
//! Pauli that must be applied virtually, i.e. the interpreted state is
//! `F ρ_dev F†`. Every noisy logical operation samples a device error from its
//! noise channel and a recovery Pauli `P_i` from the inverse decomposition;
//! the recovery only touches the frame, together with the running cost γ and
//! the sign parity.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, ONE};
use crate::pauli::{Pauli, PauliString};
use crate::ptm::{ptm_of_channel, TransferMatrix};
use crate::quasiprob::{invert_pauli_channel, CumulativeSampler, OpId, PauliChannel, QuasiDecomposition};
use crate::stab::{conjugate, Gate, StabilizerTableau};

/// The device process.
pub trait Backend {
    fn n(&self) -> usize;
    fn append_zero(&mut self) -> Result<()>;
    /// Appends |A⟩ = T|+⟩.
    fn append_magic(&mut self) -> Result<()>;
    fn apply_gate(&mut self, g: Gate) -> Result<()>;
    fn apply_pauli(&mut self, p: &PauliString) -> Result<()>;
    fn measure_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<i8>;
}

#[derive(Debug, Clone)]
pub struct DenseBackend(pub StateVector);

impl DenseBackend {
    pub fn new(n: usize) -> Result<Self> {
        Ok(DenseBackend(StateVector::new(n)?))
    }
}

impl Backend for DenseBackend {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn append_zero(&mut self) -> Result<()> {
        self.0.append_qubit([ONE, c(0.0, 0.0)])
    }

    fn append_magic(&mut self) -> Result<()> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let w = num_complex::Complex64::from_polar(r, std::f64::consts::FRAC_PI_4);
        self.0.append_qubit([c(r, 0.0), w])
    }

    fn apply_gate(&mut self, g: Gate) -> Result<()> {
        self.0.apply_unitary(&g.matrix(), &g.qubits())
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.0.apply_pauli(p)
    }

    fn measure_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<i8> {
        self.0.measure_z(q, rng)
    }
}

#[derive(Debug, Clone)]
pub struct TableauBackend(pub StabilizerTableau);

impl TableauBackend {
    pub fn new(n: usize) -> Self {
        TableauBackend(StabilizerTableau::new(n))
    }
}

impl Backend for TableauBackend {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn append_zero(&mut self) -> Result<()> {
        self.0.append_qubit();
        Ok(())
    }

    fn append_magic(&mut self) -> Result<()> {
        Err(Error::Invalid("magic states need the dense backend".into()))
    }

    fn apply_gate(&mut self, g: Gate) -> Result<()> {
        self.0.apply_gate(g)
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.0.apply_pauli(p);
        Ok(())
    }

    fn measure_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<i8> {
        let p = PauliString::single(self.0.n(), q, Pauli::Z);
        Ok(self.0.measure_pauli(&p, rng)?.outcome)
    }
}

/// A noise channel together with its sampling tables and inverse decomposition.
#[derive(Debug, Clone)]
pub struct NoisyOp {
    pub noise: PauliChannel,
    pub dec: QuasiDecomposition,
    noise_sampler: CumulativeSampler,
    qem_sampler: CumulativeSampler,
    recoveries: Vec<PauliString>,
}

impl NoisyOp {
    /// Noise with exact inverse.
    pub fn new(noise: PauliChannel) -> Result<Self> {
        let dec = invert_pauli_channel(&noise)?;
        Self::with_decomposition(noise, dec)
    }

    /// Noise on the device with an independently chosen decomposition
    /// (e.g. built from a mis-estimated channel).
    pub fn with_decomposition(noise: PauliChannel, dec: QuasiDecomposition) -> Result<Self> {
        if dec.n != noise.n {
            return Err(Error::SizeMismatch(dec.n, noise.n));
        }
        let recoveries = dec
            .terms
            .iter()
            .map(|t| match &t.op {
                OpId::Pauli(p) => Ok(p.clone()),
                OpId::Basis(_) => Err(Error::Invalid("frame recoveries must be Pauli".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NoisyOp {
            noise_sampler: noise.sampler(),
            qem_sampler: dec.sampler(),
            noise,
            dec,
            recoveries,
        })
    }

    pub fn noiseless(n: usize) -> Self {
        Self::new(PauliChannel::identity(n)).expect("identity channel")
    }

    pub fn n(&self) -> usize {
        self.noise.n
    }
}

/// Embeds a k-qubit Pauli onto `qubits` of an n-qubit register.
pub fn embed_pauli(p: &PauliString, qubits: &[usize], n: usize) -> PauliString {
    let mut out = PauliString::identity(n);
    for (k, &q) in qubits.iter().enumerate() {
        out.set(q, p.get(k));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub step: usize,
    pub op: String,
    pub noise: String,
    pub qem_index: usize,
    pub outcome: Option<i8>,
}

/// When to apply recovery Paulis: immediately into the frame, or kept aside,
/// commuted through later Cliffords and folded in at the next measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum RecoveryMode {
    #[default]
    Immediate,
    Deferred,
}

/// Per-shot state: frame, accumulated cost, sign parity and optional history.
#[derive(Debug, Clone)]
pub struct FrameState<B: Backend> {
    pub backend: B,
    pub frame: PauliString,
    pending: PauliString,
    pub gamma: f64,
    pub parity: i8,
    pub history: Option<Vec<HistoryEntry>>,
    pub mode: RecoveryMode,
    /// When false, recoveries are not sampled (plain FTQC without mitigation).
    pub mitigate: bool,
    measured: Vec<bool>,
    step: usize,
}

impl<B: Backend> FrameState<B> {
    pub fn new(backend: B) -> Self {
        let n = backend.n();
        FrameState {
            backend,
            frame: PauliString::identity(n),
            pending: PauliString::identity(n),
            gamma: 1.0,
            parity: 1,
            history: None,
            mode: RecoveryMode::Immediate,
            mitigate: true,
            measured: vec![false; n],
            step: 0,
        }
    }

    pub fn with_history(mut self) -> Self {
        self.history = Some(Vec::new());
        self
    }

    pub fn with_mode(mut self, mode: RecoveryMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn n(&self) -> usize {
        self.backend.n()
    }

    /// Frame including recoveries not yet folded in.
    pub fn effective_frame(&self) -> PauliString {
        let mut f = self.frame.clone();
        f.mul_assign_right(&self.pending);
        f
    }

    fn live(&self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            if q >= self.n() {
                return Err(Error::Invalid(format!("qubit {q} does not exist")));
            }
            if self.measured[q] {
                return Err(Error::Invalid(format!("qubit {q} was already measured")));
            }
        }
        Ok(())
    }

    fn log(&mut self, op: String, noise: &PauliString, qem_index: usize, outcome: Option<i8>) {
        let step = self.step;
        self.step += 1;
        if let Some(h) = &mut self.history {
            h.push(HistoryEntry {
                step,
                op,
                noise: noise.to_string(),
                qem_index,
                outcome,
            });
        }
    }

    fn grow(&mut self) {
        let n = self.backend.n();
        self.frame = self.frame.extended(n);
        self.pending = self.pending.extended(n);
        self.measured.push(false);
    }

    /// Device noise plus sampled recovery on `qubits`.
    fn noise_and_recovery(
        &mut self,
        op: &NoisyOp,
        qubits: &[usize],
        noise_rng: &mut dyn RngCore,
        qem_rng: &mut dyn RngCore,
    ) -> Result<(PauliString, usize)> {
        if op.n() != qubits.len() {
            return Err(Error::SizeMismatch(op.n(), qubits.len()));
        }
        let n = self.n();
        let e_idx = op.noise_sampler.sample(noise_rng);
        let e = embed_pauli(&PauliString::from_index(op.n(), e_idx), qubits, n);
        if e_idx != 0 {
            self.backend.apply_pauli(&e)?;
        }
        if !self.mitigate {
            return Ok((e, 0));
        }
        let i = op.qem_sampler.sample(qem_rng);
        let rec = embed_pauli(&op.recoveries[i], qubits, n);
        match self.mode {
            RecoveryMode::Immediate => self.frame.mul_assign_right(&rec),
            RecoveryMode::Deferred => self.pending.mul_assign_right(&rec),
        }
        self.gamma *= op.dec.gamma;
        if op.dec.terms[i].eta < 0.0 {
            self.parity = -self.parity;
        }
        Ok((e, i))
    }

    pub fn init_zero(&mut self, op: &NoisyOp, noise_rng: &mut dyn RngCore, qem_rng: &mut dyn RngCore) -> Result<usize> {
        self.backend.append_zero()?;
        self.grow();
        let q = self.n() - 1;
        let (e, i) = self.noise_and_recovery(op, &[q], noise_rng, qem_rng)?;
        self.log(format!("INIT0 {q}"), &e, i, None);
        Ok(q)
    }

    pub fn init_magic(&mut self, op: &NoisyOp, noise_rng: &mut dyn RngCore, qem_rng: &mut dyn RngCore) -> Result<usize> {
        self.backend.append_magic()?;
        self.grow();
        let q = self.n() - 1;
        let (e, i) = self.noise_and_recovery(op, &[q], noise_rng, qem_rng)?;
        self.log(format!("INITA {q}"), &e, i, None);
        Ok(q)
    }

    /// Pauli by software update: frame only.
    pub fn apply_pauli_software(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.n() {
            return Err(Error::SizeMismatch(p.n(), self.n()));
        }
        self.frame = p.mul(&self.frame)?;
        self.log(format!("PAULI_SW {p}"), &PauliString::identity(self.n()), 0, None);
        Ok(())
    }

    /// Pauli applied on the device.
    pub fn apply_pauli_hardware(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.n() {
            return Err(Error::SizeMismatch(p.n(), self.n()));
        }
        self.backend.apply_pauli(p)?;
        self.log(format!("PAULI_HW {p}"), &PauliString::identity(self.n()), 0, None);
        Ok(())
    }

    /// Clifford gate followed by its decoding noise and a sampled recovery.
    pub fn apply_clifford(
        &mut self,
        g: Gate,
        op: &NoisyOp,
        noise_rng: &mut dyn RngCore,
        qem_rng: &mut dyn RngCore,
    ) -> Result<()> {
        let qs = g.qubits();
        self.live(&qs)?;
        self.backend.apply_gate(g)?;
        conjugate(&mut self.frame, g);
        conjugate(&mut self.pending, g);
        let (e, i) = self.noise_and_recovery(op, &qs, noise_rng, qem_rng)?;
        self.log(g.mnemonic(), &e, i, None);
        Ok(())
    }

    fn flush(&mut self) {
        if self.mode == RecoveryMode::Deferred {
            let n = self.n();
            let p = std::mem::replace(&mut self.pending, PauliString::identity(n));
            self.frame.mul_assign_right(&p);
        }
    }

    /// Device Z measurement reinterpreted through the frame; the frame's entry on
    /// the measured qubit is discarded.
    pub fn measure_logical_z(&mut self, q: usize, rng: &mut dyn RngCore) -> Result<i8> {
        self.live(&[q])?;
        self.flush();
        let raw = self.backend.measure_z(q, rng)?;
        let out = if self.frame.x_bit(q) { -raw } else { raw };
        self.frame.set(q, Pauli::I);
        self.measured[q] = true;
        self.log(format!("MZ {q}"), &PauliString::identity(self.n()), 0, Some(out));
        Ok(out)
    }

    /// T gate by teleportation through a (noisy, mitigated) magic state:
    /// CNOT from the target onto |A⟩, Z measurement of the magic register, and
    /// an S correction when the reinterpreted outcome is 1.
    pub fn teleport_t(
        &mut self,
        target: usize,
        magic: &NoisyOp,
        noise_rng: &mut dyn RngCore,
        qem_rng: &mut dyn RngCore,
        meas_rng: &mut dyn RngCore,
    ) -> Result<i8> {
        self.live(&[target])?;
        let m = self.init_magic(magic, noise_rng, qem_rng)?;
        let cx = Gate::Cnot(target, m);
        self.backend.apply_gate(cx)?;
        conjugate(&mut self.frame, cx);
        conjugate(&mut self.pending, cx);
        let out = self.measure_logical_z(m, meas_rng)?;
        if out == -1 {
            self.backend.apply_gate(Gate::S(target))?;
            conjugate(&mut self.frame, Gate::S(target));
            conjugate(&mut self.pending, Gate::S(target));
        }
        Ok(out)
    }

    /// `γ · s · raw`.
    pub fn mitigated_outcome(&self, raw: f64) -> f64 {
        mitigated_outcome(self.gamma, self.parity, raw)
    }
}

pub fn mitigated_outcome(gamma: f64, parity: i8, raw: f64) -> f64 {
    gamma * parity as f64 * raw
}

/// Average of `P N P†` over a set of Paulis (PTM picture).
pub fn twirl_channel(noise: &TransferMatrix, paulis: &[PauliString]) -> Result<TransferMatrix> {
    if paulis.is_empty() {
        return Err(Error::Invalid("empty twirling set".into()));
    }
    let d = noise.dim();
    let mut acc = nalgebra::DMatrix::zeros(d, d);
    for p in paulis {
        if p.n() != noise.n {
            return Err(Error::SizeMismatch(p.n(), noise.n));
        }
        let pm = crate::quasiprob::op_ptm(&OpId::Pauli(p.clone()));
        acc += &pm.m * &noise.m * &pm.m;
    }
    Ok(TransferMatrix {
        n: noise.n,
        m: acc / paulis.len() as f64,
    })
}

/// Stochastic Pauli channel obtained by twirling over the full Pauli group.
pub fn twirl_to_pauli_channel(noise: &TransferMatrix) -> Result<PauliChannel> {
    let n = noise.n;
    let diag: Vec<f64> = (0..noise.dim()).map(|k| noise.m[(k, k)]).collect();
    let probs: Vec<f64> = PauliChannel::from_ptm_diagonal(n, &diag)
        .into_iter()
        .map(|p| if p.abs() < 1e-15 { 0.0 } else { p })
        .collect();
    let s: f64 = probs.iter().sum();
    PauliChannel::new(n, probs.iter().map(|p| p / s).collect())
}

/// PTM of a coherent error `exp(iθ P)` for a single-qubit Pauli P.
pub fn coherent_error_ptm(theta: f64, p: Pauli) -> TransferMatrix {
    let m: CMat = CMat::identity(2, 2) * c(theta.cos(), 0.0) + crate::linalg::pauli1(p) * c(0.0, theta.sin());
    ptm_of_channel(&[m], 1).expect("2x2 unitary")
}

/// Logical program operations.
#[derive(Debug, Clone, PartialEq)]
pub enum LogicalOp {
    Init0(usize),
    InitA(usize),
    Gate(Gate),
    PauliSw(PauliString),
    PauliHw(PauliString),
    Mz(usize),
    TGate(usize),
}

/// Line-oriented logical program: `INIT0 q`, `INITA q`, gate lines (`H 0`,
/// `CNOT 0 1`, …), `PAULI_SW XIZ`, `PAULI_HW XIZ`, `MZ q`, `TGATE q`.
/// `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogicalProgram {
    pub ops: Vec<LogicalOp>,
}

impl LogicalProgram {
    pub fn parse(text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        let mut n = 0usize;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let head = it.next().unwrap_or("").to_ascii_uppercase();
            let arg = it.next();
            let bad = |m: &str| Error::Config(format!("line {}: {m}", ln + 1));
            let qubit = |a: Option<&str>| -> Result<usize> {
                a.and_then(|s| s.parse().ok()).ok_or_else(|| bad("expected a qubit index"))
            };
            let op = match head.as_str() {
                "INIT0" | "INITA" => {
                    let q = qubit(arg)?;
                    if q != n {
                        return Err(bad("qubits must be allocated in order"));
                    }
                    n += 1;
                    if head == "INIT0" {
                        LogicalOp::Init0(q)
                    } else {
                        LogicalOp::InitA(q)
                    }
                }
                "MZ" => LogicalOp::Mz(qubit(arg)?),
                "TGATE" => {
                    // the consumed magic register takes the next index
                    n += 1;
                    LogicalOp::TGate(qubit(arg)?)
                }
                "PAULI_SW" | "PAULI_HW" => {
                    let p: PauliString = arg.ok_or_else(|| bad("expected a Pauli string"))?.parse()?;
                    if head == "PAULI_SW" {
                        LogicalOp::PauliSw(p)
                    } else {
                        LogicalOp::PauliHw(p)
                    }
                }
                _ => LogicalOp::Gate(Gate::parse(line).map_err(|e| bad(&e.to_string()))?),
            };
            ops.push(op);
        }
        Ok(LogicalProgram { ops })
    }

    /// Register size including consumed magic registers.
    pub fn n_qubits(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, LogicalOp::Init0(_) | LogicalOp::InitA(_) | LogicalOp::TGate(_)))
            .count()
    }
}

/// Noise bound to each kind of logical operation.
#[derive(Debug, Clone)]
pub struct NoiseBinding {
    pub init: NoisyOp,
    pub gate1: NoisyOp,
    pub gate2: NoisyOp,
    pub magic: NoisyOp,
}

impl NoiseBinding {
    pub fn noiseless() -> Self {
        NoiseBinding {
            init: NoisyOp::noiseless(1),
            gate1: NoisyOp::noiseless(1),
            gate2: NoisyOp::noiseless(2),
            magic: NoisyOp::noiseless(1),
        }
    }
}

/// Three independent streams for one shot.
pub struct ShotStreams<'a> {
    pub noise: &'a mut dyn RngCore,
    pub qem: &'a mut dyn RngCore,
    pub meas: &'a mut dyn RngCore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotResult {
    /// Reinterpreted outcomes of the program's `MZ` operations, in order.
    pub outcomes: Vec<i8>,
    pub gamma: f64,
    pub parity: i8,
}

impl ShotResult {
    /// Product of all reported outcomes.
    pub fn raw(&self) -> f64 {
        self.outcomes.iter().map(|&o| o as f64).product()
    }

    pub fn mitigated(&self) -> f64 {
        mitigated_outcome(self.gamma, self.parity, self.raw())
    }
}

pub fn run_program<B: Backend>(
    prog: &LogicalProgram,
    noise: &NoiseBinding,
    fs: &mut FrameState<B>,
    s: ShotStreams<'_>,
) -> Result<ShotResult> {
    let mut outcomes = Vec::new();
    for op in &prog.ops {
        match op {
            LogicalOp::Init0(_) => {
                fs.init_zero(&noise.init, s.noise, s.qem)?;
            }
            LogicalOp::InitA(_) => {
                fs.init_magic(&noise.magic, s.noise, s.qem)?;
            }
            LogicalOp::Gate(g) => {
                let op = if g.qubits().len() == 2 { &noise.gate2 } else { &noise.gate1 };
                fs.apply_clifford(*g, op, s.noise, s.qem)?;
            }
            LogicalOp::PauliSw(p) => fs.apply_pauli_software(&p.extended(fs.n()))?,
            LogicalOp::PauliHw(p) => fs.apply_pauli_hardware(&p.extended(fs.n()))?,
            LogicalOp::Mz(q) => outcomes.push(fs.measure_logical_z(*q, s.meas)?),
            LogicalOp::TGate(q) => {
                fs.teleport_t(*q, &noise.magic, s.noise, s.qem, s.meas)?;
            }
        }
    }
    Ok(ShotResult {
        outcomes,
        gamma: fs.gamma,
        parity: fs.parity,
    })
}

/// Noiseless expectation of the product of Z on the measured qubits, with T
/// applied directly (dense oracle).
pub fn ideal_expectation(prog: &LogicalProgram) -> Result<f64> {
    let mut st = StateVector::new(0)?;
    let mut measured = Vec::new();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for op in &prog.ops {
        match op {
            LogicalOp::Init0(_) => st.append_qubit([ONE, c(0.0, 0.0)])?,
            LogicalOp::InitA(_) => st.append_qubit([c(r, 0.0), num_complex::Complex64::from_polar(r, std::f64::consts::FRAC_PI_4)])?,
            LogicalOp::Gate(g) => st.apply_unitary(&g.matrix(), &g.qubits())?,
            LogicalOp::PauliSw(p) | LogicalOp::PauliHw(p) => st.apply_pauli(&p.extended(st.n()))?,
            LogicalOp::Mz(q) => measured.push(*q),
            LogicalOp::TGate(q) => {
                st.apply_unitary(&crate::linalg::t_gate(), &[*q])?;
                st.append_qubit([ONE, c(0.0, 0.0)])?;
            }
        }
    }
    let mut obs = PauliString::identity(st.n());
    for q in measured {
        obs.set(q, Pauli::Z);
    }
    st.expectation(&obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::shot_rng;
    use crate::stats::Moments;

    fn streams(seed: u64, shot: u64) -> [crate::rng::ShotRng; 3] {
        [shot_rng(seed, 0, shot), shot_rng(seed, 1, shot), shot_rng(seed, 2, shot)]
    }

    fn run(prog: &LogicalProgram, noise: &NoiseBinding, seed: u64, shot: u64, mode: RecoveryMode, mitigate: bool) -> ShotResult {
        let [mut a, mut b, mut m] = streams(seed, shot);
        let mut fs = FrameState::new(DenseBackend::new(0).unwrap()).with_mode(mode);
        fs.mitigate = mitigate;
        run_program(
            prog,
            noise,
            &mut fs,
            ShotStreams {
                noise: &mut a,
                qem: &mut b,
                meas: &mut m,
            },
        )
        .unwrap()
    }

    fn binding(p: f64) -> NoiseBinding {
        let ch1 = PauliChannel::xyz(p * 0.5, p * 0.2, p * 0.3).unwrap();
        let ch2 = PauliChannel::depolarizing(p).unwrap().kron(&PauliChannel::depolarizing(p / 2.0).unwrap());
        NoiseBinding {
            init: NoisyOp::new(ch1.clone()).unwrap(),
            gate1: NoisyOp::new(ch1.clone()).unwrap(),
            gate2: NoisyOp::new(ch2).unwrap(),
            magic: NoisyOp::new(PauliChannel::xyz(p, 0.0, p).unwrap()).unwrap(),
        }
    }

    #[test]
    fn software_pauli_flips_readout_and_is_involutive() {
        let mut rng = shot_rng(1, 0, 0);
        let mut fs = FrameState::new(DenseBackend::new(1).unwrap());
        let x = PauliString::single(1, 0, Pauli::X);
        fs.apply_pauli_software(&x).unwrap();
        fs.apply_pauli_software(&x).unwrap();
        assert!(fs.frame.is_identity());
        fs.apply_pauli_software(&x).unwrap();
        assert_eq!(fs.measure_logical_z(0, &mut rng).unwrap(), -1);
        let mut fs = FrameState::new(DenseBackend::new(1).unwrap());
        fs.apply_pauli_software(&PauliString::single(1, 0, Pauli::Z)).unwrap();
        assert_eq!(fs.measure_logical_z(0, &mut rng).unwrap(), 1);
    }

    #[test]
    fn software_and_hardware_paulis_agree() {
        let prog_sw = LogicalProgram::parse("INIT0 0\nINIT0 1\nH 0\nPAULI_SW YX\nCNOT 0 1\nS 1\nH 1\nMZ 0\nMZ 1").unwrap();
        let prog_hw = LogicalProgram::parse("INIT0 0\nINIT0 1\nH 0\nPAULI_HW YX\nCNOT 0 1\nS 1\nH 1\nMZ 0\nMZ 1").unwrap();
        let nb = NoiseBinding::noiseless();
        let mut a = Moments::default();
        let mut b = Moments::default();
        for shot in 0..4000 {
            a.push(run(&prog_sw, &nb, 3, shot, RecoveryMode::Immediate, true).raw());
            b.push(run(&prog_hw, &nb, 3, shot, RecoveryMode::Immediate, true).raw());
        }
        assert!((a.mean - b.mean).abs() < 5.0 * (a.se().powi(2) + b.se().powi(2)).sqrt() + 1e-9);
        assert!((a.mean - ideal_expectation(&prog_hw).unwrap()).abs() < 5.0 * a.se() + 1e-9);
    }

    #[test]
    fn teleported_t_matches_direct_t() {
        let mut branches = [0usize; 2];
        for shot in 0..2000 {
            let [mut a, mut b, mut m] = streams(8, shot);
            let mut fs = FrameState::new(DenseBackend::new(1).unwrap());
            fs.backend.apply_gate(Gate::H(0)).unwrap();
            let out = fs.teleport_t(0, &NoisyOp::noiseless(1), &mut a, &mut b, &mut m).unwrap();
            branches[(out == -1) as usize] += 1;
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let x = fs.backend.0.expectation(&PauliString::single(2, 0, Pauli::X)).unwrap();
            let y = fs.backend.0.expectation(&PauliString::single(2, 0, Pauli::Y)).unwrap();
            assert!((x - r).abs() < 1e-10 && (y - r).abs() < 1e-10);
        }
        let frac = branches[0] as f64 / 2000.0;
        assert!((frac - 0.5).abs() < 4.0 * (0.25f64 / 2000.0).sqrt());
    }

    #[test]
    fn mitigation_removes_bias_and_off_keeps_it() {
        let prog = LogicalProgram::parse("INIT0 0\nINIT0 1\nH 0\nCNOT 0 1\nS 0\nH 1\nS 1\nTGATE 0\nH 0\nMZ 0\nMZ 1").unwrap();
        let ideal = ideal_expectation(&prog).unwrap();
        let nb = binding(0.05);
        let mut on = Moments::default();
        let mut off = Moments::default();
        for shot in 0..30_000 {
            on.push(run(&prog, &nb, 11, shot, RecoveryMode::Immediate, true).mitigated());
            off.push(run(&prog, &nb, 11, shot, RecoveryMode::Immediate, false).raw());
        }
        assert!((on.mean - ideal).abs() < 5.0 * on.se(), "{} vs {ideal}", on.mean);
        assert!((off.mean - ideal).abs() > 5.0 * off.se());
    }

    #[test]
    fn deferred_recovery_is_bit_identical() {
        let prog = LogicalProgram::parse("INIT0 0\nINIT0 1\nINIT0 2\nH 0\nCNOT 0 2\nS 2\nTGATE 2\nCNOT 2 1\nH 1\nMZ 0\nMZ 1\nMZ 2").unwrap();
        let nb = binding(0.1);
        for shot in 0..500 {
            let a = run(&prog, &nb, 21, shot, RecoveryMode::Immediate, true);
            let b = run(&prog, &nb, 21, shot, RecoveryMode::Deferred, true);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn history_and_cost() {
        let mut fs = FrameState::new(DenseBackend::new(1).unwrap()).with_history();
        let op = NoisyOp::new(PauliChannel::depolarizing(0.03).unwrap()).unwrap();
        let mut r = shot_rng(0, 0, 0);
        let mut q = shot_rng(0, 1, 0);
        for _ in 0..3 {
            fs.apply_clifford(Gate::H(0), &op, &mut r, &mut q).unwrap();
        }
        assert!((fs.gamma - op.dec.gamma.powi(3)).abs() < 1e-12);
        assert_eq!(fs.history.as_ref().unwrap().len(), 3);
        assert!((mitigated_outcome(1.0625, -1, 1.0) + 1.0625).abs() < 1e-15);
        let noiseless = NoisyOp::noiseless(1);
        let mut fs = FrameState::new(TableauBackend::new(1));
        fs.apply_clifford(Gate::H(0), &noiseless, &mut r, &mut q).unwrap();
        assert_eq!(fs.gamma, 1.0);
    }

    #[test]
    fn twirl_diagonalises_coherent_error() {
        let m = coherent_error_ptm(0.1, Pauli::X);
        let all: Vec<PauliString> = (0..4).map(|k| PauliString::from_index(1, k)).collect();
        let t = twirl_channel(&m, &all).unwrap();
        assert!(t.off_diagonal_mass() < 1e-12);
        for k in 0..4 {
            assert!((t.m[(k, k)] - m.m[(k, k)]).abs() < 1e-12);
        }
        let ch = twirl_to_pauli_channel(&t).unwrap();
        assert!((ch.probs[1] - 0.1f64.sin().powi(2)).abs() < 1e-12);
        let stoch = PauliChannel::xyz(0.01, 0.02, 0.03).unwrap().ptm();
        assert!(twirl_channel(&stoch, &all).unwrap().max_abs_diff(&stoch) < 1e-14);
    }

    #[test]
    fn program_parse_errors() {
        assert!(LogicalProgram::parse("INIT0 1").is_err());
        assert!(LogicalProgram::parse("INIT0 0\nFOO 0").is_err());
        let p = LogicalProgram::parse("INIT0 0 # comment\nTGATE 0\nINIT0 2\nMZ 2").unwrap();
        assert_eq!(p.n_qubits(), 3);
    }
}
