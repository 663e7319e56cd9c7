//! Decision problems as expectation values, and bisection on their answers.
//!
//! Measuring outcome bits `x` and computing a classical bit `f(x)` is the
//! same as a dephasing process followed by a Z readout of a qubit holding
//! `f(x)`. With the convention `⟨Z⟩ = 2 Pr[f(x) = 1] − 1`, error cancellation
//! applies to the decision exactly as to any other expectation value.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};
use crate::pauli::{Pauli, PauliString};
use crate::quasiprob::{invert_pauli_channel, CumulativeSampler, OpId, PauliChannel, QuasiDecomposition};
use crate::rng::{lane, mix, shot_rng};
use crate::stats::Moments;

/// A classical predicate on outcome bits read as a ±1 observable.
pub struct DecisionExpectation<F> {
    f: F,
}

/// `value(x) = +1` if `f(x)` holds, else `−1`.
pub fn wrap_decision_as_expectation<F: Fn(&[bool]) -> bool>(f: F) -> DecisionExpectation<F> {
    DecisionExpectation { f }
}

impl<F: Fn(&[bool]) -> bool> DecisionExpectation<F> {
    pub fn value(&self, bits: &[bool]) -> f64 {
        if (self.f)(bits) {
            1.0
        } else {
            -1.0
        }
    }

    /// Exact `⟨Z⟩` from a distribution over basis states of `n` measured bits.
    pub fn expectation_from_distribution(&self, probs: &[f64], n: usize) -> f64 {
        probs
            .iter()
            .enumerate()
            .map(|(x, p)| p * self.value(&index_bits(x, n)))
            .sum()
    }
}

/// Bits of `x` with bit 0 the most significant of `n`.
pub fn index_bits(x: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| (x >> (n - 1 - j)) & 1 == 1).collect()
}

fn bits_value(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Small dense circuit with a single-qubit Pauli channel on every qubit an
/// operation touches, measured in Z on `measured`.
#[derive(Debug, Clone)]
pub struct NoisyDenseCircuit {
    pub init: StateVector,
    pub ops: Vec<(CMat, Vec<usize>)>,
    pub noise: PauliChannel,
    pub measured: Vec<usize>,
    dec: QuasiDecomposition,
    noise_sampler: CumulativeSampler,
    qem_sampler: CumulativeSampler,
    paulis: [PauliString; 4],
}

impl NoisyDenseCircuit {
    pub fn new(init: StateVector, ops: Vec<(CMat, Vec<usize>)>, noise: PauliChannel, measured: Vec<usize>) -> Result<Self> {
        if noise.n != 1 {
            return Err(Error::Invalid("noise must be a single-qubit channel".into()));
        }
        let n = init.n();
        if measured.iter().chain(ops.iter().flat_map(|o| o.1.iter())).any(|&q| q >= n) {
            return Err(Error::Invalid("qubit index out of range".into()));
        }
        let dec = invert_pauli_channel(&noise)?;
        Ok(NoisyDenseCircuit {
            noise_sampler: noise.sampler(),
            qem_sampler: dec.sampler(),
            paulis: [0, 1, 2, 3].map(|k| PauliString::from_index(1, k)),
            init,
            ops,
            noise,
            measured,
            dec,
        })
    }

    pub fn locations(&self) -> usize {
        self.ops.iter().map(|o| o.1.len()).sum()
    }

    /// Cost of the full mitigated circuit.
    pub fn gamma_tot(&self) -> f64 {
        self.dec.gamma.powi(self.locations() as i32)
    }

    fn single(&self, n: usize, q: usize, k: usize) -> PauliString {
        PauliString::single(n, q, self.paulis[k].get(0))
    }

    /// One shot: measured bits and the mitigation weight (`γ_tot` × sign, or 1).
    pub fn shot<R: Rng + ?Sized>(&self, mitigate: bool, noise_rng: &mut R, qem_rng: &mut R, meas_rng: &mut R) -> Result<(Vec<bool>, f64)> {
        let mut st = self.init.clone();
        let n = st.n();
        let mut sign = 1.0;
        for (u, qs) in &self.ops {
            st.apply_unitary(u, qs)?;
            for &q in qs {
                let k = self.noise_sampler.sample(noise_rng);
                if k != 0 {
                    st.apply_pauli(&self.single(n, q, k))?;
                }
                if mitigate {
                    let t = &self.dec.terms[self.qem_sampler.sample(qem_rng)];
                    sign *= t.eta.signum();
                    if let OpId::Pauli(p) = &t.op {
                        if !p.is_identity() {
                            st.apply_pauli(&PauliString::single(n, q, p.get(0)))?;
                        }
                    }
                }
            }
        }
        let x = sample_basis(&st, meas_rng);
        let all = index_bits(x, n);
        let bits: Vec<bool> = self.measured.iter().map(|&q| all[q]).collect();
        Ok((bits, if mitigate { self.gamma_tot() * sign } else { 1.0 }))
    }

    /// Noiseless outcome distribution over the measured bits.
    pub fn ideal_distribution(&self) -> Result<Vec<f64>> {
        let mut st = self.init.clone();
        for (u, qs) in &self.ops {
            st.apply_unitary(u, qs)?;
        }
        let n = st.n();
        let m = self.measured.len();
        let mut out = vec![0.0; 1 << m];
        for (x, a) in st.amplitudes().iter().enumerate() {
            let all = index_bits(x, n);
            let bits: Vec<bool> = self.measured.iter().map(|&q| all[q]).collect();
            out[bits_value(&bits)] += a.norm_sqr();
        }
        Ok(out)
    }
}

fn sample_basis<R: Rng + ?Sized>(st: &StateVector, rng: &mut R) -> usize {
    let u: f64 = rng.gen::<f64>() * st.norm_sqr();
    let mut acc = 0.0;
    let amps = st.amplitudes();
    for (x, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if u < acc {
            return x;
        }
    }
    amps.len() - 1
}

/// Sequential decision rule: draw shots in batches until a one-sided
/// Hoeffding bound at `1 − delta` separates the mean from zero, or the budget
/// runs out (then the sign of the mean decides).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecisionRule {
    pub delta: f64,
    pub batch: u64,
    pub budget: u64,
}

impl Default for DecisionRule {
    fn default() -> Self {
        DecisionRule {
            delta: 0.01,
            batch: 100,
            budget: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub answer: bool,
    pub mean: f64,
    pub shots: u64,
    /// True if the bound separated the mean from zero before the budget ran out.
    pub confident: bool,
}

impl DecisionRule {
    /// `sample(i)` returns the i-th weighted ±1 value, bounded by `range` in magnitude.
    pub fn decide<S: FnMut(u64) -> Result<f64>>(&self, range: f64, mut sample: S) -> Result<Decision> {
        if !(self.delta > 0.0 && self.delta < 1.0) || self.batch == 0 || self.budget == 0 {
            return Err(Error::Config("decision rule needs 0 < delta < 1 and positive batch/budget".into()));
        }
        let mut m = Moments::default();
        let log = (1.0 / self.delta).ln();
        while m.n < self.budget {
            let end = (m.n + self.batch).min(self.budget);
            for i in m.n..end {
                m.push(sample(i)?);
            }
            let bound = range * (2.0 * log / m.n as f64).sqrt();
            if m.mean.abs() > bound {
                return Ok(Decision {
                    answer: m.mean > 0.0,
                    mean: m.mean,
                    shots: m.n,
                    confident: true,
                });
            }
        }
        Ok(Decision {
            answer: m.mean > 0.0,
            mean: m.mean,
            shots: m.n,
            confident: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionResult {
    pub lo: f64,
    pub hi: f64,
    pub iterations: u32,
    /// Queried thresholds and the answers to "is the energy ≤ K?".
    pub queries: Vec<(f64, bool)>,
}

impl BisectionResult {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lo <= e && e <= self.hi
    }
}

/// Bisection for the smallest energy `E` with `oracle(K) = [E ≤ K]`.
/// `resolution` is how far from the threshold the oracle may err; the
/// returned interval is padded by it and has width ≤ `eps`.
pub fn bisection_energy_search<O: FnMut(f64) -> Result<bool>>(
    mut oracle: O,
    e_min: f64,
    e_max: f64,
    eps: f64,
    resolution: f64,
) -> Result<BisectionResult> {
    if !(e_min < e_max) || !(resolution >= 0.0) || !(eps > 2.0 * resolution) {
        return Err(Error::Invalid("need e_min < e_max and eps > 2·resolution ≥ 0".into()));
    }
    let (mut lo, mut hi) = (e_min, e_max);
    let mut queries = Vec::new();
    let mut iterations = 0;
    while hi - lo + 2.0 * resolution > eps {
        let k = 0.5 * (lo + hi);
        let yes = oracle(k)?;
        queries.push((k, yes));
        if yes {
            hi = k;
        } else {
            lo = k;
        }
        iterations += 1;
    }
    // every energy is ≤ e_max; a "yes" below a "no" (beyond the oracle
    // resolution) means the oracle is not monotone
    let top = oracle(e_max)?;
    queries.push((e_max, top));
    if !top {
        return Err(Error::Invalid(format!("oracle inconsistency: energy above the upper bound {e_max}")));
    }
    for &(ky, y) in &queries {
        for &(kn, n) in &queries {
            if y && !n && kn > ky + 2.0 * resolution {
                return Err(Error::Invalid(format!(
                    "oracle inconsistency: yes at {ky:.4} but no at {kn:.4}"
                )));
            }
        }
    }
    Ok(BisectionResult {
        lo: (lo - resolution).max(e_min),
        hi: (hi + resolution).min(e_max),
        iterations,
        queries,
    })
}

/// `⌈log₂(range / (eps − 2·resolution))⌉`.
pub fn expected_iterations(range: f64, eps: f64, resolution: f64) -> u32 {
    let r = range / (eps - 2.0 * resolution);
    if r <= 1.0 {
        0
    } else {
        r.log2().ceil() as u32
    }
}

/// Phase-estimation oracle for "is the ground energy of `H` at most K?".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QpeConfig {
    /// Coefficients of `J Z⊗Z + h (X⊗I + I⊗X)`.
    pub coupling: f64,
    pub field: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub bits: usize,
    /// Depolarizing rate after each controlled evolution, per touched qubit.
    pub noise: f64,
    pub mitigate: bool,
    pub eps: f64,
    pub rule: DecisionRule,
    pub trials: u64,
}

impl Default for QpeConfig {
    fn default() -> Self {
        QpeConfig {
            coupling: 1.0,
            field: 0.7,
            e_min: -3.0,
            e_max: 3.0,
            bits: 5,
            noise: 0.01,
            mitigate: true,
            eps: 0.5,
            rule: DecisionRule::default(),
            trials: 100,
        }
    }
}

pub fn toy_hamiltonian(coupling: f64, field: f64) -> DMatrix<f64> {
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let i = DMatrix::<f64>::identity(2, 2);
    z.kronecker(&z) * coupling + (x.kronecker(&i) + i.kronecker(&x)) * field
}

/// Exact spectrum (ascending) and ground state.
pub fn diagonalize(h: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let g = eig.eigenvectors.column(order[0]).iter().copied().collect();
    (vals, g)
}

/// Phase-estimation circuit: `bits` ancillas (ancilla 0 most significant)
/// control `U^(2^k)` with `U = exp(2πi (H − e_min) / W)` on the two system
/// qubits, which start in the exact ground state; an inverse QFT follows.
/// Outcome `x` estimates `E ≈ e_min + x W / 2^bits`.
#[derive(Debug, Clone)]
pub struct QpeOracle {
    pub cfg: QpeConfig,
    pub circuit: NoisyDenseCircuit,
    /// Energy per outcome bin.
    pub bin_width: f64,
    pub ground_energy: f64,
}

fn unitary_power(h: &DMatrix<f64>, e_min: f64, w: f64, power: u64) -> CMat {
    let eig = SymmetricEigen::new(h.clone());
    let d = h.nrows();
    let mut u = CMat::zeros(d, d);
    for k in 0..d {
        let phase = 2.0 * std::f64::consts::PI * (eig.eigenvalues[k] - e_min) / w * power as f64;
        let v = eig.eigenvectors.column(k);
        let z = C64::from_polar(1.0, phase);
        for i in 0..d {
            for j in 0..d {
                u[(i, j)] += z * v[i] * v[j];
            }
        }
    }
    u
}

fn controlled(u: &CMat) -> CMat {
    let d = u.nrows();
    let mut m = CMat::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

fn inverse_qft(m: usize) -> CMat {
    let n = 1usize << m;
    let s = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |y, x| {
        C64::from_polar(s, -2.0 * std::f64::consts::PI * (x * y) as f64 / n as f64)
    })
}

impl QpeOracle {
    pub fn new(cfg: QpeConfig) -> Result<Self> {
        if cfg.bits == 0 || cfg.bits > 8 || !(cfg.e_min < cfg.e_max) {
            return Err(Error::Config("qpe needs 1..=8 bits and e_min < e_max".into()));
        }
        let h = toy_hamiltonian(cfg.coupling, cfg.field);
        let (vals, g) = diagonalize(&h);
        if vals[0] < cfg.e_min || vals[vals.len() - 1] > cfg.e_max {
            return Err(Error::Config("spectrum outside [e_min, e_max]".into()));
        }
        let m = cfg.bits;
        let nb = 1usize << m;
        // e_max lands on the last bin
        let w = (cfg.e_max - cfg.e_min) * nb as f64 / (nb - 1) as f64;
        let s = 1.0 / (nb as f64).sqrt();
        let mut amp = vec![c(0.0, 0.0); nb * 4];
        for a in 0..nb {
            for (k, gk) in g.iter().enumerate() {
                amp[a * 4 + k] = c(s * gk, 0.0);
            }
        }
        let init = StateVector::from_amplitudes(amp)?;
        let mut ops = Vec::new();
        for j in 0..m {
            let u = unitary_power(&h, cfg.e_min, w, 1u64 << (m - 1 - j));
            ops.push((controlled(&u), vec![j, m, m + 1]));
        }
        let ideal_ops = ops.len();
        let qft_qubits: Vec<usize> = (0..m).collect();
        let noise = PauliChannel::depolarizing(cfg.noise)?;
        let mut circuit = NoisyDenseCircuit::new(init, ops, noise, qft_qubits.clone())?;
        // the inverse QFT is noiseless here: append it after construction
        debug_assert_eq!(circuit.ops.len(), ideal_ops);
        circuit.ops.push((inverse_qft(m), qft_qubits));
        Ok(QpeOracle {
            bin_width: w / nb as f64,
            ground_energy: vals[0],
            cfg,
            circuit,
        })
    }

    pub fn energy_of(&self, x: usize) -> f64 {
        self.cfg.e_min + x as f64 * self.bin_width
    }

    /// Decision for threshold `k`; `call` separates the random streams of calls.
    pub fn decide(&self, k: f64, seed: u64, call: u64) -> Result<Decision> {
        let proc = wrap_decision_as_expectation(|bits: &[bool]| self.energy_of(bits_value(bits)) <= k);
        let mitigate = self.cfg.mitigate;
        let range = if mitigate { self.circuit.gamma_tot() } else { 1.0 };
        let s = mix(seed, call);
        self.cfg.rule.decide(range, |i| {
            let mut nr = shot_rng(s, lane::NOISE, i);
            let mut qr = shot_rng(s, lane::QEM, i);
            let mut mr = shot_rng(s, lane::AUX, i);
            let (bits, w) = self.circuit.shot(mitigate, &mut nr, &mut qr, &mut mr)?;
            Ok(w * proc.value(&bits))
        })
    }

    /// Width of the band around the threshold where decisions may go either way.
    pub fn resolution(&self) -> f64 {
        self.bin_width
    }

    pub fn search(&self, seed: u64) -> Result<BisectionResult> {
        let mut call = 0;
        bisection_energy_search(
            |k| {
                call += 1;
                Ok(self.decide(k, seed, call)?.answer)
            },
            self.cfg.e_min,
            self.cfg.e_max,
            self.cfg.eps,
            self.resolution(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BisectionReport {
    pub ground_energy: f64,
    pub trials: u64,
    pub contained: u64,
    pub mean_width: f64,
    pub mean_iterations: f64,
    pub expected_iterations: u32,
    pub gamma_tot: f64,
    pub results: Vec<BisectionResult>,
}

impl BisectionReport {
    pub fn coverage(&self) -> f64 {
        self.contained as f64 / self.trials as f64
    }

    pub const CSV_HEADER: &'static str = "trial,lo,hi,iterations,contains";

    pub fn csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for (i, r) in self.results.iter().enumerate() {
            s.push_str(&format!("{i},{:.6},{:.6},{},{}\n", r.lo, r.hi, r.iterations, r.contains(self.ground_energy)));
        }
        s
    }
}

pub fn run_bisection_demo(cfg: &QpeConfig, seed: u64) -> Result<BisectionReport> {
    let oracle = QpeOracle::new(cfg.clone())?;
    let results: Vec<Result<BisectionResult>> =
        crate::par::map_chunks(cfg.trials, 1, |t, _| oracle.search(mix(seed, t)));
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let e0 = oracle.ground_energy;
    let n = results.len().max(1) as f64;
    Ok(BisectionReport {
        ground_energy: e0,
        trials: cfg.trials,
        contained: results.iter().filter(|r| r.contains(e0)).count() as u64,
        mean_width: results.iter().map(|r| r.width()).sum::<f64>() / n,
        mean_iterations: results.iter().map(|r| r.iterations as f64).sum::<f64>() / n,
        expected_iterations: expected_iterations(cfg.e_max - cfg.e_min, cfg.eps, oracle.resolution()),
        gamma_tot: oracle.circuit.gamma_tot(),
        results,
    })
}

/// Bell pair on two qubits, for wrapper tests and examples.
pub fn bell_circuit(noise: PauliChannel) -> Result<NoisyDenseCircuit> {
    let h = crate::linalg::hadamard();
    let ops = vec![(h, vec![0]), (crate::linalg::cnot(), vec![0, 1])];
    NoisyDenseCircuit::new(StateVector::new(2)?, ops, noise, vec![0, 1])
}

/// `Z`-parity observable of the measured qubits, for cross-checks.
pub fn parity_observable(n: usize, qubits: &[usize]) -> PauliString {
    let mut p = PauliString::identity(n);
    for &q in qubits {
        p.set(q, Pauli::Z);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_predicate_gives_minus_one() {
        let w = wrap_decision_as_expectation(|_: &[bool]| false);
        assert_eq!(w.expectation_from_distribution(&[0.25; 4], 2), -1.0);
        assert_eq!(w.value(&[true, false]), -1.0);
    }

    #[test]
    fn perfect_oracle_bisection() {
        for e0 in [-2.9, -1.234, 0.0, 0.77, 2.99] {
            let r = bisection_energy_search(|k| Ok(e0 <= k), -3.0, 3.0, 0.01, 0.0).unwrap();
            assert!(r.contains(e0) && r.width() <= 0.01);
            assert_eq!(r.iterations, (6.0f64 / 0.01).log2().ceil() as u32);
            assert_eq!(r.iterations, expected_iterations(6.0, 0.01, 0.0));
        }
    }

    #[test]
    fn inconsistent_oracle_is_reported() {
        let mut calls = 0;
        let r = bisection_energy_search(
            |_| {
                calls += 1;
                Ok(calls == 1)
            },
            0.0,
            1.0,
            0.01,
            0.0,
        );
        assert!(r.is_err(), "yes at 0.5, no at the upper bound");
        let r = bisection_energy_search(|k| Ok(k < 0.3), 0.0, 1.0, 0.01, 0.0);
        assert!(r.is_err());
    }

    #[test]
    fn parity_wrapper_matches_direct_sampling() {
        let noise = PauliChannel::xyz(0.03, 0.01, 0.02).unwrap();
        let bc = bell_circuit(noise).unwrap();
        let w = wrap_decision_as_expectation(|b: &[bool]| b[0] == b[1]);
        let ideal = w.expectation_from_distribution(&bc.ideal_distribution().unwrap(), 2);
        assert!((ideal - 1.0).abs() < 1e-12);
        let mut direct = Moments::default();
        let mut wrapped = Moments::default();
        let mut mit = Moments::default();
        for i in 0..40_000 {
            let mut nr = shot_rng(1, lane::NOISE, i);
            let mut qr = shot_rng(1, lane::QEM, i);
            let mut mr = shot_rng(1, lane::AUX, i);
            let (bits, _) = bc.shot(false, &mut nr, &mut qr, &mut mr).unwrap();
            direct.push(if bits[0] == bits[1] { 1.0 } else { 0.0 });
            wrapped.push(w.value(&bits));
            let mut nr = shot_rng(2, lane::NOISE, i);
            let mut qr = shot_rng(2, lane::QEM, i);
            let mut mr = shot_rng(2, lane::AUX, i);
            let (bits, g) = bc.shot(true, &mut nr, &mut qr, &mut mr).unwrap();
            mit.push(g * w.value(&bits));
        }
        assert!((wrapped.mean - (2.0 * direct.mean - 1.0)).abs() < 1e-12);
        assert!(wrapped.mean < 1.0 - 5.0 * wrapped.se());
        assert!((mit.mean - ideal).abs() < 4.0 * mit.se(), "{} ± {}", mit.mean, mit.se());
    }

    #[test]
    fn qpe_peaks_at_exact_bin() {
        let cfg = QpeConfig {
            noise: 0.0,
            mitigate: false,
            ..Default::default()
        };
        let o = QpeOracle::new(cfg).unwrap();
        let dist = o.circuit.ideal_distribution().unwrap();
        let x = (0..dist.len()).max_by(|&a, &b| dist[a].total_cmp(&dist[b])).unwrap();
        assert!((o.energy_of(x) - o.ground_energy).abs() <= o.bin_width);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qpe_bisection_contains_ground_energy() {
        let cfg = QpeConfig {
            trials: 8,
            ..Default::default()
        };
        let rep = run_bisection_demo(&cfg, 3).unwrap();
        assert!(rep.contained >= 7, "{rep:?}");
        assert!(rep.results.iter().all(|r| r.width() <= cfg.eps + 1e-12));
    }
}
