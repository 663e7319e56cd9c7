//! SWAP-test benchmark for approximation-error mitigation.
//!
//! Two registers receive the same random circuit of Haar single-qubit rotations
//! and CNOTs; register A runs it exactly, register B runs each rotation through
//! Clifford+T synthesis. An ancilla-controlled SWAP test then estimates the
//! overlap, which is 1 without synthesis error. With mitigation on, each
//! synthesized rotation is followed by a sampled recovery from the inverse of its
//! error channel.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{mitigation_weight_sampler, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ONE};
use crate::quasiprob::{CumulativeSampler, QuasiDecomposition};
use crate::rng::{lane, shot_rng};
use crate::stats::Moments;
use crate::synth::{error_channel, haar_random_su2, mitigate_sk, synthesize_unitary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapTestSpec {
    /// Qubits per register; the test uses 2·side + 1 qubits.
    pub side: usize,
    pub layers: usize,
    /// T gates per synthesized unitary, split evenly over its three rotations.
    pub t_budget: usize,
}

impl Default for SwapTestSpec {
    fn default() -> Self {
        SwapTestSpec {
            side: 3,
            layers: 3,
            t_budget: 24,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Rotation {
    pub qubit: usize,
    pub exact: CMat,
    pub approx: CMat,
    pub error: f64,
    pub t_count: usize,
    pub dec: QuasiDecomposition,
    sampler: CumulativeSampler,
}

#[derive(Debug, Clone)]
pub struct SwapLayer {
    pub rotations: Vec<Rotation>,
    pub cnot: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct SwapCircuit {
    pub spec: SwapTestSpec,
    pub layers: Vec<SwapLayer>,
    /// Product of the per-rotation QEM costs.
    pub gamma: f64,
    /// Exact |⟨ψ_A|ψ_B⟩|² without mitigation.
    pub overlap: f64,
    /// State after register A's circuit (register B and ancilla still |0⟩).
    prepared: StateVector,
}

fn fredkin() -> CMat {
    let mut m = CMat::identity(8, 8);
    // control is the most significant factor: swap |101⟩ and |110⟩
    m[(5, 5)] = linalg::ZERO;
    m[(6, 6)] = linalg::ZERO;
    m[(5, 6)] = ONE;
    m[(6, 5)] = ONE;
    m
}

/// The random circuit is drawn from `(seed, index)` only, so every T-budget sees
/// the same circuits.
pub fn build_swap_circuit(spec: SwapTestSpec, seed: u64, index: u64) -> Result<SwapCircuit> {
    if spec.side < 2 || spec.layers == 0 {
        return Err(Error::Invalid("SWAP test needs ≥2 qubits per side and ≥1 layer".into()));
    }
    let n = 2 * spec.side + 1;
    if n > crate::dense::MAX_PURE_QUBITS {
        return Err(Error::Dimension("SWAP test register too large".into()));
    }
    let mut rng = shot_rng(seed, lane::CIRCUIT, index);
    let mut layers = Vec::with_capacity(spec.layers);
    let mut gamma = 1.0;
    for _ in 0..spec.layers {
        let mut rotations = Vec::with_capacity(spec.side);
        for q in 0..spec.side {
            let u = haar_random_su2(&mut rng);
            let s = synthesize_unitary(&u, spec.t_budget / 3)?;
            let ch = error_channel(&u, &s.approx)?;
            let dec = mitigate_sk(&ch)?;
            gamma *= dec.gamma;
            rotations.push(Rotation {
                qubit: q,
                exact: u,
                approx: s.approx,
                error: ch.opnorm_error,
                t_count: s.t_count,
                sampler: dec.sampler(),
                dec,
            });
        }
        let a = rng.gen_range(0..spec.side);
        let mut b = rng.gen_range(0..spec.side - 1);
        if b >= a {
            b += 1;
        }
        layers.push(SwapLayer {
            rotations,
            cnot: (a, b),
        });
    }
    let mut prepared = StateVector::new(n)?;
    for l in &layers {
        for r in &l.rotations {
            prepared.apply_unitary(&r.exact, &[1 + r.qubit])?;
        }
        prepared.apply_unitary(&linalg::cnot(), &[1 + l.cnot.0, 1 + l.cnot.1])?;
    }
    let mut c = SwapCircuit {
        spec,
        layers,
        gamma,
        overlap: 0.0,
        prepared,
    };
    c.overlap = exact_overlap(&c)?;
    Ok(c)
}

fn exact_overlap(c: &SwapCircuit) -> Result<f64> {
    let side = c.spec.side;
    let mut a = StateVector::new(side)?;
    let mut b = StateVector::new(side)?;
    for l in &c.layers {
        for r in &l.rotations {
            a.apply_unitary(&r.exact, &[r.qubit])?;
            b.apply_unitary(&r.approx, &[r.qubit])?;
        }
        a.apply_unitary(&linalg::cnot(), &[l.cnot.0, l.cnot.1])?;
        b.apply_unitary(&linalg::cnot(), &[l.cnot.0, l.cnot.1])?;
    }
    Ok(a.fidelity(&b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapShot {
    pub outcome: i8,
    pub gamma: f64,
    /// Product of sampled signs and projective weights.
    pub parity: f64,
    /// `outcome` without mitigation, `γ·parity·outcome` with it.
    pub value: f64,
}

/// One shot of the SWAP test: register B gets the synthesized circuit, followed
/// by sampled recoveries when `mitigate` is set; the ancilla is read in Z.
pub fn run_swap_test<R: Rng + ?Sized>(c: &SwapCircuit, rng: &mut R, mitigate: bool) -> Result<SwapShot> {
    let side = c.spec.side;
    let mut st = c.prepared.clone();
    let mut parity = 1.0;
    for l in &c.layers {
        for r in &l.rotations {
            let q = 1 + side + r.qubit;
            st.apply_unitary(&r.approx, &[q])?;
            if mitigate {
                let (_, w) = mitigation_weight_sampler(&mut st, &r.dec, &r.sampler, q, rng)?;
                parity *= w;
            }
        }
        st.apply_unitary(&linalg::cnot(), &[1 + side + l.cnot.0, 1 + side + l.cnot.1])?;
    }
    let h = linalg::hadamard();
    st.apply_unitary(&h, &[0])?;
    let f = fredkin();
    for k in 0..side {
        st.apply_unitary(&f, &[0, 1 + k, 1 + side + k])?;
    }
    st.apply_unitary(&h, &[0])?;
    let outcome = if parity == 0.0 {
        // the projective branch was rejected; the shot still counts with value 0
        1
    } else {
        st.measure_z(0, rng)?
    };
    let gamma = if mitigate { c.gamma } else { 1.0 };
    let value = if mitigate {
        gamma * parity * outcome as f64
    } else {
        outcome as f64
    };
    Ok(SwapShot {
        outcome,
        gamma,
        parity,
        value,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwapBudgetStats {
    pub t_budget: usize,
    pub circuits: u64,
    pub shots_per_circuit: u64,
    pub unmitigated: Moments,
    pub mitigated: Moments,
    /// Circuit average of the exact unmitigated expectation (no shot noise).
    pub exact_unmitigated: f64,
    pub mean_gamma: f64,
    pub mean_t_count: f64,
    pub mean_rotation_error: f64,
}

impl SwapBudgetStats {
    pub const CSV_HEADER: &'static str =
        "t_budget,circuits,shots,unmitigated_mean,unmitigated_se,mitigated_mean,mitigated_se,exact_unmitigated,mean_gamma,mean_t_count,mean_error";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.8},{:.6},{:.2},{:.4e}",
            self.t_budget,
            self.circuits,
            self.shots_per_circuit,
            self.unmitigated.mean,
            self.unmitigated.se(),
            self.mitigated.mean,
            self.mitigated.se(),
            self.exact_unmitigated,
            self.mean_gamma,
            self.mean_t_count,
            self.mean_rotation_error,
        )
    }
}

struct CircuitTally {
    un: Moments,
    mit: Moments,
    overlap: f64,
    gamma: f64,
    t: f64,
    err: f64,
}

/// Runs `circuits × shots` SWAP tests with and without mitigation at one budget.
pub fn run_swap_budget(
    spec: SwapTestSpec,
    circuits: u64,
    shots: u64,
    seed: u64,
) -> Result<SwapBudgetStats> {
    let tallies = crate::par::map_chunks(circuits, 1, |i, _| -> Result<CircuitTally> {
        let c = build_swap_circuit(spec, seed, i)?;
        let mut un = Moments::default();
        let mut mit = Moments::default();
        let p_plus = (1.0 + c.overlap) / 2.0;
        for s in 0..shots {
            let id = i * shots + s;
            // the unmitigated state is shot-independent, so only the readout is sampled
            let mut r = shot_rng(seed, lane::AUX, id);
            un.push(if r.gen::<f64>() < p_plus { 1.0 } else { -1.0 });
            let mut r = shot_rng(seed ^ spec.t_budget as u64, lane::QEM, id);
            mit.push(run_swap_test(&c, &mut r, true)?.value);
        }
        let n_rot = (spec.side * spec.layers) as f64;
        let (t, err) = c.layers.iter().flat_map(|l| &l.rotations).fold((0.0, 0.0), |a, r| {
            (a.0 + r.t_count as f64, a.1 + r.error)
        });
        Ok(CircuitTally {
            un,
            mit,
            overlap: c.overlap,
            gamma: c.gamma,
            t: t / n_rot,
            err: err / n_rot,
        })
    });
    let mut out = SwapBudgetStats {
        t_budget: spec.t_budget,
        circuits,
        shots_per_circuit: shots,
        unmitigated: Moments::default(),
        mitigated: Moments::default(),
        exact_unmitigated: 0.0,
        mean_gamma: 0.0,
        mean_t_count: 0.0,
        mean_rotation_error: 0.0,
    };
    for t in tallies {
        let t = t?;
        out.unmitigated.merge(&t.un);
        out.mitigated.merge(&t.mit);
        out.exact_unmitigated += t.overlap;
        out.mean_gamma += t.gamma;
        out.mean_t_count += t.t;
        out.mean_rotation_error += t.err;
    }
    let k = circuits.max(1) as f64;
    out.exact_unmitigated /= k;
    out.mean_gamma /= k;
    out.mean_t_count /= k;
    out.mean_rotation_error /= k;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_states_give_plus_one() {
        let spec = SwapTestSpec::default();
        let mut c = build_swap_circuit(spec, 1, 0).unwrap();
        for l in &mut c.layers {
            for r in &mut l.rotations {
                r.approx = r.exact.clone();
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            assert_eq!(run_swap_test(&c, &mut rng, false).unwrap().outcome, 1);
        }
    }

    #[test]
    fn overlap_is_a_probability_and_readout_matches_it() {
        let spec = SwapTestSpec {
            t_budget: 6,
            ..Default::default()
        };
        let c = build_swap_circuit(spec, 5, 3).unwrap();
        assert!((0.0..=1.0).contains(&c.overlap));
        assert!(c.overlap < 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m: Moments = (0..20_000)
            .map(|_| run_swap_test(&c, &mut rng, false).unwrap().value)
            .collect();
        assert!((m.mean - c.overlap).abs() < 4.0 * m.se());
    }

    #[test]
    fn mitigated_single_circuit_is_unbiased() {
        let spec = SwapTestSpec {
            t_budget: 6,
            ..Default::default()
        };
        let c = build_swap_circuit(spec, 9, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m: Moments = (0..40_000)
            .map(|_| run_swap_test(&c, &mut rng, true).unwrap().value)
            .collect();
        assert!((m.mean - 1.0).abs() < 4.0 * m.se(), "{} ± {}", m.mean, m.se());
    }
}
