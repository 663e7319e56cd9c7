//! Property tests for the library invariants.

use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftqem::acceptance::{random_noise_binding, random_oracle_program};
use ftqem::config::Config;
use ftqem::dense::{mitigation_weight_sampler, StateVector};
use ftqem::frame::{run_program, DenseBackend, FrameState, RecoveryMode, ShotResult, ShotStreams};
use ftqem::gst::{estimate_gateset, measure_raw, spam_free_pec_check, FiducialSet, GstGate, SpamModel};
use ftqem::linalg::{self, c, dagger, pauli_matrix, CMat};
use ftqem::pauli::{Pauli, PauliString};
use ftqem::ptm::{ptm_compose, ptm_of_channel, ptm_of_unitary};
use ftqem::quasiprob::{decompose_inverse_1q, first_order_cost, invert_pauli_channel, PauliChannel};
use ftqem::resource::{effective_distance_gain, required_distance, CodeParams, CyclesPerGate};
use ftqem::rng::{lane, shot_rng};
use ftqem::run::{self, Subcommand};
use ftqem::stab::{
    backpropagate_observable, conjugate, deterministic_observable, embed_gate, random_clifford_circuit,
    CliffordCircuit, Gate, StabilizerTableau,
};
use ftqem::stats::Moments;
use ftqem::surface::matching::{exhaustive_min_cost, matching_cost, min_weight_boundary_matching, Mate};
use ftqem::surface::{decode_mwpm, sample_run, SurfaceCodeLayout};
use ftqem::swap::{build_swap_circuit, SwapTestSpec};
use ftqem::synth::{approx_error, haar_random_su2, sk_record, synthesize_rz, synthesize_unitary};

fn mat_close(a: &CMat, b: &CMat, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() < tol)
}

fn pauli_string(n: usize, idx: usize, phase: u8) -> PauliString {
    PauliString::from_index(n, idx % (1 << (2 * n))).with_phase(phase % 4)
}

fn random_pauli_channel<R: Rng>(n: usize, p_err: f64, rng: &mut R) -> PauliChannel {
    let w: Vec<f64> = (1..1usize << (2 * n)).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = w.iter().sum();
    let mut probs = vec![1.0 - p_err];
    probs.extend(w.iter().map(|x| p_err * x / s));
    PauliChannel::new(n, probs).unwrap()
}

fn random_circuit(n: usize, layers: usize, seed: u64) -> CliffordCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_clifford_circuit(n, layers, n / 2 + 1, &mut rng).unwrap()
}

fn zero_state(n: usize) -> DVector<linalg::C64> {
    let mut v = DVector::from_element(1 << n, c(0.0, 0.0));
    v[0] = c(1.0, 0.0);
    v
}

fn dense_expectation(psi: &DVector<linalg::C64>, p: &PauliString) -> f64 {
    (psi.adjoint() * pauli_matrix(p) * psi)[(0, 0)].re
}

// Pauli algebra

proptest! {
    #[test]
    fn pauli_product_is_associative(n in 1usize..=6, a in any::<usize>(), b in any::<usize>(), cc in any::<usize>(),
                                   pa in 0u8..4, pb in 0u8..4, pc in 0u8..4) {
        let (a, b, cc) = (pauli_string(n, a, pa), pauli_string(n, b, pb), pauli_string(n, cc, pc));
        let left = a.mul(&b).unwrap().mul(&cc).unwrap();
        let right = a.mul(&b.mul(&cc).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pauli_product_matches_dense(n in 1usize..=3, a in any::<usize>(), b in any::<usize>(), pa in 0u8..4, pb in 0u8..4) {
        let (a, b) = (pauli_string(n, a, pa), pauli_string(n, b, pb));
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.phase() < 4);
        prop_assert!(mat_close(&pauli_matrix(&ab), &(pauli_matrix(&a) * pauli_matrix(&b)), 1e-12));
    }

    #[test]
    fn hermitian_pauli_squares_to_identity(n in 1usize..=40, a in any::<usize>(), sign in any::<bool>()) {
        let p = PauliString::from_index(n.min(20), a % (1 << (2 * n.min(20)))).with_phase(if sign { 2 } else { 0 });
        let sq = p.mul(&p).unwrap();
        prop_assert!(sq.is_identity());
        prop_assert_eq!(sq.phase(), 0);
    }
}

#[test]
fn commutation_matches_dense_exhaustively() {
    for n in 1..=3 {
        let d = 1usize << (2 * n);
        let mats: Vec<CMat> = (0..d).map(|i| pauli_matrix(&PauliString::from_index(n, i))).collect();
        for i in 0..d {
            for j in 0..d {
                let a = PauliString::from_index(n, i);
                let b = PauliString::from_index(n, j);
                let dense = mat_close(&(&mats[i] * &mats[j]), &(&mats[j] * &mats[i]), 1e-12);
                assert_eq!(a.commutes(&b).unwrap(), dense, "{a} {b}");
            }
        }
    }
}

// Transfer matrices

fn random_clifford_unitary(n: usize, seed: u64) -> CMat {
    random_circuit(n, 3, seed).unitary()
}

/// Kraus set from a random isometry (QR of a Gaussian matrix).
fn random_kraus(k: usize, seed: u64) -> Vec<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMat::from_fn(2 * k, 2, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let q = g.qr().q();
    (0..k).map(|i| q.rows(2 * i, 2).into_owned()).collect()
}

proptest! {
    #[test]
    fn ptm_is_a_homomorphism(s1 in any::<u64>(), s2 in any::<u64>()) {
        let u = random_clifford_unitary(2, s1);
        let v = random_clifford_unitary(2, s2);
        let direct = ptm_of_unitary(&(&u * &v), 2).unwrap();
        let composed = ptm_compose(&ptm_of_unitary(&u, 2).unwrap(), &ptm_of_unitary(&v, 2).unwrap()).unwrap();
        prop_assert!(direct.max_abs_diff(&composed) < 1e-10);
        // Clifford PTMs are signed permutations
        prop_assert!(direct.m.iter().all(|x| x.abs() < 1e-10 || (x.abs() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn cptp_maps_preserve_trace(k in 1usize..=4, seed in any::<u64>()) {
        let kraus = random_kraus(k, seed);
        let sum: CMat = kraus.iter().map(|a| dagger(a) * a).fold(CMat::zeros(2, 2), |s, x| s + x);
        prop_assert!(mat_close(&sum, &CMat::identity(2, 2), 1e-10));
        let r = ptm_of_channel(&kraus, 1).unwrap();
        prop_assert!((r.m[(0, 0)] - 1.0).abs() < 1e-12);
        for j in 1..4 {
            prop_assert!(r.m[(0, j)].abs() < 1e-12);
        }
    }
}

// Quasi-probability decompositions

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn inverse_decomposition_inverts_the_channel(n in 1usize..=2, p_err in 0.0f64..0.2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_pauli_channel(n, p_err, &mut rng);
        let dec = invert_pauli_channel(&ch).unwrap();
        let prod = ptm_compose(&dec.ptm(), &ch.ptm()).unwrap();
        prop_assert!(prod.max_abs_diff(&ftqem::ptm::TransferMatrix::identity(n)) < 1e-10);
        let eta_sum: f64 = dec.terms.iter().map(|t| t.eta).sum();
        prop_assert!((eta_sum - 1.0).abs() < 1e-10);
        let recon: f64 = dec.probs().iter().zip(dec.signs()).map(|(q, s)| q * s * dec.gamma).sum();
        prop_assert!((recon - 1.0).abs() < 1e-10);
        prop_assert!(dec.gamma >= 1.0 - 1e-12);
        if ch.p_err() > 1e-9 {
            prop_assert!(dec.gamma > 1.0);
        }
    }
}

proptest! {
    #[test]
    fn first_order_gap_is_second_order(p in 0.0f64..0.05) {
        let dec = invert_pauli_channel(&PauliChannel::depolarizing(p).unwrap()).unwrap();
        let gap = (dec.gamma - first_order_cost(p)).abs();
        prop_assert!(gap <= 4.0 * p * p + 1e-12, "p={p} gap={gap}");
    }

    #[test]
    fn identity_channel_costs_nothing(n in 1usize..=3) {
        let dec = invert_pauli_channel(&PauliChannel::identity(n)).unwrap();
        prop_assert!((dec.gamma - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    /// Monte Carlo over basis-element recoveries (including projective ones)
    /// reproduces the ideal expectation of a coherently rotated state.
    #[test]
    fn basis_sampler_is_unbiased(theta in -0.3f64..0.3, seed in any::<u64>(), obs in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prep = haar_random_su2(&mut rng);
        let noise = linalg::rz(theta) * linalg::sqrt_x() * linalg::rz(-theta) * dagger(&linalg::sqrt_x());
        let target = ptm_of_unitary(&noise, 1).unwrap().inverse().unwrap();
        let dec = decompose_inverse_1q(&target).unwrap();
        let sampler = dec.sampler();
        let p = PauliString::single(1, 0, Pauli::from_index(obs));
        let mut ideal = StateVector::new(1).unwrap();
        ideal.apply_unitary(&prep, &[0]).unwrap();
        let want = ideal.expectation(&p).unwrap();
        let mut m = Moments::default();
        for _ in 0..20_000 {
            let mut st = ideal.clone();
            st.apply_unitary(&noise, &[0]).unwrap();
            let (_, w) = mitigation_weight_sampler(&mut st, &dec, &sampler, 0, &mut rng).unwrap();
            let e = if w == 0.0 { 0.0 } else { st.expectation(&p).unwrap() };
            m.push(dec.gamma * w * e);
        }
        prop_assert!((m.mean - want).abs() <= 5.0 * m.se() + 1e-9, "mean {} want {} se {}", m.mean, want, m.se());
    }
}

// Stabilizer simulation

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn tableau_matches_dense_on_z_masks(n in 2usize..=5, layers in 1usize..=6, seed in any::<u64>()) {
        let circ = random_circuit(n, layers, seed);
        let mut t = StabilizerTableau::new(n);
        t.apply_circuit(&circ).unwrap();
        let psi = circ.unitary() * zero_state(n);
        for mask in 1..1usize << n {
            let mut p = PauliString::identity(n);
            for q in (0..n).filter(|q| mask >> q & 1 == 1) {
                p.set(q, Pauli::Z);
            }
            let tab = t.expectation_pauli(&p).unwrap() as f64;
            prop_assert!((tab - dense_expectation(&psi, &p)).abs() < 1e-10, "mask {mask}");
        }
    }

    #[test]
    fn conjugation_matches_dense_and_stays_hermitian(n in 2usize..=3, idx in any::<usize>(), seed in any::<u64>()) {
        let circ = random_circuit(n, 3, seed);
        let p0 = pauli_string(n, idx, 0);
        let mut p = p0.clone();
        for g in circ.gates() {
            conjugate(&mut p, *g);
        }
        prop_assert!(p.phase() % 2 == 0);
        let u = circ.unitary();
        prop_assert!(mat_close(&pauli_matrix(&p), &(&u * pauli_matrix(&p0) * dagger(&u)), 1e-10));
    }

    /// A Pauli injected after `t` layers flips the measured observable exactly
    /// when it anticommutes with the back-propagated observable at `t`.
    #[test]
    fn backpropagation_predicts_single_faults(n in 2usize..=6, layers in 1usize..=5, seed in any::<u64>()) {
        let circ = random_circuit(n, layers, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        let obs = deterministic_observable(&circ, &mut rng);
        let back = backpropagate_observable(&circ, &obs);
        prop_assert_eq!(back.len(), layers + 1);
        let mut clean = StabilizerTableau::new(n);
        clean.apply_circuit(&circ).unwrap();
        let ideal = clean.expectation_pauli(&obs).unwrap();
        prop_assert!(ideal != 0);
        for t in 0..=layers {
            for q in 0..n {
                for pk in 1..4 {
                    let err = PauliString::single(n, q, Pauli::from_index(pk));
                    let mut tab = StabilizerTableau::new(n);
                    for (k, layer) in circ.layers.iter().enumerate() {
                        if k == t {
                            tab.apply_pauli(&err);
                        }
                        for g in layer {
                            tab.apply_gate(*g).unwrap();
                        }
                    }
                    if t == layers {
                        tab.apply_pauli(&err);
                    }
                    let flipped = tab.expectation_pauli(&obs).unwrap() == -ideal;
                    prop_assert_eq!(flipped, !back[t].commutes(&err).unwrap(), "t={} q={} P={}", t, q, pk);
                }
            }
        }
    }
}

#[test]
fn embedded_gates_are_unitary() {
    for g in [Gate::H(1), Gate::S(0), Gate::Cnot(2, 0), Gate::Y(2)] {
        assert!(linalg::is_unitary(&embed_gate(3, g), 1e-12));
    }
}

// Surface-code decoding

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]
    #[test]
    fn decoder_output_is_consistent(d in prop::sample::select(vec![3usize, 5]), p in 0.001f64..0.04,
                                    cycles in 1usize..=5, seed in any::<u64>()) {
        let layout = SurfaceCodeLayout::new(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let run = sample_run(&layout, p, cycles, &mut rng);
        let r = decode_mwpm(&layout, &run.history);
        let (rz, rx) = layout.syndrome(&r);
        let (ez, ex) = layout.syndrome(&run.error);
        // the recovery explains the final (perfect) syndrome
        prop_assert_eq!(&rz, &run.history.z_rounds[cycles]);
        prop_assert_eq!(&rx, &run.history.x_rounds[cycles]);
        prop_assert_eq!(&ez, &run.history.z_rounds[cycles]);
        prop_assert_eq!(&ex, &run.history.x_rounds[cycles]);
        let mut res = run.error.clone();
        res.mul_assign_right(&r);
        let (sz, sx) = layout.syndrome(&res);
        prop_assert!(sz.iter().chain(&sx).all(|&b| !b), "residual leaves the normalizer");
        prop_assert!(layout.logical_class(&res) < 4);
    }

    #[test]
    fn matching_is_optimal_on_small_instances(pts in prop::collection::vec((0i32..12, 0i32..12, 0i32..6), 0..=10)) {
        let n = pts.len();
        let w = |a: usize, b: usize| (pts[a].0 - pts[b].0).abs() + (pts[a].1 - pts[b].1).abs() + (pts[a].2 - pts[b].2).abs();
        let b = |a: usize| pts[a].0.min(11 - pts[a].0) + 1;
        let mates = min_weight_boundary_matching(n, w, b);
        for (u, m) in mates.iter().enumerate() {
            if let Mate::Defect(v) = *m {
                prop_assert!(v != u);
                prop_assert_eq!(mates[v], Mate::Defect(u));
            }
        }
        prop_assert_eq!(matching_cost(&mates, w, b), exhaustive_min_cost(n, w, b));
    }
}

// Pauli frame engine

fn frame_shot(prog: &ftqem::frame::LogicalProgram, noise: &ftqem::frame::NoiseBinding, seed: u64, shot: u64,
              mode: RecoveryMode) -> ShotResult {
    let mut nr = shot_rng(seed, lane::NOISE, shot);
    let mut qr = shot_rng(seed, lane::QEM, shot);
    let mut mr = shot_rng(seed, lane::AUX, shot);
    let mut fs = FrameState::new(DenseBackend::new(0).unwrap()).with_mode(mode);
    run_program(prog, noise, &mut fs, ShotStreams { noise: &mut nr, qem: &mut qr, meas: &mut mr }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn deferred_recovery_matches_immediate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prog = random_oracle_program(&mut rng);
        let noise = random_noise_binding(&mut rng).unwrap();
        for shot in 0..50 {
            let a = frame_shot(&prog, &noise, seed, shot, RecoveryMode::Immediate);
            let b = frame_shot(&prog, &noise, seed, shot, RecoveryMode::Deferred);
            prop_assert_eq!(a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    /// E[mitigated²] = E[γ²]·E[raw²] for ±1 outcomes, since γ is constant per program.
    #[test]
    fn second_moment_law(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prog = random_oracle_program(&mut rng);
        let noise = random_noise_binding(&mut rng).unwrap();
        let mut g2 = 0.0;
        let mut m2 = 0.0;
        let shots = 4000;
        for shot in 0..shots {
            let r = frame_shot(&prog, &noise, seed, shot, RecoveryMode::Immediate);
            g2 += r.gamma * r.gamma;
            m2 += r.mitigated() * r.mitigated();
            prop_assert!(r.raw().abs() == 1.0);
        }
        prop_assert!((m2 / g2 - 1.0).abs() < 0.2, "ratio {}", m2 / g2);
    }
}

// Gate synthesis

proptest! {
    #[test]
    fn quarter_turn_angles_are_exact(k in 0i32..8, max_t in 1usize..=12) {
        let theta = k as f64 * std::f64::consts::FRAC_PI_4;
        let seq = synthesize_rz(theta, max_t).unwrap();
        prop_assert!(approx_error(&linalg::rz(theta), seq.matrix()) < 1e-9);
        prop_assert!(seq.t_count() <= 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn euler_composition_obeys_triangle_inequality(seed in any::<u64>(), per in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_random_su2(&mut rng);
        let s = synthesize_unitary(&u, per).unwrap();
        let total = approx_error(&u, &s.approx);
        prop_assert!(total <= s.rotation_errors.iter().sum::<f64>() + 1e-9);
        prop_assert!(s.t_count <= 3 * per);
    }
}

/// Empirical slope bound on `γ − 1` per unit of operator-norm error (worst seen ≈ 6.8).
const SK_COST_SLOPE: f64 = 8.0;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn synthesis_cost_tracks_error(seed in any::<u64>(), max_t in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_random_su2(&mut rng);
        let r = sk_record(0, &u, max_t).unwrap();
        prop_assert!(r.actual_t <= max_t);
        prop_assert!(r.gamma >= 1.0 - 1e-12);
        prop_assert!(r.gamma - 1.0 <= SK_COST_SLOPE * r.opnorm_error + 1e-9, "γ {} ε {}", r.gamma, r.opnorm_error);
    }
}

// SWAP test

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn swap_overlap_is_a_probability(side in 2usize..=3, layers in 1usize..=2, budget in 6usize..=24, seed in any::<u64>()) {
        let c = build_swap_circuit(SwapTestSpec { side, layers, t_budget: budget }, seed, 0).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c.overlap));
        prop_assert!(c.gamma >= 1.0);
    }
}

// Gate-set tomography

#[test]
fn gst_error_shrinks_with_shots() {
    let fid = FiducialSet::new(1).unwrap();
    let gate = GstGate {
        name: "H".into(),
        unitary: linalg::hadamard(),
        noise: PauliChannel::xyz(0.01, 0.003, 0.005).unwrap(),
    };
    let truth = gate.true_ptm().unwrap().m;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mse: Vec<f64> = [1_000u64, 4_000, 16_000, 64_000]
        .iter()
        .map(|&shots| {
            let reps = 12;
            (0..reps)
                .map(|_| {
                    let raw = measure_raw(&gate, &fid, shots, &mut rng, &SpamModel::none(1)).unwrap();
                    let est = estimate_gateset(&raw).unwrap();
                    (&est.gate - &truth).norm_squared()
                })
                .sum::<f64>()
                / reps as f64
        })
        .collect();
    for w in mse.windows(2) {
        assert!(w[1] < w[0], "{mse:?}");
    }
    // quadrupling the shots cuts the mean-square error roughly fourfold
    assert!(mse[3] < mse[0] / 16.0, "{mse:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn gst_recoveries_are_pauli_for_stochastic_noise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = vec![
            GstGate { name: "H".into(), unitary: linalg::hadamard(), noise: random_pauli_channel(1, 0.03 * rng.gen::<f64>(), &mut rng) },
            GstGate { name: "S".into(), unitary: linalg::s_gate(), noise: random_pauli_channel(1, 0.03 * rng.gen::<f64>(), &mut rng) },
        ];
        let spam = SpamModel {
            prep: random_pauli_channel(1, 0.02 * rng.gen::<f64>(), &mut rng),
            meas: random_pauli_channel(1, 0.02 * rng.gen::<f64>(), &mut rng),
        };
        let rep = spam_free_pec_check(&gates, &[0, 1, 0], &spam, 0, 200, seed).unwrap();
        prop_assert!(rep.pauli_only);
        prop_assert!(rep.gamma >= 1.0);
    }
}

// Resource estimates

proptest! {
    #[test]
    fn distance_is_monotone_and_mitigation_never_costs_qubits(lg1 in 2.0f64..12.0, dlg in 0.0f64..3.0,
                                                             n_e in 1e-3f64..1.0, ratio in 0.02f64..0.5,
                                                             by_distance in any::<bool>()) {
        let params = CodeParams {
            ratio,
            m: if by_distance { CyclesPerGate::Distance } else { CyclesPerGate::Fixed(1) },
            ..CodeParams::default()
        };
        let a = required_distance(&params, 10f64.powf(lg1), n_e).unwrap();
        let b = required_distance(&params, 10f64.powf(lg1 + dlg), n_e).unwrap();
        prop_assert!(b.d_nmit >= a.d_nmit && b.d_mit >= a.d_mit);
        prop_assert!(a.d_mit <= a.d_nmit);
        prop_assert!(a.qubit_ratio > 0.0 && a.qubit_ratio <= 1.0);
        prop_assert!(a.qubit_ratio_real > 0.0 && a.qubit_ratio_real <= 1.0 + 1e-12);
        // round trip: the real distance meets its error target exactly
        if a.d_nmit_real > 1.0 {
            let p_dec = params.p_dec(a.d_nmit_real).unwrap();
            prop_assert!((p_dec * 10f64.powf(lg1) / n_e - 1.0).abs() < 1e-6);
        }
        prop_assert!(effective_distance_gain(0.5, ratio).unwrap() > 0.0);
    }
}

// Harness determinism

fn small_config() -> Config {
    let mut cfg = Config::default();
    cfg.threshold_scan.distances = vec![3, 5];
    cfg.threshold_scan.points = 3;
    cfg.threshold_scan.shots = 2_000;
    cfg.clifford_demo.qubits = 6;
    cfg.clifford_demo.layers = 6;
    cfg.clifford_demo.cnots_per_layer = 3;
    cfg.clifford_demo.experiments = 20;
    cfg.clifford_demo.shots = 200;
    cfg.sk_bench.samples = 6;
    cfg.sk_bench.budgets = vec![12, 18, 24];
    cfg.markov_fit.cycles = vec![2, 4, 6];
    cfg.markov_fit.shots = 2_000;
    cfg
}

fn run_files(sub: Subcommand, cfg: &Config, seed: u64) -> Vec<(String, String)> {
    let out = run::run(sub, cfg, seed).unwrap();
    let mut files = out.files.clone();
    files.push(("stats.json".into(), run::stats_document(sub, cfg, seed, &out).to_string()));
    files
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let cfg = small_config();
    for sub in [Subcommand::ThresholdScan, Subcommand::CliffordDemo, Subcommand::SkBench, Subcommand::MarkovFit] {
        let runs: Vec<_> = [1usize, 3]
            .iter()
            .map(|&k| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
                pool.install(|| run_files(sub, &cfg, 11))
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{}", sub.name());
        assert_eq!(runs[0], run_files(sub, &cfg, 11), "{}", sub.name());
    }
}

#[test]
fn different_seeds_give_different_samples() {
    let cfg = small_config();
    assert_ne!(run_files(Subcommand::ThresholdScan, &cfg, 1), run_files(Subcommand::ThresholdScan, &cfg, 2));
}

#[test]
fn rng_streams_are_reproducible() {
    let a: Vec<u64> = (0..4).map(|s| shot_rng(5, lane::NOISE, s).gen()).collect();
    let b: Vec<u64> = (0..4).map(|s| shot_rng(5, lane::NOISE, s).gen()).collect();
    let q: Vec<u64> = (0..4).map(|s| shot_rng(5, lane::QEM, s).gen()).collect();
    assert_eq!(a, b);
    assert_ne!(a, q);
}
