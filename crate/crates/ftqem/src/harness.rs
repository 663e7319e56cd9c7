//! Experiment orchestration: the many-qubit random Clifford demo with logical
//! Pauli noise after every layer, its estimation-error variant, and the
//! aggregation/histogram plumbing shared by the CLI.
//!
//! Fast path: the measured observable `O` is a stabilizer of the ideal output,
//! so a shot's raw outcome is `(−1)^k` where `k` counts noise Paulis that
//! anticommute with `O` back-propagated to their location. Noise and recovery
//! locations are drawn by geometric skipping, so a shot costs O(events).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::pauli::PauliString;
use crate::quasiprob::{invert_pauli_channel, CumulativeSampler, OpId, PauliChannel, QuasiDecomposition};
use crate::rng::{lane, shot_rng, GeometricSkip};
use crate::stab::{backpropagate_observable, deterministic_observable, random_clifford_circuit, CliffordCircuit};
use crate::stats::Moments;

/// Logical Pauli error rates per code distance at physical p = 0.01:
/// `(d, p_X = p_Z, p_Y)`.
pub const LOGICAL_CHANNELS: [(usize, f64, f64); 4] = [
    (5, 1.80e-4, 1.96e-6),
    (7, 1.39e-5, 4.11e-8),
    (9, 1.08e-6, 8.64e-10),
    (11, 8.35e-8, 1.81e-11),
];

pub fn logical_channel(d: usize) -> Result<PauliChannel> {
    let &(_, pxz, py) = LOGICAL_CHANNELS
        .iter()
        .find(|c| c.0 == d)
        .ok_or_else(|| Error::Config(format!("no logical channel tabulated for d = {d}")))?;
    PauliChannel::xyz(pxz, py, pxz)
}

/// How recoveries are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mitigation {
    Off,
    Exact,
    /// Inverse of the channel with probabilities scaled by `1 + r`.
    Scaled { r: f64 },
}

impl Mitigation {
    pub fn decomposition(self, noise: &PauliChannel) -> Result<QuasiDecomposition> {
        match self {
            Mitigation::Off => Ok(QuasiDecomposition::identity(noise.n)),
            Mitigation::Exact => invert_pauli_channel(noise),
            Mitigation::Scaled { r } if r == -1.0 => Ok(QuasiDecomposition::identity(noise.n)),
            Mitigation::Scaled { r } if r > -1.0 => invert_pauli_channel(&noise.scaled(1.0 + r)?),
            Mitigation::Scaled { r } => Err(Error::Config(format!("estimation error r = {r} must exceed −1"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliffordDemoConfig {
    pub qubits: usize,
    pub layers: usize,
    pub cnots_per_layer: usize,
    pub experiments: u64,
    pub shots: u64,
    /// Code distance whose tabulated logical channel is used as noise.
    pub distance: usize,
    /// Overrides the tabulated channel with explicit (p_X, p_Y, p_Z).
    pub noise: Option<[f64; 3]>,
    pub mitigation: Mitigation,
    pub bins: usize,
}

impl Default for CliffordDemoConfig {
    fn default() -> Self {
        CliffordDemoConfig {
            qubits: 100,
            layers: 100,
            cnots_per_layer: 50,
            experiments: 1000,
            shots: 10_000,
            distance: 7,
            noise: None,
            mitigation: Mitigation::Exact,
            bins: 50,
        }
    }
}

impl CliffordDemoConfig {
    pub fn channel(&self) -> Result<PauliChannel> {
        match self.noise {
            Some([x, y, z]) => PauliChannel::xyz(x, y, z).map_err(|e| Error::Config(e.to_string())),
            None => logical_channel(self.distance),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits < 2 || self.layers == 0 || self.experiments == 0 || self.shots == 0 || self.bins == 0 {
            return Err(Error::Config("qubits ≥ 2 and layers, experiments, shots, bins ≥ 1 required".into()));
        }
        self.channel()?;
        Ok(())
    }

    pub fn locations(&self) -> usize {
        self.qubits * self.layers
    }
}

/// Single-qubit Pauli indices 0..4 (I, X, Y, Z) anticommute iff both are
/// non-identity and different.
#[inline]
fn anticommutes(a: u8, b: u8) -> bool {
    a != 0 && b != 0 && a != b
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let t: f64 = w.iter().sum();
    w.iter().map(|x| x / t).collect()
}

/// Sparse per-location events: a location fires with probability `rate`, and
/// then picks one of `paulis` via `choice`.
#[derive(Debug, Clone)]
struct EventSampler {
    skip: GeometricSkip,
    choice: Option<CumulativeSampler>,
    paulis: Vec<u8>,
    signs: Vec<f64>,
}

impl EventSampler {
    fn from_channel(ch: &PauliChannel) -> Result<Self> {
        if ch.n != 1 {
            return Err(Error::Invalid("demo noise must be single-qubit".into()));
        }
        let rate = ch.p_err();
        Ok(EventSampler {
            skip: GeometricSkip::new(rate),
            choice: (rate > 0.0).then(|| CumulativeSampler::new(&normalized(&ch.probs[1..]))),
            paulis: vec![1, 2, 3],
            signs: vec![1.0; 3],
        })
    }

    fn from_decomposition(dec: &QuasiDecomposition) -> Result<Self> {
        if dec.n != 1 {
            return Err(Error::Invalid("demo recoveries must be single-qubit".into()));
        }
        let mut w = Vec::new();
        let mut paulis = Vec::new();
        let mut signs = Vec::new();
        let mut id = 0.0;
        for t in &dec.terms {
            let OpId::Pauli(p) = &t.op else {
                return Err(Error::Invalid("demo recoveries must be Pauli".into()));
            };
            let k = p.index() as u8;
            if k == 0 {
                if t.eta < 0.0 {
                    return Err(Error::Invalid("negative identity coefficient".into()));
                }
                id += t.eta;
            } else if t.eta != 0.0 {
                w.push(t.eta.abs());
                paulis.push(k);
                signs.push(t.eta.signum());
            }
        }
        let rate = 1.0 - id / dec.gamma;
        Ok(EventSampler {
            skip: GeometricSkip::new(if w.is_empty() { 0.0 } else { rate }),
            choice: (!w.is_empty()).then(|| CumulativeSampler::new(&normalized(&w))),
            paulis,
            signs,
        })
    }

    /// Walks all `obs.len()` locations; returns (anticommutation parity,
    /// sign product, event count).
    #[inline]
    fn run<R: rand::Rng + ?Sized>(&self, obs: &[u8], rng: &mut R) -> (bool, f64, u32) {
        let Some(choice) = &self.choice else {
            return (false, 1.0, 0);
        };
        let total = obs.len();
        let (mut flip, mut sign, mut events) = (false, 1.0, 0u32);
        let mut pos = 0usize;
        loop {
            pos = pos.saturating_add(self.skip.next(rng));
            if pos >= total {
                break;
            }
            let k = choice.sample(rng);
            flip ^= anticommutes(self.paulis[k], obs[pos]);
            sign *= self.signs[k];
            events += 1;
            pos += 1;
        }
        (flip, sign, events)
    }
}

/// A random circuit and its observable, with the back-propagated observable
/// restricted to each noise location (`layer * qubits + qubit`).
#[derive(Debug, Clone)]
pub struct DemoCircuit {
    pub circuit: CliffordCircuit,
    pub observable: PauliString,
    pub location_paulis: Vec<u8>,
}

impl DemoCircuit {
    pub fn new(circuit: CliffordCircuit, observable: PauliString) -> Self {
        let back = backpropagate_observable(&circuit, &observable);
        let n = circuit.n;
        let mut location_paulis = Vec::with_capacity(n * circuit.layers.len());
        for o in &back[1..] {
            for q in 0..n {
                location_paulis.push(o.get(q).index() as u8);
            }
        }
        DemoCircuit {
            circuit,
            observable,
            location_paulis,
        }
    }

    pub fn random(cfg: &CliffordDemoConfig, seed: u64) -> Result<Self> {
        let mut rng = shot_rng(seed, lane::CIRCUIT, 0);
        let c = random_clifford_circuit(cfg.qubits, cfg.layers, cfg.cnots_per_layer, &mut rng)?;
        let o = deterministic_observable(&c, &mut rng);
        Ok(Self::new(c, o))
    }

    /// Raw outcome for an explicit list of `(location, pauli index)` errors.
    pub fn outcome_for(&self, errors: &[(usize, u8)]) -> i8 {
        let flips = errors
            .iter()
            .filter(|&&(loc, p)| anticommutes(p, self.location_paulis[loc]))
            .count();
        if flips % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Histogram over `[lo, hi]` with equal-width bins; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("histogram of no values".into()));
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            return Ok(Histogram {
                lo,
                hi,
                counts: vec![values.len() as u64],
            });
        }
        let bins = bins.max(1);
        let mut counts = vec![0u64; bins];
        let w = (hi - lo) / bins as f64;
        for &v in values {
            let k = (((v - lo) / w) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Ok(Histogram { lo, hi, counts })
    }

    pub fn edges(&self) -> Vec<(f64, f64)> {
        let k = self.counts.len();
        let w = (self.hi - self.lo) / k as f64;
        (0..k)
            .map(|i| (self.lo + w * i as f64, if i + 1 == k { self.hi } else { self.lo + w * (i + 1) as f64 }))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Statistics over per-experiment means.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorStats {
    pub experiments: u64,
    pub means: Vec<f64>,
    pub grand_mean: f64,
    /// Standard deviation across experiments.
    pub sd: f64,
    /// `sd / √experiments`.
    pub se: f64,
    pub histogram: Histogram,
    pub gamma_tot: f64,
    /// Predicted sampling overhead `γ_tot²`.
    pub expected_overhead: f64,
}

pub fn aggregate(means: &[f64], gamma_tot: f64, bins: usize) -> Result<EstimatorStats> {
    if means.is_empty() {
        return Err(Error::Invalid("no experiments to aggregate".into()));
    }
    let m: Moments = means.iter().copied().collect();
    Ok(EstimatorStats {
        experiments: means.len() as u64,
        means: means.to_vec(),
        grand_mean: m.mean,
        sd: m.sd(),
        se: m.se(),
        histogram: Histogram::new(means, bins)?,
        gamma_tot,
        expected_overhead: gamma_tot * gamma_tot,
    })
}

pub const HISTOGRAM_CSV_HEADER: &str = "bin_lo,bin_hi,count,expected_overhead";

pub fn emit_histogram(stats: &EstimatorStats) -> String {
    let mut s = String::from(HISTOGRAM_CSV_HEADER);
    s.push('\n');
    for ((a, b), c) in stats.histogram.edges().into_iter().zip(&stats.histogram.counts) {
        s.push_str(&format!("{a:.6},{b:.6},{c},{:.6}\n", stats.expected_overhead));
    }
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CliffordDemoReport {
    pub config: CliffordDemoConfig,
    pub noise: PauliChannel,
    /// Per-location cost of the decomposition actually used.
    pub gamma: f64,
    pub gamma_tot: f64,
    /// Expected noise events per circuit, `locations · p_err`.
    pub analytic_events: f64,
    pub events: Moments,
    pub unmitigated: EstimatorStats,
    pub mitigated: EstimatorStats,
    /// Per-shot variances over all shots.
    pub shot_var_unmitigated: f64,
    pub shot_var_mitigated: f64,
    pub variance_ratio: f64,
}

impl CliffordDemoReport {
    pub const EXPERIMENT_CSV_HEADER: &'static str = "experiment,unmitigated_mean,mitigated_mean";

    pub fn experiment_csv(&self) -> String {
        let mut s = format!("{}\n", Self::EXPERIMENT_CSV_HEADER);
        for (i, (u, m)) in self.unmitigated.means.iter().zip(&self.mitigated.means).enumerate() {
            s.push_str(&format!("{i},{u:.8},{m:.8}\n"));
        }
        s
    }
}

struct ExperimentResult {
    raw: Moments,
    mit: Moments,
    events: Moments,
}

pub fn run_clifford_demo(cfg: &CliffordDemoConfig, seed: u64) -> Result<CliffordDemoReport> {
    cfg.validate()?;
    let circuit = DemoCircuit::random(cfg, seed)?;
    run_clifford_demo_on(cfg, &circuit, seed)
}

/// Runs the demo on a given circuit. Each shot uses independent noise and
/// recovery streams indexed by its global shot number.
pub fn run_clifford_demo_on(cfg: &CliffordDemoConfig, circuit: &DemoCircuit, seed: u64) -> Result<CliffordDemoReport> {
    cfg.validate()?;
    if circuit.location_paulis.len() != cfg.locations() {
        return Err(Error::SizeMismatch(circuit.location_paulis.len(), cfg.locations()));
    }
    let noise = cfg.channel()?;
    let dec = cfg.mitigation.decomposition(&noise)?;
    let gamma_tot = dec.gamma.powf(cfg.locations() as f64);
    let noise_s = EventSampler::from_channel(&noise)?;
    let qem_s = EventSampler::from_decomposition(&dec)?;
    let obs = &circuit.location_paulis;
    let shots = cfg.shots;

    let results: Vec<ExperimentResult> = par::map_chunks(cfg.experiments, 1, |e, _| {
        let mut r = ExperimentResult {
            raw: Moments::default(),
            mit: Moments::default(),
            events: Moments::default(),
        };
        for s in 0..shots {
            let idx = e * shots + s;
            let mut nr = shot_rng(seed, lane::NOISE, idx);
            let mut qr = shot_rng(seed, lane::QEM, idx);
            let (nf, _, ne) = noise_s.run(obs, &mut nr);
            let (qf, sign, _) = qem_s.run(obs, &mut qr);
            let raw = if nf { -1.0 } else { 1.0 };
            let mit = gamma_tot * sign * if nf ^ qf { -1.0 } else { 1.0 };
            r.raw.push(raw);
            r.mit.push(mit);
            r.events.push(f64::from(ne));
        }
        r
    });

    let mut raw_all = Moments::default();
    let mut mit_all = Moments::default();
    let mut events = Moments::default();
    for r in &results {
        raw_all.merge(&r.raw);
        mit_all.merge(&r.mit);
        events.merge(&r.events);
    }
    let raw_means: Vec<f64> = results.iter().map(|r| r.raw.mean).collect();
    let mit_means: Vec<f64> = results.iter().map(|r| r.mit.mean).collect();
    let shot_var_unmitigated = raw_all.variance();
    let shot_var_mitigated = mit_all.variance();
    Ok(CliffordDemoReport {
        config: cfg.clone(),
        analytic_events: cfg.locations() as f64 * noise.p_err(),
        noise,
        gamma: dec.gamma,
        gamma_tot,
        events,
        unmitigated: aggregate(&raw_means, 1.0, cfg.bins)?,
        mitigated: aggregate(&mit_means, gamma_tot, cfg.bins)?,
        shot_var_unmitigated,
        shot_var_mitigated,
        variance_ratio: if shot_var_unmitigated > 0.0 {
            shot_var_mitigated / shot_var_unmitigated
        } else {
            f64::INFINITY
        },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationErrorPoint {
    pub r: f64,
    pub gamma_tot: f64,
    pub mean: f64,
    pub se: f64,
    /// `mean − 1` (the ideal expectation is +1).
    pub bias: f64,
    pub experiment_sd: f64,
    pub shot_variance: f64,
}

impl EstimationErrorPoint {
    pub const CSV_HEADER: &'static str = "r,gamma_tot,mean,se,bias,experiment_sd,shot_variance";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.8},{:.8},{:.8},{:.8},{:.8}",
            self.r, self.gamma_tot, self.mean, self.se, self.bias, self.experiment_sd, self.shot_variance
        )
    }
}

/// Runs the demo once per `r`, mitigating with channels scaled by `1 + r`.
/// All points share the circuit and the noise stream.
pub fn run_estimation_error_demo(cfg: &CliffordDemoConfig, rs: &[f64], seed: u64) -> Result<Vec<EstimationErrorPoint>> {
    if rs.is_empty() {
        return Err(Error::Config("empty r grid".into()));
    }
    let circuit = DemoCircuit::random(cfg, seed)?;
    rs.iter()
        .map(|&r| {
            let c = CliffordDemoConfig {
                mitigation: Mitigation::Scaled { r },
                ..cfg.clone()
            };
            let rep = run_clifford_demo_on(&c, &circuit, seed)?;
            Ok(EstimationErrorPoint {
                r,
                gamma_tot: rep.gamma_tot,
                mean: rep.mitigated.grand_mean,
                se: rep.mitigated.se,
                bias: rep.mitigated.grand_mean - 1.0,
                experiment_sd: rep.mitigated.sd,
                shot_variance: rep.shot_var_mitigated,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use crate::stab::StabilizerTableau;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small(noise: [f64; 3], mitigation: Mitigation) -> CliffordDemoConfig {
        CliffordDemoConfig {
            qubits: 6,
            layers: 8,
            cnots_per_layer: 3,
            experiments: 40,
            shots: 2000,
            noise: Some(noise),
            mitigation,
            bins: 10,
            ..Default::default()
        }
    }

    #[test]
    fn fast_path_matches_tableau() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = small([0.0; 3], Mitigation::Off);
        for trial in 0..20 {
            let dc = DemoCircuit::random(&cfg, trial).unwrap();
            let n = cfg.qubits;
            let errors: Vec<(usize, u8)> = (0..rng.gen_range(0..8))
                .map(|_| (rng.gen_range(0..cfg.locations()), rng.gen_range(1..4u8)))
                .collect();
            let mut t = StabilizerTableau::new(n);
            for (k, layer) in dc.circuit.layers.iter().enumerate() {
                for &g in layer {
                    t.apply_gate(g).unwrap();
                }
                for &(loc, p) in &errors {
                    if loc / n == k {
                        t.apply_pauli(&PauliString::single(n, loc % n, Pauli::from_index(p as usize)));
                    }
                }
            }
            assert_eq!(t.expectation_pauli(&dc.observable).unwrap(), dc.outcome_for(&errors));
        }
    }

    #[test]
    fn noiseless_demo_is_exact() {
        let rep = run_clifford_demo(&small([0.0; 3], Mitigation::Exact), 1).unwrap();
        assert_eq!(rep.gamma_tot, 1.0);
        assert!(rep.mitigated.means.iter().all(|&m| m == 1.0));
        assert!(rep.unmitigated.means.iter().all(|&m| m == 1.0));
        assert_eq!(rep.events.mean, 0.0);
    }

    #[test]
    fn mitigated_demo_is_unbiased() {
        let rep = run_clifford_demo(&small([0.01, 0.004, 0.008], Mitigation::Exact), 5).unwrap();
        let m = &rep.mitigated;
        assert!((m.grand_mean - 1.0).abs() < 4.0 * m.se, "{} ± {}", m.grand_mean, m.se);
        let u = &rep.unmitigated;
        assert!(u.grand_mean < m.grand_mean - 5.0 * (u.se.hypot(m.se)));
        let want = rep.config.locations() as f64 * 0.022;
        assert!((rep.events.mean - want).abs() < 5.0 * rep.events.se());
        assert_eq!(m.histogram.total(), m.experiments);
    }

    #[test]
    fn r_minus_one_reproduces_unmitigated() {
        let cfg = small([0.01, 0.0, 0.01], Mitigation::Scaled { r: -1.0 });
        let rep = run_clifford_demo(&cfg, 9).unwrap();
        assert_eq!(rep.mitigated.means, rep.unmitigated.means);
        let off = run_clifford_demo(&small([0.01, 0.0, 0.01], Mitigation::Off), 9).unwrap();
        assert_eq!(off.unmitigated.means, rep.unmitigated.means);
        assert!(Mitigation::Scaled { r: -1.5 }.decomposition(&rep.noise).is_err());
    }

    #[test]
    fn deterministic_regardless_of_threads() {
        let cfg = small([0.01, 0.002, 0.01], Mitigation::Exact);
        let a = run_clifford_demo(&cfg, 4).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_clifford_demo(&cfg, 4).unwrap());
        assert_eq!(a.mitigated.means, b.mitigated.means);
        assert_eq!(a.unmitigated.means, b.unmitigated.means);
    }

    #[test]
    fn histogram_and_aggregate() {
        let s = aggregate(&[2.0], 1.5, 10).unwrap();
        assert_eq!(s.histogram.counts, vec![1]);
        assert_eq!(s.expected_overhead, 2.25);
        let v = [1.0, 2.0, 3.0, 4.0];
        let s = aggregate(&v, 1.0, 3).unwrap();
        assert_eq!(s.histogram.total(), 4);
        assert!((s.grand_mean - 2.5).abs() < 1e-15);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((s.se - s.sd / 2.0).abs() < 1e-15);
        assert!(aggregate(&[], 1.0, 3).is_err());
        assert!(emit_histogram(&s).lines().count() == 4);
    }

    #[test]
    fn logical_channel_events() {
        let ch = logical_channel(7).unwrap();
        assert!((1e4 * ch.p_err() - 0.278).abs() < 1e-3);
        assert!(logical_channel(4).is_err());
    }

    #[test]
    fn event_pauli_mix_follows_channel() {
        let ch = PauliChannel::xyz(0.002, 0.001, 0.003).unwrap();
        let es = EventSampler::from_channel(&ch).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut hits = [0usize; 4];
        let c = es.choice.as_ref().unwrap();
        for _ in 0..60_000 {
            hits[es.paulis[c.sample(&mut rng)] as usize] += 1;
        }
        for (k, want) in [(1, 2.0 / 6.0), (2, 1.0 / 6.0), (3, 3.0 / 6.0)] {
            assert!((hits[k] as f64 / 60_000.0 - want).abs() < 0.01, "{hits:?}");
        }
    }
}
