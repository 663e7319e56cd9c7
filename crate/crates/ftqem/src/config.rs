//! Run configuration: one TOML table per subcommand, every field defaulted.

use serde::{Deserialize, Serialize};

use crate::decision::QpeConfig;
use crate::error::{Error, Result};
use crate::harness::CliffordDemoConfig;
use crate::resource::{CodeParams, CyclesPerGate};

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_rate(p: f64, what: &str) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(cfg_err(format!("{what} = {p} outside [0, 1)")));
    }
    Ok(())
}

fn check_distances(ds: &[usize]) -> Result<()> {
    if ds.is_empty() || ds.iter().any(|&d| d < 3 || d % 2 == 0) {
        return Err(cfg_err("distances must be a non-empty list of odd integers ≥ 3"));
    }
    Ok(())
}

/// Logical channel estimation and decoder throughput.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecodeBenchConfig {
    pub distances: Vec<usize>,
    pub p: f64,
    pub shots: u64,
    /// Distances used for the suppression-law extrapolation.
    pub fit_distances: Vec<usize>,
    /// Distances to extrapolate to.
    pub extrapolate: Vec<usize>,
}

impl Default for DecodeBenchConfig {
    fn default() -> Self {
        DecodeBenchConfig {
            distances: vec![3, 5, 7],
            p: 0.01,
            shots: 1_000_000,
            fit_distances: vec![5, 7],
            extrapolate: vec![9, 11],
        }
    }
}

impl DecodeBenchConfig {
    pub fn validate(&self) -> Result<()> {
        check_distances(&self.distances)?;
        check_rate(self.p, "p")?;
        if self.shots == 0 {
            return Err(cfg_err("shots must be positive"));
        }
        if self.fit_distances.len() < 2 || self.fit_distances.iter().any(|d| !self.distances.contains(d)) {
            return Err(cfg_err("fit_distances needs two or more of the sampled distances"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdScanConfig {
    pub distances: Vec<usize>,
    pub p_min: f64,
    pub p_max: f64,
    pub points: usize,
    pub shots: u64,
}

impl Default for ThresholdScanConfig {
    fn default() -> Self {
        ThresholdScanConfig {
            distances: vec![3, 5, 7],
            p_min: 0.02,
            p_max: 0.07,
            points: 21,
            shots: 100_000,
        }
    }
}

impl ThresholdScanConfig {
    pub fn validate(&self) -> Result<()> {
        check_distances(&self.distances)?;
        check_rate(self.p_min, "p_min")?;
        check_rate(self.p_max, "p_max")?;
        if !(self.p_min < self.p_max) || self.points < 2 || self.shots == 0 {
            return Err(cfg_err("need p_min < p_max, points ≥ 2 and shots ≥ 1"));
        }
        Ok(())
    }

    pub fn ps(&self) -> Vec<f64> {
        let step = (self.p_max - self.p_min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.p_min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarkovFitConfig {
    pub distance: usize,
    pub p: f64,
    pub cycles: Vec<usize>,
    pub shots: u64,
    /// Only cycle counts above this enter the fit.
    pub min_cycles: usize,
}

impl Default for MarkovFitConfig {
    fn default() -> Self {
        MarkovFitConfig {
            distance: 3,
            p: 0.01,
            cycles: (20..=60).step_by(5).collect(),
            shots: 100_000,
            min_cycles: 0,
        }
    }
}

impl MarkovFitConfig {
    pub fn validate(&self) -> Result<()> {
        check_distances(&[self.distance])?;
        check_rate(self.p, "p")?;
        if self.shots == 0 || self.cycles.iter().filter(|&&c| c > self.min_cycles).count() < 3 {
            return Err(cfg_err("need shots ≥ 1 and at least three cycle counts above min_cycles"));
        }
        if self.cycles.contains(&0) {
            return Err(cfg_err("cycle counts must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SkBenchConfig {
    pub samples: usize,
    /// Total T budgets per unitary, split evenly over three rotations.
    pub budgets: Vec<usize>,
}

impl Default for SkBenchConfig {
    fn default() -> Self {
        SkBenchConfig {
            samples: 200,
            budgets: (12..=60).step_by(6).collect(),
        }
    }
}

impl SkBenchConfig {
    pub fn validate(&self) -> Result<()> {
        let mut b = self.budgets.clone();
        b.sort_unstable();
        b.dedup();
        if self.samples == 0 || b.len() < 3 {
            return Err(cfg_err("need samples ≥ 1 and three distinct budgets"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwapDemoConfig {
    pub side: usize,
    pub layers: usize,
    pub budgets: Vec<usize>,
    pub circuits: u64,
    pub shots: u64,
}

impl Default for SwapDemoConfig {
    fn default() -> Self {
        SwapDemoConfig {
            side: 3,
            layers: 3,
            budgets: vec![24, 36, 48, 60],
            circuits: 1000,
            shots: 1000,
        }
    }
}

impl SwapDemoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.side < 2 || self.layers == 0 || self.budgets.is_empty() || self.circuits == 0 || self.shots == 0 {
            return Err(cfg_err("need side ≥ 2 and positive layers, budgets, circuits, shots"));
        }
        if 2 * self.side + 1 > 12 {
            return Err(cfg_err("side too large for the dense simulator"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstErrorConfig {
    /// Relative misestimation of every error probability.
    pub r: Vec<f64>,
    pub demo: CliffordDemoConfig,
}

impl Default for EstErrorConfig {
    fn default() -> Self {
        EstErrorConfig {
            r: vec![-0.5, -0.2, 0.0, 0.2, 0.5],
            demo: CliffordDemoConfig::default(),
        }
    }
}

impl EstErrorConfig {
    pub fn validate(&self) -> Result<()> {
        self.demo.validate()?;
        if self.r.is_empty() || self.r.iter().any(|&r| !(r > -1.0)) {
            return Err(cfg_err("r values must exceed −1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GstDemoConfig {
    /// True (p_X, p_Y, p_Z) of the tomographed Hadamard.
    pub truth: [f64; 3],
    /// Depolarizing SPAM strength.
    pub spam: f64,
    /// Target relative accuracy and error scale for the sample-count formula.
    pub accuracy: f64,
    pub eps: f64,
    /// Prefactor `c` of the sample-count formula.
    pub prefactor: f64,
    pub bootstrap: usize,
    /// Relative accuracy used to size the GST runs behind the PEC check.
    pub pec_accuracy: f64,
    pub pec_shots: u64,
}

impl Default for GstDemoConfig {
    fn default() -> Self {
        GstDemoConfig {
            truth: [1e-3, 3e-4, 5e-4],
            spam: 0.005,
            accuracy: 0.2,
            eps: 1e-3,
            prefactor: 1.0,
            bootstrap: 200,
            pec_accuracy: 0.01,
            pec_shots: 200_000,
        }
    }
}

impl GstDemoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truth.iter().any(|&p| p < 0.0) || self.truth.iter().sum::<f64>() >= 1.0 {
            return Err(cfg_err("truth must be non-negative probabilities summing below 1"));
        }
        check_rate(self.spam, "spam")?;
        if !(self.accuracy > 0.0 && self.eps > 0.0 && self.prefactor > 0.0 && self.pec_accuracy > 0.0) {
            return Err(cfg_err("accuracy, eps, prefactor and pec_accuracy must be positive"));
        }
        if self.bootstrap < 2 || self.pec_shots == 0 {
            return Err(cfg_err("need bootstrap ≥ 2 and pec_shots ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesConfig {
    pub c1: f64,
    pub c2: f64,
    pub ratio: f64,
    /// Cycles-per-gate conventions to tabulate.
    pub cycles_per_gate: Vec<CyclesPerGate>,
    pub gate_counts: Vec<f64>,
    pub error_budgets: Vec<f64>,
    /// Distances for the fixed-distance gate budget table.
    pub distances: Vec<u32>,
}

impl Default for ResourcesConfig {
    fn default() -> Self {
        let p = CodeParams::default();
        ResourcesConfig {
            c1: p.c1,
            c2: p.c2,
            ratio: p.ratio,
            cycles_per_gate: vec![CyclesPerGate::Fixed(1), CyclesPerGate::Distance],
            gate_counts: (2..=12).map(|k| 10f64.powi(k)).collect(),
            error_budgets: vec![1e-3, 1e-2, 1e-1, 1.0],
            distances: (3..=25).step_by(2).collect(),
        }
    }
}

impl ResourcesConfig {
    pub fn params(&self, m: CyclesPerGate) -> CodeParams {
        CodeParams {
            c1: self.c1,
            c2: self.c2,
            ratio: self.ratio,
            m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycles_per_gate.is_empty() {
            return Err(cfg_err("cycles_per_gate must not be empty"));
        }
        for &m in &self.cycles_per_gate {
            self.params(m).validate().map_err(|e| cfg_err(e.to_string()))?;
        }
        if self.gate_counts.iter().any(|&n| !(n >= 1.0)) || self.error_budgets.iter().any(|&e| !(e > 0.0)) {
            return Err(cfg_err("gate counts must be ≥ 1 and error budgets positive"));
        }
        if self.distances.iter().any(|&d| d < 3 || d % 2 == 0) {
            return Err(cfg_err("distances must be odd and ≥ 3"));
        }
        Ok(())
    }
}

/// All subcommand sections.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub decode_bench: DecodeBenchConfig,
    pub threshold_scan: ThresholdScanConfig,
    pub markov_fit: MarkovFitConfig,
    pub clifford_demo: CliffordDemoConfig,
    pub sk_bench: SkBenchConfig,
    pub swap_demo: SwapDemoConfig,
    pub est_error_demo: EstErrorConfig,
    pub gst_demo: GstDemoConfig,
    pub bisection_demo: QpeConfig,
    pub resources: ResourcesConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.decode_bench.validate()?;
        self.threshold_scan.validate()?;
        self.markov_fit.validate()?;
        self.clifford_demo.validate()?;
        self.sk_bench.validate()?;
        self.swap_demo.validate()?;
        self.est_error_demo.validate()?;
        self.gst_demo.validate()?;
        validate_qpe(&self.bisection_demo)?;
        self.resources.validate()
    }
}

pub fn validate_qpe(q: &QpeConfig) -> Result<()> {
    if !(q.e_min < q.e_max) || q.bits == 0 || q.bits > 8 || q.trials == 0 || !(q.eps > 0.0) {
        return Err(cfg_err("need e_min < e_max, 1 ≤ bits ≤ 8, trials ≥ 1, eps > 0"));
    }
    check_rate(q.noise, "noise")?;
    let r = &q.rule;
    if !(r.delta > 0.0 && r.delta < 1.0) || r.batch == 0 || r.budget < r.batch {
        return Err(cfg_err("decision rule needs 0 < delta < 1 and budget ≥ batch ≥ 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = Config::default();
        let text = c.to_toml();
        assert_eq!(Config::from_toml(&text).unwrap(), c);
        c.validate().unwrap();
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let c = Config::from_toml("[clifford_demo]\ndistance = 5\nexperiments = 10\n").unwrap();
        assert_eq!(c.clifford_demo.distance, 5);
        assert_eq!(c.clifford_demo.shots, 10_000);
        assert_eq!(c.threshold_scan, ThresholdScanConfig::default());
    }

    #[test]
    fn malformed_or_unknown_is_config_error() {
        for bad in ["[clifford_demo]\ndistanse = 5", "[nope]\na = 1", "not toml ==="] {
            assert!(matches!(Config::from_toml(bad), Err(Error::Config(_))), "{bad}");
        }
        let c = Config::from_toml("[threshold_scan]\np_min = 0.08").unwrap();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = Config::from_toml("[clifford_demo]\ndistance = 4").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn threshold_grid() {
        let ps = ThresholdScanConfig::default().ps();
        assert_eq!(ps.len(), 21);
        assert!((ps[0] - 0.02).abs() < 1e-15 && (ps[20] - 0.07).abs() < 1e-12);
    }
}
