//! Subcommand bodies shared by the command-line driver and the tests. Each
//! returns the `stats.json` payload, the CSV files and a human summary; only
//! the summary may carry wall-clock times, so written outputs depend on the
//! seed and config alone.

use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance::{self, CriterionReport};
use crate::config::{
    Config, DecodeBenchConfig, EstErrorConfig, GstDemoConfig, MarkovFitConfig, ResourcesConfig, SkBenchConfig,
    SwapDemoConfig, ThresholdScanConfig,
};
use crate::decision::{run_bisection_demo, BisectionReport, QpeConfig};
use crate::error::{Error, Result};
use crate::frame::ideal_expectation;
use crate::gst::{
    bootstrap_pauli_se, estimate_gateset, extract_pauli_probs, measure_raw, sample_count_for_accuracy,
    spam_free_pec_check, FiducialSet, GstGate, SpamModel,
};
use crate::harness::{
    emit_histogram, run_clifford_demo, run_estimation_error_demo, CliffordDemoConfig, CliffordDemoReport,
    EstimationErrorPoint, Mitigation, LOGICAL_CHANNELS,
};
use crate::linalg;
use crate::quasiprob::PauliChannel;
use crate::resource::{effective_distance_gain, max_gates_at_distance, required_distance, CyclesPerGate, Requirement};
use crate::rng::mix;
use crate::surface::{
    estimate_logical_channel, fit_suppression, locate_crossing, markovianity_fit, threshold_estimate, threshold_scan,
};
use crate::swap::{run_swap_budget, SwapBudgetStats, SwapTestSpec};
use crate::synth::{fit_mean_gamma, haar_random_su2, sk_record, SkRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    DecodeBench,
    ThresholdScan,
    MarkovFit,
    CliffordDemo,
    SkBench,
    SwapDemo,
    EstErrorDemo,
    GstDemo,
    BisectionDemo,
    Resources,
    Selftest,
}

impl Subcommand {
    pub const ALL: [Subcommand; 11] = [
        Subcommand::DecodeBench,
        Subcommand::ThresholdScan,
        Subcommand::MarkovFit,
        Subcommand::CliffordDemo,
        Subcommand::SkBench,
        Subcommand::SwapDemo,
        Subcommand::EstErrorDemo,
        Subcommand::GstDemo,
        Subcommand::BisectionDemo,
        Subcommand::Resources,
        Subcommand::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::DecodeBench => "decode-bench",
            Subcommand::ThresholdScan => "threshold-scan",
            Subcommand::MarkovFit => "markov-fit",
            Subcommand::CliffordDemo => "clifford-demo",
            Subcommand::SkBench => "sk-bench",
            Subcommand::SwapDemo => "swap-demo",
            Subcommand::EstErrorDemo => "est-error-demo",
            Subcommand::GstDemo => "gst-demo",
            Subcommand::BisectionDemo => "bisection-demo",
            Subcommand::Resources => "resources",
            Subcommand::Selftest => "selftest",
        }
    }

    /// Config table for this subcommand, as TOML.
    pub fn config_section(self, cfg: &Config) -> Option<Value> {
        let v = match self {
            Subcommand::DecodeBench => serde_json::to_value(&cfg.decode_bench),
            Subcommand::ThresholdScan => serde_json::to_value(&cfg.threshold_scan),
            Subcommand::MarkovFit => serde_json::to_value(&cfg.markov_fit),
            Subcommand::CliffordDemo => serde_json::to_value(&cfg.clifford_demo),
            Subcommand::SkBench => serde_json::to_value(&cfg.sk_bench),
            Subcommand::SwapDemo => serde_json::to_value(&cfg.swap_demo),
            Subcommand::EstErrorDemo => serde_json::to_value(&cfg.est_error_demo),
            Subcommand::GstDemo => serde_json::to_value(&cfg.gst_demo),
            Subcommand::BisectionDemo => serde_json::to_value(&cfg.bisection_demo),
            Subcommand::Resources => serde_json::to_value(&cfg.resources),
            Subcommand::Selftest => return None,
        };
        v.ok()
    }

    /// Acceptance criteria exercised by `--acceptance`; `selftest` runs them all.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Subcommand::DecodeBench => &[2],
            Subcommand::ThresholdScan => &[1],
            Subcommand::MarkovFit => &[12],
            Subcommand::CliffordDemo => &[3, 4, 5],
            Subcommand::SkBench => &[8],
            Subcommand::SwapDemo => &[9],
            Subcommand::EstErrorDemo => &[7],
            Subcommand::GstDemo => &[10],
            Subcommand::BisectionDemo => &[],
            Subcommand::Resources => &[11],
            Subcommand::Selftest => &acceptance::ALL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub results: Value,
    /// `(file name, contents)`.
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
    /// False when a self-check failed (selftest only).
    pub ok: bool,
}

impl RunOutput {
    fn new(results: Value) -> Self {
        RunOutput {
            results,
            files: Vec::new(),
            summary: Vec::new(),
            ok: true,
        }
    }

    fn file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }

    fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

/// Full `stats.json` document.
pub fn stats_document(sub: Subcommand, cfg: &Config, seed: u64, out: &RunOutput) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": sub.name(),
        "seed": seed,
        "config": sub.config_section(cfg),
        "results": out.results,
    })
}

pub fn run(sub: Subcommand, cfg: &Config, seed: u64) -> Result<RunOutput> {
    match sub {
        Subcommand::DecodeBench => decode_bench(&cfg.decode_bench, seed),
        Subcommand::ThresholdScan => run_threshold_scan(&cfg.threshold_scan, seed),
        Subcommand::MarkovFit => markov_fit(&cfg.markov_fit, seed),
        Subcommand::CliffordDemo => clifford_demo(&cfg.clifford_demo, seed),
        Subcommand::SkBench => sk_bench(&cfg.sk_bench, seed),
        Subcommand::SwapDemo => swap_demo(&cfg.swap_demo, seed),
        Subcommand::EstErrorDemo => est_error_demo(&cfg.est_error_demo, seed),
        Subcommand::GstDemo => gst_demo(&cfg.gst_demo, seed),
        Subcommand::BisectionDemo => bisection_demo(&cfg.bisection_demo, seed),
        Subcommand::Resources => resources(&cfg.resources),
        Subcommand::Selftest => selftest(seed),
    }
}

/// Runs the criteria mapped to `sub`, returning the reports.
pub fn run_acceptance(sub: Subcommand, seed: u64) -> Result<Vec<CriterionReport>> {
    sub.criteria().iter().map(|&k| acceptance::run_criterion(k, seed)).collect()
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

pub fn decode_bench(cfg: &DecodeBenchConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let mut csv = String::from("d,p,shots,cycles,p_X,p_Y,p_Z,se_X,se_Y,se_Z,cycle_p_X,cycle_p_Y,cycle_p_Z,cycle_se_X,cycle_se_Y,cycle_se_Z\n");
    let mut rows = Vec::new();
    let mut per_cycle = Vec::new();
    let mut lines = Vec::new();
    for &d in &cfg.distances {
        let t = Instant::now();
        let est = estimate_logical_channel(d, cfg.p, cfg.shots, mix(seed, d as u64))?;
        let secs = t.elapsed().as_secs_f64();
        let (pc, pse) = est.per_cycle();
        let _ = writeln!(
            csv,
            "{d},{},{},{},{:.6e},{:.6e},{:.6e},{:.3e},{:.3e},{:.3e},{:.6e},{:.6e},{:.6e},{:.3e},{:.3e},{:.3e}",
            cfg.p, cfg.shots, est.cycles, est.probs[1], est.probs[2], est.probs[3], est.se[1], est.se[2], est.se[3],
            pc[1], pc[2], pc[3], pse[1], pse[2], pse[3]
        );
        lines.push(format!(
            "d={d}: per-cycle p_X {:.3e} p_Y {:.3e} p_Z {:.3e}  ({:.0} shots/s)",
            pc[1],
            pc[2],
            pc[3],
            cfg.shots as f64 / secs.max(1e-9)
        ));
        rows.push(json!({"d": d, "cycles": est.cycles, "counts": est.counts, "window_probs": est.probs,
            "window_se": est.se, "per_cycle_probs": pc, "per_cycle_se": pse}));
        per_cycle.push((d, pc));
    }
    let mut ext = String::from("d,component,fitted,table\n");
    let mut fits = serde_json::Map::new();
    for (k, name) in [(1usize, "X"), (2, "Y"), (3, "Z")] {
        let sel: Vec<&(usize, [f64; 4])> = per_cycle.iter().filter(|r| cfg.fit_distances.contains(&r.0)).collect();
        let ds: Vec<usize> = sel.iter().map(|r| r.0).collect();
        let rates: Vec<f64> = sel.iter().map(|r| r.1[k]).collect();
        match fit_suppression(&ds, &rates) {
            Ok(fit) => {
                for &d in cfg.distances.iter().chain(&cfg.extrapolate) {
                    let table = LOGICAL_CHANNELS
                        .iter()
                        .find(|c| c.0 == d)
                        .map(|c| if k == 2 { c.2 } else { c.1 });
                    let t = table.map(|v| format!("{v:.3e}")).unwrap_or_default();
                    let _ = writeln!(ext, "{d},{name},{:.4e},{t}", fit.predict(d));
                }
                fits.insert(name.into(), json!({"c1": fit.c1, "kappa": fit.kappa, "r2": fit.fit.r2}));
            }
            Err(e) => {
                fits.insert(name.into(), json!({"error": e.to_string()}));
            }
        }
    }
    let mut out = RunOutput::new(json!({"rows": rows, "suppression_fits": fits}))
        .file("channels.csv", csv)
        .file("extrapolation.csv", ext);
    out.summary = lines;
    Ok(out)
}

pub fn run_threshold_scan(cfg: &ThresholdScanConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let pts = threshold_scan(&cfg.distances, &cfg.ps(), cfg.shots, seed)?;
    let mut csv = String::from("d,p,shots,p_logical,se,p_X,p_Y,p_Z\n");
    for q in &pts {
        let pr = q.estimate.probs;
        let _ = writeln!(csv, "{},{:.5},{},{:.6e},{:.3e},{:.6e},{:.6e},{:.6e}", q.d, q.p, q.shots, q.p_logical, q.se, pr[1], pr[2], pr[3]);
    }
    let mut ds = cfg.distances.clone();
    ds.sort_unstable();
    ds.dedup();
    let pairs: Vec<Value> = ds
        .windows(2)
        .map(|w| json!({"d_small": w[0], "d_large": w[1], "crossing": locate_crossing(&pts, w[0], w[1])}))
        .collect();
    let est = threshold_estimate(&pts);
    let mut out = RunOutput::new(json!({"threshold": est, "crossings": pairs})).file("threshold.csv", csv);
    out.say(format!("threshold estimate {est:?}"));
    Ok(out)
}

pub fn markov_fit(cfg: &MarkovFitConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let fit = markovianity_fit(cfg.distance, cfg.p, &cfg.cycles, cfg.shots, seed, cfg.min_cycles)?;
    let mut csv = String::from("cycles,lambda_X,lambda_Y,lambda_Z,se_X,se_Y,se_Z\n");
    for q in &fit.points {
        let _ = writeln!(
            csv,
            "{},{:.8},{:.8},{:.8},{:.3e},{:.3e},{:.3e}",
            q.cycles, q.lambda[1], q.lambda[2], q.lambda[3], q.se[1], q.se[2], q.se[3]
        );
    }
    let fits: Vec<Value> = fit
        .fits
        .iter()
        .zip(["X", "Y", "Z"])
        .map(|(f, n)| {
            json!({"component": n, "fit": f.as_ref().map(|f| json!({
                "slope": f.slope, "se_slope": f.se_slope, "intercept": f.intercept, "r2": f.r2}))})
        })
        .collect();
    let mut out = RunOutput::new(json!({"fits": fits, "lambda_eff": fit.lambda_eff})).file("markov.csv", csv);
    for (f, n) in fit.fits.iter().zip(["X", "Y", "Z"]) {
        if let Some(f) = f {
            out.say(format!("Λ_{n}{n}: slope {:.4e} ± {:.1e}, R² {:.5}", f.slope, f.se_slope, f.r2));
        }
    }
    Ok(out)
}

fn demo_summary(r: &CliffordDemoReport) -> Value {
    json!({
        "noise": r.noise.probs,
        "gamma": r.gamma,
        "gamma_tot": r.gamma_tot,
        "analytic_events": r.analytic_events,
        "events_mean": r.events.mean,
        "events_se": r.events.se(),
        "unmitigated": {"mean": r.unmitigated.grand_mean, "sd": r.unmitigated.sd, "se": r.unmitigated.se},
        "mitigated": {"mean": r.mitigated.grand_mean, "sd": r.mitigated.sd, "se": r.mitigated.se},
        "shot_var_unmitigated": r.shot_var_unmitigated,
        "shot_var_mitigated": r.shot_var_mitigated,
        "variance_ratio": r.variance_ratio,
        "expected_overhead": r.gamma_tot * r.gamma_tot,
    })
}

pub fn clifford_demo(cfg: &CliffordDemoConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let r = run_clifford_demo(cfg, seed)?;
    let mut out = RunOutput::new(demo_summary(&r))
        .file("histogram.csv", emit_histogram(&r.mitigated))
        .file("histogram_unmitigated.csv", emit_histogram(&r.unmitigated))
        .file("experiments.csv", r.experiment_csv());
    out.say(format!("events/circuit {:.4} (analytic {:.4}), γ_tot {:.4}", r.events.mean, r.analytic_events, r.gamma_tot));
    out.say(format!("unmitigated {:.5} ± {:.5}", r.unmitigated.grand_mean, r.unmitigated.se));
    out.say(format!("mitigated   {:.5} ± {:.5} (sd {:.4})", r.mitigated.grand_mean, r.mitigated.se, r.mitigated.sd));
    Ok(out)
}

pub fn sk_records(samples: usize, budgets: &[usize], seed: u64) -> Result<Vec<SkRecord>> {
    let per = crate::par::map_chunks(samples as u64, 1, |i, _| -> Result<Vec<SkRecord>> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, i));
        let u = haar_random_su2(&mut rng);
        budgets.iter().map(|&t| sk_record(i as usize, &u, t)).collect()
    });
    let mut records = Vec::new();
    for r in per {
        records.extend(r?);
    }
    Ok(records)
}

pub fn sk_bench(cfg: &SkBenchConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let records = sk_records(cfg.samples, &cfg.budgets, seed)?;
    let (rows, fit) = fit_mean_gamma(&records)?;
    let mut csv = format!("{}\n", SkRecord::CSV_HEADER);
    for r in &records {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    let mut mean_csv = String::from("budget,mean_gamma_minus_1,sd\n");
    for (b, m, s) in &rows {
        let _ = writeln!(mean_csv, "{b},{m:.6e},{s:.6e}");
    }
    let mut out = RunOutput::new(json!({"samples": cfg.samples, "rows": rows, "fit": fit}))
        .file("sk_samples.csv", csv)
        .file("sk_mean.csv", mean_csv);
    out.say(format!("log(γ−1) = log {:.3} − {:.4}·N_T, R² {:.4}", fit.beta1, fit.beta2, fit.r2));
    Ok(out)
}

pub fn swap_demo(cfg: &SwapDemoConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let mut csv = format!("{}\n", SwapBudgetStats::CSV_HEADER);
    let mut all = Vec::new();
    let mut out = RunOutput::new(Value::Null);
    for &t_budget in &cfg.budgets {
        let spec = SwapTestSpec {
            side: cfg.side,
            layers: cfg.layers,
            t_budget,
        };
        let s = run_swap_budget(spec, cfg.circuits, cfg.shots, seed)?;
        csv.push_str(&s.csv_row());
        csv.push('\n');
        out.say(format!(
            "budget {t_budget}: unmitigated {:.5} (exact {:.6}), mitigated {:.5} ± {:.5}",
            s.unmitigated.mean,
            s.exact_unmitigated,
            s.mitigated.mean,
            s.mitigated.se()
        ));
        all.push(s);
    }
    out.results = to_json(&all);
    Ok(out.file("swap.csv", csv))
}

pub fn est_error_demo(cfg: &EstErrorConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let pts = run_estimation_error_demo(&cfg.demo, &cfg.r, seed)?;
    let mut csv = format!("{}\n", EstimationErrorPoint::CSV_HEADER);
    let mut out = RunOutput::new(to_json(&pts));
    for q in &pts {
        csv.push_str(&q.csv_row());
        csv.push('\n');
        out.say(format!("r={:+.2}: mean {:.5} ± {:.5}, sd {:.4}", q.r, q.mean, q.se, q.experiment_sd));
    }
    Ok(out.file("est_error.csv", csv))
}

pub fn gst_demo(cfg: &GstDemoConfig, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    let [x, y, z] = cfg.truth;
    let gate = GstGate {
        name: "H".into(),
        unitary: linalg::hadamard(),
        noise: PauliChannel::xyz(x, y, z)?,
    };
    let spam = SpamModel {
        prep: PauliChannel::depolarizing(cfg.spam)?,
        meas: PauliChannel::depolarizing(cfg.spam)?,
    };
    let shots = sample_count_for_accuracy(cfg.accuracy, cfg.eps, true, cfg.prefactor)?;
    let fid = FiducialSet::new(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 10));
    let raw = measure_raw(&gate, &fid, shots, &mut rng, &spam)?;
    let est = estimate_gateset(&raw)?;
    let ideal = gate.ideal_ptm()?;
    let ex = extract_pauli_probs(&est.gate, &ideal)?;
    let se = bootstrap_pauli_se(&raw, &ideal, cfg.bootstrap, &mut rng)?;
    let mut csv = String::from("pauli,truth,estimate,se\n");
    for (k, name) in ["X", "Y", "Z"].iter().enumerate() {
        let _ = writeln!(csv, "{name},{:.4e},{:.6e},{:.3e}", cfg.truth[k], ex.probs[k + 1], se[k + 1]);
    }
    let gates = vec![
        GstGate {
            name: "H".into(),
            unitary: linalg::hadamard(),
            noise: PauliChannel::xyz(0.01, 0.005, 0.02)?,
        },
        GstGate {
            name: "S".into(),
            unitary: linalg::s_gate(),
            noise: PauliChannel::xyz(0.02, 0.0, 0.01)?,
        },
    ];
    let spam2 = SpamModel {
        prep: PauliChannel::xyz(0.02, 0.0, 0.0)?,
        meas: PauliChannel::xyz(0.02, 0.0, 0.0)?,
    };
    let gst_shots = sample_count_for_accuracy(cfg.pec_accuracy, 1e-2, true, cfg.prefactor)?;
    let rep = spam_free_pec_check(&gates, &[0, 1, 1, 0], &spam2, gst_shots, cfg.pec_shots, mix(seed, 11))?;
    let mut out = RunOutput::new(json!({
        "shots_per_entry": shots,
        "gram_condition": est.gram_condition,
        "probs": ex.probs, "se": se, "off_diagonal": ex.off_diagonal, "clipped": ex.clipped,
        "spam_free_pec": rep, "pec_gst_shots": gst_shots,
    }))
    .file("gst_channel.csv", csv);
    out.say(format!("p_X {:.4e} ± {:.1e} (truth {:.1e}) at {shots} shots/entry", ex.probs[1], se[1], x));
    out.say(format!(
        "SPAM-free PEC: {:.5} ± {:.5} vs ideal {:.5}; unmitigated {:.5}",
        rep.mitigated_mean, rep.mitigated_se, rep.ideal, rep.unmitigated_mean
    ));
    Ok(out)
}

pub fn bisection_demo(cfg: &QpeConfig, seed: u64) -> Result<RunOutput> {
    crate::config::validate_qpe(cfg)?;
    let rep: BisectionReport = run_bisection_demo(cfg, seed)?;
    let mut out = RunOutput::new(json!({
        "ground_energy": rep.ground_energy, "trials": rep.trials, "coverage": rep.coverage(),
        "mean_width": rep.mean_width, "mean_iterations": rep.mean_iterations,
        "expected_iterations": rep.expected_iterations, "gamma_tot": rep.gamma_tot,
    }))
    .file("bisection.csv", rep.csv());
    out.say(format!(
        "E₀ = {:.4}: coverage {:.2} over {} trials, {:.1} iterations (expected {}), γ_tot {:.3}",
        rep.ground_energy,
        rep.coverage(),
        rep.trials,
        rep.mean_iterations,
        rep.expected_iterations,
        rep.gamma_tot
    ));
    Ok(out)
}

fn m_label(m: CyclesPerGate) -> String {
    match m {
        CyclesPerGate::Fixed(k) => k.to_string(),
        CyclesPerGate::Distance => "d".into(),
    }
}

pub fn resources(cfg: &ResourcesConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let mut req = format!("m,{}\n", Requirement::CSV_HEADER);
    let mut budget = String::from("m,d,n_e,unmitigated,mitigated,gain\n");
    let mut headline = Vec::new();
    let mut out = RunOutput::new(Value::Null);
    for &m in &cfg.cycles_per_gate {
        let p = cfg.params(m);
        for &n_g in &cfg.gate_counts {
            for &n_e in &cfg.error_budgets {
                let r = required_distance(&p, n_g, n_e)?;
                let _ = writeln!(req, "{},{}", m_label(m), r.csv_row());
            }
        }
        for &d in &cfg.distances {
            for &n_e in &cfg.error_budgets {
                let g = max_gates_at_distance(&p, d, n_e)?;
                let _ = writeln!(budget, "{},{d},{n_e:e},{:.4e},{:.4e},{:.4e}", m_label(m), g.unmitigated, g.mitigated, g.gain());
            }
        }
        for n_g in [1e4, 1e10] {
            let r = required_distance(&p, n_g, 1e-3)?;
            out.say(format!(
                "m={}: N_G={n_g:e}, N_e=1e-3: d {:.2} → {:.2} (odd {} → {}), qubits ×{:.3}",
                m_label(m),
                r.d_nmit_real,
                r.d_mit_real,
                r.d_nmit,
                r.d_mit,
                r.qubit_ratio_real
            ));
            headline.push(json!({"m": m_label(m), "requirement": r}));
        }
        let g = max_gates_at_distance(&p, 11, 1e-3)?;
        out.say(format!("m={}: d=11 gate budget {:.3e} → {:.3e}", m_label(m), g.unmitigated, g.mitigated));
        headline.push(json!({"m": m_label(m), "gate_budget_d11": g}));
    }
    let gains: Vec<Value> = [1.0, 0.1, 0.01]
        .iter()
        .map(|&r| json!({"r": r, "distance_gain": effective_distance_gain(r, cfg.ratio).ok()}))
        .collect();
    out.results = json!({"headline": headline, "effective_distance_gain": gains});
    Ok(out.file("resources.csv", req).file("gate_budget.csv", budget))
}

/// Quick deterministic checks with exact answers.
pub fn selftest(seed: u64) -> Result<RunOutput> {
    let mut checks: Vec<(&str, bool, String)> = Vec::new();
    for k in [3u8, 11] {
        let r = acceptance::run_criterion(k, seed)?;
        let detail: Vec<&str> = r.checks.iter().map(|c| c.detail.as_str()).collect();
        checks.push((if k == 3 { "first-order cost" } else { "resource table" }, r.pass(), detail.join("; ")));
    }
    let params = crate::resource::CodeParams::default();
    checks.push((
        "Γ of an empty circuit",
        params.qem_overhead(9.0, 0.0)? == 1.0,
        "qem_overhead(d, 0) = 1".into(),
    ));
    let noiseless = CliffordDemoConfig {
        qubits: 10,
        layers: 10,
        cnots_per_layer: 3,
        experiments: 4,
        shots: 100,
        noise: Some([0.0; 3]),
        mitigation: Mitigation::Exact,
        ..Default::default()
    };
    let r = run_clifford_demo(&noiseless, seed)?;
    checks.push((
        "noiseless demo",
        r.mitigated.means.iter().all(|&m| m == 1.0) && r.gamma_tot == 1.0,
        format!("mitigated mean {}", r.mitigated.grand_mean),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let prog = acceptance::random_oracle_program(&mut rng);
        let ideal = ideal_expectation(&prog)?;
        let (mit, _) = acceptance::frame_estimate(&prog, &crate::frame::NoiseBinding::noiseless(), 2000, mix(seed, i))?;
        worst = worst.max((mit.mean - ideal).abs() / mit.se().max(1.0 / 2000f64.sqrt()));
    }
    checks.push(("noiseless frame engine", worst < 5.0, format!("worst |z| {worst:.2}")));
    let est = estimate_logical_channel(3, 0.0, 100, seed)?;
    checks.push(("decoder at p = 0", est.probs[0] == 1.0, format!("p_I = {}", est.probs[0])));
    let mut out = RunOutput::new(Value::Null);
    let mut rows = Vec::new();
    for (name, pass, detail) in &checks {
        out.say(format!("{} {name}: {detail}", if *pass { "ok  " } else { "FAIL" }));
        rows.push(json!({"check": name, "pass": pass, "detail": detail}));
    }
    out.ok = checks.iter().all(|c| c.1);
    out.results = Value::Array(rows);
    Ok(out)
}

/// Looks up a subcommand by its command-line name.
pub fn parse_subcommand(name: &str) -> Result<Subcommand> {
    Subcommand::ALL
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::Config(format!("unknown subcommand {name}")))
}
