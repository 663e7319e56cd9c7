//! Planar surface code under phenomenological noise, decoded by minimum-weight
//! matching on the space-time defect graph.
//!
//! Grid layout: a (2d−1)×(2d−1) lattice with data qubits where `r + c` is even,
//! Z checks at (odd r, even c) and X checks at (even r, odd c). Logical X̄ is the
//! data column `c = 0`, logical Z̄ the data row `r = 0`.
//!
//! Each check type lives on a (d−1)×d "check graph" with coordinates (a, b),
//! where `a` runs towards the two boundaries of that type. Every data qubit is
//! an edge of both graphs. The noise model applies depolarizing noise to every
//! data qubit at the start of each cycle and flips each noisy measurement with
//! probability 2p/3; the first and last rounds are perfect.

mod blossom;
pub mod matching;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::map_chunks;
use crate::pauli::{Pauli, PauliString};
use crate::quasiprob::PauliChannel;
use crate::rng::{lane, mix, shot_rng, GeometricSkip};
use crate::stats::{binomial_se, linear_fit, LinearFit};
use matching::{min_weight_boundary_matching, Mate};

const SHOT_CHUNK: u64 = 2048;

/// One check type's matching graph.
#[derive(Debug, Clone)]
struct CheckGraph {
    d: usize,
    /// Data qubit of a-edge (ae, b): joins rows ae−1 and ae, ae ∈ 0..d.
    a_edge: Vec<usize>,
    /// Data qubit of b-edge (a, bb): joins columns bb and bb+1.
    b_edge: Vec<usize>,
    /// Checks touched by each data qubit.
    incid: Vec<([u32; 2], u8)>,
    /// Data qubits on the low boundary (they define the logical parity).
    crosses: Vec<bool>,
}

impl CheckGraph {
    fn nchk(&self) -> usize {
        (self.d - 1) * self.d
    }

    fn boundary_dist(&self, a: i32) -> i32 {
        (a + 1).min(self.d as i32 - 1 - a)
    }

    fn low_side(&self, a: i32) -> bool {
        a + 1 <= self.d as i32 - 1 - a
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceCodeLayout {
    pub d: usize,
    /// Grid coordinates of each data qubit.
    pub data: Vec<(usize, usize)>,
    pub z_stabilizers: Vec<Vec<usize>>,
    pub x_stabilizers: Vec<Vec<usize>>,
    pub logical_x: Vec<usize>,
    pub logical_z: Vec<usize>,
    zg: CheckGraph,
    xg: CheckGraph,
}

impl SurfaceCodeLayout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Invalid("code distance must be at least 2".into()));
        }
        let g = 2 * d - 1;
        let mut index = vec![usize::MAX; g * g];
        let mut data = Vec::new();
        for r in 0..g {
            for c in 0..g {
                if (r + c) % 2 == 0 {
                    index[r * g + c] = data.len();
                    data.push((r, c));
                }
            }
        }
        let at = |r: usize, c: usize| index[r * g + c];
        let neighbours = |r: usize, c: usize| {
            let mut v = Vec::with_capacity(4);
            if r > 0 {
                v.push(at(r - 1, c));
            }
            if r + 1 < g {
                v.push(at(r + 1, c));
            }
            if c > 0 {
                v.push(at(r, c - 1));
            }
            if c + 1 < g {
                v.push(at(r, c + 1));
            }
            v
        };
        // check k = a*d + b
        let mut z_stabilizers = Vec::new();
        let mut x_stabilizers = Vec::new();
        for a in 0..d - 1 {
            for b in 0..d {
                z_stabilizers.push(neighbours(2 * a + 1, 2 * b));
                x_stabilizers.push(neighbours(2 * b, 2 * a + 1));
            }
        }
        let logical_x: Vec<usize> = (0..d).map(|k| at(2 * k, 0)).collect();
        let logical_z: Vec<usize> = (0..d).map(|k| at(0, 2 * k)).collect();

        let build = |transpose: bool, stabs: &Vec<Vec<usize>>, logical: &Vec<usize>| {
            let pos = |r: usize, c: usize| if transpose { at(c, r) } else { at(r, c) };
            let mut a_edge = Vec::with_capacity(d * d);
            for ae in 0..d {
                for b in 0..d {
                    a_edge.push(pos(2 * ae, 2 * b));
                }
            }
            let mut b_edge = Vec::with_capacity((d - 1) * (d - 1));
            for a in 0..d - 1 {
                for bb in 0..d - 1 {
                    b_edge.push(pos(2 * a + 1, 2 * bb + 1));
                }
            }
            let mut incid = vec![([0u32; 2], 0u8); data.len()];
            for (k, s) in stabs.iter().enumerate() {
                for &q in s {
                    let e = &mut incid[q];
                    e.0[e.1 as usize] = k as u32;
                    e.1 += 1;
                }
            }
            let mut crosses = vec![false; data.len()];
            for &q in logical {
                crosses[q] = true;
            }
            CheckGraph {
                d,
                a_edge,
                b_edge,
                incid,
                crosses,
            }
        };
        let zg = build(false, &z_stabilizers, &logical_z);
        let xg = build(true, &x_stabilizers, &logical_x);
        Ok(SurfaceCodeLayout {
            d,
            data,
            z_stabilizers,
            x_stabilizers,
            logical_x,
            logical_z,
            zg,
            xg,
        })
    }

    pub fn n_data(&self) -> usize {
        self.data.len()
    }

    pub fn n_checks(&self) -> usize {
        self.zg.nchk()
    }

    /// Z-check and X-check syndromes of a data-qubit Pauli.
    pub fn syndrome(&self, e: &PauliString) -> (Vec<bool>, Vec<bool>) {
        let z = self
            .z_stabilizers
            .iter()
            .map(|s| s.iter().filter(|&&q| e.x_bit(q)).count() % 2 == 1)
            .collect();
        let x = self
            .x_stabilizers
            .iter()
            .map(|s| s.iter().filter(|&&q| e.z_bit(q)).count() % 2 == 1)
            .collect();
        (z, x)
    }

    /// Logical class (basis index I, X, Y, Z) of an operator with trivial syndrome.
    pub fn logical_class(&self, e: &PauliString) -> usize {
        let xf = self.logical_z.iter().filter(|&&q| e.x_bit(q)).count() % 2 == 1;
        let zf = self.logical_x.iter().filter(|&&q| e.z_bit(q)).count() % 2 == 1;
        Pauli::from_bits(xf, zf).index()
    }
}

/// Stabilizer outcomes for `cycles + 1` rounds; rounds 0 and `cycles` are perfect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeHistory {
    pub d: usize,
    pub cycles: usize,
    pub z_rounds: Vec<Vec<bool>>,
    pub x_rounds: Vec<Vec<bool>>,
    pub perfect: Vec<bool>,
}

impl SyndromeHistory {
    fn from_events(d: usize, cycles: usize, nchk: usize, zev: &[u8], xev: &[u8]) -> Self {
        let integrate = |ev: &[u8]| {
            let mut rounds = vec![vec![false; nchk]];
            for t in 0..cycles {
                let prev = rounds[t].clone();
                let next = prev
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| s ^ (ev[t * nchk + k] != 0))
                    .collect();
                rounds.push(next);
            }
            rounds
        };
        let mut perfect = vec![false; cycles + 1];
        perfect[0] = true;
        perfect[cycles] = true;
        SyndromeHistory {
            d,
            cycles,
            z_rounds: integrate(zev),
            x_rounds: integrate(xev),
            perfect,
        }
    }

    /// Detection events, layer-major: `events[t * nchk + k]` for t ∈ 0..cycles.
    pub fn detection_events(&self) -> (Vec<u8>, Vec<u8>) {
        let diff = |rounds: &Vec<Vec<bool>>| {
            let mut ev = Vec::new();
            for t in 0..self.cycles {
                for (a, b) in rounds[t].iter().zip(&rounds[t + 1]) {
                    ev.push((a ^ b) as u8);
                }
            }
            ev
        };
        (diff(&self.z_rounds), diff(&self.x_rounds))
    }

    pub fn defect_count(&self) -> usize {
        let (z, x) = self.detection_events();
        z.iter().chain(&x).map(|&v| v as usize).sum()
    }
}

#[derive(Debug, Clone)]
pub struct RunSample {
    pub history: SyndromeHistory,
    /// Accumulated data-qubit error (phases ignored).
    pub error: PauliString,
}

/// Reusable per-worker buffers.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    zev: Vec<u8>,
    xev: Vec<u8>,
    defects: Vec<(i32, i32, i32)>,
}

fn xor_pauli(e: &mut PauliString, q: usize, x: bool, z: bool) {
    let cur = e.get(q);
    let (cx, cz) = cur.bits();
    e.set(q, Pauli::from_bits(cx ^ x, cz ^ z));
}

/// Samples one run's detection events. Returns the logical-crossing parities
/// of the X-type and Z-type data errors.
fn sample_events<R: Rng + ?Sized>(
    layout: &SurfaceCodeLayout,
    p: f64,
    cycles: usize,
    rng: &mut R,
    s: &mut Scratch,
    mut error: Option<&mut PauliString>,
) -> (bool, bool) {
    let nchk = layout.n_checks();
    let nd = layout.n_data();
    s.zev.clear();
    s.zev.resize(cycles * nchk, 0);
    s.xev.clear();
    s.xev.resize(cycles * nchk, 0);
    let (mut xpar, mut zpar) = (false, false);

    let skip = GeometricSkip::new(p);
    let total = cycles * nd;
    let mut loc = skip.next(rng);
    while loc < total {
        let (t, q) = (loc / nd, loc % nd);
        let (x, z) = Pauli::from_index(rng.gen_range(1..4)).bits();
        if x {
            let (ks, n) = layout.zg.incid[q];
            for &k in &ks[..n as usize] {
                s.zev[t * nchk + k as usize] ^= 1;
            }
            xpar ^= layout.zg.crosses[q];
        }
        if z {
            let (ks, n) = layout.xg.incid[q];
            for &k in &ks[..n as usize] {
                s.xev[t * nchk + k as usize] ^= 1;
            }
            zpar ^= layout.xg.crosses[q];
        }
        if let Some(e) = error.as_deref_mut() {
            xor_pauli(e, q, x, z);
        }
        loc = loc.saturating_add(1).saturating_add(skip.next(rng));
    }

    if cycles > 1 {
        let skip = GeometricSkip::new(2.0 * p / 3.0);
        let per = (cycles - 1) * nchk;
        let total = 2 * per;
        let mut loc = skip.next(rng);
        while loc < total {
            let ev = if loc < per { &mut s.zev } else { &mut s.xev };
            let l = loc % per;
            let (t, k) = (l / nchk, l % nchk);
            ev[t * nchk + k] ^= 1;
            ev[(t + 1) * nchk + k] ^= 1;
            loc = loc.saturating_add(1).saturating_add(skip.next(rng));
        }
    }
    (xpar, zpar)
}

/// Matches the defects of one graph. Returns the mates together with the
/// defect coordinates (t, a, b).
fn match_graph(g: &CheckGraph, ev: &[u8], defects: &mut Vec<(i32, i32, i32)>) -> Vec<Mate> {
    let nchk = g.nchk();
    let d = g.d;
    defects.clear();
    for (i, &v) in ev.iter().enumerate() {
        if v != 0 {
            let (t, k) = (i / nchk, i % nchk);
            defects.push((t as i32, (k / d) as i32, (k % d) as i32));
        }
    }
    let df = &*defects;
    let w = |u: usize, v: usize| {
        let (a, b) = (df[u], df[v]);
        (a.0 - b.0).abs() + (a.1 - b.1).abs() + (a.2 - b.2).abs()
    };
    let bd = |u: usize| g.boundary_dist(df[u].1);
    min_weight_boundary_matching(df.len(), w, bd)
}

/// Parity of defects sent to the low boundary.
fn low_boundary_parity(g: &CheckGraph, mates: &[Mate], defects: &[(i32, i32, i32)]) -> bool {
    let mut par = false;
    for (u, m) in mates.iter().enumerate() {
        if *m == Mate::Boundary && g.low_side(defects[u].1) {
            par = !par;
        }
    }
    par
}

/// Data qubits of a spatial correction path; toggled into `out`.
fn path_edges(g: &CheckGraph, mates: &[Mate], defects: &[(i32, i32, i32)], out: &mut Vec<bool>) {
    let d = g.d;
    let mut toggle = |q: usize| out[q] = !out[q];
    for (u, m) in mates.iter().enumerate() {
        let (_, a1, b1) = defects[u];
        match *m {
            Mate::Boundary => {
                let (lo, hi) = if g.low_side(a1) {
                    (0, a1)
                } else {
                    (a1 + 1, d as i32 - 1)
                };
                for ae in lo..=hi {
                    toggle(g.a_edge[ae as usize * d + b1 as usize]);
                }
            }
            Mate::Defect(v) if v > u => {
                let (_, a2, b2) = defects[v];
                for ae in a1.min(a2) + 1..=a1.max(a2) {
                    toggle(g.a_edge[ae as usize * d + b1 as usize]);
                }
                for bb in b1.min(b2)..b1.max(b2) {
                    toggle(g.b_edge[a2 as usize * (d - 1) + bb as usize]);
                }
            }
            _ => {}
        }
    }
}

/// One run with an explicit error record (slow path, for checking and inspection).
pub fn sample_run<R: Rng + ?Sized>(layout: &SurfaceCodeLayout, p: f64, cycles: usize, rng: &mut R) -> RunSample {
    let mut s = Scratch::default();
    let mut error = PauliString::identity(layout.n_data());
    sample_events(layout, p, cycles, rng, &mut s, Some(&mut error));
    let history = SyndromeHistory::from_events(layout.d, cycles, layout.n_checks(), &s.zev, &s.xev);
    RunSample { history, error }
}

/// Recovery operator from the matched space-time defects.
pub fn decode_mwpm(layout: &SurfaceCodeLayout, h: &SyndromeHistory) -> PauliString {
    let (zev, xev) = h.detection_events();
    let n = layout.n_data();
    let mut defects = Vec::new();
    let mut xs = vec![false; n];
    let mates = match_graph(&layout.zg, &zev, &mut defects);
    path_edges(&layout.zg, &mates, &defects, &mut xs);
    let mut zs = vec![false; n];
    let mates = match_graph(&layout.xg, &xev, &mut defects);
    path_edges(&layout.xg, &mates, &defects, &mut zs);
    let mut r = PauliString::identity(n);
    for q in 0..n {
        r.set(q, Pauli::from_bits(xs[q], zs[q]));
    }
    r
}

/// Samples and decodes one run; returns the residual logical class index.
pub fn sample_logical_class<R: Rng + ?Sized>(
    layout: &SurfaceCodeLayout,
    p: f64,
    cycles: usize,
    rng: &mut R,
    s: &mut Scratch,
) -> usize {
    let (xpar, zpar) = sample_events(layout, p, cycles, rng, s, None);
    let mut defects = std::mem::take(&mut s.defects);
    let mates = match_graph(&layout.zg, &s.zev, &mut defects);
    let xf = xpar ^ low_boundary_parity(&layout.zg, &mates, &defects);
    let mates = match_graph(&layout.xg, &s.xev, &mut defects);
    let zf = zpar ^ low_boundary_parity(&layout.xg, &mates, &defects);
    s.defects = defects;
    Pauli::from_bits(xf, zf).index()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalChannelEstimate {
    pub d: usize,
    pub p: f64,
    pub cycles: usize,
    pub shots: u64,
    pub counts: [u64; 4],
    /// p_I, p_X, p_Y, p_Z.
    pub probs: [f64; 4],
    pub se: [f64; 4],
}

impl LogicalChannelEstimate {
    fn from_counts(d: usize, p: f64, cycles: usize, counts: [u64; 4]) -> Self {
        let shots: u64 = counts.iter().sum();
        let probs = counts.map(|c| c as f64 / shots as f64);
        let se = probs.map(|q| binomial_se(q, shots));
        LogicalChannelEstimate {
            d,
            p,
            cycles,
            shots,
            counts,
            probs,
            se,
        }
    }

    pub fn p_logical(&self) -> f64 {
        1.0 - self.probs[0]
    }

    pub fn se_logical(&self) -> f64 {
        binomial_se(self.p_logical(), self.shots)
    }

    pub fn channel(&self) -> PauliChannel {
        PauliChannel {
            n: 1,
            probs: self.probs.to_vec(),
        }
    }

    /// Diagonal PTM entries (1, Λ_XX, Λ_YY, Λ_ZZ) and their standard errors.
    pub fn ptm_diagonal(&self) -> ([f64; 4], [f64; 4]) {
        let [_, px, py, pz] = self.probs;
        let flips = [0.0, py + pz, px + pz, px + py];
        let lam = flips.map(|f| 1.0 - 2.0 * f);
        let se = flips.map(|f| 2.0 * binomial_se(f, self.shots));
        (lam, se)
    }

    /// Per-cycle Pauli channel: the Markovian channel whose `cycles`-fold
    /// repetition has this estimate's PTM diagonal. Standard errors are first
    /// order (`se / cycles`).
    pub fn per_cycle(&self) -> ([f64; 4], [f64; 4]) {
        let (lam, _) = self.ptm_diagonal();
        let root = lam.map(|l| l.max(0.0).powf(1.0 / self.cycles as f64));
        let p = PauliChannel::from_ptm_diagonal(1, &root);
        let k = self.cycles as f64;
        ([p[0], p[1], p[2], p[3]], self.se.map(|s| s / k))
    }

    pub const CSV_HEADER: &'static str = "d,p,shots,p_I,p_X,p_Y,p_Z,se_X,se_Y,se_Z";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.3e},{:.3e},{:.3e}",
            self.d,
            self.p,
            self.shots,
            self.probs[0],
            self.probs[1],
            self.probs[2],
            self.probs[3],
            self.se[1],
            self.se[2],
            self.se[3]
        )
    }
}

fn check_rate(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Invalid(format!("physical error rate {p} outside [0, 1)")));
    }
    Ok(())
}

/// Logical channel over `cycles` noisy cycles.
pub fn estimate_logical_channel_cycles(
    d: usize,
    p: f64,
    cycles: usize,
    shots: u64,
    seed: u64,
) -> Result<LogicalChannelEstimate> {
    check_rate(p)?;
    if shots == 0 || cycles == 0 {
        return Err(Error::Invalid("shots and cycles must be positive".into()));
    }
    let layout = SurfaceCodeLayout::new(d)?;
    let parts = map_chunks(shots, SHOT_CHUNK, |a, b| {
        let mut s = Scratch::default();
        let mut counts = [0u64; 4];
        for shot in a..b {
            let mut rng = shot_rng(seed, lane::NOISE, shot);
            counts[sample_logical_class(&layout, p, cycles, &mut rng, &mut s)] += 1;
        }
        counts
    });
    let mut counts = [0u64; 4];
    for c in parts {
        for k in 0..4 {
            counts[k] += c[k];
        }
    }
    Ok(LogicalChannelEstimate::from_counts(d, p, cycles, counts))
}

/// Logical channel for a d-cycle idle.
pub fn estimate_logical_channel(d: usize, p: f64, shots: u64, seed: u64) -> Result<LogicalChannelEstimate> {
    estimate_logical_channel_cycles(d, p, d, shots, seed)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub d: usize,
    pub p: f64,
    pub shots: u64,
    pub p_logical: f64,
    pub se: f64,
    pub estimate: LogicalChannelEstimate,
}

pub fn threshold_scan(ds: &[usize], ps: &[f64], shots: u64, seed: u64) -> Result<Vec<ThresholdPoint>> {
    if ds.is_empty() || ps.is_empty() {
        return Err(Error::Invalid("empty distance or rate list".into()));
    }
    let mut out = Vec::with_capacity(ds.len() * ps.len());
    for &d in ds {
        for (i, &p) in ps.iter().enumerate() {
            let est = estimate_logical_channel(d, p, shots, mix(seed, ((d as u64) << 32) | i as u64))?;
            out.push(ThresholdPoint {
                d,
                p,
                shots,
                p_logical: est.p_logical(),
                se: est.se_logical(),
                estimate: est,
            });
        }
    }
    Ok(out)
}

fn polyfit(x: &[f64], y: &[f64], deg: usize) -> Option<Vec<f64>> {
    if x.len() <= deg {
        return None;
    }
    let a = nalgebra::DMatrix::from_fn(x.len(), deg + 1, |i, j| x[i].powi(j as i32));
    let b = nalgebra::DVector::from_column_slice(y);
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    Some(sol.iter().copied().collect())
}

fn polyval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Crossing point of the logical-error curves of two distances: the root of a
/// cubic fit to `ln p_L(d_large) − ln p_L(d_small)` over the scanned range.
pub fn locate_crossing(points: &[ThresholdPoint], d_small: usize, d_large: usize) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for a in points.iter().filter(|q| q.d == d_small) {
        if let Some(b) = points.iter().find(|q| q.d == d_large && q.p == a.p) {
            if a.p_logical > 0.0 && b.p_logical > 0.0 {
                xs.push(a.p);
                ys.push(b.p_logical.ln() - a.p_logical.ln());
            }
        }
    }
    if xs.len() < 5 {
        return None;
    }
    let (lo, hi) = (xs[0], *xs.last()?);
    let scale = hi - lo;
    let u: Vec<f64> = xs.iter().map(|x| (x - lo) / scale).collect();
    let c = polyfit(&u, &ys, 3)?;
    let f = |x: f64| polyval(&c, x);
    // first upward crossing on a fine grid, refined by bisection
    let n = 2000;
    for i in 0..n {
        let (x0, x1) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
        if f(x0) < 0.0 && f(x1) >= 0.0 {
            let (mut a, mut b) = (x0, x1);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if f(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(lo + 0.5 * (a + b) * scale);
        }
    }
    None
}

/// Mean of the crossings of consecutive distances.
pub fn threshold_estimate(points: &[ThresholdPoint]) -> Option<f64> {
    let mut ds: Vec<usize> = points.iter().map(|q| q.d).collect();
    ds.sort_unstable();
    ds.dedup();
    let xs: Vec<f64> = ds
        .windows(2)
        .filter_map(|w| locate_crossing(points, w[0], w[1]))
        .collect();
    if xs.is_empty() || xs.len() + 1 != ds.len() {
        return None;
    }
    Some(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Fit of `p_L(d) = C₁ · κ^{(d+1)/2}` with `κ = C₂ p / p_th`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuppressionFit {
    pub c1: f64,
    pub kappa: f64,
    pub fit: LinearFit,
}

impl SuppressionFit {
    pub fn predict(&self, d: usize) -> f64 {
        self.c1 * self.kappa.powf((d as f64 + 1.0) / 2.0)
    }
}

pub fn fit_suppression(ds: &[usize], rates: &[f64]) -> Result<SuppressionFit> {
    let x: Vec<f64> = ds.iter().map(|&d| (d as f64 + 1.0) / 2.0).collect();
    if rates.iter().any(|&r| r <= 0.0) {
        return Err(Error::Invalid("cannot fit zero logical error rates".into()));
    }
    let y: Vec<f64> = rates.iter().map(|r| r.ln()).collect();
    let fit = linear_fit(&x, &y).ok_or_else(|| Error::Invalid("need two distinct distances".into()))?;
    Ok(SuppressionFit {
        c1: fit.intercept.exp(),
        kappa: fit.slope.exp(),
        fit,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkovPoint {
    pub cycles: usize,
    pub lambda: [f64; 4],
    pub se: [f64; 4],
    pub estimate: LogicalChannelEstimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkovFit {
    pub d: usize,
    pub p: f64,
    pub points: Vec<MarkovPoint>,
    /// Fits of ln Λ_kk(c) against c for k = X, Y, Z over the points with c > `min_cycles`.
    pub fits: [Option<LinearFit>; 3],
    /// Per-cycle effective diagonal exp(slope).
    pub lambda_eff: [f64; 3],
    pub min_cycles: usize,
}

pub fn markovianity_fit(
    d: usize,
    p: f64,
    cycle_list: &[usize],
    shots: u64,
    seed: u64,
    min_cycles: usize,
) -> Result<MarkovFit> {
    if cycle_list.iter().any(|&c| c == 0) {
        return Err(Error::Invalid("cycle counts must be positive".into()));
    }
    let mut points = Vec::new();
    for &c in cycle_list {
        let est = estimate_logical_channel_cycles(d, p, c, shots, mix(seed, c as u64))?;
        let (lambda, se) = est.ptm_diagonal();
        points.push(MarkovPoint {
            cycles: c,
            lambda,
            se,
            estimate: est,
        });
    }
    let mut fits: [Option<LinearFit>; 3] = [None, None, None];
    let mut lambda_eff = [1.0; 3];
    for k in 0..3 {
        let sel: Vec<&MarkovPoint> = points
            .iter()
            .filter(|q| q.cycles > min_cycles && q.lambda[k + 1] > 0.0)
            .collect();
        let x: Vec<f64> = sel.iter().map(|q| q.cycles as f64).collect();
        let y: Vec<f64> = sel.iter().map(|q| q.lambda[k + 1].ln()).collect();
        fits[k] = linear_fit(&x, &y);
        if let Some(f) = &fits[k] {
            lambda_eff[k] = f.slope.exp();
        }
    }
    Ok(MarkovFit {
        d,
        p,
        points,
        fits,
        lambda_eff,
        min_cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::shot_rng;

    fn residual_ok(layout: &SurfaceCodeLayout, run: &RunSample) -> usize {
        let r = decode_mwpm(layout, &run.history);
        let mut res = run.error.clone();
        res.mul_assign_right(&r);
        let (z, x) = layout.syndrome(&res);
        assert!(z.iter().chain(&x).all(|&b| !b), "residual leaves the code space");
        layout.logical_class(&res)
    }

    #[test]
    fn layout_counts_and_commutation() {
        for d in [2, 3, 5, 7] {
            let l = SurfaceCodeLayout::new(d).unwrap();
            let n = l.n_data();
            assert_eq!(n, d * d + (d - 1) * (d - 1));
            assert_eq!(l.z_stabilizers.len() + l.x_stabilizers.len(), n - 1);
            for zs in &l.z_stabilizers {
                for xs in &l.x_stabilizers {
                    assert_eq!(zs.iter().filter(|q| xs.contains(q)).count() % 2, 0);
                }
                assert_eq!(zs.iter().filter(|q| l.logical_x.contains(q)).count() % 2, 0);
            }
            for xs in &l.x_stabilizers {
                assert_eq!(xs.iter().filter(|q| l.logical_z.contains(q)).count() % 2, 0);
            }
            assert_eq!(l.logical_x.len(), d);
            assert_eq!(l.logical_z.iter().filter(|q| l.logical_x.contains(q)).count(), 1);
        }
    }

    #[test]
    fn single_error_gives_two_events_or_one_at_boundary() {
        let l = SurfaceCodeLayout::new(5).unwrap();
        for q in 0..l.n_data() {
            let mut e = PauliString::identity(l.n_data());
            e.set(q, Pauli::X);
            let (z, _) = l.syndrome(&e);
            let k = z.iter().filter(|&&b| b).count();
            let (r, _) = l.data[q];
            let at_edge = r == 0 || r == 2 * 5 - 2;
            assert_eq!(k, if at_edge { 1 } else { 2 });
            if k == 2 {
                let idx: Vec<usize> = (0..z.len()).filter(|&i| z[i]).collect();
                let (a0, b0) = (idx[0] / 5, idx[0] % 5);
                let (a1, b1) = (idx[1] / 5, idx[1] % 5);
                assert_eq!(a0.abs_diff(a1) + b0.abs_diff(b1), 1);
            }
        }
    }

    #[test]
    fn zero_noise_is_trivial() {
        let l = SurfaceCodeLayout::new(3).unwrap();
        let mut rng = shot_rng(0, 0, 0);
        let run = sample_run(&l, 0.0, 3, &mut rng);
        assert_eq!(run.history.defect_count(), 0);
        assert!(decode_mwpm(&l, &run.history).is_trivial());
        let est = estimate_logical_channel(3, 0.0, 100, 1).unwrap();
        assert_eq!(est.probs[0], 1.0);
    }

    #[test]
    fn decoder_residual_is_in_normalizer_and_fast_path_agrees() {
        for d in [3, 5] {
            let l = SurfaceCodeLayout::new(d).unwrap();
            let mut s = Scratch::default();
            for shot in 0..300 {
                let p = 0.03;
                let mut rng = shot_rng(5, 0, shot);
                let run = sample_run(&l, p, d, &mut rng);
                let slow = residual_ok(&l, &run);
                let mut rng = shot_rng(5, 0, shot);
                let fast = sample_logical_class(&l, p, d, &mut rng, &mut s);
                assert_eq!(slow, fast);
                assert_eq!(run.history.z_rounds.len(), d + 1);
            }
        }
    }

    #[test]
    fn history_round_trip() {
        let l = SurfaceCodeLayout::new(3).unwrap();
        let mut rng = shot_rng(9, 0, 0);
        let run = sample_run(&l, 0.05, 3, &mut rng);
        let (z, x) = l.syndrome(&run.error);
        assert_eq!(run.history.z_rounds[3], z);
        assert_eq!(run.history.x_rounds[3], x);
    }

    #[test]
    fn low_noise_rates_are_symmetric_and_suppressed() {
        let e3 = estimate_logical_channel(3, 0.02, 20_000, 3).unwrap();
        let e5 = estimate_logical_channel(5, 0.02, 20_000, 3).unwrap();
        assert!(e5.p_logical() < e3.p_logical());
        let diff = (e3.probs[1] - e3.probs[3]).abs();
        assert!(diff < 4.0 * (e3.se[1].powi(2) + e3.se[3].powi(2)).sqrt() + 1e-9);
    }

    #[test]
    fn suppression_fit_recovers_exact_law() {
        let ds = [3, 5, 7];
        let rates: Vec<f64> = ds.iter().map(|&d| 0.13 * 0.2f64.powf((d as f64 + 1.0) / 2.0)).collect();
        let f = fit_suppression(&ds, &rates).unwrap();
        assert!((f.c1 - 0.13).abs() < 1e-12 && (f.kappa - 0.2).abs() < 1e-12);
        assert!((f.predict(9) - 0.13 * 0.2f64.powi(5)).abs() < 1e-15);
    }

    #[test]
    fn per_cycle_channel_composes_back() {
        let e = LogicalChannelEstimate::from_counts(5, 0.01, 5, [990_000, 4_000, 1_000, 5_000]);
        let (pc, _) = e.per_cycle();
        let ch = PauliChannel { n: 1, probs: pc.to_vec() };
        let lam = ch.ptm_diagonal();
        let (want, _) = e.ptm_diagonal();
        for k in 0..4 {
            assert!((lam[k].powi(5) - want[k]).abs() < 1e-12);
        }
        assert!((pc.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
