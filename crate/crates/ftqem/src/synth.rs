//! Single-qubit Clifford+T synthesis and approximation-error channels.
//!
//! Search space: every operator of T-count ≤ budget, enumerated through the
//! Matsumoto–Amano normal form `(T|ε)(HT|SHT)* C`. Operators of T-count ≤ 12 live
//! in kd-trees over SU(2) quaternions; larger budgets split the T gates into a
//! Clifford-free prefix and a tabulated suffix (meet in the middle), which still
//! covers the whole search space exactly.

use std::fmt;

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use once_cell::sync::Lazy;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, mat2, CMat, C64};
use crate::ptm::{ptm_of_unitary, TransferMatrix};
use crate::quasiprob::{decompose_inverse_1q, QuasiDecomposition};
use crate::stats::{linear_fit, LinearFit};

/// Largest T-count held in the lookup tables.
pub const TABLE_T: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum G1 {
    H,
    S,
    Sdg,
    T,
    Tdg,
    X,
    Z,
}

impl G1 {
    pub fn matrix(self) -> CMat {
        match self {
            G1::H => linalg::hadamard(),
            G1::S => linalg::s_gate(),
            G1::Sdg => linalg::s_gate().adjoint(),
            G1::T => linalg::t_gate(),
            G1::Tdg => linalg::t_gate().adjoint(),
            G1::X => linalg::pauli1(crate::pauli::Pauli::X),
            G1::Z => linalg::pauli1(crate::pauli::Pauli::Z),
        }
    }

    /// One-character mnemonic; lower case marks the adjoint.
    pub fn symbol(self) -> char {
        match self {
            G1::H => 'H',
            G1::S => 'S',
            G1::Sdg => 's',
            G1::T => 'T',
            G1::Tdg => 't',
            G1::X => 'X',
            G1::Z => 'Z',
        }
    }

    pub fn from_symbol(ch: char) -> Option<G1> {
        Some(match ch {
            'H' => G1::H,
            'S' => G1::S,
            's' => G1::Sdg,
            'T' => G1::T,
            't' => G1::Tdg,
            'X' => G1::X,
            'Z' => G1::Z,
            _ => return None,
        })
    }

    fn su2(self) -> Su2 {
        Su2::from_mat(&self.matrix())
    }
}

/// Element of SU(2) stored as `[[a, b], [−b̄, ā]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub a: C64,
    pub b: C64,
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 {
        a: C64 { re: 1.0, im: 0.0 },
        b: C64 { re: 0.0, im: 0.0 },
    };

    /// Removes the global phase of a 2×2 unitary (sign left arbitrary).
    pub fn from_mat(u: &CMat) -> Su2 {
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        let h = det.sqrt();
        Su2 {
            a: u[(0, 0)] / h,
            b: u[(0, 1)] / h,
        }
    }

    pub fn to_mat(self) -> CMat {
        mat2(self.a, self.b, -self.b.conj(), self.a.conj())
    }

    pub fn mul(self, o: Su2) -> Su2 {
        Su2 {
            a: self.a * o.a - self.b * o.b.conj(),
            b: self.a * o.b + self.b * o.a.conj(),
        }
    }

    pub fn adjoint(self) -> Su2 {
        Su2 {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    pub fn quat(self) -> [f64; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    /// Phase-aligned operator-norm distance: `min ‖U − e^{iφ}V‖ = min(|q − r|, |q + r|)`.
    pub fn dist(self, o: Su2) -> f64 {
        let (p, q) = (self.quat(), o.quat());
        let mut dm = 0.0;
        let mut dp = 0.0;
        for k in 0..4 {
            dm += (p[k] - q[k]) * (p[k] - q[k]);
            dp += (p[k] + q[k]) * (p[k] + q[k]);
        }
        dm.min(dp).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordTSequence {
    gates: Vec<G1>,
    t_count: usize,
    matrix: CMat,
}

impl CliffordTSequence {
    pub fn new(gates: Vec<G1>) -> Self {
        let t_count = gates.iter().filter(|g| matches!(g, G1::T | G1::Tdg)).count();
        let mut m = CMat::identity(2, 2);
        for g in &gates {
            m *= g.matrix();
        }
        CliffordTSequence {
            gates,
            t_count,
            matrix: m,
        }
    }

    pub fn gates(&self) -> &[G1] {
        &self.gates
    }

    pub fn t_count(&self) -> usize {
        self.t_count
    }

    /// Product in written order: `g₀ g₁ … g_k` (the last gate acts first).
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn concat(&self, other: &CliffordTSequence) -> CliffordTSequence {
        let mut g = self.gates.clone();
        g.extend_from_slice(&other.gates);
        CliffordTSequence::new(g)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let gates = text
            .chars()
            .filter(|ch| !ch.is_whitespace())
            .map(|ch| G1::from_symbol(ch).ok_or_else(|| Error::Invalid(format!("unknown gate '{ch}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(gates))
    }
}

impl fmt::Display for CliffordTSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            write!(f, "{}", g.symbol())?;
        }
        Ok(())
    }
}

/// Single-qubit Clifford group modulo phase as words over {H, S}.
fn clifford_words() -> Vec<(Vec<G1>, Su2)> {
    let mut out: Vec<(Vec<G1>, Su2)> = vec![(vec![], Su2::IDENTITY)];
    let mut i = 0;
    while i < out.len() {
        for g in [G1::H, G1::S] {
            let (w, u) = out[i].clone();
            let v = u.mul(g.su2());
            if out.iter().all(|(_, x)| x.dist(v) > 1e-9) {
                let mut w2 = w;
                w2.push(g);
                out.push((w2, v));
            }
        }
        i += 1;
    }
    assert_eq!(out.len(), 24);
    out
}

/// Normal-form prefix without the trailing Clifford: optional leading T, then
/// syllables HT (bit 0) or SHT (bit 1).
#[derive(Debug, Clone, Copy)]
struct Prefix {
    lead_t: bool,
    len: u8,
    bits: u32,
}

impl Prefix {
    fn t_count(self) -> usize {
        self.lead_t as usize + self.len as usize
    }

    fn gates(self) -> Vec<G1> {
        let mut g = Vec::with_capacity(3 * self.len as usize + 1);
        if self.lead_t {
            g.push(G1::T);
        }
        for k in 0..self.len {
            if self.bits >> k & 1 == 1 {
                g.push(G1::S);
            }
            g.push(G1::H);
            g.push(G1::T);
        }
        g
    }

    fn pack(self, cliff: usize) -> u64 {
        (cliff as u64) | (self.lead_t as u64) << 5 | (self.len as u64) << 6 | (self.bits as u64) << 12
    }

    fn unpack(code: u64) -> (Prefix, usize) {
        (
            Prefix {
                lead_t: code >> 5 & 1 == 1,
                len: (code >> 6 & 0x3f) as u8,
                bits: (code >> 12) as u32,
            },
            (code & 0x1f) as usize,
        )
    }
}

/// All prefixes with T-count ≤ `max_t`, with their SU(2) products.
fn prefixes(max_t: usize) -> Vec<(Prefix, Su2)> {
    let t = G1::T.su2();
    let ht = G1::H.su2().mul(t);
    let sht = G1::S.su2().mul(ht);
    let mut out = Vec::new();
    for lead_t in [false, true] {
        let start = if lead_t { t } else { Su2::IDENTITY };
        if lead_t as usize > max_t {
            continue;
        }
        // breadth-first over syllable counts
        let mut layer = vec![(
            Prefix {
                lead_t,
                len: 0,
                bits: 0,
            },
            start,
        )];
        loop {
            out.extend(layer.iter().copied());
            let p0 = layer[0].0;
            if p0.t_count() >= max_t {
                break;
            }
            let mut next = Vec::with_capacity(layer.len() * 2);
            for &(p, u) in &layer {
                for (bit, syl) in [(0u32, ht), (1u32, sht)] {
                    next.push((
                        Prefix {
                            lead_t,
                            len: p.len + 1,
                            bits: p.bits | bit << p.len,
                        },
                        u.mul(syl),
                    ));
                }
            }
            layer = next;
        }
    }
    out
}

/// Fixed generic orthogonal map of R⁴ applied before kd-tree storage so that the
/// exact algebraic coordinates of Clifford+T operators do not tie on split axes.
static SCRAMBLE: Lazy<[[f64; 4]; 4]> = Lazy::new(|| {
    let m = nalgebra::Matrix4::from_fn(|i, j| ((1 + i * 4 + j) as f64 * 0.754_877_666).sin());
    let q = m.qr().q();
    let mut r = [[0.0; 4]; 4];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = q[(i, j)];
        }
    }
    r
});

fn scramble(q: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, row) in SCRAMBLE.iter().enumerate() {
        out[i] = row.iter().zip(q).map(|(a, b)| a * b).sum();
    }
    out
}

/// Balanced kd-tree over scrambled quaternions plus the packed codes it indexes.
struct CodeTree {
    tree: ImmutableKdTree<f64, 4>,
    codes: Vec<u64>,
}

impl CodeTree {
    fn new(entries: Vec<([f64; 4], u64)>) -> Self {
        let pts: Vec<[f64; 4]> = entries.iter().map(|e| e.0).collect();
        CodeTree {
            tree: ImmutableKdTree::new_from_slice(&pts),
            codes: entries.into_iter().map(|e| e.1).collect(),
        }
    }
}

struct Tables {
    cliffords: Vec<(Vec<G1>, Su2)>,
    /// Per exact T-count below TABLE_T, then one tree holding everything ≤ TABLE_T.
    exact: Vec<CodeTree>,
    all: CodeTree,
    su2: std::collections::HashMap<u64, Su2>,
}

static TABLES: Lazy<Tables> = Lazy::new(|| {
    let cliffords = clifford_words();
    let mut exact: Vec<Vec<([f64; 4], u64)>> = vec![Vec::new(); TABLE_T];
    let mut all = Vec::with_capacity(48 * (3 << TABLE_T));
    let mut su2 = std::collections::HashMap::new();
    for (p, u) in prefixes(TABLE_T) {
        for (ci, (_, cu)) in cliffords.iter().enumerate() {
            let v = u.mul(*cu);
            let code = p.pack(ci);
            // both signs are stored so a single query finds the phase-aligned optimum
            let q = v.quat();
            for key in [scramble(q), scramble(q.map(|x| -x))] {
                all.push((key, code));
                if p.t_count() < TABLE_T {
                    exact[p.t_count()].push((key, code));
                }
            }
            su2.insert(code, v);
        }
    }
    Tables {
        cliffords,
        exact: exact.into_iter().map(CodeTree::new).collect(),
        all: CodeTree::new(all),
        su2,
    }
});

fn nearest(t: &CodeTree, target: Su2) -> Option<(u64, f64)> {
    if t.codes.is_empty() {
        return None;
    }
    let tree = &t.tree;
    let best = tree.nearest_one::<SquaredEuclidean>(&scramble(target.quat()));
    Some((t.codes[best.item as usize], best.distance))
}

fn decode(code: u64) -> Vec<G1> {
    let (p, ci) = Prefix::unpack(code);
    let mut g = p.gates();
    g.extend_from_slice(&TABLES.cliffords[ci].0);
    g
}

/// Closest operator of T-count ≤ `max_t` to `target` (up to global phase).
pub fn synthesize(target: &CMat, max_t: usize) -> Result<CliffordTSequence> {
    if target.shape() != (2, 2) || !linalg::is_unitary(target, 1e-9) {
        return Err(Error::Invalid("2×2 unitary expected".into()));
    }
    let u = Su2::from_mat(target);
    let tabs = &*TABLES;
    let best_code_dist = |v: Su2| -> (u64, f64) {
        let mut best = (0u64, f64::INFINITY);
        if max_t >= TABLE_T {
            if let Some(r) = nearest(&tabs.all, v) {
                best = r;
            }
        } else {
            for tree in &tabs.exact[..=max_t] {
                if let Some(r) = nearest(tree, v) {
                    if r.1 < best.1 {
                        best = r;
                    }
                }
            }
        }
        best
    };
    if max_t <= TABLE_T {
        let (code, _) = best_code_dist(u);
        return Ok(CliffordTSequence::new(decode(code)));
    }
    // Meet in the middle: U ≈ A·B with A a Clifford-free prefix of T-count ≤ max_t − TABLE_T.
    let mut best: Option<(f64, Prefix, u64)> = None;
    for (p, a) in prefixes(max_t - TABLE_T) {
        let (code, _) = best_code_dist(a.adjoint().mul(u));
        let d = a.mul(tabs.su2[&code]).dist(u);
        if best.map_or(true, |(bd, _, _)| d < bd - 1e-15) {
            best = Some((d, p, code));
        }
    }
    let (_, p, code) = best.expect("nonempty prefix set");
    let mut g = p.gates();
    g.extend(decode(code));
    Ok(CliffordTSequence::new(g))
}

/// `synthesize` for the rotation `rz(θ) = exp(iθZ/2)`.
pub fn synthesize_rz(theta: f64, max_t: usize) -> Result<CliffordTSequence> {
    synthesize(&linalg::rz(theta), max_t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl EulerAngles {
    /// `rz(θ₁) · √X · rz(θ₂) · √X · rz(θ₃)`.
    pub fn unitary(&self) -> CMat {
        let sx = linalg::sqrt_x();
        linalg::rz(self.theta1) * &sx * linalg::rz(self.theta2) * &sx * linalg::rz(self.theta3)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }
}

fn wrap(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut x = a.rem_euclid(tau);
    if x > std::f64::consts::PI {
        x -= tau;
    }
    x
}

/// Angles with `U ≅ rz(θ₁) √X rz(θ₂) √X rz(θ₃)` up to global phase, each in (−π, π].
pub fn euler_decompose(u: &CMat) -> Result<EulerAngles> {
    if u.shape() != (2, 2) || !linalg::is_unitary(u, 1e-10) {
        return Err(Error::Invalid("2×2 unitary expected".into()));
    }
    // U = e^{iγ} [[cos(t/2), −e^{iλ} sin(t/2)], [e^{iφ} sin(t/2), e^{i(φ+λ)} cos(t/2)]]
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let t = 2.0 * u10.norm().atan2(u00.norm());
    let (phi, lam) = if u00.norm() > 1e-12 && u10.norm() > 1e-12 {
        let g = u00.arg();
        (u10.arg() - g, (-u01).arg() - g)
    } else if u00.norm() > 1e-12 {
        (0.0, u11.arg() - u00.arg())
    } else {
        (u10.arg() - (-u01).arg(), 0.0)
    };
    // With rz(θ) = exp(iθZ/2): U3(t, φ, λ) ≅ rz(−φ−π) √X rz(−t−π) √X rz(−λ).
    let e = EulerAngles {
        theta1: wrap(-phi - std::f64::consts::PI),
        theta2: wrap(-t - std::f64::consts::PI),
        theta3: wrap(-lam),
    };
    Ok(e)
}

/// Phase-aligned operator-norm error `min_φ ‖Ũ − e^{iφ}U‖`.
pub fn approx_error(u: &CMat, approx: &CMat) -> f64 {
    linalg::phase_aligned_distance(u, approx)
}

#[derive(Debug, Clone)]
pub struct ApproxErrorChannel {
    pub u: CMat,
    pub approx: CMat,
    /// PTM of `ρ ↦ (ŨU†) ρ (ŨU†)†`, so that the implemented map is this channel after `U`.
    pub ptm: TransferMatrix,
    pub opnorm_error: f64,
}

pub fn error_channel(u: &CMat, approx: &CMat) -> Result<ApproxErrorChannel> {
    let e = approx * u.adjoint();
    Ok(ApproxErrorChannel {
        u: u.clone(),
        approx: approx.clone(),
        ptm: ptm_of_unitary(&e, 1)?,
        opnorm_error: approx_error(u, approx),
    })
}

/// Quasi-probability decomposition of the inverse error channel (the transpose of
/// its orthogonal PTM) over the 16-element basis.
pub fn mitigate_sk(ch: &ApproxErrorChannel) -> Result<QuasiDecomposition> {
    decompose_inverse_1q(&ch.ptm.transpose())
}

pub fn haar_random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMat {
    let q: [f64; 4] = [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ];
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    Su2 {
        a: c(q[0] / n, q[1] / n),
        b: c(q[2] / n, q[3] / n),
    }
    .to_mat()
}

/// A unitary approximated rotation by rotation with `per_rotation` T gates each.
#[derive(Debug, Clone)]
pub struct SynthesizedUnitary {
    pub angles: EulerAngles,
    pub rotations: [CliffordTSequence; 3],
    pub approx: CMat,
    pub t_count: usize,
    /// Per-rotation errors, whose sum bounds the total.
    pub rotation_errors: [f64; 3],
}

pub fn synthesize_unitary(u: &CMat, per_rotation: usize) -> Result<SynthesizedUnitary> {
    let angles = euler_decompose(u)?;
    let th = angles.as_array();
    let rot = [
        synthesize_rz(th[0], per_rotation)?,
        synthesize_rz(th[1], per_rotation)?,
        synthesize_rz(th[2], per_rotation)?,
    ];
    let sx = linalg::sqrt_x();
    let approx = rot[0].matrix() * &sx * rot[1].matrix() * &sx * rot[2].matrix();
    let errs = [0, 1, 2].map(|k| approx_error(&linalg::rz(th[k]), rot[k].matrix()));
    let t_count = rot.iter().map(|r| r.t_count()).sum();
    Ok(SynthesizedUnitary {
        angles,
        rotations: rot,
        approx,
        t_count,
        rotation_errors: errs,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkRecord {
    pub sample: usize,
    pub max_t: usize,
    pub actual_t: usize,
    pub opnorm_error: f64,
    pub gamma: f64,
}

impl SkRecord {
    pub const CSV_HEADER: &'static str = "sample,max_t,actual_t,opnorm_error,gamma";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6e},{:.9}",
            self.sample, self.max_t, self.actual_t, self.opnorm_error, self.gamma
        )
    }
}

/// γ of the synthesis error of `u` at a total budget `max_t` split evenly over
/// the three rotations.
pub fn sk_record(sample: usize, u: &CMat, max_t: usize) -> Result<SkRecord> {
    let s = synthesize_unitary(u, max_t / 3)?;
    let ch = error_channel(u, &s.approx)?;
    let dec = mitigate_sk(&ch)?;
    Ok(SkRecord {
        sample,
        max_t,
        actual_t: s.t_count,
        opnorm_error: ch.opnorm_error,
        gamma: dec.gamma,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaFit {
    pub beta1: f64,
    pub beta2: f64,
    pub se_beta1: f64,
    pub se_beta2: f64,
    pub r2: f64,
    pub residuals: Vec<f64>,
}

/// Least squares of `log(γ − 1) = log β₁ − β₂ N_T`; points with γ = 1 carry no
/// information on the log scale and are skipped.
pub fn fit_gamma_vs_t(samples: &[(f64, f64)]) -> Result<GammaFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, g)| *g - 1.0 > 1e-14)
        .map(|&(t, g)| (t, (g - 1.0).ln()))
        .collect();
    if pts.is_empty() {
        return Err(Error::Invalid("all γ equal 1; nothing to fit".into()));
    }
    let mut ts: Vec<f64> = pts.iter().map(|p| p.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 3 {
        return Err(Error::Invalid("need at least three distinct T-counts".into()));
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let LinearFit {
        intercept,
        slope,
        se_intercept,
        se_slope,
        r2,
        residuals,
    } = linear_fit(&x, &y).ok_or_else(|| Error::Invalid("degenerate fit".into()))?;
    let beta1 = intercept.exp();
    Ok(GammaFit {
        beta1,
        beta2: -slope,
        se_beta1: beta1 * se_intercept,
        se_beta2: se_slope,
        r2,
        residuals,
    })
}

/// Per-budget averages of γ − 1, fitted on the log scale.
pub fn fit_mean_gamma(records: &[SkRecord]) -> Result<(Vec<(usize, f64, f64)>, GammaFit)> {
    let mut budgets: Vec<usize> = records.iter().map(|r| r.max_t).collect();
    budgets.sort_unstable();
    budgets.dedup();
    let mut rows = Vec::new();
    for &b in &budgets {
        let g: crate::stats::Moments = records.iter().filter(|r| r.max_t == b).map(|r| r.gamma - 1.0).collect();
        rows.push((b, g.mean, g.sd()));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(b, m, _)| (b as f64, 1.0 + m)).collect();
    Ok((rows, fit_gamma_vs_t(&pts)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn euler_round_trip_on_haar_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let u = haar_random_su2(&mut rng) * C64::from_polar(1.0, rng.gen::<f64>());
            let e = euler_decompose(&u).unwrap();
            assert!(approx_error(&u, &e.unitary()) < 1e-10);
            for t in e.as_array() {
                assert!(t > -PI - 1e-12 && t <= PI + 1e-12);
            }
        }
        for u in [CMat::identity(2, 2), linalg::rz(0.3), linalg::hadamard(), G1::X.matrix()] {
            let e = euler_decompose(&u).unwrap();
            assert!(approx_error(&u, &e.unitary()) < 1e-10);
        }
        assert!(euler_decompose(&(CMat::identity(2, 2) * c(2.0, 0.0))).is_err());
    }

    #[test]
    fn clifford_group_and_normal_form_counts() {
        assert_eq!(clifford_words().len(), 24);
        for t in 0..6 {
            let n = prefixes(t).len() * 24;
            assert_eq!(n, 24 * (3 * (1 << t) - 2));
        }
    }

    #[test]
    fn exact_angles_are_exact() {
        for k in -4..=4 {
            let th = k as f64 * PI / 4.0;
            let s = synthesize_rz(th, 3).unwrap();
            assert!(approx_error(&linalg::rz(th), s.matrix()) <= 1e-12, "k={k}");
            assert!(s.t_count() <= 1);
        }
        assert_eq!(synthesize_rz(PI / 2.0, 5).unwrap().t_count(), 0);
        assert_eq!(synthesize_rz(PI / 4.0, 5).unwrap().t_count(), 1);
    }

    #[test]
    fn error_is_non_increasing_in_budget() {
        for &th in &[0.1234, 1.0, -2.5] {
            let mut last = f64::INFINITY;
            for b in [0, 2, 4, 6, 8, 10, 12, 14, 16] {
                let s = synthesize_rz(th, b).unwrap();
                assert!(s.t_count() <= b);
                let e = approx_error(&linalg::rz(th), s.matrix());
                assert!(e <= last + 1e-12, "θ={th} b={b}");
                last = e;
            }
            assert!(last < 0.05, "θ={th}: {last}");
        }
    }

    #[test]
    fn mitm_agrees_with_table_at_the_boundary() {
        // budget TABLE_T+1 must be at least as good as TABLE_T
        for &th in &[0.3, 2.0] {
            let a = approx_error(&linalg::rz(th), synthesize_rz(th, TABLE_T).unwrap().matrix());
            let b = approx_error(&linalg::rz(th), synthesize_rz(th, TABLE_T + 1).unwrap().matrix());
            assert!(b <= a + 1e-12);
        }
    }

    #[test]
    fn sequence_text_round_trip() {
        let s = synthesize_rz(0.7, 6).unwrap();
        let back = CliffordTSequence::parse(&s.to_string()).unwrap();
        assert_eq!(back, s);
        assert!(CliffordTSequence::parse("HQ").is_err());
    }

    #[test]
    fn error_channel_properties() {
        let u = linalg::hadamard();
        let ch = error_channel(&u, &u).unwrap();
        assert!(ch.opnorm_error < 1e-12);
        assert!(ch.ptm.max_abs_diff(&TransferMatrix::identity(1)) < 1e-12);
        assert!((mitigate_sk(&ch).unwrap().gamma - 1.0).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut last = 1.0;
        for eps in [0.001, 0.01, 0.05, 0.1, 0.2] {
            let u = haar_random_su2(&mut rng);
            let ch = error_channel(&u, &(linalg::rz(eps) * &u)).unwrap();
            let m = &ch.ptm.m;
            assert!((m * m.transpose() - nalgebra::DMatrix::<f64>::identity(4, 4)).abs().max() < 1e-12);
            let g = mitigate_sk(&ch).unwrap().gamma;
            assert!(g > last);
            last = g;
        }
    }

    #[test]
    fn composed_error_obeys_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let u = haar_random_su2(&mut rng);
            let s = synthesize_unitary(&u, 5).unwrap();
            let tot = approx_error(&u, &s.approx);
            assert!(tot <= s.rotation_errors.iter().sum::<f64>() + 1e-12);
        }
    }

    #[test]
    fn haar_second_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let m: crate::stats::Moments = (0..n)
            .map(|_| haar_random_su2(&mut rng).trace().norm_sqr() / 4.0)
            .collect();
        assert!((m.mean - 0.25).abs() < 3.0 * m.se());
    }

    #[test]
    fn gamma_fit_recovers_generator() {
        let pts: Vec<(f64, f64)> = (0..10)
            .map(|k| {
                let t = 10.0 * k as f64;
                (t, 1.0 + 3.9 * (-0.072 * t).exp())
            })
            .collect();
        let f = fit_gamma_vs_t(&pts).unwrap();
        assert!((f.beta1 - 3.9).abs() < 1e-9 && (f.beta2 - 0.072).abs() < 1e-12);
        assert!(f.residuals.iter().all(|r| r.abs() < 1e-10));
        assert!(fit_gamma_vs_t(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
    }
}
