//! CHP-style stabilizer tableau, Clifford circuits and Heisenberg-picture Pauli
//! propagation.

use std::fmt::Write as _;

use once_cell::sync::Lazy;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
}

impl Gate {
    pub fn inverse(self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::Cnot(a, b) => vec![a, b],
        }
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits().into_iter().max().unwrap_or(0)
    }

    /// Local unitary (2×2 or 4×4 with the control as the first factor).
    pub fn matrix(&self) -> CMat {
        match self {
            Gate::H(_) => linalg::hadamard(),
            Gate::S(_) => linalg::s_gate(),
            Gate::Sdg(_) => linalg::s_gate().adjoint(),
            Gate::X(_) => linalg::pauli1(Pauli::X),
            Gate::Y(_) => linalg::pauli1(Pauli::Y),
            Gate::Z(_) => linalg::pauli1(Pauli::Z),
            Gate::Cnot(_, _) => linalg::cnot(),
        }
    }

    pub fn mnemonic(&self) -> String {
        match *self {
            Gate::H(q) => format!("H {q}"),
            Gate::S(q) => format!("S {q}"),
            Gate::Sdg(q) => format!("SDG {q}"),
            Gate::X(q) => format!("X {q}"),
            Gate::Y(q) => format!("Y {q}"),
            Gate::Z(q) => format!("Z {q}"),
            Gate::Cnot(a, b) => format!("CNOT {a} {b}"),
        }
    }

    pub fn parse(line: &str) -> Result<Gate> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let idx = |k: usize| -> Result<usize> {
            parts
                .get(k)
                .ok_or_else(|| Error::Invalid(format!("missing qubit in {line:?}")))?
                .parse()
                .map_err(|_| Error::Invalid(format!("bad qubit in {line:?}")))
        };
        let g = match parts.first().map(|s| s.to_ascii_uppercase()).as_deref() {
            Some("H") => Gate::H(idx(1)?),
            Some("S") => Gate::S(idx(1)?),
            Some("SDG") => Gate::Sdg(idx(1)?),
            Some("X") => Gate::X(idx(1)?),
            Some("Y") => Gate::Y(idx(1)?),
            Some("Z") => Gate::Z(idx(1)?),
            Some("CNOT") | Some("CX") => Gate::Cnot(idx(1)?, idx(2)?),
            _ => return Err(Error::Invalid(format!("unknown gate line {line:?}"))),
        };
        if let Gate::Cnot(a, b) = g {
            if a == b {
                return Err(Error::Invalid("CNOT needs distinct qubits".into()));
            }
        }
        Ok(g)
    }
}

fn flip(phase: &mut u8) {
    *phase ^= 2;
}

/// `P ← g P g†` in place.
pub fn conjugate(p: &mut PauliString, g: Gate) {
    let (x, z, ph) = p.raw_mut();
    let bit = |v: &[u64], q: usize| (v[q / 64] >> (q % 64)) & 1 == 1;
    let put = |v: &mut [u64], q: usize, b: bool| {
        let m = 1u64 << (q % 64);
        if b {
            v[q / 64] |= m
        } else {
            v[q / 64] &= !m
        }
    };
    match g {
        Gate::H(q) => {
            let (a, b) = (bit(x, q), bit(z, q));
            if a && b {
                flip(ph);
            }
            put(x, q, b);
            put(z, q, a);
        }
        Gate::S(q) => {
            let (a, b) = (bit(x, q), bit(z, q));
            if a && b {
                flip(ph);
            }
            put(z, q, a ^ b);
        }
        Gate::Sdg(q) => {
            let (a, b) = (bit(x, q), bit(z, q));
            if a && !b {
                flip(ph);
            }
            put(z, q, a ^ b);
        }
        Gate::X(q) => {
            if bit(z, q) {
                flip(ph);
            }
        }
        Gate::Z(q) => {
            if bit(x, q) {
                flip(ph);
            }
        }
        Gate::Y(q) => {
            if bit(x, q) ^ bit(z, q) {
                flip(ph);
            }
        }
        Gate::Cnot(c, t) => {
            let (xc, zc, xt, zt) = (bit(x, c), bit(z, c), bit(x, t), bit(z, t));
            if xc && zt && !(xt ^ zc) {
                flip(ph);
            }
            put(x, t, xt ^ xc);
            put(z, c, zc ^ zt);
        }
    }
}

/// `P ← g† P g`.
pub fn conjugate_inverse(p: &mut PauliString, g: Gate) {
    conjugate(p, g.inverse())
}

/// The 24 single-qubit Cliffords (mod phase) as H/S words, identity first.
pub static CLIFFORD1: Lazy<Vec<Vec<Gate>>> = Lazy::new(|| {
    let key = |w: &Vec<Gate>| {
        let mut xs = PauliString::single(1, 0, Pauli::X);
        let mut zs = PauliString::single(1, 0, Pauli::Z);
        for &g in w {
            conjugate(&mut xs, g);
            conjugate(&mut zs, g);
        }
        (xs.to_string(), zs.to_string())
    };
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<Vec<Gate>> = vec![vec![]];
    seen.insert(key(&vec![]));
    let mut frontier = vec![vec![]];
    while !frontier.is_empty() {
        let mut next = vec![];
        for w in &frontier {
            for g in [Gate::H(0), Gate::S(0)] {
                let mut w2: Vec<Gate> = w.clone();
                w2.push(g);
                if seen.insert(key(&w2)) {
                    out.push(w2.clone());
                    next.push(w2);
                }
            }
        }
        frontier = next;
    }
    assert_eq!(out.len(), 24);
    out
});

/// Gates of single-qubit Clifford `idx` acting on qubit `q`.
pub fn clifford1_gates(idx: usize, q: usize) -> Vec<Gate> {
    CLIFFORD1[idx]
        .iter()
        .map(|g| match g {
            Gate::H(_) => Gate::H(q),
            Gate::S(_) => Gate::S(q),
            _ => unreachable!(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    pub n: usize,
    pub layers: Vec<Vec<Gate>>,
}

impl CliffordCircuit {
    pub fn new(n: usize) -> Self {
        CliffordCircuit { n, layers: vec![] }
    }

    pub fn push_layer(&mut self, gates: Vec<Gate>) -> Result<()> {
        for g in &gates {
            if g.max_qubit() >= self.n {
                return Err(Error::Invalid(format!("gate {g:?} outside {} qubits", self.n)));
            }
        }
        self.layers.push(gates);
        Ok(())
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    /// Line-oriented text: one gate per line, `LAYER` between layers.
    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.n);
        for (k, layer) in self.layers.iter().enumerate() {
            if k > 0 {
                s.push_str("LAYER\n");
            }
            for g in layer {
                let _ = writeln!(s, "{}", g.mnemonic());
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| Error::Invalid("empty circuit".into()))?;
        let n = head
            .strip_prefix("QUBITS")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::Invalid("missing QUBITS header".into()))?;
        let mut c = CliffordCircuit::new(n);
        let mut cur = vec![];
        for l in lines {
            if l.eq_ignore_ascii_case("LAYER") {
                c.push_layer(std::mem::take(&mut cur))?;
            } else {
                cur.push(Gate::parse(l)?);
            }
        }
        c.push_layer(cur)?;
        Ok(c)
    }

    pub fn unitary(&self) -> CMat {
        let mut u = CMat::identity(1 << self.n, 1 << self.n);
        for g in self.gates() {
            u = embed_gate(self.n, *g) * u;
        }
        u
    }
}

/// Full 2ⁿ×2ⁿ matrix of a gate (qubit 0 is the most significant bit).
pub fn embed_gate(n: usize, g: Gate) -> CMat {
    crate::dense::embed(n, &g.matrix(), &g.qubits())
}

/// Each layer: a uniform single-qubit Clifford on every qubit, then `cnots` CNOTs on
/// uniformly random ordered pairs of distinct qubits (pairs may share qubits).
pub fn random_clifford_circuit<R: Rng + ?Sized>(
    n: usize,
    layers: usize,
    cnots: usize,
    rng: &mut R,
) -> Result<CliffordCircuit> {
    if n < 2 {
        return Err(Error::Invalid("need at least two qubits".into()));
    }
    let mut c = CliffordCircuit::new(n);
    for _ in 0..layers {
        let mut l = vec![];
        for q in 0..n {
            l.extend(clifford1_gates(rng.gen_range(0..24), q));
        }
        for _ in 0..cnots {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            l.push(Gate::Cnot(a, b));
        }
        c.layers.push(l);
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerTableau {
    n: usize,
    /// Rows 0..n destabilizers, n..2n stabilizers.
    rows: Vec<PauliString>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: i8,
    pub deterministic: bool,
}

impl StabilizerTableau {
    /// |0ⁿ⟩.
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::single(n, q, Pauli::X));
        }
        for q in 0..n {
            rows.push(PauliString::single(n, q, Pauli::Z));
        }
        StabilizerTableau { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds a fresh qubit in |0⟩ as the new last qubit.
    pub fn append_qubit(&mut self) {
        let (old, n) = (self.n, self.n + 1);
        let mut rows = Vec::with_capacity(2 * n);
        rows.extend(self.rows[..old].iter().map(|r| r.extended(n)));
        rows.push(PauliString::single(n, old, Pauli::X));
        rows.extend(self.rows[old..].iter().map(|r| r.extended(n)));
        rows.push(PauliString::single(n, old, Pauli::Z));
        self.n = n;
        self.rows = rows;
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.rows[self.n..]
    }

    pub fn apply_gate(&mut self, g: Gate) -> Result<()> {
        if g.max_qubit() >= self.n {
            return Err(Error::Invalid(format!("gate {g:?} outside {} qubits", self.n)));
        }
        for r in &mut self.rows {
            conjugate(r, g);
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &CliffordCircuit) -> Result<()> {
        for g in c.gates() {
            self.apply_gate(*g)?;
        }
        Ok(())
    }

    /// Applies a Pauli operator (conjugation flips signs of anticommuting rows).
    pub fn apply_pauli(&mut self, p: &PauliString) {
        for r in &mut self.rows {
            if r.anticommutes_unchecked(p) {
                let (_, _, ph) = r.raw_mut();
                flip(ph);
            }
        }
    }

    fn check(&self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch(p.n(), self.n));
        }
        if p.phase() & 1 == 1 {
            return Err(Error::Invalid("measured Pauli must be Hermitian".into()));
        }
        Ok(())
    }

    /// Product of stabilizers equal to ±P when P commutes with the whole group.
    fn deterministic_value(&self, p: &PauliString) -> i8 {
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if self.rows[i].anticommutes_unchecked(p) {
                acc.mul_assign_right(&self.rows[self.n + i]);
            }
        }
        debug_assert_eq!(acc.unsigned(), p.unsigned());
        if acc.phase() == p.phase() {
            1
        } else {
            -1
        }
    }

    pub fn expectation_pauli(&self, p: &PauliString) -> Result<i8> {
        self.check(p)?;
        if self.rows[self.n..].iter().any(|s| s.anticommutes_unchecked(p)) {
            return Ok(0);
        }
        Ok(self.deterministic_value(p))
    }

    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<Measurement> {
        self.check(p)?;
        let n = self.n;
        let Some(k) = (n..2 * n).find(|&i| self.rows[i].anticommutes_unchecked(p)) else {
            return Ok(Measurement {
                outcome: self.deterministic_value(p),
                deterministic: true,
            });
        };
        let pivot = self.rows[k].clone();
        for i in 0..2 * n {
            if i != k && self.rows[i].anticommutes_unchecked(p) {
                self.rows[i].mul_assign_right(&pivot);
            }
        }
        self.rows[k - n] = pivot;
        let outcome: i8 = if rng.gen::<bool>() { 1 } else { -1 };
        let mut s = p.unsigned();
        if (p.sign() * outcome) < 0 {
            s = s.with_phase(2);
        }
        self.rows[k] = s;
        Ok(Measurement {
            outcome,
            deterministic: false,
        })
    }
}

/// A random non-identity element of the output stabilizer group (expectation +1).
pub fn deterministic_observable<R: Rng + ?Sized>(c: &CliffordCircuit, rng: &mut R) -> PauliString {
    let mut t = StabilizerTableau::new(c.n);
    t.apply_circuit(c).expect("circuit indices checked at construction");
    loop {
        let mut acc = PauliString::identity(c.n);
        let mut any = false;
        for s in t.stabilizers() {
            if rng.gen::<bool>() {
                acc.mul_assign_right(s);
                any = true;
            }
        }
        if any {
            return acc;
        }
    }
}

/// `out[k]` is the observable seen just after layer `k` (`out[0]` at the input,
/// `out[L] = P`); an error after layer `k` flips the outcome iff it anticommutes with `out[k]`.
pub fn backpropagate_observable(c: &CliffordCircuit, p: &PauliString) -> Vec<PauliString> {
    let mut out = vec![p.clone(); c.layers.len() + 1];
    let mut cur = p.clone();
    for (k, layer) in c.layers.iter().enumerate().rev() {
        for &g in layer.iter().rev() {
            conjugate_inverse(&mut cur, g);
        }
        out[k] = cur.clone();
    }
    out
}
