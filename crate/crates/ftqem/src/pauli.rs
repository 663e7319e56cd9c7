//! Bit-packed Pauli strings with exact phase tracking.
//!
//! A string stores `i^phase · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` where each factor is one of
//! the Hermitian matrices I, X, Y, Z encoded by an (x, z) bit pair: (1,0)=X,
//! (1,1)=Y, (0,1)=Z.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Index in the (I, X, Y, Z) basis order.
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i & 3]
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.index()]
    }

    /// True when the two single-qubit factors anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        let (a, b) = (self.bits(), other.bits());
        (a.0 & b.1) ^ (a.1 & b.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Exponent of i, mod 4.
    phase: u8,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words(n);
        PauliString {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    pub fn from_paulis(ps: &[Pauli]) -> Self {
        let mut s = Self::identity(ps.len());
        for (q, &p) in ps.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Basis index in base-4 big-endian order (qubit 0 is the most significant digit).
    pub fn from_index(n: usize, mut idx: usize) -> Self {
        let mut s = Self::identity(n);
        for q in (0..n).rev() {
            s.set(q, Pauli::from_index(idx & 3));
            idx >>= 2;
        }
        s
    }

    pub fn index(&self) -> usize {
        (0..self.n).fold(0, |acc, q| acc * 4 + self.get(q).index())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    /// Sign for Hermitian strings (phase 0 or 2).
    pub fn sign(&self) -> i8 {
        match self.phase {
            0 => 1,
            2 => -1,
            _ => 0,
        }
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Mutable access to (x words, z words, phase) for in-place gate conjugation.
    pub fn raw_mut(&mut self) -> (&mut [u64], &mut [u64], &mut u8) {
        (&mut self.x, &mut self.z, &mut self.phase)
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (xb, zb) = p.bits();
        let m = 1u64 << (q % 64);
        let w = q / 64;
        self.x[w] = (self.x[w] & !m) | if xb { m } else { 0 };
        self.z[w] = (self.z[w] & !m) | if zb { m } else { 0 };
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// True when the Pauli part is the identity (phase ignored).
    pub fn is_trivial(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_trivial() && self.phase == 0
    }

    /// Same operator with the phase dropped.
    pub fn unsigned(&self) -> Self {
        let mut s = self.clone();
        s.phase = 0;
        s
    }

    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    /// `self ← self · other`. Panics on size mismatch.
    pub fn mul_assign_right(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n);
        let mut plus = 0u32;
        let mut minus = 0u32;
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let p = (x1 & z1 & z2 & !x2) | (x1 & !z1 & z2 & x2) | (!x1 & z1 & x2 & !z2);
            let m = (x1 & z1 & x2 & !z2) | (x1 & !z1 & z2 & !x2) | (!x1 & z1 & x2 & z2);
            plus += p.count_ones();
            minus += m.count_ones();
            self.x[w] = x1 ^ x2;
            self.z[w] = z1 ^ z2;
        }
        self.phase = ((self.phase as u32 + other.phase as u32 + plus + 4 * 64 - (minus % 4)) % 4) as u8;
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        Ok(!self.anticommutes_unchecked(other))
    }

    pub fn anticommutes_unchecked(&self, other: &PauliString) -> bool {
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        acc & 1 == 1
    }

    /// Restriction to a subset of qubits, phase dropped.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let ps: Vec<Pauli> = qubits.iter().map(|&q| self.get(q)).collect();
        PauliString::from_paulis(&ps)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut s = PauliString::identity(self.n + other.n);
        for q in 0..self.n {
            s.set(q, self.get(q));
        }
        for q in 0..other.n {
            s.set(self.n + q, other.get(q));
        }
        s.phase = (self.phase + other.phase) % 4;
        s
    }

    /// Same string on a larger register (new qubits carry identity).
    pub fn extended(&self, n: usize) -> PauliString {
        assert!(n >= self.n);
        let mut s = PauliString::identity(n);
        for q in 0..self.n {
            s.set(q, self.get(q));
        }
        s.phase = self.phase;
        s
    }

    /// Drops qubit `q`, shifting higher qubits down.
    pub fn remove_qubit(&self, q: usize) -> PauliString {
        let mut s = PauliString::identity(self.n - 1);
        let mut k = 0;
        for j in 0..self.n {
            if j != q {
                s.set(k, self.get(j));
                k += 1;
            }
        }
        s.phase = self.phase;
        s
    }
}

/// Symplectic commutation test, `commutes(a, b)`.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}

pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.mul(b)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{p}")?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let ps = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::Invalid(format!("bad Pauli character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_paulis(&ps).with_phase(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn xy_is_iz() {
        assert_eq!(ps("X").mul(&ps("Y")).unwrap(), ps("+iZ"));
        assert_eq!(ps("Y").mul(&ps("X")).unwrap(), ps("-iZ"));
        assert_eq!(ps("Z").mul(&ps("X")).unwrap(), ps("+iY"));
    }

    #[test]
    fn involution() {
        for i in 0..64 {
            let p = PauliString::from_index(3, i);
            assert!(p.mul(&p).unwrap().is_identity());
        }
    }

    #[test]
    fn index_round_trip() {
        for i in 0..256 {
            assert_eq!(PauliString::from_index(4, i).index(), i);
        }
        assert_eq!(ps("XI").index(), 4);
        assert_eq!(ps("IX").index(), 1);
    }

    #[test]
    fn size_mismatch() {
        assert!(ps("X").mul(&ps("XX")).is_err());
        assert!(ps("X").commutes(&ps("XX")).is_err());
    }

    #[test]
    fn commutation_basics() {
        assert!(ps("X").commutes(&ps("X")).unwrap());
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XY").commutes(&ps("YX")).unwrap());
    }

    #[test]
    fn wide_strings() {
        let mut a = PauliString::identity(130);
        a.set(129, Pauli::X);
        a.set(3, Pauli::Z);
        let mut b = PauliString::identity(130);
        b.set(129, Pauli::Z);
        assert!(!a.commutes(&b).unwrap());
        let c = a.mul(&b).unwrap();
        assert_eq!(c.get(129), Pauli::Y);
        assert_eq!(c.phase(), 3);
        assert_eq!(c.weight(), 2);
    }
}
