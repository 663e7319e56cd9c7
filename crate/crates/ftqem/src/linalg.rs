//! Small dense complex-matrix helpers shared by the exact simulators.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{Pauli, PauliString};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn mat2(a: C64, b: C64, cc: C64, d: C64) -> CMat {
    CMat::from_row_slice(2, 2, &[a, b, cc, d])
}

pub fn pauli1(p: Pauli) -> CMat {
    match p {
        Pauli::I => mat2(ONE, ZERO, ZERO, ONE),
        Pauli::X => mat2(ZERO, ONE, ONE, ZERO),
        Pauli::Y => mat2(ZERO, -I, I, ZERO),
        Pauli::Z => mat2(ONE, ZERO, ZERO, -ONE),
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Dense matrix of a Pauli string, qubit 0 is the leftmost Kronecker factor.
pub fn pauli_matrix(p: &PauliString) -> CMat {
    let mut m = CMat::from_element(1, 1, ONE);
    for q in 0..p.n() {
        m = kron(&m, &pauli1(p.get(q)));
    }
    m * I.powi(p.phase() as i32)
}

/// Tr[P A] for the unsigned Pauli with basis index `idx` on `n` qubits, in O(2ⁿ).
pub fn pauli_trace(n: usize, idx: usize, a: &CMat) -> C64 {
    let (xb, zb, ny) = pauli_bits(n, idx);
    let dim = 1usize << n;
    let base = (-I).powi(ny as i32);
    let mut acc = ZERO;
    for r in 0..dim {
        let col = r ^ xb;
        let sign = if (r & zb).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        // (P)_{r,col} A_{col,r}
        acc += a[(col, r)] * sign;
    }
    acc * base
}

/// (x mask, z mask, Y count) as state-index bit masks for basis index `idx`.
pub fn pauli_bits(n: usize, idx: usize) -> (usize, usize, u32) {
    let mut xb = 0;
    let mut zb = 0;
    let mut ny = 0;
    for q in 0..n {
        let d = (idx >> (2 * (n - 1 - q))) & 3;
        let bit = 1 << (n - 1 - q);
        match d {
            1 => xb |= bit,
            2 => {
                xb |= bit;
                zb |= bit;
                ny += 1
            }
            3 => zb |= bit,
            _ => {}
        }
    }
    (xb, zb, ny)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let d = u.nrows();
    let p = u.adjoint() * u;
    (p - CMat::identity(d, d)).iter().all(|z| z.norm() <= tol)
}

pub fn hadamard() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    mat2(c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0))
}

pub fn s_gate() -> CMat {
    mat2(ONE, ZERO, ZERO, I)
}

pub fn t_gate() -> CMat {
    let w = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    mat2(ONE, ZERO, ZERO, w)
}

pub fn cnot() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// `exp(iθZ/2)`.
pub fn rz(theta: f64) -> CMat {
    mat2(
        C64::from_polar(1.0, theta / 2.0),
        ZERO,
        ZERO,
        C64::from_polar(1.0, -theta / 2.0),
    )
}

/// `√X = H S H`.
pub fn sqrt_x() -> CMat {
    mat2(c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5))
}

/// Operator norm of `a − e^{iφ} b` minimised over the global phase φ, for 2×2 unitaries.
pub fn phase_aligned_distance(a: &CMat, b: &CMat) -> f64 {
    // W = a† b has eigenvalues e^{iφ0}e^{±iβ}; the optimum aligns φ to φ0.
    let w = a.adjoint() * b;
    let det = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)];
    let h = det.sqrt();
    // w / h = [[α, β], [−β̄, ᾱ]] ∈ SU(2); cos β = Re α, sin β = √(Im²α + |β|²)
    let v = w / h;
    let al = (v[(0, 0)] + v[(1, 1)].conj()) * 0.5;
    let be = (v[(0, 1)] - v[(1, 0)].conj()) * 0.5;
    let cosb = al.re.abs();
    let sinb = (al.im * al.im + be.norm_sqr()).sqrt();
    let beta = sinb.atan2(cosb);
    2.0 * (beta / 2.0).sin()
}

/// Largest singular value.
pub fn spectral_norm(a: &CMat) -> f64 {
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_trace_matches_dense() {
        let n = 2;
        let a = CMat::from_fn(4, 4, |i, j| c((i * 3 + j) as f64, (i as f64) - (j as f64) * 0.5));
        for idx in 0..16 {
            let p = PauliString::from_index(n, idx);
            let dense = (pauli_matrix(&p) * &a).trace();
            assert!((dense - pauli_trace(n, idx, &a)).norm() < 1e-12);
        }
    }

    #[test]
    fn sqrt_x_is_hsh() {
        let m = hadamard() * s_gate() * hadamard();
        assert!((m - sqrt_x()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn rz_distance_closed_form() {
        for &e in &[0.0, 0.01, 0.3, 1.0] {
            let d = phase_aligned_distance(&rz(e), &CMat::identity(2, 2));
            // exp(iεZ/2) has eigenphases ±ε/2, so the phase-aligned distance is 2 sin(ε/4)
            assert!((d - 2.0 * (e / 4.0_f64).sin().abs()).abs() < 1e-12);
        }
        // global phase is ignored
        let u = rz(0.2) * C64::from_polar(1.0, 0.7);
        assert!(phase_aligned_distance(&u, &rz(0.2)) < 1e-12);
    }
}
