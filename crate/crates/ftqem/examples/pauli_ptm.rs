//! Pauli algebra and transfer matrices: products with phases, commutation, and
//! the PTM of a Clifford composed with a Pauli channel.

use ftqem::linalg;
use ftqem::pauli::PauliString;
use ftqem::ptm::{ptm_compose, ptm_of_unitary};
use ftqem::quasiprob::PauliChannel;

fn main() -> ftqem::Result<()> {
    let a: PauliString = "XYZ".parse()?;
    let b: PauliString = "ZZX".parse()?;
    println!("{a} · {b} = {}", a.mul(&b)?);
    println!("{a} commutes with {b}: {}", a.commutes(&b)?);
    let h = ptm_of_unitary(&linalg::hadamard(), 1)?;
    let noise = PauliChannel::xyz(0.01, 0.002, 0.005)?.ptm();
    let noisy_h = ptm_compose(&noise, &h)?;
    println!("PTM of H followed by Pauli noise:\n{:.4}", noisy_h.m);
    Ok(())
}
