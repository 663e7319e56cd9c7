//! Exact quasi-probability inverse of Pauli channels and its cost γ against the
//! first-order estimate 1 + 2p.

use ftqem::harness::logical_channel;
use ftqem::quasiprob::{first_order_cost, invert_pauli_channel, PauliChannel};

fn main() -> ftqem::Result<()> {
    println!("channel,p_err,gamma,first_order");
    for d in [5, 7, 9, 11] {
        let ch = logical_channel(d)?;
        let dec = invert_pauli_channel(&ch)?;
        println!("table d={d},{:.3e},{:.9},{:.9}", ch.p_err(), dec.gamma, first_order_cost(ch.p_err()));
    }
    for k in 0..=4 {
        let p = 10f64.powf(-4.0 + 0.5 * k as f64);
        let dec = invert_pauli_channel(&PauliChannel::depolarizing(p)?)?;
        println!("depolarizing,{p:.3e},{:.9},{:.9}", dec.gamma, first_order_cost(p));
    }
    let dec = invert_pauli_channel(&PauliChannel::xyz(0.02, 0.01, 0.03)?)?;
    for t in &dec.terms {
        println!("  η = {:+.6} on {:?}", t.eta, t.op);
    }
    Ok(())
}
