//! Tableau simulation of a random Clifford circuit and back-propagation of a
//! deterministic observable, which tells which single faults flip it.

use ftqem::stab::{backpropagate_observable, deterministic_observable, random_clifford_circuit, StabilizerTableau};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ftqem::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = random_clifford_circuit(6, 4, 3, &mut rng)?;
    print!("{}", c.to_text());
    let obs = deterministic_observable(&c, &mut rng);
    let mut t = StabilizerTableau::new(c.n);
    t.apply_circuit(&c)?;
    println!("observable {obs}: expectation {}", t.expectation_pauli(&obs)?);
    for (k, p) in backpropagate_observable(&c, &obs).iter().enumerate() {
        println!("after layer {k}: faults anticommuting with {p} flip the outcome");
    }
    Ok(())
}
