//! Logical error rates of small planar codes at a few physical error rates.

use ftqem::surface::estimate_logical_channel;
use std::time::Instant;

fn main() -> ftqem::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let shots: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    println!("d,p,p_X,p_Y,p_Z,seconds");
    for d in [3, 5, 7] {
        for p in [0.01, 0.03, 0.045, 0.07] {
            let t = Instant::now();
            let e = estimate_logical_channel(d, p, shots, 1)?;
            println!(
                "{d},{p},{:.3e},{:.3e},{:.3e},{:.2}",
                e.probs[1],
                e.probs[2],
                e.probs[3],
                t.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
