//! Threshold scan: logical error per run against the physical rate for
//! d ∈ {3, 5, 7}, and the estimated curve crossing.

use ftqem::surface::{threshold_estimate, threshold_scan};

fn main() -> ftqem::Result<()> {
    let shots = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let ps: Vec<f64> = (0..11).map(|k| 0.02 + 0.005 * k as f64).collect();
    let pts = threshold_scan(&[3, 5, 7], &ps, shots, 1)?;
    println!("d,p,p_logical,se");
    for p in &pts {
        println!("{},{:.4},{:.4e},{:.1e}", p.d, p.p, p.p_logical, p.se);
    }
    match threshold_estimate(&pts) {
        Some(t) => println!("crossing at p ≈ {t:.4}"),
        None => println!("no crossing found"),
    }
    Ok(())
}
