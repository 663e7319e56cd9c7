//! Ground-energy bisection with a noisy phase-estimation decision oracle,
//! with and without error cancellation.
//!
//! Usage: bisection [trials] [noise]

use ftqem::decision::{run_bisection_demo, QpeConfig};
use std::time::Instant;

fn main() -> ftqem::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let trials = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let noise = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    for mitigate in [false, true] {
        let cfg = QpeConfig {
            trials,
            noise,
            mitigate,
            ..Default::default()
        };
        let t = Instant::now();
        let r = run_bisection_demo(&cfg, 11)?;
        println!(
            "mitigate={mitigate:<5} E0={:.4} coverage={:.2} mean_width={:.3} iterations={:.1} (expected {}) gamma_tot={:.3} seconds={:.1}",
            r.ground_energy,
            r.coverage(),
            r.mean_width,
            r.mean_iterations,
            r.expected_iterations,
            r.gamma_tot,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
