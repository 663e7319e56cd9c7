//! Runs selected acceptance criteria and prints one PASS/FAIL line each, with
//! the individual checks underneath.
//!
//! Usage: acceptance_report [criterion ...]   (all when none given)

use ftqem::acceptance::{run_criterion, ALL};

fn main() -> ftqem::Result<()> {
    let picked: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let list = if picked.is_empty() { ALL.to_vec() } else { picked };
    for k in list {
        let r = run_criterion(k, 2024)?;
        println!("{}", r.line());
        for c in &r.checks {
            println!("    [{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.id, c.detail);
        }
    }
    Ok(())
}
