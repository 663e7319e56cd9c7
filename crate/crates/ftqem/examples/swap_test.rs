//! SWAP test between an exact and a Clifford+T-synthesized random circuit, with
//! and without approximation-error mitigation, over a sweep of T budgets.

use ftqem::swap::{run_swap_budget, SwapBudgetStats, SwapTestSpec};

fn main() -> ftqem::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let circuits: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let shots: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    println!("{}", SwapBudgetStats::CSV_HEADER);
    for t_budget in [24, 36, 48, 60] {
        let spec = SwapTestSpec {
            t_budget,
            ..Default::default()
        };
        let s = run_swap_budget(spec, circuits, shots, 7)?;
        println!("{}", s.csv_row());
    }
    Ok(())
}
