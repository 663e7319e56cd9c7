//! Code distance and qubit savings from error mitigation for a range of
//! circuit sizes, under both cycles-per-gate conventions.

use ftqem::resource::{max_gates_at_distance, required_distance, CodeParams, CyclesPerGate, Requirement};

fn main() -> ftqem::Result<()> {
    for m in [CyclesPerGate::Fixed(1), CyclesPerGate::Distance] {
        let params = CodeParams { m, ..CodeParams::default() };
        println!("cycles per gate: {m:?}");
        println!("{}", Requirement::CSV_HEADER);
        for k in [2, 4, 6, 8, 10, 12] {
            println!("{}", required_distance(&params, 10f64.powi(k), 1e-3)?.csv_row());
        }
        let b = max_gates_at_distance(&params, 11, 1e-3)?;
        println!("d=11: {:.3e} → {:.3e} gates (×{:.0})\n", b.unmitigated, b.mitigated, b.gain());
    }
    Ok(())
}
