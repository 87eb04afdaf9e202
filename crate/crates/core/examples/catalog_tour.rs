//! Walks the shipped catalog: class, domain, phase and the boundary
//! behaviour of `W` that decides it.

use susy_lab::invariance;
use susy_lab::superpotentials::catalog;

fn main() -> susy_lab::Result<()> {
    for sp in catalog() {
        let report = invariance::classify_phase(&sp)?;
        println!("{:<24} {:<26} {:<12} {}", sp.name(), sp.tag().as_str(), sp.domain().to_string(), report.phase);
        for ev in &report.evidence {
            println!("    {:?}: {}", ev.side, ev.leading_term);
        }
    }
    Ok(())
}
