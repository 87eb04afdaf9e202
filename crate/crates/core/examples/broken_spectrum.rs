//! Broken-phase levels by both routes: the closed form, and the discrete
//! map followed by the unbroken spectrum of the mapped parameters.

use susy_lab::spectra;
use susy_lab::superpotentials::lookup;

fn main() -> susy_lab::Result<()> {
    for name in ["oscillator-3d", "scarf1", "poschl-teller"] {
        let sp = lookup(name)?;
        println!("{name}");
        println!("  {:>2}  {:>12}  {:>12}  {:>10}", "n", "closed form", "mapped + c", "gap");
        for n in 0..6 {
            let r = spectra::broken_routes(&sp, n)?;
            println!("  {n:>2}  {:>12.6}  {:>12.6}  {:>10.1e}", r.closed_form, r.composed, r.relative_gap());
        }
    }
    Ok(())
}
