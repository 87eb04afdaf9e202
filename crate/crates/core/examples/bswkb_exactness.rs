//! The quantization integral `∫ sqrt(E - W^2) dx` against `n pi hbar`
//! (unbroken) and `(n + 1/2) pi hbar` (broken) across hbar.

use susy_lab::quadrature;
use susy_lab::superpotentials::lookup;

fn main() -> susy_lab::Result<()> {
    for name in ["oscillator-3d", "oscillator-3d-unbroken", "scarf1", "poschl-teller-unbroken"] {
        let sp = lookup(name)?;
        for n in [0, 3, 7] {
            for r in quadrature::hbar_sweep(&sp, n, &[0.5, 1.0, 2.0])? {
                println!(
                    "{name:<24} {:<8} n={n} hbar={:<3} E={:<10.4} I={:<12.8} |I - target|={:.1e} ({} nodes)",
                    r.phase, r.hbar, r.energy, r.integral, r.abs_error, r.quadrature.nodes
                );
            }
        }
    }
    Ok(())
}
