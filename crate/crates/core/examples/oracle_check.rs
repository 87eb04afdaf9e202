//! Finite-difference levels of both partner Hamiltonians of the broken
//! oscillator, next to the closed form.

use susy_lab::oracle::{self, GridSpec};
use susy_lab::spectra;
use susy_lab::superpotentials::{lookup, Partner};

fn main() -> susy_lab::Result<()> {
    let sp = lookup("oscillator-3d")?;
    let grid = GridSpec::fit(&sp, &[Partner::Minus, Partner::Plus], 4, oracle::DEFAULT_NODES)?;
    println!("cuts [{:.4}, {:.4}], N = {}", grid.xmin, grid.xmax, grid.n);

    let minus = oracle::solve_spectrum(&sp, Partner::Minus, &grid, 4)?;
    let plus = oracle::solve_spectrum(&sp, Partner::Plus, &grid, 4)?;
    for n in 0..4 {
        println!(
            "n={n}  closed form {:>5}  H- {:.9}  H+ {:.9}",
            spectra::broken_energy(&sp, n)?,
            minus.best()[n],
            plus.best()[n]
        );
    }
    let p = oracle::convergence_order(&sp, Partner::Minus, &grid.with_nodes(500), 0)?;
    println!("observed order of the ground state: {p:.3}");
    let moved = oracle::offset_sensitivity(&sp, Partner::Minus, &grid, 4)?;
    println!("relative change when the r = 0 cut moves closer: {moved:?}");
    Ok(())
}
