//! Writes the plotting CSVs for the broken and unbroken oscillator into a
//! directory (default `figure-data`).

use std::path::PathBuf;

use susy_lab::cli;
use susy_lab::superpotentials::lookup;

fn main() -> susy_lab::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "figure-data".into());
    let sp = lookup("oscillator-3d")?;
    let manifest = cli::cmd_figure_data(&sp, None, 400, 5, &dir)?;
    for f in &manifest.files {
        println!("{f}");
    }
    Ok(())
}
