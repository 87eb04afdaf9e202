//! Phase of the 3-D oscillator and Scarf I superpotentials over a grid of
//! parameters. `B` marks the broken phase, `.` the unbroken one.

use susy_lab::invariance::{classify_phase, Phase};
use susy_lab::superpotentials::{ClassTag, ParamRecord};
use susy_lab::SuperpotentialInstance;

fn mark(sp: &SuperpotentialInstance) -> char {
    match classify_phase(sp) {
        Ok(r) if r.phase == Phase::Broken => 'B',
        Ok(_) => '.',
        Err(_) => '?',
    }
}

fn main() -> susy_lab::Result<()> {
    print!("oscillator, a = -4..4: ");
    for i in -4..=4 {
        if i == 0 {
            print!(" ");
            continue;
        }
        let sp = SuperpotentialInstance::new("osc", ClassTag::IIIA, ParamRecord::new(i as f64).with_omega(1.0))?;
        print!("{}", mark(&sp));
    }
    println!();

    println!("Scarf I (lambda = -1), rows a = 4..-4, columns B = -4..4");
    for a in (-4..=4).rev() {
        let row: String = (-4..=4)
            .map(|b| {
                let p = ParamRecord::new(a as f64).with_b(b as f64).with_lambda(-1.0);
                match SuperpotentialInstance::new("scarf", ClassTag::IIIBNegLambda, p) {
                    Ok(sp) => mark(&sp),
                    Err(_) => ' ',
                }
            })
            .collect();
        println!("  a = {a:>2}  {row}");
    }
    Ok(())
}
