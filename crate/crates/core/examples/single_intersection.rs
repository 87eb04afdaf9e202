//! Broken instances where `W^2 = E` has a single intersection, so there
//! is nothing to integrate between turning points.

use susy_lab::invariance::bswkb_applicability;
use susy_lab::superpotentials::{lookup, ClassTag, DomainSpec, ParamRecord};
use susy_lab::SuperpotentialInstance;

fn show(sp: &SuperpotentialInstance, e: f64) {
    match bswkb_applicability(sp, e) {
        Ok(app) => println!("{:<22} E={e:<6} {}: {}", sp.name(), app.kind, app.rationale),
        Err(err) => println!("{:<22} E={e:<6} {err}", sp.name()),
    }
}

fn main() -> susy_lab::Result<()> {
    for name in ["morse-broken", "coulomb-broken", "eckart-broken", "oscillator-3d", "scarf1", "scarf2"] {
        show(&lookup(name)?, 20.0);
    }
    let scarf_ab = SuperpotentialInstance::new(
        "scarf a = B",
        ClassTag::IIIBNegLambda,
        ParamRecord::new(2.0).with_b(2.0).with_lambda(-1.0),
    )?;
    show(&scarf_ab, 20.0);
    let pt = SuperpotentialInstance::with_domain(
        "pt f1 > 0",
        ClassTag::IIIBPosLambdaUnbounded,
        ParamRecord::new(2.0).with_b(1.0).with_lambda(1.0),
        DomainSpec::negative_half_line(),
    )?;
    show(&pt, 10.0);
    Ok(())
}
