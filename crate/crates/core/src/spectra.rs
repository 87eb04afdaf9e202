//! Analytic spectra.
//!
//! Unbroken levels follow from additive shape invariance,
//! `E_n = g(a + n hbar) - g(a)`. Broken levels of Class III come from the
//! discrete parameter maps: the broken instance is sent to an unbroken one,
//! whose spectrum is shifted by the map's constant.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariance::{self, Phase};
use crate::superpotentials::{ClassTag, SuperpotentialInstance};

/// Levels returned by [`spectrum`] when no count is given.
pub const DEFAULT_LEVELS: usize = 10;

/// Relative tolerance for agreement of the closed-form and composed broken energies.
pub const ROUTE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: usize,
    #[serde(rename = "E")]
    pub value: f64,
    pub phase: Phase,
    #[serde(rename = "formula")]
    pub formula_id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub instance: String,
    pub phase: Phase,
    pub levels: Vec<EnergyLevel>,
    pub formula: String,
    pub g_function: String,
    pub hierarchy_condition_satisfied: bool,
    /// First `n` rejected by the hierarchy condition, if the list was cut short.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_at: Option<usize>,
}

impl SpectrumResult {
    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value).collect()
    }

    /// Writes `n,E` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "E"])?;
        for l in &self.levels {
            w.write_record([l.n.to_string(), format_energy(l.value)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest decimal that round-trips, so CSV output is reproducible.
pub(crate) fn format_energy(v: f64) -> String {
    format!("{v}")
}

/// `g(a)` with the additive constant chosen so that `g` has no constant term.
/// Negating `W` reverses the ladder (see [`ladder_step`]) but leaves `g` as is.
pub fn g(sp: &SuperpotentialInstance, a: f64) -> f64 {
    let p = sp.params();
    match sp.tag() {
        ClassTag::IA => p.omega() * a,
        ClassTag::IB => -p.alpha().powi(2) * a * a,
        ClassTag::IIA => -p.b().powi(2) / (a * a),
        ClassTag::IIB => -p.b().powi(2) / (a * a) - sp.lambda() * a * a,
        ClassTag::IIIA => -2.0 * sp.epsilon() * a,
        ClassTag::IIIBNegLambda
        | ClassTag::IIIBPosLambdaBounded
        | ClassTag::IIIBPosLambdaUnbounded => -sp.lambda() * a * a,
    }
}

/// Parameter step of the additive shape-invariance ladder: `+hbar`, or
/// `-hbar` once `W` has been negated.
pub fn ladder_step(sp: &SuperpotentialInstance) -> f64 {
    if sp.is_negated() {
        -sp.hbar()
    } else {
        sp.hbar()
    }
}

pub fn g_description(tag: ClassTag) -> &'static str {
    match tag {
        ClassTag::IA => "g(a) = omega a",
        ClassTag::IB => "g(a) = -alpha^2 a^2",
        ClassTag::IIA => "g(a) = -B^2/a^2",
        ClassTag::IIB => "g(a) = -B^2/a^2 - lambda a^2",
        ClassTag::IIIA => "g(a) = -2 eps a",
        _ => "g(a) = -lambda a^2",
    }
}

fn unbroken_formula(tag: ClassTag) -> &'static str {
    match tag {
        ClassTag::IA => "E_n = n omega hbar",
        ClassTag::IB => "E_n = alpha^2 a^2 - alpha^2 (a + n hbar)^2",
        ClassTag::IIA => "E_n = B^2/a^2 - B^2/(a + n hbar)^2",
        ClassTag::IIB => "E_n = B^2/a^2 - B^2/(a + n hbar)^2 + lambda [a^2 - (a + n hbar)^2]",
        ClassTag::IIIA => "E_n = 2 n omega hbar",
        _ => "E_n = lambda [a^2 - (a + n hbar)^2]",
    }
}

fn broken_formula(tag: ClassTag) -> &'static str {
    match tag {
        ClassTag::IIIA => "E_n = (2a - hbar (1 + 2n)) eps",
        _ => "E_n = lambda [a^2 - (B + n hbar + hbar/2)^2]",
    }
}

/// Checks that the ground state of `H-` at the shifted parameter is
/// normalisable, i.e. `W` runs from negative to positive.
fn ladder_rung(sp: &SuperpotentialInstance, m: usize) -> Result<()> {
    let a_m = sp.a() + m as f64 * ladder_step(sp);
    let fail = |reason: String| Err(Error::Hierarchy { n: m, reason });
    if sp.tag().is_iiib() && sp.lambda() * a_m >= 0.0 {
        return fail(format!("lambda (a + n hbar) = {} is not negative", sp.lambda() * a_m));
    }
    let shifted = match sp.with_a(a_m) {
        Ok(s) => s,
        Err(e) => return fail(format!("a + n hbar = {a_m} leaves the parameter space ({e})")),
    };
    match invariance::boundary_signs(&shifted) {
        Ok([l, r]) if l < 0.0 && r > 0.0 => Ok(()),
        Ok(signs) => fail(format!(
            "W at a + n hbar = {a_m} has boundary signs {signs:?}; the level is not bound"
        )),
        Err(e) => fail(format!("boundary signs undetermined at a + n hbar = {a_m} ({e})")),
    }
}

fn require_unbroken_orientation(sp: &SuperpotentialInstance) -> Result<()> {
    let report = invariance::classify_phase(sp)?;
    match report.phase {
        Phase::Broken => Err(Error::Phase(format!(
            "'{}' is in the broken phase; use broken_energy",
            sp.name()
        ))),
        Phase::Unbroken if report.signs[0] > 0.0 => Err(Error::Phase(format!(
            "'{}' has W > 0 on the left and W < 0 on the right; the zero mode belongs to H+, \
             negate W to put it in H-",
            sp.name()
        ))),
        Phase::Unbroken => Ok(()),
    }
}

/// Unbroken level `E-_n = g(a + n hbar) - g(a)`, with `E-_0 = 0`.
pub fn unbroken_energy(sp: &SuperpotentialInstance, n: usize) -> Result<f64> {
    require_unbroken_orientation(sp)?;
    for m in 1..=n {
        ladder_rung(sp, m)?;
    }
    Ok(unbroken_closed_form(sp, n))
}

fn unbroken_closed_form(sp: &SuperpotentialInstance, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let a = sp.a();
    let step = ladder_step(sp);
    g(sp, a + n as f64 * step) - g(sp, a)
}

/// The broken energy by both routes: the closed form and the discrete map
/// followed by the unbroken spectrum of the mapped instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrokenRoutes {
    pub n: usize,
    pub closed_form: f64,
    pub composed: f64,
    pub mapped_level: f64,
    pub energy_shift: f64,
}

impl BrokenRoutes {
    pub fn relative_gap(&self) -> f64 {
        (self.closed_form - self.composed).abs() / self.closed_form.abs().max(1.0)
    }
}

/// Reorients a broken instance so that `W > 0` at both ends and `negated`
/// is cleared where the parameters can absorb the sign.
pub fn canonical_broken(sp: &SuperpotentialInstance) -> Result<SuperpotentialInstance> {
    let flip_params = |s: &SuperpotentialInstance| {
        let p = *s.params();
        let mut q = s.with_params(crate::superpotentials::ParamRecord {
            a: -p.a,
            b: p.b.map(|b| -b),
            ..p
        })?;
        if q.is_negated() {
            q = q.negated();
        }
        Ok::<_, Error>(q)
    };
    let mut c = sp.clone();
    if c.tag().is_iiib() && c.is_negated() {
        c = flip_params(&c.negated())?;
    }
    let signs = invariance::boundary_signs(&c)?;
    if signs[0] < 0.0 && signs[1] < 0.0 {
        c = if c.tag().is_iiib() { flip_params(&c)? } else { c.negated() };
    }
    Ok(c)
}

pub fn broken_routes(sp: &SuperpotentialInstance, n: usize) -> Result<BrokenRoutes> {
    let tag = sp.tag();
    if tag.is_class_i() || tag.is_class_ii() {
        return Err(Error::UnsupportedClass(tag));
    }
    if tag == ClassTag::IIIBPosLambdaBounded {
        return Err(Error::Phase(
            "the bounded lambda > 0 case does not go into a broken supersymmetric phase".into(),
        ));
    }
    let phase = invariance::classify_phase(sp)?;
    if phase.phase != Phase::Broken {
        return Err(Error::Phase(format!(
            "'{}' is in the unbroken phase; use unbroken_energy",
            sp.name()
        )));
    }
    let c = canonical_broken(sp)?;
    let map = invariance::discrete_si_map(&c)?;
    let mapped = invariance::mapped_instance(&c, &map)?;
    let mapped_phase = invariance::classify_phase(&mapped)?;
    if mapped_phase.phase != Phase::Unbroken {
        return Err(Error::UnsupportedParameters(format!(
            "a = {} is a fixed point of the discrete map; the mapped instance is still broken",
            c.a()
        )));
    }
    let mapped_level = unbroken_energy(&mapped, n)?;
    let composed = mapped_level + map.energy_shift;

    let p = c.params();
    let hbar = c.hbar();
    let nf = n as f64;
    let closed_form = match tag {
        ClassTag::IIIA => (2.0 * p.a - hbar * (1.0 + 2.0 * nf)) * c.epsilon(),
        _ => {
            let shifted = p.b() + nf * hbar + 0.5 * hbar;
            c.lambda() * (p.a * p.a - shifted * shifted)
        }
    };
    Ok(BrokenRoutes { n, closed_form, composed, mapped_level, energy_shift: map.energy_shift })
}

/// Broken level `E^B_n` of a Class III instance. The closed form is
/// returned after it has been checked against the composed route.
pub fn broken_energy(sp: &SuperpotentialInstance, n: usize) -> Result<f64> {
    let r = broken_routes(sp, n)?;
    if r.relative_gap() > ROUTE_TOLERANCE {
        return Err(Error::UnsupportedParameters(format!(
            "closed form {} and composed route {} disagree at n = {n}",
            r.closed_form, r.composed
        )));
    }
    Ok(r.closed_form)
}

/// `(E-_n, E+_n)` in the broken phase; `(E-_{n+1}, E+_n)` in the unbroken
/// phase, where `E+_n` is the `n`-th level of the partner (itself built from
/// the shape-invariance ladder at `a + hbar`).
pub fn isospectral_pair(sp: &SuperpotentialInstance, n: usize) -> Result<(f64, f64)> {
    let phase = invariance::classify_phase(sp)?.phase;
    match phase {
        Phase::Broken => {
            let e = broken_energy(sp, n)?;
            Ok((e, e))
        }
        Phase::Unbroken => {
            let e_minus = unbroken_energy(sp, n + 1)?;
            // H+(a) = H-(a + hbar) + g(a + hbar) - g(a)
            let step = ladder_step(sp);
            let partner = sp.with_a(sp.a() + step)?;
            let offset = g(sp, sp.a() + step) - g(sp, sp.a());
            let e_plus = unbroken_energy(&partner, n)? + offset;
            Ok((e_minus, e_plus))
        }
    }
}

/// Up to `count` levels, stopping early at the first level the hierarchy
/// condition rejects.
pub fn spectrum(sp: &SuperpotentialInstance, count: usize) -> Result<SpectrumResult> {
    let phase = invariance::classify_phase(sp)?.phase;
    let mut levels = Vec::with_capacity(count);
    let mut truncated_at = None;
    let formula = match phase {
        Phase::Unbroken => unbroken_formula(sp.tag()),
        Phase::Broken => broken_formula(sp.tag()),
    };
    for n in 0..count {
        let value = match phase {
            Phase::Unbroken => unbroken_energy(sp, n),
            Phase::Broken => broken_energy(sp, n),
        };
        match value {
            Ok(value) => levels.push(EnergyLevel {
                n,
                value,
                phase,
                formula_id: formula.to_string(),
            }),
            Err(Error::Hierarchy { .. }) if n > 0 => {
                truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let hierarchy_condition_satisfied = levels.windows(2).all(|w| w[1].value > w[0].value);
    Ok(SpectrumResult {
        instance: sp.name().to_string(),
        phase,
        levels,
        formula: formula.to_string(),
        g_function: g_description(sp.tag()).to_string(),
        hierarchy_condition_satisfied,
        truncated_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpotentials::{lookup, ParamRecord};

    fn osc(l: f64, hbar: f64) -> SuperpotentialInstance {
        SuperpotentialInstance::new(
            "osc",
            ClassTag::IIIA,
            ParamRecord::new(l).with_omega(1.0).with_hbar(hbar),
        )
        .unwrap()
    }

    #[test]
    fn unbroken_examples() {
        assert_eq!(unbroken_energy(&osc(3.0, 1.0), 2).unwrap(), 4.0);
        let coulomb = lookup("coulomb").unwrap();
        assert!((unbroken_energy(&coulomb, 1).unwrap() - 0.75).abs() < 1e-15);
        for sp in crate::superpotentials::catalog() {
            if matches!(invariance::classify_phase(&sp), Ok(r) if r.phase == Phase::Unbroken) {
                assert_eq!(unbroken_energy(&sp, 0).unwrap(), 0.0, "{}", sp.name());
            }
        }
        let harmonic = lookup("harmonic").unwrap();
        assert_eq!(unbroken_energy(&harmonic, 3).unwrap(), 3.0);
    }

    #[test]
    fn broken_examples() {
        assert!((broken_energy(&osc(-3.0, 1.0), 0).unwrap() - 7.0).abs() < 1e-12);
        let scarf = lookup("scarf1").unwrap();
        assert!((broken_energy(&scarf, 0).unwrap() - 5.25).abs() < 1e-12);
        for n in 0..6 {
            let e = broken_energy(&osc(-3.0, 1.0), n).unwrap();
            assert!((e - (2 * n + 7) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn broken_spacing_is_two_hbar_omega() {
        for hbar in [0.5, 1.0, 2.0] {
            let sp = osc(-3.0, hbar);
            for n in 0..8 {
                let d = broken_energy(&sp, n + 1).unwrap() - broken_energy(&sp, n).unwrap();
                assert!((d - 2.0 * hbar).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn broken_energy_is_affine_in_hbar() {
        // slope -(1 + 2n) eps with eps = -1
        for n in 0..5 {
            let e: Vec<f64> =
                [0.5, 1.0, 2.0].iter().map(|&h| broken_energy(&osc(-3.0, h), n).unwrap()).collect();
            let slope = (e[2] - e[0]) / 1.5;
            assert!((slope - (1 + 2 * n) as f64).abs() < 1e-12);
            assert!((e[1] - (e[0] + 0.5 * slope)).abs() < 1e-12);
        }
    }

    #[test]
    fn routes_agree_on_catalog() {
        for sp in crate::superpotentials::catalog() {
            if !matches!(invariance::classify_phase(&sp), Ok(r) if r.phase == Phase::Broken) {
                continue;
            }
            if sp.tag().is_class_i() || sp.tag().is_class_ii() {
                assert!(matches!(broken_energy(&sp, 0), Err(Error::UnsupportedClass(_))));
                continue;
            }
            for n in 0..10 {
                let r = broken_routes(&sp, n).unwrap();
                assert!(r.relative_gap() < 1e-12, "{} n={n}: {r:?}", sp.name());
            }
        }
    }

    #[test]
    fn phase_errors() {
        assert!(matches!(unbroken_energy(&osc(-3.0, 1.0), 1), Err(Error::Phase(_))));
        assert!(matches!(broken_energy(&osc(3.0, 1.0), 1), Err(Error::Phase(_))));
        // negated unbroken W runs + to -, so H- has no zero mode
        assert!(matches!(unbroken_energy(&osc(3.0, 1.0).negated(), 1), Err(Error::Phase(_))));
        // oscillator a = 0 maps to itself
        assert!(matches!(
            broken_energy(&osc(0.0, 1.0), 0),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn negation_keeps_broken_levels() {
        for name in ["oscillator-3d", "scarf1", "poschl-teller"] {
            let sp = lookup(name).unwrap();
            for n in 0..4 {
                let a = broken_energy(&sp, n).unwrap();
                let b = broken_energy(&sp.negated(), n).unwrap();
                assert!((a - b).abs() < 1e-12, "{name} {n}");
            }
        }
    }

    #[test]
    fn hierarchy_truncates_iiib_and_ii() {
        let pt = lookup("poschl-teller-unbroken").unwrap();
        let s = spectrum(&pt, 20).unwrap();
        // a = -9: lambda (a + n) < 0 up to n = 8
        assert_eq!(s.levels.len(), 9);
        assert_eq!(s.truncated_at, Some(9));
        assert!(matches!(unbroken_energy(&pt, 9), Err(Error::Hierarchy { n: 9, .. })));

        let eckart = lookup("eckart").unwrap();
        let s = spectrum(&eckart, 20).unwrap();
        assert_eq!(s.levels.len(), 8);
        assert!(s.hierarchy_condition_satisfied);

        let morse = lookup("morse").unwrap();
        assert_eq!(spectrum(&morse, 20).unwrap().levels.len(), 10);
    }

    #[test]
    fn isospectral_pairs() {
        assert_eq!(isospectral_pair(&osc(-3.0, 1.0), 1).unwrap(), (9.0, 9.0));
        let (m, p) = isospectral_pair(&osc(3.0, 1.0), 0).unwrap();
        assert!((m - 2.0).abs() < 1e-12 && (p - 2.0).abs() < 1e-12);
        for name in ["morse", "coulomb", "eckart", "scarf1-unbroken", "scarf2"] {
            let sp = lookup(name).unwrap();
            for n in 0..4 {
                let (m, p) = isospectral_pair(&sp, n).unwrap();
                assert!((m - p).abs() <= 1e-12 * m.abs().max(1.0), "{name} {n}");
            }
        }
    }

    #[test]
    fn spectrum_json_and_csv() {
        let s = spectrum(&osc(-3.0, 1.0), 3).unwrap();
        assert_eq!(s.values(), vec![7.0, 9.0, 11.0]);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"E\":7.0"));
        let back: SpectrumResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,E\n0,7\n1,9\n2,11\n");
    }
}
