//! Shape-invariance checks, the phase-changing discrete maps, SUSY phase
//! classification and the BSWKB applicability analysis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra;
use crate::superpotentials::{
    Asymptote, ClassTag, ParamRecord, Partner, Side, SuperpotentialInstance,
};

/// Absolute threshold for the identity and constancy checks.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Grid points this close to a finite endpoint are dropped by the checks.
pub const ENDPOINT_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Unbroken,
    Broken,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Unbroken => "unbroken",
            Phase::Broken => "broken",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEvidence {
    pub side: Side,
    pub asymptote: Asymptote,
    pub leading_term: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase: Phase,
    /// Sign of `W` at the left and right boundary.
    pub signs: [f64; 2],
    pub evidence: Vec<BoundaryEvidence>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMap {
    #[serde(rename = "source")]
    pub source_params: ParamRecord,
    #[serde(rename = "map")]
    pub mapped_params: ParamRecord,
    /// `V+(x; source) - V-(x; mapped)`.
    #[serde(rename = "shift")]
    pub energy_shift: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Intersection {
    TwoTurningPoints,
    SingleIntersection,
    NoIntersection,
}

impl fmt::Display for Intersection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Intersection::TwoTurningPoints => "two turning points",
            Intersection::SingleIntersection => "single intersection",
            Intersection::NoIntersection => "no intersection",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BswkbApplicability {
    pub kind: Intersection,
    pub rationale: String,
    /// Minimum of `W^2` on the domain, where `W^2` has an interior minimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_w2: Option<f64>,
}

impl BswkbApplicability {
    fn new(kind: Intersection, rationale: impl Into<String>, min_w2: Option<f64>) -> Self {
        BswkbApplicability { kind, rationale: rationale.into(), min_w2 }
    }
}

fn interior(sp: &SuperpotentialInstance, grid: &[f64]) -> Result<Vec<f64>> {
    let d = sp.domain();
    let keep: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&x| {
            let near = |e: f64| e.is_finite() && (x - e).abs() < ENDPOINT_MARGIN;
            !near(d.lower) && !near(d.upper)
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(keep)
}

/// `max |V+(x, a) + g(a) - V-(x, a + hbar) - g(a + hbar)|` over `grid`.
/// For a negated `W` the ladder runs downward, `a -> a - hbar`.
pub fn additive_si_residual(sp: &SuperpotentialInstance, grid: &[f64]) -> Result<f64> {
    let grid = interior(sp, grid)?;
    let a = sp.a();
    let next_a = a + spectra::ladder_step(sp);
    let next = sp.with_a(next_a)?;
    let (g0, g1) = (spectra::g(sp, a), spectra::g(sp, next_a));
    let mut worst: f64 = 0.0;
    for x in grid {
        let lhs = sp.partner_potential(x, Partner::Plus)? + g0;
        let rhs = next.partner_potential(x, Partner::Minus)? + g1;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Values of `|a|` used by [`parameter_sweep`].
pub const SWEEP_MAGNITUDES: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];
/// `hbar` values used by [`parameter_sweep`].
pub const SWEEP_HBARS: [f64; 3] = [0.5, 1.0, 2.0];

/// Copies of `sp` with `a` running over two decades (sign of the default
/// `a` kept) and `hbar` over [`SWEEP_HBARS`]. Parameter sets the class
/// rejects are skipped.
pub fn parameter_sweep(sp: &SuperpotentialInstance) -> Vec<SuperpotentialInstance> {
    let sign = if sp.a() < 0.0 { -1.0 } else { 1.0 };
    let mut out = Vec::new();
    for m in SWEEP_MAGNITUDES {
        for h in SWEEP_HBARS {
            let p = ParamRecord { a: sign * m, hbar: h, ..*sp.params() };
            if let Ok(s) = sp.with_params(p) {
                out.push(s);
            }
        }
    }
    out
}

/// The phase-changing map: `a -> -a` for IIIA, `(a, B) -> (B + hbar/2, a + hbar/2)`
/// for IIIB. A negated IIIB instance is read as the plain one with `(-a, -B)`.
pub fn discrete_si_map(sp: &SuperpotentialInstance) -> Result<DiscreteMap> {
    let p = *sp.params();
    let hbar = p.hbar;
    match sp.tag() {
        ClassTag::IIIA => {
            let eps = sp.epsilon();
            // V-(a) - V+(-a) = (2a + hbar) eps once W is negated
            let energy_shift = if sp.is_negated() {
                (2.0 * p.a + hbar) * eps
            } else {
                (2.0 * p.a - hbar) * eps
            };
            Ok(DiscreteMap {
                source_params: p,
                mapped_params: ParamRecord { a: -p.a, ..p },
                energy_shift,
            })
        }
        ClassTag::IIIBPosLambdaBounded => Err(Error::UnsupportedParameters(
            "the map (a, B) -> (B + hbar/2, a + hbar/2) needs f1^2 > lambda; \
             the bounded tanh case has f1^2 < lambda"
                .into(),
        )),
        tag if tag.is_iiib() => {
            let (a, b) = if sp.is_negated() { (-p.a, -p.b()) } else { (p.a, p.b()) };
            let shifted_b = b + 0.5 * hbar;
            Ok(DiscreteMap {
                source_params: p,
                mapped_params: ParamRecord { a: shifted_b, b: Some(a + 0.5 * hbar), ..p },
                energy_shift: sp.lambda() * (a * a - shifted_b * shifted_b),
            })
        }
        tag => Err(Error::UnsupportedClass(tag)),
    }
}

/// Instance carrying the mapped parameters. IIIB images are never negated,
/// since the map already absorbed the sign.
pub fn mapped_instance(
    sp: &SuperpotentialInstance,
    map: &DiscreteMap,
) -> Result<SuperpotentialInstance> {
    let m = sp.with_params(map.mapped_params)?;
    if sp.tag().is_iiib() && m.is_negated() {
        Ok(m.negated())
    } else {
        Ok(m)
    }
}

/// `(max |d - mean d|, mean d)` for `d(x) = V+(x; source) - V-(x; target)`.
pub fn partner_offset(
    source: &SuperpotentialInstance,
    target: &SuperpotentialInstance,
    grid: &[f64],
) -> Result<(f64, f64)> {
    let grid = interior(source, grid)?;
    let mut d = Vec::with_capacity(grid.len());
    for x in grid {
        d.push(source.partner_potential(x, Partner::Plus)? - target.partner_potential(x, Partner::Minus)?);
    }
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let dev = d.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
    Ok((dev, mean))
}

/// Constancy of `V+(x; source) - V-(x; mapped)` under [`discrete_si_map`].
pub fn verify_discrete_si(sp: &SuperpotentialInstance, grid: &[f64]) -> Result<(f64, f64)> {
    let map = discrete_si_map(sp)?;
    let target = mapped_instance(sp, &map)?;
    partner_offset(sp, &target, grid)
}

fn side_sign(sp: &SuperpotentialInstance, side: Side) -> Result<f64> {
    let finite_end = sp.domain().is_finite_at(side);
    let sign = match sp.asymptote(side) {
        Asymptote::Divergent { sign } => sign,
        Asymptote::Finite { value } => value.signum(),
        Asymptote::Vanishing { sign } if finite_end => sign,
        Asymptote::Vanishing { .. } => {
            return Err(Error::IndeterminatePhase(format!(
                "'{}': {}",
                sp.name(),
                sp.leading_term(side)
            )))
        }
    };
    if sign == 0.0 {
        return Err(Error::IndeterminatePhase(format!(
            "'{}': W has no definite sign as {}",
            sp.name(),
            sp.leading_term(side)
        )));
    }
    Ok(sign)
}

/// Boundary signs of `W` from the closed-form asymptotics.
pub fn boundary_signs(sp: &SuperpotentialInstance) -> Result<[f64; 2]> {
    Ok([side_sign(sp, Side::Left)?, side_sign(sp, Side::Right)?])
}

/// Broken if `W` has the same sign at both boundaries, unbroken otherwise.
pub fn classify_phase(sp: &SuperpotentialInstance) -> Result<PhaseReport> {
    let signs = boundary_signs(sp)?;
    let evidence = [Side::Left, Side::Right]
        .into_iter()
        .map(|side| BoundaryEvidence {
            side,
            asymptote: sp.asymptote(side),
            leading_term: sp.leading_term(side),
        })
        .collect();
    let phase = if signs[0] == signs[1] { Phase::Broken } else { Phase::Unbroken };
    Ok(PhaseReport { phase, signs, evidence })
}

/// Whether `W^2 = E` has two turning points for a broken instance.
pub fn bswkb_applicability(sp: &SuperpotentialInstance, e: f64) -> Result<BswkbApplicability> {
    use Intersection::*;

    let tag = sp.tag();
    if tag == ClassTag::IIIBPosLambdaBounded {
        return Err(Error::UnsupportedParameters(
            "f1 = -sqrt(lambda) tanh(sqrt(lambda) x): W has opposite signs at the two ends \
             whenever a != 0, so the system does not go into a broken supersymmetric phase"
                .into(),
        ));
    }
    let report = classify_phase(sp)?;
    if report.phase != Phase::Broken {
        return Err(Error::Phase(format!(
            "'{}' is unbroken; the BSWKB condition concerns the broken phase",
            sp.name()
        )));
    }
    if !(e > 0.0) {
        return Err(Error::InvalidParams(format!("E must be positive, got {e}")));
    }

    if tag.is_class_i() || tag.is_class_ii() {
        let inf_w2 = report
            .evidence
            .iter()
            .map(|ev| ev.asymptote.limit_w2())
            .fold(f64::INFINITY, f64::min);
        let class = if tag.is_class_i() { "I" } else { "II" };
        if e <= inf_w2 {
            return Ok(BswkbApplicability::new(
                NoIntersection,
                format!("E = {e} is below the boundary value of W^2 = {inf_w2}"),
                None,
            ));
        }
        return Ok(BswkbApplicability::new(
            SingleIntersection,
            format!(
                "Class {class}: W is monotonic and keeps one sign, so W^2 = E has only one \
                 intersection point, not two"
            ),
            None,
        ));
    }

    let c = spectra::canonical_broken(sp)?;
    let p = *c.params();
    let (a, b) = (p.a, p.b());

    let two_or_none = |min_w2: f64, why: &str| {
        // a finite boundary value of W^2 caps the allowed region on that side
        let cap = [Side::Left, Side::Right]
            .into_iter()
            .map(|s| c.asymptote(s).limit_w2())
            .fold(f64::INFINITY, f64::min);
        let r = if e <= min_w2 {
            BswkbApplicability::new(
                NoIntersection,
                format!("E = {e} is below min W^2 = {min_w2}"),
                Some(min_w2),
            )
        } else if e >= cap {
            BswkbApplicability::new(
                SingleIntersection,
                format!("E = {e} reaches the boundary value of W^2 = {cap}"),
                Some(min_w2),
            )
        } else {
            BswkbApplicability::new(TwoTurningPoints, why, Some(min_w2))
        };
        Ok(r)
    };
    let single = |why: &str| Ok(BswkbApplicability::new(SingleIntersection, why, None));
    let unsupported = |why: String| Err(Error::UnsupportedParameters(why));

    match tag {
        ClassTag::IIIA => {
            if a < 0.0 {
                two_or_none(
                    2.0 * a.abs() * p.omega(),
                    "IIIA with a < 0: W^2 diverges at both ends and has one minimum",
                )
            } else {
                single("IIIA with a = 0: W = omega x / 2 is monotonic")
            }
        }
        ClassTag::IIIBNegLambda => {
            if a == b || a == -b {
                single(
                    "lambda < 0 with a = B: neither W nor W' vanishes, so (W^2)' = 2WW' cannot \
                     be zero and there is only one intersection point",
                )
            } else {
                two_or_none(
                    -c.lambda() * (b * b - a * a),
                    "lambda < 0 with |a| < B: W^2 diverges at both walls and has one minimum",
                )
            }
        }
        ClassTag::IIIBPosLambdaUnbounded if c.f1_positive_branch() => {
            if a == -b {
                single("f1 > 0 with a = -B: only one intersection point, as for a = B at lambda < 0")
            } else if a * b > 0.0 {
                single("f1 > 0 with aB > 0: W^2 has no minimum and there is only one intersection point")
            } else {
                unsupported(format!(
                    "f1 > 0 with aB < 0 and a != -B (a = {a}, B = {b}) is listed as a \
                     configuration in which SUSY cannot be broken"
                ))
            }
        }
        ClassTag::IIIBPosLambdaUnbounded => {
            if b == 0.0 {
                single("f1 < 0 with B = 0: W = -a sqrt(lambda) coth is monotonic")
            } else if a * b < 0.0 || a == b {
                unsupported(format!(
                    "f1 < 0 with aB < 0 or a = B (a = {a}, B = {b}): W^2 has no minimum and \
                     the BSWKB condition does not apply"
                ))
            } else {
                two_or_none(
                    c.lambda() * (a * a - b * b),
                    "f1 < 0 with aB > 0 and a < B: W^2 has one interior minimum",
                )
            }
        }
        _ => Err(Error::UnsupportedClass(tag)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpotentials::{lookup, DomainSpec};

    fn osc(l: f64) -> SuperpotentialInstance {
        SuperpotentialInstance::new("osc", ClassTag::IIIA, ParamRecord::new(l).with_omega(1.0))
            .unwrap()
    }

    fn scarf(a: f64, b: f64) -> SuperpotentialInstance {
        SuperpotentialInstance::new(
            "scarf",
            ClassTag::IIIBNegLambda,
            ParamRecord::new(a).with_b(b).with_lambda(-1.0),
        )
        .unwrap()
    }

    fn pt(a: f64, b: f64, negative_half: bool) -> SuperpotentialInstance {
        let p = ParamRecord::new(a).with_b(b).with_lambda(1.0);
        let d = if negative_half {
            DomainSpec::negative_half_line()
        } else {
            DomainSpec::positive_half_line()
        };
        SuperpotentialInstance::with_domain("pt", ClassTag::IIIBPosLambdaUnbounded, p, d).unwrap()
    }

    #[test]
    fn additive_residual_examples() {
        let o = osc(3.0);
        assert!(additive_si_residual(&o, &o.standard_grid()).unwrap() < 1e-10);
        let s = scarf(2.0, 1.0);
        assert!(additive_si_residual(&s, &s.standard_grid()).unwrap() < 1e-10);
        let bad = o.clone().perturb_f1(0.01);
        assert!(additive_si_residual(&bad, &bad.standard_grid()).unwrap() > 1e-3);
    }

    #[test]
    fn additive_residual_over_sweep() {
        for sp in crate::superpotentials::catalog() {
            let sweep = parameter_sweep(&sp);
            assert_eq!(sweep.len(), 15, "{}", sp.name());
            for s in sweep {
                let r = additive_si_residual(&s, &s.standard_grid()).unwrap();
                assert!(r < 1e-10, "{} a={} hbar={}: {r:e}", s.name(), s.a(), s.hbar());
            }
        }
    }

    #[test]
    fn additive_residual_negated_ladder() {
        for sp in crate::superpotentials::catalog() {
            let n = sp.negated();
            let r = match additive_si_residual(&n, &n.standard_grid()) {
                Ok(r) => r,
                // a - hbar = 0 is outside the Class II parameter space
                Err(Error::InvalidParams(_)) if sp.tag().is_class_ii() => continue,
                Err(e) => panic!("{}: {e}", sp.name()),
            };
            assert!(r < 1e-10, "{}: {r:e}", sp.name());
        }
    }

    #[test]
    fn discrete_map_examples() {
        let m = discrete_si_map(&osc(-3.0)).unwrap();
        assert_eq!(m.mapped_params.a, 3.0);
        assert_eq!(m.energy_shift, 7.0);

        let m = discrete_si_map(&scarf(1.0, 2.0)).unwrap();
        assert_eq!((m.mapped_params.a, m.mapped_params.b()), (2.5, 1.5));
        assert_eq!(m.energy_shift, 5.25);

        let m = discrete_si_map(&osc(0.0)).unwrap();
        assert_eq!(m.mapped_params.a, 0.0);
        assert_eq!(m.energy_shift, 1.0);

        assert!(matches!(
            discrete_si_map(&lookup("scarf2").unwrap()),
            Err(Error::UnsupportedParameters(_))
        ));
        assert!(matches!(
            discrete_si_map(&lookup("morse").unwrap()),
            Err(Error::UnsupportedClass(ClassTag::IB))
        ));
    }

    #[test]
    fn discrete_constancy_examples() {
        let o = osc(-3.0);
        let (dev, shift) = verify_discrete_si(&o, &o.standard_grid()).unwrap();
        assert!(dev < 1e-10 && (shift - 7.0).abs() < 1e-10, "{dev:e} {shift}");
        let s = scarf(1.0, 2.0);
        let (dev, shift) = verify_discrete_si(&s, &s.standard_grid()).unwrap();
        assert!(dev < 1e-10 && (shift - 5.25).abs() < 1e-10, "{dev:e} {shift}");
        // a -> a is not a symmetry
        let (dev, _) = partner_offset(&o, &o, &o.standard_grid()).unwrap();
        assert!(dev > 1.0);
    }

    #[test]
    fn discrete_constancy_negated() {
        for name in ["oscillator-3d", "scarf1", "poschl-teller"] {
            let sp = lookup(name).unwrap().negated();
            let (dev, shift) = verify_discrete_si(&sp, &sp.standard_grid()).unwrap();
            let map = discrete_si_map(&sp).unwrap();
            assert!(dev < 1e-10, "{name}: {dev:e}");
            assert!((shift - map.energy_shift).abs() < 1e-10 * map.energy_shift.abs().max(1.0));
        }
    }

    #[test]
    fn phase_examples() {
        assert_eq!(classify_phase(&osc(-3.0)).unwrap().phase, Phase::Broken);
        assert_eq!(classify_phase(&osc(3.0)).unwrap().phase, Phase::Unbroken);
        assert_eq!(classify_phase(&scarf(1.0, 2.0)).unwrap().phase, Phase::Broken);
        let bounded = SuperpotentialInstance::new(
            "b",
            ClassTag::IIIBPosLambdaBounded,
            ParamRecord::new(0.0).with_b(1.0).with_lambda(1.0),
        )
        .unwrap();
        assert!(matches!(classify_phase(&bounded), Err(Error::IndeterminatePhase(_))));
    }

    #[test]
    fn catalog_phases_match_names() {
        for sp in crate::superpotentials::catalog() {
            let phase = classify_phase(&sp).unwrap().phase;
            let want = match sp.name() {
                "oscillator-3d" | "scarf1" | "poschl-teller" => Phase::Broken,
                n if n.ends_with("-broken") => Phase::Broken,
                _ => Phase::Unbroken,
            };
            assert_eq!(phase, want, "{}", sp.name());
            let neg = classify_phase(&sp.negated()).unwrap();
            assert_eq!(neg.phase, phase);
        }
    }

    #[test]
    fn mapped_broken_entries_are_unbroken() {
        for name in ["oscillator-3d", "scarf1", "poschl-teller"] {
            let sp = lookup(name).unwrap();
            let map = discrete_si_map(&sp).unwrap();
            let m = mapped_instance(&sp, &map).unwrap();
            assert_eq!(classify_phase(&m).unwrap().phase, Phase::Unbroken, "{name}");
        }
    }

    #[test]
    fn applicability_examples() {
        let o = osc(-3.0);
        assert_eq!(bswkb_applicability(&o, 7.0).unwrap().kind, Intersection::TwoTurningPoints);
        assert_eq!(bswkb_applicability(&o, 5.0).unwrap().kind, Intersection::NoIntersection);
        assert_eq!(
            bswkb_applicability(&scarf(2.0, 2.0), 10.0).unwrap().kind,
            Intersection::SingleIntersection
        );
        for name in ["morse-broken", "coulomb-broken", "eckart-broken"] {
            let sp = lookup(name).unwrap();
            for e in [5.0, 50.0, 500.0] {
                assert_eq!(
                    bswkb_applicability(&sp, e).unwrap().kind,
                    Intersection::SingleIntersection,
                    "{name} {e}"
                );
            }
        }
        assert!(matches!(bswkb_applicability(&osc(3.0), 2.0), Err(Error::Phase(_))));
        let scarf2 = lookup("scarf2").unwrap();
        let err = bswkb_applicability(&scarf2, 1.0).unwrap_err();
        assert!(err.to_string().contains("does not go into a broken supersymmetric phase"));
    }

    #[test]
    fn applicability_unbounded_quadrants() {
        use Intersection::*;
        // f1 < 0, a < B < 0: two turning points between min W^2 = 63 and 144
        assert_eq!(bswkb_applicability(&pt(-12.0, -9.0, false), 71.75).unwrap().kind, TwoTurningPoints);
        assert_eq!(bswkb_applicability(&pt(-12.0, -9.0, false), 150.0).unwrap().kind, SingleIntersection);
        // mirrored quadrant 0 < B < a is the negated image of the above
        assert_eq!(bswkb_applicability(&pt(12.0, 9.0, false), 71.75).unwrap().kind, TwoTurningPoints);
        // f1 < 0, aB < 0
        assert!(matches!(
            bswkb_applicability(&pt(-2.0, 5.0, false), 10.0),
            Err(Error::UnsupportedParameters(_))
        ));
        // f1 > 0, aB > 0
        assert_eq!(bswkb_applicability(&pt(2.0, 1.0, true), 10.0).unwrap().kind, SingleIntersection);
        assert_eq!(bswkb_applicability(&pt(-2.0, -1.0, true), 10.0).unwrap().kind, SingleIntersection);
        // f1 > 0, aB < 0, a != -B
        assert!(matches!(
            bswkb_applicability(&pt(12.0, -9.0, true), 10.0),
            Err(Error::UnsupportedParameters(_))
        ));
        // f1 > 0, a = -B
        assert_eq!(bswkb_applicability(&pt(2.0, -2.0, true), 10.0).unwrap().kind, SingleIntersection);
    }
}
