//! Turning points of `W^2 = E` and the SWKB / BSWKB integral
//! `I = ∫ sqrt(E - W^2) dx` between them.
//!
//! The integral is computed after the substitution `x = m + w sin(theta)`,
//! `m` and `w` being the midpoint and half-width of `[x1, x2]`. Since
//! `E - W^2` has simple zeros at both ends, the transformed integrand is a
//! smooth periodic function of `theta` and the trapezoid rule converges
//! geometrically.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariance::{self, Intersection, Phase};
use crate::numerics;
use crate::spectra;
use crate::superpotentials::SuperpotentialInstance;

/// Successive trapezoid estimates must agree to this (absolute).
pub const INTEGRAL_TOLERANCE: f64 = 1e-11;
/// Theorem-level acceptance threshold for `|I - target|`.
pub const ACCEPTANCE_TOLERANCE: f64 = 1e-9;
/// Root polish target, relative to `max(1, E)`.
pub const ROOT_TOLERANCE: f64 = 1e-13;
/// Integrand values below `-NEGATIVE_SLACK * max(1, E)` mean the limits are wrong.
pub const NEGATIVE_SLACK: f64 = 1e-12;
pub const MAX_NODES: usize = 1 << 20;
const START_INTERVALS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub x1: f64,
    pub x2: f64,
    /// `x1 == x2` (energy at the minimum of `W^2`).
    pub degenerate: bool,
    /// Brent iterations for the left and right root.
    pub iterations: [usize; 2],
    /// Outward bracket expansions on each side of the minimum.
    pub expansions: [usize; 2],
    /// `max |W^2(x_i) - E|`.
    pub residual: f64,
}

impl TurningPoints {
    fn degenerate_at(x: f64, residual: f64) -> Self {
        TurningPoints { x1: x, x2: x, degenerate: true, iterations: [0, 0], expansions: [0, 0], residual }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub nodes: usize,
    /// Change between the last two estimates.
    pub estimated_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizationReport {
    pub instance: String,
    pub n: usize,
    pub phase: Phase,
    pub hbar: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub turning: TurningPoints,
    pub integral: f64,
    pub target: f64,
    pub abs_error: f64,
    pub quadrature: Quadrature,
}

impl QuantizationReport {
    pub const CSV_HEADER: [&'static str; 10] =
        ["instance", "phase", "n", "hbar", "E", "x1", "x2", "integral", "target", "abs_error"];

    pub fn passes(&self, tol: f64) -> bool {
        self.abs_error < tol
    }

    pub fn csv_row(&self) -> [String; 10] {
        [
            self.instance.clone(),
            self.phase.to_string(),
            self.n.to_string(),
            self.hbar.to_string(),
            self.energy.to_string(),
            self.turning.x1.to_string(),
            self.turning.x2.to_string(),
            self.integral.to_string(),
            self.target.to_string(),
            format!("{:e}", self.abs_error),
        ]
    }
}

/// Writes reports as CSV with [`QuantizationReport::CSV_HEADER`].
pub fn write_reports_csv<W: Write>(reports: &[QuantizationReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(QuantizationReport::CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

fn w2(sp: &SuperpotentialInstance, x: f64) -> f64 {
    let w = sp.w_unchecked(x);
    w * w
}

/// Location and value of the minimum of `W^2`.
pub fn min_w2(sp: &SuperpotentialInstance) -> Result<(f64, f64)> {
    let d = sp.domain();
    let (mut lo, mut hi) = sp.window();
    for _ in 0..64 {
        let grid = if lo * hi > 0.0 && (d.lower.is_finite() != d.upper.is_finite()) {
            numerics::log_spaced(lo, hi, 512)
        } else {
            numerics::uniform(lo, hi, 512)
        };
        let vals: Vec<f64> = grid.iter().map(|&x| w2(sp, x)).collect();
        let (i, _) = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| Error::RootFinding("W^2 is not finite on the sample window".into()))?;
        let last = grid.len() - 1;
        let width = hi - lo;
        if i == last && d.upper.is_infinite() {
            hi += width;
            continue;
        }
        if i == 0 && d.lower.is_infinite() {
            lo -= width;
            continue;
        }
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(last)];
        let (x, v) = numerics::golden_min(|x| w2(sp, x), a, b, 200);
        // an exact zero of W beats the golden-section estimate
        let (wa, wb) = (sp.w_unchecked(a), sp.w_unchecked(b));
        if wa * wb < 0.0 {
            let r = numerics::brent(|x| sp.w_unchecked(x), a, b, 0.0, 200)?;
            return Ok((r.x, r.fx * r.fx));
        }
        return Ok((x, v));
    }
    Err(Error::RootFinding("minimum of W^2 runs off to infinity".into()))
}

/// Outward search from `xm` for a point with `W^2 > e`; returns
/// `(inner, outer, expansions)`.
fn bracket(sp: &SuperpotentialInstance, xm: f64, e: f64, dir: f64) -> Result<(f64, f64, usize)> {
    let d = sp.domain();
    let end = if dir > 0.0 { d.upper } else { d.lower };
    let mut inner = xm;
    if end.is_finite() {
        let mut dist = (end - xm).abs();
        for k in 1..=200 {
            dist *= 0.5;
            if dist < sp.exclusion() {
                break;
            }
            let x = end - dir * dist;
            let v = w2(sp, x);
            if v > e {
                return Ok((inner, x, k));
            }
            inner = x;
        }
    } else {
        let mut step = 1e-3 * xm.abs().max(1.0);
        for k in 1..=200 {
            let x = xm + dir * step;
            let v = w2(sp, x);
            if v > e {
                if !v.is_finite() {
                    return Err(Error::RootFinding(format!("W overflows at x = {x}")));
                }
                return Ok((inner, x, k));
            }
            inner = x;
            step *= 2.0;
        }
    }
    Err(Error::SingleIntersection { energy: e })
}

fn polish(sp: &SuperpotentialInstance, inner: f64, outer: f64, e: f64) -> Result<numerics::Root> {
    let s = sp.w_unchecked(outer).signum();
    let target = s * e.sqrt();
    numerics::brent(|x| sp.w_unchecked(x) - target, inner, outer, 0.0, 300)
}

/// Solutions `x1 < x2` of `W(x) = ±sqrt(E)` around the minimum of `W^2`.
pub fn turning_points(sp: &SuperpotentialInstance, e: f64) -> Result<TurningPoints> {
    if !(e >= 0.0) {
        return Err(Error::InvalidParams(format!("E must be non-negative, got {e}")));
    }
    let phase = invariance::classify_phase(sp)?.phase;
    if phase == Phase::Broken && e > 0.0 {
        let app = invariance::bswkb_applicability(sp, e)?;
        match app.kind {
            Intersection::TwoTurningPoints => {}
            Intersection::SingleIntersection => return Err(Error::SingleIntersection { energy: e }),
            Intersection::NoIntersection => {
                return Err(Error::NoTurningPoints { energy: e, min_w2: app.min_w2.unwrap_or(f64::NAN) })
            }
        }
    }
    let (xm, m2) = min_w2(sp)?;
    let scale = e.max(1.0);
    if (e - m2).abs() <= 1e-14 * scale || e == 0.0 {
        if m2 > ROOT_TOLERANCE * scale {
            return Err(Error::NoTurningPoints { energy: e, min_w2: m2 });
        }
        return Ok(TurningPoints::degenerate_at(xm, (m2 - e).abs()));
    }
    if e < m2 {
        return Err(Error::NoTurningPoints { energy: e, min_w2: m2 });
    }
    let (in_l, out_l, exp_l) = bracket(sp, xm, e, -1.0)?;
    let (in_r, out_r, exp_r) = bracket(sp, xm, e, 1.0)?;
    let left = polish(sp, in_l, out_l, e)?;
    let right = polish(sp, in_r, out_r, e)?;
    let residual = (w2(sp, left.x) - e).abs().max((w2(sp, right.x) - e).abs());
    if residual > ROOT_TOLERANCE * scale {
        return Err(Error::RootFinding(format!(
            "turning-point residual {residual:e} exceeds {:e}",
            ROOT_TOLERANCE * scale
        )));
    }
    Ok(TurningPoints {
        x1: left.x,
        x2: right.x,
        degenerate: false,
        iterations: [left.iterations, right.iterations],
        expansions: [exp_l, exp_r],
        residual,
    })
}

/// Trapezoid rule on `[-pi/2, pi/2]` with nested doubling for an integrand
/// that vanishes at both ends.
pub fn periodic_trapezoid<F>(f: F, tol: f64, max_nodes: usize) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut n = START_INTERVALS;
    let mut h = PI / n as f64;
    let mut sum = 0.0;
    for j in 1..n {
        sum += f(-FRAC_PI_2 + j as f64 * h)?;
    }
    let mut estimate = h * sum;
    loop {
        let next_n = 2 * n;
        if next_n > max_nodes {
            return Err(Error::ConvergenceFailure { nodes: n, last_change: f64::NAN });
        }
        for j in 0..n {
            sum += f(-FRAC_PI_2 + (j as f64 + 0.5) * h)?;
        }
        n = next_n;
        h *= 0.5;
        let refined = h * sum;
        let change = (refined - estimate).abs();
        estimate = refined;
        if change < tol {
            return Ok(Quadrature { value: estimate, nodes: n + 1, estimated_error: change });
        }
        if 2 * n > max_nodes {
            return Err(Error::ConvergenceFailure { nodes: n + 1, last_change: change });
        }
    }
}

/// `∫_{x1}^{x2} sqrt(E - W^2) dx` with its quadrature metadata.
pub fn swkb_quadrature(sp: &SuperpotentialInstance, e: f64, tp: &TurningPoints) -> Result<Quadrature> {
    if tp.degenerate || tp.x1 == tp.x2 {
        return Ok(Quadrature { value: 0.0, nodes: 0, estimated_error: 0.0 });
    }
    let m = 0.5 * (tp.x1 + tp.x2);
    let w = 0.5 * (tp.x2 - tp.x1);
    let slack = NEGATIVE_SLACK * e.max(1.0);
    let integrand = |theta: f64| -> Result<f64> {
        let x = m + w * theta.sin();
        let v = e - w2(sp, x);
        if v < -slack {
            return Err(Error::NegativeIntegrand { x, value: v });
        }
        Ok(v.max(0.0).sqrt() * w * theta.cos())
    };
    periodic_trapezoid(integrand, INTEGRAL_TOLERANCE, MAX_NODES)
}

pub fn swkb_integral(sp: &SuperpotentialInstance, e: f64, tp: &TurningPoints) -> Result<f64> {
    Ok(swkb_quadrature(sp, e, tp)?.value)
}

/// Energy from the spectrum, turning points, integral and the
/// phase-appropriate target `n pi hbar` or `(n + 1/2) pi hbar`.
pub fn verify_quantization(sp: &SuperpotentialInstance, n: usize) -> Result<QuantizationReport> {
    let phase = invariance::classify_phase(sp)?.phase;
    let hbar = sp.hbar();
    let (energy, target) = match phase {
        Phase::Unbroken => (spectra::unbroken_energy(sp, n)?, n as f64 * PI * hbar),
        Phase::Broken => (spectra::broken_energy(sp, n)?, (n as f64 + 0.5) * PI * hbar),
    };
    let turning = turning_points(sp, energy)?;
    let quadrature = swkb_quadrature(sp, energy, &turning)?;
    Ok(QuantizationReport {
        instance: sp.name().to_string(),
        n,
        phase,
        hbar,
        energy,
        turning,
        integral: quadrature.value,
        target,
        abs_error: (quadrature.value - target).abs(),
        quadrature,
    })
}

/// One report per `hbar`, all other parameters fixed.
pub fn hbar_sweep(sp: &SuperpotentialInstance, n: usize, hbars: &[f64]) -> Result<Vec<QuantizationReport>> {
    hbars.iter().map(|&h| verify_quantization(&sp.with_hbar(h)?, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpotentials::{lookup, ClassTag, ParamRecord};

    fn osc(l: f64) -> SuperpotentialInstance {
        SuperpotentialInstance::new("osc", ClassTag::IIIA, ParamRecord::new(l).with_omega(1.0))
            .unwrap()
    }

    #[test]
    fn oscillator_turning_points() {
        let tp = turning_points(&osc(-3.0), 7.0).unwrap();
        let r7 = 7f64.sqrt();
        assert!((tp.x1 - (r7 - 1.0)).abs() < 1e-13, "{tp:?}");
        assert!((tp.x2 - (r7 + 1.0)).abs() < 1e-13);
        assert!(tp.residual <= 7e-13);

        let tp = turning_points(&osc(3.0), 2.0).unwrap();
        assert!((tp.x1 - 2f64.sqrt()).abs() < 1e-13);
        assert!((tp.x2 - 3.0 * 2f64.sqrt()).abs() < 1e-13);

        let tp = turning_points(&osc(3.0), 0.0).unwrap();
        assert!(tp.degenerate);
        assert!((tp.x1 - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn turning_point_errors() {
        assert!(matches!(turning_points(&osc(-3.0), 5.0), Err(Error::NoTurningPoints { .. })));
        let morse = lookup("morse-broken").unwrap();
        assert!(matches!(turning_points(&morse, 50.0), Err(Error::SingleIntersection { .. })));
    }

    #[test]
    fn oscillator_integrals() {
        let sp = osc(-3.0);
        for (e, n) in [(7.0, 0.0), (13.0, 3.0)] {
            let tp = turning_points(&sp, e).unwrap();
            let i = swkb_integral(&sp, e, &tp).unwrap();
            assert!((i - (n + 0.5) * PI).abs() < 1e-10, "{e}: {i}");
        }
        let tp = TurningPoints::degenerate_at(2.0, 0.0);
        assert_eq!(swkb_integral(&sp, 3.0, &tp).unwrap(), 0.0);
    }

    #[test]
    fn wrong_limits_are_rejected() {
        let sp = osc(-3.0);
        let mut tp = turning_points(&sp, 7.0).unwrap();
        tp.x2 += 0.5;
        assert!(matches!(swkb_integral(&sp, 7.0, &tp), Err(Error::NegativeIntegrand { .. })));
    }

    #[test]
    fn quantization_examples() {
        let scarf = lookup("scarf1").unwrap();
        let r = verify_quantization(&scarf, 1).unwrap();
        assert!((r.energy - 11.25).abs() < 1e-12);
        assert!(r.abs_error < 1e-9 && (r.target - 1.5 * PI).abs() < 1e-15);

        let r = verify_quantization(&osc(3.0), 2).unwrap();
        assert_eq!(r.energy, 4.0);
        assert!(r.abs_error < 1e-9);

        let r = verify_quantization(&osc(3.0), 0).unwrap();
        assert_eq!((r.integral, r.target), (0.0, 0.0));

        let morse = lookup("morse-broken").unwrap();
        assert!(matches!(verify_quantization(&morse, 0), Err(Error::UnsupportedClass(_))));
    }

    #[test]
    fn hbar_sweep_examples() {
        let rs = hbar_sweep(&osc(-3.0), 0, &[0.5, 1.0, 2.0]).unwrap();
        for (r, t) in rs.iter().zip([0.25, 0.5, 1.0]) {
            assert!((r.target - t * PI).abs() < 1e-15);
            assert!(r.abs_error < 1e-9);
        }
        let rs = hbar_sweep(&lookup("scarf1").unwrap(), 2, &[0.5]).unwrap();
        assert!((rs[0].target - 1.25 * PI).abs() < 1e-15 && rs[0].abs_error < 1e-9);
        assert!(hbar_sweep(&osc(-3.0), 0, &[]).unwrap().is_empty());
    }

    #[test]
    fn negation_leaves_integral_unchanged() {
        for name in ["oscillator-3d", "scarf1", "poschl-teller"] {
            let sp = lookup(name).unwrap();
            let e = spectra::broken_energy(&sp, 2).unwrap();
            let a = swkb_integral(&sp, e, &turning_points(&sp, e).unwrap()).unwrap();
            let neg = sp.negated();
            let b = swkb_integral(&neg, e, &turning_points(&neg, e).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn trapezoid_is_exact_on_semicircle() {
        // ∫ sqrt(1 - x^2) dx over [-1, 1] becomes ∫ cos^2
        let q = periodic_trapezoid(|t| Ok(t.cos() * t.cos()), 1e-14, MAX_NODES).unwrap();
        assert!((q.value - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_error_decays_geometrically() {
        // ∫ sqrt(1 - x^2) / (c - x) dx = pi (c - sqrt(c^2 - 1))
        let c: f64 = 1.5;
        let exact = PI * (c - (c * c - 1.0).sqrt());
        let f = |t: f64| t.cos() * t.cos() / (c - t.sin());
        let errs: Vec<f64> = [8usize, 16, 32]
            .iter()
            .map(|&n| {
                let h = PI / n as f64;
                let s: f64 = (1..n).map(|j| f(-FRAC_PI_2 + j as f64 * h)).sum();
                (h * s - exact).abs()
            })
            .collect();
        // each doubling at least squares the relative error (up to a constant)
        assert!(errs[1] < errs[0].powf(1.8), "{errs:?}");
        assert!(errs[2] < 1e-12, "{errs:?}");
    }
}
