//! Finite-difference Schrödinger solver used as an independent check of the
//! analytic spectra.
//!
//! `H = -hbar^2 d^2/dx^2 + V` is discretised with second-order central
//! differences on a uniform grid with Dirichlet ends. The resulting matrix is
//! symmetric tridiagonal; its lowest eigenvalues are found by Sturm-sequence
//! bisection.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superpotentials::{Partner, Side, SuperpotentialInstance};

pub const MIN_NODES: usize = 200;
pub const DEFAULT_NODES: usize = 4000;
/// Required gap between `V` at a cut and the highest requested level.
pub const DEFAULT_MARGIN: f64 = 25.0;
/// Allowed relative move of a level between the `N` and `2N + 1` grids.
pub const DEFAULT_SHIFT_TOL: f64 = 1e-3;
/// Distance of the Dirichlet cut from the finite (singular) end of a
/// half-line. On a finite interval the cuts sit on the walls themselves.
pub const ENDPOINT_OFFSET: f64 = 1e-3;

const FIT_NODES: usize = 800;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub richardson: bool,
    pub shift_tol: f64,
    pub margin: f64,
}

impl GridSpec {
    pub fn new(xmin: f64, xmax: f64, n: usize) -> Self {
        GridSpec {
            xmin,
            xmax,
            n,
            richardson: true,
            shift_tol: DEFAULT_SHIFT_TOL,
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn spacing(&self) -> f64 {
        (self.xmax - self.xmin) / (self.n + 1) as f64
    }

    /// Interior node `i` in `1..=n`.
    pub fn node(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.spacing()
    }

    /// Grid with the same cuts and half the spacing (`2N + 1` nodes), so
    /// every old node is also a new one.
    pub fn refined(&self) -> Self {
        GridSpec { n: 2 * self.n + 1, ..*self }
    }

    /// Fits the cuts to `sp` so that every listed partner potential exceeds
    /// its `k`-th level by `DEFAULT_MARGIN` at both cuts. The finite end of
    /// a half-line is approached to within [`ENDPOINT_OFFSET`].
    pub fn fit(sp: &SuperpotentialInstance, partners: &[Partner], k: usize, n: usize) -> Result<Self> {
        let d = sp.domain();
        let offset = if d.lower.is_finite() && d.upper.is_finite() { 0.0 } else { ENDPOINT_OFFSET };
        Self::fit_with_offset(sp, partners, k, n, offset)
    }

    pub fn fit_with_offset(
        sp: &SuperpotentialInstance,
        partners: &[Partner],
        k: usize,
        n: usize,
        offset: f64,
    ) -> Result<Self> {
        let d = sp.domain();
        let (wlo, whi) = sp.window();
        let mut lo = if d.lower.is_finite() { d.lower + offset } else { wlo };
        let mut hi = if d.upper.is_finite() { d.upper - offset } else { whi };

        for _ in 0..40 {
            let coarse = GridSpec::new(lo, hi, FIT_NODES).with_richardson(false);
            let mut required = f64::NEG_INFINITY;
            for &p in partners {
                let ev = eigenvalues(sp, p, &coarse, k)?;
                let top = *ev.last().ok_or(Error::EmptyInput)?;
                required = required.max(top + DEFAULT_MARGIN);
            }
            let mut changed = false;
            for side in [Side::Left, Side::Right] {
                if d.is_finite_at(side) {
                    continue;
                }
                let (new_cut, grew) = fit_cut(sp, partners, lo, hi, side, required)?;
                match side {
                    Side::Left => {
                        changed |= (new_cut - lo).abs() > 1e-3 * (hi - lo);
                        lo = new_cut;
                    }
                    Side::Right => {
                        changed |= (new_cut - hi).abs() > 1e-3 * (hi - lo);
                        hi = new_cut;
                    }
                }
                changed |= grew;
            }
            if !changed {
                return Ok(GridSpec::new(lo, hi, n));
            }
        }
        Err(Error::Truncation { x: hi, potential: f64::NAN, required: f64::NAN })
    }
}

/// Innermost cut on `side` beyond which every partner potential stays above
/// `required`; the second value reports whether the interval had to grow.
fn fit_cut(
    sp: &SuperpotentialInstance,
    partners: &[Partner],
    lo: f64,
    hi: f64,
    side: Side,
    required: f64,
) -> Result<(f64, bool)> {
    let v = |x: f64| -> Result<f64> {
        let mut m = f64::INFINITY;
        for &p in partners {
            m = m.min(sp.partner_potential(x, p)?);
        }
        Ok(m)
    };
    let samples = 2000;
    let step = (hi - lo) / samples as f64;
    let d = sp.domain();
    let xs: Vec<f64> = (0..=samples)
        .map(|i| lo + i as f64 * step)
        .map(|x| if x == d.lower || x == d.upper { x + 0.5 * step * if x == d.lower { 1.0 } else { -1.0 } } else { x })
        .collect();
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        vals.push(v(x)?);
    }
    let ok = |i: usize| vals[i] >= required;
    match side {
        Side::Right => {
            if !ok(samples) {
                return Ok((hi + (hi - lo), true));
            }
            let mut j = samples;
            while j > 0 && ok(j - 1) {
                j -= 1;
            }
            Ok((xs[j], false))
        }
        Side::Left => {
            if !ok(0) {
                return Ok((lo - (hi - lo), true));
            }
            let mut j = 0;
            while j < samples && ok(j + 1) {
                j += 1;
            }
            Ok((xs[j], false))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub which: Partner,
    #[serde(rename = "N")]
    pub n: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub eigenvalues: Vec<f64>,
    /// `(4 E(2N+1) - E(N)) / 3`, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub richardson_estimate: Option<Vec<f64>>,
}

impl OracleSpectrum {
    /// Richardson values if present, raw eigenvalues otherwise.
    pub fn best(&self) -> &[f64] {
        self.richardson_estimate.as_deref().unwrap_or(&self.eigenvalues)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.xmin, self.xmax, self.n).with_richardson(self.richardson_estimate.is_some())
    }
}

/// Number of eigenvalues of the tridiagonal matrix below `lambda`.
fn sturm_count(diag: &[f64], off2: f64, lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - lambda } else { d - lambda - off2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + lambda.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues of the tridiagonal matrix with diagonal `diag`
/// and constant off-diagonal `off`.
pub fn tridiagonal_lowest(diag: &[f64], off: f64, k: usize) -> Result<Vec<f64>> {
    if diag.is_empty() || k == 0 {
        return Err(Error::EmptyInput);
    }
    let k = k.min(diag.len());
    let off2 = off * off;
    let r = 2.0 * off.abs();
    let lo0 = diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - r;
    let hi0 = diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + r;
    let mut out = Vec::with_capacity(k);
    let mut lo = lo0;
    for j in 0..k {
        // eigenvalue j is the smallest lambda with count(lambda) > j
        let mut a = lo;
        let mut b = hi0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, off2, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
                break;
            }
        }
        let ev = 0.5 * (a + b);
        out.push(ev);
        lo = a;
    }
    Ok(out)
}

/// Lowest `k` eigenvalues of `-hbar^2 d^2/dx^2 + V` for sampled `V` on
/// interior nodes spaced by `h`.
pub fn eigenvalues_of_samples(v: &[f64], h: f64, hbar: f64, k: usize) -> Result<Vec<f64>> {
    let t = hbar * hbar / (h * h);
    let diag: Vec<f64> = v.iter().map(|&vi| 2.0 * t + vi).collect();
    tridiagonal_lowest(&diag, -t, k)
}

fn sample_potential(sp: &SuperpotentialInstance, which: Partner, grid: &GridSpec) -> Result<Vec<f64>> {
    (1..=grid.n).map(|i| sp.partner_potential(grid.node(i), which)).collect()
}

fn eigenvalues(sp: &SuperpotentialInstance, which: Partner, grid: &GridSpec, k: usize) -> Result<Vec<f64>> {
    let v = sample_potential(sp, which, grid)?;
    eigenvalues_of_samples(&v, grid.spacing(), sp.hbar(), k)
}

fn validate(sp: &SuperpotentialInstance, grid: &GridSpec, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::EmptyInput);
    }
    if grid.n < MIN_NODES {
        return Err(Error::InvalidParams(format!("grid needs at least {MIN_NODES} nodes, got {}", grid.n)));
    }
    let d = sp.domain();
    let inside = |x: f64| d.contains(x) || (x.is_finite() && (x == d.lower || x == d.upper));
    if !(grid.xmin < grid.xmax) || !inside(grid.xmin) || !inside(grid.xmax) {
        return Err(Error::InvalidParams(format!(
            "cuts [{}, {}] must lie strictly inside {}",
            grid.xmin, grid.xmax, d
        )));
    }
    Ok(())
}

/// Lowest `k` levels of `H-` or `H+` on `grid`.
pub fn solve_spectrum(
    sp: &SuperpotentialInstance,
    which: Partner,
    grid: &GridSpec,
    k: usize,
) -> Result<OracleSpectrum> {
    validate(sp, grid, k)?;
    let coarse = eigenvalues(sp, which, grid, k)?;
    let top = *coarse.last().ok_or(Error::EmptyInput)?;
    let required = top + grid.margin;
    let d = sp.domain();
    for x in [grid.xmin, grid.xmax] {
        if x == d.lower || x == d.upper {
            // a wall of the domain, not a truncation
            continue;
        }
        let v = sp.partner_potential(x, which)?;
        if v < required {
            return Err(Error::Truncation { x, potential: v, required });
        }
    }
    let richardson_estimate = if grid.richardson {
        let fine = eigenvalues(sp, which, &grid.refined(), k)?;
        for (level, (c, f)) in coarse.iter().zip(&fine).enumerate() {
            let shift = (f - c).abs() / f.abs().max(1.0);
            if shift > grid.shift_tol {
                return Err(Error::GridTooCoarse { level, shift });
            }
        }
        Some(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
    } else {
        None
    };
    Ok(OracleSpectrum {
        which,
        n: grid.n,
        xmin: grid.xmin,
        xmax: grid.xmax,
        eigenvalues: coarse,
        richardson_estimate,
    })
}

/// Observed order `p` from three nested grids (`h`, `h/2`, `h/4`):
/// `p = log2((E_h - E_{h/2}) / (E_{h/2} - E_{h/4}))`.
pub fn convergence_order(
    sp: &SuperpotentialInstance,
    which: Partner,
    grid: &GridSpec,
    level: usize,
) -> Result<f64> {
    validate(sp, grid, level + 1)?;
    let g1 = grid.refined();
    let g2 = g1.refined();
    let e: Vec<f64> = [grid, &g1, &g2]
        .iter()
        .map(|g| eigenvalues(sp, which, g, level + 1).map(|v| v[level]))
        .collect::<Result<_>>()?;
    Ok(((e[0] - e[1]) / (e[1] - e[2])).log2())
}

/// Per-level change when the Dirichlet cuts at finite endpoints move to
/// half their distance from the endpoint.
pub fn offset_sensitivity(
    sp: &SuperpotentialInstance,
    which: Partner,
    grid: &GridSpec,
    k: usize,
) -> Result<Vec<f64>> {
    let d = sp.domain();
    let mut moved = *grid;
    if d.lower.is_finite() {
        moved.xmin = d.lower + 0.5 * (grid.xmin - d.lower);
    }
    if d.upper.is_finite() {
        moved.xmax = d.upper - 0.5 * (d.upper - grid.xmax);
    }
    // keep the spacing so only the cut moves
    moved.n = ((moved.xmax - moved.xmin) / grid.spacing()).round() as usize - 1;
    let a = solve_spectrum(sp, which, grid, k)?;
    let b = solve_spectrum(sp, which, &moved, k)?;
    Ok(a.best().iter().zip(b.best()).map(|(x, y)| (x - y).abs() / x.abs().max(1.0)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub rel_tol: f64,
    pub worst_rel_error: f64,
    /// `E-_0` for unbroken isospectrality checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_state: Option<f64>,
    pub pass: bool,
}

impl Comparison {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "analytic", "numeric", "rel_error", "pass"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.analytic.to_string(),
                r.numeric.to_string(),
                format!("{:e}", r.rel_error),
                r.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn compare_lists(reference: &[f64], numeric: &[f64], rel_tol: f64, first_n: usize) -> Result<Comparison> {
    let len = reference.len().min(numeric.len());
    if len == 0 {
        return Err(Error::EmptyInput);
    }
    let rows: Vec<ComparisonRow> = (0..len)
        .map(|i| {
            let rel_error = (numeric[i] - reference[i]).abs() / reference[i].abs().max(1.0);
            ComparisonRow {
                n: first_n + i,
                analytic: reference[i],
                numeric: numeric[i],
                rel_error,
                pass: rel_error <= rel_tol,
            }
        })
        .collect();
    let worst_rel_error = rows.iter().fold(0.0f64, |m, r| m.max(r.rel_error));
    let pass = rows.iter().all(|r| r.pass);
    Ok(Comparison { rows, rel_tol, worst_rel_error, ground_state: None, pass })
}

/// Level-by-level relative error `|numeric - analytic| / max(|analytic|, 1)`.
pub fn compare_spectra(analytic: &[f64], numeric: &OracleSpectrum, rel_tol: f64) -> Result<Comparison> {
    compare_lists(analytic, numeric.best(), rel_tol, 0)
}

/// Oracle check of `E-_n = E+_n` (broken) or `E-_{n+1} = E+_n` with
/// `E-_0 = 0` (unbroken).
pub fn verify_isospectrality(sp: &SuperpotentialInstance, grid: &GridSpec, k: usize, rel_tol: f64) -> Result<Comparison> {
    let phase = crate::invariance::classify_phase(sp)?.phase;
    let plus = solve_spectrum(sp, Partner::Plus, grid, k)?;
    match phase {
        crate::invariance::Phase::Broken => {
            let minus = solve_spectrum(sp, Partner::Minus, grid, k)?;
            compare_lists(minus.best(), plus.best(), rel_tol, 0)
        }
        crate::invariance::Phase::Unbroken => {
            let minus = solve_spectrum(sp, Partner::Minus, grid, k + 1)?;
            let m = minus.best();
            let mut c = compare_lists(&m[1..], plus.best(), rel_tol, 1)?;
            c.ground_state = Some(m[0]);
            c.pass &= m[0].abs() < rel_tol;
            Ok(c)
        }
    }
}
