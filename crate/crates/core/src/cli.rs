//! Command-line front end: `catalog`, `spectrum`, `verify`, `figure-data`
//! and `suite`.
//!
//! Every command renders to a table, JSON or CSV. Data output carries no
//! timestamps, so identical arguments give byte-identical files; wall-clock
//! times go to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariance::{self, Intersection, Phase, PhaseReport};
use crate::oracle::{self, GridSpec};
use crate::quadrature;
use crate::spectra::{self, SpectrumResult};
use crate::superpotentials::{self, ClassTag, Partner, SuperpotentialInstance};

/// Exit code when every check passes.
pub const EXIT_PASS: u8 = 0;
/// Exit code when a check fails or a computation errors out.
pub const EXIT_FAILURE: u8 = 1;
/// Exit code for unusable arguments, unknown instances or invalid parameters.
pub const EXIT_CONFIG: u8 = 2;

pub const DEFAULT_HBARS: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_VERIFY_NMAX: usize = 7;
pub const DEFAULT_FIGURE_NMAX: usize = 5;
/// Relative tolerance for oracle comparisons.
pub const ORACLE_TOLERANCE: f64 = 1e-3;
const ORACLE_LEVELS: usize = 4;
const HALF_LINE_RANGE: (f64, f64) = (0.2, 8.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// Riccati constraints and both shape-invariance checks.
    Invariance,
    Quantization,
    Oracle,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "susy-lab",
    version,
    about = "Shape-invariant superpotentials: phases, spectra and SWKB/BSWKB exactness checks"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Output file; for `figure-data`, the output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Comma-separated list of hbar values.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub hbar: Vec<f64>,

    /// Highest level index.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,

    /// Quantization tolerance on |I - target|.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// List the shipped superpotentials.
    Catalog {
        #[arg(long)]
        tag: Option<ClassTag>,
    },
    /// Closed-form energy levels.
    Spectrum {
        #[command(flatten)]
        target: Target,
        /// Levels of both partner Hamiltonians.
        #[arg(long)]
        both_partners: bool,
    },
    /// Run the checks for one instance.
    Verify {
        #[command(flatten)]
        target: Target,
        /// Also compare with the finite-difference solver.
        #[arg(long)]
        oracle: bool,
    },
    /// Write CSV data for plotting superpotentials, partner potentials and levels.
    FigureData {
        #[command(flatten)]
        target: Target,
        /// Plot range `lo,hi`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        range: Vec<f64>,
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Run every check on the whole catalog.
    Suite {
        #[arg(long, value_enum, value_delimiter = ',')]
        skip: Vec<Stage>,
        /// Also write the summary as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Instance selector with parameter overrides.
#[derive(Clone, Debug, Args)]
pub struct Target {
    /// Catalog name or an inline JSON instance document.
    pub instance: String,
    /// Use the broken-phase catalog sibling.
    #[arg(long)]
    pub broken: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "B", allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
}

impl Target {
    pub fn named(name: impl Into<String>) -> Self {
        Target {
            instance: name.into(),
            broken: false,
            a: None,
            b: None,
            omega: None,
            lambda: None,
            alpha: None,
            epsilon: None,
        }
    }

    /// The selected instance with the overrides applied and validated
    /// against its class.
    pub fn resolve(&self, hbar: Option<f64>) -> Result<SuperpotentialInstance> {
        let sel = self.instance.trim();
        let mut sp = if sel.starts_with('{') {
            serde_json::from_str::<SuperpotentialInstance>(sel)
                .map_err(|e| Error::InvalidParams(format!("instance document: {e}")))?
        } else {
            superpotentials::lookup(sel)?
        };
        if self.broken {
            sp = broken_variant(sp)?;
        }
        let mut p = *sp.params();
        if let Some(a) = self.a {
            p.a = a;
        }
        p.b = self.b.or(p.b);
        p.omega = self.omega.or(p.omega);
        p.lambda = self.lambda.or(p.lambda);
        p.alpha = self.alpha.or(p.alpha);
        p.epsilon = self.epsilon.or(p.epsilon);
        if let Some(h) = hbar {
            p.hbar = h;
        }
        if p == *sp.params() {
            Ok(sp)
        } else {
            sp.with_params(p)
        }
    }
}

fn broken_variant(sp: SuperpotentialInstance) -> Result<SuperpotentialInstance> {
    if matches!(invariance::classify_phase(&sp), Ok(r) if r.phase == Phase::Broken) {
        return Ok(sp);
    }
    let name = sp.name().strip_suffix("-unbroken").unwrap_or(sp.name()).to_string();
    [format!("{name}-broken"), name.clone()]
        .iter()
        .filter_map(|n| superpotentials::lookup(n).ok())
        .find(|s| matches!(invariance::classify_phase(s), Ok(r) if r.phase == Phase::Broken))
        .ok_or_else(|| Error::InvalidParams(format!("no broken-phase entry for '{name}'")))
}

fn family(tag: ClassTag) -> &'static str {
    if tag.is_class_i() {
        "I"
    } else if tag.is_class_ii() {
        "II"
    } else {
        "III"
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Output goes to stdout or `--out`.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match execute(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error that aborted a command.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownInstance(_) | Error::InvalidParams(_) | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Runs a parsed configuration.
pub fn execute(cfg: &RunConfig) -> Result<u8> {
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Error::InvalidParams(format!("--tol must be positive, got {t}")));
        }
    }
    if cfg.hbar.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidParams("--hbar values must be positive".into()));
    }
    match &cfg.command {
        Command::Catalog { tag } => {
            let entries = cmd_catalog(*tag);
            emit(cfg, &render_catalog(&entries, cfg.format)?)?;
            Ok(EXIT_PASS)
        }
        Command::Spectrum { target, both_partners } => {
            let sp = target.resolve(single_hbar(cfg)?)?;
            let nmax = cfg.nmax.unwrap_or(spectra::DEFAULT_LEVELS - 1);
            let text = if *both_partners {
                render_partner_levels(&partner_levels(&sp, nmax)?, cfg.format)?
            } else {
                render_spectrum(&cmd_spectrum(&sp, nmax)?, cfg.format)?
            };
            emit(cfg, &text)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { target, oracle } => {
            let sp = target.resolve(None)?;
            let opts = VerifyOptions {
                oracle: *oracle,
                ..VerifyOptions::from_config(cfg)
            };
            let start = Instant::now();
            let result = SuiteResult::from_checks(cmd_verify(&sp, &opts));
            emit(cfg, &render_suite(&result, cfg.format)?)?;
            eprintln!("verify: {:.2} s", start.elapsed().as_secs_f64());
            Ok(result.exit_code())
        }
        Command::FigureData { target, range, points } => {
            let sp = target.resolve(single_hbar(cfg)?)?;
            let range = match range.as_slice() {
                [] => None,
                [lo, hi] if lo < hi => Some((*lo, *hi)),
                _ => return Err(Error::InvalidParams("--range takes lo,hi with lo < hi".into())),
            };
            if *points < 2 {
                return Err(Error::InvalidParams("--points must be at least 2".into()));
            }
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let nmax = cfg.nmax.unwrap_or(DEFAULT_FIGURE_NMAX);
            let manifest = cmd_figure_data(&sp, range, *points, nmax, &dir)?;
            let text = match cfg.format {
                Format::Json => to_json(&manifest)?,
                _ => manifest.files.iter().fold(String::new(), |mut s, f| {
                    let _ = writeln!(s, "{f}");
                    s
                }),
            };
            print!("{text}");
            Ok(EXIT_PASS)
        }
        Command::Suite { skip, json } => {
            let mut opts = VerifyOptions::from_config(cfg);
            opts.invariance = !skip.contains(&Stage::Invariance);
            opts.quantization = !skip.contains(&Stage::Quantization);
            opts.oracle = !skip.contains(&Stage::Oracle);
            let start = Instant::now();
            let result = cmd_suite(&opts);
            if let Some(path) = json {
                fs::write(path, to_json(&result)?)?;
            }
            emit(cfg, &render_suite(&result, cfg.format)?)?;
            eprintln!("suite: {:.2} s", start.elapsed().as_secs_f64());
            Ok(result.exit_code())
        }
    }
}

fn single_hbar(cfg: &RunConfig) -> Result<Option<f64>> {
    match cfg.hbar.as_slice() {
        [] => Ok(None),
        [h] => Ok(Some(*h)),
        _ => Err(Error::InvalidParams("this command takes a single --hbar value".into())),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_text<F>(fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        fill(&mut w)?;
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| Error::Io(io::Error::new(io::ErrorKind::InvalidData, e)))
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------- catalog

/// A catalog instance document plus its phase at the default parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    #[serde(flatten)]
    pub instance: SuperpotentialInstance,
    /// `None` when the boundary signs are indeterminate.
    pub phase: Option<Phase>,
}

pub fn cmd_catalog(tag: Option<ClassTag>) -> Vec<CatalogEntry> {
    superpotentials::catalog()
        .into_iter()
        .filter(|sp| tag.map_or(true, |t| sp.tag() == t))
        .map(|sp| CatalogEntry {
            phase: invariance::classify_phase(&sp).ok().map(|r| r.phase),
            instance: sp,
        })
        .collect()
}

fn params_text(sp: &SuperpotentialInstance) -> String {
    let p = sp.params();
    let mut parts = vec![format!("a={}", p.a)];
    for (k, v) in [("B", p.b), ("alpha", p.alpha), ("lambda", p.lambda), ("epsilon", p.epsilon), ("omega", p.omega)] {
        if let Some(v) = v {
            parts.push(format!("{k}={v}"));
        }
    }
    parts.push(format!("hbar={}", p.hbar));
    parts.join(" ")
}

fn phase_text(p: Option<Phase>) -> String {
    p.map(|p| p.to_string()).unwrap_or_else(|| "indeterminate".into())
}

pub fn render_catalog(entries: &[CatalogEntry], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&entries),
        Format::Csv => csv_text(|w| {
            w.write_record(["name", "tag", "xL", "xR", "phase", "a", "B", "alpha", "lambda", "epsilon", "omega", "hbar"])?;
            for e in entries {
                let sp = &e.instance;
                let p = sp.params();
                let d = sp.domain();
                w.write_record([
                    sp.name().to_string(),
                    sp.tag().to_string(),
                    d.lower.to_string(),
                    d.upper.to_string(),
                    phase_text(e.phase),
                    p.a.to_string(),
                    opt_num(p.b),
                    opt_num(p.alpha),
                    opt_num(p.lambda),
                    opt_num(p.epsilon),
                    opt_num(p.omega),
                    p.hbar.to_string(),
                ])?;
            }
            Ok(())
        }),
        Format::Table => {
            let heads: Vec<String> = entries
                .iter()
                .map(|e| format!("{}  {}  {}", e.instance.name(), e.instance.tag(), e.instance.domain()))
                .collect();
            let width = heads.iter().map(|h| h.chars().count()).max().unwrap_or(0);
            let mut s = String::new();
            for (h, e) in heads.iter().zip(entries) {
                let pad = width - h.chars().count();
                let _ = writeln!(
                    s,
                    "{h}{}  {:<8}  {}",
                    " ".repeat(pad),
                    phase_text(e.phase),
                    params_text(&e.instance)
                );
            }
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- spectrum

/// Levels `n = 0..=nmax`, fewer if the hierarchy condition ends the ladder.
pub fn cmd_spectrum(sp: &SuperpotentialInstance, nmax: usize) -> Result<SpectrumResult> {
    let r = spectra::spectrum(sp, nmax + 1)?;
    if r.levels.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(r)
}

pub fn render_spectrum(r: &SpectrumResult, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => {
            let mut buf = Vec::new();
            r.write_csv(&mut buf)?;
            Ok(String::from_utf8_lossy(&buf).into_owned())
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "{}: {} phase, {}", r.instance, r.phase, r.formula);
            let _ = writeln!(s, "{:>3}  E", "n");
            for l in &r.levels {
                let _ = writeln!(s, "{:>3}  {}", l.n, l.value);
            }
            if let Some(n) = r.truncated_at {
                let _ = writeln!(s, "hierarchy condition ends the spectrum at n = {n}");
            }
            Ok(s)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartnerLevel {
    pub n: usize,
    /// Index of the `H-` level paired with `E+_n`: `n` when broken, `n + 1`
    /// when unbroken.
    pub minus_n: usize,
    #[serde(rename = "E_minus")]
    pub e_minus: f64,
    #[serde(rename = "E_plus")]
    pub e_plus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartnerLevels {
    pub instance: String,
    pub phase: Phase,
    pub levels: Vec<PartnerLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_at: Option<usize>,
}

/// `E-` and `E+` side by side for `n = 0..=nmax`.
pub fn partner_levels(sp: &SuperpotentialInstance, nmax: usize) -> Result<PartnerLevels> {
    let phase = invariance::classify_phase(sp)?.phase;
    let mut levels = Vec::new();
    let mut truncated_at = None;
    for n in 0..=nmax {
        match spectra::isospectral_pair(sp, n) {
            Ok((e_minus, e_plus)) => levels.push(PartnerLevel {
                n,
                minus_n: if phase == Phase::Broken { n } else { n + 1 },
                e_minus,
                e_plus,
            }),
            Err(Error::Hierarchy { .. }) if n > 0 => {
                truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PartnerLevels { instance: sp.name().to_string(), phase, levels, truncated_at })
}

pub fn render_partner_levels(r: &PartnerLevels, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => csv_text(|w| {
            w.write_record(["n", "minus_n", "E_minus", "E_plus"])?;
            for l in &r.levels {
                w.write_record([l.n.to_string(), l.minus_n.to_string(), l.e_minus.to_string(), l.e_plus.to_string()])?;
            }
            Ok(())
        }),
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "{}: {} phase", r.instance, r.phase);
            let _ = writeln!(s, "{:>3}  {:>24}  E+_n", "n", "E-");
            for l in &r.levels {
                let label = format!("E-_{} = {}", l.minus_n, l.e_minus);
                let _ = writeln!(s, "{:>3}  {label:>24}  {}", l.n, l.e_plus);
            }
            if let Some(n) = r.truncated_at {
                let _ = writeln!(s, "hierarchy condition ends the spectrum at n = {n}");
            }
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- checks

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub instance: String,
    pub check: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Number of individual evaluations behind the check.
    pub count: usize,
    pub detail: String,
}

impl CheckResult {
    fn new(sp: &SuperpotentialInstance, check: &str) -> Self {
        CheckResult {
            instance: sp.name().to_string(),
            check: check.to_string(),
            status: Status::Pass,
            worst_error: None,
            tolerance: None,
            count: 0,
            detail: String::new(),
        }
    }

    fn measured(mut self, worst: f64, tol: f64, count: usize) -> Self {
        self.worst_error = Some(worst);
        self.tolerance = Some(tol);
        self.count = count;
        if !(worst < tol) {
            self.status = Status::Fail;
        }
        self
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn skipped(mut self, why: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.detail = why.into();
        self
    }

    fn failed(mut self, why: impl std::fmt::Display) -> Self {
        self.status = Status::Fail;
        self.detail = why.to_string();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub pass: bool,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Worst `|I - target|` over all quantization checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_quantization_error: Option<f64>,
    pub checks: Vec<CheckResult>,
}

impl SuiteResult {
    pub fn from_checks(checks: Vec<CheckResult>) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let worst_quantization_error = checks
            .iter()
            .filter(|c| c.check == "quantization")
            .filter_map(|c| c.worst_error)
            .reduce(f64::max);
        SuiteResult {
            pass: count(Status::Fail) == 0,
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skipped),
            worst_quantization_error,
            checks,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAILURE
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub nmax: usize,
    pub hbars: Vec<f64>,
    pub tol: f64,
    pub invariance: bool,
    pub quantization: bool,
    pub oracle: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            nmax: DEFAULT_VERIFY_NMAX,
            hbars: DEFAULT_HBARS.to_vec(),
            tol: quadrature::ACCEPTANCE_TOLERANCE,
            invariance: true,
            quantization: true,
            oracle: false,
        }
    }
}

impl VerifyOptions {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let d = VerifyOptions::default();
        VerifyOptions {
            nmax: cfg.nmax.unwrap_or(d.nmax),
            hbars: if cfg.hbar.is_empty() { d.hbars } else { cfg.hbar.clone() },
            tol: cfg.tol.unwrap_or(d.tol),
            ..d
        }
    }
}

/// All checks for one instance, in a fixed order.
pub fn cmd_verify(sp: &SuperpotentialInstance, opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let report = invariance::classify_phase(sp);
    out.push(match &report {
        Ok(r) => CheckResult::new(sp, "phase").detail(format!(
            "{}, W signs ({:+}, {:+}) at the boundaries",
            r.phase, r.signs[0], r.signs[1]
        )),
        Err(e) => CheckResult::new(sp, "phase").failed(e),
    });
    if opts.invariance {
        out.push(riccati_check(sp, &opts.hbars));
        out.push(additive_check(sp, &opts.hbars));
        out.push(discrete_check(sp, &opts.hbars));
    }
    if opts.quantization {
        out.push(match &report {
            Ok(r) => quantization_check(sp, r, opts),
            Err(e) => CheckResult::new(sp, "quantization").failed(e),
        });
    }
    if opts.oracle {
        out.push(oracle_check(sp));
    }
    out
}

fn over_hbars<F>(sp: &SuperpotentialInstance, name: &str, hbars: &[f64], tol: f64, f: F) -> CheckResult
where
    F: Fn(&SuperpotentialInstance) -> Result<f64>,
{
    let c = CheckResult::new(sp, name);
    let mut worst: f64 = 0.0;
    for &h in hbars {
        let r = sp.with_hbar(h).and_then(|s| f(&s));
        match r {
            Ok(v) => worst = worst.max(v),
            Err(e) => return c.failed(format!("hbar = {h}: {e}")),
        }
    }
    c.measured(worst, tol, hbars.len())
}

fn riccati_check(sp: &SuperpotentialInstance, hbars: &[f64]) -> CheckResult {
    over_hbars(sp, "riccati", hbars, invariance::RESIDUAL_TOLERANCE, |s| {
        superpotentials::check_riccati(s, &s.standard_grid())
    })
}

fn additive_check(sp: &SuperpotentialInstance, hbars: &[f64]) -> CheckResult {
    over_hbars(sp, "additive-si", hbars, invariance::RESIDUAL_TOLERANCE, |s| {
        invariance::additive_si_residual(s, &s.standard_grid())
    })
    .detail("V+(x, a) + g(a) = V-(x, a + hbar) + g(a + hbar)")
}

fn discrete_check(sp: &SuperpotentialInstance, hbars: &[f64]) -> CheckResult {
    let c = CheckResult::new(sp, "discrete-si");
    match invariance::discrete_si_map(sp) {
        Err(Error::UnsupportedClass(t)) => {
            return c.skipped(format!("no phase-changing map for Class {}", family(t)))
        }
        Err(e @ Error::UnsupportedParameters(_)) => return c.skipped(e.to_string()),
        _ => {}
    }
    // deviation from a constant, and the constant against the predicted shift
    over_hbars(sp, "discrete-si", hbars, invariance::RESIDUAL_TOLERANCE, |s| {
        let map = invariance::discrete_si_map(s)?;
        let (dev, mean) = invariance::verify_discrete_si(s, &s.standard_grid())?;
        let rel = (mean - map.energy_shift).abs() / map.energy_shift.abs().max(1.0);
        Ok(dev.max(rel))
    })
    .detail("V+(x; source) - V-(x; mapped) is the predicted constant")
}

fn bswkb_probe(sp: &SuperpotentialInstance, report: &PhaseReport) -> f64 {
    if let Ok(e) = spectra::broken_energy(sp, 0) {
        if e > 0.0 {
            return e;
        }
    }
    let edge = report
        .evidence
        .iter()
        .map(|ev| ev.asymptote.limit_w2())
        .filter(|v| v.is_finite() && *v > 0.0)
        .fold(f64::INFINITY, f64::min);
    if edge.is_finite() {
        return 2.0 * edge;
    }
    quadrature::min_w2(sp).map(|(_, m)| 2.0 * m + 1.0).unwrap_or(1.0)
}

fn quantization_check(sp: &SuperpotentialInstance, report: &PhaseReport, opts: &VerifyOptions) -> CheckResult {
    let c = CheckResult::new(sp, "quantization");
    let label = match report.phase {
        Phase::Unbroken => "SWKB",
        Phase::Broken => "BSWKB",
    };
    if report.phase == Phase::Broken {
        let probe = bswkb_probe(sp, report);
        match invariance::bswkb_applicability(sp, probe) {
            Ok(app) if app.kind == Intersection::TwoTurningPoints => {}
            Ok(app) => {
                return c.skipped(format!(
                    "BSWKB undefined: {} (Class {}); {}",
                    app.kind,
                    family(sp.tag()),
                    app.rationale
                ))
            }
            Err(e) => return c.skipped(format!("BSWKB undefined: {e}")),
        }
    }
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut notes = Vec::new();
    for &h in &opts.hbars {
        let s = match sp.with_hbar(h) {
            Ok(s) => s,
            Err(e) => return c.failed(format!("hbar = {h}: {e}")),
        };
        for n in 0..=opts.nmax {
            match quadrature::verify_quantization(&s, n) {
                Ok(r) => {
                    worst = worst.max(r.abs_error);
                    count += 1;
                }
                Err(Error::Hierarchy { n, .. }) => {
                    notes.push(format!("hbar = {h}: {n} bound levels"));
                    break;
                }
                Err(e @ Error::SingleIntersection { .. }) => {
                    return c.skipped(format!("BSWKB undefined: {e}"));
                }
                Err(e) => return c.failed(format!("n = {n}, hbar = {h}: {e}")),
            }
        }
    }
    if count == 0 {
        return c.failed("no level could be checked");
    }
    let mut detail = format!("{label}, n = 0..{}, hbar in {:?}", opts.nmax, opts.hbars);
    if !notes.is_empty() {
        detail.push_str("; ");
        detail.push_str(&notes.join(", "));
    }
    c.measured(worst, opts.tol, count).detail(detail)
}

/// Finite-difference levels of `H-` against the closed form, and `H-`
/// against `H+`.
fn oracle_check(sp: &SuperpotentialInstance) -> CheckResult {
    let c = CheckResult::new(sp, "oracle");
    let analytic = match spectra::spectrum(sp, ORACLE_LEVELS) {
        Ok(r) => r,
        Err(Error::UnsupportedClass(t)) => {
            return c.skipped(format!("no closed-form broken spectrum for Class {}", family(t)))
        }
        Err(e) => return c.failed(e),
    };
    let levels = analytic.values();
    let k = levels.len();
    let iso_k = if analytic.phase == Phase::Broken { k } else { k - 1 };
    let run = || -> Result<(f64, usize)> {
        let grid = GridSpec::fit(sp, &[Partner::Minus, Partner::Plus], k, oracle::DEFAULT_NODES)?;
        let minus = oracle::solve_spectrum(sp, Partner::Minus, &grid, k)?;
        let cmp = oracle::compare_spectra(&levels, &minus, ORACLE_TOLERANCE)?;
        let mut worst = cmp.worst_rel_error;
        let mut count = cmp.rows.len();
        if iso_k > 0 {
            let iso = oracle::verify_isospectrality(sp, &grid, iso_k, ORACLE_TOLERANCE)?;
            worst = worst.max(iso.worst_rel_error);
            count += iso.rows.len();
        }
        Ok((worst, count))
    };
    match run() {
        Ok((worst, count)) => c
            .measured(worst, ORACLE_TOLERANCE, count)
            .detail(format!("{k} levels of H- vs closed form and vs H+ (relative)")),
        Err(e) => c.failed(e),
    }
}

/// Every catalog entry through [`cmd_verify`], plus the oracle on the
/// broken Class III defaults.
pub fn cmd_suite(opts: &VerifyOptions) -> SuiteResult {
    let mut checks = Vec::new();
    let per_entry = VerifyOptions { oracle: false, ..opts.clone() };
    for sp in superpotentials::catalog() {
        checks.extend(cmd_verify(&sp, &per_entry));
        let broken_iii = !sp.tag().is_class_i()
            && !sp.tag().is_class_ii()
            && matches!(invariance::classify_phase(&sp), Ok(r) if r.phase == Phase::Broken);
        if opts.oracle && broken_iii {
            checks.push(oracle_check(&sp));
        }
    }
    SuiteResult::from_checks(checks)
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIP",
    }
}

pub fn render_suite(r: &SuiteResult, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => csv_text(|w| {
            w.write_record(["instance", "check", "status", "worst_error", "tolerance", "count", "detail"])?;
            for c in &r.checks {
                w.write_record([
                    c.instance.clone(),
                    c.check.clone(),
                    status_text(c.status).to_string(),
                    c.worst_error.map(|v| format!("{v:e}")).unwrap_or_default(),
                    c.tolerance.map(|v| format!("{v:e}")).unwrap_or_default(),
                    c.count.to_string(),
                    c.detail.clone(),
                ])?;
            }
            Ok(())
        }),
        Format::Table => {
            let iw = r.checks.iter().map(|c| c.instance.len()).max().unwrap_or(8).max(8);
            let mut s = String::new();
            let _ = writeln!(s, "{:<iw$}  {:<12}  {:<4}  {:>9}  {:>9}  detail", "instance", "check", "", "worst", "tol");
            for c in &r.checks {
                let num = |v: Option<f64>| v.map(|v| format!("{v:.1e}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    s,
                    "{:<iw$}  {:<12}  {:<4}  {:>9}  {:>9}  {}",
                    c.instance,
                    c.check,
                    status_text(c.status),
                    num(c.worst_error),
                    num(c.tolerance),
                    c.detail
                );
            }
            let _ = writeln!(
                s,
                "{} passed, {} failed, {} skipped; worst quantization error {}",
                r.passed,
                r.failed,
                r.skipped,
                r.worst_quantization_error.map(|v| format!("{v:.1e}")).unwrap_or_else(|| "-".into())
            );
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- figures

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureManifest {
    pub instance: String,
    /// Instance used for the other phase, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterpart: Option<String>,
    pub range: [f64; 2],
    pub points: usize,
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

/// The same family in the other phase: the image under the discrete map
/// for Class III, otherwise the catalog sibling.
pub fn counterpart(sp: &SuperpotentialInstance) -> Option<SuperpotentialInstance> {
    let phase = invariance::classify_phase(sp).ok()?.phase;
    let other_phase = |s: &SuperpotentialInstance| {
        matches!(invariance::classify_phase(s), Ok(r) if r.phase != phase)
    };
    let mapped = invariance::discrete_si_map(sp)
        .and_then(|m| invariance::mapped_instance(sp, &m))
        .ok()
        .map(|m| m.rename(format!("{}-mapped", sp.name())));
    if let Some(m) = mapped.filter(other_phase) {
        return Some(m);
    }
    superpotentials::sibling(sp.name()).filter(other_phase)
}

/// Default plot range: `(0.2, 8)` on half-lines, the standard window
/// otherwise.
pub fn plot_range(sp: &SuperpotentialInstance) -> (f64, f64) {
    let d = sp.domain();
    match (d.lower.is_finite(), d.upper.is_finite()) {
        (true, false) => (d.lower + HALF_LINE_RANGE.0, d.lower + HALF_LINE_RANGE.1),
        (false, true) => (d.upper - HALF_LINE_RANGE.1, d.upper - HALF_LINE_RANGE.0),
        _ => sp.window(),
    }
}

fn cell(r: Result<f64>) -> String {
    r.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes `<name>-superpotentials.csv` (x, W_broken, W_unbroken),
/// `<name>-potentials.csv` (phase, x, V_minus, V_plus) and
/// `<name>-levels.csv` (phase, n, minus_n, E_minus, E_plus) into `dir`.
pub fn cmd_figure_data(
    sp: &SuperpotentialInstance,
    range: Option<(f64, f64)>,
    points: usize,
    nmax: usize,
    dir: &Path,
) -> Result<FigureManifest> {
    let phase = invariance::classify_phase(sp)?.phase;
    let other = counterpart(sp);
    let (lo, hi) = range.unwrap_or_else(|| plot_range(sp));
    let xs: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let (broken, unbroken) = match phase {
        Phase::Broken => (Some(sp), other.as_ref()),
        Phase::Unbroken => (other.as_ref(), Some(sp)),
    };
    let mut notes = Vec::new();
    if other.is_none() {
        notes.push(format!("no counterpart in the other phase for '{}'", sp.name()));
    }
    fs::create_dir_all(dir)?;
    let name = sp.name();
    let files = [
        format!("{name}-superpotentials.csv"),
        format!("{name}-potentials.csv"),
        format!("{name}-levels.csv"),
    ];

    let w_of = |s: Option<&SuperpotentialInstance>, x: f64| -> String {
        s.map(|s| cell(s.evaluate_w(x))).unwrap_or_default()
    };
    let text = csv_text(|w| {
        w.write_record(["x", "W_broken", "W_unbroken"])?;
        for &x in &xs {
            w.write_record([x.to_string(), w_of(broken, x), w_of(unbroken, x)])?;
        }
        Ok(())
    })?;
    fs::write(dir.join(&files[0]), text)?;

    let phases: Vec<&SuperpotentialInstance> = [broken, unbroken].into_iter().flatten().collect();
    let text = csv_text(|w| {
        w.write_record(["phase", "x", "V_minus", "V_plus"])?;
        for s in &phases {
            let p = invariance::classify_phase(s)?.phase.to_string();
            for &x in &xs {
                w.write_record([
                    p.clone(),
                    x.to_string(),
                    cell(s.partner_potential(x, Partner::Minus)),
                    cell(s.partner_potential(x, Partner::Plus)),
                ])?;
            }
        }
        Ok(())
    })?;
    fs::write(dir.join(&files[1]), text)?;

    let mut level_sets = Vec::new();
    for s in &phases {
        match partner_levels(s, nmax) {
            Ok(l) => level_sets.push(l),
            Err(e) => notes.push(format!("no levels for '{}': {e}", s.name())),
        }
    }
    let text = csv_text(|w| {
        w.write_record(["phase", "n", "minus_n", "E_minus", "E_plus"])?;
        for set in &level_sets {
            for l in &set.levels {
                w.write_record([
                    set.phase.to_string(),
                    l.n.to_string(),
                    l.minus_n.to_string(),
                    l.e_minus.to_string(),
                    l.e_plus.to_string(),
                ])?;
            }
        }
        Ok(())
    })?;
    fs::write(dir.join(&files[2]), text)?;

    Ok(FigureManifest {
        instance: name.to_string(),
        counterpart: other.map(|o| o.name().to_string()),
        range: [lo, hi],
        points,
        files: files.iter().map(|f| dir.join(f).display().to_string()).collect(),
        notes,
    })
}
