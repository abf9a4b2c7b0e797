//! Command front end: run configuration, the five commands, and the CSV/JSON
//! table formats they emit.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid input or evaluation
//! failure, 3 a zero persistently on a contour, 4 a winding number that is
//! not close to an integer, 5 unresolved zero clusters in strict mode.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::auxiliary::{
    r_eval_method, r_eval_with, zeta_from_r, zeta_reference, AsymptoticRegion, Method,
};
use crate::counting::{
    backlund_trial, count_layers, residual_table, AuxiliaryR, CountConfig, CountResult, Rect,
};
use crate::error::{Error, Result};
use crate::locator::{locate_zeros, zero_statistics};
use crate::special::{chi_c, eta_c, ComplexPoint, PrecisionMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CONTOUR_ZERO: i32 = 3;
pub const EXIT_WINDING: i32 = 4;
pub const EXIT_CLUSTERS: i32 = 5;

pub const FORMAT_TAG: &str = "rzero v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eval,
    Count,
    Zeros,
    Validate,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub t_min: f64,
    pub t_max: f64,
    pub t_step: f64,
    pub box_left: f64,
    pub precision: PrecisionMode,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub strict: bool,
    /// complex literals for `eval`
    pub points: Vec<String>,
    /// `eval` evaluates an n x n grid around each point when n > 1
    pub grid: usize,
    pub grid_step: f64,
    /// replaces the numeric tolerances of the `validate` suites
    pub tolerance: Option<f64>,
    /// random samples per `validate` suite
    pub samples: usize,
    pub min_size: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Validate,
            t_min: 10.0,
            t_max: 100.0,
            t_step: 10.0,
            box_left: crate::counting::DEFAULT_BOX_LEFT,
            precision: PrecisionMode::Standard,
            format: Format::Csv,
            out: None,
            seed: 0,
            strict: false,
            points: Vec::new(),
            grid: 1,
            grid_step: 0.1,
            tolerance: None,
            samples: 1000,
            min_size: crate::locator::DEFAULT_MIN_SIZE,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("t-min", self.t_min),
            ("t-max", self.t_max),
            ("t-step", self.t_step),
            ("box-left", self.box_left),
            ("grid-step", self.grid_step),
            ("min-size", self.min_size),
        ];
        if let Some((name, v)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Invalid(format!("--{name} must be finite, got {v}")));
        }
        if !(self.t_min <= self.t_max) {
            return Err(Error::Invalid(format!(
                "need t-min <= t-max, got {} > {}",
                self.t_min, self.t_max
            )));
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(Error::Invalid(format!(
                    "--tolerance must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }

    /// Heights `t_min + k t_step` in `(t_min, t_max]`; just `t_max` when the
    /// step is not positive.
    pub fn heights(&self) -> Vec<f64> {
        if !(self.t_step > 0.0) || self.t_max == self.t_min {
            return vec![self.t_max];
        }
        let n = ((self.t_max - self.t_min) / self.t_step + 1e-9).floor() as usize;
        (1..=n)
            .map(|k| self.t_min + k as f64 * self.t_step)
            .collect()
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ZeroOnPath(_) | Error::PersistentContourZero(_) => EXIT_CONTOUR_ZERO,
        Error::NonInteger(_) => EXIT_WINDING,
        _ => EXIT_INVALID,
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Invalid(format!("malformed complex literal {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let num = |p: &str| -> Result<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(bad),
        }
    };
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(bad)?,
            0.0,
        ));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(bad)?;
            Ok(Complex64::new(re, num(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

/// A flat table row with a fixed CSV column order.
pub trait Record: Serialize + DeserializeOwned + Send {
    const HEADER: &'static [&'static str];
    fn csv_fields(&self) -> Vec<String>;
}

pub trait CsvField {
    fn csv(&self) -> String;
}

/// 17 significant digits
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl CsvField for f64 {
    fn csv(&self) -> String {
        format_real(*self)
    }
}

impl CsvField for i64 {
    fn csv(&self) -> String {
        self.to_string()
    }
}

impl CsvField for usize {
    fn csv(&self) -> String {
        self.to_string()
    }
}

impl CsvField for bool {
    fn csv(&self) -> String {
        self.to_string()
    }
}

impl CsvField for String {
    fn csv(&self) -> String {
        self.clone()
    }
}

macro_rules! record {
    ($(#[$m:meta])* $name:ident { $($field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct $name {
            $(pub $field: $ty),*
        }

        impl Record for $name {
            const HEADER: &'static [&'static str] = &[$(stringify!($field)),*];
            fn csv_fields(&self) -> Vec<String> {
                vec![$(CsvField::csv(&self.$field)),*]
            }
        }
    };
}

record!(EvalRow {
    sigma: f64,
    t: f64,
    re: f64,
    im: f64,
    method: String,
    error_estimate: f64,
});

record!(CountRow {
    big_t: f64,
    count: i64,
    smooth_part: f64,
    sqrt_term: f64,
    main_value: f64,
    residual: f64,
    box_left: f64,
    certificates: String,
});

record!(ZeroRow {
    beta: f64,
    gamma: f64,
    enclosure_radius: f64,
    residual_modulus: f64,
    winding_certificate: i64,
});

record!(TableRow {
    big_t: f64,
    count: i64,
    main_value: f64,
    residual: f64,
    r_smooth: f64,
    r_with_sqrt_added: f64,
    log_sq_t: f64,
    residual_bound: f64,
    box_left: f64,
});

record!(SuiteRow {
    suite: String,
    passed: bool,
    worst: f64,
    tolerance: f64,
    samples: usize,
});

impl CountRow {
    fn from_result(r: &CountResult) -> Self {
        let certificates = r
            .certificates
            .iter()
            .map(|c| format!("{}:{}", c.segment, if c.holds { "ok" } else { "fail" }))
            .collect::<Vec<_>>()
            .join("|");
        Self {
            big_t: r.big_t,
            count: r.count,
            smooth_part: r.smooth_part(),
            sqrt_term: r.sqrt_term,
            main_value: r.main_value,
            residual: r.residual,
            box_left: r.box_left,
            certificates,
        }
    }
}

/// A command's output: rows and summary values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub format: String,
    pub command: Command,
    pub rows: Vec<R>,
    pub summary: BTreeMap<String, f64>,
}

impl<R: Record> Document<R> {
    pub fn new(command: Command, rows: Vec<R>) -> Self {
        Self {
            format: FORMAT_TAG.into(),
            command,
            rows,
            summary: BTreeMap::new(),
        }
    }

    /// `# rzero v1`, `# command: <name>`, header, rows, then one
    /// `# summary: <key>,<value>` line per summary entry.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(R::HEADER).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.csv_fields()).map_err(csv_err)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?)
            .map_err(|e| Error::Invalid(e.to_string()))?;
        let mut out = format!(
            "# {}\n# command: {}\n{body}",
            self.format,
            command_name(self.command)
        );
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary: {k},{}\n", format_real(*v)));
        }
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let format = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::Invalid("missing format header".into()))?
            .to_string();
        if format != FORMAT_TAG {
            return Err(Error::Invalid(format!("unknown table format {format:?}")));
        }
        let command = lines
            .next()
            .and_then(|l| l.strip_prefix("# command: "))
            .and_then(|c| <Command as clap::ValueEnum>::from_str(c, false).ok())
            .ok_or_else(|| Error::Invalid("missing command line".into()))?;
        let mut summary = BTreeMap::new();
        for l in text.lines().filter_map(|l| l.strip_prefix("# summary: ")) {
            let (k, v) = l
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("bad summary line {l:?}")))?;
            let v = v
                .parse::<f64>()
                .map_err(|e| Error::Invalid(e.to_string()))?;
            summary.insert(k.to_string(), v);
        }
        let mut rd = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let rows = rd
            .deserialize()
            .collect::<std::result::Result<Vec<R>, _>>()
            .map_err(csv_err)?;
        Ok(Self {
            format,
            command,
            rows,
            summary,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json().map(|s| s + "\n"),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Eval => "eval",
        Command::Count => "count",
        Command::Zeros => "zeros",
        Command::Validate => "validate",
        Command::Table => "table",
    }
}

/// Rendered output and exit code of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: Option<String>,
    pub messages: Vec<String>,
}

impl Outcome {
    fn fail(code: i32, msg: String) -> Self {
        Self {
            code,
            output: None,
            messages: vec![msg],
        }
    }

    fn done<R: Record>(
        cfg: &RunConfig,
        doc: &Document<R>,
        code: i32,
        messages: Vec<String>,
    ) -> Self {
        match doc.render(cfg.format) {
            Ok(text) => Self {
                code,
                output: Some(text),
                messages,
            },
            Err(e) => Self::fail(EXIT_INVALID, e.to_string()),
        }
    }
}

fn eval_points(cfg: &RunConfig) -> Result<Vec<Complex64>> {
    if cfg.points.is_empty() {
        return Err(Error::Invalid("eval needs at least one --point".into()));
    }
    let n = cfg.grid.max(1);
    let mut pts = Vec::new();
    for lit in &cfg.points {
        let c = parse_complex(lit)?;
        let off = |k: usize| (k as f64 - (n - 1) as f64 / 2.0) * cfg.grid_step;
        for i in 0..n {
            for j in 0..n {
                pts.push(Complex64::new(c.re + off(j), c.im + off(i)));
            }
        }
    }
    Ok(pts)
}

pub fn cmd_eval(cfg: &RunConfig) -> Outcome {
    let pts = match eval_points(cfg) {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_INVALID, e.to_string()),
    };
    let rows = pts
        .par_iter()
        .map(|&z| {
            let p = ComplexPoint::from_complex(z).map_err(|e| (z, e))?;
            let r = r_eval_with(p, cfg.precision).map_err(|e| (z, e))?;
            Ok(EvalRow {
                sigma: z.re,
                t: z.im,
                re: r.value.re,
                im: r.value.im,
                method: "quadrature".into(),
                error_estimate: r.error_estimate,
            })
        })
        .collect::<std::result::Result<Vec<_>, (Complex64, Error)>>();
    match rows {
        Ok(rows) => Outcome::done(
            cfg,
            &Document::new(Command::Eval, rows),
            EXIT_OK,
            Vec::new(),
        ),
        Err((z, e)) => Outcome::fail(EXIT_INVALID, format!("evaluation failed at {z}: {e}")),
    }
}

pub fn cmd_count(cfg: &RunConfig) -> Outcome {
    let cc = CountConfig {
        box_left: cfg.box_left,
        auto_extend: true,
        ..CountConfig::default()
    };
    match count_layers(&AuxiliaryR, cfg.t_min, &cfg.heights(), &cc) {
        Ok(results) => {
            let failed: Vec<String> = results
                .iter()
                .flat_map(|r| {
                    r.certificates
                        .iter()
                        .filter(|c| !c.holds)
                        .map(move |c| format!("T={}: {} failed", r.big_t, c.segment))
                })
                .collect();
            let rows = results.iter().map(CountRow::from_result).collect();
            let code = if failed.is_empty() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            Outcome::done(cfg, &Document::new(Command::Count, rows), code, failed)
        }
        Err(e) => Outcome::fail(exit_code(&e), format!("count failed: {e}")),
    }
}

pub fn cmd_zeros(cfg: &RunConfig) -> Outcome {
    let located = Rect::new(cfg.box_left, 2.0, cfg.t_min, cfg.t_max)
        .and_then(|b| locate_zeros(b, cfg.min_size));
    let (zeros, clusters) = match located {
        Ok(v) => v,
        Err(e) => return Outcome::fail(exit_code(&e), format!("zero location failed: {e}")),
    };
    let rows = zeros
        .iter()
        .map(|z| ZeroRow {
            beta: z.beta,
            gamma: z.gamma,
            enclosure_radius: z.enclosure_radius,
            residual_modulus: z.residual_modulus,
            winding_certificate: z.winding_certificate,
        })
        .collect();
    let mut doc = Document::new(Command::Zeros, rows);
    doc.summary.insert("clusters".into(), clusters.len() as f64);
    if let Ok(st) = zero_statistics(&zeros) {
        doc.summary.insert("count".into(), st.count as f64);
        doc.summary
            .insert("fraction_right".into(), st.fraction_right);
        doc.summary.insert("min_beta".into(), st.min_beta);
        doc.summary.insert("max_beta".into(), st.max_beta);
        doc.summary.insert("mean_gap".into(), st.mean_gap);
    } else {
        doc.summary.insert("count".into(), 0.0);
    }
    let messages: Vec<String> = clusters
        .iter()
        .map(|(r, w)| format!("unresolved cluster of {w} zeros in {r:?}"))
        .collect();
    let code = if cfg.strict && !clusters.is_empty() {
        EXIT_CLUSTERS
    } else {
        EXIT_OK
    };
    Outcome::done(cfg, &doc, code, messages)
}

/// Least-squares c in `count - smooth_part ~ c sqrt(T/2π)`.
pub fn fit_sqrt_coefficient(rows: &[CountResult]) -> f64 {
    let (num, den) = rows.iter().fold((0.0, 0.0), |(n, d), r| {
        let x = (r.big_t / TAU).sqrt();
        (n + x * r.r_smooth(), d + x * x)
    });
    num / den
}

pub fn cmd_table(cfg: &RunConfig) -> Outcome {
    let results = match residual_table(&cfg.heights(), cfg.box_left) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(exit_code(&e), format!("table failed: {e}")),
    };
    let rows = results
        .iter()
        .map(|r| TableRow {
            big_t: r.big_t,
            count: r.count,
            main_value: r.main_value,
            residual: r.residual,
            r_smooth: r.r_smooth(),
            r_with_sqrt_added: r.r_with_sqrt_added(),
            log_sq_t: r.big_t.ln().powi(2),
            residual_bound: 5.0 * r.big_t.powf(0.4),
            box_left: r.box_left,
        })
        .collect();
    let mut doc = Document::new(Command::Table, rows);
    doc.summary
        .insert("sqrt_coefficient".into(), fit_sqrt_coefficient(&results));
    Outcome::done(cfg, &doc, EXIT_OK, Vec::new())
}

fn suite_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index))
}

fn suite(name: &str, worst: f64, tolerance: f64, samples: usize, passed: bool) -> SuiteRow {
    SuiteRow {
        suite: name.into(),
        passed,
        worst,
        tolerance,
        samples,
    }
}

pub fn identity_suite(tol: f64) -> Result<SuiteRow> {
    let grid: Vec<(f64, f64)> = [-1.0, 0.0, 0.5, 1.0, 2.0]
        .iter()
        .flat_map(|&s| (1..=20).map(move |k| (s, 5.0 * k as f64)))
        .collect();
    let worst = grid
        .par_iter()
        .map(|&(s, t)| {
            let p = ComplexPoint::new(s, t)?;
            let z = zeta_reference(p)?;
            Ok((zeta_from_r(p)? - z).norm() / z.norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(suite("identity", worst, tol, grid.len(), worst <= tol))
}

/// eta on its branch with eta^2 = (s-1)/2πi, and Im(-πiη²) = -t/2.
pub fn branch_suite(seed: u64, samples: usize, tol: f64) -> Result<SuiteRow> {
    let mut rng = suite_rng(seed, 1);
    let pts: Vec<Complex64> = (0..samples)
        .map(|_| Complex64::new(rng.gen_range(-50.0..50.0), rng.gen_range(-1000.0..1000.0)))
        .collect();
    let worst = pts
        .par_iter()
        .map(|&s| {
            let e = eta_c(s)?.value;
            if !(e.re + e.im > 0.0) {
                return Ok(f64::INFINITY);
            }
            let target = (s - 1.0) / Complex64::new(0.0, TAU);
            let sq = (e * e - target).norm() / target.norm();
            let gauss = (-Complex64::i() * std::f64::consts::PI * e * e).im;
            let im = (gauss + s.im / 2.0).abs() / (s.im.abs() / 2.0).max(f64::MIN_POSITIVE);
            Ok(sq.max(im))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(suite("branch", worst, tol, samples, worst <= tol))
}

/// χ(s)χ(1-s) = 1
pub fn functional_suite(seed: u64, samples: usize, tol: f64) -> Result<SuiteRow> {
    let mut rng = suite_rng(seed, 2);
    let pts: Vec<Complex64> = (0..samples)
        .map(|_| {
            let t: f64 = rng.gen_range(1.0..1000.0);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            Complex64::new(rng.gen_range(-20.0..20.0), sign * t)
        })
        .collect();
    let worst = pts
        .par_iter()
        .map(|&s| Ok((chi_c(s)? * chi_c(1.0 - s)? - 1.0).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(suite(
        "functional_equation",
        worst,
        tol,
        samples,
        worst <= tol,
    ))
}

/// Worst ratio realized / bound over random polynomials; passes when every
/// trial satisfies the bound.
pub fn backlund_suite(seed: u64, samples: usize) -> Result<SuiteRow> {
    let mut rng = suite_rng(seed, 3);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..samples {
        let trial = backlund_trial(&mut rng, 12, 1e-2)?;
        ok &= trial.holds();
        let ratio = if trial.bound > 0.0 {
            trial.realized / trial.bound
        } else if trial.realized > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(ratio);
    }
    Ok(suite("backlund", worst, 1.0, samples, ok))
}

/// |R / surrogate - 1| on the boundary of the left region, 50 heights
/// log-uniform in [50, 2000].
pub fn surrogate_suite(seed: u64) -> Result<SuiteRow> {
    let mut rng = suite_rng(seed, 4);
    let region = AsymptoticRegion::default();
    let ts: Vec<f64> = (0..50)
        .map(|_| (rng.gen_range(50f64.ln()..2000f64.ln())).exp())
        .collect();
    let worst = ts
        .par_iter()
        .map(|&t| {
            let p = ComplexPoint::new(region.boundary(t), t)?;
            let r = r_eval_method(p, Method::Asymptotic, &region)?;
            Ok(r.u_proxy.unwrap_or(f64::INFINITY))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(suite("surrogate_u", worst, 1.0, ts.len(), worst < 1.0))
}

pub fn cmd_validate(cfg: &RunConfig) -> Outcome {
    let tol = |default: f64| cfg.tolerance.unwrap_or(default);
    let suites: Vec<Result<SuiteRow>> = vec![
        identity_suite(tol(1e-8)),
        branch_suite(cfg.seed, cfg.samples, tol(1e-12)),
        functional_suite(cfg.seed, cfg.samples, tol(1e-10)),
        backlund_suite(cfg.seed, cfg.samples),
        surrogate_suite(cfg.seed),
    ];
    let mut rows = Vec::new();
    for s in suites {
        match s {
            Ok(r) => rows.push(r),
            Err(e) => return Outcome::fail(exit_code(&e), format!("validation aborted: {e}")),
        }
    }
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("suite {} failed", r.suite))
        .collect();
    let code = if failed.is_empty() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    Outcome::done(cfg, &Document::new(Command::Validate, rows), code, failed)
}

/// Runs the configured command, writing the table to `cfg.out` or `out` and
/// diagnostics to `err`. Returns the exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INVALID;
    }
    let outcome = match cfg.command {
        Command::Eval => cmd_eval(cfg),
        Command::Count => cmd_count(cfg),
        Command::Zeros => cmd_zeros(cfg),
        Command::Validate => cmd_validate(cfg),
        Command::Table => cmd_table(cfg),
    };
    for m in &outcome.messages {
        let _ = writeln!(err, "{m}");
    }
    if let Some(text) = &outcome.output {
        let written = match &cfg.out {
            Some(path) => std::fs::write(path, text),
            None => out.write_all(text.as_bytes()),
        };
        if let Err(e) = written {
            let _ = writeln!(err, "error: cannot write output: {e}");
            return EXIT_INVALID;
        }
    }
    outcome.code
}
