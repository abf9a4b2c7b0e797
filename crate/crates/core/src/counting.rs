//! Argument-principle machinery: oriented paths, adaptive tracking of the
//! argument of a holomorphic function along them, winding numbers of closed
//! contours, the Backlund bound and the counting function of R(s).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::auxiliary::r_eval_scaled;
use crate::error::{Error, Result};
use crate::special::ComplexPoint;

/// A function whose argument can be tracked. Implementors return `log f(z)`
/// on any branch; only the real part and the imaginary part modulo 2π are
/// used, which keeps functions of huge modulus (R(s) far to the left) usable.
pub trait Holomorphic: Sync {
    fn log_eval(&self, z: Complex64) -> Result<Complex64>;
}

/// Adapter for functions given by their values.
pub struct Plain<F>(pub F);

impl<F> Holomorphic for Plain<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn log_eval(&self, z: Complex64) -> Result<Complex64> {
        let v = (self.0)(z);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite(format!("f({z}) = {v}")));
        }
        Ok(v.ln())
    }
}

/// R(s) through the automatic quadrature.
#[derive(Debug, Clone, Copy, Default)]
pub struct AuxiliaryR;

impl Holomorphic for AuxiliaryR {
    fn log_eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(r_eval_scaled(ComplexPoint::from_complex(z)?)?.ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentShape {
    Straight {
        start: ComplexPoint,
        end: ComplexPoint,
    },
    /// sigma(t) = 1 - slope * t^{2/5} log t for t in [t_lo, t_hi]
    LeftCurve { t_lo: f64, t_hi: f64, slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Straight,
    LeftCurve,
}

/// An oriented piece of a contour, parametrized by tau in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    pub shape: SegmentShape,
    pub orientation: Orientation,
}

impl PathSegment {
    pub fn straight(start: Complex64, end: Complex64) -> Result<Self> {
        let start = ComplexPoint::from_complex(start)?;
        let end = ComplexPoint::from_complex(end)?;
        if start == end {
            return Err(Error::Invalid(
                "straight segment needs distinct endpoints".into(),
            ));
        }
        Ok(Self {
            shape: SegmentShape::Straight { start, end },
            orientation: Orientation::Forward,
        })
    }

    pub fn left_curve(t_lo: f64, t_hi: f64, slope: f64, orientation: Orientation) -> Result<Self> {
        if !(t_lo < t_hi) || !(t_lo > 0.0) || !t_hi.is_finite() || !slope.is_finite() {
            return Err(Error::Invalid(format!(
                "left curve needs 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]"
            )));
        }
        Ok(Self {
            shape: SegmentShape::LeftCurve { t_lo, t_hi, slope },
            orientation,
        })
    }

    pub fn kind(&self) -> SegmentKind {
        match self.shape {
            SegmentShape::Straight { .. } => SegmentKind::Straight,
            SegmentShape::LeftCurve { .. } => SegmentKind::LeftCurve,
        }
    }

    pub fn reversed(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        };
        Self {
            shape: self.shape,
            orientation,
        }
    }

    fn shape_point(&self, u: f64) -> Complex64 {
        match self.shape {
            SegmentShape::Straight { start, end } => {
                let a = start.to_complex();
                a + (end.to_complex() - a) * u
            }
            SegmentShape::LeftCurve { t_lo, t_hi, slope } => {
                let t = t_lo + (t_hi - t_lo) * u;
                Complex64::new(left_boundary(slope, t), t)
            }
        }
    }

    /// Approximate arc length.
    pub fn length(&self) -> f64 {
        match self.shape {
            SegmentShape::Straight { start, end } => (end.to_complex() - start.to_complex()).norm(),
            SegmentShape::LeftCurve { .. } => (0..64)
                .map(|k| {
                    (self.shape_point((k + 1) as f64 / 64.0) - self.shape_point(k as f64 / 64.0))
                        .norm()
                })
                .sum(),
        }
    }
}

/// 1 - slope * t^{2/5} log t
pub fn left_boundary(slope: f64, t: f64) -> f64 {
    1.0 - slope * t.powf(0.4) * t.ln()
}

/// A parametrized path tau in [0, 1] -> C.
pub trait Parametrized: Sync {
    fn point(&self, tau: f64) -> Complex64;
    fn length(&self) -> f64;
}

impl Parametrized for PathSegment {
    fn point(&self, tau: f64) -> Complex64 {
        match self.orientation {
            Orientation::Forward => self.shape_point(tau),
            Orientation::Reverse => self.shape_point(1.0 - tau),
        }
    }

    fn length(&self) -> f64 {
        PathSegment::length(self)
    }
}

/// Positively oriented circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub centre: Complex64,
    pub radius: f64,
}

impl Parametrized for Circle {
    fn point(&self, tau: f64) -> Complex64 {
        self.centre + Complex64::from_polar(self.radius, TAU * tau)
    }

    fn length(&self) -> f64 {
        TAU * self.radius
    }
}

/// Ordered list of segments, closed when each end meets the next start.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    pub segments: Vec<PathSegment>,
    pub closed: bool,
}

impl ContourSpec {
    pub fn new(segments: Vec<PathSegment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Invalid("contour without segments".into()));
        }
        let c = Self { segments, closed };
        if closed {
            let n = c.segments.len();
            for k in 0..n {
                let end = c.segments[k].point(1.0);
                let next = c.segments[(k + 1) % n].point(0.0);
                if (end - next).norm() > 1e-12 * end.norm().max(1.0) {
                    return Err(Error::Invalid(format!(
                        "contour is not closed between segments {k} and {}",
                        (k + 1) % n
                    )));
                }
            }
        }
        Ok(c)
    }

    /// Counter-clockwise boundary of [sigma_lo, sigma_hi] x [t_lo, t_hi]:
    /// bottom, right, top, left.
    pub fn rectangle(rect: Rect) -> Result<Self> {
        rect.validate()?;
        let Rect {
            sigma_lo,
            sigma_hi,
            t_lo,
            t_hi,
        } = rect;
        let c = |a: f64, b: f64| Complex64::new(a, b);
        Self::new(
            vec![
                PathSegment::straight(c(sigma_lo, t_lo), c(sigma_hi, t_lo))?,
                PathSegment::straight(c(sigma_hi, t_lo), c(sigma_hi, t_hi))?,
                PathSegment::straight(c(sigma_hi, t_hi), c(sigma_lo, t_hi))?,
                PathSegment::straight(c(sigma_lo, t_hi), c(sigma_lo, t_lo))?,
            ],
            true,
        )
    }

    /// The boundary L1 + L2 + L3 + L4 of
    /// `{t0 <= t <= T, 1 - slope t^{2/5} log t <= sigma <= 2}`.
    pub fn curved_region(t0: f64, big_t: f64, slope: f64) -> Result<Self> {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        Self::new(
            vec![
                PathSegment::straight(c(left_boundary(slope, t0), t0), c(2.0, t0))?,
                PathSegment::straight(c(2.0, t0), c(2.0, big_t))?,
                PathSegment::straight(c(2.0, big_t), c(left_boundary(slope, big_t), big_t))?,
                PathSegment::left_curve(t0, big_t, slope, Orientation::Reverse)?,
            ],
            true,
        )
    }
}

/// Axis-parallel rectangle [sigma_lo, sigma_hi] x [t_lo, t_hi].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rect {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        let r = Self {
            sigma_lo,
            sigma_hi,
            t_lo,
            t_hi,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.sigma_lo, self.sigma_hi, self.t_lo, self.t_hi];
        if all.iter().any(|v| !v.is_finite())
            || !(self.sigma_lo < self.sigma_hi)
            || !(self.t_lo < self.t_hi)
        {
            return Err(Error::Invalid(format!("degenerate rectangle {self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.sigma_hi - self.sigma_lo
    }

    pub fn height(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn centre(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.sigma_lo + self.sigma_hi),
            0.5 * (self.t_lo + self.t_hi),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.sigma_lo && z.re <= self.sigma_hi && z.im >= self.t_lo && z.im <= self.t_hi
    }
}

/// Samples of the unwrapped argument along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgTrace {
    pub nodes: Vec<ComplexPoint>,
    pub phases: Vec<f64>,
    pub total_variation: f64,
    pub max_step_phase: f64,
    /// log |f| at the nodes
    pub log_moduli: Vec<f64>,
}

/// Tuning of the adaptive argument tracker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgOptions {
    /// A node is flagged as a zero on the path when |f| there falls below
    /// `tol` times the larger modulus at the ends of its parent interval.
    pub tol: f64,
    /// Initial intervals per unit of path length.
    pub per_unit: f64,
    pub min_intervals: usize,
    pub max_depth: u32,
}

impl Default for ArgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            per_unit: 4.0,
            min_intervals: 8,
            max_depth: 24,
        }
    }
}

impl ArgOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Phase steps must stay strictly below this.
pub const PHASE_STEP: f64 = FRAC_PI_2;

#[inline]
fn wrap(x: f64) -> f64 {
    let y = x - TAU * (x / TAU).round();
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

struct Tracker<'a, F: Holomorphic + ?Sized, P: Parametrized + ?Sized> {
    f: &'a F,
    path: &'a P,
    opts: ArgOptions,
    taus: Vec<f64>,
    logs: Vec<Complex64>,
}

impl<F: Holomorphic + ?Sized, P: Parametrized + ?Sized> Tracker<'_, F, P> {
    fn eval(&self, tau: f64) -> Result<Complex64> {
        let z = self.path.point(tau);
        let l = self.f.log_eval(z)?;
        if !l.re.is_finite() || !l.im.is_finite() {
            return Err(Error::ZeroOnPath(z));
        }
        Ok(l)
    }

    /// Refines [a, b] until every final interval and its parent have phase
    /// steps below [`PHASE_STEP`]; pushes the nodes after `a`.
    fn refine(
        &mut self,
        a: (f64, Complex64),
        b: (f64, Complex64),
        depth: u32,
        parent_ok: bool,
    ) -> Result<()> {
        let step = wrap(b.1.im - a.1.im);
        if step.abs() < PHASE_STEP && parent_ok {
            self.taus.push(b.0);
            self.logs.push(b.1);
            return Ok(());
        }
        if depth >= self.opts.max_depth {
            return Err(Error::ZeroOnPath(self.path.point(0.5 * (a.0 + b.0))));
        }
        let mid_tau = 0.5 * (a.0 + b.0);
        let mid = (mid_tau, self.eval(mid_tau)?);
        if mid.1.re < self.opts.tol.ln() + a.1.re.max(b.1.re) {
            return Err(Error::ZeroOnPath(self.path.point(mid_tau)));
        }
        let ok = step.abs() < PHASE_STEP;
        self.refine(a, mid, depth + 1, ok)?;
        self.refine(mid, b, depth + 1, ok)
    }
}

/// Unwrapped argument of `f` along `path`.
///
/// The path is sampled on an initial grid (`per_unit` intervals per unit
/// length) and intervals are bisected until each consecutive phase step, and
/// the step of the interval it was split from, are below π/2. Fails with
/// [`Error::ZeroOnPath`] when a sample is tiny relative to its neighbours or
/// the bisection depth is exhausted.
pub fn arg_variation_with<F, P>(f: &F, path: &P, opts: ArgOptions) -> Result<ArgTrace>
where
    F: Holomorphic + ?Sized,
    P: Parametrized + ?Sized,
{
    let n0 = ((path.length() * opts.per_unit).ceil() as usize).max(opts.min_intervals);
    let mut tr = Tracker {
        f,
        path,
        opts,
        taus: Vec::with_capacity(4 * n0),
        logs: Vec::with_capacity(4 * n0),
    };
    let first = tr.eval(0.0)?;
    tr.taus.push(0.0);
    tr.logs.push(first);
    let mut prev = (0.0, first);
    for k in 1..=n0 {
        let tau = k as f64 / n0 as f64;
        let next = (tau, tr.eval(tau)?);
        tr.refine(prev, next, 0, false)?;
        prev = next;
    }

    let mut phases = Vec::with_capacity(tr.logs.len());
    let mut phase = tr.logs[0].im;
    phases.push(phase);
    let mut max_step: f64 = 0.0;
    for w in tr.logs.windows(2) {
        let d = wrap(w[1].im - w[0].im);
        max_step = max_step.max(d.abs());
        phase += d;
        phases.push(phase);
    }
    let nodes = tr
        .taus
        .iter()
        .map(|&tau| {
            let z = path.point(tau);
            ComplexPoint {
                sigma: z.re,
                t: z.im,
            }
        })
        .collect();
    Ok(ArgTrace {
        nodes,
        total_variation: phases[phases.len() - 1] - phases[0],
        phases,
        max_step_phase: max_step,
        log_moduli: tr.logs.iter().map(|l| l.re).collect(),
    })
}

pub fn arg_variation<F, P>(f: &F, path: &P, tol: f64) -> Result<ArgTrace>
where
    F: Holomorphic + ?Sized,
    P: Parametrized + ?Sized,
{
    arg_variation_with(f, path, ArgOptions::with_tol(tol))
}

/// Winding number together with its unrounded value and per-segment traces.
#[derive(Debug, Clone, PartialEq)]
pub struct Winding {
    pub winding: i64,
    pub raw: f64,
    pub traces: Vec<ArgTrace>,
}

/// Deviation from an integer above which a winding value is rejected.
pub const INTEGRALITY_GUARD: f64 = 0.1;

pub fn winding_detail<F: Holomorphic + ?Sized>(
    f: &F,
    contour: &ContourSpec,
    opts: ArgOptions,
) -> Result<Winding> {
    if !contour.closed {
        return Err(Error::Invalid(
            "winding number needs a closed contour".into(),
        ));
    }
    let traces = contour
        .segments
        .par_iter()
        .map(|seg| arg_variation_with(f, seg, opts))
        .collect::<Result<Vec<_>>>()?;
    let raw = traces.iter().map(|t| t.total_variation).sum::<f64>() / TAU;
    let winding = raw.round();
    if (raw - winding).abs() > INTEGRALITY_GUARD {
        return Err(Error::NonInteger(raw));
    }
    Ok(Winding {
        winding: winding as i64,
        raw,
        traces,
    })
}

/// Number of zeros of `f` inside a closed contour (with multiplicity).
pub fn winding_number<F: Holomorphic + ?Sized>(
    f: &F,
    contour: &ContourSpec,
    tol: f64,
) -> Result<i64> {
    Ok(winding_detail(f, contour, ArgOptions::with_tol(tol))?.winding)
}

/// Winding around a circle.
pub fn circle_winding<F: Holomorphic + ?Sized>(
    f: &F,
    circle: &Circle,
    opts: ArgOptions,
) -> Result<(i64, f64)> {
    let trace = arg_variation_with(f, circle, opts)?;
    let raw = trace.total_variation / TAU;
    let w = raw.round();
    if (raw - w).abs() > INTEGRALITY_GUARD {
        return Err(Error::NonInteger(raw));
    }
    Ok((w as i64, raw))
}

/// Inputs of the Backlund bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacklundInput {
    /// M, an upper bound of |f| on the disc
    pub big_m: f64,
    /// |f(a)| at the centre
    pub f_at_center: f64,
    /// R, the disc radius
    pub radius: f64,
    /// max |z - a| over the segment
    pub reach: f64,
}

/// Upper bound `log(M/|f(a)|) / (2 log(R/reach))` for
/// |Re (1/2πi) ∫ f'/f| along a segment on a line through the disc centre.
pub fn backlund_bound(inp: &BacklundInput) -> Result<f64> {
    let BacklundInput {
        big_m,
        f_at_center,
        radius,
        reach,
    } = *inp;
    if !(f_at_center > 0.0) {
        return Err(Error::Domain(format!(
            "|f(a)| must be positive, got {f_at_center}"
        )));
    }
    if !(reach > 0.0) || !(reach < radius) {
        return Err(Error::Domain(format!(
            "need 0 < reach < radius, got {reach} and {radius}"
        )));
    }
    if !(f_at_center <= big_m) {
        return Err(Error::Domain(format!(
            "|f(a)| = {f_at_center} exceeds M = {big_m}"
        )));
    }
    Ok(0.5 * (big_m / f_at_center).ln() / (radius / reach).ln())
}

/// [`backlund_bound`] with `log(M/|f(a)|)` given directly, for moduli that
/// overflow binary64.
pub fn backlund_bound_log(log_ratio: f64, radius: f64, reach: f64) -> Result<f64> {
    if !(log_ratio >= 0.0) || !log_ratio.is_finite() {
        return Err(Error::Domain(format!(
            "log(M/|f(a)|) must be finite and >= 0, got {log_ratio}"
        )));
    }
    if !(reach > 0.0) || !(reach < radius) {
        return Err(Error::Domain(format!(
            "need 0 < reach < radius, got {reach} and {radius}"
        )));
    }
    Ok(0.5 * log_ratio / (radius / reach).ln())
}

/// Top edge `[box_left + iT, 2 + iT]` of the counting box against the
/// Backlund bound on the disc centred at `2 + iT` of radius
/// `2 + 2 T^{2/5} log T`, with |R(2 + iT)| >= 1/4. The realized value is the
/// arg variation of R along the edge; the bound is 2π times [`backlund_bound_log`].
pub fn top_edge_certificate(big_t: f64, box_left: f64) -> Result<Certificate> {
    let radius = 2.0 + 2.0 * big_t.powf(0.4) * big_t.ln();
    let centre = Complex64::new(2.0, big_t);
    let log_m = disc_log_modulus_bound(centre, radius)?;
    let bound = TAU * backlund_bound_log(log_m - 0.25f64.ln(), radius, 2.0 - box_left)?;
    let seg = PathSegment::straight(Complex64::new(box_left, big_t), centre)?;
    let realized = arg_variation_with(&AuxiliaryR, &seg, ArgOptions::default())?.total_variation;
    Ok(Certificate {
        segment: "top_edge".into(),
        bound,
        realized,
        holds: realized.abs() <= bound,
    })
}

/// One random instance of the Backlund inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct BacklundTrial {
    pub roots: Vec<Complex64>,
    pub centre: Complex64,
    pub end: Complex64,
    pub radius: f64,
    /// |Re (1/2πi) ∫ f'/f| along [centre, end]
    pub realized: f64,
    pub bound: f64,
}

impl BacklundTrial {
    pub fn holds(&self) -> bool {
        self.realized <= self.bound
    }
}

fn distance_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let tau = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (z - (a + tau * d)).norm()
}

/// Draws a monic polynomial of degree 1..=`max_degree` with roots in the
/// disc of radius `2R` around a random centre, none within `clearance` of
/// the test segment, and measures both sides of the Backlund inequality.
/// M is the maximum of |f| over 4096 points of the circle, times 1.01.
pub fn backlund_trial<G: rand::Rng>(
    rng: &mut G,
    max_degree: usize,
    clearance: f64,
) -> Result<BacklundTrial> {
    let centre = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let radius: f64 = rng.gen_range(0.5..3.0);
    let reach = radius * rng.gen_range(0.05..0.95);
    let end = centre + Complex64::from_polar(reach, rng.gen_range(0.0..TAU));
    let degree = rng.gen_range(1..=max_degree);
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let z = centre
            + Complex64::from_polar(
                2.0 * radius * rng.gen::<f64>().sqrt(),
                rng.gen_range(0.0..TAU),
            );
        if distance_to_segment(z, centre, end) >= clearance {
            roots.push(z);
        }
    }
    let eval = |z: Complex64| roots.iter().map(|r| z - r).product::<Complex64>();
    let big_m = (0..4096)
        .map(|k| eval(centre + Complex64::from_polar(radius, TAU * k as f64 / 4096.0)).norm())
        .fold(0.0, f64::max)
        * 1.01;
    let f = Plain(eval);
    let seg = PathSegment::straight(centre, end)?;
    let variation = arg_variation_with(&f, &seg, ArgOptions::default())?.total_variation;
    let bound = backlund_bound(&BacklundInput {
        big_m,
        f_at_center: eval(centre).norm(),
        radius,
        reach,
    })?;
    Ok(BacklundTrial {
        roots,
        centre,
        end,
        radius,
        realized: variation.abs() / TAU,
        bound,
    })
}

/// Upper bound for |R(sigma + it)| valid for t > 16π.
pub fn modulus_bound(sigma: f64, t: f64) -> Result<f64> {
    Ok(log_modulus_bound(sigma, t)?.exp())
}

/// Logarithm of [`modulus_bound`]; finite even where the bound overflows.
pub fn log_modulus_bound(sigma: f64, t: f64) -> Result<f64> {
    if !(t > 16.0 * PI) || !sigma.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!(
            "modulus bound needs t > 16 pi, got {t}"
        )));
    }
    if sigma > 0.0 {
        Ok(0.5 * (t / TAU).ln())
    } else {
        let one = 1.0 - sigma;
        Ok((19.0 * t).ln() - one * TAU.ln() + (0.25 - 0.5 * sigma) * (one * one + t * t).ln())
    }
}

/// log M for the disc |s - centre| <= radius, maximizing the modulus bound
/// over a polar grid of the disc.
pub fn disc_log_modulus_bound(centre: Complex64, radius: f64) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    const RINGS: usize = 64;
    const SPOKES: usize = 256;
    for i in 0..=RINGS {
        let r = radius * i as f64 / RINGS as f64;
        for j in 0..SPOKES {
            let z = centre + Complex64::from_polar(r, TAU * j as f64 / SPOKES as f64);
            best = best.max(log_modulus_bound(z.re, z.im)?);
        }
    }
    Ok(best)
}

/// Smooth part T/4π log(T/2π) - T/4π and the square-root term ½√(T/2π).
pub fn main_term(big_t: f64) -> Result<(f64, f64)> {
    if !(big_t > 0.0) || !big_t.is_finite() {
        return Err(Error::Domain(format!("main term needs T > 0, got {big_t}")));
    }
    let x = big_t / TAU;
    Ok((0.5 * x * x.ln() - 0.5 * x, 0.5 * x.sqrt()))
}

/// main_value = smooth - sqrt_term
pub fn main_value(big_t: f64) -> Result<f64> {
    let (smooth, sq) = main_term(big_t)?;
    Ok(smooth - sq)
}

/// Evidence attached to a count.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Certificate {
    pub segment: String,
    /// bound on the argument variation (radians), or the expected winding
    pub bound: f64,
    /// realized value
    pub realized: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CountResult {
    pub big_t: f64,
    /// left edge of the counting box actually used
    pub box_left: f64,
    pub count: i64,
    pub main_value: f64,
    pub sqrt_term: f64,
    pub residual: f64,
    pub certificates: Vec<Certificate>,
}

impl CountResult {
    /// T/4π log(T/2π) - T/4π
    pub fn smooth_part(&self) -> f64 {
        self.main_value + self.sqrt_term
    }

    /// count - smooth_part
    pub fn r_smooth(&self) -> f64 {
        self.count as f64 - self.smooth_part()
    }

    /// r(T) + ½√(T/2π), i.e. count - main_value; small when the
    /// square-root correction is the right one.
    pub fn r_with_sqrt_added(&self) -> f64 {
        self.r_smooth() + self.sqrt_term
    }
}

/// Configuration of the desk-scale counting rectangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountConfig {
    pub box_left: f64,
    pub box_right: f64,
    /// Perturbation unit for horizontal edges that meet a zero.
    pub tol: f64,
    /// Zeros below the starting height, added to every count.
    pub base_count: i64,
    /// Width of the strip left of the box that must be zero-free; 0 disables.
    pub strip_width: f64,
    /// Move `box_left` left by `strip_width` while the strip holds zeros.
    pub auto_extend: bool,
    pub arg: ArgOptions,
}

impl Default for CountConfig {
    fn default() -> Self {
        Self {
            box_left: DEFAULT_BOX_LEFT,
            box_right: 2.0,
            tol: 1e-3,
            base_count: 0,
            strip_width: 20.0,
            auto_extend: false,
            arg: ArgOptions::default(),
        }
    }
}

pub const DEFAULT_BOX_LEFT: f64 = -6.0;
/// Desk-scale starting height.
pub const DESK_T0: f64 = 10.0;
const MAX_PERTURBATIONS: usize = 5;
const MAX_EXTENSIONS: usize = 10;

/// Arg variation along a horizontal line at height t, moving t by multiples
/// of `tol` (+1, -1, +2, -2, ...) while it meets a zero.
fn horizontal<F: Holomorphic + ?Sized>(
    f: &F,
    sigma_from: f64,
    sigma_to: f64,
    t: f64,
    cfg: &CountConfig,
    movable: bool,
) -> Result<(f64, ArgTrace)> {
    let attempts = if movable { MAX_PERTURBATIONS + 1 } else { 1 };
    for k in 0..attempts {
        let m = k.div_ceil(2) as f64 * if k % 2 == 1 { 1.0 } else { -1.0 };
        let tt = t + m * cfg.tol;
        let seg =
            PathSegment::straight(Complex64::new(sigma_from, tt), Complex64::new(sigma_to, tt))?;
        match arg_variation_with(f, &seg, cfg.arg) {
            Ok(trace) => return Ok((tt, trace)),
            Err(Error::ZeroOnPath(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PersistentContourZero(t))
}

fn vertical<F: Holomorphic + ?Sized>(
    f: &F,
    sigma: f64,
    t_from: f64,
    t_to: f64,
    cfg: &CountConfig,
) -> Result<ArgTrace> {
    let seg = PathSegment::straight(Complex64::new(sigma, t_from), Complex64::new(sigma, t_to))?;
    arg_variation_with(f, &seg, cfg.arg).map_err(|e| match e {
        Error::ZeroOnPath(z) => Error::PersistentContourZero(z.im),
        e => e,
    })
}

fn to_winding(raw: f64) -> Result<i64> {
    let w = raw.round();
    if (raw - w).abs() > INTEGRALITY_GUARD {
        return Err(Error::NonInteger(raw));
    }
    Ok(w as i64)
}

/// Layered counts: the winding of `f` around the stacked rectangles
/// `[box_left, box_right] x [t_{k-1}, t_k]` with `t_0 = t_lo`, accumulated.
/// Shared horizontal edges are traced once. Each returned count is
/// `base_count` plus the number of zeros with `t_lo < gamma <= t_k`.
///
/// With `auto_extend`, a non-empty strip left of the box moves the box edge
/// left by one strip width and the whole stack is traced again.
pub fn count_layers<F: Holomorphic + ?Sized>(
    f: &F,
    t_lo: f64,
    ts: &[f64],
    cfg: &CountConfig,
) -> Result<Vec<CountResult>> {
    let mut cur = *cfg;
    for _ in 0..=MAX_EXTENSIONS {
        let out = count_layers_fixed(f, t_lo, ts, &cur)?;
        let strip_ok = out
            .iter()
            .flat_map(|r| r.certificates.iter())
            .filter(|c| c.segment == "left_strip")
            .all(|c| c.holds);
        if strip_ok || !cur.auto_extend || cur.strip_width <= 0.0 {
            return Ok(out);
        }
        cur.box_left -= cur.strip_width;
    }
    Err(Error::Invalid(format!(
        "left strip still holds zeros with box_left = {}",
        cur.box_left
    )))
}

fn count_layers_fixed<F: Holomorphic + ?Sized>(
    f: &F,
    t_lo: f64,
    ts: &[f64],
    cfg: &CountConfig,
) -> Result<Vec<CountResult>> {
    if !(cfg.box_left < cfg.box_right) {
        return Err(Error::Invalid("box_left must be left of box_right".into()));
    }
    if ts.windows(2).any(|w| !(w[0] < w[1])) || ts.first().is_some_and(|&t| t < t_lo) {
        return Err(Error::Invalid(
            "heights must be increasing and not below t_lo".into(),
        ));
    }
    let heights: Vec<f64> = ts.iter().copied().filter(|&t| t > t_lo).collect();
    let mut out = Vec::with_capacity(ts.len());
    // heights equal to t_lo count nothing
    for &t in ts.iter().filter(|&&t| t == t_lo) {
        out.push(empty_result(t, cfg)?);
    }
    if heights.is_empty() {
        return Ok(out);
    }
    let (left, right) = (cfg.box_left, cfg.box_right);
    let strip_left = left - cfg.strip_width;

    // Horizontal edges (box and strip) at every height, traced left to right.
    let mut levels = vec![t_lo];
    levels.extend(heights.iter().copied());
    let movable: Vec<bool> = (0..levels.len()).map(|k| k > 0).collect();
    let edges = levels
        .par_iter()
        .zip(movable.par_iter())
        .map(|(&t, &mv)| -> Result<(f64, ArgTrace, Option<ArgTrace>)> {
            let (tt, trace) = horizontal(f, left, right, t, cfg, mv)?;
            let strip = if cfg.strip_width > 0.0 {
                let seg = PathSegment::straight(
                    Complex64::new(strip_left, tt),
                    Complex64::new(left, tt),
                )?;
                Some(arg_variation_with(f, &seg, cfg.arg).map_err(|e| match e {
                    Error::ZeroOnPath(_) => Error::PersistentContourZero(tt),
                    e => e,
                })?)
            } else {
                None
            };
            Ok((tt, trace, strip))
        })
        .collect::<Result<Vec<_>>>()?;

    // Vertical pieces between consecutive (possibly perturbed) heights.
    let pieces = edges
        .par_windows(2)
        .map(|w| -> Result<(f64, f64, Option<f64>)> {
            let (a, b) = (w[0].0, w[1].0);
            let r = vertical(f, right, a, b, cfg)?.total_variation;
            let l = vertical(f, left, a, b, cfg)?.total_variation;
            let s = if cfg.strip_width > 0.0 {
                Some(vertical(f, strip_left, a, b, cfg)?.total_variation)
            } else {
                None
            };
            Ok((r, l, s))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut right_cum = 0.0;
    let mut left_cum = 0.0;
    let mut strip_cum = 0.0;
    let bottom = edges[0].1.total_variation;
    let strip_bottom = edges[0].2.as_ref().map(|t| t.total_variation);
    for (k, piece) in pieces.iter().enumerate() {
        right_cum += piece.0;
        left_cum += piece.1;
        if let Some(s) = piece.2 {
            strip_cum += s;
        }
        let (tt, top, strip_top) = &edges[k + 1];
        // counter-clockwise: bottom (left->right), right (up), top (right->left), left (down)
        let raw = (bottom + right_cum - top.total_variation - left_cum) / TAU;
        let zeros = to_winding(raw)?;
        let mut certificates = vec![Certificate {
            segment: "box".into(),
            bound: zeros as f64,
            realized: raw,
            holds: (raw - zeros as f64).abs() < INTEGRALITY_GUARD,
        }];
        if let (Some(sb), Some(st)) = (strip_bottom, strip_top.as_ref()) {
            // strip [strip_left, left]: bottom, box left edge upward, top, strip left edge down
            let raw_strip = (sb + left_cum - st.total_variation - strip_cum) / TAU;
            certificates.push(Certificate {
                segment: "left_strip".into(),
                bound: 0.0,
                realized: raw_strip,
                holds: raw_strip.abs() < INTEGRALITY_GUARD,
            });
        }
        certificates.push(Certificate {
            segment: "right_edge".into(),
            bound: PI,
            realized: right_cum,
            holds: right_cum.abs() <= PI,
        });
        let (_, sq) = main_term(*tt)?;
        let mv = main_value(*tt)?;
        let count = cfg.base_count + zeros;
        out.push(CountResult {
            big_t: *tt,
            box_left: left,
            count,
            main_value: mv,
            sqrt_term: sq,
            residual: count as f64 - mv,
            certificates,
        });
    }
    Ok(out)
}

fn empty_result(t: f64, cfg: &CountConfig) -> Result<CountResult> {
    let (_, sq) = main_term(t)?;
    let mv = main_value(t)?;
    Ok(CountResult {
        big_t: t,
        box_left: cfg.box_left,
        count: cfg.base_count,
        main_value: mv,
        sqrt_term: sq,
        residual: cfg.base_count as f64 - mv,
        certificates: Vec::new(),
    })
}

/// Zeros of R(s) in [box_left, 2] x (t_lo, t_hi], plus the configured base count.
/// The box edge moves left while the certifying strip holds zeros, see
/// [`CountResult::box_left`].
pub fn count_zeros(t_lo: f64, t_hi: f64, box_left: f64, tol: f64) -> Result<CountResult> {
    if !(t_lo >= DESK_T0) {
        return Err(Error::Invalid(format!(
            "count_zeros starts at t >= {DESK_T0}, got {t_lo}"
        )));
    }
    if !(box_left <= -2.0) {
        return Err(Error::Invalid(format!(
            "box_left must be <= -2, got {box_left}"
        )));
    }
    let cfg = CountConfig {
        box_left,
        tol,
        auto_extend: true,
        ..CountConfig::default()
    };
    count_zeros_with(&AuxiliaryR, t_lo, t_hi, &cfg)
}

pub fn count_zeros_with<F: Holomorphic + ?Sized>(
    f: &F,
    t_lo: f64,
    t_hi: f64,
    cfg: &CountConfig,
) -> Result<CountResult> {
    if !(t_hi >= t_lo) {
        return Err(Error::Invalid(format!(
            "need t_hi >= t_lo, got [{t_lo}, {t_hi}]"
        )));
    }
    let mut v = count_layers(f, t_lo, &[t_hi], cfg)?;
    Ok(v.remove(0))
}

/// Counts of zeros with `0 < gamma <= T` for each `T` in `ts` (increasing,
/// all at least the desk height 10). Zeros below height 10 are counted once
/// on `[box_left, 2] x [eps, 10]`.
pub fn residual_table(ts: &[f64], box_left: f64) -> Result<Vec<CountResult>> {
    if ts.iter().any(|&t| !(t >= DESK_T0)) {
        return Err(Error::Invalid(format!(
            "table heights must be >= {DESK_T0}"
        )));
    }
    let base = Rect::new(box_left, 2.0, BASE_EPS, DESK_T0)?;
    let base_count = winding_detail(
        &AuxiliaryR,
        &ContourSpec::rectangle(base)?,
        ArgOptions::default(),
    )?
    .winding;
    let cfg = CountConfig {
        box_left,
        base_count,
        auto_extend: true,
        ..CountConfig::default()
    };
    count_layers(&AuxiliaryR, DESK_T0, ts, &cfg)
}

/// Lower edge of the base rectangle, kept off the real axis.
const BASE_EPS: f64 = 1e-2;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arg_of_identity_on_quarter_turn() {
        let f = Plain(|z: Complex64| z);
        let seg = PathSegment::straight(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let tr = arg_variation(&f, &seg, 1e-10).unwrap();
        assert!((tr.total_variation - FRAC_PI_2).abs() < 1e-14);
        assert!(tr
            .phases
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() < PHASE_STEP));
        let first = tr.phases[0];
        let last = *tr.phases.last().unwrap();
        assert_eq!(tr.total_variation, last - first);
    }

    #[test]
    fn arg_of_exponential_is_height() {
        let f = Plain(|z: Complex64| z.exp());
        for h in [0.3, 7.0, 40.0] {
            let seg = PathSegment::straight(c(-1.0, 2.0), c(-1.0, 2.0 + h)).unwrap();
            let tr = arg_variation(&f, &seg, 1e-10).unwrap();
            assert!((tr.total_variation - h).abs() < 1e-12);
            // reversed segment runs the other way
            let back = arg_variation(&f, &seg.reversed(), 1e-10).unwrap();
            assert!((back.total_variation + h).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_on_path_detected() {
        let f = Plain(|z: Complex64| z - c(0.5, 0.0));
        let seg = PathSegment::straight(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            arg_variation(&f, &seg, 1e-10),
            Err(Error::ZeroOnPath(_))
        ));
    }

    #[test]
    fn polynomial_windings() {
        let rect = ContourSpec::rectangle(Rect::new(0.0, 2.0, 9.0, 11.0).unwrap()).unwrap();
        let z1 = c(1.0, 10.0);
        let f = Plain(move |z: Complex64| z - z1);
        assert_eq!(winding_number(&f, &rect, 1e-10).unwrap(), 1);
        let z2 = c(1.2, 10.5);
        let g = Plain(move |z: Complex64| (z - z1) * (z - z1) * (z - z2));
        let w = winding_detail(&g, &rect, ArgOptions::default()).unwrap();
        assert_eq!(w.winding, 3);
        assert!((w.raw - 3.0).abs() < 0.02);
    }

    #[test]
    fn winding_additive_over_bisection() {
        let roots = [c(0.3, 0.4), c(-0.5, 1.7), c(0.9, 1.1)];
        let f = Plain(move |z: Complex64| roots.iter().map(|r| z - r).product());
        let w = |r: Rect| winding_number(&f, &ContourSpec::rectangle(r).unwrap(), 1e-10).unwrap();
        let whole = Rect::new(-1.0, 1.5, 0.0, 2.0).unwrap();
        assert_eq!(w(whole), 3);
        let lower = Rect {
            t_hi: 1.25,
            ..whole
        };
        let upper = Rect {
            t_lo: 1.25,
            ..whole
        };
        assert_eq!(w(lower) + w(upper), 3);
        assert_eq!(w(lower), 2);
    }

    #[test]
    fn circle_winding_counts_inside_roots() {
        let f = Plain(|z: Complex64| z * z - c(2.0, 2.0));
        let (w, raw) = circle_winding(
            &f,
            &Circle {
                centre: c(0.0, 0.0),
                radius: 3.0,
            },
            ArgOptions::default(),
        )
        .unwrap();
        assert_eq!(w, 2);
        assert!((raw - 2.0).abs() < 1e-10);
    }

    #[test]
    fn closure_is_checked() {
        let a = PathSegment::straight(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let b = PathSegment::straight(c(1.0, 0.0), c(1.0, 1.0)).unwrap();
        assert!(ContourSpec::new(vec![a, b], true).is_err());
        assert!(ContourSpec::new(vec![a, b], false).is_ok());
        assert!(PathSegment::straight(c(1.0, 1.0), c(1.0, 1.0)).is_err());
        assert!(PathSegment::left_curve(20.0, 10.0, 1.0, Orientation::Forward).is_err());
        assert!(ContourSpec::curved_region(50.0, 100.0, 1.0).unwrap().closed);
    }

    #[test]
    fn backlund_values() {
        let b = |m: f64, fa: f64, r: f64, d: f64| {
            backlund_bound(&BacklundInput {
                big_m: m,
                f_at_center: fa,
                radius: r,
                reach: d,
            })
        };
        assert_eq!(b(3.0, 3.0, 2.0, 1.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((b(e * e, 1.0, e, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // 0.5 log 400 / log 2, 30-digit reference
        assert!((b(100.0, 0.25, 2.0, 1.0).unwrap() - 4.321_928_094_887_362).abs() < 1e-14);
        assert!(b(3.0, 1.0, 1.0, 1.0).is_err());
        assert!(b(3.0, 0.0, 2.0, 1.0).is_err());
        assert!(b(1.0, 3.0, 2.0, 1.0).is_err());
        assert!(
            (backlund_bound_log(400f64.ln(), 2.0, 1.0).unwrap() - 4.321_928_094_887_362).abs()
                < 1e-14
        );
    }

    #[test]
    fn modulus_bound_values() {
        // references from 30-digit arithmetic
        assert!((modulus_bound(1.0, 100.0).unwrap() - 3.989_422_804_014_327).abs() < 1e-14);
        assert!((modulus_bound(0.0, 100.0).unwrap() - 3_024.019_514_509_198).abs() < 1e-9);
        assert!(matches!(
            modulus_bound(0.5, 16.0 * PI),
            Err(Error::Domain(_))
        ));
        assert!(log_modulus_bound(-500.0, 1000.0).unwrap().is_finite());
    }

    #[test]
    fn main_term_values() {
        let (sm, sq) = main_term(TAU).unwrap();
        assert!((sm + 0.5).abs() < 1e-15 && (sq - 0.5).abs() < 1e-15);
        assert!((main_value(TAU).unwrap() + 1.0).abs() < 1e-15);
        let e = std::f64::consts::E;
        let (sm, sq) = main_term(TAU * e * e).unwrap();
        assert!((sm - e * e / 2.0).abs() < 1e-14 && (sq - e / 2.0).abs() < 1e-15);
        assert!((main_value(TAU * e * e).unwrap() - 2.335_387_135_235_802_5).abs() < 1e-14);
        assert!((main_value(1000.0).unwrap() - 317.562_786_351_433_3).abs() < 1e-11);
        for k in 1..20 {
            let (_, sq) = main_term(TAU * (k * k) as f64).unwrap();
            assert_eq!(sq, k as f64 / 2.0);
        }
        assert!(main_term(0.0).is_err());
    }

    #[test]
    fn critical_edge_variation_within_pi() {
        // sigma = 2 from t0 to T
        let seg = PathSegment::straight(c(2.0, DESK_T0), c(2.0, 600.0)).unwrap();
        let tr = arg_variation_with(&AuxiliaryR, &seg, ArgOptions::default()).unwrap();
        assert!(tr.total_variation.abs() <= PI);
    }

    #[test]
    fn empty_strip_counts_nothing() {
        let r = count_zeros(DESK_T0, DESK_T0, -6.0, 1e-3).unwrap();
        assert_eq!(r.count, 0);
        assert!((r.residual - (r.count as f64 - r.main_value)).abs() < 1e-12);
    }

    #[test]
    fn counts_add_over_stacked_boxes() {
        let whole = count_zeros(10.0, 200.0, -6.0, 1e-3).unwrap();
        let lo = count_zeros(10.0, 100.0, -6.0, 1e-3).unwrap();
        let hi = count_zeros(100.0, 200.0, -6.0, 1e-3).unwrap();
        assert_eq!(whole.count, lo.count + hi.count);
        assert!(whole.certificates.iter().all(|c| c.holds));
        assert!((whole.residual - (whole.count as f64 - whole.main_value)).abs() < 1e-12);
    }

    #[test]
    fn count_preconditions() {
        assert!(count_zeros(5.0, 20.0, -6.0, 1e-3).is_err());
        assert!(count_zeros(10.0, 20.0, 0.0, 1e-3).is_err());
        assert!(count_zeros(30.0, 20.0, -6.0, 1e-3).is_err());
    }

    #[test]
    fn layered_counts_monotone() {
        let ts: Vec<f64> = (1..=8).map(|k| 25.0 * k as f64 + 10.0).collect();
        let cfg = CountConfig::default();
        let rows = count_layers(&AuxiliaryR, DESK_T0, &ts, &cfg).unwrap();
        assert!(rows.windows(2).all(|w| w[0].count <= w[1].count));
        let direct = count_zeros(DESK_T0, *ts.last().unwrap(), -6.0, 1e-3).unwrap();
        assert_eq!(rows.last().unwrap().count, direct.count);
    }

    #[test]
    fn top_edge_within_backlund() {
        for t in [200.0, 400.0] {
            let cert = top_edge_certificate(t, -6.0).unwrap();
            assert!(cert.holds, "{cert:?}");
        }
    }
}
