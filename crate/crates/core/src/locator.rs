//! Isolation of zeros by winding-driven subdivision, Newton refinement with
//! a circle certificate, and summary statistics of zero lists.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::auxiliary::{r_derivative, r_eval_scaled};
use crate::counting::{
    circle_winding, winding_detail, ArgOptions, AuxiliaryR, Circle, ContourSpec, Holomorphic, Rect,
};
use crate::error::{Error, Result};
use crate::special::ComplexPoint;

/// An isolated zero of R(s).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Zero {
    pub beta: f64,
    pub gamma: f64,
    pub enclosure_radius: f64,
    pub winding_certificate: i64,
    /// |R(rho)| divided by the magnitude scale of the quadrature at rho.
    pub residual_modulus: f64,
}

impl Zero {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }
}

pub const DEFAULT_MIN_SIZE: f64 = 1e-3;

/// A box below the minimum size together with its winding.
pub type Cluster = (Rect, i64);

/// Output of [`isolate_zeros`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Isolation {
    /// Rectangles with winding exactly one.
    pub isolated: Vec<Rect>,
    /// Rectangles below `min_size` still containing several zeros.
    pub clusters: Vec<Cluster>,
    /// Winding of the initial box.
    pub total: i64,
}

impl Isolation {
    pub fn accounted(&self) -> i64 {
        self.isolated.len() as i64 + self.clusters.iter().map(|c| c.1).sum::<i64>()
    }
}

fn rect_winding<F: Holomorphic + ?Sized>(f: &F, r: Rect, opts: ArgOptions) -> Result<i64> {
    Ok(winding_detail(f, &ContourSpec::rectangle(r)?, opts)?.winding)
}

// split positions tried when a cut meets a zero
const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.45, 0.55, 0.4, 0.6];

/// Halves the longer side (the t range on ties) and returns both children
/// with their windings, which must add up to the parent's.
fn split<F: Holomorphic + ?Sized>(
    f: &F,
    r: Rect,
    parent: i64,
    opts: ArgOptions,
) -> Result<Vec<(Rect, i64)>> {
    let mut last_err = None;
    for frac in SPLIT_FRACTIONS {
        let (a, b) = if r.width() > r.height() {
            let m = r.sigma_lo + frac * r.width();
            (Rect { sigma_hi: m, ..r }, Rect { sigma_lo: m, ..r })
        } else {
            let m = r.t_lo + frac * r.height();
            (Rect { t_hi: m, ..r }, Rect { t_lo: m, ..r })
        };
        let wa = rect_winding(f, a, opts);
        let wb = rect_winding(f, b, opts);
        match (wa, wb) {
            (Ok(wa), Ok(wb)) if wa + wb == parent && wa >= 0 && wb >= 0 => {
                return Ok(vec![(a, wa), (b, wb)]);
            }
            (Ok(wa), Ok(wb)) => {
                last_err = Some(Error::NonInteger((wa + wb) as f64 - parent as f64));
            }
            (Err(e @ Error::ZeroOnPath(_)), _) | (_, Err(e @ Error::ZeroOnPath(_))) => {
                last_err = Some(e)
            }
            (Err(e @ Error::NonInteger(_)), _) | (_, Err(e @ Error::NonInteger(_))) => {
                last_err = Some(e)
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::PersistentContourZero(r.t_lo)))
}

fn subdivide<F: Holomorphic + ?Sized>(
    f: &F,
    r: Rect,
    w: i64,
    min_size: f64,
    opts: ArgOptions,
) -> Result<(Vec<Rect>, Vec<Cluster>)> {
    if w == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if w == 1 {
        return Ok((vec![r], Vec::new()));
    }
    if r.width().max(r.height()) < min_size {
        return Ok((Vec::new(), vec![(r, w)]));
    }
    let children = split(f, r, w, opts)?;
    let parts = children
        .into_par_iter()
        .map(|(c, cw)| subdivide(f, c, cw, min_size, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut iso = Vec::new();
    let mut clusters = Vec::new();
    for (i, c) in parts {
        iso.extend(i);
        clusters.extend(c);
    }
    Ok((iso, clusters))
}

fn order_key(r: &Rect) -> (f64, f64) {
    let c = r.centre();
    (c.im, c.re)
}

/// Quad-tree isolation of the zeros of `f` in `bx`.
pub fn isolate_zeros_with<F: Holomorphic + ?Sized>(
    f: &F,
    bx: Rect,
    min_size: f64,
    opts: ArgOptions,
) -> Result<Isolation> {
    bx.validate()?;
    if !(min_size > 0.0) {
        return Err(Error::Invalid(format!(
            "min_size must be positive, got {min_size}"
        )));
    }
    let total = rect_winding(f, bx, opts).map_err(|e| match e {
        Error::ZeroOnPath(z) => Error::PersistentContourZero(z.im),
        e => e,
    })?;
    let (mut isolated, mut clusters) = subdivide(f, bx, total, min_size, opts)?;
    isolated.sort_by(|a, b| order_key(a).partial_cmp(&order_key(b)).unwrap());
    clusters.sort_by(|a, b| order_key(&a.0).partial_cmp(&order_key(&b.0)).unwrap());
    Ok(Isolation {
        isolated,
        clusters,
        total,
    })
}

/// Isolation for R(s).
pub fn isolate_zeros(bx: Rect, min_size: f64) -> Result<Isolation> {
    isolate_zeros_with(&AuxiliaryR, bx, min_size, ArgOptions::default())
}

/// Function, derivative and certification hooks used by [`refine_zero_with`].
pub trait Refinable: Holomorphic {
    fn value(&self, z: Complex64) -> Result<Complex64>;
    fn derivative(&self, z: Complex64) -> Result<Complex64>;
    /// Magnitude against which |f(rho)| is judged.
    fn scale(&self, z: Complex64) -> Result<f64>;
}

impl Refinable for AuxiliaryR {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(r_eval_scaled(ComplexPoint::from_complex(z)?)?.value())
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        r_derivative(ComplexPoint::from_complex(z)?)
    }

    fn scale(&self, z: Complex64) -> Result<f64> {
        let v = r_eval_scaled(ComplexPoint::from_complex(z)?)?;
        Ok(v.magnitude * v.log_scale.exp())
    }
}

/// A polynomial given by its coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<Complex64>);

impl Polynomial {
    pub fn from_roots(lead: Complex64, roots: &[Complex64]) -> Self {
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        Self(c)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| {
                acc * z + c * k as f64
            })
    }
}

impl Holomorphic for Polynomial {
    fn log_eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z).ln())
    }
}

impl Refinable for Polynomial {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z))
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_derivative(z))
    }

    fn scale(&self, z: Complex64) -> Result<f64> {
        let r = z.norm();
        Ok(self
            .0
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * r.powi(k as i32))
            .sum::<f64>()
            .max(f64::MIN_POSITIVE))
    }
}

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 50;
const MAX_FALLBACKS: usize = 40;

/// Newton iterates from a starting point; `Ok(None)` when an iterate leaves
/// `bound`. Returns the final point and the last step size together with the
/// history of step sizes.
fn newton<F: Refinable + ?Sized>(
    f: &F,
    start: Complex64,
    bound: &Rect,
) -> Result<Option<(Complex64, f64, Vec<f64>)>> {
    let mut z = start;
    let mut steps = Vec::new();
    for _ in 0..NEWTON_MAX_ITER {
        let v = f.value(z)?;
        let d = f.derivative(z)?;
        if d.norm() == 0.0 || !d.re.is_finite() {
            return Ok(None);
        }
        let step = v / d;
        z -= step;
        let size = step.norm();
        steps.push(size);
        if !bound.contains(z) {
            return Ok(None);
        }
        if size < NEWTON_TOL {
            return Ok(Some((z, size, steps)));
        }
    }
    Ok(None)
}

fn enlarge(r: &Rect, factor: f64) -> Rect {
    let c = r.centre();
    let hw = 0.5 * r.width() * factor;
    let hh = 0.5 * r.height() * factor;
    Rect {
        sigma_lo: c.re - hw,
        sigma_hi: c.re + hw,
        t_lo: c.im - hh,
        t_hi: c.im + hh,
    }
}

/// Diagnostics of a refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub zero: Zero,
    /// Newton step sizes of the successful run.
    pub steps: Vec<f64>,
    pub fallbacks: usize,
}

/// Newton refinement inside a winding-1 seed with circle certification.
///
/// Iterates start at the seed centre; if one leaves the seed enlarged two
/// times, the seed is bisected and the half with winding one is used
/// instead. The converged point is certified by a winding-1 circle of radius
/// `10 (last step + 1e-12)`.
pub fn refine_zero_with<F: Refinable + ?Sized>(
    f: &F,
    seed: Rect,
    opts: ArgOptions,
) -> Result<Refinement> {
    seed.validate()?;
    let mut cur = seed;
    let mut fallbacks = 0;
    loop {
        let bound = enlarge(&cur, 2.0);
        if let Some((z, last, steps)) = newton(f, cur.centre(), &bound)? {
            let radius = 10.0 * (last + 1e-12);
            let (w, _) = circle_winding(f, &Circle { centre: z, radius }, opts)?;
            if w == 1 {
                let residual = f.value(z)?.norm() / f.scale(z)?;
                return Ok(Refinement {
                    zero: Zero {
                        beta: z.re,
                        gamma: z.im,
                        enclosure_radius: radius,
                        winding_certificate: w,
                        residual_modulus: residual,
                    },
                    steps,
                    fallbacks,
                });
            }
        }
        fallbacks += 1;
        if fallbacks > MAX_FALLBACKS {
            return Err(Error::RefineFailed(seed.centre()));
        }
        let halves = split(f, cur, 1, opts)?;
        cur = halves
            .into_iter()
            .find(|h| h.1 == 1)
            .map(|h| h.0)
            .ok_or(Error::RefineFailed(seed.centre()))?;
    }
}

/// Refines a winding-1 rectangle of R(s) to a certified zero.
pub fn refine_zero(seed: Rect) -> Result<Zero> {
    Ok(refine_zero_with(&AuxiliaryR, seed, ArgOptions::default())?.zero)
}

/// All zeros of R(s) in a box, refined and ordered by gamma then beta.
/// Unresolved clusters are returned alongside.
pub fn locate_zeros(bx: Rect, min_size: f64) -> Result<(Vec<Zero>, Vec<Cluster>)> {
    let iso = isolate_zeros(bx, min_size)?;
    let mut zeros = iso
        .isolated
        .par_iter()
        .map(|&r| refine_zero(r))
        .collect::<Result<Vec<_>>>()?;
    zeros.sort_by(|a, b| (a.gamma, a.beta).partial_cmp(&(b.gamma, b.beta)).unwrap());
    Ok((zeros, iso.clusters))
}

/// Summary of a zero list.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ZeroStatistics {
    pub count: usize,
    /// fraction with beta > 1/2
    pub fraction_right: f64,
    pub min_beta: f64,
    pub max_beta: f64,
    /// mean spacing of consecutive ordinates; 0 for a single zero
    pub mean_gap: f64,
}

pub fn zero_statistics(zeros: &[Zero]) -> Result<ZeroStatistics> {
    if zeros.is_empty() {
        return Err(Error::Invalid("statistics of an empty zero list".into()));
    }
    let count = zeros.len();
    let right = zeros.iter().filter(|z| z.beta > 0.5).count();
    let min_beta = zeros.iter().map(|z| z.beta).fold(f64::INFINITY, f64::min);
    let max_beta = zeros
        .iter()
        .map(|z| z.beta)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut gammas: Vec<f64> = zeros.iter().map(|z| z.gamma).collect();
    gammas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean_gap = if count > 1 {
        (gammas[count - 1] - gammas[0]) / (count - 1) as f64
    } else {
        0.0
    };
    Ok(ZeroStatistics {
        count,
        fraction_right: right as f64 / count as f64,
        min_beta,
        max_beta,
        mean_gap,
    })
}
