//! Evaluation of Riemann's auxiliary function
//!
//! ```text
//! R(s) = ∫_{0↙1} x^{-s} e^{πix²} / (e^{πix} - e^{-πix}) dx
//! ```
//!
//! The line of integration is slid to the right across the poles 1..=q of the
//! integrand, each of which leaves a residue n^{-s}/(2πi). What remains is a
//! line through q + 1/2 with slope 45°, which for q ≈ sqrt(t/2π) passes close
//! to the saddle point of the integrand, where the trapezoidal rule converges
//! geometrically.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{chi_c, eta_c, log_chi_c, Accumulator, ComplexPoint, PrecisionMode};

const I: Complex64 = Complex64::new(0.0, 1.0);
const OMEGA: Complex64 = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);

/// Target relative accuracy of the automatic quadrature.
pub const EPS_TARGET: f64 = 1e-9;
/// Relative error estimates above this are reported as non-convergence.
pub const MAX_ERROR: f64 = 1e-6;
/// Log-magnitude drop below the peak at which the integrand tails are cut.
pub const TAIL_DROP: f64 = 45.0;

/// Discretization of the shifted integration line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// The line crosses the real axis at `crossing + 1/2`.
    pub crossing: u32,
    /// Truncation of the line parameter on each side of the saddle projection.
    pub half_length: f64,
    pub step: f64,
    pub precision_mode: PrecisionMode,
}

impl QuadratureSpec {
    /// Default half-length for a relative target `eps` at height `t`.
    pub fn default_half_length(eps: f64, t: f64) -> f64 {
        ((1.0 / eps).ln().max(1.0) / PI).sqrt() + t.max(0.0).sqrt() / 4.0
    }

    /// Discretization used by [`r_eval`] at the point `s`: crossing from
    /// [`auto_crossing`], half-length sized by scanning the integrand until it
    /// has decayed [`TAIL_DROP`] nats below its peak.
    pub fn auto(s: ComplexPoint) -> Self {
        Self::auto_with_crossing(s, auto_crossing(s.t))
    }

    pub fn auto_with_crossing(s: ComplexPoint, crossing: u32) -> Self {
        let sc = s.to_complex();
        let centre = Complex64::new(crossing as f64 + 0.5, 0.0);
        let (_, reach) = scan_line(sc, centre, saddle_parameter(sc, centre));
        Self {
            crossing,
            half_length: reach,
            step: 0.125,
            precision_mode: PrecisionMode::Standard,
        }
    }

    pub fn with_precision(mut self, mode: PrecisionMode) -> Self {
        self.precision_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.half_length > 0.0) || !self.step.is_finite() {
            return Err(Error::Invalid(format!(
                "quadrature needs positive step and half_length, got {self:?}"
            )));
        }
        if self.step > self.half_length {
            return Err(Error::Invalid(format!(
                "step {} exceeds half_length {}",
                self.step, self.half_length
            )));
        }
        Ok(())
    }
}

/// q = max(0, floor(sqrt(t / 2π)))
pub fn auto_crossing(t: f64) -> u32 {
    (t.max(0.0) / TAU).sqrt().floor() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quadrature,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationResult {
    pub value: Complex64,
    pub method: Method,
    /// Absolute for quadrature: refinement difference, tail cut and a
    /// rounding bound. Relative (a bound on |U|) for the asymptotic surrogate.
    pub error_estimate: f64,
    /// |R / surrogate - 1| when a quadrature reference was computed.
    pub u_proxy: Option<f64>,
}

/// log of the integrand x^{-s} e^{πix²} / (e^{πix} - e^{-πix}), up to 2πi.
#[inline]
fn log_integrand(s: Complex64, x: Complex64) -> Complex64 {
    let num = -s * x.ln() + I * PI * x * x;
    // e^{πix} - e^{-πix} with the dominant exponential factored out
    let den = if x.im >= 0.0 {
        // -e^{-πix} (1 - e^{2πix})
        -I * PI * x + I * PI + (1.0 - (I * TAU * x).exp()).ln()
    } else {
        I * PI * x + (1.0 - (-I * TAU * x).exp()).ln()
    };
    num - den
}

/// Trapezoidal partial sum over nodes `u0 + offset + j * stride` with
/// `|offset + j * stride| <= half_length`, each term scaled by `e^{-shift}`.
struct LineSum {
    sum: Complex64,
    abs_sum: f64,
    /// Σ |term| * (|log term| + 4), the phase/rounding error weight
    round_weight: f64,
    edge: f64,
    nodes: usize,
}

impl LineSum {
    fn merge(self, other: LineSum, mode: PrecisionMode) -> LineSum {
        let mut acc = Accumulator::new(mode);
        acc.add(self.sum);
        acc.add(other.sum);
        LineSum {
            sum: acc.total(),
            abs_sum: self.abs_sum + other.abs_sum,
            round_weight: self.round_weight + other.round_weight,
            edge: self.edge.max(other.edge),
            nodes: self.nodes + other.nodes,
        }
    }
}

struct Line {
    s: Complex64,
    centre: Complex64,
    u0: f64,
    half_length: f64,
    shift: f64,
    mode: PrecisionMode,
}

impl Line {
    fn sum(&self, offset: f64, stride: f64) -> LineSum {
        let jmin = ((-self.half_length - offset) / stride).ceil() as i64;
        let jmax = ((self.half_length - offset) / stride).floor() as i64;
        let mut acc = Accumulator::new(self.mode);
        let mut abs_sum = 0.0;
        let mut round_weight = 0.0;
        let mut edge: f64 = 0.0;
        for j in jmin..=jmax {
            let u = self.u0 + offset + j as f64 * stride;
            let l = log_integrand(self.s, self.centre + u * OMEGA);
            let v = (l - self.shift).exp();
            let m = v.norm();
            acc.add(v);
            abs_sum += m;
            round_weight += m * (l.norm() + 4.0);
            if j == jmin || j == jmax {
                edge = edge.max(m);
            }
        }
        LineSum {
            sum: acc.total(),
            abs_sum,
            round_weight,
            edge,
            nodes: (jmax - jmin + 1).max(0) as usize,
        }
    }
}

/// Projection onto the line parameter of the saddle point eta.
fn saddle_parameter(s: Complex64, centre: Complex64) -> f64 {
    match eta_c(s) {
        Ok(e) => ((e.value - centre) * OMEGA.conj()).re,
        Err(_) => 0.0,
    }
}

/// Walks outward from `u0` in quarter steps until the integrand has dropped
/// [`TAIL_DROP`] nats below the largest value seen on each side. Returns
/// (peak log-magnitude, half-length).
fn scan_line(s: Complex64, centre: Complex64, u0: f64) -> (f64, f64) {
    const DU: f64 = 0.25;
    let at = |u: f64| log_integrand(s, centre + u * OMEGA).re;
    let mut peak = at(u0);
    let mut reach: f64 = 1.0;
    for dir in [-1.0, 1.0] {
        let mut k = 1;
        loop {
            let u = k as f64 * DU;
            let l = at(u0 + dir * u);
            if l > peak {
                peak = l;
            }
            if (u >= 1.0 && l < peak - TAIL_DROP) || u > 200.0 {
                reach = reach.max(u);
                break;
            }
            k += 1;
        }
    }
    (peak, reach)
}

fn peak_on_grid(s: Complex64, centre: Complex64, u0: f64, half_length: f64) -> f64 {
    let n = (half_length * 8.0).ceil() as i64;
    (-n..=n)
        .map(|k| u0 + (k as f64 / 8.0).clamp(-half_length, half_length))
        .map(|u| log_integrand(s, centre + u * OMEGA).re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Σ_{n=1}^{q} n^{-s} e^{-shift}
fn dirichlet_sum(s: Complex64, q: u32, shift: f64, mode: PrecisionMode) -> (Complex64, f64) {
    let mut acc = Accumulator::new(mode);
    let mut abs_sum = 0.0;
    for n in 1..=q {
        let v = (-s * (n as f64).ln() - shift).exp();
        abs_sum += v.norm();
        acc.add(v);
    }
    (acc.total(), abs_sum)
}

fn check_point(s: ComplexPoint) -> Result<Complex64> {
    if s.t < 0.0 {
        return Err(Error::Domain(format!(
            "R(s) is evaluated for t >= 0, got {}",
            s.t
        )));
    }
    Ok(s.to_complex())
}

/// R(s) from the pole-crossing representation.
///
/// The value is `Σ_{n<=q} n^{-s}` plus the integral over the line through
/// `q + 1/2` with direction e^{iπ/4}, traversed toward the lower left. The
/// step is halved (reusing nodes) until two successive trapezoidal sums agree
/// to [`EPS_TARGET`] relative to the magnitude scale. The returned
/// `error_estimate` is absolute: last refinement difference, tail cut and a
/// rounding bound that grows with the phase of the terms.
pub fn r_integral(s: ComplexPoint, spec: &QuadratureSpec) -> Result<EvaluationResult> {
    spec.validate()?;
    let sc = check_point(s)?;
    integral_core(sc, spec)
}

/// A quadrature value stored as `mantissa * e^{log_scale}` so that points far
/// to the left, where |R| exceeds the binary64 range, can still be compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
    /// absolute error of the mantissa
    pub error: f64,
    /// Σ of the moduli of all summed terms, in units of e^{log_scale}
    pub magnitude: f64,
}

impl ScaledValue {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// log of the value, principal imaginary part.
    pub fn ln(&self) -> Complex64 {
        self.mantissa.ln() + self.log_scale
    }
}

fn integral_core(sc: Complex64, spec: &QuadratureSpec) -> Result<EvaluationResult> {
    let sv = scaled_core(sc, spec)?;
    let factor = sv.log_scale.exp();
    let value = sv.mantissa * factor;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonConvergence {
            point: sc,
            estimate: f64::INFINITY,
        });
    }
    Ok(EvaluationResult {
        value,
        method: Method::Quadrature,
        error_estimate: sv.error * factor,
        u_proxy: None,
    })
}

fn scaled_core(sc: Complex64, spec: &QuadratureSpec) -> Result<ScaledValue> {
    let crossing = spec.crossing as f64 + 0.5;
    if (crossing - crossing.round()).abs() < 1e-6 {
        return Err(Error::PathThroughPole(crossing));
    }
    // x = c + u e^{iπ/4} with c > 0 is real only at u = 0, so the principal
    // logarithm of x is continuous along the whole line.
    assert!(crossing > 0.0);
    let centre = Complex64::new(crossing, 0.0);
    let u0 = saddle_parameter(sc, centre);
    let peak = peak_on_grid(sc, centre, u0, spec.half_length);
    let dirichlet_peak = if spec.crossing > 0 {
        (-sc.re * (spec.crossing as f64).ln()).max(0.0)
    } else {
        f64::NEG_INFINITY
    };
    let log_scale = peak.max(dirichlet_peak);
    let line = Line {
        s: sc,
        centre,
        u0,
        half_length: spec.half_length,
        shift: log_scale,
        mode: spec.precision_mode,
    };
    let (dsum, dabs) = dirichlet_sum(sc, spec.crossing, log_scale, spec.precision_mode);

    let mut h = spec.step;
    let mut cur = line.sum(0.0, h);
    // dx = -e^{iπ/4} du
    let integral = |ls: &LineSum, h: f64| -OMEGA * ls.sum * h;
    let mut value = dsum + integral(&cur, h);
    let mut diff = f64::INFINITY;
    for _ in 0..6 {
        let mid = line.sum(h / 2.0, h);
        cur = cur.merge(mid, spec.precision_mode);
        h /= 2.0;
        let next = dsum + integral(&cur, h);
        diff = (next - value).norm();
        value = next;
        if diff <= EPS_TARGET * (cur.abs_sum * h + dabs) {
            break;
        }
    }
    let magnitude = cur.abs_sum * h + dabs;
    let tail = cur.edge;
    let rounding = f64::EPSILON
        * (cur.round_weight * h + (cur.nodes as f64).sqrt() * cur.abs_sum * h)
        + f64::EPSILON * 4.0 * dabs;
    let error = diff + tail + rounding;
    if !value.re.is_finite() || !value.im.is_finite() || !(error <= MAX_ERROR * magnitude) {
        return Err(Error::NonConvergence {
            point: sc,
            estimate: error / magnitude,
        });
    }
    Ok(ScaledValue {
        mantissa: value,
        log_scale,
        error,
        magnitude,
    })
}

/// R(s) in scaled form, with the automatic discretization.
pub fn r_eval_scaled(s: ComplexPoint) -> Result<ScaledValue> {
    let sc = check_point(s)?;
    scaled_core(sc, &QuadratureSpec::auto(s))
}

/// R(s) by quadrature with automatically chosen crossing and discretization.
/// All counting and location work goes through this entry point.
pub fn r_eval(s: ComplexPoint) -> Result<EvaluationResult> {
    r_eval_with(s, PrecisionMode::Standard)
}

pub fn r_eval_with(s: ComplexPoint, mode: PrecisionMode) -> Result<EvaluationResult> {
    check_point(s)?;
    r_integral(s, &QuadratureSpec::auto(s).with_precision(mode))
}

/// Evaluates with the requested method. The asymptotic surrogate is
/// accompanied by its measured deviation from the quadrature value.
pub fn r_eval_method(
    s: ComplexPoint,
    method: Method,
    region: &AsymptoticRegion,
) -> Result<EvaluationResult> {
    match method {
        Method::Quadrature => r_eval(s),
        Method::Asymptotic => {
            let mut asym = r_asymptotic(s, region)?;
            let log_surrogate = surrogate_factors(s)?.log_value();
            let reference = r_eval_scaled(s)?;
            let u = ((reference.ln() - log_surrogate).exp() - 1.0).norm();
            asym.u_proxy = Some(u);
            asym.error_estimate = u;
            Ok(asym)
        }
    }
}

/// R(s + r e^{iθ}) sampled at `count` equally spaced angles, combined by the
/// discrete Cauchy formula for the first derivative.
fn cauchy_ring(s: Complex64, radius: f64, count: usize) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..count {
        let theta = TAU * k as f64 / count as f64;
        let w = Complex64::from_polar(1.0, theta);
        let z = s + radius * w;
        let p = ComplexPoint::from_complex(z)?;
        // rings around points near the real axis may dip slightly below it
        let v = r_integral_unchecked(p, &QuadratureSpec::auto(p))?.value;
        acc += v / w;
    }
    Ok(acc / (count as f64 * radius))
}

pub const DERIVATIVE_RADIUS: f64 = 1e-2;
const DERIVATIVE_NODES: usize = 16;

/// R'(s) from the mean of R(s + r e^{iθ}) e^{-iθ} / r over 16 angles, r = 10⁻².
pub fn r_derivative(s: ComplexPoint) -> Result<Complex64> {
    check_point(s)?;
    cauchy_ring(s.to_complex(), DERIVATIVE_RADIUS, DERIVATIVE_NODES)
}

/// R'(s) on a ring of the given radius.
pub fn r_derivative_radius(s: ComplexPoint, radius: f64) -> Result<Complex64> {
    check_point(s)?;
    if !(radius > 0.0) {
        return Err(Error::Invalid(format!(
            "ring radius must be positive, got {radius}"
        )));
    }
    cauchy_ring(s.to_complex(), radius, DERIVATIVE_NODES)
}

/// R'(s) together with the discrepancy between rings of radius r and r/2.
pub fn r_derivative_with_estimate(s: ComplexPoint) -> Result<(Complex64, f64)> {
    let a = r_derivative(s)?;
    let b = r_derivative_radius(s, DERIVATIVE_RADIUS / 2.0)?;
    Ok((a, (a - b).norm()))
}

fn r_integral_unchecked(s: ComplexPoint, spec: &QuadratureSpec) -> Result<EvaluationResult> {
    spec.validate()?;
    integral_core(s.to_complex(), spec)
}

/// Left region where the asymptotic factorization is used:
/// `t >= t_min` and `sigma <= 1 - slope * t^{2/5} log t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRegion {
    pub t_min: f64,
    pub slope: f64,
}

impl Default for AsymptoticRegion {
    fn default() -> Self {
        Self {
            t_min: 50.0,
            slope: 1.0,
        }
    }
}

impl AsymptoticRegion {
    /// sigma on the region boundary at height t
    pub fn boundary(&self, t: f64) -> f64 {
        1.0 - self.slope * t.powf(0.4) * t.ln()
    }

    pub fn contains(&self, s: ComplexPoint) -> bool {
        s.t >= self.t_min && s.sigma <= self.boundary(s.t)
    }
}

/// Logarithms of the factors of the left-region surrogate
/// `-χ(s) η^{s-1} e^{-πiη²} · √2 e^{3πi/8} sin(πη) / (2 cos 2πη)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateFactors {
    pub log_chi: Complex64,
    /// (s - 1) log η
    pub log_eta_power: Complex64,
    /// -πiη²
    pub log_gauss: Complex64,
    /// log(-√2 e^{3πi/8} sin(πη) / (2 cos 2πη))
    pub log_ratio: Complex64,
}

impl SurrogateFactors {
    pub fn log_value(&self) -> Complex64 {
        self.log_chi + self.log_eta_power + self.log_gauss + self.log_ratio
    }

    /// Log-moduli of the four factors.
    pub fn log_moduli(&self) -> [f64; 4] {
        [
            self.log_chi.re,
            self.log_eta_power.re,
            self.log_gauss.re,
            self.log_ratio.re,
        ]
    }
}

pub fn surrogate_factors(s: ComplexPoint) -> Result<SurrogateFactors> {
    let sc = s.to_complex();
    let eta = eta_c(sc)?.value;
    let log_chi = log_chi_c(sc)?;
    let log_eta_power = (sc - 1.0) * eta.ln();
    let log_gauss = -I * PI * eta * eta;

    // With Im η >= 0 the exponentials e^{-iπη}, e^{-2πiη} dominate:
    // sin πη = -e^{-iπη}(1 - e^{2πiη}) / 2i, 2 cos 2πη = e^{-2πiη}(1 + e^{4πiη}).
    let e2 = (I * TAU * eta).exp();
    let e4 = e2 * e2;
    let log_sin = -I * PI * eta + (1.0 - e2).ln() - (2.0 * I).ln() + I * PI;
    let log_two_cos = -I * TAU * eta + (1.0 + e4).ln();
    let log_cos = log_two_cos - std::f64::consts::LN_2;
    if log_cos.re < (1e-8f64).ln() {
        return Err(Error::NearZeroDenominator(sc));
    }
    let log_ratio =
        I * PI + 0.5 * std::f64::consts::LN_2 + I * 3.0 * PI / 8.0 + log_sin - log_two_cos;
    Ok(SurrogateFactors {
        log_chi,
        log_eta_power,
        log_gauss,
        log_ratio,
    })
}

/// The left-region surrogate for R(s).
pub fn r_asymptotic(s: ComplexPoint, region: &AsymptoticRegion) -> Result<EvaluationResult> {
    if !region.contains(s) {
        return Err(Error::Region(s.to_complex()));
    }
    let f = surrogate_factors(s)?;
    // |U| < 1 in the region is all that is known without a reference.
    Ok(EvaluationResult {
        value: f.log_value().exp(),
        method: Method::Asymptotic,
        error_estimate: 1.0,
        u_proxy: None,
    })
}

// B_{2k} / (2k)! for k = 1..=8
const EM_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Euler–Maclaurin shift used by [`zeta_reference`].
pub fn zeta_reference_shift(s: ComplexPoint) -> usize {
    let spec_n = 2.0 * (s.t.abs() / TAU).ceil();
    spec_n.max(s.to_complex().norm() + 20.0).max(20.0) as usize
}

/// ζ(s) by Euler–Maclaurin summation with eight Bernoulli corrections.
pub fn zeta_reference(s: ComplexPoint) -> Result<Complex64> {
    let sc = s.to_complex();
    if (sc - 1.0).norm() < 1e-14 {
        return Err(Error::ZetaPole);
    }
    let n = zeta_reference_shift(s);
    let mut acc = Accumulator::new(PrecisionMode::Compensated);
    for k in 1..n {
        acc.add((-sc * (k as f64).ln()).exp());
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-sc * ln_n).exp();
    acc.add(n_pow * nf / (sc - 1.0));
    acc.add(0.5 * n_pow);
    // s (s+1) ... (s+2k-2) N^{-s-2k+1}
    let mut rising = sc;
    let mut term_pow = n_pow / nf;
    for (k, c) in EM_COEFFS.iter().enumerate() {
        acc.add(*c * rising * term_pow);
        let j = 2 * k as u32 + 1;
        rising *= (sc + j as f64) * (sc + (j + 1) as f64);
        term_pow /= nf * nf;
    }
    Ok(acc.total())
}

/// ζ(s) = R(s) + χ(s) · conj(R(1 - conj(s))).
pub fn zeta_from_r(s: ComplexPoint) -> Result<Complex64> {
    let sc = s.to_complex();
    if (sc - 1.0).norm() < 1e-14 {
        return Err(Error::ZetaPole);
    }
    let reflected = ComplexPoint::from_complex(1.0 - sc.conj())?;
    let r = r_eval(s)?.value;
    let r_reflected = r_eval(reflected)?.value;
    Ok(r + chi_c(sc)? * r_reflected.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::chi;

    fn p(sigma: f64, t: f64) -> ComplexPoint {
        ComplexPoint::new(sigma, t).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // Straight trapezoid over the shifted line without scaling or
    // adaptivity: dense nodes, wide window, the crossing given explicitly.
    fn brute(s: Complex64, q: u32, weight: impl Fn(Complex64) -> Complex64) -> Complex64 {
        let c = q as f64 + 0.5;
        let h = 1.0 / 256.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in -4096..=4096 {
            let x = c + j as f64 * h * OMEGA;
            let e = (I * PI * x).exp();
            let f = (-s * x.ln()).exp() * (I * PI * x * x).exp() / (e - 1.0 / e);
            acc += weight(x) * f;
        }
        -OMEGA * acc * h
    }

    fn brute_r(s: Complex64, q: u32) -> Complex64 {
        let d: Complex64 = (1..=q).map(|n| (-s * (n as f64).ln()).exp()).sum();
        d + brute(s, q, |_| Complex64::new(1.0, 0.0))
    }

    #[test]
    fn zeta_reference_classical_values() {
        let z = zeta_reference(p(2.0, 0.0)).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-14 && z.im.abs() < 1e-15);
        assert!((zeta_reference(p(0.0, 0.0)).unwrap().re + 0.5).abs() < 1e-13);
        assert!((zeta_reference(p(-1.0, 0.0)).unwrap().re + 1.0 / 12.0).abs() < 1e-10);
        assert!(matches!(zeta_reference(p(1.0, 0.0)), Err(Error::ZetaPole)));
    }

    #[test]
    fn zeta_from_r_at_two() {
        let z = zeta_from_r(p(2.0, 0.0)).unwrap();
        assert!(rel(z, Complex64::new(PI * PI / 6.0, 0.0)) < 1e-8);
        assert!(matches!(zeta_from_r(p(1.0, 0.0)), Err(Error::ZetaPole)));
    }

    #[test]
    fn zeta_from_r_on_critical_line() {
        let s = p(0.5, 25.0);
        let a = zeta_from_r(s).unwrap();
        let b = zeta_reference(s).unwrap();
        assert!(rel(a, b) < 1e-8);
        // mpmath.zeta(0.5+25j)
        let lit = Complex64::new(0.004_984_593_364_035_675, -0.014_012_301_962_583_383);
        assert!((a - lit).norm() < 1e-12);
    }

    #[test]
    fn zeta_near_first_zero() {
        let s = p(0.5, 14.134_725_141_734_693);
        assert!(zeta_from_r(s).unwrap().norm() < 1e-8);
        assert!(zeta_reference(s).unwrap().norm() < 1e-8);
    }

    #[test]
    fn identity_grid() {
        for sigma in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            for k in 1..=20 {
                let s = p(sigma, 5.0 * k as f64);
                let d = rel(zeta_from_r(s).unwrap(), zeta_reference(s).unwrap());
                assert!(d < 1e-8, "{s:?}: {d:e}");
            }
        }
    }

    #[test]
    fn functional_equation_inherited() {
        for (sigma, t) in [(0.2, 30.0), (-0.5, 17.0), (1.5, 60.0)] {
            let s = p(sigma, t);
            let z = zeta_from_r(s).unwrap();
            let refl = zeta_from_r(p(1.0 - sigma, t)).unwrap();
            let other = chi(s).unwrap() * refl.conj();
            assert!((z - other).norm() <= 1e-8 * z.norm().max(1.0));
        }
    }

    #[test]
    fn against_brute_force_line() {
        for (sigma, t) in [(0.5, 50.0), (2.0, 10.0), (-1.0, 30.0)] {
            let s = Complex64::new(sigma, t);
            let q = auto_crossing(t);
            let r = r_eval(p(sigma, t)).unwrap().value;
            assert!(rel(r, brute_r(s, q)) < 1e-11, "{s}");
        }
    }

    #[test]
    fn crossing_invariance() {
        for t in [100.0, 500.0] {
            let s = p(0.5, t);
            let q0 = auto_crossing(t);
            let base = r_integral(s, &QuadratureSpec::auto_with_crossing(s, q0)).unwrap();
            for q in q0 - 2..=q0 + 2 {
                let other = r_integral(s, &QuadratureSpec::auto_with_crossing(s, q)).unwrap();
                let diff = (other.value - base.value).norm();
                assert!(
                    diff <= base.error_estimate + other.error_estimate,
                    "t={t} q={q}: {diff:e}"
                );
            }
        }
    }

    #[test]
    fn crossing_on_a_pole_is_rejected() {
        let s = p(2.0, 0.0);
        let spec = QuadratureSpec {
            crossing: 0,
            half_length: 4.0,
            step: 0.125,
            precision_mode: PrecisionMode::Standard,
        };
        assert!(r_integral(s, &spec).is_ok());
        assert!(r_integral(p(2.0, -1.0), &spec).is_err());
        let bad = QuadratureSpec { step: 8.0, ..spec };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn right_half_plane_values() {
        // R(2) = -pi^2/12 - i pi/2 (checked with mpmath); the 3/4 band only
        // holds away from the origin
        let r = r_eval(p(2.0, 0.0)).unwrap().value;
        assert!((r - Complex64::new(-PI * PI / 12.0, -PI / 2.0)).norm() < 1e-12);
        for t in [10.0, 100.0, 1000.0] {
            let r = r_eval(p(2.0, t)).unwrap().value;
            assert!((r - 1.0).norm() <= 0.75 && r.norm() > 0.25);
        }
    }

    #[test]
    fn precision_modes_agree() {
        let s = p(-3.0, 300.0);
        let a = r_eval_with(s, PrecisionMode::Standard).unwrap();
        let b = r_eval_with(s, PrecisionMode::Compensated).unwrap();
        assert!((a.value - b.value).norm() <= a.error_estimate + b.error_estimate);
    }

    #[test]
    fn scaled_value_survives_overflow() {
        let v = r_eval_scaled(p(-400.0, 400.0)).unwrap();
        assert!(v.ln().re > 800.0 && v.ln().re.is_finite());
        assert!(r_eval(p(-400.0, 400.0)).is_err());
    }

    #[test]
    fn trapezoid_error_shrinks_geometrically() {
        for (sigma, t) in [(0.5, 50.0), (-2.0, 200.0)] {
            let s = Complex64::new(sigma, t);
            let spec = QuadratureSpec::auto(p(sigma, t));
            let centre = Complex64::new(spec.crossing as f64 + 0.5, 0.0);
            let u0 = saddle_parameter(s, centre);
            let line = Line {
                s,
                centre,
                u0,
                half_length: spec.half_length,
                shift: peak_on_grid(s, centre, u0, spec.half_length),
                mode: PrecisionMode::Compensated,
            };
            let trap = |h: f64| line.sum(0.0, h).sum * h;
            let scale = line.sum(0.0, 0.125).abs_sum * 0.125;
            let mut h = 1.0;
            let mut prev = (trap(h) - trap(h / 2.0)).norm();
            while prev > 1e-12 * scale {
                h /= 2.0;
                let cur = (trap(h) - trap(h / 2.0)).norm();
                assert!(cur <= prev / 4.0, "h={h}: {cur:e} vs {prev:e}");
                prev = cur;
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let s = p(2.0, 30.0);
        let d = r_derivative(s).unwrap();
        let h = 1e-4;
        let fd = (r_eval(p(2.0 + h, 30.0)).unwrap().value
            - r_eval(p(2.0 - h, 30.0)).unwrap().value)
            / (2.0 * h);
        assert!(rel(d, fd) < 1e-5);
    }

    #[test]
    fn derivative_splits_term_by_term() {
        // d/ds of the Dirichlet part is Σ -log n n^{-s}; the line part is
        // differentiated under the integral sign.
        let (sigma, t) = (1.0, 60.0);
        let s = Complex64::new(sigma, t);
        let q = auto_crossing(t);
        let dirichlet: Complex64 = (1..=q)
            .map(|n| -(n as f64).ln() * (-s * (n as f64).ln()).exp())
            .sum();
        let line = brute(s, q, |x| -x.ln());
        let d = r_derivative(p(sigma, t)).unwrap();
        assert!(rel(d, dirichlet + line) < 1e-8);
    }

    #[test]
    fn derivative_radius_invariance() {
        let s = p(2.0, 0.0);
        let (a, est) = r_derivative_with_estimate(s).unwrap();
        let b = r_derivative_radius(s, 5e-3).unwrap();
        assert!((a - b).norm() <= est.max(1e-12) * 2.0);
    }

    #[test]
    fn surrogate_factors_do_not_vanish() {
        let region = AsymptoticRegion::default();
        for t in [50.0, 200.0, 1000.0] {
            let s = p(region.boundary(t) - 1.0, t);
            let f = surrogate_factors(s).unwrap();
            assert!(f.log_moduli().iter().all(|m| m.is_finite()));
            let v = r_asymptotic(s, &region).unwrap();
            assert!(v.value.norm() > 0.0);
        }
    }

    #[test]
    fn surrogate_close_on_region_boundary() {
        let region = AsymptoticRegion::default();
        let t = 200.0;
        let s = p(region.boundary(t), t);
        let r = r_eval_method(s, Method::Asymptotic, &region).unwrap();
        let u = r.u_proxy.unwrap();
        assert!(u < 1.0, "{u}");
    }

    #[test]
    fn surrogate_outside_region() {
        let region = AsymptoticRegion::default();
        assert!(matches!(
            r_asymptotic(p(1.0, 40.0), &region),
            Err(Error::Region(_))
        ));
        assert!(matches!(
            r_asymptotic(p(-30.0, 40.0), &region),
            Err(Error::Region(_))
        ));
        assert!(r_eval(p(1.0, -40.0)).is_err());
    }
}
