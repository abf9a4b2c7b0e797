//! Complex special functions: log-gamma, the functional-equation factor
//! chi(s), the saddle variable eta(s) and the truncated expansions used to
//! estimate the argument of R(s) far to the left.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// ln(2 pi)
pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A point s = sigma + i t of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite(format!("{sigma} + {t}i")));
        }
        Ok(Self { sigma, t })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.to_complex()
    }
}

/// eta = sqrt((s - 1) / 2 pi i) on the branch Re(eta) + Im(eta) > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaValue {
    pub value: Complex64,
    /// (s - 1) / 2 pi i
    pub square: Complex64,
}

/// A truncated power series together with a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvaluation {
    pub order: usize,
    pub value: Complex64,
    /// Geometric bound on the dropped tail: |first dropped term| / (1 - ratio).
    pub truncation_estimate: f64,
}

/// Accumulation mode for long sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    #[default]
    Standard,
    Compensated,
}

/// Complex summation, optionally with Neumaier compensation on each component.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator {
    mode: PrecisionMode,
    sum: Complex64,
    carry: Complex64,
}

impl Accumulator {
    pub fn new(mode: PrecisionMode) -> Self {
        Self {
            mode,
            sum: Complex64::new(0.0, 0.0),
            carry: Complex64::new(0.0, 0.0),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        match self.mode {
            PrecisionMode::Standard => self.sum += z,
            PrecisionMode::Compensated => {
                let (re, cre) = neumaier(self.sum.re, z.re);
                let (im, cim) = neumaier(self.sum.im, z.im);
                self.sum = Complex64::new(re, im);
                self.carry += Complex64::new(cre, cim);
            }
        }
    }

    pub fn total(&self) -> Complex64 {
        self.sum + self.carry
    }
}

#[inline]
fn neumaier(sum: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    (t, c)
}

// B_{2k} / (2k (2k - 1)) for k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT_TARGET: f64 = 10.0;

/// Principal branch of log Gamma(s).
///
/// The argument is shifted upward by the recurrence until Re >= 10 and the
/// Stirling series with ten Bernoulli corrections is applied there. The
/// imaginary part is continuous along paths in the upper (or lower)
/// half-plane.
pub fn log_gamma(s: ComplexPoint) -> Result<Complex64> {
    log_gamma_c(s.to_complex())
}

pub fn log_gamma_c(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite(z.to_string()));
    }
    if z.re <= 0.0 && z.im.abs() < 1e-14 && (z.re - z.re.round()).abs() < 1e-14 {
        return Err(Error::GammaPole(z));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TARGET {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * LN_2PI + corr
}

/// log chi(s) with chi(s) = (2 pi)^s / (2 Gamma(s) cos(pi s / 2)).
///
/// For t > 0 this is the branch analytic in the whole upper half-plane,
/// obtained from the log-domain sum
/// `s log 2pi - log Gamma(s) + i pi s / 2 - log(1 + e^{i pi s})`;
/// its imaginary part is therefore already unwrapped along vertical lines.
/// Lower half-plane values follow by conjugation.
pub fn log_chi(s: ComplexPoint) -> Result<Complex64> {
    log_chi_c(s.to_complex())
}

pub fn log_chi_c(s: Complex64) -> Result<Complex64> {
    if s.im > 0.0 {
        let e = (I * PI * s).exp();
        let onep = 1.0 + e;
        if onep.norm() < 1e-12 {
            return Err(Error::ChiSingular(s));
        }
        Ok(s * LN_2PI - log_gamma_c(s)? + I * FRAC_PI_2 * s - onep.ln())
    } else if s.im < 0.0 {
        Ok(log_chi_c(s.conj())?.conj())
    } else {
        let c = chi_direct(s)?;
        if c == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain(format!("chi vanishes at {s}")));
        }
        Ok(c.ln())
    }
}

/// chi(s) = (2 pi)^s / (2 Gamma(s) cos(pi s / 2)).
///
/// Direct products are used for |t| <= 5, the log-domain sum otherwise.
pub fn chi(s: ComplexPoint) -> Result<Complex64> {
    chi_c(s.to_complex())
}

pub fn chi_c(s: Complex64) -> Result<Complex64> {
    if s.im.abs() <= 5.0 {
        chi_direct(s)
    } else {
        Ok(log_chi_c(s)?.exp())
    }
}

fn chi_direct(s: Complex64) -> Result<Complex64> {
    if s.re >= 0.5 {
        let c = (s * FRAC_PI_2).cos();
        if c.norm() < 1e-12 {
            return Err(Error::ChiSingular(s));
        }
        let gamma = log_gamma_c(s)?.exp();
        Ok((s * LN_2PI).exp() / (2.0 * gamma * c))
    } else {
        // reflected form 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s); no cancellation at
        // the trivial points s = -1, -3, ...
        let gamma = log_gamma_c(1.0 - s)?.exp();
        Ok((s * LN_2 + (s - 1.0) * PI.ln()).exp() * (s * FRAC_PI_2).sin() * gamma)
    }
}

/// eta = sqrt((s - 1) / 2 pi i), branch Re + Im > 0.
pub fn eta(s: ComplexPoint) -> Result<EtaValue> {
    eta_c(s.to_complex())
}

pub fn eta_c(s: Complex64) -> Result<EtaValue> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::DegenerateEta);
    }
    let square = (s - 1.0) / (I * TAU);
    let mut value = square.sqrt();
    // On the boundary Re + Im = 0 the principal root already has Re >= 0.
    if value.re + value.im < 0.0 {
        value = -value;
    }
    Ok(EtaValue { value, square })
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::Invalid("series order must be at least 1".into()));
    }
    Ok(())
}

/// Truncated expansions of eta and log eta in powers of x = (1 - sigma) / t:
/// `eta = sqrt(t / 2pi) * sqrt(1 + i x)` and
/// `log eta = log(t / 2pi) / 2 + log(1 + i x) / 2`.
///
/// `order` counts retained terms including the leading one.
pub fn eta_series(
    sigma: f64,
    t: f64,
    order: usize,
) -> Result<(SeriesEvaluation, SeriesEvaluation)> {
    check_order(order)?;
    if !(t > 0.0) || !sigma.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!("eta_series needs t > 0, got {t}")));
    }
    let x = (1.0 - sigma) / t;
    if x.abs() >= 0.5 {
        return Err(Error::SeriesDivergence { ratio: x });
    }
    let ix = I * x;
    let scale = (t / TAU).sqrt();

    // binomial series of sqrt(1 + z)
    let mut coeff = 1.0;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut eta_sum = Complex64::new(0.0, 0.0);
    for k in 0..order {
        eta_sum += coeff * pow;
        coeff *= (0.5 - k as f64) / (k as f64 + 1.0);
        pow *= ix;
    }
    let eta_tail = scale * coeff.abs() * x.abs().powi(order as i32) / (1.0 - x.abs());

    let mut log_sum = Complex64::new(0.5 * (t / TAU).ln(), 0.0);
    let mut pow = ix;
    for k in 1..order {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        log_sum += 0.5 * sign * pow / k as f64;
        pow *= ix;
    }
    let log_tail = 0.5 * x.abs().powi(order as i32) / order as f64 / (1.0 - x.abs());

    Ok((
        SeriesEvaluation {
            order,
            value: scale * eta_sum,
            truncation_estimate: eta_tail,
        },
        SeriesEvaluation {
            order,
            value: log_sum,
            truncation_estimate: log_tail,
        },
    ))
}

/// Truncated expansion of log s for t > |sigma|:
/// `log t + i pi/2 + log(1 - i sigma/t)`, i.e.
/// `log t + sigma^2/2t^2 - sigma^4/4t^4 + ... + i(pi/2 - sigma/t + sigma^3/3t^3 - ...)`.
pub fn log_s_series(sigma: f64, t: f64, order: usize) -> Result<SeriesEvaluation> {
    check_order(order)?;
    if !sigma.is_finite() || !t.is_finite() || t <= sigma.abs() {
        return Err(Error::Domain(format!(
            "log_s_series needs t > |sigma|, got sigma = {sigma}, t = {t}"
        )));
    }
    let y = sigma / t;
    let z = -I * y;
    let mut sum = Complex64::new(t.ln(), FRAC_PI_2);
    let mut pow = z;
    for k in 1..order {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * pow / k as f64;
        pow *= z;
    }
    Ok(SeriesEvaluation {
        order,
        value: sum,
        truncation_estimate: y.abs().powi(order as i32) / order as f64 / (1.0 - y.abs()),
    })
}

/// Asymptotic argument of chi(sigma + i t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgChiAsymptotic {
    /// -t log(t / 2pi) + t
    pub leading: f64,
    /// pi/4 - sigma/2t + sigma^2/2t
    pub correction: f64,
}

impl ArgChiAsymptotic {
    pub fn total(&self) -> f64 {
        self.leading + self.correction
    }
}

pub fn arg_chi_asymptotic(sigma: f64, t: f64) -> Result<ArgChiAsymptotic> {
    if !(t >= 10.0) || !sigma.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!(
            "arg_chi_asymptotic needs t >= 10, got {t}"
        )));
    }
    Ok(ArgChiAsymptotic {
        leading: -t * (t / TAU).ln() + t,
        correction: FRAC_PI_4 - sigma / (2.0 * t) + sigma * sigma / (2.0 * t),
    })
}
