//! Self-contained real-valued special functions used by the channel and
//! analysis layers:
//!
//! - `ln_gamma` / `gamma`: log-gamma (Lanczos) and the gamma function
//!   extended to negative non-integer arguments by reflection
//! - `erf`: error function (Maclaurin series + Lentz continued fraction)
//! - `bessel_k` / [`BesselKNu`]: modified Bessel function of the second
//!   kind for non-integer real order
//! - `hyp1f2`: the generalized hypergeometric series ₁F₂(a; b1, b2; z)
//!
//! All functions are pure; every evaluation path is cross-checked in the
//! test suites against an independent oracle (quadrature of an integral
//! representation, high-precision series, or a closed form).

mod dd;

use dd::{gamma_dd, Dd};
use std::f64::consts::PI;
use std::fmt;

#[cfg(test)]
pub(crate) use dd::ln_gamma_dd;

/// Errors reported by the special-function layer.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFunError {
    /// Argument outside the function's domain.
    Domain(String),
    /// Series did not meet the requested tolerance within `max_terms`.
    NonConvergence(String),
    /// Result magnitude exceeds the `f64` range.
    Overflow(String),
    /// Result magnitude underflows the `f64` range (e.g. `K_nu(x)` for
    /// x > 705 where `exp(-x)` is subnormal).
    Underflow(String),
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFunError::Domain(m) => write!(f, "domain error: {m}"),
            SpecFunError::NonConvergence(m) => write!(f, "series did not converge: {m}"),
            SpecFunError::Overflow(m) => write!(f, "overflow: {m}"),
            SpecFunError::Underflow(m) => write!(f, "underflow: {m}"),
        }
    }
}

impl std::error::Error for SpecFunError {}

/// Convergence control for the series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Maximum number of series terms before giving up (≥ 1).
    pub max_terms: usize,
    /// Relative tolerance for series termination, in (0, 1).
    pub rel_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64) -> Result<Self, SpecFunError> {
        if max_terms < 1 {
            return Err(SpecFunError::Domain("max_terms must be >= 1".into()));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(SpecFunError::Domain(format!(
                "rel_tol must be in (0,1), got {rel_tol}"
            )));
        }
        Ok(SeriesControl { max_terms, rel_tol })
    }
}

impl Default for SeriesControl {
    /// `rel_tol = 1e-10`, `max_terms = 500`: far below the statistical noise
    /// of any Monte Carlo consumer of these series.
    fn default() -> Self {
        SeriesControl {
            max_terms: 500,
            rel_tol: 1e-10,
        }
    }
}

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

/// Lanczos coefficients (g = 7, n = 9).
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// ln Γ(x) for x > 0, accurate to better than 1e-12 relative on (0, 50].
pub fn ln_gamma(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) {
        return Err(SpecFunError::Domain(format!(
            "ln_gamma requires x > 0, got {x}"
        )));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos argument away from zero.
        (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut ag = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            ag += c / (z + i as f64);
        }
        let t = z + 7.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + ag.ln()
    }
}

/// Γ(x) for real non-integer x (and positive x generally).
///
/// Negative non-integer arguments go through the reflection formula
/// Γ(x)Γ(1−x) = π / sin(πx).
pub fn gamma(x: f64) -> Result<f64, SpecFunError> {
    if x > 0.0 {
        let lg = ln_gamma_unchecked(x);
        if lg > 709.0 {
            return Err(SpecFunError::Overflow(format!("gamma({x})")));
        }
        return Ok(lg.exp());
    }
    if x == x.round() {
        return Err(SpecFunError::Domain(format!(
            "gamma is undefined at non-positive integer {x}"
        )));
    }
    let s = (PI * x).sin();
    Ok(PI / (s * gamma(1.0 - x)?))
}

// ---------------------------------------------------------------------------
// Error function
// ---------------------------------------------------------------------------

/// erf(x), odd, with |erf| ≤ 1.
///
/// Maclaurin series for |x| ≤ 2, complementary continued fraction (modified
/// Lentz) above; both branches are accurate to ~1e-15.
pub fn erf(x: f64) -> f64 {
    let ax = x.abs();
    let val = if ax <= 2.0 {
        erf_series(ax)
    } else if ax >= 6.5 {
        1.0
    } else {
        1.0 - erfc_cf(ax)
    };
    if x < 0.0 {
        -val
    } else {
        val
    }
}

fn erf_series(x: f64) -> f64 {
    // 2/√π Σ (−1)^n x^(2n+1) / (n! (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

fn erfc_cf(x: f64) -> f64 {
    // erfc(x) = exp(−x²)/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..300 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

// ---------------------------------------------------------------------------
// ₁F₂ hypergeometric series
// ---------------------------------------------------------------------------

/// ₁F₂(a; b1, b2; z) = Σ_k (a)_k / ((b1)_k (b2)_k) · z^k / k!.
///
/// Entire in z; terminated when the relative term magnitude drops below
/// `ctrl.rel_tol`. Fails with `NonConvergence` if `ctrl.max_terms` is
/// exhausted first.
pub fn hyp1f2(
    a: f64,
    b1: f64,
    b2: f64,
    z: f64,
    ctrl: &SeriesControl,
) -> Result<f64, SpecFunError> {
    for b in [b1, b2] {
        if b <= 0.0 && b == b.round() {
            return Err(SpecFunError::Domain(format!(
                "hyp1f2 lower parameter {b} is a non-positive integer"
            )));
        }
    }
    if z < 0.0 {
        return Err(SpecFunError::Domain(format!(
            "hyp1f2 implemented for z >= 0, got {z}"
        )));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        term *= (a + kf) / ((b1 + kf) * (b2 + kf)) * z / (kf + 1.0);
        sum += term;
        if term.abs() < ctrl.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
    }
    Err(SpecFunError::NonConvergence(format!(
        "hyp1f2({a},{b1},{b2};{z}) after {} terms",
        ctrl.max_terms
    )))
}

// ---------------------------------------------------------------------------
// Modified Bessel function of the second kind, non-integer order
// ---------------------------------------------------------------------------

/// Orders closer than this to an integer are rejected: the `sin πν`
/// reduction degenerates there and the physical parameter regime never
/// produces them, so a near-integer order is a configuration mistake.
pub const BESSEL_INTEGER_ORDER_GUARD: f64 = 1e-6;

/// Crossover from the double-double ascending series to the large-argument
/// asymptotic series.
const BESSEL_SERIES_CUTOFF: f64 = 12.0;

/// Above this argument `exp(-x)` is subnormal and `K_nu` underflows.
pub const BESSEL_UNDERFLOW_X: f64 = 705.0;

/// `K_nu` evaluator with per-order constants precomputed.
///
/// Building one of these costs two double-double `ln Γ` evaluations, so
/// hot paths (the Gamma-Gamma density inside quadratures) hold one instead
/// of calling [`bessel_k`] repeatedly.
#[derive(Debug, Clone)]
pub struct BesselKNu {
    /// Requested order (after the K_ν = K_{−ν} reduction).
    nu: f64,
    /// Fractional part of `nu`, in (0, 1).
    mu: f64,
    /// Integer part of `nu`: `nu = m + mu`.
    m: u32,
    /// Γ(1+μ)
    gamma_1p: Dd,
    /// Γ(1−μ)
    gamma_1m: Dd,
    /// Γ(1+μ)Γ(1−μ)/(2μ) = π/(2 sin πμ)
    front: Dd,
}

impl BesselKNu {
    pub fn new(nu: f64) -> Result<Self, SpecFunError> {
        let nu = nu.abs();
        if !nu.is_finite() || nu > 100.0 {
            return Err(SpecFunError::Domain(format!(
                "bessel_k supports |nu| <= 100, got {nu}"
            )));
        }
        if (nu - nu.round()).abs() < BESSEL_INTEGER_ORDER_GUARD {
            return Err(SpecFunError::Domain(format!(
                "bessel_k order {nu} is within {BESSEL_INTEGER_ORDER_GUARD} of an integer"
            )));
        }
        let m = nu.floor();
        let mu = nu - m;
        let gamma_1p = gamma_dd(Dd::from_sum(1.0, mu));
        let gamma_1m = gamma_dd(Dd::from_sum(1.0, -mu));
        let front = gamma_1p * gamma_1m / Dd::from_f64(2.0 * mu);
        Ok(BesselKNu {
            nu,
            mu,
            m: m as u32,
            gamma_1p,
            gamma_1m,
            front,
        })
    }

    pub fn order(&self) -> f64 {
        self.nu
    }

    /// K_ν(x) for x > 0.
    pub fn eval(&self, x: f64) -> Result<f64, SpecFunError> {
        if !(x > 0.0) {
            return Err(SpecFunError::Domain(format!(
                "bessel_k requires x > 0, got {x}"
            )));
        }
        if x > BESSEL_UNDERFLOW_X {
            return Err(SpecFunError::Underflow(format!(
                "K_nu({x}) below the f64 range (threshold x = {BESSEL_UNDERFLOW_X})"
            )));
        }
        let (k_mu, k_mu1) = if x <= BESSEL_SERIES_CUTOFF {
            self.series_pair(x)
        } else {
            (asymptotic_k(self.mu, x), asymptotic_k(self.mu + 1.0, x))
        };
        // Upward recurrence K_{j+1} = K_{j−1} + (2j/x) K_j is stable for K.
        let mut km1 = k_mu;
        let mut k = k_mu1;
        for j in 1..self.m {
            let next = km1 + (2.0 * (self.mu + j as f64) / x) * k;
            km1 = k;
            k = next;
        }
        let result = if self.m == 0 { k_mu } else { k };
        if !result.is_finite() {
            return Err(SpecFunError::Overflow(format!(
                "K_{}({x}) exceeds the f64 range",
                self.nu
            )));
        }
        Ok(result)
    }

    /// Ascending-series evaluation of (K_μ, K_{μ+1}) in double-double
    /// arithmetic.
    ///
    /// With u_k = (x/2)^{−μ}/Γ(k+1−μ) and v_k = (x/2)^{μ}/Γ(k+1+μ),
    ///
    ///   K_μ  = π/(2 sin πμ) Σ_k c_k (u_k − v_k),      c_k = (x²/4)^k / k!
    ///   K_μ' = π/(2 sin πμ) (1/x) Σ_k c_k [2k(u_k−v_k) − μ(u_k+v_k)]
    ///
    /// and w_k = u_k − v_k, s_k = u_k + v_k obey the coupled recurrence
    ///
    ///   w_k = (μ s_{k−1} + k w_{k−1}) / (k² − μ²)
    ///   s_k = (k s_{k−1} + μ w_{k−1}) / (k² − μ²).
    ///
    /// The summation cancels like e^{2x}; double-double headroom keeps the
    /// final f64 value accurate to ≲1e-12 relative up to the crossover.
    /// K_{μ+1} follows from K_{μ+1} = (μ/x) K_μ − K_μ'.
    fn series_pair(&self, x: f64) -> (f64, f64) {
        let mu = self.mu;
        let sigma = (Dd::from_f64(2.0) / Dd::from_f64(x)).ln().mul_f64(mu);
        let u = sigma.exp() / self.gamma_1m;
        let v = (-sigma).exp() / self.gamma_1p;
        let mut w = u - v;
        let mut s = u + v;
        let mut c = Dd::ONE;
        let mut sum_k = w;
        let mut sum_kp = s.mul_f64(-mu);
        let quarter_x2 = Dd::from_prod(x, x).mul_f64(0.25);
        let mu2 = Dd::from_prod(mu, mu);
        let mut envelope = s.hi.abs();
        for k in 1..=700u32 {
            let kf = k as f64;
            let denom = Dd::from_f64(kf * kf) - mu2;
            let w_next = (s.mul_f64(mu) + w.mul_f64(kf)) / denom;
            let s_next = (s.mul_f64(kf) + w.mul_f64(mu)) / denom;
            w = w_next;
            s = s_next;
            c = c * quarter_x2 / Dd::from_f64(kf);
            sum_k = sum_k + c * w;
            sum_kp = sum_kp + c * (w.mul_f64(2.0 * kf) - s.mul_f64(mu));
            let t = (c * s).hi.abs();
            envelope += t;
            if t < 1e-36 * envelope && k > 4 {
                break;
            }
        }
        let k_mu = (self.front * sum_k).to_f64();
        let k_prime = (self.front * sum_kp).to_f64() / x;
        let k_mu1 = (mu / x) * k_mu - k_prime;
        (k_mu, k_mu1)
    }
}

/// Large-argument asymptotic series
/// K_ν(x) ≈ √(π/2x) e^{−x} Σ_k a_k, a_k = Π_{j≤k}(4ν²−(2j−1)²)/(k! (8x)^k),
/// truncated at the smallest term. For ν < 2 and x > 12 the truncation error
/// is below ~1e-12 relative.
fn asymptotic_k(nu: f64, x: f64) -> f64 {
    let four_nu2 = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let factor = (four_nu2 - (2.0 * kf - 1.0).powi(2)) / (8.0 * x * kf);
        term *= factor;
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() * sum
}

/// K_ν(x): modified Bessel function of the second kind, real non-integer
/// order. Convenience wrapper over [`BesselKNu`].
pub fn bessel_k(nu: f64, x: f64) -> Result<f64, SpecFunError> {
    BesselKNu::new(nu)?.eval(x)
}
