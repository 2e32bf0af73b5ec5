//! Semi-analytical outage probabilities.
//!
//! Two independent computation paths for the optimal dynamic scheme:
//!
//! 1. **Quadrature** ([`OutageQuadrature`]): the outage decomposition
//!    `P1 = Pr(γ̂1<t1, γ̂2<t2) + Pr(γ̂2≥t2, γ1<t1)` (and the mirror image for
//!    BS2) reduced to one-dimensional integrals over the Gamma-Gamma density
//!    and distribution function, evaluated adaptively.
//! 2. **High-SNR closed forms** ([`outage_asymptotic`]): a small-argument
//!    CDF expansion when `γ1_thr·γ2_thr < 1` (no outage floor) and an
//!    interference-limited floor expressed through the CDF of the ratio of
//!    two fades when `γ1_thr·γ2_thr ≥ 1`.

use crate::channel::{ChannelError, GammaGamma, LinkBudget, TurbulenceParams};
use crate::noma::QosThresholds;
use crate::quad;
use crate::specfun::{self, SeriesControl};
use std::fmt;

/// Errors from the analysis layer.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    Domain(String),
    /// An adaptive quadrature ran out of subdivisions.
    ToleranceNotMet(String),
    Channel(ChannelError),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::Domain(m) => write!(f, "domain error: {m}"),
            AnalysisError::ToleranceNotMet(m) => write!(f, "tolerance not met: {m}"),
            AnalysisError::Channel(e) => write!(f, "channel: {e}"),
        }
    }
}

impl std::error::Error for AnalysisError {}

impl From<ChannelError> for AnalysisError {
    fn from(e: ChannelError) -> Self {
        AnalysisError::Channel(e)
    }
}

impl From<quad::ToleranceNotMet> for AnalysisError {
    fn from(e: quad::ToleranceNotMet) -> Self {
        AnalysisError::ToleranceNotMet(e.to_string())
    }
}

/// Controls for the adaptive evaluation of the outage integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureControl {
    /// Absolute error target per integral.
    pub abs_tol: f64,
    /// Relative error target per integral.
    pub rel_tol: f64,
    /// Subdivision budget per integral.
    pub max_subdivisions: usize,
    /// Truncation point for semi-infinite ranges. `None` places it at the
    /// fade value whose upper tail mass is `abs_tol/10`, so truncation can
    /// never dominate the error budget.
    pub upper_cutoff: Option<f64>,
}

impl QuadratureControl {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
        upper_cutoff: Option<f64>,
    ) -> Result<Self, AnalysisError> {
        for (name, v) in [("abs_tol", abs_tol), ("rel_tol", rel_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(AnalysisError::Domain(format!(
                    "{name} must be in (0,1), got {v}"
                )));
            }
        }
        if max_subdivisions < 1 {
            return Err(AnalysisError::Domain("max_subdivisions must be >= 1".into()));
        }
        if let Some(c) = upper_cutoff {
            if !(c > 0.0) {
                return Err(AnalysisError::Domain(format!(
                    "upper_cutoff must be positive, got {c}"
                )));
            }
        }
        Ok(QuadratureControl {
            abs_tol,
            rel_tol,
            max_subdivisions,
            upper_cutoff,
        })
    }
}

impl Default for QuadratureControl {
    fn default() -> Self {
        QuadratureControl {
            abs_tol: 1e-11,
            rel_tol: 1e-9,
            max_subdivisions: 4000,
            upper_cutoff: None,
        }
    }
}

/// Quadrature evaluator with the fade distribution and tail cutoff resolved
/// once per (α, β, control) combination.
#[derive(Debug, Clone)]
pub struct OutageQuadrature {
    gg: GammaGamma,
    ctrl: QuadratureControl,
    series: SeriesControl,
    /// Fade value with upper tail mass below `ctrl.abs_tol / 10`; doubles
    /// as the point beyond which the CDF is taken as 1.
    cutoff: f64,
}

impl OutageQuadrature {
    pub fn new(t: TurbulenceParams, ctrl: QuadratureControl) -> Result<Self, AnalysisError> {
        let gg = GammaGamma::new(t)?;
        let cutoff = match ctrl.upper_cutoff {
            Some(c) => c,
            None => gg.upper_quantile(ctrl.abs_tol / 10.0)?,
        };
        Ok(OutageQuadrature {
            gg,
            ctrl,
            series: SeriesControl::default(),
            cutoff,
        })
    }

    pub fn turbulence(&self) -> TurbulenceParams {
        self.gg.params()
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// CDF with the far tail clamped to exactly 1 (error below
    /// `abs_tol/10`); keeps the integrands cheap deep in the tail.
    fn cdf(&self, u: f64) -> f64 {
        if u >= self.cutoff {
            1.0
        } else if u <= 0.0 {
            0.0
        } else {
            self.gg.cdf(u, &self.series).unwrap_or(1.0)
        }
    }

    fn density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else {
            self.gg.pdf(y).unwrap_or(0.0)
        }
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64, AnalysisError> {
        if b <= a {
            return Ok(0.0);
        }
        Ok(quad::integrate(
            f,
            a,
            b,
            self.ctrl.abs_tol,
            self.ctrl.rel_tol,
            self.ctrl.max_subdivisions,
        )?)
    }

    /// `Pr(aX²/(bY²+1) ≥ c, bY² < d)` for independent Gamma-Gamma fades
    /// X, Y:
    ///
    /// `∫_0^√(d/b) [1 − F_X(√(c(by²+1)/a))] f_Y(y) dy`.
    ///
    /// In the outage decomposition this is the probability that one BS is
    /// decodable in first position while the other's raw SNR still misses
    /// its threshold.
    pub fn prob_sinr_above_power_below(
        &self,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    ) -> Result<f64, AnalysisError> {
        if !(a > 0.0 && b > 0.0) || c < 0.0 || d < 0.0 {
            return Err(AnalysisError::Domain(format!(
                "require a,b > 0 and c,d >= 0, got ({a}, {b}, {c}, {d})"
            )));
        }
        if d == 0.0 {
            return Ok(0.0);
        }
        let upper = (d / b).sqrt().min(self.cutoff);
        let v = self.integrate(
            |y| {
                let arg = (c * (b * y * y + 1.0) / a).sqrt();
                (1.0 - self.cdf(arg)) * self.density(y)
            },
            0.0,
            upper,
        )?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// `Pr(aX²/(bY²+1) ≤ c, bY²/(aX²+1) ≤ d)`: the joint event that neither
    /// signal is decodable in first position. Evaluated as the two-piece
    /// integral
    ///
    /// `∫_0^ζ F_X(√(c(by²+1)/a)) f_Y dy − ∫_√(d/b)^ζ F_X(√((b/d·y²−1)/a)) f_Y dy`
    ///
    /// with `ζ = √(d(1+c)/(b(1−cd)))` when `cd < 1` and the tail cutoff
    /// otherwise (the two boundary curves no longer intersect).
    pub fn prob_both_sinr_below(
        &self,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    ) -> Result<f64, AnalysisError> {
        if !(a > 0.0 && b > 0.0) || c < 0.0 || d < 0.0 {
            return Err(AnalysisError::Domain(format!(
                "require a,b > 0 and c,d >= 0, got ({a}, {b}, {c}, {d})"
            )));
        }
        if c == 0.0 || d == 0.0 {
            return Ok(0.0);
        }
        let zeta = if c * d < 1.0 {
            (d * (1.0 + c) / (b * (1.0 - c * d))).sqrt()
        } else {
            f64::INFINITY
        };
        let up = zeta.min(self.cutoff);
        let first = self.integrate(
            |y| {
                let arg = (c * (b * y * y + 1.0) / a).sqrt();
                self.cdf(arg) * self.density(y)
            },
            0.0,
            up,
        )?;
        let lo = (d / b).sqrt();
        let second = self.integrate(
            |y| {
                let t = (b / d * y * y - 1.0).max(0.0);
                self.cdf((t / a).sqrt()) * self.density(y)
            },
            lo,
            up,
        )?;
        Ok((first - second).clamp(0.0, 1.0))
    }

    /// Per-BS outage probabilities of the optimal dynamic scheme:
    ///
    /// `P1 = Pr(both below) + Pr(γ̂2 ≥ t2, γ1 < t1)`
    /// `P2 = Pr(both below) + Pr(γ̂1 ≥ t1, γ2 < t2)`
    pub fn outage_exact(
        &self,
        link1: &LinkBudget,
        link2: &LinkBudget,
        thr: &QosThresholds,
    ) -> Result<(f64, f64), AnalysisError> {
        let (e1, e2) = (link1.e, link2.e);
        if !(e1 > 0.0 && e2 > 0.0) {
            return Err(AnalysisError::Domain(format!(
                "links must carry positive SNR coefficients, got ({e1}, {e2})"
            )));
        }
        let (t1, t2) = (thr.gamma1_thr, thr.gamma2_thr);
        let joint = self.prob_both_sinr_below(e1, e2, t1, t2)?;
        let p1 = joint + self.prob_sinr_above_power_below(e2, e1, t2, t1)?;
        let p2 = joint + self.prob_sinr_above_power_below(e1, e2, t1, t2)?;
        Ok((p1.clamp(0.0, 1.0), p2.clamp(0.0, 1.0)))
    }

    /// CDF of the ratio of two independent identically distributed fades:
    /// `Pr(h̃1/h̃2 ≤ x) = ∫_0^∞ F(x y) f(y) dy`.
    ///
    /// Numerically identical to the closed-form Meijer-G expression for the
    /// ratio CDF, but stable for every `x` including the removable
    /// singularity at `x = 1`.
    pub fn ratio_cdf(&self, x: f64) -> Result<f64, AnalysisError> {
        if x < 0.0 {
            return Err(AnalysisError::Domain(format!(
                "ratio_cdf requires x >= 0, got {x}"
            )));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let v = self.integrate(
            |y| self.cdf(x * y) * self.density(y),
            0.0,
            self.cutoff,
        )?;
        Ok(v.clamp(0.0, 1.0))
    }
}

// ---------------------------------------------------------------------------
// High-SNR closed forms
// ---------------------------------------------------------------------------

/// Asymptotic regime of the outage probability as transmit power grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageRegime {
    /// `γ1_thr·γ2_thr < 1`: outage decays without bound (diversity order
    /// ½·min(α, β) in electrical SNR).
    NoFloor,
    /// `γ1_thr·γ2_thr ≥ 1`: outage saturates at an interference-limited
    /// floor, identical for both BSs.
    Floor,
}

/// One BS's high-SNR outage approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticOutage {
    pub regime: OutageRegime,
    pub value: f64,
}

/// Leading small-argument expansion of the Gamma-Gamma CDF at scaled
/// argument `x = αβ·h̃`:
///
/// `F(h̃) ≈ [Γ(β−α) x^α / α + Γ(α−β) x^β / β] / (Γ(α)Γ(β))`.
pub fn gg_cdf_small_arg(x: f64, t: &TurbulenceParams) -> Result<f64, AnalysisError> {
    if x < 0.0 {
        return Err(AnalysisError::Domain(format!(
            "gg_cdf_small_arg requires x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (t.alpha, t.beta);
    let g_a = specfun::gamma(a).map_err(ChannelError::from)?;
    let g_b = specfun::gamma(b).map_err(ChannelError::from)?;
    let g_bma = specfun::gamma(b - a).map_err(ChannelError::from)?;
    let g_amb = specfun::gamma(a - b).map_err(ChannelError::from)?;
    Ok((g_bma * x.powf(a) / a + g_amb * x.powf(b) / b) / (g_a * g_b))
}

/// High-SNR outage closed forms, assuming equal
/// transmit powers (`γ = P²/δ_n²` common to both links).
///
/// No-floor regime: `P_i ≈ F_small(αβ √(γi_thr / (c_i γ)))`. Floor regime:
/// both BSs saturate at `F_ratio(√(c·γ1_thr)) − F_ratio(√(c/γ2_thr))` with
/// `c = c2/c1`. The floor evaluation runs the ratio-CDF quadrature under
/// the default [`QuadratureControl`].
pub fn outage_asymptotic(
    link1: &LinkBudget,
    link2: &LinkBudget,
    thr: &QosThresholds,
    t: &TurbulenceParams,
) -> Result<(AsymptoticOutage, AsymptoticOutage), AnalysisError> {
    let g1 = link1.electrical_snr();
    let g2 = link2.electrical_snr();
    if !(g1.is_finite() && g2.is_finite()) || ((g1 - g2) / g1).abs() > 1e-9 {
        return Err(AnalysisError::Domain(format!(
            "outage_asymptotic assumes equal transmit powers: gamma1 = {g1:e}, gamma2 = {g2:e}"
        )));
    }
    let gamma = g1;
    let ab = t.alpha * t.beta;
    if thr.threshold_product() < 1.0 {
        let p1 = gg_cdf_small_arg(ab * (thr.gamma1_thr / (link1.c * gamma)).sqrt(), t)?;
        let p2 = gg_cdf_small_arg(ab * (thr.gamma2_thr / (link2.c * gamma)).sqrt(), t)?;
        Ok((
            AsymptoticOutage {
                regime: OutageRegime::NoFloor,
                value: p1,
            },
            AsymptoticOutage {
                regime: OutageRegime::NoFloor,
                value: p2,
            },
        ))
    } else {
        let c = link2.c / link1.c;
        let quad = OutageQuadrature::new(*t, QuadratureControl::default())?;
        let hi = quad.ratio_cdf((c * thr.gamma1_thr).sqrt())?;
        let lo = quad.ratio_cdf((c / thr.gamma2_thr).sqrt())?;
        let floor = (hi - lo).max(0.0);
        let out = AsymptoticOutage {
            regime: OutageRegime::Floor,
            value: floor,
        };
        Ok((out, out))
    }
}
