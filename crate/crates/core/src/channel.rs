//! Deterministic FSO link-budget terms and the Gamma-Gamma turbulence
//! distribution.
//!
//! The received-signal model is `h = ρ h̄ ĥ h̃` with
//!
//! - `h̄ = 10^(−κd/10)`, the weather-dependent path loss,
//! - `ĥ = erf(√π r / (√2 φ d))²`, the geometric (beam-divergence) loss,
//! - `h̃`, unit-mean Gamma-Gamma fading with shape parameters (α, β).
//!
//! The electrical SNR of a link is `γ = e·h̃²`, where the composite
//! coefficient `e = P² ρ² h̄² ĥ² / δ_n²` is precomputed per link by
//! [`link_budget`].

use crate::quad;
use crate::specfun::{self, BesselKNu, SeriesControl, SpecFunError};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use std::fmt;

/// Errors from the channel layer.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    Domain(String),
    /// A special-function evaluation failed.
    SpecFun(SpecFunError),
    /// The quadrature fallback did not converge.
    Quadrature(String),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::Domain(m) => write!(f, "domain error: {m}"),
            ChannelError::SpecFun(e) => write!(f, "special function: {e}"),
            ChannelError::Quadrature(m) => write!(f, "quadrature: {m}"),
        }
    }
}

impl std::error::Error for ChannelError {}

impl From<SpecFunError> for ChannelError {
    fn from(e: SpecFunError) -> Self {
        ChannelError::SpecFun(e)
    }
}

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// Receiver-side optics and noise parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticsParams {
    /// Photodetector responsivity ρ (scalar intensity-to-current factor).
    pub responsivity: f64,
    /// Detection aperture radius r in metres.
    pub aperture_radius_m: f64,
    /// Beam divergence angle φ in radians.
    pub divergence_rad: f64,
    /// Shot-noise variance δ_n² in A².
    pub noise_variance: f64,
}

impl OpticsParams {
    pub fn new(
        responsivity: f64,
        aperture_radius_m: f64,
        divergence_rad: f64,
        noise_variance: f64,
    ) -> Result<Self, ChannelError> {
        for (name, v) in [
            ("responsivity", responsivity),
            ("aperture_radius_m", aperture_radius_m),
            ("divergence_rad", divergence_rad),
            ("noise_variance", noise_variance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ChannelError::Domain(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(OpticsParams {
            responsivity,
            aperture_radius_m,
            divergence_rad,
            noise_variance,
        })
    }
}

/// Gamma-Gamma shape parameters.
///
/// `alpha - beta` must stay a non-integer: both the Bessel-order reduction
/// and the small-argument CDF series degenerate at integer differences, and
/// the physical parameter maps never produce them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceParams {
    pub alpha: f64,
    pub beta: f64,
}

impl TurbulenceParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, ChannelError> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(ChannelError::Domain(format!(
                "turbulence shapes must be positive, got alpha={alpha}, beta={beta}"
            )));
        }
        let diff = alpha - beta;
        if (diff - diff.round()).abs() < specfun::BESSEL_INTEGER_ORDER_GUARD {
            return Err(ChannelError::Domain(format!(
                "alpha - beta = {diff} is (nearly) an integer; the Gamma-Gamma \
                 evaluation requires a non-integer difference"
            )));
        }
        Ok(TurbulenceParams { alpha, beta })
    }
}

/// Deterministic per-link gains and composite SNR coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Path loss h̄ ∈ (0, 1].
    pub path_loss: f64,
    /// Geometric loss ĥ ∈ (0, 1].
    pub geo_loss: f64,
    /// Electrical-SNR coefficient: γ = e·h̃².
    pub e: f64,
    /// Power-independent coefficient c = ρ² h̄² ĥ² (so e = (P²/δ_n²)·c).
    pub c: f64,
}

impl LinkBudget {
    /// Electrical SNR factor γ = P²/δ_n² = e/c.
    pub fn electrical_snr(&self) -> f64 {
        self.e / self.c
    }
}

// ---------------------------------------------------------------------------
// Deterministic losses
// ---------------------------------------------------------------------------

/// Path loss `10^(−κ d / 10)` for attenuation κ (per metre) over d metres.
pub fn path_loss(kappa_per_m: f64, d_m: f64) -> Result<f64, ChannelError> {
    if kappa_per_m < 0.0 || d_m < 0.0 || !kappa_per_m.is_finite() || !d_m.is_finite() {
        return Err(ChannelError::Domain(format!(
            "path_loss requires kappa >= 0 and d >= 0, got ({kappa_per_m}, {d_m})"
        )));
    }
    Ok(10f64.powf(-kappa_per_m * d_m / 10.0))
}

/// Geometric loss `erf(√π r / (√2 φ d))²` from beam divergence.
pub fn geometric_loss(r_m: f64, phi_rad: f64, d_m: f64) -> Result<f64, ChannelError> {
    if !(r_m > 0.0) || !(phi_rad > 0.0) || !(d_m > 0.0) {
        return Err(ChannelError::Domain(format!(
            "geometric_loss requires positive r, phi, d, got ({r_m}, {phi_rad}, {d_m})"
        )));
    }
    let arg = std::f64::consts::PI.sqrt() * r_m / (2f64.sqrt() * phi_rad * d_m);
    let e = specfun::erf(arg);
    Ok(e * e)
}

/// Compose the deterministic losses into per-link SNR coefficients.
///
/// `p_dbm` is the optical transmit power in dBm; the electrical SNR goes
/// with the square of the optical power, `e = P_watt² ρ² h̄² ĥ² / δ_n²`,
/// matching `γ = P²|h|²/δ_n²` with `h = ρ h̄ ĥ h̃`.
pub fn link_budget(
    p_dbm: f64,
    kappa_per_m: f64,
    d_m: f64,
    optics: &OpticsParams,
) -> Result<LinkBudget, ChannelError> {
    let hbar = path_loss(kappa_per_m, d_m)?;
    let hhat = geometric_loss(optics.aperture_radius_m, optics.divergence_rad, d_m)?;
    let p_watt = 10f64.powf((p_dbm - 30.0) / 10.0);
    let c = (optics.responsivity * hbar * hhat).powi(2);
    let e = p_watt * p_watt * c / optics.noise_variance;
    Ok(LinkBudget {
        path_loss: hbar,
        geo_loss: hhat,
        e,
        c,
    })
}

// ---------------------------------------------------------------------------
// Gamma-Gamma distribution
// ---------------------------------------------------------------------------

/// Gamma-Gamma fading distribution with precomputed constants.
///
/// The density is
/// `f(h) = 2(αβ)^((α+β)/2) / (Γ(α)Γ(β)) · h^((α+β)/2−1) K_{α−β}(2√(αβh))`,
/// which is the law of the product of two independent unit-mean Gamma
/// variates with shapes α and β.
#[derive(Debug, Clone)]
pub struct GammaGamma {
    params: TurbulenceParams,
    /// αβ
    ab: f64,
    /// (α+β)/2
    s: f64,
    /// 2(αβ)^s / (Γ(α)Γ(β))
    pdf_norm: f64,
    /// Γ(α)Γ(β)
    gamma_a_gamma_b: f64,
    /// Γ(α−β) and Γ(β−α) for the CDF series.
    gamma_amb: f64,
    gamma_bma: f64,
    bessel: BesselKNu,
}

impl GammaGamma {
    pub fn new(params: TurbulenceParams) -> Result<Self, ChannelError> {
        let (a, b) = (params.alpha, params.beta);
        let ab = a * b;
        let s = 0.5 * (a + b);
        let lg_a = specfun::ln_gamma(a)?;
        let lg_b = specfun::ln_gamma(b)?;
        let pdf_norm = (s * ab.ln() - lg_a - lg_b).exp() * 2.0;
        let gamma_amb = specfun::gamma(a - b)?;
        let gamma_bma = specfun::gamma(b - a)?;
        let bessel = BesselKNu::new(a - b)?;
        Ok(GammaGamma {
            params,
            ab,
            s,
            pdf_norm,
            gamma_a_gamma_b: (lg_a + lg_b).exp(),
            gamma_amb,
            gamma_bma,
            bessel,
        })
    }

    pub fn params(&self) -> TurbulenceParams {
        self.params
    }

    /// Probability density at `h > 0`.
    pub fn pdf(&self, h: f64) -> Result<f64, ChannelError> {
        if !(h > 0.0) {
            return Err(ChannelError::Domain(format!("gg_pdf requires h > 0, got {h}")));
        }
        let x = 2.0 * (self.ab * h).sqrt();
        match self.bessel.eval(x) {
            Ok(k) => Ok(self.pdf_norm * h.powf(self.s - 1.0) * k),
            // Deep in the tail K underflows; the density is zero there.
            Err(SpecFunError::Underflow(_)) => Ok(0.0),
            Err(e) => Err(e.into()),
        }
    }

    /// Distribution function at `h >= 0`.
    ///
    /// Uses the two-term residue series
    /// `F(h) = [Γ(β−α)(αβh)^α/α ₁F₂(α; α+1, α−β+1; αβh)
    ///        + Γ(α−β)(αβh)^β/β ₁F₂(β; β+1, β−α+1; αβh)] / (Γ(α)Γ(β))`
    /// and falls back to adaptive quadrature of the density when the series
    /// either fails to converge within `ctrl.max_terms` or loses too many
    /// digits to cancellation between the two terms.
    pub fn cdf(&self, h: f64, ctrl: &SeriesControl) -> Result<f64, ChannelError> {
        if h < 0.0 {
            return Err(ChannelError::Domain(format!("gg_cdf requires h >= 0, got {h}")));
        }
        if h == 0.0 {
            return Ok(0.0);
        }
        if let Some(v) = self.cdf_series(h, ctrl) {
            return Ok(v);
        }
        self.cdf_by_quadrature(h)
    }

    /// Series branch; `None` when the evaluation cannot hit `ctrl.rel_tol`.
    fn cdf_series(&self, h: f64, ctrl: &SeriesControl) -> Option<f64> {
        let (a, b) = (self.params.alpha, self.params.beta);
        let z = self.ab * h;
        // The two series terms cancel, so each must be summed to machine
        // precision regardless of ctrl.rel_tol; the user tolerance governs
        // the cancellation guard below.
        let inner = SeriesControl::new(ctrl.max_terms, 1e-16).expect("valid literal control");
        let f_a = specfun::hyp1f2(a, a + 1.0, a - b + 1.0, z, &inner).ok()?;
        let f_b = specfun::hyp1f2(b, b + 1.0, b - a + 1.0, z, &inner).ok()?;
        let t_a = self.gamma_bma * z.powf(a) / a * f_a;
        let t_b = self.gamma_amb * z.powf(b) / b * f_b;
        let sum = t_a + t_b;
        // Cancellation guard: the two terms grow like e^(2√z) while their sum
        // stays in [0, Γ(α)Γ(β)]; bail out once the lost digits threaten the
        // requested tolerance.
        let cancellation = (t_a.abs() + t_b.abs()) * 1e-15;
        if sum <= 0.0 || cancellation > ctrl.rel_tol * sum.abs() {
            return None;
        }
        Some((sum / self.gamma_a_gamma_b).min(1.0))
    }

    fn cdf_by_quadrature(&self, h: f64) -> Result<f64, ChannelError> {
        // For large h, 1 − ∫_h^∞ f is much better conditioned than ∫_0^h f.
        if h >= 1.0 {
            Ok((1.0 - self.survival_by_quadrature(h)?).clamp(0.0, 1.0))
        } else {
            let v = quad::integrate(
                |t| if t > 0.0 { self.pdf(t).unwrap_or(0.0) } else { 0.0 },
                0.0,
                h,
                1e-13,
                1e-11,
                4000,
            )
            .map_err(|e| ChannelError::Quadrature(e.to_string()))?;
            Ok(v.clamp(0.0, 1.0))
        }
    }

    /// P(h̃ > h) by integrating the density over the exponentially decaying
    /// tail. The upper limit leaves a relative remainder below ~1e-17.
    pub fn survival(&self, h: f64) -> Result<f64, ChannelError> {
        if h < 0.0 {
            return Err(ChannelError::Domain(format!(
                "survival requires h >= 0, got {h}"
            )));
        }
        if h == 0.0 {
            return Ok(1.0);
        }
        self.survival_by_quadrature(h)
    }

    fn survival_by_quadrature(&self, h: f64) -> Result<f64, ChannelError> {
        // The tail decays like exp(−2√(αβ t)); √ of the upper limit sits
        // 20 e-foldings past √h.
        let upper = (h.sqrt() + 20.0 / self.ab.sqrt()).powi(2);
        let v = quad::integrate(
            |t| if t > 0.0 { self.pdf(t).unwrap_or(0.0) } else { 0.0 },
            h,
            upper,
            1e-300,
            1e-11,
            4000,
        )
        .map_err(|e| ChannelError::Quadrature(e.to_string()))?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Smallest grid value whose upper tail mass is below `tail_prob`,
    /// located by bisection on [`Self::survival`].
    pub fn upper_quantile(&self, tail_prob: f64) -> Result<f64, ChannelError> {
        if !(tail_prob > 0.0 && tail_prob < 1.0) {
            return Err(ChannelError::Domain(format!(
                "tail probability must be in (0,1), got {tail_prob}"
            )));
        }
        let mut lo = 1.0f64;
        let mut hi = 2.0f64;
        while self.survival(hi)? > tail_prob {
            lo = hi;
            hi *= 2.0;
            if hi > 1e9 {
                return Err(ChannelError::Quadrature(
                    "upper_quantile bracket expansion failed".into(),
                ));
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.survival(mid)? > tail_prob {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-3 * hi {
                break;
            }
        }
        Ok(hi)
    }

    /// Sampler drawing `h̃ = X·Y`, X ~ Gamma(α, 1/α), Y ~ Gamma(β, 1/β).
    pub fn sampler(&self) -> GgSampler {
        GgSampler::new(self.params)
    }
}

/// Product-of-Gammas sampler for the Gamma-Gamma law.
///
/// Exact (not an approximation): the product of independent unit-mean Gamma
/// variates with shapes α and β has exactly the Gamma-Gamma density.
#[derive(Debug, Clone)]
pub struct GgSampler {
    large: Gamma<f64>,
    small: Gamma<f64>,
}

impl GgSampler {
    pub fn new(params: TurbulenceParams) -> Self {
        GgSampler {
            large: Gamma::new(params.alpha, 1.0 / params.alpha)
                .expect("validated turbulence shape"),
            small: Gamma::new(params.beta, 1.0 / params.beta)
                .expect("validated turbulence shape"),
        }
    }

    /// One fading realisation. Consumes exactly two Gamma draws, in a fixed
    /// order, so sequences are reproducible per seeded stream.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.large.sample(rng) * self.small.sample(rng)
    }
}

// ---------------------------------------------------------------------------
// Free-function wrappers
// ---------------------------------------------------------------------------

/// Gamma-Gamma density (one-shot wrapper; hot paths should hold a
/// [`GammaGamma`]).
pub fn gg_pdf(h: f64, t: &TurbulenceParams) -> Result<f64, ChannelError> {
    GammaGamma::new(*t)?.pdf(h)
}

/// Gamma-Gamma distribution function.
pub fn gg_cdf(h: f64, t: &TurbulenceParams, ctrl: &SeriesControl) -> Result<f64, ChannelError> {
    GammaGamma::new(*t)?.cdf(h, ctrl)
}

/// One Gamma-Gamma draw from the given stream.
pub fn gg_sample<R: Rng + ?Sized>(t: &TurbulenceParams, rng: &mut R) -> f64 {
    GgSampler::new(*t).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table_i() -> TurbulenceParams {
        TurbulenceParams::new(2.23, 1.54).unwrap()
    }

    fn table_i_optics() -> OpticsParams {
        OpticsParams::new(0.5, 0.1, 2e-3, 1e-14).unwrap()
    }

    // -- deterministic losses ------------------------------------------------

    #[test]
    fn path_loss_values() {
        assert_eq!(path_loss(0.0, 1000.0).unwrap(), 1.0);
        assert_eq!(path_loss(4.2e-3, 0.0).unwrap(), 1.0);
        // 10^(-0.42), the haze coefficient over 1 km.
        let v = path_loss(4.2e-3, 1000.0).unwrap();
        assert!((v - 0.380_189_396_320_561_2).abs() < 1e-14, "{v}");
        assert!(path_loss(-1.0, 10.0).is_err());
        assert!(path_loss(1.0, -10.0).is_err());
    }

    #[test]
    fn geometric_loss_values() {
        // d -> 0 approaches erf(inf)^2 = 1, r -> 0 approaches 0.
        assert!((geometric_loss(0.1, 2e-3, 1e-9).unwrap() - 1.0).abs() < 1e-14);
        assert!(geometric_loss(1e-12, 2e-3, 1000.0).unwrap() < 1e-20);
        let v = geometric_loss(0.1, 2e-3, 1000.0).unwrap();
        assert!(
            (v - 4.986_933_984_668_362e-3).abs() < 1e-15,
            "geo loss at Table-I optics = {v}"
        );
        assert!(geometric_loss(0.0, 2e-3, 1000.0).is_err());
    }

    #[test]
    fn loss_monotone_in_distance() {
        let mut prev_pl = f64::INFINITY;
        let mut prev_gl = f64::INFINITY;
        for i in 1..200 {
            let d = 25.0 * i as f64;
            let pl = path_loss(4.2e-3, d).unwrap();
            let gl = geometric_loss(0.1, 2e-3, d).unwrap();
            assert!(pl <= prev_pl && gl <= prev_gl, "losses must not grow with d");
            prev_pl = pl;
            prev_gl = gl;
        }
    }

    #[test]
    fn link_budget_composition() {
        let optics = table_i_optics();
        // All losses unity in the d -> 0 limit at 1 mW.
        let lb = link_budget(0.0, 0.0, 1e-9, &optics).unwrap();
        let want = 0.25 * 1e-6 / 1e-14;
        assert!(((lb.e - want) / want).abs() < 1e-12);

        // Table-I optics, haze, 1 km at 0 dBm: e ≈ 89.87.
        let lb = link_budget(0.0, 4.2e-3, 1000.0, &optics).unwrap();
        assert!(
            (lb.e - 89.868_449_132_910_72).abs() < 1e-9,
            "e = {}",
            lb.e
        );
        assert!((lb.electrical_snr() - 1e8).abs() < 1e-4);

        // +10 dB on the optical power scales e by exactly 100.
        let lb10 = link_budget(10.0, 4.2e-3, 1000.0, &optics).unwrap();
        assert!(((lb10.e / lb.e) - 100.0).abs() < 1e-10);
    }

    #[test]
    fn link_budget_power_scaling_property() {
        let optics = table_i_optics();
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state as f64 / u64::MAX as f64
        };
        for _ in 0..200 {
            let p1 = -20.0 + 60.0 * next();
            let p2 = -20.0 + 60.0 * next();
            let e1 = link_budget(p1, 1e-3, 800.0, &optics).unwrap().e;
            let e2 = link_budget(p2, 1e-3, 800.0, &optics).unwrap().e;
            let want = 10f64.powf((p1 - p2) / 5.0); // (P1/P2)^2 in dB terms
            assert!(((e1 / e2) / want - 1.0).abs() < 1e-10);
        }
    }

    // -- Gamma-Gamma ----------------------------------------------------------

    #[test]
    fn turbulence_params_validation() {
        assert!(TurbulenceParams::new(2.23, 1.54).is_ok());
        assert!(TurbulenceParams::new(-1.0, 1.0).is_err());
        assert!(TurbulenceParams::new(2.0, 2.0).is_err());
        assert!(TurbulenceParams::new(3.54, 1.54).is_err()); // integer difference
        assert!(TurbulenceParams::new(2.54, 1.5400000001).is_err()); // nearly integer
    }

    #[test]
    fn pdf_normalisation_and_mean() {
        let gg = GammaGamma::new(table_i()).unwrap();
        let mass = quad::integrate(|h| gg.pdf(h).unwrap_or(0.0), 1e-12, 120.0, 1e-10, 1e-10, 4000)
            .unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "total mass {mass}");
        let mean = quad::integrate(
            |h| h * gg.pdf(h).unwrap_or(0.0),
            1e-12,
            140.0,
            1e-10,
            1e-10,
            4000,
        )
        .unwrap();
        assert!((mean - 1.0).abs() < 1e-8, "mean {mean}");
    }

    #[test]
    fn pdf_against_product_convolution_oracle() {
        // h̃ = X·Y ⇒ f(h) = ∫ f_X(x) f_Y(h/x) dx/x with Gamma factor
        // densities; evaluated by quadrature, independent of the Bessel path.
        let (a, b) = (2.23, 1.54);
        // Unit-mean Gamma density: shape^shape/Γ(shape) x^(shape−1) e^(−shape x).
        let gamma_pdf = |shape: f64, x: f64| -> f64 {
            if x <= 0.0 {
                0.0
            } else {
                (shape * shape.ln() - specfun::ln_gamma(shape).unwrap() + (shape - 1.0) * x.ln()
                    - shape * x)
                    .exp()
            }
        };
        let h = 1.0;
        let oracle = quad::integrate(
            |x| {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_pdf(a, x) * gamma_pdf(b, h / x) / x
                }
            },
            1e-10,
            60.0,
            1e-12,
            1e-10,
            4000,
        )
        .unwrap();
        let gg = GammaGamma::new(table_i()).unwrap();
        let got = gg.pdf(h).unwrap();
        assert!(
            ((got - oracle) / oracle).abs() < 1e-8,
            "pdf(1) = {got} vs convolution {oracle}"
        );
        assert!((got - 0.338_073_695_100_744_3).abs() < 1e-9);
    }

    #[test]
    fn cdf_series_matches_quadrature() {
        let gg = GammaGamma::new(table_i()).unwrap();
        let ctrl = SeriesControl::default();
        // Table-I spot value, frozen from density quadrature.
        let got = gg.cdf(0.5, &ctrl).unwrap();
        assert!(
            (got - 0.430_100_794_707_004_5).abs() < 1e-9,
            "cdf(0.5) = {got}"
        );
        // 100-point grid on (0, 10]: series vs direct density quadrature.
        let mut worst = 0.0f64;
        for i in 1..=100 {
            let h = 0.1 * i as f64;
            let series = gg.cdf(h, &ctrl).unwrap();
            let direct = quad::integrate(
                |t| if t > 0.0 { gg.pdf(t).unwrap_or(0.0) } else { 0.0 },
                0.0,
                h,
                1e-12,
                1e-10,
                4000,
            )
            .unwrap();
            worst = worst.max((series - direct).abs());
        }
        assert!(worst < 1e-7, "max |series - quadrature| = {worst:e}");
    }

    #[test]
    fn cdf_limits_and_monotonicity() {
        let gg = GammaGamma::new(table_i()).unwrap();
        let ctrl = SeriesControl::default();
        assert_eq!(gg.cdf(0.0, &ctrl).unwrap(), 0.0);
        assert!(1.0 - gg.cdf(50.0, &ctrl).unwrap() < 1e-8);
        let mut prev = 0.0;
        for i in 1..300 {
            let h = 0.05 * i as f64;
            let v = gg.cdf(h, &ctrl).unwrap();
            assert!(v >= prev - 1e-12, "cdf must be nondecreasing at h={h}");
            prev = v;
        }
        assert!(gg.cdf(-0.1, &ctrl).is_err());
    }

    #[test]
    fn survival_complements_cdf() {
        let gg = GammaGamma::new(table_i()).unwrap();
        let ctrl = SeriesControl::default();
        for &h in &[0.3, 1.0, 3.0, 8.0] {
            let c = gg.cdf(h, &ctrl).unwrap();
            let s = gg.survival(h).unwrap();
            assert!((c + s - 1.0).abs() < 1e-9, "cdf+survival at {h}: {}", c + s);
        }
    }

    #[test]
    fn upper_quantile_bounds_tail() {
        let gg = GammaGamma::new(table_i()).unwrap();
        let q = gg.upper_quantile(1e-12).unwrap();
        assert!(gg.survival(q).unwrap() <= 1e-12);
        // And not absurdly loose: the 1e-12 quantile sits near 100.
        assert!(q > 60.0 && q < 200.0, "quantile {q}");
    }

    #[test]
    fn sampler_statistics() {
        let t = table_i();
        let gg = GammaGamma::new(t).unwrap();
        let sampler = gg.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut below_one = 0usize;
        for _ in 0..n {
            let v = sampler.sample(&mut rng);
            sum += v;
            if v <= 1.0 {
                below_one += 1;
            }
        }
        let mean = sum / n as f64;
        // Var = (1+1/α)(1+1/β) − 1 for the unit-mean product.
        let var = (1.0 + 1.0 / t.alpha) * (1.0 + 1.0 / t.beta) - 1.0;
        let tol = 3.0 * (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < tol, "sample mean {mean}, tol {tol}");

        let p = below_one as f64 / n as f64;
        let want = gg.cdf(1.0, &SeriesControl::default()).unwrap();
        let se = (want * (1.0 - want) / n as f64).sqrt();
        assert!(
            (p - want).abs() < 3.0 * se,
            "empirical cdf(1) = {p}, analytic {want}"
        );
    }

    #[test]
    fn sub_unity_shape_parameter() {
        // beta < 1 makes the density singular (but integrable) at the
        // origin; the distribution machinery must still normalise.
        let gg = GammaGamma::new(TurbulenceParams::new(4.2, 0.6).unwrap()).unwrap();
        let p = gg.pdf(0.01).unwrap();
        assert!(
            ((p - 3.501_157_886_626_240_2) / p).abs() < 1e-9,
            "pdf(0.01) = {p}"
        );
        let c = gg.cdf(1.0, &SeriesControl::default()).unwrap();
        assert!(
            (c - 0.696_217_113_195_455_5).abs() < 1e-8,
            "cdf(1.0) = {c}"
        );
        let s = gg.survival(1.0).unwrap();
        assert!((c + s - 1.0).abs() < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sampler = gg.sampler();
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| sampler.sample(&mut rng)).sum::<f64>() / n as f64;
        let var = (1.0 + 1.0 / 4.2) * (1.0 + 1.0 / 0.6) - 1.0;
        assert!((mean - 1.0).abs() < 3.0 * (var / n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn shape_parameters_commute() {
        // The product construction makes the law symmetric in (alpha, beta).
        let a = GammaGamma::new(TurbulenceParams::new(2.23, 1.54).unwrap()).unwrap();
        let b = GammaGamma::new(TurbulenceParams::new(1.54, 2.23).unwrap()).unwrap();
        let ctrl = SeriesControl::default();
        for &h in &[0.2, 1.0, 4.0] {
            let pa = a.pdf(h).unwrap();
            let pb = b.pdf(h).unwrap();
            assert!(((pa - pb) / pa).abs() < 1e-12, "pdf asymmetry at {h}");
            let ca = a.cdf(h, &ctrl).unwrap();
            let cb = b.cdf(h, &ctrl).unwrap();
            assert!((ca - cb).abs() < 1e-10, "cdf asymmetry at {h}");
        }
    }

    #[test]
    fn sampler_kolmogorov_smirnov() {
        // KS statistic of 1e5 draws against the analytic CDF stays below
        // the 1% critical value 1.628/√n.
        let gg = GammaGamma::new(table_i()).unwrap();
        let sampler = gg.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let n = 100_000usize;
        let mut draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ctrl = SeriesControl::default();
        let mut d_stat = 0.0f64;
        for (i, &x) in draws.iter().enumerate() {
            let f = gg.cdf(x, &ctrl).unwrap();
            let hi = (i as f64 + 1.0) / n as f64 - f;
            let lo = f - i as f64 / n as f64;
            d_stat = d_stat.max(hi.max(lo));
        }
        let critical = 1.628 / (n as f64).sqrt();
        assert!(
            d_stat < critical,
            "KS statistic {d_stat} exceeds 1% critical value {critical}"
        );
    }

    #[test]
    fn sampler_is_deterministic() {
        let t = table_i();
        let s = GgSampler::new(t);
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(s.sample(&mut r1), s.sample(&mut r2));
        }
    }
}
