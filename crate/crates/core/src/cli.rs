//! Scenario files, the sweep runner and its CSV output.
//!
//! A scenario is a flat `key = value` text file (`#` starts a comment).
//! Distances are metres, the attenuation `kappa_per_m` is per metre, powers
//! are dBm, rates are bits/symbol. Rate values accept the forms `0.35`,
//! `crt`, `crt+0.05` and `crt-0.05`, where `crt` is the critical rate at
//! which the SINR threshold equals one.
//!
//! ```text
//! p_dbm_start = -6
//! p_dbm_stop  = 44
//! p_dbm_step  = 2
//! d1_m = 1000
//! d2_m = 2000
//! kappa_per_m = 4.2e-3
//! responsivity = 0.5
//! aperture_radius_m = 0.1
//! divergence_rad = 2e-3
//! noise_variance = 1e-14
//! alpha = 2.23
//! beta = 1.54
//! r1_bits = 0.1
//! r2_bits = 0.5
//! schemes = optimal,fixed,sorted,oma,bound
//! sic = imperfect
//! mc_samples = 1000000
//! mc_seed = 20250810
//! mc_chunk = 65536
//! ```
//!
//! `run` emits one CSV row per (power, scheme, BS) with the header
//! `power_dbm,scheme,sic,bs,p_out_mc,stderr,p_out_quad,p_out_asym,flag`.
//! The quadrature and asymptotic columns are populated only for the optimal
//! dynamic scheme; rows whose Monte Carlo estimate rests on fewer than ~10
//! events carry `flag = suppressed` and empty estimate cells.

use crate::analysis::OutageRegime;
use crate::channel::{link_budget, OpticsParams, TurbulenceParams};
use crate::montecarlo::{sweep_power, McConfig, McError, SweepRow, SweepTemplate};
use crate::noma::{critical_rate, QosThresholds, Scheme, SicAssumption};
use std::fmt;
use std::fmt::Write as _;

/// Configuration and numeric failures of the command-line front end.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable or invariant-violating configuration.
    Config(Vec<String>),
    /// A computation failed after the configuration was accepted.
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(items) => {
                writeln!(f, "invalid scenario:")?;
                for item in items {
                    writeln!(f, "  - {item}")?;
                }
                Ok(())
            }
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

/// A fully validated sweep scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub p_dbm_start: f64,
    pub p_dbm_stop: f64,
    pub p_dbm_step: f64,
    pub d1_m: f64,
    pub d2_m: f64,
    pub kappa_per_m: f64,
    pub optics: OpticsParams,
    pub turbulence: TurbulenceParams,
    pub r1_bits: f64,
    pub r2_bits: f64,
    pub schemes: Vec<Scheme>,
    pub sic: SicAssumption,
    pub mc: McConfig,
}

impl ScenarioConfig {
    /// Parse and validate a scenario file's text, collecting every
    /// violation rather than stopping at the first.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut problems: Vec<String> = Vec::new();
        let mut fields = std::collections::HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    let key = k.trim().to_string();
                    if fields.insert(key.clone(), v.trim().to_string()).is_some() {
                        problems.push(format!("line {}: duplicate key '{key}'", lineno + 1));
                    }
                }
                None => problems.push(format!("line {}: expected 'key = value'", lineno + 1)),
            }
        }

        const KNOWN: [&str; 18] = [
            "p_dbm_start",
            "p_dbm_stop",
            "p_dbm_step",
            "d1_m",
            "d2_m",
            "kappa_per_m",
            "responsivity",
            "aperture_radius_m",
            "divergence_rad",
            "noise_variance",
            "alpha",
            "beta",
            "r1_bits",
            "r2_bits",
            "schemes",
            "sic",
            "mc_samples",
            "mc_seed",
        ];
        for key in fields.keys() {
            if !KNOWN.contains(&key.as_str()) && key != "mc_chunk" {
                problems.push(format!("unknown key '{key}'"));
            }
        }

        let mut number = |key: &str| -> f64 {
            match fields.get(key) {
                Some(v) => match v.parse::<f64>() {
                    Ok(x) => x,
                    Err(_) => {
                        problems.push(format!("{key}: not a number: '{v}'"));
                        f64::NAN
                    }
                },
                None => {
                    problems.push(format!("missing key '{key}'"));
                    f64::NAN
                }
            }
        };

        let p_start = number("p_dbm_start");
        let p_stop = number("p_dbm_stop");
        let p_step = number("p_dbm_step");
        let d1 = number("d1_m");
        let d2 = number("d2_m");
        let kappa = number("kappa_per_m");
        let rho = number("responsivity");
        let radius = number("aperture_radius_m");
        let divergence = number("divergence_rad");
        let noise = number("noise_variance");
        let alpha = number("alpha");
        let beta = number("beta");

        let mut rate = |key: &str| -> f64 {
            match fields.get(key) {
                Some(v) => match parse_rate(v) {
                    Some(r) if r >= 0.0 => r,
                    _ => {
                        problems.push(format!(
                            "{key}: expected a nonnegative rate or crt[+/-delta], got '{v}'"
                        ));
                        f64::NAN
                    }
                },
                None => {
                    problems.push(format!("missing key '{key}'"));
                    f64::NAN
                }
            }
        };
        let r1 = rate("r1_bits");
        let r2 = rate("r2_bits");

        let schemes = match fields.get("schemes") {
            Some(v) => {
                let mut out = Vec::new();
                for token in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    match parse_scheme(token) {
                        Some(s) if out.contains(&s) => {
                            problems.push(format!("schemes: duplicate entry '{token}'"))
                        }
                        Some(s) => out.push(s),
                        None => problems.push(format!("schemes: unknown scheme '{token}'")),
                    }
                }
                if out.is_empty() {
                    problems.push("schemes: list must not be empty".into());
                }
                out
            }
            None => {
                problems.push("missing key 'schemes'".into());
                Vec::new()
            }
        };

        let sic = match fields.get("sic").map(String::as_str) {
            Some("perfect") => SicAssumption::Perfect,
            Some("imperfect") => SicAssumption::Imperfect,
            Some("worst-case") | Some("worstcase") => SicAssumption::WorstCase,
            Some(other) => {
                problems.push(format!(
                    "sic: expected perfect|imperfect|worst-case, got '{other}'"
                ));
                SicAssumption::Imperfect
            }
            None => {
                problems.push("missing key 'sic'".into());
                SicAssumption::Imperfect
            }
        };

        let mut integer = |key: &str, default: Option<u64>| -> u64 {
            match (fields.get(key), default) {
                (Some(v), _) => match v.parse::<u64>() {
                    Ok(x) => x,
                    Err(_) => {
                        problems.push(format!("{key}: not a nonnegative integer: '{v}'"));
                        1
                    }
                },
                (None, Some(d)) => d,
                (None, None) => {
                    problems.push(format!("missing key '{key}'"));
                    1
                }
            }
        };
        let mc_samples = integer("mc_samples", None);
        let mc_seed = integer("mc_seed", None);
        let mc_chunk = integer("mc_chunk", Some(65_536));

        // Range invariants that don't need the domain constructors.
        if p_step.is_finite() && p_step <= 0.0 {
            problems.push(format!("p_dbm_step: must be positive, got {p_step}"));
        }
        if p_start.is_finite() && p_stop.is_finite() && p_start > p_stop {
            problems.push(format!(
                "power range: start {p_start} exceeds stop {p_stop}"
            ));
        }
        for (name, v) in [("d1_m", d1), ("d2_m", d2)] {
            if v.is_finite() && v <= 0.0 {
                problems.push(format!("{name}: must be positive, got {v}"));
            }
        }
        if kappa.is_finite() && kappa < 0.0 {
            problems.push(format!("kappa_per_m: must be nonnegative, got {kappa}"));
        }

        let optics = OpticsParams::new(rho, radius, divergence, noise);
        if let Err(e) = &optics {
            if !rho.is_nan() && !radius.is_nan() && !divergence.is_nan() && !noise.is_nan() {
                problems.push(format!("optics: {e}"));
            }
        }
        let turbulence = TurbulenceParams::new(alpha, beta);
        if let Err(e) = &turbulence {
            if !alpha.is_nan() && !beta.is_nan() {
                problems.push(format!("turbulence: {e}"));
            }
        }
        let mc = McConfig::new(mc_samples, mc_seed, mc_chunk);
        if let Err(e) = &mc {
            problems.push(format!("mc: {e}"));
        }

        if !problems.is_empty() {
            return Err(CliError::Config(problems));
        }
        Ok(ScenarioConfig {
            p_dbm_start: p_start,
            p_dbm_stop: p_stop,
            p_dbm_step: p_step,
            d1_m: d1,
            d2_m: d2,
            kappa_per_m: kappa,
            optics: optics.expect("validated above"),
            turbulence: turbulence.expect("validated above"),
            r1_bits: r1,
            r2_bits: r2,
            schemes,
            sic,
            mc: mc.expect("validated above"),
        })
    }

    /// The inclusive power grid.
    pub fn powers(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut p = self.p_dbm_start;
        while p <= self.p_dbm_stop + 1e-9 * self.p_dbm_step {
            out.push(p);
            p += self.p_dbm_step;
        }
        out
    }

    pub fn template(&self) -> SweepTemplate {
        SweepTemplate {
            d1_m: self.d1_m,
            d2_m: self.d2_m,
            kappa_per_m: self.kappa_per_m,
            optics: self.optics,
            turbulence: self.turbulence,
            r1_bits: self.r1_bits,
            r2_bits: self.r2_bits,
        }
    }

    pub fn thresholds(&self) -> QosThresholds {
        QosThresholds::from_rates(self.r1_bits, self.r2_bits)
    }

    /// Human-readable report of the derived quantities: per-link losses and
    /// SNR coefficients at the start power, SINR thresholds and the
    /// floor-regime classification.
    pub fn check_report(&self) -> Result<String, CliError> {
        let thr = self.thresholds();
        let mut s = String::new();
        let links = [
            (1, self.d1_m),
            (2, self.d2_m),
        ];
        let _ = writeln!(
            s,
            "power sweep: {} .. {} dBm, step {} ({} points)",
            self.p_dbm_start,
            self.p_dbm_stop,
            self.p_dbm_step,
            self.powers().len()
        );
        for (i, d) in links {
            let lb = link_budget(self.p_dbm_start, self.kappa_per_m, d, &self.optics)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            let _ = writeln!(
                s,
                "link {i}: d = {d} m, path_loss = {:e}, geo_loss = {:e}, c = {:e}, e({} dBm) = {:e}",
                lb.path_loss, lb.geo_loss, lb.c, self.p_dbm_start, lb.e
            );
        }
        let _ = writeln!(
            s,
            "rates: R1 = {} bits/symbol, R2 = {} bits/symbol (critical rate {:.6})",
            self.r1_bits,
            self.r2_bits,
            critical_rate()
        );
        let _ = writeln!(
            s,
            "thresholds: gamma1_thr = {:.6}, gamma2_thr = {:.6}, product = {:.6}",
            thr.gamma1_thr,
            thr.gamma2_thr,
            thr.threshold_product()
        );
        let regime = if thr.threshold_product() < 1.0 {
            OutageRegime::NoFloor
        } else {
            OutageRegime::Floor
        };
        let _ = writeln!(s, "regime: {regime:?}");
        let _ = writeln!(
            s,
            "schemes: {} | sic: {} | mc: {} samples, seed {}, chunk {}",
            self.schemes
                .iter()
                .map(|s| s.label())
                .collect::<Vec<_>>()
                .join(","),
            self.sic.label(),
            self.mc.n_samples,
            self.mc.seed,
            self.mc.chunk_size
        );
        Ok(s)
    }

    /// Run the sweep and return the rows.
    pub fn run(&self) -> Result<Vec<SweepRow>, CliError> {
        Ok(sweep_power(
            &self.template(),
            &self.powers(),
            &self.schemes,
            self.sic,
            &self.mc,
        )?)
    }
}

fn parse_rate(v: &str) -> Option<f64> {
    let v = v.trim();
    if let Some(rest) = v.strip_prefix("crt") {
        let rest = rest.trim();
        if rest.is_empty() {
            return Some(critical_rate());
        }
        let delta: f64 = rest.parse().ok()?;
        return Some(critical_rate() + delta);
    }
    v.parse().ok()
}

fn parse_scheme(token: &str) -> Option<Scheme> {
    match token {
        "optimal" => Some(Scheme::OptimalDynamicNoma),
        "fixed" => Some(Scheme::FixedNoma),
        "sorted" => Some(Scheme::SortedDynamicNoma),
        "oma" => Some(Scheme::Oma),
        "bound" => Some(Scheme::InterferenceFreeBound),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "power_dbm,scheme,sic,bs,p_out_mc,stderr,p_out_quad,p_out_asym,flag";

/// Render sweep rows as CSV. Numeric cells use Rust's shortest
/// round-tripping float formatting, so re-parsing reproduces the exact
/// values and identical runs produce byte-identical files.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let (mc, se, flag) = if row.suppressed {
            (String::new(), String::new(), "suppressed")
        } else {
            (
                format!("{:e}", row.estimate.p_hat),
                format!("{:e}", row.estimate.stderr),
                "",
            )
        };
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.p_dbm,
            row.scheme.label(),
            row.sic.label(),
            row.bs,
            mc,
            se,
            opt(row.p_quad),
            opt(row.p_asym),
            flag
        );
    }
    out
}
