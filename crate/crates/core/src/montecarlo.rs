//! Monte Carlo outage estimation with reproducible parallel substreams.
//!
//! Sampling is partitioned into fixed-size chunks; each chunk owns a
//! private ChaCha stream derived from `(seed, chunk index)`, and chunk
//! results are integer event counts, so the estimate is a deterministic
//! function of `(seed, n_samples, chunk_size)` no matter how many worker
//! threads participate.

use crate::analysis::{outage_asymptotic, AnalysisError, OutageQuadrature, QuadratureControl};
use crate::channel::{GgSampler, LinkBudget, OpticsParams, TurbulenceParams};
use crate::channel::{link_budget, ChannelError};
use crate::noma::{outage_events, QosThresholds, Scheme, SicAssumption};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

/// Errors from Monte Carlo orchestration.
#[derive(Debug, Clone, PartialEq)]
pub enum McError {
    Domain(String),
    Channel(ChannelError),
    Analysis(AnalysisError),
}

impl fmt::Display for McError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McError::Domain(m) => write!(f, "domain error: {m}"),
            McError::Channel(e) => write!(f, "channel: {e}"),
            McError::Analysis(e) => write!(f, "analysis: {e}"),
        }
    }
}

impl std::error::Error for McError {}

impl From<ChannelError> for McError {
    fn from(e: ChannelError) -> Self {
        McError::Channel(e)
    }
}

impl From<AnalysisError> for McError {
    fn from(e: AnalysisError) -> Self {
        McError::Analysis(e)
    }
}

/// Sample count, seed and chunking of one estimation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Chunk size of the parallel partition; part of the reproducibility
    /// contract (changing it changes the substreams, changing the worker
    /// count does not).
    pub chunk_size: u64,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64, chunk_size: u64) -> Result<Self, McError> {
        if n_samples < 1 {
            return Err(McError::Domain("n_samples must be >= 1".into()));
        }
        if chunk_size < 1 {
            return Err(McError::Domain("chunk_size must be >= 1".into()));
        }
        Ok(McConfig {
            n_samples,
            seed,
            chunk_size,
        })
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 1_000_000,
            seed: 1,
            chunk_size: 65_536,
        }
    }
}

/// Estimated outage probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

impl OutageEstimate {
    fn from_events(events: u64, n: u64) -> Self {
        let p = events as f64 / n as f64;
        // Plug-in binomial error; for zero events fall back to the
        // rule-of-three bound instead of reporting zero uncertainty.
        let stderr = if events == 0 {
            3.0 / n as f64
        } else {
            (p * (1.0 - p) / n as f64).sqrt()
        };
        OutageEstimate {
            p_hat: p,
            stderr,
            n_samples: n,
        }
    }

    /// Fewer than ~10 events: the estimate is tail noise and sweeps flag it.
    pub fn is_tail_noise(&self) -> bool {
        self.p_hat * (self.n_samples as f64) < 10.0
    }
}

/// Derive the private stream of one chunk from the run seed and the chunk
/// counter (splitmix64 expansion of `seed ⊕ f(index)`).
pub fn chunk_rng(seed: u64, chunk_index: u64) -> ChaCha8Rng {
    let mut state = seed ^ chunk_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    let mut key = [0u8; 32];
    for word in 0..4 {
        key[word * 8..(word + 1) * 8].copy_from_slice(&next().to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn chunk_ranges(mc: &McConfig) -> Vec<(u64, u64)> {
    let n_chunks = mc.n_samples.div_ceil(mc.chunk_size);
    (0..n_chunks)
        .map(|i| {
            let len = mc.chunk_size.min(mc.n_samples - i * mc.chunk_size);
            (i, len)
        })
        .collect()
}

/// Estimate both BSs' outage probabilities for one scheme.
///
/// Draws `n_samples` independent fade pairs `(h̃1, h̃2)`, forms
/// `γ_i = e_i h̃_i²` and counts the per-scheme outage events.
pub fn estimate_outage(
    link1: &LinkBudget,
    link2: &LinkBudget,
    thr: &QosThresholds,
    t: &TurbulenceParams,
    scheme: Scheme,
    sic: SicAssumption,
    mc: &McConfig,
) -> Result<(OutageEstimate, OutageEstimate), McError> {
    let counts = count_events(link1, link2, thr, t, &[scheme], sic, mc);
    Ok((
        OutageEstimate::from_events(counts[0].0, mc.n_samples),
        OutageEstimate::from_events(counts[0].1, mc.n_samples),
    ))
}

/// Count outage events for several schemes over one shared set of draws.
///
/// Evaluating all schemes per draw makes scheme comparisons paired: the
/// interference-free bound is then below the optimal scheme exactly, not
/// just in expectation.
fn count_events(
    link1: &LinkBudget,
    link2: &LinkBudget,
    thr: &QosThresholds,
    t: &TurbulenceParams,
    schemes: &[Scheme],
    sic: SicAssumption,
    mc: &McConfig,
) -> Vec<(u64, u64)> {
    let sampler = GgSampler::new(*t);
    let (e1, e2) = (link1.e, link2.e);
    chunk_ranges(mc)
        .par_iter()
        .map(|&(index, len)| {
            let mut rng = chunk_rng(mc.seed, index);
            let mut counts = vec![(0u64, 0u64); schemes.len()];
            for _ in 0..len {
                let h1 = sampler.sample(&mut rng);
                let h2 = sampler.sample(&mut rng);
                let draw = crate::noma::ChannelDraw::new(e1 * h1 * h1, e2 * h2 * h2);
                for (slot, &scheme) in counts.iter_mut().zip(schemes) {
                    let ev = outage_events(&draw, thr, scheme, sic);
                    slot.0 += ev.bs1 as u64;
                    slot.1 += ev.bs2 as u64;
                }
            }
            counts
        })
        .reduce(
            || vec![(0u64, 0u64); schemes.len()],
            |mut acc, chunk| {
                for (a, c) in acc.iter_mut().zip(chunk) {
                    a.0 += c.0;
                    a.1 += c.1;
                }
                acc
            },
        )
}

// ---------------------------------------------------------------------------
// Power sweeps
// ---------------------------------------------------------------------------

/// Scenario geometry shared by every point of a power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTemplate {
    pub d1_m: f64,
    pub d2_m: f64,
    pub kappa_per_m: f64,
    pub optics: OpticsParams,
    pub turbulence: TurbulenceParams,
    pub r1_bits: f64,
    pub r2_bits: f64,
}

impl SweepTemplate {
    pub fn thresholds(&self) -> QosThresholds {
        QosThresholds::from_rates(self.r1_bits, self.r2_bits)
    }

    pub fn links(&self, p_dbm: f64) -> Result<(LinkBudget, LinkBudget), ChannelError> {
        Ok((
            link_budget(p_dbm, self.kappa_per_m, self.d1_m, &self.optics)?,
            link_budget(p_dbm, self.kappa_per_m, self.d2_m, &self.optics)?,
        ))
    }
}

/// One (power, scheme, BS) cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p_dbm: f64,
    pub scheme: Scheme,
    pub sic: SicAssumption,
    /// Base-station index, 1 or 2.
    pub bs: u8,
    pub estimate: OutageEstimate,
    /// Fewer than ~10 events: the Monte Carlo value is suppressed in
    /// reports.
    pub suppressed: bool,
    /// Quadrature outage (optimal dynamic scheme only).
    pub p_quad: Option<f64>,
    /// High-SNR asymptote (optimal dynamic scheme only), reported only
    /// where the expansion returns a probability; far below the
    /// asymptotic regime the closed form leaves (0, 1] and is meaningless.
    pub p_asym: Option<f64>,
}

/// Sweep outage estimates over transmit power for a set of schemes.
///
/// Every power point reuses the same seeds, so all points of a sweep (and
/// all schemes within a point) see identical fade draws. Quadrature and
/// asymptotic columns are attached for the optimal dynamic scheme.
pub fn sweep_power(
    template: &SweepTemplate,
    p_dbm_list: &[f64],
    schemes: &[Scheme],
    sic: SicAssumption,
    mc: &McConfig,
) -> Result<Vec<SweepRow>, McError> {
    if p_dbm_list.is_empty() {
        return Err(McError::Domain("empty power list".into()));
    }
    if schemes.is_empty() {
        return Err(McError::Domain("empty scheme list".into()));
    }
    let thr = template.thresholds();
    let quadrature = if schemes.contains(&Scheme::OptimalDynamicNoma) {
        Some(OutageQuadrature::new(
            template.turbulence,
            QuadratureControl::default(),
        )?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(p_dbm_list.len() * schemes.len() * 2);
    for &p_dbm in p_dbm_list {
        let (l1, l2) = template.links(p_dbm)?;
        let counts = count_events(&l1, &l2, &thr, &template.turbulence, schemes, sic, mc);
        for (&scheme, &(c1, c2)) in schemes.iter().zip(&counts) {
            let (quad, asym) = if scheme == Scheme::OptimalDynamicNoma {
                let q = quadrature
                    .as_ref()
                    .expect("evaluator exists when the optimal scheme is requested")
                    .outage_exact(&l1, &l2, &thr)?;
                let a = outage_asymptotic(&l1, &l2, &thr, &template.turbulence)?;
                let in_range = |v: f64| (v > 0.0 && v <= 1.0).then_some(v);
                (
                    (Some(q.0), Some(q.1)),
                    (in_range(a.0.value), in_range(a.1.value)),
                )
            } else {
                ((None, None), (None, None))
            };
            for (bs, events) in [(1u8, c1), (2u8, c2)] {
                let estimate = OutageEstimate::from_events(events, mc.n_samples);
                rows.push(SweepRow {
                    p_dbm,
                    scheme,
                    sic,
                    bs,
                    suppressed: estimate.is_tail_noise(),
                    estimate,
                    p_quad: if bs == 1 { quad.0 } else { quad.1 },
                    p_asym: if bs == 1 { asym.0 } else { asym.1 },
                });
            }
        }
    }
    Ok(rows)
}
