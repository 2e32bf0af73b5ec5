//! Outage analysis for two-transmitter NOMA over free-space-optical
//! backhaul links with Gamma-Gamma turbulence.
//!
//! Three mutually cross-checking computation paths produce per-base-station
//! outage probabilities for the optimal dynamic decoding-order policy and
//! four baseline schemes:
//!
//! 1. **Monte Carlo** ([`montecarlo`]): unbiased event-frequency estimation
//!    with reproducible, parallelism-independent substreams;
//! 2. **Numerical quadrature** ([`analysis`]): semi-analytic evaluation of
//!    the outage decomposition integrals;
//! 3. **High-SNR closed forms** ([`analysis`]): asymptotes and outage-floor
//!    values.
//!
//! Supporting layers: [`specfun`] (gamma, erf, Bessel K, ₁F₂), [`quad`]
//! (adaptive Gauss–Kronrod), [`channel`] (link budget and the Gamma-Gamma
//! fading distribution), [`noma`] (SINRs, decoding-order policy, per-scheme
//! outage events) and [`cli`] (scenario files, sweep runner, CSV output).

// Domain guards use `!(v > 0.0)` deliberately: the negation also rejects
// NaN, which `v <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod montecarlo;
pub mod noma;
pub mod quad;
pub mod specfun;
