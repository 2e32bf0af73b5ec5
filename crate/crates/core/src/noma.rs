//! Per-realisation NOMA evaluation: achievable-rate thresholds, SINRs under
//! every decoding order and SIC assumption, the outage-optimal dynamic
//! decoding-order policy, and per-scheme outage events.
//!
//! Two base stations share one photodetector. With electrical SNRs
//! `γ1, γ2`, the first-decoded signal sees the other as interference
//! (`γ̂_i = γ_i/(γ_other+1)`), while the second-decoded signal's SINR
//! depends on whether the first decoding succeeded and on the SIC model.

use std::f64::consts::{E, PI};

/// How residual interference is modelled when the first decoding fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SicAssumption {
    /// Interference from the first-decoded signal is always removed.
    Perfect,
    /// A failed first decoding leaves its interference in place.
    Imperfect,
    /// A failed first decoding makes the second decoding fail outright.
    WorstCase,
}

impl SicAssumption {
    pub const ALL: [SicAssumption; 3] = [
        SicAssumption::Perfect,
        SicAssumption::Imperfect,
        SicAssumption::WorstCase,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SicAssumption::Perfect => "perfect",
            SicAssumption::Imperfect => "imperfect",
            SicAssumption::WorstCase => "worst-case",
        }
    }
}

/// Multiple-access scheme under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Decoding order chosen per realisation to jointly minimise both
    /// outage probabilities (CSI + QoS aware).
    OptimalDynamicNoma,
    /// BS1 (the closer one) always decoded first.
    FixedNoma,
    /// The BS with the higher instantaneous received power decoded first.
    SortedDynamicNoma,
    /// Half-time orthogonal access at doubled rate targets.
    Oma,
    /// Both signals decoded interference-free: lower bound on any scheme's
    /// outage.
    InterferenceFreeBound,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::OptimalDynamicNoma,
        Scheme::FixedNoma,
        Scheme::SortedDynamicNoma,
        Scheme::Oma,
        Scheme::InterferenceFreeBound,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Scheme::OptimalDynamicNoma => "optimal",
            Scheme::FixedNoma => "fixed",
            Scheme::SortedDynamicNoma => "sorted",
            Scheme::Oma => "oma",
            Scheme::InterferenceFreeBound => "bound",
        }
    }
}

/// Which base station is decoded first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodingOrder {
    /// Order (1,2): BS1 first, BS2 second.
    Bs1First,
    /// Order (2,1): BS2 first, BS1 second.
    Bs2First,
}

impl DecodingOrder {
    pub fn opposite(self) -> DecodingOrder {
        match self {
            DecodingOrder::Bs1First => DecodingOrder::Bs2First,
            DecodingOrder::Bs2First => DecodingOrder::Bs1First,
        }
    }
}

/// One realisation of the two electrical SNRs `γ_i = e_i h̃_i²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl ChannelDraw {
    pub fn new(gamma1: f64, gamma2: f64) -> Self {
        debug_assert!(gamma1 >= 0.0 && gamma2 >= 0.0);
        ChannelDraw { gamma1, gamma2 }
    }

    /// SINR of BS_i when decoded first: γ_i / (γ_other + 1).
    pub fn first_decoded_sinr(&self) -> (f64, f64) {
        (
            self.gamma1 / (self.gamma2 + 1.0),
            self.gamma2 / (self.gamma1 + 1.0),
        )
    }
}

/// Fixed-rate QoS targets and the equivalent SINR thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosThresholds {
    pub gamma1_thr: f64,
    pub gamma2_thr: f64,
    pub r1_bits: f64,
    pub r2_bits: f64,
}

impl QosThresholds {
    /// Thresholds from target rates in bits/symbol. A zero rate gives a zero
    /// threshold: that BS is never in outage.
    pub fn from_rates(r1_bits: f64, r2_bits: f64) -> Self {
        QosThresholds {
            gamma1_thr: threshold_from_rate(r1_bits),
            gamma2_thr: threshold_from_rate(r2_bits),
            r1_bits,
            r2_bits,
        }
    }

    /// γ1_thr · γ2_thr < 1 separates the no-floor and floor regimes.
    pub fn threshold_product(&self) -> f64 {
        self.gamma1_thr * self.gamma2_thr
    }
}

/// Per-base-station outage indicators (`true` = in outage).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutageEvents {
    pub bs1: bool,
    pub bs2: bool,
}

// ---------------------------------------------------------------------------
// Rate / threshold maps
// ---------------------------------------------------------------------------

/// Achievable IM/DD rate `R(Γ) = ½ log₂(1 + (e/2π)Γ)` in bits/symbol.
pub fn rate(sinr: f64) -> f64 {
    0.5 * (1.0 + E / (2.0 * PI) * sinr).log2()
}

/// Inverse of [`rate`]: the SINR threshold `(2π/e)(2^{2R} − 1)` for a target
/// rate `R`.
pub fn threshold_from_rate(r_bits: f64) -> f64 {
    2.0 * PI / E * ((2f64).powf(2.0 * r_bits) - 1.0)
}

/// The critical rate at which the SINR threshold equals one:
/// `R_crt = ½ log₂(1 + e/2π)`.
pub fn critical_rate() -> f64 {
    0.5 * (1.0 + E / (2.0 * PI)).log2()
}

// ---------------------------------------------------------------------------
// SINRs and the decoding-order policy
// ---------------------------------------------------------------------------

/// SINRs `(Γ1, Γ2)` for a given decoding order, SIC assumption and
/// first-decoding success flag `s`.
///
/// The first-decoded BS always sees the other signal as interference. The
/// second-decoded BS sees, depending on the assumption: nothing (perfect),
/// residual interference `(1−s)γ_other` (imperfect), or a forced failure
/// (worst case, SINR `s·γ`).
pub fn sinr(draw: &ChannelDraw, order: DecodingOrder, sic: SicAssumption, s: bool) -> (f64, f64) {
    let sf = if s { 1.0 } else { 0.0 };
    let second = |gamma_second: f64, gamma_first: f64| -> f64 {
        match sic {
            SicAssumption::Perfect => gamma_second,
            SicAssumption::Imperfect => gamma_second / ((1.0 - sf) * gamma_first + 1.0),
            SicAssumption::WorstCase => sf * gamma_second,
        }
    };
    match order {
        DecodingOrder::Bs1First => (
            draw.gamma1 / (draw.gamma2 + 1.0),
            second(draw.gamma2, draw.gamma1),
        ),
        DecodingOrder::Bs2First => (
            second(draw.gamma1, draw.gamma2),
            draw.gamma2 / (draw.gamma1 + 1.0),
        ),
    }
}

/// The outage-optimal decoding order.
///
/// With `γ̂_i` the first-decoded SINRs: decode BS1 first iff it alone meets
/// its threshold in first position; decode BS2 first iff it alone does.
/// When both or neither qualify, the outage events do not depend on the
/// order, and the tie breaks deterministically to (1,2) for
/// reproducibility.
pub fn optimal_order(draw: &ChannelDraw, thr: &QosThresholds) -> DecodingOrder {
    let (g1_first, g2_first) = draw.first_decoded_sinr();
    let bs1_ok = g1_first >= thr.gamma1_thr;
    let bs2_ok = g2_first >= thr.gamma2_thr;
    if !bs1_ok && bs2_ok {
        DecodingOrder::Bs2First
    } else {
        DecodingOrder::Bs1First
    }
}

/// Outage events for a forced decoding order, composing [`sinr`] with the
/// success flag `s` = "first-decoded BS meets its own threshold".
pub fn ordered_noma_events(
    draw: &ChannelDraw,
    thr: &QosThresholds,
    order: DecodingOrder,
    sic: SicAssumption,
) -> OutageEvents {
    let (g1_first, g2_first) = draw.first_decoded_sinr();
    let s = match order {
        DecodingOrder::Bs1First => g1_first >= thr.gamma1_thr,
        DecodingOrder::Bs2First => g2_first >= thr.gamma2_thr,
    };
    let (sinr1, sinr2) = sinr(draw, order, sic, s);
    OutageEvents {
        bs1: sinr1 < thr.gamma1_thr,
        bs2: sinr2 < thr.gamma2_thr,
    }
}

/// Per-scheme outage events for one channel realisation.
pub fn outage_events(
    draw: &ChannelDraw,
    thr: &QosThresholds,
    scheme: Scheme,
    sic: SicAssumption,
) -> OutageEvents {
    match scheme {
        Scheme::OptimalDynamicNoma => optimal_noma_events(draw, thr),
        Scheme::FixedNoma => ordered_noma_events(draw, thr, DecodingOrder::Bs1First, sic),
        Scheme::SortedDynamicNoma => {
            let order = if draw.gamma1 >= draw.gamma2 {
                DecodingOrder::Bs1First
            } else {
                DecodingOrder::Bs2First
            };
            ordered_noma_events(draw, thr, order, sic)
        }
        Scheme::Oma => OutageEvents {
            // Half-time slots at the same optical power, rates doubled to
            // keep the average data rate comparable.
            bs1: draw.gamma1 < threshold_from_rate(2.0 * thr.r1_bits),
            bs2: draw.gamma2 < threshold_from_rate(2.0 * thr.r2_bits),
        },
        Scheme::InterferenceFreeBound => OutageEvents {
            bs1: draw.gamma1 < thr.gamma1_thr,
            bs2: draw.gamma2 < thr.gamma2_thr,
        },
    }
}

/// Events under the optimal policy, by the four-case analysis.
///
/// - both first-decoded SINRs meet their thresholds: no outage at all (the
///   second-decoded SINR only improves);
/// - exactly one meets it: that BS is decoded first and survives; the other
///   is decoded second interference-free and is in outage iff its raw SNR
///   misses its threshold;
/// - neither meets it: both in outage.
///
/// These events are identical under the perfect, imperfect and worst-case
/// SIC assumptions (a signal that was not decoded cannot be subtracted), so
/// no `SicAssumption` parameter appears here.
fn optimal_noma_events(draw: &ChannelDraw, thr: &QosThresholds) -> OutageEvents {
    let (g1_first, g2_first) = draw.first_decoded_sinr();
    let bs1_ok = g1_first >= thr.gamma1_thr;
    let bs2_ok = g2_first >= thr.gamma2_thr;
    match (bs1_ok, bs2_ok) {
        (true, true) => OutageEvents {
            bs1: false,
            bs2: false,
        },
        (true, false) => OutageEvents {
            bs1: false,
            bs2: draw.gamma2 < thr.gamma2_thr,
        },
        (false, true) => OutageEvents {
            bs1: draw.gamma1 < thr.gamma1_thr,
            bs2: false,
        },
        (false, false) => OutageEvents {
            bs1: true,
            bs2: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state as f64 / u64::MAX as f64
    }

    // -- rate / threshold ----------------------------------------------------

    #[test]
    fn rate_known_points() {
        assert_eq!(rate(0.0), 0.0);
        // Γ = 2π/e forces the log argument to 2.
        assert!((rate(2.0 * PI / E) - 0.5).abs() < 1e-15);
        // Γ = 1 gives the critical rate ½ log₂(1 + e/2π) ≈ 0.2593.
        assert!((rate(1.0) - critical_rate()).abs() < 1e-15);
        assert!((critical_rate() - 0.259_332_016_918_756_4).abs() < 1e-14);
    }

    #[test]
    fn threshold_known_points() {
        assert_eq!(threshold_from_rate(0.0), 0.0);
        assert!((threshold_from_rate(critical_rate()) - 1.0).abs() < 1e-12);
        // The (R1,R2) = (0.1, 0.5) working point: product ≈ 0.7945 < 1.
        let thr = QosThresholds::from_rates(0.1, 0.5);
        assert!(
            (thr.threshold_product() - 0.794_468_965_596_77).abs() < 5e-4,
            "product = {}",
            thr.threshold_product()
        );
    }

    #[test]
    fn rate_threshold_inverse_pair() {
        let mut state = 0xa0761d6478bd642fu64;
        for _ in 0..2000 {
            let r = 4.0 * xorshift(&mut state);
            let back = rate(threshold_from_rate(r));
            assert!((back - r).abs() <= 1e-12 * r.max(1e-6), "r={r}, back={back}");
        }
    }

    // -- sinr ------------------------------------------------------------

    #[test]
    fn sinr_success_rows() {
        let draw = ChannelDraw::new(10.0, 3.0);
        for sic in SicAssumption::ALL {
            let (g1, g2) = sinr(&draw, DecodingOrder::Bs1First, sic, true);
            assert!((g1 - 10.0 / 4.0).abs() < 1e-15);
            assert!((g2 - 3.0).abs() < 1e-15, "{sic:?}");
        }
    }

    #[test]
    fn sinr_failure_rows() {
        let draw = ChannelDraw::new(10.0, 3.0);
        let (_, g2) = sinr(&draw, DecodingOrder::Bs1First, SicAssumption::WorstCase, false);
        assert_eq!(g2, 0.0);
        let (_, g2) = sinr(&draw, DecodingOrder::Bs1First, SicAssumption::Imperfect, false);
        assert!((g2 - 3.0 / 11.0).abs() < 1e-15);
        let (_, g2) = sinr(&draw, DecodingOrder::Bs1First, SicAssumption::Perfect, false);
        assert!((g2 - 3.0).abs() < 1e-15);
    }

    #[test]
    fn sinr_vanishing_interferer() {
        let draw = ChannelDraw::new(7.0, 0.0);
        let (g1, _) = sinr(&draw, DecodingOrder::Bs1First, SicAssumption::Perfect, true);
        assert_eq!(g1, 7.0);
    }

    #[test]
    fn second_position_never_worse_under_perfect_sic() {
        let mut state = 0x8764000b2bu64;
        for _ in 0..10_000 {
            let draw = ChannelDraw::new(50.0 * xorshift(&mut state), 50.0 * xorshift(&mut state));
            let (g1f, g2f) = draw.first_decoded_sinr();
            assert!(draw.gamma1 >= g1f && draw.gamma2 >= g2f);
        }
    }

    // -- optimal order ------------------------------------------------------

    #[test]
    fn optimal_order_hand_cases() {
        // γ̂1 = 5 ≥ 2 and γ̂2 = 1/11 < 3 → decode BS1 first.
        let thr = QosThresholds {
            gamma1_thr: 2.0,
            gamma2_thr: 3.0,
            r1_bits: 0.0,
            r2_bits: 0.0,
        };
        assert_eq!(
            optimal_order(&ChannelDraw::new(10.0, 1.0), &thr),
            DecodingOrder::Bs1First
        );
        // Mirror image → decode BS2 first.
        let thr = QosThresholds {
            gamma1_thr: 3.0,
            gamma2_thr: 2.0,
            r1_bits: 0.0,
            r2_bits: 0.0,
        };
        assert_eq!(
            optimal_order(&ChannelDraw::new(1.0, 10.0), &thr),
            DecodingOrder::Bs2First
        );
        // Dead channel: the "otherwise" branch ties to (1,2).
        let thr = QosThresholds {
            gamma1_thr: 1.0,
            gamma2_thr: 1.0,
            r1_bits: 0.0,
            r2_bits: 0.0,
        };
        assert_eq!(
            optimal_order(&ChannelDraw::new(0.0, 0.0), &thr),
            DecodingOrder::Bs1First
        );
    }

    // -- outage events ------------------------------------------------------

    #[test]
    fn optimal_events_pinned_cases() {
        let thr = QosThresholds {
            gamma1_thr: 1.0,
            gamma2_thr: 1.0,
            r1_bits: 0.0,
            r2_bits: 0.0,
        };
        for sic in SicAssumption::ALL {
            // Both decodable in first position → no outage.
            let ev = outage_events(
                &ChannelDraw::new(100.0, 30.0),
                &thr,
                Scheme::OptimalDynamicNoma,
                sic,
            );
            assert_eq!((ev.bs1, ev.bs2), (false, false));
            // Neither decodable in first position → both in outage, even
            // if a raw SNR clears its threshold.
            let ev = outage_events(
                &ChannelDraw::new(5.0, 5.0),
                &thr,
                Scheme::OptimalDynamicNoma,
                sic,
            );
            assert_eq!((ev.bs1, ev.bs2), (true, true));
        }
    }

    #[test]
    fn bound_events_trivial() {
        let thr = QosThresholds {
            gamma1_thr: 1.0,
            gamma2_thr: 1.0,
            r1_bits: 0.0,
            r2_bits: 0.0,
        };
        let ev = outage_events(
            &ChannelDraw::new(0.0, 5.0),
            &thr,
            Scheme::InterferenceFreeBound,
            SicAssumption::Imperfect,
        );
        assert_eq!((ev.bs1, ev.bs2), (true, false));
    }

    #[test]
    fn oma_uses_doubled_rates() {
        let thr = QosThresholds::from_rates(0.1, 0.5);
        let oma1 = threshold_from_rate(0.2);
        // γ1 between thr(0.1) and thr(0.2): in outage for OMA only.
        let g1 = 0.5 * (thr.gamma1_thr + oma1);
        let draw = ChannelDraw::new(g1, 1e9);
        let ev_oma = outage_events(&draw, &thr, Scheme::Oma, SicAssumption::Perfect);
        let ev_bound = outage_events(&draw, &thr, Scheme::InterferenceFreeBound, SicAssumption::Perfect);
        assert!(ev_oma.bs1 && !ev_bound.bs1);
    }

    #[test]
    fn zero_rate_never_in_outage() {
        let thr = QosThresholds::from_rates(0.0, 0.5);
        for scheme in Scheme::ALL {
            let ev = outage_events(
                &ChannelDraw::new(0.0, 0.0),
                &thr,
                scheme,
                SicAssumption::WorstCase,
            );
            assert!(!ev.bs1, "zero threshold must never trigger outage ({scheme:?})");
        }
    }

    #[test]
    fn sic_invariance_of_optimal_policy() {
        // The optimal policy's events must be bitwise identical across all
        // three SIC assumptions on a dense random sample.
        let mut state = 0x5851f42d4c957f2du64;
        for _ in 0..100_000 {
            let draw = ChannelDraw::new(
                30.0 * xorshift(&mut state),
                30.0 * xorshift(&mut state),
            );
            let thr = QosThresholds {
                gamma1_thr: 4.0 * xorshift(&mut state),
                gamma2_thr: 4.0 * xorshift(&mut state),
                r1_bits: 0.0,
                r2_bits: 0.0,
            };
            let base = outage_events(&draw, &thr, Scheme::OptimalDynamicNoma, SicAssumption::Perfect);
            for sic in [SicAssumption::Imperfect, SicAssumption::WorstCase] {
                let ev = outage_events(&draw, &thr, Scheme::OptimalDynamicNoma, sic);
                assert_eq!(base, ev, "SIC-dependent optimal events at {draw:?}");
            }
        }
    }

    #[test]
    fn optimal_matches_ordered_composition_under_imperfect_and_worst() {
        // The case-based optimal events must equal the literal SINR
        // composition with the chosen order under imperfect and worst-case
        // SIC (under perfect SIC the composition differs only in the
        // both-fail region, where no order can rescue either signal).
        let mut state = 0x1234_5678_9abc_def1u64;
        for _ in 0..100_000 {
            let draw = ChannelDraw::new(
                30.0 * xorshift(&mut state),
                30.0 * xorshift(&mut state),
            );
            let thr = QosThresholds {
                gamma1_thr: 4.0 * xorshift(&mut state),
                gamma2_thr: 4.0 * xorshift(&mut state),
                r1_bits: 0.0,
                r2_bits: 0.0,
            };
            let order = optimal_order(&draw, &thr);
            let case_based = outage_events(&draw, &thr, Scheme::OptimalDynamicNoma, SicAssumption::Imperfect);
            for sic in [SicAssumption::Imperfect, SicAssumption::WorstCase] {
                let composed = ordered_noma_events(&draw, &thr, order, sic);
                assert_eq!(case_based, composed, "composition mismatch at {draw:?} ({sic:?})");
            }
        }
    }

    #[test]
    fn bound_dominates_optimal_pointwise() {
        let mut state = 0xfeed_beef_cafe_f00du64;
        for _ in 0..100_000 {
            let draw = ChannelDraw::new(
                30.0 * xorshift(&mut state),
                30.0 * xorshift(&mut state),
            );
            let thr = QosThresholds {
                gamma1_thr: 4.0 * xorshift(&mut state),
                gamma2_thr: 4.0 * xorshift(&mut state),
                r1_bits: 0.0,
                r2_bits: 0.0,
            };
            let bound = outage_events(&draw, &thr, Scheme::InterferenceFreeBound, SicAssumption::Perfect);
            let optimal = outage_events(&draw, &thr, Scheme::OptimalDynamicNoma, SicAssumption::Perfect);
            // A bound outage implies an optimal-scheme outage.
            assert!(!bound.bs1 || optimal.bs1);
            assert!(!bound.bs2 || optimal.bs2);
        }
    }
}
