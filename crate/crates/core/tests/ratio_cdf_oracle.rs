//! Brute-force oracle for the fade-ratio CDF: the quadrature value at x = 2
//! must match the empirical CDF of h̃1/h̃2 over 1e7 sampled pairs.

use fso_noma::analysis::{OutageQuadrature, QuadratureControl};
use fso_noma::channel::{GgSampler, TurbulenceParams};
use fso_noma::montecarlo::chunk_rng;
use rayon::prelude::*;

#[test]
fn ratio_cdf_matches_empirical_cdf() {
    let t = TurbulenceParams::new(2.23, 1.54).unwrap();
    let sampler = GgSampler::new(t);
    let x = 2.0f64;
    let n_pairs: u64 = 10_000_000;
    let chunk = 250_000u64;
    let hits: u64 = (0..n_pairs / chunk)
        .into_par_iter()
        .map(|index| {
            let mut rng = chunk_rng(0x4a710, index);
            let mut h = 0u64;
            for _ in 0..chunk {
                let a = sampler.sample(&mut rng);
                let b = sampler.sample(&mut rng);
                if a / b <= x {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let empirical = hits as f64 / n_pairs as f64;
    let quad = OutageQuadrature::new(t, QuadratureControl::default()).unwrap();
    let analytic = quad.ratio_cdf(x).unwrap();
    let se = (empirical * (1.0 - empirical) / n_pairs as f64).sqrt();
    assert!(
        (empirical - analytic).abs() < 3.0 * se,
        "empirical {empirical} vs quadrature {analytic} (3σ = {:.2e})",
        3.0 * se
    );
}
