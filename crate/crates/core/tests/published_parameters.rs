//! The bandwidth grid search on generated benchmark data lands near the
//! published workflow bandwidths (a loose factor-2 check; the generator
//! is stochastic).

use phasewalk_core::pipeline::{run, Method, RunConfig};
use phasewalk_core::synth::{generate_network, preset, Preset};

#[test]
fn auto_bandwidth_matches_published_values_on_community_split() {
    let scenario = preset::<f64>(Preset::CommunitySplit, 1);
    let net = generate_network(&scenario).unwrap().network;

    // Transition-matrix encodings at the published exploration time.
    let mut lne = RunConfig::new(Method::Lne);
    lne.tau = Some(100.0);
    lne.tau_temp = Some(2.5);
    lne.phases = Some(2);
    lne.seed = 1;
    let resolved = run(&lne, &net).unwrap().resolved;
    assert!(resolved.sigma_auto);
    assert!(
        resolved.sigma >= 0.77 / 2.0 && resolved.sigma <= 0.77 * 2.0,
        "selected LNE bandwidth {} not within a factor 2 of 0.77",
        resolved.sigma
    );

    // Invariant-measure encodings.
    let mut imc = RunConfig::new(Method::Imc);
    imc.tau_temp = Some(3.0);
    imc.phases = Some(2);
    imc.seed = 1;
    let resolved = run(&imc, &net).unwrap().resolved;
    assert!(
        resolved.sigma >= 0.05 / 2.0 && resolved.sigma <= 0.05 * 2.0,
        "selected IMC bandwidth {} not within a factor 2 of 0.05",
        resolved.sigma
    );
}
