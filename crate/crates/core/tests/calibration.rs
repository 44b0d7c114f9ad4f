//! Qualitative checks on the default synthetic fleet and its network.

use std::sync::OnceLock;

use evcascade::experiments::{self as exp, ExperimentPlan};
use evcascade::mobility::{build_profiles, generate_synthetic_fleet, GeneratorConfig, MobilityConfig};
use evcascade::proximity_net::{extract_network, NetworkConfig, ProximityGraph};
use evcascade::rng::DEFAULT_MASTER_SEED;

fn network() -> &'static ProximityGraph {
    static NET: OnceLock<ProximityGraph> = OnceLock::new();
    NET.get_or_init(|| {
        let fleet = generate_synthetic_fleet(&GeneratorConfig::default(), DEFAULT_MASTER_SEED).unwrap();
        let profiles = build_profiles(&fleet.records, &MobilityConfig::default()).profiles;
        extract_network(&profiles, &NetworkConfig::default()).unwrap().network
    })
}

#[test]
fn hub_reaches_about_38_percent() {
    let net = network();
    let share = net.graph().max_degree().unwrap() as f64 / net.len() as f64;
    assert!((share - 0.38).abs() <= 0.10, "max degree share {share:.3}");
}

#[test]
fn suitable_class_and_seed_count() {
    let net = network();
    let c1 = net.suitable_nodes().len();
    // about 30% of the pruned network
    assert!((230..=300).contains(&c1), "{c1}");
    let mut rng = evcascade::rng::stream(1, "calibration", 0);
    let seeds = exp::sample_seeds(net, 0.25, &mut rng).unwrap();
    assert_eq!(seeds.len(), exp::round_half_up(0.25 * c1 as f64));
}

#[test]
fn alpha_extremes() {
    let net = network();
    let plan = ExperimentPlan { alpha_grid: vec![0.01, 0.7], ..ExperimentPlan::default() };
    let sweep = exp::sweep_alpha(&plan, net, 0).unwrap();
    assert!(sweep.points[0].mean >= 0.9, "{}", sweep.points[0].mean);
    let last = &sweep.points[1];
    assert!((last.mean - last.mean_seed_fraction()).abs() <= 0.02);
}

#[test]
fn cascade_onset_between_10_and_25_percent_seeds() {
    let net = network();
    let plan = ExperimentPlan::default();
    let sweep = exp::sweep_eta(&plan, net, 0.15, &[0.10, 0.25], 0).unwrap();
    let (low, high) = (sweep.points[0].mean, sweep.points[1].mean);
    let low_seeds = sweep.points[0].mean_seed_fraction();
    assert!(low - low_seeds < 0.05, "eta 0.10 spreads: {low:.3}");
    assert!(high > 3.0 * low, "no onset: {low:.3} -> {high:.3}");
}

#[test]
fn eta_and_rho_curves_are_nondecreasing() {
    let net = network();
    let plan = ExperimentPlan::default();
    let eta = exp::sweep_eta(&plan, net, 0.15, &exp::default_eta_grid(), 0).unwrap();
    assert!(eta.points.windows(2).all(|w| w[1].mean + w[0].std_error().max(w[1].std_error()) >= w[0].mean));
    let inc_plan = ExperimentPlan { eta: exp::INCENTIVE_ETA, ..plan };
    let study = exp::incentive_study(&inc_plan, net, &exp::IncentiveStudyConfig::default(), 0).unwrap();
    for (_, curve) in &study.curves {
        assert!(curve.points.windows(2).all(|w| w[1].mean + w[0].std_error().max(w[1].std_error()) >= w[0].mean));
    }
}
