use eon_dpp::corroborate::costs_agree;
use eon_dpp::sim::{gabriel_source, resolve_network, route, Algorithm, EventKind, GammaMode, SimConfig, Simulation, StepOutcome};

fn config(seed: u64, load: f64) -> SimConfig {
    let mut c = SimConfig::new(gabriel_source(12, seed), 32);
    c.gamma = GammaMode::Units(3);
    c.offered_load = load;
    c.horizon_days = 50.0;
    c.warmup_days = 10.0;
    c.seed = seed;
    c.record_timing = false;
    c
}

#[test]
fn exact_dominates_heuristic_at_every_arrival() {
    let mut checked = 0;
    for seed in 0..6 {
        let c = config(seed, 1.0);
        let (net, _) = resolve_network(&c.network, c.omega).unwrap();
        let mut sim = Simulation::new(c, net).unwrap();
        loop {
            if let Some(EventKind::Arrival { demand, .. }) = sim.peek().map(|e| e.kind.clone()) {
                let (exact, _) = route(Algorithm::Exact, sim.network(), &demand, sim.modulation()).unwrap();
                let (heur, _) = route(Algorithm::EdgeExclusion, sim.network(), &demand, sim.modulation()).unwrap();
                if let Some(h) = heur {
                    let e = exact.expect("exact search must find a pair when the heuristic does");
                    assert!(e.cost <= h.cost || costs_agree(e.cost, h.cost));
                }
                checked += 1;
            }
            if sim.step().unwrap().is_none() {
                break;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn conservation_holds_throughout() {
    for seed in 0..4 {
        let c = config(seed, 2.0);
        let (net, _) = resolve_network(&c.network, c.omega).unwrap();
        let full = net.with_full_spectrum();
        let mut sim = Simulation::new(c, net).unwrap();
        let mut teardowns = 0;
        while let Some(step) = sim.step().unwrap() {
            sim.check_conservation().unwrap();
            teardowns += usize::from(matches!(step, StepOutcome::Teardown { .. }));
        }
        assert!(teardowns > 0);
        sim.drain().unwrap();
        assert_eq!(sim.network(), &full);
    }
}

#[test]
fn events_never_go_back_in_time() {
    let c = config(3, 1.0);
    let (net, _) = resolve_network(&c.network, c.omega).unwrap();
    let mut sim = Simulation::new(c, net).unwrap();
    let mut last = 0.0;
    while sim.step().unwrap().is_some() {
        assert!(sim.now() >= last);
        last = sim.now();
    }
    assert!(last <= 50.0);
}

#[test]
fn utilization_and_blocking_rise_with_load() {
    let mean = |load: f64, f: fn(&eon_dpp::sim::RunStats) -> f64| {
        (0..8).map(|s| f(&eon_dpp::sim::run(&config(s, load)).unwrap())).sum::<f64>() / 8.0
    };
    assert!(mean(0.2, |s| s.mean_utilization) < mean(1.5, |s| s.mean_utilization));
    assert!(mean(0.2, |s| s.bbp) < mean(1.5, |s| s.bbp));
}

#[test]
fn measured_rate_matches_configured_rate() {
    let mut c = config(1, 1.0);
    c.horizon_days = 400.0;
    c.warmup_days = 0.0;
    let (net, _) = resolve_network(&c.network, c.omega).unwrap();
    let mut sim = Simulation::new(c, net).unwrap();
    let lambda = sim.lambda();
    let stats = sim.run_to_end().unwrap();
    let expected = lambda * 400.0;
    // Poisson count: allow four standard deviations.
    assert!((stats.arrivals as f64 - expected).abs() <= 4.0 * expected.sqrt(), "{} vs {expected}", stats.arrivals);
}
